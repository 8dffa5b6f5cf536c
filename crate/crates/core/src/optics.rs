//! Paraxial thin-lens model of the LED -> diffuser -> lens-array stack.
//!
//! Forward direction: a point on the LED plane at `(u, -g)` seen through a lens
//! centred at `L` lands on plane `z` along the chief ray
//! `x = L - (u - L) * z / g`. Inverse direction: the source position whose
//! chief ray through `L` reaches an eye at `(x_e, z_e)` is
//! `u* = L - (x_e - L) * g / z_e`.

use std::fmt::Write as _;

use crate::blur::SmoothedBox;
use crate::error::{Error, Result};
use crate::format::sci9;
use crate::geometry::{DisplayGeometry, Eye, LedMask};

/// Cell width used when a profile is requested on a single point.
const SINGLE_POINT_CELL: f64 = 1e-6;

fn check_positive(what: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveDistance { what, value })
    }
}

/// Centres of the lens array, equally spaced and symmetric about `x = 0`.
pub fn lens_centers(geometry: &DisplayGeometry) -> Vec<f64> {
    (0..geometry.lens_count).map(|k| geometry.lens_center(k)).collect()
}

/// Centres of the LED columns.
pub fn led_centers(geometry: &DisplayGeometry) -> Vec<f64> {
    (0..geometry.led_column_count).map(|c| geometry.led_center(c)).collect()
}

/// Lateral position on plane `z` of the pupil formed by a point source at
/// `led_x` through the lens at `lens_x`.
///
/// On the image plane this is the sharp image; elsewhere it is the chief-ray
/// intersection, which is also the midpoint of the defocus blur.
pub fn image_point(geometry: &DisplayGeometry, led_x: f64, lens_x: f64, z: f64) -> Result<f64> {
    check_positive("z", z)?;
    check_positive("led_lens_gap", geometry.led_lens_gap)?;
    Ok(lens_x - (led_x - lens_x) * (z / geometry.led_lens_gap))
}

/// Fraction of a Lambertian line source's emission that passes through the
/// aperture of the lens centred at `lens_x`.
///
/// In two dimensions a Lambertian emitter has `sin(theta)` uniformly
/// distributed on `[-1, 1]`.
pub fn lambertian_acceptance(geometry: &DisplayGeometry, led_x: f64, lens_x: f64) -> f64 {
    let g = geometry.led_lens_gap;
    let half = geometry.lens_aperture / 2.0;
    let sin_to = |edge: f64| {
        let d = edge - led_x;
        d / (d * d + g * g).sqrt()
    };
    0.5 * (sin_to(lens_x + half) - sin_to(lens_x - half))
}

/// Width of the geometric blur disk of one lens aperture on plane `z`.
pub fn defocus_width(geometry: &DisplayGeometry, z: f64) -> f64 {
    geometry.lens_aperture * (1.0 - z * geometry.image_vergence()).abs()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjugatePupil {
    pub lens: usize,
    pub pupil_x: f64,
    pub acceptance: f64,
}

/// The primary pupil of a source and its conjugates through the
/// `max_neighbors` lenses on either side of the lens nearest the source.
pub fn conjugate_pupils(
    geometry: &DisplayGeometry,
    led_x: f64,
    z: f64,
    max_neighbors: usize,
) -> Result<Vec<ConjugatePupil>> {
    check_positive("z", z)?;
    check_positive("led_lens_gap", geometry.led_lens_gap)?;
    let primary = geometry.nearest_lens(led_x);
    let lo = primary.saturating_sub(max_neighbors);
    let hi = (primary + max_neighbors).min(geometry.lens_count - 1);
    let mut pupils = Vec::with_capacity(hi - lo + 1);
    for lens in lo..=hi {
        let lens_x = geometry.lens_center(lens);
        let acceptance = lambertian_acceptance(geometry, led_x, lens_x);
        if acceptance > 0.0 {
            pupils.push(ConjugatePupil {
                lens,
                pupil_x: image_point(geometry, led_x, lens_x, z)?,
                acceptance,
            });
        }
    }
    Ok(pupils)
}

/// Backlight intensity sampled along a lateral line on plane `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntensityProfile {
    z: f64,
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl IntensityProfile {
    pub fn new(z: f64, xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_grid(&xs)?;
        if values.len() != xs.len() {
            return Err(Error::ProfileMismatch);
        }
        if let Some(i) = values.iter().position(|v| !(*v >= 0.0)) {
            return Err(Error::Validation {
                field: format!("values[{i}]"),
                reason: format!("intensity {} is negative or NaN", values[i]),
            });
        }
        Ok(IntensityProfile { z, xs, values })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Index and value of the (first) maximum.
    pub fn peak(&self) -> (usize, f64) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best })
    }

    /// Peak restricted to `[lo, hi]`.
    pub fn peak_within(&self, lo: f64, hi: f64) -> Option<(usize, f64)> {
        self.xs
            .iter()
            .zip(&self.values)
            .enumerate()
            .filter(|(_, (x, _))| **x >= lo && **x <= hi)
            .fold(None, |best: Option<(usize, f64)>, (i, (_, &v))| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((i, v)),
            })
    }

    /// Full width at half maximum of the peak at `index`, with linear
    /// interpolation of the half-maximum crossings.
    pub fn fwhm_at(&self, index: usize) -> f64 {
        let half = self.values[index] / 2.0;
        let n = self.values.len();
        let mut right = self.xs[n - 1];
        for i in index..n - 1 {
            if self.values[i + 1] < half {
                right = lerp_cross(self.xs[i], self.values[i], self.xs[i + 1], self.values[i + 1], half);
                break;
            }
        }
        let mut left = self.xs[0];
        for i in (1..=index).rev() {
            if self.values[i - 1] < half {
                left = lerp_cross(self.xs[i], self.values[i], self.xs[i - 1], self.values[i - 1], half);
                break;
            }
        }
        right - left
    }

    /// Trapezoidal integral over `[lo, hi]`, clipped to the grid, with linear
    /// interpolation at the window edges.
    pub fn integrate(&self, lo: f64, hi: f64) -> f64 {
        let n = self.xs.len();
        if n < 2 {
            return if n == 1 && self.xs[0] >= lo && self.xs[0] <= hi {
                self.values[0] * SINGLE_POINT_CELL
            } else {
                0.0
            };
        }
        let lo = lo.max(self.xs[0]);
        let hi = hi.min(self.xs[n - 1]);
        if hi <= lo {
            return 0.0;
        }
        let mut total = 0.0;
        for i in 0..n - 1 {
            let (x0, x1) = (self.xs[i], self.xs[i + 1]);
            let a = x0.max(lo);
            let b = x1.min(hi);
            if b <= a {
                continue;
            }
            let at = |x: f64| self.values[i] + (self.values[i + 1] - self.values[i]) * (x - x0) / (x1 - x0);
            total += 0.5 * (at(a) + at(b)) * (b - a);
        }
        total
    }

    pub fn total(&self) -> f64 {
        self.integrate(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// CSV export: header `x_m,intensity`, nine significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_m,intensity\n");
        for (x, v) in self.xs.iter().zip(&self.values) {
            let _ = writeln!(out, "{},{}", sci9(*x), sci9(*v));
        }
        out
    }
}

fn lerp_cross(x0: f64, v0: f64, x1: f64, v1: f64, level: f64) -> f64 {
    if v0 == v1 {
        return x0;
    }
    x0 + (x1 - x0) * (v0 - level) / (v0 - v1)
}

pub(crate) fn check_grid(xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(i) = xs.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::UnsortedGrid { index: i + 1 });
    }
    Ok(())
}

/// Uniform grid from `lo` to `hi` inclusive (within rounding) at `step`.
pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || hi < lo {
        return Vec::new();
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| lo + i as f64 * step).collect()
}

fn cell_edges(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    if n == 1 {
        return vec![xs[0] - SINGLE_POINT_CELL / 2.0, xs[0] + SINGLE_POINT_CELL / 2.0];
    }
    let mut edges = Vec::with_capacity(n + 1);
    edges.push(xs[0] - (xs[1] - xs[0]) / 2.0);
    edges.extend(xs.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    edges.push(xs[n - 1] + (xs[n - 1] - xs[n - 2]) / 2.0);
    edges
}

/// Intensity on plane `z` from every lit column, imaged through every lens.
///
/// Each column is a unit-power strip of width `led_strip_width`, blurred by
/// the diffuser, scaled by the lateral magnification `z / g`, widened by the
/// aperture's defocus disk and weighted by its Lambertian acceptance into
/// that lens. Values are cell averages: the energy falling in the cell around
/// each sample divided by the cell width.
pub fn illumination_profile(
    geometry: &DisplayGeometry,
    mask: &LedMask,
    z: f64,
    xs: &[f64],
) -> Result<IntensityProfile> {
    check_grid(xs)?;
    check_positive("z", z)?;
    check_positive("led_lens_gap", geometry.led_lens_gap)?;
    let g = geometry.led_lens_gap;
    let scale = z / g;
    let kernel = SmoothedBox::new(
        geometry.led_strip_width * scale,
        defocus_width(geometry, z),
        geometry.diffuser_sigma * scale,
    );
    let reach = kernel.half_support();
    let edges = cell_edges(xs);
    let widths: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
    let mut values = vec![0.0; xs.len()];
    let mut cdf = vec![0.0; edges.len()];

    for column in mask.lit_columns().filter(|&c| c < geometry.led_column_count) {
        let u = geometry.led_center(column);
        for lens in 0..geometry.lens_count {
            let lens_x = geometry.lens_center(lens);
            let weight = lambertian_acceptance(geometry, u, lens_x);
            if weight <= 0.0 {
                continue;
            }
            let center = lens_x - (u - lens_x) * scale;
            let first = edges.partition_point(|&e| e < center - reach);
            let last = edges.partition_point(|&e| e <= center + reach);
            if first >= edges.len() || last == 0 {
                continue;
            }
            // cells fully left of the kernel get nothing; evaluate the CDF only
            // on the edges that can see it
            let lo = first.saturating_sub(1);
            let hi = last.min(edges.len() - 1);
            for e in lo..=hi {
                cdf[e] = kernel.cdf(edges[e] - center);
            }
            for i in lo..hi {
                let mass = (cdf[i + 1] - cdf[i]).max(0.0);
                if mass > 0.0 {
                    values[i] += weight * mass / widths[i];
                }
            }
        }
    }
    IntensityProfile::new(z, xs.to_vec(), values)
}

/// Source position on the LED plane whose chief ray through `lens_x` reaches
/// `eye`.
pub fn source_target(geometry: &DisplayGeometry, lens_x: f64, eye: &Eye) -> f64 {
    lens_x - (eye.x - lens_x) * (geometry.led_lens_gap / eye.z)
}

/// Columns to light so that every lens forms an exit pupil at `eye`.
///
/// For each lens the nearest physical column to the source target is lit when
/// the target lies within half a pitch of it; targets beyond the ends of the
/// array select nothing.
pub fn select_columns(geometry: &DisplayGeometry, eye: &Eye) -> Result<LedMask> {
    check_positive("eye.z", eye.z)?;
    check_positive("led_lens_gap", geometry.led_lens_gap)?;
    let mut mask = LedMask::all_off(geometry.led_column_count);
    for lens in 0..geometry.lens_count {
        let target = source_target(geometry, geometry.lens_center(lens), eye);
        if let Some(c) = geometry.column_at(target) {
            mask.set(c, true);
        }
    }
    Ok(mask)
}

/// Columns that must stay dark while someone other than `other_eyes` is
/// served: the union of their selections, dilated by `ceil(margin / pitch)`.
pub fn forbidden_columns(geometry: &DisplayGeometry, other_eyes: &[Eye], margin: f64) -> Result<LedMask> {
    if !(margin >= 0.0) {
        return Err(Error::Validation { field: "margin".into(), reason: format!("{margin} is negative") });
    }
    let mut union = LedMask::all_off(geometry.led_column_count);
    for eye in other_eyes {
        union = union.union(&select_columns(geometry, eye)?);
    }
    let dilation = (margin / geometry.led_pitch - 1e-9).ceil().max(0.0) as usize;
    Ok(union.dilate(dilation))
}

/// Partition of the whole LED array into a left and a right view zone.
///
/// A column belongs to the eye whose nearest per-lens source target (every
/// lens, including targets beyond the array) is closer. A guard band of
/// `guard_columns` switches off the columns within `guard_columns / 2`
/// pitches of each zone boundary, i.e. `|d_left - d_right| < guard * pitch`.
pub fn view_zones(
    geometry: &DisplayGeometry,
    left: &Eye,
    right: &Eye,
    guard_columns: usize,
) -> Result<(LedMask, LedMask)> {
    check_positive("eye.z", left.z)?;
    check_positive("eye.z", right.z)?;
    let targets = |eye: &Eye| -> Vec<f64> {
        (0..geometry.lens_count).map(|k| source_target(geometry, geometry.lens_center(k), eye)).collect()
    };
    let (tl, tr) = (targets(left), targets(right));
    let nearest = |ts: &[f64], u: f64| ts.iter().map(|t| (t - u).abs()).fold(f64::INFINITY, f64::min);
    let n = geometry.led_column_count;
    let mut zl = LedMask::all_off(n);
    let mut zr = LedMask::all_off(n);
    let guard = guard_columns as f64 * geometry.led_pitch;
    for c in 0..n {
        let u = geometry.led_center(c);
        let (dl, dr) = (nearest(&tl, u), nearest(&tr, u));
        if guard > 0.0 && (dl - dr).abs() < guard {
            continue;
        }
        if dl <= dr {
            zl.set(c, true);
        } else {
            zr.set(c, true);
        }
    }
    Ok((zl, zr))
}

/// Windowed ratio of unintended to intended light around `eye_x`.
pub fn crosstalk_ratio(
    intended: &IntensityProfile,
    unintended: &IntensityProfile,
    eye_x: f64,
    window: f64,
) -> Result<f64> {
    if !(window > 0.0) {
        return Err(Error::BadWindow(window));
    }
    if intended.z != unintended.z || intended.xs != unintended.xs {
        return Err(Error::ProfileMismatch);
    }
    let (lo, hi) = (eye_x - window / 2.0, eye_x + window / 2.0);
    let signal = intended.integrate(lo, hi);
    let total = intended.total();
    if !(signal > 1e-15 * total) || total <= 0.0 {
        return Err(Error::ZeroIntendedSignal);
    }
    Ok(unintended.integrate(lo, hi) / signal)
}
