#![allow(dead_code)]

pub mod ray_oracle;

use tdm3d::interleave::{replicate, ViewImage};
use tdm3d::viewsim::PanelFrame;
use tdm3d::{DisplayGeometry, Side};

/// Full-white panel frames, left then right.
pub fn white_frames(g: &DisplayGeometry, count: usize) -> Vec<PanelFrame> {
    let img = replicate(&ViewImage::filled(g.subpixel_columns() / 2, 1, 1.0).unwrap());
    (0..count)
        .map(|k| PanelFrame::uniform(img.clone(), if k % 2 == 0 { Side::Left } else { Side::Right }))
        .collect()
}

/// Default stack with a different lens count, lenses tiling the panel.
pub fn with_lenses(lens_count: usize) -> DisplayGeometry {
    let g = DisplayGeometry::prototype_27in();
    let pitch = g.screen_width / lens_count as f64;
    DisplayGeometry { lens_count, lens_pitch: pitch, lens_aperture: pitch, ..g }
}

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut s = f(lo) + f(hi);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + i as f64 * h);
    }
    s * h / 3.0
}

/// Standard normal CDF via the complementary error function, computed with
/// a continued-fraction-free series good to ~1e-15 (Abramowitz-Stegun 7.1.26
/// is too coarse for the quadrature comparisons).
pub fn phi(x: f64) -> f64 {
    0.5 * erfc_series(-x / std::f64::consts::SQRT_2)
}

fn erfc_series(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc_series(-x);
    }
    if x < 2.5 {
        // Maclaurin series of erf
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= -x * x / n;
            let add = term / (2.0 * n + 1.0);
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum
    } else {
        // Lentz continued fraction for the tail
        let mut f = x;
        let mut c = x;
        let mut d = 0.0;
        for i in 1..200 {
            let a = i as f64 / 2.0;
            d = x + a * d;
            d = 1.0 / d;
            c = x + a / c;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x * x).exp() / (f * std::f64::consts::PI.sqrt())
    }
}
