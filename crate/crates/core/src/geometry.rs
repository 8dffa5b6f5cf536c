//! Physical parameters of the backlight stack, viewer eyes and LED column masks.
//!
//! Coordinates are two-dimensional: `x` is lateral (screen-centre origin,
//! positive towards the viewer's right) and `z` is the distance in front of the
//! lens plane. The LED plane sits at `z = -led_lens_gap`. The panel is treated
//! as coincident with the lens plane.

use std::fmt;

use crate::error::{Error, Result};

/// Interpupillary distance used when a viewer is given by its centre only.
pub const DEFAULT_IPD: f64 = 0.063;

const INCH: f64 = 0.0254;

/// Full stack description: LED columns, diffuser, lens array, panel and the
/// nominal viewing distance. All lengths are in meters.
#[derive(Clone, Debug, PartialEq)]
pub struct DisplayGeometry {
    pub screen_width: f64,
    pub screen_height: f64,
    pub panel_cols: usize,
    pub panel_rows: usize,
    pub subpixels_per_pixel: usize,
    pub led_column_count: usize,
    pub led_pitch: f64,
    /// Emissive width of one column.
    pub led_strip_width: f64,
    pub lens_pitch: f64,
    pub lens_count: usize,
    pub lens_aperture: f64,
    pub focal_length: f64,
    /// Object distance from the LED plane to the lens plane.
    pub led_lens_gap: f64,
    /// Gaussian blur standard deviation applied at the LED plane.
    pub diffuser_sigma: f64,
    pub design_distance: f64,
    /// Effective LCD field rate in Hz.
    pub panel_field_rate: f64,
}

impl DisplayGeometry {
    /// The 27" 16:9, 2560x1440, 96-column, 240 Hz bench viewed at 1 m.
    ///
    /// Twenty-one lenses span the panel (about 4.6 LED columns per lens) and
    /// the LED-lens gap is 2/7 m, which puts the pupil repeat period near
    /// twice the interpupillary distance.
    pub fn prototype_27in() -> Self {
        let diagonal = 27.0 * INCH;
        let hyp = (16.0f64 * 16.0 + 9.0 * 9.0).sqrt();
        let screen_width = diagonal * 16.0 / hyp;
        let screen_height = diagonal * 9.0 / hyp;
        let led_column_count = 96;
        let lens_count = 21;
        let led_pitch = screen_width / led_column_count as f64;
        let lens_pitch = screen_width / lens_count as f64;
        let design_distance = 1.0;
        let led_lens_gap = 2.0 / 7.0;
        DisplayGeometry {
            screen_width,
            screen_height,
            panel_cols: 2560,
            panel_rows: 1440,
            subpixels_per_pixel: 3,
            led_column_count,
            led_pitch,
            led_strip_width: 0.4 * led_pitch,
            lens_pitch,
            lens_count,
            lens_aperture: lens_pitch,
            focal_length: focal_for(led_lens_gap, design_distance),
            led_lens_gap,
            diffuser_sigma: 0.15 * led_pitch,
            design_distance,
            panel_field_rate: 240.0,
        }
    }

    /// Checks the general invariants and, in addition, that the LED plane is
    /// imaged sharply onto the design plane.
    pub fn design_matched(self) -> Result<Self> {
        self.validate()?;
        let residual =
            1.0 / self.led_lens_gap + 1.0 / self.design_distance - 1.0 / self.focal_length;
        if residual.abs() >= 1e-9 {
            return Err(Error::InvalidGeometry {
                field: "focal_length",
                reason: format!("lens equation residual {residual:e} 1/m is not below 1e-9"),
            });
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let lengths = [
            ("screen_width", self.screen_width),
            ("screen_height", self.screen_height),
            ("led_pitch", self.led_pitch),
            ("led_strip_width", self.led_strip_width),
            ("lens_pitch", self.lens_pitch),
            ("lens_aperture", self.lens_aperture),
            ("focal_length", self.focal_length),
            ("led_lens_gap", self.led_lens_gap),
            ("diffuser_sigma", self.diffuser_sigma),
            ("design_distance", self.design_distance),
            ("panel_field_rate", self.panel_field_rate),
        ];
        for (field, value) in lengths {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(field, format!("must be positive and finite, got {value}")));
            }
        }
        let counts = [
            ("panel_cols", self.panel_cols),
            ("panel_rows", self.panel_rows),
            ("subpixels_per_pixel", self.subpixels_per_pixel),
            ("lens_count", self.lens_count),
        ];
        for (field, value) in counts {
            if value == 0 {
                return Err(invalid(field, "must be at least 1".into()));
            }
        }
        if self.led_column_count < 2 {
            return Err(invalid(
                "led_column_count",
                format!("must be at least 2, got {}", self.led_column_count),
            ));
        }
        if self.lens_aperture > self.lens_pitch * (1.0 + 1e-12) {
            return Err(invalid("lens_aperture", "must not exceed lens_pitch".into()));
        }
        let span = self.led_pitch * self.led_column_count as f64;
        if span > self.screen_width * 1.01 {
            return Err(invalid(
                "led_pitch",
                format!("columns span {span} m, wider than the panel {} m", self.screen_width),
            ));
        }
        Ok(())
    }

    pub fn led_center(&self, column: usize) -> f64 {
        (column as f64 - (self.led_column_count as f64 - 1.0) / 2.0) * self.led_pitch
    }

    pub fn lens_center(&self, lens: usize) -> f64 {
        (lens as f64 - (self.lens_count as f64 - 1.0) / 2.0) * self.lens_pitch
    }

    /// Index of the lens whose centre is nearest to `x` (lower index on ties).
    pub fn nearest_lens(&self, x: f64) -> usize {
        let pos = x / self.lens_pitch + (self.lens_count as f64 - 1.0) / 2.0;
        round_half_down(pos).clamp(0, self.lens_count as i64 - 1) as usize
    }

    /// The lens whose aperture covers `x`, if any.
    pub fn covering_lens(&self, x: f64) -> Option<usize> {
        let k = self.nearest_lens(x);
        ((x - self.lens_center(k)).abs() <= self.lens_aperture / 2.0).then_some(k)
    }

    /// Physical column whose centre is nearest to `u`, provided `u` is within
    /// half a pitch of it. Exact ties go to the lower index.
    pub fn column_at(&self, u: f64) -> Option<usize> {
        let pos = u / self.led_pitch + (self.led_column_count as f64 - 1.0) / 2.0;
        let c = round_half_down(pos);
        if c < 0 || c >= self.led_column_count as i64 {
            return None;
        }
        let c = c as usize;
        ((u - self.led_center(c)).abs() <= self.led_pitch / 2.0).then_some(c)
    }

    /// Number of sub-pixel columns across the panel.
    pub fn subpixel_columns(&self) -> usize {
        self.panel_cols * self.subpixels_per_pixel
    }

    /// Optical power minus the object vergence, `1/f - 1/g`. The image of the
    /// LED plane sits at `1 / image_vergence()` when positive.
    pub fn image_vergence(&self) -> f64 {
        1.0 / self.focal_length - 1.0 / self.led_lens_gap
    }

    /// Lateral repeat period of conjugate pupils at plane `z`.
    pub fn pupil_period(&self, z: f64) -> f64 {
        self.lens_pitch * (1.0 + z / self.led_lens_gap)
    }
}

impl Default for DisplayGeometry {
    fn default() -> Self {
        Self::prototype_27in()
    }
}

fn invalid(field: &'static str, reason: String) -> Error {
    Error::InvalidGeometry { field, reason }
}

/// Focal length that images an object at `gap` onto a plane at `distance`.
pub fn focal_for(gap: f64, distance: f64) -> f64 {
    gap * distance / (gap + distance)
}

fn round_half_down(v: f64) -> i64 {
    let r = v.round();
    if (r - v).abs() == 0.5 && r > v {
        (r - 1.0) as i64
    } else {
        r as i64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eye {
    pub x: f64,
    pub z: f64,
    pub side: Side,
    pub viewer_id: u32,
}

impl Eye {
    pub fn new(x: f64, z: f64, side: Side, viewer_id: u32) -> Self {
        Eye { x, z, side, viewer_id }
    }

    pub fn mirrored(self) -> Self {
        Eye { x: -self.x, side: self.side.other(), ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewer {
    pub id: u32,
    pub left: Eye,
    pub right: Eye,
}

impl Viewer {
    /// Viewer whose eyes sit `ipd / 2` either side of `x`.
    pub fn centered(id: u32, x: f64, z: f64, ipd: f64) -> Self {
        Viewer {
            id,
            left: Eye::new(x - ipd / 2.0, z, Side::Left, id),
            right: Eye::new(x + ipd / 2.0, z, Side::Right, id),
        }
    }

    pub fn eyes(&self) -> [Eye; 2] {
        [self.left, self.right]
    }

    pub fn eye(&self, side: Side) -> Eye {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }
}

/// On/off state of every backlight column for one phase.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LedMask {
    bits: Vec<bool>,
}

impl LedMask {
    pub fn all_off(len: usize) -> Self {
        LedMask { bits: vec![false; len] }
    }

    pub fn all_on(len: usize) -> Self {
        LedMask { bits: vec![true; len] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        LedMask { bits }
    }

    /// Mask with the given columns lit. Out-of-range indices are ignored.
    pub fn from_columns(len: usize, columns: impl IntoIterator<Item = usize>) -> Self {
        let mut mask = Self::all_off(len);
        for c in columns {
            if c < len {
                mask.bits[c] = true;
            }
        }
        mask
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, column: usize) -> bool {
        self.bits.get(column).copied().unwrap_or(false)
    }

    pub fn set(&mut self, column: usize, on: bool) {
        self.bits[column] = on;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_lit(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_dark(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn lit_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn union(&self, other: &LedMask) -> LedMask {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &LedMask) -> LedMask {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &LedMask) -> LedMask {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn is_disjoint(&self, other: &LedMask) -> bool {
        self.intersection(other).is_dark()
    }

    fn zip_with(&self, other: &LedMask, f: impl Fn(bool, bool) -> bool) -> LedMask {
        let len = self.len().max(other.len());
        LedMask { bits: (0..len).map(|i| f(self.get(i), other.get(i))).collect() }
    }

    /// Grows every lit run by `columns` on each side.
    pub fn dilate(&self, columns: usize) -> LedMask {
        let n = self.len();
        let mut out = self.clone();
        for c in self.lit_columns() {
            let lo = c.saturating_sub(columns);
            let hi = (c + columns).min(n.saturating_sub(1));
            for bit in &mut out.bits[lo..=hi] {
                *bit = true;
            }
        }
        out
    }

    /// Column order reversed (the mask seen in a mirror).
    pub fn reversed(&self) -> LedMask {
        LedMask { bits: self.bits.iter().rev().copied().collect() }
    }

    /// Fixed-width hexadecimal, most significant digit first; column 0 is the
    /// least significant bit.
    pub fn to_hex(&self) -> String {
        let digits = self.len().div_ceil(4).max(1);
        (0..digits)
            .rev()
            .map(|d| {
                let nibble = (0..4).fold(0u32, |acc, b| acc | ((self.get(4 * d + b) as u32) << b));
                char::from_digit(nibble, 16).unwrap()
            })
            .collect()
    }
}

impl fmt::Debug for LedMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "LedMask({s})")
    }
}
