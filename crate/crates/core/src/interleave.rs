//! Mapping of left/right source images onto panel sub-pixel columns.

use crate::error::{Error, Result};
use crate::geometry::Side;

/// Monochrome image on the sub-pixel grid, samples in `[0, 1]`, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct ViewImage {
    width: usize,
    height: usize,
    samples: Vec<f32>,
}

impl ViewImage {
    pub fn new(width: usize, height: usize, samples: Vec<f32>) -> Result<Self> {
        if samples.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} samples for a {width}x{height} image",
                samples.len()
            )));
        }
        if let Some(index) = samples.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::SampleOutOfRange { index, value: samples[index] });
        }
        Ok(ViewImage { width, height, samples })
    }

    pub fn filled(width: usize, height: usize, value: f32) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f32) -> Result<Self> {
        let samples = (0..height).flat_map(|r| (0..width).map(move |c| (r, c))).map(|(r, c)| f(r, c)).collect();
        Self::new(width, height, samples)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.samples[row * self.width + col]
    }

    pub fn row(&self, row: usize) -> &[f32] {
        &self.samples[row * self.width..(row + 1) * self.width]
    }

    fn same_shape(&self, other: &ViewImage) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(())
    }
}

/// Exact rational number with a positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Validation { field: "slant".into(), reason: "zero denominator".into() });
        }
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        Ok(Rational { num, den })
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    /// `floor(k * self)`.
    pub fn floor_mul(self, k: i64) -> i64 {
        (k * self.num).div_euclid(self.den)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InterleavePattern {
    pub columns_per_lens: usize,
    /// Horizontal column offset per row.
    pub slant: Rational,
    /// Columns the assignment moves by from one field to the next.
    pub field_shift: i64,
}

impl Default for InterleavePattern {
    fn default() -> Self {
        InterleavePattern { columns_per_lens: 2, slant: Rational::ZERO, field_shift: 0 }
    }
}

impl InterleavePattern {
    pub fn validate(&self) -> Result<()> {
        if self.columns_per_lens == 0 {
            return Err(Error::Validation {
                field: "columns_per_lens".into(),
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    /// View that sources panel pixel `(row, col)` in `field`.
    pub fn side_at(&self, row: usize, col: usize, field: usize) -> Side {
        let period = 2 * self.columns_per_lens as i64;
        let m = (col as i64 - self.slant.floor_mul(row as i64) - field as i64 * self.field_shift).rem_euclid(period);
        if m < self.columns_per_lens as i64 {
            Side::Left
        } else {
            Side::Right
        }
    }
}

/// View assignment of every panel pixel, row major.
pub fn source_map(pattern: &InterleavePattern, width: usize, height: usize, field: usize) -> Vec<Side> {
    (0..height).flat_map(|r| (0..width).map(move |c| pattern.side_at(r, c, field))).collect()
}

/// Panel frame twice as wide as the sources: pixel `(r, c)` takes column
/// `c / 2` of whichever view the pattern assigns to it.
pub fn interleave(left: &ViewImage, right: &ViewImage, pattern: &InterleavePattern, field: usize) -> Result<ViewImage> {
    left.same_shape(right)?;
    pattern.validate()?;
    let width = 2 * left.width;
    let mut samples = Vec::with_capacity(width * left.height);
    for r in 0..left.height {
        for c in 0..width {
            let src = match pattern.side_at(r, c, field) {
                Side::Left => left,
                Side::Right => right,
            };
            samples.push(src.get(r, c / 2));
        }
    }
    Ok(ViewImage { width, height: left.height, samples })
}

/// Inverse of [`interleave`]. Source pixels that no panel pixel sampled are 0.
pub fn deinterleave(frame: &ViewImage, pattern: &InterleavePattern, field: usize) -> Result<(ViewImage, ViewImage)> {
    if !frame.width.is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!("panel width {} is odd", frame.width)));
    }
    pattern.validate()?;
    let width = frame.width / 2;
    let mut left = vec![0.0f32; width * frame.height];
    let mut right = vec![0.0f32; width * frame.height];
    for r in 0..frame.height {
        for c in 0..frame.width {
            let dst = match pattern.side_at(r, c, field) {
                Side::Left => &mut left,
                Side::Right => &mut right,
            };
            dst[r * width + c / 2] = frame.get(r, c);
        }
    }
    Ok((
        ViewImage { width, height: frame.height, samples: left },
        ViewImage { width, height: frame.height, samples: right },
    ))
}

/// Each source pixel doubled horizontally, for fields that show one view on
/// the whole panel.
pub fn replicate(view: &ViewImage) -> ViewImage {
    let samples = view.samples.iter().flat_map(|&v| [v, v]).collect();
    ViewImage { width: 2 * view.width, height: view.height, samples }
}
