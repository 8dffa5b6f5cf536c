//! Binary PGM (P5) and PPM (P6) with maxval 255.

use crate::error::{Error, Result};
use crate::interleave::ViewImage;

fn quantize(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn write_pgm(image: &ViewImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(image.samples().iter().map(|&v| quantize(v)));
    out
}

/// Grey image from unbounded values, scaled so the largest becomes white.
pub fn write_pgm_normalized(width: usize, height: usize, values: &[f64]) -> Vec<u8> {
    let max = values.iter().copied().fold(0.0f64, f64::max);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend(values.iter().map(|&v| if max > 0.0 { (v / max * 255.0).round().clamp(0.0, 255.0) as u8 } else { 0 }));
    out
}

pub fn write_ppm(width: usize, height: usize, rgb: &[[u8; 3]]) -> Result<Vec<u8>> {
    if rgb.len() != width * height {
        return Err(Error::DimensionMismatch(format!("{} pixels for a {width}x{height} image", rgb.len())));
    }
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.extend(rgb.iter().flatten());
    Ok(out)
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Result<&str> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| Error::Image("non-ASCII header".into()))
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let t = self.token()?;
        t.parse().map_err(|_| Error::Image(format!("bad {what} {t:?}")))
    }
}

/// Reads a binary PGM with maxval up to 255.
pub fn read_pgm(bytes: &[u8]) -> Result<ViewImage> {
    let mut h = Header { bytes, pos: 0 };
    if h.token()? != "P5" {
        return Err(Error::Image("not a binary PGM (P5)".into()));
    }
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Image(format!("unsupported maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    let start = h.pos + 1;
    let end = start + width * height;
    if bytes.len() < end {
        return Err(Error::Image(format!("raster truncated: {} of {} bytes", bytes.len().saturating_sub(start), width * height)));
    }
    let samples = bytes[start..end].iter().map(|&b| (b as f32 / maxval as f32).min(1.0)).collect();
    ViewImage::new(width, height, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip() {
        let img = ViewImage::new(3, 2, vec![0.0, 1.0, 0.2, 0.4, 0.6, 0.8]).unwrap();
        let bytes = write_pgm(&img);
        assert!(bytes.starts_with(b"P5\n3 2\n255\n"));
        let back = read_pgm(&bytes).unwrap();
        assert_eq!(write_pgm(&back), bytes);
    }

    #[test]
    fn reads_comments() {
        let mut bytes = b"P5 # comment\n2 1\n# another\n255\n".to_vec();
        bytes.extend([0u8, 255]);
        assert_eq!(read_pgm(&bytes).unwrap().samples(), &[0.0, 1.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_pgm(b"P6\n1 1\n255\n\0\0\0").is_err());
        assert!(read_pgm(b"P5\n4 4\n255\n\0").is_err());
        assert!(write_ppm(2, 2, &[[0; 3]]).is_err());
    }

    #[test]
    fn normalized_scales_to_white() {
        let bytes = write_pgm_normalized(2, 1, &[2.0, 4.0]);
        assert_eq!(&bytes[bytes.len() - 2..], &[128, 255]);
    }
}
