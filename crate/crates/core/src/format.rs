//! Number formatting shared by every text artifact.

/// Nine significant digits in scientific notation, e.g. `1.20000000e2`.
/// Negative zero prints as zero so mirrored runs format identically.
pub fn sci9(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.8e}")
}
