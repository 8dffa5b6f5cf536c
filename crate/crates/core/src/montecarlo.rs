//! Seeded thin-lens ray tracing of the backlight, as a numerical
//! cross-check of the closed-form illumination profile.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::{DisplayGeometry, LedMask};
use crate::optics::{check_grid, IntensityProfile};

/// Where one ray from the LED plane lands on plane `z`, or `None` when it
/// misses every lens aperture.
pub fn trace_ray(geometry: &DisplayGeometry, source_x: f64, sin_theta: f64, z: f64) -> Option<f64> {
    let tan = sin_theta / (1.0 - sin_theta * sin_theta).sqrt();
    let at_lens = source_x + geometry.led_lens_gap * tan;
    let lens = geometry.covering_lens(at_lens)?;
    let slope = tan - (at_lens - geometry.lens_center(lens)) / geometry.focal_length;
    Some(at_lens + z * slope)
}

/// Histogram of `rays_per_column` Lambertian rays from each lit column, in
/// the same units as [`crate::optics::illumination_profile`].
pub fn traced_profile(
    geometry: &DisplayGeometry,
    mask: &LedMask,
    z: f64,
    xs: &[f64],
    rays_per_column: usize,
    seed: u64,
) -> Result<IntensityProfile> {
    check_grid(xs)?;
    if !(z > 0.0) {
        return Err(Error::NonPositiveDistance { what: "z", value: z });
    }
    let n = xs.len();
    let mut edges = Vec::with_capacity(n + 1);
    if n == 1 {
        edges.extend([xs[0] - 5e-7, xs[0] + 5e-7]);
    } else {
        edges.push(xs[0] - (xs[1] - xs[0]) / 2.0);
        edges.extend(xs.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        edges.push(xs[n - 1] + (xs[n - 1] - xs[n - 2]) / 2.0);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blur = Normal::new(0.0, geometry.diffuser_sigma).map_err(|e| Error::Validation {
        field: "diffuser_sigma".into(),
        reason: e.to_string(),
    })?;
    let half_strip = geometry.led_strip_width / 2.0;
    let mut counts = vec![0u64; n];
    for column in mask.lit_columns() {
        let center = geometry.led_center(column);
        for _ in 0..rays_per_column {
            let u = center + rng.gen_range(-half_strip..=half_strip) + blur.sample(&mut rng);
            let s: f64 = rng.gen_range(-1.0..1.0);
            let Some(x) = trace_ray(geometry, u, s, z) else { continue };
            let cell = edges.partition_point(|&e| e <= x);
            if cell >= 1 && cell <= n {
                counts[cell - 1] += 1;
            }
        }
    }
    let values = counts
        .iter()
        .enumerate()
        .map(|(i, &k)| k as f64 / rays_per_column as f64 / (edges[i + 1] - edges[i]))
        .collect();
    IntensityProfile::new(z, xs.to_vec(), values)
}
