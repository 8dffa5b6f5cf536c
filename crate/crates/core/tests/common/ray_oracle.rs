//! Stand-alone Monte-Carlo thin-lens tracer. Shares no code with the library
//! beyond the geometry struct it reads parameters from.

use rand::Rng;

/// One lens of the array as the oracle sees it.
#[derive(Clone, Copy, Debug)]
pub struct Lens {
    pub center: f64,
    pub aperture: f64,
    pub focal: f64,
}

/// Emission angle range (as `sin(theta)`) from a point at `source` on a plane
/// `gap` behind the lens that passes through the lens aperture.
fn sin_window(lens: Lens, source: f64, gap: f64) -> (f64, f64) {
    let lo = ((lens.center - lens.aperture / 2.0 - source) / gap).atan().sin();
    let hi = ((lens.center + lens.aperture / 2.0 - source) / gap).atan().sin();
    (lo, hi)
}

fn land(lens: Lens, source: f64, gap: f64, sin_theta: f64, z: f64) -> f64 {
    let theta = sin_theta.asin();
    let hit = source + gap * theta.tan();
    let deflected = theta.tan() - (hit - lens.center) / lens.focal;
    hit + z * deflected
}

/// Result of tracing rays conditioned to pass one lens.
#[derive(Clone, Copy, Debug)]
pub struct Bundle {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Bundle {
    /// Centre of the landed bundle: midpoint of its extreme rays.
    pub fn center(&self) -> f64 {
        0.5 * (self.min + self.max)
    }
}

/// Lambertian rays from a point source restricted to those entering `lens`.
pub fn trace_bundle(rng: &mut impl Rng, lens: Lens, source: f64, gap: f64, z: f64, rays: usize) -> Bundle {
    let (lo, hi) = sin_window(lens, source, gap);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for _ in 0..rays {
        let s = lo + (hi - lo) * rng.gen::<f64>();
        let x = land(lens, source, gap, s, z);
        min = min.min(x);
        max = max.max(x);
        sum += x;
    }
    Bundle { min, max, mean: sum / rays as f64 }
}

/// Fraction of unconditioned Lambertian rays (uniform `sin(theta)` over the
/// forward half plane) that enter `lens`.
pub fn acceptance_fraction(rng: &mut impl Rng, lens: Lens, source: f64, gap: f64, rays: usize) -> (f64, usize) {
    let mut hits = 0;
    for _ in 0..rays {
        let s: f64 = rng.gen_range(-1.0..1.0);
        let at = source + gap * s.asin().tan();
        if (at - lens.center).abs() <= lens.aperture / 2.0 {
            hits += 1;
        }
    }
    (hits as f64 / rays as f64, hits)
}

/// Histogram of rays from a point source through every lens, normalised
/// to counts per emitted ray per meter.
pub fn histogram(
    rng: &mut impl Rng,
    lenses: &[Lens],
    source: f64,
    gap: f64,
    z: f64,
    edges: &[f64],
    rays: usize,
) -> Vec<f64> {
    let mut counts = vec![0usize; edges.len() - 1];
    for _ in 0..rays {
        let s: f64 = rng.gen_range(-1.0..1.0);
        let at = source + gap * s.asin().tan();
        let Some(lens) = lenses.iter().find(|l| (at - l.center).abs() <= l.aperture / 2.0) else { continue };
        let x = land(*lens, source, gap, s, z);
        if x < edges[0] || x >= edges[edges.len() - 1] {
            continue;
        }
        let i = edges.partition_point(|&e| e <= x) - 1;
        counts[i] += 1;
    }
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| c as f64 / rays as f64 / (edges[i + 1] - edges[i]))
        .collect()
}

pub fn lenses_of(g: &tdm3d::DisplayGeometry) -> Vec<Lens> {
    let n = g.lens_count as f64;
    (0..g.lens_count)
        .map(|k| Lens {
            center: (k as f64 - (n - 1.0) / 2.0) * g.lens_pitch,
            aperture: g.lens_aperture,
            focal: g.focal_length,
        })
        .collect()
}
