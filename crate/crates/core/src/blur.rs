//! Closed-form source kernels: a uniform strip, optionally widened by a
//! uniform defocus disk, convolved with a Gaussian diffuser.
//!
//! The cumulative distribution is built from repeated antiderivatives of the
//! normal CDF, `P0 = Phi`, `P1 = int P0`, `P2 = int P1`, and divided
//! differences over the box widths.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Number of standard deviations past the box edge treated as exactly dark.
const TAIL_SIGMAS: f64 = 12.0;

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

fn p0(t: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        if t >= 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        normal_cdf(t / sigma)
    }
}

fn p1(t: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        t.max(0.0)
    } else {
        let x = t / sigma;
        sigma * (x * normal_cdf(x) + normal_pdf(x))
    }
}

fn p2(t: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        let r = t.max(0.0);
        0.5 * r * r
    } else {
        let x = t / sigma;
        sigma * sigma * (0.5 * (x * x + 1.0) * normal_cdf(x) + 0.5 * x * normal_pdf(x))
    }
}

/// Unit-energy kernel `box(strip) * box(defocus) * N(0, sigma)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothedBox {
    strip: f64,
    defocus: f64,
    sigma: f64,
}

impl SmoothedBox {
    pub fn new(strip: f64, defocus: f64, sigma: f64) -> Self {
        let strip = strip.max(0.0);
        let defocus = defocus.max(0.0);
        let sigma = sigma.max(0.0);
        // A width far below the other scales only costs precision in the
        // divided differences; fold it into the delta limit.
        let scale = strip.max(defocus).max(sigma);
        let negligible = |w: f64| w <= 1e-7 * scale;
        SmoothedBox {
            strip: if negligible(strip) { 0.0 } else { strip },
            defocus: if negligible(defocus) { 0.0 } else { defocus },
            sigma: if negligible(sigma) { 0.0 } else { sigma },
        }
    }

    pub fn half_support(&self) -> f64 {
        0.5 * (self.strip + self.defocus) + TAIL_SIGMAS * self.sigma
    }

    /// Fraction of the kernel's energy at offsets `<= t`.
    pub fn cdf(&self, t: f64) -> f64 {
        let reach = self.half_support();
        if t < -reach {
            return 0.0;
        }
        if t > reach {
            return 1.0;
        }
        let (a, b, s) = (self.strip, self.defocus, self.sigma);
        let value = match (a > 0.0, b > 0.0) {
            (false, false) => p0(t, s),
            (true, false) => (p1(t + a / 2.0, s) - p1(t - a / 2.0, s)) / a,
            (false, true) => (p1(t + b / 2.0, s) - p1(t - b / 2.0, s)) / b,
            (true, true) => {
                let (h, k) = (a / 2.0, b / 2.0);
                (p2(t + h + k, s) - p2(t + h - k, s) - p2(t - h + k, s) + p2(t - h - k, s))
                    / (a * b)
            }
        };
        value.clamp(0.0, 1.0)
    }

    /// Energy falling in `[lo, hi]`.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        (self.cdf(hi) - self.cdf(lo)).max(0.0)
    }
}

/// Emission density of a unit-power strip of width `strip` blurred by a
/// Gaussian diffuser, evaluated `t` away from the strip centre.
pub fn strip_density(t: f64, strip: f64, sigma: f64) -> f64 {
    let h = strip / 2.0;
    if t.abs() > h + TAIL_SIGMAS * sigma {
        return 0.0;
    }
    if sigma == 0.0 {
        return if t.abs() <= h && strip > 0.0 { 1.0 / strip } else { 0.0 };
    }
    if strip <= 1e-7 * sigma {
        return normal_pdf(t / sigma) / sigma;
    }
    // Use the upper tail on the far side to keep precision in the shoulders.
    let d = if t >= 0.0 {
        normal_cdf((h - t) / sigma) - normal_cdf((-h - t) / sigma)
    } else {
        normal_cdf((t + h) / sigma) - normal_cdf((t - h) / sigma)
    };
    d.max(0.0) / strip
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
        // composite Simpson
        let h = (hi - lo) / n as f64;
        let mut s = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(lo + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn cdf_limits() {
        let k = SmoothedBox::new(1.0, 0.5, 0.1);
        assert_eq!(k.cdf(-10.0), 0.0);
        assert_eq!(k.cdf(10.0), 1.0);
        assert!((k.cdf(0.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pure_box_cdf_is_linear() {
        let k = SmoothedBox::new(2.0, 0.0, 0.0);
        assert!((k.cdf(0.5) - 0.75).abs() < 1e-15);
        let k = SmoothedBox::new(0.0, 0.0, 0.0);
        assert_eq!(k.cdf(-1e-12), 0.0);
        assert_eq!(k.cdf(0.0), 1.0);
    }

    #[test]
    fn trapezoid_cdf_matches_quadrature() {
        // box(1) * box(0.4): trapezoid density, no blur
        let k = SmoothedBox::new(1.0, 0.4, 0.0);
        let density = |t: f64| {
            let t = t.abs();
            if t <= 0.3 {
                1.0
            } else if t <= 0.7 {
                (0.7 - t) / 0.4
            } else {
                0.0
            }
        };
        for &t in &[-0.6, -0.2, 0.1, 0.45, 0.69] {
            let q = quad(density, -0.7, t, 20_000);
            assert!((k.cdf(t) - q).abs() < 1e-9, "t={t}: {} vs {q}", k.cdf(t));
        }
    }

    #[test]
    fn blurred_trapezoid_cdf_matches_quadrature() {
        let (a, b, s) = (1.0, 0.4, 0.15);
        let k = SmoothedBox::new(a, b, s);
        // density of box(a)*box(b)*N(s), by direct 2D quadrature over the boxes
        let density = |t: f64| {
            quad(
                |u| {
                    let lo = (t - u - b / 2.0) / s;
                    let hi = (t - u + b / 2.0) / s;
                    (normal_cdf(hi) - normal_cdf(lo)) / (a * b)
                },
                -a / 2.0,
                a / 2.0,
                400,
            )
        };
        for &t in &[-0.9, -0.3, 0.0, 0.35, 0.8] {
            let q = quad(density, -2.5, t, 4000);
            assert!((k.cdf(t) - q).abs() < 1e-7, "t={t}: {} vs {q}", k.cdf(t));
        }
    }

    #[test]
    fn strip_density_integrates_to_one() {
        for &(w, s) in &[(1.0, 0.2), (0.4, 0.15), (1e-9, 0.1)] {
            let total = quad(|t| strip_density(t, w, s), -3.0, 3.0, 60_000);
            assert!((total - 1.0).abs() < 1e-6, "w={w} s={s}: {total}");
        }
        // unblurred strip: the integrand jumps, so Simpson is only first order
        let total = quad(|t| strip_density(t, 0.5, 0.0), -3.0, 3.0, 60_000);
        assert!((total - 1.0).abs() < 1e-3, "{total}");
    }

    #[test]
    fn strip_density_matches_cdf_slope() {
        let k = SmoothedBox::new(0.4, 0.0, 0.15);
        for &t in &[-0.5, -0.1, 0.0, 0.3] {
            let h = 1e-6;
            let slope = (k.cdf(t + h) - k.cdf(t - h)) / (2.0 * h);
            assert!((slope - strip_density(t, 0.4, 0.15)).abs() < 1e-6);
        }
    }
}
