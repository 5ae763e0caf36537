//! Circular statistics and goodness-of-fit machinery shared by the laser and
//! photon-statistics modules.

use std::f64::consts::TAU;

/// Mean direction and mean resultant length of a sample of angles.
///
/// Returns `(mean_angle, r_bar)` with the mean angle in `[0, 2π)`.
pub fn circular_mean_resultant(angles: &[f64]) -> (f64, f64) {
    let (mut s, mut c) = (0.0, 0.0);
    for &a in angles {
        s += a.sin();
        c += a.cos();
    }
    let n = angles.len().max(1) as f64;
    let mean = s.atan2(c).rem_euclid(TAU);
    let r_bar = (s * s + c * c).sqrt() / n;
    (mean, r_bar)
}

pub fn circular_mean(angles: &[f64]) -> f64 {
    circular_mean_resultant(angles).0
}

/// Circular standard deviation `sqrt(-2 ln r̄)`.
pub fn circular_std(angles: &[f64]) -> f64 {
    let (_, r) = circular_mean_resultant(angles);
    if r <= 0.0 {
        f64::INFINITY
    } else {
        (-2.0 * r.min(1.0).ln()).sqrt()
    }
}

/// Circular variance `1 - r̄`, in `[0, 1]`.
pub fn circular_variance(angles: &[f64]) -> f64 {
    1.0 - circular_mean_resultant(angles).1
}

/// Outcome of a uniformity test on the circle.
#[derive(Debug, Clone, Copy)]
pub struct UniformityTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// Kuiper test of the hypothesis that `angles` are uniform on `[0, 2π)`.
///
/// Kuiper's statistic V = D⁺ + D⁻ is invariant under rotations of the
/// circle, which makes it the natural choice for phase samples. The p-value
/// uses the asymptotic series with Stephens' finite-sample correction.
pub fn kuiper_uniformity(angles: &[f64]) -> UniformityTest {
    let mut u: Vec<f64> = angles.iter().map(|a| a.rem_euclid(TAU) / TAU).collect();
    u.sort_by(|a, b| a.partial_cmp(b).expect("non-finite angle"));
    let n = u.len() as f64;
    let (mut d_plus, mut d_minus) = (0.0f64, 0.0f64);
    for (i, &x) in u.iter().enumerate() {
        d_plus = d_plus.max((i + 1) as f64 / n - x);
        d_minus = d_minus.max(x - i as f64 / n);
    }
    let v = d_plus + d_minus;
    let z = v * (n.sqrt() + 0.155 + 0.24 / n.sqrt());
    UniformityTest {
        statistic: v,
        p_value: kuiper_p(z),
    }
}

fn kuiper_p(z: f64) -> f64 {
    if z < 0.4 {
        return 1.0;
    }
    let mut p = 0.0;
    for m in 1..=100 {
        let m2z2 = (m * m) as f64 * z * z;
        let term = 2.0 * (4.0 * m2z2 - 1.0) * (-2.0 * m2z2).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// One-sample Kolmogorov–Smirnov statistic against a reference CDF.
///
/// `samples` must be sorted ascending.
pub fn ks_statistic_sorted<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let n = samples.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        sup = sup.max((((i + 1) as f64) / n - f).abs());
        sup = sup.max((f - (i as f64) / n).abs());
    }
    sup
}

/// Asymptotic critical value of the one-sample KS statistic at level `alpha`.
pub fn ks_critical_value(n: u64, alpha: f64) -> f64 {
    ((-(alpha / 2.0).ln()) / 2.0).sqrt() / (n as f64).sqrt()
}
