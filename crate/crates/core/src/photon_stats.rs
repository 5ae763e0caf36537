//! Photon statistics of a phase-randomized weak coherent source and the
//! classical intensity distributions seen through the interferometer.
//!
//! A coherent state of mean photon number μ whose overall phase is uniform on
//! [0, 2π) is indistinguishable from the Poisson mixture of number states
//! `Σ e^{−μ} μⁿ/n! |n⟩⟨n|`. Partial randomization (a fixed phase, a finite
//! set of phases, or a Gaussian phase) leaves off-diagonal coherences behind;
//! [`randomization_quality`] measures them as the trace distance to the
//! ideal mixture in a truncated number basis.
//!
//! On the classical side, a uniform phase difference through a sinusoidal
//! fringe yields the arcsine ("U-type") intensity law
//! `p(v) = 1/(π√(v(1−v)))`, while a locked phase yields a Gaussian bump;
//! [`classify_distribution`] tells the two apart with edge-evaluated
//! Kolmogorov–Smirnov distances.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

use crate::interferometer::mzi_response;
use crate::stats::ks_critical_value;

/// Poisson tail mass tolerated when choosing the truncation dimension.
const TRUNCATION_TAIL: f64 = 1e-12;

/// Hard cap on the truncated basis dimension.
const MAX_TRUNCATION_DIM: usize = 512;

/// KS verdicts use 1.5 × the asymptotic critical value at this level.
const KS_ALPHA: f64 = 0.01;
const KS_MARGIN: f64 = 1.5;

/// Minimum sample count for a distribution verdict.
pub const MIN_CLASSIFY_SAMPLES: u64 = 1000;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("invalid parameter: {field}: {constraint}")]
    InvalidParameter {
        field: &'static str,
        constraint: &'static str,
    },
    #[error("density diverges at v = {value}; the arcsine law is defined on open (0, 1)")]
    Domain { value: f64 },
    #[error("truncated basis too small: residual tail mass {remainder:.3e} exceeds {TRUNCATION_TAIL:.0e}")]
    TruncationTooSmall { remainder: f64 },
    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: u64, need: u64 },
    #[error("zero-power baseline entry with non-zero spread is required")]
    MissingBaseline,
    #[error("need at least 2 phases per power entry")]
    TooFewPhases,
}

/// Overall-phase model of a weak coherent pulse source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseModel {
    /// Uniform on [0, 2π): the ideal assumption.
    Uniform,
    /// N equally spaced discrete phases.
    Discrete(u32),
    /// Gaussian phase of the given mean and standard deviation.
    Gaussian { mean: f64, std: f64 },
    /// A single deterministic phase.
    Fixed(f64),
}

/// Weak coherent source: mean photon number μ = |α|² plus a phase model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentSource {
    pub mean_photon_number: f64,
    pub phase_model: PhaseModel,
}

impl CoherentSource {
    pub fn validate(&self) -> Result<(), StatsError> {
        if !(self.mean_photon_number >= 0.0 && self.mean_photon_number.is_finite()) {
            return Err(StatsError::InvalidParameter {
                field: "mean_photon_number",
                constraint: "must be non-negative",
            });
        }
        match self.phase_model {
            PhaseModel::Discrete(n) if n < 1 => Err(StatsError::InvalidParameter {
                field: "phase_model.discrete",
                constraint: "needs at least 1 point",
            }),
            PhaseModel::Gaussian { std, .. } if !(std >= 0.0) => Err(StatsError::InvalidParameter {
                field: "phase_model.gaussian.std",
                constraint: "std must be non-negative",
            }),
            _ => Ok(()),
        }
    }
}

/// Photon-number probabilities 0..=n_max plus truncation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonNumberDistribution {
    pub probabilities: Vec<f64>,
    /// Poisson mass beyond n_max.
    pub truncation_remainder: f64,
    /// Trace distance of the phase-averaged state to the uniform-phase
    /// mixture; 0 means the number diagonal tells the whole story.
    pub coherence: f64,
}

/// Poisson probabilities for n = 0..=n_max, by stable recurrence.
pub fn poisson_probabilities(mu: f64, n_max: usize) -> Vec<f64> {
    let mut probs = Vec::with_capacity(n_max + 1);
    let mut p = (-mu).exp();
    probs.push(p);
    for n in 1..=n_max {
        p *= mu / n as f64;
        probs.push(p);
    }
    probs
}

/// Photon-number distribution of the source.
///
/// The number diagonal of a coherent state does not depend on its phase, so
/// the probabilities are Poisson(μ) for every phase model; what the models
/// change is the residual coherence, reported alongside.
pub fn photon_number_distribution(
    source: &CoherentSource,
    n_max: usize,
) -> Result<PhotonNumberDistribution, StatsError> {
    source.validate()?;
    let probabilities = poisson_probabilities(source.mean_photon_number, n_max);
    let truncation_remainder = (1.0 - probabilities.iter().sum::<f64>()).max(0.0);
    let coherence = if source.mean_photon_number == 0.0 {
        0.0
    } else {
        randomization_quality(source)?
    };
    Ok(PhotonNumberDistribution {
        probabilities,
        truncation_remainder,
        coherence,
    })
}

/// Smallest basis dimension whose Poisson tail mass is below the tolerance.
fn truncation_dim(mu: f64) -> Result<usize, StatsError> {
    let mut p = (-mu).exp();
    let mut cum = p;
    for n in 1..MAX_TRUNCATION_DIM {
        if 1.0 - cum < TRUNCATION_TAIL {
            return Ok(n);
        }
        p *= mu / n as f64;
        cum += p;
    }
    Err(StatsError::TruncationTooSmall {
        remainder: 1.0 - cum,
    })
}

/// Trace distance between the source's phase-averaged state and the ideal
/// uniform-phase Poisson mixture, in [0, 1].
///
/// Both states commute with a global phase rotation of the mixture, so the
/// distance is invariant under rotating the model's phases; the matrix is
/// therefore built mean-free and stays real symmetric. Computed in a number
/// basis truncated where the Poisson tail drops below 1e-12.
pub fn randomization_quality(source: &CoherentSource) -> Result<f64, StatsError> {
    source.validate()?;
    let mu = source.mean_photon_number;
    if !(mu > 0.0) {
        return Err(StatsError::InvalidParameter {
            field: "mean_photon_number",
            constraint: "must be positive",
        });
    }
    if matches!(source.phase_model, PhaseModel::Uniform) {
        return Ok(0.0);
    }
    let dim = truncation_dim(mu)?;
    Ok(trace_distance_at_dim(mu, source.phase_model, dim))
}

fn trace_distance_at_dim(mu: f64, model: PhaseModel, dim: usize) -> f64 {
    // Coherent amplitudes c_n = e^{−μ/2} μ^{n/2}/√(n!), by recurrence.
    let mut c = Vec::with_capacity(dim);
    let mut cn = (-mu / 2.0).exp();
    c.push(cn);
    for n in 1..dim {
        cn *= (mu / n as f64).sqrt();
        c.push(cn);
    }
    // Phase averaging damps the (m − n) off-diagonal by a model factor.
    let factor = |d: i64| -> f64 {
        match model {
            PhaseModel::Uniform => {
                if d == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            PhaseModel::Fixed(_) => 1.0,
            PhaseModel::Discrete(n) => {
                if d.rem_euclid(n as i64) == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            PhaseModel::Gaussian { std, .. } => (-0.5 * std * std * (d * d) as f64).exp(),
        }
    };
    // Δ = ρ_model − ρ_uniform has a zero diagonal.
    let delta = DMatrix::from_fn(dim, dim, |m, n| {
        if m == n {
            0.0
        } else {
            c[m] * c[n] * factor(m as i64 - n as i64)
        }
    });
    let eigen = delta.symmetric_eigen();
    0.5 * eigen.eigenvalues.iter().map(|l| l.abs()).sum::<f64>()
}

/// Density of the arcsine law `1/(π √(v(1−v)))` on open (0, 1).
pub fn arcsine_pdf(v: f64) -> Result<f64, StatsError> {
    if !(v > 0.0 && v < 1.0) {
        return Err(StatsError::Domain { value: v });
    }
    Ok(1.0 / (PI * (v * (1.0 - v)).sqrt()))
}

/// CDF of the arcsine law, `2/π · asin(√v)`, clamped to [0, 1].
pub fn arcsine_cdf(v: f64) -> f64 {
    if v <= 0.0 {
        0.0
    } else if v >= 1.0 {
        1.0
    } else {
        2.0 / PI * v.sqrt().asin()
    }
}

/// Binned distribution of normalized interference voltages on [0, 1].
///
/// Raw power sums are carried along so histograms merge exactly: counts and
/// sums add, which makes parallel accumulation safe.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityHistogram {
    bin_edges: Vec<f64>,
    counts: Vec<u64>,
    n_samples: u64,
    sum1: f64,
    sum2: f64,
    sum3: f64,
    sum4: f64,
}

/// Moment summary of the samples behind a histogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub mean: f64,
    pub std: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

impl IntensityHistogram {
    /// Bin `samples` into `n_bins` uniform bins on [0, 1]. Values outside the
    /// range (detector noise can push them out) are clamped to the boundary.
    pub fn from_samples(samples: &[f64], n_bins: usize) -> Result<Self, StatsError> {
        if n_bins < 2 {
            return Err(StatsError::InvalidParameter {
                field: "n_bins",
                constraint: "need at least 2 bins",
            });
        }
        let bin_edges: Vec<f64> = (0..=n_bins).map(|i| i as f64 / n_bins as f64).collect();
        let mut counts = vec![0u64; n_bins];
        let (mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0);
        for &raw in samples {
            let v = raw.clamp(0.0, 1.0);
            let mut idx = (v * n_bins as f64) as usize;
            if idx >= n_bins {
                idx = n_bins - 1;
            }
            counts[idx] += 1;
            s1 += v;
            s2 += v * v;
            s3 += v * v * v;
            s4 += v * v * v * v;
        }
        Ok(Self {
            bin_edges,
            counts,
            n_samples: samples.len() as u64,
            sum1: s1,
            sum2: s2,
            sum3: s3,
            sum4: s4,
        })
    }

    pub fn bin_edges(&self) -> &[f64] {
        &self.bin_edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n_samples(&self) -> u64 {
        self.n_samples
    }

    /// Merge another histogram with identical binning into this one.
    pub fn merge(&mut self, other: &Self) -> Result<(), StatsError> {
        if self.bin_edges != other.bin_edges {
            return Err(StatsError::InvalidParameter {
                field: "bin_edges",
                constraint: "histograms must share identical bin edges to merge",
            });
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n_samples += other.n_samples;
        self.sum1 += other.sum1;
        self.sum2 += other.sum2;
        self.sum3 += other.sum3;
        self.sum4 += other.sum4;
        Ok(())
    }

    pub fn summary(&self) -> SummaryStats {
        let n = self.n_samples.max(1) as f64;
        let mean = self.sum1 / n;
        let var = (self.sum2 / n - mean * mean).max(0.0);
        let std = var.sqrt();
        let m3 = self.sum3 / n - 3.0 * mean * self.sum2 / n + 2.0 * mean.powi(3);
        let m4 = self.sum4 / n - 4.0 * mean * self.sum3 / n + 6.0 * mean * mean * self.sum2 / n
            - 3.0 * mean.powi(4);
        let (skewness, excess_kurtosis) = if std > 0.0 {
            (m3 / std.powi(3), m4 / var.powi(2) - 3.0)
        } else {
            (0.0, 0.0)
        };
        SummaryStats {
            mean,
            std,
            skewness,
            excess_kurtosis,
        }
    }
}

/// Shape verdict for an intensity histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionVerdict {
    UType,
    Gaussian,
    Ambiguous,
}

impl std::fmt::Display for DistributionVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DistributionVerdict::UType => write!(f, "u_type"),
            DistributionVerdict::Gaussian => write!(f, "gaussian"),
            DistributionVerdict::Ambiguous => write!(f, "ambiguous"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub ks_vs_arcsine: f64,
    pub ks_vs_best_gaussian: f64,
    pub verdict: DistributionVerdict,
    /// Moment-fitted Gaussian parameters.
    pub fitted_mean: f64,
    pub fitted_std: f64,
    /// Accept threshold used for both KS statistics.
    pub threshold: f64,
}

/// Decide whether a histogram is U-type (arcsine), Gaussian, or ambiguous.
///
/// KS distances are evaluated on the binned empirical CDF at the bin edges;
/// the Gaussian reference is moment-fitted. A verdict requires winning the
/// comparison *and* beating 1.5 × the asymptotic KS critical value at the
/// 1 % level for this sample size.
pub fn classify_distribution(hist: &IntensityHistogram) -> Result<Classification, StatsError> {
    let n = hist.n_samples;
    if n < MIN_CLASSIFY_SAMPLES {
        return Err(StatsError::TooFewSamples {
            got: n,
            need: MIN_CLASSIFY_SAMPLES,
        });
    }
    let summary = hist.summary();
    let normal_cdf = |x: f64| -> f64 {
        if summary.std > 0.0 {
            0.5 * (1.0 + erf((x - summary.mean) / (summary.std * std::f64::consts::SQRT_2)))
        } else {
            // Degenerate locked limit: a step at the mean.
            if x < summary.mean {
                0.0
            } else {
                1.0
            }
        }
    };

    let nf = n as f64;
    let mut cum = 0u64;
    let (mut ks_arc, mut ks_gauss) = (0.0f64, 0.0f64);
    ks_arc = ks_arc.max(arcsine_cdf(hist.bin_edges[0]));
    ks_gauss = ks_gauss.max(normal_cdf(hist.bin_edges[0]));
    for (i, &c) in hist.counts.iter().enumerate() {
        cum += c;
        let f_emp = cum as f64 / nf;
        let edge = hist.bin_edges[i + 1];
        ks_arc = ks_arc.max((f_emp - arcsine_cdf(edge)).abs());
        ks_gauss = ks_gauss.max((f_emp - normal_cdf(edge)).abs());
    }

    let threshold = KS_MARGIN * ks_critical_value(n, KS_ALPHA);
    let verdict = if ks_arc < ks_gauss && ks_arc < threshold {
        DistributionVerdict::UType
    } else if ks_gauss < ks_arc && ks_gauss < threshold {
        DistributionVerdict::Gaussian
    } else {
        DistributionVerdict::Ambiguous
    };
    Ok(Classification {
        ks_vs_arcsine: ks_arc,
        ks_vs_best_gaussian: ks_gauss,
        verdict,
        fitted_mean: summary.mean,
        fitted_std: summary.std,
        threshold,
    })
}

/// Normalized quadrature spreads for one control power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureStdPoint {
    pub power: f64,
    /// Std of the sine-quadrature voltage, relative to the zero-power value.
    pub sin_std: f64,
    /// Std of the cosine-quadrature voltage, relative to the zero-power value.
    pub cos_std: f64,
}

/// Per-power quadrature voltage spreads, normalized by the zero-power entry.
///
/// Each phase sequence is converted to adjacent-pair sine and cosine
/// quadrature voltages at unit visibility; the standard deviation of each is
/// divided by the corresponding spread of the zero-power baseline.
pub fn quadrature_std_curve(
    phases_by_power: &[(f64, Vec<f64>)],
) -> Result<Vec<QuadratureStdPoint>, StatsError> {
    fn spreads(phases: &[f64]) -> Result<(f64, f64), StatsError> {
        if phases.len() < 2 {
            return Err(StatsError::TooFewPhases);
        }
        let (mut vs, mut vc) = (Vec::new(), Vec::new());
        for w in phases.windows(2) {
            let d = w[1] - w[0];
            vs.push(mzi_response(d, FRAC_PI_2, 1.0));
            vc.push(mzi_response(d, 0.0, 1.0));
        }
        Ok((population_std(&vs), population_std(&vc)))
    }

    let baseline = phases_by_power
        .iter()
        .find(|(p, _)| *p == 0.0)
        .ok_or(StatsError::MissingBaseline)?;
    let (s0, c0) = spreads(&baseline.1)?;
    if s0 <= 0.0 || c0 <= 0.0 {
        return Err(StatsError::MissingBaseline);
    }
    let mut out = Vec::with_capacity(phases_by_power.len());
    for (power, phases) in phases_by_power {
        let (s, c) = spreads(phases)?;
        out.push(QuadratureStdPoint {
            power: *power,
            sin_std: s / s0,
            cos_std: c / c0,
        });
    }
    out.sort_by(|a, b| a.power.partial_cmp(&b.power).expect("non-finite power"));
    Ok(out)
}

fn population_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}
