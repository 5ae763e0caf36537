//! Asymptotic decoy-state key rate and the phase-randomization gate on
//! security claims.
//!
//! Two-intensity decoy estimation over the standard channel model
//! (per-photon transmission η, dark-count yield Y₀, misalignment e_d):
//!
//! ```text
//! Qμ  = Y₀ + 1 − e^{−ημ}
//! Y₁ᴸ = μ/(μν − ν²) · [Qν e^ν − Qμ e^μ ν²/μ² − (μ² − ν²)/μ² · Y₀]
//! e₁ᵁ = (Eν Qν e^ν − ½ Y₀) / (Y₁ᴸ ν)
//! R   = Y₁ᴸ μ e^{−μ} [1 − H₂(e₁ᵁ)] − Qμ f H₂(Eμ)
//! ```
//!
//! Signal-intensity fluctuation of fractional size δ is treated as a
//! deterministic worst case: the rate is minimized over μ′ ∈ [μ(1−δ), μ(1+δ)].

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Trace distance above which phase randomization no longer holds.
pub const RANDOMIZATION_TOLERANCE: f64 = 1e-6;

/// Grid resolution of the worst-case intensity scan.
const FLUCTUATION_GRID: usize = 33;

#[derive(Debug, Error)]
pub enum KeyRateError {
    #[error("invalid key-rate params: {field}: {constraint}")]
    InvalidParams {
        field: &'static str,
        constraint: &'static str,
    },
    #[error("decoy bound infeasible: {0}")]
    InfeasibleBound(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyRateParams {
    /// Signal mean photon number μ.
    pub signal_mu: f64,
    /// Decoy mean photon number ν < μ.
    pub decoy_nu: f64,
    pub channel_transmittance: f64,
    pub detector_efficiency: f64,
    /// Dark-count (vacuum yield) probability Y₀ per pulse.
    pub dark_count_prob: f64,
    /// Error-correction inefficiency f ≥ 1.
    pub error_correction_inefficiency: f64,
    /// Misalignment error e_d.
    pub misalignment_error: f64,
    /// Fractional signal-intensity fluctuation δ ≥ 0.
    pub intensity_fluctuation: f64,
}

impl KeyRateParams {
    pub fn validate(&self) -> Result<(), KeyRateError> {
        let err = |field, constraint| Err(KeyRateError::InvalidParams { field, constraint });
        if !(self.signal_mu > 0.0 && self.signal_mu.is_finite()) {
            return err("signal_mu", "must be positive");
        }
        if !(self.decoy_nu > 0.0) {
            return err("decoy_nu", "must be positive");
        }
        if !(self.decoy_nu < self.signal_mu) {
            return err("decoy_nu", "must be smaller than signal_mu");
        }
        if !(0.0..=1.0).contains(&self.channel_transmittance) {
            return err("channel_transmittance", "must be in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.detector_efficiency) {
            return err("detector_efficiency", "must be in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.dark_count_prob) {
            return err("dark_count_prob", "must be in [0, 1]");
        }
        if !(self.error_correction_inefficiency >= 1.0) {
            return err("error_correction_inefficiency", "must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.misalignment_error) {
            return err("misalignment_error", "must be in [0, 1]");
        }
        if !(self.intensity_fluctuation >= 0.0 && self.intensity_fluctuation < 1.0) {
            return err("intensity_fluctuation", "must be in [0, 1)");
        }
        Ok(())
    }
}

impl Default for KeyRateParams {
    fn default() -> Self {
        Self {
            signal_mu: 0.5,
            decoy_nu: 0.1,
            channel_transmittance: 0.1,
            detector_efficiency: 0.1,
            dark_count_prob: 1.0e-5,
            error_correction_inefficiency: 1.16,
            misalignment_error: 0.015,
            intensity_fluctuation: 0.0,
        }
    }
}

/// Binary entropy in bits; 0 at the endpoints by continuity.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Key rate per pulse when the actual signal intensity is `mu`, everything
/// else as configured. Exposed so the worst-case scan can be re-derived
/// independently.
pub fn decoy_rate_at_intensity(params: &KeyRateParams, mu: f64) -> Result<f64, KeyRateError> {
    let nu = params.decoy_nu;
    if !(mu > nu) {
        return Err(KeyRateError::InfeasibleBound(format!(
            "signal intensity {mu:.4e} does not exceed decoy intensity {nu:.4e}"
        )));
    }
    let eta = params.channel_transmittance * params.detector_efficiency;
    let y0 = params.dark_count_prob;
    let e0 = 0.5;
    let ed = params.misalignment_error;

    let gain = |m: f64| y0 + 1.0 - (-eta * m).exp();
    let error_gain = |m: f64| e0 * y0 + ed * (1.0 - (-eta * m).exp());

    let q_mu = gain(mu);
    let q_nu = gain(nu);
    if q_mu <= 0.0 || q_nu <= 0.0 {
        // No detections at all: no key, but nothing inconsistent either.
        return Ok(0.0);
    }
    let e_mu = error_gain(mu) / q_mu;

    let y1_lower = mu / (mu * nu - nu * nu)
        * (q_nu * nu.exp()
            - q_mu * mu.exp() * (nu * nu) / (mu * mu)
            - (mu * mu - nu * nu) / (mu * mu) * y0);
    if y1_lower <= 0.0 {
        return Err(KeyRateError::InfeasibleBound(format!(
            "estimated single-photon yield is non-positive ({y1_lower:.4e})"
        )));
    }
    let e1_upper = (error_gain(nu) * nu.exp() - e0 * y0) / (y1_lower * nu);
    let q1_lower = y1_lower * mu * (-mu).exp();

    let single_photon_term = if e1_upper >= 0.5 {
        0.0
    } else {
        q1_lower * (1.0 - binary_entropy(e1_upper))
    };
    let rate =
        single_photon_term - q_mu * params.error_correction_inefficiency * binary_entropy(e_mu);
    Ok(rate.max(0.0))
}

/// Decoy-state key rate per pulse, worst case over the configured intensity
/// fluctuation interval, clamped at zero.
pub fn gllp_decoy_rate(params: &KeyRateParams) -> Result<f64, KeyRateError> {
    params.validate()?;
    let mu = params.signal_mu;
    let delta = params.intensity_fluctuation;
    if delta == 0.0 {
        return decoy_rate_at_intensity(params, mu);
    }
    let lo = mu * (1.0 - delta);
    let hi = mu * (1.0 + delta);
    if lo <= params.decoy_nu {
        return Err(KeyRateError::InfeasibleBound(format!(
            "fluctuation interval reaches below the decoy intensity ({lo:.4e} <= {:.4e})",
            params.decoy_nu
        )));
    }
    let mut worst = f64::INFINITY;
    for i in 0..FLUCTUATION_GRID {
        let m = lo + (hi - lo) * i as f64 / (FLUCTUATION_GRID - 1) as f64;
        worst = worst.min(decoy_rate_at_intensity(params, m)?);
    }
    Ok(worst)
}

/// Whether security claims survive: void as soon as the source is locked or
/// its phase-averaged state departs from the uniform mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SecurityVerdict {
    Assured,
    Void,
}

impl std::fmt::Display for SecurityVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SecurityVerdict::Assured => write!(f, "assured"),
            SecurityVerdict::Void => write!(f, "void"),
        }
    }
}

pub fn security_verdict(randomization_quality: f64, locked: bool) -> SecurityVerdict {
    if locked || randomization_quality > RANDOMIZATION_TOLERANCE {
        SecurityVerdict::Void
    } else {
        SecurityVerdict::Assured
    }
}
