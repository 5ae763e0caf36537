//! Unbalanced Mach–Zehnder readout: adjacent pulses interfere and the
//! detected voltage encodes their phase difference.
//!
//! The normalized fringe is `V = [1 + v·cos(Δφ + θ₀)]/2`. With the inherent
//! path phase θ₀ = π/2 this is the sine quadrature `[1 − v·sin Δφ]/2`; θ₀ = 0
//! gives the cosine quadrature. A uniformly random Δφ pushes V onto the
//! U-shaped arcsine law; a locked Δφ concentrates it.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MziError {
    #[error("invalid interferometer config: {field}: {constraint}")]
    InvalidConfig {
        field: &'static str,
        constraint: &'static str,
    },
    #[error("need at least 2 phases to form an adjacent pair")]
    TooFewPhases,
    #[error("rates must satisfy sample_rate > repetition_rate > 0")]
    InvalidRates,
}

/// Interferometer and detection-chain parameters.
///
/// Loss imbalance and timing jitter degrade the fringe contrast; both are
/// folded into `visibility`. `delay_matches_period = false` means adjacent
/// pulses miss each other at the output coupler, which kills the fringe
/// entirely (effective visibility zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferometerConfig {
    /// Inherent phase difference θ₀ between the two paths, radians.
    pub inherent_phase: f64,
    /// Fringe visibility in [0, 1].
    pub visibility: f64,
    pub delay_matches_period: bool,
    pub timing_jitter_rms: f64,
    /// Additive Gaussian detector noise, volts (full scale is 1).
    pub detector_noise_rms: f64,
}

impl InterferometerConfig {
    pub fn validate(&self) -> Result<(), MziError> {
        let err = |field, constraint| Err(MziError::InvalidConfig { field, constraint });
        if !(0.0..=1.0).contains(&self.visibility) {
            return err("visibility", "must be in [0, 1]");
        }
        if !(self.timing_jitter_rms >= 0.0) {
            return err("timing_jitter_rms", "must be non-negative");
        }
        if !(self.detector_noise_rms >= 0.0) {
            return err("detector_noise_rms", "must be non-negative");
        }
        if !self.inherent_phase.is_finite() {
            return err("inherent_phase", "must be finite");
        }
        Ok(())
    }

    fn effective_visibility(&self) -> f64 {
        if self.delay_matches_period {
            self.visibility
        } else {
            0.0
        }
    }
}

impl Default for InterferometerConfig {
    fn default() -> Self {
        Self {
            inherent_phase: FRAC_PI_2,
            visibility: 0.99,
            delay_matches_period: true,
            timing_jitter_rms: 1.0e-12,
            detector_noise_rms: 0.01,
        }
    }
}

/// One detected interference sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoltageSample {
    /// Normalized voltage; in [0, 1] before noise.
    pub value: f64,
    pub pulse_pair_index: usize,
}

/// Normalized fringe response `[1 + visibility·cos(Δφ + θ₀)]/2`.
pub fn mzi_response(delta_phi: f64, theta0: f64, visibility: f64) -> f64 {
    0.5 * (1.0 + visibility * (delta_phi + theta0).cos())
}

/// Convert a phase train into adjacent-pair interference voltages.
///
/// Output length is `phases.len() - 1`; sample `i` compares pulse `i + 1`
/// with pulse `i`. Detector noise is drawn from `rng`.
pub fn train_to_voltages<R: Rng + ?Sized>(
    phases: &[f64],
    config: &InterferometerConfig,
    rng: &mut R,
) -> Result<Vec<VoltageSample>, MziError> {
    config.validate()?;
    if phases.len() < 2 {
        return Err(MziError::TooFewPhases);
    }
    let v = config.effective_visibility();
    let noise = config.detector_noise_rms;
    Ok(phases
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let mut value = mzi_response(w[1] - w[0], config.inherent_phase, v);
            if noise > 0.0 {
                let z: f64 = rng.sample(StandardNormal);
                value += noise * z;
            }
            VoltageSample {
                value,
                pulse_pair_index: i,
            }
        })
        .collect())
}

/// Sampling budget of an oscilloscope record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingBudget {
    /// Samples per pulse cycle, `round(sample_rate / repetition_rate)`.
    pub samples_per_cycle: u64,
    /// Usable interference events in the record: complete pulse periods
    /// minus one, since each measurement pairs a pulse with its predecessor.
    pub n_pulses: u64,
}

/// How many interference measurements a record of `record_samples` points
/// supports at the given pulse and sampling rates.
pub fn sampling_budget(
    record_samples: u64,
    repetition_rate: f64,
    sample_rate: f64,
) -> Result<SamplingBudget, MziError> {
    if !(repetition_rate > 0.0) || !(sample_rate > repetition_rate) {
        return Err(MziError::InvalidRates);
    }
    let samples_per_cycle = (sample_rate / repetition_rate).round() as u64;
    let complete_cycles = (record_samples as f64 * repetition_rate / sample_rate).floor() as u64;
    Ok(SamplingBudget {
        samples_per_cycle,
        n_pulses: complete_cycles.saturating_sub(1),
    })
}
