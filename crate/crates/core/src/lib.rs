//! Simulation toolkit for optical injection-seeding attacks on gain-switched
//! laser transmitters.
//!
//! A gain-switched semiconductor laser builds every pulse from spontaneous
//! emission, so the optical phase of each pulse is an independent uniform
//! random variable. Light injected into the laser facet from outside replaces
//! that spontaneous seed and drags the emitted phase onto the injected one.
//! This crate models the whole chain at desk scale:
//!
//! - [`laser`] — stochastic rate-equation dynamics of the pulsed diode, with
//!   and without external injection;
//! - [`interferometer`] — the unbalanced Mach–Zehnder readout that converts
//!   pulse-to-pulse phase differences into voltages;
//! - [`photon_stats`] — phase-averaged photon statistics, the arcsine
//!   intensity law and distribution classification;
//! - [`countermeasure`] — isolator / filter / power-meter / monitor-detector
//!   stacks and their finite-bandwidth blind spots;
//! - [`attack`] — the injection planner, multi-laser time-shift
//!   fingerprinting and end-to-end attack scenarios;
//! - [`keyrate`] — decoy-state key rates under intensity fluctuation and the
//!   phase-randomization security verdict.
//!
//! Heavy Monte Carlo loops run data-parallel via rayon when the default
//! `parallel` feature is enabled. Every parallel entry point has a
//! `*_serial` twin producing bit-identical output; randomness is always
//! derived per work item from `(seed, index)`, so results do not depend on
//! the thread count.

pub mod attack;
pub mod countermeasure;
mod exec;
pub mod interferometer;
pub mod keyrate;
pub mod laser;
pub mod photon_stats;
pub mod stats;

pub use attack::{
    plan_attack, required_facet_power, run_attack_scenario, timeshift_fingerprint, AttackError,
    AttackOutcome, AttackWaveform, MultiLaserSource,
};
pub use countermeasure::{
    average_power_reading, filter_transmit, isolator_transmit, lowpass_peak_amplitude,
    monitor_response, stack_evaluate, CountermeasureStack, MonitorDetector, ResponseModel,
};
pub use interferometer::{mzi_response, sampling_budget, train_to_voltages, InterferometerConfig};
pub use keyrate::{gllp_decoy_rate, security_verdict, KeyRateParams, SecurityVerdict};
pub use laser::{
    extract_phase, pulse_shape_metrics, simulate_pulse_summaries, simulate_pulse_train,
    DrivePulse, InjectedField, LaserConfig, PulseRecord,
};
pub use photon_stats::{
    arcsine_pdf, classify_distribution, photon_number_distribution, quadrature_std_curve,
    randomization_quality, CoherentSource, DistributionVerdict, IntensityHistogram, PhaseModel,
};
