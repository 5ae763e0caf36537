//! Gain-switched semiconductor laser dynamics with optional external optical
//! injection.
//!
//! The diode is modelled by single-mode complex-envelope rate equations for
//! the carrier number `N(t)` and the intracavity field `E(t)` (normalized so
//! that `|E|²` is the photon number):
//!
//! ```text
//! dN/dt = I(t)/q − N/τn − Γ g (N − N0) |E|²
//! dE/dt = ½ (1 + iα) [Γ g (N − N0) − 1/τp] E + κ(t) + F(t)
//! ```
//!
//! `F` is the spontaneous-emission Langevin term with rate `β N/τn`, which
//! seeds each pulse with an isotropic complex Gaussian field — this is what
//! makes the free-running pulse phase uniform. `κ` is the injected-field
//! drive `√(P/(hν τp)) · e^{i(2πΔf·t + φ)}` derived from the power coupled
//! into the facet; when it dominates the spontaneous seed, the emitted phase
//! locks to the injected one.
//!
//! Each repetition period is integrated independently from the below-threshold
//! bias steady state (deep extinction between pulses is assumed, which is the
//! regime in which gain switching randomizes the phase in the first place).
//! That makes pulses embarrassingly parallel: pulse `k` draws its noise from
//! ChaCha stream `k + 1` of the configured seed, and the injected field's slow
//! phase walk across periods comes from stream `0`. Output is bit-identical
//! for a fixed seed regardless of thread count.
//!
//! Integration is fixed-step (0.25 ps by default) Euler–Maruyama with the
//! stiff linear field term applied as a per-step exponential at midpoint
//! gain, so the large α-factor phase rotation through the gain transient
//! does not pick up first-order step error; [`step_convergence_rms`]
//! quantifies the residual discretization error by re-running with coupled
//! noise at half the step.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

use crate::exec;

/// Elementary charge in coulombs.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Photon energy at the 1550 nm telecom line, in joules. The envelope is
/// reported in √W so that `|envelope|²` is emitted power.
pub const PHOTON_ENERGY: f64 = 1.281_578e-19;

/// Default integration step, seconds.
pub const DEFAULT_TIME_STEP: f64 = 0.25e-12;

/// Pre-pulse settling window at bias, seconds. Long enough for the field to
/// reach its spontaneous (or injection-fed) steady state before the drive
/// edge; the carrier number starts at its analytic bias value.
const SETTLE_DURATION: f64 = 0.3e-9;

/// Post-drive tail appended to the integration window, seconds.
const TAIL_DURATION: f64 = 0.5e-9;

/// Turn-on is the first crossing of this fraction of the pulse peak.
const TURN_ON_FRACTION: f64 = 0.1;

/// Local maxima above this fraction of the peak count as oscillations.
const OSCILLATION_FRACTION: f64 = 0.2;

/// Abort when more than this fraction of steps needed a negative-state clamp.
const CLAMP_ABORT_FRACTION: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum LaserError {
    #[error("invalid config: {field}: {constraint}")]
    InvalidConfig {
        field: &'static str,
        constraint: &'static str,
    },
    #[error(
        "non-finite state at t = {time:.4e} s (carriers = {carriers:.4e}, photons = {photons:.4e}); \
         reduce the step size or check the drive parameters"
    )]
    NonFiniteState {
        time: f64,
        carriers: f64,
        photons: f64,
    },
    #[error("negative-state clamping hit {fraction:.2e} of steps (limit {CLAMP_ABORT_FRACTION:.0e})")]
    ExcessiveClamping { fraction: f64 },
    #[error("degenerate pulse: envelope carries no energy")]
    DegeneratePulse,
}

/// Trapezoidal drive-current pulse applied once per repetition period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrivePulse {
    /// Below-threshold bias, amperes.
    pub bias_current: f64,
    /// Above-threshold peak, amperes.
    pub peak_current: f64,
    pub rise_time: f64,
    pub flat_top_duration: f64,
    pub fall_time: f64,
    pub repetition_rate: f64,
}

impl DrivePulse {
    pub fn period(&self) -> f64 {
        1.0 / self.repetition_rate
    }

    pub fn duration(&self) -> f64 {
        self.rise_time + self.flat_top_duration + self.fall_time
    }

    fn current_at(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= self.duration() {
            return self.bias_current;
        }
        let swing = self.peak_current - self.bias_current;
        if t < self.rise_time {
            self.bias_current + swing * (t / self.rise_time)
        } else if t < self.rise_time + self.flat_top_duration {
            self.peak_current
        } else {
            self.bias_current + swing * ((self.duration() - t) / self.fall_time)
        }
    }
}

impl Default for DrivePulse {
    fn default() -> Self {
        Self {
            bias_current: 3.0e-3,
            peak_current: 20.0e-3,
            rise_time: 100.0e-12,
            flat_top_duration: 600.0e-12,
            fall_time: 100.0e-12,
            repetition_rate: 206.34e6,
        }
    }
}

/// Rate-equation parameters of one gain-switched diode.
///
/// Defaults are representative 1550 nm DFB values, not a calibration of any
/// particular device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserConfig {
    /// Carrier lifetime τn, seconds.
    pub carrier_lifetime: f64,
    /// Photon lifetime τp, seconds.
    pub photon_lifetime: f64,
    /// Differential gain g, per second per carrier.
    pub gain_coefficient: f64,
    /// Transparency carrier number N0.
    pub transparency_carrier_number: f64,
    /// Linewidth enhancement factor α.
    pub linewidth_enhancement_factor: f64,
    /// Fraction β of spontaneous emission coupled into the lasing mode.
    pub spontaneous_emission_fraction: f64,
    /// Mode confinement factor Γ.
    pub confinement_factor: f64,
    pub drive_pulse: DrivePulse,
    /// Usually set by the scenario layer rather than the config file.
    #[serde(default)]
    pub rng_seed: u64,
}

impl LaserConfig {
    /// Threshold current `q (N0 + 1/(Γ g τp)) / τn`.
    pub fn threshold_current(&self) -> f64 {
        let n_th = self.transparency_carrier_number
            + 1.0 / (self.confinement_factor * self.gain_coefficient * self.photon_lifetime);
        ELEMENTARY_CHARGE * n_th / self.carrier_lifetime
    }

    pub fn validate(&self) -> Result<(), LaserError> {
        let err = |field, constraint| Err(LaserError::InvalidConfig { field, constraint });
        if !(self.carrier_lifetime > 0.0 && self.carrier_lifetime.is_finite()) {
            return err("carrier_lifetime", "must be positive");
        }
        if !(self.photon_lifetime > 0.0 && self.photon_lifetime.is_finite()) {
            return err("photon_lifetime", "must be positive");
        }
        if !(self.gain_coefficient > 0.0 && self.gain_coefficient.is_finite()) {
            return err("gain_coefficient", "must be positive");
        }
        if !(self.transparency_carrier_number >= 0.0) {
            return err("transparency_carrier_number", "must be non-negative");
        }
        if !self.linewidth_enhancement_factor.is_finite() {
            return err("linewidth_enhancement_factor", "must be finite");
        }
        if !(self.spontaneous_emission_fraction > 0.0 && self.spontaneous_emission_fraction <= 1.0)
        {
            return err("spontaneous_emission_fraction", "must be in (0, 1]");
        }
        if !(self.confinement_factor > 0.0 && self.confinement_factor <= 1.0) {
            return err("confinement_factor", "must be in (0, 1]");
        }
        let d = &self.drive_pulse;
        if !(d.repetition_rate > 0.0 && d.repetition_rate.is_finite()) {
            return err("drive_pulse.repetition_rate", "must be positive");
        }
        if d.rise_time < 0.0 || d.flat_top_duration < 0.0 || d.fall_time < 0.0 {
            return err("drive_pulse", "segment durations must be non-negative");
        }
        if d.duration() <= 0.0 {
            return err("drive_pulse", "total drive duration must be positive");
        }
        if d.period() <= d.duration() {
            return err(
                "drive_pulse.repetition_rate",
                "repetition period must exceed the drive-pulse duration",
            );
        }
        if d.period() <= SETTLE_DURATION + d.duration() + TAIL_DURATION {
            return err(
                "drive_pulse.repetition_rate",
                "repetition period must exceed the integration window (settle + drive + tail)",
            );
        }
        let i_th = self.threshold_current();
        if !(d.bias_current >= 0.0 && d.bias_current < i_th) {
            return err("drive_pulse.bias_current", "must sit below threshold");
        }
        if !(d.peak_current > i_th) {
            return err("drive_pulse.peak_current", "must sit above threshold");
        }
        Ok(())
    }
}

impl Default for LaserConfig {
    fn default() -> Self {
        Self {
            carrier_lifetime: 1.0e-9,
            photon_lifetime: 3.0e-12,
            gain_coefficient: 2.5e4,
            transparency_carrier_number: 1.0e7,
            linewidth_enhancement_factor: 5.0,
            spontaneous_emission_fraction: 1.0e-4,
            confinement_factor: 0.4,
            drive_pulse: DrivePulse::default(),
            rng_seed: 1,
        }
    }
}

/// Time window within each period during which the injected field is on,
/// relative to the drive edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateWindow {
    pub start: f64,
    pub duration: f64,
}

/// Externally injected light at the laser facet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InjectedField {
    /// Optical power coupled into the cavity, watts.
    pub facet_power: f64,
    /// Frequency offset from the free-running laser line, hertz.
    pub detuning: f64,
    /// Lorentzian linewidth of the injected field, hertz. Drives a Wiener
    /// phase walk across periods with variance 2π·linewidth·t.
    pub linewidth: f64,
    /// Optional gating; `None` means continuous wave.
    pub gate: Option<GateWindow>,
    pub enabled: bool,
}

impl InjectedField {
    pub fn off() -> Self {
        Self {
            facet_power: 0.0,
            detuning: 0.0,
            linewidth: 0.0,
            gate: None,
            enabled: false,
        }
    }

    pub fn validate(&self) -> Result<(), LaserError> {
        let err = |field, constraint| Err(LaserError::InvalidConfig { field, constraint });
        if !(self.facet_power >= 0.0 && self.facet_power.is_finite()) {
            return err("facet_power", "must be non-negative");
        }
        if !(self.linewidth >= 0.0 && self.linewidth.is_finite()) {
            return err("linewidth", "must be non-negative");
        }
        if !self.detuning.is_finite() {
            return err("detuning", "must be finite");
        }
        if let Some(g) = &self.gate {
            if !(g.duration > 0.0) {
                return err("gate.duration", "must be positive");
            }
        }
        Ok(())
    }

    fn is_active(&self) -> bool {
        self.enabled && self.facet_power > 0.0
    }
}

impl Default for InjectedField {
    fn default() -> Self {
        Self::off()
    }
}

/// One emitted pulse with its sampled complex envelope (in √W, so that
/// `|envelope[k]|²` is instantaneous power).
#[derive(Debug, Clone, PartialEq)]
pub struct PulseRecord {
    pub envelope: Vec<Complex64>,
    /// Sample interval of the envelope, seconds.
    pub sample_interval: f64,
    /// Time of the first envelope sample relative to the drive edge.
    pub start_time: f64,
    /// Energy-weighted circular mean of the envelope argument, in [0, 2π).
    pub phase: f64,
    /// Maximum of |envelope|², watts.
    pub peak_power: f64,
    /// First crossing of 10 % of the peak, relative to the drive edge.
    pub turn_on_time: f64,
    /// Contiguous interval around the peak with |envelope|² ≥ peak/2.
    pub width_3db: f64,
    pub pulse_index: u64,
}

/// Summary of one pulse without the envelope; used for long trains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSummary {
    pub pulse_index: u64,
    pub phase: f64,
    pub peak_power: f64,
    pub turn_on_time: f64,
    pub width_3db: f64,
    pub oscillation_count: usize,
    /// Phase of the injected field during this period, when injection is on.
    pub injected_phase: Option<f64>,
}

/// Shape metrics extracted from an envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeMetrics {
    pub turn_on_time: f64,
    pub width_3db: f64,
    pub peak_power: f64,
    pub oscillation_count: usize,
}

/// Energy-weighted circular mean of the envelope argument over samples at or
/// above half the peak power. Robust against relaxation-oscillation tails.
/// The result is written back into `record.phase` and returned.
pub fn extract_phase(record: &mut PulseRecord) -> Result<f64, LaserError> {
    let phase = phase_from_envelope(&record.envelope).ok_or(LaserError::DegeneratePulse)?;
    record.phase = phase;
    Ok(phase)
}

fn phase_from_envelope(envelope: &[Complex64]) -> Option<f64> {
    let peak = envelope.iter().map(|e| e.norm_sqr()).fold(0.0, f64::max);
    if peak <= 0.0 {
        return None;
    }
    let mut resultant = Complex64::new(0.0, 0.0);
    for e in envelope {
        let p = e.norm_sqr();
        if p >= 0.5 * peak {
            // weight |e|² on the unit phasor e/|e|
            resultant += e * (p.sqrt());
        }
    }
    if resultant.norm_sqr() == 0.0 {
        return None;
    }
    Some(resultant.arg().rem_euclid(TAU))
}

/// Turn-on time, 3 dB width, peak power and oscillation count of a pulse.
pub fn pulse_shape_metrics(record: &PulseRecord) -> Result<ShapeMetrics, LaserError> {
    shape_from_envelope(&record.envelope, record.sample_interval, record.start_time)
        .ok_or(LaserError::DegeneratePulse)
}

fn shape_from_envelope(envelope: &[Complex64], dt: f64, t0: f64) -> Option<ShapeMetrics> {
    let power: Vec<f64> = envelope.iter().map(|e| e.norm_sqr()).collect();
    let (peak_idx, &peak) = power
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("non-finite power"))?;
    if peak <= 0.0 {
        return None;
    }
    let turn_on_idx = power.iter().position(|&p| p >= TURN_ON_FRACTION * peak)?;
    let half = 0.5 * peak;
    let mut lo = peak_idx;
    while lo > 0 && power[lo - 1] >= half {
        lo -= 1;
    }
    let mut hi = peak_idx;
    while hi + 1 < power.len() && power[hi + 1] >= half {
        hi += 1;
    }
    // Each oscillation is an upward crossing of the 20 %-of-peak level;
    // hysteresis (re-arm below 15 %) keeps sample noise from double-counting.
    let arm_threshold = OSCILLATION_FRACTION * peak;
    let rearm_threshold = 0.75 * arm_threshold;
    let mut armed = true;
    let mut oscillation_count = 0;
    for &p in &power {
        if armed && p >= arm_threshold {
            oscillation_count += 1;
            armed = false;
        } else if !armed && p < rearm_threshold {
            armed = true;
        }
    }
    Some(ShapeMetrics {
        turn_on_time: t0 + turn_on_idx as f64 * dt,
        width_3db: (hi - lo + 1) as f64 * dt,
        peak_power: peak,
        oscillation_count: oscillation_count.max(1),
    })
}

/// Deterministic estimate of when the carrier number crosses threshold after
/// the drive edge, ignoring stimulated emission and noise. Used to center
/// gated injection pulses on the turn-on window.
pub fn estimate_threshold_crossing(config: &LaserConfig) -> f64 {
    let n_th = config.transparency_carrier_number
        + 1.0 / (config.confinement_factor * config.gain_coefficient * config.photon_lifetime);
    let dt = 1.0e-12;
    let mut carriers =
        config.drive_pulse.bias_current * config.carrier_lifetime / ELEMENTARY_CHARGE;
    let mut t = 0.0;
    let limit = config.drive_pulse.duration() + TAIL_DURATION;
    while t < limit {
        if carriers >= n_th {
            return t;
        }
        let current = config.drive_pulse.current_at(t);
        carriers += (current / ELEMENTARY_CHARGE - carriers / config.carrier_lifetime) * dt;
        t += dt;
    }
    limit
}

/// Per-pulse injection drive resolved for one period.
struct PulseInjection {
    /// √(P/(hν·τp)): field drive amplitude in √photons / s.
    amplitude: f64,
    detuning: f64,
    base_phase: f64,
    gate: Option<GateWindow>,
}

impl PulseInjection {
    fn drive_at(&self, t: f64) -> Complex64 {
        if self.amplitude == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if let Some(g) = &self.gate {
            if t < g.start || t >= g.start + g.duration {
                return Complex64::new(0.0, 0.0);
            }
        }
        Complex64::from_polar(self.amplitude, self.base_phase + TAU * self.detuning * t)
    }
}

struct SimGrid {
    dt: f64,
    n_steps: usize,
    /// Time of step 0 relative to the drive edge (negative: settle window).
    t0: f64,
}

impl SimGrid {
    fn new(config: &LaserConfig, dt: f64) -> Self {
        let window = SETTLE_DURATION + config.drive_pulse.duration() + TAIL_DURATION;
        SimGrid {
            dt,
            n_steps: (window / dt).ceil() as usize,
            t0: -SETTLE_DURATION,
        }
    }
}

/// Phase of the injected field at the start of each period: a uniform initial
/// phase plus a Wiener walk with per-period variance 2π·linewidth·T, plus the
/// deterministic detuning ramp. Drawn from noise stream 0 of the seed.
fn injection_base_phases(config: &LaserConfig, injection: &InjectedField, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    rng.set_stream(0);
    let period = config.drive_pulse.period();
    let sigma = (TAU * injection.linewidth * period).sqrt();
    let ramp = TAU * injection.detuning * period;
    let mut phase: f64 = rng.random::<f64>() * TAU;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(phase.rem_euclid(TAU));
        let step: f64 = rng.sample(StandardNormal);
        phase += sigma * step + ramp;
    }
    out
}

struct RawPulse {
    envelope: Vec<Complex64>,
}

/// One period of Euler–Maruyama integration. `draw` supplies the pair of
/// standard-normal increments for each step.
fn integrate_pulse(
    config: &LaserConfig,
    injection: &PulseInjection,
    grid: &SimGrid,
    mut draw: impl FnMut() -> (f64, f64),
) -> Result<RawPulse, LaserError> {
    let q = ELEMENTARY_CHARGE;
    let inv_tau_n = 1.0 / config.carrier_lifetime;
    let inv_tau_p = 1.0 / config.photon_lifetime;
    let gamma_g = config.confinement_factor * config.gain_coefficient;
    let n_tr = config.transparency_carrier_number;
    let alpha = config.linewidth_enhancement_factor;
    let beta = config.spontaneous_emission_fraction;
    let amp_scale = (PHOTON_ENERGY * inv_tau_p).sqrt();
    let dt = grid.dt;

    let mut field = Complex64::new(0.0, 0.0);
    let mut carriers = config.drive_pulse.bias_current * config.carrier_lifetime / q;
    let mut envelope = Vec::with_capacity(grid.n_steps);
    let mut clamped_steps = 0usize;

    for k in 0..grid.n_steps {
        let t = grid.t0 + k as f64 * dt;
        let gain = gamma_g * (carriers - n_tr);
        let photons = field.norm_sqr();
        let current = config.drive_pulse.current_at(t);

        // Exponential update of the stiff linear field term: the operator
        // ½(1+iα)(G − 1/τp) is integrated exactly over the step with the
        // gain frozen at its midpoint estimate, which keeps the α-factor
        // phase rotation accurate through the gain transient; drive and
        // noise enter as Euler–Maruyama increments.
        let carriers_mid = carriers
            + 0.5 * dt * (current / q - carriers * inv_tau_n - gain * photons);
        let gain_mid = gamma_g * (carriers_mid - n_tr);
        let x = 0.5 * (gain_mid - inv_tau_p) * dt;
        let growth = Complex64::from_polar(x.exp(), alpha * x);
        let spont = beta * carriers * inv_tau_n;
        let noise_sd = (0.5 * spont * dt).max(0.0).sqrt();
        let (g1, g2) = draw();
        field = field * growth
            + injection.drive_at(t + 0.5 * dt) * dt
            + Complex64::new(noise_sd * g1, noise_sd * g2);

        let photons_avg = 0.5 * (photons + field.norm_sqr());
        carriers += (current / q - carriers_mid * inv_tau_n - gain_mid * photons_avg) * dt;
        if carriers < 0.0 {
            carriers = 0.0;
            clamped_steps += 1;
        }
        if !carriers.is_finite() || !field.re.is_finite() || !field.im.is_finite() {
            return Err(LaserError::NonFiniteState {
                time: t,
                carriers,
                photons: field.norm_sqr(),
            });
        }
        envelope.push(field * amp_scale);
    }

    let fraction = clamped_steps as f64 / grid.n_steps as f64;
    if fraction > CLAMP_ABORT_FRACTION {
        return Err(LaserError::ExcessiveClamping { fraction });
    }
    Ok(RawPulse { envelope })
}

fn resolve_injection(
    injection: &InjectedField,
    config: &LaserConfig,
    base_phase: f64,
) -> PulseInjection {
    let amplitude = if injection.is_active() {
        (injection.facet_power / PHOTON_ENERGY / config.photon_lifetime).sqrt()
    } else {
        0.0
    };
    PulseInjection {
        amplitude,
        detuning: injection.detuning,
        base_phase,
        gate: injection.gate,
    }
}

fn pulse_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index + 1);
    rng
}

fn simulate_one_record(
    config: &LaserConfig,
    injection: &InjectedField,
    base_phase: f64,
    grid: &SimGrid,
    index: u64,
) -> Result<PulseRecord, LaserError> {
    let mut rng = pulse_rng(config.rng_seed, index);
    let pulse_inj = resolve_injection(injection, config, base_phase);
    let raw = integrate_pulse(config, &pulse_inj, grid, || {
        (rng.sample(StandardNormal), rng.sample(StandardNormal))
    })?;
    let shape = shape_from_envelope(&raw.envelope, grid.dt, grid.t0)
        .ok_or(LaserError::DegeneratePulse)?;
    let phase = phase_from_envelope(&raw.envelope).ok_or(LaserError::DegeneratePulse)?;
    Ok(PulseRecord {
        envelope: raw.envelope,
        sample_interval: grid.dt,
        start_time: grid.t0,
        phase,
        peak_power: shape.peak_power,
        turn_on_time: shape.turn_on_time,
        width_3db: shape.width_3db,
        pulse_index: index,
    })
}

fn simulate_one_summary(
    config: &LaserConfig,
    injection: &InjectedField,
    base_phase: f64,
    grid: &SimGrid,
    index: u64,
) -> Result<PulseSummary, LaserError> {
    let mut rng = pulse_rng(config.rng_seed, index);
    let pulse_inj = resolve_injection(injection, config, base_phase);
    let raw = integrate_pulse(config, &pulse_inj, grid, || {
        (rng.sample(StandardNormal), rng.sample(StandardNormal))
    })?;
    let shape = shape_from_envelope(&raw.envelope, grid.dt, grid.t0)
        .ok_or(LaserError::DegeneratePulse)?;
    let phase = phase_from_envelope(&raw.envelope).ok_or(LaserError::DegeneratePulse)?;
    Ok(PulseSummary {
        pulse_index: index,
        phase,
        peak_power: shape.peak_power,
        turn_on_time: shape.turn_on_time,
        width_3db: shape.width_3db,
        oscillation_count: shape.oscillation_count,
        injected_phase: injection.is_active().then_some(base_phase),
    })
}

fn validated_setup(
    config: &LaserConfig,
    injection: &InjectedField,
    n_pulses: usize,
) -> Result<(SimGrid, Vec<f64>), LaserError> {
    config.validate()?;
    injection.validate()?;
    if n_pulses == 0 {
        return Err(LaserError::InvalidConfig {
            field: "n_pulses",
            constraint: "must be at least 1",
        });
    }
    let grid = SimGrid::new(config, DEFAULT_TIME_STEP);
    let base = injection_base_phases(config, injection, n_pulses);
    Ok((grid, base))
}

/// Simulate `n_pulses` periods, keeping the full envelope of every pulse.
///
/// Memory grows linearly with `n_pulses × window/dt`; prefer
/// [`simulate_pulse_summaries`] for long trains.
pub fn simulate_pulse_train(
    config: &LaserConfig,
    injection: &InjectedField,
    n_pulses: usize,
) -> Result<Vec<PulseRecord>, LaserError> {
    let (grid, base) = validated_setup(config, injection, n_pulses)?;
    exec::map_indexed(n_pulses, |i| {
        simulate_one_record(config, injection, base[i], &grid, i as u64)
    })
    .into_iter()
    .collect()
}

/// Sequential fallback of [`simulate_pulse_train`]; same output bytes.
pub fn simulate_pulse_train_serial(
    config: &LaserConfig,
    injection: &InjectedField,
    n_pulses: usize,
) -> Result<Vec<PulseRecord>, LaserError> {
    let (grid, base) = validated_setup(config, injection, n_pulses)?;
    exec::map_indexed_serial(n_pulses, |i| {
        simulate_one_record(config, injection, base[i], &grid, i as u64)
    })
    .into_iter()
    .collect()
}

/// Simulate `n_pulses` periods, keeping per-pulse summaries only.
pub fn simulate_pulse_summaries(
    config: &LaserConfig,
    injection: &InjectedField,
    n_pulses: usize,
) -> Result<Vec<PulseSummary>, LaserError> {
    let (grid, base) = validated_setup(config, injection, n_pulses)?;
    exec::map_indexed(n_pulses, |i| {
        simulate_one_summary(config, injection, base[i], &grid, i as u64)
    })
    .into_iter()
    .collect()
}

/// Sequential fallback of [`simulate_pulse_summaries`]; same output bytes.
pub fn simulate_pulse_summaries_serial(
    config: &LaserConfig,
    injection: &InjectedField,
    n_pulses: usize,
) -> Result<Vec<PulseSummary>, LaserError> {
    let (grid, base) = validated_setup(config, injection, n_pulses)?;
    exec::map_indexed_serial(n_pulses, |i| {
        simulate_one_summary(config, injection, base[i], &grid, i as u64)
    })
    .into_iter()
    .collect()
}

/// Strong-convergence check of the integrator: re-run each pulse at half the
/// step with coupled Brownian increments (coarse increments are the summed
/// fine ones) and report the RMS difference of the extracted phases.
pub fn step_convergence_rms(
    config: &LaserConfig,
    injection: &InjectedField,
    n_pulses: usize,
) -> Result<f64, LaserError> {
    let (coarse, base) = validated_setup(config, injection, n_pulses)?;
    let fine = SimGrid {
        dt: coarse.dt / 2.0,
        n_steps: coarse.n_steps * 2,
        t0: coarse.t0,
    };
    let diffs = exec::map_indexed(n_pulses, |i| -> Result<f64, LaserError> {
        let mut rng = pulse_rng(config.rng_seed, i as u64);
        let noise: Vec<(f64, f64)> = (0..fine.n_steps)
            .map(|_| (rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let pulse_inj = resolve_injection(injection, config, base[i]);

        let mut pos = 0usize;
        let fine_run = integrate_pulse(config, &pulse_inj, &fine, || {
            let v = noise[pos];
            pos += 1;
            v
        })?;
        let mut pair = 0usize;
        // Sum of two N(0,1) draws over dt/2 equals √2 × N(0,1) over dt.
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let coarse_run = integrate_pulse(config, &pulse_inj, &coarse, || {
            let (a1, a2) = noise[2 * pair];
            let (b1, b2) = noise[2 * pair + 1];
            pair += 1;
            ((a1 + b1) * inv_sqrt2, (a2 + b2) * inv_sqrt2)
        })?;

        let pf = phase_from_envelope(&fine_run.envelope).ok_or(LaserError::DegeneratePulse)?;
        let pc = phase_from_envelope(&coarse_run.envelope).ok_or(LaserError::DegeneratePulse)?;
        let mut d = pf - pc;
        d = (d + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI;
        Ok(d * d)
    });
    let mut sum = 0.0;
    for d in diffs {
        sum += d?;
    }
    Ok((sum / n_pulses as f64).sqrt())
}
