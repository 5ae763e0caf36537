//! Eve's side of the game: find the injection power that locks the target
//! laser, shape a waveform that slips through the monitor stack, fingerprint
//! multi-laser transmitters by their per-diode timing, and run the whole
//! chain end to end.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::f64::consts::PI;
use thiserror::Error;

use crate::countermeasure::{
    stack_evaluate, ChannelSignal, CountermeasureError, CountermeasureStack, MonitorKind,
    StackEvaluation,
};
use crate::exec;
use crate::interferometer::{train_to_voltages, InterferometerConfig, MziError, VoltageSample};
use crate::laser::{
    estimate_threshold_crossing, simulate_pulse_summaries, GateWindow, InjectedField, LaserConfig,
    LaserError, PulseSummary,
};
use crate::photon_stats::{
    classify_distribution, Classification, DistributionVerdict, IntensityHistogram, StatsError,
    MIN_CLASSIFY_SAMPLES,
};
use crate::stats::circular_std;

/// Linewidth assumed for Eve's control laser when the planner builds a
/// waveform, hertz. Narrow tunable sources sit around this value.
pub const DEFAULT_CONTROL_LINEWIDTH: f64 = 1.0e5;

/// Facet-power bracket searched by [`required_facet_power`], watts.
const POWER_SEARCH_LO: f64 = 1.0e-9;
const POWER_SEARCH_HI: f64 = 1.0e-2;

/// Bisection iterations of the power search.
const POWER_SEARCH_ITERATIONS: usize = 30;

/// Pulses simulated per seed per power evaluation.
const LOCK_EVAL_PULSES: usize = 96;

/// Seeds per power evaluation.
const LOCK_EVAL_SEEDS: u64 = 3;

/// Candidate pulse widths the planner tries after continuous wave, seconds.
const WIDTH_GRID: [f64; 4] = [500.0e-12, 200.0e-12, 100.0e-12, 50.0e-12];

/// Bins of scenario histograms.
pub const HISTOGRAM_BINS: usize = 100;

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("invalid attack parameter: {field}: {constraint}")]
    InvalidParameter {
        field: &'static str,
        constraint: &'static str,
    },
    #[error(
        "lock spread target unreachable: {achieved_spread:.3} rad at the \
         {power_limit:.3e} W budget limit"
    )]
    TargetUnreachable {
        power_limit: f64,
        achieved_spread: f64,
    },
    #[error("attack plan infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Laser(#[from] LaserError),
    #[error(transparent)]
    Interferometer(#[from] MziError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Countermeasure(#[from] CountermeasureError),
}

impl AttackError {
    /// Distinguishes "no waveform can satisfy the constraints" from runtime
    /// failures; the CLI maps this to its own exit code.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            AttackError::Infeasible(_) | AttackError::TargetUnreachable { .. }
        )
    }
}

/// Eve's pulsed control waveform, referenced to the channel input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackWaveform {
    /// Peak power launched into the channel, watts.
    pub peak_power: f64,
    pub width_3db: f64,
    /// Synchronized to the target's clock.
    pub repetition_rate: f64,
    pub wavelength: f64,
    pub linewidth: f64,
    /// Pulse position within the target's period, relative to the drive edge.
    pub gate_offset: f64,
}

impl AttackWaveform {
    pub fn validate(&self) -> Result<(), AttackError> {
        let err = |field, constraint| Err(AttackError::InvalidParameter { field, constraint });
        if !(self.peak_power > 0.0) {
            return err("peak_power", "must be positive");
        }
        if !(self.width_3db > 0.0) {
            return err("width_3db", "must be positive");
        }
        if !(self.repetition_rate > 0.0) {
            return err("repetition_rate", "must be positive");
        }
        if !(self.wavelength > 0.0) {
            return err("wavelength", "must be positive");
        }
        if !(self.linewidth >= 0.0) {
            return err("linewidth", "must be non-negative");
        }
        if self.width_3db * self.repetition_rate > 1.0 + 1e-12 {
            return err("width_3db", "duty cycle width × rate must not exceed 1");
        }
        if !self.gate_offset.is_finite() {
            return err("gate_offset", "must be finite");
        }
        Ok(())
    }

    /// Whether the waveform is effectively continuous wave.
    pub fn is_cw(&self) -> bool {
        self.width_3db * self.repetition_rate >= 1.0 - 1e-9
    }

    fn channel_signal(&self, channel_loss_db: f64) -> ChannelSignal {
        ChannelSignal {
            peak_power: self.peak_power * db_transmission(channel_loss_db),
            width_3db: self.width_3db,
            repetition_rate: self.repetition_rate,
            wavelength: self.wavelength,
        }
    }

    /// Facet-referenced injected field once `facet_power` has been resolved
    /// through the stack.
    fn as_injection(&self, facet_power: f64) -> InjectedField {
        InjectedField {
            facet_power,
            detuning: 0.0,
            linewidth: self.linewidth,
            gate: (!self.is_cw()).then_some(GateWindow {
                start: self.gate_offset,
                duration: self.width_3db,
            }),
            enabled: true,
        }
    }
}

fn db_transmission(db: f64) -> f64 {
    10f64.powf(-db / 10.0)
}

/// One diode of a multi-laser transmitter, carrying its timing fingerprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FingerprintLaser {
    pub state_label: String,
    /// Mean turn-on shift of this diode, seconds.
    pub time_shift: f64,
    /// Gaussian timing jitter, seconds RMS.
    pub jitter_rms: f64,
}

/// Multi-laser source whose per-diode time shifts identify the encoded state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiLaserSource {
    pub lasers: Vec<FingerprintLaser>,
}

impl MultiLaserSource {
    pub fn validate(&self) -> Result<(), AttackError> {
        if self.lasers.len() < 2 {
            return Err(AttackError::InvalidParameter {
                field: "lasers",
                constraint: "need at least 2 lasers",
            });
        }
        let mut labels = BTreeSet::new();
        for l in &self.lasers {
            if !labels.insert(l.state_label.as_str()) {
                return Err(AttackError::InvalidParameter {
                    field: "lasers.state_label",
                    constraint: "labels must be distinct",
                });
            }
            if !(l.jitter_rms >= 0.0) {
                return Err(AttackError::InvalidParameter {
                    field: "lasers.jitter_rms",
                    constraint: "must be non-negative",
                });
            }
        }
        Ok(())
    }
}

/// Monte Carlo outcome of the time-shift intercept-resend attack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingerprintOutcome {
    pub classification_accuracy: f64,
    /// 0.5 per misclassified trial: a wrongly resent state errs half the time.
    pub added_qber: f64,
}

fn fingerprint_trial(source: &MultiLaserSource, seed: u64, trial: usize) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let n = source.lasers.len();
    let truth = rng.random_range(0..n);
    let z: f64 = rng.sample(StandardNormal);
    let observed = source.lasers[truth].time_shift + source.lasers[truth].jitter_rms * z;
    // Nearest-mean classification; ties resolve to the lowest index.
    let mut best = 0usize;
    let mut best_dist = f64::INFINITY;
    for (i, l) in source.lasers.iter().enumerate() {
        let d = (observed - l.time_shift).abs();
        if d < best_dist {
            best_dist = d;
            best = i;
        }
    }
    best == truth
}

fn fingerprint_outcome(correct: usize, n_trials: usize) -> FingerprintOutcome {
    let accuracy = correct as f64 / n_trials as f64;
    FingerprintOutcome {
        classification_accuracy: accuracy,
        added_qber: 0.5 * (n_trials - correct) as f64 / n_trials as f64,
    }
}

/// Intercept-resend by timing fingerprint: each trial draws a true diode
/// uniformly, observes its jittered time shift and classifies by the nearest
/// mean shift. Trials derive their randomness from `(seed, trial)`.
pub fn timeshift_fingerprint(
    source: &MultiLaserSource,
    n_trials: usize,
    seed: u64,
) -> Result<FingerprintOutcome, AttackError> {
    source.validate()?;
    if n_trials == 0 {
        return Err(AttackError::InvalidParameter {
            field: "n_trials",
            constraint: "must be at least 1",
        });
    }
    let correct = exec::map_indexed(n_trials, |t| fingerprint_trial(source, seed, t) as usize)
        .into_iter()
        .sum();
    Ok(fingerprint_outcome(correct, n_trials))
}

/// Sequential fallback of [`timeshift_fingerprint`]; same output bytes.
pub fn timeshift_fingerprint_serial(
    source: &MultiLaserSource,
    n_trials: usize,
    seed: u64,
) -> Result<FingerprintOutcome, AttackError> {
    source.validate()?;
    if n_trials == 0 {
        return Err(AttackError::InvalidParameter {
            field: "n_trials",
            constraint: "must be at least 1",
        });
    }
    let correct = exec::map_indexed_serial(n_trials, |t| fingerprint_trial(source, seed, t) as usize)
        .into_iter()
        .sum();
    Ok(fingerprint_outcome(correct, n_trials))
}

/// One evaluated point of the locking-power search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSweepPoint {
    pub facet_power: f64,
    /// Circular std of (emitted − injected) phase, radians.
    pub phase_spread: f64,
}

/// Result of the locking-power search.
#[derive(Debug, Clone, PartialEq)]
pub struct RequiredPower {
    /// Smallest bracketed facet power meeting the spread target, watts.
    pub facet_power: f64,
    /// Every point evaluated during the search, sorted by power.
    pub sweep: Vec<PowerSweepPoint>,
}

fn lock_spread_at(
    config: &LaserConfig,
    template: &InjectedField,
    facet_power: f64,
) -> Result<f64, AttackError> {
    let injection = InjectedField {
        facet_power,
        enabled: true,
        ..template.clone()
    };
    let mut residuals = Vec::with_capacity(LOCK_EVAL_PULSES * LOCK_EVAL_SEEDS as usize);
    for s in 0..LOCK_EVAL_SEEDS {
        let mut cfg = config.clone();
        cfg.rng_seed = config.rng_seed.wrapping_add(s);
        let summaries = simulate_pulse_summaries(&cfg, &injection, LOCK_EVAL_PULSES)?;
        for p in &summaries {
            let base = p.injected_phase.unwrap_or(0.0);
            residuals.push(p.phase - base);
        }
    }
    Ok(circular_std(&residuals))
}

/// Binary search on the facet power (fixed seed set, geometric bisection)
/// until the circular spread of the emitted-minus-injected phase meets the
/// target. Returns the found power together with the sweep record.
pub fn required_facet_power(
    config: &LaserConfig,
    template: &InjectedField,
    lock_spread_target: f64,
) -> Result<RequiredPower, AttackError> {
    if !(lock_spread_target > 0.0 && lock_spread_target < PI) {
        return Err(AttackError::InvalidParameter {
            field: "lock_spread_target",
            constraint: "must be in (0, π)",
        });
    }
    config.validate()?;
    template.validate()?;

    let mut sweep = Vec::new();
    let mut eval = |p: f64| -> Result<f64, AttackError> {
        let spread = lock_spread_at(config, template, p)?;
        sweep.push(PowerSweepPoint {
            facet_power: p,
            phase_spread: spread,
        });
        Ok(spread)
    };

    let spread_hi = eval(POWER_SEARCH_HI)?;
    if spread_hi > lock_spread_target {
        return Err(AttackError::TargetUnreachable {
            power_limit: POWER_SEARCH_HI,
            achieved_spread: spread_hi,
        });
    }
    let spread_lo = eval(POWER_SEARCH_LO)?;
    let mut lo = POWER_SEARCH_LO;
    let mut hi = POWER_SEARCH_HI;
    if spread_lo <= lock_spread_target {
        // Vacuous target: the search degenerates to the bottom of the grid.
        hi = lo;
    } else {
        for _ in 0..POWER_SEARCH_ITERATIONS {
            let mid = (lo * hi).sqrt();
            if eval(mid)? <= lock_spread_target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    sweep.sort_by(|a, b| a.facet_power.partial_cmp(&b.facet_power).expect("finite"));
    Ok(RequiredPower {
        facet_power: hi,
        sweep,
    })
}

/// A feasible attack plan: the waveform plus the evidence it was built on.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackPlan {
    pub waveform: AttackWaveform,
    pub required: RequiredPower,
    /// Stack response to the planned waveform, as seen at the channel output.
    pub stack_eval: StackEvaluation,
}

/// Choose the cheapest waveform that delivers `required_facet` watts to the
/// facet without tripping any monitor.
///
/// The peak is fixed by the locking requirement through the stack and channel
/// attenuation; the width walks down from continuous wave through the grid
/// until the duty cycle starves the average-power meter and the pulse
/// outruns the monitor bandwidth. The pulse is centered on the estimated
/// threshold crossing so the seed field is present while the pulse builds.
pub fn plan_waveform(
    required_facet: f64,
    stack: &CountermeasureStack,
    channel_loss_db: f64,
    repetition_rate: f64,
    signal_wavelength: f64,
    gate_center: f64,
    linewidth: f64,
) -> Result<AttackWaveform, AttackError> {
    if !(required_facet > 0.0) {
        return Err(AttackError::InvalidParameter {
            field: "required_facet",
            constraint: "must be positive",
        });
    }
    let period = 1.0 / repetition_rate;
    let probe = ChannelSignal {
        peak_power: 1.0,
        width_3db: period.min(100.0e-12),
        repetition_rate,
        wavelength: signal_wavelength,
    };
    let stack_transmission = stack_evaluate(&probe, stack, signal_wavelength)?.power_at_facet;
    let total_transmission = stack_transmission * db_transmission(channel_loss_db);
    if total_transmission <= 0.0 {
        return Err(AttackError::Infeasible(
            "stack blocks the control light entirely".into(),
        ));
    }
    let peak_power = required_facet / total_transmission;

    let mut widths = vec![period];
    widths.extend(WIDTH_GRID.iter().copied().filter(|w| *w < period));
    for width in widths {
        let candidate = AttackWaveform {
            peak_power,
            width_3db: width,
            repetition_rate,
            wavelength: signal_wavelength,
            linewidth,
            gate_offset: gate_center - width / 2.0,
        };
        let eval = stack_evaluate(
            &candidate.channel_signal(channel_loss_db),
            stack,
            signal_wavelength,
        )?;
        if eval.alarms.is_empty() && eval.damaged.is_empty() {
            return Ok(candidate);
        }
    }
    Err(AttackError::Infeasible(format!(
        "every candidate width trips a monitor at the {peak_power:.3e} W peak the lock requires"
    )))
}

/// Full planning pass: locate the locking power by simulation, then shape a
/// waveform around the monitor stack.
pub fn plan_attack(
    stack: &CountermeasureStack,
    config: &LaserConfig,
    channel_loss_db: f64,
    lock_spread_target: f64,
    signal_wavelength: f64,
) -> Result<AttackPlan, AttackError> {
    let template = InjectedField {
        facet_power: 0.0,
        detuning: 0.0,
        linewidth: DEFAULT_CONTROL_LINEWIDTH,
        gate: None,
        enabled: true,
    };
    let required = required_facet_power(config, &template, lock_spread_target)?;
    let gate_center = estimate_threshold_crossing(config);
    let waveform = plan_waveform(
        required.facet_power,
        stack,
        channel_loss_db,
        config.drive_pulse.repetition_rate,
        signal_wavelength,
        gate_center,
        DEFAULT_CONTROL_LINEWIDTH,
    )?;
    let stack_eval = stack_evaluate(
        &waveform.channel_signal(channel_loss_db),
        stack,
        signal_wavelength,
    )?;
    Ok(AttackPlan {
        waveform,
        required,
        stack_eval,
    })
}

/// How the injected light of a scenario is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum InjectionPlan {
    /// No injection: the unattacked baseline.
    Disabled,
    /// Facet-referenced injection, bypassing stack and channel.
    Direct(InjectedField),
    /// A concrete waveform pushed through channel loss and the stack.
    Fixed {
        waveform: AttackWaveform,
        channel_loss_db: f64,
    },
    /// Let the planner pick the waveform.
    Planned {
        channel_loss_db: f64,
        lock_spread_target: f64,
    },
}

/// End-to-end scenario description.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub laser: LaserConfig,
    pub interferometer: InterferometerConfig,
    pub stack: CountermeasureStack,
    pub injection: InjectionPlan,
    pub signal_wavelength: f64,
    pub n_pulses: usize,
    /// Seed of the detection-noise stream.
    pub noise_seed: u64,
    /// Optional intercept-resend fingerprint run on top of the lock.
    pub fingerprint: Option<FingerprintRun>,
}

#[derive(Debug, Clone)]
pub struct FingerprintRun {
    pub source: MultiLaserSource,
    pub n_trials: usize,
}

/// Outcome of an attack scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackOutcome {
    /// True when the voltage distribution stopped looking phase-randomized.
    pub locked: bool,
    pub alarms_triggered: BTreeSet<MonitorKind>,
    /// 1.0 when no fingerprint stage ran (Eve resends exactly what she saw).
    pub classification_accuracy: f64,
    pub added_qber: f64,
}

/// Everything a scenario run produces.
#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub outcome: AttackOutcome,
    pub histogram: IntensityHistogram,
    pub classification: Classification,
    pub plan: Option<AttackPlan>,
    pub stack_eval: Option<StackEvaluation>,
    pub injection: InjectedField,
    pub summaries: Vec<PulseSummary>,
    pub voltages: Vec<VoltageSample>,
}

/// Run a scenario end to end: resolve the injection through the stack, drive
/// the laser, interfere adjacent pulses, histogram the voltages and classify
/// the distribution. `locked` is true when the verdict departs from U-type.
pub fn run_attack_scenario(scenario: &Scenario) -> Result<ScenarioOutput, AttackError> {
    if scenario.n_pulses < (MIN_CLASSIFY_SAMPLES + 1) as usize {
        return Err(AttackError::InvalidParameter {
            field: "n_pulses",
            constraint: "need at least 1001 pulses for a distribution verdict",
        });
    }
    scenario.laser.validate()?;
    scenario.interferometer.validate()?;

    let mut plan = None;
    let mut stack_eval = None;
    let injection = match &scenario.injection {
        InjectionPlan::Disabled => InjectedField::off(),
        InjectionPlan::Direct(field) => {
            field.validate()?;
            field.clone()
        }
        InjectionPlan::Fixed {
            waveform,
            channel_loss_db,
        } => {
            waveform.validate()?;
            let eval = stack_evaluate(
                &waveform.channel_signal(*channel_loss_db),
                &scenario.stack,
                scenario.signal_wavelength,
            )?;
            let injection = waveform.as_injection(eval.power_at_facet);
            stack_eval = Some(eval);
            injection
        }
        InjectionPlan::Planned {
            channel_loss_db,
            lock_spread_target,
        } => {
            let p = plan_attack(
                &scenario.stack,
                &scenario.laser,
                *channel_loss_db,
                *lock_spread_target,
                scenario.signal_wavelength,
            )?;
            let injection = p.waveform.as_injection(p.stack_eval.power_at_facet);
            stack_eval = Some(p.stack_eval.clone());
            plan = Some(p);
            injection
        }
    };

    let summaries = simulate_pulse_summaries(&scenario.laser, &injection, scenario.n_pulses)?;
    let phases: Vec<f64> = summaries.iter().map(|p| p.phase).collect();
    let mut noise_rng = ChaCha8Rng::seed_from_u64(scenario.noise_seed);
    let voltages = train_to_voltages(&phases, &scenario.interferometer, &mut noise_rng)?;
    let values: Vec<f64> = voltages.iter().map(|v| v.value).collect();
    let histogram = IntensityHistogram::from_samples(&values, HISTOGRAM_BINS)?;
    let classification = classify_distribution(&histogram)?;

    let fingerprint = scenario
        .fingerprint
        .as_ref()
        .map(|f| timeshift_fingerprint(&f.source, f.n_trials, scenario.noise_seed))
        .transpose()?;

    let alarms = stack_eval
        .as_ref()
        .map(|e| e.alarms.clone())
        .unwrap_or_default();
    let outcome = AttackOutcome {
        locked: classification.verdict != DistributionVerdict::UType,
        alarms_triggered: alarms,
        classification_accuracy: fingerprint.map_or(1.0, |f| f.classification_accuracy),
        added_qber: fingerprint.map_or(0.0, |f| f.added_qber),
    };
    Ok(ScenarioOutput {
        outcome,
        histogram,
        classification,
        plan,
        stack_eval,
        injection,
        summaries,
        voltages,
    })
}
