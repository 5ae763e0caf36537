//! Monitor stack at the transmitter output: optical isolators, a spectral
//! filter, an average-power meter and a discriminating photodetector.
//!
//! Each component is modelled at the level its blind spot is exploited:
//! isolators leak by their finite isolation, a brick-wall spectral filter is
//! transparent to light at the signal wavelength, an average-power meter
//! reads `peak × duty cycle` and so misses short pulses, and a
//! finite-bandwidth detector under-reports the peak of a pulse much shorter
//! than its response time. For a Gaussian pulse through an ideal low-pass
//! filter the relative surviving peak has the closed form `erf(ω₀σ/√2)` with
//! `σ = Δt₃dB/√(8 ln 2)`; a single-pole (RC) response is integrated
//! numerically.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;
use std::collections::BTreeSet;
use std::f64::consts::TAU;
use thiserror::Error;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Minimum number of repetition periods an average-power reading must cover.
const MIN_AVERAGING_PERIODS: f64 = 100.0;

#[derive(Debug, Error)]
pub enum CountermeasureError {
    #[error("invalid component: {field}: {constraint}")]
    InvalidComponent {
        field: &'static str,
        constraint: &'static str,
    },
    #[error(
        "integration window {window:.3e} s too short: must cover at least \
         {MIN_AVERAGING_PERIODS} periods of {period:.3e} s"
    )]
    WindowTooShort { window: f64, period: f64 },
}

/// Brick-wall spectral filter: full transmission inside the passband
/// (edges included), zero outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralFilter {
    /// Passband center, meters.
    pub center_wavelength: f64,
    /// Full passband width, hertz.
    pub passband: f64,
}

/// Thermal power meter reading the window-averaged optical power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerMeter {
    pub integration_window: f64,
    /// Alarm threshold on the averaged power, watts.
    pub alarm_threshold: f64,
}

/// Frequency response model of the monitoring photodetector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseModel {
    IdealLowpass,
    SinglePole,
}

/// Discriminating photodetector with finite bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorDetector {
    /// Conversion gain, volts per watt.
    pub gain: f64,
    /// Analog bandwidth, hertz.
    pub bandwidth: f64,
    pub response_model: ResponseModel,
    /// Voltage at or above which the detector raises an alarm.
    pub discrimination_voltage: f64,
    /// Peak optical power at or above which the detector is damaged, watts.
    pub damage_threshold: f64,
}

/// Ordered monitor stack between the quantum channel and the laser facet.
/// Monitors tap the incoming light ahead of the attenuating elements; the
/// filter and then the isolators sit in the propagation path.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountermeasureStack {
    /// Isolation values in dB, applied in order.
    #[serde(default)]
    pub isolators: Vec<f64>,
    #[serde(default)]
    pub filter: Option<SpectralFilter>,
    #[serde(default)]
    pub power_meter: Option<PowerMeter>,
    #[serde(default)]
    pub monitor_detector: Option<MonitorDetector>,
}

impl CountermeasureStack {
    pub fn validate(&self) -> Result<(), CountermeasureError> {
        let err = |field, constraint| {
            Err(CountermeasureError::InvalidComponent { field, constraint })
        };
        if self.isolators.iter().any(|&db| !(db >= 0.0)) {
            return err("isolators", "isolation must be non-negative dB");
        }
        if let Some(f) = &self.filter {
            if !(f.center_wavelength > 0.0) {
                return err("filter.center_wavelength", "must be positive");
            }
            if !(f.passband > 0.0) {
                return err("filter.passband", "must be positive");
            }
        }
        if let Some(m) = &self.power_meter {
            if !(m.integration_window > 0.0) {
                return err("power_meter.integration_window", "must be positive");
            }
            if !(m.alarm_threshold > 0.0) {
                return err("power_meter.alarm_threshold", "must be positive");
            }
        }
        if let Some(d) = &self.monitor_detector {
            if !(d.gain > 0.0) {
                return err("monitor_detector.gain", "must be positive");
            }
            if !(d.bandwidth > 0.0) {
                return err("monitor_detector.bandwidth", "must be positive");
            }
            if !(d.discrimination_voltage > 0.0) {
                return err("monitor_detector.discrimination_voltage", "must be positive");
            }
            if !(d.damage_threshold > 0.0) {
                return err("monitor_detector.damage_threshold", "must be positive");
            }
        }
        Ok(())
    }
}

/// Pulsed channel signal arriving at the stack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSignal {
    pub peak_power: f64,
    pub width_3db: f64,
    pub repetition_rate: f64,
    pub wavelength: f64,
}

/// One-way transmission of an isolator: `power × 10^(−dB/10)`.
pub fn isolator_transmit(power_in: f64, isolation_db: f64) -> f64 {
    power_in * 10f64.powf(-isolation_db / 10.0)
}

/// Brick-wall filter transmission. Light whose optical frequency falls inside
/// the passband (edges included) passes untouched; in particular, light at
/// the signal wavelength of a filter centered on it always passes.
pub fn filter_transmit(
    power_in: f64,
    _signal_wavelength: f64,
    eve_wavelength: f64,
    filter: &SpectralFilter,
) -> f64 {
    let f_eve = SPEED_OF_LIGHT / eve_wavelength;
    let f_center = SPEED_OF_LIGHT / filter.center_wavelength;
    if (f_eve - f_center).abs() <= filter.passband / 2.0 {
        power_in
    } else {
        0.0
    }
}

/// Window-averaged power of a pulse train, rectangular duty-cycle
/// approximation: `peak × width × rate`.
pub fn average_power_reading(
    peak_power: f64,
    pulse_width_3db: f64,
    repetition_rate: f64,
    window: f64,
) -> Result<f64, CountermeasureError> {
    let period = 1.0 / repetition_rate;
    if window < MIN_AVERAGING_PERIODS * period {
        return Err(CountermeasureError::WindowTooShort { window, period });
    }
    let duty = (pulse_width_3db * repetition_rate).min(1.0);
    Ok(peak_power * duty)
}

/// Relative surviving peak (in [0, 1]) of a Gaussian pulse of the given
/// 3 dB width after a low-pass device of the given bandwidth.
pub fn lowpass_peak_amplitude(width_3db: f64, bandwidth: f64, model: ResponseModel) -> f64 {
    if bandwidth.is_infinite() {
        return 1.0;
    }
    let sigma = width_3db / (8.0 * 2.0f64.ln()).sqrt();
    match model {
        ResponseModel::IdealLowpass => {
            let omega0 = TAU * bandwidth;
            erf(omega0 * sigma / std::f64::consts::SQRT_2)
        }
        ResponseModel::SinglePole => single_pole_peak(sigma, TAU * bandwidth),
    }
}

/// Peak of exp(−t²/2σ²) convolved with the causal response ωc·e^{−ωc·t},
/// by direct time-domain quadrature (trapezoid in s, two-stage scan in t).
fn single_pole_peak(sigma: f64, omega_c: f64) -> f64 {
    let ds = (sigma.min(1.0 / omega_c)) / 40.0;
    let s_max = 40.0 / omega_c;
    let n_s = ((s_max / ds).ceil() as usize).clamp(100, 2_000_000);

    let response_at = |t: f64| -> f64 {
        let mut acc = 0.0;
        for i in 0..=n_s {
            let s = i as f64 * ds;
            let x = (t - s) / sigma;
            let v = (-omega_c * s - 0.5 * x * x).exp();
            acc += if i == 0 || i == n_s { 0.5 * v } else { v };
        }
        omega_c * acc * ds
    };

    let t_lo = -2.0 * sigma;
    let t_hi = 6.0 * sigma + 6.0 / omega_c;
    let coarse_n = 240;
    let coarse_step = (t_hi - t_lo) / coarse_n as f64;
    let mut best_t = t_lo;
    let mut best = f64::MIN;
    for i in 0..=coarse_n {
        let t = t_lo + i as f64 * coarse_step;
        let g = response_at(t);
        if g > best {
            best = g;
            best_t = t;
        }
    }
    let fine_step = coarse_step / 30.0;
    for i in -30..=30 {
        let t = best_t + i as f64 * fine_step;
        let g = response_at(t);
        if g > best {
            best = g;
        }
    }
    best.min(1.0)
}

/// Detector response to one pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorReading {
    pub output_voltage: f64,
    pub alarm: bool,
    pub damaged: bool,
}

/// Voltage, alarm and damage verdicts of the monitoring photodetector for a
/// pulse of the given peak power and width. Damage depends on the incident
/// peak alone, alarm on the bandwidth-limited voltage.
pub fn monitor_response(
    peak_power: f64,
    width_3db: f64,
    detector: &MonitorDetector,
) -> MonitorReading {
    let relative = lowpass_peak_amplitude(width_3db, detector.bandwidth, detector.response_model);
    let output_voltage = detector.gain * peak_power * relative;
    MonitorReading {
        output_voltage,
        alarm: output_voltage >= detector.discrimination_voltage,
        damaged: peak_power >= detector.damage_threshold,
    }
}

/// Monitor components that can raise flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonitorKind {
    PowerMeter,
    MonitorDetector,
}

impl std::fmt::Display for MonitorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MonitorKind::PowerMeter => write!(f, "power_meter"),
            MonitorKind::MonitorDetector => write!(f, "monitor_detector"),
        }
    }
}

/// Per-component line of a stack evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport {
    pub component: String,
    pub power_in: f64,
    pub power_out: f64,
    pub alarm: bool,
    pub damaged: bool,
}

/// Outcome of pushing a signal through the stack.
#[derive(Debug, Clone, PartialEq)]
pub struct StackEvaluation {
    /// Power arriving at the laser facet after filter and isolators.
    pub power_at_facet: f64,
    pub alarms: BTreeSet<MonitorKind>,
    pub damaged: BTreeSet<MonitorKind>,
    pub components: Vec<ComponentReport>,
}

/// Evaluate the stack against an incoming pulsed signal.
///
/// Monitors observe the raw incoming light (they tap near the output port,
/// ahead of the attenuation chain); the filter and isolators then attenuate
/// the power that continues toward the laser facet.
pub fn stack_evaluate(
    signal: &ChannelSignal,
    stack: &CountermeasureStack,
    signal_wavelength: f64,
) -> Result<StackEvaluation, CountermeasureError> {
    stack.validate()?;
    let err = |field, constraint| {
        Err(CountermeasureError::InvalidComponent { field, constraint })
    };
    if !(signal.peak_power >= 0.0) {
        return err("signal.peak_power", "must be non-negative");
    }
    if !(signal.width_3db > 0.0) || !(signal.repetition_rate > 0.0) {
        return err("signal", "width and repetition rate must be positive");
    }
    if !(signal.wavelength > 0.0) || !(signal_wavelength > 0.0) {
        return err("signal.wavelength", "must be positive");
    }

    let mut alarms = BTreeSet::new();
    let mut damaged = BTreeSet::new();
    let mut components = Vec::new();

    if let Some(meter) = &stack.power_meter {
        let reading = average_power_reading(
            signal.peak_power,
            signal.width_3db,
            signal.repetition_rate,
            meter.integration_window,
        )?;
        let alarm = reading >= meter.alarm_threshold;
        if alarm {
            alarms.insert(MonitorKind::PowerMeter);
        }
        components.push(ComponentReport {
            component: "power_meter".into(),
            power_in: signal.peak_power,
            power_out: signal.peak_power,
            alarm,
            damaged: false,
        });
    }

    if let Some(det) = &stack.monitor_detector {
        let reading = monitor_response(signal.peak_power, signal.width_3db, det);
        if reading.alarm {
            alarms.insert(MonitorKind::MonitorDetector);
        }
        if reading.damaged {
            damaged.insert(MonitorKind::MonitorDetector);
        }
        components.push(ComponentReport {
            component: "monitor_detector".into(),
            power_in: signal.peak_power,
            power_out: signal.peak_power,
            alarm: reading.alarm,
            damaged: reading.damaged,
        });
    }

    let mut power = signal.peak_power;
    if let Some(filter) = &stack.filter {
        let out = filter_transmit(power, signal_wavelength, signal.wavelength, filter);
        components.push(ComponentReport {
            component: "filter".into(),
            power_in: power,
            power_out: out,
            alarm: false,
            damaged: false,
        });
        power = out;
    }
    for (i, &db) in stack.isolators.iter().enumerate() {
        let out = isolator_transmit(power, db);
        components.push(ComponentReport {
            component: format!("isolator[{i}]"),
            power_in: power,
            power_out: out,
            alarm: false,
            damaged: false,
        });
        power = out;
    }

    Ok(StackEvaluation {
        power_at_facet: power,
        alarms,
        damaged,
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const WL: f64 = 1550.0e-9;

    /// Closed-form peak of the Gaussian ⊛ single-pole response (exponentially
    /// modified Gaussian), used as an independent oracle.
    fn exgaussian_peak(sigma: f64, omega_c: f64) -> f64 {
        let g = |t: f64| -> f64 {
            let pref = omega_c * sigma * (std::f64::consts::PI / 2.0).sqrt();
            let expo = 0.5 * omega_c * omega_c * sigma * sigma - omega_c * t;
            let arg = (omega_c * sigma * sigma - t) / (std::f64::consts::SQRT_2 * sigma);
            pref * expo.exp() * statrs::function::erf::erfc(arg)
        };
        let mut best = f64::MIN;
        let lo = -2.0 * sigma;
        let hi = 6.0 * sigma + 6.0 / omega_c;
        for i in 0..=4000 {
            let t = lo + (hi - lo) * i as f64 / 4000.0;
            best = best.max(g(t));
        }
        best
    }

    #[test]
    fn zero_isolation_is_identity() {
        assert_eq!(isolator_transmit(0.6e-3, 0.0), 0.6e-3);
    }

    #[test]
    fn isolation_follows_db_arithmetic() {
        // 25 dB on 0.6 mW leaves about 1.897 µW.
        let out = isolator_transmit(0.6e-3, 25.0);
        assert!((out - 1.897e-6).abs() / 1.897e-6 < 1e-3, "out = {out:.4e}");
    }

    #[test]
    fn filter_blocks_detuned_light_and_passes_matched_light() {
        let filter = SpectralFilter {
            center_wavelength: WL,
            passband: 50.0e9,
        };
        // 1 nm detuning at 1550 nm is ~125 GHz, far outside a 50 GHz passband.
        assert_eq!(filter_transmit(1.0e-3, WL, 1551.0e-9, &filter), 0.0);
        assert_eq!(filter_transmit(1.0e-3, WL, WL, &filter), 1.0e-3);
    }

    #[test]
    fn filter_passband_edge_is_transmitted() {
        let filter = SpectralFilter {
            center_wavelength: WL,
            passband: 50.0e9,
        };
        let f_center = SPEED_OF_LIGHT / WL;
        let edge_wavelength = SPEED_OF_LIGHT / (f_center + 25.0e9);
        let out = filter_transmit(1.0e-3, WL, edge_wavelength, &filter);
        assert_eq!(out, 1.0e-3);
    }

    #[test]
    fn duty_cycle_collapses_the_average_power() {
        // 0.6 mW peak, 100 ps pulses at 10 MHz: duty 0.001, average 0.6 µW.
        let avg = average_power_reading(0.6e-3, 100.0e-12, 10.0e6, 1.0e-3).unwrap();
        assert!((avg - 0.6e-6).abs() < 1e-18);
        let other = average_power_reading(1.0e-3, 50.0e-12, 10.0e6, 1.0e-3).unwrap();
        assert!((other - 0.5e-6).abs() < 1e-18);
    }

    #[test]
    fn cw_limit_reads_the_peak() {
        let avg = average_power_reading(2.0e-3, 1.0e-7, 10.0e6, 1.0e-3).unwrap();
        assert_eq!(avg, 2.0e-3);
    }

    #[test]
    fn short_window_is_rejected() {
        assert!(matches!(
            average_power_reading(1.0e-3, 100.0e-12, 10.0e6, 1.0e-6),
            Err(CountermeasureError::WindowTooShort { .. })
        ));
    }

    #[test]
    fn infinite_bandwidth_passes_everything() {
        assert_eq!(
            lowpass_peak_amplitude(100.0e-12, f64::INFINITY, ResponseModel::IdealLowpass),
            1.0
        );
        assert_eq!(
            lowpass_peak_amplitude(100.0e-12, f64::INFINITY, ResponseModel::SinglePole),
            1.0
        );
    }

    #[test]
    fn brick_wall_response_at_one_gigahertz() {
        let r = lowpass_peak_amplitude(100.0e-12, 1.0e9, ResponseModel::IdealLowpass);
        assert!((r - 0.210).abs() < 1e-3, "r = {r:.5}");
        let wide = lowpass_peak_amplitude(100.0e-12, 40.0e9, ResponseModel::IdealLowpass);
        assert!(wide >= 0.999);
    }

    #[test]
    fn ideal_lowpass_matches_spectral_quadrature() {
        // Direct numerical integral of the truncated Gaussian spectrum.
        for &width in &[50.0e-12, 100.0e-12, 200.0e-12] {
            for &bw in &[0.5e9, 1.0e9, 5.0e9, 10.0e9, 40.0e9] {
                let sigma = width / (8.0f64 * 2.0f64.ln()).sqrt();
                let omega0 = TAU * bw;
                let n = 200_000;
                let mut acc = 0.0;
                for i in 0..=n {
                    let w = omega0 * i as f64 / n as f64;
                    let v = (-0.5 * sigma * sigma * w * w).exp();
                    acc += if i == 0 || i == n { 0.5 * v } else { v };
                }
                // g(0) = 2·∫₀^ω₀ σ/√(2π)·e^{−σ²ω²/2} dω
                let oracle = 2.0 * acc * (omega0 / n as f64) * sigma
                    / (2.0 * std::f64::consts::PI).sqrt();
                let closed = lowpass_peak_amplitude(width, bw, ResponseModel::IdealLowpass);
                assert!(
                    (closed - oracle).abs() < 1e-6,
                    "width {width:.0e} bw {bw:.0e}: {closed} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn single_pole_matches_exgaussian_closed_form() {
        for &(width, bw) in &[(100.0e-12, 1.0e9), (100.0e-12, 5.0e9), (200.0e-12, 1.0e9)] {
            let sigma = width / (8.0f64 * 2.0f64.ln()).sqrt();
            let oracle = exgaussian_peak(sigma, TAU * bw);
            let got = lowpass_peak_amplitude(width, bw, ResponseModel::SinglePole);
            assert!(
                (got - oracle).abs() < 1e-3,
                "width {width:.0e} bw {bw:.0e}: {got} vs {oracle}"
            );
        }
    }

    #[test]
    fn single_pole_passes_more_peak_than_the_brick_wall() {
        // A first-order pole rolls off as 1/ω and lets more of the pulse
        // spectrum through than a hard cutoff at the same bandwidth.
        let pole = lowpass_peak_amplitude(100.0e-12, 1.0e9, ResponseModel::SinglePole);
        let brick = lowpass_peak_amplitude(100.0e-12, 1.0e9, ResponseModel::IdealLowpass);
        assert!((pole - 0.4161).abs() < 1e-3, "pole = {pole:.4}");
        assert!(pole > brick);
    }

    #[test]
    fn detector_fires_on_a_fast_bright_pulse() {
        let det = MonitorDetector {
            gain: 1.0e4,
            bandwidth: f64::INFINITY,
            response_model: ResponseModel::IdealLowpass,
            discrimination_voltage: 0.2,
            damage_threshold: 10.0e-3,
        };
        let r = monitor_response(100.0e-6, 100.0e-12, &det);
        assert!((r.output_voltage - 1.0).abs() < 1e-12);
        assert!(r.alarm);
        assert!(!r.damaged);
    }

    #[test]
    fn slow_detector_underreports_a_fast_pulse() {
        let mut det = MonitorDetector {
            gain: 1.0e4,
            bandwidth: 1.0e9,
            response_model: ResponseModel::IdealLowpass,
            discrimination_voltage: 0.5,
            damage_threshold: 10.0e-3,
        };
        // A pulse a fast detector would read at 1 V comes out at 0.21 V
        // (brick wall) or 0.42 V (single pole): below this discriminator.
        let brick = monitor_response(100.0e-6, 100.0e-12, &det);
        assert!((brick.output_voltage - 0.210).abs() < 1e-3);
        assert!(!brick.alarm);
        det.response_model = ResponseModel::SinglePole;
        let pole = monitor_response(100.0e-6, 100.0e-12, &det);
        assert!((pole.output_voltage - 0.4161).abs() < 1e-3);
        assert!(!pole.alarm);
        det.bandwidth = f64::INFINITY;
        assert!(monitor_response(100.0e-6, 100.0e-12, &det).alarm);
    }

    #[test]
    fn damage_flag_ignores_the_voltage() {
        let det = MonitorDetector {
            gain: 1.0e-6,
            bandwidth: 1.0e6,
            response_model: ResponseModel::SinglePole,
            discrimination_voltage: 10.0,
            damage_threshold: 1.0e-3,
        };
        let r = monitor_response(2.0e-3, 100.0e-12, &det);
        assert!(r.damaged);
        assert!(!r.alarm);
    }

    #[test]
    fn empty_stack_is_transparent() {
        let sig = ChannelSignal {
            peak_power: 0.6e-3,
            width_3db: 100.0e-12,
            repetition_rate: 10.0e6,
            wavelength: WL,
        };
        let eval = stack_evaluate(&sig, &CountermeasureStack::default(), WL).unwrap();
        assert_eq!(eval.power_at_facet, 0.6e-3);
        assert!(eval.alarms.is_empty());
        assert!(eval.damaged.is_empty());
    }

    #[test]
    fn lone_isolator_matches_db_arithmetic_without_alarms() {
        let sig = ChannelSignal {
            peak_power: 0.6e-3,
            width_3db: 1.0e-9,
            repetition_rate: 206.34e6,
            wavelength: WL,
        };
        let stack = CountermeasureStack {
            isolators: vec![25.0],
            ..Default::default()
        };
        let eval = stack_evaluate(&sig, &stack, WL).unwrap();
        assert!((eval.power_at_facet - 1.897e-6).abs() / 1.897e-6 < 1e-3);
        assert!(eval.alarms.is_empty());
    }

    #[test]
    fn detuned_light_is_blocked_before_the_facet() {
        let sig = ChannelSignal {
            peak_power: 0.6e-3,
            width_3db: 1.0e-9,
            repetition_rate: 206.34e6,
            wavelength: 1540.0e-9,
        };
        let stack = CountermeasureStack {
            filter: Some(SpectralFilter {
                center_wavelength: WL,
                passband: 50.0e9,
            }),
            ..Default::default()
        };
        let eval = stack_evaluate(&sig, &stack, WL).unwrap();
        assert_eq!(eval.power_at_facet, 0.0);
    }

    proptest! {
        #[test]
        fn serial_isolators_compose_additively(
            p in 1.0e-9f64..1.0,
            a in 0.0f64..60.0,
            b in 0.0f64..60.0,
        ) {
            let two_pass = isolator_transmit(isolator_transmit(p, a), b);
            let one_pass = isolator_transmit(p, a + b);
            prop_assert!((two_pass - one_pass).abs() <= 1e-12 * one_pass.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn brick_wall_response_is_monotone_in_bandwidth(
            width_ps in 20.0f64..500.0,
            bw_ghz in 0.1f64..50.0,
        ) {
            let width = width_ps * 1e-12;
            let lo = lowpass_peak_amplitude(width, bw_ghz * 1e9, ResponseModel::IdealLowpass);
            let hi = lowpass_peak_amplitude(width, bw_ghz * 2e9, ResponseModel::IdealLowpass);
            prop_assert!(hi >= lo);
            prop_assert!((0.0..=1.0).contains(&lo));
        }

        #[test]
        fn average_power_is_linear_in_peak_and_duty(
            peak in 1.0e-6f64..1.0e-2,
            width_ps in 10.0f64..1000.0,
        ) {
            let rate = 10.0e6;
            let base = average_power_reading(peak, width_ps * 1e-12, rate, 1.0).unwrap();
            let double_peak = average_power_reading(2.0 * peak, width_ps * 1e-12, rate, 1.0).unwrap();
            let double_width = average_power_reading(peak, 2.0 * width_ps * 1e-12, rate, 1.0).unwrap();
            prop_assert!((double_peak - 2.0 * base).abs() < 1e-15);
            prop_assert!((double_width - 2.0 * base).abs() < 1e-12 * base.max(1e-30));
        }
    }
}
