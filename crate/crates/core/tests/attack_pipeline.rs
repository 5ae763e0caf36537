//! End-to-end behaviour of the attack engine: the locking-power search, the
//! planner's self-consistency against the stack, and full scenarios.

use seedlock::attack::{
    plan_attack, required_facet_power, run_attack_scenario, InjectionPlan, Scenario,
};
use seedlock::countermeasure::{stack_evaluate, ChannelSignal, CountermeasureStack};
use seedlock::interferometer::InterferometerConfig;
use seedlock::keyrate::{security_verdict, SecurityVerdict};
use seedlock::laser::{InjectedField, LaserConfig};
use seedlock::photon_stats::DistributionVerdict;

const WL: f64 = 1550.0e-9;

fn cw_template() -> InjectedField {
    InjectedField {
        facet_power: 0.0,
        detuning: 0.0,
        linewidth: 1.0e5,
        gate: None,
        enabled: true,
    }
}

fn quiet_interferometer() -> InterferometerConfig {
    InterferometerConfig {
        detector_noise_rms: 0.002,
        visibility: 1.0,
        ..InterferometerConfig::default()
    }
}

#[test]
fn vacuous_target_degenerates_to_the_grid_floor() {
    let req = required_facet_power(&LaserConfig::default(), &cw_template(), 3.1).unwrap();
    assert_eq!(req.facet_power, 1.0e-9);
    assert!(req.sweep.len() >= 2);
}

#[test]
fn required_power_is_finite_and_reproducible_at_a_real_target() {
    let config = LaserConfig::default();
    let a = required_facet_power(&config, &cw_template(), 0.2).unwrap();
    let b = required_facet_power(&config, &cw_template(), 0.2).unwrap();
    assert_eq!(a.facet_power, b.facet_power);
    assert!(a.facet_power > 1.0e-7 && a.facet_power < 1.0e-3, "P* = {:.3e}", a.facet_power);
    // The sweep record brackets the answer.
    assert!(a.sweep.iter().any(|p| p.phase_spread <= 0.2));
    assert!(a.sweep.iter().any(|p| p.phase_spread > 0.2));
}

#[test]
fn required_power_does_not_grow_when_the_target_loosens() {
    let config = LaserConfig::default();
    let tight = required_facet_power(&config, &cw_template(), 0.15).unwrap();
    let loose = required_facet_power(&config, &cw_template(), 0.6).unwrap();
    assert!(
        loose.facet_power <= tight.facet_power,
        "loose {:.3e} > tight {:.3e}",
        loose.facet_power,
        tight.facet_power
    );
}

#[test]
fn shrinking_the_photon_lifetime_moves_the_required_power() {
    let config = LaserConfig::default();
    let base = required_facet_power(&config, &cw_template(), 0.2).unwrap();
    let mut faster = config.clone();
    faster.photon_lifetime /= 2.0;
    let moved = required_facet_power(&faster, &cw_template(), 0.2).unwrap();
    let ratio = moved.facet_power / base.facet_power;
    println!(
        "halving photon lifetime moves the required power {:.3e} -> {:.3e} ({}x)",
        base.facet_power, moved.facet_power, ratio
    );
    assert!(ratio != 1.0);
}

#[test]
fn planned_attack_is_self_consistent_against_the_stack() {
    let stack = CountermeasureStack {
        isolators: vec![25.0],
        ..Default::default()
    };
    let config = LaserConfig::default();
    let plan = plan_attack(&stack, &config, 3.0, 0.2, WL).unwrap();
    let eval = stack_evaluate(
        &ChannelSignal {
            peak_power: plan.waveform.peak_power * 10f64.powf(-0.3),
            width_3db: plan.waveform.width_3db,
            repetition_rate: plan.waveform.repetition_rate,
            wavelength: plan.waveform.wavelength,
        },
        &stack,
        WL,
    )
    .unwrap();
    assert!(eval.alarms.is_empty());
    assert!(eval.damaged.is_empty());
    assert!(eval.power_at_facet >= plan.required.facet_power * 0.999);
}

#[test]
fn baseline_scenario_stays_u_type_and_assured() {
    let scenario = Scenario {
        laser: LaserConfig::default(),
        interferometer: quiet_interferometer(),
        stack: CountermeasureStack::default(),
        injection: InjectionPlan::Disabled,
        signal_wavelength: WL,
        n_pulses: 6000,
        noise_seed: 7,
        fingerprint: None,
    };
    let out = run_attack_scenario(&scenario).unwrap();
    assert_eq!(out.classification.verdict, DistributionVerdict::UType);
    assert!(!out.outcome.locked);
    assert!(out.outcome.alarms_triggered.is_empty());
    assert_eq!(security_verdict(0.0, out.outcome.locked), SecurityVerdict::Assured);
}

#[test]
fn direct_injection_scenario_locks_and_voids_security() {
    let scenario = Scenario {
        laser: LaserConfig::default(),
        interferometer: quiet_interferometer(),
        stack: CountermeasureStack::default(),
        injection: InjectionPlan::Direct(InjectedField {
            facet_power: 3.0e-4,
            detuning: 0.0,
            linewidth: 1.0e5,
            gate: None,
            enabled: true,
        }),
        signal_wavelength: WL,
        n_pulses: 6000,
        noise_seed: 7,
        fingerprint: None,
    };
    let out = run_attack_scenario(&scenario).unwrap();
    assert_eq!(out.classification.verdict, DistributionVerdict::Gaussian);
    assert!(out.outcome.locked);
    assert_eq!(security_verdict(0.0, out.outcome.locked), SecurityVerdict::Void);
}

#[test]
fn histogram_sample_count_is_pulses_minus_one() {
    let scenario = Scenario {
        laser: LaserConfig::default(),
        interferometer: quiet_interferometer(),
        stack: CountermeasureStack::default(),
        injection: InjectionPlan::Disabled,
        signal_wavelength: WL,
        n_pulses: 1500,
        noise_seed: 1,
        fingerprint: None,
    };
    let out = run_attack_scenario(&scenario).unwrap();
    assert_eq!(out.histogram.n_samples(), 1499);
    assert_eq!(out.voltages.len(), 1499);
    assert_eq!(out.summaries.len(), 1500);
}
