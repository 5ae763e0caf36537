//! Statistical properties of the simulated laser: phase uniformity when
//! free-running, monotone locking under injection, earlier turn-on when
//! seeded, and integrator convergence.

use seedlock::laser::{
    simulate_pulse_summaries, simulate_pulse_summaries_serial, simulate_pulse_train,
    step_convergence_rms, InjectedField, LaserConfig,
};
use seedlock::stats::{circular_mean_resultant, circular_std, circular_variance, kuiper_uniformity};
use std::f64::consts::TAU;

fn seeded(facet_power: f64, linewidth: f64) -> InjectedField {
    InjectedField {
        facet_power,
        detuning: 0.0,
        linewidth,
        gate: None,
        enabled: true,
    }
}

#[test]
fn unseeded_phases_are_uniform() {
    let config = LaserConfig::default();
    let pulses = simulate_pulse_summaries(&config, &InjectedField::off(), 1000).unwrap();
    let phases: Vec<f64> = pulses.iter().map(|p| p.phase).collect();
    let test = kuiper_uniformity(&phases);
    assert!(
        test.p_value > 0.01,
        "uniformity rejected: V = {:.4}, p = {:.4}",
        test.statistic,
        test.p_value
    );
}

#[test]
fn strong_injection_locks_the_phase() {
    let config = LaserConfig::default();
    let pulses = simulate_pulse_summaries(&config, &seeded(3.0e-4, 0.0), 1000).unwrap();
    let residuals: Vec<f64> = pulses
        .iter()
        .map(|p| p.phase - p.injected_phase.unwrap())
        .collect();
    let spread = circular_std(&residuals);
    assert!(spread < 0.2, "residual spread = {spread:.3} rad");
}

#[test]
fn circular_variance_is_non_increasing_in_facet_power() {
    // Log sweep chosen clear of the unstable partial-locking pocket; means
    // and 3σ bands over 10 seeds.
    let powers = [1.0e-8, 1.0e-7, 3.0e-6, 1.0e-4, 1.0e-3];
    let n_seeds = 10u64;
    let mut stats = Vec::new();
    for &p in &powers {
        let mut vars = Vec::new();
        for s in 0..n_seeds {
            let mut config = LaserConfig::default();
            config.rng_seed = 1000 + s;
            let pulses = simulate_pulse_summaries(&config, &seeded(p, 0.0), 300).unwrap();
            let phases: Vec<f64> = pulses.iter().map(|x| x.phase).collect();
            vars.push(circular_variance(&phases));
        }
        let mean = vars.iter().sum::<f64>() / vars.len() as f64;
        let sd =
            (vars.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vars.len() as f64).sqrt();
        stats.push((p, mean, sd));
    }
    for w in stats.windows(2) {
        let (p0, m0, s0) = w[0];
        let (p1, m1, s1) = w[1];
        let band = 3.0 * (s0 * s0 + s1 * s1).sqrt();
        assert!(
            m1 <= m0 + band,
            "variance rose from {m0:.4} at {p0:.1e} W to {m1:.4} at {p1:.1e} W (band {band:.4})"
        );
    }
    // The sweep must actually span unlocked to locked.
    assert!(stats.first().unwrap().1 > 0.5);
    assert!(stats.last().unwrap().1 < 0.05);
}

#[test]
fn seeded_pulses_turn_on_earlier() {
    let power = 1.0e-4;
    let mut wins = 0;
    let mut total_advance = 0.0;
    for s in 0..10u64 {
        let mut config = LaserConfig::default();
        config.rng_seed = 2000 + s;
        let free = simulate_pulse_summaries(&config, &InjectedField::off(), 200).unwrap();
        let locked = simulate_pulse_summaries(&config, &seeded(power, 1.0e5), 200).unwrap();
        let mean = |xs: &[seedlock::laser::PulseSummary]| {
            xs.iter().map(|p| p.turn_on_time).sum::<f64>() / xs.len() as f64
        };
        let advance = mean(&free) - mean(&locked);
        if advance > 0.0 {
            wins += 1;
        }
        total_advance += advance;
    }
    assert!(wins >= 9, "seeded turn-on earlier in only {wins}/10 seeds");
    assert!(total_advance > 0.0);
}

#[test]
fn locked_phase_tracks_the_injected_phase_up_to_a_constant() {
    let config = LaserConfig::default();
    let pulses = simulate_pulse_summaries(&config, &seeded(3.0e-4, 1.0e5), 500).unwrap();
    let residuals: Vec<f64> = pulses
        .iter()
        .map(|p| p.phase - p.injected_phase.unwrap())
        .collect();
    let (_, r_bar) = circular_mean_resultant(&residuals);
    // A tight cluster around one offset angle: high mean resultant length.
    assert!(r_bar > 0.99, "r̄ = {r_bar:.4}");
    let spread = circular_std(&residuals);
    assert!(spread < 0.15, "spread = {spread:.3} rad");
}

#[test]
fn oscillation_count_changes_under_strong_injection() {
    // Qualitative A/B: the sign is recorded, not asserted.
    let config = LaserConfig::default();
    let free = simulate_pulse_summaries(&config, &InjectedField::off(), 100).unwrap();
    let lit = simulate_pulse_summaries(&config, &seeded(1.0e-4, 0.0), 100).unwrap();
    let mean = |xs: &[seedlock::laser::PulseSummary]| {
        xs.iter().map(|p| p.oscillation_count as f64).sum::<f64>() / xs.len() as f64
    };
    let (a, b) = (mean(&free), mean(&lit));
    println!("oscillation count: unseeded {a:.2}, seeded {b:.2} (delta {:+.2})", b - a);
}

#[test]
fn integrator_converges_at_half_step_in_the_operating_regimes() {
    let config = LaserConfig::default();
    let free = step_convergence_rms(&config, &InjectedField::off(), 24).unwrap();
    assert!(free < 0.05, "unseeded half-step RMS = {free:.4} rad");
    let locked = step_convergence_rms(&config, &seeded(3.0e-4, 1.0e5), 24).unwrap();
    assert!(locked < 0.05, "locked half-step RMS = {locked:.4} rad");
}

#[test]
fn parallel_and_serial_trains_are_bit_identical() {
    let config = LaserConfig::default();
    let inj = seeded(1.0e-5, 1.0e5);
    let par = simulate_pulse_summaries(&config, &inj, 64).unwrap();
    let ser = simulate_pulse_summaries_serial(&config, &inj, 64).unwrap();
    assert_eq!(par, ser);
}

#[test]
fn record_phases_match_summary_phases() {
    let config = LaserConfig::default();
    let inj = InjectedField::off();
    let records = simulate_pulse_train(&config, &inj, 8).unwrap();
    let summaries = simulate_pulse_summaries(&config, &inj, 8).unwrap();
    for (r, s) in records.iter().zip(&summaries) {
        assert_eq!(r.phase, s.phase);
        assert_eq!(r.peak_power, s.peak_power);
        assert_eq!(r.width_3db, s.width_3db);
    }
}

#[test]
fn uniform_phase_through_the_fringe_matches_the_wiener_limit() {
    // Cross-check against a pure phase-diffusion model: when each pulse's
    // phase is an independent uniform draw, adjacent differences are uniform
    // too, so the mean fringe voltage is 1/2 and its variance 1/8 — the
    // analytic limit of complete phase diffusion.
    let config = LaserConfig::default();
    let pulses = simulate_pulse_summaries(&config, &InjectedField::off(), 4001).unwrap();
    let phases: Vec<f64> = pulses.iter().map(|p| p.phase).collect();
    let voltages: Vec<f64> = phases
        .windows(2)
        .map(|w| 0.5 * (1.0 + (w[1] - w[0] + std::f64::consts::FRAC_PI_2).cos()))
        .collect();
    let n = voltages.len() as f64;
    let mean = voltages.iter().sum::<f64>() / n;
    let var = voltages.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let mean_band = 3.0 * (0.125f64 / n).sqrt();
    assert!((mean - 0.5).abs() < mean_band, "mean = {mean:.4}");
    // Var of [1+cos U]/2 over uniform U is exactly 1/8.
    assert!((var - 0.125).abs() < 0.01, "var = {var:.4}");
    let angles: Vec<f64> = phases.windows(2).map(|w| (w[1] - w[0]).rem_euclid(TAU)).collect();
    let test = kuiper_uniformity(&angles);
    assert!(test.p_value > 0.01, "Δφ uniformity p = {:.4}", test.p_value);
}
