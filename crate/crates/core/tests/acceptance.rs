//! Exit-gate criteria. Runs as a plain binary under `cargo test` and prints
//! one PASS/FAIL line per criterion; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bunchlab_core::verify::{random_configuration, random_matrix};
use bunchlab_core::{
    closed_form_enhancement, coincidence_probability, delay_scan, emission_probability, enumerate_scenarios,
    optimal_transmissivity, oracle_permutation_sum, parse_label, permanent_fast, permanent_naive,
    scenario_to_packets, v_overlap, AmplifierGain, ComplexMatrix, InputConfiguration, WavePacket,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const WIDTH: f64 = 1.0;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn packet(t: f64) -> WavePacket {
    WavePacket::gaussian(t, WIDTH).unwrap()
}

fn within_budget(elapsed: Duration, budget: Duration, inner: Outcome) -> Outcome {
    let passed = inner.passed && elapsed < budget;
    outcome(
        passed,
        format!(
            "{} [{:.3}s of {:.0}s budget]",
            inner.detail,
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        ),
    )
}

/// Tables I-III, column by column, exactly as printed.
fn table_reproduction() -> Outcome {
    let tables: [(&str, &[(&str, u64)]); 3] = [
        (
            "2a2b",
            &[("2a2b", 6), ("2a1b+1b", 3), ("1ab+1ab", 4), ("1ab+a+b", 2)],
        ),
        (
            "3a2b",
            &[
                ("3a2b", 10),
                ("2a2b+a", 6),
                ("3a1b+b", 4),
                ("2a1b+ab", 6),
                ("1a2b+2a", 3),
                ("2a1b+a+b", 3),
                ("ab+a+ab", 4),
                ("ab+a+a+b", 2),
            ],
        ),
        (
            "3a3b",
            &[
                ("3a3b", 20),
                ("3a2b+b", 10),
                ("3a1b+2b", 4),
                ("2a2b+ab", 12),
                ("2a2b+a+b", 6),
                ("2a1b+1a2b", 9),
                ("2a1b+1ab+b", 6),
                ("2a1b+a+b+b", 3),
                ("ab+ab+ab", 8),
                ("ab+ab+a+b", 4),
                ("ab+b+a+a+b", 2),
            ],
        ),
    ];
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut entries = 0;
    for (name, columns) in tables {
        let (n, m) = parse_label(name).unwrap().totals();
        let enumerated = enumerate_scenarios(n, m).unwrap();
        for &(label, printed) in columns {
            entries += 1;
            let scenario = parse_label(label).unwrap();
            let closed = closed_form_enhancement(&scenario);
            let listed = enumerated.iter().find(|(s, _)| *s == scenario).map(|(_, f)| *f);
            if closed != printed || listed != Some(printed) || scenario.totals() != (n, m) {
                mismatches.push(format!(
                    "{label}: closed {closed}, listed {listed:?}, printed {printed}"
                ));
            }
        }
    }
    within_budget(
        start.elapsed(),
        Duration::from_secs(1),
        outcome(
            mismatches.is_empty(),
            format!("{entries} entries, mismatches {mismatches:?}"),
        ),
    )
}

fn engine_matches_closed_form() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut count = 0;
    for total in 1..=6 {
        for n in 0..=total {
            for (scenario, factor) in enumerate_scenarios(n, total - n).unwrap() {
                let cfg = scenario_to_packets(&scenario, WIDTH, 12.0 * WIDTH).unwrap();
                let e = coincidence_probability(&cfg).unwrap().enhancement;
                worst = worst.max((e - factor as f64).abs());
                count += 1;
            }
        }
    }
    within_budget(
        start.elapsed(),
        Duration::from_secs(10),
        outcome(
            worst < 1e-6,
            format!("{count} scenarios, max |error| {worst:.2e} (tol 1e-6)"),
        ),
    )
}

/// m matched a-photons plus one b-photon; N - m spectators well separated.
fn stimulated_emission_law() -> Outcome {
    let mut worst = 0.0f64;
    for m in 0..=5usize {
        for spectators in 0..=3usize {
            if m + spectators == 0 {
                continue;
            }
            let mut port_a = vec![packet(0.0); m];
            port_a.extend((1..=spectators).map(|k| packet(12.0 * k as f64)));
            let n = port_a.len();
            let cfg =
                InputConfiguration::new(port_a, vec![packet(0.0)], optimal_transmissivity(n, 1).unwrap())
                    .unwrap();
            let r = coincidence_probability(&cfg).unwrap();
            worst = worst.max((r.enhancement - (1 + m) as f64).abs());

            // Absolute convention: T^N R (1+m) (N+1)!.
            let t = cfg.transmissivity();
            let fact: f64 = (1..=n + 1).map(|k| k as f64).product();
            let expected = t.powi(n as i32) * (1.0 - t) * (1 + m) as f64 * fact;
            worst = worst.max((r.p_quantum - expected).abs() / expected);
        }
    }
    outcome(
        worst < 1e-6,
        format!("m = 0..=5 with 0..=3 spectators, max error {worst:.2e} (tol 1e-6)"),
    )
}

fn partial_overlap_law() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=6usize {
        for offset in [0.0, WIDTH, 2.0 * WIDTH, 4.0 * WIDTH] {
            let group = packet(0.0);
            let single = packet(offset);
            let v = v_overlap(&single, &group).unwrap();
            let gaussian = (-offset * offset / (2.0 * WIDTH * WIDTH)).exp();
            let cfg = InputConfiguration::new(vec![group; n], vec![single], 0.5).unwrap();
            let e = coincidence_probability(&cfg).unwrap().enhancement;
            worst = worst
                .max((e - (1.0 + n as f64 * v)).abs())
                .max((v - gaussian).abs());
        }
    }
    outcome(
        worst < 1e-9,
        format!("N = 1..=6, 4 offsets, max error {worst:.2e} (tol 1e-9)"),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut worst = 0.0f64;
    let cases = 250;
    for _ in 0..cases {
        let cfg = random_configuration(&mut rng, 5);
        let fast = coincidence_probability(&cfg).unwrap();
        let slow = oracle_permutation_sum(&cfg).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        worst = worst
            .max(rel(fast.p_quantum, slow.p_quantum))
            .max(rel(fast.p_classical, slow.p_classical))
            .max(rel(fast.enhancement, slow.enhancement));
    }
    within_budget(
        start.elapsed(),
        Duration::from_secs(60),
        outcome(
            worst < 1e-9,
            format!("{cases} random configurations, max rel error {worst:.2e} (tol 1e-9)"),
        ),
    )
}

fn permanent_kernel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut worst = 0.0f64;
    let cases = 600;
    for k in 0..cases {
        let m = random_matrix(&mut rng, 1 + k % 8);
        let naive = permanent_naive(&m).unwrap();
        worst = worst.max((permanent_fast(&m).unwrap() - naive).norm() / naive.norm());
    }
    let mut exact = true;
    let mut fact = 1.0;
    for n in 1..=8 {
        fact *= n as f64;
        let ones = ComplexMatrix::ones(n).unwrap();
        let eye = ComplexMatrix::identity(n).unwrap();
        exact &= permanent_fast(&ones).unwrap() == Complex64::new(fact, 0.0);
        exact &= permanent_naive(&ones).unwrap() == Complex64::new(fact, 0.0);
        exact &= permanent_fast(&eye).unwrap() == Complex64::new(1.0, 0.0);
        exact &= permanent_naive(&eye).unwrap() == Complex64::new(1.0, 0.0);
    }
    outcome(
        worst < 1e-10 && exact,
        format!(
            "{cases} random matrices, max rel error {worst:.2e} (tol 1e-10); exact special cases: {exact}"
        ),
    )
}

fn transmissivity_dependence() -> Outcome {
    let mut spread_worst = 0.0f64;
    let mut argmax_worst = 0.0f64;
    for (n, m) in [(1, 1), (2, 1), (3, 1), (3, 2), (2, 4), (5, 1)] {
        // Partially overlapping packets so the enhancement is non-trivial.
        let port_a: Vec<_> = (0..n).map(|k| packet(0.4 * k as f64)).collect();
        let port_b: Vec<_> = (0..m).map(|k| packet(0.3 - 0.5 * k as f64)).collect();
        let cfg = InputConfiguration::new(port_a, port_b, 0.5).unwrap();

        let ratios: Vec<f64> = (1..=9)
            .map(|k| {
                coincidence_probability(&cfg.with_transmissivity(k as f64 / 10.0).unwrap())
                    .unwrap()
                    .enhancement
            })
            .collect();
        let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
        let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
        spread_worst = spread_worst.max(hi - lo);

        let (mut best_t, mut best_p) = (0.0, f64::MIN);
        for k in 0..=1000 {
            let t = k as f64 * 1e-3;
            let p = coincidence_probability(&cfg.with_transmissivity(t).unwrap())
                .unwrap()
                .p_quantum;
            if p > best_p {
                best_p = p;
                best_t = t;
            }
        }
        argmax_worst = argmax_worst.max((best_t - optimal_transmissivity(n, m).unwrap()).abs());
    }
    outcome(
        spread_worst < 1e-10 && argmax_worst <= 2e-3,
        format!(
            "enhancement spread {spread_worst:.2e} (tol 1e-10); argmax offset {argmax_worst:.1e} (tol 2e-3)"
        ),
    )
}

fn delay_scan_profile() -> Outcome {
    let sep = 20.0 * WIDTH;
    let mut port_a = vec![packet(0.0)];
    port_a.extend([packet(sep); 2]);
    port_a.extend([packet(2.0 * sep); 3]);
    let cfg =
        InputConfiguration::new(port_a, vec![packet(0.0)], optimal_transmissivity(6, 1).unwrap()).unwrap();
    let delays: Vec<f64> = (-240..=400).map(|k| k as f64 * 0.25 * WIDTH).collect();
    let scan = delay_scan(&cfg, &delays).unwrap();

    let peak_near = |center: f64| {
        scan.points
            .iter()
            .filter(|p| (p.delay - center).abs() <= 5.0 * WIDTH)
            .map(|p| p.normalized)
            .fold(f64::MIN, f64::max)
    };
    let peaks = [peak_near(0.0), peak_near(sep), peak_near(2.0 * sep)];
    let peak_error = peaks
        .iter()
        .zip([2.0, 3.0, 4.0])
        .map(|(p, e)| (p - e).abs())
        .fold(0.0, f64::max);
    let far_error = scan
        .points
        .iter()
        .filter(|p| p.delay <= -12.0 * WIDTH || p.delay >= 2.0 * sep + 12.0 * WIDTH)
        .map(|p| (p.normalized - 1.0).abs())
        .fold((scan.baseline - 1.0).abs(), f64::max);
    outcome(
        peak_error < 1e-4 && far_error < 1e-6,
        format!(
            "peaks {peaks:.6?} (tol 1e-4); baseline {:.9}, max far deviation {far_error:.1e} (tol 1e-6)",
            scan.baseline
        ),
    )
}

fn amplifier_ratio() -> Outcome {
    let gain = AmplifierGain::from_coupling(Complex64::new(0.0625, 0.0)).unwrap();
    let spontaneous = emission_probability(&gain, 0, 0);
    let exact = (0..=10usize).all(|m| {
        (0..=3).all(|unmatched| emission_probability(&gain, m, unmatched) / spontaneous == (m + 1) as f64)
    });
    outcome(exact, "m = 0..=10, ratio to spontaneous emission == m+1 exactly")
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 table reproduction", table_reproduction),
        ("2 engine vs closed form", engine_matches_closed_form),
        ("3 stimulated-emission law", stimulated_emission_law),
        ("4 partial-overlap law", partial_overlap_law),
        ("5 oracle equivalence", oracle_equivalence),
        ("6 permanent kernel", permanent_kernel),
        ("7 transmissivity dependence", transmissivity_dependence),
        ("8 delay scan", delay_scan_profile),
        ("9 amplifier", amplifier_ratio),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (name, run) in criteria {
        let o = run();
        if !o.passed {
            failures += 1;
        }
        println!(
            "[{}] criterion {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let total = start.elapsed();
    let in_time = total < Duration::from_secs(120);
    println!(
        "[{}] total runtime {:.2}s (budget 120s)",
        if in_time { "PASS" } else { "FAIL" },
        total.as_secs_f64()
    );
    if failures == 0 && in_time {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
