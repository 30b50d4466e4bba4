//! Seeded self-check suite: each fast path is compared against an
//! independent route (quadrature, factorial permanent, literal permutation
//! sum, closed-form scenario factors). The same seed always produces the same
//! report.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::amplifier::{emission_probability, AmplifierGain};
use crate::error::Result;
use crate::interference_engine::{
    coincidence_probability, enhancement_partial, oracle_permutation_sum, v_overlap, InputConfiguration,
};
use crate::permanents::{permanent_fast, permanent_naive, ComplexMatrix};
use crate::scenarios::{binomial, closed_form_enhancement, enumerate_scenarios, scenario_to_packets};
use crate::temporal_modes::{gram, overlap, WavePacket};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteSize {
    pub overlap_cases: usize,
    pub gram_cases: usize,
    pub permanent_cases: usize,
    pub oracle_cases: usize,
}

impl Default for SuiteSize {
    fn default() -> Self {
        Self {
            overlap_cases: 200,
            gram_cases: 1000,
            permanent_cases: 500,
            oracle_cases: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    /// Worst observed error in the check's own metric.
    pub max_error: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
    pub all_passed: bool,
}

struct Check {
    name: &'static str,
    tolerance: f64,
    cases: usize,
    max_error: f64,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            cases: 0,
            max_error: 0.0,
        }
    }

    fn record(&mut self, error: f64) {
        self.cases += 1;
        // NaN must fail the check.
        if error.is_nan() || error > self.max_error {
            self.max_error = if error.is_nan() { f64::INFINITY } else { error };
        }
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            name: self.name,
            passed: self.max_error <= self.tolerance,
            cases: self.cases,
            max_error: self.max_error,
            tolerance: self.tolerance,
        }
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Packet with center in [-2, 2], width in [0.5, 2], detuning in [-1, 1] and
/// arbitrary phase (unit-free).
pub fn random_packet(rng: &mut impl Rng) -> WavePacket {
    WavePacket::new(
        rng.random_range(-2.0..2.0),
        rng.random_range(0.5..2.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(0.0..std::f64::consts::TAU),
    )
    .expect("sampled parameters are valid")
}

/// Random configuration with `1 <= N + M <= max_photons`.
pub fn random_configuration(rng: &mut impl Rng, max_photons: usize) -> InputConfiguration {
    let total = rng.random_range(1..=max_photons);
    let n = rng.random_range(0..=total);
    let port_a = (0..n).map(|_| random_packet(rng)).collect();
    let port_b = (n..total).map(|_| random_packet(rng)).collect();
    InputConfiguration::new(port_a, port_b, rng.random_range(0.05..0.95)).expect("valid configuration")
}

pub fn random_matrix(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let entries = (0..dim * dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::new(dim, entries).expect("non-empty square matrix")
}

/// `∫ g_p*(t) g_q(t) dt` by the trapezoid rule on a grid fine enough for both
/// envelopes and the detuning beat. Exponentially accurate for these smooth,
/// rapidly decaying integrands.
pub fn overlap_by_quadrature(p: &WavePacket, q: &WavePacket) -> Complex64 {
    let reach = 14.0 * p.width.max(q.width);
    let lo = p.center_time.min(q.center_time) - reach;
    let hi = p.center_time.max(q.center_time) + reach;
    let beat = (p.detuning - q.detuning)
        .abs()
        .max(p.detuning.abs())
        .max(q.detuning.abs());
    let mut step = p.width.min(q.width) / 16.0;
    if beat > 0.0 {
        step = step.min(std::f64::consts::PI / (8.0 * beat));
    }
    let intervals = ((hi - lo) / step).ceil() as usize;
    let h = (hi - lo) / intervals as f64;

    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..=intervals {
        let t = lo + k as f64 * h;
        let w = if k == 0 || k == intervals { 0.5 } else { 1.0 };
        sum += p.amplitude(t).conj() * q.amplitude(t) * w;
    }
    sum * h
}

pub fn run_suite(seed: u64, size: SuiteSize) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let mut c = Check::new("overlap_matches_quadrature", 1e-10);
    let mut done = 0;
    while done < size.overlap_cases {
        let (p, q) = (random_packet(&mut rng), random_packet(&mut rng));
        let exact = overlap(&p, &q)?;
        if exact.norm() < 1e-3 {
            continue;
        }
        c.record((exact - overlap_by_quadrature(&p, &q)).norm() / exact.norm());
        done += 1;
    }
    checks.push(c.finish());

    let mut c = Check::new("gram_is_hermitian_unit_diagonal_psd", 0.0);
    for _ in 0..size.gram_cases {
        let n = rng.random_range(1..=6);
        let packets: Vec<_> = (0..n).map(|_| random_packet(&mut rng)).collect();
        c.record(if gram(&packets)?.check_invariants().is_ok() {
            0.0
        } else {
            1.0
        });
    }
    checks.push(c.finish());

    let mut c = Check::new("permanent_fast_matches_naive", 1e-10);
    for _ in 0..size.permanent_cases {
        let dim = rng.random_range(1..=8);
        let m = random_matrix(&mut rng, dim);
        let naive = permanent_naive(&m)?;
        c.record((permanent_fast(&m)? - naive).norm() / naive.norm());
    }
    checks.push(c.finish());

    let mut oracle = Check::new("engine_matches_permutation_sum", 1e-9);
    let mut bounds = Check::new("enhancement_within_bounds", 1e-9);
    let mut t_free = Check::new("enhancement_independent_of_t", 1e-10);
    for _ in 0..size.oracle_cases {
        let cfg = random_configuration(&mut rng, 5);
        let fast = coincidence_probability(&cfg)?;
        let slow = oracle_permutation_sum(&cfg)?;
        oracle.record(
            relative(fast.p_quantum, slow.p_quantum).max(relative(fast.enhancement, slow.enhancement)),
        );

        let ceiling = binomial(cfg.photon_count(), cfg.port_a().len()) as f64;
        bounds.record((1.0 - fast.enhancement).max(fast.enhancement - ceiling).max(0.0));

        let low = coincidence_probability(&cfg.with_transmissivity(0.3)?)?.enhancement;
        let high = coincidence_probability(&cfg.with_transmissivity(0.7)?)?.enhancement;
        t_free.record((low - high).abs());
    }
    checks.extend([oracle.finish(), bounds.finish(), t_free.finish()]);

    let mut c = Check::new("scenario_factors_match_engine", 1e-6);
    for total in 1..=6 {
        for n in 0..=total {
            for (scenario, factor) in enumerate_scenarios(n, total - n)? {
                let cfg = scenario_to_packets(&scenario, 1.0, 12.0)?;
                c.record((coincidence_probability(&cfg)?.enhancement - factor as f64).abs());
                debug_assert_eq!(factor, closed_form_enhancement(&scenario));
            }
        }
    }
    checks.push(c.finish());

    let mut c = Check::new("partial_overlap_law", 1e-9);
    for _ in 0..size.oracle_cases / 4 {
        let n = rng.random_range(1..=6);
        let group = random_packet(&mut rng);
        let single = random_packet(&mut rng);
        let cfg = InputConfiguration::new(vec![group; n], vec![single], rng.random_range(0.05..0.95))?;
        let expected = enhancement_partial(n, v_overlap(&single, &group)?)?;
        c.record((coincidence_probability(&cfg)?.enhancement - expected).abs());
    }
    checks.push(c.finish());

    let mut c = Check::new("amplifier_stimulated_emission_ratio", 0.0);
    // Dyadic |g|² keeps (m+1)|g|² and the ratio free of rounding.
    let gain = AmplifierGain::from_coupling(Complex64::new(0.0625, 0.0))?;
    for m in 0..=10 {
        let ratio = emission_probability(&gain, m, 3) / emission_probability(&gain, 0, 0);
        c.record((ratio - (m + 1) as f64).abs());
    }
    checks.push(c.finish());

    let all_passed = checks.iter().all(|c| c.passed);
    Ok(VerificationReport {
        seed,
        checks,
        all_passed,
    })
}
