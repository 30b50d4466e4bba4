//! Bunching coincidence probability for N photons in port `a` and M photons
//! in port `b` of a lossless beam splitter, all detected in output 1.
//!
//! For product-form inputs the time-integrated (N+M)-fold coincidence reduces
//! to permanents of packet Gram matrices:
//!
//! ```text
//! p_quantum   = (N+M)! · T^N · R^M · perm(G_all) / (perm(G_a) · perm(G_b))
//! p_classical = (N+M)! · T^N · R^M
//! ```
//!
//! The `(N+M)!` prefactor is the time-ordered multi-detector convention: with
//! one b-photon and m matched a-photons, `p_quantum = T^N R (1+m) (N+1)!`.
//! The true probability of all photons leaving through output 1 is
//! `p_quantum / (N+M)!`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::permanents::{self, MAX_FAST_DIM};
use crate::temporal_modes::{gram, overlap, WavePacket};

/// Largest total photon number for [`oracle_permutation_sum`].
pub const MAX_ORACLE_PHOTONS: usize = 6;

const NORMALIZATION_FLOOR: f64 = 1e-12;

/// Packets in ports `a` and `b` plus the splitter's intensity transmissivity.
#[derive(Debug, Clone, PartialEq)]
pub struct InputConfiguration {
    port_a: Vec<WavePacket>,
    port_b: Vec<WavePacket>,
    transmissivity: f64,
}

impl InputConfiguration {
    pub fn new(port_a: Vec<WavePacket>, port_b: Vec<WavePacket>, transmissivity: f64) -> Result<Self> {
        if port_a.is_empty() && port_b.is_empty() {
            return Err(Error::EmptyInput("input configuration has no photons"));
        }
        if !(0.0..=1.0).contains(&transmissivity) {
            return Err(Error::Domain(format!(
                "transmissivity must lie in [0, 1], got {transmissivity}"
            )));
        }
        for p in port_a.iter().chain(&port_b) {
            p.validate()?;
        }
        Ok(Self {
            port_a,
            port_b,
            transmissivity,
        })
    }

    pub fn port_a(&self) -> &[WavePacket] {
        &self.port_a
    }

    pub fn port_b(&self) -> &[WavePacket] {
        &self.port_b
    }

    pub fn transmissivity(&self) -> f64 {
        self.transmissivity
    }

    pub fn reflectivity(&self) -> f64 {
        1.0 - self.transmissivity
    }

    pub fn photon_count(&self) -> usize {
        self.port_a.len() + self.port_b.len()
    }

    pub fn with_transmissivity(&self, transmissivity: f64) -> Result<Self> {
        Self::new(self.port_a.clone(), self.port_b.clone(), transmissivity)
    }

    /// Copy with every port-b packet delayed by `delay`.
    pub fn with_b_delay(&self, delay: f64) -> Self {
        Self {
            port_a: self.port_a.clone(),
            port_b: self.port_b.iter().map(|p| p.delayed(delay)).collect(),
            transmissivity: self.transmissivity,
        }
    }

    fn classical_weight(&self) -> f64 {
        let n = self.port_a.len() as i32;
        let m = self.port_b.len() as i32;
        factorial(self.photon_count()) * self.transmissivity.powi(n) * self.reflectivity().powi(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoincidenceResult {
    pub p_quantum: f64,
    pub p_classical: f64,
    pub enhancement: f64,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn port_permanent(packets: &[WavePacket]) -> Result<Complex64> {
    if packets.is_empty() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    permanents::permanent_fast(gram(packets)?.as_matrix())
}

fn check_normalization(norm: Complex64) -> Result<f64> {
    if !(norm.re > NORMALIZATION_FLOOR) {
        return Err(Error::DegenerateNormalization(norm.re));
    }
    Ok(norm.re)
}

fn result_from_ratio(cfg: &InputConfiguration, enhancement: f64) -> CoincidenceResult {
    let p_classical = cfg.classical_weight();
    CoincidenceResult {
        p_quantum: p_classical * enhancement,
        p_classical,
        enhancement,
    }
}

/// Coincidence probability, classical baseline and their ratio via Gram
/// permanents. The ratio is reported even when `T ∈ {0, 1}` empties the
/// detection probability.
pub fn coincidence_probability(cfg: &InputConfiguration) -> Result<CoincidenceResult> {
    let total = cfg.photon_count();
    if total > MAX_FAST_DIM {
        return Err(Error::Capacity {
            what: "photon number",
            size: total,
            max: MAX_FAST_DIM,
        });
    }
    let all: Vec<WavePacket> = cfg.port_a.iter().chain(&cfg.port_b).copied().collect();
    let perm_all = permanents::permanent_fast(gram(&all)?.as_matrix())?;
    let norm = check_normalization(port_permanent(&cfg.port_a)? * port_permanent(&cfg.port_b)?)?;
    Ok(result_from_ratio(cfg, perm_all.re / norm))
}

/// Distinguishability measure `𝒱 = |⟨single|group⟩|²` for one b-photon
/// against an internally identical a-group.
pub fn v_overlap(single: &WavePacket, group: &WavePacket) -> Result<f64> {
    Ok(overlap(single, group)?.norm_sqr())
}

/// `1 + n·v`: enhancement for `n` mutually identical a-photons against one
/// b-photon with distinguishability measure `v`.
pub fn enhancement_partial(n: usize, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!(
            "overlap measure must lie in [0, 1], got {v}"
        )));
    }
    Ok(1.0 + n as f64 * v)
}

/// `N/(N+M)`, the maximizer of `T^N (1-T)^M`.
pub fn optimal_transmissivity(n: usize, m: usize) -> Result<f64> {
    if n + m == 0 {
        return Err(Error::Domain(
            "no photons: optimal transmissivity undefined".into(),
        ));
    }
    Ok(n as f64 / (n + m) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub delay: f64,
    pub result: CoincidenceResult,
    /// Enhancement divided by the scan baseline.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayScan {
    pub points: Vec<ScanPoint>,
    /// Median enhancement over the outermost 10% of delays.
    pub baseline: f64,
    /// Set when port b holds more than one photon, which goes beyond the
    /// single-photon probe protocol.
    pub extended_protocol: bool,
}

/// Shifts every port-b packet by each delay and evaluates the coincidence
/// probability there. Points are independent and evaluated in parallel; each
/// one is computed by the same serial path, so the output does not depend on
/// scheduling.
pub fn delay_scan(cfg: &InputConfiguration, delays: &[f64]) -> Result<DelayScan> {
    if delays.is_empty() {
        return Err(Error::EmptyInput("delay list"));
    }
    if cfg.port_b.is_empty() {
        return Err(Error::EmptyInput("port b has no photon to scan"));
    }
    if let Some(bad) = delays.iter().find(|d| !d.is_finite()) {
        return Err(Error::Domain(format!("non-finite delay {bad}")));
    }

    let results: Vec<CoincidenceResult> = delays
        .par_iter()
        .map(|&d| coincidence_probability(&cfg.with_b_delay(d)))
        .collect::<Result<_>>()?;

    let baseline = outer_median(delays, &results);
    let points = delays
        .iter()
        .zip(results)
        .map(|(&delay, result)| ScanPoint {
            delay,
            result,
            normalized: result.enhancement / baseline,
        })
        .collect();

    Ok(DelayScan {
        points,
        baseline,
        extended_protocol: cfg.port_b.len() != 1,
    })
}

// The outermost points are the ceil(10%) delays farthest from the middle of
// the scanned interval; ties go to the earlier index.
fn outer_median(delays: &[f64], results: &[CoincidenceResult]) -> f64 {
    let lo = delays.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = delays.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mid = 0.5 * (lo + hi);
    let count = (delays.len() as f64 * 0.1).ceil().max(1.0) as usize;

    let mut order: Vec<usize> = (0..delays.len()).collect();
    order.sort_by(|&i, &j| {
        (delays[j] - mid)
            .abs()
            .total_cmp(&(delays[i] - mid).abs())
            .then(i.cmp(&j))
    });
    let mut outer: Vec<f64> = order[..count].iter().map(|&i| results[i].enhancement).collect();
    outer.sort_by(f64::total_cmp);
    let k = outer.len();
    if k % 2 == 1 {
        outer[k / 2]
    } else {
        0.5 * (outer[k / 2 - 1] + outer[k / 2])
    }
}

/// Literal evaluation of the time-integrated Γ-function expansion.
///
/// The annihilation part of the correlator assigns each photon to one
/// detection slot; the integrated intensity is a double sum over two such
/// assignments, each term the product over slots of the overlap between the
/// two photons placed there. The state normalization is the analogous
/// permutation sum within each port. No permanent code is used, so this
/// serves as an independent check on [`coincidence_probability`].
pub fn oracle_permutation_sum(cfg: &InputConfiguration) -> Result<CoincidenceResult> {
    let total = cfg.photon_count();
    if total > MAX_ORACLE_PHOTONS {
        return Err(Error::Capacity {
            what: "oracle photon number",
            size: total,
            max: MAX_ORACLE_PHOTONS,
        });
    }
    let all: Vec<WavePacket> = cfg.port_a.iter().chain(&cfg.port_b).copied().collect();
    let overlaps = overlap_table(&all)?;

    let assignments = all_permutations(total);
    let mut integral = Complex64::new(0.0, 0.0);
    for left in &assignments {
        for right in &assignments {
            let mut term = Complex64::new(1.0, 0.0);
            for slot in 0..total {
                term *= overlaps[left[slot]][right[slot]];
            }
            integral += term;
        }
    }

    let norm = port_norm(&cfg.port_a)? * port_norm(&cfg.port_b)?;
    let norm = check_normalization(norm)?;

    let n = cfg.port_a.len() as i32;
    let m = cfg.port_b.len() as i32;
    let splitting = cfg.transmissivity.powi(n) * cfg.reflectivity().powi(m);
    // Mutually orthogonal photons leave only the diagonal assignment pairs.
    let distinguishable_integral = assignments.len() as f64;

    let enhancement = integral.re / norm / distinguishable_integral;
    Ok(CoincidenceResult {
        p_quantum: splitting * integral.re / norm,
        p_classical: splitting * distinguishable_integral,
        enhancement,
    })
}

// ∫Φ* Σ_P Φ(P{...}) for a product of packets in one port.
fn port_norm(packets: &[WavePacket]) -> Result<Complex64> {
    let overlaps = overlap_table(packets)?;
    let mut norm = Complex64::new(0.0, 0.0);
    for perm in all_permutations(packets.len()) {
        let mut term = Complex64::new(1.0, 0.0);
        for (i, &j) in perm.iter().enumerate() {
            term *= overlaps[i][j];
        }
        norm += term;
    }
    Ok(norm)
}

fn overlap_table(packets: &[WavePacket]) -> Result<Vec<Vec<Complex64>>> {
    packets
        .iter()
        .map(|p| packets.iter().map(|q| overlap(p, q)).collect())
        .collect()
}

// Heap's algorithm; `all_permutations(0)` yields the single empty permutation.
fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    let mut counters = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                current.swap(0, i);
            } else {
                current.swap(counters[i], i);
            }
            out.push(current.clone());
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    out
}
