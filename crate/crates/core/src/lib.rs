//! Generalized photon bunching at a lossless beam splitter.
//!
//! An N-photon wave packet train in port `a` meets M photons in port `b`;
//! the probability that all N+M photons leave through the same output is
//! enhanced over the distinguishable-particle baseline by a factor between
//! 1 and `C(N+M, N)` that measures how temporally indistinguishable the
//! photons are.
//!
//! - [`temporal_modes`]: Gaussian packets, closed-form overlaps, Gram matrices.
//! - [`permanents`]: exact permanents (Ryser/Gray code) and a factorial oracle.
//! - [`interference_engine`]: coincidence probabilities, enhancement factors,
//!   delay scans and a literal permutation-sum oracle.
//! - [`scenarios`]: grouping scenarios, their closed-form factors and labels.
//! - [`amplifier`]: the single-mode stimulated-emission picture.
//! - [`verify`]: seeded cross-check suite.
//!
//! ```
//! use bunchlab_core::{coincidence_probability, InputConfiguration, WavePacket};
//!
//! let p = WavePacket::gaussian(0.0, 1e-13).unwrap();
//! let cfg = InputConfiguration::new(vec![p; 2], vec![p; 2], 0.5).unwrap();
//! let r = coincidence_probability(&cfg).unwrap();
//! assert!((r.enhancement - 6.0).abs() < 1e-12);
//! ```

pub mod amplifier;
pub mod error;
pub mod interference_engine;
pub mod permanents;
pub mod scenarios;
pub mod temporal_modes;
pub mod verify;

pub use amplifier::{emission_probability, output_amplitudes, AmplifierGain, FockLabel};
pub use error::{Error, Result};
pub use interference_engine::{
    coincidence_probability, delay_scan, enhancement_partial, optimal_transmissivity, oracle_permutation_sum,
    v_overlap, CoincidenceResult, DelayScan, InputConfiguration, ScanPoint,
};
pub use permanents::{permanent_fast, permanent_naive, permanent_with, ComplexMatrix, PermanentOptions};
pub use scenarios::{
    closed_form_enhancement, enumerate_scenarios, format_label, parse_label, scenario_table,
    scenario_to_packets, DistinguishabilityScenario, Group, TableRow,
};
pub use temporal_modes::{gram, overlap, GramMatrix, WavePacket};
