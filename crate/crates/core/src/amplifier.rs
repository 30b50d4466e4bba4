//! Single-mode small-gain amplifier, `a_out = G a_s + g a_0†`, expanded to
//! first order in `g` with the internal mode `a_0` in vacuum.
//!
//! With `m` input photons in the amplifier's signal mode and `k` more in
//! modes it does not couple to, the emitted term has amplitude `g·√(m+1)`,
//! so emission is enhanced `m+1` times over the spontaneous rate `|g|²`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_SMALL_GAIN: f64 = 0.1;
const COMMUTATOR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplifierGain {
    big_g: Complex64,
    small_g: Complex64,
}

impl AmplifierGain {
    /// Requires `|G|² - |g|² = 1` and `|g| ≤ 0.1`.
    pub fn new(big_g: Complex64, small_g: Complex64) -> Result<Self> {
        let commutator = big_g.norm_sqr() - small_g.norm_sqr();
        if (commutator - 1.0).abs() > COMMUTATOR_TOLERANCE {
            return Err(Error::InvalidGain(format!(
                "|G|^2 - |g|^2 = {commutator}, expected 1"
            )));
        }
        if !(small_g.norm() <= MAX_SMALL_GAIN) {
            return Err(Error::InvalidGain(format!(
                "|g| = {} is outside the small-gain regime (<= {MAX_SMALL_GAIN})",
                small_g.norm()
            )));
        }
        Ok(Self { big_g, small_g })
    }

    /// Gain with real positive `G = √(1 + |g|²)`.
    pub fn from_coupling(small_g: Complex64) -> Result<Self> {
        Self::new(Complex64::new((1.0 + small_g.norm_sqr()).sqrt(), 0.0), small_g)
    }

    pub fn big_g(&self) -> Complex64 {
        self.big_g
    }

    pub fn small_g(&self) -> Complex64 {
        self.small_g
    }
}

/// Photon numbers in the signal mode, the uncoupled input modes and the
/// amplifier's internal mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FockLabel {
    pub signal: usize,
    pub uncoupled: usize,
    pub internal: usize,
}

impl std::fmt::Display for FockLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "|{},{},{}>", self.signal, self.uncoupled, self.internal)
    }
}

/// `(m+1)|g|²`; independent of the uncoupled photon count.
pub fn emission_probability(gain: &AmplifierGain, n_matched: usize, _n_unmatched: usize) -> f64 {
    (n_matched + 1) as f64 * gain.small_g.norm_sqr()
}

/// Unnormalized first-order output state: the unamplified input with
/// amplitude 1 and the emitted term with amplitude `g√(m+1)`.
pub fn output_amplitudes(
    gain: &AmplifierGain,
    n_matched: usize,
    n_unmatched: usize,
) -> Vec<(FockLabel, Complex64)> {
    vec![
        (
            FockLabel {
                signal: n_matched,
                uncoupled: n_unmatched,
                internal: 0,
            },
            Complex64::new(1.0, 0.0),
        ),
        (
            FockLabel {
                signal: n_matched + 1,
                uncoupled: n_unmatched,
                internal: 1,
            },
            gain.small_g * ((n_matched + 1) as f64).sqrt(),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gain(g: f64) -> AmplifierGain {
        AmplifierGain::from_coupling(Complex64::new(g, 0.0)).unwrap()
    }

    #[test]
    fn spontaneous_and_stimulated() {
        let g = gain(0.1);
        let base = g.small_g().norm_sqr();
        assert_eq!(emission_probability(&g, 0, 0), base);
        assert_eq!(emission_probability(&g, 4, 0), 5.0 * base);
        let dyadic = gain(0.0625);
        for m in 0..=10 {
            let ratio = emission_probability(&dyadic, m, 7) / emission_probability(&dyadic, 0, 0);
            assert_eq!(ratio, (m + 1) as f64);
        }
        assert!((emission_probability(&g, 2, 5) - 0.03).abs() < 1e-15);
    }

    #[test]
    fn amplitudes() {
        let g = AmplifierGain::from_coupling(Complex64::new(0.03, 0.04)).unwrap();
        let out = output_amplitudes(&g, 0, 0);
        assert_eq!(
            out[0],
            (
                FockLabel {
                    signal: 0,
                    uncoupled: 0,
                    internal: 0
                },
                Complex64::new(1.0, 0.0)
            )
        );
        assert_eq!(
            out[1].0,
            FockLabel {
                signal: 1,
                uncoupled: 0,
                internal: 1
            }
        );
        assert_eq!(out[1].1, g.small_g());

        let out = output_amplitudes(&g, 3, 2);
        assert_eq!(out[1].0.to_string(), "|4,2,1>");
        assert!((out[1].1 - g.small_g() * 2.0).norm() < 1e-15);
        let total: f64 = out.iter().map(|(_, a)| a.norm_sqr()).sum();
        assert!((total - (1.0 + 4.0 * g.small_g().norm_sqr())).abs() < 1e-15);
    }

    #[test]
    fn gain_validation() {
        assert!(AmplifierGain::new(Complex64::new(1.0, 0.0), Complex64::new(0.05, 0.0)).is_err());
        assert!(AmplifierGain::from_coupling(Complex64::new(0.2, 0.0)).is_err());
        let ok = AmplifierGain::new(
            Complex64::new(0.0, (1.0f64 + 0.0025).sqrt()),
            Complex64::new(0.0, 0.05),
        );
        assert!(ok.is_ok());
    }
}
