//! Gaussian single-photon temporal wave packets and their overlaps.
//!
//! A packet is the amplitude
//!
//! ```text
//! g(t) = (π τ²)^(-1/4) · exp(-(t - t₀)² / (2τ²)) · exp(-i(Δω·t - φ))
//! ```
//!
//! with `t₀ = center_time`, `τ = width`, `Δω = detuning` (relative to a common
//! carrier that is factored out) and `φ = phase`. The normalization makes
//! `∫|g|² dt = 1`. Every pair of packets has a closed-form inner product, so
//! the Gram matrix of a packet list is exact up to rounding.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permanents::ComplexMatrix;

/// Packets whose overlap magnitude falls below this are treated as
/// completely distinguishable.
pub const DEFAULT_ORTHOGONALITY_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacket {
    /// Seconds.
    pub center_time: f64,
    /// 1/e half-width of the amplitude envelope, seconds. Must be positive.
    pub width: f64,
    /// Carrier offset, rad/s.
    pub detuning: f64,
    /// Radians.
    pub phase: f64,
}

impl WavePacket {
    pub fn new(center_time: f64, width: f64, detuning: f64, phase: f64) -> Result<Self> {
        let packet = Self {
            center_time,
            width,
            detuning,
            phase,
        };
        packet.validate()?;
        Ok(packet)
    }

    /// Transform-limited packet on the reference carrier.
    pub fn gaussian(center_time: f64, width: f64) -> Result<Self> {
        Self::new(center_time, width, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(Error::InvalidPacket(format!(
                "width must be positive and finite, got {}",
                self.width
            )));
        }
        if !self.center_time.is_finite() || !self.detuning.is_finite() || !self.phase.is_finite() {
            return Err(Error::InvalidPacket(
                "center time, detuning and phase must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Time-domain amplitude g(t).
    pub fn amplitude(&self, t: f64) -> Complex64 {
        let norm = (std::f64::consts::PI * self.width * self.width).powf(-0.25);
        let dt = t - self.center_time;
        let envelope = norm * (-dt * dt / (2.0 * self.width * self.width)).exp();
        Complex64::from_polar(envelope, self.phase - self.detuning * t)
    }

    /// Same packet delayed by `delay` seconds.
    pub fn delayed(&self, delay: f64) -> Self {
        Self {
            center_time: self.center_time + delay,
            ..*self
        }
    }
}

/// Inner product `∫ g_p*(t) g_q(t) dt` in closed form.
///
/// For widths `τp`, `τq`, center offset `Δt = tq - tp` and detuning
/// difference `Δω = ωp - ωq`:
///
/// ```text
/// |v| = sqrt(2τpτq / (τp² + τq²)) · exp(-Δt² / (2(τp² + τq²)))
///                                 · exp(-Δω² τp²τq² / (2(τp² + τq²)))
/// arg v = φq - φp + Δω · (tp τq² + tq τp²) / (τp² + τq²)
/// ```
pub fn overlap(p: &WavePacket, q: &WavePacket) -> Result<Complex64> {
    p.validate()?;
    q.validate()?;

    let wp2 = p.width * p.width;
    let wq2 = q.width * q.width;
    let sum = wp2 + wq2;

    let dt = q.center_time - p.center_time;
    let dw = p.detuning - q.detuning;

    let prefactor = (2.0 * p.width * q.width / sum).sqrt();
    let magnitude = prefactor * (-(dt * dt) / (2.0 * sum) - dw * dw * wp2 * wq2 / (2.0 * sum)).exp();
    let weighted_center = (p.center_time * wq2 + q.center_time * wp2) / sum;
    let arg = q.phase - p.phase + dw * weighted_center;

    Ok(Complex64::from_polar(magnitude, arg))
}

/// Whether two packets count as completely distinguishable at `threshold`.
pub fn is_orthogonal(p: &WavePacket, q: &WavePacket, threshold: f64) -> Result<bool> {
    Ok(overlap(p, q)?.norm() < threshold)
}

/// Hermitian matrix of pairwise packet overlaps.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix(ComplexMatrix);

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0.get(row, col)
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Checks Hermiticity, unit diagonal, the magnitude bound and positive
    /// semidefiniteness. Returns a description of the first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.dim();
        for i in 0..n {
            let d = self.get(i, i);
            if (d - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
                return Err(format!("diagonal entry {i} is {d}"));
            }
            for j in 0..n {
                let v = self.get(i, j);
                if (v - self.get(j, i).conj()).norm() > 1e-12 {
                    return Err(format!("entries ({i},{j}) and ({j},{i}) are not conjugate"));
                }
                if v.norm() > 1.0 + 1e-12 {
                    return Err(format!("entry ({i},{j}) has magnitude {}", v.norm()));
                }
            }
        }
        let min_pivot = min_cholesky_pivot(&self.0);
        if min_pivot < -1e-10 {
            return Err(format!("not positive semidefinite (pivot {min_pivot:e})"));
        }
        Ok(())
    }
}

/// Overlap matrix `G[i][j] = overlap(packets[i], packets[j])`.
pub fn gram(packets: &[WavePacket]) -> Result<GramMatrix> {
    if packets.is_empty() {
        return Err(Error::EmptyInput("packet list"));
    }
    let n = packets.len();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        entries[i * n + i] = overlap(&packets[i], &packets[i])?;
        for j in (i + 1)..n {
            let v = overlap(&packets[i], &packets[j])?;
            entries[i * n + j] = v;
            entries[j * n + i] = v.conj();
        }
    }
    Ok(GramMatrix(ComplexMatrix::new(n, entries)?))
}

// Diagonally pivoted Cholesky. For a PSD matrix every pivot is >= -eps; the
// smallest pivot seen is returned. Stops once the remaining diagonal is
// numerically zero, which is the rank-deficient (identical packets) case.
fn min_cholesky_pivot(matrix: &ComplexMatrix) -> f64 {
    let n = matrix.dim();
    let mut a: Vec<Complex64> = matrix.entries().to_vec();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut min_pivot = f64::INFINITY;

    while !remaining.is_empty() {
        let (pos, &k) = remaining
            .iter()
            .enumerate()
            .max_by(|x, y| a[x.1 * n + x.1].re.total_cmp(&a[y.1 * n + y.1].re))
            .expect("non-empty");
        let pivot = a[k * n + k].re;
        min_pivot = min_pivot.min(pivot);
        if pivot <= 1e-12 {
            // A PSD matrix with a vanishing diagonal vanishes entirely, so
            // any surviving entry in the Schur complement means indefinite.
            for &i in &remaining {
                min_pivot = min_pivot.min(a[i * n + i].re);
                for &j in &remaining {
                    if i != j {
                        min_pivot = min_pivot.min(-a[i * n + j].norm());
                    }
                }
            }
            break;
        }
        remaining.swap_remove(pos);
        for &i in &remaining {
            for &j in &remaining {
                let update = a[i * n + k] * a[k * n + j] / pivot;
                a[i * n + j] -= update;
            }
        }
    }
    if min_pivot.is_infinite() {
        0.0
    } else {
        min_pivot
    }
}
