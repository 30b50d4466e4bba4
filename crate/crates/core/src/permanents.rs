//! Exact matrix permanents.
//!
//! `perm(A) = Σ_σ Π_i A[i][σ(i)]` over all permutations σ. The fast path is
//! Ryser's inclusion–exclusion formula walked in Gray-code order, so each
//! subset differs from its predecessor by one column and the row sums are
//! updated in O(n). The factorial-time literal sum is kept as an oracle.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const MAX_FAST_DIM: usize = 30;
pub const MAX_NAIVE_DIM: usize = 9;

/// Dimension from which the default options split the subset walk across
/// threads.
const PARALLEL_THRESHOLD: usize = 18;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyInput("matrix"));
        }
        if entries.len() != dim * dim {
            return Err(Error::Domain(format!(
                "{} entries do not form a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Domain("matrix is not square".into()));
        }
        Self::new(dim, rows.concat())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self::new(dim, entries)
    }

    pub fn ones(dim: usize) -> Result<Self> {
        Self::new(dim, vec![Complex64::new(1.0, 0.0); dim * dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for col in 0..n {
            for row in 0..n {
                entries.push(self.get(row, col));
            }
        }
        Self { dim: n, entries }
    }

    /// `out[i][j] = self[rows[i]][cols[j]]`. Both index lists must be
    /// permutations of `0..dim`.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> Self {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for &r in rows {
            for &c in cols {
                entries.push(self.get(r, c));
            }
        }
        Self { dim: n, entries }
    }
}

/// Tuning for [`permanent_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermanentOptions {
    /// Neumaier-compensated accumulation of the 2^n alternating terms.
    pub compensated: bool,
    /// Number of contiguous Gray-code ranges. Chunk partial sums are added
    /// in range order, so the result is deterministic for a fixed count.
    pub chunks: usize,
}

impl PermanentOptions {
    pub fn for_dim(dim: usize) -> Self {
        let chunks = if dim >= PARALLEL_THRESHOLD {
            4 * rayon::current_num_threads()
        } else {
            1
        };
        Self {
            compensated: false,
            chunks,
        }
    }
}

/// Ryser/Gray-code permanent with default options.
pub fn permanent_fast(matrix: &ComplexMatrix) -> Result<Complex64> {
    permanent_with(matrix, &PermanentOptions::for_dim(matrix.dim()))
}

pub fn permanent_with(matrix: &ComplexMatrix, options: &PermanentOptions) -> Result<Complex64> {
    let n = matrix.dim();
    if n > MAX_FAST_DIM {
        return Err(Error::Capacity {
            what: "permanent dimension",
            size: n,
            max: MAX_FAST_DIM,
        });
    }
    if n == 1 {
        return Ok(matrix.get(0, 0));
    }

    // Column-major copy so adding a column to the row sums is a contiguous walk.
    let columns = matrix.transpose();
    let total: u64 = 1 << n;
    let chunks = options.chunks.clamp(1, (total - 1) as usize) as u64;
    let span = (total - 1).div_ceil(chunks);

    let ranges: Vec<(u64, u64)> = (0..chunks)
        .map(|c| (1 + c * span, (1 + (c + 1) * span).min(total)))
        .filter(|(lo, hi)| lo < hi)
        .collect();

    let partials: Vec<Complex64> = if ranges.len() == 1 {
        vec![ryser_range(&columns, ranges[0], options.compensated)]
    } else {
        ranges
            .par_iter()
            .map(|&range| ryser_range(&columns, range, options.compensated))
            .collect()
    };

    let mut acc = Accumulator::new(options.compensated);
    for p in partials {
        acc.add(p);
    }
    let sum = acc.total();
    Ok(if n % 2 == 1 { -sum } else { sum })
}

// Sums (-1)^|S| Π_i rowsum_S(i) for Gray-code ranks k in [lo, hi), where
// S = gray(k) = k ^ (k >> 1). The caller applies the global (-1)^n.
fn ryser_range(columns: &ComplexMatrix, (lo, hi): (u64, u64), compensated: bool) -> Complex64 {
    let n = columns.dim();
    let col = |j: usize| &columns.entries[j * n..(j + 1) * n];

    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let start = gray(lo - 1);
    for j in 0..n {
        if start >> j & 1 == 1 {
            for (s, &a) in row_sums.iter_mut().zip(col(j)) {
                *s += a;
            }
        }
    }

    let mut acc = Accumulator::new(compensated);
    for k in lo..hi {
        let j = k.trailing_zeros() as usize;
        let subset = gray(k);
        if subset >> j & 1 == 1 {
            for (s, &a) in row_sums.iter_mut().zip(col(j)) {
                *s += a;
            }
        } else {
            for (s, &a) in row_sums.iter_mut().zip(col(j)) {
                *s -= a;
            }
        }
        let product = row_sums.iter().fold(Complex64::new(1.0, 0.0), |p, &s| p * s);
        if subset.count_ones() % 2 == 1 {
            acc.add(-product);
        } else {
            acc.add(product);
        }
    }
    acc.total()
}

#[inline]
fn gray(k: u64) -> u64 {
    k ^ (k >> 1)
}

/// Complex running sum, optionally Neumaier-compensated per component.
struct Accumulator {
    compensated: bool,
    sum: Complex64,
    carry: Complex64,
}

impl Accumulator {
    fn new(compensated: bool) -> Self {
        Self {
            compensated,
            sum: Complex64::new(0.0, 0.0),
            carry: Complex64::new(0.0, 0.0),
        }
    }

    #[inline]
    fn add(&mut self, x: Complex64) {
        if !self.compensated {
            self.sum += x;
            return;
        }
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.carry.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.carry.im);
    }

    fn total(&self) -> Complex64 {
        self.sum + self.carry
    }
}

#[inline]
fn neumaier(sum: f64, x: f64, carry: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *carry += (sum - t) + x;
    } else {
        *carry += (x - t) + sum;
    }
    t
}

/// Literal sum over all `dim!` permutations.
pub fn permanent_naive(matrix: &ComplexMatrix) -> Result<Complex64> {
    let n = matrix.dim();
    if n > MAX_NAIVE_DIM {
        return Err(Error::Capacity {
            what: "naive permanent dimension",
            size: n,
            max: MAX_NAIVE_DIM,
        });
    }
    let mut total = Complex64::new(0.0, 0.0);
    expand(matrix, 0, 0, Complex64::new(1.0, 0.0), &mut total);
    Ok(total)
}

// Depth-first over partial permutations; `used` marks columns already taken
// by rows above `row`.
fn expand(matrix: &ComplexMatrix, row: usize, used: u32, product: Complex64, total: &mut Complex64) {
    let n = matrix.dim();
    if row == n {
        *total += product;
        return;
    }
    for col in 0..n {
        if used >> col & 1 == 0 {
            expand(
                matrix,
                row + 1,
                used | 1 << col,
                product * matrix.get(row, col),
                total,
            );
        }
    }
}
