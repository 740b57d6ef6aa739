//! Sparse and jointly sparse solutions of underdetermined systems.
//!
//! Greedy recovery only (OMP and its multiple-measurement-vector variant).
//! The ℓ1 relaxation is intentionally not provided.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{adjoint, column_norms, frobenius, lstsq, select_columns};
use crate::scalar::{lit, CMatrix, Real};

/// Strictly increasing set of column indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self { indices }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }

    pub fn insert(&mut self, j: usize) {
        if let Err(pos) = self.indices.binary_search(&j) {
            self.indices.insert(pos, j);
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.indices.iter().chain(&other.indices).copied().collect())
    }

    /// `|A ∩ B| / |A ∪ B|`; two empty sets score 1.
    pub fn jaccard(&self, other: &Self) -> f64 {
        let inter = self.indices.iter().filter(|j| other.contains(**j)).count();
        let uni = self.len() + other.len() - inter;
        if uni == 0 {
            1.0
        } else {
            inter as f64 / uni as f64
        }
    }

    pub fn check_width(&self, width: usize) -> Result<()> {
        match self.indices.last() {
            Some(&j) if j >= width => Err(Error::invalid("support", format!("index {j} beyond {width} columns"))),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for SupportSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone)]
pub struct SparseSolution<T: Real> {
    pub support: SupportSet,
    /// Coefficients aligned with `support.indices()`.
    pub values: Vec<Complex<T>>,
    pub residual_norm: T,
    /// Residual norm after each iteration, starting with `‖y‖`.
    pub residual_history: Vec<T>,
}

impl<T: Real> SparseSolution<T> {
    /// Dense coefficient vector of length `width`.
    pub fn to_dense(&self, width: usize) -> Vec<Complex<T>> {
        let mut z = vec![Complex::new(T::zero(), T::zero()); width];
        for (&j, &v) in self.support.indices().iter().zip(&self.values) {
            z[j] = v;
        }
        z
    }
}

/// Largest normalised inner product between two distinct columns.
pub fn mutual_coherence<T: Real>(c: &CMatrix<T>) -> Result<T> {
    let norms = column_norms(c);
    if let Some(j) = norms.iter().position(|&n| n == T::zero()) {
        return Err(Error::invalid("matrix", format!("column {j} is zero")));
    }
    let gram = adjoint(c) * c;
    let mut mu = T::zero();
    for i in 0..c.ncols() {
        for j in i + 1..c.ncols() {
            mu = mu.max(gram[(i, j)].norm() / (norms[i] * norms[j]));
        }
    }
    Ok(mu.min(T::one()))
}

/// Coherence uniqueness guarantee: a `k`-sparse solution is the unique
/// sparsest one when `k < (1 + 1/μ) / 2`.
pub fn unique_if<T: Real>(k: usize, mu: T) -> bool {
    if mu == T::zero() {
        return true;
    }
    lit::<T>(k as f64) < (T::one() + T::one() / mu) / lit(2.0)
}

/// Least squares restricted to the columns in `support`, via QR.
/// `y` may hold several right-hand sides as columns.
pub fn solve_on_support<T: Real>(y: &CMatrix<T>, c: &CMatrix<T>, support: &SupportSet) -> Result<CMatrix<T>> {
    support.check_width(c.ncols())?;
    lstsq(&select_columns(c, support.indices()), y)
}

/// Column with the largest score outside `selected`; ties (relative gap below
/// 1e-12) go to the lowest index.
fn best_column<T: Real>(scores: &[T], selected: &SupportSet) -> Option<(usize, T)> {
    let tie = lit::<T>(1e-12);
    let mut best: Option<(usize, T)> = None;
    for (j, &s) in scores.iter().enumerate() {
        if selected.contains(j) || !s.is_finite() {
            continue;
        }
        match best {
            Some((_, b)) if s <= b + tie * b => {}
            _ => best = Some((j, s)),
        }
    }
    best
}

/// Normalised correlation scores `‖C_jᴴ R‖₂ / ‖C_j‖` for every column.
fn scores<T: Real>(c: &CMatrix<T>, norms: &[T], residual: &CMatrix<T>) -> Vec<T> {
    let corr = adjoint(c) * residual;
    (0..c.ncols())
        .map(|j| {
            if norms[j] == T::zero() {
                return T::zero();
            }
            corr.row(j).iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt() / norms[j]
        })
        .collect()
}

struct Greedy<T: Real> {
    support: SupportSet,
    coefficients: CMatrix<T>,
    residual_norm: T,
    history: Vec<T>,
}

/// Shared OMP loop over a block of right-hand sides.
fn greedy<T: Real>(y: &CMatrix<T>, c: &CMatrix<T>, max_support: usize, residual_tol: T) -> Result<Greedy<T>> {
    if y.nrows() != c.nrows() {
        return Err(Error::invalid("measurements", "row count differs from the sensing matrix"));
    }
    if max_support > c.nrows() {
        return Err(Error::invalid("max_support", "cannot exceed the number of rows"));
    }
    if residual_tol < T::zero() {
        return Err(Error::invalid("residual_tol", "must be non-negative"));
    }
    let norms = column_norms(c);
    let y_norm = frobenius(y);
    let mut state = Greedy {
        support: SupportSet::empty(),
        coefficients: CMatrix::zeros(0, y.ncols()),
        residual_norm: y_norm,
        history: vec![y_norm],
    };
    if y_norm == T::zero() {
        return Ok(state);
    }
    let floor = residual_tol * y_norm;
    let mut residual = y.clone();
    let col_peak = norms.iter().fold(T::zero(), |a, &b| a.max(b));
    while state.support.len() < max_support && state.residual_norm > floor {
        let s = scores(c, &norms, &residual);
        let Some((j, best)) = best_column(&s, &state.support) else {
            break;
        };
        // residual orthogonal to every remaining column: nothing left to explain
        if best <= lit::<T>(1e-14) * y_norm * col_peak / col_peak.max(T::min_positive_value()) {
            break;
        }
        state.support.insert(j);
        let sub = select_columns(c, state.support.indices());
        state.coefficients = lstsq(&sub, y)?;
        residual = y - &sub * &state.coefficients;
        state.residual_norm = frobenius(&residual);
        state.history.push(state.residual_norm);
    }
    Ok(state)
}

/// Orthogonal matching pursuit. Stops after `max_support` selections or once
/// `‖r‖ ≤ residual_tol · ‖y‖`.
pub fn omp<T: Real>(y: &[Complex<T>], c: &CMatrix<T>, max_support: usize, residual_tol: T) -> Result<SparseSolution<T>> {
    let yv = CMatrix::from_column_slice(y.len(), 1, y);
    let g = greedy(&yv, c, max_support, residual_tol)?;
    Ok(SparseSolution {
        values: g.coefficients.column(0).iter().copied().collect(),
        support: g.support,
        residual_norm: g.residual_norm,
        residual_history: g.history,
    })
}

/// Joint-sparsity OMP: columns of `v` share one row support. The selection
/// score of column `j` is the ℓ2 norm, across all measurement vectors, of the
/// normalised correlations.
pub fn omp_mmv<T: Real>(v: &CMatrix<T>, c: &CMatrix<T>, max_support: usize, residual_tol: T) -> Result<SupportSet> {
    Ok(greedy(v, c, max_support, residual_tol)?.support)
}
