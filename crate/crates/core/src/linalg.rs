//! Small dense helpers on top of the decompositions exposed by [`Real`].

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, CMatrix, Real};

/// Relative threshold on `|R_ii| / max_j |R_jj|` below which a least-squares
/// system is declared rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// Least-squares solution of `A X ≈ B` through a thin Householder QR
/// (`X = R⁻¹ Qᴴ B`), column by column on a shared factorisation.
pub fn lstsq<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    let (m, k) = a.shape();
    if b.nrows() != m {
        return Err(Error::invalid("rhs", "row count differs from the matrix"));
    }
    if k == 0 {
        return Ok(CMatrix::zeros(0, b.ncols()));
    }
    if k > m {
        return Err(Error::RankDeficient { rank: m, needed: k });
    }
    let (q, r) = T::qr(a);
    let diag: Vec<T> = (0..k).map(|i| r[(i, i)].norm()).collect();
    let peak = diag.iter().fold(T::zero(), |acc, &d| acc.max(d));
    let floor = peak * lit(RANK_TOL);
    let rank = diag.iter().filter(|&&d| d > floor).count();
    if peak == T::zero() || rank < k {
        return Err(Error::RankDeficient { rank, needed: k });
    }
    let qhb = adjoint(&q) * b;
    let mut x = CMatrix::zeros(k, b.ncols());
    for c in 0..b.ncols() {
        for i in (0..k).rev() {
            let mut acc = qhb[(i, c)];
            for j in i + 1..k {
                acc -= r[(i, j)] * x[(j, c)];
            }
            x[(i, c)] = acc / r[(i, i)];
        }
    }
    Ok(x)
}

/// Conjugate transpose.
pub fn adjoint<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    CMatrix::from_fn(a.ncols(), a.nrows(), |r, c| a[(c, r)].conj())
}

/// Columns `idx` of `a`.
pub fn select_columns<T: Real>(a: &CMatrix<T>, idx: &[usize]) -> CMatrix<T> {
    CMatrix::from_fn(a.nrows(), idx.len(), |r, c| a[(r, idx[c])])
}

pub fn column_norms<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    (0..a.ncols())
        .map(|j| a.column(j).iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt())
        .collect()
}

pub fn frobenius<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Diagonally pivoted Cholesky factor of a Hermitian PSD matrix: returns
/// `V` (n × r) with `V Vᴴ = A`, stopping once the largest remaining pivot
/// falls below `rel_tol` times the largest diagonal entry.
pub fn pivoted_cholesky<T: Real>(a: &CMatrix<T>, rel_tol: T) -> CMatrix<T> {
    let n = a.nrows();
    let mut diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let top = diag.iter().fold(T::zero(), |acc, &d| acc.max(d));
    let mut cols: Vec<Vec<Complex<T>>> = Vec::new();
    let mut used = vec![false; n];
    if top <= T::zero() {
        return CMatrix::zeros(n, 0);
    }
    for _ in 0..n {
        let (p, &dp) = match diag
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .max_by(|x, y| x.1.partial_cmp(y.1).unwrap_or(std::cmp::Ordering::Equal))
        {
            Some(v) => v,
            None => break,
        };
        if dp <= rel_tol * top {
            break;
        }
        used[p] = true;
        let root = dp.sqrt();
        let col: Vec<Complex<T>> = (0..n)
            .map(|i| {
                if used[i] && i != p {
                    return Complex::new(T::zero(), T::zero());
                }
                let mut v = a[(i, p)];
                for c in &cols {
                    v -= c[i] * c[p].conj();
                }
                v / root
            })
            .collect();
        for i in 0..n {
            if !used[i] {
                diag[i] -= col[i].norm_sqr();
            }
        }
        cols.push(col);
    }
    CMatrix::from_fn(n, cols.len(), |r, c| cols[c][r])
}
