//! Slow, literal reference computations for cross-checking `subnyq`.
//!
//! Everything here is `f64` and deliberately naive: direct sums instead of
//! closed forms, quadrature instead of analytic integrals, exhaustive search
//! instead of greedy selection.

// `!(a > b)` is deliberate: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;

use num_complex::Complex;
use num_traits::{Num, Zero};
use rustfft::FftPlanner;

pub type C = Complex<f64>;

fn cis(theta: f64) -> C {
    C::new(theta.cos(), theta.sin())
}

fn fft(buf: &mut [C]) {
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}

fn ifft(buf: &mut [C]) {
    let n = buf.len();
    FftPlanner::new().plan_fft_inverse(n).process(buf);
    for v in buf.iter_mut() {
        *v /= n as f64;
    }
}

fn signed(k: usize, n: usize) -> i64 {
    let k = k as i64;
    let n = n as i64;
    if k >= n - n / 2 {
        k - n
    } else {
        k
    }
}

/// Composite Simpson rule on `[a, b]` with `intervals` (even) subintervals.
pub fn simpson(f: impl Fn(f64) -> C, a: f64, b: f64, intervals: usize) -> C {
    assert!(intervals.is_multiple_of(2) && intervals > 0);
    let h = (b - a) / intervals as f64;
    let mut acc = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(a + i as f64 * h) * w;
    }
    acc * (h / 3.0)
}

/// `(1/T_p) ∫ p(t) e^{−j2π l t/T_p} dt` for a chip sequence, Simpson on
/// `points_per_chip` nodes per chip (T_p normalised to 1).
pub fn sign_coefficient_quadrature(pattern: &[i8], l: i64, points_per_chip: usize) -> C {
    let m = pattern.len() as f64;
    let intervals = points_per_chip - 1;
    pattern
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let a = k as f64 / m;
            let b = (k + 1) as f64 / m;
            simpson(|t| cis(-2.0 * PI * l as f64 * t) * s as f64, a, b, intervals)
        })
        .sum()
}

/// Slice sequence `z_l[n]`: multiply the grid signal by `e^{j2π l f_p t}`,
/// keep the `T` baseband bins `[−⌊T/2⌋, ⌈T/2⌉ − 1]`, resample at `f_s`.
pub fn mwc_slice(x: &[C], grid_rate: f64, f_p: f64, l: i64, samples: usize) -> Vec<C> {
    let ng = x.len();
    let mut mixed: Vec<C> = x
        .iter()
        .enumerate()
        .map(|(g, &v)| v * cis(2.0 * PI * l as f64 * f_p * g as f64 / grid_rate))
        .collect();
    fft(&mut mixed);
    let mut base = vec![C::zero(); samples];
    for (k, slot) in base.iter_mut().enumerate() {
        let b = signed(k, samples);
        let idx = b.rem_euclid(ng as i64) as usize;
        *slot = mixed[idx] * (samples as f64 / ng as f64);
    }
    ifft(&mut base);
    base
}

/// `X[k] = (1/τ) H_k Σ_ℓ a_ℓ e^{−j2πk t_ℓ/τ}` by direct summation.
pub fn fri_coefficient(period: f64, delays: &[f64], amplitudes: &[C], h_k: C, k: i64) -> C {
    let mut acc = C::zero();
    for (t, a) in delays.iter().zip(amplitudes) {
        acc += a * cis(-2.0 * PI * k as f64 * t / period);
    }
    h_k * acc / period
}

/// `Σ_{|k| ≤ kmax} X[k] e^{j2πkt/τ}` evaluated pointwise.
pub fn fourier_series(coeffs: impl Fn(i64) -> C, kmax: i64, period: f64, t: f64) -> C {
    (-kmax..=kmax).map(|k| coeffs(k) * cis(2.0 * PI * k as f64 * t / period)).sum()
}

/// `c[n] = ∫_0^τ x(t) ĝ*(t − nτ/M) dt` by a grid Riemann sum, where `ĝ` is the
/// τ-periodised SoS kernel `Σ_k b_k e^{j2πkt/τ}`. Exact for trigonometric
/// polynomials of degree below half the grid.
pub fn sos_samples_riemann(x: &[C], period: f64, first_index: i64, weights: &[C], m: usize) -> Vec<C> {
    let p = x.len();
    let dt = period / p as f64;
    (0..m)
        .map(|n| {
            let shift = n as f64 * period / m as f64;
            let mut acc = C::zero();
            for (g, &v) in x.iter().enumerate() {
                let t = g as f64 * dt - shift;
                let mut kern = C::zero();
                for (i, b) in weights.iter().enumerate() {
                    kern += b * cis(2.0 * PI * (first_index + i as i64) as f64 * t / period);
                }
                acc += v * kern.conj();
            }
            acc * dt
        })
        .collect()
}

/// Random-demodulator measurements by Simpson integration of `ε(t) f(t)`,
/// `intervals` subintervals per chip. `f` is given as tones `(ν, a)` on the
/// unit interval.
pub fn rd_quadrature(tones: &[(f64, C)], chips: &[i8], rate: usize, intervals: usize) -> Vec<C> {
    let w = chips.len();
    let block = w / rate;
    let f = |t: f64| tones.iter().map(|&(nu, a)| a * cis(2.0 * PI * nu * t)).sum::<C>();
    let mut y = vec![C::zero(); rate];
    for (n, &e) in chips.iter().enumerate() {
        let a = n as f64 / w as f64;
        let b = (n + 1) as f64 / w as f64;
        y[n / block] += simpson(f, a, b, intervals) * (w as f64 * e as f64);
    }
    y
}

/// Largest normalised inner product over every pair of distinct columns.
pub fn coherence(columns: &[Vec<C>]) -> f64 {
    let norm = |v: &[C]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut mu = 0.0f64;
    for i in 0..columns.len() {
        for j in 0..columns.len() {
            if i == j {
                continue;
            }
            let ip: C = columns[i].iter().zip(&columns[j]).map(|(a, b)| a.conj() * b).sum();
            mu = mu.max(ip.norm() / (norm(&columns[i]) * norm(&columns[j])));
        }
    }
    mu
}

/// Solves the square system `A x = b` by Gaussian elimination with partial
/// pivoting; `None` when a pivot vanishes.
#[allow(clippy::needless_range_loop)]
fn gauss_solve(mut a: Vec<Vec<C>>, mut b: Vec<C>) -> Option<Vec<C>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() < 1e-13 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
            let v = b[col];
            b[r] -= f * v;
        }
    }
    let mut x = vec![C::zero(); n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in i + 1..n {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    Some(x)
}

/// Least-squares residual norm of `y` on the given columns (normal equations).
pub fn subset_residual(columns: &[Vec<C>], subset: &[usize], y: &[C]) -> Option<f64> {
    let k = subset.len();
    let gram: Vec<Vec<C>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| columns[subset[i]].iter().zip(&columns[subset[j]]).map(|(a, b)| a.conj() * b).sum())
                .collect()
        })
        .collect();
    let rhs: Vec<C> = subset
        .iter()
        .map(|&i| columns[i].iter().zip(y).map(|(a, b)| a.conj() * b).sum())
        .collect();
    let z = gauss_solve(gram, rhs)?;
    let res: f64 = (0..y.len())
        .map(|r| {
            let fit: C = subset.iter().zip(&z).map(|(&j, c)| columns[j][r] * c).sum();
            (y[r] - fit).norm_sqr()
        })
        .sum();
    Some(res.sqrt())
}

fn next_subset(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Sparsest exact representation of `y` over the columns by exhaustive search
/// of all subsets of size `0..=max_k`; returns the first subset (lexicographic)
/// of minimal size whose relative residual is below `tol`.
pub fn l0_search(columns: &[Vec<C>], y: &[C], max_k: usize, tol: f64) -> Option<Vec<usize>> {
    let ynorm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if ynorm == 0.0 {
        return Some(Vec::new());
    }
    let n = columns.len();
    for k in 1..=max_k.min(n) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            if let Some(r) = subset_residual(columns, &idx, y) {
                if r <= tol * ynorm {
                    return Some(idx);
                }
            }
            if !next_subset(&mut idx, n) {
                break;
            }
        }
    }
    None
}

/// True when no two spectral images of the band overlap (touching allowed)
/// after sampling at `fs`: the copies `[f_l, f_u] + n fs` and
/// `[−f_u, −f_l] + n' fs` are compared for every shift up to
/// `⌈f_u/fs⌉ + 1`. Generic so exact rationals can be used.
pub fn alias_free<T>(f_l: T, f_u: T, fs: T) -> bool
where
    T: Num + PartialOrd + Clone,
{
    let mut reach = 0i64;
    let mut acc = T::zero();
    while acc < f_u {
        acc = acc + fs.clone();
        reach += 1;
    }
    reach += 1;
    let shift = |n: i64| -> T {
        let mut s = T::zero();
        for _ in 0..n.abs() {
            s = s + fs.clone();
        }
        if n < 0 {
            T::zero() - s
        } else {
            s
        }
    };
    let overlap = |a: (T, T), b: (T, T)| a.0 < b.1 && b.0 < a.1;
    let pos = (f_l.clone(), f_u.clone());
    let neg = (T::zero() - f_u.clone(), T::zero() - f_l.clone());
    for n in -reach..=reach {
        for n2 in -reach..=reach {
            let sp = shift(n);
            let sn = shift(n2);
            let p = (pos.0.clone() + sp.clone(), pos.1.clone() + sp);
            let q = (neg.0.clone() + sn.clone(), neg.1.clone() + sn);
            if overlap(p, q) {
                return false;
            }
        }
        if n != 0 {
            let sp = shift(n);
            let moved = (pos.0.clone() + sp.clone(), pos.1.clone() + sp);
            if overlap(pos.clone(), moved) {
                return false;
            }
        }
    }
    true
}

/// Fraction of DFT energy lying on the listed signed bins.
pub fn energy_fraction(x: &[C], bins: &[i64]) -> f64 {
    let n = x.len();
    let mut spec = x.to_vec();
    fft(&mut spec);
    let total: f64 = spec.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return 1.0;
    }
    let inside: f64 = bins.iter().map(|&b| spec[b.rem_euclid(n as i64) as usize].norm_sqr()).sum();
    inside / total
}

/// Smallest circular distance on `[0, τ)`.
pub fn circular_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}
