//! DFT conventions and grid arithmetic.
//!
//! Forward transforms use the kernel `e^{-j2πkn/N}` with no scaling; inverse
//! transforms use `e^{+j2πkn/N}` scaled by `1/N`. A length-`N` grid spanning
//! `duration` seconds places bin `k` at frequency `signed_bin(k, N) / duration`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative tolerance used when a real-valued ratio must be an integer.
pub const INTEGER_TOL: f64 = 1e-9;

/// Maps a DFT index in `0..n` to its signed frequency index in
/// `[-floor(n/2), ceil(n/2) - 1]`.
#[inline]
pub fn signed_bin(k: usize, n: usize) -> i64 {
    let k = k as i64;
    let n = n as i64;
    if k < (n + 1) / 2 {
        k
    } else {
        k - n
    }
}

/// Inverse of [`signed_bin`]: wraps any signed index into `0..n`.
#[inline]
pub fn wrap_bin(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Returns `value` as a non-negative integer when it is one to within
/// [`INTEGER_TOL`] relative tolerance.
pub fn as_count<T: Real>(value: T, what: &'static str) -> Result<usize> {
    let v = value.to_f64().unwrap_or(f64::NAN);
    let r = v.round();
    if !v.is_finite() || r < 0.0 || (v - r).abs() > INTEGER_TOL * r.abs().max(1.0) {
        return Err(Error::NonInteger { what, value: v });
    }
    Ok(r as usize)
}

/// Signed variant of [`as_count`].
pub fn as_integer<T: Real>(value: T, what: &'static str) -> Result<i64> {
    let v = value.to_f64().unwrap_or(f64::NAN);
    let r = v.round();
    if !v.is_finite() || (v - r).abs() > INTEGER_TOL * r.abs().max(1.0) {
        return Err(Error::NonInteger { what, value: v });
    }
    Ok(r as i64)
}

pub fn forward<T: Real>(samples: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut buf = samples.to_vec();
    T::fft(&mut buf);
    buf
}

pub fn inverse<T: Real>(spectrum: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut buf = spectrum.to_vec();
    T::ifft(&mut buf);
    buf
}

/// Keeps the bins `k` whose signed index satisfies `keep(signed)`, zeroing the rest.
pub fn mask_bins<T: Real>(spectrum: &mut [Complex<T>], keep: impl Fn(i64) -> bool) {
    let n = spectrum.len();
    for (k, v) in spectrum.iter_mut().enumerate() {
        if !keep(signed_bin(k, n)) {
            *v = Complex::new(T::zero(), T::zero());
        }
    }
}

/// Sum of squared magnitudes.
pub fn energy<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}
