//! Rate calculators: undersampling validity regions and minimal-rate bounds.
//!
//! These only need field arithmetic and ordering, so they are generic over any
//! [`num_traits::Num`] type, including exact rationals such as
//! `num_rational::Ratio<i64>`.

use num_traits::{FromPrimitive, Num};

use crate::error::{Error, Result};

/// One admissible undersampling range `[lo, hi]` for wrap index `k`.
/// `hi == None` means unbounded above (only for `k = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct RateInterval<T> {
    pub k: u64,
    pub lo: T,
    pub hi: Option<T>,
}

impl<T: Num + PartialOrd + Clone> RateInterval<T> {
    pub fn contains(&self, rate: &T) -> bool {
        *rate >= self.lo && self.hi.as_ref().is_none_or(|hi| rate <= hi)
    }
}

/// Sampling rates for which a real bandpass signal on `(f_l, f_u)` can be
/// uniformly undersampled without alias overlap: `2f_u/k ≤ f_s ≤ 2f_l/(k−1)`
/// for `1 ≤ k ≤ floor(f_u/(f_u − f_l))`. Empty ranges are dropped and the
/// result is ordered by decreasing `k`, i.e. lowest rates first.
pub fn undersample_valid_rates<T>(f_l: T, f_u: T) -> Result<Vec<RateInterval<T>>>
where
    T: Num + PartialOrd + Clone + FromPrimitive,
{
    if !(T::zero() < f_l.clone() && f_l < f_u) {
        return Err(Error::invalid("band", "need 0 < f_l < f_u"));
    }
    let width = f_u.clone() - f_l.clone();
    let two = T::one() + T::one();
    let mut out = Vec::new();
    let mut k: u64 = 1;
    loop {
        let kt = T::from_u64(k).expect("k representable");
        if kt.clone() * width.clone() > f_u {
            break;
        }
        let lo = two.clone() * f_u.clone() / kt.clone();
        let hi = if k == 1 {
            None
        } else {
            Some(two.clone() * f_l.clone() / (kt - T::one()))
        };
        if hi.as_ref().is_none_or(|h| lo <= *h) {
            out.push(RateInterval { k, lo, hi });
        }
        k += 1;
    }
    out.reverse();
    Ok(out)
}

/// Landau's bound: the minimal average rate for a known support equals its
/// measure (for `N` bands of width `B`, both spectral sides, `N·B`).
pub fn landau_min_rate<T: Num + PartialOrd>(occupied_measure: T) -> Result<T> {
    if occupied_measure < T::zero() {
        return Err(Error::invalid("occupied_measure", "must be non-negative"));
    }
    Ok(occupied_measure)
}

/// Minimal rate when only the occupancy fraction `Ω` is known:
/// `min(2 Ω f_nyq, f_nyq)`.
pub fn blind_min_rate<T: Num + PartialOrd + Clone>(occupancy: T, f_nyq: T) -> Result<T> {
    if !(occupancy > T::zero() && occupancy <= T::one()) {
        return Err(Error::invalid("occupancy", "must lie in (0, 1]"));
    }
    if !(f_nyq > T::zero()) {
        return Err(Error::invalid("f_nyq", "must be positive"));
    }
    let two = T::one() + T::one();
    let r = two * occupancy * f_nyq.clone();
    Ok(if r < f_nyq { r } else { f_nyq })
}

/// Real multiplications per second of the MWC digital back-end, `2 N m f_s`.
pub fn mwc_compute_load<T: Num + Clone + FromPrimitive>(bands: usize, channels: usize, f_s: T) -> T {
    let two = T::one() + T::one();
    two * T::from_usize(bands).expect("band count") * T::from_usize(channels).expect("channel count") * f_s
}
