//! Acquisition front-ends: pointwise/T&H sampling, periodic nonuniform
//! sampling, the modulated wideband converter and the random demodulator.

mod mwc;
mod rd;

pub use mwc::{mwc_matrix, mwc_sample, sign_coefficient, slice_index, MwcConfig, SignRendering};
pub use rd::{dump_weight, rd_matrix, rd_measure_tones, rd_sample, RdConfig, RdMeasurement};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dft::{self, as_count};
use crate::error::{Error, Result};
use crate::scalar::{from_i64, lit, Real};
use crate::signal::DenseSignal;

/// Track-and-hold front stage modelled as an ideal lowpass of cutoff `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThModel<T> {
    pub analog_bandwidth: T,
}

fn decimation_ratio<T: Real>(x: &DenseSignal<T>, rate: T) -> Result<usize> {
    if !(rate > T::zero()) {
        return Err(Error::invalid("rate", "must be positive"));
    }
    let ratio = as_count(x.grid_rate() / rate, "grid_rate / rate")?;
    if ratio == 0 || !x.len().is_multiple_of(ratio) {
        return Err(Error::invalid("rate", "grid length is not a multiple of the decimation ratio"));
    }
    Ok(ratio)
}

/// Ideal pointwise sampling (no analog bandwidth limit): every `grid_rate/rate`-th sample.
pub fn pointwise_sample<T: Real>(x: &DenseSignal<T>, rate: T) -> Result<Vec<Complex<T>>> {
    let ratio = decimation_ratio(x, rate)?;
    Ok(x.samples().iter().step_by(ratio).copied().collect())
}

/// T/H-limited sampling: brickwall lowpass `|f| ≤ b` on the grid, then
/// pointwise decimation to `rate` (aliasing of the surviving content is kept).
pub fn th_sample<T: Real>(x: &DenseSignal<T>, rate: T, th: &ThModel<T>) -> Result<Vec<Complex<T>>> {
    if !(th.analog_bandwidth > T::zero()) {
        return Err(Error::invalid("analog_bandwidth", "must be positive"));
    }
    let ratio = decimation_ratio(x, rate)?;
    let duration = x.duration();
    let cutoff = th.analog_bandwidth * (T::one() + lit(1e-12));
    let mut spec = x.spectrum();
    dft::mask_bins(&mut spec, |k| (from_i64::<T>(k) / duration).abs() <= cutoff);
    let filtered = dft::inverse(&spec);
    Ok(filtered.into_iter().step_by(ratio).collect())
}

/// Periodic nonuniform sampling: channel `i` reads `x(nT_s + φ_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PnsConfig<T> {
    pub interval: T,
    pub offsets: Vec<T>,
}

impl<T: Real> PnsConfig<T> {
    /// Second-order scheme for a band of width `B`: `T_s = 1/B`, offsets `{0, φ}`.
    pub fn second_order(band_width: T, phase: T) -> Self {
        Self {
            interval: T::one() / band_width,
            offsets: vec![T::zero(), phase],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.interval > T::zero()) {
            return Err(Error::invalid("interval", "must be positive"));
        }
        if self.offsets.is_empty() {
            return Err(Error::Empty("PNS offsets"));
        }
        for (i, &phi) in self.offsets.iter().enumerate() {
            if phi < T::zero() || phi >= self.interval {
                return Err(Error::invalid("offsets", "each offset must lie in [0, T_s)"));
            }
            if self.offsets[..i].contains(&phi) {
                return Err(Error::invalid("offsets", "offsets must be distinct"));
            }
        }
        Ok(())
    }
}

pub fn pns_sample<T: Real>(x: &DenseSignal<T>, cfg: &PnsConfig<T>) -> Result<Vec<Vec<Complex<T>>>> {
    cfg.validate()?;
    let rate = x.grid_rate();
    let step = as_count(rate * cfg.interval, "grid_rate * T_s")?;
    if step == 0 || !x.len().is_multiple_of(step) {
        return Err(Error::invalid("interval", "signal duration must hold an integer number of T_s"));
    }
    let count = x.len() / step;
    let n = x.len();
    cfg.offsets
        .iter()
        .map(|&phi| {
            let off = as_count(rate * phi, "grid_rate * offset")?;
            Ok((0..count).map(|i| x.samples()[(i * step + off) % n]).collect())
        })
        .collect()
}
