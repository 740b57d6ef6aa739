//! Random demodulator: ±1 chipping at rate `W`, integrate-and-dump at rate `R`.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cis, from_i64, from_usize, lit, CMatrix, Real};
use crate::seed;
use crate::signal::{tone_index, HarmonicSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdConfig {
    pub tone_grid_size: usize,
    pub rate: usize,
    pub chips: Vec<i8>,
}

impl RdConfig {
    pub fn random(tone_grid_size: usize, rate: usize, seed: u64) -> Result<Self> {
        let mut rng = seed::rng(seed);
        let chips = (0..tone_grid_size).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let cfg = Self {
            tone_grid_size,
            rate,
            chips,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rate == 0 || self.tone_grid_size == 0 || !self.tone_grid_size.is_multiple_of(self.rate) {
            return Err(Error::invalid("rate", "R must divide W"));
        }
        if self.chips.len() != self.tone_grid_size {
            return Err(Error::invalid("chips", "need W chips"));
        }
        if self.chips.iter().any(|&c| c != 1 && c != -1) {
            return Err(Error::invalid("chips", "chips must be +1 or -1"));
        }
        Ok(())
    }

    fn block(&self) -> usize {
        self.tone_grid_size / self.rate
    }
}

/// Integrate-and-dump gain of tone frequency `ν` (cycles per unit interval)
/// over one `1/W` cell, normalised to the cell average:
/// `W ∫_0^{1/W} e^{j2πνt} dt = W (e^{j2πν/W} − 1) / (j2πν)`, `1` at `ν = 0`.
pub fn dump_weight<T: Real>(nu: T, w: usize) -> Complex<T> {
    if nu == T::zero() {
        return Complex::new(T::one(), T::zero());
    }
    let wf = from_usize::<T>(w);
    let two_pi_nu = lit::<T>(2.0) * T::PI() * nu;
    (cis(two_pi_nu / wf) - Complex::new(T::one(), T::zero())) * wf / Complex::new(T::zero(), two_pi_nu)
}

/// Signal path: integrate-and-dump values `f_n` of `Σ a e^{j2πνt}` on every
/// `1/W` cell, chipped and summed in blocks of `W/R` cells.
pub fn rd_measure_tones<T: Real>(frequencies: &[T], amplitudes: &[Complex<T>], cfg: &RdConfig) -> Result<Vec<Complex<T>>> {
    cfg.validate()?;
    if frequencies.len() != amplitudes.len() {
        return Err(Error::invalid("amplitudes", "one amplitude per tone"));
    }
    let w = cfg.tone_grid_size;
    let wf = from_usize::<T>(w);
    let two_pi = lit::<T>(2.0) * T::PI();
    let gains: Vec<Complex<T>> = frequencies.iter().map(|&nu| dump_weight(nu, w)).collect();
    let cells = (0..w).map(|n| {
        let t = from_usize::<T>(n) / wf;
        frequencies
            .iter()
            .zip(amplitudes)
            .zip(&gains)
            .fold(Complex::new(T::zero(), T::zero()), |acc, ((&nu, &a), &g)| acc + a * g * cis(two_pi * nu * t))
    });
    let mut y = vec![Complex::new(T::zero(), T::zero()); cfg.rate];
    for (n, f_n) in cells.enumerate() {
        y[n / cfg.block()] += f_n * from_i64::<T>(cfg.chips[n] as i64);
    }
    Ok(y)
}

/// Composite sensing matrix `A = Φ·F` (R × W): column `q` maps the
/// coefficient of tone `k = tone_index(q, W)` to the measurements.
pub fn rd_matrix<T: Real>(cfg: &RdConfig) -> Result<CMatrix<T>> {
    cfg.validate()?;
    let w = cfg.tone_grid_size;
    let wf = from_usize::<T>(w);
    let two_pi = lit::<T>(2.0) * T::PI();
    let block = cfg.block();
    let mut a = CMatrix::zeros(cfg.rate, w);
    for q in 0..w {
        let k = tone_index(q, w);
        let g = dump_weight(from_i64::<T>(k), w);
        for n in 0..w {
            // e^{j2πkn/W} with kn reduced mod W
            let phase = two_pi * from_i64::<T>((k * n as i64).rem_euclid(w as i64)) / wf;
            a[(n / block, q)] += g * cis(phase) * from_i64::<T>(cfg.chips[n] as i64);
        }
    }
    Ok(a)
}

#[derive(Debug, Clone)]
pub struct RdMeasurement<T: Real> {
    pub y: Vec<Complex<T>>,
    pub sensing: CMatrix<T>,
}

pub fn rd_sample<T: Real>(spec: &HarmonicSpec<T>, cfg: &RdConfig) -> Result<RdMeasurement<T>> {
    spec.validate()?;
    if spec.tone_grid_size != cfg.tone_grid_size {
        return Err(Error::invalid("tone_grid_size", "signal and demodulator disagree on W"));
    }
    let freqs: Vec<T> = spec.indices.iter().map(|&k| from_i64::<T>(k)).collect();
    Ok(RdMeasurement {
        y: rd_measure_tones(&freqs, &spec.coefficients, cfg)?,
        sensing: rd_matrix(cfg)?,
    })
}
