//! Modulated wideband converter, basic configuration (`f_s = f_p`).
//!
//! Channel `i` mixes the input with a `T_p`-periodic sign waveform `p_i(t)`
//! of `M = 2L + 1` chips, lowpass filters at `f_s/2` and samples at `f_s`.
//! Writing `p_i(t) = Σ_l c_il e^{j2π l f_p t}`, the samples obey
//! `y[n] = C z[n]` where `z_l[n]` is the input mixed with `e^{j2π l f_p t}`,
//! lowpassed and sampled, i.e. the spectrum slice around `−l f_p`.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dft::{as_count, signed_bin, wrap_bin};
use crate::error::{Error, Result};
use crate::scalar::{cis, from_i64, from_usize, lit, CMatrix, Real};
use crate::seed;
use crate::signal::DenseSignal;

/// How the sign waveforms are placed on the simulation grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignRendering {
    /// Fourier series of `p_i(t)` truncated to the harmonics the grid can
    /// represent. Harmonics beyond half the grid rate cannot shift any input
    /// content into the channel passband, so the simulated samples equal those
    /// of the continuous-time front-end.
    #[default]
    FourierSeries,
    /// Chip values read pointwise at every grid instant. The grid product then
    /// aliases the non-bandlimited mixer output and the effective coefficients
    /// deviate from `c_il` by `O(1/r)` for `r` grid points per chip.
    Pointwise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MwcConfig<T> {
    /// Aliasing rate `f_p = 1/T_p`.
    pub f_p: T,
    /// Per-channel sampling rate; equals `f_p` in the basic configuration.
    pub f_s: T,
    /// One ±1 pattern of length `M` per channel.
    pub patterns: Vec<Vec<i8>>,
    #[serde(default)]
    pub rendering: SignRendering,
}

impl<T: Real> MwcConfig<T> {
    pub fn new(f_p: T, patterns: Vec<Vec<i8>>) -> Result<Self> {
        let cfg = Self {
            f_p,
            f_s: f_p,
            patterns,
            rendering: SignRendering::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Basic configuration with i.i.d. equiprobable sign patterns.
    pub fn random(channels: usize, chips: usize, f_p: T, pattern_seed: u64) -> Result<Self> {
        let mut rng = seed::rng(pattern_seed);
        let patterns = (0..channels)
            .map(|_| (0..chips).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
            .collect();
        Self::new(f_p, patterns)
    }

    pub fn with_rendering(mut self, rendering: SignRendering) -> Self {
        self.rendering = rendering;
        self
    }

    pub fn channels(&self) -> usize {
        self.patterns.len()
    }

    pub fn chips(&self) -> usize {
        self.patterns.first().map_or(0, Vec::len)
    }

    /// `L`, with `M = 2L + 1`.
    pub fn half_width(&self) -> usize {
        self.chips() / 2
    }

    /// Highest frequency covered by the slices `l = −L..L`, `(L + 1/2) f_p`.
    pub fn covered_band(&self) -> T {
        (from_usize::<T>(self.half_width()) + lit(0.5)) * self.f_p
    }

    pub fn validate(&self) -> Result<()> {
        if self.patterns.is_empty() {
            return Err(Error::Empty("sign patterns"));
        }
        let m = self.chips();
        if m.is_multiple_of(2) {
            return Err(Error::invalid("chips", "M must be odd (M = 2L + 1)"));
        }
        if self.patterns.iter().any(|p| p.len() != m) {
            return Err(Error::invalid("patterns", "every pattern must have M chips"));
        }
        if self.patterns.iter().flatten().any(|&s| s != 1 && s != -1) {
            return Err(Error::invalid("patterns", "chips must be +1 or -1"));
        }
        if !(self.f_p > T::zero()) {
            return Err(Error::invalid("f_p", "must be positive"));
        }
        if (self.f_s - self.f_p).abs() > lit::<T>(1e-12) * self.f_p {
            return Err(Error::invalid("f_s", "basic configuration requires f_s = f_p"));
        }
        Ok(())
    }
}

/// Fourier coefficient `c_l = (1/T_p) ∫ p(t) e^{−j2π l t/T_p} dt` of a
/// piecewise-constant sign waveform with `M` equal chips:
/// `c_0 = mean(s)`, `c_l = d_l Σ_k s_k e^{−j2π l k/M}` with
/// `d_l = (1 − e^{−j2π l/M}) / (j2π l)`.
pub fn sign_coefficient<T: Real>(pattern: &[i8], l: i64) -> Complex<T> {
    let m = pattern.len();
    let mf = from_usize::<T>(m);
    if l == 0 {
        let sum: i64 = pattern.iter().map(|&s| s as i64).sum();
        return Complex::new(from_i64::<T>(sum) / mf, T::zero());
    }
    let two_pi = lit::<T>(2.0) * T::PI();
    let lf = from_i64::<T>(l);
    // reduce l k mod M before forming the phase to keep the argument small
    let sum = pattern.iter().enumerate().fold(Complex::new(T::zero(), T::zero()), |acc, (k, &s)| {
        let r = (l * k as i64).rem_euclid(m as i64);
        acc + cis(-two_pi * from_i64::<T>(r) / mf) * from_i64::<T>(s as i64)
    });
    let d = (Complex::new(T::one(), T::zero()) - cis(-two_pi * lf / mf)) / Complex::new(T::zero(), two_pi * lf);
    d * sum
}

/// Sensing matrix `C` (m × M), column `j` holding harmonic `l = j − L`.
pub fn mwc_matrix<T: Real>(cfg: &MwcConfig<T>) -> Result<CMatrix<T>> {
    cfg.validate()?;
    let half = cfg.half_width() as i64;
    Ok(CMatrix::from_fn(cfg.channels(), cfg.chips(), |i, j| {
        sign_coefficient(&cfg.patterns[i], j as i64 - half)
    }))
}

/// Slice index `l` holding signed grid bin `p` when each channel keeps
/// `samples_per_channel` baseband bins: `p + l·T` lands in the half-open
/// baseband `[−floor(T/2), ceil(T/2) − 1]`.
pub fn slice_index(p: i64, samples_per_channel: usize) -> i64 {
    let t = samples_per_channel as i64;
    let base = signed_bin(wrap_bin(p, samples_per_channel), samples_per_channel);
    (base - p) / t
}

/// One period of the rendered waveform, `points` grid samples long.
fn render_waveform<T: Real>(pattern: &[i8], points: usize, rendering: SignRendering) -> Vec<Complex<T>> {
    match rendering {
        SignRendering::Pointwise => {
            let per_chip = points / pattern.len();
            (0..points)
                .map(|g| Complex::new(from_i64::<T>(pattern[g / per_chip] as i64), T::zero()))
                .collect()
        }
        SignRendering::FourierSeries => {
            let scale = from_usize::<T>(points);
            let top = ((points - 1) / 2) as i64;
            let mut buf = vec![Complex::new(T::zero(), T::zero()); points];
            for l in -top..=top {
                buf[wrap_bin(l, points)] = sign_coefficient::<T>(pattern, l) * scale;
            }
            T::ifft(&mut buf);
            buf
        }
    }
}

/// Simulates every channel on the dense grid and returns the `m × T`
/// measurement block, `T = f_s · duration` samples per channel.
pub fn mwc_sample<T: Real>(x: &DenseSignal<T>, cfg: &MwcConfig<T>) -> Result<CMatrix<T>> {
    cfg.validate()?;
    let rate = x.grid_rate();
    let ng = x.len();
    let per_chip = as_count(rate / (from_usize::<T>(cfg.chips()) * cfg.f_p), "grid_rate / (M f_p)")?;
    if per_chip == 0 {
        return Err(Error::invalid("grid_rate", "grid must resolve every chip"));
    }
    let per_period = per_chip * cfg.chips();
    if !ng.is_multiple_of(per_period) {
        return Err(Error::invalid("duration", "signal must span an integer number of periods T_p"));
    }
    let t = as_count(cfg.f_s * x.duration(), "f_s * duration")?;
    let scale = from_usize::<T>(t) / from_usize::<T>(ng);
    let half = (t / 2) as i64;
    let lowest = -half;
    let highest = lowest + t as i64 - 1;

    let mut out = CMatrix::zeros(cfg.channels(), t);
    for (i, pattern) in cfg.patterns.iter().enumerate() {
        let wave = render_waveform::<T>(pattern, per_period, cfg.rendering);
        let mut prod: Vec<Complex<T>> = x
            .samples()
            .iter()
            .enumerate()
            .map(|(g, &v)| v * wave[g % per_period])
            .collect();
        T::fft(&mut prod);
        let mut base = vec![Complex::new(T::zero(), T::zero()); t];
        for b in lowest..=highest {
            base[wrap_bin(b, t)] = prod[wrap_bin(b, ng)] * scale;
        }
        T::ifft(&mut base);
        for (n, v) in base.into_iter().enumerate() {
            out[(i, n)] = v;
        }
    }
    Ok(out)
}
