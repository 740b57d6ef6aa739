//! Ground-truth "analog" signals on a dense periodic grid.
//!
//! A [`DenseSignal`] holds samples on a uniform grid and is treated as periodic
//! with period equal to its duration, so ideal filtering is exact DFT masking.

use std::io::{BufRead, BufReader, Read, Write};

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dft::{self, as_count, signed_bin, wrap_bin};
use crate::error::{Error, Result};
use crate::scalar::{cis, from_i64, from_usize, lit, Real};
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseSignal<T: Real> {
    samples: Vec<Complex<T>>,
    grid_rate: T,
    real_valued: bool,
}

impl<T: Real> DenseSignal<T> {
    pub fn new(samples: Vec<Complex<T>>, grid_rate: T) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("signal samples"));
        }
        if !(grid_rate > T::zero()) || !grid_rate.is_finite() {
            return Err(Error::invalid("grid_rate", "must be positive and finite"));
        }
        Ok(Self {
            samples,
            grid_rate,
            real_valued: false,
        })
    }

    /// All-zero signal of `grid_rate · duration` samples.
    pub fn zeros(grid_rate: T, duration: T) -> Result<Self> {
        let n = as_count(grid_rate * duration, "grid_rate * duration")?;
        let mut s = Self::new(vec![Complex::new(T::zero(), T::zero()); n], grid_rate)?;
        s.real_valued = true;
        Ok(s)
    }

    /// Samples `f(t)` at `t = n / grid_rate`.
    pub fn from_fn(grid_rate: T, duration: T, f: impl Fn(T) -> Complex<T>) -> Result<Self> {
        let n = as_count(grid_rate * duration, "grid_rate * duration")?;
        let samples = (0..n).map(|i| f(from_usize::<T>(i) / grid_rate)).collect();
        Self::new(samples, grid_rate)
    }

    /// Builds a signal from its unnormalised DFT (inverse scaled by `1/N`).
    pub fn from_spectrum(spectrum: Vec<Complex<T>>, grid_rate: T) -> Result<Self> {
        let mut buf = spectrum;
        T::ifft(&mut buf);
        Self::new(buf, grid_rate)
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn grid_rate(&self) -> T {
        self.grid_rate
    }

    pub fn duration(&self) -> T {
        from_usize::<T>(self.samples.len()) / self.grid_rate
    }

    pub fn time(&self, n: usize) -> T {
        from_usize::<T>(n) / self.grid_rate
    }

    /// Whether the signal was synthesised as real-valued.
    pub fn is_real(&self) -> bool {
        self.real_valued
    }

    pub fn with_real_flag(mut self, real: bool) -> Self {
        self.real_valued = real;
        self
    }

    pub fn spectrum(&self) -> Vec<Complex<T>> {
        dft::forward(&self.samples)
    }

    /// Frequency in Hz of DFT bin `k`.
    pub fn bin_frequency(&self, k: usize) -> T {
        from_i64::<T>(signed_bin(k, self.len())) / self.duration()
    }

    pub fn energy(&self) -> T {
        dft::energy(&self.samples)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        let tol = lit::<T>(1e-12) * self.grid_rate.abs();
        self.len() == other.len() && (self.grid_rate - other.grid_rate).abs() <= tol
    }

    pub fn scaled(&self, alpha: Complex<T>) -> Self {
        let real = self.real_valued && alpha.im == T::zero();
        Self {
            samples: self.samples.iter().map(|&z| z * alpha).collect(),
            grid_rate: self.grid_rate,
            real_valued: real,
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
            grid_rate: self.grid_rate,
            real_valued: self.real_valued && other.real_valued,
        })
    }

    /// Relative conjugate-symmetry defect of the DFT,
    /// `max_k |X[k] − conj(X[−k])| / max_k |X[k]|`.
    pub fn conjugate_symmetry_defect(&self) -> T {
        let spec = self.spectrum();
        let n = spec.len();
        let peak = spec.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        if peak == T::zero() {
            return T::zero();
        }
        let worst = (0..n).fold(T::zero(), |m, k| {
            let mirror = spec[(n - k) % n].conj();
            m.max((spec[k] - mirror).norm())
        });
        worst / peak
    }

    /// Writes the CSV dump: a `grid_rate,duration` header line followed by one
    /// `re,im` line per sample, all in 17-significant-digit scientific notation.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{:.16e},{:.16e}", self.grid_rate, self.duration())?;
        for z in &self.samples {
            writeln!(w, "{:.16e},{:.16e}", z.re, z.im)?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let header = lines.next().ok_or(Error::Csv("missing header".into()))??;
        let (rate, duration) = parse_pair::<T>(&header)?;
        let mut samples = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (re, im) = parse_pair::<T>(&line)?;
            samples.push(Complex::new(re, im));
        }
        let n = as_count(rate * duration, "grid_rate * duration")?;
        if n != samples.len() {
            return Err(Error::Csv(format!("header announces {n} samples, found {}", samples.len())));
        }
        Self::new(samples, rate)
    }

    /// Binary dump: little-endian `f64` grid_rate, duration, then interleaved re,im.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let put = |w: &mut W, x: T| w.write_all(&x.to_f64().unwrap_or(f64::NAN).to_le_bytes());
        put(&mut w, self.grid_rate)?;
        put(&mut w, self.duration())?;
        for z in &self.samples {
            put(&mut w, z.re)?;
            put(&mut w, z.im)?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() < 16 || bytes.len() % 16 != 0 {
            return Err(Error::Csv("truncated binary dump".into()));
        }
        let vals: Vec<T> = bytes
            .chunks_exact(8)
            .map(|c| lit(f64::from_le_bytes(c.try_into().expect("8-byte chunk"))))
            .collect();
        let samples = vals[2..].chunks_exact(2).map(|p| Complex::new(p[0], p[1])).collect();
        let s = Self::new(samples, vals[0])?;
        let n = as_count(vals[0] * vals[1], "grid_rate * duration")?;
        if n != s.len() {
            return Err(Error::Csv("sample count disagrees with header".into()));
        }
        Ok(s)
    }
}

fn parse_pair<T: Real>(line: &str) -> Result<(T, T)> {
    let mut it = line.split(',').map(|s| s.trim().parse::<f64>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((lit(a), lit(b))),
        _ => Err(Error::Csv(format!("expected two numbers, got `{line}`"))),
    }
}

/// Content of the in-phase/quadrature components of every transmission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BandContent<T> {
    /// Unit-variance complex Gaussian DFT coefficients (scaled by `amplitude`)
    /// on every grid bin strictly inside each band.
    Gaussian { amplitude: T },
    /// Constant `I(t) = i`, `Q(t) = q`; requires carriers on DFT bins.
    Constant { i: T, q: T },
    Zero,
}

/// Real multiband input: `band_count / 2` quadrature transmissions of width
/// `band_width` around positive `carriers`, each mirrored to negative frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultibandSpec<T> {
    pub band_count: usize,
    pub band_width: T,
    pub carriers: Vec<T>,
    pub f_max: T,
    pub content: BandContent<T>,
}

impl<T: Real> MultibandSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.band_count == 0 || !self.band_count.is_multiple_of(2) {
            return Err(Error::invalid("band_count", "must be a positive even number"));
        }
        if self.carriers.len() * 2 != self.band_count {
            return Err(Error::invalid("carriers", "need band_count / 2 positive carriers"));
        }
        if !(self.band_width > T::zero()) || !(self.f_max > T::zero()) {
            return Err(Error::invalid("band_width", "band width and f_max must be positive"));
        }
        let half = self.band_width / lit(2.0);
        let slack = lit::<T>(1e-12) * self.f_max;
        for &f in &self.carriers {
            if f < half - slack || f > self.f_max - half + slack {
                return Err(Error::invalid("carriers", format!("carrier {f} outside [B/2, f_max - B/2]")));
            }
        }
        for i in 0..self.carriers.len() {
            for j in i + 1..self.carriers.len() {
                if (self.carriers[i] - self.carriers[j]).abs() < self.band_width - slack {
                    return Err(Error::OverlappingBands { first: i, second: j });
                }
            }
        }
        Ok(())
    }

    pub fn nyquist_rate(&self) -> T {
        lit::<T>(2.0) * self.f_max
    }

    /// Lebesgue measure of the occupied spectrum, both sides: `N·B`.
    pub fn occupied_measure(&self) -> T {
        from_usize::<T>(self.band_count) * self.band_width
    }

    /// Signed DFT bins (for a grid spanning `duration` seconds) strictly inside
    /// the positive bands, in carrier order.
    pub fn positive_bins(&self, duration: T) -> Vec<Vec<i64>> {
        let half = self.band_width / lit(2.0);
        self.carriers
            .iter()
            .map(|&fc| {
                let lo = ((fc - half) * duration).floor().to_i64().unwrap_or(0);
                let hi = ((fc + half) * duration).ceil().to_i64().unwrap_or(0);
                (lo..=hi)
                    .filter(|&p| ((from_i64::<T>(p) / duration) - fc).abs() < half)
                    .collect()
            })
            .collect()
    }

    /// All occupied signed bins, positive and mirrored negative, sorted.
    pub fn occupied_bins(&self, duration: T) -> Vec<i64> {
        let mut bins: Vec<i64> = match self.content {
            BandContent::Constant { .. } => self
                .carriers
                .iter()
                .map(|&f| (f * duration).round().to_i64().unwrap_or(0))
                .collect(),
            _ => self.positive_bins(duration).into_iter().flatten().collect(),
        };
        let neg: Vec<i64> = bins.iter().map(|p| -p).collect();
        bins.extend(neg);
        bins.sort_unstable();
        bins.dedup();
        bins
    }
}

/// Synthesises the real multiband signal
/// `Σ_i I_i(t) cos(2π f_i t) + Q_i(t) sin(2π f_i t)` on the grid.
///
/// Gaussian content is drawn in the DFT domain on the bins strictly inside
/// `|f − f_i| < B/2`, band `i` using stream `split_seed(seed, i)`, so the
/// out-of-band energy is exactly zero.
pub fn gen_multiband<T: Real>(spec: &MultibandSpec<T>, grid_rate: T, duration: T, seed: u64) -> Result<DenseSignal<T>> {
    spec.validate()?;
    let slack = lit::<T>(1e-12) * grid_rate;
    if grid_rate + slack < spec.nyquist_rate() {
        return Err(Error::invalid("grid_rate", "below the Nyquist rate 2 f_max"));
    }
    let n = as_count(grid_rate * duration, "grid_rate * duration")?;
    let zero = Complex::new(T::zero(), T::zero());
    let mut spectrum = vec![zero; n];
    let scale = from_usize::<T>(n);

    match spec.content {
        BandContent::Zero => {}
        BandContent::Gaussian { amplitude } => {
            let std = (T::one() / lit(2.0)).sqrt() * amplitude;
            for (band, bins) in spec.positive_bins(duration).iter().enumerate() {
                let mut rng = seed::child_rng(seed, band as u64);
                for &p in bins {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    let mut z = Complex::new(lit::<T>(re), lit::<T>(im)) * std * scale;
                    if p == 0 || 2 * p == n as i64 {
                        z = Complex::new(z.re, T::zero());
                        spectrum[wrap_bin(p, n)] += z;
                    } else {
                        spectrum[wrap_bin(p, n)] += z;
                        spectrum[wrap_bin(-p, n)] += z.conj();
                    }
                }
            }
        }
        BandContent::Constant { i, q } => {
            // i cos(2πft) + q sin(2πft) = ½(i − jq) e^{j2πft} + ½(i + jq) e^{−j2πft}
            let half = lit::<T>(0.5);
            for &fc in &spec.carriers {
                let p = dft::as_integer(fc * duration, "carrier * duration")?;
                let pos = Complex::new(i, -q) * half * scale;
                spectrum[wrap_bin(p, n)] += pos;
                spectrum[wrap_bin(-p, n)] += pos.conj();
            }
        }
    }
    Ok(DenseSignal::from_spectrum(spectrum, grid_rate)?.with_real_flag(true))
}

/// Fourier transform `H(ω)` of the pulse of a periodic pulse stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PulseShape<T> {
    /// `h = δ`, `H ≡ 1`.
    Dirac,
    /// `h(t) = exp(−t²/2σ²)`, `H(ω) = σ√(2π) exp(−σ²ω²/2)`.
    Gaussian { sigma: T },
    /// Raised-cosine spectrum with symbol period `symbol_period` and roll-off in `[0, 1]`.
    RaisedCosine { symbol_period: T, rolloff: T },
    /// Explicit values `H(2πk/τ)` for `k = first_index, first_index + 1, …`; zero elsewhere.
    Tabulated { first_index: i64, values: Vec<Complex<T>> },
}

impl<T: Real> PulseShape<T> {
    /// `H(ω)` at `ω = 2πk/τ`.
    pub fn at_index(&self, k: i64, period: T) -> Complex<T> {
        let omega = lit::<T>(2.0) * T::PI() * from_i64::<T>(k) / period;
        match self {
            PulseShape::Dirac => Complex::new(T::one(), T::zero()),
            PulseShape::Gaussian { sigma } => {
                let s = *sigma;
                let v = s * (lit::<T>(2.0) * T::PI()).sqrt() * (-(s * s * omega * omega) / lit(2.0)).exp();
                Complex::new(v, T::zero())
            }
            PulseShape::RaisedCosine { symbol_period, rolloff } => {
                let ts = *symbol_period;
                let beta = *rolloff;
                let f = (omega / (lit::<T>(2.0) * T::PI())).abs();
                let flat = (T::one() - beta) / (lit::<T>(2.0) * ts);
                let edge = (T::one() + beta) / (lit::<T>(2.0) * ts);
                let v = if f <= flat {
                    ts
                } else if f <= edge {
                    ts * lit(0.5) * (T::one() + (T::PI() * ts / beta * (f - flat)).cos())
                } else {
                    T::zero()
                };
                Complex::new(v, T::zero())
            }
            PulseShape::Tabulated { first_index, values } => {
                let off = k - first_index;
                if off >= 0 && (off as usize) < values.len() {
                    values[off as usize]
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            }
        }
    }

    fn is_real_even(&self) -> bool {
        !matches!(self, PulseShape::Tabulated { .. })
    }
}

/// τ-periodic stream of `L` pulses `Σ_ℓ a_ℓ h(t − t_ℓ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriSpec<T> {
    pub period: T,
    pub delays: Vec<T>,
    pub amplitudes: Vec<Complex<T>>,
    pub pulse: PulseShape<T>,
}

impl<T: Real> FriSpec<T> {
    pub fn pulse_count(&self) -> usize {
        self.delays.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period > T::zero()) {
            return Err(Error::invalid("period", "must be positive"));
        }
        if self.delays.is_empty() {
            return Err(Error::Empty("pulse delays"));
        }
        if self.delays.len() != self.amplitudes.len() {
            return Err(Error::invalid("amplitudes", "one amplitude per delay"));
        }
        if self.delays.iter().any(|&t| t < T::zero() || t >= self.period) {
            return Err(Error::invalid("delays", "must lie in [0, period)"));
        }
        if self.delays.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("delays", "must be strictly increasing"));
        }
        if self.amplitudes.iter().any(|a| a.norm() == T::zero()) {
            return Err(Error::invalid("amplitudes", "all amplitudes must be nonzero"));
        }
        Ok(())
    }

    /// Fourier-series coefficient `X[k] = (1/τ) H(2πk/τ) Σ_ℓ a_ℓ e^{−j2πk t_ℓ/τ}`.
    pub fn fourier_coefficient(&self, k: i64) -> Complex<T> {
        let tau = self.period;
        let two_pi = lit::<T>(2.0) * T::PI();
        let sum = self
            .delays
            .iter()
            .zip(&self.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&t, &a)| {
                acc + a * cis(-two_pi * from_i64::<T>(k) * t / tau)
            });
        self.pulse.at_index(k, tau) * sum / tau
    }
}

/// Synthesises `periods` periods of the pulse stream from its Fourier series,
/// truncated to `|k| ≤ floor(P/2)` with `P = grid_rate · τ` points per period.
///
/// The truncation is exact for pulses band-limited below `grid_rate / 2`.
/// Otherwise the omitted tail has energy `τ Σ_{|k|>P/2} |X[k]|²`, which for a
/// Dirac stream grows with the grid: the grid signal is then the periodic
/// Dirichlet-kernel approximation of the stream.
pub fn gen_fri_periodic<T: Real>(spec: &FriSpec<T>, grid_rate: T, periods: usize) -> Result<DenseSignal<T>> {
    spec.validate()?;
    if periods == 0 {
        return Err(Error::invalid("periods", "must be positive"));
    }
    let p = as_count(grid_rate * spec.period, "grid_rate * period")?;
    if p == 0 {
        return Err(Error::invalid("grid_rate", "grid has no sample per period"));
    }
    let kmax = (p / 2) as i64;
    let mut buf = vec![Complex::new(T::zero(), T::zero()); p];
    let scale = from_usize::<T>(p);
    for k in -kmax..=kmax {
        let h = spec.pulse.at_index(k, spec.period);
        if !h.re.is_finite() || !h.im.is_finite() {
            return Err(Error::NonFinitePulse(k));
        }
        buf[wrap_bin(k, p)] += spec.fourier_coefficient(k) * scale;
    }
    T::ifft(&mut buf);
    let mut samples = Vec::with_capacity(p * periods);
    for _ in 0..periods {
        samples.extend_from_slice(&buf);
    }
    let real = spec.pulse.is_real_even() && spec.amplitudes.iter().all(|a| a.im == T::zero());
    Ok(DenseSignal::new(samples, grid_rate)?.with_real_flag(real))
}

/// Sparse harmonic signal `f(t) = Σ_k a_k e^{j2πkt}` on `t ∈ [0, 1)` with
/// tones on the grid `k ∈ [−(W/2 − 1), W/2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSpec<T> {
    pub tone_grid_size: usize,
    pub indices: Vec<i64>,
    pub coefficients: Vec<Complex<T>>,
}

impl<T: Real> HarmonicSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let w = self.tone_grid_size as i64;
        if w < 2 {
            return Err(Error::invalid("tone_grid_size", "must be at least 2"));
        }
        if self.indices.is_empty() {
            return Err(Error::Empty("harmonic coefficients"));
        }
        if self.indices.len() != self.coefficients.len() {
            return Err(Error::invalid("coefficients", "one coefficient per index"));
        }
        if self.indices.len() > self.tone_grid_size {
            return Err(Error::invalid("indices", "more tones than grid slots"));
        }
        let lo = -(w / 2 - 1);
        let hi = w / 2;
        for (n, &k) in self.indices.iter().enumerate() {
            if k < lo || k > hi {
                return Err(Error::invalid("indices", format!("tone {k} outside [{lo}, {hi}]")));
            }
            if self.indices[..n].contains(&k) {
                return Err(Error::invalid("indices", format!("tone {k} repeated")));
            }
        }
        if self.coefficients.iter().any(|a| a.norm() == T::zero()) {
            return Err(Error::invalid("coefficients", "must be nonzero"));
        }
        Ok(())
    }

    /// Length-W coefficient vector with `a_k` at DFT position `k mod W`.
    pub fn coefficient_vector(&self) -> Vec<Complex<T>> {
        let w = self.tone_grid_size;
        let mut z = vec![Complex::new(T::zero(), T::zero()); w];
        for (&k, &a) in self.indices.iter().zip(&self.coefficients) {
            z[wrap_bin(k, w)] += a;
        }
        z
    }

    pub fn evaluate(&self, t: T) -> Complex<T> {
        let two_pi = lit::<T>(2.0) * T::PI();
        self.indices
            .iter()
            .zip(&self.coefficients)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&k, &a)| acc + a * cis(two_pi * from_i64::<T>(k) * t))
    }
}

/// `count` points of `[lo, hi]` with pairwise gaps of at least `min_gap`,
/// drawn uniformly by rejection and returned ascending.
pub fn draw_separated<T: Real, R: Rng + ?Sized>(count: usize, lo: T, hi: T, min_gap: T, rng: &mut R) -> Result<Vec<T>> {
    if !(hi >= lo) {
        return Err(Error::invalid("range", "need lo <= hi"));
    }
    let span = hi - lo;
    let mut out: Vec<T> = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::invalid("count", "cannot place that many separated points"));
        }
        let u: f64 = rng.random();
        let v = lo + span * lit::<T>(u);
        if out.iter().all(|&w| (w - v).abs() >= min_gap) {
            out.push(v);
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Random real multiband spec: `band_count / 2` carriers in
/// `[B/2, carrier_limit − B/2]`, at least `B` apart.
pub fn random_multiband<T: Real, R: Rng + ?Sized>(
    band_count: usize,
    band_width: T,
    f_max: T,
    carrier_limit: T,
    content: BandContent<T>,
    rng: &mut R,
) -> Result<MultibandSpec<T>> {
    let half = band_width / lit(2.0);
    let gap = band_width * (T::one() + lit(1e-9));
    let carriers = draw_separated(band_count / 2, half, carrier_limit.min(f_max) - half, gap, rng)?;
    let spec = MultibandSpec {
        band_count,
        band_width,
        carriers,
        f_max,
        content,
    };
    spec.validate()?;
    Ok(spec)
}

/// Random pulse stream with `count` delays in `[0, τ)` at least `min_gap`
/// apart (circularly) and amplitudes of modulus in `[0.5, 1.5]` with random
/// sign, real when `real` is set and with random phase otherwise.
pub fn random_fri<T: Real, R: Rng + ?Sized>(count: usize, period: T, min_gap: T, real: bool, pulse: PulseShape<T>, rng: &mut R) -> Result<FriSpec<T>> {
    let delays = loop {
        let d = draw_separated(count, T::zero(), period * lit(1.0 - 1e-12), min_gap, rng)?;
        // circular gap between the last and the first delay
        if count < 2 || d[0] + period - d[count - 1] >= min_gap {
            break d;
        }
    };
    let amplitudes = (0..count)
        .map(|_| {
            let m: f64 = 0.5 + rng.random::<f64>();
            if real {
                let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                Complex::new(lit::<T>(m * s), T::zero())
            } else {
                let ph: f64 = rng.random::<f64>() * std::f64::consts::TAU;
                Complex::new(lit::<T>(m * ph.cos()), lit::<T>(m * ph.sin()))
            }
        })
        .collect();
    let spec = FriSpec {
        period,
        delays,
        amplitudes,
        pulse,
    };
    spec.validate()?;
    Ok(spec)
}

/// `count` distinct tones uniformly placed on the W-grid with unit-modulus
/// random-phase coefficients.
pub fn random_harmonic<T: Real, R: Rng + ?Sized>(w: usize, count: usize, rng: &mut R) -> Result<HarmonicSpec<T>> {
    let lo = -((w / 2) as i64 - 1);
    let slots = ((w / 2) as i64 - lo + 1).max(0) as usize;
    if count > slots {
        return Err(Error::invalid("count", "more tones than grid slots"));
    }
    let mut indices: Vec<i64> = Vec::with_capacity(count);
    while indices.len() < count {
        let k = lo + rng.random_range(0..slots) as i64;
        if !indices.contains(&k) {
            indices.push(k);
        }
    }
    let two_pi = lit::<T>(2.0) * T::PI();
    let spec = HarmonicSpec {
        tone_grid_size: w,
        indices,
        coefficients: (0..count).map(|_| cis(two_pi * lit::<T>(rng.random::<f64>()))).collect(),
    };
    spec.validate()?;
    Ok(spec)
}

/// Maps a DFT position in `0..W` back to the tone index in `[−(W/2 − 1), W/2]`.
pub fn tone_index(position: usize, w: usize) -> i64 {
    let k = position as i64;
    if k > (w / 2) as i64 {
        k - w as i64
    } else {
        k
    }
}

/// `f(n/W)` for `n = 0..W` on the unit interval.
pub fn gen_harmonic<T: Real>(spec: &HarmonicSpec<T>) -> Result<DenseSignal<T>> {
    spec.validate()?;
    let w = spec.tone_grid_size;
    let scale = from_usize::<T>(w);
    let buf: Vec<Complex<T>> = spec.coefficient_vector().into_iter().map(|a| a * scale).collect();
    DenseSignal::from_spectrum(buf, scale)
}

/// Periodic sinc kernel: `Σ_m sinc(u − mN)` in closed form.
fn periodic_sinc<T: Real>(u: T, n: usize) -> T {
    let nn = from_usize::<T>(n);
    let u = u - nn * (u / nn).round();
    let m = u.round();
    let delta = u - m;
    if delta == T::zero() {
        return if m == T::zero() { T::one() } else { T::zero() };
    }
    // sin(πu) = (−1)^m sin(πδ), computed from the fractional part for accuracy
    let parity = if m.to_i64().unwrap_or(0) % 2 == 0 { T::one() } else { -T::one() };
    let num = parity * (T::PI() * delta).sin();
    let arg = T::PI() * u / nn;
    if n % 2 == 1 {
        num / (nn * arg.sin())
    } else {
        num * arg.cos() / (nn * arg.sin())
    }
}

/// Shannon interpolation `Σ_n s[n] sinc(rate·t − n)` with the sample list
/// extended periodically, evaluated in closed form.
pub fn shannon_interpolate<T: Real>(samples: &[Complex<T>], rate: T, query_times: &[T]) -> Result<Vec<Complex<T>>> {
    if samples.is_empty() {
        return Err(Error::Empty("interpolation samples"));
    }
    if !(rate > T::zero()) {
        return Err(Error::invalid("rate", "must be positive"));
    }
    let n = samples.len();
    Ok(query_times
        .iter()
        .map(|&t| {
            let x = rate * t;
            samples.iter().enumerate().fold(Complex::new(T::zero(), T::zero()), |acc, (i, &s)| {
                acc + s * periodic_sinc(x - from_usize::<T>(i), n)
            })
        })
        .collect())
}

/// `‖a − b‖² / ‖a‖²`, zero when both vanish.
pub fn nmse_vec<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    let num = a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + (x - y).norm_sqr());
    let den = dft::energy(a);
    if den == T::zero() {
        if num == T::zero() {
            T::zero()
        } else {
            T::infinity()
        }
    } else {
        num / den
    }
}

pub fn nmse<T: Real>(a: &DenseSignal<T>, b: &DenseSignal<T>) -> Result<T> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch);
    }
    Ok(nmse_vec(a.samples(), b.samples()))
}
