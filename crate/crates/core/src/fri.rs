//! Periodic finite-rate-of-innovation recovery: sampling kernels, Fourier
//! coefficients from uniform samples, annihilating filter, delays, amplitudes.
//!
//! Sampling model: `c[n] = ∫ x(t) s*(t − nT) dt` with `T = τ/M`, which for a
//! τ-periodic input gives `c[n] = Σ_k X[k] S*(2πk/τ) e^{j2πkn/M}`.
//! Spectra use `S(ω) = ∫ s(t) e^{−jωt} dt`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dft::{as_count, wrap_bin};
use crate::linalg::adjoint;
use crate::error::{Error, FriStage, Result};
use crate::scalar::{cis, from_i64, from_usize, lit, sinc, CMatrix, Real};
use crate::signal::{DenseSignal, FriSpec, PulseShape};

/// Threshold below which a spectral sample counts as zero.
pub const SPECTRAL_ZERO: f64 = 1e-12;
/// Relative singular-value threshold for the annihilating system's rank.
pub const ANNIHILATOR_RANK_TOL: f64 = 1e-9;
/// Smallest admissible leading filter coefficient before normalisation.
pub const LEADING_COEFF_TOL: f64 = 1e-10;
/// Roots closer than this are declared repeated.
pub const ROOT_SEPARATION_TOL: f64 = 1e-9;
/// Singular-value ratio below which the Vandermonde system is rank deficient.
pub const VANDERMONDE_RCOND: f64 = 1e-12;

/// Contiguous index set `K = first..first + count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRange {
    pub first: i64,
    pub count: usize,
}

impl IndexRange {
    pub fn new(first: i64, count: usize) -> Self {
        Self { first, count }
    }

    /// `−p..=p`.
    pub fn symmetric(p: usize) -> Self {
        Self {
            first: -(p as i64),
            count: 2 * p + 1,
        }
    }

    pub fn last(&self) -> i64 {
        self.first + self.count as i64 - 1
    }

    pub fn contains(&self, k: i64) -> bool {
        k >= self.first && k <= self.last()
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.first..=self.last()
    }
}

/// Sum-of-sincs kernel `g(t) = rect(t/τ) Σ_{k∈K} b_k e^{j2πkt/τ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SosKernel<T> {
    pub period: T,
    pub first_index: i64,
    pub weights: Vec<Complex<T>>,
}

impl<T: Real> SosKernel<T> {
    /// Unit weights on `−p..=p` (Dirichlet kernel).
    pub fn dirichlet(p: usize, period: T) -> Self {
        Self {
            period,
            first_index: -(p as i64),
            weights: vec![Complex::new(T::one(), T::zero()); 2 * p + 1],
        }
    }

    pub fn indices(&self) -> IndexRange {
        IndexRange::new(self.first_index, self.weights.len())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period > T::zero()) {
            return Err(Error::invalid("period", "must be positive"));
        }
        if self.weights.is_empty() {
            return Err(Error::Empty("SoS weights"));
        }
        if let Some(i) = self.weights.iter().position(|b| b.norm() == T::zero()) {
            return Err(Error::KernelZero {
                index: self.first_index + i as i64,
                magnitude: 0.0,
            });
        }
        Ok(())
    }

    /// True when `b_{−k} = conj(b_k)` over a symmetric index set.
    pub fn is_real(&self) -> bool {
        let k = self.indices();
        if k.first != -k.last() {
            return false;
        }
        let n = self.weights.len();
        (0..n).all(|i| (self.weights[i] - self.weights[n - 1 - i].conj()).norm() <= lit::<T>(1e-14) * self.weights[i].norm())
    }

    /// `G(ω) = τ Σ_k b_k sinc(ωτ/2π − k)`.
    pub fn spectrum(&self, omega: T) -> Complex<T> {
        let u = omega * self.period / (lit::<T>(2.0) * T::PI());
        self.indices()
            .iter()
            .zip(&self.weights)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (k, &b)| acc + b * sinc(u - from_i64::<T>(k)))
            * self.period
    }
}

/// `g(t)`; zero for `|t| > τ/2`.
pub fn sos_time_response<T: Real>(kernel: &SosKernel<T>, t: T) -> Complex<T> {
    let half = kernel.period / lit(2.0);
    if t.abs() > half {
        return Complex::new(T::zero(), T::zero());
    }
    let two_pi = lit::<T>(2.0) * T::PI();
    kernel
        .indices()
        .iter()
        .zip(&kernel.weights)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (k, &b)| acc + b * cis(two_pi * from_i64::<T>(k) * t / kernel.period))
}

/// Sampling kernel passing exactly the Fourier coefficients on `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SamplingKernel<T> {
    /// Ideal lowpass with `S(2πk/τ) = 1` on `K` and zero elsewhere.
    Lowpass { first_index: i64, count: usize },
    Sos(SosKernel<T>),
}

impl<T: Real> SamplingKernel<T> {
    pub fn lowpass(k: IndexRange) -> Self {
        SamplingKernel::Lowpass {
            first_index: k.first,
            count: k.count,
        }
    }

    pub fn indices(&self) -> IndexRange {
        match self {
            SamplingKernel::Lowpass { first_index, count } => IndexRange::new(*first_index, *count),
            SamplingKernel::Sos(s) => s.indices(),
        }
    }

    /// `S(2πk/τ)` on the lattice of a τ-periodic input.
    pub fn response(&self, k: i64, period: T) -> Complex<T> {
        match self {
            SamplingKernel::Lowpass { .. } => {
                if self.indices().contains(k) {
                    Complex::new(T::one(), T::zero())
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            }
            SamplingKernel::Sos(s) => s.spectrum(lit::<T>(2.0) * T::PI() * from_i64::<T>(k) / period),
        }
    }

    fn check_period(&self, period: T) -> Result<()> {
        if !(period > T::zero()) {
            return Err(Error::invalid("period", "must be positive"));
        }
        if let SamplingKernel::Sos(s) = self {
            s.validate()?;
            if (s.period - period).abs() > lit::<T>(1e-12) * period {
                return Err(Error::invalid("period", "SoS kernel built for a different period"));
            }
        }
        if self.indices().count == 0 {
            return Err(Error::Empty("kernel index set"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AdmissibilityIssue {
    /// `|S(2πk/τ)|` too small on `K`.
    KernelZeroInside { index: i64, magnitude: f64 },
    /// `S(2πk/τ)` nonzero off `K`.
    KernelLeak { index: i64, magnitude: f64 },
    /// `|H(2πk/τ)|` too small on `K`.
    PulseZero { index: i64, magnitude: f64 },
    /// Kernel passband differs from the requested `K`.
    IndexMismatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Admissibility {
    pub issues: Vec<AdmissibilityIssue>,
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks `S ≠ 0` on `K`, `S = 0` on the `|K|` lattice points either side of
/// `K`, and `H ≠ 0` on `K`, each magnitude against 1e-12.
pub fn kernel_admissible<T: Real>(kernel: &SamplingKernel<T>, k: IndexRange, pulse: &PulseShape<T>, period: T) -> Admissibility {
    let mut issues = Vec::new();
    if kernel.indices() != k {
        issues.push(AdmissibilityIssue::IndexMismatch);
    }
    let tol = lit::<T>(SPECTRAL_ZERO);
    let scale = match kernel {
        SamplingKernel::Lowpass { .. } => T::one(),
        SamplingKernel::Sos(s) => s.period,
    };
    let mag = |v: Complex<T>| v.norm().to_f64().unwrap_or(f64::NAN);
    let span = k.count as i64;
    for idx in k.first - span..=k.last() + span {
        let s = kernel.response(idx, period);
        if k.contains(idx) {
            if !(s.norm() >= tol * scale) {
                issues.push(AdmissibilityIssue::KernelZeroInside { index: idx, magnitude: mag(s) });
            }
            let h = pulse.at_index(idx, period);
            if !(h.norm() >= tol) {
                issues.push(AdmissibilityIssue::PulseZero { index: idx, magnitude: mag(h) });
            }
        } else if s.norm() > tol * scale {
            issues.push(AdmissibilityIssue::KernelLeak { index: idx, magnitude: mag(s) });
        }
    }
    Admissibility { issues }
}

/// Fourier-series coefficients `X[k]` on a contiguous index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCoeffs<T> {
    pub first_index: i64,
    pub values: Vec<Complex<T>>,
    pub period: T,
}

impl<T: Real> FourierCoeffs<T> {
    pub fn indices(&self) -> IndexRange {
        IndexRange::new(self.first_index, self.values.len())
    }

    /// `X[k]`, `None` outside the stored range.
    pub fn get(&self, k: i64) -> Option<Complex<T>> {
        let off = k - self.first_index;
        (off >= 0 && (off as usize) < self.values.len()).then(|| self.values[off as usize])
    }

    /// Exact coefficients of a pulse stream on `k`.
    pub fn of_spec(spec: &FriSpec<T>, k: IndexRange) -> Self {
        Self {
            first_index: k.first,
            values: k.iter().map(|i| spec.fourier_coefficient(i)).collect(),
            period: spec.period,
        }
    }
}

/// `M = |K|` kernel samples over one period, from the Fourier series of `x`.
pub fn fri_sample<T: Real>(spec: &FriSpec<T>, kernel: &SamplingKernel<T>) -> Result<Vec<Complex<T>>> {
    spec.validate()?;
    kernel.check_period(spec.period)?;
    let k = kernel.indices();
    let m = k.count;
    let mut buf = vec![Complex::new(T::zero(), T::zero()); m];
    for i in k.iter() {
        buf[wrap_bin(i, m)] += spec.fourier_coefficient(i) * kernel.response(i, spec.period).conj() * from_usize::<T>(m);
    }
    T::ifft(&mut buf);
    Ok(buf)
}

/// Filters the first period of a dense-grid signal by the kernel (DFT
/// domain) and reads `M = |K|` uniform samples.
pub fn fri_sample_grid<T: Real>(x: &DenseSignal<T>, kernel: &SamplingKernel<T>, period: T) -> Result<Vec<Complex<T>>> {
    kernel.check_period(period)?;
    let p = as_count(x.grid_rate() * period, "grid_rate * period")?;
    if p == 0 || p > x.len() {
        return Err(Error::invalid("period", "signal shorter than one period"));
    }
    let k = kernel.indices();
    let m = k.count;
    if p % m != 0 {
        return Err(Error::invalid("grid_rate", "points per period must be a multiple of |K|"));
    }
    if k.first.abs().max(k.last().abs()) as usize * 2 >= p {
        return Err(Error::invalid("grid_rate", "grid does not resolve the kernel passband"));
    }
    let mut spec: Vec<Complex<T>> = x.samples()[..p].to_vec();
    T::fft(&mut spec);
    let mut filtered = vec![Complex::new(T::zero(), T::zero()); p];
    for i in k.iter() {
        let pos = wrap_bin(i, p);
        filtered[pos] = spec[pos] * kernel.response(i, period).conj();
    }
    T::ifft(&mut filtered);
    Ok(filtered.into_iter().step_by(p / m).collect())
}

/// `x = S⁻¹ DFT{c}`: `X[k] = DFT{c}[k mod M] / (M S*(2πk/τ))` on `K`.
pub fn coeffs_from_samples<T: Real>(samples: &[Complex<T>], kernel: &SamplingKernel<T>, period: T) -> Result<FourierCoeffs<T>> {
    kernel.check_period(period)?;
    let k = kernel.indices();
    let m = k.count;
    if samples.len() != m {
        return Err(Error::invalid("samples", format!("need |K| = {m} samples per period")));
    }
    let mut spec = samples.to_vec();
    T::fft(&mut spec);
    let mf = from_usize::<T>(m);
    let values = k
        .iter()
        .map(|i| {
            let s = kernel.response(i, period).conj();
            if s.norm() < lit(SPECTRAL_ZERO) {
                return Err(Error::KernelZero {
                    index: i,
                    magnitude: s.norm().to_f64().unwrap_or(f64::NAN),
                });
            }
            Ok(spec[wrap_bin(i, m)] / (s * mf))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FourierCoeffs {
        first_index: k.first,
        values,
        period,
    })
}

/// Null vector of the Toeplitz system `Σ_i A[i] X[k − i] = 0`,
/// `k = K_min + L ..= K_max`, normalised to `A[0] = 1`.
pub fn annihilating_filter<T: Real>(x: &FourierCoeffs<T>, l: usize) -> Result<Vec<Complex<T>>> {
    if l == 0 {
        return Err(Error::invalid("pulse_count", "must be positive"));
    }
    let k = x.indices();
    if k.count < 2 * l + 1 {
        return Err(Error::invalid("coefficients", format!("need at least 2L + 1 = {} coefficients", 2 * l + 1)));
    }
    let rows = k.count - l;
    let a = CMatrix::from_fn(rows, l + 1, |r, c| x.values[r + l - c]);
    let svd = T::svd(&a);
    let top = svd.singular_values.first().copied().unwrap_or(T::zero());
    let detected = svd
        .singular_values
        .iter()
        .filter(|&&s| top > T::zero() && s > lit::<T>(ANNIHILATOR_RANK_TOL) * top)
        .count();
    if detected < l {
        return Err(Error::TooFewComponents { detected, expected: l });
    }
    // right singular vector of the smallest singular value
    let last = svd.v_adjoint.nrows() - 1;
    let v: Vec<Complex<T>> = svd.v_adjoint.row(last).iter().map(|z| z.conj()).collect();
    let lead = v[0];
    if lead.norm() < lit(LEADING_COEFF_TOL) {
        return Err(Error::DegenerateFilter(lead.norm().to_f64().unwrap_or(0.0)));
    }
    Ok(v.into_iter().map(|z| z / lead).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelayEstimate<T> {
    /// Ascending delays in `[0, τ)`.
    pub delays: Vec<T>,
    /// `|u|` of the root behind each delay (1 in the noiseless model).
    pub root_magnitudes: Vec<T>,
}

/// Roots `u_ℓ = e^{−j2πt_ℓ/τ}` of `A(z)` from the companion matrix, mapped to
/// `t = −τ arg(u) / 2π mod τ`.
pub fn delays_from_filter<T: Real>(a: &[Complex<T>], period: T) -> Result<DelayEstimate<T>> {
    if a.len() < 2 {
        return Err(Error::invalid("filter", "degree must be at least 1"));
    }
    if (a[0] - Complex::new(T::one(), T::zero())).norm() > lit::<T>(1e-12) {
        return Err(Error::invalid("filter", "A[0] must be 1"));
    }
    let l = a.len() - 1;
    let mut comp = CMatrix::zeros(l, l);
    for c in 0..l {
        comp[(0, c)] = -a[c + 1];
    }
    for r in 1..l {
        comp[(r, r - 1)] = Complex::new(T::one(), T::zero());
    }
    let roots = T::eigenvalues(&comp).ok_or(Error::NoConvergence)?;
    for i in 0..l {
        for j in i + 1..l {
            if (roots[i] - roots[j]).norm() < lit(ROOT_SEPARATION_TOL) {
                return Err(Error::RepeatedRoots);
            }
        }
    }
    let two_pi = lit::<T>(2.0) * T::PI();
    let mut pairs: Vec<(T, T)> = roots
        .iter()
        .map(|u| {
            let mut t = -period * u.arg() / two_pi;
            if t < T::zero() {
                t += period;
            }
            if t >= period {
                t -= period;
            }
            (t, u.norm())
        })
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(DelayEstimate {
        delays: pairs.iter().map(|p| p.0).collect(),
        root_magnitudes: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Least squares over `k ∈ K` of `τ X[k] / H(2πk/τ) = Σ_ℓ a_ℓ e^{−j2πk t_ℓ/τ}`,
/// solved through the SVD.
pub fn amplitudes_from_delays<T: Real>(x: &FourierCoeffs<T>, delays: &[T], pulse: &PulseShape<T>, period: T) -> Result<Vec<Complex<T>>> {
    if delays.is_empty() {
        return Err(Error::Empty("delays"));
    }
    let k = x.indices();
    if k.count < delays.len() {
        return Err(Error::RankDeficient {
            rank: k.count,
            needed: delays.len(),
        });
    }
    let two_pi = lit::<T>(2.0) * T::PI();
    let mut rhs = CMatrix::zeros(k.count, 1);
    for (r, i) in k.iter().enumerate() {
        let h = pulse.at_index(i, period);
        if !(h.norm() >= lit(SPECTRAL_ZERO)) {
            return Err(Error::KernelZero {
                index: i,
                magnitude: h.norm().to_f64().unwrap_or(f64::NAN),
            });
        }
        rhs[(r, 0)] = x.values[r] * period / h;
    }
    let v = CMatrix::from_fn(k.count, delays.len(), |r, c| cis(-two_pi * from_i64::<T>(k.first + r as i64) * delays[c] / period));
    let svd = T::svd(&v);
    let top = svd.singular_values[0];
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| top > T::zero() && s > lit::<T>(VANDERMONDE_RCOND) * top)
        .count();
    if rank < delays.len() {
        return Err(Error::RankDeficient {
            rank,
            needed: delays.len(),
        });
    }
    let uhb = adjoint(&svd.u) * rhs;
    let mut out = Vec::with_capacity(delays.len());
    for c in 0..delays.len() {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (i, &s) in svd.singular_values.iter().enumerate() {
            acc += svd.v_adjoint[(i, c)].conj() * uhb[(i, 0)] / s;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Full chain: coefficients, annihilating filter, delays, amplitudes.
/// Errors carry the stage that raised them.
pub fn fri_recover<T: Real>(
    samples: &[Complex<T>],
    kernel: &SamplingKernel<T>,
    l: usize,
    period: T,
    pulse: &PulseShape<T>,
) -> Result<FriSpec<T>> {
    let x = coeffs_from_samples(samples, kernel, period).map_err(|e| e.at(FriStage::Coefficients))?;
    let a = annihilating_filter(&x, l).map_err(|e| e.at(FriStage::AnnihilatingFilter))?;
    let est = delays_from_filter(&a, period).map_err(|e| e.at(FriStage::Delays))?;
    let amplitudes = amplitudes_from_delays(&x, &est.delays, pulse, period).map_err(|e| e.at(FriStage::Amplitudes))?;
    Ok(FriSpec {
        period,
        delays: est.delays,
        amplitudes,
        pulse: pulse.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dirac(delays: Vec<f64>, amps: Vec<f64>) -> FriSpec<f64> {
        FriSpec {
            period: 1.0,
            delays,
            amplitudes: amps.into_iter().map(|a| Complex::new(a, 0.0)).collect(),
            pulse: PulseShape::Dirac,
        }
    }

    #[test]
    fn single_pulse_filter() {
        let t1 = 0.3;
        let x = FourierCoeffs::of_spec(&dirac(vec![t1], vec![2.0]), IndexRange::symmetric(1));
        let a = annihilating_filter(&x, 1).unwrap();
        let expect = -cis(-2.0 * std::f64::consts::PI * t1);
        assert!((a[0] - Complex::new(1.0, 0.0)).norm() < 1e-14);
        assert!((a[1] - expect).norm() < 1e-12);
    }

    #[test]
    fn trivial_roots() {
        let one = Complex::new(1.0, 0.0);
        let d = delays_from_filter::<f64>(&[one, -one], 1.0).unwrap();
        assert!(d.delays[0].abs() < 1e-15);
        let d = delays_from_filter(&[one, -cis(-std::f64::consts::PI)], 2.0).unwrap();
        assert!((d.delays[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_coefficients_fail_at_filter_stage() {
        let kernel = SamplingKernel::lowpass(IndexRange::symmetric(2));
        let zero = vec![Complex::new(0.0, 0.0); 5];
        let err = fri_recover(&zero, &kernel, 2, 1.0, &PulseShape::Dirac).unwrap_err();
        assert_eq!(err.stage(), Some(FriStage::AnnihilatingFilter));
    }

    #[test]
    fn dirac_at_origin_gives_flat_coefficients() {
        let spec = dirac(vec![0.0], vec![1.0]);
        let kernel = SamplingKernel::lowpass(IndexRange::symmetric(3));
        let c = fri_sample(&spec, &kernel).unwrap();
        let x = coeffs_from_samples(&c, &kernel, 1.0).unwrap();
        assert!(x.values.iter().all(|v| (v - Complex::new(1.0, 0.0)).norm() < 1e-13));
    }

    #[test]
    fn sos_time_response_is_dirichlet() {
        let k = SosKernel::dirichlet(3, 2.0);
        for &t in &[0.0, 0.13, -0.77, 0.999] {
            let x: f64 = 2.0 * std::f64::consts::PI * t / 2.0;
            let d = if t == 0.0 { 7.0 } else { (3.5 * x).sin() / (0.5 * x).sin() };
            assert!((sos_time_response(&k, t) - Complex::new(d, 0.0)).norm() < 1e-12);
        }
        assert_eq!(sos_time_response(&k, 2.0).norm(), 0.0);
    }

    #[test]
    fn admissibility_flags_pulse_zero() {
        let k = IndexRange::symmetric(2);
        let lowpass = SamplingKernel::<f64>::lowpass(k);
        assert!(kernel_admissible(&lowpass, k, &PulseShape::Dirac, 1.0).is_admissible());
        let mut values = vec![Complex::new(1.0, 0.0); 5];
        values[3] = Complex::new(0.0, 0.0);
        let pulse = PulseShape::Tabulated { first_index: -2, values };
        let adm = kernel_admissible(&lowpass, k, &pulse, 1.0);
        assert_eq!(adm.issues, vec![AdmissibilityIssue::PulseZero { index: 1, magnitude: 0.0 }]);
    }
}
