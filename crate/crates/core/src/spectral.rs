//! Support detection and reconstruction of multiband inputs: CTF over MWC
//! samples, slice recovery and resynthesis, second-order bandpass PNS.

use std::io::Write;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dft::{as_count, signed_bin, wrap_bin};
use crate::error::{Error, Result};
use crate::linalg::{adjoint, pivoted_cholesky};
use crate::scalar::{cis, from_i64, from_usize, lit, CMatrix, Real};
use crate::signal::DenseSignal;
use crate::sparse::{omp_mmv, solve_on_support, SupportSet};

/// Factor `V` with `V Vᴴ = Q` handed to the joint-sparse solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameRoot {
    /// Eigenvectors scaled by `√λ`, small eigenvalues dropped.
    #[default]
    Eigen,
    /// Diagonally pivoted Cholesky factor.
    PivotedCholesky,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CtfOptions<T> {
    pub sparsity_bound: usize,
    /// Eigenvalues below `eig_tol · λ_max` are treated as noise.
    pub eig_tol: T,
    /// Relative residual at which the joint OMP stops early.
    pub residual_tol: T,
    /// Add the conjugate slice `−l` for every detected `l` (real inputs).
    pub symmetrize: bool,
    pub frame: FrameRoot,
}

impl<T: Real> CtfOptions<T> {
    pub fn new(sparsity_bound: usize) -> Self {
        Self {
            sparsity_bound,
            eig_tol: lit(1e-12),
            residual_tol: lit(1e-9),
            symmetrize: true,
            frame: FrameRoot::Eigen,
        }
    }
}

/// Frame `V` of the measurement span, `V Vᴴ = Σ_n y[n] y[n]ᴴ`.
pub fn ctf_frame<T: Real>(y: &CMatrix<T>, eig_tol: T, frame: FrameRoot) -> CMatrix<T> {
    let q = y * adjoint(y);
    match frame {
        FrameRoot::Eigen => {
            let eig = T::hermitian_eigen(&q);
            let top = eig.eigenvalues.iter().fold(T::zero(), |a, &b| a.max(b));
            if top <= T::zero() {
                return CMatrix::zeros(q.nrows(), 0);
            }
            let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i] > eig_tol * top).collect();
            CMatrix::from_fn(q.nrows(), keep.len(), |r, c| {
                let i = keep[c];
                eig.eigenvectors[(r, i)] * eig.eigenvalues[i].sqrt()
            })
        }
        FrameRoot::PivotedCholesky => pivoted_cholesky(&q, eig_tol),
    }
}

/// Continuous-to-finite support detection on an `m × T` block of MWC samples.
/// Support indices are columns of `C`, i.e. slice `l = j − L`.
pub fn ctf<T: Real>(y: &CMatrix<T>, c: &CMatrix<T>, opts: &CtfOptions<T>) -> Result<SupportSet> {
    if y.nrows() == 0 || y.ncols() == 0 {
        return Err(Error::Empty("measurement block"));
    }
    if opts.sparsity_bound > c.nrows() {
        return Err(Error::invalid("sparsity_bound", "cannot exceed the number of channels"));
    }
    let v = ctf_frame(y, opts.eig_tol, opts.frame);
    let support = omp_mmv(&v, c, opts.sparsity_bound, opts.residual_tol)?;
    if !opts.symmetrize {
        return Ok(support);
    }
    let width = c.ncols();
    if width.is_multiple_of(2) {
        return Err(Error::invalid("matrix", "symmetrisation needs an odd number of slices"));
    }
    Ok(support.indices().iter().flat_map(|&j| [j, width - 1 - j]).collect())
}

/// Recovered slice sequences `z_l[n]` for `l ∈ S`; slices outside `S` are zero.
#[derive(Debug, Clone)]
pub struct SliceRecovery<T: Real> {
    pub support: SupportSet,
    /// `L` of the `2L + 1` slice grid the support indexes.
    pub half_width: usize,
    /// `|S| × T`, row `r` holding the slice of `support.indices()[r]`.
    pub sequences: CMatrix<T>,
}

impl<T: Real> SliceRecovery<T> {
    pub fn samples_per_slice(&self) -> usize {
        self.sequences.ncols()
    }

    /// Signed slice indices `l` in support order.
    pub fn slice_indices(&self) -> Vec<i64> {
        self.support
            .indices()
            .iter()
            .map(|&j| j as i64 - self.half_width as i64)
            .collect()
    }

    /// One line per slice: `l` followed by `re,im` pairs.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for (r, l) in self.slice_indices().into_iter().enumerate() {
            write!(w, "{l}")?;
            for z in self.sequences.row(r).iter() {
                write!(w, ",{:.16e},{:.16e}", z.re, z.im)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// `z_S[n] = C_S⁺ y[n]` for every `n`.
pub fn recover_slices<T: Real>(y: &CMatrix<T>, c: &CMatrix<T>, support: &SupportSet) -> Result<SliceRecovery<T>> {
    if c.ncols().is_multiple_of(2) {
        return Err(Error::invalid("matrix", "expected 2L + 1 slice columns"));
    }
    Ok(SliceRecovery {
        support: support.clone(),
        half_width: c.ncols() / 2,
        sequences: solve_on_support(y, c, support)?,
    })
}

/// Places every recovered slice back at its spectral position and returns
/// the dense-grid signal. Slice `l` baseband bin `b` lands on grid bin
/// `b − lT`, scaled back by `N_g / T`.
pub fn mwc_resynthesize<T: Real>(rec: &SliceRecovery<T>, f_p: T, grid_rate: T, duration: T) -> Result<DenseSignal<T>> {
    let ng = as_count(grid_rate * duration, "grid_rate * duration")?;
    if ng == 0 {
        return Err(Error::invalid("duration", "empty grid"));
    }
    let t = rec.samples_per_slice();
    if !rec.support.is_empty() {
        let expect = as_count(f_p * duration, "f_p * duration")?;
        if expect != t {
            return Err(Error::invalid("duration", "slice length differs from f_p · duration"));
        }
        if ng % t != 0 {
            return Err(Error::invalid("grid_rate", "grid length is not a multiple of the slice length"));
        }
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut spectrum = vec![zero; ng];
    let scale = from_usize::<T>(ng) / from_usize::<T>(t.max(1));
    for (r, l) in rec.slice_indices().into_iter().enumerate() {
        let mut z: Vec<Complex<T>> = rec.sequences.row(r).iter().copied().collect();
        T::fft(&mut z);
        for (k, v) in z.into_iter().enumerate() {
            let b = signed_bin(k, t);
            spectrum[wrap_bin(b - l * t as i64, ng)] += v * scale;
        }
    }
    DenseSignal::from_spectrum(spectrum, grid_rate)
}

fn check_band<T: Real>(band: (T, T)) -> Result<T> {
    let (f_l, f_u) = band;
    if !(f_l > T::zero()) || !(f_u > f_l) {
        return Err(Error::invalid("band", "need 0 < f_l < f_u"));
    }
    Ok(f_u - f_l)
}

/// Alias index folding the negative band onto `f`: the integer `l` with
/// `f − lB ∈ (−f_u, −f_l)`; extended antisymmetrically to `f < 0`.
pub fn pns_beta<T: Real>(f: T, band: (T, T), b: T) -> Result<i64> {
    let width = check_band(band)?;
    if !(b > T::zero()) || (b - width).abs() > lit::<T>(1e-9) * width {
        return Err(Error::invalid("band_width", "B must equal f_u − f_l"));
    }
    let (f_l, f_u) = band;
    let freq = f.abs();
    let no_index = || Error::NoAliasIndex {
        frequency: f.to_f64().unwrap_or(f64::NAN),
    };
    if !(freq > f_l && freq < f_u) {
        return Err(no_index());
    }
    let bound = (lit::<T>(2.0) * f_u / b).ceil().to_i64().unwrap_or(0) + 1;
    let l = (-bound..=bound)
        .find(|&l| {
            let folded = freq - from_i64::<T>(l) * b;
            folded > -f_u && folded < -f_l
        })
        .ok_or_else(no_index)?;
    Ok(if f < T::zero() { -l } else { l })
}

/// Every alias index arising inside the band: integers in `(2f_l/B, 2f_u/B)`.
pub fn pns_betas<T: Real>(band: (T, T)) -> Result<Vec<i64>> {
    let b = check_band(band)?;
    let lo = lit::<T>(2.0) * band.0 / b;
    let hi = lit::<T>(2.0) * band.1 / b;
    let first = lo.floor().to_i64().unwrap_or(0) + 1;
    Ok((first..).take_while(|&l| from_i64::<T>(l) < hi).collect())
}

/// `|1 − e^{−j2πβφB}|`, the conditioning of the two-channel system at `β`.
pub fn pns_margin<T: Real>(beta: i64, phase: T, b: T) -> T {
    let theta = lit::<T>(2.0) * T::PI() * from_i64::<T>(beta) * phase * b;
    (Complex::new(T::one(), T::zero()) - cis(-theta)).norm()
}

const PNS_MARGIN_TOL: f64 = 1e-6;

/// Second-order bandpass PNS reconstruction.
///
/// `y1[n] = x(n/B)` and `y2[n] = x(n/B + φ)` over one period of `N_s`
/// samples. Per DFT residue `r` mod `N_s` the open band holds at most one
/// positive bin `p` and one negative bin `q = p − βN_s`; the 2×2 system
/// `Y1 = a + b`, `Y2 = a w_p + b w_q` (`w = e^{j2π·bin·φ/D}`) is solved with
/// `b = G1 (Y1 − Y2/w_p)`, `G1 = 1/(1 − e^{−j2πβφB})`, `a = Y1 − b`.
/// The result is rendered on a grid of `output_rate` (at least `2 f_u`).
pub fn pns_reconstruct<T: Real>(
    y1: &[Complex<T>],
    y2: &[Complex<T>],
    band: (T, T),
    phase: T,
    output_rate: T,
) -> Result<DenseSignal<T>> {
    let b = check_band(band)?;
    let (f_l, f_u) = band;
    if y1.is_empty() {
        return Err(Error::Empty("PNS samples"));
    }
    if y1.len() != y2.len() {
        return Err(Error::invalid("y2", "channels must have equal length"));
    }
    if output_rate < lit::<T>(2.0) * f_u * (T::one() - lit(1e-12)) {
        return Err(Error::invalid("output_rate", "must be at least 2 f_u"));
    }
    for beta in pns_betas(band)? {
        if pns_margin(beta, phase, b) < lit(PNS_MARGIN_TOL) {
            return Err(Error::PnsPhaseDegenerate { beta });
        }
    }
    let ns = y1.len();
    let nsf = from_usize::<T>(ns);
    let duration = nsf / b;
    let nout = as_count(output_rate * duration, "output_rate * duration")?;

    let mut s1 = y1.to_vec();
    let mut s2 = y2.to_vec();
    T::fft(&mut s1);
    T::fft(&mut s2);

    let two_pi = lit::<T>(2.0) * T::PI();
    let w = |bin: i64| cis(two_pi * from_i64::<T>(bin) * phase / duration);
    // open-band bins: f_l D < p < f_u D
    let lo = (f_l * duration).floor().to_i64().unwrap_or(0) + 1;
    let hi = (f_u * duration).ceil().to_i64().unwrap_or(0) - 1;
    let inside = |p: i64| {
        let f = from_i64::<T>(p) / duration;
        f > f_l && f < f_u
    };
    let zero = Complex::new(T::zero(), T::zero());
    let mut pos = vec![None; ns];
    let mut neg = vec![None; ns];
    for p in lo..=hi {
        if inside(p) {
            pos[wrap_bin(p, ns)] = Some(p);
            neg[wrap_bin(-p, ns)] = Some(-p);
        }
    }
    let out_scale = from_usize::<T>(nout) / nsf;
    let mut spectrum = vec![zero; nout];
    for r in 0..ns {
        match (pos[r], neg[r]) {
            (Some(p), Some(q)) => {
                let beta = (p - q) / ns as i64;
                let g1 = Complex::new(T::one(), T::zero()) / (Complex::new(T::one(), T::zero()) - cis(-two_pi * from_i64::<T>(beta) * phase * b));
                let bq = g1 * (s1[r] - s2[r] / w(p));
                let ap = s1[r] - bq;
                spectrum[wrap_bin(p, nout)] += ap * out_scale;
                spectrum[wrap_bin(q, nout)] += bq * out_scale;
            }
            (Some(p), None) => spectrum[wrap_bin(p, nout)] += s1[r] * out_scale,
            (None, Some(q)) => spectrum[wrap_bin(q, nout)] += s1[r] * out_scale,
            (None, None) => {}
        }
    }
    DenseSignal::from_spectrum(spectrum, output_rate)
}

/// Grid search over `φ_j = j T_s / (candidates + 1)`, `j = 1..=candidates`,
/// maximising the smallest margin `|1 − e^{−j2πβφB}|` over the band's alias
/// indices. Ties go to the smallest phase.
pub fn select_pns_phase<T: Real>(band: (T, T), candidates: usize) -> Result<T> {
    let b = check_band(band)?;
    if candidates == 0 {
        return Err(Error::invalid("candidates", "need at least one candidate"));
    }
    let betas = pns_betas(band)?;
    let ts = T::one() / b;
    let mut best: Option<(T, T)> = None;
    for j in 1..=candidates {
        let phi = ts * from_usize::<T>(j) / from_usize::<T>(candidates + 1);
        let margin = betas.iter().map(|&beta| pns_margin(beta, phi, b)).fold(T::infinity(), T::min);
        if best.is_none_or(|(_, m)| margin > m * (T::one() + lit(1e-12))) {
            best = Some((phi, margin));
        }
    }
    match best {
        Some((phi, m)) if m >= lit(PNS_MARGIN_TOL) => Ok(phi),
        _ => Err(Error::NoValidPhase),
    }
}
