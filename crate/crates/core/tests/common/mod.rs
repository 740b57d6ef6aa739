#![allow(dead_code)]

use subnyq::sampling::MwcConfig;
use subnyq::signal::random_multiband;
use subnyq::{seed, BandContent, MultibandSpec, C64};

/// Small MWC system: `f_p = 1`, `M = 2L + 1` chips, grid at `density` times
/// the Nyquist rate `M f_p`, `t` samples per channel.
pub struct SmallMwc {
    pub cfg: MwcConfig<f64>,
    pub grid_rate: f64,
    pub duration: f64,
    pub t: usize,
}

impl SmallMwc {
    pub fn new(channels: usize, chips: usize, t: usize, density: usize, pattern_seed: u64) -> Self {
        let cfg = MwcConfig::random(channels, chips, 1.0, pattern_seed).unwrap();
        Self {
            cfg,
            grid_rate: (density * chips) as f64,
            duration: t as f64,
            t,
        }
    }

    pub fn half_width(&self) -> usize {
        self.cfg.half_width()
    }

    /// Real multiband input with `bands` bands of width `0.6 f_p` inside the covered band.
    pub fn input_spec(&self, bands: usize, seed_: u64) -> MultibandSpec<f64> {
        let mut rng = seed::rng(seed_);
        let limit = self.cfg.covered_band();
        random_multiband(bands, 0.6, limit, limit, BandContent::Gaussian { amplitude: 1.0 }, &mut rng).unwrap()
    }
}

pub fn max_abs(v: impl IntoIterator<Item = C64>) -> f64 {
    v.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn rel_err(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    (num / den).sqrt()
}

use rand::Rng;
use rand_distr::StandardNormal;
use subnyq::scalar::Real;
use subnyq::CMatrix;

pub fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<f64> {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// `n × 2n` union of a random orthonormal basis and its DFT rotation, with
/// shuffled columns and random column phases. Coherence is exactly `1/√n`.
pub fn rotated_two_ortho<R: Rng>(n: usize, rng: &mut R) -> CMatrix<f64> {
    let (q, _) = f64::qr(&gaussian_matrix(n, n, rng));
    let f = CMatrix::from_fn(n, n, |r, c| {
        subnyq::scalar::cis(-2.0 * std::f64::consts::PI * (r * c) as f64 / n as f64) / (n as f64).sqrt()
    });
    let qf = &q * f;
    let mut order: Vec<usize> = (0..2 * n).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let phases: Vec<C64> = (0..2 * n)
        .map(|_| subnyq::scalar::cis(rng.random::<f64>() * std::f64::consts::TAU))
        .collect();
    CMatrix::from_fn(n, 2 * n, |r, c| {
        let src = order[c];
        let v = if src < n { q[(r, src)] } else { qf[(r, src - n)] };
        v * phases[c]
    })
}

/// Distinct random indices below `n`, ascending.
pub fn random_support<R: Rng>(k: usize, n: usize, rng: &mut R) -> Vec<usize> {
    let mut s: Vec<usize> = Vec::new();
    while s.len() < k {
        let j = rng.random_range(0..n);
        if !s.contains(&j) {
            s.push(j);
        }
    }
    s.sort_unstable();
    s
}

/// Nonzero coefficients of modulus in `[0.5, 1.5]`.
pub fn random_coeffs<R: Rng>(k: usize, rng: &mut R) -> Vec<C64> {
    (0..k)
        .map(|_| subnyq::scalar::cis(rng.random::<f64>() * std::f64::consts::TAU) * (0.5 + rng.random::<f64>()))
        .collect()
}

pub fn columns(c: &CMatrix<f64>) -> Vec<Vec<C64>> {
    (0..c.ncols()).map(|j| c.column(j).iter().copied().collect()).collect()
}

pub fn synthesize(c: &CMatrix<f64>, support: &[usize], coeffs: &[C64]) -> Vec<C64> {
    (0..c.nrows())
        .map(|r| support.iter().zip(coeffs).map(|(&j, a)| c[(r, j)] * a).sum())
        .collect()
}

pub fn proptest_config(cases: u32, seed: u64) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Default::default()
    }
}
