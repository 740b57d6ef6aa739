//! Sub-Nyquist sampling and reconstruction on a dense periodic simulation grid.
//!
//! Every "analog" signal is a [`DenseSignal`] whose duration is one period, so
//! ideal filters are exact DFT masks. Front-ends live in [`sampling`], the
//! greedy sparse solvers in [`sparse`], multiband recovery (CTF, PNS) in
//! [`spectral`] and pulse-stream recovery in [`fri`].
//!
//! Numerical code is generic over [`Real`] (`f32`, `f64`); the rate
//! calculators in [`bounds`] also accept exact rationals. The `*64` aliases
//! below fix the scalar to `f64`.

// `!(a > b)` is deliberate: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod dft;
pub mod error;
pub mod fri;
pub mod linalg;
pub mod sampling;
pub mod scalar;
pub mod seed;
pub mod signal;
pub mod sparse;
pub mod spectral;

pub use error::{Error, FriStage, Result};
pub use num_complex::Complex;
pub use scalar::{CMatrix, Real};
pub use signal::{
    gen_fri_periodic, gen_harmonic, gen_multiband, nmse, shannon_interpolate, BandContent, DenseSignal, FriSpec,
    HarmonicSpec, MultibandSpec, PulseShape,
};
pub use sparse::{SparseSolution, SupportSet};

pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;
pub type CMatrix64 = CMatrix<f64>;
pub type Signal64 = DenseSignal<f64>;
pub type Signal32 = DenseSignal<f32>;
pub type MultibandSpec64 = MultibandSpec<f64>;
pub type FriSpec64 = FriSpec<f64>;
pub type HarmonicSpec64 = HarmonicSpec<f64>;
pub type MwcConfig64 = sampling::MwcConfig<f64>;
pub type PnsConfig64 = sampling::PnsConfig<f64>;
pub type SliceRecovery64 = spectral::SliceRecovery<f64>;
pub type SparseSolution64 = SparseSolution<f64>;
pub type FourierCoeffs64 = fri::FourierCoeffs<f64>;
pub type SosKernel64 = fri::SosKernel<f64>;
