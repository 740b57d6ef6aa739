//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All signal processing is written against [`Real`], which is implemented for
//! `f32` and `f64`. Dense decompositions and FFTs are dispatched through the
//! trait so that the generic code never has to name the backing libraries.

use std::cell::RefCell;
use std::fmt::{Debug, Display, LowerExp};

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftPlanner;

/// Dense complex matrix used throughout the crate.
pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Singular value decomposition `A = U diag(σ) Vᴴ`, singular values in
/// descending order.
#[derive(Debug, Clone)]
pub struct Svd<T: Real> {
    pub u: CMatrix<T>,
    pub singular_values: Vec<T>,
    pub v_adjoint: CMatrix<T>,
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: CMatrix<T>,
}

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// In-place forward DFT, kernel `e^{-j2πkn/N}`, no scaling.
    fn fft(buf: &mut [Complex<Self>]);
    /// In-place inverse DFT, kernel `e^{+j2πkn/N}`, scaled by `1/N`.
    fn ifft(buf: &mut [Complex<Self>]);
    /// Thin QR factorisation `(Q, R)` with `Q` of size m×min(m,n).
    fn qr(a: &CMatrix<Self>) -> (CMatrix<Self>, CMatrix<Self>);
    fn svd(a: &CMatrix<Self>) -> Svd<Self>;
    fn hermitian_eigen(a: &CMatrix<Self>) -> HermitianEigen<Self>;
    /// Eigenvalues of a general square complex matrix (complex Schur form).
    fn eigenvalues(a: &CMatrix<Self>) -> Option<Vec<Complex<Self>>>;
}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("usize representable in scalar type")
}

#[inline]
pub fn from_i64<T: Real>(n: i64) -> T {
    T::from_i64(n).expect("i64 representable in scalar type")
}

/// `e^{jθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Normalised sinc, `sin(πx)/(πx)`.
pub fn sinc<T: Real>(x: T) -> T {
    if x == T::zero() {
        T::one()
    } else {
        let px = T::PI() * x;
        px.sin() / px
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn fft(buf: &mut [Complex<$t>]) {
                thread_local! {
                    static PLANNER: RefCell<FftPlanner<$t>> = RefCell::new(FftPlanner::new());
                }
                if buf.len() <= 1 {
                    return;
                }
                let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
                plan.process(buf);
            }

            fn ifft(buf: &mut [Complex<$t>]) {
                thread_local! {
                    static PLANNER: RefCell<FftPlanner<$t>> = RefCell::new(FftPlanner::new());
                }
                if buf.is_empty() {
                    return;
                }
                let n = buf.len();
                if n > 1 {
                    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
                    plan.process(buf);
                }
                let scale = 1.0 / n as $t;
                for v in buf.iter_mut() {
                    *v *= scale;
                }
            }

            fn qr(a: &CMatrix<$t>) -> (CMatrix<$t>, CMatrix<$t>) {
                let qr = a.clone().qr();
                (qr.q(), qr.r())
            }

            // nalgebra's complex SVD stops short of full accuracy (errors near
            // 1e-8 on well-conditioned Vandermonde matrices), so this one goes
            // through faer.
            fn svd(a: &CMatrix<$t>) -> Svd<$t> {
                let m = faer::Mat::<Complex<$t>>::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)]);
                let svd = m.thin_svd().expect("SVD iteration converges");
                let (u, v) = (svd.U(), svd.V());
                let s = svd.S().column_vector();
                Svd {
                    u: CMatrix::from_fn(u.nrows(), u.ncols(), |r, c| u[(r, c)]),
                    singular_values: (0..s.nrows()).map(|i| s[i].re).collect(),
                    v_adjoint: CMatrix::from_fn(v.ncols(), v.nrows(), |r, c| v[(c, r)].conj()),
                }
            }

            fn hermitian_eigen(a: &CMatrix<$t>) -> HermitianEigen<$t> {
                let eig = nalgebra::SymmetricEigen::new(a.clone());
                let n = eig.eigenvalues.len();
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&i, &j| {
                    eig.eigenvalues[i]
                        .partial_cmp(&eig.eigenvalues[j])
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
                HermitianEigen {
                    eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
                    eigenvectors: CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]),
                }
            }

            fn eigenvalues(a: &CMatrix<$t>) -> Option<Vec<Complex<$t>>> {
                let n = a.nrows();
                if n == 0 {
                    return Some(Vec::new());
                }
                let schur = nalgebra::Schur::try_new(a.clone(), <$t>::EPSILON, 0)?;
                let (_, t) = schur.unpack();
                Some((0..n).map(|i| t[(i, i)]).collect())
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
