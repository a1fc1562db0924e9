//! Scalar abstraction for the numerical kernels.
//!
//! All tensor-network and statevector arithmetic is generic over a real
//! floating-point type; complex amplitudes are `Complex<T>` on top of it.
//! The exact combinatorial layers (Pauli strings, tableaus) are bit-level and
//! do not depend on the scalar; the closed-form probability layer uses exact
//! big-integer rationals instead (see `analytics`).

use nalgebra as na;
use num_complex::Complex;
use num_traits as nt;

/// Real scalar backing tensors and statevectors: `f32` or `f64`.
pub trait Real:
    Copy + nt::FromPrimitive + nt::ToPrimitive + nt::FloatConst + na::RealField
{
    /// Lossy conversion from an `f64` constant.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant")
    }

    /// Back to `f64`, for reporting and serialization.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("real scalar converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex amplitude over the generic real scalar.
pub type Cplx<T> = Complex<T>;

pub(crate) fn c_re<T: Real>(x: T) -> Cplx<T> {
    Complex::new(x, T::zero())
}

pub(crate) fn c_im<T: Real>(x: T) -> Cplx<T> {
    Complex::new(T::zero(), x)
}

pub(crate) fn c_polar<T: Real>(r: T, theta: T) -> Cplx<T> {
    Complex::new(r * theta.cos(), r * theta.sin())
}

pub(crate) fn c_exp<T: Real>(z: Cplx<T>) -> Cplx<T> {
    c_polar(z.re.exp(), z.im)
}
