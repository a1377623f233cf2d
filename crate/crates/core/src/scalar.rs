//! Scalar abstraction shared by the signal-processing modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use rustfft::FftNum;

/// Floating point type the DSP chain can run on: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + FftNum + Default + Display + Debug + Sum + Send + Sync
{
    /// Lossy conversion from `f64`, used for physical constants and phases.
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 is representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `exp(j * 2π * turns)`, with the phase reduced modulo one turn in `f64`
/// before it is narrowed to `T`.
pub fn cis_turns<T: Real>(turns: f64) -> Complex<T> {
    let r = turns - turns.floor();
    let (s, c) = (2.0 * std::f64::consts::PI * r).sin_cos();
    Complex::new(T::of(c), T::of(s))
}

pub fn norm_sqr<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Hermitian inner product `Σ conj(a_i) b_i`.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}
