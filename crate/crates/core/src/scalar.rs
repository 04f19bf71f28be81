//! Scalar abstraction and numerical tolerances.

use std::fmt::{Debug, Display};

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type the simulator is generic over (`f32` or `f64`).
///
/// Amplitudes and matrix entries are `Complex<T>` for `T: Real`.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync
{
    /// Converts a literal; all supported scalar types represent every `f64` approximately.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn machine_epsilon() -> Self;
}

impl Real for f64 {
    fn machine_epsilon() -> Self {
        f64::EPSILON
    }
}

impl Real for f32 {
    fn machine_epsilon() -> Self {
        f32::EPSILON
    }
}

pub type C<T> = Complex<T>;

pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// Numerical tolerances used for construction checks and verdicts.
///
/// For `f64` the defaults are `alg = 1e-10`, `norm = 1e-12`, `prob = 1e-12`
/// and `raio = 1e-9`. Lower-precision scalars get each value floored at a
/// fixed multiple of their machine epsilon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Algebraic identity checks (Hermiticity, idempotence, unitarity, trace).
    pub alg: T,
    /// Ket normalization on construction.
    pub norm: T,
    /// Events with probability at or below this are treated as impossible.
    pub prob: T,
    /// Equality of states composed through several normalizations.
    pub raio: T,
}

pub const DEFAULT_ALG: f64 = 1e-10;
pub const DEFAULT_NORM: f64 = 1e-12;
pub const DEFAULT_PROB: f64 = 1e-12;
pub const DEFAULT_RAIO: f64 = 1e-9;

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        let eps = T::machine_epsilon();
        let floor = |spec: f64, factor: f64| {
            let v = T::lit(spec);
            let f = eps * T::lit(factor);
            if f > v {
                f
            } else {
                v
            }
        };
        Self {
            alg: floor(DEFAULT_ALG, 1e3),
            norm: floor(DEFAULT_NORM, 1e2),
            prob: floor(DEFAULT_PROB, 1e2),
            raio: floor(DEFAULT_RAIO, 1e4),
        }
    }
}

impl<T: Real> Tolerances<T> {
    /// Smallest override accepted for any tolerance: 100 machine epsilons.
    pub fn minimum_override() -> T {
        T::machine_epsilon() * T::lit(100.0)
    }

    pub fn with_alg(mut self, alg: T) -> Self {
        self.alg = alg;
        self
    }

    pub fn with_raio(mut self, raio: T) -> Self {
        self.raio = raio;
        self
    }
}
