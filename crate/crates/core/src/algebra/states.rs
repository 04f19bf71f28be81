use nalgebra::DVector;

use super::linalg::{self, Matrix, Vector};
use super::shape::SpaceShape;
use crate::error::{Error, Result};
use crate::scalar::{cr, Real, Tolerances, C};

/// Normalized state vector over a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket<T: Real> {
    shape: SpaceShape,
    amplitudes: Vector<T>,
}

impl<T: Real> Ket<T> {
    /// Checks length and unit norm (within the default `norm` tolerance).
    pub fn new(shape: SpaceShape, amplitudes: Vector<T>) -> Result<Self> {
        Self::check_len(&shape, &amplitudes)?;
        let norm = amplitudes.norm();
        if (norm - T::one()).abs() > Tolerances::<T>::default().norm {
            return Err(Error::NotNormalized {
                norm: norm.to_f64_lossy(),
            });
        }
        Ok(Self { shape, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm; a zero vector is rejected.
    pub fn normalized(shape: SpaceShape, amplitudes: Vector<T>) -> Result<Self> {
        Self::check_len(&shape, &amplitudes)?;
        let norm = amplitudes.norm();
        if norm <= Tolerances::<T>::default().prob {
            return Err(Error::ZeroProbability {
                probability: (norm * norm).to_f64_lossy(),
            });
        }
        Ok(Self {
            shape,
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn from_slice(shape: SpaceShape, amplitudes: &[C<T>]) -> Result<Self> {
        Self::new(shape, DVector::from_column_slice(amplitudes))
    }

    pub fn basis(shape: SpaceShape, index: usize) -> Result<Self> {
        let dim = shape.total_dim();
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = DVector::zeros(dim);
        v[index] = cr(T::one());
        Ok(Self {
            shape,
            amplitudes: v,
        })
    }

    fn check_len(shape: &SpaceShape, amplitudes: &Vector<T>) -> Result<()> {
        if amplitudes.len() != shape.total_dim() {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes, got {}",
                shape.total_dim(),
                amplitudes.len()
            )));
        }
        Ok(())
    }

    pub(crate) fn from_parts_unchecked(shape: SpaceShape, amplitudes: Vector<T>) -> Self {
        Self { shape, amplitudes }
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &Vector<T> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Ket<T>) -> C<T> {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// ⟨self|op|self⟩, real part.
    pub fn expectation(&self, op: &Matrix<T>) -> T {
        self.amplitudes.dotc(&(op * &self.amplitudes)).re
    }

    pub fn to_density(&self) -> DensityOperator<T> {
        DensityOperator::from_ket(self)
    }
}

/// Statistical operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T: Real> {
    shape: SpaceShape,
    matrix: Matrix<T>,
}

impl<T: Real> DensityOperator<T> {
    pub fn new(shape: SpaceShape, matrix: Matrix<T>) -> Result<Self> {
        Self::new_with(shape, matrix, &Tolerances::default())
    }

    pub fn new_with(shape: SpaceShape, matrix: Matrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        let dim = shape.total_dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "expected {dim}x{dim} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let rho = Self { shape, matrix };
        rho.validate(tol)?;
        Ok(rho)
    }

    pub fn from_ket(ket: &Ket<T>) -> Self {
        let v = ket.amplitudes();
        Self {
            shape: ket.shape().clone(),
            matrix: v * v.adjoint(),
        }
    }

    pub fn maximally_mixed(shape: SpaceShape) -> Self {
        let dim = shape.total_dim();
        let matrix = linalg::identity::<T>(dim).unscale(T::from_usize(dim).unwrap());
        Self { shape, matrix }
    }

    /// Wraps an operation result; invariants are re-asserted in debug builds.
    pub(crate) fn from_parts_unchecked(shape: SpaceShape, matrix: Matrix<T>) -> Self {
        let rho = Self { shape, matrix };
        debug_assert!(
            rho.validate(&debug_tolerances()).is_ok(),
            "operation produced an invalid density operator: {:?}",
            rho.validate(&debug_tolerances())
        );
        rho
    }

    /// Checks Hermiticity, positivity and unit trace against `tol.alg`.
    pub fn validate(&self, tol: &Tolerances<T>) -> Result<()> {
        let dev = linalg::hermitian_deviation(&self.matrix);
        if dev > tol.alg {
            return Err(Error::NotHermitian {
                deviation: dev.to_f64_lossy(),
            });
        }
        let tr = self.trace();
        if (tr - T::one()).abs() > tol.alg {
            return Err(Error::TraceNotOne {
                trace: tr.to_f64_lossy(),
            });
        }
        let min = self.min_eigenvalue();
        if min < -tol.alg {
            return Err(Error::NotPositive {
                min_eigenvalue: min.to_f64_lossy(),
            });
        }
        Ok(())
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> T {
        linalg::trace(&self.matrix).re
    }

    /// Tr(ρ²)
    pub fn purity(&self) -> T {
        linalg::trace_product_re(&self.matrix, &self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues().first().copied().unwrap_or_else(T::zero)
    }

    /// Born probability Tr(ρ op) for a Hermitian `op` of matching dimension.
    pub fn expectation(&self, op: &Matrix<T>) -> T {
        linalg::trace_product_re(&self.matrix, op)
    }
}

/// Slack used when re-asserting invariants on operation outputs in debug
/// builds. Outputs of long operation chains drift further than inputs.
fn debug_tolerances<T: Real>() -> Tolerances<T> {
    let t = Tolerances::<T>::default();
    t.with_alg(t.raio)
}
