use nalgebra::DMatrix;

use super::linalg::{self, Matrix, Vector};
use super::shape::SpaceShape;
use super::states::Ket;
use crate::error::{Error, Result};
use crate::scalar::{cr, Real, Tolerances};

/// Orthogonal projector (Hermitian and idempotent); an event.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector<T: Real> {
    shape: SpaceShape,
    matrix: Matrix<T>,
}

impl<T: Real> Projector<T> {
    pub fn new(shape: SpaceShape, matrix: Matrix<T>) -> Result<Self> {
        check_square(&shape, &matrix)?;
        let tol = Tolerances::<T>::default().alg;
        let herm = linalg::hermitian_deviation(&matrix);
        if herm > tol {
            return Err(Error::NotHermitian {
                deviation: herm.to_f64_lossy(),
            });
        }
        let idem = linalg::idempotent_deviation(&matrix);
        if idem > tol {
            return Err(Error::NotIdempotent {
                deviation: idem.to_f64_lossy(),
            });
        }
        Ok(Self { shape, matrix })
    }

    pub(crate) fn from_parts_unchecked(shape: SpaceShape, matrix: Matrix<T>) -> Self {
        debug_assert!(
            linalg::hermitian_deviation(&matrix) <= Tolerances::<T>::default().raio
                && linalg::idempotent_deviation(&matrix) <= Tolerances::<T>::default().raio
        );
        Self { shape, matrix }
    }

    pub fn identity(shape: SpaceShape) -> Self {
        let dim = shape.total_dim();
        Self {
            shape,
            matrix: linalg::identity(dim),
        }
    }

    pub fn zero(shape: SpaceShape) -> Self {
        let dim = shape.total_dim();
        Self {
            shape,
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    /// Diagonal 0/1 projector onto the computational basis vectors where
    /// `mask` is true.
    pub fn from_mask(shape: SpaceShape, mask: &[bool]) -> Result<Self> {
        let dim = shape.total_dim();
        if mask.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "mask length {} does not match dimension {dim}",
                mask.len()
            )));
        }
        let mut matrix = DMatrix::zeros(dim, dim);
        for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
            matrix[(i, i)] = cr(T::one());
        }
        Ok(Self { shape, matrix })
    }

    /// Projector onto the span of the computational basis indices `range`.
    pub fn from_index_range(shape: SpaceShape, range: std::ops::Range<usize>) -> Result<Self> {
        let dim = shape.total_dim();
        let mask: Vec<bool> = (0..dim).map(|i| range.contains(&i)).collect();
        if range.end > dim {
            return Err(Error::InvalidArgument(format!(
                "index range {range:?} exceeds dimension {dim}"
            )));
        }
        Self::from_mask(shape, &mask)
    }

    /// Projector onto the span of orthonormal columns.
    pub fn from_orthonormal_columns(shape: SpaceShape, columns: &Matrix<T>) -> Result<Self> {
        if columns.nrows() != shape.total_dim() {
            return Err(Error::InvalidArgument(format!(
                "columns have {} rows, expected {}",
                columns.nrows(),
                shape.total_dim()
            )));
        }
        let gram = columns.adjoint() * columns;
        let dev = linalg::max_abs_diff(&gram, &linalg::identity(columns.ncols()));
        if dev > Tolerances::<T>::default().alg {
            return Err(Error::InvalidArgument(format!(
                "columns are not orthonormal (deviation {:e})",
                dev.to_f64_lossy()
            )));
        }
        Ok(Self {
            shape,
            matrix: columns * columns.adjoint(),
        })
    }

    /// Rank-one projector |ψ⟩⟨ψ|.
    pub fn from_ket(ket: &Ket<T>) -> Self {
        let v = ket.amplitudes();
        Self {
            shape: ket.shape().clone(),
            matrix: v * v.adjoint(),
        }
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

    /// 1 − P
    pub fn complement(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            matrix: linalg::identity::<T>(self.dim()) - &self.matrix,
        }
    }

    pub fn rank(&self) -> usize {
        linalg::trace(&self.matrix).re.round().to_usize().unwrap_or(0)
    }

    /// Orthonormal basis of the range, as columns.
    pub fn range_basis(&self) -> Matrix<T> {
        linalg::dominant_eigenspace(&self.matrix, T::lit(0.5))
    }

    pub fn apply(&self, v: &Vector<T>) -> Vector<T> {
        &self.matrix * v
    }

    /// `U P U†`, the projector evolved in the Heisenberg sense.
    pub fn conjugated_by(&self, u: &Unitary<T>) -> Result<Self> {
        self.shape.expect(u.shape())?;
        Ok(Self {
            shape: self.shape.clone(),
            matrix: u.matrix() * &self.matrix * u.matrix().adjoint(),
        })
    }
}

/// Unitary operator (U†U = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary<T: Real> {
    shape: SpaceShape,
    matrix: Matrix<T>,
}

impl<T: Real> Unitary<T> {
    pub fn new(shape: SpaceShape, matrix: Matrix<T>) -> Result<Self> {
        check_square(&shape, &matrix)?;
        let dev = linalg::unitary_deviation(&matrix);
        if dev > Tolerances::<T>::default().alg {
            return Err(Error::NotUnitary {
                deviation: dev.to_f64_lossy(),
            });
        }
        Ok(Self { shape, matrix })
    }

    pub(crate) fn from_parts_unchecked(shape: SpaceShape, matrix: Matrix<T>) -> Self {
        debug_assert!(linalg::unitary_deviation(&matrix) <= Tolerances::<T>::default().raio);
        Self { shape, matrix }
    }

    pub fn identity(shape: SpaceShape) -> Self {
        let dim = shape.total_dim();
        Self {
            shape,
            matrix: linalg::identity(dim),
        }
    }

    /// Permutation unitary sending basis vector `i` to `perm[i]`.
    pub fn permutation(shape: SpaceShape, perm: &[usize]) -> Result<Self> {
        let dim = shape.total_dim();
        let mut seen = vec![false; dim];
        if perm.len() != dim || perm.iter().any(|&p| p >= dim || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation of 0..{dim}"
            )));
        }
        let mut matrix = DMatrix::zeros(dim, dim);
        for (i, &p) in perm.iter().enumerate() {
            matrix[(p, i)] = cr(T::one());
        }
        Ok(Self { shape, matrix })
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

    pub fn adjoint(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &Unitary<T>) -> Result<Self> {
        self.shape.expect(other.shape())?;
        Ok(Self {
            shape: self.shape.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn apply(&self, ket: &Ket<T>) -> Result<Ket<T>> {
        self.shape.expect(ket.shape())?;
        Ok(Ket::from_parts_unchecked(
            self.shape.clone(),
            &self.matrix * ket.amplitudes(),
        ))
    }
}

/// Observable in spectral form: distinct eigenvalues paired with mutually
/// orthogonal projectors that resolve the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralObservable<T: Real> {
    shape: SpaceShape,
    branches: Vec<(T, Projector<T>)>,
}

impl<T: Real> SpectralObservable<T> {
    pub fn new(shape: SpaceShape, branches: Vec<(T, Projector<T>)>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidObservable("no spectral branches".into()));
        }
        let tol = Tolerances::<T>::default().alg;
        for (i, (_, p)) in branches.iter().enumerate() {
            if p.shape() != &shape {
                return Err(Error::InvalidObservable(format!(
                    "branch {i} has shape {:?}, expected {:?}",
                    p.shape().factor_dims(),
                    shape.factor_dims()
                )));
            }
        }
        for i in 0..branches.len() {
            for j in (i + 1)..branches.len() {
                if branches[i].0 == branches[j].0 {
                    return Err(Error::InvalidObservable(format!(
                        "branches {i} and {j} share eigenvalue {}",
                        branches[i].0
                    )));
                }
                let overlap = linalg::max_abs(&(branches[i].1.matrix() * branches[j].1.matrix()));
                if overlap > tol {
                    return Err(Error::InvalidObservable(format!(
                        "projectors {i} and {j} are not orthogonal (max |PQ| = {:e})",
                        overlap.to_f64_lossy()
                    )));
                }
            }
        }
        let dim = shape.total_dim();
        let sum = branches
            .iter()
            .fold(DMatrix::zeros(dim, dim), |acc: Matrix<T>, (_, p)| acc + p.matrix());
        let dev = linalg::max_abs_diff(&sum, &linalg::identity(dim));
        if dev > tol {
            return Err(Error::InvalidObservable(format!(
                "projectors do not sum to the identity (deviation {:e})",
                dev.to_f64_lossy()
            )));
        }
        Ok(Self { shape, branches })
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn branches(&self) -> &[(T, Projector<T>)] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn eigenvalue(&self, index: usize) -> Option<T> {
        self.branches.get(index).map(|(a, _)| *a)
    }

    pub fn projector(&self, index: usize) -> Option<&Projector<T>> {
        self.branches.get(index).map(|(_, p)| p)
    }

    /// Σ aₙ Pₙ
    pub fn matrix(&self) -> Matrix<T> {
        let dim = self.shape.total_dim();
        self.branches
            .iter()
            .fold(DMatrix::zeros(dim, dim), |acc: Matrix<T>, (a, p)| {
                acc + p.matrix().scale(*a)
            })
    }
}

fn check_square<T: Real>(shape: &SpaceShape, matrix: &Matrix<T>) -> Result<()> {
    let dim = shape.total_dim();
    if matrix.nrows() != dim || matrix.ncols() != dim {
        return Err(Error::InvalidArgument(format!(
            "expected {dim}x{dim} matrix, got {}x{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn shape(d: usize) -> SpaceShape {
        SpaceShape::single(d).unwrap()
    }

    #[test]
    fn projector_rejects_non_idempotent() {
        let m = linalg::identity::<f64>(2).scale(0.5);
        assert!(matches!(
            Projector::new(shape(2), m),
            Err(Error::NotIdempotent { .. })
        ));
    }

    #[test]
    fn complement_and_rank() {
        let p = Projector::<f64>::from_index_range(shape(5), 0..2).unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.complement().rank(), 3);
        assert_eq!(p.range_basis().ncols(), 2);
    }

    #[test]
    fn unitary_rejects_non_unitary() {
        let m = Matrix::<f64>::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            Unitary::new(shape(2), m),
            Err(Error::NotUnitary { .. })
        ));
        assert!(Unitary::<f64>::permutation(shape(3), &[0, 0, 1]).is_err());
        assert!(Unitary::<f64>::permutation(shape(3), &[2, 0, 1]).is_ok());
    }

    #[test]
    fn observable_rejects_repeated_eigenvalues_and_overlaps() {
        let p0 = Projector::<f64>::from_index_range(shape(3), 0..1).unwrap();
        let p1 = Projector::<f64>::from_index_range(shape(3), 1..3).unwrap();
        let p01 = Projector::<f64>::from_index_range(shape(3), 0..2).unwrap();
        assert!(SpectralObservable::new(shape(3), vec![(1.0, p0.clone()), (2.0, p1.clone())]).is_ok());
        assert!(SpectralObservable::new(shape(3), vec![(1.0, p0.clone()), (1.0, p1.clone())]).is_err());
        assert!(SpectralObservable::new(shape(3), vec![(1.0, p0.clone()), (2.0, p01)]).is_err());
        assert!(SpectralObservable::new(shape(3), vec![(1.0, p0)]).is_err());
    }

    #[test]
    fn observable_matrix_is_spectral_sum() {
        let p0 = Projector::<f64>::from_index_range(shape(2), 0..1).unwrap();
        let p1 = p0.complement();
        let a = SpectralObservable::new(shape(2), vec![(3.0, p0), (-1.0, p1)]).unwrap();
        let m = a.matrix();
        assert_eq!(m[(0, 0)], c(3.0, 0.0));
        assert_eq!(m[(1, 1)], c(-1.0, 0.0));
    }
}
