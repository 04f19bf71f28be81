//! Core operations: tensor products, partial traces, embedding, Lüders
//! collapse, unitary evolution and trace distance.

use nalgebra::DMatrix;

use super::linalg::{self, Matrix};
use super::operators::{Projector, Unitary};
use super::shape::SpaceShape;
use super::states::{DensityOperator, Ket};
use crate::error::{Error, Result};
use crate::scalar::{Real, Tolerances};

/// Kronecker product with `self` as the leftmost factor.
pub trait Tensor<Rhs = Self> {
    type Output;
    fn tensor(&self, rhs: &Rhs) -> Self::Output;
}

impl<T: Real> Tensor for Ket<T> {
    type Output = Ket<T>;
    fn tensor(&self, rhs: &Ket<T>) -> Ket<T> {
        Ket::from_parts_unchecked(
            self.shape().concat(rhs.shape()),
            self.amplitudes().kronecker(rhs.amplitudes()),
        )
    }
}

impl<T: Real> Tensor for DensityOperator<T> {
    type Output = DensityOperator<T>;
    fn tensor(&self, rhs: &DensityOperator<T>) -> DensityOperator<T> {
        DensityOperator::from_parts_unchecked(
            self.shape().concat(rhs.shape()),
            self.matrix().kronecker(rhs.matrix()),
        )
    }
}

impl<T: Real> Tensor for Projector<T> {
    type Output = Projector<T>;
    fn tensor(&self, rhs: &Projector<T>) -> Projector<T> {
        Projector::from_parts_unchecked(
            self.shape().concat(rhs.shape()),
            self.matrix().kronecker(rhs.matrix()),
        )
    }
}

impl<T: Real> Tensor for Unitary<T> {
    type Output = Unitary<T>;
    fn tensor(&self, rhs: &Unitary<T>) -> Unitary<T> {
        Unitary::from_parts_unchecked(
            self.shape().concat(rhs.shape()),
            self.matrix().kronecker(rhs.matrix()),
        )
    }
}

/// Partial trace of a raw operator over every factor not in `keep`.
pub fn partial_trace_matrix<T: Real>(
    shape: &SpaceShape,
    matrix: &Matrix<T>,
    keep: &[usize],
) -> Result<(SpaceShape, Matrix<T>)> {
    shape.check_factor_set(keep)?;
    if keep.len() == shape.num_factors() {
        return Err(Error::InvalidArgument(
            "partial trace must trace out at least one factor".into(),
        ));
    }
    let kept_shape = shape.subshape(keep)?;
    let traced = shape.complement(keep);
    let kept_off = shape.offsets(keep);
    let traced_off = shape.offsets(&traced);
    let n = kept_off.len();
    let out = DMatrix::from_fn(n, n, |a, b| {
        traced_off
            .iter()
            .map(|t| matrix[(kept_off[a] + t, kept_off[b] + t)])
            .sum()
    });
    Ok((kept_shape, out))
}

/// Reduced state on the factors listed in `keep` (strictly increasing).
pub fn partial_trace<T: Real>(rho: &DensityOperator<T>, keep: &[usize]) -> Result<DensityOperator<T>> {
    let (shape, m) = partial_trace_matrix(rho.shape(), rho.matrix(), keep)?;
    Ok(DensityOperator::from_parts_unchecked(shape, m))
}

/// Lifts `op`, acting on the factors `factors`, to the full space by
/// tensoring with the identity on the remaining factors.
pub fn embed_matrix<T: Real>(shape: &SpaceShape, factors: &[usize], op: &Matrix<T>) -> Result<Matrix<T>> {
    let sub = shape.subshape(factors)?;
    let sd = sub.total_dim();
    if op.nrows() != sd || op.ncols() != sd {
        return Err(Error::ShapeMismatch {
            expected: sub.factor_dims().to_vec(),
            actual: vec![op.nrows(), op.ncols()],
        });
    }
    let dim = shape.total_dim();
    let sub_off = shape.offsets(factors);
    let rest_off = shape.offsets(&shape.complement(factors));
    let mut out = DMatrix::zeros(dim, dim);
    for r in &rest_off {
        for a in 0..sd {
            for b in 0..sd {
                out[(sub_off[a] + r, sub_off[b] + r)] = op[(a, b)];
            }
        }
    }
    Ok(out)
}

pub fn embed_projector<T: Real>(shape: &SpaceShape, factors: &[usize], p: &Projector<T>) -> Result<Projector<T>> {
    shape.subshape(factors)?.expect(p.shape())?;
    Ok(Projector::from_parts_unchecked(
        shape.clone(),
        embed_matrix(shape, factors, p.matrix())?,
    ))
}

/// Tr(ρP)
pub fn probability<T: Real>(rho: &DensityOperator<T>, p: &Projector<T>) -> Result<T> {
    rho.shape().expect(p.shape())?;
    Ok(rho.expectation(p.matrix()))
}

/// Outcome of an ideal occurrence of an event.
#[derive(Debug, Clone, PartialEq)]
pub struct Collapse<T: Real> {
    pub probability: T,
    pub state: DensityOperator<T>,
}

/// Lüders rule: probability Tr(ρP) and post-state PρP / Tr(ρP).
///
/// Fails with [`Error::ZeroProbability`] when Tr(ρP) is at or below the
/// default `prob` tolerance.
pub fn lueders_collapse<T: Real>(rho: &DensityOperator<T>, p: &Projector<T>) -> Result<Collapse<T>> {
    let probability = probability(rho, p)?;
    if probability <= Tolerances::<T>::default().prob {
        return Err(Error::ZeroProbability {
            probability: probability.to_f64_lossy(),
        });
    }
    let sandwich = p.matrix() * rho.matrix() * p.matrix();
    Ok(Collapse {
        probability,
        state: DensityOperator::from_parts_unchecked(rho.shape().clone(), sandwich.unscale(probability)),
    })
}

/// U ρ U†
pub fn evolve<T: Real>(rho: &DensityOperator<T>, u: &Unitary<T>) -> Result<DensityOperator<T>> {
    rho.shape().expect(u.shape())?;
    Ok(DensityOperator::from_parts_unchecked(
        rho.shape().clone(),
        u.matrix() * rho.matrix() * u.matrix().adjoint(),
    ))
}

/// Half the trace norm of `a − b`.
pub fn trace_distance<T: Real>(a: &DensityOperator<T>, b: &DensityOperator<T>) -> Result<T> {
    a.shape().expect(b.shape())?;
    let diff = a.matrix() - b.matrix();
    let sum = diff.singular_values().iter().fold(T::zero(), |acc, &s| acc + s);
    Ok(sum * T::lit(0.5))
}

/// Largest entry-wise modulus of `a − b`.
pub fn max_entry_distance<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> T {
    linalg::max_abs_diff(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, C};

    fn qubit() -> SpaceShape {
        SpaceShape::single(2).unwrap()
    }

    fn ket(shape: SpaceShape, amps: &[C<f64>]) -> Ket<f64> {
        Ket::from_slice(shape, amps).unwrap()
    }

    fn plus_x() -> Ket<f64> {
        let h = 0.5f64.sqrt();
        ket(qubit(), &[c(h, 0.0), c(h, 0.0)])
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let a = Unitary::<f64>::identity(SpaceShape::single(2).unwrap());
        let b = Unitary::<f64>::identity(SpaceShape::single(3).unwrap());
        let ab = a.tensor(&b);
        assert_eq!(ab.shape().factor_dims(), &[2, 3]);
        assert_eq!(ab.matrix(), &linalg::identity::<f64>(6));
    }

    #[test]
    fn tensor_of_basis_kets_is_basis_ket() {
        let k0 = Ket::<f64>::basis(qubit(), 0).unwrap();
        let k1 = Ket::<f64>::basis(qubit(), 1).unwrap();
        let k01 = k0.tensor(&k1);
        assert_eq!(k01, Ket::basis(SpaceShape::bipartite(2, 2).unwrap(), 1).unwrap());
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let r1 = plus_x().to_density();
        let r2 = DensityOperator::<f64>::maximally_mixed(SpaceShape::single(3).unwrap());
        let r12 = r1.tensor(&r2);
        let back2 = partial_trace(&r12, &[1]).unwrap();
        let back1 = partial_trace(&r12, &[0]).unwrap();
        assert!(max_entry_distance(back2.matrix(), r2.matrix()) < 1e-15);
        assert!(max_entry_distance(back1.matrix(), r1.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let h = 0.5f64.sqrt();
        let bell = ket(
            SpaceShape::bipartite(2, 2).unwrap(),
            &[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
        );
        let r = partial_trace(&bell.to_density(), &[1]).unwrap();
        let half = DensityOperator::<f64>::maximally_mixed(qubit());
        assert!(max_entry_distance(r.matrix(), half.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_empty_and_full_keep_sets() {
        let r = DensityOperator::<f64>::maximally_mixed(SpaceShape::bipartite(2, 2).unwrap());
        assert!(partial_trace(&r, &[]).is_err());
        assert!(partial_trace(&r, &[0, 1]).is_err());
        assert!(partial_trace(&r, &[1, 0]).is_err());
    }

    #[test]
    fn lueders_identity_is_noop() {
        let rho = plus_x().to_density();
        let out = lueders_collapse(&rho, &Projector::identity(qubit())).unwrap();
        assert!((out.probability - 1.0).abs() < 1e-15);
        assert!(max_entry_distance(out.state.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn lueders_on_orthogonal_support_fails() {
        let rho = Ket::<f64>::basis(qubit(), 0).unwrap().to_density();
        let p1 = Projector::from_index_range(qubit(), 1..2).unwrap();
        assert!(matches!(
            lueders_collapse(&rho, &p1),
            Err(Error::ZeroProbability { .. })
        ));
    }

    #[test]
    fn lueders_plus_x_on_zero() {
        // |+x><+x| = [[.5,.5],[.5,.5]]; P0 rho P0 = [[.5,0],[0,0]]
        let rho = plus_x().to_density();
        let p0 = Projector::from_index_range(qubit(), 0..1).unwrap();
        let out = lueders_collapse(&rho, &p0).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-15);
        let expected = Matrix::<f64>::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(max_entry_distance(out.state.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn evolve_hadamard_takes_zero_to_plus_x() {
        let h = 0.5f64.sqrt();
        let had = Unitary::new(
            qubit(),
            Matrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
        )
        .unwrap();
        let zero = Ket::<f64>::basis(qubit(), 0).unwrap().to_density();
        let out = evolve(&zero, &had).unwrap();
        let expected = Matrix::<f64>::from_element(2, 2, c(0.5, 0.0));
        assert!(max_entry_distance(out.matrix(), &expected) < 1e-15);
        let back = evolve(&out, &had.adjoint()).unwrap();
        assert!(max_entry_distance(back.matrix(), zero.matrix()) < 1e-15);
        assert!(evolve(&zero, &Unitary::identity(SpaceShape::single(3).unwrap())).is_err());
    }

    #[test]
    fn trace_distance_basics() {
        let z0 = Ket::<f64>::basis(qubit(), 0).unwrap().to_density();
        let z1 = Ket::<f64>::basis(qubit(), 1).unwrap().to_density();
        assert!(trace_distance(&z0, &z0).unwrap().abs() < 1e-15);
        assert!((trace_distance(&z0, &z1).unwrap() - 1.0).abs() < 1e-15);
        let other = DensityOperator::<f64>::maximally_mixed(SpaceShape::single(3).unwrap());
        assert!(trace_distance(&z0, &other).is_err());
    }

    #[test]
    fn embed_on_second_factor_matches_kronecker() {
        let shape = SpaceShape::new(vec![2, 3]).unwrap();
        let q = Projector::<f64>::from_index_range(SpaceShape::single(3).unwrap(), 1..3).unwrap();
        let lifted = embed_projector(&shape, &[1], &q).unwrap();
        let kron = Projector::identity(qubit()).tensor(&q);
        assert_eq!(lifted.matrix(), kron.matrix());
    }
}
