//! Seeded random instances: Gaussian kets, Haar-like unitaries, density
//! operators from partial traces of pure states on a doubled space.

use nalgebra::{ComplexField, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::{Matrix, Vector};
use super::operators::{Projector, Unitary};
use super::ops::partial_trace;
use super::shape::SpaceShape;
use super::states::{DensityOperator, Ket};
use crate::error::{Error, Result};
use crate::scalar::{c, Real, C};

pub fn gaussian_complex<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(T::lit(re), T::lit(im))
}

pub fn gaussian_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector<T> {
    DVector::from_fn(dim, |_, _| gaussian_complex(rng))
}

pub fn gaussian_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix<T> {
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = gaussian_complex(rng);
        }
    }
    m
}

pub fn random_ket<T: Real, R: Rng + ?Sized>(rng: &mut R, shape: &SpaceShape) -> Ket<T> {
    let v = gaussian_vector(rng, shape.total_dim());
    let n = v.norm();
    Ket::from_parts_unchecked(shape.clone(), v.unscale(n))
}

/// Unitary from the QR factorization of a complex Gaussian matrix, with the
/// phases of R's diagonal absorbed into Q.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, shape: &SpaceShape) -> Unitary<T> {
    let dim = shape.total_dim();
    let qr = gaussian_matrix::<T, R>(rng, dim, dim).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let n = d.modulus();
        if n > T::zero() {
            let phase = d.unscale(n);
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    Unitary::from_parts_unchecked(shape.clone(), q)
}

/// Generic (full-rank) mixed state: reduced state of a random pure state on
/// `shape ⊗ shape`.
pub fn random_density<T: Real, R: Rng + ?Sized>(rng: &mut R, shape: &SpaceShape) -> DensityOperator<T> {
    random_density_of_rank(rng, shape, shape.total_dim())
}

/// Mixed state of rank at most `rank`, from a random pure state on
/// `shape ⊗ C^rank` traced over the ancilla.
pub fn random_density_of_rank<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    shape: &SpaceShape,
    rank: usize,
) -> DensityOperator<T> {
    let dim = shape.total_dim();
    let rank = rank.max(1);
    let doubled = SpaceShape::bipartite(dim, rank).expect("positive dims");
    let pure = random_ket::<T, R>(rng, &doubled).to_density();
    let reduced = partial_trace(&pure, &[0]).expect("valid keep set");
    DensityOperator::from_parts_unchecked(shape.clone(), reduced.matrix().clone())
}

/// Random rank-`rank` projector: span of the first `rank` columns of a
/// random unitary.
pub fn random_projector<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    shape: &SpaceShape,
    rank: usize,
) -> Result<Projector<T>> {
    let dim = shape.total_dim();
    if rank > dim {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} exceeds dimension {dim}"
        )));
    }
    let u = random_unitary::<T, R>(rng, shape);
    let cols = u.matrix().columns(0, rank).into_owned();
    Ok(Projector::from_parts_unchecked(shape.clone(), &cols * cols.adjoint()))
}

/// Random resolution of the identity into mutually orthogonal projectors
/// of the given ranks, which must sum to the dimension.
pub fn random_decomposition<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    shape: &SpaceShape,
    ranks: &[usize],
) -> Result<Vec<Projector<T>>> {
    let dim = shape.total_dim();
    if ranks.iter().sum::<usize>() != dim || ranks.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "ranks {ranks:?} must be positive and sum to {dim}"
        )));
    }
    let u = random_unitary::<T, R>(rng, shape);
    let mut start = 0;
    Ok(ranks
        .iter()
        .map(|&r| {
            let cols = u.matrix().columns(start, r).into_owned();
            start += r;
            Projector::from_parts_unchecked(shape.clone(), &cols * cols.adjoint())
        })
        .collect())
}
