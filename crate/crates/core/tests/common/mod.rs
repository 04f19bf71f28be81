//! Independent oracles: explicit index loops over raw matrices, sharing no
//! code path with the library's embedding or partial-trace routines.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use prepsim_core::algebra::Matrix;
use prepsim_core::C;

pub fn cz(re: f64, im: f64) -> C<f64> {
    C::new(re, im)
}

/// ρ₂ = Σ_a Σ_{a1,a2} P[a,a1] ρ[(a1,b),(a2,b')] P[a2,a] / p, with
/// p = Σ_{a,a1,b} P[a,a1] ρ[(a1,b),(a,b)]. Composite index (a, b) ↦ a·d2 + b.
pub fn brute_force_conditional(rho: &Matrix<f64>, p: &Matrix<f64>, d1: usize, d2: usize) -> (f64, Matrix<f64>) {
    let idx = |a: usize, b: usize| a * d2 + b;
    let mut prob = cz(0.0, 0.0);
    for a in 0..d1 {
        for a1 in 0..d1 {
            for b in 0..d2 {
                prob += p[(a, a1)] * rho[(idx(a1, b), idx(a, b))];
            }
        }
    }
    let mut out = DMatrix::zeros(d2, d2);
    for b in 0..d2 {
        for bp in 0..d2 {
            let mut acc = cz(0.0, 0.0);
            for a in 0..d1 {
                for a1 in 0..d1 {
                    for a2 in 0..d1 {
                        acc += p[(a, a1)] * rho[(idx(a1, b), idx(a2, bp))] * p[(a2, a)];
                    }
                }
            }
            out[(b, bp)] = acc / prob.re;
        }
    }
    (prob.re, out)
}

/// Tr₁ by explicit summation over the first index.
pub fn brute_force_trace_first(m: &Matrix<f64>, d1: usize, d2: usize) -> Matrix<f64> {
    DMatrix::from_fn(d2, d2, |b, bp| (0..d1).map(|a| m[(a * d2 + b, a * d2 + bp)]).sum())
}

/// ½ Σ |λᵢ| over the eigenvalues of the Hermitian difference.
pub fn eigen_trace_distance(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
    let diff = a - b;
    let herm = (&diff + diff.adjoint()) * cz(0.5, 0.0);
    0.5 * SymmetricEigen::new(herm).eigenvalues.iter().map(|x| x.abs()).sum::<f64>()
}

/// Entry-wise Kronecker product by index arithmetic.
pub fn kron(a: &Matrix<f64>, b: &Matrix<f64>) -> Matrix<f64> {
    let (ra, ca) = (a.nrows(), a.ncols());
    let (rb, cb) = (b.nrows(), b.ncols());
    DMatrix::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

pub fn max_diff(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace_re(m: &Matrix<f64>) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}
