//! Dense matrix helpers shared by the typed wrappers.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};

use crate::scalar::{cr, Real, C};

pub type Matrix<T> = DMatrix<C<T>>;
pub type Vector<T> = DVector<C<T>>;

pub fn identity<T: Real>(dim: usize) -> Matrix<T> {
    DMatrix::identity(dim, dim)
}

pub fn max_abs<T: Real>(m: &Matrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| {
        let a = z.modulus();
        if a > acc {
            a
        } else {
            acc
        }
    })
}

pub fn max_abs_diff<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> T {
    max_abs(&(a - b))
}

pub fn hermitian_deviation<T: Real>(m: &Matrix<T>) -> T {
    max_abs_diff(m, &m.adjoint())
}

pub fn idempotent_deviation<T: Real>(m: &Matrix<T>) -> T {
    max_abs_diff(&(m * m), m)
}

pub fn unitary_deviation<T: Real>(m: &Matrix<T>) -> T {
    max_abs_diff(&(m.adjoint() * m), &identity(m.nrows()))
}

pub fn trace<T: Real>(m: &Matrix<T>) -> C<T> {
    m.diagonal().iter().fold(cr(T::zero()), |acc, z| acc + z)
}

/// Real part of Tr(a b) without forming the product.
pub fn trace_product_re<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> T {
    let n = a.nrows();
    let mut acc = T::zero();
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

/// Eigenvalues (ascending) of the Hermitian part of `m`.
pub fn hermitian_eigenvalues<T: Real>(m: &Matrix<T>) -> Vec<T> {
    let h = (m + m.adjoint()).scale(T::lit(0.5));
    let mut ev: Vec<T> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Orthonormal basis (as columns) of the eigenspace of the Hermitian part
/// of `m` whose eigenvalues exceed `threshold`.
pub fn dominant_eigenspace<T: Real>(m: &Matrix<T>, threshold: T) -> Matrix<T> {
    let h = (m + m.adjoint()).scale(T::lit(0.5));
    let eig = SymmetricEigen::new(h);
    let cols: Vec<Vector<T>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > threshold)
        .map(|(i, _)| eig.eigenvectors.column(i).into_owned())
        .collect();
    columns_to_matrix(m.nrows(), &cols)
}

pub fn columns_to_matrix<T: Real>(rows: usize, cols: &[Vector<T>]) -> Matrix<T> {
    let mut out = DMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Gram-Schmidt: appends each candidate whose residual against `basis`
/// has norm above `threshold`, normalized. Returns how many were appended.
pub fn extend_orthonormal<T: Real>(
    basis: &mut Vec<Vector<T>>,
    candidates: impl IntoIterator<Item = Vector<T>>,
    threshold: T,
    limit: usize,
) -> usize {
    let mut added = 0;
    for mut v in candidates {
        if added == limit {
            break;
        }
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for b in basis.iter() {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
        }
        let n = v.norm();
        if n > threshold {
            basis.push(v.unscale(n));
            added += 1;
        }
    }
    added
}
