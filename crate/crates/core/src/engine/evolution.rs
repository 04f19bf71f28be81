//! Factorized post-trigger evolution and constructions of admissible
//! composite evolutions.

use nalgebra::DMatrix;
use rand::Rng;

use super::conditional::conditional_state;
use super::spec::{lift, local_shape, FactorizedEvolution, PreparatorSpec, RegionEvent, Subsystem};
use crate::algebra::linalg::{self, extend_orthonormal, Matrix, Vector};
use crate::algebra::random::{gaussian_vector, random_unitary};
use crate::algebra::{evolve, DensityOperator, Projector, SpaceShape, Tensor, Unitary};
use crate::error::{Error, Result};
use crate::scalar::{Real, Tolerances};

/// max |U₁₂(P⊗1) − (U₁⊗U₂)(P⊗1)|
pub fn factorization_deviation<T: Real>(ev: &FactorizedEvolution<T>, trigger: &Projector<T>) -> Result<T> {
    let lifted = lift(ev.composite_shape(), Subsystem::Preparator, trigger)?;
    let product = ev.u1().tensor(ev.u2());
    Ok(linalg::max_abs_diff(
        &(ev.u12().matrix() * lifted.matrix()),
        &(product.matrix() * lifted.matrix()),
    ))
}

/// Whether the composite evolution factorizes on the range of `P ⊗ 1`.
/// Shape mismatches count as failure.
pub fn check_factorization<T: Real>(
    ev: &FactorizedEvolution<T>,
    trigger: &Projector<T>,
    tol: &Tolerances<T>,
) -> bool {
    factorization_deviation(ev, trigger).is_ok_and(|d| d <= tol.alg)
}

/// U₂ ρ₂ U₂† for the conditional object state ρ₂ at the initial instant.
///
/// Requires the evolution to factorize on the triggering subspace.
pub fn evolve_conditional<T: Real>(spec: &PreparatorSpec<T>, tol: &Tolerances<T>) -> Result<DensityOperator<T>> {
    let deviation = factorization_deviation(spec.evolution(), spec.trigger())?;
    if deviation > tol.alg {
        return Err(Error::FactorizationViolation {
            deviation: deviation.to_f64_lossy(),
        });
    }
    let cond = conditional_state(spec.state(), spec.trigger())?;
    evolve(&cond.state, spec.evolution().u2())
}

/// U₁₂ = (U₁⊗U₂)·W, where W is the identity on the range of `P ⊗ 1` and
/// acts as `complement_action` on the orthocomplement (in the basis
/// returned by `Projector::range_basis` of `1 − P⊗1`). Factorizes on the
/// trigger by construction.
pub fn block_constructed<T: Real>(
    u1: Unitary<T>,
    u2: Unitary<T>,
    trigger: &Projector<T>,
    complement_action: &Matrix<T>,
) -> Result<FactorizedEvolution<T>> {
    let composite = SpaceShape::bipartite(u1.dim(), u2.dim())?;
    let lifted = lift(&composite, Subsystem::Preparator, trigger)?;
    let basis = lifted.complement().range_basis();
    let k = basis.ncols();
    if complement_action.nrows() != k || complement_action.ncols() != k {
        return Err(Error::InvalidArgument(format!(
            "complement action must be {k}x{k}, got {}x{}",
            complement_action.nrows(),
            complement_action.ncols()
        )));
    }
    let dev = linalg::unitary_deviation(complement_action);
    if dev > Tolerances::<T>::default().alg {
        return Err(Error::NotUnitary {
            deviation: dev.to_f64_lossy(),
        });
    }
    let w = lifted.matrix() + &basis * complement_action * basis.adjoint();
    let u12 = Unitary::from_parts_unchecked(composite, u1.tensor(&u2).matrix() * w);
    FactorizedEvolution::new(u12, u1, u2)
}

/// Random member of the block-constructed family: random U₁, U₂ and a
/// random unitary on the orthocomplement of the trigger.
pub fn random_block_constructed<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    composite: &SpaceShape,
    trigger: &Projector<T>,
) -> Result<FactorizedEvolution<T>> {
    let u1 = random_unitary(rng, &local_shape(composite, Subsystem::Preparator));
    let u2 = random_unitary(rng, &local_shape(composite, Subsystem::Object));
    let k = composite.total_dim() - trigger.rank() * composite.factor_dim(1);
    let v = random_unitary::<T, R>(rng, &SpaceShape::single(k.max(1))?);
    let action = if k == 0 { DMatrix::zeros(0, 0) } else { v.matrix().clone() };
    block_constructed(u1, u2, trigger, &action)
}

/// Builds a composite evolution that factorizes on the trigger and an
/// object region event V such that, for the state `rho12`, the trigger
/// implies V at the final instant and the complementary event implies not-V.
///
/// Q(V) is the evolved support of the conditional object state. On the
/// complement of the trigger, the evolution routes the support of the
/// complement-projected state into `ran(1−P) ⊗ ker(Q(V))` (pulled back
/// through U₁⊗U₂). Fails when that target is too small.
pub fn admissible_for_raio<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    rho12: &DensityOperator<T>,
    trigger: &Projector<T>,
    u1: Unitary<T>,
    u2: Unitary<T>,
) -> Result<(FactorizedEvolution<T>, RegionEvent<T>)> {
    let composite = rho12.shape().clone();
    let (d1, d2) = (composite.factor_dim(0), composite.factor_dim(1));
    let tol = Tolerances::<T>::default();
    let support_threshold = tol.alg * T::lit(1e-2);
    let gs_threshold = T::lit(1e-6);

    let cond = conditional_state(rho12, trigger)?;
    let object_support = linalg::dominant_eigenspace(cond.state.matrix(), support_threshold);

    let lifted = lift(&composite, Subsystem::Preparator, trigger)?;
    let lifted_perp = lifted.complement();
    let complement_state = lifted_perp.matrix() * rho12.matrix() * lifted_perp.matrix();
    let sources: Vec<Vector<T>> = {
        let basis = linalg::dominant_eigenspace(&complement_state, support_threshold);
        (0..basis.ncols()).map(|j| basis.column(j).into_owned()).collect()
    };
    let s = sources.len();

    let prep_perp = trigger.complement().range_basis();
    let r_perp = prep_perp.ncols();
    let object_perp = Projector::from_parts_unchecked(
        SpaceShape::single(d2)?,
        linalg::identity::<T>(d2) - &object_support * object_support.adjoint(),
    )
    .range_basis();
    let target_dim = r_perp * object_perp.ncols();
    if s > target_dim {
        return Err(Error::Generation(format!(
            "complement support has dimension {s} but only {target_dim} dimensions \
             (preparator complement rank {r_perp} × object complement {}) are available; \
             the state's rank is too high for this split",
            object_perp.ncols()
        )));
    }

    let mut w = lifted.matrix().clone();
    if r_perp > 0 {
        // orthonormal basis of ran(1−P) ⊗ ker(Q)
        let mut target_basis: Vec<Vector<T>> = Vec::with_capacity(target_dim);
        for a in 0..r_perp {
            for b in 0..object_perp.ncols() {
                target_basis.push(prep_perp.column(a).kronecker(&object_perp.column(b)));
            }
        }
        let mix = random_unitary::<T, R>(rng, &SpaceShape::single(target_dim.max(1))?);
        let mut targets: Vec<Vector<T>> = Vec::new();
        let picks = (0..s).map(|j| {
            target_basis
                .iter()
                .enumerate()
                .fold(Vector::<T>::zeros(d1 * d2), |acc, (i, t)| acc + t * mix.matrix()[(i, j)])
        });
        extend_orthonormal(&mut targets, picks, gs_threshold, s);

        let mut src = Vec::new();
        extend_orthonormal(&mut src, sources, gs_threshold, s);
        let full = r_perp * d2;
        let complement_space = lifted_perp.range_basis();
        let randomized = |rng: &mut R| {
            let coeffs = gaussian_vector::<T, R>(rng, full);
            &complement_space * coeffs
        };
        let need = full - src.len();
        let fill: Vec<Vector<T>> = (0..4 * full).map(|_| randomized(rng)).collect();
        extend_orthonormal(&mut src, fill, gs_threshold, need);
        let need = full - targets.len();
        let fill: Vec<Vector<T>> = (0..4 * full).map(|_| randomized(rng)).collect();
        extend_orthonormal(&mut targets, fill, gs_threshold, need);
        if src.len() != full || targets.len() != full {
            return Err(Error::Generation(
                "failed to complete orthonormal bases of the trigger complement".into(),
            ));
        }
        for (t, s) in targets.iter().zip(src.iter()) {
            w += t * s.adjoint();
        }
    }

    let product = u1.tensor(&u2);
    let u12 = Unitary::from_parts_unchecked(composite, product.matrix() * w);
    let region_cols = u2.matrix() * &object_support;
    let region = Projector::from_parts_unchecked(SpaceShape::single(d2)?, &region_cols * region_cols.adjoint());
    Ok((FactorizedEvolution::new(u12, u1, u2)?, RegionEvent::on_object(region)))
}
