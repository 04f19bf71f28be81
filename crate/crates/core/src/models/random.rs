//! Seeded random preparators whose evolution is admissible for the
//! second-kind pipeline by construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bundle::{ModelKind, ScenarioBundle};
use crate::algebra::linalg::{self, Matrix, Vector};
use crate::algebra::random::{gaussian_vector, random_decomposition, random_projector, random_unitary};
use crate::algebra::{probability, DensityOperator, SpaceShape, SpectralObservable};
use crate::engine::{admissible_for_raio, conditional_state, lift, PreparatorSpec, Subsystem};
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Triggers are only accepted with at least this probability.
pub const MIN_TRIGGER_PROBABILITY: f64 = 0.05;

/// Largest composite dimension accepted by the generator.
pub const MAX_COMPOSITE_DIM: usize = 64;

/// Random preparator on `d1 ⊗ d2` from `seed`.
///
/// Draws a random resolution of the preparator identity into 2..=d1
/// branches with eigenvalues 1, 2, …, a random trigger branch, a pure or
/// rank-2 composite state whose trigger probability lies in [0.1, 0.95)
/// and whose triggered part is confined to a random proper object subspace,
/// and
/// an evolution that factorizes on the trigger while routing the trigger's
/// support into a region event V and the complement's support out of it.
/// The probe event for the coincidence check is a random object projector.
pub fn generate_random_scenario<T: Real>(seed: u64, dims: (usize, usize)) -> Result<ScenarioBundle<T>> {
    let (d1, d2) = dims;
    if d1 < 2 || d2 < 2 || d1 * d2 > MAX_COMPOSITE_DIM {
        return Err(Error::Generation(format!(
            "dims ({d1}, {d2}) invalid: need d1 >= 2, d2 >= 2 and d1*d2 <= {MAX_COMPOSITE_DIM}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let composite = SpaceShape::bipartite(d1, d2)?;
    let prep_shape = SpaceShape::single(d1)?;
    let obj_shape = SpaceShape::single(d2)?;

    let branches = rng.random_range(2..=d1);
    let ranks = random_composition(&mut rng, d1, branches);
    let projectors = random_decomposition::<T, _>(&mut rng, &prep_shape, &ranks)?;
    let trigger_index = rng.random_range(0..branches);
    let trigger = projectors[trigger_index].clone();
    let complement_rank = d1 - ranks[trigger_index];

    // the triggered component only touches a proper object subspace S, so
    // the region Q(V) = U₂ S U₂† leaves room for the complement to avoid it
    let support_dim = rng.random_range(1..d2);
    let support = random_projector::<T, _>(&mut rng, &obj_shape, support_dim)?;
    let rank = if complement_rank * (d2 - support_dim) >= 2 && rng.random_bool(0.5) { 2 } else { 1 };
    let p = T::lit(rng.random_range(0.1..0.95));
    let triggered_space = trigger.range_basis().kronecker(&support.range_basis());
    let complement_space = trigger.complement().range_basis().kronecker(&linalg::identity::<T>(d2));
    let mut matrix = Matrix::<T>::zeros(d1 * d2, d1 * d2);
    let mut weight_left = T::one();
    for k in 0..rank {
        let a = normalize(&triggered_space * gaussian_vector::<T, _>(&mut rng, triggered_space.ncols()));
        let b = normalize(&complement_space * gaussian_vector::<T, _>(&mut rng, complement_space.ncols()));
        let ket = a * C::from(p.sqrt()) + b * C::from((T::one() - p).sqrt());
        let w = if k + 1 == rank { weight_left } else { T::lit(rng.random_range(0.2..0.8)) };
        weight_left -= w;
        matrix += &ket * ket.adjoint() * C::from(w);
    }
    let state = DensityOperator::new(composite.clone(), (&matrix + matrix.adjoint()) * C::from(T::lit(0.5)))?;
    debug_assert!(probability(&state, &lift(&composite, Subsystem::Preparator, &trigger)?)? > T::lit(MIN_TRIGGER_PROBABILITY));

    let observable = SpectralObservable::new(
        prep_shape.clone(),
        projectors
            .into_iter()
            .enumerate()
            .map(|(i, p)| (T::from_usize(i + 1).unwrap(), p))
            .collect(),
    )?;
    let u1 = random_unitary(&mut rng, &prep_shape);
    let u2 = random_unitary(&mut rng, &obj_shape);
    let (evolution, region) = admissible_for_raio(&mut rng, &state, &trigger, u1, u2)?;
    let probe_rank = rng.random_range(1..=d2);
    let probe = random_projector(&mut rng, &obj_shape, probe_rank)?;
    let spec = PreparatorSpec::new(state, observable, trigger_index, evolution)?;
    let prepared = conditional_state(spec.state(), spec.trigger())?;
    Ok(ScenarioBundle {
        model: ModelKind::Random { seed },
        region: Some(region),
        twin: None,
        probe,
        composite_ket: None,
        screen: None,
        prepared_state: prepared.state,
        cumulative_probability: spec.trigger_probability(),
        expected: Vec::new(),
        spec,
    })
}

fn normalize<T: Real>(v: Vector<T>) -> Vector<T> {
    let n = v.norm();
    v / C::from(n)
}

/// Uniformly random split of `total` into `parts` positive integers.
fn random_composition<R: Rng + ?Sized>(rng: &mut R, total: usize, parts: usize) -> Vec<usize> {
    let mut cuts = rand::seq::index::sample(rng, total - 1, parts - 1).into_vec();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts {
        out.push(c + 1 - prev);
        prev = c + 1;
    }
    out.push(total - prev);
    out
}
