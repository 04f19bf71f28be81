//! Hole-in-the-screen preparators: ideal, realistic, and two holes in
//! succession.

use super::bundle::{ExpectedValue, ModelKind, ScenarioBundle};
use super::screen::SegmentedScreen;
use crate::algebra::{evolve, DensityOperator, Ket, Tensor, Unitary};
use crate::engine::{conditional_state, FactorizedEvolution, PreparatorSpec, RegionEvent};
use crate::error::{Error, Result};
use crate::scalar::{Real, Tolerances};

fn as_construction(e: Error, what: &str) -> Error {
    match e {
        Error::ZeroProbability { probability } => {
            Error::Construction(format!("{what} has zero probability ({probability:e})"))
        }
        other => other,
    }
}

/// Screen at rest, particle in free flight inside its blocks.
fn hole_evolution<T: Real>(screen: &SegmentedScreen) -> FactorizedEvolution<T> {
    FactorizedEvolution::product(Unitary::identity(screen.screen_shape()), screen.particle_flight())
}

fn hole_region<T: Real>(screen: &SegmentedScreen) -> Result<RegionEvent<T>> {
    let flight = screen.particle_flight::<T>();
    Ok(RegionEvent::on_object(
        screen.particle_hole_projector::<T>().conjugated_by(&flight)?,
    ))
}

/// Σₙ (P₁⁽ⁿ⁾|ψ⟩)(Q₂⁽ⁿ⁾|χ⟩) + (P₁^⊥|ψ⟩)(Q₂^⊥|χ⟩), renormalized. The trigger
/// is the hole segment and the prepared state is Q₂⁽ⁿ̄⁾|χ⟩ normalized.
pub fn build_hole_scenario_ideal<T: Real>(
    screen: &SegmentedScreen,
    psi1: &Ket<T>,
    chi2: &Ket<T>,
) -> Result<ScenarioBundle<T>> {
    screen.screen_shape().expect(psi1.shape())?;
    screen.particle_shape().expect(chi2.shape())?;
    let correlated = screen.correlator::<T>().apply(psi1.tensor(chi2).amplitudes());
    let phi = Ket::normalized(screen.composite_shape(), correlated)
        .map_err(|e| as_construction(e, "correlated screen-particle state"))?;

    let q_hole = screen.particle_hole_projector::<T>();
    let prepared = Ket::normalized(screen.particle_shape(), q_hole.apply(chi2.amplitudes()))
        .map_err(|e| as_construction(e, "particle passage through the hole"))?;

    let spec = PreparatorSpec::new(
        phi.to_density(),
        screen.observable(),
        screen.hole_index(),
        hole_evolution(screen),
    )
    .map_err(|e| as_construction(e, "triggering event"))?;

    let p_hole = screen.hole_projector::<T>();
    let expected_prob = {
        let a = psi1.expectation(p_hole.matrix()) * chi2.expectation(q_hole.matrix());
        let norm2 = psi1.tensor(chi2).expectation(screen.correlator::<T>().matrix());
        a / norm2
    };
    let trigger_probability = spec.trigger_probability();
    Ok(ScenarioBundle {
        model: ModelKind::HoleIdeal,
        region: Some(hole_region(screen)?),
        twin: Some(q_hole.clone()),
        probe: q_hole,
        composite_ket: Some(phi),
        screen: Some(screen.clone()),
        prepared_state: prepared.to_density(),
        cumulative_probability: trigger_probability,
        expected: vec![ExpectedValue {
            name: "trigger_probability".into(),
            value: expected_prob.to_f64_lossy(),
            source: "|P psi|^2 |Q chi|^2 over the correlated norm".into(),
        }],
        spec,
    })
}

/// Arbitrary correlated pure state; the prepared state is the partial-trace
/// conditional state. The decomposition over the screen blocks is
/// re-asserted on construction.
pub fn build_hole_scenario_realistic<T: Real>(
    phi12: &Ket<T>,
    screen: &SegmentedScreen,
) -> Result<ScenarioBundle<T>> {
    screen.composite_shape().expect(phi12.shape())?;
    let spec = PreparatorSpec::new(
        phi12.to_density(),
        screen.observable(),
        screen.hole_index(),
        hole_evolution(screen),
    )
    .map_err(|e| as_construction(e, "passage through the hole"))?;
    let prepared = conditional_state(spec.state(), spec.trigger())?;
    let trigger_probability = spec.trigger_probability();
    let q_hole = screen.particle_hole_projector::<T>();
    let bundle = ScenarioBundle {
        model: ModelKind::HoleRealistic,
        region: Some(hole_region(screen)?),
        twin: None,
        probe: q_hole,
        composite_ket: Some(phi12.clone()),
        screen: Some(screen.clone()),
        prepared_state: prepared.state,
        cumulative_probability: trigger_probability,
        expected: Vec::new(),
        spec,
    };
    let reconstruction = bundle.structure().reconstruction.unwrap_or_else(T::zero);
    if reconstruction > Tolerances::<T>::default().alg {
        return Err(Error::Construction(format!(
            "block decomposition does not reconstruct the state (deviation {:e})",
            reconstruction.to_f64_lossy()
        )));
    }
    Ok(bundle)
}

/// Second hole after the first: the particle's conditional state from the
/// first stage is propagated by `u2_between`, then correlated with a fresh
/// screen by the same block-projection construction (in mixed-state form).
/// The first screen is traced out.
pub fn chain_two_holes<T: Real>(
    first: &ScenarioBundle<T>,
    u2_between: &Unitary<T>,
    second_screen: &SegmentedScreen,
    fresh_screen_state: &Ket<T>,
) -> Result<ScenarioBundle<T>> {
    second_screen.screen_shape().expect(fresh_screen_state.shape())?;
    first.prepared_state.shape().expect(u2_between.shape())?;
    second_screen.particle_shape().expect(u2_between.shape())?;

    let incoming = evolve(&first.prepared_state, u2_between)?;
    let correlator = second_screen.correlator::<T>();
    let uncorrelated = fresh_screen_state.to_density().tensor(&incoming);
    let sandwich = correlator.matrix() * uncorrelated.matrix() * correlator.matrix();
    let norm = crate::algebra::linalg::trace(&sandwich).re;
    if norm <= Tolerances::<T>::default().prob {
        return Err(Error::Construction(format!(
            "chaining: correlated second-stage state vanishes (norm {:e})",
            norm.to_f64_lossy()
        )));
    }
    let rho12 = DensityOperator::new(second_screen.composite_shape(), sandwich.unscale(norm))?;
    let spec = PreparatorSpec::new(
        rho12,
        second_screen.observable(),
        second_screen.hole_index(),
        hole_evolution(second_screen),
    )
    .map_err(|e| match e {
        Error::ZeroProbability { probability } => Error::Construction(format!(
            "chaining: second hole cannot be passed (probability {probability:e})"
        )),
        other => other,
    })?;
    let prepared = conditional_state(spec.state(), spec.trigger())?;
    let q_hole = second_screen.particle_hole_projector::<T>();
    let cumulative = first.cumulative_probability * spec.trigger_probability();
    Ok(ScenarioBundle {
        model: ModelKind::HoleChain,
        region: Some(hole_region(second_screen)?),
        twin: Some(q_hole.clone()),
        probe: q_hole,
        composite_ket: None,
        screen: Some(second_screen.clone()),
        prepared_state: prepared.state,
        cumulative_probability: cumulative,
        expected: Vec::new(),
        spec,
    })
}
