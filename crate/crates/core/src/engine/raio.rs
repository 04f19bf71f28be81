//! Retroactive apparent ideal occurrence of the triggering event.

use super::spec::{PreparatorSpec, RegionEvent};
use crate::algebra::{evolve, lueders_collapse, probability, trace_distance, DensityOperator};
use crate::error::Result;
use crate::scalar::{Real, Tolerances};

/// Outcome of checking that ideal occurrence of the region event at the
/// final instant yields the same composite state as ideal occurrence of the
/// trigger at the initial instant followed by evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct RaioReport<T: Real> {
    /// Trigger at tᵢ ⇒ region at t_f (probability 1).
    pub trigger_implies_region: bool,
    /// Not trigger at tᵢ ⇒ not region at t_f (probability 0). Vacuously
    /// true when the complement of the trigger cannot occur.
    pub complement_excludes_region: bool,
    /// Tr[(Q⊗1 or 1⊗Q) U ρ_trig U†]
    pub region_prob_given_trigger: T,
    /// Same for the complement-triggered state, when that state exists.
    pub region_prob_given_complement: Option<T>,
    /// Probability of the region event in the evolved (uncollapsed) state.
    pub region_probability: T,
    /// Lüders state for the region event after evolution.
    pub lhs: Option<DensityOperator<T>>,
    /// Evolved Lüders state for the trigger.
    pub rhs: DensityOperator<T>,
    pub distance: Option<T>,
    pub tolerance: T,
    pub verdict: bool,
    pub diagnostic: Option<String>,
}

impl<T: Real> RaioReport<T> {
    pub fn preconditions_hold(&self) -> bool {
        self.trigger_implies_region && self.complement_excludes_region
    }
}

/// Certifies both implications numerically, then compares the two sides.
/// Zero-probability intermediate events produce `verdict = false` with a
/// diagnostic rather than an error.
pub fn verify_raio<T: Real>(
    spec: &PreparatorSpec<T>,
    region: &RegionEvent<T>,
    tol: &Tolerances<T>,
) -> Result<RaioReport<T>> {
    let composite = spec.composite_shape();
    let u12 = spec.evolution().u12();
    let region_lifted = region.lift(composite)?;
    let trigger = spec.lifted_trigger();
    let mut diagnostics = Vec::new();

    let triggered = lueders_collapse(spec.state(), &trigger)?;
    let rhs = evolve(&triggered.state, u12)?;
    let region_prob_given_trigger = probability(&rhs, &region_lifted)?;
    let trigger_implies_region = (region_prob_given_trigger - T::one()).abs() <= tol.raio;
    if !trigger_implies_region {
        diagnostics.push(format!(
            "region probability after trigger is {:e}, not 1",
            region_prob_given_trigger.to_f64_lossy()
        ));
    }

    let region_prob_given_complement = match lueders_collapse(spec.state(), &trigger.complement()) {
        Ok(c) => Some(probability(&evolve(&c.state, u12)?, &region_lifted)?),
        Err(_) => None,
    };
    let complement_excludes_region = region_prob_given_complement.is_none_or(|p| p.abs() <= tol.raio);
    if !complement_excludes_region {
        diagnostics.push(format!(
            "region probability after complement of trigger is {:e}, not 0",
            region_prob_given_complement.unwrap_or_else(T::zero).to_f64_lossy()
        ));
    }

    let evolved = evolve(spec.state(), u12)?;
    let region_probability = probability(&evolved, &region_lifted)?;
    let (lhs, distance) = match lueders_collapse(&evolved, &region_lifted) {
        Ok(c) => {
            let d = trace_distance(&c.state, &rhs)?;
            (Some(c.state), Some(d))
        }
        Err(e) => {
            diagnostics.push(format!("region event cannot occur: {e}"));
            (None, None)
        }
    };
    if let Some(d) = distance {
        if d > tol.raio {
            diagnostics.push(format!(
                "states differ: trace distance {:e} exceeds {:e}",
                d.to_f64_lossy(),
                tol.raio.to_f64_lossy()
            ));
        }
    }
    let verdict = trigger_implies_region
        && complement_excludes_region
        && distance.is_some_and(|d| d <= tol.raio);
    Ok(RaioReport {
        trigger_implies_region,
        complement_excludes_region,
        region_prob_given_trigger,
        region_prob_given_complement,
        region_probability,
        lhs,
        rhs,
        distance,
        tolerance: tol.raio,
        verdict,
        diagnostic: (!diagnostics.is_empty()).then(|| diagnostics.join("; ")),
    })
}
