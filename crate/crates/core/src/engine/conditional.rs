//! Conditional object states, coincidence factorization and twin events.

use super::spec::{check_bipartite, lift, Subsystem};
use crate::algebra::{
    lueders_collapse, partial_trace, partial_trace_matrix, probability, trace_distance, DensityOperator,
    Projector,
};
use crate::error::{Error, Result};
use crate::scalar::{Real, Tolerances};

/// Object state conditional on a preparator event, with the event's
/// probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Conditional<T: Real> {
    pub probability: T,
    pub state: DensityOperator<T>,
}

/// Tr₁[(P⊗1) ρ (P⊗1)] / Tr[ρ (P⊗1)].
pub fn conditional_state<T: Real>(rho12: &DensityOperator<T>, p1: &Projector<T>) -> Result<Conditional<T>> {
    let lifted = lift(rho12.shape(), Subsystem::Preparator, p1)?;
    let prob = probability(rho12, &lifted)?;
    if prob <= Tolerances::<T>::default().prob {
        return Err(Error::ZeroProbability {
            probability: prob.to_f64_lossy(),
        });
    }
    let sandwich = lifted.matrix() * rho12.matrix() * lifted.matrix();
    let (shape, reduced) = partial_trace_matrix(rho12.shape(), &sandwich, &[1])?;
    Ok(Conditional {
        probability: prob,
        state: DensityOperator::from_parts_unchecked(shape, reduced.unscale(prob)),
    })
}

/// One-sided form: Tr₁[ρ (P⊗1)] / Tr(ρ₁ P), normalized through the reduced
/// preparator state rather than the composite.
pub fn conditional_state_one_sided<T: Real>(
    rho12: &DensityOperator<T>,
    p1: &Projector<T>,
) -> Result<Conditional<T>> {
    check_bipartite(rho12.shape())?;
    let rho1 = partial_trace(rho12, &[0])?;
    let prob = probability(&rho1, p1)?;
    if prob <= Tolerances::<T>::default().prob {
        return Err(Error::ZeroProbability {
            probability: prob.to_f64_lossy(),
        });
    }
    let lifted = lift(rho12.shape(), Subsystem::Preparator, p1)?;
    let product = rho12.matrix() * lifted.matrix();
    let (shape, reduced) = partial_trace_matrix(rho12.shape(), &product, &[1])?;
    // Hermitian up to rounding; symmetrize.
    let herm = (&reduced + reduced.adjoint()).scale(T::lit(0.5));
    Ok(Conditional {
        probability: prob,
        state: DensityOperator::from_parts_unchecked(shape, herm.unscale(prob)),
    })
}

/// Joint probability of `P ⊗ Q` alongside its factorization into the
/// probability of `P` and the conditional probability of `Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coincidence<T> {
    /// Tr[ρ₁₂ (P⊗Q)]
    pub joint: T,
    /// Tr(ρ₁ P)
    pub prob_p: T,
    /// Tr(ρ₂ Q) with ρ₂ conditional on P; `None` when P cannot occur.
    pub cond_q: Option<T>,
}

impl<T: Real> Coincidence<T> {
    pub fn product(&self) -> Option<T> {
        self.cond_q.map(|q| q * self.prob_p)
    }

    /// |joint − prob_p · cond_q|, or `joint` itself when P cannot occur.
    pub fn discrepancy(&self) -> T {
        match self.product() {
            Some(prod) => (self.joint - prod).abs(),
            None => self.joint.abs(),
        }
    }

    pub fn holds(&self, tol: &Tolerances<T>) -> bool {
        match self.cond_q {
            Some(_) => self.discrepancy() <= tol.alg,
            None => self.joint <= tol.prob,
        }
    }
}

pub fn coincidence_probability<T: Real>(
    rho12: &DensityOperator<T>,
    p1: &Projector<T>,
    q2: &Projector<T>,
) -> Result<Coincidence<T>> {
    let shape = rho12.shape();
    let lp = lift(shape, Subsystem::Preparator, p1)?;
    let lq = lift(shape, Subsystem::Object, q2)?;
    let joint = rho12.expectation(&(lp.matrix() * lq.matrix()));
    let rho1 = partial_trace(rho12, &[0])?;
    let prob_p = probability(&rho1, p1)?;
    let cond_q = match conditional_state(rho12, p1) {
        Ok(cond) => Some(probability(&cond.state, q2)?),
        Err(Error::ZeroProbability { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(Coincidence { joint, prob_p, cond_q })
}

/// Comparison of the preparator event `P ⊗ 1` with the object event `1 ⊗ Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwinReport<T> {
    pub are_twins: bool,
    pub prob_p: T,
    pub prob_q: T,
    /// Trace distance between the two Lüders post-states; `None` when one
    /// of the events cannot occur.
    pub state_distance: Option<T>,
}

pub fn twin_events_check<T: Real>(
    rho12: &DensityOperator<T>,
    p1: &Projector<T>,
    q2: &Projector<T>,
    tol: &Tolerances<T>,
) -> Result<TwinReport<T>> {
    let shape = rho12.shape();
    let lp = lift(shape, Subsystem::Preparator, p1)?;
    let lq = lift(shape, Subsystem::Object, q2)?;
    let prob_p = probability(rho12, &lp)?;
    let prob_q = probability(rho12, &lq)?;
    if prob_p <= tol.prob && prob_q <= tol.prob {
        return Err(Error::UndefinedTwin {
            prob_p: prob_p.to_f64_lossy(),
            prob_q: prob_q.to_f64_lossy(),
        });
    }
    let state_distance = match (lueders_collapse(rho12, &lp), lueders_collapse(rho12, &lq)) {
        (Ok(a), Ok(b)) => Some(trace_distance(&a.state, &b.state)?),
        _ => None,
    };
    let are_twins =
        (prob_p - prob_q).abs() <= tol.alg && state_distance.is_some_and(|d| d <= tol.alg);
    Ok(TwinReport {
        are_twins,
        prob_p,
        prob_q,
        state_distance,
    })
}
