//! The three preparation pipelines and their cross-comparison.

use std::fmt;

use super::conditional::conditional_state_one_sided;
use super::raio::verify_raio;
use super::spec::{PreparatorSpec, RegionEvent};
use crate::algebra::{evolve, lueders_collapse, partial_trace, trace_distance, DensityOperator};
use crate::error::{Error, Result};
use crate::scalar::{Real, Tolerances};

#[derive(Debug, Clone, PartialEq)]
pub enum PipelineKind<T: Real> {
    /// Trigger occurs ideally at tᵢ; object evolves by U₂.
    FirstKind,
    /// Composite evolves by U₁₂; the region event occurs ideally at t_f.
    SecondKind { region: RegionEvent<T> },
    /// No collapse: conditional state at tᵢ, evolved by U₂.
    RelativeCollapse,
}

impl<T: Real> PipelineKind<T> {
    pub fn label(&self) -> PipelineLabel {
        match self {
            PipelineKind::FirstKind => PipelineLabel::FirstKind,
            PipelineKind::SecondKind { .. } => PipelineLabel::SecondKind,
            PipelineKind::RelativeCollapse => PipelineLabel::RelativeCollapse,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PipelineLabel {
    FirstKind,
    SecondKind,
    RelativeCollapse,
}

impl PipelineLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PipelineLabel::FirstKind => "first_kind",
            PipelineLabel::SecondKind => "second_kind",
            PipelineLabel::RelativeCollapse => "relative_collapse",
        }
    }
}

impl fmt::Display for PipelineLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutcome<T: Real> {
    pub label: PipelineLabel,
    /// Object state at the final instant.
    pub final_state: DensityOperator<T>,
    /// Probability of the event that actually occurs (trigger for the first
    /// kind, region for the second kind); the trigger probability for
    /// relative collapse, where nothing occurs.
    pub event_probability: T,
}

pub fn run_pipeline<T: Real>(
    spec: &PreparatorSpec<T>,
    kind: &PipelineKind<T>,
    tol: &Tolerances<T>,
) -> Result<PipelineOutcome<T>> {
    let u2 = spec.evolution().u2();
    let (final_state, event_probability) = match kind {
        PipelineKind::FirstKind => {
            let collapsed = lueders_collapse(spec.state(), &spec.lifted_trigger())?;
            let object = partial_trace(&collapsed.state, &[1])?;
            (evolve(&object, u2)?, collapsed.probability)
        }
        PipelineKind::SecondKind { region } => {
            let report = verify_raio(spec, region, tol)?;
            if !report.preconditions_hold() {
                return Err(Error::PreconditionViolated(
                    report.diagnostic.unwrap_or_else(|| "implications do not hold".into()),
                ));
            }
            let evolved = evolve(spec.state(), spec.evolution().u12())?;
            let collapsed = lueders_collapse(&evolved, &region.lift(spec.composite_shape())?)?;
            (partial_trace(&collapsed.state, &[1])?, collapsed.probability)
        }
        PipelineKind::RelativeCollapse => {
            let cond = conditional_state_one_sided(spec.state(), spec.trigger())?;
            (evolve(&cond.state, u2)?, cond.probability)
        }
    };
    Ok(PipelineOutcome {
        label: kind.label(),
        final_state,
        event_probability,
    })
}

/// Pairwise comparison of several pipelines run on one preparator.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineComparison<T: Real> {
    pub outcomes: Vec<(PipelineLabel, Result<PipelineOutcome<T>>)>,
    /// Trace distances between every pair of successful outcomes.
    pub pairwise: Vec<(PipelineLabel, PipelineLabel, T)>,
    pub tolerance: T,
}

impl<T: Real> PipelineComparison<T> {
    pub fn run(spec: &PreparatorSpec<T>, kinds: &[PipelineKind<T>], tol: &Tolerances<T>) -> Self {
        let outcomes: Vec<_> = kinds
            .iter()
            .map(|k| (k.label(), run_pipeline(spec, k, tol)))
            .collect();
        let mut pairwise = Vec::new();
        for i in 0..outcomes.len() {
            for j in (i + 1)..outcomes.len() {
                if let (Ok(a), Ok(b)) = (&outcomes[i].1, &outcomes[j].1) {
                    let d = trace_distance(&a.final_state, &b.final_state)
                        .expect("all pipelines end on the object space");
                    pairwise.push((a.label, b.label, d));
                }
            }
        }
        Self {
            outcomes,
            pairwise,
            tolerance: tol.raio,
        }
    }

    pub fn max_distance(&self) -> Option<T> {
        self.pairwise
            .iter()
            .map(|&(_, _, d)| d)
            .fold(None, |acc, d| Some(acc.map_or(d, |m: T| if d > m { d } else { m })))
    }

    /// Every pipeline succeeded and all pairs agree within tolerance.
    pub fn agree(&self) -> bool {
        self.outcomes.iter().all(|(_, r)| r.is_ok())
            && self.pairwise.iter().all(|&(_, _, d)| d <= self.tolerance)
    }
}
