use std::fmt;

use super::screen::SegmentedScreen;
use crate::algebra::linalg::{self, Matrix};
use crate::algebra::{DensityOperator, Ket, Projector};
use crate::engine::{lift, PreparatorSpec, RegionEvent, Subsystem};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SgModification {
    /// Non-absorbing detector in place of the upper plate.
    DetectorFirst,
    /// Anticoincidence with a detector in place of the lower plate.
    AnticoincidenceSecond,
    /// No detector; geometry plus a result in the upper halfspace.
    GeometryThird,
}

impl SgModification {
    pub fn as_str(self) -> &'static str {
        match self {
            SgModification::DetectorFirst => "detector_first",
            SgModification::AnticoincidenceSecond => "anticoincidence_second",
            SgModification::GeometryThird => "geometry_third",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    SternGerlach(SgModification),
    HoleIdeal,
    HoleRealistic,
    HoleChain,
    Random { seed: u64 },
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::SternGerlach(_) => "stern_gerlach",
            ModelKind::HoleIdeal => "hole_ideal",
            ModelKind::HoleRealistic => "hole_realistic",
            ModelKind::HoleChain => "hole_chain",
            ModelKind::Random { .. } => "random",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::SternGerlach(m) => write!(f, "stern_gerlach/{}", m.as_str()),
            other => f.write_str(other.as_str()),
        }
    }
}

/// A named value the builder knows in closed form, with a note on how it
/// was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedValue {
    pub name: String,
    pub value: f64,
    pub source: String,
}

/// A fully built preparator plus the auxiliary events the checks need.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioBundle<T: Real> {
    pub model: ModelKind,
    pub spec: PreparatorSpec<T>,
    /// Event at the final instant whose occurrence is equivalent to the
    /// trigger, when the model provides one.
    pub region: Option<RegionEvent<T>>,
    /// Object event that occurs iff the trigger does.
    pub twin: Option<Projector<T>>,
    /// Object event used for the coincidence-probability check.
    pub probe: Projector<T>,
    /// Pure composite state, when the model has one.
    pub composite_ket: Option<Ket<T>>,
    pub screen: Option<SegmentedScreen>,
    /// Object state at the initial instant, computed by the builder's own
    /// route (closed form for the ideal models).
    pub prepared_state: DensityOperator<T>,
    /// Product of trigger probabilities over all chained stages.
    pub cumulative_probability: T,
    pub expected: Vec<ExpectedValue>,
}

/// Deviations of the structural identities a bundle must satisfy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureReport<T> {
    /// max |Σₙ Pₙ − 1| over the preparator observable.
    pub completeness: T,
    /// max |Σ Qₙ − 1| over the screen's particle-side blocks.
    pub particle_completeness: Option<T>,
    /// max |Σₙ (Pₙ⊗1)|Φ⟩ − |Φ⟩| for the pure composite state.
    pub reconstruction: Option<T>,
}

impl<T: Real> StructureReport<T> {
    pub fn max_deviation(&self) -> T {
        [Some(self.completeness), self.particle_completeness, self.reconstruction]
            .into_iter()
            .flatten()
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

impl<T: Real> ScenarioBundle<T> {
    pub fn structure(&self) -> StructureReport<T> {
        let obs = self.spec.observable();
        let dim = obs.shape().total_dim();
        let sum = obs
            .branches()
            .iter()
            .fold(Matrix::<T>::zeros(dim, dim), |acc, (_, p)| acc + p.matrix());
        let completeness = linalg::max_abs_diff(&sum, &linalg::identity(dim));
        let particle_completeness = self.screen.as_ref().map(|s| s.particle_completeness_deviation());
        let reconstruction = self.composite_ket.as_ref().map(|phi| {
            let composite = self.spec.composite_shape();
            let rebuilt = obs.branches().iter().fold(
                crate::algebra::Vector::<T>::zeros(phi.dim()),
                |acc, (_, p)| {
                    let lifted = lift(composite, Subsystem::Preparator, p).expect("matching shapes");
                    acc + lifted.apply(phi.amplitudes())
                },
            );
            (rebuilt - phi.amplitudes())
                .iter()
                .fold(T::zero(), |a, z| {
                    let m = nalgebra::ComplexField::modulus(*z);
                    if m > a {
                        m
                    } else {
                        a
                    }
                })
        });
        StructureReport {
            completeness,
            particle_completeness,
            reconstruction,
        }
    }
}
