use crate::algebra::{embed_projector, probability, DensityOperator, Projector, SpaceShape, SpectralObservable, Tensor, Unitary};
use crate::error::{Error, Result};
use crate::scalar::{Real, Tolerances};

/// Which side of the preparator/object split an event lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    /// Factor 0 (subsystem 1).
    Preparator,
    /// Factor 1 (subsystem 2).
    Object,
}

impl Subsystem {
    pub fn factor(self) -> usize {
        match self {
            Subsystem::Preparator => 0,
            Subsystem::Object => 1,
        }
    }
}

/// A local event `Q` on one subsystem, lifted to `Q ⊗ 1` or `1 ⊗ Q`.
///
/// The region event of a second-kind preparation normally lives on the
/// object; the Stern-Gerlach geometry check places it on the spatial
/// (preparator) factor instead.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionEvent<T: Real> {
    pub subsystem: Subsystem,
    pub projector: Projector<T>,
}

impl<T: Real> RegionEvent<T> {
    pub fn on_object(projector: Projector<T>) -> Self {
        Self {
            subsystem: Subsystem::Object,
            projector,
        }
    }

    pub fn on_preparator(projector: Projector<T>) -> Self {
        Self {
            subsystem: Subsystem::Preparator,
            projector,
        }
    }

    pub fn lift(&self, composite: &SpaceShape) -> Result<Projector<T>> {
        lift(composite, self.subsystem, &self.projector)
    }
}

/// Lifts a local projector into a bipartite composite space.
pub fn lift<T: Real>(composite: &SpaceShape, side: Subsystem, p: &Projector<T>) -> Result<Projector<T>> {
    check_bipartite(composite)?;
    embed_projector(composite, &[side.factor()], p)
}

pub(crate) fn check_bipartite(shape: &SpaceShape) -> Result<()> {
    if shape.num_factors() != 2 {
        return Err(Error::InvalidArgument(format!(
            "expected a preparator ⊗ object space, got factors {:?}",
            shape.factor_dims()
        )));
    }
    Ok(())
}

pub(crate) fn local_shape(composite: &SpaceShape, side: Subsystem) -> SpaceShape {
    SpaceShape::single(composite.factor_dim(side.factor())).expect("factor dims are positive")
}

/// Composite evolution together with the local evolutions it is claimed to
/// factorize into on the triggering subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizedEvolution<T: Real> {
    u12: Unitary<T>,
    u1: Unitary<T>,
    u2: Unitary<T>,
}

impl<T: Real> FactorizedEvolution<T> {
    /// Checks that `u12` acts on `dim(u1) ⊗ dim(u2)`. Whether it actually
    /// factorizes is a property of the pairing with a trigger; see
    /// [`check_factorization`](super::check_factorization).
    pub fn new(u12: Unitary<T>, u1: Unitary<T>, u2: Unitary<T>) -> Result<Self> {
        let expected = SpaceShape::bipartite(u1.dim(), u2.dim())?;
        expected.expect(u12.shape())?;
        Ok(Self { u12, u1, u2 })
    }

    /// Non-interacting evolution `U₁ ⊗ U₂`.
    pub fn product(u1: Unitary<T>, u2: Unitary<T>) -> Self {
        let u12 = u1.tensor(&u2);
        Self { u12, u1, u2 }
    }

    pub fn identity(composite: &SpaceShape) -> Result<Self> {
        check_bipartite(composite)?;
        Ok(Self::product(
            Unitary::identity(local_shape(composite, Subsystem::Preparator)),
            Unitary::identity(local_shape(composite, Subsystem::Object)),
        ))
    }

    pub fn u12(&self) -> &Unitary<T> {
        &self.u12
    }

    pub fn u1(&self) -> &Unitary<T> {
        &self.u1
    }

    pub fn u2(&self) -> &Unitary<T> {
        &self.u2
    }

    pub fn composite_shape(&self) -> &SpaceShape {
        self.u12.shape()
    }
}

/// The four basic entities of a preparator plus its evolution: the
/// composite state at the initial instant, the preparator observable, the
/// index of the triggering branch, and the composite evolution up to the
/// final instant.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparatorSpec<T: Real> {
    state: DensityOperator<T>,
    observable: SpectralObservable<T>,
    trigger_index: usize,
    evolution: FactorizedEvolution<T>,
    trigger_probability: T,
}

impl<T: Real> PreparatorSpec<T> {
    /// Rejects shape mismatches and triggers that cannot occur
    /// (probability at or below the default `prob` tolerance).
    pub fn new(
        state: DensityOperator<T>,
        observable: SpectralObservable<T>,
        trigger_index: usize,
        evolution: FactorizedEvolution<T>,
    ) -> Result<Self> {
        let composite = state.shape();
        check_bipartite(composite)?;
        local_shape(composite, Subsystem::Preparator).expect(observable.shape())?;
        composite.expect(evolution.composite_shape())?;
        let trigger = observable.projector(trigger_index).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "trigger index {trigger_index} out of range for {} branches",
                observable.len()
            ))
        })?;
        let lifted = lift(composite, Subsystem::Preparator, trigger)?;
        let trigger_probability = probability(&state, &lifted)?;
        if trigger_probability <= Tolerances::<T>::default().prob {
            return Err(Error::ZeroProbability {
                probability: trigger_probability.to_f64_lossy(),
            });
        }
        Ok(Self {
            state,
            observable,
            trigger_index,
            evolution,
            trigger_probability,
        })
    }

    pub fn state(&self) -> &DensityOperator<T> {
        &self.state
    }

    pub fn observable(&self) -> &SpectralObservable<T> {
        &self.observable
    }

    pub fn trigger_index(&self) -> usize {
        self.trigger_index
    }

    /// The triggering projector on the preparator.
    pub fn trigger(&self) -> &Projector<T> {
        self.observable
            .projector(self.trigger_index)
            .expect("index validated on construction")
    }

    /// `P ⊗ 1` on the composite space.
    pub fn lifted_trigger(&self) -> Projector<T> {
        lift(self.composite_shape(), Subsystem::Preparator, self.trigger()).expect("validated shapes")
    }

    pub fn trigger_probability(&self) -> T {
        self.trigger_probability
    }

    pub fn evolution(&self) -> &FactorizedEvolution<T> {
        &self.evolution
    }

    pub fn composite_shape(&self) -> &SpaceShape {
        self.state.shape()
    }

    pub fn object_shape(&self) -> SpaceShape {
        local_shape(self.composite_shape(), Subsystem::Object)
    }

    pub fn preparator_shape(&self) -> SpaceShape {
        local_shape(self.composite_shape(), Subsystem::Preparator)
    }

    /// Same preparator with a different evolution.
    pub fn with_evolution(&self, evolution: FactorizedEvolution<T>) -> Result<Self> {
        Self::new(self.state.clone(), self.observable.clone(), self.trigger_index, evolution)
    }
}
