//! Stern-Gerlach preparator on a discretized z-grid.
//!
//! Subsystem 1 is the particle's spatial degree of freedom, reduced to
//! `grid_n` points along z: the first half lies above the plane z = 0, the
//! second half below. Subsystem 2 is the spin, with |+,z⟩ at index 0.

use super::bundle::{ExpectedValue, ModelKind, ScenarioBundle, SgModification};
use super::screen::uniform_over;
use crate::algebra::{Ket, Projector, SpaceShape, SpectralObservable, Tensor, Unitary};
use crate::engine::{FactorizedEvolution, PreparatorSpec, RegionEvent};
use crate::error::{Error, Result};
use crate::scalar::{Real, Tolerances, C};

#[derive(Debug, Clone, PartialEq)]
pub struct SgParams<T: Real> {
    /// Amplitude of spin up.
    pub alpha: C<T>,
    /// Amplitude of spin down.
    pub beta: C<T>,
    /// Even number of grid points.
    pub grid_n: usize,
    pub a_plus: T,
    pub a_minus: T,
    pub modification: SgModification,
    /// Cyclic shift applied inside each half-grid between the initial and
    /// final instants (purely spatial evolution).
    pub drift: usize,
}

impl<T: Real> SgParams<T> {
    pub fn new(alpha: C<T>, beta: C<T>, grid_n: usize) -> Self {
        Self {
            alpha,
            beta,
            grid_n,
            a_plus: T::one(),
            a_minus: -T::one(),
            modification: SgModification::DetectorFirst,
            drift: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.alpha.norm_sqr() + self.beta.norm_sqr();
        if (norm - T::one()).abs() > Tolerances::<T>::default().norm {
            return Err(Error::Construction(format!(
                "normalization violated: |alpha|^2 + |beta|^2 = {} (must be 1)",
                norm
            )));
        }
        if self.a_plus == self.a_minus {
            return Err(Error::Construction(format!(
                "eigenvalues must be distinct: a_plus = a_minus = {}",
                self.a_plus
            )));
        }
        if self.grid_n < 2 || !self.grid_n.is_multiple_of(2) {
            return Err(Error::Construction(format!(
                "grid_n must be even and at least 2, got {}",
                self.grid_n
            )));
        }
        Ok(())
    }
}

/// Indices of the upper-halfspace grid points.
pub fn upper_half(grid_n: usize) -> std::ops::Range<usize> {
    0..grid_n / 2
}

pub fn lower_half(grid_n: usize) -> std::ops::Range<usize> {
    grid_n / 2..grid_n
}

/// P₁⁺: indicator of the upper halfspace.
pub fn upper_projector<T: Real>(grid_n: usize) -> Result<Projector<T>> {
    Projector::from_index_range(SpaceShape::single(grid_n)?, upper_half(grid_n))
}

/// P₁⁻: indicator of the lower halfspace.
pub fn lower_projector<T: Real>(grid_n: usize) -> Result<Projector<T>> {
    Projector::from_index_range(SpaceShape::single(grid_n)?, lower_half(grid_n))
}

/// Outgoing upward-moving spatial state |ψ⁺⟩.
pub fn psi_up<T: Real>(grid_n: usize) -> Result<Ket<T>> {
    Ok(uniform_over(SpaceShape::single(grid_n)?, upper_half(grid_n)))
}

/// Outgoing downward-moving spatial state |ψ⁻⟩.
pub fn psi_down<T: Real>(grid_n: usize) -> Result<Ket<T>> {
    Ok(uniform_over(SpaceShape::single(grid_n)?, lower_half(grid_n)))
}

/// Incoming spatial state |ψ⁰⟩.
pub fn psi_incoming<T: Real>(grid_n: usize) -> Result<Ket<T>> {
    Ok(uniform_over(SpaceShape::single(grid_n)?, 0..grid_n))
}

pub fn spin_up<T: Real>() -> Ket<T> {
    Ket::basis(SpaceShape::single(2).expect("qubit"), 0).expect("index 0")
}

pub fn spin_down<T: Real>() -> Ket<T> {
    Ket::basis(SpaceShape::single(2).expect("qubit"), 1).expect("index 1")
}

/// Cyclic shift by `drift` within each half of the grid.
pub fn spatial_drift<T: Real>(grid_n: usize, drift: usize) -> Result<Unitary<T>> {
    let half = grid_n / 2;
    let perm: Vec<usize> = (0..grid_n)
        .map(|i| {
            let base = if i < half { 0 } else { half };
            base + (i - base + drift) % half
        })
        .collect();
    Unitary::permutation(SpaceShape::single(grid_n)?, &perm)
}

/// α|ψ⁺⟩|+,z⟩ + β|ψ⁻⟩|−,z⟩ with A₁ = a₊P₁⁺ + a₋P₁⁻ and trigger P₁⁺.
///
/// The spin does not evolve after the magnet (U₂ = 1); the spatial factor
/// drifts inside each half. The region event for the geometry check is the
/// evolved upper halfspace, on the spatial factor.
pub fn build_sg_scenario<T: Real>(params: &SgParams<T>) -> Result<ScenarioBundle<T>> {
    params.validate()?;
    let n = params.grid_n;
    let up = psi_up::<T>(n)?;
    let down = psi_down::<T>(n)?;
    let amps = up.tensor(&spin_up()).amplitudes() * params.alpha
        + down.tensor(&spin_down()).amplitudes() * params.beta;
    let composite = SpaceShape::bipartite(n, 2)?;
    let phi = Ket::new(composite, amps)?;

    let p_up = upper_projector::<T>(n)?;
    let p_down = lower_projector::<T>(n)?;
    let observable = SpectralObservable::new(
        SpaceShape::single(n)?,
        vec![(params.a_plus, p_up.clone()), (params.a_minus, p_down)],
    )?;
    let u1 = spatial_drift::<T>(n, params.drift)?;
    let u2 = Unitary::identity(SpaceShape::single(2)?);
    let region = RegionEvent::on_preparator(p_up.conjugated_by(&u1)?);
    let evolution = FactorizedEvolution::product(u1, u2);
    let spec = PreparatorSpec::new(phi.to_density(), observable, 0, evolution).map_err(|e| match e {
        Error::ZeroProbability { .. } => Error::Construction(format!("trigger cannot occur: {e}")),
        other => other,
    })?;
    let spin_up_projector = Projector::from_ket(&spin_up());
    let trigger_probability = spec.trigger_probability();
    Ok(ScenarioBundle {
        model: ModelKind::SternGerlach(params.modification),
        region: Some(region),
        twin: Some(spin_up_projector.clone()),
        probe: spin_up_projector,
        composite_ket: Some(phi),
        screen: None,
        prepared_state: spin_up::<T>().to_density(),
        cumulative_probability: trigger_probability,
        expected: vec![ExpectedValue {
            name: "trigger_probability".into(),
            value: params.alpha.norm_sqr().to_f64_lossy(),
            source: "|alpha|^2 from the Born rule on the coupled state".into(),
        }],
        spec,
    })
}
