//! Finite-dimensional quantum preparation simulator.
//!
//! A preparation is described by a preparator-plus-object state, a
//! preparator observable, one of its spectral projectors (the triggering
//! event) and the composite evolution. The [`engine`] computes the
//! conditional object state and checks that the first-kind, second-kind and
//! relative-collapse descriptions of a preparation coincide. The [`models`]
//! module builds the Stern-Gerlach and hole-in-the-screen preparators plus
//! random admissible scenarios.
//!
//! Everything is generic over the real scalar type ([`Real`]); the `*64`
//! aliases below fix it to `f64`.

pub mod algebra;
pub mod engine;
mod error;
pub mod models;
mod scalar;

pub use error::{Error, Result};
pub use scalar::{Real, Tolerances, C};

pub type Ket64 = algebra::Ket<f64>;
pub type DensityOperator64 = algebra::DensityOperator<f64>;
pub type Projector64 = algebra::Projector<f64>;
pub type Unitary64 = algebra::Unitary<f64>;
pub type SpectralObservable64 = algebra::SpectralObservable<f64>;
pub type PreparatorSpec64 = engine::PreparatorSpec<f64>;
pub type ScenarioBundle64 = models::ScenarioBundle<f64>;

pub type Ket32 = algebra::Ket<f32>;
pub type DensityOperator32 = algebra::DensityOperator<f32>;
pub type PreparatorSpec32 = engine::PreparatorSpec<f32>;
