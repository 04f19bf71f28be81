//! Dense complex linear algebra over finite-dimensional composite spaces.

pub mod linalg;
mod operators;
pub mod ops;
pub mod random;
mod shape;
mod states;

pub use linalg::{Matrix, Vector};
pub use operators::{Projector, SpectralObservable, Unitary};
pub use ops::{
    embed_matrix, embed_projector, evolve, lueders_collapse, partial_trace, partial_trace_matrix,
    probability, trace_distance, Collapse, Tensor,
};
pub use shape::SpaceShape;
pub use states::{DensityOperator, Ket};
