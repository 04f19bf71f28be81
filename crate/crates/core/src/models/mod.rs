//! Concrete preparators: Stern-Gerlach, hole in the screen (ideal,
//! realistic, two in succession) and a seeded random generator.

mod bundle;
mod hole;
mod random;
mod screen;
pub mod stern_gerlach;

pub use bundle::{ExpectedValue, ModelKind, ScenarioBundle, SgModification, StructureReport};
pub use hole::{build_hole_scenario_ideal, build_hole_scenario_realistic, chain_two_holes};
pub use random::{generate_random_scenario, MAX_COMPOSITE_DIM, MIN_TRIGGER_PROBABILITY};
pub use screen::SegmentedScreen;
pub use stern_gerlach::{build_sg_scenario, SgParams};
