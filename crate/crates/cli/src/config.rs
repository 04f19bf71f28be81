//! Scenario configuration files.
//!
//! A config is a single JSON object. Complex numbers are written as
//! `[re, im]` pairs. Unknown keys are rejected everywhere.

use std::fmt;
use std::path::Path;

use prepsim_core::models::{SegmentedScreen, SgModification};
use prepsim_core::Tolerances;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub name: String,
    pub model: ModelConfig,
    #[serde(default)]
    pub pipelines: Vec<PipelineName>,
    #[serde(default)]
    pub checks: Vec<CheckName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelConfig {
    SternGerlach(SgConfig),
    HoleIdeal(HoleIdealConfig),
    HoleRealistic(HoleRealisticConfig),
    HoleChain(HoleChainConfig),
    Random(RandomConfig),
}

impl ModelConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::SternGerlach(_) => "stern_gerlach",
            ModelConfig::HoleIdeal(_) => "hole_ideal",
            ModelConfig::HoleRealistic(_) => "hole_realistic",
            ModelConfig::HoleChain(_) => "hole_chain",
            ModelConfig::Random(_) => "random",
        }
    }

    /// The seed that drives any randomness in the model, if there is one.
    pub fn seed(&self) -> Option<u64> {
        match self {
            ModelConfig::Random(r) => Some(r.seed),
            ModelConfig::HoleRealistic(h) if h.phi.is_none() => Some(h.phi_seed.unwrap_or(0)),
            ModelConfig::HoleChain(c) => c.between_seed,
            _ => None,
        }
    }

    /// Replaces the model's seed; models without randomness are unchanged.
    pub fn override_seed(&mut self, seed: u64) {
        match self {
            ModelConfig::Random(r) => r.seed = seed,
            ModelConfig::HoleRealistic(h) if h.phi.is_none() => h.phi_seed = Some(seed),
            ModelConfig::HoleChain(c) if c.between_seed.is_some() => c.between_seed = Some(seed),
            _ => {}
        }
    }
}

pub type Amplitudes = Vec<[f64; 2]>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgConfig {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub grid_n: usize,
    #[serde(default = "default_a_plus")]
    pub a_plus: f64,
    #[serde(default = "default_a_minus")]
    pub a_minus: f64,
    #[serde(default)]
    pub modification: Modification,
    #[serde(default = "default_drift")]
    pub drift: usize,
}

fn default_a_plus() -> f64 {
    1.0
}

fn default_a_minus() -> f64 {
    -1.0
}

fn default_drift() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modification {
    #[default]
    DetectorFirst,
    AnticoincidenceSecond,
    GeometryThird,
}

impl From<Modification> for SgModification {
    fn from(m: Modification) -> Self {
        match m {
            Modification::DetectorFirst => SgModification::DetectorFirst,
            Modification::AnticoincidenceSecond => SgModification::AnticoincidenceSecond,
            Modification::GeometryThird => SgModification::GeometryThird,
        }
    }
}

/// Either `segments` (uniform, one dimension per block) or explicit
/// `segment_dims`. Particle block sizes default to the screen's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScreenConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment_dims: Option<Vec<usize>>,
    #[serde(default = "default_unhit")]
    pub unhit_dim: usize,
    pub hole_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particle_segment_dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particle_unhit_dim: Option<usize>,
}

fn default_unhit() -> usize {
    1
}

impl ScreenConfig {
    pub fn build(&self) -> prepsim_core::Result<SegmentedScreen> {
        let segment_dims = match (&self.segment_dims, self.segments) {
            (Some(d), None) => d.clone(),
            (None, Some(n)) => vec![1; n],
            _ => {
                return Err(prepsim_core::Error::InvalidArgument(
                    "screen: give exactly one of `segments` and `segment_dims`".into(),
                ))
            }
        };
        let particle_dims = self.particle_segment_dims.clone().unwrap_or_else(|| segment_dims.clone());
        SegmentedScreen::new(
            segment_dims,
            self.unhit_dim,
            self.hole_index,
            particle_dims,
            self.particle_unhit_dim.unwrap_or(self.unhit_dim),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleIdealConfig {
    pub screen: ScreenConfig,
    /// Screen state; uniform over all screen dimensions when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Amplitudes>,
    /// Particle state; uniform over all particle dimensions when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<Amplitudes>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleRealisticConfig {
    pub screen: ScreenConfig,
    /// Composite amplitudes, screen index major. A seeded random state is
    /// drawn when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Amplitudes>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleChainConfig {
    pub first: HoleIdealConfig,
    pub second_screen: ScreenConfig,
    /// Fresh state of the second screen; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_psi: Option<Amplitudes>,
    /// Propagation between the holes: a seeded random unitary, or the
    /// identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub between_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomConfig {
    #[serde(default)]
    pub seed: u64,
    pub dims: Vec<[usize; 2]>,
    /// Instances per entry of `dims`, with seeds `seed, seed+1, …`.
    #[serde(default = "default_count")]
    pub count: usize,
}

fn default_count() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineName {
    FirstKind,
    SecondKind,
    RelativeCollapse,
}

impl PipelineName {
    pub fn as_str(self) -> &'static str {
        match self {
            PipelineName::FirstKind => "first_kind",
            PipelineName::SecondKind => "second_kind",
            PipelineName::RelativeCollapse => "relative_collapse",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned())).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Raio,
    Twins,
    Factorization,
    Eq10,
    /// Completeness of the observable, block reconstruction of the
    /// composite ket, and validity of every emitted density operator.
    Structure,
}

impl CheckName {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Raio => "raio",
            CheckName::Twins => "twins",
            CheckName::Factorization => "factorization",
            CheckName::Eq10 => "eq10",
            CheckName::Structure => "structure",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned())).ok()
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raio: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl ScenarioConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let config: ScenarioConfig = serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
            path: origin.to_owned(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        config.validate().map_err(|message| ConfigError::Invalid {
            path: origin.to_owned(),
            message,
        })?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: origin.clone(),
            source,
        })?;
        Self::from_json(&text, &origin)
    }

    /// Schema-level checks that do not need the model builders.
    pub fn validate(&self) -> Result<(), String> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "schema_version: expected {SCHEMA_VERSION}, found {}",
                self.schema_version
            ));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) || self.name.starts_with('.') {
            return Err(format!("name: {:?} is not usable as a file name", self.name));
        }
        if has_duplicates(&self.pipelines) {
            return Err("pipelines: duplicate entry".into());
        }
        if has_duplicates(&self.checks) {
            return Err("checks: duplicate entry".into());
        }
        if let ModelConfig::Random(r) = &self.model {
            if r.dims.is_empty() {
                return Err("model.random.dims: at least one entry required".into());
            }
            if r.count == 0 {
                return Err("model.random.count: must be positive".into());
            }
        }
        if let Some(t) = &self.tolerances {
            let floor = Tolerances::<f64>::minimum_override();
            for (field, value) in [("alg", t.alg), ("raio", t.raio)] {
                if let Some(v) = value {
                    if !v.is_finite() || v < floor {
                        return Err(format!("tolerances.{field}: {v:e} is below the floor {floor:e}"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances<f64> {
        let mut tol = Tolerances::default();
        if let Some(o) = &self.tolerances {
            if let Some(a) = o.alg {
                tol = tol.with_alg(a);
            }
            if let Some(r) = o.raio {
                tol = tol.with_raio(r);
            }
        }
        tol
    }
}

fn has_duplicates<T: Ord + Copy>(items: &[T]) -> bool {
    let mut sorted = items.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).any(|w| w[0] == w[1])
}
