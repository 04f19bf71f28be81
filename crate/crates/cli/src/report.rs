//! Machine-readable run reports and the human-readable summary table.

use std::fmt::Write as _;

use prepsim_core::algebra::Matrix;
use prepsim_core::Tolerances;
use serde::{Deserialize, Serialize};

use crate::config::SCHEMA_VERSION;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Row-major complex matrix, entries as `[re, im]`.
pub type ComplexMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_rows(m: &Matrix<f64>) -> ComplexMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceRecord {
    pub alg: f64,
    pub norm: f64,
    pub prob: f64,
    pub raio: f64,
}

impl From<&Tolerances<f64>> for ToleranceRecord {
    fn from(t: &Tolerances<f64>) -> Self {
        Self {
            alg: t.alg,
            norm: t.norm,
            prob: t.prob,
            raio: t.raio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Passes when `measured <= tolerance`.
    AtMost,
    /// Passes when `measured > tolerance` (negative controls).
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub quantity: String,
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Measurement {
    /// A missing measurement never passes.
    pub fn new(quantity: impl Into<String>, measured: Option<f64>, tolerance: f64, bound: Bound) -> Self {
        let passed = match (measured, bound) {
            (Some(m), Bound::AtMost) => m <= tolerance,
            (Some(m), Bound::Above) => m > tolerance,
            (None, _) => false,
        };
        Self {
            quantity: quantity.into(),
            measured,
            tolerance,
            bound,
            passed,
        }
    }

    pub fn at_most(quantity: impl Into<String>, measured: Option<f64>, tolerance: f64) -> Self {
        Self::new(quantity, measured, tolerance, Bound::AtMost)
    }

    pub fn is_consistent(&self) -> bool {
        *self == Self::new(self.quantity.clone(), self.measured, self.tolerance, self.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub measurements: Vec<Measurement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl CheckReport {
    pub fn from_measurements(name: &str, measurements: Vec<Measurement>, diagnostic: Option<String>) -> Self {
        Self {
            name: name.to_owned(),
            passed: !measurements.is_empty() && measurements.iter().all(|m| m.passed),
            measurements,
            diagnostic,
        }
    }

    pub fn failed(name: &str, diagnostic: String) -> Self {
        Self {
            name: name.to_owned(),
            passed: false,
            measurements: Vec::new(),
            diagnostic: Some(diagnostic),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_state: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_probability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseDistance {
    pub a: String,
    pub b: String,
    pub trace_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub pairwise: Vec<PairwiseDistance>,
    pub max_distance: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probabilities {
    pub trigger: f64,
    pub cumulative: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twin_preparator: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twin_object: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub dims: [usize; 2],
    pub probabilities: Probabilities,
    /// Closed-form values the builder predicts, compared against the run.
    pub expected: Vec<Measurement>,
    pub pipelines: Vec<PipelineReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<Agreement>,
    pub checks: Vec<CheckReport>,
}

impl InstanceReport {
    /// (name, passed) of every verdict in the instance.
    pub fn verdicts(&self) -> Vec<(String, bool)> {
        let mut out: Vec<(String, bool)> = self
            .expected
            .iter()
            .map(|m| (format!("expected:{}", m.quantity), m.passed))
            .collect();
        if let Some(a) = &self.agreement {
            out.push(("pipeline_agreement".into(), a.passed));
        }
        out.extend(self.checks.iter().map(|c| (c.name.clone(), c.passed)));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub instances: usize,
    pub verdicts_passed: usize,
    pub verdicts_total: usize,
    pub max_pairwise_distance: Option<f64>,
    pub min_trigger_probability: Option<f64>,
    pub max_trigger_probability: Option<f64>,
    pub failing: Vec<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub scenario: String,
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerances: ToleranceRecord,
    pub pipelines: Vec<String>,
    pub checks: Vec<String>,
    pub instances: Vec<InstanceReport>,
    pub summary: Summary,
    pub duration_seconds: f64,
}

impl RunReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        scenario: String,
        model: String,
        seed: Option<u64>,
        tolerances: &Tolerances<f64>,
        pipelines: Vec<String>,
        checks: Vec<String>,
        instances: Vec<InstanceReport>,
        duration_seconds: f64,
    ) -> Self {
        let summary = summarize(&instances);
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_owned(),
            scenario,
            model,
            seed,
            tolerances: tolerances.into(),
            pipelines,
            checks,
            instances,
            summary,
            duration_seconds,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports contain only finite numbers");
        s.push('\n');
        s
    }
}

fn summarize(instances: &[InstanceReport]) -> Summary {
    let mut passed = 0;
    let mut total = 0;
    let mut failing = Vec::new();
    for inst in instances {
        for (name, ok) in inst.verdicts() {
            total += 1;
            if ok {
                passed += 1;
            } else {
                let name = if instances.len() > 1 { format!("{}:{name}", inst.label) } else { name };
                failing.push(name);
            }
        }
    }
    let distances = instances
        .iter()
        .filter_map(|i| i.agreement.as_ref().and_then(|a| a.max_distance));
    let triggers = instances.iter().map(|i| i.probabilities.trigger);
    Summary {
        instances: instances.len(),
        verdicts_passed: passed,
        verdicts_total: total,
        max_pairwise_distance: distances.reduce(f64::max),
        min_trigger_probability: triggers.clone().reduce(f64::min),
        max_trigger_probability: triggers.reduce(f64::max),
        failing,
        passed: passed == total,
    }
}

/// Aggregate written by `batch`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub schema_version: u32,
    pub tool_version: String,
    pub scenarios: Vec<BatchEntry>,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchEntry {
    pub config: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdicts_passed: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdicts_total: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn fmt_prob(reports: &RunReport) -> String {
    match (reports.summary.min_trigger_probability, reports.summary.max_trigger_probability) {
        (Some(lo), Some(hi)) if lo == hi => format!("{lo:.6}"),
        (Some(lo), Some(hi)) => format!("{lo:.3}..{hi:.3}"),
        _ => "-".into(),
    }
}

/// Columns: scenario, pipeline, trigger-prob, max-pairwise-distance,
/// checks passed/total.
pub fn summary_table(reports: &[&RunReport]) -> String {
    let header = ["scenario", "pipeline", "trigger-prob", "max-pairwise-distance", "checks"];
    let mut rows: Vec<[String; 5]> = Vec::new();
    for r in reports {
        let pipelines = if r.pipelines.is_empty() { "-".to_owned() } else { r.pipelines.join(",") };
        let dist = r
            .summary
            .max_pairwise_distance
            .map_or_else(|| "-".to_owned(), |d| format!("{d:.3e}"));
        rows.push([
            r.scenario.clone(),
            pipelines,
            fmt_prob(r),
            dist,
            format!("{}/{}", r.summary.verdicts_passed, r.summary.verdicts_total),
        ]);
    }
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[&str]| {
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            let _ = write!(out, "{cell:<w$}");
        }
        let trimmed = out.trim_end().len();
        out.truncate(trimmed);
        out.push('\n');
    };
    line(&mut out, &header);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    line(&mut out, &rule.iter().map(String::as_str).collect::<Vec<_>>());
    for row in &rows {
        line(&mut out, &row.iter().map(String::as_str).collect::<Vec<_>>());
    }
    out
}
