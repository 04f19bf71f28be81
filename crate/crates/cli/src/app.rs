//! `run` and `batch` with their exit-code contract:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | every verdict passed |
//! | 1 | at least one verification failed |
//! | 2 | unreadable or invalid configuration, empty batch directory, I/O failure |
//! | 3 | a scenario could not be constructed |

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{CheckName, ModelConfig, PipelineName, RandomConfig, ScenarioConfig, SCHEMA_VERSION};
use crate::report::{summary_table, BatchEntry, BatchSummary, RunReport, TOOL_VERSION};
use crate::runner::run_scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CONSTRUCTION: i32 = 3;

pub const OUT_ENV: &str = "PREPSIM_OUT";
const DEFAULT_OUT: &str = "prepsim-reports";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Json,
}

/// Settings shared by both commands.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: Option<u64>,
    pub tolerance_raio: Option<f64>,
    pub pipelines: Option<Vec<PipelineName>>,
    pub checks: Option<Vec<CheckName>>,
}

impl Options {
    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    fn apply(&self, config: &mut ScenarioConfig) -> Result<(), String> {
        if let Some(seed) = self.seed {
            config.model.override_seed(seed);
        }
        if let Some(p) = &self.pipelines {
            config.pipelines = p.clone();
        }
        if let Some(c) = &self.checks {
            config.checks = c.clone();
        }
        if let Some(raio) = self.tolerance_raio {
            config.tolerances.get_or_insert(crate::config::ToleranceOverrides { alg: None, raio: None }).raio =
                Some(raio);
        }
        config.validate()
    }
}

/// Ad hoc random scenario described entirely by flags.
#[derive(Debug, Clone)]
pub struct AdHoc {
    pub model: String,
    pub dims: Vec<[usize; 2]>,
    pub count: usize,
    pub name: Option<String>,
}

impl AdHoc {
    fn into_config(self, seed: Option<u64>) -> Result<ScenarioConfig, String> {
        if self.model != "random" {
            return Err(format!(
                "--model {}: only `random` can be described by flags; use a config file",
                self.model
            ));
        }
        if self.dims.is_empty() {
            return Err("--dims is required with --model random".into());
        }
        let seed = seed.unwrap_or(0);
        let name = self.name.unwrap_or_else(|| {
            let dims: Vec<String> = self.dims.iter().map(|[a, b]| format!("{a}x{b}")).collect();
            format!("random-{}-seed{seed}", dims.join("-"))
        });
        Ok(ScenarioConfig {
            schema_version: SCHEMA_VERSION,
            name,
            model: ModelConfig::Random(RandomConfig {
                seed,
                dims: self.dims,
                count: self.count,
            }),
            pipelines: Vec::new(),
            checks: Vec::new(),
            tolerances: None,
        })
    }
}

enum Outcome {
    Report(Box<RunReport>, PathBuf),
    Failed { code: i32, message: String },
}

impl Outcome {
    fn code(&self) -> i32 {
        match self {
            Outcome::Report(r, _) if r.passed() => EXIT_OK,
            Outcome::Report(..) => EXIT_VERIFICATION,
            Outcome::Failed { code, .. } => *code,
        }
    }
}

fn load(path: &Path, opts: &Options) -> Result<ScenarioConfig, String> {
    let mut config = ScenarioConfig::load(path).map_err(|e| e.to_string())?;
    opts.apply(&mut config).map_err(|m| format!("{}: {m}", path.display()))?;
    Ok(config)
}

fn execute(config: &ScenarioConfig, out: &Path) -> Outcome {
    match run_scenario(config) {
        Ok(report) => {
            let path = out.join(format!("{}.json", config.name));
            if let Err(e) = std::fs::write(&path, report.to_json()) {
                return Outcome::Failed {
                    code: EXIT_PARSE,
                    message: format!("{}: {e}", path.display()),
                };
            }
            Outcome::Report(Box::new(report), path)
        }
        Err(e) => Outcome::Failed {
            code: EXIT_CONSTRUCTION,
            message: e.to_string(),
        },
    }
}

fn report_failure(report: &RunReport) {
    const SHOWN: usize = 10;
    let failing = &report.summary.failing;
    let mut list = failing.iter().take(SHOWN).cloned().collect::<Vec<_>>().join(", ");
    if failing.len() > SHOWN {
        list.push_str(&format!(", and {} more", failing.len() - SHOWN));
    }
    eprintln!("verification failed: scenario `{}`: {list}", report.scenario);
}

fn prepare_out(out: &Path) -> Result<(), i32> {
    std::fs::create_dir_all(out).map_err(|e| {
        eprintln!("error: cannot create output directory {}: {e}", out.display());
        EXIT_PARSE
    })
}

pub fn run(config_path: Option<&Path>, adhoc: Option<AdHoc>, opts: &Options) -> i32 {
    let config = match (config_path, adhoc) {
        (Some(path), _) => load(path, opts),
        (None, Some(a)) => a.into_config(opts.seed).and_then(|mut c| opts.apply(&mut c).map(|_| c)),
        (None, None) => Err("either a config file or --model is required".into()),
    };
    let config = match config {
        Ok(c) => c,
        Err(message) => {
            eprintln!("error: {message}");
            return EXIT_PARSE;
        }
    };
    let out = opts.out_dir();
    if let Err(code) = prepare_out(&out) {
        return code;
    }
    let outcome = execute(&config, &out);
    match &outcome {
        Outcome::Report(report, _) => {
            match opts.format {
                Format::Table => print!("{}", summary_table(&[report])),
                Format::Json => print!("{}", report.to_json()),
            }
            if !report.passed() {
                report_failure(report);
            }
        }
        Outcome::Failed { message, .. } => eprintln!("error: {message}"),
    }
    outcome.code()
}

pub fn batch(dir: &Path, parallelism: usize, opts: &Options) -> i32 {
    let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
            .collect(),
        Err(e) => {
            eprintln!("error: {}: {e}", dir.display());
            return EXIT_PARSE;
        }
    };
    files.sort();
    if files.is_empty() {
        eprintln!("error: {}: no *.json configs found", dir.display());
        return EXIT_PARSE;
    }
    let out = opts.out_dir();
    if let Err(code) = prepare_out(&out) {
        return code;
    }

    let mut seen = HashSet::new();
    let loaded: Vec<Result<ScenarioConfig, String>> = files
        .iter()
        .map(|f| {
            load(f, opts).and_then(|c| {
                if seen.insert(c.name.clone()) {
                    Ok(c)
                } else {
                    Err(format!("{}: duplicate scenario name `{}`", f.display(), c.name))
                }
            })
        })
        .collect();

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(parallelism.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_PARSE;
        }
    };
    let outcomes: Vec<Outcome> = pool.install(|| {
        loaded
            .par_iter()
            .map(|c| match c {
                Ok(config) => execute(config, &out),
                Err(message) => Outcome::Failed {
                    code: EXIT_PARSE,
                    message: message.clone(),
                },
            })
            .collect()
    });

    let mut entries = Vec::with_capacity(files.len());
    let mut reports = Vec::new();
    for ((file, config), outcome) in files.iter().zip(&loaded).zip(&outcomes) {
        let code = outcome.code();
        let mut entry = BatchEntry {
            config: file.display().to_string(),
            scenario: config.as_ref().ok().map(|c| c.name.clone()),
            report: None,
            exit_code: code,
            verdicts_passed: None,
            verdicts_total: None,
            error: None,
        };
        match outcome {
            Outcome::Report(report, path) => {
                entry.report = path.file_name().map(|n| n.to_string_lossy().into_owned());
                entry.verdicts_passed = Some(report.summary.verdicts_passed);
                entry.verdicts_total = Some(report.summary.verdicts_total);
                if !report.passed() {
                    report_failure(report);
                }
                reports.push(report.as_ref());
            }
            Outcome::Failed { message, .. } => {
                eprintln!("error: {message}");
                entry.error = Some(message.clone());
            }
        }
        entries.push(entry);
    }
    let exit_code = entries.iter().map(|e| e.exit_code).find(|&c| c != EXIT_OK).unwrap_or(EXIT_OK);
    let summary = BatchSummary {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_owned(),
        scenarios: entries,
        exit_code,
    };
    let text = serde_json::to_string_pretty(&summary).expect("summary is plain data") + "\n";
    if let Err(e) = std::fs::write(out.join("summary.json"), &text) {
        eprintln!("error: cannot write summary: {e}");
        return EXIT_PARSE;
    }
    match opts.format {
        Format::Table => print!("{}", summary_table(&reports)),
        Format::Json => print!("{text}"),
    }
    exit_code
}
