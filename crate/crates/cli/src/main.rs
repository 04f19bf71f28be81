use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use prepsim_cli::app::{self, AdHoc, Format, Options};
use prepsim_cli::config::{CheckName, PipelineName};

#[derive(Parser)]
#[command(name = "prepsim", version, about = "Run quantum preparation scenarios and verify their pipelines")]
struct Cli {
    /// Directory for reports (falls back to $PREPSIM_OUT, then ./prepsim-reports).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every random part of the scenario.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the tolerance used for state equalities.
    #[arg(long, global = true)]
    tolerance_raio: Option<f64>,
    /// What to print on standard output.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
    /// Pipelines to run, replacing the config's list.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_pipeline)]
    pipelines: Option<Vec<PipelineName>>,
    /// Checks to run, replacing the config's list.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_check)]
    checks: Option<Vec<CheckName>>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a config file, or a random one described by flags.
    Run {
        #[arg(conflicts_with_all = ["model", "dims"])]
        config: Option<PathBuf>,
        /// Model for a flag-only run (only `random`).
        #[arg(long)]
        model: Option<String>,
        /// Dimensions as d1,d2; repeat for several.
        #[arg(long, value_parser = parse_dims)]
        dims: Vec<[usize; 2]>,
        /// Instances per dimension pair.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Scenario name for a flag-only run.
        #[arg(long)]
        name: Option<String>,
    },
    /// Run every *.json config in a directory.
    Batch {
        dir: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        parallelism: u64,
    },
}

fn parse_pipeline(s: &str) -> Result<PipelineName, String> {
    PipelineName::parse(s).ok_or_else(|| format!("unknown pipeline `{s}`"))
}

fn parse_check(s: &str) -> Result<CheckName, String> {
    CheckName::parse(s).ok_or_else(|| format!("unknown check `{s}`"))
}

fn parse_dims(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s.split_once([',', 'x']).ok_or("expected d1,d2")?;
    let a = a.trim().parse().map_err(|e| format!("d1: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("d2: {e}"))?;
    Ok([a, b])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        out: cli.out,
        format: match cli.format {
            FormatArg::Json => Format::Json,
            FormatArg::Table => Format::Table,
        },
        seed: cli.seed,
        tolerance_raio: cli.tolerance_raio,
        pipelines: cli.pipelines,
        checks: cli.checks,
    };
    let code = match cli.command {
        Command::Run {
            config,
            model,
            dims,
            count,
            name,
        } => {
            let adhoc = model.map(|model| AdHoc { model, dims, count, name });
            app::run(config.as_deref(), adhoc, &opts)
        }
        Command::Batch { dir, parallelism } => app::batch(&dir, parallelism as usize, &opts),
    };
    ExitCode::from(code as u8)
}
