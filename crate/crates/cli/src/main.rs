mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use output::{CliError, CliResult};

/// Best approximations, transference certificates, Khintchine shifts and
/// Monte Carlo probes for inhomogeneous Diophantine approximation.
///
/// Every run writes its results and a manifest.json into --out. Errors are
/// printed as JSON on stderr; exit codes are 2 for invalid input, 3 for a
/// failed mathematical precondition, 4 for an exceeded budget, 5 for
/// exhausted precision and 6 for an internal contradiction.
#[derive(Parser, Debug)]
#[command(name = "dioph", version, about, long_about)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Working precision in bits for irrational entries (at least 64).
    #[arg(long, global = true, default_value_t = 256)]
    pub precision: u32,
    /// Maximum number of lattice points one enumeration may visit (at least 1000).
    #[arg(long, global = true, default_value_t = 50_000_000)]
    pub budget: u128,
    /// Seed of the counter-based sample streams.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "dioph-out")]
    #[serde(skip)]
    pub out: PathBuf,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Best approximation sequence of a matrix up to --tmax.
    BestApprox(BestApproxArgs),
    /// Cassels certificate or Jarník uniform check.
    Transfer(TransferArgs),
    /// Khintchine's shift construction and its verification.
    ConstructEta(ConstructEtaArgs),
    /// Monte Carlo measure surrogates.
    Measure(MeasureArgs),
    /// Asymptotic directions and the exceptional-point scan.
    Directions(DirectionsArgs),
    /// Tables of approximating functions, duals and series verdicts.
    Functions(FunctionsArgs),
    /// Re-run the command recorded in a manifest.
    Rerun(RerunArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct BestApproxArgs {
    /// Matrix file: {"n": .., "m": .., "entries": [["golden", "1/3"], ..]}.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub tmax: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransferMode {
    Cassels,
    Jarnik,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JarnikCaseArg {
    AllLarge,
    SampledUnbounded,
}

#[derive(Args, Debug, Serialize)]
pub struct TransferArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, value_enum, default_value = "cassels")]
    pub mode: TransferMode,
    /// Shift, comma separated (e.g. "1/2" or "0.3,sqrt(2)").
    #[arg(long)]
    pub eta: String,
    /// Cassels: the bound Y on |y|.
    #[arg(long = "Y", alias = "y-bound")]
    pub y_bound: Option<String>,
    /// Cassels: the bound Q on |q|; defaults to the smallest admissible Q.
    #[arg(long = "Q", alias = "q-bound")]
    pub q_bound: Option<String>,
    /// Jarník: the function psi, as a literal such as "f1:c=1/20".
    #[arg(long)]
    pub psi: Option<String>,
    #[arg(long, default_value_t = 10.0)]
    pub t_lo: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub t_hi: f64,
    #[arg(long, value_enum, default_value = "all-large")]
    pub case: JarnikCaseArg,
}

#[derive(Args, Debug, Serialize)]
pub struct ConstructEtaArgs {
    /// Matrix file; the golden ratio when omitted.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    pub tmax: u64,
    #[arg(long, default_value = "f1")]
    pub phi: String,
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    /// Minimum index gap; 2B when omitted.
    #[arg(long)]
    pub gap: Option<usize>,
    /// Explicit 1-based record indices instead of the greedy choice.
    #[arg(long, value_delimiter = ',')]
    pub indices: Option<Vec<usize>>,
    /// Verification range; the control zone when omitted.
    #[arg(long)]
    pub t_lo: Option<u64>,
    #[arg(long)]
    pub t_hi: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureMode {
    Uniform,
    Asymptotic,
    Projection,
}

#[derive(Args, Debug, Serialize)]
pub struct MeasureArgs {
    #[arg(long, value_enum)]
    pub mode: MeasureMode,
    /// Matrix file; the golden ratio when omitted.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Right-hand side g, e.g. "power_log:1,0:c=0.01".
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = 5)]
    pub t_lo: u64,
    #[arg(long, default_value_t = 50)]
    pub t_hi: u64,
    /// Uniform mode: explicit curve checkpoints instead of a log grid.
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<u64>>,
    /// Asymptotic mode: required number of solutions.
    #[arg(long, default_value_t = 3)]
    pub k_min: u64,
    /// Projection mode: the integer vector u.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u: Option<Vec<i64>>,
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    /// Half-side of the sampling box.
    #[arg(long, default_value_t = 0.5)]
    pub radius: f64,
    /// Center of the box (torus sampling) or anchor of the subspace.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub center: Option<Vec<f64>>,
    /// Basis of the sampling subspace, vectors separated by ';'.
    #[arg(long)]
    pub basis: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct DirectionsArgs {
    /// Matrix file; the golden ratio when omitted.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    pub tmax: u64,
    #[arg(long, default_value_t = 0.5)]
    pub tail: f64,
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
    /// Direction v for the exceptional-point scan, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub exceptional: Option<Vec<String>>,
    #[arg(long, default_value_t = 0.5)]
    pub xi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct FunctionsArgs {
    /// Function literal, e.g. "power_log:2,1".
    #[arg(long)]
    pub f: String,
    /// Add the dual and its closed asymptotic form.
    #[arg(long)]
    pub dual: bool,
    #[arg(long, default_value_t = 10.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1e6)]
    pub t_max: f64,
    #[arg(long, default_value_t = 11)]
    pub points: usize,
    /// Partial sums run up to this index.
    #[arg(long, default_value_t = 1_000_000)]
    pub series_n: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct RerunArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

fn validate(c: &Common) -> CliResult<()> {
    if c.precision < 64 {
        return Err(CliError::validation(format!("--precision {} is below 64 bits", c.precision)));
    }
    if c.budget < 1000 {
        return Err(CliError::validation(format!("--budget {} is below 1000", c.budget)));
    }
    if c.threads == Some(0) {
        return Err(CliError::validation("--threads must be at least 1"));
    }
    Ok(())
}

/// Arguments as recorded in the manifest: everything but the program name
/// and the output directory, so a rerun elsewhere reproduces the manifest.
fn recorded_argv(raw: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = raw.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--out" {
            it.next();
        } else if !a.starts_with("--out=") {
            out.push(a.clone());
        }
    }
    out
}

fn dispatch(cli: Cli, argv: Vec<String>) -> CliResult<()> {
    validate(&cli.common)?;
    let threads = cli.common.threads;
    let common = cli.common;
    let work = move || match cli.command {
        Command::BestApprox(a) => commands::best_approx(&common, &a, &argv),
        Command::Transfer(a) => commands::transfer(&common, &a, &argv),
        Command::ConstructEta(a) => commands::construct_eta(&common, &a, &argv),
        Command::Measure(a) => commands::measure(&common, &a, &argv),
        Command::Directions(a) => commands::directions(&common, &a, &argv),
        Command::Functions(a) => commands::functions(&common, &a, &argv),
        Command::Rerun(a) => rerun(&common, &a),
    };
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::validation(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

fn rerun(common: &Common, a: &RerunArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&a.manifest).map_err(|e| CliError::io(&a.manifest, e))?;
    let m: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::validation(format!("manifest JSON: {e}")))?;
    if m["schema"] != output::MANIFEST_SCHEMA {
        return Err(CliError::validation(format!("unsupported manifest schema {}", m["schema"])));
    }
    let argv: Vec<String> = m["argv"]
        .as_array()
        .ok_or_else(|| CliError::validation("manifest has no argv"))?
        .iter()
        .map(|v| v.as_str().map(String::from).ok_or_else(|| CliError::validation("argv entries must be strings")))
        .collect::<CliResult<_>>()?;
    let full: Vec<String> = std::iter::once("dioph".to_string())
        .chain(argv.iter().cloned())
        .chain(["--out".to_string(), common.out.display().to_string()])
        .collect();
    let cli = Cli::try_parse_from(&full).map_err(|e| CliError::validation(format!("manifest argv: {e}")))?;
    if matches!(cli.command, Command::Rerun(_)) {
        return Err(CliError::validation("a manifest cannot record a rerun"));
    }
    dispatch(cli, argv)
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let argv = recorded_argv(&raw);
    match dispatch(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code as u8)
        }
    }
}
