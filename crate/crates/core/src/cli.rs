//! Command-line front end. Exit codes: 0 success, 1 analysis failure, 2 usage error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::attack::ErrorLayout;
use crate::mc::{compare_to_analytic, simulate, SimConfig, WChoice};
use crate::optimize::{
    critical_disturbance, critical_disturbance_with, d_c_closed_form, Method, DEFAULT_DC_TOL,
};
use crate::protocol::ProtocolSpec;
use crate::table::{round_json, CurveTable, SCHEMA};
use crate::verify::verify_attack;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "mub-eve",
    version,
    about = "Optimal symmetric eavesdropping on MUB qudit QKD"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate I_AB and optimal I_AE over a disturbance grid.
    Curves(CurvesArgs),
    /// Locate the critical disturbance.
    Critical(CriticalArgs),
    /// Construct one attack and audit it.
    Verify(VerifyArgs),
    /// Monte Carlo session compared against the closed forms.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ProtocolArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 2)]
    pub bases: usize,
}

impl ProtocolArgs {
    fn spec(&self) -> Result<ProtocolSpec, CliError> {
        ProtocolSpec::new(self.dim, self.bases).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayoutArg {
    CyclicShift,
    Listing,
}

impl From<LayoutArg> for ErrorLayout {
    fn from(l: LayoutArg) -> Self {
        match l {
            LayoutArg::CyclicShift => ErrorLayout::CyclicShift,
            LayoutArg::Listing => ErrorLayout::Listing,
        }
    }
}

/// `auto` or an explicit overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WArg(pub WChoice);

impl FromStr for WArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(WArg(WChoice::Auto));
        }
        s.parse::<f64>()
            .ok()
            .filter(|w| w.is_finite())
            .map(|w| WArg(WChoice::Value(w)))
            .ok_or_else(|| format!("expected `auto` or a real number, got `{s}`"))
    }
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[arg(long, default_value_t = 0.0)]
    pub d_min: f64,
    /// Defaults to (dim-1)/dim.
    #[arg(long)]
    pub d_max: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Leave the wall-clock timestamp out of the metadata.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Args)]
pub struct CriticalArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[arg(long, default_value_t = DEFAULT_DC_TOL)]
    pub tol: f64,
    /// Also bisect with a dense scan over w, reported as `D_c_scan`.
    #[arg(long)]
    pub scan: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[arg(long)]
    pub disturbance: f64,
    #[arg(long, default_value = "auto")]
    pub w: WArg,
    #[arg(long, value_enum, default_value_t = LayoutArg::CyclicShift)]
    pub layout: LayoutArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[arg(long)]
    pub disturbance: f64,
    #[arg(long, default_value = "auto")]
    pub w: WArg,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub rounds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..4096))]
    pub shards: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failure(e)
    }
}

fn failure(e: crate::Error) -> CliError {
    CliError::Failure(e.into())
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .context("cannot write stdout")
        }
    }
}

fn emit_json(out: Option<&Path>, mut doc: Value) -> anyhow::Result<()> {
    round_json(&mut doc);
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    emit(out, &text)
}

fn metadata(params: Value, timestamp: bool) -> Value {
    let mut meta = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "parameters": params,
    });
    if timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        meta["timestamp_unix"] = json!(secs);
    }
    meta
}

fn cmd_curves(args: &CurvesArgs) -> Result<i32, CliError> {
    let spec = args.protocol.spec()?;
    let d_max = args.d_max.unwrap_or_else(|| spec.max_disturbance());
    let table = CurveTable::compute(spec, args.d_min, d_max, args.steps)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    match args.format {
        Format::Csv => emit(args.out.as_deref(), &table.to_csv())?,
        Format::Json => {
            let params = json!({
                "dim": spec.dim(),
                "bases": spec.bases_count(),
                "d_min": args.d_min,
                "d_max": d_max,
                "steps": args.steps,
            });
            emit_json(
                args.out.as_deref(),
                table.to_json(metadata(params, !args.no_timestamp)),
            )?
        }
    }
    Ok(EXIT_OK)
}

fn cmd_critical(args: &CriticalArgs) -> Result<i32, CliError> {
    let spec = args.protocol.spec()?;
    if !(args.tol > 0.0) {
        return Err(CliError::Usage(format!(
            "tol must be > 0, got {}",
            args.tol
        )));
    }
    let point = critical_disturbance(&spec, args.tol).map_err(failure)?;
    let mut doc = json!({
        "schema": SCHEMA,
        "dim": spec.dim(),
        "bases": spec.bases_count(),
        "D_c_bisection": point.critical,
        "gap_at_Dc": point.gap_at_dc,
    });
    if !spec.is_three_basis() {
        doc["D_c_closed_form"] = json!(d_c_closed_form(spec.dim()).map_err(failure)?);
    }
    if args.scan {
        let scan = critical_disturbance_with(&spec, args.tol, Method::GridScan).map_err(failure)?;
        doc["D_c_scan"] = json!(scan.critical);
    }
    emit_json(args.out.as_deref(), doc)?;
    Ok(EXIT_OK)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let spec = args.protocol.spec()?;
    let w = args.w.0.resolve(&spec, args.disturbance);
    let report = match w {
        Ok(w) => verify_attack(&spec, args.disturbance, w, args.layout.into()),
        // an unresolvable `auto` is itself a domain failure
        Err(_) => verify_attack(&spec, args.disturbance, f64::NAN, args.layout.into()),
    };
    let mut doc = serde_json::to_value(&report).context("serializing report")?;
    doc["schema"] = json!(SCHEMA);
    emit_json(args.out.as_deref(), doc)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_simulate(args: &SimulateArgs) -> Result<i32, CliError> {
    let spec = args.protocol.spec()?;
    let config = SimConfig::new(spec, args.disturbance, args.w.0, args.rounds, args.seed)
        .with_shards(args.shards as usize);
    let stats = simulate(&config).map_err(failure)?;
    let verdict = compare_to_analytic(&stats, &spec, args.disturbance, stats.w).map_err(failure)?;
    let doc = json!({
        "schema": SCHEMA,
        "stats": stats,
        "verdict": verdict,
    });
    emit_json(args.out.as_deref(), doc)?;
    Ok(if verdict.pass { EXIT_OK } else { EXIT_FAILURE })
}

/// Execute a parsed command and return its exit code.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Curves(a) => cmd_curves(a),
        Command::Critical(a) => cmd_critical(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

/// Parse `args` (program name first), run, and map everything to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mub-eve: {e}");
            e.exit_code()
        }
    }
}
