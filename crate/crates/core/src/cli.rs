//! The `darkpool` command line: `toy`, `solve`, `simulate` and `boundaries`.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration or artifact
//! error, 3 stability refusal, 4 too many simulated paths left the grid.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::Serialize;
use serde_json::json;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::model::ViolationCode;
use crate::policy::{self, BandOptions, PolicyTable};
use crate::qvi::{self, QviVariant};
use crate::sim::{self, Policy, SimConfig, TerminalRule};
use crate::toy::{self, ToyParams};

#[derive(Debug, Parser)]
#[command(
    name = "darkpool",
    version,
    about = "Dark-pool market making: toy model, QVI solver and Monte Carlo"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the discrete toy model by backward recursion.
    Toy(ToyArgs),
    /// Solve a reduced QVI and extract its policy and boundaries.
    Solve(SolveArgs),
    /// Estimate a policy's objective by Monte Carlo.
    Simulate(SimulateArgs),
    /// Extract boundary curves from a saved surface CSV.
    Boundaries(BoundariesArgs),
}

#[derive(Debug, Args)]
pub struct ToyArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Fixed,
    Menu,
    Regime,
}

impl From<VariantArg> for QviVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Fixed => QviVariant::FixedCommissions,
            VariantArg::Menu => QviVariant::CommissionMenu,
            VariantArg::Regime => QviVariant::RegimeSwitching,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Defaults to the variant the configuration describes.
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Accept single-node region islands when extracting boundaries.
    #[arg(long)]
    pub tolerate_islands: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TerminalArg {
    Liquidation,
    Quadratic,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Surface CSV written by `solve`.
    #[arg(
        long,
        required_unless_present = "uncontrolled",
        conflicts_with = "uncontrolled"
    )]
    pub policy: Option<PathBuf>,
    /// Dark pool only, at the first commission of each menu.
    #[arg(long)]
    pub uncontrolled: bool,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Event logs written for this many leading paths.
    #[arg(long, default_value_t = 1)]
    pub log_paths: usize,
    /// Defaults to quadratic when uncontrolled, liquidation otherwise.
    #[arg(long, value_enum)]
    pub terminal: Option<TerminalArg>,
    #[arg(long)]
    pub enforce_exit: bool,
    #[arg(long)]
    pub dt_sim: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundariesArgs {
    /// Surface CSV written by `solve`.
    #[arg(long)]
    pub policy: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Checks the surface against this configuration's grid.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub tolerate_islands: bool,
}

/// Provenance record written next to every run's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub config_hash: Option<String>,
    pub grid_hash: Option<String>,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

pub const MANIFEST: &str = "manifest.json";

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Artifact { .. } => 2,
        Error::Stability { .. } => 3,
        Error::GridExit { .. } => 4,
        _ => 1,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("DARKPOOL_LOG", "warn"))
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: &Command) -> Result<()> {
    let started = Instant::now();
    let mut manifest = match command {
        Command::Toy(a) => cmd_toy(a)?,
        Command::Solve(a) => cmd_solve(a)?,
        Command::Simulate(a) => cmd_simulate(a)?,
        Command::Boundaries(a) => cmd_boundaries(a)?,
    };
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    let out = match command {
        Command::Toy(a) => &a.out,
        Command::Solve(a) => &a.out,
        Command::Simulate(a) => &a.out,
        Command::Boundaries(a) => &a.out,
    };
    write_json(&out.join(MANIFEST), &manifest)?;
    Ok(())
}

fn manifest(
    subcommand: &'static str,
    config: Option<&Config>,
    parameters: serde_json::Value,
) -> RunManifest {
    RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        config_hash: config.map(Config::hash),
        grid_hash: config.map(Config::grid_hash),
        parameters,
        seed: None,
        outputs: Vec::new(),
        wall_clock_seconds: 0.0,
    }
}

/// Loads a configuration and rejects it if any violation outside `allowed`
/// is reported.
fn load_config(path: &Path, allowed: &[ViolationCode]) -> Result<Config> {
    let cfg = Config::load(path)?;
    let report = cfg.validate();
    if report.has(ViolationCode::Stability) && !allowed.contains(&ViolationCode::Stability) {
        qvi::check_stability(&cfg.market, &cfg.costs, &cfg.grid)?;
    }
    let mut fatal = Vec::new();
    for v in &report.violations {
        if allowed.iter().any(|c| c.as_str() == v.code) {
            warn!("ignoring {}: {}", v.code, v.detail);
        } else {
            fatal.push(format!("{}: {}", v.code, v.detail));
        }
    }
    if !fatal.is_empty() {
        return Err(Error::Config(format!(
            "{} failed validation:\n{}",
            path.display(),
            fatal.join("\n")
        )));
    }
    Ok(cfg)
}

fn create(out: &Path, name: &str, outputs: &mut Vec<String>) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(out)?;
    outputs.push(name.to_string());
    Ok(BufWriter::new(File::create(out.join(name))?))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn emit_json<T: Serialize>(
    out: &Path,
    name: &str,
    value: &T,
    outputs: &mut Vec<String>,
) -> Result<()> {
    outputs.push(name.to_string());
    write_json(&out.join(name), value)
}

pub fn cmd_toy(args: &ToyArgs) -> Result<RunManifest> {
    // The toy model needs neither the penalty ordering nor the explicit-scheme bound.
    let cfg = load_config(
        &args.config,
        &[ViolationCode::EpsOrdering, ViolationCode::Stability],
    )?;
    let params = ToyParams::from_config(&cfg)?;
    let table = toy::solve_toy(&params, cfg.grid.x_min..=cfg.grid.x_max)?;
    let n_star = toy::count_distinguishable(params.stages as u64)?;
    let viable = toy::limit_order_viable(&params);
    info!(
        "toy: {} stages, n* = {n_star}, viable = {viable}",
        params.stages
    );

    let mut outputs = Vec::new();
    let mut w = create(&args.out, "toy.csv", &mut outputs)?;
    table.write_csv(&mut w)?;
    w.flush()?;
    let summary = json!({
        "stages": params.stages,
        "n_star": n_star,
        "viable": viable,
        "viability_threshold": toy::viability_threshold(&params),
        "x_min": cfg.grid.x_min,
        "x_max": cfg.grid.x_max,
    });
    emit_json(&args.out, "toy_summary.json", &summary, &mut outputs)?;

    let mut m = manifest(
        "toy",
        Some(&cfg),
        json!({ "config": cfg, "toy": params, "n_star": n_star, "viable": viable }),
    );
    m.outputs = outputs;
    Ok(m)
}

fn write_boundaries(
    out: &Path,
    table: &PolicyTable,
    options: BandOptions,
    outputs: &mut Vec<String>,
) -> Result<()> {
    let curves = policy::extract_boundaries_with(table, options)?;
    let mut w = create(out, "boundaries.csv", outputs)?;
    curves.write_csv(&mut w)?;
    w.flush()?;
    let mut w = create(out, "kappa_contours.csv", outputs)?;
    curves.write_kappa_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn cmd_solve(args: &SolveArgs) -> Result<RunManifest> {
    let cfg = load_config(&args.config, &[])?;
    let variant = args
        .variant
        .map(QviVariant::from)
        .unwrap_or_else(|| QviVariant::infer(&cfg.market, &cfg.costs));
    info!("solve: {variant} variant, {} steps", cfg.grid.t_steps);
    let surface = qvi::solve(variant, &cfg.market, &cfg.costs, &cfg.grid)?;
    let table = policy::extract_regions(&surface)?;

    let mut outputs = Vec::new();
    let mut w = create(&args.out, "surface.csv", &mut outputs)?;
    surface.write_csv(&mut w)?;
    w.flush()?;
    let options = BandOptions {
        tolerate_islands: args.tolerate_islands,
    };
    write_boundaries(&args.out, &table, options, &mut outputs)?;
    let counts: std::collections::BTreeMap<String, usize> = policy::region_counts(&table)
        .into_iter()
        .map(|(r, n)| (format!("{r:?}").to_lowercase(), n))
        .collect();
    let summary = json!({
        "variant": variant,
        "grid_hash": cfg.grid_hash(),
        "regions": counts,
    });
    emit_json(&args.out, "solve_summary.json", &summary, &mut outputs)?;

    let mut m = manifest(
        "solve",
        Some(&cfg),
        json!({ "config": cfg, "variant": variant }),
    );
    m.outputs = outputs;
    Ok(m)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<RunManifest> {
    let cfg = load_config(&args.config, &[])?;
    let table = match &args.policy {
        Some(path) => {
            let table = PolicyTable::read_surface_csv(path)?;
            if table.grid_hash() != cfg.grid_hash() {
                return Err(Error::Config(format!(
                    "policy {} was solved on a different grid than {}",
                    path.display(),
                    args.config.display()
                )));
            }
            Some(table)
        }
        None => None,
    };
    let policy = match &table {
        Some(t) => Policy::Table(t),
        None => Policy::Uncontrolled {
            delta_a: cfg.costs.delta_menu_a[0],
            delta_b: cfg.costs.delta_menu_b[0],
        },
    };
    let terminal = match args.terminal {
        Some(TerminalArg::Liquidation) => TerminalRule::Liquidation,
        Some(TerminalArg::Quadratic) => TerminalRule::QuadraticPenalty,
        None if table.is_none() => TerminalRule::QuadraticPenalty,
        None => TerminalRule::Liquidation,
    };
    let sim_cfg = SimConfig {
        dt_sim: args.dt_sim,
        enforce_exit: args.enforce_exit,
        terminal,
        log_paths: args.log_paths.min(args.paths),
        ..SimConfig::new(args.paths, args.seed)
    };
    let summary = sim::simulate(policy, &cfg.market, &cfg.costs, &cfg.grid, &sim_cfg)?;
    info!("simulate: mean {} ± {}", summary.mean, summary.stderr);

    let mut outputs = Vec::new();
    emit_json(&args.out, "summary.json", &summary, &mut outputs)?;
    let mut w = create(&args.out, "paths.jsonl", &mut outputs)?;
    for r in &summary.records {
        for e in &r.events {
            serde_json::to_writer(
                &mut w,
                &json!({ "path": r.index, "t": e.t, "kind": e.kind, "size": e.size, "dx": e.dx, "dy": e.dy, "k": e.k }),
            )?;
            w.write_all(b"\n")?;
        }
    }
    w.flush()?;

    let mut m = manifest(
        "simulate",
        Some(&cfg),
        json!({ "config": cfg, "sim": sim_cfg, "policy": args.policy }),
    );
    m.seed = Some(args.seed);
    m.outputs = outputs;
    Ok(m)
}

pub fn cmd_boundaries(args: &BoundariesArgs) -> Result<RunManifest> {
    let table = PolicyTable::read_surface_csv(&args.policy)?;
    let cfg = match &args.config {
        Some(path) => {
            let cfg = load_config(path, &[ViolationCode::Stability])?;
            if table.grid_hash() != cfg.grid_hash() {
                return Err(Error::Config(format!(
                    "surface {} does not match the grid of {}",
                    args.policy.display(),
                    path.display()
                )));
            }
            Some(cfg)
        }
        None => None,
    };
    let mut outputs = Vec::new();
    let options = BandOptions {
        tolerate_islands: args.tolerate_islands,
    };
    write_boundaries(&args.out, &table, options, &mut outputs)?;
    let mut m = manifest(
        "boundaries",
        cfg.as_ref(),
        json!({ "policy": args.policy, "tolerate_islands": args.tolerate_islands }),
    );
    m.grid_hash = Some(table.grid_hash());
    m.outputs = outputs;
    Ok(m)
}
