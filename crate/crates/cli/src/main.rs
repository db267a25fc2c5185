use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rendezvous_core::exact_solver::{solve_with, SolveOptions};
use rendezvous_core::line_model::{evaluate_bundle, GameInstance, GameKind, StrategyBundle};
use rendezvous_core::mesh_bounds::{
    bracket_1d, bracket_2d, lipschitz_audit_1d, lipschitz_audit_2d, mesh_dimension, read_mesh_1d, read_mesh_2d,
    sweep_1d_to_file, sweep_2d_to_file,
};
use rendezvous_core::{MeshError, ModelError, Rational, SolveError};

mod repro;

#[derive(Parser)]
#[command(name = "rendezvous", version, about = "Rendezvous on the line with dropped gifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a strategy bundle (JSON) and print its outcome.
    Eval(EvalArgs),
    /// Solve one drop schedule exactly.
    Solve(SolveArgs),
    /// Sweep drop times on a regular mesh into a CSV file.
    Mesh(MeshArgs),
    /// Bracket the optimal value and drop times from a mesh CSV.
    Bracket(FileArgs),
    /// Check a mesh CSV against the neighbour bounds.
    Audit(FileArgs),
    /// Regenerate the reference tables and exclusion reports.
    Repro(ReproArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// g, g1, g2or or g2and
    #[arg(long)]
    game: GameKind,
    #[arg(long, default_value = "16")]
    distance: Rational,
    /// Player I's drop time.
    #[arg(long)]
    drop1: Option<Rational>,
    /// Player II's drop time.
    #[arg(long)]
    drop2: Option<Rational>,
    #[arg(long)]
    horizon: Option<Rational>,
}

impl InstanceArgs {
    fn instance(&self) -> Result<GameInstance> {
        Ok(match self.horizon {
            Some(h) => GameInstance::with_horizon(self.game, self.distance, self.drop1, self.drop2, h)?,
            None => GameInstance::new(self.game, self.distance, self.drop1, self.drop2)?,
        })
    }
}

#[derive(Args)]
struct EvalArgs {
    /// Bundle JSON file; `-` reads stdin.
    #[arg(long)]
    bundle: PathBuf,
    /// g, g1, g2or or g2and
    #[arg(long)]
    game: GameKind,
    #[arg(long, default_value = "16")]
    distance: Rational,
    #[arg(long)]
    horizon: Option<Rational>,
    /// Which optimal bundle to take when the file holds a solve result.
    #[arg(long, default_value_t = 0)]
    index: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Return the value with one optimal bundle instead of all of them.
    #[arg(long)]
    value_only: bool,
    /// Fix Player I's first direction.
    #[arg(long)]
    symmetry: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeshArgs {
    #[arg(long)]
    game: GameKind,
    #[arg(long, default_value = "16")]
    distance: Rational,
    /// `lo:hi`; defaults to `0:3D` for g1 and `0:D` for two gifts.
    #[arg(long)]
    range: Option<String>,
    /// Defaults to `D/64` for g1 and `D/32` for two gifts.
    #[arg(long)]
    step: Option<Rational>,
    #[arg(long)]
    out: PathBuf,
    /// Continue a partial mesh file instead of refusing to touch it.
    #[arg(long)]
    resume: bool,
    #[arg(long, env = "RDV_WORKERS")]
    workers: Option<usize>,
}

#[derive(Args)]
struct FileArgs {
    /// Mesh CSV written by `mesh`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproArgs {
    /// table1, table2, table3, exclusion-or, exclusion-and or all
    what: repro::Target,
    /// Directory for the generated files; prints to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "RDV_WORKERS")]
    workers: Option<usize>,
}

fn workers(requested: Option<usize>) -> usize {
    requested.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display())),
        None => print_stdout(text),
    }
}

/// Prints to stdout, treating a closed pipe as success.
pub(crate) fn print_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        return std::io::read_to_string(std::io::stdin()).context("reading stdin");
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Accepts a bare bundle or a solve result.
fn load_bundle(text: &str, index: usize) -> Result<StrategyBundle> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Config(format!("bundle JSON: {e}")))?;
    let bundle = match value.get("optimal_bundles") {
        Some(list) => list
            .get(index)
            .cloned()
            .ok_or_else(|| Config(format!("no optimal bundle at index {index}")))?,
        None => value,
    };
    Ok(serde_json::from_value(bundle).map_err(|e| Config(format!("bundle JSON: {e}")))?)
}

fn eval(args: &EvalArgs) -> Result<()> {
    let bundle = load_bundle(&read_input(&args.bundle)?, args.index)?;
    let instance = match args.horizon {
        Some(h) => GameInstance::with_horizon(args.game, args.distance, bundle.drop_i, bundle.drop_ii, h)?,
        None => GameInstance::new(args.game, args.distance, bundle.drop_i, bundle.drop_ii)?,
    };
    let outcome = evaluate_bundle(&instance, &bundle)?;
    emit(None, &serde_json::to_string_pretty(&outcome)?)
}

fn solve(args: &SolveArgs) -> Result<()> {
    let instance = args.instance.instance()?;
    let options = SolveOptions {
        collect_all: !args.value_only,
        symmetry: args.symmetry,
        ..SolveOptions::default()
    };
    let result = solve_with(&instance, options)?;
    emit(args.out.as_deref(), &result.to_json())
}

fn parse_range(s: &str) -> Result<(Rational, Rational)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Config(format!("range {s:?} is not lo:hi")))?;
    let parse = |x: &str| x.trim().parse::<Rational>().map_err(|e| Config(format!("range bound {x:?}: {e}")));
    Ok((parse(lo)?, parse(hi)?))
}

fn mesh(args: &MeshArgs) -> Result<()> {
    let d = args.distance;
    let (lo, hi) = match &args.range {
        Some(r) => parse_range(r)?,
        None if args.game == GameKind::OneGift => (Rational::ZERO, d * Rational::from(3)),
        None => (Rational::ZERO, d),
    };
    let step = args.step.unwrap_or_else(|| match args.game {
        GameKind::OneGift => d / Rational::from(64),
        _ => d / Rational::from(32),
    });
    let workers = workers(args.workers);
    match args.game {
        GameKind::OneGift => {
            let m = sweep_1d_to_file(&args.out, args.resume, args.game, d, lo, hi, step, workers)?;
            eprintln!("{} points written to {}", m.len(), args.out.display());
        }
        GameKind::TwoGiftsOr | GameKind::TwoGiftsAnd => {
            let m = sweep_2d_to_file(&args.out, args.resume, args.game, d, lo, hi, step, workers)?;
            eprintln!("{} points written to {}", m.n * m.n, args.out.display());
        }
        GameKind::NoGift => bail!(Config("the no-gift game has no drop times to sweep".into())),
    }
    Ok(())
}

// Brackets and audits only look at values, so the game recorded in the
// mesh struct is a placeholder.
fn bracket(args: &FileArgs) -> Result<()> {
    let d = Rational::from(16);
    let report = match mesh_dimension(&args.input)? {
        1 => bracket_1d(&read_mesh_1d(&args.input, GameKind::OneGift, d)?),
        _ => bracket_2d(&read_mesh_2d(&args.input, GameKind::TwoGiftsAnd, d)?),
    };
    emit(args.out.as_deref(), &report.to_json())
}

fn audit(args: &FileArgs) -> Result<()> {
    let d = Rational::from(16);
    let report = match mesh_dimension(&args.input)? {
        1 => lipschitz_audit_1d(&read_mesh_1d(&args.input, GameKind::OneGift, d)?),
        _ => lipschitz_audit_2d(&read_mesh_2d(&args.input, GameKind::TwoGiftsAnd, d)?),
    };
    emit(args.out.as_deref(), &serde_json::to_string_pretty(&report)?)
}

/// A configuration problem, reported with exit code 2.
#[derive(Debug)]
struct Config(String);

impl std::fmt::Display for Config {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Config {}

fn solve_code(e: &SolveError) -> u8 {
    match e {
        SolveError::HorizonTooSmall { .. } | SolveError::NoResolvedStrategy(_) => 4,
        _ => 3,
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<SolveError>() {
            return solve_code(e);
        }
        if let Some(e) = cause.downcast_ref::<MeshError>() {
            return match e {
                MeshError::Solve { source, .. } => solve_code(source),
                _ => 2,
            };
        }
        if cause.downcast_ref::<ModelError>().is_some() {
            return 3;
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(a) => eval(a),
        Command::Solve(a) => solve(a),
        Command::Mesh(a) => mesh(a),
        Command::Bracket(a) => bracket(a),
        Command::Audit(a) => audit(a),
        Command::Repro(a) => repro::run(a.what, a.out.as_deref(), workers(a.workers)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
