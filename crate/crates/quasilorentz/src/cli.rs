//! Command-line interface. Exit status is 0 on success, 2 for invalid
//! configuration and 3 for resource or I/O failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::experiment::{
    run_compare, run_field, sim_config, write_outputs, CompareSpec, CompareSummary, FitRanges, RunResult,
    RunSummary,
};
use crate::fields::{build_field, field_points, FieldKind, FieldParams, WindowKind};
use crate::io::{format_sig, points_text, write_atomic};
use crate::{AppError, AppResult};

#[derive(Debug, Parser)]
#[command(name = "quasilorentz", version, about = "Free-path statistics of a 1-D Lorentz gas on quasicrystal, periodic and Poisson scatterers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the points of a scatterer set in an interval.
    Points(PointsArgs),
    /// Run one field and write its survival curve and tail fit.
    Simulate(SimulateArgs),
    /// Run several fields at matched density, on a shared grid, for one or more epsilons.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// Chain or strip slope (default: golden ratio).
    #[arg(long)]
    pub slope: Option<f64>,
    /// Periodic spacing (default: nu/tau^2).
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Poisson intensity (default: tau^2/nu).
    #[arg(long)]
    pub intensity: Option<f64>,
    /// Poisson realization seed (default: run seed XOR a fixed constant).
    #[arg(long)]
    pub field_seed: Option<u64>,
    /// Poisson cell width (default: 1/intensity).
    #[arg(long)]
    pub cell_size: Option<f64>,
    /// Strip window for --field strip (default: centered).
    #[arg(long, value_enum)]
    pub window: Option<WindowKind>,
}

impl FieldArgs {
    fn params(&self) -> FieldParams {
        FieldParams {
            slope: self.slope,
            spacing: self.spacing,
            intensity: self.intensity,
            field_seed: self.field_seed,
            cell_size: self.cell_size,
            window: self.window,
        }
    }
}

#[derive(Debug, Args)]
pub struct PointsArgs {
    #[arg(long, value_enum, default_value = "fibonacci")]
    pub field: FieldKind,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    /// Seed from which the default Poisson seed is derived.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub field_args: FieldArgs,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Number of trajectories.
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Step cap (default: ceil(50/epsilon)).
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Power-law fit range as LO,HI.
    #[arg(long, value_parser = parse_range)]
    pub power_range: Option<[f64; 2]>,
    /// Exponential fit range as LO,HI.
    #[arg(long, value_parser = parse_range)]
    pub exp_range: Option<[f64; 2]>,
}

impl RunArgs {
    fn check(&self) -> AppResult<()> {
        if self.n == 0 {
            return Err(AppError::Config("invalid --n: must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(AppError::Config("invalid --threads: must be at least 1".into()));
        }
        Ok(())
    }

    fn ranges(&self) -> FitRanges {
        FitRanges { power: self.power_range, exponential: self.exp_range }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value = "fibonacci")]
    pub field: FieldKind,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub field_args: FieldArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// One or more comma-separated epsilons.
    #[arg(long = "epsilon", visible_alias = "epsilons", value_delimiter = ',', default_value = "0.001")]
    pub epsilons: Vec<f64>,
    /// Comma-separated fields.
    #[arg(long = "field", visible_alias = "fields", value_enum, value_delimiter = ',', default_value = "fibonacci,periodic,poisson")]
    pub fields: Vec<FieldKind>,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub field_args: FieldArgs,
}

fn parse_range(s: &str) -> Result<[f64; 2], String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("LO: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("HI: {e}"))?;
    if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
        return Err(format!("need 0 < LO < HI, got {lo},{hi}"));
    }
    Ok([lo, hi])
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
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
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> AppResult<()> {
    match command {
        Command::Points(a) => cmd_points(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Compare(a) => cmd_compare(a),
    }
}

fn emit(text: &str) -> AppResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| AppError::io("<stdout>", e))
}

fn fit_line(run: &RunResult) -> String {
    let head = format!(
        "{:<10} eps={:<8} n={} censored={}",
        run.field.tag(),
        format_sig(run.config.epsilon),
        run.config.n_trajectories,
        run.histogram.censored()
    );
    match &run.fit {
        Ok(f) => format!(
            "{head} fit={} param={:.6} prefactor={:.6} range=[{},{}] rms={:.3e}\n",
            f.model.name(),
            f.param,
            f.prefactor,
            format_sig(f.fit_range[0]),
            format_sig(f.fit_range[1]),
            f.rms_residual
        ),
        Err(e) => format!("{head} fit=none ({e})\n"),
    }
}

pub fn cmd_points(a: &PointsArgs) -> AppResult<()> {
    let points = field_points(a.field, &a.field_args.params(), a.seed, a.from, a.to)?;
    let text = points_text(&points);
    match &a.out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => emit(&text),
    }
}

pub fn cmd_simulate(a: &SimulateArgs) -> AppResult<()> {
    a.run.check()?;
    let start = Instant::now();
    let config = sim_config(a.epsilon, a.run.n, a.run.seed, a.run.max_steps)?;
    let field = build_field(a.field, &a.field_args.params(), a.run.seed)?;
    let model = crate::experiment::tail_model_for(&field);
    let range = a.run.ranges().range(model, config.censor_limit());
    let run = run_field(&config, &field, None, Some(range), a.run.threads)?;
    let summary = RunSummary::of(&run);
    let manifest = write_outputs(&a.run.out, std::slice::from_ref(&run), &summary, start.elapsed().as_secs_f64())?;
    let mut text = fit_line(&run);
    for f in &manifest.emitted_files {
        text.push_str(&format!("wrote {}\n", f.path.display()));
    }
    emit(&text)
}

pub fn cmd_compare(a: &CompareArgs) -> AppResult<()> {
    a.run.check()?;
    let start = Instant::now();
    let params = a.field_args.params();
    let fields = a
        .fields
        .iter()
        .map(|&k| build_field(k, &params, a.run.seed))
        .collect::<AppResult<Vec<_>>>()?;
    let spec = CompareSpec {
        epsilons: a.epsilons.clone(),
        fields,
        n: a.run.n,
        seed: a.run.seed,
        max_steps: a.run.max_steps,
        threads: a.run.threads,
        ranges: a.run.ranges(),
    };
    let report = run_compare(&spec)?;
    let summary = CompareSummary {
        runs: report.runs.iter().map(RunSummary::of).collect(),
        sup_distances: report.sup_distances.clone(),
    };
    let manifest = write_outputs(&a.run.out, &report.runs, &summary, start.elapsed().as_secs_f64())?;
    let mut text: String = report.runs.iter().map(fit_line).collect();
    for s in &report.sup_distances {
        text.push_str(&format!(
            "sup distance {} eps {} vs {} (T >= {}): {:.6}\n",
            s.field,
            format_sig(s.epsilon_a),
            format_sig(s.epsilon_b),
            format_sig(s.t_min),
            s.distance
        ));
    }
    text.push_str(&format!("wrote {} curves to {}\n", manifest.emitted_files.len(), manifest.output_dir.display()));
    emit(&text)
}
