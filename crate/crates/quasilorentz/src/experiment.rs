//! Single-field runs, the multi-field comparison and their output files.

use std::path::{Path, PathBuf};

use quasilorentz_core::stats::{curve_sup_distance, default_grid, fit_exponential_tail, fit_power_tail, survival_from_steps};
use quasilorentz_core::{ScattererField, SimConfig, StepHistogram, SurvivalCurve, TailFit, TailModel};
use serde::{Deserialize, Serialize};

use crate::batch::run_batch;
use crate::fields::{describe, FieldDescriptor};
use crate::io::{format_sig, read_survival_csv, survival_csv, write_atomic, write_json, CurveMeta};
use crate::{AppError, AppResult};

pub const FIT_T_LO: f64 = 0.5;
pub const POWER_FIT_T_HI: f64 = 5.0;
pub const EXPONENTIAL_FIT_T_HI: f64 = 3.0;
/// Lower end of the thresholds compared between epsilons.
pub const SUP_T_MIN: f64 = 0.5;

pub const SUMMARY_FILE: &str = "summary.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Fit range overrides.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FitRanges {
    pub power: Option<[f64; 2]>,
    pub exponential: Option<[f64; 2]>,
}

impl FitRanges {
    /// The override for `model`, or `[0.5, min(hi, censor_limit/2)]` with
    /// `hi` = 5 for power laws and 3 for exponentials.
    pub fn range(&self, model: TailModel, censor_limit: f64) -> [f64; 2] {
        let (given, hi) = match model {
            TailModel::PowerLaw => (self.power, POWER_FIT_T_HI),
            TailModel::Exponential => (self.exponential, EXPONENTIAL_FIT_T_HI),
        };
        given.unwrap_or([FIT_T_LO, hi.min(0.5 * censor_limit)])
    }
}

/// Exponential for the Poisson field, power law for the ordered ones.
pub fn tail_model_for(field: &ScattererField) -> TailModel {
    match field {
        ScattererField::Poisson(_) => TailModel::Exponential,
        _ => TailModel::PowerLaw,
    }
}

pub fn fit_curve(curve: &SurvivalCurve, model: TailModel, range: [f64; 2]) -> quasilorentz_core::Result<TailFit> {
    match model {
        TailModel::PowerLaw => fit_power_tail(curve, range),
        TailModel::Exponential => fit_exponential_tail(curve, range),
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: SimConfig,
    pub field: ScattererField,
    pub histogram: StepHistogram,
    pub curve: SurvivalCurve,
    /// The tail fit, or why it could not be made.
    pub fit: Result<TailFit, String>,
}

/// One batch, its survival curve on `grid` (default grid if `None`) and the
/// field's tail fit over `fit_range`.
pub fn run_field(
    config: &SimConfig,
    field: &ScattererField,
    grid: Option<&[f64]>,
    fit_range: Option<[f64; 2]>,
    threads: Option<usize>,
) -> AppResult<RunResult> {
    config.validate()?;
    let own_grid;
    let grid = match grid {
        Some(g) => g,
        None => {
            own_grid = default_grid(config.censor_limit())?;
            &own_grid
        }
    };
    let histogram = run_batch(config, field, threads)?;
    let curve = survival_from_steps(&histogram, config.epsilon, grid, field.tag())?;
    let model = tail_model_for(field);
    let range = fit_range.unwrap_or_else(|| FitRanges::default().range(model, config.censor_limit()));
    let fit = fit_curve(&curve, model, range).map_err(|e| e.to_string());
    Ok(RunResult { config: *config, field: *field, histogram, curve, fit })
}

#[derive(Debug, Clone)]
pub struct CompareSpec {
    pub epsilons: Vec<f64>,
    pub fields: Vec<ScattererField>,
    pub n: u64,
    pub seed: u64,
    pub max_steps: Option<u64>,
    pub threads: Option<usize>,
    pub ranges: FitRanges,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupDistance {
    pub field: String,
    pub epsilon_a: f64,
    pub epsilon_b: f64,
    pub t_min: f64,
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub grid: Vec<f64>,
    pub runs: Vec<RunResult>,
    pub sup_distances: Vec<SupDistance>,
}

pub fn sim_config(epsilon: f64, n: u64, seed: u64, max_steps: Option<u64>) -> AppResult<SimConfig> {
    let mut config = SimConfig::new(epsilon, n, seed)?;
    if let Some(m) = max_steps {
        config.max_steps = m;
        config.validate()?;
    }
    Ok(config)
}

/// Every field at every epsilon on one threshold grid, 64 points from 0.05 to
/// 0.8 times the smallest censor limit. Sup distances are reported for each
/// field and each pair of epsilons over `T >= 0.5`.
pub fn run_compare(spec: &CompareSpec) -> AppResult<CompareReport> {
    if spec.epsilons.is_empty() {
        return Err(AppError::Config("invalid --epsilon: no values given".into()));
    }
    if spec.fields.is_empty() {
        return Err(AppError::Config("invalid --field: no fields given".into()));
    }
    for (i, f) in spec.fields.iter().enumerate() {
        if spec.fields[..i].iter().any(|g| g.tag() == f.tag()) {
            return Err(AppError::Config(format!("invalid --field: '{}' given twice", f.tag())));
        }
    }
    for (i, e) in spec.epsilons.iter().enumerate() {
        if spec.epsilons[..i].contains(e) {
            return Err(AppError::Config(format!("invalid --epsilon: {e} given twice")));
        }
    }
    let configs = spec
        .epsilons
        .iter()
        .map(|&e| sim_config(e, spec.n, spec.seed, spec.max_steps))
        .collect::<AppResult<Vec<_>>>()?;
    let limit = configs.iter().map(SimConfig::censor_limit).fold(f64::INFINITY, f64::min);
    let grid = default_grid(limit)?;
    let mut runs = Vec::with_capacity(configs.len() * spec.fields.len());
    for config in &configs {
        for field in &spec.fields {
            let range = spec.ranges.range(tail_model_for(field), limit);
            runs.push(run_field(config, field, Some(&grid), Some(range), spec.threads)?);
        }
    }
    let mut sup_distances = Vec::new();
    for field in &spec.fields {
        let mine: Vec<&RunResult> = runs.iter().filter(|r| r.field.tag() == field.tag()).collect();
        for (i, a) in mine.iter().enumerate() {
            for b in &mine[i + 1..] {
                sup_distances.push(SupDistance {
                    field: field.tag().to_string(),
                    epsilon_a: a.config.epsilon,
                    epsilon_b: b.config.epsilon,
                    t_min: SUP_T_MIN,
                    distance: curve_sup_distance(&a.curve, &b.curve, SUP_T_MIN)?,
                });
            }
        }
    }
    Ok(CompareReport { grid, runs, sup_distances })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub model: TailModel,
    pub param: f64,
    pub prefactor: f64,
    pub range: [f64; 2],
    pub rms_residual: f64,
    pub points_used: usize,
    pub zeros_dropped: usize,
}

impl From<&TailFit> for FitSummary {
    fn from(f: &TailFit) -> Self {
        Self {
            model: f.model,
            param: f.param,
            prefactor: f.prefactor,
            range: f.fit_range,
            rms_residual: f.rms_residual,
            points_used: f.points_used,
            zeros_dropped: f.zeros_dropped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub field: String,
    pub epsilon: f64,
    pub n: u64,
    pub seed: u64,
    pub censored: u64,
    pub max_steps: u64,
    pub censor_limit: f64,
    pub csv: String,
    pub fit: Option<FitSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit_error: Option<String>,
}

impl RunSummary {
    pub fn of(run: &RunResult) -> Self {
        Self {
            field: run.field.tag().to_string(),
            epsilon: run.config.epsilon,
            n: run.config.n_trajectories,
            seed: run.config.seed,
            censored: run.histogram.censored(),
            max_steps: run.config.max_steps,
            censor_limit: run.config.censor_limit(),
            csv: csv_name(run.field.tag(), run.config.epsilon),
            fit: run.fit.as_ref().ok().map(FitSummary::from),
            fit_error: run.fit.as_ref().err().cloned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSummary {
    pub runs: Vec<RunSummary>,
    pub sup_distances: Vec<SupDistance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmittedFile {
    #[serde(flatten)]
    pub meta: CurveMeta,
    pub path: PathBuf,
}

/// Record of one invocation's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// One configuration per epsilon.
    pub config: Vec<SimConfig>,
    pub fields: Vec<FieldDescriptor>,
    pub output_dir: PathBuf,
    pub emitted_files: Vec<EmittedFile>,
    /// Seconds.
    pub wall_time: f64,
}

impl RunManifest {
    /// Reads back every emitted CSV.
    pub fn load_curves(&self) -> AppResult<Vec<SurvivalCurve>> {
        self.emitted_files
            .iter()
            .map(|f| read_survival_csv(&f.path, &f.meta))
            .collect()
    }
}

pub fn csv_name(tag: &str, epsilon: f64) -> String {
    format!("{tag}_eps{}.csv", format_sig(epsilon))
}

/// Writes one CSV per run, `summary` as `summary.json` and the manifest.
pub fn write_outputs<S: Serialize>(
    out_dir: &Path,
    runs: &[RunResult],
    summary: &S,
    wall_time: f64,
) -> AppResult<RunManifest> {
    std::fs::create_dir_all(out_dir).map_err(|e| AppError::io(out_dir, e))?;
    let texts = runs
        .iter()
        .map(|r| survival_csv(&r.curve))
        .collect::<AppResult<Vec<_>>>()?;
    let mut emitted_files = Vec::with_capacity(runs.len());
    for (run, text) in runs.iter().zip(&texts) {
        let path = out_dir.join(csv_name(run.field.tag(), run.config.epsilon));
        write_atomic(&path, text.as_bytes())?;
        emitted_files.push(EmittedFile { meta: CurveMeta::of(&run.curve), path });
    }
    write_json(&out_dir.join(SUMMARY_FILE), summary)?;
    let mut config: Vec<SimConfig> = Vec::new();
    let mut fields: Vec<FieldDescriptor> = Vec::new();
    for run in runs {
        if !config.contains(&run.config) {
            config.push(run.config);
        }
        let d = describe(&run.field);
        if !fields.contains(&d) {
            fields.push(d);
        }
    }
    let manifest = RunManifest {
        config,
        fields,
        output_dir: out_dir.to_path_buf(),
        emitted_files,
        wall_time,
    };
    write_json(&out_dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}
