//! Field selection from command-line style parameters, and serializable
//! descriptions of fields for manifests.

use quasilorentz_core::cutproject::{cut_project_interval, StripSpec};
use quasilorentz_core::pointsets::enumerate_points;
use quasilorentz_core::{golden_constants, ScattererField};
use serde::{Deserialize, Serialize};

use crate::{AppError, AppResult};

/// Mixed into the run seed to obtain the default obstacle seed.
pub const FIELD_SEED_XOR: u64 = 0xa5a5_0f0f_5a5a_f0f0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Fibonacci,
    Chain,
    Periodic,
    Poisson,
    /// Cut-and-project strip; point dumps only.
    Strip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    /// Unit cell `[-1/2, 1/2)^2` (default).
    Centered,
    /// Unit cell `(-1, 0] x [0, 1)`; reproduces the Fibonacci chain at slope tau.
    Corner,
}

/// Field parameters; unset values take defaults matched to density
/// `tau^2/nu`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FieldParams {
    pub slope: Option<f64>,
    pub spacing: Option<f64>,
    pub intensity: Option<f64>,
    pub field_seed: Option<u64>,
    pub cell_size: Option<f64>,
    pub window: Option<WindowKind>,
}

pub fn default_field_seed(run_seed: u64) -> u64 {
    run_seed ^ FIELD_SEED_XOR
}

pub fn build_field(kind: FieldKind, params: &FieldParams, run_seed: u64) -> AppResult<ScattererField> {
    let g = golden_constants();
    let field = match kind {
        FieldKind::Fibonacci => ScattererField::Fibonacci,
        FieldKind::Chain => ScattererField::chain(params.slope.unwrap_or(g.tau))?,
        FieldKind::Periodic => ScattererField::periodic(params.spacing.unwrap_or(1.0 / g.alpha))?,
        FieldKind::Poisson => ScattererField::poisson(
            params.intensity.unwrap_or(g.alpha),
            params.field_seed.unwrap_or_else(|| default_field_seed(run_seed)),
            params.cell_size,
        )?,
        FieldKind::Strip => {
            return Err(AppError::Config(
                "invalid --field: strip is only available for point dumps".into(),
            ))
        }
    };
    Ok(field)
}

/// Sorted points of the selected set in `[a, b]`.
pub fn field_points(kind: FieldKind, params: &FieldParams, run_seed: u64, a: f64, b: f64) -> AppResult<Vec<f64>> {
    if kind == FieldKind::Strip {
        let slope = params.slope.unwrap_or(golden_constants().tau);
        let spec = match params.window.unwrap_or(WindowKind::Centered) {
            WindowKind::Centered => StripSpec::centered(slope)?,
            WindowKind::Corner => StripSpec::corner(slope)?,
        };
        return Ok(cut_project_interval(&spec, a, b)?);
    }
    let field = build_field(kind, params, run_seed)?;
    Ok(enumerate_points(&field, a, b)?)
}

/// Serializable parameters of a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub field: String,
    pub density: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spacing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub intensity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cell_size: Option<f64>,
}

pub fn describe(field: &ScattererField) -> FieldDescriptor {
    let mut d = FieldDescriptor {
        field: field.tag().to_string(),
        density: field.density(),
        slope: None,
        spacing: None,
        intensity: None,
        seed: None,
        cell_size: None,
    };
    match field {
        ScattererField::Fibonacci => d.slope = Some(golden_constants().tau),
        ScattererField::Chain(c) => d.slope = Some(c.slope()),
        ScattererField::Periodic(p) => d.spacing = Some(p.spacing()),
        ScattererField::Poisson(p) => {
            d.intensity = Some(p.intensity());
            d.seed = Some(p.seed());
            d.cell_size = Some(p.cell_size());
        }
    }
    d
}
