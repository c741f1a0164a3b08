//! Continuation toward the critical coupling `(b₁,b₂) ↗ (a*−β, a*−β)`, fits
//! of the blow-up exponents and the limiting constant, and the checks on
//! where and how minimizers concentrate.

mod checks;
mod fit;
mod scenario;
mod sweep;

use thiserror::Error;

use crate::fields::FieldError;
use crate::minimizer::MinimizeError;
use crate::townes::TownesError;

pub use checks::{
    concentration_check, l4_scale_ratio, limit_constant_check, mu_ratio, profile_distance, profile_distances,
    ConcentrationReport,
};
pub use fit::{
    energy_exponent_target, fit_energy_exponent, fit_l4_exponent, fit_loglog, l4_exponent_target, FitResult,
    MIN_DECADES, MIN_RECORDS,
};
pub use scenario::{separated_wells_scenario, ScenarioReport, ScenarioVariant};
pub use sweep::{
    read_records_csv, records_to_csv, run_sweep, run_sweeps, SweepPath, SweepRecord, SweepSpec, CSV_HEADER,
    MIN_CORE_POINTS,
};

#[derive(Debug, Error)]
pub enum BlowupError {
    #[error("core of diameter {points:.1} grid spacings at eps_raw={eps_raw} is below the {min} required")]
    ResolutionExceeded { eps_raw: f64, points: f64, min: f64 },
    #[error("field reaches {value:e} on the box boundary at eps_raw={eps_raw}")]
    BoundaryMass { eps_raw: f64, value: f64 },
    #[error("fit needs at least {MIN_RECORDS} records spanning {MIN_DECADES} decades (got {records} over {decades:.2})")]
    InsufficientSpan { records: usize, decades: f64 },
    #[error("sweep point eps_raw={eps_raw} classifies as {tag}, outside the covered regime")]
    NotCovered { eps_raw: f64, tag: String },
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error("bad records file: {0}")]
    Records(String),
    #[error(transparent)]
    Minimize(#[from] MinimizeError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Townes(#[from] TownesError),
}
