//! Two-component Gross–Pitaevskii minimization under double mass constraints.

pub mod blowup;
pub mod cli;
pub mod criteria;
pub mod fields;
pub mod minimizer;
pub mod numeric;
pub mod townes;
