//! The `gpduo` command line.
//!
//! Every subcommand reads JSON (or CSV records), runs one library operation
//! and writes JSON or CSV, to a file when `--out` is given and to standard
//! output otherwise. Exit status 0 is success, 1 a domain error (reported as
//! `{"error": kind, "message": text}` on standard error) and 2 a usage error.
//!
//! Coupling strengths may be written as multiples of `a*`: `0.5a` on the
//! command line or `"0.5a"` inside a JSON config. `a*` comes from the Townes
//! artifact named by `--townes`, else from the path in `GPDUO_CACHE`, else
//! from a fresh solve.

mod plot;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::blowup::{self, BlowupError, ScenarioVariant, SweepRecord, SweepSpec};
use crate::criteria::{classify, quotient_bounds, CouplingParams, CriteriaError, RegionTag};
use crate::fields::io::{atomic_write, read_fields, write_fields};
use crate::fields::{analyze_potential, FieldError, Grid2D, PotentialSpec};
use crate::minimizer::{self, FlowConfig, MinimizeError, DEFAULT_ESCAPE_LAMBDAS};
use crate::townes::{self, RadialProfile, TownesArtifact, TownesConstants, TownesError};

/// Environment variable naming the default Townes artifact.
pub const CACHE_VAR: &str = "GPDUO_CACHE";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Townes(#[from] TownesError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Minimize(#[from] MinimizeError),
    #[error(transparent)]
    Blowup(#[from] BlowupError),
}

impl CliError {
    /// Name of the innermost error variant.
    pub fn kind(&self) -> String {
        match self {
            CliError::Input(_) => "InvalidInput".into(),
            CliError::Io(_) => "Io".into(),
            CliError::Json(_) => "InvalidConfig".into(),
            other => innermost_variant(&format!("{other:?}")),
        }
    }
}

/// `"Blowup(Minimize(NaNDetected { iters: 3 }))"` → `"NaNDetected"`.
fn innermost_variant(debug: &str) -> String {
    let mut rest = debug;
    loop {
        let end = rest
            .find(|c: char| !(c.is_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        let name = &rest[..end];
        match rest[end..].strip_prefix('(') {
            Some(inner) if inner.starts_with(|c: char| c.is_ascii_uppercase()) && !matches!(name, "Io" | "Json") => {
                rest = inner
            }
            _ => return name.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gpduo", version, about = "Two-component Gross-Pitaevskii minimization toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Solve for the Townes profile and write the artifact
    Townes(TownesArgs),
    /// Classify a coupling triple, or tabulate a (b1, b2) grid as CSV
    Classify(ClassifyArgs),
    /// Zeros, flatness exponents and flattest zeros of a trap pair
    AnalyzePotential(PotArgs),
    /// Minimize the coupled energy
    Minimize(MinimizeArgs),
    /// Estimate the Gagliardo-Nirenberg type quotient
    GnQuotient(QuotientArgs),
    /// Dilate the quotient minimizer and watch the trapped energy
    EscapeTest(EscapeArgs),
    /// Run continuation sweeps toward the critical coupling
    Sweep(SweepArgs),
    /// Fit a power law to sweep records
    Fit(FitArgs),
    /// Summarize sweep records against the predicted limits
    Report(ReportArgs),
    /// Separated-wells scenario on the critical segment
    ScenarioWells(ScenarioArgs),
}

#[derive(Debug, Args)]
struct TownesArgs {
    #[arg(long, default_value_t = 20.0)]
    rmax: f64,
    #[arg(long, default_value_t = 4096)]
    nodes: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Townes artifact supplying a*
    #[arg(long = "a-star-file", alias = "townes")]
    a_star_file: Option<PathBuf>,
    #[arg(long, required_unless_present = "grid")]
    b1: Option<String>,
    #[arg(long, required_unless_present = "grid")]
    b2: Option<String>,
    #[arg(long)]
    beta: String,
    /// `lo:hi:n`, the same axis for b1 and b2; emits CSV
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PotArgs {
    #[arg(long)]
    pot: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MinimizeArgs {
    /// JSON with `params`, `pot`, `grid` and optional `cfg`
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    townes: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// binary field pair output
    #[arg(long)]
    fields: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct QuotientArgs {
    #[arg(long)]
    townes: Option<PathBuf>,
    #[arg(long)]
    b1: String,
    #[arg(long)]
    b2: String,
    #[arg(long)]
    beta: String,
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 16.0)]
    extent: f64,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EscapeArgs {
    /// JSON with `params`, `pot`, `grid`, optional `cfg` and `lambdas`
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    townes: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// one sweep spec, or a JSON list of them
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    townes: Option<PathBuf>,
    /// records CSV; with several specs `-<k>` is inserted before the extension
    #[arg(long)]
    out: PathBuf,
    /// independent sweeps run on this many threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FitWhat {
    Energy,
    L4,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    records: PathBuf,
    #[arg(long, value_enum)]
    what: FitWhat,
    #[arg(long)]
    p0: f64,
    /// component for `--what l4`
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    component: u8,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    records: PathBuf,
    #[arg(long)]
    townes: Option<PathBuf>,
    #[arg(long)]
    pot: PathBuf,
    /// grid spacing of the sweep, for the concentration check
    #[arg(long)]
    spacing: Option<f64>,
    /// final field pair of the sweep, for the profile overlay plot
    #[arg(long)]
    fields: Option<PathBuf>,
    /// directory for SVG plots
    #[arg(long)]
    plots: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    #[arg(long, value_enum, default_value_t = VariantArg::Separated)]
    variant: VariantArg,
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 8.0)]
    extent: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Separated,
    Coincident,
    LowPlateau,
}

/// Parse `argv` (program name first), run, and return the exit status.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.cmd) {
        Ok(()) => 0,
        Err(e) => {
            let body = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{body}");
            1
        }
    }
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Townes(a) => cmd_townes(a),
        Cmd::Classify(a) => cmd_classify(a),
        Cmd::AnalyzePotential(a) => cmd_analyze(a),
        Cmd::Minimize(a) => cmd_minimize(a),
        Cmd::GnQuotient(a) => cmd_quotient(a),
        Cmd::EscapeTest(a) => cmd_escape(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Fit(a) => cmd_fit(a),
        Cmd::Report(a) => cmd_report(a),
        Cmd::ScenarioWells(a) => cmd_scenario(a),
    }
}

fn emit_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => atomic_write(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    emit_text(out, &s)
}

/// Townes artifact from `path`, else `GPDUO_CACHE`, else a fresh solve.
fn load_townes(path: Option<&Path>) -> Result<(RadialProfile, TownesConstants), CliError> {
    let from_env = std::env::var_os(CACHE_VAR).map(PathBuf::from);
    match path.map(Path::to_path_buf).or(from_env) {
        Some(p) => {
            let text = fs::read_to_string(&p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            let art: TownesArtifact = serde_json::from_str(&text)?;
            Ok(art.into_parts()?)
        }
        None => Ok(townes::townes_artifact(20.0, 4096, 1e-10)?.into_parts()?),
    }
}

/// `"0.5a"` → `0.5·a*`; plain numbers pass through.
pub fn parse_scaled(s: &str, a_star: f64) -> Result<f64, CliError> {
    let t = s.trim();
    let (num, scale) = match t.strip_suffix('a') {
        Some(n) => (n, a_star),
        None => (t, 1.0),
    };
    num.parse::<f64>()
        .map(|v| v * scale)
        .map_err(|_| CliError::Input(format!("cannot read {s:?} as a number or a multiple of a* like 0.5a")))
}

fn has_scaled(v: &Value) -> bool {
    match v {
        Value::String(s) => s.trim().ends_with('a') && s.trim().trim_end_matches('a').parse::<f64>().is_ok(),
        Value::Array(xs) => xs.iter().any(has_scaled),
        Value::Object(m) => m.values().any(has_scaled),
        _ => false,
    }
}

/// Replace every `"<number>a"` string by the number times `a*`.
pub fn resolve_scaled(v: &mut Value, a_star: f64) -> Result<(), CliError> {
    match v {
        Value::String(s) if has_scaled(&Value::String(s.clone())) => {
            let x = parse_scaled(s, a_star)?;
            *v = serde_json::Number::from_f64(x)
                .map(Value::Number)
                .ok_or_else(|| CliError::Input(format!("{s:?} is not finite")))?;
        }
        Value::Array(xs) => {
            for x in xs {
                resolve_scaled(x, a_star)?;
            }
        }
        Value::Object(m) => {
            for x in m.values_mut() {
                resolve_scaled(x, a_star)?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// Read a JSON config, resolving `a`-suffixed literals only when present.
fn read_config<T: DeserializeOwned>(path: &Path, townes: Option<&Path>) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut v: Value = serde_json::from_str(&text)?;
    if has_scaled(&v) {
        let (_, c) = load_townes(townes)?;
        resolve_scaled(&mut v, c.a_star)?;
    }
    Ok(serde_json::from_value(v)?)
}

fn read_records(path: &Path) -> Result<Vec<SweepRecord>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(blowup::read_records_csv(&text)?)
}

fn cmd_townes(a: TownesArgs) -> Result<(), CliError> {
    let art = townes::townes_artifact(a.rmax, a.nodes, a.tol)?;
    match a.out {
        Some(p) => {
            emit_json(Some(&p), &art)?;
            let summary = serde_json::json!({
                "a_star": art.a_star, "q0": art.q0, "kinetic": art.kinetic, "l4": art.l4, "moments": art.moments,
            });
            emit_json(None, &summary)
        }
        None => emit_json(None, &art),
    }
}

/// `lo:hi:n` → `n` equally spaced values (each end may carry the `a` suffix).
fn parse_axis(spec: &str, a_star: f64) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Input(format!("grid {spec:?} is not lo:hi:n")));
    }
    let lo = parse_scaled(parts[0], a_star)?;
    let hi = parse_scaled(parts[1], a_star)?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| CliError::Input(format!("grid count {:?} is not an integer", parts[2])))?;
    if n < 2 || !(hi > lo) {
        return Err(CliError::Input(format!("grid {spec:?} needs lo < hi and n ≥ 2")));
    }
    Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
}

fn cmd_classify(a: ClassifyArgs) -> Result<(), CliError> {
    let (_, c) = load_townes(a.a_star_file.as_deref())?;
    let a_star = c.a_star;
    let beta = parse_scaled(&a.beta, a_star)?;
    if let Some(spec) = &a.grid {
        let axis = parse_axis(spec, a_star)?;
        let mut csv = String::from("b1,b2,beta,tag\n");
        for &b1 in &axis {
            for &b2 in &axis {
                let p = CouplingParams::new(b1, b2, beta)?;
                let tag = classify(&p, a_star).tag;
                csv.push_str(&format!("{b1:.16e},{b2:.16e},{beta:.16e},{}\n", tag.as_str()));
            }
        }
        return emit_text(a.out.as_deref(), &csv);
    }
    let b1 = parse_scaled(a.b1.as_deref().unwrap_or_default(), a_star)?;
    let b2 = parse_scaled(a.b2.as_deref().unwrap_or_default(), a_star)?;
    let p = CouplingParams::new(b1, b2, beta)?;
    emit_json(a.out.as_deref(), &classify(&p, a_star))
}

fn cmd_analyze(a: PotArgs) -> Result<(), CliError> {
    let spec: PotentialSpec = read_config(&a.pot, None)?;
    emit_json(a.out.as_deref(), &analyze_potential(&spec)?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    params: CouplingParams,
    pot: PotentialSpec,
    grid: Grid2D,
    #[serde(default)]
    cfg: FlowConfig,
}

fn cmd_minimize(a: MinimizeArgs) -> Result<(), CliError> {
    let rc: RunConfig = read_config(&a.config, a.townes.as_deref())?;
    let r = minimizer::minimize(&rc.params, &rc.pot, &rc.grid, &rc.cfg)?;
    if let Some(f) = &a.fields {
        write_fields(f, &r.u1, &r.u2)?;
    }
    emit_json(a.out.as_deref(), &r.summary())
}

#[derive(Debug, Serialize)]
struct QuotientReport {
    params: CouplingParams,
    ratio: f64,
    dichotomy: bool,
    residual: f64,
    iters: usize,
    lower_bound: f64,
    upper_bound: f64,
    label: RegionTag,
}

fn cmd_quotient(a: QuotientArgs) -> Result<(), CliError> {
    let (_, c) = load_townes(a.townes.as_deref())?;
    let p = CouplingParams::new(
        parse_scaled(&a.b1, c.a_star)?,
        parse_scaled(&a.b2, c.a_star)?,
        parse_scaled(&a.beta, c.a_star)?,
    )?;
    let grid = Grid2D::new(a.n, a.extent)?;
    let r = minimizer::quotient_minimizer(&p, &grid, &FlowConfig::default().with_tol(a.tol))?;
    let b = quotient_bounds(&p, c.a_star);
    emit_json(
        a.out.as_deref(),
        &QuotientReport {
            params: p,
            ratio: r.ratio,
            dichotomy: r.dichotomy,
            residual: r.residual,
            iters: r.iters,
            lower_bound: b.lower,
            upper_bound: b.upper,
            label: classify(&p, c.a_star).tag,
        },
    )
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EscapeConfig {
    params: CouplingParams,
    pot: PotentialSpec,
    grid: Grid2D,
    #[serde(default)]
    cfg: FlowConfig,
    #[serde(default)]
    lambdas: Option<Vec<f64>>,
}

fn cmd_escape(a: EscapeArgs) -> Result<(), CliError> {
    let ec: EscapeConfig = read_config(&a.config, a.townes.as_deref())?;
    let lambdas = ec.lambdas.unwrap_or_else(|| DEFAULT_ESCAPE_LAMBDAS.to_vec());
    let out = minimizer::scaling_escape_test(&ec.params, &ec.pot, &ec.grid, &lambdas, &ec.cfg)?;
    emit_json(a.out.as_deref(), &out)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    Many(Vec<SweepSpec>),
    One(Box<SweepSpec>),
}

/// `records.csv`, 2 → `records-2.csv`
fn indexed_path(base: &Path, k: usize) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}-{k}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{k}"),
    };
    base.with_file_name(name)
}

fn cmd_sweep(a: SweepArgs) -> Result<(), CliError> {
    let specs: OneOrMany = read_config(&a.spec, a.townes.as_deref())?;
    let (profile, constants) = load_townes(a.townes.as_deref())?;
    match specs {
        OneOrMany::One(spec) => {
            let recs = blowup::run_sweep(&spec, &profile, &constants)?;
            emit_text(Some(&a.out), &blowup::records_to_csv(&recs))
        }
        OneOrMany::Many(specs) => {
            let results = blowup::run_sweeps(&specs, &profile, &constants, a.jobs);
            // write every finished sweep before reporting the first failure
            let mut first_err = None;
            for (k, r) in results.into_iter().enumerate() {
                match r {
                    Ok(recs) => emit_text(Some(&indexed_path(&a.out, k)), &blowup::records_to_csv(&recs))?,
                    Err(e) => {
                        first_err.get_or_insert(e);
                    }
                }
            }
            match first_err {
                Some(e) => Err(e.into()),
                None => Ok(()),
            }
        }
    }
}

#[derive(Debug, Serialize)]
struct FitReport {
    #[serde(flatten)]
    fit: blowup::FitResult,
    target: f64,
}

fn cmd_fit(a: FitArgs) -> Result<(), CliError> {
    let recs = read_records(&a.records)?;
    let (fit, target) = match a.what {
        FitWhat::Energy => (blowup::fit_energy_exponent(&recs)?, blowup::energy_exponent_target(a.p0)),
        FitWhat::L4 => (
            blowup::fit_l4_exponent(&recs, usize::from(a.component - 1))?,
            blowup::l4_exponent_target(a.p0),
        ),
    };
    emit_json(None, &FitReport { fit, target })
}

#[derive(Debug, Serialize)]
struct SweepSummary {
    records: usize,
    p0: f64,
    gamma: f64,
    energy_fit: blowup::FitResult,
    energy_target: f64,
    l4_fits: [blowup::FitResult; 2],
    l4_target: f64,
    limit_ratios: Vec<f64>,
    final_limit_ratio: f64,
    final_mu_ratios: [f64; 2],
    l4_ratio_deviation: Vec<f64>,
    l4_scale_ratios: Vec<[f64; 2]>,
    profile_distances: Vec<f64>,
    /// `(β/2)∫(u₁²−u₂²)² ≤ energy` at every record
    split_bound_holds: bool,
    concentration: Option<blowup::ConcentrationReport>,
    plots: Vec<PathBuf>,
}

fn cmd_report(a: ReportArgs) -> Result<(), CliError> {
    let recs = read_records(&a.records)?;
    let (profile, mut constants) = load_townes(a.townes.as_deref())?;
    let pot: PotentialSpec = read_config(&a.pot, None)?;
    let an = analyze_potential(&pot)?;
    constants.ensure_moment(&profile, an.p0)?;
    let energy_fit = blowup::fit_energy_exponent(&recs)?;
    let l4_fits = [blowup::fit_l4_exponent(&recs, 0)?, blowup::fit_l4_exponent(&recs, 1)?];
    let limit_ratios = blowup::limit_constant_check(&recs, &constants, &an)?;
    let last = recs.last().expect("fits refuse empty records");
    let l4_scale_ratios = recs
        .iter()
        .map(|r| blowup::l4_scale_ratio(r, &constants, &an))
        .collect::<Result<Vec<_>, _>>()?;
    let mut plots = Vec::new();
    if let Some(dir) = &a.plots {
        fs::create_dir_all(dir)?;
        let eps: Vec<f64> = recs.iter().map(|r| r.eps_raw).collect();
        let en: Vec<f64> = recs.iter().map(|r| r.energy).collect();
        let l4: Vec<f64> = recs.iter().map(|r| r.l4_1).collect();
        for (name, ys, fit, label) in [
            ("energy_fit.svg", &en, &energy_fit, "energy"),
            ("l4_fit.svg", &l4, &l4_fits[0], "L4 norm, component 1"),
        ] {
            let p = dir.join(name);
            atomic_write(&p, plot::loglog_fit(&eps, ys, fit, "eps_raw", label).as_bytes())?;
            plots.push(p);
        }
        if let Some(f) = &a.fields {
            let (u1, _) = read_fields(f)?;
            let p = dir.join("profile_overlay.svg");
            let svg = plot::profile_overlay(&u1, last.eps_raw, &profile, &constants, &an)?;
            atomic_write(&p, svg.as_bytes())?;
            plots.push(p);
        }
    }
    let summary = SweepSummary {
        records: recs.len(),
        p0: an.p0,
        gamma: an.gamma,
        energy_target: blowup::energy_exponent_target(an.p0),
        l4_target: blowup::l4_exponent_target(an.p0),
        energy_fit,
        l4_fits,
        final_limit_ratio: *limit_ratios.last().expect("non-empty"),
        limit_ratios,
        final_mu_ratios: blowup::mu_ratio(last),
        l4_ratio_deviation: recs.iter().map(|r| (r.l4_1 / r.l4_2 - 1.0).abs()).collect(),
        l4_scale_ratios,
        profile_distances: recs.iter().map(|r| r.profile_dist).collect(),
        split_bound_holds: recs.iter().all(|r| 0.5 * r.beta * r.diff2 <= r.energy),
        concentration: a.spacing.map(|h| blowup::concentration_check(&recs, &an, h)),
        plots,
    };
    emit_json(a.out.as_deref(), &summary)
}

fn cmd_scenario(a: ScenarioArgs) -> Result<(), CliError> {
    let grid = Grid2D::new(a.n, a.extent)?;
    let variant = match a.variant {
        VariantArg::Separated => ScenarioVariant::Separated,
        VariantArg::Coincident => ScenarioVariant::Coincident,
        VariantArg::LowPlateau => ScenarioVariant::LowPlateau,
    };
    let r = blowup::separated_wells_scenario(&grid, &FlowConfig::default(), variant)?;
    emit_json(a.out.as_deref(), &r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_literals() {
        assert_eq!(parse_scaled("0.5a", 10.0).unwrap(), 5.0);
        assert_eq!(parse_scaled(" 2 ", 10.0).unwrap(), 2.0);
        assert!(parse_scaled("a", 10.0).is_err());
        assert!(parse_scaled("0.5b", 10.0).is_err());
        let mut v = serde_json::json!({"params": {"b1": "0.5a", "b2": 1.0, "beta": "1e-1a"}, "name": "harmonic"});
        resolve_scaled(&mut v, 10.0).unwrap();
        assert_eq!(v["params"]["b1"], 5.0);
        assert_eq!(v["params"]["beta"], 1.0);
        assert_eq!(v["name"], "harmonic");
    }

    #[test]
    fn error_kinds() {
        assert_eq!(innermost_variant("Blowup(Minimize(NaNDetected { iters: 3 }))"), "NaNDetected");
        assert_eq!(innermost_variant("Blowup(InsufficientSpan { records: 2, decades: 1.0 })"), "InsufficientSpan");
        assert_eq!(innermost_variant("Field(InvalidGrid(\"n\"))"), "InvalidGrid");
        let e: CliError = BlowupError::InvalidSpec("x".into()).into();
        assert_eq!(e.kind(), "InvalidSpec");
    }

    #[test]
    fn axis_and_paths() {
        assert_eq!(parse_axis("0:1:3", 1.0).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_axis("0.1a:0.2a:2", 10.0).unwrap(), vec![1.0, 2.0]);
        assert!(parse_axis("1:0:3", 1.0).is_err());
        assert_eq!(indexed_path(Path::new("out/r.csv"), 2), PathBuf::from("out/r-2.csv"));
    }
}
