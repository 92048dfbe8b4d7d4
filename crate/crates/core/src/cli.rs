//! Command-line front end.
//!
//! Every subcommand builds a [`Report`] that serializes to JSON
//! (`{params, rows, summary, oracle, warnings}`) or CSV (fixed header per
//! subcommand, summary and warnings as trailing `#` lines). Floating-point
//! values are written with 17 significant digits so they round-trip.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage or precondition error,
//! 3 warning under `--strict`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Number, Value};
use thiserror::Error;

use crate::kernel::{KernelError, KernelParams};
use crate::sharp::{self, HolderExponents, SharpError, TheoremWarning};
use crate::specfun::{self, SpecFunError};
use crate::sphere_oracle::{self, OracleError, OracleMethod, QuadratureSpec};
use crate::transform::{self, BoundaryFunction, Evaluation, TransformError};

/// Environment variable consulted for `--seed`.
pub const SEED_ENV: &str = "SHARP_POISSON_SEED";
pub const DEFAULT_SEED: u64 = 42;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_STRICT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("boundary data {path}: {message}")]
    Data { path: PathBuf, message: String },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Sharp(#[from] SharpError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "sharp-poisson",
    version,
    about = "Sharp pointwise constants for Poisson-type integrals on the unit ball"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// Treat out-of-range warnings as failures (exit 3).
    #[arg(long, global = true)]
    pub strict: bool,
    /// Worker threads for Monte Carlo sampling.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Monte Carlo sample count.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 1e-13)]
    pub abs_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub rel_tol: f64,
    #[arg(long, global = true, default_value_t = 2000)]
    pub max_subdivisions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Harmonic,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pointwise constants C_p(r) on a radius grid and the global C_p.
    Constants(ConstantsArgs),
    /// Closed form of ∫|x-η|^{-2λ} dσ against the sphere oracle.
    VerifyIdentity(VerifyArgs),
    /// Ratio |u[φ₀](x)| (1-r²)^{(n-1)/p} / (C_p(x) ‖φ₀‖_p) for the extremal φ₀.
    Sharpness(SharpnessArgs),
    /// Scan of ψ on [0, 1) against the predicted regime.
    Monotonicity(MonotonicityArgs),
    /// Margins of the pointwise bound for boundary data read from a file.
    BoundCheck(BoundCheckArgs),
}

/// Kernel selection: `--beta [--alpha]`, `--gamma`, or `--family`.
#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    /// Dimension of the ball.
    #[arg(short = 'n', long = "n")]
    pub n: usize,
    /// Defaults to the normalized value β - n + 1.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Dirichlet-γ family: α = 1 + 2γ, β = n + 2γ.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
}

#[derive(Debug, Clone, Args)]
pub struct ExponentArgs {
    /// Hölder exponent p in (1, inf]; comma separated.
    #[arg(short = 'p', value_delimiter = ',', conflicts_with = "q")]
    pub p: Vec<f64>,
    /// Conjugate exponent q = p/(p-1); comma separated.
    #[arg(short = 'q', value_delimiter = ',')]
    pub q: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub exponents: ExponentArgs,
    /// Radii in [0, 1); comma separated.
    #[arg(long = "r", value_delimiter = ',')]
    pub r: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(short = 'n', long = "n", default_value_t = 3)]
    pub n: usize,
    /// Defaults to 1, n/2, n-1, 1.7, 3.3.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    /// Defaults to 0, 0.3, 0.7, 0.95.
    #[arg(long = "r", value_delimiter = ',')]
    pub r: Vec<f64>,
    /// Tolerance on |closed - oracle| / max(1, |closed|).
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Use the Monte Carlo oracle; agreement is then judged at 4σ.
    #[arg(long)]
    pub mc: bool,
}

#[derive(Debug, Args)]
pub struct SharpnessArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub exponents: ExponentArgs,
    /// Defaults to 0, 0.5, 0.9.
    #[arg(long = "r", value_delimiter = ',')]
    pub r: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Mode::ClosedForm)]
    pub mode: Mode,
}

#[derive(Debug, Args)]
pub struct MonotonicityArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub exponents: ExponentArgs,
    /// Defaults to 0, 0.05, ..., 0.95.
    #[arg(long = "r", value_delimiter = ',')]
    pub r: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct BoundCheckArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub exponents: ExponentArgs,
    /// Rows `t,value` (zonal about e_1) or `x_1,...,x_n,value[,weight]`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long = "r", value_delimiter = ',')]
    pub r: Vec<f64>,
    /// Use the Monte Carlo oracle.
    #[arg(long)]
    pub mc: bool,
}

/// Parsed kernel with the warnings its parameterization carries.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelChoice {
    pub params: KernelParams,
    pub warnings: Vec<TheoremWarning>,
}

impl KernelArgs {
    pub fn resolve(&self) -> Result<KernelChoice> {
        let styles = [self.beta.is_some(), self.gamma.is_some(), self.family.is_some()];
        if styles.iter().filter(|s| **s).count() != 1 {
            return Err(CliError::Usage(
                "give exactly one of --beta [--alpha], --gamma, --family".into(),
            ));
        }
        if self.alpha.is_some() && self.beta.is_none() {
            return Err(CliError::Usage("--alpha requires --beta".into()));
        }
        let n = self.n;
        let mut warnings = Vec::new();
        let params = if let Some(beta) = self.beta {
            match self.alpha {
                Some(alpha) => KernelParams::new(n, alpha, beta)?,
                None => KernelParams::normalized(n, beta)?,
            }
        } else if let Some(gamma) = self.gamma {
            if gamma < 0.0 {
                warnings.push(TheoremWarning::NegativeGamma { gamma });
            }
            KernelParams::dirichlet_gamma(n, gamma)?
        } else {
            match self.family {
                Some(Family::Harmonic) => KernelParams::harmonic(n)?,
                Some(Family::Hyperbolic) | None => KernelParams::hyperbolic(n)?,
            }
        };
        if params.beta < params.dim() {
            warnings.push(TheoremWarning::BetaBelowDimension { n, beta: params.beta });
        }
        Ok(KernelChoice { params, warnings })
    }
}

impl ExponentArgs {
    pub fn resolve(&self) -> Result<Vec<HolderExponents>> {
        let list = if !self.q.is_empty() {
            self.q.iter().map(|&q| HolderExponents::from_q(q)).collect::<std::result::Result<Vec<_>, _>>()?
        } else {
            self.p.iter().map(|&p| HolderExponents::from_p(p)).collect::<std::result::Result<Vec<_>, _>>()?
        };
        Ok(list)
    }

    fn resolve_or(&self, default_p: &[f64]) -> Result<Vec<HolderExponents>> {
        if self.p.is_empty() && self.q.is_empty() {
            Ok(default_p.iter().map(|&p| HolderExponents::from_p(p)).collect::<std::result::Result<Vec<_>, _>>()?)
        } else {
            self.resolve()
        }
    }

    fn single(&self) -> Result<HolderExponents> {
        match self.resolve()?.as_slice() {
            [e] => Ok(*e),
            _ => Err(CliError::Usage("give exactly one value of -p or -q".into())),
        }
    }
}

/// A serialized subcommand result.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub params: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Map<String, Value>,
    pub oracle: Value,
    pub warnings: Vec<String>,
    /// A verification check failed.
    pub failed: bool,
}

impl Report {
    fn new(params: Value, columns: Vec<&'static str>, oracle: Value) -> Self {
        Report {
            params,
            columns,
            rows: Vec::new(),
            summary: Map::new(),
            oracle,
            warnings: Vec::new(),
            failed: false,
        }
    }

    fn warn(&mut self, w: impl ToString) {
        let w = w.to_string();
        if !self.warnings.contains(&w) {
            self.warnings.push(w);
        }
    }

    pub fn to_json(&self) -> String {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.to_string(), v.clone()))
                        .collect(),
                )
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("params".into(), self.params.clone());
        doc.insert("rows".into(), Value::Array(rows));
        doc.insert("summary".into(), Value::Object(self.summary.clone()));
        doc.insert("oracle".into(), self.oracle.clone());
        doc.insert(
            "warnings".into(),
            Value::Array(self.warnings.iter().cloned().map(Value::String).collect()),
        );
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(csv_cell)).map_err(csv_io)?;
        }
        let mut out = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        let params = serde_json::to_string(&self.params).expect("serializable");
        writeln!(out, "# params={params}")?;
        for (k, v) in &self.summary {
            writeln!(out, "# {k}={}", csv_cell(v))?;
        }
        writeln!(out, "# oracle={}", serde_json::to_string(&self.oracle).expect("serializable"))?;
        for warning in &self.warnings {
            writeln!(out, "# warning={warning}")?;
        }
        Ok(String::from_utf8(out).expect("utf-8"))
    }
}

fn csv_io(e: csv::Error) -> CliError {
    CliError::Io(e.into())
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// JSON number with 17 significant digits; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&format!("{x:.16e}")).expect("valid number literal"))
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

fn int(x: usize) -> Value {
    Value::from(x as u64)
}

fn params_value(p: &KernelParams) -> Value {
    let mut m = Map::new();
    m.insert("n".into(), int(p.n));
    m.insert("alpha".into(), num(p.alpha));
    m.insert("beta".into(), num(p.beta));
    Value::Object(m)
}

fn oracle_value(method: &str, g: &GlobalArgs, samples: Option<usize>) -> Value {
    let mut tol = Map::new();
    tol.insert("abs".into(), num(g.abs_tol));
    tol.insert("rel".into(), num(g.rel_tol));
    let mut m = Map::new();
    m.insert("method".into(), Value::String(method.into()));
    m.insert("seed".into(), Value::from(g.seed));
    m.insert("tol".into(), Value::Object(tol));
    if let Some(s) = samples {
        m.insert("samples".into(), int(s));
    }
    Value::Object(m)
}

fn quadrature_spec(g: &GlobalArgs, method: OracleMethod) -> Result<QuadratureSpec> {
    let spec = QuadratureSpec {
        method,
        abs_tol: g.abs_tol,
        rel_tol: g.rel_tol,
        max_subdivisions: g.max_subdivisions,
        mc_samples: g.samples,
        seed: g.seed,
        threads: g.threads,
    };
    spec.validate()?;
    Ok(spec)
}

fn radii(given: &[f64], default: &[f64], allow_boundary: bool) -> Result<Vec<f64>> {
    let r = if given.is_empty() { default.to_vec() } else { given.to_vec() };
    let upper_ok = |x: f64| if allow_boundary { x <= 1.0 } else { x < 1.0 };
    if let Some(bad) = r.iter().find(|&&x| !(x >= 0.0 && upper_ok(x))) {
        return Err(CliError::Usage(format!("radius {bad} outside [0, 1)")));
    }
    Ok(r)
}

fn p_value(e: &HolderExponents) -> Value {
    num(e.p())
}

pub fn cmd_constants(args: &ConstantsArgs, g: &GlobalArgs) -> Result<Report> {
    let kernel = args.kernel.resolve()?;
    let params = kernel.params;
    let exps = args.exponents.single()?;
    let grid = radii(&args.r, &transform::DEFAULT_R_GRID, false)?;
    let mut report = Report::new(
        params_value(&params),
        vec!["r", "c_p_r"],
        oracle_value("closed_form", g, None),
    );
    for w in &kernel.warnings {
        report.warn(w);
    }
    for &r in &grid {
        let c = sharp::pointwise_sharp_constant(&params, &exps, r)?;
        report.rows.push(vec![num(r), num(c.value)]);
    }
    let global = sharp::global_sharp_constant(&params, &exps)?;
    let s = &mut report.summary;
    s.insert("p".into(), p_value(&exps));
    s.insert("q".into(), num(exps.q()));
    s.insert("c_p".into(), num(global.value));
    s.insert("regime".into(), Value::String(global.regime.as_str().into()));
    s.insert("branch_condition".into(), Value::String(global.branch_condition.clone()));
    s.insert("normalization_constant".into(), num(params.normalization_constant()?));
    s.insert("regime_threshold".into(), num(sharp::regime_threshold(&params)));
    Ok(report)
}

pub fn cmd_verify_identity(args: &VerifyArgs, g: &GlobalArgs) -> Result<Report> {
    let n = args.n;
    if n < 3 {
        return Err(CliError::Usage(format!("dimension {n} < 3")));
    }
    let nf = n as f64;
    let lambdas = if args.lambda.is_empty() {
        vec![1.0, nf / 2.0, nf - 1.0, 1.7, 3.3]
    } else {
        args.lambda.clone()
    };
    let grid = radii(&args.r, &[0.0, 0.3, 0.7, 0.95], false)?;
    if !(args.tol > 0.0) {
        return Err(CliError::Usage(format!("tolerance {} must be positive", args.tol)));
    }
    let method = if args.mc { OracleMethod::MonteCarlo } else { OracleMethod::ReducedGaussLegendre };
    let spec = quadrature_spec(g, method)?;
    let mut params = Map::new();
    params.insert("n".into(), int(n));
    params.insert("alpha".into(), Value::Null);
    params.insert("beta".into(), Value::Null);
    let mut report = Report::new(
        Value::Object(params),
        vec!["lambda", "r", "closed", "oracle", "abs_error", "sigma", "pass"],
        oracle_value(method.as_str(), g, args.mc.then_some(g.samples)),
    );
    let (mut max_abs, mut max_scaled, mut failures) = (0.0f64, 0.0f64, 0usize);
    for &lambda in &lambdas {
        for &r in &grid {
            let closed = specfun::hyp2f1_abc(lambda, lambda - nf / 2.0 + 1.0, nf / 2.0, r * r)?;
            let oracle = if args.mc {
                let f = |eta: &[f64]| crate::kernel::distance_squared(r, eta[0]).powf(-lambda);
                sphere_oracle::mc_sphere_integral(&f, n, &spec)
            } else {
                sphere_oracle::distance_power_integral(n, lambda, r, &spec)
            };
            match oracle {
                Ok(est) => {
                    let err = (est.value - closed).abs();
                    let scaled = err / closed.abs().max(1.0);
                    let pass = if args.mc {
                        err <= 4.0 * est.error + 1e-12 * closed.abs().max(1.0)
                    } else {
                        scaled <= args.tol
                    };
                    max_abs = max_abs.max(err);
                    max_scaled = max_scaled.max(scaled);
                    failures += usize::from(!pass);
                    report.rows.push(vec![
                        num(lambda),
                        num(r),
                        num(closed),
                        num(est.value),
                        num(err),
                        num(est.error),
                        Value::Bool(pass),
                    ]);
                }
                Err(e) => {
                    failures += 1;
                    report.warn(format!("lambda = {lambda}, r = {r}: {e}"));
                    report.rows.push(vec![
                        num(lambda),
                        num(r),
                        num(closed),
                        Value::Null,
                        Value::Null,
                        Value::Null,
                        Value::Bool(false),
                    ]);
                }
            }
        }
    }
    let s = &mut report.summary;
    s.insert("max_abs_error".into(), num(max_abs));
    s.insert("max_scaled_error".into(), num(max_scaled));
    s.insert("tolerance".into(), if args.mc { Value::String("4 sigma".into()) } else { num(args.tol) });
    s.insert("failures".into(), int(failures));
    s.insert("pass".into(), Value::Bool(failures == 0));
    report.failed = failures > 0;
    Ok(report)
}

pub fn cmd_sharpness(args: &SharpnessArgs, g: &GlobalArgs) -> Result<Report> {
    let kernel = args.kernel.resolve()?;
    let params = kernel.params;
    let exps = args.exponents.resolve_or(&[1.25, 2.0, 4.0])?;
    let grid = radii(&args.r, &[0.0, 0.5, 0.9], false)?;
    let (evaluation, method_name, samples) = match args.mode {
        Mode::ClosedForm => (Evaluation::ClosedForm, "closed_form", None),
        Mode::Quadrature => (
            Evaluation::Oracle(quadrature_spec(g, OracleMethod::ReducedGaussLegendre)?),
            OracleMethod::ReducedGaussLegendre.as_str(),
            None,
        ),
        Mode::MonteCarlo => (
            Evaluation::Oracle(quadrature_spec(g, OracleMethod::MonteCarlo)?),
            OracleMethod::MonteCarlo.as_str(),
            Some(g.samples),
        ),
    };
    let mut report = Report::new(
        params_value(&params),
        vec![
            "p",
            "q",
            "r",
            "ratio",
            "ratio_error",
            "closed_form_bound",
            "integral_value",
            "lp_norm",
            "method",
            "pass",
        ],
        oracle_value(method_name, g, samples),
    );
    for w in &kernel.warnings {
        report.warn(w);
    }
    let (mut max_dev, mut failures) = (0.0f64, 0usize);
    for e in &exps {
        for &r in &grid {
            let rep = transform::sharpness_ratio(&params, e, r, &evaluation)?;
            for w in &rep.warnings {
                report.warn(w);
            }
            let pass = rep.passes();
            max_dev = max_dev.max((rep.ratio - 1.0).abs());
            failures += usize::from(!pass);
            report.rows.push(vec![
                p_value(e),
                num(e.q()),
                num(r),
                num(rep.ratio),
                num(rep.ratio_error),
                num(rep.closed_form_bound),
                num(rep.integral_value),
                num(rep.lp_norm),
                Value::String(rep.method.as_str().into()),
                Value::Bool(pass),
            ]);
        }
    }
    let tolerance = match args.mode {
        Mode::ClosedForm => num(transform::CLOSED_FORM_RATIO_TOL),
        Mode::Quadrature => num(transform::QUADRATURE_RATIO_TOL),
        Mode::MonteCarlo => Value::String("4 sigma".into()),
    };
    let s = &mut report.summary;
    s.insert("max_deviation".into(), num(max_dev));
    s.insert("tolerance".into(), tolerance);
    s.insert("failures".into(), int(failures));
    s.insert("pass".into(), Value::Bool(failures == 0));
    report.failed = failures > 0;
    Ok(report)
}

/// `0, 0.05, ..., 0.95`.
pub fn default_scan_grid() -> Vec<f64> {
    (0..20).map(|i| i as f64 / 20.0).collect()
}

pub fn cmd_monotonicity(args: &MonotonicityArgs, g: &GlobalArgs) -> Result<Report> {
    let kernel = args.kernel.resolve()?;
    let params = kernel.params;
    let exps = args.exponents.resolve()?;
    if exps.is_empty() {
        return Err(CliError::Usage("give -p or -q".into()));
    }
    let grid = radii(&args.r, &default_scan_grid(), true)?;
    let mut report = Report::new(
        params_value(&params),
        vec!["q", "r", "psi"],
        oracle_value("closed_form", g, None),
    );
    for w in &kernel.warnings {
        report.warn(w);
    }
    let mut scans = Vec::new();
    let mut failures = 0usize;
    for e in &exps {
        let (values, direction) = sharp::psi_scan(&params, e, &grid)?;
        let regime = sharp::classify_regime(&params, e);
        let consistent = regime.admits(direction);
        failures += usize::from(!consistent);
        for (&r, &v) in grid.iter().zip(&values) {
            report.rows.push(vec![num(e.q()), num(r), num(v)]);
        }
        let mut scan = Map::new();
        scan.insert("p".into(), p_value(e));
        scan.insert("q".into(), num(e.q()));
        scan.insert("regime".into(), Value::String(regime.as_str().into()));
        scan.insert("direction".into(), Value::String(direction.as_str().into()));
        scan.insert("consistent".into(), Value::Bool(consistent));
        scans.push(Value::Object(scan));
    }
    let s = &mut report.summary;
    s.insert("regime_threshold".into(), num(sharp::regime_threshold(&params)));
    s.insert("scans".into(), Value::Array(scans));
    s.insert("pass".into(), Value::Bool(failures == 0));
    report.failed = failures > 0;
    Ok(report)
}

fn data_error(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Data {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Reads boundary data for an `n`-dimensional ball.
///
/// Two columns give zonal data `t,value` about `e_1`, interpolated linearly
/// between nodes and held constant outside them. `n + 1` or `n + 2` columns
/// give sampled data `x_1..x_n,value[,weight]`; missing weights are equal.
/// Lines starting with `#` are comments; a non-numeric first row is a header.
pub fn read_boundary_data(path: &Path, n: usize) -> Result<BoundaryFunction> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| data_error(path, e.to_string()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| data_error(path, e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(f64::from_str).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(data_error(path, format!("record {}: {e}", i + 1))),
        }
    }
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(data_error(path, "rows of differing width"));
    }
    if width == 2 {
        zonal_from_rows(path, rows, n)
    } else if width == n + 1 || width == n + 2 {
        let mut points = Vec::with_capacity(rows.len());
        let mut values = Vec::with_capacity(rows.len());
        let mut weights = Vec::with_capacity(rows.len());
        for row in rows {
            points.push(row[..n].to_vec());
            values.push(row[n]);
            if width == n + 2 {
                weights.push(row[n + 1]);
            }
        }
        let phi = if weights.is_empty() {
            BoundaryFunction::sampled_uniform(points, values)
        } else {
            BoundaryFunction::sampled(points, values, weights)
        };
        phi.map_err(|e| data_error(path, e.to_string()))
    } else {
        Err(data_error(
            path,
            format!("expected 2, {} or {} columns, found {width}", n + 1, n + 2),
        ))
    }
}

fn zonal_from_rows(path: &Path, mut rows: Vec<Vec<f64>>, n: usize) -> Result<BoundaryFunction> {
    if rows.len() < 2 {
        return Err(data_error(path, "zonal data needs at least two rows"));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) || rows.iter().any(|r| !(-1.0..=1.0).contains(&r[0])) {
        return Err(data_error(path, "t must lie in [-1, 1] and values must be finite"));
    }
    rows.sort_by(|a, b| a[0].total_cmp(&b[0]));
    if rows.windows(2).any(|w| w[0][0] == w[1][0]) {
        return Err(data_error(path, "repeated t value"));
    }
    let ts: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let vs: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let breakpoints = ts.clone();
    let profile = move |t: f64| {
        let k = ts.partition_point(|&x| x <= t);
        if k == 0 {
            vs[0]
        } else if k == ts.len() {
            vs[ts.len() - 1]
        } else {
            let (t0, t1) = (ts[k - 1], ts[k]);
            let w = (t - t0) / (t1 - t0);
            vs[k - 1] + w * (vs[k] - vs[k - 1])
        }
    };
    let mut axis = vec![0.0; n];
    axis[0] = 1.0;
    BoundaryFunction::zonal_with_breakpoints(&axis, profile, breakpoints).map_err(|e| data_error(path, e.to_string()))
}

pub fn cmd_bound_check(args: &BoundCheckArgs, g: &GlobalArgs) -> Result<Report> {
    let kernel = args.kernel.resolve()?;
    let params = kernel.params;
    let exps = args.exponents.single()?;
    let grid = radii(&args.r, &transform::DEFAULT_R_GRID, false)?;
    let phi = read_boundary_data(&args.data, params.n)?;
    let method = if args.mc { OracleMethod::MonteCarlo } else { OracleMethod::ReducedGaussLegendre };
    let spec = quadrature_spec(g, method)?;
    let mut report = Report::new(
        params_value(&params),
        vec!["r", "u_abs", "bound", "margin", "sigma", "violated"],
        oracle_value(method.as_str(), g, args.mc.then_some(g.samples)),
    );
    for w in &kernel.warnings {
        report.warn(w);
    }
    if let Some(w) = sharp::pointwise_sharp_constant(&params, &exps, 0.0)?.warnings.first() {
        report.warn(w);
    }
    let rows = match transform::bound_check(&params, &exps, &phi, &grid, &spec) {
        Ok(rows) => rows,
        Err(TransformError::BoundViolation { rows }) => {
            report.failed = true;
            rows
        }
        Err(e) => return Err(e.into()),
    };
    let mut min_margin = f64::INFINITY;
    for row in &rows {
        min_margin = min_margin.min(row.margin);
        report.rows.push(vec![
            num(row.r),
            num(row.u_abs),
            num(row.bound),
            num(row.margin),
            num(row.sigma),
            Value::Bool(row.violated),
        ]);
    }
    let violations = rows.iter().filter(|r| r.violated).count();
    let s = &mut report.summary;
    s.insert("p".into(), p_value(&exps));
    s.insert("q".into(), num(exps.q()));
    s.insert("min_margin".into(), num(min_margin));
    s.insert("violations".into(), int(violations));
    s.insert("pass".into(), Value::Bool(violations == 0));
    Ok(report)
}

fn execute(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Constants(a) => cmd_constants(a, g),
        Command::VerifyIdentity(a) => cmd_verify_identity(a, g),
        Command::Sharpness(a) => cmd_sharpness(a, g),
        Command::Monotonicity(a) => cmd_monotonicity(a, g),
        Command::BoundCheck(a) => cmd_bound_check(a, g),
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code. Data goes to `stdout` or `--output`,
/// diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let text = match cli.global.format {
        Format::Json => report.to_json(),
        Format::Csv => match report.to_csv() {
            Ok(t) => t,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_USAGE;
            }
        },
    };
    let written = match &cli.global.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => stdout.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: writing output: {e}");
        return EXIT_USAGE;
    }
    for w in &report.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    if report.failed {
        let _ = writeln!(stderr, "verification failed");
        EXIT_FAILURE
    } else if cli.global.strict && !report.warnings.is_empty() {
        EXIT_STRICT
    } else {
        EXIT_OK
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("sharp-poisson").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn json(args: &[&str]) -> (i32, Value) {
        let (code, out, err) = run_str(args);
        assert!(!out.is_empty(), "no output; stderr: {err}");
        (code, serde_json::from_str(&out).unwrap())
    }

    fn f(v: &Value) -> f64 {
        v.as_f64().unwrap()
    }

    #[test]
    fn number_format_round_trips() {
        for x in [1.0, 0.1, 1.0 / 3.0, 2f64.sqrt(), 1e-300, -7.25e12] {
            let v = num(x);
            assert_eq!(f(&v), x);
        }
        assert_eq!(num(1.0).to_string(), "1.0000000000000000e+0");
        assert_eq!(num(f64::INFINITY), Value::String("inf".into()));
    }

    #[test]
    fn constants_harmonic_rows() {
        let (code, v) = json(&["constants", "--family", "harmonic", "-n", "3", "-p", "2", "--r", "0,0.5"]);
        assert_eq!(code, 0);
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(f(&rows[0]["c_p_r"]), 1.0);
        assert!((f(&rows[1]["c_p_r"]) - 1.25f64.sqrt()).abs() < 1e-14);
        for key in ["params", "rows", "summary", "oracle", "warnings"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["oracle"]["seed"].as_u64(), Some(DEFAULT_SEED));
    }

    #[test]
    fn constants_infinite_p() {
        let (code, v) = json(&["constants", "-n", "3", "--beta", "3", "-p", "inf", "--r", "0"]);
        assert_eq!(code, 0);
        assert_eq!(f(&v["summary"]["c_p"]), 1.0);
        assert_eq!(v["summary"]["p"], Value::String("inf".into()));
    }

    #[test]
    fn gamma_zero_matches_harmonic_bytes() {
        let a = run_str(&["constants", "--gamma", "0", "-n", "3", "-p", "2"]);
        let b = run_str(&["constants", "--family", "harmonic", "-n", "3", "-p", "2"]);
        assert_eq!(a.0, 0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn kernel_style_must_be_unique() {
        assert_eq!(run_str(&["constants", "-n", "3", "-p", "2"]).0, EXIT_USAGE);
        assert_eq!(
            run_str(&["constants", "-n", "3", "-p", "2", "--beta", "3", "--gamma", "0"]).0,
            EXIT_USAGE
        );
        assert_eq!(run_str(&["constants", "-n", "3", "-p", "2", "--alpha", "1", "--gamma", "0"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["constants", "-n", "3", "-p", "0.5", "--beta", "3"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn strict_promotes_warnings() {
        let args = ["constants", "--gamma", "-0.2", "-n", "3", "-p", "2", "--r", "0"];
        let (code, v) = json(&args);
        assert_eq!(code, 0);
        assert!(!v["warnings"].as_array().unwrap().is_empty());
        let mut strict = args.to_vec();
        strict.push("--strict");
        assert_eq!(run_str(&strict).0, EXIT_STRICT);
    }

    #[test]
    fn verify_identity_at_origin() {
        let (code, v) = json(&["verify-identity", "--r", "0"]);
        assert_eq!(code, 0);
        for row in v["rows"].as_array().unwrap() {
            assert!(f(&row["abs_error"]) <= 1e-14);
        }
    }

    #[test]
    fn verify_identity_flags_failure() {
        let (code, v) = json(&["verify-identity", "--r", "0.7", "--lambda", "1.7", "--tol", "1e-30"]);
        assert_eq!(code, EXIT_FAILURE);
        assert_eq!(v["summary"]["pass"], Value::Bool(false));
    }

    #[test]
    fn sharpness_rows() {
        let (code, v) = json(&["sharpness", "--family", "harmonic", "-n", "3", "-p", "2"]);
        assert_eq!(code, 0);
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(f(&rows[0]["ratio"]), 1.0);
        for row in rows {
            assert!((f(&row["ratio"]) - 1.0).abs() <= 1e-10);
        }
        let (code, v) = json(&[
            "sharpness", "--family", "hyperbolic", "-n", "3", "-p", "1.5", "--r", "0.5", "--mode", "quadrature",
        ]);
        assert_eq!(code, 0);
        assert!((f(&v["rows"][0]["ratio"]) - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn monotonicity_examples() {
        for (beta, q, direction, regime) in [
            ("3", "1.2", "non_increasing", "constant_at_zero"),
            ("4", "2", "non_decreasing", "sup_at_boundary"),
            ("3", "1.3333333333333333", "constant", "degenerate"),
        ] {
            let (code, v) = json(&["monotonicity", "-n", "3", "--beta", beta, "-q", q]);
            assert_eq!(code, 0, "beta {beta}, q {q}");
            let scan = &v["summary"]["scans"][0];
            assert_eq!(scan["direction"], Value::String(direction.into()));
            assert_eq!(scan["regime"], Value::String(regime.into()));
        }
    }

    #[test]
    fn csv_layout() {
        let (code, out, _) = run_str(&[
            "constants", "--family", "harmonic", "-n", "3", "-p", "2", "--r", "0,0.5", "--format", "csv",
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "r,c_p_r");
        assert_eq!(lines[1], "0.0000000000000000e+0,1.0000000000000000e+0");
        assert!(lines[3].starts_with("# params="));
        assert!(out.contains("# regime=sup_at_boundary"));
    }

    #[test]
    fn boundary_data_files() {
        let dir = tempfile::tempdir().unwrap();
        let zonal = dir.path().join("zonal.csv");
        std::fs::write(&zonal, "# piecewise linear\nt,value\n-1,0\n0,1\n1,0\n").unwrap();
        let phi = read_boundary_data(&zonal, 3).unwrap();
        assert_eq!(phi.eval(&[0.5, 0.0, (0.75f64).sqrt()]), Some(0.5));

        let sampled = dir.path().join("sampled.csv");
        std::fs::write(&sampled, "1,0,0,2\n-1,0,0,4\n").unwrap();
        let phi = read_boundary_data(&sampled, 3).unwrap();
        let norm = transform::lp_norm(&phi, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((norm.value - 3.0).abs() < 1e-15);

        let bad = dir.path().join("bad.csv");
        std::fs::write(&bad, "1,2,3\n").unwrap();
        assert!(read_boundary_data(&bad, 3).is_err());

        let zonal_arg = zonal.to_str().unwrap();
        let (code, v) = json(&["bound-check", "--family", "harmonic", "-n", "3", "-p", "2", "--data", zonal_arg]);
        assert_eq!(code, 0);
        assert_eq!(v["summary"]["violations"].as_u64(), Some(0));
    }
}
