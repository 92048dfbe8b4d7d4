//! Evaluation of `u_{α,β}[φ](x) = c_{n,β} ∫ P_{α,β}(x, η) φ(η) dσ(η)`,
//! L^p norms of boundary data, the extremal boundary function
//! `φ₀ = P(x, ·)^{q/p}`, and numerical checks of the pointwise estimate
//!
//! ```text
//! |u(x)| ≤ C_p(x) (1 - |x|²)^{-(n-1)/p} ‖φ‖_p
//! ```
//!
//! Constant and extremal data carry a closed-form tag so their integrals go
//! through the hypergeometric identity
//! `∫ |x - η|^{-2λ} dσ = F(λ, λ - n/2 + 1; n/2; |x|²)` instead of quadrature.
//! [`BoundaryFunction::oracle_only`] drops the tag.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::kernel::{self, BallPoint, KernelError, KernelParams};
use crate::sharp::{self, HolderExponents, SharpError, TheoremWarning};
use crate::specfun::{self, SpecFunError};
use crate::sphere_oracle::{
    self, Estimate, Method, OracleError, OracleMethod, QuadratureSpec, ZonalIntegrand,
};

/// Weights of sampled data must sum to one within this tolerance.
pub const WEIGHT_SUM_TOL: f64 = 1e-10;
/// Largest radius accepted by the quadrature and Monte Carlo paths.
pub const MAX_ORACLE_RADIUS: f64 = 0.999;
/// Sharpness ratio tolerance for closed-form evaluation.
pub const CLOSED_FORM_RATIO_TOL: f64 = 1e-10;
/// Sharpness ratio tolerance for quadrature evaluation.
pub const QUADRATURE_RATIO_TOL: f64 = 1e-6;
/// Bound violations beyond this many combined standard errors are errors.
pub const VIOLATION_SIGMAS: f64 = 4.0;
/// Number of grid points used for the essential supremum of zonal data.
const SUP_GRID: usize = 20_001;

/// Default radii for grid sweeps.
pub const DEFAULT_R_GRID: [f64; 12] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("invalid boundary data: {0}")]
    InvalidBoundary(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("bound violated at {} grid point(s)", .rows.iter().filter(|r| r.violated).count())]
    BoundViolation { rows: Vec<BoundRow> },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Sharp(#[from] SharpError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

pub type Result<T> = std::result::Result<T, TransformError>;

pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SphereFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Boundary data whose integrals are known in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    Constant(f64),
    /// `P_{α,β}(r·axis, ·)^{q/p}`.
    Extremal {
        params: KernelParams,
        exps: HolderExponents,
        r: f64,
    },
}

#[derive(Clone)]
pub struct Zonal {
    profile: ProfileFn,
    axis: Vec<f64>,
    breakpoints: Vec<f64>,
    closed_form: Option<ClosedForm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

/// Scalar boundary data `φ` on `S^{n-1}`.
#[derive(Clone)]
pub enum BoundaryFunction {
    /// `φ(η) = f(⟨axis, η⟩)`.
    Zonal(Zonal),
    /// Arbitrary callable; integrated by Monte Carlo.
    General { n: usize, f: SphereFn },
    /// Point values with cubature weights summing to one.
    Sampled(Sampled),
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryFunction::Zonal(z) => f
                .debug_struct("Zonal")
                .field("axis", &z.axis)
                .field("closed_form", &z.closed_form)
                .finish_non_exhaustive(),
            BoundaryFunction::General { n, .. } => f.debug_struct("General").field("n", n).finish_non_exhaustive(),
            BoundaryFunction::Sampled(s) => f.debug_struct("Sampled").field("len", &s.values.len()).finish(),
        }
    }
}

fn basis_vector(n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[0] = 1.0;
    e
}

impl BoundaryFunction {
    /// `φ ≡ value`.
    pub fn constant(n: usize, value: f64) -> Self {
        BoundaryFunction::Zonal(Zonal {
            profile: Arc::new(move |_| value),
            axis: basis_vector(n),
            breakpoints: Vec::new(),
            closed_form: Some(ClosedForm::Constant(value)),
        })
    }

    pub fn zonal(axis: &[f64], profile: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        Self::zonal_with_breakpoints(axis, profile, Vec::new())
    }

    /// Zonal data with kinks at the given `t` values.
    pub fn zonal_with_breakpoints(
        axis: &[f64],
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
        breakpoints: Vec<f64>,
    ) -> Result<Self> {
        if axis.len() < 3 {
            return Err(TransformError::InvalidBoundary(format!("dimension {} < 3", axis.len())));
        }
        let norm = kernel::euclidean_norm(axis);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(TransformError::InvalidBoundary("zero axis".into()));
        }
        Ok(BoundaryFunction::Zonal(Zonal {
            profile: Arc::new(profile),
            axis: axis.iter().map(|c| c / norm).collect(),
            breakpoints,
            closed_form: None,
        }))
    }

    pub fn general(n: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        BoundaryFunction::General { n, f: Arc::new(f) }
    }

    pub fn sampled(points: Vec<Vec<f64>>, values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != values.len() || points.len() != weights.len() {
            return Err(TransformError::InvalidBoundary(format!(
                "{} points, {} values, {} weights",
                points.len(),
                values.len(),
                weights.len()
            )));
        }
        let n = points[0].len();
        if n < 3 {
            return Err(TransformError::InvalidBoundary(format!("dimension {n} < 3")));
        }
        let mut unit = Vec::with_capacity(points.len());
        for p in &points {
            if p.len() != n {
                return Err(TransformError::InvalidBoundary("points of mixed dimension".into()));
            }
            unit.push(kernel::unit_vector(p)?);
        }
        if values.iter().chain(&weights).any(|v| !v.is_finite()) {
            return Err(TransformError::InvalidBoundary("non-finite value or weight".into()));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(TransformError::InvalidBoundary("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(TransformError::InvalidBoundary(format!("weights sum to {total}, expected 1")));
        }
        Ok(BoundaryFunction::Sampled(Sampled {
            points: unit,
            values,
            weights,
        }))
    }

    /// Sampled data with equal weights.
    pub fn sampled_uniform(points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        let w = 1.0 / points.len().max(1) as f64;
        let weights = vec![w; points.len()];
        Self::sampled(points, values, weights)
    }

    pub fn dim(&self) -> usize {
        match self {
            BoundaryFunction::Zonal(z) => z.axis.len(),
            BoundaryFunction::General { n, .. } => *n,
            BoundaryFunction::Sampled(s) => s.points[0].len(),
        }
    }

    /// Symmetry axis of zonal data.
    pub fn axis(&self) -> Option<&[f64]> {
        match self {
            BoundaryFunction::Zonal(z) => Some(&z.axis),
            _ => None,
        }
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        match self {
            BoundaryFunction::Zonal(z) => z.closed_form,
            _ => None,
        }
    }

    /// The same data without its closed-form tag, so every integral goes
    /// through the numerical oracle.
    pub fn oracle_only(mut self) -> Self {
        if let BoundaryFunction::Zonal(z) = &mut self {
            z.closed_form = None;
        }
        self
    }

    /// `φ(η)`. Sampled data has no values off its nodes.
    pub fn eval(&self, eta: &[f64]) -> Option<f64> {
        match self {
            BoundaryFunction::Zonal(z) => Some((z.profile)(kernel::dot(&z.axis, eta))),
            BoundaryFunction::General { f, .. } => Some(f(eta)),
            BoundaryFunction::Sampled(_) => None,
        }
    }
}

fn mc_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    QuadratureSpec {
        method: OracleMethod::MonteCarlo,
        ..spec.clone()
    }
}

fn check_oracle_radius(r: f64) -> Result<()> {
    if r > MAX_ORACLE_RADIUS {
        Err(TransformError::Precondition(format!(
            "radius {r} exceeds {MAX_ORACLE_RADIUS}, beyond oracle peak resolution"
        )))
    } else {
        Ok(())
    }
}

/// `∫ P_{α,β}(x, η)^q dσ(η)` in closed form at `|x| = r`:
/// `(1 - r²)^{αq + n - 1 - qβ} F((n - qβ)/2, n - 1 - qβ/2; n/2; r²)`.
pub fn kernel_power_integral(params: &KernelParams, q: f64, r: f64) -> Result<f64> {
    let n = params.dim();
    let qb = q * params.beta;
    let s = r * r;
    let f = specfun::hyp2f1_abc(0.5 * (n - qb), n - 1.0 - 0.5 * qb, 0.5 * n, s)?;
    Ok((1.0 - s).powf(params.alpha * q + n - 1.0 - qb) * f)
}

/// Weighted mean with a standard-error style estimate `sqrt(Σ w²(g - mean)²)`.
fn weighted_sum(weights: &[f64], g: impl Iterator<Item = f64>) -> Estimate {
    let g: Vec<f64> = g.collect();
    let terms: Vec<f64> = weights.iter().zip(&g).map(|(w, v)| w * v).collect();
    let value = sphere_oracle::pairwise_sum(&terms);
    let spread: Vec<f64> = weights
        .iter()
        .zip(&g)
        .map(|(w, v)| (w * (v - value)).powi(2))
        .collect();
    Estimate {
        value,
        error: sphere_oracle::pairwise_sum(&spread).sqrt(),
        method: Method::Quadrature,
    }
}

fn closed_form_integral(params: &KernelParams, cf: ClosedForm, axis: &[f64], x: &BallPoint) -> Result<Option<f64>> {
    let r = x.norm();
    match cf {
        ClosedForm::Constant(k) => Ok(Some(k * kernel_power_integral(params, 1.0, r)?)),
        ClosedForm::Extremal { params: p0, exps, r: r0 } => {
            let same_point = match x.direction() {
                None => r0 == 0.0,
                Some(u) => r == r0 && (kernel::dot(&u, axis) - 1.0).abs() <= 1e-14,
            };
            if p0 == *params && same_point {
                Ok(Some(kernel_power_integral(params, exps.q(), r)?))
            } else {
                Ok(None)
            }
        }
    }
}

/// `u_{α,β}[φ](x)`.
///
/// Zonal data goes through the one-dimensional zonal reduction when its axis
/// is parallel to `x` and through the nested two-axis reduction otherwise;
/// with a Monte Carlo spec, or for general callables, the integral is
/// sampled instead. Sampled data uses its weighted sum.
pub fn poisson_integral(
    params: &KernelParams,
    phi: &BoundaryFunction,
    x: &BallPoint,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let n = params.n;
    if phi.dim() != n || x.dim() != n {
        return Err(TransformError::Precondition(format!(
            "dimension mismatch: kernel {n}, data {}, point {}",
            phi.dim(),
            x.dim()
        )));
    }
    let c = params.normalization_constant()?;
    let r = x.norm();

    if let BoundaryFunction::Zonal(z) = phi {
        if let Some(cf) = z.closed_form {
            if let Some(v) = closed_form_integral(params, cf, &z.axis, x)? {
                return Ok(Estimate::exact(c * v));
            }
        }
    }
    match phi {
        BoundaryFunction::Sampled(s) => {
            let mut g = Vec::with_capacity(s.values.len());
            for (p, v) in s.points.iter().zip(&s.values) {
                g.push(kernel::poisson_kernel(params, x, p)? * v);
            }
            Ok(weighted_sum(&s.weights, g.into_iter()).scale(c))
        }
        BoundaryFunction::General { .. } => mc_poisson(params, phi, x, spec, c),
        BoundaryFunction::Zonal(_) if spec.method == OracleMethod::MonteCarlo => mc_poisson(params, phi, x, spec, c),
        BoundaryFunction::Zonal(z) => {
            check_oracle_radius(r)?;
            let f = &z.profile;
            let radial = (1.0 - r * r).powf(params.alpha);
            let half_beta = 0.5 * params.beta;
            let kernel_at = |theta: f64| radial * kernel::distance_squared_angle(r, theta).powf(-half_beta);
            let cos_angle = match x.direction() {
                None => 1.0,
                Some(u) => kernel::dot(&u, &z.axis).clamp(-1.0, 1.0),
            };
            let estimate = if r == 0.0 || cos_angle.abs() >= 1.0 - 1e-14 {
                let sign = if cos_angle < 0.0 { -1.0 } else { 1.0 };
                let breaks: Vec<f64> = z.breakpoints.iter().map(|t| sign * t).collect();
                sphere_oracle::zonal_integral_angular(
                    &|theta: f64| kernel_at(theta) * f(sign * theta.cos()),
                    n,
                    &breaks,
                    spec,
                )?
            } else {
                // ⟨axis, η⟩ = cos_angle·t + sin_angle·s with s = ⟨v, η⟩, v ⊥ x
                let sin_angle = (1.0 - cos_angle * cos_angle).sqrt();
                let g = |t: f64, s: f64| {
                    let theta = t.clamp(-1.0, 1.0).acos();
                    kernel_at(theta) * f(cos_angle * t + sin_angle * s)
                };
                sphere_oracle::biaxial_integral(&g, n, spec)?
            };
            Ok(estimate.scale(c))
        }
    }
}

fn mc_poisson(
    params: &KernelParams,
    phi: &BoundaryFunction,
    x: &BallPoint,
    spec: &QuadratureSpec,
    c: f64,
) -> Result<Estimate> {
    check_oracle_radius(x.norm())?;
    let integrand = |eta: &[f64]| match (kernel::poisson_kernel(params, x, eta), phi.eval(eta)) {
        (Ok(p), Some(v)) => p * v,
        _ => f64::NAN,
    };
    Ok(sphere_oracle::mc_sphere_integral(&integrand, params.n, &mc_spec(spec))?.scale(c))
}

/// Componentwise `u_{α,β}` of vector-valued data, recombined by the
/// Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorEstimate {
    pub components: Vec<Estimate>,
    pub norm: f64,
    /// First-order error bound on `norm`.
    pub error: f64,
}

pub fn poisson_integral_vector(
    params: &KernelParams,
    components: &[BoundaryFunction],
    x: &BallPoint,
    spec: &QuadratureSpec,
) -> Result<VectorEstimate> {
    let components = components
        .iter()
        .map(|phi| poisson_integral(params, phi, x, spec))
        .collect::<Result<Vec<_>>>()?;
    let norm = components.iter().map(|e| e.value * e.value).sum::<f64>().sqrt();
    let error = components.iter().map(|e| e.error * e.error).sum::<f64>().sqrt();
    Ok(VectorEstimate {
        components,
        norm,
        error,
    })
}

/// `φ₀(η) = P_{α,β}(x, η)^{q/p}`, the boundary data attaining the pointwise
/// bound at `x`. At the origin this is the constant 1.
pub fn extremal_boundary(params: &KernelParams, exps: &HolderExponents, x: &BallPoint) -> Result<BoundaryFunction> {
    if exps.is_infinite() {
        return Err(TransformError::Precondition("extremal function needs p < inf".into()));
    }
    if x.dim() != params.n {
        return Err(TransformError::Precondition("point dimension differs from kernel".into()));
    }
    let Some(axis) = x.direction() else {
        return Ok(BoundaryFunction::constant(params.n, 1.0));
    };
    let r = x.norm();
    let p = *params;
    let exponent = exps.q() / exps.p();
    let profile = move |t: f64| kernel::poisson_kernel_radial(&p, r, t).powf(exponent);
    Ok(BoundaryFunction::Zonal(Zonal {
        profile: Arc::new(profile),
        axis,
        breakpoints: Vec::new(),
        closed_form: Some(ClosedForm::Extremal {
            params: *params,
            exps: *exps,
            r,
        }),
    }))
}

fn sup_norm(phi: &BoundaryFunction, spec: &QuadratureSpec) -> Result<Estimate> {
    match phi {
        BoundaryFunction::Zonal(z) => {
            let mut m = z
                .breakpoints
                .iter()
                .map(|&t| (z.profile)(t).abs())
                .fold(0.0f64, f64::max);
            for i in 0..SUP_GRID {
                let t = -1.0 + 2.0 * i as f64 / (SUP_GRID - 1) as f64;
                m = m.max((z.profile)(t).abs());
            }
            Ok(Estimate {
                value: m,
                error: 0.0,
                method: Method::Quadrature,
            })
        }
        BoundaryFunction::General { n, f } => {
            let spec = mc_spec(spec);
            let mut m = 0.0f64;
            for i in 0..spec.mc_samples as u64 {
                m = m.max(f(&sphere_oracle::sphere_sample(spec.seed, i, *n)).abs());
            }
            Ok(Estimate {
                value: m,
                error: 0.0,
                method: Method::MonteCarlo,
            })
        }
        BoundaryFunction::Sampled(s) => Ok(Estimate {
            value: s
                .values
                .iter()
                .zip(&s.weights)
                .filter(|(_, w)| **w > 0.0)
                .map(|(v, _)| v.abs())
                .fold(0.0, f64::max),
            error: 0.0,
            method: Method::Quadrature,
        }),
    }
}

/// `‖φ‖_{L^p(σ)}` for `p` in `[1, ∞]`.
pub fn lp_norm(phi: &BoundaryFunction, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if !(p >= 1.0) {
        return Err(TransformError::Precondition(format!("p = {p} < 1")));
    }
    if p.is_infinite() {
        if let Some(ClosedForm::Constant(k)) = phi.closed_form() {
            return Ok(Estimate::exact(k.abs()));
        }
        return sup_norm(phi, spec);
    }
    match phi.closed_form() {
        Some(ClosedForm::Constant(k)) => return Ok(Estimate::exact(k.abs())),
        Some(ClosedForm::Extremal { params, exps, r }) => {
            let integral = kernel_power_integral(&params, exps.q(), r)?;
            return Ok(Estimate::exact(integral.powf(1.0 / p)));
        }
        None => {}
    }
    let integral = match phi {
        BoundaryFunction::Sampled(s) => weighted_sum(&s.weights, s.values.iter().map(|v| v.abs().powf(p))),
        BoundaryFunction::Zonal(z) if spec.method == OracleMethod::ReducedGaussLegendre => {
            let f = &z.profile;
            let g = ZonalIntegrand::new(z.axis.len(), |t: f64| f(t).abs().powf(p))
                .with_breakpoints(z.breakpoints.clone());
            sphere_oracle::zonal_integral(&g, spec)?
        }
        _ => {
            let integrand = |eta: &[f64]| phi.eval(eta).map_or(f64::NAN, |v| v.abs().powf(p));
            sphere_oracle::mc_sphere_integral(&integrand, phi.dim(), &mc_spec(spec))?
        }
    };
    let value = integral.value.max(0.0).powf(1.0 / p);
    let error = if integral.value > 0.0 {
        value * integral.error / (p * integral.value)
    } else {
        integral.error.powf(1.0 / p)
    };
    Ok(Estimate {
        value,
        error,
        method: integral.method,
    })
}

/// How [`sharpness_ratio`] evaluates its integrals.
#[derive(Debug, Clone, PartialEq)]
pub enum Evaluation {
    ClosedForm,
    Oracle(QuadratureSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessReport {
    /// `|u(x)| (1 - r²)^{(n-1)/p} / (C_p(x) ‖φ₀‖_p)`.
    pub ratio: f64,
    /// First-order error estimate of `ratio` from the oracle errors.
    pub ratio_error: f64,
    /// `C_p(x)`.
    pub closed_form_bound: f64,
    /// `u_{α,β}[φ₀](x)`.
    pub integral_value: f64,
    pub lp_norm: f64,
    pub method: Method,
    pub warnings: Vec<TheoremWarning>,
}

impl SharpnessReport {
    /// Whether the ratio is one within the tolerance of its method.
    pub fn passes(&self) -> bool {
        let deviation = (self.ratio - 1.0).abs();
        match self.method {
            Method::ClosedForm => deviation <= CLOSED_FORM_RATIO_TOL,
            Method::Quadrature => deviation <= QUADRATURE_RATIO_TOL,
            Method::MonteCarlo => deviation <= VIOLATION_SIGMAS * self.ratio_error + 1e-12,
        }
    }
}

fn require_normalized(params: &KernelParams) -> Result<()> {
    if params.is_normalized() {
        Ok(())
    } else {
        Err(TransformError::Precondition(format!(
            "kernel n = {}, alpha = {}, beta = {} is not normalized",
            params.n, params.alpha, params.beta
        )))
    }
}

/// Evaluates `u[φ₀](x)`, `‖φ₀‖_p` and `C_p(x)` at `x = r·e_0` and forms the
/// ratio that equals one when the pointwise bound is attained.
pub fn sharpness_ratio(
    params: &KernelParams,
    exps: &HolderExponents,
    r: f64,
    evaluation: &Evaluation,
) -> Result<SharpnessReport> {
    require_normalized(params)?;
    if exps.is_infinite() {
        return Err(TransformError::Precondition("sharpness ratio needs p < inf".into()));
    }
    let x = BallPoint::radial(params.n, r)?;
    let phi0 = extremal_boundary(params, exps, &x)?;
    let (u, norm) = match evaluation {
        Evaluation::ClosedForm => {
            let spec = QuadratureSpec::default();
            (
                poisson_integral(params, &phi0, &x, &spec)?,
                lp_norm(&phi0, exps.p(), &spec)?,
            )
        }
        Evaluation::Oracle(spec) => {
            check_oracle_radius(r)?;
            let phi0 = phi0.oracle_only();
            (
                poisson_integral(params, &phi0, &x, spec)?,
                lp_norm(&phi0, exps.p(), spec)?,
            )
        }
    };
    let bound = sharp::pointwise_sharp_constant(params, exps, r)?;
    let weight = (1.0 - r * r).powf((params.dim() - 1.0) / exps.p());
    let ratio = u.value.abs() * weight / (bound.value * norm.value);
    let rel_err = u.error / u.value.abs() + norm.error / norm.value;
    let method = match evaluation {
        Evaluation::ClosedForm => Method::ClosedForm,
        Evaluation::Oracle(spec) => spec.method.into(),
    };
    Ok(SharpnessReport {
        ratio,
        ratio_error: ratio * rel_err,
        closed_form_bound: bound.value,
        integral_value: u.value,
        lp_norm: norm.value,
        method,
        warnings: bound.warnings,
    })
}

/// One radius of a [`bound_check`] sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub r: f64,
    pub u_abs: f64,
    /// `C_p(r) (1 - r²)^{-(n-1)/p} ‖φ‖_p`.
    pub bound: f64,
    /// `bound - |u|`.
    pub margin: f64,
    /// Combined oracle error of `bound` and `|u|`.
    pub sigma: f64,
    pub violated: bool,
}

/// Checks `|u(r·axis)| ≤ C_p(r) (1 - r²)^{-(n-1)/p} ‖φ‖_p` on a grid of
/// radii, where `axis` is the symmetry axis of zonal data and `e_0`
/// otherwise. A margin below `-4σ` is reported as [`TransformError::BoundViolation`].
pub fn bound_check(
    params: &KernelParams,
    exps: &HolderExponents,
    phi: &BoundaryFunction,
    r_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<BoundRow>> {
    require_normalized(params)?;
    let axis = phi.axis().map_or_else(|| basis_vector(params.n), <[f64]>::to_vec);
    let norm = lp_norm(phi, exps.p(), spec)?;
    let mut rows = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let x = BallPoint::along(&axis, r)?;
        let u = poisson_integral(params, phi, &x, spec)?;
        let cp = sharp::pointwise_sharp_constant(params, exps, r)?.value;
        let scale = cp * (1.0 - r * r).powf(-(params.dim() - 1.0) * exps.inv_p());
        let bound = scale * norm.value;
        let u_abs = u.value.abs();
        let roundoff = 64.0 * f64::EPSILON * (bound + u_abs);
        let sigma = u.error + scale * norm.error + roundoff;
        let margin = bound - u_abs;
        rows.push(BoundRow {
            r,
            u_abs,
            bound,
            margin,
            sigma,
            violated: margin < -VIOLATION_SIGMAS * sigma,
        });
    }
    if rows.iter().any(|r| r.violated) {
        Err(TransformError::BoundViolation { rows })
    } else {
        Ok(rows)
    }
}
