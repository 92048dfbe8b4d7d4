//! Integration over the unit sphere `S^{n-1}` under the normalized surface
//! measure `σ`.
//!
//! Two unrelated routes are provided:
//!
//! * zonal reduction: for `f` depending only on `t = ⟨u, η⟩`,
//!   `∫ f dσ = C_n ∫_0^π f(cos θ) sin^{n-2}θ dθ` with
//!   `C_n = Γ(n/2) / (√π Γ((n-1)/2))`, integrated by adaptive bisection with
//!   20-point Gauss–Legendre panels;
//! * Monte Carlo with normalized Gaussian samples, where sample `i` is drawn
//!   from its own ChaCha stream so results do not depend on scheduling.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::kernel::{self, KernelError, KernelParams};
use crate::specfun::{self, SpecFunError};

/// Gauss–Legendre panel order.
pub const PANEL_ORDER: usize = 20;
/// Initial uniform split of `[0, π]` before adaptive refinement.
const INITIAL_PANELS: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("tolerance not met after {subdivisions} subdivisions: estimate {estimate}, error {error}")]
    ToleranceNotMet {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },
    #[error("radius {0} outside [0, 1)")]
    Radius(f64),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

pub type Result<T> = std::result::Result<T, OracleError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleMethod {
    ReducedGaussLegendre,
    MonteCarlo,
}

impl OracleMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            OracleMethod::ReducedGaussLegendre => "gauss_legendre",
            OracleMethod::MonteCarlo => "monte_carlo",
        }
    }
}

/// How a reported number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl From<OracleMethod> for Method {
    fn from(m: OracleMethod) -> Self {
        match m {
            OracleMethod::ReducedGaussLegendre => Method::Quadrature,
            OracleMethod::MonteCarlo => Method::MonteCarlo,
        }
    }
}

/// An integral value with its error estimate.
///
/// For quadrature `error` is the adaptive error estimate; for Monte Carlo it
/// is the standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub method: Method,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error: 0.0,
            method: Method::ClosedForm,
        }
    }

    pub fn scale(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error: self.error * factor.abs(),
            method: self.method,
        }
    }
}

/// Oracle configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub method: OracleMethod,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub mc_samples: usize,
    pub seed: u64,
    /// Worker threads for Monte Carlo; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            method: OracleMethod::ReducedGaussLegendre,
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
            mc_samples: 100_000,
            seed: 0,
            threads: None,
        }
    }
}

impl QuadratureSpec {
    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self {
            method: OracleMethod::MonteCarlo,
            mc_samples: samples,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(OracleError::InvalidSpec(format!(
                "tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.mc_samples < 1000 {
            return Err(OracleError::InvalidSpec(format!(
                "mc_samples = {} below 1000",
                self.mc_samples
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(OracleError::InvalidSpec("max_subdivisions must be >= 1".into()));
        }
        if self.threads == Some(0) {
            return Err(OracleError::InvalidSpec("threads must be >= 1".into()));
        }
        Ok(())
    }
}

struct GaussLegendre {
    nodes: [f64; PANEL_ORDER],
    weights: [f64; PANEL_ORDER],
}

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_N`.
fn gauss_legendre() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = PANEL_ORDER;
        let mut nodes = [0.0; PANEL_ORDER];
        let mut weights = [0.0; PANEL_ORDER];
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    })
}

fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let rule = gauss_legendre();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let s: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(z, w)| w * f(mid + half * z))
        .sum();
    s * half
}

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    err: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64) -> Result<Self> {
        let m = 0.5 * (a + b);
        let left = gl_panel(f, a, m);
        let right = gl_panel(f, m, b);
        for v in [whole, left, right] {
            if !v.is_finite() {
                return Err(OracleError::NonFinite { at: m });
            }
        }
        Ok(Self {
            a,
            b,
            left,
            right,
            err: (whole - (left + right)).abs(),
        })
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }
}

/// Globally adaptive bisection on `[a, b]` with Gauss–Legendre panels.
///
/// Each panel is scored by the gap between its one-panel and two-half-panel
/// rules; the worst panel is bisected until the summed gap is within
/// `max(abs_tol, rel_tol·|value|)`.
pub(crate) fn adaptive_gauss_legendre<F: Fn(f64) -> f64>(
    f: &F,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<(f64, f64)> {
    let mut panels = Vec::new();
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            panels.push(Panel::new(f, w[0], w[1], gl_panel(f, w[0], w[1]))?);
        }
    }
    let mut subdivisions = 0;
    loop {
        let value: f64 = panels.iter().map(Panel::value).sum();
        let error: f64 = panels.iter().map(|p| p.err).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok((value, error));
        }
        if subdivisions >= max_subdivisions {
            return Err(OracleError::ToleranceNotMet {
                estimate: value,
                error,
                subdivisions,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a && m < p.b) {
            // interval exhausted at floating point resolution
            return Err(OracleError::ToleranceNotMet {
                estimate: value,
                error,
                subdivisions,
            });
        }
        panels.push(Panel::new(f, p.a, m, p.left)?);
        panels.push(Panel::new(f, m, p.b, p.right)?);
        subdivisions += 1;
    }
}

/// `C_n = Γ(n/2) / (√π Γ((n-1)/2))`, the density normalizer of `t = ⟨u, η⟩`.
pub fn zonal_constant(n: usize) -> Result<f64> {
    let nf = n as f64;
    let (log, sign) = specfun::ln_gamma_ratio(&[nf / 2.0], &[(nf - 1.0) / 2.0])?;
    Ok(sign * (log - 0.5 * PI.ln()).exp())
}

fn theta_breakpoints(t_breaks: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = (0..=INITIAL_PANELS)
        .map(|i| PI * i as f64 / INITIAL_PANELS as f64)
        .collect();
    out.extend(
        t_breaks
            .iter()
            .filter(|t| t.abs() < 1.0)
            .map(|t| t.acos()),
    );
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// A function on the sphere that depends only on `t = ⟨axis, η⟩`.
pub struct ZonalIntegrand<F> {
    pub profile: F,
    pub n: usize,
    /// Values of `t` where the profile has kinks; used as initial panel edges.
    pub breakpoints: Vec<f64>,
}

impl<F: Fn(f64) -> f64> ZonalIntegrand<F> {
    pub fn new(n: usize, profile: F) -> Self {
        Self {
            profile,
            n,
            breakpoints: Vec::new(),
        }
    }

    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self
    }
}

/// `∫_{S^{n-1}} f(⟨u, η⟩) dσ(η)` by the zonal reduction.
pub fn zonal_integral<F: Fn(f64) -> f64>(g: &ZonalIntegrand<F>, spec: &QuadratureSpec) -> Result<Estimate> {
    zonal_integral_angular(&|theta: f64| (g.profile)(theta.cos()), g.n, &g.breakpoints, spec)
}

/// Zonal integral with the profile given as a function of the polar angle
/// `θ = arccos⟨u, η⟩`, for integrands that lose precision through `cos θ`.
/// `t_breaks` are kink locations in `t = cos θ`.
pub fn zonal_integral_angular<H: Fn(f64) -> f64>(
    profile: &H,
    n: usize,
    t_breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    spec.validate()?;
    if n < 2 {
        return Err(OracleError::InvalidSpec(format!("dimension {n} < 2")));
    }
    let power = (n - 2) as i32;
    let h = |theta: f64| profile(theta) * theta.sin().powi(power);
    let (value, error) = adaptive_gauss_legendre(
        &h,
        &theta_breakpoints(t_breaks),
        spec.abs_tol,
        spec.rel_tol,
        spec.max_subdivisions,
    )?;
    let c = zonal_constant(n)?;
    Ok(Estimate {
        value: c * value,
        error: c * error,
        method: Method::Quadrature,
    })
}

/// `∫_{S^{n-1}} g(⟨u, η⟩, ⟨v, η⟩) dσ(η)` for orthonormal `u`, `v`, `n >= 3`.
///
/// Writes `η = cos θ·u + sin θ·ω` with `ω ∈ S^{n-2}` and `⟨ω, v⟩ = cos ψ`,
/// giving nested zonal integrals over `θ` and `ψ`.
pub fn biaxial_integral<G: Fn(f64, f64) -> f64>(g: &G, n: usize, spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    if n < 3 {
        return Err(OracleError::InvalidSpec(format!("dimension {n} < 3")));
    }
    let outer_power = (n - 2) as i32;
    let inner_power = (n - 3) as i32;
    let inner_c = zonal_constant(n - 1)?;
    let inner_breaks = theta_breakpoints(&[]);
    let failure: RefCell<Option<OracleError>> = RefCell::new(None);
    let worst_inner_rel = RefCell::new(0.0f64);
    let inner_abs = 0.1 * spec.abs_tol;
    let inner_rel = 0.1 * spec.rel_tol;

    let outer = |theta: f64| -> f64 {
        let (s, c) = theta.sin_cos();
        let inner = |psi: f64| g(c, s * psi.cos()) * psi.sin().powi(inner_power);
        match adaptive_gauss_legendre(&inner, &inner_breaks, inner_abs, inner_rel, spec.max_subdivisions) {
            Ok((v, e)) => {
                if v != 0.0 {
                    let mut w = worst_inner_rel.borrow_mut();
                    *w = w.max(e / v.abs());
                }
                inner_c * v * s.powi(outer_power)
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let result = adaptive_gauss_legendre(
        &outer,
        &theta_breakpoints(&[]),
        spec.abs_tol,
        spec.rel_tol,
        spec.max_subdivisions,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let (value, error) = result?;
    let c = zonal_constant(n)?;
    let value = c * value;
    Ok(Estimate {
        value,
        error: c * error + worst_inner_rel.into_inner() * value.abs(),
        method: Method::Quadrature,
    })
}

/// The `index`-th uniform point on `S^{n-1}` for `seed`.
///
/// Each sample owns the ChaCha stream numbered by its index, so a sample
/// depends only on `(seed, index)`.
pub fn sphere_sample(seed: u64, index: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = kernel::euclidean_norm(&v);
        if norm > 0.0 && norm.is_finite() {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Pairwise summation over a fixed binary tree.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Mean and standard error of the mean, computed with a shift by the first
/// sample so constant data gives the constant back exactly.
pub(crate) fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let shift = values[0];
    let deviations: Vec<f64> = values.iter().map(|v| v - shift).collect();
    let mean = shift + pairwise_sum(&deviations) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let squares: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let variance = pairwise_sum(&squares) / (n - 1) as f64;
    (mean, (variance / n as f64).sqrt())
}

fn run_with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(job),
            Err(_) => job(),
        },
        None => job(),
    }
}

/// Monte Carlo estimate of `∫_{S^{n-1}} f dσ`; `error` is the standard error.
///
/// Per-sample values depend only on `(seed, index)` and the reduction is a
/// fixed pairwise tree, so the result is bit-identical for any thread count.
pub fn mc_sphere_integral<F>(f: &F, n: usize, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    spec.validate()?;
    if spec.method != OracleMethod::MonteCarlo {
        return Err(OracleError::InvalidSpec("Monte Carlo integral needs method MonteCarlo".into()));
    }
    let samples = spec.mc_samples as u64;
    let eval = |i: u64| f(&sphere_sample(spec.seed, i, n));
    let values: Vec<f64> = if spec.threads == Some(1) {
        (0..samples).map(eval).collect()
    } else {
        run_with_threads(spec.threads, || (0..samples).into_par_iter().map(eval).collect())
    };
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(OracleError::NonFinite { at: i as f64 });
    }
    let (value, error) = mean_and_std_error(&values);
    Ok(Estimate {
        value,
        error,
        method: Method::MonteCarlo,
    })
}

fn check_radius(r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(OracleError::Radius(r))
    }
}

/// `∫ |x - η|^{-2λ} dσ(η)` for `|x| = r`, by zonal quadrature.
pub fn distance_power_integral(n: usize, lambda: f64, r: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_radius(r)?;
    zonal_integral_angular(
        &|theta: f64| kernel::distance_squared_angle(r, theta).powf(-lambda),
        n,
        &[],
        spec,
    )
}

/// `∫ P_{α,β}(x, η)^q dσ(η)` for `|x| = r`, by zonal quadrature.
pub fn kernel_q_norm_oracle(params: &KernelParams, q: f64, r: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_radius(r)?;
    let prefactor = (1.0 - r * r).powf(params.alpha * q);
    Ok(distance_power_integral(params.n, 0.5 * q * params.beta, r, spec)?.scale(prefactor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::hyp2f1_abc;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn gauss_legendre_rule_is_exact_for_polynomials() {
        // degree 2N - 1 = 39
        let f = |x: f64| x.powi(38) + x.powi(39) + 1.0;
        let v = gl_panel(&f, -1.0, 1.0);
        assert!((v - (2.0 / 39.0 + 2.0)).abs() < 1e-14);
        let w: f64 = gauss_legendre().weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zonal_constant_values() {
        // n = 3: 1/2; n = 2: 1/π
        assert!((zonal_constant(3).unwrap() - 0.5).abs() < 1e-15);
        assert!((zonal_constant(2).unwrap() - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn zonal_integral_moments() {
        for n in 3..=7 {
            let one = zonal_integral(&ZonalIntegrand::new(n, |_| 1.0), &spec()).unwrap();
            assert!((one.value - 1.0).abs() < 1e-13);
            let odd = zonal_integral(&ZonalIntegrand::new(n, |t| t), &spec()).unwrap();
            assert!(odd.value.abs() < 1e-13);
            let sq = zonal_integral(&ZonalIntegrand::new(n, |t| t * t), &spec()).unwrap();
            assert!((sq.value - 1.0 / n as f64).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn kernel_power_matches_lemma_form() {
        // ∫ P^q dσ = (1 - r²)^{αq} F(qβ/2, qβ/2 - n/2 + 1; n/2; r²)
        for (n, beta, q, r) in [(3usize, 3.0, 2.0, 0.5), (4, 6.0, 1.5, 0.7)] {
            let params = KernelParams::normalized(n, beta).unwrap();
            let oracle = kernel_q_norm_oracle(&params, q, r, &spec()).unwrap();
            let nf = n as f64;
            let closed = (1.0 - r * r).powf(params.alpha * q)
                * hyp2f1_abc(q * beta / 2.0, q * beta / 2.0 - nf / 2.0 + 1.0, nf / 2.0, r * r).unwrap();
            assert!((oracle.value - closed).abs() <= 1e-8 * closed.abs().max(1.0));
        }
        let params = KernelParams::normalized(5, 6.0).unwrap();
        let at_origin = kernel_q_norm_oracle(&params, 3.0, 0.0, &spec()).unwrap();
        assert!((at_origin.value - 1.0).abs() < 1e-13);
    }

    #[test]
    fn peaked_integrand_near_boundary() {
        let params = KernelParams::normalized(3, 3.0).unwrap();
        let r = 0.999;
        let oracle = kernel_q_norm_oracle(&params, 2.0, r, &spec()).unwrap();
        // n = β = 3, q = 2: ∫P² = (1 + r²)/(1 - r²)²
        let closed = (1.0 + r * r) / (1.0 - r * r).powi(2);
        assert!((oracle.value - closed).abs() <= 1e-9 * closed);
    }

    #[test]
    fn tolerance_not_met_is_reported() {
        let tight = QuadratureSpec {
            max_subdivisions: 1,
            ..spec()
        };
        let g = ZonalIntegrand::new(3, |t: f64| kernel::distance_squared(0.999, t).powf(-5.0));
        match zonal_integral(&g, &tight) {
            Err(OracleError::ToleranceNotMet { estimate, error, .. }) => {
                assert!(estimate.is_finite() && error > 0.0)
            }
            other => panic!("expected tolerance failure, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let g = ZonalIntegrand::new(3, |t: f64| if t > 0.5 { f64::NAN } else { 1.0 });
        assert!(matches!(zonal_integral(&g, &spec()), Err(OracleError::NonFinite { .. })));
    }

    #[test]
    fn breakpoints_handle_kinks() {
        let g = ZonalIntegrand::new(3, |t: f64| (t - 0.3).abs()).with_breakpoints(vec![0.3]);
        let v = zonal_integral(&g, &spec()).unwrap();
        // n = 3: (1/2)∫_{-1}^{1} |t - 0.3| dt = (1.3² + 0.7²)/4
        assert!((v.value - (1.69 + 0.49) / 4.0).abs() < 1e-13);
    }

    #[test]
    fn biaxial_matches_zonal_and_moments() {
        for n in 3..=5 {
            // g depends on t only
            let a = biaxial_integral(&|t: f64, _s: f64| t * t, n, &spec()).unwrap();
            assert!((a.value - 1.0 / n as f64).abs() < 1e-12);
            let b = biaxial_integral(&|_t: f64, s: f64| s * s, n, &spec()).unwrap();
            assert!((b.value - 1.0 / n as f64).abs() < 1e-12);
            // E[t² s²] = 1/(n(n+2))
            let c = biaxial_integral(&|t: f64, s: f64| t * t * s * s, n, &spec()).unwrap();
            let nf = n as f64;
            assert!((c.value - 1.0 / (nf * (nf + 2.0))).abs() < 1e-12);
        }
    }

    #[test]
    fn mc_constant_is_exact() {
        let spec = QuadratureSpec::monte_carlo(5000, 3);
        let e = mc_sphere_integral(&|_: &[f64]| 0.1, 4, &spec).unwrap();
        assert_eq!(e.value, 0.1);
        assert_eq!(e.error, 0.0);
    }

    #[test]
    fn mc_second_moment() {
        for n in [3usize, 5] {
            let spec = QuadratureSpec::monte_carlo(1_000_000, 11);
            let e = mc_sphere_integral(&|eta: &[f64]| eta[0] * eta[0], n, &spec).unwrap();
            assert!((e.value - 1.0 / n as f64).abs() <= 4.0 * e.error, "{e:?}");
        }
    }

    #[test]
    fn mc_deterministic_across_threads() {
        let f = |eta: &[f64]| (eta[0] + 0.3 * eta[1]).exp();
        let single = QuadratureSpec {
            threads: Some(1),
            ..QuadratureSpec::monte_carlo(20_000, 99)
        };
        let a = mc_sphere_integral(&f, 3, &single).unwrap();
        let b = mc_sphere_integral(&f, 3, &single).unwrap();
        assert_eq!(a, b);
        let four = QuadratureSpec {
            threads: Some(4),
            ..single.clone()
        };
        let c = mc_sphere_integral(&f, 3, &four).unwrap();
        assert!((a.value - c.value).abs() <= 1e-12);
        let other_seed = mc_sphere_integral(&f, 3, &QuadratureSpec { seed: 100, ..single }).unwrap();
        assert_ne!(a.value, other_seed.value);
    }

    #[test]
    fn mc_kernel_power_agrees_with_quadrature() {
        let params = KernelParams::normalized(4, 5.0).unwrap();
        let (q, r) = (1.5, 0.5);
        let quad = kernel_q_norm_oracle(&params, q, r, &spec()).unwrap();
        let x = kernel::BallPoint::radial(4, r).unwrap();
        let spec_mc = QuadratureSpec::monte_carlo(400_000, 5);
        let mc = mc_sphere_integral(
            &|eta: &[f64]| kernel::poisson_kernel(&params, &x, eta).unwrap().powf(q),
            4,
            &spec_mc,
        )
        .unwrap();
        assert!((mc.value - quad.value).abs() <= 4.0 * mc.error, "{mc:?} vs {quad:?}");
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec { abs_tol: 0.0, ..spec() }.validate().is_err());
        assert!(QuadratureSpec { mc_samples: 10, ..spec() }.validate().is_err());
        assert!(QuadratureSpec { max_subdivisions: 0, ..spec() }.validate().is_err());
        assert!(mc_sphere_integral(&|_: &[f64]| 1.0, 3, &spec()).is_err());
    }
}
