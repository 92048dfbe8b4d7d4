//! Sharp constants `C_p(x)` and `C_p` for the normalized kernel family
//! `n + α = β + 1`, the monotonicity regime of
//! `ψ(r) = F((n - qβ)/2, n - 1 - qβ/2; n/2; r)`, and the harmonic,
//! hyperbolic and Dirichlet-γ specializations.
//!
//! The pointwise constant is
//!
//! ```text
//! C_p(x) = c_{n,β} · ψ(|x|²)^{1/q}
//! ```
//!
//! and the global constant is its supremum over the ball: `C_p(0) = c_{n,β}`
//! when `ψ` decreases, and `C_p(1)` from the Gauss summation when it increases.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::kernel::{self, KernelError, KernelParams};
use crate::specfun::{self, SpecFunError};

/// Tolerance on `1/p + 1/q = 1` and on the regime threshold `q = 2(n-1)/β`.
pub const EXPONENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SharpError {
    #[error("invalid Hölder exponents: {0}")]
    Exponents(String),
    #[error("kernel parameters n = {n}, alpha = {alpha}, beta = {beta} violate n + alpha = beta + 1")]
    NotNormalized { n: usize, alpha: f64, beta: f64 },
    #[error("radius {0} outside [0, 1)")]
    Radius(f64),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

pub type Result<T> = std::result::Result<T, SharpError>;

/// Conjugate pair `1/p + 1/q = 1`; `p = ∞` is stored as `q = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderExponents {
    p: f64,
    q: f64,
}

impl HolderExponents {
    /// `p` in `(1, ∞]`; pass `f64::INFINITY` for `p = ∞`.
    pub fn from_p(p: f64) -> Result<Self> {
        if p.is_nan() || p <= 1.0 {
            return Err(SharpError::Exponents(format!("p = {p} must lie in (1, inf]")));
        }
        let q = if p.is_infinite() { 1.0 } else { p / (p - 1.0) };
        Ok(Self { p, q })
    }

    /// `q` in `[1, ∞)`; `q = 1` means `p = ∞`.
    pub fn from_q(q: f64) -> Result<Self> {
        if !(q.is_finite() && q >= 1.0) {
            return Err(SharpError::Exponents(format!("q = {q} must lie in [1, inf)")));
        }
        let p = if q == 1.0 { f64::INFINITY } else { q / (q - 1.0) };
        Ok(Self { p, q })
    }

    /// Checks a user-supplied pair.
    pub fn new(p: f64, q: f64) -> Result<Self> {
        let e = Self::from_p(p)?;
        let sum = if p.is_infinite() { 0.0 } else { 1.0 / p } + 1.0 / q;
        if !(q >= 1.0) || (sum - 1.0).abs() > EXPONENT_TOL {
            return Err(SharpError::Exponents(format!("p = {p}, q = {q} are not conjugate")));
        }
        Ok(e)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn is_infinite(&self) -> bool {
        self.p.is_infinite()
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn inv_p(&self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.p
        }
    }
}

/// Where the supremum of `C_p(x)` over the ball sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `ψ` non-increasing; maximum `c_{n,β}` at the origin.
    ConstantAtZero,
    /// `ψ` non-decreasing; supremum `C_p(1)` approached at the boundary.
    SupAtBoundary,
    /// `q = 2(n-1)/β`: `ψ ≡ 1` and both formulas coincide.
    Degenerate,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::ConstantAtZero => "constant_at_zero",
            Regime::SupAtBoundary => "sup_at_boundary",
            Regime::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Results computed outside the proven parameter range.
#[derive(Debug, Clone, PartialEq)]
pub enum TheoremWarning {
    /// `β < n`: the sign analysis is extended mechanically.
    BetaBelowDimension { n: usize, beta: f64 },
    /// `-1/2 < γ < 0` in the Dirichlet-γ family.
    NegativeGamma { gamma: f64 },
}

impl fmt::Display for TheoremWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoremWarning::BetaBelowDimension { n, beta } => write!(
                f,
                "beta = {beta} < n = {n}: outside the proven range, computed by the same formulas"
            ),
            TheoremWarning::NegativeGamma { gamma } => write!(
                f,
                "gamma = {gamma} < 0: outside the proven range of the Dirichlet-gamma family"
            ),
        }
    }
}

/// A value with any out-of-range warnings attached.
#[derive(Debug, Clone, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub warnings: Vec<TheoremWarning>,
}

/// The global sharp constant with the branch that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpEstimate {
    pub value: f64,
    pub regime: Regime,
    pub branch_condition: String,
    pub warnings: Vec<TheoremWarning>,
}

fn require_normalized(params: &KernelParams) -> Result<()> {
    if params.is_normalized() {
        Ok(())
    } else {
        Err(SharpError::NotNormalized {
            n: params.n,
            alpha: params.alpha,
            beta: params.beta,
        })
    }
}

fn hypothesis_warnings(params: &KernelParams) -> Vec<TheoremWarning> {
    if params.beta < params.dim() {
        vec![TheoremWarning::BetaBelowDimension {
            n: params.n,
            beta: params.beta,
        }]
    } else {
        Vec::new()
    }
}

/// First two parameters of `ψ`: `((n - qβ)/2, n - 1 - qβ/2)`; third is `n/2`.
pub fn psi_parameters(params: &KernelParams, exps: &HolderExponents) -> (f64, f64, f64) {
    let n = params.dim();
    let qb = exps.q() * params.beta;
    (0.5 * (n - qb), n - 1.0 - 0.5 * qb, 0.5 * n)
}

/// `ψ(s) = F((n - qβ)/2, n - 1 - qβ/2; n/2; s)` for `s` in `[0, 1]`.
pub fn psi(params: &KernelParams, exps: &HolderExponents, s: f64) -> Result<f64> {
    let (a, b, c) = psi_parameters(params, exps);
    Ok(specfun::hyp2f1_abc(a, b, c, s)?)
}

/// The threshold `2(n - 1)/β` on `q`.
pub fn regime_threshold(params: &KernelParams) -> f64 {
    2.0 * (params.dim() - 1.0) / params.beta
}

/// Pointwise sharp constant `C_p(x) = c_{n,β} ψ(|x|²)^{1/q}` at `|x| = r`.
pub fn pointwise_sharp_constant(params: &KernelParams, exps: &HolderExponents, r: f64) -> Result<Flagged<f64>> {
    require_normalized(params)?;
    if !(0.0..1.0).contains(&r) {
        return Err(SharpError::Radius(r));
    }
    let c = params.normalization_constant()?;
    let value = c * psi(params, exps, r * r)?.powf(1.0 / exps.q());
    Ok(Flagged {
        value,
        warnings: hypothesis_warnings(params),
    })
}

/// Monotonicity regime of `ψ` on `[0, 1)`, from the sign of the product of
/// its first two parameters.
pub fn classify_regime(params: &KernelParams, exps: &HolderExponents) -> Regime {
    let q = exps.q();
    let threshold = regime_threshold(params);
    if (q - threshold).abs() <= EXPONENT_TOL {
        return Regime::Degenerate;
    }
    let (a, b, _) = psi_parameters(params, exps);
    if params.beta >= params.dim() {
        // a <= 0 here, so the sign of ab is decided by b alone.
        if q < threshold {
            Regime::ConstantAtZero
        } else {
            Regime::SupAtBoundary
        }
    } else if a * b > 0.0 {
        Regime::SupAtBoundary
    } else {
        Regime::ConstantAtZero
    }
}

fn branch_condition(params: &KernelParams, exps: &HolderExponents, regime: Regime) -> String {
    let q = exps.q();
    let t = regime_threshold(params);
    match regime {
        Regime::Degenerate => format!("q = {q} equals 2(n-1)/beta = {t}"),
        Regime::ConstantAtZero if params.beta >= params.dim() => {
            format!("q = {q} < 2(n-1)/beta = {t}")
        }
        Regime::SupAtBoundary if params.beta >= params.dim() => {
            format!("q = {q} > 2(n-1)/beta = {t}")
        }
        Regime::ConstantAtZero => format!(
            "beta < n: (n - q beta)(2(n-1) - q beta) <= 0 with q = {q}, threshold {t}"
        ),
        Regime::SupAtBoundary => format!(
            "beta < n: (n - q beta)(2(n-1) - q beta) > 0 with q = {q}, threshold {t}"
        ),
    }
}

/// Branch value at the origin, `C_p(0) = c_{n,β}`.
pub fn origin_branch_value(params: &KernelParams) -> Result<f64> {
    Ok(params.normalization_constant()?)
}

/// Branch value at the boundary,
/// `C_p(1) = c_{n,β} (Γ(n/2)Γ(qβ-n+1) / (Γ(qβ/2)Γ((qβ-n+2)/2)))^{1/q}`,
/// i.e. `c_{n,β} ψ(1)^{1/q}` with `ψ(1)` from the Gauss summation.
pub fn boundary_branch_value(params: &KernelParams, exps: &HolderExponents) -> Result<f64> {
    let c = params.normalization_constant()?;
    let (a, b, cc) = psi_parameters(params, exps);
    let (log, sign) = specfun::ln_hyp2f1_at_one(a, b, cc)?;
    debug_assert!(sign > 0.0);
    Ok(c * (log / exps.q()).exp())
}

/// Global sharp constant `C_p = sup_x C_p(x)`.
pub fn global_sharp_constant(params: &KernelParams, exps: &HolderExponents) -> Result<SharpEstimate> {
    require_normalized(params)?;
    let regime = classify_regime(params, exps);
    let value = match regime {
        Regime::ConstantAtZero | Regime::Degenerate => origin_branch_value(params)?,
        Regime::SupAtBoundary => boundary_branch_value(params, exps)?,
    };
    Ok(SharpEstimate {
        value,
        regime,
        branch_condition: branch_condition(params, exps, regime),
        warnings: hypothesis_warnings(params),
    })
}

/// Harmonic case `α = 1`, `β = n`, by its own closed form:
/// `1` for `q ≤ 2(n-1)/n`, else
/// `(2^{nq-n} Γ(n/2) Γ((nq-n+1)/2) / (√π Γ(nq/2)))^{1/q}`.
pub fn harmonic_constant(n: usize, exps: &HolderExponents) -> Result<SharpEstimate> {
    let params = KernelParams::harmonic(n)?;
    let regime = classify_regime(&params, exps);
    let (nf, q) = (n as f64, exps.q());
    let value = match regime {
        Regime::ConstantAtZero | Regime::Degenerate => 1.0,
        Regime::SupAtBoundary => {
            let (lg, _) = specfun::ln_gamma_ratio(&[nf / 2.0, (nf * q - nf + 1.0) / 2.0], &[nf * q / 2.0])?;
            let log = (nf * q - nf) * std::f64::consts::LN_2 + lg - 0.5 * PI.ln();
            (log / q).exp()
        }
    };
    Ok(SharpEstimate {
        value,
        regime,
        branch_condition: branch_condition(&params, exps, regime),
        warnings: Vec::new(),
    })
}

/// Harmonic pointwise constant `F((n - nq)/2, n - 1 - nq/2; n/2; r²)^{1/q}`.
pub fn harmonic_pointwise(n: usize, exps: &HolderExponents, r: f64) -> Result<f64> {
    KernelParams::harmonic(n)?;
    check_radius(r)?;
    let (nf, q) = (n as f64, exps.q());
    let f = specfun::hyp2f1_abc((nf - nf * q) / 2.0, nf - 1.0 - nf * q / 2.0, nf / 2.0, r * r)?;
    Ok(f.powf(1.0 / q))
}

/// Hyperbolic case `α = n - 1`, `β = 2(n - 1)`:
/// `(Γ(n/2) Γ((2q-1)(n-1)) / (Γ(n/2 + (q-1)(n-1)) Γ(q(n-1))))^{1/q}`.
pub fn hyperbolic_constant(n: usize, exps: &HolderExponents) -> Result<SharpEstimate> {
    let params = KernelParams::hyperbolic(n)?;
    let regime = classify_regime(&params, exps);
    let (nf, q) = (n as f64, exps.q());
    let m = nf - 1.0;
    let (lg, _) = specfun::ln_gamma_ratio(
        &[nf / 2.0, (2.0 * q - 1.0) * m],
        &[nf / 2.0 + (q - 1.0) * m, q * m],
    )?;
    Ok(SharpEstimate {
        value: (lg / q).exp(),
        regime,
        branch_condition: branch_condition(&params, exps, regime),
        warnings: Vec::new(),
    })
}

/// Hyperbolic pointwise constant
/// `F(-(n-1)(q-1), n/2 + q - nq; n/2; r²)^{1/q}`.
pub fn hyperbolic_pointwise(n: usize, exps: &HolderExponents, r: f64) -> Result<f64> {
    KernelParams::hyperbolic(n)?;
    check_radius(r)?;
    let (nf, q) = (n as f64, exps.q());
    let f = specfun::hyp2f1_abc(-(nf - 1.0) * (q - 1.0), nf / 2.0 + q - nf * q, nf / 2.0, r * r)?;
    Ok(f.powf(1.0 / q))
}

fn gamma_warnings(n: usize, gamma: f64) -> Vec<TheoremWarning> {
    let mut w = Vec::new();
    if gamma < 0.0 {
        w.push(TheoremWarning::NegativeGamma { gamma });
        w.push(TheoremWarning::BetaBelowDimension {
            n,
            beta: n as f64 + 2.0 * gamma,
        });
    }
    w
}

/// Dirichlet-γ family `α = 1 + 2γ`, `β = n + 2γ`, written in terms of `γ`.
pub fn dirichlet_gamma_constant(n: usize, gamma: f64, exps: &HolderExponents) -> Result<SharpEstimate> {
    let params = KernelParams::dirichlet_gamma(n, gamma)?;
    let regime = classify_regime(&params, exps);
    let (nf, q) = (n as f64, exps.q());
    let c = kernel::normalization_constant(n, nf + 2.0 * gamma)?;
    let value = match regime {
        Regime::ConstantAtZero | Regime::Degenerate => c,
        Regime::SupAtBoundary => {
            let (lg, _) = specfun::ln_gamma_ratio(
                &[nf / 2.0, (q - 1.0) * nf + 2.0 * q * gamma + 1.0],
                &[(nf * q + 2.0 * gamma * q) / 2.0, (q - 1.0) * nf / 2.0 + q * gamma + 1.0],
            )?;
            c * (lg / q).exp()
        }
    };
    Ok(SharpEstimate {
        value,
        regime,
        branch_condition: branch_condition(&params, exps, regime),
        warnings: gamma_warnings(n, gamma),
    })
}

/// Dirichlet-γ pointwise constant
/// `c_{n,n+2γ} F((1-q)n/2 - qγ, (2-q)n/2 - qγ - 1; n/2; r²)^{1/q}`.
pub fn dirichlet_gamma_pointwise(n: usize, gamma: f64, exps: &HolderExponents, r: f64) -> Result<Flagged<f64>> {
    KernelParams::dirichlet_gamma(n, gamma)?;
    check_radius(r)?;
    let (nf, q) = (n as f64, exps.q());
    let c = kernel::normalization_constant(n, nf + 2.0 * gamma)?;
    let f = specfun::hyp2f1_abc(
        (1.0 - q) * nf / 2.0 - q * gamma,
        (2.0 - q) * nf / 2.0 - q * gamma - 1.0,
        nf / 2.0,
        r * r,
    )?;
    Ok(Flagged {
        value: c * f.powf(1.0 / q),
        warnings: gamma_warnings(n, gamma),
    })
}

fn check_radius(r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(SharpError::Radius(r))
    }
}

/// Observed direction of a sampled sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Constant,
    NonIncreasing,
    NonDecreasing,
    Mixed,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Constant => "constant",
            Direction::NonIncreasing => "non_increasing",
            Direction::NonDecreasing => "non_decreasing",
            Direction::Mixed => "mixed",
        }
    }

    /// Steps smaller than `1e-13` of the largest magnitude count as flat.
    pub fn of(values: &[f64]) -> Self {
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-13 * scale.max(f64::MIN_POSITIVE);
        let (mut up, mut down) = (false, false);
        for w in values.windows(2) {
            let d = w[1] - w[0];
            up |= d > tol;
            down |= d < -tol;
        }
        match (up, down) {
            (false, false) => Direction::Constant,
            (false, true) => Direction::NonIncreasing,
            (true, false) => Direction::NonDecreasing,
            (true, true) => Direction::Mixed,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Regime {
    /// Whether an observed direction of `ψ` agrees with this regime.
    /// A constant `ψ` is compatible with every regime.
    pub fn admits(&self, direction: Direction) -> bool {
        matches!(
            (self, direction),
            (_, Direction::Constant)
                | (Regime::ConstantAtZero, Direction::NonIncreasing)
                | (Regime::SupAtBoundary, Direction::NonDecreasing)
        )
    }
}

/// `ψ` sampled on `grid` (points in `[0, 1]`) with its observed direction.
pub fn psi_scan(params: &KernelParams, exps: &HolderExponents, grid: &[f64]) -> Result<(Vec<f64>, Direction)> {
    let values = grid.iter().map(|&s| psi(params, exps, s)).collect::<Result<Vec<_>>>()?;
    let direction = Direction::of(&values);
    Ok((values, direction))
}
