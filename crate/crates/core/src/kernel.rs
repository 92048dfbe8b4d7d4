//! The general Poisson kernel `P_{α,β}(x, η) = (1 - |x|²)^α / |x - η|^β`
//! on the unit ball and its normalization constant `c_{n,β}`.

use thiserror::Error;

use crate::specfun::{self, SpecFunError};

/// Tolerance for the normalization relation `n + α = β + 1`.
pub const NORMALIZED_TOL: f64 = 1e-12;
/// Unit vectors within this distance of norm 1 are accepted as-is.
pub const UNIT_TOL: f64 = 1e-12;
/// Unit vectors within this distance of norm 1 are silently renormalized.
pub const UNIT_RENORMALIZE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("dimension n = {0} must be at least 3")]
    Dimension(usize),
    #[error("beta = {0} must be positive and finite")]
    Beta(f64),
    #[error("alpha = {0} must be finite")]
    Alpha(f64),
    #[error("beta = {beta} must exceed n - 2 = {bound} for the normalization constant")]
    BetaBelowRange { beta: f64, bound: f64 },
    #[error("gamma = {0} must exceed -1/2")]
    GammaOutOfRange(f64),
    #[error("point of norm {0} is not inside the unit ball")]
    OutsideBall(f64),
    #[error("boundary point has norm {0}, expected 1")]
    NotUnit(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

pub type Result<T> = std::result::Result<T, KernelError>;

/// Dimension and exponents of the kernel family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl KernelParams {
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if n < 3 {
            return Err(KernelError::Dimension(n));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(KernelError::Beta(beta));
        }
        if !alpha.is_finite() {
            return Err(KernelError::Alpha(alpha));
        }
        Ok(Self { n, alpha, beta })
    }

    /// The member of the family with `α = β + 1 - n`.
    pub fn normalized(n: usize, beta: f64) -> Result<Self> {
        Self::new(n, beta + 1.0 - n as f64, beta)
    }

    /// Classical harmonic Poisson kernel, `α = 1`, `β = n`.
    pub fn harmonic(n: usize) -> Result<Self> {
        Self::new(n, 1.0, n as f64)
    }

    /// Hyperbolic Poisson kernel, `α = n - 1`, `β = 2(n - 1)`.
    pub fn hyperbolic(n: usize) -> Result<Self> {
        let m = n as f64 - 1.0;
        Self::new(n, m, 2.0 * m)
    }

    /// Kernel representing solutions of the weighted Dirichlet problem,
    /// `α = 1 + 2γ`, `β = n + 2γ`, for `γ > -1/2`.
    pub fn dirichlet_gamma(n: usize, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > -0.5) {
            return Err(KernelError::GammaOutOfRange(gamma));
        }
        Self::new(n, 1.0 + 2.0 * gamma, n as f64 + 2.0 * gamma)
    }

    pub fn dim(&self) -> f64 {
        self.n as f64
    }

    /// `n + α = β + 1` within [`NORMALIZED_TOL`].
    pub fn is_normalized(&self) -> bool {
        (self.dim() + self.alpha - self.beta - 1.0).abs() <= NORMALIZED_TOL
    }

    pub fn normalization_constant(&self) -> Result<f64> {
        normalization_constant(self.n, self.beta)
    }
}

/// A point of the open unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    coords: Vec<f64>,
}

impl BallPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let norm = euclidean_norm(&coords);
        if !(norm < 1.0) {
            return Err(KernelError::OutsideBall(norm));
        }
        Ok(Self { coords })
    }

    /// `r · e_0` in dimension `n`.
    pub fn radial(n: usize, r: f64) -> Result<Self> {
        Self::radial_along(n, r, 0)
    }

    /// `r · e_axis` in dimension `n`.
    pub fn radial_along(n: usize, r: f64, axis: usize) -> Result<Self> {
        if axis >= n {
            return Err(KernelError::DimensionMismatch {
                expected: n,
                got: axis + 1,
            });
        }
        if !(0.0..1.0).contains(&r) {
            return Err(KernelError::OutsideBall(r));
        }
        let mut coords = vec![0.0; n];
        coords[axis] = r;
        Ok(Self { coords })
    }

    /// `r · direction` for a unit direction.
    pub fn along(direction: &[f64], r: f64) -> Result<Self> {
        let u = unit_vector(direction)?;
        if !(0.0..1.0).contains(&r) {
            return Err(KernelError::OutsideBall(r));
        }
        Ok(Self {
            coords: u.into_iter().map(|c| c * r).collect(),
        })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        euclidean_norm(&self.coords)
    }

    /// `x / |x|`, or `None` at the origin.
    pub fn direction(&self) -> Option<Vec<f64>> {
        let r = self.norm();
        (r > 0.0).then(|| self.coords.iter().map(|c| c / r).collect())
    }
}

pub(crate) fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checks that `v` lies on the unit sphere, renormalizing small drift.
pub fn unit_vector(v: &[f64]) -> Result<Vec<f64>> {
    let norm = euclidean_norm(v);
    let drift = (norm - 1.0).abs();
    if drift <= UNIT_TOL {
        Ok(v.to_vec())
    } else if drift <= UNIT_RENORMALIZE_TOL {
        Ok(v.iter().map(|c| c / norm).collect())
    } else {
        Err(KernelError::NotUnit(norm))
    }
}

/// `c_{n,β} = Γ(β/2) Γ(β/2 - n/2 + 1) / (Γ(n/2) Γ(β - n + 1))`.
pub fn normalization_constant(n: usize, beta: f64) -> Result<f64> {
    if n < 3 {
        return Err(KernelError::Dimension(n));
    }
    let nf = n as f64;
    if !(beta.is_finite() && beta > nf - 2.0) {
        return Err(KernelError::BetaBelowRange {
            beta,
            bound: nf - 2.0,
        });
    }
    let (log, sign) = specfun::ln_gamma_ratio(
        &[beta / 2.0, beta / 2.0 - nf / 2.0 + 1.0],
        &[nf / 2.0, beta - nf + 1.0],
    )?;
    Ok(sign * log.exp())
}

/// `|x - η|²` for `|x| = r` and `⟨x/|x|, η⟩ = t`, written as
/// `(1 - r)² + 2r(1 - t)` to keep precision near the boundary peak.
pub fn distance_squared(r: f64, t: f64) -> f64 {
    let d = 1.0 - r;
    d * d + 2.0 * r * (1.0 - t)
}

/// `|x - η|²` in terms of the angle `θ` between `x` and `η`:
/// `(1 - r)² + 4r sin²(θ/2)`, exact near `θ = 0`.
pub fn distance_squared_angle(r: f64, theta: f64) -> f64 {
    let d = 1.0 - r;
    let s = (0.5 * theta).sin();
    d * d + 4.0 * r * s * s
}

/// Kernel in radial form: `(1 - r²)^α · (|x - η|²)^{-β/2}`.
pub fn poisson_kernel_radial(params: &KernelParams, r: f64, t: f64) -> f64 {
    (1.0 - r * r).powf(params.alpha) * distance_squared(r, t).powf(-0.5 * params.beta)
}

/// `P_{α,β}(x, η)` for a point `x` of the ball and a boundary point `η`.
pub fn poisson_kernel(params: &KernelParams, x: &BallPoint, eta: &[f64]) -> Result<f64> {
    if x.dim() != params.n {
        return Err(KernelError::DimensionMismatch {
            expected: params.n,
            got: x.dim(),
        });
    }
    if eta.len() != params.n {
        return Err(KernelError::DimensionMismatch {
            expected: params.n,
            got: eta.len(),
        });
    }
    let eta = unit_vector(eta)?;
    let dist2: f64 = x
        .coords()
        .iter()
        .zip(&eta)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let r2: f64 = x.coords().iter().map(|c| c * c).sum();
    Ok((1.0 - r2).powf(params.alpha) * dist2.powf(-0.5 * params.beta))
}
