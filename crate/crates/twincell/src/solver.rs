//! Scalar fixed-point solvers for the two random-matrix functionals that
//! every limiting-SINR expression in this crate consumes.
//!
//! The first functional, [`solve_g`], is the positive solution of
//!
//! ```text
//! g = 1 / (rho + beta / (1 + g))
//! ```
//!
//! which rearranges to the quadratic `rho·g² + (rho+beta−1)·g − 1 = 0` and is
//! evaluated in closed form. The second, [`solve_gamma`], generalizes it to
//! two variance weights,
//!
//! ```text
//! gamma = 1 / (rho + beta·w1/(1+w1·gamma) + beta·w2/(1+w2·gamma))
//! ```
//!
//! and is solved by bracketing bisection on `[0, 1/rho]` followed by a short
//! Newton polish. Closed-form derivatives in `rho` accompany both solvers.
//!
//! ## Example
//!
//! ```
//! use twincell::solver::{solve_g, solve_gamma, GammaParams};
//!
//! let g = solve_g(1.0, 1.0).unwrap();
//! assert!((g - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
//!
//! // With equal weights the two-weight fixed point collapses onto g.
//! let p = GammaParams { beta: 0.5, rho: 0.4, w1: 1.0, w2: 1.0 };
//! let gamma = solve_gamma(&p).unwrap();
//! let g2 = solve_g(1.0, 0.4).unwrap();
//! assert!((gamma - g2).abs() < 1e-10);
//! ```

use crate::error::{Error, Result};

/// Tolerances and iteration budget shared by the iterative solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Absolute residual target for fixed points.
    pub abs_tolerance: f64,
    /// Hard cap on solver iterations before reporting failure.
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            abs_tolerance: 1e-12,
            max_iterations: 10_000,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.abs_tolerance > 0.0) {
            return Err(Error::domain("abs_tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::domain("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

/// Inputs of the two-weight fixed point solved by [`solve_gamma`].
#[derive(Debug, Clone, Copy)]
pub struct GammaParams {
    /// Cell loading (users per antenna), strictly positive.
    pub beta: f64,
    /// Effective regularization, strictly positive.
    pub rho: f64,
    /// First variance weight, non-negative.
    pub w1: f64,
    /// Second variance weight, non-negative.
    pub w2: f64,
}

impl GammaParams {
    fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(Error::domain(format!("beta must be > 0, got {}", self.beta)));
        }
        if !(self.rho > 0.0) {
            return Err(Error::domain(format!("rho must be > 0, got {}", self.rho)));
        }
        if !(self.w1 >= 0.0) || !(self.w2 >= 0.0) {
            return Err(Error::domain(format!(
                "weights must be non-negative, got w1={}, w2={}",
                self.w1, self.w2
            )));
        }
        if !(self.w1 + self.w2 > 0.0) {
            return Err(Error::domain("at least one weight must be positive"));
        }
        Ok(())
    }
}

fn check_beta_rho(beta: f64, rho: f64) -> Result<()> {
    if !(beta > 0.0) {
        return Err(Error::domain(format!("beta must be > 0, got {beta}")));
    }
    if !(rho > 0.0) {
        return Err(Error::domain(format!("rho must be > 0, got {rho}")));
    }
    Ok(())
}

/// Solves `g = 1/(rho + beta/(1+g))` for the unique positive root.
///
/// The fixed point rearranges to `rho·g² + (rho+beta−1)·g − 1 = 0`, whose
/// roots have product `−1/rho < 0`, so exactly one root is positive. The
/// quadratic formula is evaluated in the cancellation-free branch: when the
/// linear coefficient is positive the rationalized form `2/(b + sqrt(D))` is
/// used instead of subtracting nearly equal magnitudes.
pub fn solve_g(beta: f64, rho: f64) -> Result<f64> {
    check_beta_rho(beta, rho)?;
    let b = rho + beta - 1.0;
    let disc = (b * b + 4.0 * rho).sqrt();
    let g = if b <= 0.0 {
        (-b + disc) / (2.0 * rho)
    } else {
        2.0 / (b + disc)
    };
    Ok(g)
}

/// Derivative of [`solve_g`] with respect to `rho`, in closed form.
///
/// Differentiating the fixed point gives the identity
/// `g + rho·dg = beta·g/(beta + rho·(1+g)²)`, hence
/// `dg = (beta·g/(beta + rho·(1+g)²) − g)/rho`. The result is always
/// negative: a larger regularization shrinks g.
pub fn g_rho_derivative(beta: f64, rho: f64) -> Result<f64> {
    let g = solve_g(beta, rho)?;
    let one_plus = 1.0 + g;
    Ok((beta * g / (beta + rho * one_plus * one_plus) - g) / rho)
}

/// Right-hand side of the two-weight fixed point, `1/(rho + sum of loads)`.
fn gamma_map(p: &GammaParams, gamma: f64) -> f64 {
    let load1 = p.beta * p.w1 / (1.0 + p.w1 * gamma);
    let load2 = p.beta * p.w2 / (1.0 + p.w2 * gamma);
    1.0 / (p.rho + load1 + load2)
}

/// Residual `gamma·(rho + loads) − 1` and its strictly positive derivative.
fn gamma_residual(p: &GammaParams, gamma: f64) -> (f64, f64) {
    let d1 = 1.0 + p.w1 * gamma;
    let d2 = 1.0 + p.w2 * gamma;
    let value = gamma * (p.rho + p.beta * p.w1 / d1 + p.beta * p.w2 / d2) - 1.0;
    let slope = p.rho + p.beta * p.w1 / (d1 * d1) + p.beta * p.w2 / (d2 * d2);
    (value, slope)
}

/// Solves the two-weight fixed point with the default [`SolverConfig`].
///
/// The map's right side is strictly decreasing in gamma and bounded by
/// `1/rho`, so the root is bracketed by `[0, 1/rho]` and bisection cannot
/// fail; a Newton polish then tightens the root to machine precision. The
/// returned value always satisfies `0 < gamma ≤ 1/rho`.
pub fn solve_gamma(p: &GammaParams) -> Result<f64> {
    solve_gamma_with(p, &SolverConfig::default())
}

/// Solves the two-weight fixed point under an explicit [`SolverConfig`].
pub fn solve_gamma_with(p: &GammaParams, cfg: &SolverConfig) -> Result<f64> {
    p.validate()?;
    cfg.validate()?;
    let mut lo = 0.0f64;
    let mut hi = 1.0 / p.rho;
    // phi(gamma) = gamma − map(gamma): negative at 0, non-negative at 1/rho.
    let mut iterations = 0usize;
    while hi - lo > 0.25 * f64::EPSILON * hi.max(1.0) && iterations < cfg.max_iterations {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            // The bracket has collapsed to adjacent floats; bisection can
            // make no further progress and the Newton polish takes over.
            break;
        }
        if mid - gamma_map(p, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let mut gamma = 0.5 * (lo + hi);
    for _ in 0..4 {
        let (value, slope) = gamma_residual(p, gamma);
        gamma -= value / slope;
    }
    let (residual, _) = gamma_residual(p, gamma);
    if !(residual.abs() <= cfg.abs_tolerance.max(16.0 * f64::EPSILON)) {
        return Err(Error::Convergence {
            iterations,
            residual: residual.abs(),
        });
    }
    Ok(gamma.clamp(f64::MIN_POSITIVE, 1.0 / p.rho))
}

/// Derivative of [`solve_gamma`] with respect to `rho`, in closed form.
///
/// Implicit differentiation of the fixed point yields
///
/// ```text
/// d(gamma)/d(rho) = −gamma / (rho + beta·w1/(1+w1·gamma)² + beta·w2/(1+w2·gamma)²)
/// ```
///
/// `gamma` must be the [`solve_gamma`] output for `p`; the result is always
/// negative.
pub fn gamma_rho_derivative(p: &GammaParams, gamma: f64) -> Result<f64> {
    p.validate()?;
    if !(gamma > 0.0) {
        return Err(Error::domain(format!("gamma must be > 0, got {gamma}")));
    }
    let d1 = 1.0 + p.w1 * gamma;
    let d2 = 1.0 + p.w2 * gamma;
    let denom = p.rho + p.beta * p.w1 / (d1 * d1) + p.beta * p.w2 / (d2 * d2);
    Ok(-gamma / denom)
}
