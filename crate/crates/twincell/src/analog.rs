//! Large-system SINR limits and feedback optimization for the two-cell
//! downlink when channel state is fed back in analog form.
//!
//! Each user spends a fraction `nu` of its uplink feedback power on the
//! direct channel and the rest on the cross channel. The base stations form
//! linear MMSE estimates of every coefficient, leaving per-link error
//! variances `delta_d` and `delta_c` ([`estimator_stats`]). On top of those
//! statistics this module evaluates the limiting SINR of two transmission
//! modes as the number of antennas grows with fixed loading `beta`:
//!
//! - multi-cell processing ([`mcp_limiting_sinr`]): both base stations pool
//!   their antennas and jointly invert the compound channel;
//! - coordinated beamforming ([`cbf_limiting_sinr`]): each base station
//!   precodes alone from local estimates but points nulls at the users of
//!   the neighbor cell.
//!
//! The `*_optimize` routines return the best power split, the matching
//! regularization, and the optimized limit. A plain single-cell baseline
//! that ignores the other cell entirely is included for reference
//! ([`scp_limiting_sinr`]).
//!
//! ## Example
//!
//! ```
//! use twincell::analog::{mcp_optimize, AnalogParams};
//!
//! let p = AnalogParams { epsilon: 0.25, ..AnalogParams::default() };
//! let best = mcp_optimize(&p).unwrap();
//! assert!((best.nu_star - 0.8).abs() < 1e-12);
//! ```

use crate::error::{Error, Result};
use crate::solver::{solve_g, solve_gamma, GammaParams};

/// Network and feedback parameters for the analog feedback analysis.
#[derive(Debug, Clone, Copy)]
pub struct AnalogParams {
    /// Cell loading `K/N`, strictly positive.
    pub beta: f64,
    /// Cross-cell channel gain, non-negative.
    pub epsilon: f64,
    /// Downlink SNR (linear), strictly positive.
    pub gamma_d: f64,
    /// Uplink feedback SNR `N·P_u/sigma_u^2` (linear), strictly positive.
    pub gamma_u: f64,
    /// Feedback duration as a multiple of the minimum training length, at least 1.
    pub kappa: f64,
}

impl Default for AnalogParams {
    fn default() -> Self {
        AnalogParams {
            beta: 0.6,
            epsilon: 0.5,
            gamma_d: 10.0,
            gamma_u: 1.0,
            kappa: 1.0,
        }
    }
}

impl AnalogParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(Error::domain(format!("beta must be > 0, got {}", self.beta)));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::domain(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        if !(self.gamma_d > 0.0) {
            return Err(Error::domain(format!(
                "gamma_d must be > 0, got {}",
                self.gamma_d
            )));
        }
        if !(self.gamma_u > 0.0) {
            return Err(Error::domain(format!(
                "gamma_u must be > 0, got {}",
                self.gamma_u
            )));
        }
        if !(self.kappa >= 1.0) {
            return Err(Error::domain(format!(
                "kappa must be >= 1, got {}",
                self.kappa
            )));
        }
        Ok(())
    }

    /// Effective feedback SNR seen by the per-coefficient MMSE estimator.
    pub fn gamma_u_bar(&self) -> f64 {
        2.0 * self.gamma_u * self.kappa * (1.0 + self.epsilon)
    }
}

/// Per-link estimation error and estimate variances for a power split.
#[derive(Debug, Clone, Copy)]
pub struct EstimatorStats {
    /// Error variance of a direct-channel coefficient, in (0, 1].
    pub delta_d: f64,
    /// Error variance of a cross-channel coefficient, in (0, epsilon].
    pub delta_c: f64,
    /// Variance of the direct-channel estimate, `1 - delta_d`.
    pub omega_d: f64,
    /// Variance of the cross-channel estimate, `epsilon - delta_c`.
    pub omega_c: f64,
    /// Effective feedback SNR `2·gamma_u·kappa·(1+epsilon)`.
    pub gamma_u_bar: f64,
}

/// Operating regime attached to an optimized allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// All feedback power on the direct channel; cooperation adds nothing.
    ScpOwnCell,
    /// Interior power split; joint processing pays off.
    Mcp,
    /// All feedback power on the cross channel (very strong interference).
    ScpOtherCell,
    /// Coordinated beamforming with an interior power split.
    CbfInterior,
    /// Coordinated beamforming feeding back the direct channel only.
    CbfBoundary,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            Regime::ScpOwnCell => "scp_own_cell",
            Regime::Mcp => "mcp",
            Regime::ScpOtherCell => "scp_other_cell",
            Regime::CbfInterior => "cbf_interior",
            Regime::CbfBoundary => "cbf_boundary",
        };
        write!(f, "{label}")
    }
}

/// Optimized allocation, regularization, and the limiting SINR they attain.
#[derive(Debug, Clone, Copy)]
pub struct AnalogResult {
    /// Best uplink power split in [0, 1].
    pub nu_star: f64,
    /// Regularization that maximizes the limit at that split.
    pub rho_star: f64,
    /// Limiting SINR at the optimum.
    pub sinr_limit: f64,
    /// Which of the boundary/interior cases the optimum landed in.
    pub regime: Regime,
}

/// Cross-over points of the optimized limit as the cross gain grows.
#[derive(Debug, Clone, Copy)]
pub struct EpsilonThresholds {
    /// Largest cross gain for which the best split is still `nu = 1`.
    pub eps_scp_max: f64,
    /// Stationary point of the limit inside the `nu = 1` region, if any.
    pub eps_scp_stationary: Option<f64>,
    /// Interior minimizer of the optimized limit in the cooperative region, if any.
    pub eps_mcp_stationary: Option<f64>,
}

fn check_nu(nu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::domain(format!("nu must lie in [0, 1], got {nu}")));
    }
    Ok(())
}

/// MMSE estimation statistics for a given uplink power split.
///
/// A fraction `nu` of the feedback power trains the direct channel and the
/// remainder the cross channel, so the per-coefficient error variances are
/// `delta_d = 1/(1 + nu·gamma_u_bar)` and
/// `delta_c = epsilon/(1 + (1-nu)·gamma_u_bar)`. The estimate variances are
/// the complements `omega_d = 1 - delta_d` and `omega_c = epsilon - delta_c`
/// by MMSE orthogonality.
pub fn estimator_stats(p: &AnalogParams, nu: f64) -> Result<EstimatorStats> {
    p.validate()?;
    check_nu(nu)?;
    let gamma_u_bar = p.gamma_u_bar();
    let delta_d = 1.0 / (1.0 + nu * gamma_u_bar);
    let delta_c = p.epsilon / (1.0 + (1.0 - nu) * gamma_u_bar);
    Ok(EstimatorStats {
        delta_d,
        delta_c,
        omega_d: 1.0 - delta_d,
        omega_c: p.epsilon - delta_c,
        gamma_u_bar,
    })
}

/// Limiting SINR of regularized inversion driven by one effective SNR.
///
/// Several schemes reduce to the same outer expression
///
/// ```text
/// sinr = gamma_e · g · (1 + (rho/beta)(1+g)²) / (gamma_e + (1+g)²)
/// ```
///
/// with `g = solve_g(beta, rho)`; they differ only in how the channel
/// uncertainty is folded into the effective SNR `gamma_e`. At
/// `rho = beta/gamma_e` the expression collapses to `g` itself, which is why
/// the optimizers below return `solve_g(beta, beta/gamma_e)` directly.
pub fn effective_snr_sinr(beta: f64, gamma_e: f64, rho: f64) -> Result<f64> {
    if !(gamma_e >= 0.0) {
        return Err(Error::domain(format!("gamma_e must be >= 0, got {gamma_e}")));
    }
    if gamma_e == 0.0 {
        return Ok(0.0);
    }
    let g = solve_g(beta, rho)?;
    let one_plus_sq = (1.0 + g) * (1.0 + g);
    Ok(gamma_e * g * (1.0 + rho / beta * one_plus_sq) / (gamma_e + one_plus_sq))
}

/// Effective SNR of joint processing under analog feedback statistics.
fn mcp_gamma_e(p: &AnalogParams, stats: &EstimatorStats) -> f64 {
    (stats.omega_d + stats.omega_c) / (stats.delta_d + stats.delta_c + 1.0 / p.gamma_d)
}

/// Effective SNR of joint processing at a given power split.
pub fn mcp_effective_snr(p: &AnalogParams, nu: f64) -> Result<f64> {
    let stats = estimator_stats(p, nu)?;
    Ok(mcp_gamma_e(p, &stats))
}

/// Effective SNR of the single-cell baseline (all training on the direct
/// channel, the other cell treated as noise).
pub fn scp_effective_snr(p: &AnalogParams) -> Result<f64> {
    let stats = estimator_stats(p, 1.0)?;
    Ok(stats.omega_d / (stats.delta_d + p.epsilon + 1.0 / p.gamma_d))
}

/// Limiting SINR of joint two-cell processing at a given split and regularization.
pub fn mcp_limiting_sinr(p: &AnalogParams, nu: f64, rho: f64) -> Result<f64> {
    let stats = estimator_stats(p, nu)?;
    effective_snr_sinr(p.beta, mcp_gamma_e(p, &stats), rho)
}

/// Closed-form best power split for joint processing.
///
/// The split minimizing the total estimation error is piecewise: all power
/// on the direct channel when the cross gain is weak
/// (`sqrt(epsilon) <= 1/(gamma_u_bar+1)`), all power on the cross channel
/// when it dominates (`sqrt(epsilon) >= gamma_u_bar+1`), and otherwise the
/// interior point `(1 + (1-sqrt(epsilon))/gamma_u_bar)/(1+sqrt(epsilon))`.
pub fn mcp_nu_star(p: &AnalogParams) -> Result<(f64, Regime)> {
    p.validate()?;
    let gamma_u_bar = p.gamma_u_bar();
    let s = p.epsilon.sqrt();
    if s <= 1.0 / (gamma_u_bar + 1.0) {
        return Ok((1.0, Regime::ScpOwnCell));
    }
    if s >= gamma_u_bar + 1.0 {
        return Ok((0.0, Regime::ScpOtherCell));
    }
    Ok(((1.0 + (1.0 - s) / gamma_u_bar) / (1.0 + s), Regime::Mcp))
}

/// Jointly optimal power split and regularization for joint processing.
///
/// The limit at the best regularization `rho = beta/gamma_e` is
/// `solve_g(beta, beta/gamma_e)`, increasing in the effective SNR, so the
/// power split only has to minimize the total error `delta_d + delta_c`.
pub fn mcp_optimize(p: &AnalogParams) -> Result<AnalogResult> {
    let (nu_star, regime) = mcp_nu_star(p)?;
    let stats = estimator_stats(p, nu_star)?;
    let gamma_e = mcp_gamma_e(p, &stats);
    let rho_star = p.beta / gamma_e;
    let sinr_limit = solve_g(p.beta, rho_star)?;
    Ok(AnalogResult {
        nu_star,
        rho_star,
        sinr_limit,
        regime,
    })
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let positive_at_lo = f(lo) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == positive_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_max(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..120 {
        if fc < fd {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        }
    }
    0.5 * (a + b)
}

/// Cross-gain thresholds of the optimized joint-processing limit.
///
/// `eps_scp_max` solves `sqrt(eps)·(gamma_tilde·(1+eps) + 1) = 1` with
/// `gamma_tilde = 2·gamma_u·kappa` and marks where the best split leaves
/// `nu = 1`. Inside that region the limit has a stationary point at
/// `1/sqrt(gamma_d·gamma_tilde) - 1` when that value is positive. Beyond
/// the region, the optimized limit typically dips and recovers; the interior
/// minimizer is located numerically and reported when it exists.
pub fn mcp_epsilon_thresholds(p: &AnalogParams) -> Result<EpsilonThresholds> {
    p.validate()?;
    let gamma_tilde = 2.0 * p.gamma_u * p.kappa;
    let eps_scp_max = bisect(0.0, 1.0, |e| {
        1.0 - e.sqrt() * (gamma_tilde * (1.0 + e) + 1.0)
    });

    let stationary = 1.0 / (p.gamma_d * gamma_tilde).sqrt() - 1.0;
    let eps_scp_stationary = if stationary > 0.0 { Some(stationary) } else { None };

    // Interior minimizer of the effective SNR under the best split, located
    // by a coarse scan plus golden-section refinement. Reported as absent
    // when the minimum sits on the search boundary.
    let gamma_e_at = |eps: f64| -> f64 {
        let q = AnalogParams { epsilon: eps, ..*p };
        let (nu, _) = mcp_nu_star(&q).expect("validated params");
        let stats = estimator_stats(&q, nu).expect("validated params");
        mcp_gamma_e(&q, &stats)
    };
    let eps_hi = 10.0;
    let steps = 2000usize;
    let mut best_i = 0usize;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let e = eps_scp_max + (eps_hi - eps_scp_max) * i as f64 / steps as f64;
        let v = gamma_e_at(e);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let eps_mcp_stationary = if best_i == 0 || best_i == steps {
        None
    } else {
        let width = (eps_hi - eps_scp_max) / steps as f64;
        let lo = eps_scp_max + width * (best_i - 1) as f64;
        let hi = eps_scp_max + width * (best_i + 1) as f64;
        Some(golden_max(lo, hi, |e| -gamma_e_at(e)))
    };

    Ok(EpsilonThresholds {
        eps_scp_max,
        eps_scp_stationary,
        eps_mcp_stationary,
    })
}

/// Limiting SINR of coordinated beamforming at a given split and regularization.
///
/// The two estimate variances `(omega_c, omega_d)` weight the two user
/// populations seen by each base station; the fixed point of
/// [`solve_gamma`] with those weights drives the quadratic forms in the
/// signal and leakage terms.
pub fn cbf_limiting_sinr(p: &AnalogParams, nu: f64, rho: f64) -> Result<f64> {
    let stats = estimator_stats(p, nu)?;
    if !(rho > 0.0) {
        return Err(Error::domain(format!("rho must be > 0, got {rho}")));
    }
    if stats.omega_d <= 0.0 {
        // No usable direct-channel estimate: the beamformer carries no signal.
        return Ok(0.0);
    }
    let gp = GammaParams {
        beta: p.beta,
        rho,
        w1: stats.omega_c,
        w2: stats.omega_d,
    };
    let gamma = solve_gamma(&gp)?;
    let qc = 1.0 + stats.omega_c * gamma;
    let qd = 1.0 + stats.omega_d * gamma;
    let loads = rho + p.beta * stats.omega_c / (qc * qc) + p.beta * stats.omega_d / (qd * qd);
    let noise = 1.0 / p.gamma_d
        + stats.delta_d
        + stats.delta_c
        + stats.omega_d / (qd * qd)
        + stats.omega_c / (qc * qc);
    Ok(stats.omega_d / p.beta * gamma * loads / noise)
}

/// Regularization maximizing the coordinated-beamforming limit at a split.
pub fn cbf_optimal_rho(p: &AnalogParams, nu: f64) -> Result<f64> {
    let stats = estimator_stats(p, nu)?;
    Ok(p.beta * (1.0 / p.gamma_d + stats.delta_d + stats.delta_c))
}

fn cbf_objective(p: &AnalogParams, nu: f64) -> f64 {
    let stats = estimator_stats(p, nu).expect("validated params");
    if stats.omega_d <= 0.0 {
        return 0.0;
    }
    let rho = p.beta * (1.0 / p.gamma_d + stats.delta_d + stats.delta_c);
    let gp = GammaParams {
        beta: p.beta,
        rho,
        w1: stats.omega_c,
        w2: stats.omega_d,
    };
    match solve_gamma(&gp) {
        Ok(gamma) => stats.omega_d * gamma,
        Err(_) => 0.0,
    }
}

/// Best power split and regularization for coordinated beamforming.
///
/// At the per-split optimal regularization the limit simplifies to
/// `omega_d·gamma`, but that scalar objective need not be concave in `nu`:
/// it can hold both an interior stationary point and a boundary maximum.
/// A 1001-point guard grid over (0, 1] therefore brackets the global
/// maximum before golden-section refinement; `nu = 0` is excluded since it
/// leaves no signal dimension.
pub fn cbf_optimize(p: &AnalogParams) -> Result<AnalogResult> {
    p.validate()?;
    let grid_points = 1000usize;
    let mut best_i = 1usize;
    let mut best = f64::NEG_INFINITY;
    for i in 1..=grid_points {
        let nu = i as f64 / grid_points as f64;
        let v = cbf_objective(p, nu);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = (best_i.saturating_sub(1)).max(1) as f64 / grid_points as f64;
    let hi = ((best_i + 1).min(grid_points)) as f64 / grid_points as f64;
    let mut nu_star = if lo < hi {
        golden_max(lo, hi, |nu| cbf_objective(p, nu))
    } else {
        best_i as f64 / grid_points as f64
    };
    if cbf_objective(p, 1.0) >= cbf_objective(p, nu_star) {
        nu_star = 1.0;
    }
    let rho_star = cbf_optimal_rho(p, nu_star)?;
    let sinr_limit = cbf_limiting_sinr(p, nu_star, rho_star)?;
    let regime = if nu_star >= 1.0 - 1e-9 {
        Regime::CbfBoundary
    } else {
        Regime::CbfInterior
    };
    Ok(AnalogResult {
        nu_star,
        rho_star,
        sinr_limit,
        regime,
    })
}

/// Limiting SINR of the single-cell baseline under analog feedback.
///
/// The baseline spends all feedback power on the direct channel (`nu = 1`)
/// and treats the other cell as plain noise, so the cross gain enters only
/// through the interference floor: `gamma_e = omega_d/(delta_d + epsilon + 1/gamma_d)`.
pub fn scp_limiting_sinr(p: &AnalogParams, rho: f64) -> Result<f64> {
    let stats = estimator_stats(p, 1.0)?;
    let gamma_e = stats.omega_d / (stats.delta_d + p.epsilon + 1.0 / p.gamma_d);
    effective_snr_sinr(p.beta, gamma_e, rho)
}

/// Optimized single-cell baseline under analog feedback.
pub fn scp_optimize(p: &AnalogParams) -> Result<AnalogResult> {
    let stats = estimator_stats(p, 1.0)?;
    let gamma_e = stats.omega_d / (stats.delta_d + p.epsilon + 1.0 / p.gamma_d);
    let rho_star = p.beta / gamma_e;
    let sinr_limit = solve_g(p.beta, rho_star)?;
    Ok(AnalogResult {
        nu_star: 1.0,
        rho_star,
        sinr_limit,
        regime: Regime::ScpOwnCell,
    })
}
