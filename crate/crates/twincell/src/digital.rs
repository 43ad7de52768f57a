//! Large-system SINR limits and bit allocation for the two-cell downlink
//! when channel state is fed back through random-codebook quantization.
//!
//! Each user owns a per-antenna bit budget `bt_bar` and splits it between
//! its direct channel (`bd_bar`) and its cross channel (`bc_bar`). In the
//! large-system regime only the distortion factors survive:
//! `x_d = 2^(-bd_bar)` for the direct link and `X_t/x_d` for the cross link,
//! with `X_t = 2^(-bt_bar)` fixed by the budget. This module evaluates the
//! limiting SINRs of joint processing, coordinated beamforming, and the
//! single-cell baseline as functions of `(x_d, rho)`, and optimizes both
//! coordinates: closed-form quartic root for joint processing, a
//! threshold-plus-fixed-point procedure for coordinated beamforming.
//!
//! ## Example
//!
//! ```
//! use twincell::digital::{mcp_opt_bits, DigitalParams};
//!
//! // With symmetric gains the budget is split evenly across the two links.
//! let p = DigitalParams { epsilon: 1.0, ..DigitalParams::default() };
//! let split = mcp_opt_bits(&p).unwrap();
//! assert!((split.x_d - 0.25).abs() < 1e-9);
//! assert!((split.bd_bar - 2.0).abs() < 1e-8);
//! ```

use crate::analog::effective_snr_sinr;
use crate::error::{Error, Result};
use crate::solver::{gamma_rho_derivative, solve_g, solve_gamma, GammaParams};

/// Network and feedback parameters for the quantized feedback analysis.
#[derive(Debug, Clone, Copy)]
pub struct DigitalParams {
    /// Cell loading `K/N`, strictly positive.
    pub beta: f64,
    /// Cross-cell channel gain, non-negative.
    pub epsilon: f64,
    /// Downlink SNR (linear), strictly positive.
    pub gamma_d: f64,
    /// Total feedback bits per antenna, strictly positive.
    pub bt_bar: f64,
}

impl Default for DigitalParams {
    fn default() -> Self {
        DigitalParams {
            beta: 0.6,
            epsilon: 0.5,
            gamma_d: 10.0,
            bt_bar: 4.0,
        }
    }
}

impl DigitalParams {
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
        if !(self.bt_bar > 0.0) {
            return Err(Error::domain(format!(
                "bt_bar must be > 0, got {}",
                self.bt_bar
            )));
        }
        Ok(())
    }

    /// Total distortion factor `2^(-bt_bar)` of the full budget.
    pub fn x_t(&self) -> f64 {
        (-self.bt_bar).exp2()
    }
}

/// A feedback-bit split described through its direct-link distortion.
#[derive(Debug, Clone, Copy)]
pub struct BitSplit {
    /// Direct-link distortion factor `2^(-bd_bar)`, inside `[X_t, 1]`.
    pub x_d: f64,
    /// Bits per antenna on the direct channel.
    pub bd_bar: f64,
    /// Bits per antenna on the cross channel, `bt_bar - bd_bar`.
    pub bc_bar: f64,
}

impl BitSplit {
    /// Builds a split from the direct-link distortion factor.
    pub fn from_x_d(x_d: f64, p: &DigitalParams) -> Result<Self> {
        p.validate()?;
        let x_t = p.x_t();
        if !(x_d >= x_t - 1e-12 && x_d <= 1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "x_d must lie in [{x_t}, 1], got {x_d}"
            )));
        }
        let x_d = x_d.clamp(x_t, 1.0);
        let bd_bar = -x_d.log2();
        Ok(BitSplit {
            x_d,
            bd_bar,
            bc_bar: p.bt_bar - bd_bar,
        })
    }
}

/// Which of the two allocation branches an optimizer settled on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Whole budget on the direct channel (`x_d = X_t`).
    DirectOnly,
    /// Budget split across both links per the closed-form allocation.
    Split,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::DirectOnly => write!(f, "direct_only"),
            Branch::Split => write!(f, "split"),
        }
    }
}

/// Fixed point and derived scalars reused across coordinated-beamforming
/// expressions at one regularization.
#[derive(Debug, Clone, Copy)]
pub struct CbfGeometry {
    /// Two-weight fixed point with weights `(1, epsilon)`.
    pub gamma_q: f64,
    /// Its derivative in `rho`, always negative.
    pub gamma_q_prime: f64,
    /// `(1 + gamma_q)^-2`.
    pub g2: f64,
    /// `(1 + epsilon·gamma_q)^-2`.
    pub g3: f64,
    /// d(g2)/d(rho).
    pub g2p: f64,
    /// d(g3)/d(rho).
    pub g3p: f64,
}

/// Jointly optimized bit split and regularization, with the limit they attain.
#[derive(Debug, Clone, Copy)]
pub struct JointOptimum {
    /// Regularization at the stationary point of the active branch.
    pub rho_star: f64,
    /// Optimal bit split.
    pub bits: BitSplit,
    /// Limiting SINR at the optimum.
    pub sinr_limit: f64,
    /// Active allocation branch.
    pub branch: Branch,
}

/// Optimized single-cell baseline under quantized feedback.
#[derive(Debug, Clone, Copy)]
pub struct ScpOptimum {
    /// Best regularization `beta/gamma_e`.
    pub rho_star: f64,
    /// Limiting SINR at that regularization.
    pub sinr_limit: f64,
}

fn check_x_d(x_d: f64, p: &DigitalParams) -> Result<f64> {
    let x_t = p.x_t();
    if !(x_d >= x_t - 1e-12 && x_d <= 1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "x_d must lie in [{x_t}, 1], got {x_d}"
        )));
    }
    Ok(x_d.clamp(x_t, 1.0))
}

/// Composite channel quality of a bit split.
///
/// `d = (sqrt(1-x_d) + epsilon·sqrt(1-X_t/x_d))/(1+epsilon)` aggregates the
/// per-link quantization qualities into the single scalar that drives the
/// joint-processing limit; `d = 1` would mean perfect knowledge of both
/// links.
pub fn quality_d(x_d: f64, p: &DigitalParams) -> Result<f64> {
    p.validate()?;
    let x_d = check_x_d(x_d, p)?;
    let cross = (1.0 - p.x_t() / x_d).max(0.0);
    Ok(((1.0 - x_d).max(0.0).sqrt() + p.epsilon * cross.sqrt()) / (1.0 + p.epsilon))
}

/// Effective SNR of joint processing at composite quality `d`.
fn mcp_gamma_e_q(p: &DigitalParams, d: f64) -> f64 {
    d * d / (1.0 - d * d + 1.0 / (p.gamma_d * (1.0 + p.epsilon)))
}

/// Effective SNR of joint processing at a given direct-channel distortion.
pub fn mcp_effective_snr_q(p: &DigitalParams, x_d: f64) -> Result<f64> {
    let d = quality_d(x_d, p)?;
    Ok(mcp_gamma_e_q(p, d))
}

/// Effective SNR of the single-cell baseline under quantized feedback.
pub fn scp_effective_snr_q(p: &DigitalParams) -> Result<f64> {
    p.validate()?;
    let x_t = p.x_t();
    Ok((1.0 - x_t) / (x_t + p.epsilon + 1.0 / p.gamma_d))
}

/// Limiting SINR of joint two-cell processing under quantized feedback.
pub fn mcp_limiting_sinr_q(p: &DigitalParams, x_d: f64, rho: f64) -> Result<f64> {
    let d = quality_d(x_d, p)?;
    if !(rho > 0.0) {
        return Err(Error::domain(format!("rho must be > 0, got {rho}")));
    }
    effective_snr_sinr(p.beta, mcp_gamma_e_q(p, d), rho)
}

/// Bit split maximizing the composite quality for joint processing.
///
/// The maximizer of `d` over `x_d` in `[X_t, 1]` is the unique root of the
/// quartic `x^4 - X_t·x^3 + (epsilon·X_t)^2 (x - 1) = 0` inside the
/// interval; it is found by bisecting the sign of the derivative of `d`,
/// which is positive at the left end and negative at the right end. With no
/// cross gain the whole budget goes to the direct channel.
pub fn mcp_opt_bits(p: &DigitalParams) -> Result<BitSplit> {
    p.validate()?;
    let x_t = p.x_t();
    if p.epsilon == 0.0 {
        return BitSplit::from_x_d(x_t, p);
    }
    // Sign of d'(x), up to a positive factor.
    let slope = |x: f64| -> f64 {
        -1.0 / (1.0 - x).sqrt() + p.epsilon * x_t / (x * x * (1.0 - x_t / x).sqrt())
    };
    let mut lo = x_t * (1.0 + 1e-15);
    let mut hi = 1.0 - 1e-15;
    if slope(lo) <= 0.0 {
        return BitSplit::from_x_d(x_t, p);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    BitSplit::from_x_d(0.5 * (lo + hi), p)
}

/// Regularization maximizing the joint-processing limit at quality `d_star`.
pub fn mcp_opt_rho_q(p: &DigitalParams, d_star: f64) -> Result<f64> {
    p.validate()?;
    if !(d_star > 0.0 && d_star < 1.0) {
        return Err(Error::domain(format!(
            "d_star must lie in (0, 1), got {d_star}"
        )));
    }
    Ok(p.beta / mcp_gamma_e_q(p, d_star))
}

/// Optimized joint-processing limit: best bits, then best regularization.
pub fn mcp_optimize_q(p: &DigitalParams) -> Result<JointOptimum> {
    let bits = mcp_opt_bits(p)?;
    let d = quality_d(bits.x_d, p)?;
    let rho_star = mcp_opt_rho_q(p, d)?;
    let sinr_limit = solve_g(p.beta, rho_star)?;
    let branch = if bits.x_d <= p.x_t() * (1.0 + 1e-9) {
        Branch::DirectOnly
    } else {
        Branch::Split
    };
    Ok(JointOptimum {
        rho_star,
        bits,
        sinr_limit,
        branch,
    })
}

/// Cross gain minimizing the optimized joint-processing limit, if any.
///
/// The optimized limit first falls with the cross gain (quantization must
/// cover a second link) and later rises (joint processing exploits the
/// stronger link), so a unique interior minimizer typically exists. It is
/// the root of the stationarity condition
/// `(x_d*)²·(gamma_d(1+eps) + 1/2) = eps·X_t·(gamma_d(1+eps) + 1 + eps/2)`,
/// located by bisection after a sign-change scan over `[1e-4, 10]`.
pub fn mcp_min_epsilon_q(p: &DigitalParams) -> Result<Option<f64>> {
    p.validate()?;
    let x_t = p.x_t();
    let station = |eps: f64| -> f64 {
        let q = DigitalParams { epsilon: eps, ..*p };
        let x = mcp_opt_bits(&q).expect("validated params").x_d;
        x * x * (p.gamma_d * (1.0 + eps) + 0.5)
            - eps * x_t * (p.gamma_d * (1.0 + eps) + 1.0 + 0.5 * eps)
    };
    let (mut lo, mut hi) = (1e-4, 10.0);
    let steps = 200usize;
    let mut bracket = None;
    let mut prev = station(lo);
    for i in 1..=steps {
        let e = lo + (hi - lo) * i as f64 / steps as f64;
        let v = station(e);
        if prev.signum() != v.signum() {
            bracket = Some((lo + (hi - lo) * (i - 1) as f64 / steps as f64, e));
            break;
        }
        prev = v;
    }
    let Some((a, b)) = bracket else {
        return Ok(None);
    };
    lo = a;
    hi = b;
    let positive_at_lo = station(lo) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (station(mid) > 0.0) == positive_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Fixed point and derivative bundle for the coordinated-beamforming limit.
pub fn cbf_geometry(p: &DigitalParams, rho: f64) -> Result<CbfGeometry> {
    p.validate()?;
    let gp = GammaParams {
        beta: p.beta,
        rho,
        w1: 1.0,
        w2: p.epsilon,
    };
    let gamma_q = solve_gamma(&gp)?;
    let gamma_q_prime = gamma_rho_derivative(&gp, gamma_q)?;
    let qd = 1.0 + gamma_q;
    let qc = 1.0 + p.epsilon * gamma_q;
    Ok(CbfGeometry {
        gamma_q,
        gamma_q_prime,
        g2: 1.0 / (qd * qd),
        g3: 1.0 / (qc * qc),
        g2p: -2.0 * gamma_q_prime / (qd * qd * qd),
        g3p: -2.0 * p.epsilon * gamma_q_prime / (qc * qc * qc),
    })
}

/// Limiting SINR of coordinated beamforming under quantized feedback.
pub fn cbf_limiting_sinr_q(p: &DigitalParams, x_d: f64, rho: f64) -> Result<f64> {
    let x_d = check_x_d(x_d, p)?;
    if !(rho > 0.0) {
        return Err(Error::domain(format!("rho must be > 0, got {rho}")));
    }
    let geo = cbf_geometry(p, rho)?;
    let x_t = p.x_t();
    let phi_d = 1.0 - x_d;
    let phi_c = 1.0 - x_t / x_d;
    let delta_d = x_d;
    let delta_c = p.epsilon * x_t / x_d;
    let noise = 1.0 / p.gamma_d + phi_d * geo.g2 + phi_c * p.epsilon * geo.g3 + delta_d + delta_c;
    Ok(-phi_d * geo.gamma_q * geo.gamma_q / (p.beta * noise * geo.gamma_q_prime))
}

/// Cross-gain threshold below which the whole budget goes to the direct link.
///
/// Returns infinity when the denominator is non-positive, meaning the
/// direct-only allocation is optimal for every cross gain at this `rho`.
pub fn cbf_eps_threshold(p: &DigitalParams, rho: f64) -> Result<f64> {
    let geo = cbf_geometry(p, rho)?;
    let x_t = p.x_t();
    let denom = 1.0 - geo.g3 - x_t * (2.0 - geo.g3);
    if denom <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(x_t * (1.0 / p.gamma_d + 1.0) / denom)
}

/// Closed-form split allocation for cross gains above the threshold.
fn cbf_split_x_d(p: &DigitalParams, geo: &CbfGeometry) -> f64 {
    let x_t = p.x_t();
    let s = p.epsilon * x_t;
    let m = geo.g3 - 1.0;
    let q = 1.0 / p.gamma_d + 1.0 + p.epsilon * geo.g3;
    let x = (s * m + (s * s * m * m - s * q * m).sqrt()) / q;
    x.clamp(x_t, 1.0 - 1e-12)
}

/// Bit split maximizing the coordinated-beamforming limit at fixed `rho`.
///
/// Below the cross-gain threshold of [`cbf_eps_threshold`] every bit goes
/// to the direct channel; above it the direct-link distortion takes the
/// closed-form value of the interior stationary point. The allocation never
/// reaches `x_d = 1`: shutting down the direct link would zero the signal.
pub fn cbf_opt_bits(p: &DigitalParams, rho: f64) -> Result<BitSplit> {
    if !(rho > 0.0) {
        return Err(Error::domain(format!("rho must be > 0, got {rho}")));
    }
    let threshold = cbf_eps_threshold(p, rho)?;
    if p.epsilon <= threshold {
        return BitSplit::from_x_d(p.x_t(), p);
    }
    let geo = cbf_geometry(p, rho)?;
    BitSplit::from_x_d(cbf_split_x_d(p, &geo), p)
}

fn branch_objective(p: &DigitalParams, branch: Branch, rho: f64) -> f64 {
    let x_d = match branch {
        Branch::DirectOnly => p.x_t(),
        Branch::Split => match cbf_geometry(p, rho) {
            Ok(geo) => cbf_split_x_d(p, &geo),
            Err(_) => return f64::NEG_INFINITY,
        },
    };
    cbf_limiting_sinr_q(p, x_d, rho).unwrap_or(f64::NEG_INFINITY)
}

fn golden_max(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..160 {
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

/// Stationary regularization of one allocation branch.
///
/// The stationarity condition has `rho` on both sides through the fixed
/// point, so it is solved as a damped fixed-point iteration (step 1/2) from
/// `rho = beta·(1/gamma_d + X_t + epsilon)`. If the iteration stalls, the
/// branch objective is maximized directly by golden-section search as a
/// fallback.
pub fn cbf_rho_stationary(p: &DigitalParams, branch: Branch) -> Result<f64> {
    p.validate()?;
    let x_t = p.x_t();
    let rhs = |rho: f64| -> Result<f64> {
        let geo = cbf_geometry(p, rho)?;
        let e = p.epsilon;
        let cross_term = geo.g2 * geo.g3p - geo.g3 * geo.g2p;
        match branch {
            Branch::DirectOnly => {
                let num = (geo.g2p + e * geo.g3p) * (x_t + 1.0 / p.gamma_d + e)
                    + e * (1.0 - x_t) * cross_term;
                Ok(p.beta * num / ((1.0 - x_t) * geo.g2p))
            }
            Branch::Split => {
                let x_d = cbf_split_x_d(p, &geo);
                let phi_d = 1.0 - x_d;
                let phi_c = 1.0 - x_t / x_d;
                let num = (geo.g2p + e * geo.g3p) * (1.0 / p.gamma_d + x_d + e * x_t / x_d)
                    + e * cross_term * (x_t / x_d - x_d);
                Ok(p.beta * num / (phi_d * geo.g2p + e * phi_c * geo.g3p))
            }
        }
    };
    let mut rho = p.beta * (1.0 / p.gamma_d + x_t + p.epsilon);
    let mut converged = false;
    for _ in 0..10_000 {
        let next = 0.5 * rho + 0.5 * rhs(rho)?;
        if !(next > 0.0) || !next.is_finite() {
            break;
        }
        if (next - rho).abs() <= 1e-13 * rho.max(1.0) {
            rho = next;
            converged = true;
            break;
        }
        rho = next;
    }
    if converged {
        return Ok(rho);
    }
    // Fallback: maximize the branch objective directly.
    let best = golden_max(1e-6, 60.0, |r| branch_objective(p, branch, r));
    if branch_objective(p, branch, best).is_finite() {
        Ok(best)
    } else {
        Err(Error::Convergence {
            iterations: 10_000,
            residual: f64::NAN,
        })
    }
}

/// Joint optimization of bits and regularization for coordinated beamforming.
///
/// The allocation branch changes exactly where the cross gain equals the
/// threshold of [`cbf_eps_threshold`], and that threshold rises with `rho`;
/// the procedure therefore locates the threshold-crossing `rho_th`, computes
/// the direct-only stationary point, and keeps it when it lies at or beyond
/// `rho_th` (direct-only optimal); otherwise the split branch's stationary
/// point wins.
pub fn cbf_joint_opt(p: &DigitalParams) -> Result<JointOptimum> {
    p.validate()?;
    let finish = |branch: Branch, rho: f64| -> Result<JointOptimum> {
        let bits = match branch {
            Branch::DirectOnly => BitSplit::from_x_d(p.x_t(), p)?,
            Branch::Split => {
                let geo = cbf_geometry(p, rho)?;
                BitSplit::from_x_d(cbf_split_x_d(p, &geo), p)?
            }
        };
        let sinr_limit = cbf_limiting_sinr_q(p, bits.x_d, rho)?;
        Ok(JointOptimum {
            rho_star: rho,
            bits,
            sinr_limit,
            branch,
        })
    };

    // Threshold regularization: below it the split branch is active.
    let rho_lo = 1e-8;
    if p.epsilon <= cbf_eps_threshold(p, rho_lo)? {
        let rho = cbf_rho_stationary(p, Branch::DirectOnly)?;
        return finish(Branch::DirectOnly, rho);
    }
    let mut hi = 1.0;
    while cbf_eps_threshold(p, hi)? < p.epsilon && hi < 1e3 {
        hi *= 2.0;
    }
    let rho_th = if cbf_eps_threshold(p, hi)? < p.epsilon {
        f64::INFINITY
    } else {
        let mut lo = rho_lo;
        let mut hi = hi;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cbf_eps_threshold(p, mid)? < p.epsilon {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    let rho_direct = cbf_rho_stationary(p, Branch::DirectOnly)?;
    if rho_direct >= rho_th {
        finish(Branch::DirectOnly, rho_direct)
    } else {
        let rho_split = cbf_rho_stationary(p, Branch::Split)?;
        finish(Branch::Split, rho_split)
    }
}

/// Limiting SINR of the single-cell baseline at a given regularization.
///
/// The baseline puts the whole budget on the direct channel and treats the
/// neighbor cell as noise: `gamma_e = (1 - X_t)/(X_t + epsilon + 1/gamma_d)`.
pub fn scp_sinr_q(p: &DigitalParams, rho: f64) -> Result<f64> {
    p.validate()?;
    let x_t = p.x_t();
    let gamma_e = (1.0 - x_t) / (x_t + p.epsilon + 1.0 / p.gamma_d);
    effective_snr_sinr(p.beta, gamma_e, rho)
}

/// Optimized single-cell baseline under quantized feedback.
pub fn scp_limiting_sinr_q(p: &DigitalParams) -> Result<ScpOptimum> {
    p.validate()?;
    let x_t = p.x_t();
    let gamma_e = (1.0 - x_t) / (x_t + p.epsilon + 1.0 / p.gamma_d);
    let rho_star = p.beta / gamma_e;
    Ok(ScpOptimum {
        rho_star,
        sinr_limit: solve_g(p.beta, rho_star)?,
    })
}
