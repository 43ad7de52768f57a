//! Finite-size Monte Carlo simulator for the two-cell downlink.
//!
//! A single realization draws true channels, produces channel estimates
//! through the configured feedback path (analog retransmission or random
//! codebook quantization), builds the configured precoder from the
//! estimates, and evaluates exact per-user SINRs against the true channels.
//! Realizations are independent and run in parallel with per-realization
//! RNG streams, so results are identical for any thread count.
//!
//! The regularization is specified as the raw matrix shift `alpha`. The
//! asymptotic formulas use a rescaled regularization `rho`;
//! [`alpha_from_rho`] and [`rho_from_alpha`] convert between the two per
//! scheme and feedback model, which is the single most error-prone step
//! when comparing a finite run to its limit.
//!
//! ## Example
//!
//! ```
//! use twincell::sim::{run_simulation, Feedback, Scheme, SimConfig};
//!
//! let cfg = SimConfig {
//!     n_antennas: 4,
//!     n_users_per_cell: 2,
//!     epsilon: 0.5,
//!     gamma_d: 10.0,
//!     scheme: Scheme::Mcp,
//!     feedback: Feedback::Analog { nu: 0.6, gamma_u: 1.0, kappa: 1.0 },
//!     alpha: 1.0,
//!     n_realizations: 4,
//!     seed: 7,
//! };
//! let summary = run_simulation(&cfg).unwrap();
//! assert_eq!(summary.reports.len(), 4);
//! assert!(summary.mean_sum_rate > 0.0);
//! ```

pub mod channel;
pub mod feedback;
pub mod gridsearch;
pub mod precoder;

pub use channel::{draw_channels, ChannelSet};
pub use feedback::{
    analog_feedback_estimate, rvq_estimate_set, rvq_quantize_explicit,
    rvq_quantize_statistical, sample_tau2, EstimateSet, RvqMode, EXPLICIT_BITS_CAP,
};
pub use gridsearch::{grid_search_feedback_fs, FsAllocation, FsSearchResult};
pub use precoder::{
    build_cbf_precoder, build_mcp_precoder, build_scp_precoder, compute_sinr, BsPrecoder,
    McpPrecoder, Precoding,
};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::analog::{self, AnalogParams};
use crate::digital::{self, DigitalParams};
use crate::error::{Error, Result};

/// Transmit strategy across the two base stations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Both stations jointly precode all users as one large array.
    Mcp,
    /// Each station serves its own cell but shapes beams against both
    /// cells' estimated channels.
    Cbf,
    /// Each station serves its own cell using only its own cell's rows.
    Scp,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Scheme::Mcp => "mcp",
            Scheme::Cbf => "cbf",
            Scheme::Scp => "scp",
        };
        f.write_str(s)
    }
}

/// How channel state reaches the base stations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Feedback {
    /// Uplink retransmission with power split `nu` on direct links,
    /// uplink SNR `gamma_u`, and `kappa` uplink symbols per coefficient.
    Analog { nu: f64, gamma_u: f64, kappa: f64 },
    /// Random-codebook quantization with per-antenna budgets `bd_bar`
    /// (direct) and `bc_bar` (cross); integer codebook sizes are rounded
    /// per [`integer_bits`].
    Rvq { bd_bar: f64, bc_bar: f64, mode: RvqMode },
}

/// Full description of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Antennas per base station.
    pub n_antennas: usize,
    /// Users per cell; the load is `n_users_per_cell / n_antennas`.
    pub n_users_per_cell: usize,
    /// Cross-channel gain in [0, 1] relative to the direct gain of 1.
    pub epsilon: f64,
    /// Downlink SNR (linear); also the per-station power budget since the
    /// noise variance is one.
    pub gamma_d: f64,
    /// Transmit strategy.
    pub scheme: Scheme,
    /// Feedback model.
    pub feedback: Feedback,
    /// Raw regularization added to the Gram matrix.
    pub alpha: f64,
    /// Independent channel realizations to average.
    pub n_realizations: usize,
    /// Base seed; realization `i` uses stream `i` of this seed.
    pub seed: u64,
}

impl SimConfig {
    /// Load factor `K/N`.
    pub fn beta(&self) -> f64 {
        self.n_users_per_cell as f64 / self.n_antennas as f64
    }

    /// Checks dimensions, ranges, and scheme/feedback consistency.
    pub fn validate(&self) -> Result<()> {
        if self.n_antennas < 2 {
            return Err(Error::domain("n_antennas must be at least 2"));
        }
        if self.n_users_per_cell < 1 {
            return Err(Error::domain("n_users_per_cell must be at least 1"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::domain("epsilon must be nonnegative"));
        }
        if !(self.gamma_d > 0.0) {
            return Err(Error::domain("gamma_d must be positive"));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::domain("alpha must be positive"));
        }
        if self.n_realizations < 1 {
            return Err(Error::domain("n_realizations must be at least 1"));
        }
        match self.feedback {
            Feedback::Analog { nu, gamma_u, kappa } => {
                if !(0.0..=1.0).contains(&nu) {
                    return Err(Error::domain("nu must lie in [0, 1]"));
                }
                if !(gamma_u > 0.0) {
                    return Err(Error::domain("gamma_u must be positive"));
                }
                if !(kappa >= 1.0) {
                    return Err(Error::domain("kappa must be at least 1"));
                }
                if self.scheme == Scheme::Scp && nu != 1.0 {
                    return Err(Error::domain(
                        "single-cell processing trains only direct links; set nu = 1",
                    ));
                }
            }
            Feedback::Rvq { bd_bar, bc_bar, .. } => {
                if !(bd_bar >= 0.0) || !(bc_bar >= 0.0) {
                    return Err(Error::domain("bit budgets must be nonnegative"));
                }
                if bd_bar + bc_bar <= 0.0 {
                    return Err(Error::domain("total bit budget must be positive"));
                }
            }
        }
        Ok(())
    }

    fn analog_params(&self, gamma_u: f64, kappa: f64) -> AnalogParams {
        AnalogParams {
            beta: self.beta(),
            epsilon: self.epsilon,
            gamma_d: self.gamma_d,
            gamma_u,
            kappa,
        }
    }
}

/// Per-user outcome of one realization plus its distance to the limit.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrReport {
    /// `per_user_sinr[j][k]` is the SINR of user `k` in cell `j`.
    pub per_user_sinr: [Vec<f64>; 2],
    /// Sum over all `2K` users of `log2(1 + sinr)`.
    pub sum_rate: f64,
    /// Large-system SINR this realization is compared against.
    pub limit_sinr: f64,
    /// `(R/(2N) - beta*log2(1+limit)) / (R/(2N))` for this realization.
    pub normalized_diff: f64,
}

/// Aggregate of a full Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSummary {
    /// Grand mean SINR over all users and realizations.
    pub mean_sinr: f64,
    /// Mean sum-rate over realizations.
    pub mean_sum_rate: f64,
    /// Large-system SINR used for comparison.
    pub limit_sinr: f64,
    /// Normalized per-antenna rate difference computed from the mean rate.
    pub normalized_diff: f64,
    /// Per-realization reports in realization order.
    pub reports: Vec<SinrReport>,
}

/// Rounds per-antenna bit budgets to integer per-link codebook sizes.
///
/// The total is fixed first, `B_t = round((bd_bar + bc_bar)·N)`, then the
/// direct share `B_d = round(bd_bar·N)` takes any tie, clamped into
/// `[0, B_t]`; the cross links get the remainder.
pub fn integer_bits(bd_bar: f64, bc_bar: f64, n: usize) -> (u32, u32) {
    let total = ((bd_bar + bc_bar) * n as f64).round() as i64;
    let direct = (bd_bar * n as f64).round() as i64;
    let direct = direct.clamp(0, total);
    (direct as u32, (total - direct) as u32)
}

fn alpha_scale(cfg: &SimConfig) -> Result<f64> {
    let n = cfg.n_antennas as f64;
    match (cfg.scheme, cfg.feedback) {
        (Scheme::Mcp, Feedback::Analog { nu, gamma_u, kappa }) => {
            let stats = analog::estimator_stats(&cfg.analog_params(gamma_u, kappa), nu)?;
            Ok(n * (stats.omega_d + stats.omega_c))
        }
        (Scheme::Scp, Feedback::Analog { nu, gamma_u, kappa }) => {
            let stats = analog::estimator_stats(&cfg.analog_params(gamma_u, kappa), nu)?;
            Ok(n * stats.omega_d)
        }
        (Scheme::Cbf, Feedback::Analog { .. }) => Ok(n),
        (Scheme::Mcp, Feedback::Rvq { .. }) => Ok(n * (1.0 + cfg.epsilon)),
        (Scheme::Cbf, Feedback::Rvq { .. }) | (Scheme::Scp, Feedback::Rvq { .. }) => Ok(n),
    }
}

/// Maps the asymptotic regularization `rho` to the raw shift `alpha` for
/// this configuration's scheme and feedback model.
pub fn alpha_from_rho(cfg: &SimConfig, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::domain("rho must be positive"));
    }
    let scale = alpha_scale(cfg)?;
    if !(scale > 0.0) {
        return Err(Error::domain(
            "estimates carry no signal; the regularization mapping is undefined",
        ));
    }
    Ok(rho * scale)
}

/// Recovers the asymptotic regularization implied by `cfg.alpha`.
pub fn rho_from_alpha(cfg: &SimConfig) -> Result<f64> {
    let scale = alpha_scale(cfg)?;
    if !(scale > 0.0) {
        return Err(Error::domain(
            "estimates carry no signal; the regularization mapping is undefined",
        ));
    }
    Ok(cfg.alpha / scale)
}

/// Large-system SINR implied by the configuration.
///
/// Quantized budgets enter as their real-valued per-antenna values; the
/// finite-size run rounds to integer bits, which is part of what the
/// normalized difference measures.
pub fn limiting_sinr(cfg: &SimConfig) -> Result<f64> {
    cfg.validate()?;
    let rho = rho_from_alpha(cfg)?;
    match (cfg.scheme, cfg.feedback) {
        (Scheme::Mcp, Feedback::Analog { nu, gamma_u, kappa }) => {
            analog::mcp_limiting_sinr(&cfg.analog_params(gamma_u, kappa), nu, rho)
        }
        (Scheme::Cbf, Feedback::Analog { nu, gamma_u, kappa }) => {
            analog::cbf_limiting_sinr(&cfg.analog_params(gamma_u, kappa), nu, rho)
        }
        (Scheme::Scp, Feedback::Analog { gamma_u, kappa, .. }) => {
            analog::scp_limiting_sinr(&cfg.analog_params(gamma_u, kappa), rho)
        }
        (Scheme::Mcp, Feedback::Rvq { bd_bar, bc_bar, .. }) => {
            let p = DigitalParams {
                beta: cfg.beta(),
                epsilon: cfg.epsilon,
                gamma_d: cfg.gamma_d,
                bt_bar: bd_bar + bc_bar,
            };
            digital::mcp_limiting_sinr_q(&p, (-bd_bar).exp2(), rho)
        }
        (Scheme::Cbf, Feedback::Rvq { bd_bar, bc_bar, .. }) => {
            let p = DigitalParams {
                beta: cfg.beta(),
                epsilon: cfg.epsilon,
                gamma_d: cfg.gamma_d,
                bt_bar: bd_bar + bc_bar,
            };
            digital::cbf_limiting_sinr_q(&p, (-bd_bar).exp2(), rho)
        }
        (Scheme::Scp, Feedback::Rvq { bd_bar, .. }) => {
            if !(bd_bar > 0.0) {
                return Err(Error::domain(
                    "single-cell processing needs a positive direct bit budget",
                ));
            }
            let p = DigitalParams {
                beta: cfg.beta(),
                epsilon: cfg.epsilon,
                gamma_d: cfg.gamma_d,
                bt_bar: bd_bar,
            };
            digital::scp_sinr_q(&p, rho)
        }
    }
}

pub(crate) fn estimate_for(
    cfg: &SimConfig,
    ch: &ChannelSet,
    rng: &mut ChaCha12Rng,
) -> Result<EstimateSet> {
    match cfg.feedback {
        Feedback::Analog { nu, gamma_u, kappa } => {
            analog_feedback_estimate(ch, nu, gamma_u, kappa, rng)
        }
        Feedback::Rvq { bd_bar, bc_bar, mode } => {
            let (b_d, b_c) = integer_bits(bd_bar, bc_bar, cfg.n_antennas);
            rvq_estimate_set(ch, b_d, b_c, mode, rng)
        }
    }
}

pub(crate) fn precode_for(cfg: &SimConfig, est: &EstimateSet) -> Result<Precoding> {
    let p = cfg.gamma_d;
    match cfg.scheme {
        Scheme::Mcp => Ok(Precoding::Mcp(build_mcp_precoder(
            est,
            cfg.alpha,
            2.0 * p,
        )?)),
        Scheme::Cbf => {
            let b0 = build_cbf_precoder(&est.h_hat[0][0], &est.h_hat[1][0], cfg.alpha, p)?;
            let b1 = build_cbf_precoder(&est.h_hat[1][1], &est.h_hat[0][1], cfg.alpha, p)?;
            Ok(Precoding::PerBs([b0, b1]))
        }
        Scheme::Scp => {
            let b0 = build_scp_precoder(&est.h_hat[0][0], cfg.alpha, p)?;
            let b1 = build_scp_precoder(&est.h_hat[1][1], cfg.alpha, p)?;
            Ok(Precoding::PerBs([b0, b1]))
        }
    }
}

pub(crate) fn realization_rng(seed: u64, index: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn simulate_one(cfg: &SimConfig, index: usize, limit: f64) -> Result<SinrReport> {
    let mut rng = realization_rng(cfg.seed, index);
    let ch = draw_channels(cfg.n_antennas, cfg.n_users_per_cell, cfg.epsilon, &mut rng);
    let est = estimate_for(cfg, &ch, &mut rng)?;
    let precoding = precode_for(cfg, &est)?;
    compute_sinr(&ch, &precoding, limit)
}

/// Runs the configured Monte Carlo and aggregates it against the limit.
///
/// Realizations are distributed over the current rayon thread pool;
/// per-realization RNG streams and an order-preserving collect make the
/// output independent of the thread count.
pub fn run_simulation(cfg: &SimConfig) -> Result<SimSummary> {
    cfg.validate()?;
    let limit = limiting_sinr(cfg)?;
    let reports: Vec<SinrReport> = (0..cfg.n_realizations)
        .into_par_iter()
        .map(|i| simulate_one(cfg, i, limit))
        .collect::<Result<Vec<_>>>()?;
    let mut sinr_acc = 0.0;
    let mut rate_acc = 0.0;
    for r in &reports {
        sinr_acc += r
            .per_user_sinr
            .iter()
            .flat_map(|cell| cell.iter())
            .sum::<f64>();
        rate_acc += r.sum_rate;
    }
    let users = (2 * cfg.n_users_per_cell * cfg.n_realizations) as f64;
    let mean_sinr = sinr_acc / users;
    let mean_sum_rate = rate_acc / cfg.n_realizations as f64;
    let per_antenna = mean_sum_rate / (2.0 * cfg.n_antennas as f64);
    if !(per_antenna > 0.0) {
        return Err(Error::domain("zero mean rate; nothing to compare"));
    }
    let normalized_diff =
        (per_antenna - cfg.beta() * (1.0 + limit).log2()) / per_antenna;
    Ok(SimSummary {
        mean_sinr,
        mean_sum_rate,
        limit_sinr: limit,
        normalized_diff,
        reports,
    })
}
