//! Per-realization exhaustive search over feedback allocations.
//!
//! The asymptotic optimizers pick one allocation (analog power split or
//! direct/cross bit split) for all realizations. A finite system could
//! instead pick the best allocation for each realization it sees. This
//! module measures how much that per-realization oracle gains: for every
//! realization it scans a candidate grid with the regularization held at
//! the configured value and with shared feedback randomness across
//! candidates, so the comparison isolates the allocation itself.
//!
//! Shared randomness means one unit-variance noise draw rescaled per
//! candidate split in analog mode, and one uniform draw plus one orthogonal
//! direction per link reused across candidate bit splits in quantized mode.
//! The quantized search therefore requires the statistical quantizer.

use nalgebra::{DMatrix, RowDVector};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::channel::draw_channels;
use super::feedback::{
    analog_estimate_scaled, assemble_quantized, draw_unit_noise, orthogonal_direction,
    tau2_from_uniform, EstimateSet, RvqMode,
};
use super::precoder::compute_sinr;
use super::{integer_bits, precode_for, realization_rng, Feedback, Scheme, SimConfig};
use crate::error::{Error, Result};

/// One realization's outcome of the allocation scan.
#[derive(Debug, Clone, PartialEq)]
pub struct FsAllocation {
    /// Winning allocation: the power split `nu` in analog mode, the
    /// integer direct-channel bit count in quantized mode.
    pub allocation: f64,
    /// Sum-rate achieved by the winning allocation.
    pub best_sum_rate: f64,
    /// Sum-rate achieved by the configured (asymptotic) allocation on the
    /// same channels and feedback randomness.
    pub ref_sum_rate: f64,
}

/// Aggregate outcome of the per-realization allocation search.
#[derive(Debug, Clone, PartialEq)]
pub struct FsSearchResult {
    /// Mean over realizations of the per-realization best sum-rate.
    pub mean_best_sum_rate: f64,
    /// Mean sum-rate of the configured allocation.
    pub mean_ref_sum_rate: f64,
    /// Mean winning allocation.
    pub mean_best_allocation: f64,
    /// `(best - ref) / best` on the means; nonnegative because the
    /// configured allocation is always one of the candidates.
    pub gap: f64,
    /// Per-realization details in realization order.
    pub per_realization: Vec<FsAllocation>,
}

struct LinkDraw {
    dir: RowDVector<Complex64>,
    z: RowDVector<Complex64>,
    norm: f64,
    uniform: f64,
}

fn estimates_unusable(cfg: &SimConfig, est: &EstimateSet) -> bool {
    let all_zero = |m: &DMatrix<Complex64>| m.iter().all(|z| z.norm_sqr() == 0.0);
    match cfg.scheme {
        Scheme::Mcp => est.h_hat.iter().flatten().all(all_zero),
        Scheme::Cbf | Scheme::Scp => {
            all_zero(&est.h_hat[0][0]) || all_zero(&est.h_hat[1][1])
        }
    }
}

fn sum_rate_of(cfg: &SimConfig, ch: &super::ChannelSet, est: &EstimateSet) -> Result<f64> {
    // A candidate that leaves a station without any usable estimate (all
    // feedback power on the other link type) silences that station; its
    // realized sum-rate is zero rather than an error.
    if estimates_unusable(cfg, est) {
        return Ok(0.0);
    }
    let precoding = precode_for(cfg, est)?;
    Ok(compute_sinr(ch, &precoding, 0.0)?.sum_rate)
}

fn scan_one(cfg: &SimConfig, index: usize, grid: usize) -> Result<FsAllocation> {
    let (n, k) = (cfg.n_antennas, cfg.n_users_per_cell);
    let mut rng = realization_rng(cfg.seed, index);
    let ch = draw_channels(n, k, cfg.epsilon, &mut rng);
    match cfg.feedback {
        Feedback::Analog { nu, gamma_u, kappa } => {
            let noise = draw_unit_noise(k, n, &mut rng);
            let mut candidates: Vec<f64> = if grid <= 1 {
                vec![nu]
            } else {
                (0..grid).map(|i| i as f64 / (grid - 1) as f64).collect()
            };
            if !candidates.contains(&nu) {
                candidates.push(nu);
            }
            let mut best: Option<(f64, f64)> = None;
            let mut ref_rate = 0.0;
            for &cand in &candidates {
                let est = analog_estimate_scaled(&ch, cand, gamma_u, kappa, &noise)?;
                let rate = sum_rate_of(cfg, &ch, &est)?;
                if cand == nu {
                    ref_rate = rate;
                }
                if best.map_or(true, |(_, r)| rate > r) {
                    best = Some((cand, rate));
                }
            }
            let (allocation, best_sum_rate) = best.expect("candidate list is non-empty");
            Ok(FsAllocation {
                allocation,
                best_sum_rate,
                ref_sum_rate: ref_rate,
            })
        }
        Feedback::Rvq { bd_bar, bc_bar, .. } => {
            let (bd_ref, bc_ref) = integer_bits(bd_bar, bc_bar, n);
            let total = bd_ref + bc_ref;
            let mut draws: Vec<Option<LinkDraw>> = Vec::with_capacity(4 * k);
            for j in 0..2 {
                for i in 0..2 {
                    for u in 0..k {
                        let row = ch.row(u, j, i);
                        let norm = row.norm();
                        if norm == 0.0 {
                            draws.push(None);
                            continue;
                        }
                        let dir = row / Complex64::new(norm, 0.0);
                        let z = orthogonal_direction(&dir, &mut rng);
                        let uniform = 1.0 - rng.gen::<f64>();
                        draws.push(Some(LinkDraw {
                            dir,
                            z,
                            norm,
                            uniform,
                        }));
                    }
                }
            }
            let candidates: Vec<u32> = if grid <= 1 {
                vec![bd_ref]
            } else {
                (0..=total).collect()
            };
            let mut best: Option<(u32, f64)> = None;
            let mut ref_rate = 0.0;
            for &cand in &candidates {
                let est = quantize_with_draws(&ch, &draws, cand, total - cand)?;
                let rate = sum_rate_of(cfg, &ch, &est)?;
                if cand == bd_ref {
                    ref_rate = rate;
                }
                if best.map_or(true, |(_, r)| rate > r) {
                    best = Some((cand, rate));
                }
            }
            let (allocation, best_sum_rate) = best.expect("candidate list is non-empty");
            Ok(FsAllocation {
                allocation: allocation as f64,
                best_sum_rate,
                ref_sum_rate: ref_rate,
            })
        }
    }
}

fn quantize_with_draws(
    ch: &super::ChannelSet,
    draws: &[Option<LinkDraw>],
    bits_direct: u32,
    bits_cross: u32,
) -> Result<EstimateSet> {
    let (n, k) = (ch.n, ch.k);
    let mut h_hat = [
        [DMatrix::zeros(k, n), DMatrix::zeros(k, n)],
        [DMatrix::zeros(k, n), DMatrix::zeros(k, n)],
    ];
    let mut tau2 = [
        [nalgebra::DVector::zeros(k), nalgebra::DVector::zeros(k)],
        [nalgebra::DVector::zeros(k), nalgebra::DVector::zeros(k)],
    ];
    let mut idx = 0usize;
    for j in 0..2 {
        for i in 0..2 {
            let bits = if i == j { bits_direct } else { bits_cross };
            for u in 0..k {
                if let Some(draw) = &draws[idx] {
                    let t2 = tau2_from_uniform(n, bits, draw.uniform);
                    let row = assemble_quantized(&draw.dir, &draw.z, draw.norm, t2);
                    for c in 0..n {
                        h_hat[j][i][(u, c)] = row[c];
                    }
                    tau2[j][i][u] = t2;
                }
                idx += 1;
            }
        }
    }
    Ok(EstimateSet {
        h_hat,
        tau2: Some(tau2),
    })
}

/// Scans feedback allocations per realization and compares the oracle to
/// the configured allocation.
///
/// `grid` is the number of evenly spaced power-split candidates in analog
/// mode; quantized mode always scans every integer direct-bit count up to
/// the rounded total. A `grid` of one degenerates to the configured
/// allocation alone. The configured allocation is always a candidate, so
/// the reported gap is nonnegative.
pub fn grid_search_feedback_fs(cfg: &SimConfig, grid: usize) -> Result<FsSearchResult> {
    cfg.validate()?;
    if cfg.scheme == Scheme::Scp {
        return Err(Error::config(
            "allocation search applies to the joint and coordinated schemes",
        ));
    }
    if let Feedback::Rvq { mode, .. } = cfg.feedback {
        if mode != RvqMode::Statistical {
            return Err(Error::config(
                "allocation search shares draws across candidates; use the statistical quantizer",
            ));
        }
    }
    let per_realization: Vec<FsAllocation> = (0..cfg.n_realizations)
        .into_par_iter()
        .map(|i| scan_one(cfg, i, grid))
        .collect::<Result<Vec<_>>>()?;
    let r = per_realization.len() as f64;
    let mean_best_sum_rate = per_realization.iter().map(|a| a.best_sum_rate).sum::<f64>() / r;
    let mean_ref_sum_rate = per_realization.iter().map(|a| a.ref_sum_rate).sum::<f64>() / r;
    let mean_best_allocation = per_realization.iter().map(|a| a.allocation).sum::<f64>() / r;
    if !(mean_best_sum_rate > 0.0) {
        return Err(Error::domain("zero best sum-rate; nothing to compare"));
    }
    let gap = (mean_best_sum_rate - mean_ref_sum_rate) / mean_best_sum_rate;
    Ok(FsSearchResult {
        mean_best_sum_rate,
        mean_ref_sum_rate,
        mean_best_allocation,
        gap,
        per_realization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_analog() -> SimConfig {
        SimConfig {
            n_antennas: 5,
            n_users_per_cell: 3,
            epsilon: 0.5,
            gamma_d: 10.0,
            scheme: Scheme::Cbf,
            feedback: Feedback::Analog {
                nu: 0.8,
                gamma_u: 1.0,
                kappa: 1.0,
            },
            alpha: 1.5,
            n_realizations: 4,
            seed: 3,
        }
    }

    #[test]
    fn degenerate_grid_returns_the_configured_point() {
        let res = grid_search_feedback_fs(&cfg_analog(), 1).unwrap();
        assert_eq!(res.gap, 0.0);
        for a in &res.per_realization {
            assert_eq!(a.allocation, 0.8);
            assert_eq!(a.best_sum_rate, a.ref_sum_rate);
        }
    }

    #[test]
    fn oracle_never_loses_to_the_reference() {
        let res = grid_search_feedback_fs(&cfg_analog(), 11).unwrap();
        assert!(res.gap >= 0.0);
        for a in &res.per_realization {
            assert!(a.best_sum_rate >= a.ref_sum_rate);
            assert!((0.0..=1.0).contains(&a.allocation));
        }
    }

    #[test]
    fn quantized_scan_visits_integer_splits() {
        let mut cfg = cfg_analog();
        cfg.scheme = Scheme::Mcp;
        cfg.feedback = Feedback::Rvq {
            bd_bar: 2.4,
            bc_bar: 1.6,
            mode: RvqMode::Statistical,
        };
        let res = grid_search_feedback_fs(&cfg, 8).unwrap();
        let total = (4.0f64 * 5.0).round();
        for a in &res.per_realization {
            assert_eq!(a.allocation, a.allocation.trunc());
            assert!(a.allocation >= 0.0 && a.allocation <= total);
            assert!(a.best_sum_rate >= a.ref_sum_rate);
        }
    }

    #[test]
    fn explicit_mode_and_scp_are_rejected() {
        let mut cfg = cfg_analog();
        cfg.feedback = Feedback::Rvq {
            bd_bar: 2.0,
            bc_bar: 2.0,
            mode: RvqMode::Explicit,
        };
        assert!(grid_search_feedback_fs(&cfg, 4).is_err());

        let mut cfg = cfg_analog();
        cfg.scheme = Scheme::Scp;
        cfg.feedback = Feedback::Analog {
            nu: 1.0,
            gamma_u: 1.0,
            kappa: 1.0,
        };
        assert!(grid_search_feedback_fs(&cfg, 4).is_err());
    }

    #[test]
    fn search_is_deterministic() {
        let a = grid_search_feedback_fs(&cfg_analog(), 6).unwrap();
        let b = grid_search_feedback_fs(&cfg_analog(), 6).unwrap();
        assert_eq!(a, b);
    }
}
