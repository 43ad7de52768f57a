//! Finite-size runs must approach their large-system limits.
//!
//! Each case optimizes the allocation and regularization with the
//! asymptotic formulas, maps the regularization into the raw matrix shift,
//! runs a moderate-size Monte Carlo, and checks that the normalized
//! per-antenna rate difference is small, positive, and sane. Tight
//! flagship-size checks live in the acceptance suite; these run at half
//! size to keep the feedback loop fast while still catching any error in
//! the regularization mapping, power budgets, or estimator scaling.

use twincell::analog::{self, AnalogParams};
use twincell::digital::{self, DigitalParams};
use twincell::sim::{
    alpha_from_rho, run_simulation, Feedback, RvqMode, Scheme, SimConfig,
};

const N: usize = 30;
const K: usize = 18;
const REALIZATIONS: usize = 300;

fn base_cfg(scheme: Scheme, feedback: Feedback, alpha: f64) -> SimConfig {
    SimConfig {
        n_antennas: N,
        n_users_per_cell: K,
        epsilon: 0.5,
        gamma_d: 10.0,
        scheme,
        feedback,
        alpha,
        n_realizations: REALIZATIONS,
        seed: 2024,
    }
}

fn analog_params() -> AnalogParams {
    AnalogParams {
        beta: K as f64 / N as f64,
        epsilon: 0.5,
        gamma_d: 10.0,
        gamma_u: 1.0,
        kappa: 1.0,
    }
}

fn digital_params() -> DigitalParams {
    DigitalParams {
        beta: K as f64 / N as f64,
        epsilon: 0.5,
        gamma_d: 10.0,
        bt_bar: 4.0,
    }
}

fn check(label: &str, cfg: &SimConfig, expected_limit: f64, lo: f64, hi: f64) {
    let summary = run_simulation(cfg).unwrap();
    assert!(
        (summary.limit_sinr - expected_limit).abs() < 1e-12,
        "{label}: dispatched limit {} vs direct {}",
        summary.limit_sinr,
        expected_limit
    );
    assert!(
        summary.normalized_diff > lo && summary.normalized_diff < hi,
        "{label}: normalized diff {:.4} outside ({lo}, {hi})",
        summary.normalized_diff
    );
}

#[test]
fn mcp_analog_tracks_its_limit() {
    let p = analog_params();
    let opt = analog::mcp_optimize(&p).unwrap();
    let feedback = Feedback::Analog {
        nu: opt.nu_star,
        gamma_u: 1.0,
        kappa: 1.0,
    };
    let mut cfg = base_cfg(Scheme::Mcp, feedback, 1.0);
    cfg.alpha = alpha_from_rho(&cfg, opt.rho_star).unwrap();
    check("mcp analog", &cfg, opt.sinr_limit, 0.005, 0.09);
}

#[test]
fn cbf_analog_tracks_its_limit() {
    let p = analog_params();
    let opt = analog::cbf_optimize(&p).unwrap();
    let feedback = Feedback::Analog {
        nu: opt.nu_star,
        gamma_u: 1.0,
        kappa: 1.0,
    };
    let mut cfg = base_cfg(Scheme::Cbf, feedback, 1.0);
    cfg.alpha = alpha_from_rho(&cfg, opt.rho_star).unwrap();
    check("cbf analog", &cfg, opt.sinr_limit, 0.005, 0.09);
}

#[test]
fn scp_analog_tracks_its_limit() {
    let p = analog_params();
    let opt = analog::scp_optimize(&p).unwrap();
    let feedback = Feedback::Analog {
        nu: 1.0,
        gamma_u: 1.0,
        kappa: 1.0,
    };
    let mut cfg = base_cfg(Scheme::Scp, feedback, 1.0);
    cfg.alpha = alpha_from_rho(&cfg, opt.rho_star).unwrap();
    check("scp analog", &cfg, opt.sinr_limit, 0.0, 0.10);
}

#[test]
fn mcp_quantized_tracks_its_limit() {
    let p = digital_params();
    let bits = digital::mcp_opt_bits(&p).unwrap();
    let opt = digital::mcp_optimize_q(&p).unwrap();
    let feedback = Feedback::Rvq {
        bd_bar: bits.bd_bar,
        bc_bar: bits.bc_bar,
        mode: RvqMode::Statistical,
    };
    let mut cfg = base_cfg(Scheme::Mcp, feedback, 1.0);
    cfg.alpha = alpha_from_rho(&cfg, opt.rho_star).unwrap();
    check("mcp rvq", &cfg, opt.sinr_limit, 0.005, 0.10);
}

#[test]
fn cbf_quantized_tracks_its_limit() {
    let p = digital_params();
    let opt = digital::cbf_joint_opt(&p).unwrap();
    let feedback = Feedback::Rvq {
        bd_bar: opt.bits.bd_bar,
        bc_bar: opt.bits.bc_bar,
        mode: RvqMode::Statistical,
    };
    let mut cfg = base_cfg(Scheme::Cbf, feedback, 1.0);
    cfg.alpha = alpha_from_rho(&cfg, opt.rho_star).unwrap();
    check("cbf rvq", &cfg, opt.sinr_limit, 0.005, 0.10);
}

#[test]
fn scp_quantized_tracks_its_limit() {
    let p = digital_params();
    let opt = digital::scp_limiting_sinr_q(&p).unwrap();
    let feedback = Feedback::Rvq {
        bd_bar: 4.0,
        bc_bar: 0.0,
        mode: RvqMode::Statistical,
    };
    let mut cfg = base_cfg(Scheme::Scp, feedback, 1.0);
    cfg.alpha = alpha_from_rho(&cfg, opt.rho_star).unwrap();
    check("scp rvq", &cfg, opt.sinr_limit, 0.0, 0.10);
}

#[test]
fn convergence_improves_with_size() {
    // Same setup at N = 15 and N = 30: the smaller system must sit
    // further from the limit (Monte Carlo noise is far below this margin).
    let p = analog_params();
    let opt = analog::mcp_optimize(&p).unwrap();
    let feedback = Feedback::Analog {
        nu: opt.nu_star,
        gamma_u: 1.0,
        kappa: 1.0,
    };
    let mut small = base_cfg(Scheme::Mcp, feedback, 1.0);
    small.n_antennas = 15;
    small.n_users_per_cell = 9;
    small.alpha = alpha_from_rho(&small, opt.rho_star).unwrap();
    let mut large = base_cfg(Scheme::Mcp, feedback, 1.0);
    large.alpha = alpha_from_rho(&large, opt.rho_star).unwrap();
    let ds = run_simulation(&small).unwrap().normalized_diff;
    let dl = run_simulation(&large).unwrap().normalized_diff;
    assert!(
        ds > dl,
        "diff should shrink with size: N=15 gives {ds:.4}, N=30 gives {dl:.4}"
    );
}
