//! Finite-size Monte Carlo against the large-system limits.
//!
//! For every scheme and feedback model this example optimizes the
//! allocation and regularization with the asymptotic formulas, simulates
//! a finite system operating at exactly that point, and reports the
//! normalized gap between the simulated per-antenna sum rate and its
//! large-system prediction. The gap shrinks roughly like 1/N.
//!
//! Run with `cargo run --release --example monte_carlo_check`.

use twincell::analog::{cbf_optimize, mcp_optimize, scp_optimize};
use twincell::digital::{cbf_joint_opt, mcp_optimize_q, scp_limiting_sinr_q};
use twincell::experiments::SystemParams;
use twincell::sim::{alpha_from_rho, run_simulation, Feedback, RvqMode, Scheme, SimConfig};

fn main() -> twincell::Result<()> {
    let sys = SystemParams::default();
    let n = 30;
    let k = (sys.beta * n as f64).round() as usize;
    let realizations = 400;

    println!(
        "n = {n} antennas, k = {k} users per cell, {realizations} realizations, eps = {}",
        sys.epsilon
    );
    println!();
    println!(
        "{:<8} {:<8}  {:>10} {:>10} {:>10}",
        "scheme", "feedback", "sim_sinr", "limit", "rate_gap"
    );

    let analog = |sys: &SystemParams| -> twincell::Result<Vec<(Scheme, Feedback, f64)>> {
        let p = twincell::analog::AnalogParams {
            beta: sys.beta,
            epsilon: sys.epsilon,
            gamma_d: sys.gamma_d(),
            gamma_u: sys.gamma_u(),
            kappa: sys.kappa,
        };
        let mk = |nu: f64| Feedback::Analog {
            nu,
            gamma_u: sys.gamma_u(),
            kappa: sys.kappa,
        };
        Ok(vec![
            (Scheme::Mcp, mk(mcp_optimize(&p)?.nu_star), mcp_optimize(&p)?.rho_star),
            (Scheme::Cbf, mk(cbf_optimize(&p)?.nu_star), cbf_optimize(&p)?.rho_star),
            (Scheme::Scp, mk(1.0), scp_optimize(&p)?.rho_star),
        ])
    };

    let quantized = |sys: &SystemParams| -> twincell::Result<Vec<(Scheme, Feedback, f64)>> {
        let p = twincell::digital::DigitalParams {
            beta: sys.beta,
            epsilon: sys.epsilon,
            gamma_d: sys.gamma_d(),
            bt_bar: sys.bt_bar,
        };
        let mk = |bd: f64| Feedback::Rvq {
            bd_bar: bd,
            bc_bar: sys.bt_bar - bd,
            mode: RvqMode::Statistical,
        };
        let mcp = mcp_optimize_q(&p)?;
        let cbf = cbf_joint_opt(&p)?;
        let scp = scp_limiting_sinr_q(&p)?;
        Ok(vec![
            (Scheme::Mcp, mk(mcp.bits.bd_bar), mcp.rho_star),
            (Scheme::Cbf, mk(cbf.bits.bd_bar), cbf.rho_star),
            (Scheme::Scp, mk(sys.bt_bar), scp.rho_star),
        ])
    };

    for (label, points) in [("analog", analog(&sys)?), ("rvq", quantized(&sys)?)] {
        for (scheme, feedback, rho) in points {
            let mut cfg = SimConfig {
                n_antennas: n,
                n_users_per_cell: k,
                epsilon: sys.epsilon,
                gamma_d: sys.gamma_d(),
                scheme,
                feedback,
                alpha: 1.0,
                n_realizations: realizations,
                seed: 17,
            };
            cfg.alpha = alpha_from_rho(&cfg, rho)?;
            let out = run_simulation(&cfg)?;
            println!(
                "{:<8} {:<8}  {:>10.5} {:>10.5} {:>9.2}%",
                scheme.to_string(),
                label,
                out.mean_sinr,
                out.limit_sinr,
                100.0 * out.normalized_diff
            );
        }
    }

    Ok(())
}
