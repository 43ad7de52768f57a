//! Is the asymptotic feedback allocation good at small sizes?
//!
//! The limiting formulas prescribe a power split (analog) or a bit split
//! (quantized) that is optimal as the system grows. This example runs an
//! exhaustive per-realization search over allocations at a small size and
//! measures how much sum rate the asymptotic prescription leaves on the
//! table. The answer: very little, already at ten antennas.
//!
//! Run with `cargo run --release --example finite_size_allocation`.

use twincell::analog::{cbf_optimize, mcp_optimize, AnalogParams};
use twincell::digital::{cbf_joint_opt, mcp_optimize_q, DigitalParams};
use twincell::sim::{
    alpha_from_rho, grid_search_feedback_fs, Feedback, RvqMode, Scheme, SimConfig,
};

fn main() -> twincell::Result<()> {
    let n = 10;
    let k = 6;
    let realizations = 100;
    let analog_p = AnalogParams::default();
    let digital_p = DigitalParams::default();

    println!("n = {n}, k = {k} per cell, {realizations} realizations");
    println!();
    println!(
        "{:<8} {:<8}  {:>10} {:>10} {:>8}",
        "scheme", "feedback", "search", "reference", "gap"
    );

    for scheme in [Scheme::Mcp, Scheme::Cbf] {
        // Analog: reference split from the asymptotic optimizer, searched
        // over a 41-point grid of splits per realization.
        let opt = match scheme {
            Scheme::Mcp => mcp_optimize(&analog_p)?,
            Scheme::Cbf => cbf_optimize(&analog_p)?,
            Scheme::Scp => unreachable!(),
        };
        let mut cfg = SimConfig {
            n_antennas: n,
            n_users_per_cell: k,
            epsilon: analog_p.epsilon,
            gamma_d: analog_p.gamma_d,
            scheme,
            feedback: Feedback::Analog {
                nu: opt.nu_star,
                gamma_u: analog_p.gamma_u,
                kappa: analog_p.kappa,
            },
            alpha: 1.0,
            n_realizations: realizations,
            seed: 99,
        };
        cfg.alpha = alpha_from_rho(&cfg, opt.rho_star)?;
        let found = grid_search_feedback_fs(&cfg, 41)?;
        println!(
            "{:<8} {:<8}  {:>10.4} {:>10.4} {:>7.2}%",
            scheme.to_string(),
            "analog",
            found.mean_best_sum_rate,
            found.mean_ref_sum_rate,
            100.0 * found.gap
        );

        // Quantized: reference split from the bit optimizer, searched over
        // every integer direct-bit count within the budget.
        let (bd_bar, rho) = match scheme {
            Scheme::Mcp => {
                let o = mcp_optimize_q(&digital_p)?;
                (o.bits.bd_bar, o.rho_star)
            }
            Scheme::Cbf => {
                let o = cbf_joint_opt(&digital_p)?;
                (o.bits.bd_bar, o.rho_star)
            }
            Scheme::Scp => unreachable!(),
        };
        let mut cfg = SimConfig {
            feedback: Feedback::Rvq {
                bd_bar,
                bc_bar: digital_p.bt_bar - bd_bar,
                mode: RvqMode::Statistical,
            },
            ..cfg
        };
        cfg.alpha = alpha_from_rho(&cfg, rho)?;
        let found = grid_search_feedback_fs(&cfg, 2)?;
        println!(
            "{:<8} {:<8}  {:>10.4} {:>10.4} {:>7.2}%",
            scheme.to_string(),
            "rvq",
            found.mean_best_sum_rate,
            found.mean_ref_sum_rate,
            100.0 * found.gap
        );
    }

    Ok(())
}
