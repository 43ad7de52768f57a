//! How the uplink power split behaves under analog feedback.
//!
//! Each user splits its feedback power between the direct and the cross
//! channel. This example sweeps the cross-channel gain and prints, for
//! every transmit scheme, the optimized split, the regularization, and
//! the limiting SINR, making the operating regimes visible: at weak
//! cross gain everything goes to the direct channel, past a threshold
//! the joint transmitter starts paying for cross-channel knowledge.
//!
//! Run with `cargo run --release --example analog_power_split`.

use twincell::analog::{cbf_optimize, mcp_epsilon_thresholds, mcp_optimize, scp_optimize, AnalogParams};

fn main() -> twincell::Result<()> {
    let base = AnalogParams::default();

    println!("load beta = {}, downlink SNR = {} (linear), uplink SNR = {}", base.beta, base.gamma_d, base.gamma_u);

    let th = mcp_epsilon_thresholds(&base)?;
    println!(
        "joint transmission keeps all feedback power on the direct channel up to eps = {:.4}",
        th.eps_scp_max
    );
    if let Some(dip) = th.eps_mcp_stationary {
        println!("its optimized limit is weakest near eps = {dip:.4}");
    }
    println!();

    println!(
        "{:>5}  {:>9} {:>7} {:>7} {:<14}  {:>9} {:>7}  {:>9} {:>7}",
        "eps", "mcp_sinr", "nu*", "rho*", "regime", "cbf_sinr", "nu*", "scp_sinr", "rho*"
    );
    let mut eps = 0.05;
    while eps <= 1.0 + 1e-9 {
        let p = AnalogParams { epsilon: eps, ..base };
        let mcp = mcp_optimize(&p)?;
        let cbf = cbf_optimize(&p)?;
        let scp = scp_optimize(&p)?;
        println!(
            "{:>5.2}  {:>9.5} {:>7.4} {:>7.4} {:<14}  {:>9.5} {:>7.4}  {:>9.5} {:>7.4}",
            eps,
            mcp.sinr_limit,
            mcp.nu_star,
            mcp.rho_star,
            mcp.regime.to_string(),
            cbf.sinr_limit,
            cbf.nu_star,
            scp.sinr_limit,
            scp.rho_star,
        );
        eps += 0.05;
    }

    Ok(())
}
