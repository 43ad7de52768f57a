//! Optimal feedback-bit allocation under random-codebook quantization.
//!
//! With a per-antenna budget of `bt_bar` bits a user decides how many to
//! spend on its direct channel and how many on the cross channel. The
//! joint transmitter switches from a direct-only allocation to a split one
//! as the cross gain grows; its limiting SINR dips at an intermediate
//! cross gain and recovers on both sides. The coordinated beamformer
//! starts splitting at a different, regularization-dependent threshold.
//!
//! Run with `cargo run --release --example bit_allocation`.

use twincell::digital::{
    cbf_eps_threshold, cbf_joint_opt, mcp_min_epsilon_q, mcp_optimize_q, scp_limiting_sinr_q,
    DigitalParams,
};

fn main() -> twincell::Result<()> {
    let base = DigitalParams::default();
    println!(
        "budget: {} bits per antenna, load beta = {}, downlink SNR = {}",
        base.bt_bar, base.beta, base.gamma_d
    );

    if let Some(dip) = mcp_min_epsilon_q(&base)? {
        println!("joint transmission is weakest near eps = {dip:.4}");
    }
    let th = cbf_eps_threshold(&base, 0.5)?;
    println!("coordinated beamforming splits bits above eps = {th:.4} at rho = 0.5");
    println!();

    println!(
        "{:>5}  {:>9} {:>6} {:>6} {:<11}  {:>9} {:>6} {:>6}  {:>9}",
        "eps", "mcp_sinr", "bd", "bc", "branch", "cbf_sinr", "bd", "bc", "scp_sinr"
    );
    let mut eps = 0.1;
    while eps <= 1.0 + 1e-9 {
        let p = DigitalParams { epsilon: eps, ..base };
        let mcp = mcp_optimize_q(&p)?;
        let cbf = cbf_joint_opt(&p)?;
        let scp = scp_limiting_sinr_q(&p)?;
        println!(
            "{:>5.2}  {:>9.5} {:>6.3} {:>6.3} {:<11}  {:>9.5} {:>6.3} {:>6.3}  {:>9.5}",
            eps,
            mcp.sinr_limit,
            mcp.bits.bd_bar,
            mcp.bits.bc_bar,
            mcp.branch.to_string(),
            cbf.sinr_limit,
            cbf.bits.bd_bar,
            cbf.bits.bc_bar,
            scp.sinr_limit,
        );
        eps += 0.1;
    }

    Ok(())
}
