//! Where cooperation starts and stops paying off.
//!
//! Full joint transmission always dominates in the large-system limit,
//! but its margin over the cheaper schemes depends on the cross-channel
//! gain, and under a shared feedback budget the ordering between the
//! single-cell baseline and the coordinated beamformer flips twice. This
//! example locates those crossover gains by bisection on the limiting
//! SINRs and prints the surrounding landscape.
//!
//! Run with `cargo run --release --example scheme_crossover`.

use twincell::digital::{
    cbf_joint_opt, mcp_min_epsilon_q, mcp_optimize_q, scp_limiting_sinr_q, DigitalParams,
};

fn crossover(
    p: &DigitalParams,
    lo: f64,
    hi: f64,
    diff: impl Fn(&DigitalParams, f64) -> twincell::Result<f64>,
) -> twincell::Result<Option<f64>> {
    let (mut lo, mut hi) = (lo, hi);
    let (d_lo, d_hi) = (diff(p, lo)?, diff(p, hi)?);
    if d_lo.signum() == d_hi.signum() {
        return Ok(None);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if diff(p, mid)?.signum() == d_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

fn main() -> twincell::Result<()> {
    let p = DigitalParams::default();
    println!(
        "quantized feedback, {} bits per antenna, load beta = {}",
        p.bt_bar, p.beta
    );
    println!();

    let scp_vs_mcp = |p: &DigitalParams, eps: f64| -> twincell::Result<f64> {
        let q = DigitalParams { epsilon: eps, ..*p };
        // Margin of joint transmission over the single-cell baseline.
        Ok(mcp_optimize_q(&q)?.sinr_limit - scp_limiting_sinr_q(&q)?.sinr_limit)
    };
    let scp_vs_cbf = |p: &DigitalParams, eps: f64| -> twincell::Result<f64> {
        let q = DigitalParams { epsilon: eps, ..*p };
        Ok(cbf_joint_opt(&q)?.sinr_limit - scp_limiting_sinr_q(&q)?.sinr_limit)
    };

    // At weak cross gain the interference a cooperating transmitter could
    // remove is too small to be worth the feedback bits it has to divert,
    // so the baseline briefly leads before cooperation takes over.
    if let Some(e) = crossover(&p, 0.01, 0.5, scp_vs_mcp)? {
        println!("joint transmission overtakes the baseline at eps = {e:.4}");
    }
    if let Some(e) = crossover(&p, 0.5, 1.0, scp_vs_cbf)? {
        println!("coordinated beamforming falls behind the baseline at eps = {e:.4}");
    }
    if let Some(dip) = mcp_min_epsilon_q(&p)? {
        println!("joint transmission is weakest near eps = {dip:.4}");
    }
    println!();

    println!("{:>5}  {:>9} {:>9} {:>9}", "eps", "mcp", "cbf", "scp");
    let mut eps = 0.05;
    while eps <= 1.0 + 1e-9 {
        let q = DigitalParams { epsilon: eps, ..p };
        println!(
            "{:>5.2}  {:>9.5} {:>9.5} {:>9.5}",
            eps,
            mcp_optimize_q(&q)?.sinr_limit,
            cbf_joint_opt(&q)?.sinr_limit,
            scp_limiting_sinr_q(&q)?.sinr_limit,
        );
        eps += 0.05;
    }

    Ok(())
}
