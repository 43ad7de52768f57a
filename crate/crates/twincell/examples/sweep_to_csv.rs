//! Driving the sweep engine from code and inspecting its table.
//!
//! The command-line binary is a thin wrapper over [`run_sweep`]; this
//! example builds the same sweep in code, attaches a small Monte Carlo
//! cross-check to every grid point, and walks the resulting rows. Use
//! this as the starting point for custom post-processing that the CSV
//! output would make awkward.
//!
//! Run with `cargo run --release --example sweep_to_csv`.

use twincell::experiments::{
    run_sweep, FeedbackKind, McSettings, SweepSpec, SweepVariable, SystemParams,
};

fn main() -> twincell::Result<()> {
    let spec = SweepSpec {
        variable: SweepVariable::BtBar,
        start: 1.0,
        stop: 8.0,
        step: 1.0,
        fixed: SystemParams::default(),
        feedback: FeedbackKind::Rvq,
        mc: Some(McSettings {
            n_antennas: 12,
            n_realizations: 50,
            seed: 7,
        }),
    };
    let table = run_sweep(&spec)?;

    println!(
        "{:>5}  {:>9} {:>9} {:>8}  {:>9} {:>9} {:>8}",
        "bits", "mcp", "mcp_sim", "gap", "cbf", "cbf_sim", "gap"
    );
    for row in &table.rows {
        println!(
            "{:>5.1}  {:>9.5} {:>9.5} {:>7.2}%  {:>9.5} {:>9.5} {:>7.2}%",
            row.x,
            row.mcp.sinr,
            row.mcp.mc_sinr.unwrap_or(f64::NAN),
            100.0 * row.mcp.mc_diff.unwrap_or(f64::NAN),
            row.cbf.sinr,
            row.cbf.mc_sinr.unwrap_or(f64::NAN),
            100.0 * row.cbf.mc_diff.unwrap_or(f64::NAN),
        );
    }
    for f in &table.failures {
        eprintln!("point {} failed: {}", f.x, f.message);
    }

    Ok(())
}
