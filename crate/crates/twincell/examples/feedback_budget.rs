//! Analog versus quantized feedback under one uplink budget.
//!
//! Analog feedback occupies `2 * kappa * n` uplink symbols. The same
//! window can carry bits instead: at the uplink capacity, or at a fixed
//! modulation efficiency of `eta` bits per symbol. This example converts
//! the budget both ways and prints the limiting SINRs of all schemes
//! under both feedback models over the cross-gain axis, exposing where
//! quantized feedback wins and where analog recovers.
//!
//! Run with `cargo run --release --example feedback_budget`.

use twincell::experiments::{
    convert_budget, run_compare, BudgetConversion, CompareSpec, ConversionMode, SystemParams,
};

fn main() -> twincell::Result<()> {
    let fixed = SystemParams::default();

    for (label, conversion) in [
        (
            "uplink-capacity conversion",
            BudgetConversion {
                mode: ConversionMode::UplinkRate,
                kappa: 1.0,
                eta: 1.0,
            },
        ),
        (
            "one bit per symbol",
            BudgetConversion {
                mode: ConversionMode::Modulation,
                kappa: 1.0,
                eta: 1.0,
            },
        ),
    ] {
        let at_half = convert_budget(&conversion, 0.5, fixed.gamma_u())?;
        println!("{label}: {at_half:.3} bits per antenna at eps = 0.5");
        let spec = CompareSpec {
            start: 0.1,
            stop: 1.0,
            step: 0.1,
            fixed,
            conversion,
        };
        let table = run_compare(&spec)?;
        println!(
            "{:>5}  {:>7}  {:>9} {:>9}  {:>9} {:>9}  {:>9} {:>9}",
            "eps", "bits", "mcp_an", "mcp_rvq", "cbf_an", "cbf_rvq", "scp_an", "scp_rvq"
        );
        for row in &table.rows {
            println!(
                "{:>5.2}  {:>7.3}  {:>9.5} {:>9.5}  {:>9.5} {:>9.5}  {:>9.5} {:>9.5}",
                row.x,
                row.bt_bar,
                row.mcp_analog,
                row.mcp_rvq,
                row.cbf_analog,
                row.cbf_rvq,
                row.scp_analog,
                row.scp_rvq,
            );
        }
        println!();
    }

    Ok(())
}
