//! Writes the CSV data behind the example figures: the erasure and symmetric
//! sweeps of the binary example and the two ternary boundary channels.
//!
//! Run with: `cargo run --release --example figure_sweeps [out_dir]`

use statecap::{figure_sweep, SweepOptions};

fn main() -> statecap::Result<()> {
    let out_dir = std::env::args().nth(1).unwrap_or_else(|| ".".to_string());
    let options = SweepOptions {
        grid: 101,
        ..Default::default()
    };
    for name in ["fig3", "fig4", "fig6", "fig7"] {
        let result = figure_sweep(name, &options)?;
        let path = format!("{out_dir}/{name}.csv");
        std::fs::write(&path, result.to_csv()).expect("writable output directory");
        let first = result.rows.first().expect("nonempty sweep");
        let last = result.rows.last().expect("nonempty sweep");
        println!(
            "{name}: {} rows -> {path}   C({}) = {:.9} ... C({}) = {:.9}",
            result.rows.len(),
            first.value,
            first.c_causal,
            last.value,
            last.c_causal
        );
    }
    Ok(())
}
