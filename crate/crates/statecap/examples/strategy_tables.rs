//! Prints the canonical strategy enumerations and the channel one of them
//! induces.
//!
//! Run with: `cargo run --release --example strategy_tables`

use statecap::{generalized_erasure, induced_channel, sz_channel, StrategyTable};

fn print_table(table: &StrategyTable, obs_labels: &[&str]) {
    print!("  u \\ obs |");
    for label in obs_labels {
        print!(" {label:>3}");
    }
    println!();
    for u in 0..table.count() {
        print!("  u = {u:<3} |");
        for o in 0..table.s_tilde_size() {
            print!(" {:>3}", table.action(u, o));
        }
        println!();
    }
}

fn main() -> statecap::Result<()> {
    println!("binary input, observations {{0, 1, *}} (erased-state family):");
    let erased = StrategyTable::enumerate(2, 3)?;
    print_table(&erased, &["0", "1", "*"]);

    println!("\nbinary input, observations {{0, 1}} (symmetric family):");
    let plain = StrategyTable::enumerate(2, 2)?;
    print_table(&plain, &["0", "1"]);

    // The channel a strategy table induces: rows over strategies, joint
    // output (y, s) linearized y-major.
    let model = sz_channel(0.5)?;
    let side = generalized_erasure(0.4, 2)?;
    let w = induced_channel(&model, &side, &erased)?;
    println!("\ninduced strategy channel at erasure 0.4 (columns (y,s) y-major):");
    for u in 0..w.rows() {
        let row: Vec<String> = w.row(u).iter().map(|v| format!("{v:.4}")).collect();
        println!("  u = {u}: [{}]", row.join(", "));
    }
    Ok(())
}
