//! Evaluates the sufficient conditions along a noise grid: where they start
//! holding and what the checked quantities are.
//!
//! Run with: `cargo run --release --example condition_checks`

use statecap::{generalized_erasure, generalized_symmetric, sz_channel, theorem_checks};

fn main() -> statecap::Result<()> {
    let model = sz_channel(0.5)?;

    println!("erased-state observations:");
    println!("{:>8}  {}", "epsilon", "conditions holding");
    for k in 0..=10 {
        let eps = k as f64 / 10.0;
        let side = generalized_erasure(eps, 2)?;
        let holding: Vec<&str> = theorem_checks(&model, &side)?
            .iter()
            .filter(|v| v.holds)
            .map(|v| v.key.label())
            .collect();
        println!("{eps:>8.2}  {}", holding.join(" "));
    }

    println!("\nsymmetric observations:");
    println!("{:>8}  {}", "q", "conditions holding");
    for k in 0..=10 {
        let q = k as f64 / 20.0;
        let side = generalized_symmetric(q, 2)?;
        let holding: Vec<&str> = theorem_checks(&model, &side)?
            .iter()
            .filter(|v| v.holds)
            .map(|v| v.key.label())
            .collect();
        println!("{q:>8.3}  {}", holding.join(" "));
    }

    println!("\nfull verdict detail at a symmetric observation of 0.01:");
    for v in theorem_checks(&model, &generalized_symmetric(0.01, 2)?)? {
        println!(
            "  {:<8} holds = {:<5}  lhs = {:.9}  rhs = {:.9}",
            v.key.label(),
            v.holds,
            v.lhs,
            v.rhs
        );
    }
    Ok(())
}
