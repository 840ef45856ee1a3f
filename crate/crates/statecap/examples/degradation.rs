//! Stochastic-degradation verdicts: the closed-form erasure margin, the LP
//! feasibility oracle with its witness, and the estimator channels.
//!
//! Run with: `cargo run --release --example degradation`

use statecap::{
    erasure_degradation_witness, erasure_margin, generalized_erasure, generalized_symmetric,
    ml_estimator, stochastic_degradation_lp, ProbVector,
};

fn main() -> statecap::Result<()> {
    let bsc = generalized_symmetric(0.2, 2)?;
    println!("erasure margin of a symmetric observation at 0.2: {}", erasure_margin(&bsc));

    for eps in [0.1, 0.4, 0.6] {
        let verdict = erasure_degradation_witness(&bsc, eps)?;
        println!("  vs erased-state level {eps}: degraded = {}", verdict.degraded);
        if let Some(witness) = &verdict.witness {
            println!("    witness residual {:.2e}, rows:", verdict.residual);
            for r in 0..witness.rows() {
                let row: Vec<String> =
                    witness.row(r).iter().map(|v| format!("{v:.6}")).collect();
                println!("    [{}]", row.join(", "));
            }
        }
    }

    // The general LP oracle on two erasure channels.
    let better = generalized_erasure(0.3, 2)?;
    let worse = generalized_erasure(0.7, 2)?;
    let verdict = stochastic_degradation_lp(&worse, &better)?;
    println!(
        "\nerased-state 0.7 from erased-state 0.3: degraded = {} (residual {:.2e})",
        verdict.degraded, verdict.residual
    );
    let verdict = stochastic_degradation_lp(&better, &worse)?;
    println!(
        "erased-state 0.3 from erased-state 0.7: degraded = {}",
        verdict.degraded
    );

    // Estimator channels fold the observation back onto the state alphabet.
    let est = ml_estimator(&generalized_erasure(0.25, 2)?);
    println!("\nlikelihood estimate through erased-state 0.25:");
    println!("  assignment (observation -> state): {:?}", est.assignment);
    println!(
        "  off-diagonal mass {:.6}, worst column ratio {:.6}",
        est.offdiagonal_mass(),
        est.offdiagonal_ratio()
    );
    let p_s = ProbVector::new(vec![0.5, 0.5])?;
    println!("  error probability: {:.6}", est.error_probability(&p_s));
    Ok(())
}
