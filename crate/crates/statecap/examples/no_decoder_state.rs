//! When the decoder has no state information, a noisy encoder observation
//! keeps strictly helping at every erasure level below one: the additive
//! binary channel demonstrates it.
//!
//! Run with: `cargo run --release --example no_decoder_state`

use statecap::{capacity_no_decoder_csi, generalized_erasure, prop3_check, xor_channel};

fn main() -> statecap::Result<()> {
    let model = xor_channel(0.25)?;
    println!("additive channel Y = X xor S with p_S(1) = 1/4\n");
    println!("{:>8} {:>16} {:>16} {:>12}", "epsilon", "C~ (with obs)", "C~_lower", "gain");
    for k in 0..=10 {
        let eps = k as f64 / 10.0;
        let side = generalized_erasure(eps, 2)?;
        let (lower, with_obs) = capacity_no_decoder_csi(&model, &side)?;
        println!(
            "{eps:>8.2} {:>16.9} {:>16.9} {:>12.3e}",
            with_obs.value,
            lower.value,
            with_obs.value - lower.value
        );
    }
    println!(
        "\ninterior-collapse condition holds: {}",
        prop3_check(&model)?
    );
    println!("(false: the gain only vanishes at full erasure)");
    Ok(())
}
