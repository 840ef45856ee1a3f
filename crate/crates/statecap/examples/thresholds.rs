//! The four noise thresholds of the binary mirrored-Z family, with the
//! closed-form cross-checks.
//!
//! Run with: `cargo run --release --example thresholds`

use statecap::{
    overline_thresholds, sz_channel, sz_overline_closed_forms, sz_underline_roots,
    underline_epsilon, underline_q, BreakCase,
};

fn main() -> statecap::Result<()> {
    for &theta in &[0.2, 0.5, 0.8] {
        let model = sz_channel(theta)?;
        let (ue, breakpoints) = underline_epsilon(&model, 1e-10)?;
        let (uq, _) = underline_q(&model, 1e-10)?;
        let ov = overline_thresholds(&model)?;
        let (eps_root, q_root) = sz_underline_roots(theta, 1e-12)?;
        let (ov_eps_closed, ov_q_closed, _) = sz_overline_closed_forms(theta)?;

        println!("theta = {theta}");
        println!("  collapse:  epsilon >= {ue:.9} (root {eps_root:.9}), q >= {uq:.9} (root {q_root:.9})");
        println!(
            "  plateau:   epsilon <= {:.9} (closed {:.9}), q <= {:.9} (closed {:.9})",
            ov.epsilon, ov_eps_closed, ov.q, ov_q_closed
        );
        let interior: Vec<usize> = breakpoints
            .iter()
            .enumerate()
            .filter(|(_, b)| b.case == BreakCase::InteriorRoot)
            .map(|(u, _)| u)
            .collect();
        println!("  strategies with interior breakpoints: {interior:?}\n");
    }
    Ok(())
}
