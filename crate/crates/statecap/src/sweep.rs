//! Parameter sweeps over the one-parameter side-channel families, with CSV
//! emission for the named example figures.

use crate::capacity::{
    capacity_causal_with, capacity_full_csi_with, capacity_no_csi_with,
    capacity_no_decoder_csi_with, DEFAULT_MAX_ITER,
};
use crate::channel::{
    generalized_erasure, generalized_symmetric, sz_channel, ternary_no_collapse_channel,
    ternary_no_plateau_channel, xor_channel, SideChannel, StateChannelModel,
};
use crate::error::{Error, Result};
use crate::gp::capacity_gp;
use crate::probing::capacity_probing;
use rayon::prelude::*;

/// Which one-parameter family a sweep walks over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepFamily {
    Erasure,
    Symmetric,
}

impl SweepFamily {
    pub fn param_name(self) -> &'static str {
        match self {
            SweepFamily::Erasure => "epsilon",
            SweepFamily::Symmetric => "q",
        }
    }

    fn side(self, value: f64, s_size: usize) -> Result<SideChannel> {
        match self {
            SweepFamily::Erasure => generalized_erasure(value, s_size),
            SweepFamily::Symmetric => generalized_symmetric(value, s_size),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub grid: usize,
    pub tol: f64,
    pub seed: u64,
    /// Include the noncausal lower/upper bounds (slow path).
    pub gp_restarts: Option<usize>,
    /// Include the no-decoder-state capacities.
    pub tilde: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            grid: 101,
            tol: 1e-9,
            seed: 0,
            gp_restarts: None,
            tilde: false,
        }
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub c_lower: f64,
    pub c_causal: f64,
    pub c_probing: f64,
    pub c_upper: f64,
    pub c_gp: Option<(f64, f64)>,
    pub c_tilde: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub param: &'static str,
    pub rows: Vec<SweepRow>,
}

fn format_sig(v: f64) -> String {
    // Twelve significant digits, scientific; byte-stable across runs.
    format!("{v:.11e}")
}

impl SweepResult {
    /// CSV with the fixed column layout; optional column groups appear only
    /// when present in every row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("param,value,C_lower,C_causal,C_probing,C_upper");
        let has_gp = self.rows.iter().all(|r| r.c_gp.is_some());
        let has_tilde = self.rows.iter().all(|r| r.c_tilde.is_some());
        if has_gp {
            out.push_str(",C_gp_lb,C_gp_ub");
        }
        if has_tilde {
            out.push_str(",C_tilde_lower,C_tilde");
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}",
                self.param,
                format_sig(row.value),
                format_sig(row.c_lower),
                format_sig(row.c_causal),
                format_sig(row.c_probing),
                format_sig(row.c_upper),
            ));
            if has_gp {
                let (lb, ub) = row.c_gp.expect("checked above");
                out.push_str(&format!(",{},{}", format_sig(lb), format_sig(ub)));
            }
            if has_tilde {
                let (lo, c) = row.c_tilde.expect("checked above");
                out.push_str(&format!(",{},{}", format_sig(lo), format_sig(c)));
            }
            out.push('\n');
        }
        out
    }
}

/// Sweeps the family parameter over `[lo, hi]` on a uniform grid.
///
/// Grid points run concurrently; rows are assembled in grid order. Every row
/// is checked against the capacity chain, and the causal column against
/// monotonicity in the noise parameter; violations abort with diagnostics.
pub fn sweep(
    model: &StateChannelModel,
    family: SweepFamily,
    lo: f64,
    hi: f64,
    options: &SweepOptions,
) -> Result<SweepResult> {
    if options.grid < 2 {
        return Err(Error::OutOfRange {
            name: "grid",
            value: options.grid as f64,
            lo: 2.0,
            hi: f64::INFINITY,
        });
    }
    let tol = options.tol;
    let c_lower = capacity_no_csi_with(model, tol, DEFAULT_MAX_ITER).value;
    let c_upper = capacity_full_csi_with(model, tol, DEFAULT_MAX_ITER).value;

    let rows: Result<Vec<SweepRow>> = (0..options.grid)
        .into_par_iter()
        .map(|k| {
            let value = lo + (hi - lo) * k as f64 / (options.grid - 1) as f64;
            let side = family.side(value, model.s_size())?;
            let causal = capacity_causal_with(model, &side, tol, DEFAULT_MAX_ITER)?;
            if !causal.converged {
                return Err(Error::NonConvergence {
                    max_iter: DEFAULT_MAX_ITER,
                    gap: causal.gap_bound,
                });
            }
            let probing = capacity_probing(model, &side, tol)?;
            if !probing.converged {
                return Err(Error::NonConvergence {
                    max_iter: probing.iterations,
                    gap: probing.gap_bound,
                });
            }
            let c_gp = match options.gp_restarts {
                Some(restarts) => {
                    let gp = capacity_gp(model, &side, restarts, options.seed)?;
                    Some((gp.lower_bound, gp.upper_bound))
                }
                None => None,
            };
            let c_tilde = if options.tilde {
                let (lower, causal) =
                    capacity_no_decoder_csi_with(model, &side, tol, DEFAULT_MAX_ITER)?;
                Some((lower.value, causal.value))
            } else {
                None
            };
            Ok(SweepRow {
                value,
                c_lower,
                c_causal: causal.value,
                c_probing: probing.value,
                c_upper,
                c_gp,
                c_tilde,
            })
        })
        .collect();
    let rows = rows?;

    for row in &rows {
        let chain_ok = c_lower - 2.0 * tol <= row.c_causal
            && row.c_causal <= row.c_probing + 2.0 * tol
            && row.c_probing <= c_upper + 4.0 * tol;
        if !chain_ok {
            return Err(Error::Inconsistency(format!(
                "capacity chain violated at {} = {}: {} <= {} <= {} <= {}",
                family.param_name(),
                row.value,
                c_lower,
                row.c_causal,
                row.c_probing,
                c_upper
            )));
        }
    }
    for pair in rows.windows(2) {
        if pair[1].c_causal > pair[0].c_causal + 2.0 * tol {
            return Err(Error::Inconsistency(format!(
                "causal capacity increased along the noise grid at {} = {}",
                family.param_name(),
                pair[1].value
            )));
        }
    }

    Ok(SweepResult {
        param: family.param_name(),
        rows,
    })
}

/// Named sweeps reproducing the example figures.
///
/// - `fig3`: binary example at theta 1/2, erasure family on `[0, 1]`.
/// - `fig4`: same model, symmetric family on `[0, 1/2]`.
/// - `fig6`: ternary no-collapse example, erasure family.
/// - `fig7`: ternary no-plateau example, symmetric family.
/// - `fig8`: additive example at mu 1/4, erasure family, with the
///   no-decoder-state columns.
/// - `fig9`: binary example with the noncausal bounds (21 points, 32
///   restarts by default).
pub fn figure_sweep(name: &str, options: &SweepOptions) -> Result<SweepResult> {
    let mut options = options.clone();
    match name {
        "fig3" => sweep(
            &sz_channel(0.5)?,
            SweepFamily::Erasure,
            0.0,
            1.0,
            &options,
        ),
        "fig4" => sweep(
            &sz_channel(0.5)?,
            SweepFamily::Symmetric,
            0.0,
            0.5,
            &options,
        ),
        "fig6" => sweep(
            &ternary_no_collapse_channel(),
            SweepFamily::Erasure,
            0.0,
            1.0,
            &options,
        ),
        "fig7" => sweep(
            &ternary_no_plateau_channel(),
            SweepFamily::Symmetric,
            0.0,
            0.5,
            &options,
        ),
        "fig8" => {
            options.tilde = true;
            sweep(&xor_channel(0.25)?, SweepFamily::Erasure, 0.0, 1.0, &options)
        }
        "fig9" => {
            if options.gp_restarts.is_none() {
                options.gp_restarts = Some(32);
            }
            if options.grid == 101 {
                options.grid = 21;
            }
            sweep(&sz_channel(0.5)?, SweepFamily::Erasure, 0.0, 1.0, &options)
        }
        other => Err(Error::Parse {
            line: 0,
            message: format!("unknown figure '{other}'"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_chain_and_endpoints() {
        let model = sz_channel(0.5).unwrap();
        let options = SweepOptions {
            grid: 5,
            ..Default::default()
        };
        let result = sweep(&model, SweepFamily::Erasure, 0.0, 1.0, &options).unwrap();
        assert_eq!(result.rows.len(), 5);
        let first = &result.rows[0];
        let last = &result.rows[4];
        assert!((first.c_causal - 0.22314355131420976).abs() < 2e-9);
        assert!((last.c_causal - 0.2157615543388357).abs() < 2e-9);
    }

    #[test]
    fn csv_layout_and_stability() {
        let model = sz_channel(0.3).unwrap();
        let options = SweepOptions {
            grid: 3,
            ..Default::default()
        };
        let result = sweep(&model, SweepFamily::Symmetric, 0.0, 0.5, &options).unwrap();
        let csv = result.to_csv();
        assert!(csv.starts_with("param,value,C_lower,C_causal,C_probing,C_upper\n"));
        assert_eq!(csv.lines().count(), 4);
        assert!(!csv.contains('\r'));
        let again = sweep(&model, SweepFamily::Symmetric, 0.0, 0.5, &options)
            .unwrap()
            .to_csv();
        assert_eq!(csv, again);
    }

    #[test]
    fn unknown_figure_is_an_error() {
        assert!(figure_sweep("fig5", &SweepOptions::default()).is_err());
    }
}
