//! Command-line front end: capacity queries, figure-data sweeps, threshold
//! reports, condition checks, and degradation verdicts.

use clap::{Args, Parser, Subcommand};
use statecap::{
    capacity_causal, capacity_full_csi, capacity_gp, capacity_no_csi, capacity_no_decoder_csi,
    capacity_probing, figure_sweep, nats_to_bits, parse_spec, stochastic_degradation_lp, sweep,
    threshold_report, BreakCase, Error, SideChannel, StateChannelModel, SweepFamily,
    SweepOptions,
};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_PARSE: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;
const EXIT_ASSERT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "statecap",
    about = "Capacities and noise thresholds of channels with state and noisy encoder observations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Solver tolerance (sandwich gap in nats).
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for the randomized solvers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also print values converted to bits.
    #[arg(long)]
    bits: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print all applicable capacities for a channel spec file.
    Capacity {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Also compute the noncausal lower/upper bounds.
        #[arg(long)]
        gp: bool,
        /// Restarts for the noncausal ascent.
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Sweep a noise parameter and emit CSV (named figure or custom spec).
    Sweep {
        /// fig3 | fig4 | fig6 | fig7 | fig8 | fig9 | custom
        figure: String,
        #[command(flatten)]
        common: Common,
        /// Channel spec file (custom sweeps).
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Family for custom sweeps: erasure | symmetric.
        #[arg(long)]
        family: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long)]
        hi: Option<f64>,
        /// Grid size (number of points).
        #[arg(long, default_value_t = 101)]
        grid: usize,
        /// Include the noncausal columns.
        #[arg(long)]
        gp: bool,
        /// Include the no-decoder-state columns.
        #[arg(long)]
        tilde: bool,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Collapse/plateau thresholds and per-strategy breakpoints.
    Thresholds {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the sufficient/necessary conditions for a spec (side channel
    /// required for the observation-dependent ones).
    Check {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Exit nonzero when any verdict is false.
        #[arg(long)]
        assert: bool,
    },
    /// Decide whether TARGET is a stochastically degraded version of SOURCE.
    Degrade {
        /// Spec file with a side channel, or bec:E | bsc:Q | ge:E:S | gs:Q:S.
        target: String,
        source: String,
        /// Exit nonzero when not degraded.
        #[arg(long)]
        assert: bool,
    },
}

fn load_spec(path: &PathBuf) -> Result<(StateChannelModel, Option<SideChannel>), Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        message: format!("{}: {e}", path.display()),
    })?;
    parse_spec(&text)
}

/// Side channels for the degrade subcommand: either a spec file carrying a
/// side section, or an inline family form.
fn load_side(arg: &str) -> Result<SideChannel, Error> {
    let parts: Vec<&str> = arg.split(':').collect();
    let parse_val = |s: &str| -> Result<f64, Error> {
        s.parse().map_err(|_| Error::Parse {
            line: 0,
            message: format!("bad parameter '{s}' in '{arg}'"),
        })
    };
    let parse_size = |s: &str| -> Result<usize, Error> {
        s.parse().map_err(|_| Error::Parse {
            line: 0,
            message: format!("bad alphabet size '{s}' in '{arg}'"),
        })
    };
    match parts.as_slice() {
        ["bec", v] => statecap::generalized_erasure(parse_val(v)?, 2),
        ["bsc", v] => statecap::generalized_symmetric(parse_val(v)?, 2),
        ["ge", v, n] => statecap::generalized_erasure(parse_val(v)?, parse_size(n)?),
        ["gs", v, n] => statecap::generalized_symmetric(parse_val(v)?, parse_size(n)?),
        _ => {
            let (_, side) = load_spec(&PathBuf::from(arg))?;
            side.ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("{arg}: spec has no side channel"),
            })
        }
    }
}

fn print_value(label: &str, nats: f64, bits: bool) {
    if bits {
        println!("{label} = {nats:.12} nats ({:.12} bits)", nats_to_bits(nats));
    } else {
        println!("{label} = {nats:.12} nats");
    }
}

fn run_capacity(
    spec: PathBuf,
    common: Common,
    gp: bool,
    restarts: usize,
) -> Result<u8, Error> {
    let (model, side) = load_spec(&spec)?;
    let mut nonconverged = false;

    let lower = capacity_no_csi(&model);
    nonconverged |= !lower.converged;
    print_value("C_lower  (no side info)", lower.value, common.bits);
    let upper = capacity_full_csi(&model);
    nonconverged |= !upper.converged;
    print_value("C_upper  (perfect side info)", upper.value, common.bits);

    if let Some(side) = side {
        let causal = capacity_causal(&model, &side)?;
        nonconverged |= !causal.converged;
        print_value("C_causal (noisy causal)", causal.value, common.bits);
        println!(
            "  iterations = {}, gap_bound = {:.3e}, converged = {}",
            causal.iterations, causal.gap_bound, causal.converged
        );
        let probing = capacity_probing(&model, &side, common.tol)?;
        nonconverged |= !probing.converged;
        print_value("C_probing", probing.value, common.bits);
        println!(
            "  iterations = {}, gap_bound = {:.3e}, converged = {}",
            probing.iterations, probing.gap_bound, probing.converged
        );
        let (tilde_lower, tilde) = capacity_no_decoder_csi(&model, &side)?;
        print_value("C_tilde_lower (no decoder state)", tilde_lower.value, common.bits);
        print_value("C_tilde  (no decoder state)", tilde.value, common.bits);
        if gp {
            let sol = capacity_gp(&model, &side, restarts, common.seed)?;
            print_value("C_gp lower bound", sol.lower_bound, common.bits);
            print_value("C_gp upper bound", sol.upper_bound, common.bits);
        }
    } else {
        println!("(no side channel in spec: skipping C_causal, C_probing)");
    }
    Ok(if nonconverged { EXIT_NONCONVERGENCE } else { 0 })
}

#[allow(clippy::too_many_arguments)]
fn run_sweep(
    figure: String,
    common: Common,
    spec: Option<PathBuf>,
    family: Option<String>,
    lo: f64,
    hi: Option<f64>,
    grid: usize,
    gp: bool,
    tilde: bool,
    restarts: usize,
    out: Option<PathBuf>,
) -> Result<u8, Error> {
    let mut options = SweepOptions {
        grid,
        tol: common.tol,
        seed: common.seed,
        gp_restarts: if gp { Some(restarts) } else { None },
        tilde,
    };
    let result = if figure == "custom" {
        let spec = spec.ok_or_else(|| Error::Parse {
            line: 0,
            message: "custom sweeps need --spec".to_string(),
        })?;
        let (model, _) = load_spec(&spec)?;
        let family = match family.as_deref() {
            Some("erasure") | None => SweepFamily::Erasure,
            Some("symmetric") => SweepFamily::Symmetric,
            Some(other) => {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("unknown family '{other}'"),
                })
            }
        };
        let hi = hi.unwrap_or(match family {
            SweepFamily::Erasure => 1.0,
            SweepFamily::Symmetric => 1.0 / model.s_size() as f64,
        });
        sweep(&model, family, lo, hi, &options)?
    } else {
        if figure == "fig9" && !gp {
            options.gp_restarts = Some(restarts);
        }
        figure_sweep(&figure, &options)?
    };
    let csv = result.to_csv();
    match out {
        Some(path) => std::fs::write(&path, csv).map_err(|e| Error::Parse {
            line: 0,
            message: format!("{}: {e}", path.display()),
        })?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn run_thresholds(spec: PathBuf, common: Common) -> Result<u8, Error> {
    let (model, side) = load_spec(&spec)?;
    // Breakpoints never run looser than their design tolerance.
    let report = threshold_report(&model, side.as_ref(), common.tol.min(1e-10))?;
    println!("C_lower = {:.12}", report.c_lower);
    println!("C_upper = {:.12}", report.c_upper);
    println!("underline_epsilon = {:.12}", report.underline_epsilon);
    println!("underline_q       = {:.12}", report.underline_q);
    let approx = if report.overline_approximate {
        "  (lower bound: non-unique per-state maximizers)"
    } else {
        ""
    };
    println!("overline_epsilon  = {:.12}{approx}", report.overline_epsilon);
    println!("overline_q        = {:.12}{approx}", report.overline_q);
    println!();
    println!("per-strategy breakpoints (erasure family):");
    for (u, b) in report.epsilon_breakpoints.iter().enumerate() {
        println!("  u={u:3}  epsilon(u) = {:.10}  [{}]", b.value, case_name(b.case));
    }
    println!("per-strategy breakpoints (symmetric family):");
    for (u, b) in report.q_breakpoints.iter().enumerate() {
        println!("  u={u:3}  q(u) = {:.10}  [{}]", b.value, case_name(b.case));
    }
    println!();
    for v in &report.verdicts {
        println!(
            "verdict,{},{},{:.12e},{:.12e}",
            v.key.label(),
            v.holds,
            v.lhs,
            v.rhs
        );
    }
    Ok(0)
}

fn case_name(case: BreakCase) -> &'static str {
    match case {
        BreakCase::BelowEverywhere => "below-everywhere",
        BreakCase::StuckAtOne => "stuck-at-one",
        BreakCase::InteriorRoot => "interior-root",
    }
}

fn run_check(spec: PathBuf, common: Common, assert: bool) -> Result<u8, Error> {
    let (model, side) = load_spec(&spec)?;
    let verdicts = match side.as_ref() {
        Some(side) => statecap::theorem_checks(&model, side)?,
        None => statecap::proposition_checks(&model)?,
    };
    println!("{:<8} {:<6} {:>18} {:>18}", "key", "holds", "lhs", "rhs");
    for v in &verdicts {
        println!(
            "{:<8} {:<6} {:>18.12} {:>18.12}",
            v.key.label(),
            v.holds,
            v.lhs,
            v.rhs
        );
    }
    for v in &verdicts {
        println!(
            "verdict,{},{},{:.12e},{:.12e}",
            v.key.label(),
            v.holds,
            v.lhs,
            v.rhs
        );
    }
    let _ = common;
    if assert && verdicts.iter().any(|v| !v.holds) {
        return Ok(EXIT_ASSERT);
    }
    Ok(0)
}

fn run_degrade(target: String, source: String, assert: bool) -> Result<u8, Error> {
    let target_side = load_side(&target)?;
    let source_side = load_side(&source)?;
    let verdict = stochastic_degradation_lp(&target_side, &source_side)?;
    println!("degraded = {}", verdict.degraded);
    println!("residual = {:.3e}", verdict.residual);
    if verdict.indeterminate {
        println!("warning: residual in the indeterminate band; reported as not degraded");
    }
    if let Some(witness) = &verdict.witness {
        println!("witness (rows = source observations):");
        for r in 0..witness.rows() {
            let row: Vec<String> = witness.row(r).iter().map(|v| format!("{v:.9}")).collect();
            println!("  [{}]", row.join(", "));
        }
    }
    if assert && !verdict.degraded {
        return Ok(EXIT_ASSERT);
    }
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Capacity {
            spec,
            common,
            gp,
            restarts,
        } => run_capacity(spec, common, gp, restarts),
        Command::Sweep {
            figure,
            common,
            spec,
            family,
            lo,
            hi,
            grid,
            gp,
            tilde,
            restarts,
            out,
        } => run_sweep(
            figure, common, spec, family, lo, hi, grid, gp, tilde, restarts, out,
        ),
        Command::Thresholds { spec, common } => run_thresholds(spec, common),
        Command::Check {
            spec,
            common,
            assert,
        } => run_check(spec, common, assert),
        Command::Degrade {
            target,
            source,
            assert,
        } => run_degrade(target, source, assert),
    }
}

fn main() -> ExitCode {
    // Die quietly when a pipeline consumer closes stdout early.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Parse { .. }
                | Error::NotNormalized { .. }
                | Error::NegativeEntry { .. }
                | Error::ZeroStateProbability { .. }
                | Error::OutOfRange { .. }
                | Error::DimensionMismatch { .. } => EXIT_PARSE,
                Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
