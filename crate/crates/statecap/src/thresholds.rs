//! Collapse and plateau thresholds, and the condition checks behind them.
//!
//! For the one-parameter erasure and symmetric side-channel families the
//! causal capacity collapses to the no-side-information value at a finite
//! noise level, and the probing capacity keeps the perfect-side-information
//! value up to a finite noise level. The collapse threshold is the largest
//! per-strategy breakpoint of a family of convex divergence curves; the
//! plateau thresholds have closed forms in the maximizer set of the
//! perfect-side-information problem.

use crate::capacity::{capacity_no_csi_with, per_state_optima, PerStateOptima};
use crate::channel::{SideChannel, StateChannelModel};
use crate::degrade::{
    conditional_state_entropy, ml_cover_threshold, SUPPORT_TOL,
};
use crate::error::{Error, Result};
use crate::prob::{entropy, xlnx, ProbVector, StochasticMatrix};
use crate::strategy::{
    perturbation_tables, PerturbationFamily, PerturbationTables, StrategyTable,
};

/// Tolerance for equality against the no-side-information capacity when
/// classifying divergence curves; it must dominate the solver's gap bound.
pub const EQUALITY_TOL: f64 = 1e-8;

/// Strictness margin for the positivity conditions of the collapse checks.
pub const STRICTNESS_TOL: f64 = 1e-8;

/// Default bisection tolerance on the breakpoint parameter.
pub const BREAKPOINT_TOL: f64 = 1e-10;

/// How a single strategy's divergence curve meets the no-side-information
/// capacity over the family parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BreakCase {
    /// The curve never exceeds the capacity; breakpoint 0.
    BelowEverywhere,
    /// The curve stays above the capacity on the whole open interval and
    /// only touches at the right endpoint (needs more than two inputs).
    StuckAtOne,
    /// The curve crosses the capacity at a unique interior point.
    InteriorRoot,
}

/// Per-strategy breakpoint: the smallest parameter from which the curve
/// stays at or below the no-side-information capacity.
#[derive(Debug, Clone, Copy)]
pub struct Breakpoint {
    pub value: f64,
    pub case: BreakCase,
}

fn check_erasure_args(
    model: &StateChannelModel,
    strategies: &StrategyTable,
    p_x_hat: &ProbVector,
) -> Result<()> {
    if strategies.s_tilde_size() != model.s_size() + 1 || strategies.x_size() != model.x_size() {
        return Err(Error::DimensionMismatch {
            context: "erasure divergence strategies",
            expected: model.s_size() + 1,
            got: strategies.s_tilde_size(),
        });
    }
    if p_x_hat.dim() != model.x_size() {
        return Err(Error::DimensionMismatch {
            context: "erasure divergence input",
            expected: model.x_size(),
            got: p_x_hat.dim(),
        });
    }
    Ok(())
}

fn check_symmetric_args(
    model: &StateChannelModel,
    strategies: &StrategyTable,
    p_x_hat: &ProbVector,
) -> Result<()> {
    if strategies.s_tilde_size() != model.s_size() || strategies.x_size() != model.x_size() {
        return Err(Error::DimensionMismatch {
            context: "symmetric divergence strategies",
            expected: model.s_size(),
            got: strategies.s_tilde_size(),
        });
    }
    if p_x_hat.dim() != model.x_size() {
        return Err(Error::DimensionMismatch {
            context: "symmetric divergence input",
            expected: model.x_size(),
            got: p_x_hat.dim(),
        });
    }
    Ok(())
}

fn mixture_output(model: &StateChannelModel, p_x_hat: &ProbVector, y: usize, s: usize) -> f64 {
    (0..model.x_size())
        .map(|x| p_x_hat.get(x) * model.transition(y, x, s))
        .sum()
}

/// Divergence of strategy `u`'s induced row from the no-side-information
/// output distribution, under the erasure family at parameter `epsilon`.
///
/// The perturbed row entry is the convex combination
/// `(1 - eps) p(y|psi(u,s),s) + eps p(y|psi(u,*),s)`, so it is a probability
/// for every `eps` in `[0, 1]`.
pub fn erasure_divergence(
    model: &StateChannelModel,
    strategies: &StrategyTable,
    p_x_hat: &ProbVector,
    epsilon: f64,
    u: usize,
) -> Result<f64> {
    check_erasure_args(model, strategies, p_x_hat)?;
    let star = model.s_size();
    let mut total = 0.0;
    for s in 0..model.s_size() {
        let ps = model.state_dist().get(s);
        for y in 0..model.y_size() {
            let own = model.transition(y, strategies.action(u, s), s);
            let erased = model.transition(y, strategies.action(u, star), s);
            let n = (1.0 - epsilon) * own + epsilon * erased;
            if n > 0.0 {
                let den = mixture_output(model, p_x_hat, y, s);
                if den <= 0.0 {
                    return Err(Error::Inconsistency(format!(
                        "output (y={y}, s={s}) has positive strategy mass but zero mixture mass"
                    )));
                }
                total += ps * n * (n / den).ln();
            }
        }
    }
    Ok(total)
}

/// Derivative of [`erasure_divergence`] in the parameter. May be infinite at
/// the endpoints when a perturbed entry vanishes there.
pub fn erasure_divergence_derivative(
    model: &StateChannelModel,
    strategies: &StrategyTable,
    p_x_hat: &ProbVector,
    epsilon: f64,
    u: usize,
) -> Result<f64> {
    check_erasure_args(model, strategies, p_x_hat)?;
    let star = model.s_size();
    let mut total = 0.0;
    for s in 0..model.s_size() {
        let ps = model.state_dist().get(s);
        for y in 0..model.y_size() {
            let own = model.transition(y, strategies.action(u, s), s);
            let erased = model.transition(y, strategies.action(u, star), s);
            let delta = erased - own;
            if delta == 0.0 {
                continue;
            }
            let n = (1.0 - epsilon) * own + epsilon * erased;
            let den = mixture_output(model, p_x_hat, y, s);
            if den <= 0.0 {
                return Err(Error::Inconsistency(format!(
                    "output (y={y}, s={s}) has perturbed mass but zero mixture mass"
                )));
            }
            total += ps * delta * (n / den).ln();
        }
    }
    Ok(total)
}

/// Divergence of strategy `u`'s induced row under the symmetric family at
/// crossover `q` in `[0, 1/|S|]`.
pub fn symmetric_divergence(
    model: &StateChannelModel,
    strategies: &StrategyTable,
    p_x_hat: &ProbVector,
    q: f64,
    u: usize,
) -> Result<f64> {
    check_symmetric_args(model, strategies, p_x_hat)?;
    let mut total = 0.0;
    for s in 0..model.s_size() {
        let ps = model.state_dist().get(s);
        for y in 0..model.y_size() {
            let own = model.transition(y, strategies.action(u, s), s);
            let others: f64 = (0..model.s_size())
                .filter(|&o| o != s)
                .map(|o| model.transition(y, strategies.action(u, o), s))
                .sum();
            let n = (1.0 - (model.s_size() as f64 - 1.0) * q) * own + q * others;
            if n > 0.0 {
                let den = mixture_output(model, p_x_hat, y, s);
                if den <= 0.0 {
                    return Err(Error::Inconsistency(format!(
                        "output (y={y}, s={s}) has positive strategy mass but zero mixture mass"
                    )));
                }
                total += ps * n * (n / den).ln();
            }
        }
    }
    Ok(total)
}

/// Derivative of [`symmetric_divergence`] in `q`.
pub fn symmetric_divergence_derivative(
    model: &StateChannelModel,
    strategies: &StrategyTable,
    p_x_hat: &ProbVector,
    q: f64,
    u: usize,
) -> Result<f64> {
    check_symmetric_args(model, strategies, p_x_hat)?;
    let mut total = 0.0;
    for s in 0..model.s_size() {
        let ps = model.state_dist().get(s);
        for y in 0..model.y_size() {
            let own = model.transition(y, strategies.action(u, s), s);
            let others: f64 = (0..model.s_size())
                .filter(|&o| o != s)
                .map(|o| model.transition(y, strategies.action(u, o), s))
                .sum();
            let omega = others - (model.s_size() as f64 - 1.0) * own;
            if omega == 0.0 {
                continue;
            }
            let n = own + q * omega;
            let den = mixture_output(model, p_x_hat, y, s);
            if den <= 0.0 {
                return Err(Error::Inconsistency(format!(
                    "output (y={y}, s={s}) has perturbed mass but zero mixture mass"
                )));
            }
            total += ps * omega * (n / den).ln();
        }
    }
    Ok(total)
}

/// Finds the breakpoint of one convex divergence curve on `[0, hi]`.
///
/// `d` evaluates the curve and `d1` its derivative. The three cases: the
/// curve starts at or below the capacity (breakpoint 0); it stays above and
/// only meets the capacity at `hi`; or it crosses at a unique interior root,
/// located by bisection on the bracketing interval that strict convexity
/// provides.
fn convex_breakpoint(
    d: &dyn Fn(f64) -> Result<f64>,
    d1: &dyn Fn(f64) -> Result<f64>,
    c_lower: f64,
    hi: f64,
    tol: f64,
) -> Result<Breakpoint> {
    let f = |t: f64| -> Result<f64> { Ok(d(t)? - c_lower) };
    let f0 = f(0.0)?;
    if f0 <= EQUALITY_TOL {
        return Ok(Breakpoint {
            value: 0.0,
            case: BreakCase::BelowEverywhere,
        });
    }

    // Locate the minimizer of the convex curve via its increasing derivative.
    let slope_end = d1(hi)?;
    let minimizer = if slope_end <= 0.0 {
        hi
    } else {
        let slope_start = d1(0.0)?;
        if slope_start >= 0.0 {
            return Err(Error::Bracketing(format!(
                "curve starts above the capacity (f(0) = {f0:.3e}) yet is nondecreasing"
            )));
        }
        let mut lo = 0.0;
        let mut up = hi;
        for _ in 0..90 {
            let mid = 0.5 * (lo + up);
            if d1(mid)? < 0.0 {
                lo = mid;
            } else {
                up = mid;
            }
        }
        0.5 * (lo + up)
    };

    let f_min = f(minimizer)?;
    if f_min < -1e-12 {
        // Unique crossing in (0, minimizer): f(0) > 0 > f(minimizer) and the
        // curve is strictly decreasing there.
        let mut lo = 0.0;
        let mut up = minimizer;
        while up - lo > tol {
            let mid = 0.5 * (lo + up);
            if f(mid)? > 0.0 {
                lo = mid;
            } else {
                up = mid;
            }
        }
        return Ok(Breakpoint {
            value: 0.5 * (lo + up),
            case: BreakCase::InteriorRoot,
        });
    }
    if f_min <= EQUALITY_TOL && slope_end <= 1e-10 {
        return Ok(Breakpoint {
            value: hi,
            case: BreakCase::StuckAtOne,
        });
    }
    Err(Error::Bracketing(format!(
        "curve stays above the capacity: f(0) = {f0:.3e}, f({minimizer:.6}) = {f_min:.3e}, \
         end slope = {slope_end:.3e}"
    )))
}

/// Breakpoint of strategy `u` under the erasure family.
pub fn erasure_breakpoint(
    model: &StateChannelModel,
    strategies: &StrategyTable,
    p_x_hat: &ProbVector,
    c_lower: f64,
    u: usize,
    tol: f64,
) -> Result<Breakpoint> {
    convex_breakpoint(
        &|e| erasure_divergence(model, strategies, p_x_hat, e, u),
        &|e| erasure_divergence_derivative(model, strategies, p_x_hat, e, u),
        c_lower,
        1.0,
        tol,
    )
}

/// Breakpoint of strategy `u` under the symmetric family, on `[0, 1/|S|]`.
pub fn symmetric_breakpoint(
    model: &StateChannelModel,
    strategies: &StrategyTable,
    p_x_hat: &ProbVector,
    c_lower: f64,
    u: usize,
    tol: f64,
) -> Result<Breakpoint> {
    convex_breakpoint(
        &|q| symmetric_divergence(model, strategies, p_x_hat, q, u),
        &|q| symmetric_divergence_derivative(model, strategies, p_x_hat, q, u),
        c_lower,
        1.0 / model.s_size() as f64,
        tol,
    )
}

fn no_csi_optimizer(model: &StateChannelModel) -> (ProbVector, f64) {
    let sol = capacity_no_csi_with(model, 1e-10, 400_000);
    let p = sol
        .argmax
        .dist()
        .expect("no-CSI solver returns a distribution")
        .clone();
    (p, sol.value)
}

/// Erasure level from which the causal capacity equals the
/// no-side-information capacity: the largest per-strategy breakpoint.
pub fn underline_epsilon(model: &StateChannelModel, tol: f64) -> Result<(f64, Vec<Breakpoint>)> {
    let strategies = StrategyTable::enumerate(model.x_size(), model.s_size() + 1)?;
    let (p_x_hat, c_lower) = no_csi_optimizer(model);
    let mut breakpoints = Vec::with_capacity(strategies.count());
    for u in 0..strategies.count() {
        breakpoints.push(erasure_breakpoint(
            model,
            &strategies,
            &p_x_hat,
            c_lower,
            u,
            tol,
        )?);
    }
    let value = breakpoints.iter().map(|b| b.value).fold(0.0, f64::max);
    Ok((value, breakpoints))
}

/// Crossover level from which the causal capacity equals the
/// no-side-information capacity under the symmetric family.
pub fn underline_q(model: &StateChannelModel, tol: f64) -> Result<(f64, Vec<Breakpoint>)> {
    let strategies = StrategyTable::enumerate(model.x_size(), model.s_size())?;
    let (p_x_hat, c_lower) = no_csi_optimizer(model);
    let mut breakpoints = Vec::with_capacity(strategies.count());
    for u in 0..strategies.count() {
        breakpoints.push(symmetric_breakpoint(
            model,
            &strategies,
            &p_x_hat,
            c_lower,
            u,
            tol,
        )?);
    }
    let value = breakpoints.iter().map(|b| b.value).fold(0.0, f64::max);
    Ok((value, breakpoints))
}

/// Largest noise levels at which the probing capacity still equals the
/// perfect-side-information capacity.
#[derive(Debug, Clone)]
pub struct OverlineThresholds {
    pub epsilon: f64,
    pub q: f64,
    /// The per-state optimal table realizing the thresholds.
    pub table: StochasticMatrix,
    /// Set when non-unique per-state maximizers could make the reported
    /// values lower bounds (possible only for more than two inputs).
    pub approximate: bool,
}

fn share_objective(t: &[f64]) -> f64 {
    let n = t.len() as f64;
    let sum0: f64 = t.iter().sum();
    let sum1 = n - sum0;
    let mut worst = f64::INFINITY;
    if sum0 > SUPPORT_TOL {
        for &ts in t {
            worst = worst.min(ts / sum0);
        }
    }
    if sum1 > SUPPORT_TOL {
        for &ts in t {
            worst = worst.min((1.0 - ts) / sum1);
        }
    }
    if worst.is_finite() {
        worst
    } else {
        0.0
    }
}

/// Computes the plateau thresholds from the per-state maximizer sets.
///
/// For binary inputs each per-state maximizer is either unique (pinned to
/// near machine precision by scalar bisection) or the whole simplex (states
/// whose channel rows coincide), so the maximization over the product of
/// maximizer sets runs over an explicit box. For larger input alphabets the
/// single computed maximizer is used and the result flagged approximate when
/// alternatives were detected.
pub fn overline_thresholds(model: &StateChannelModel) -> Result<OverlineThresholds> {
    let optima: PerStateOptima = per_state_optima(model, 1e-12, 400_000);
    let ns = model.s_size();
    if model.x_size() == 2 {
        let intervals: Vec<(f64, f64)> = (0..ns)
            .map(|s| {
                if optima.degenerate[s] {
                    (0.0, 1.0)
                } else {
                    let t = optima.table.get(s, 0);
                    (t, t)
                }
            })
            .collect();
        let max_lo = intervals.iter().map(|&(lo, _)| lo).fold(0.0, f64::max);
        let min_hi = intervals
            .iter()
            .map(|&(_, hi)| hi)
            .fold(f64::INFINITY, f64::min);
        let epsilon = 1.0 - (max_lo - min_hi).max(0.0);

        // Share maximization over the box: free coordinates only for
        // degenerate states, scanned densely with repeated sweeps.
        let mut point: Vec<f64> = intervals.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
        let free: Vec<usize> = (0..ns).filter(|&s| optima.degenerate[s]).collect();
        let mut q = share_objective(&point);
        if !free.is_empty() {
            for _ in 0..4 {
                for &s in &free {
                    let mut best = point[s];
                    let mut best_val = share_objective(&point);
                    for k in 0..=4096 {
                        let cand = k as f64 / 4096.0;
                        point[s] = cand;
                        let val = share_objective(&point);
                        if val > best_val {
                            best_val = val;
                            best = cand;
                        }
                    }
                    point[s] = best;
                }
            }
            q = share_objective(&point);
        }
        let table = StochasticMatrix::from_rows(
            point.iter().map(|&t| vec![t, 1.0 - t]).collect(),
        )?;
        return Ok(OverlineThresholds {
            epsilon,
            q,
            table,
            approximate: false,
        });
    }

    // More than two inputs: evaluate at the single computed maximizer.
    let table = optima.table.clone();
    let col_sums = table.column_sum();
    let mut epsilon = 0.0;
    for x in 0..model.x_size() {
        let min_s = (0..ns).map(|s| table.get(s, x)).fold(f64::INFINITY, f64::min);
        epsilon += min_s;
    }
    let mut q = f64::INFINITY;
    for x in 0..model.x_size() {
        if col_sums[x] <= SUPPORT_TOL {
            continue;
        }
        for s in 0..ns {
            q = q.min(table.get(s, x) / col_sums[x]);
        }
    }
    if !q.is_finite() {
        q = 0.0;
    }
    let approximate = optima.ambiguous || optima.degenerate.iter().any(|&d| d);
    Ok(OverlineThresholds {
        epsilon,
        q,
        table,
        approximate,
    })
}

/// `H(S|S~) / (2 rho ln 2)`: the normalized conditional entropy controlling
/// the estimator channel's off-diagonal mass.
pub fn hbar(p_s: &ProbVector, side: &SideChannel) -> Result<f64> {
    let h = conditional_state_entropy(p_s, side)?;
    Ok(h / (2.0 * p_s.min() * std::f64::consts::LN_2))
}

/// Labels of the sufficient/necessary conditions reported by the checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKey {
    /// Collapse from a mutual-information bound: `I(S;S~) <= rho^2 / (2e^2)`.
    Thm1,
    /// Collapse from the erasure margin: `sum min >= 1 - 1/e`.
    Thm1v,
    /// Plateau from conditional entropy:
    /// `H(S|S~) <= 2 rho ln2 / ((|S|-1)(e-1))`.
    Thm2,
    /// Plateau from the ML-estimator ratio:
    /// `ratio <= 1 / ((|S|-1)e - |S| + 2)`.
    Thm2v,
    /// Plateau from the singular-value route:
    /// `H(S|S~) <= 4 rho ln2 / (3 + 2(e-1) sqrt(2|S|))`.
    Thm2alt,
    /// The collapse threshold is interior: the derivative condition holds
    /// for every active non-inert strategy.
    Prop1,
    /// Per-state supports of the perfect-side-information optimum coincide.
    Prop2,
    /// No-decoder-state analogue of the interior-collapse condition.
    Prop3,
}

impl ConditionKey {
    pub fn label(self) -> &'static str {
        match self {
            ConditionKey::Thm1 => "Thm1",
            ConditionKey::Thm1v => "Thm1v",
            ConditionKey::Thm2 => "Thm2",
            ConditionKey::Thm2v => "Thm2v",
            ConditionKey::Thm2alt => "Thm2alt",
            ConditionKey::Prop1 => "Prop1",
            ConditionKey::Prop2 => "Prop2",
            ConditionKey::Prop3 => "Prop3",
        }
    }
}

/// One checked condition with the two compared sides.
#[derive(Debug, Clone, Copy)]
pub struct ConditionVerdict {
    pub key: ConditionKey,
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// Evaluates the side-channel conditions for the given model.
pub fn theorem_checks(
    model: &StateChannelModel,
    side: &SideChannel,
) -> Result<Vec<ConditionVerdict>> {
    let p_s = model.state_dist();
    let rho = model.rho();
    let e = std::f64::consts::E;
    let ln2 = std::f64::consts::LN_2;
    let s_size = model.s_size() as f64;

    let h_cond = conditional_state_entropy(p_s, side)?;
    let mi = (entropy(p_s) - h_cond).max(0.0);
    let margin = crate::degrade::erasure_margin(side);
    let ml_ratio = ml_cover_threshold(side);

    let mut verdicts = vec![
        ConditionVerdict {
            key: ConditionKey::Thm1,
            holds: mi <= rho * rho / (2.0 * e * e),
            lhs: mi,
            rhs: rho * rho / (2.0 * e * e),
        },
        ConditionVerdict {
            key: ConditionKey::Thm1v,
            holds: margin >= 1.0 - 1.0 / e,
            lhs: margin,
            rhs: 1.0 - 1.0 / e,
        },
        ConditionVerdict {
            key: ConditionKey::Thm2,
            holds: if s_size > 1.0 {
                h_cond <= 2.0 * rho * ln2 / ((s_size - 1.0) * (e - 1.0))
            } else {
                true
            },
            lhs: h_cond,
            rhs: if s_size > 1.0 {
                2.0 * rho * ln2 / ((s_size - 1.0) * (e - 1.0))
            } else {
                f64::INFINITY
            },
        },
        ConditionVerdict {
            key: ConditionKey::Thm2v,
            holds: ml_ratio <= 1.0 / ((s_size - 1.0) * e - s_size + 2.0),
            lhs: ml_ratio,
            rhs: 1.0 / ((s_size - 1.0) * e - s_size + 2.0),
        },
        ConditionVerdict {
            key: ConditionKey::Thm2alt,
            holds: h_cond <= 4.0 * rho * ln2 / (3.0 + 2.0 * (e - 1.0) * (2.0 * s_size).sqrt()),
            lhs: h_cond,
            rhs: 4.0 * rho * ln2 / (3.0 + 2.0 * (e - 1.0) * (2.0 * s_size).sqrt()),
        },
    ];
    verdicts.extend(proposition_checks(model)?);
    Ok(verdicts)
}

/// The three interior-threshold conditions, which depend on the model only.
pub fn proposition_checks(model: &StateChannelModel) -> Result<Vec<ConditionVerdict>> {
    let p1 = prop1_margin(model)?;
    let p2 = prop2_margin(model);
    let p3 = prop3_margin(model)?;
    Ok(vec![
        ConditionVerdict {
            key: ConditionKey::Prop1,
            holds: p1 > STRICTNESS_TOL,
            lhs: p1,
            rhs: 0.0,
        },
        ConditionVerdict {
            key: ConditionKey::Prop2,
            holds: p2 > SUPPORT_TOL,
            lhs: p2,
            rhs: 0.0,
        },
        ConditionVerdict {
            key: ConditionKey::Prop3,
            holds: p3 > STRICTNESS_TOL,
            lhs: p3,
            rhs: 0.0,
        },
    ])
}

/// Whether the collapse threshold of the erasure family is interior.
pub fn prop1_check(model: &StateChannelModel) -> Result<bool> {
    Ok(prop1_margin(model)? > STRICTNESS_TOL)
}

/// The smallest end-slope over active non-inert strategies; positive means
/// every such curve leaves the capacity from above at full erasure.
fn prop1_margin(model: &StateChannelModel) -> Result<f64> {
    let strategies = StrategyTable::enumerate(model.x_size(), model.s_size() + 1)?;
    let (p_x_hat, c_lower) = no_csi_optimizer(model);
    let pert: PerturbationTables =
        perturbation_tables(model, &strategies, PerturbationFamily::Erasure)?;
    let mut margin = f64::INFINITY;
    for u in 0..strategies.count() {
        if pert.is_inert(u) {
            continue;
        }
        let d_end = erasure_divergence(model, &strategies, &p_x_hat, 1.0, u)?;
        if (d_end - c_lower).abs() > EQUALITY_TOL {
            continue; // outside the active set
        }
        let slope = erasure_divergence_derivative(model, &strategies, &p_x_hat, 1.0, u)?;
        margin = margin.min(slope);
    }
    Ok(margin)
}

/// Whether the per-state supports of the perfect-side-information optimum
/// coincide across states.
pub fn prop2_check(model: &StateChannelModel) -> Result<bool> {
    Ok(prop2_margin(model) > SUPPORT_TOL)
}

fn prop2_margin(model: &StateChannelModel) -> f64 {
    let optima = per_state_optima(model, 1e-12, 400_000);
    let table = &optima.table;
    let col_sums = table.column_sum();
    let mut margin = f64::INFINITY;
    for x in 0..model.x_size() {
        if col_sums[x] <= SUPPORT_TOL {
            continue;
        }
        for s in 0..model.s_size() {
            margin = margin.min(table.get(s, x));
        }
    }
    if margin.is_finite() {
        margin
    } else {
        0.0
    }
}

/// No-decoder-state analogue of [`prop1_check`].
pub fn prop3_check(model: &StateChannelModel) -> Result<bool> {
    Ok(prop3_margin(model)? > STRICTNESS_TOL)
}

fn prop3_margin(model: &StateChannelModel) -> Result<f64> {
    let strategies = StrategyTable::enumerate(model.x_size(), model.s_size() + 1)?;
    let averaged = model.averaged_channel();
    let sol = crate::capacity::ba_capacity(&averaged, 1e-10, 400_000);
    let p_x_hat = sol
        .argmax
        .dist()
        .expect("averaged-channel solver returns a distribution");
    let c_tilde_lower = sol.value;
    let star = model.s_size();
    let ny = model.y_size();

    // Output mixture under the optimizer.
    let den: Vec<f64> = (0..ny)
        .map(|y| {
            (0..model.x_size())
                .map(|x| p_x_hat.get(x) * averaged.get(x, y))
                .sum()
        })
        .collect();

    let mut margin = f64::INFINITY;
    for u in 0..strategies.count() {
        // Marginalized perturbation and erased-branch output row.
        let mut delta_bar = vec![0.0; ny];
        let mut star_row = vec![0.0; ny];
        for s in 0..model.s_size() {
            let ps = model.state_dist().get(s);
            for y in 0..ny {
                let own = model.transition(y, strategies.action(u, s), s);
                let erased = model.transition(y, strategies.action(u, star), s);
                delta_bar[y] += ps * (erased - own);
                star_row[y] += ps * erased;
            }
        }
        if delta_bar.iter().all(|&v| v.abs() < crate::strategy::INERT_TOL) {
            continue; // inert after marginalization
        }
        let d_end: f64 = (0..ny)
            .map(|y| {
                if star_row[y] > 0.0 {
                    star_row[y] * (star_row[y] / den[y]).ln()
                } else {
                    0.0
                }
            })
            .sum();
        if (d_end - c_tilde_lower).abs() > EQUALITY_TOL {
            continue;
        }
        let slope: f64 = (0..ny)
            .map(|y| {
                if delta_bar[y] != 0.0 {
                    delta_bar[y] * (star_row[y] / den[y]).ln()
                } else {
                    0.0
                }
            })
            .sum();
        margin = margin.min(slope);
    }
    Ok(margin)
}

/// `eta(theta) = (1 - theta) ln(1 + theta) + theta ln theta`; zero at the
/// endpoints and strictly negative on the open interval.
pub fn eta(theta: f64) -> f64 {
    (1.0 - theta) * (1.0 + theta).ln() + xlnx(theta)
}

/// Closed-form collapse thresholds for the [`crate::channel::sz_channel`]
/// family: the unique roots of the two endpoint equations, by bisection.
pub fn sz_underline_roots(theta: f64, tol: f64) -> Result<(f64, f64)> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let c_lower = 0.5
        * ((1.0 - theta) * std::f64::consts::LN_2
            + (2.0 / (1.0 + theta)).ln()
            + theta * (2.0 * theta / (1.0 + theta)).ln());

    // Right-hand side of the erasure-root equation.
    let eps_rhs =
        (1.0 - theta) * std::f64::consts::LN_2 + theta * (2.0 * theta / (1.0 + theta)).ln();
    let eps_curve = |e: f64| -> f64 {
        let grow = 1.0 - e * (1.0 - theta);
        xlnx(e) * (1.0 - theta) + e * (1.0 - theta) * std::f64::consts::LN_2
            + grow * (2.0 * grow / (1.0 + theta)).ln()
            - eps_rhs
    };
    // The curve is convex with its minimum at 1/2 and a zero at 1, so the
    // interior root lies in (0, 1/2).
    let mut lo = 0.0;
    let mut hi = 0.5;
    debug_assert!(eps_curve(1e-12) > 0.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if eps_curve(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eps_hat = 0.5 * (lo + hi);

    let q_curve = |q: f64| -> f64 {
        let grow = 1.0 - q * (1.0 - theta);
        xlnx(q) * (1.0 - theta) + q * (1.0 - theta) * std::f64::consts::LN_2
            + grow * (2.0 * grow / (1.0 + theta)).ln()
            - c_lower
    };
    let mut lo = 0.0;
    let mut hi = 0.5;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if q_curve(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q_hat = 0.5 * (lo + hi);
    Ok((eps_hat, q_hat))
}

/// Closed-form plateau thresholds and per-state optimum for the
/// [`crate::channel::sz_channel`] family on the open parameter interval.
pub fn sz_overline_closed_forms(theta: f64) -> Result<(f64, f64, StochasticMatrix)> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let t = theta.powf(theta / (1.0 - theta));
    let scale = 1.0 / (1.0 + (1.0 - theta) * t);
    let eps = 2.0 * scale * t;
    let q = scale * t;
    let same = scale * t;
    let other = scale * (1.0 - theta.powf(1.0 / (1.0 - theta)));
    if t >= 1.0 - theta.powf(1.0 / (1.0 - theta)) {
        return Err(Error::Inconsistency(
            "plateau optimizer entries out of order".to_string(),
        ));
    }
    let table = StochasticMatrix::from_rows(vec![vec![same, other], vec![other, same]])?;
    Ok((eps, q, table))
}

/// Everything the threshold analysis produces for one model.
#[derive(Debug, Clone)]
pub struct ThresholdReport {
    pub c_lower: f64,
    pub c_upper: f64,
    pub underline_epsilon: f64,
    pub underline_q: f64,
    pub overline_epsilon: f64,
    pub overline_q: f64,
    pub overline_approximate: bool,
    pub epsilon_breakpoints: Vec<Breakpoint>,
    pub q_breakpoints: Vec<Breakpoint>,
    pub verdicts: Vec<ConditionVerdict>,
}

/// Runs the full threshold analysis; side-channel-dependent verdicts are
/// included when a side channel is given.
pub fn threshold_report(
    model: &StateChannelModel,
    side: Option<&SideChannel>,
    tol: f64,
) -> Result<ThresholdReport> {
    let (ue, epsilon_breakpoints) = underline_epsilon(model, tol)?;
    let (uq, q_breakpoints) = underline_q(model, tol)?;
    let overline = overline_thresholds(model)?;
    let c_lower = capacity_no_csi_with(model, 1e-10, 400_000).value;
    let c_upper = crate::capacity::capacity_full_csi(model).value;
    let verdicts = match side {
        Some(side) => theorem_checks(model, side)?,
        None => proposition_checks(model)?,
    };
    Ok(ThresholdReport {
        c_lower,
        c_upper,
        underline_epsilon: ue,
        underline_q: uq,
        overline_epsilon: overline.epsilon,
        overline_q: overline.q,
        overline_approximate: overline.approximate,
        epsilon_breakpoints,
        q_breakpoints,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{
        generalized_symmetric, sz_channel, ternary_no_collapse_channel,
        ternary_no_plateau_channel, xor_channel,
    };

    fn sz_setup(theta: f64) -> (StateChannelModel, StrategyTable, ProbVector, f64) {
        let model = sz_channel(theta).unwrap();
        let strategies = StrategyTable::enumerate(2, 3).unwrap();
        let (p, c) = no_csi_optimizer(&model);
        (model, strategies, p, c)
    }

    /// The per-strategy erasure divergences of the sz family in closed form.
    fn sz_erasure_divergence_oracle(theta: f64, eps: f64, u: usize) -> f64 {
        let ln2 = std::f64::consts::LN_2;
        let th = theta;
        match u {
            0 | 1 => {
                0.5 * ((1.0 - th) * ln2
                    + (2.0 / (1.0 + th)).ln()
                    + th * (2.0 * th / (1.0 + th)).ln())
            }
            2 | 3 => {
                0.5 * ((1.0 - th) * (xlnx(eps) + eps * ln2)
                    + (th + eps * (1.0 - th)) * (2.0 * (th + eps * (1.0 - th)) / (1.0 + th)).ln()
                    + (1.0 - eps * (1.0 - th))
                        * (2.0 * (1.0 - eps * (1.0 - th)) / (1.0 + th)).ln()
                    + (1.0 - th) * (xlnx(1.0 - eps) + (1.0 - eps) * ln2))
            }
            4 | 5 => {
                0.5 * ((1.0 - th) * ln2
                    + (th + eps * (1.0 - th)) * (2.0 * (th + eps * (1.0 - th)) / (1.0 + th)).ln()
                    + th * (2.0 * th / (1.0 + th)).ln()
                    + (1.0 - th) * (xlnx(1.0 - eps) + (1.0 - eps) * ln2))
            }
            6 | 7 => {
                0.5 * (xlnx(eps) * (1.0 - th)
                    + eps * (1.0 - th) * ln2
                    + (2.0 / (1.0 + th)).ln()
                    + (1.0 - eps * (1.0 - th))
                        * (2.0 * (1.0 - eps * (1.0 - th)) / (1.0 + th)).ln())
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn erasure_divergence_matches_closed_forms() {
        for &theta in &[0.2, 0.5, 0.8] {
            let (model, strategies, p, _) = sz_setup(theta);
            for &eps in &[0.0, 0.1, 0.35, 0.7, 1.0] {
                for u in 0..8 {
                    let got =
                        erasure_divergence(&model, &strategies, &p, eps, u).unwrap();
                    let want = sz_erasure_divergence_oracle(theta, eps, u);
                    assert!(
                        (got - want).abs() < 1e-9,
                        "theta={theta} eps={eps} u={u}: {got} vs {want}"
                    );
                }
            }
        }
    }

    /// The symmetric-family divergences of the sz family in closed form.
    fn sz_symmetric_divergence_oracle(theta: f64, q: f64, u: usize) -> f64 {
        let ln2 = std::f64::consts::LN_2;
        let th = theta;
        match u {
            0 | 1 => {
                0.5 * ((1.0 - th) * ln2
                    + (2.0 / (1.0 + th)).ln()
                    + th * (2.0 * th / (1.0 + th)).ln())
            }
            2 => {
                (1.0 - th) * (xlnx(1.0 - q) + (1.0 - q) * ln2)
                    + (th + q * (1.0 - th)) * (2.0 * (th + q * (1.0 - th)) / (1.0 + th)).ln()
            }
            3 => {
                (1.0 - th) * (xlnx(q) + q * ln2)
                    + (1.0 - q * (1.0 - th)) * (2.0 * (1.0 - q * (1.0 - th)) / (1.0 + th)).ln()
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn symmetric_divergence_matches_closed_forms() {
        for &theta in &[0.2, 0.5, 0.8] {
            let model = sz_channel(theta).unwrap();
            let strategies = StrategyTable::enumerate(2, 2).unwrap();
            let (p, _) = no_csi_optimizer(&model);
            for &q in &[0.0, 0.1, 0.25, 0.4, 0.5] {
                for u in 0..4 {
                    let got = symmetric_divergence(&model, &strategies, &p, q, u).unwrap();
                    let want = sz_symmetric_divergence_oracle(theta, q, u);
                    assert!(
                        (got - want).abs() < 1e-9,
                        "theta={theta} q={q} u={u}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn divergence_at_zero_noise_values() {
        let (model, strategies, p, c_lower) = sz_setup(0.5);
        // The erased-branch-active strategies start at ln(4/3).
        for u in [6, 7] {
            let d0 = erasure_divergence(&model, &strategies, &p, 0.0, u).unwrap();
            assert!((d0 - (4.0f64 / 3.0).ln()).abs() < 1e-9);
            assert!(d0 > c_lower);
        }
        // Constant maps sit exactly at the capacity for every parameter.
        for u in [0, 1] {
            for &eps in &[0.0, 0.5, 1.0] {
                let d = erasure_divergence(&model, &strategies, &p, eps, u).unwrap();
                assert!((d - c_lower).abs() < 1e-9);
            }
        }
        // Full erasure pins every curve at or below the capacity, with the
        // constants exactly on it.
        for u in 0..8 {
            let d1 = erasure_divergence(&model, &strategies, &p, 1.0, u).unwrap();
            assert!(d1 <= c_lower + 1e-9);
        }
    }

    #[test]
    fn midpoint_convexity_of_divergence_curves() {
        let (model, strategies, p, _) = sz_setup(0.5);
        let pert =
            perturbation_tables(&model, &strategies, PerturbationFamily::Erasure).unwrap();
        for u in 0..8 {
            if pert.is_inert(u) {
                continue;
            }
            let sample: Vec<f64> = (0..11)
                .map(|k| {
                    erasure_divergence(&model, &strategies, &p, k as f64 / 10.0, u).unwrap()
                })
                .collect();
            for k in 1..10 {
                assert!(
                    sample[k] <= 0.5 * (sample[k - 1] + sample[k + 1]) + 1e-9,
                    "u={u} k={k}"
                );
            }
        }
    }

    #[test]
    fn breakpoint_cases_for_the_binary_example() {
        let (model, strategies, p, c_lower) = sz_setup(0.5);
        for u in 0..6 {
            let b = erasure_breakpoint(&model, &strategies, &p, c_lower, u, 1e-10).unwrap();
            assert_eq!(b.case, BreakCase::BelowEverywhere, "u={u}");
        }
        for u in [6, 7] {
            let b = erasure_breakpoint(&model, &strategies, &p, c_lower, u, 1e-10).unwrap();
            assert_eq!(b.case, BreakCase::InteriorRoot);
            assert!((b.value - 0.10027804406533913).abs() < 1e-6, "{}", b.value);
        }
    }

    #[test]
    fn underline_thresholds_match_roots() {
        for &theta in &[0.2, 0.5, 0.8] {
            let model = sz_channel(theta).unwrap();
            let (eps_hat, q_hat) = sz_underline_roots(theta, 1e-12).unwrap();
            let (ue, _) = underline_epsilon(&model, 1e-10).unwrap();
            let (uq, _) = underline_q(&model, 1e-10).unwrap();
            assert!((ue - eps_hat).abs() < 1e-7, "theta={theta}: {ue} vs {eps_hat}");
            assert!((uq - q_hat).abs() < 1e-7, "theta={theta}: {uq} vs {q_hat}");
        }
    }

    #[test]
    fn underline_vanishes_at_theta_endpoints() {
        for &theta in &[0.0, 1.0] {
            let model = sz_channel(theta).unwrap();
            let (ue, _) = underline_epsilon(&model, 1e-10).unwrap();
            let (uq, _) = underline_q(&model, 1e-10).unwrap();
            assert!(ue.abs() < 1e-9, "theta={theta}");
            assert!(uq.abs() < 1e-9, "theta={theta}");
        }
    }

    #[test]
    fn overline_matches_closed_forms() {
        let model = sz_channel(0.5).unwrap();
        let ov = overline_thresholds(&model).unwrap();
        assert!(!ov.approximate);
        assert!((ov.epsilon - 0.8).abs() < 1e-9);
        assert!((ov.q - 0.4).abs() < 1e-9);

        let (eps, q, table) = sz_overline_closed_forms(0.5).unwrap();
        assert!((eps - 0.8).abs() < 1e-15);
        assert!((q - 0.4).abs() < 1e-15);
        assert!((table.get(0, 0) - 0.4).abs() < 1e-15);
        for s in 0..2 {
            for x in 0..2 {
                assert!((ov.table.get(s, x) - table.get(s, x)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn overline_closed_form_limits() {
        let (eps, q, _) = sz_overline_closed_forms(1e-9).unwrap();
        assert!((eps - 1.0).abs() < 1e-6);
        assert!((q - 0.5).abs() < 1e-6);
    }

    #[test]
    fn eta_sign() {
        assert_eq!(eta(0.0), 0.0);
        assert_eq!(eta(1.0), 0.0);
        assert!((eta(0.5) + 0.14384103622589045).abs() < 1e-12);
        for k in 1..999 {
            assert!(eta(k as f64 / 1000.0) < 0.0);
        }
    }

    #[test]
    fn stuck_at_one_for_the_no_collapse_channel() {
        let model = ternary_no_collapse_channel();
        let (ue, breakpoints) = underline_epsilon(&model, 1e-10).unwrap();
        assert_eq!(ue, 1.0);
        assert!(breakpoints
            .iter()
            .any(|b| b.case == BreakCase::StuckAtOne));
        assert!(!prop1_check(&model).unwrap());
    }

    #[test]
    fn prop_checks_on_the_examples() {
        assert!(prop1_check(&sz_channel(0.5).unwrap()).unwrap());
        assert!(prop2_check(&sz_channel(0.5).unwrap()).unwrap());
        assert!(!prop2_check(&ternary_no_plateau_channel()).unwrap());
        assert!(!prop3_check(&xor_channel(0.25).unwrap()).unwrap());
    }

    #[test]
    fn theorem_checks_reference_values() {
        let model = sz_channel(0.5).unwrap();
        let side = generalized_symmetric(0.01, 2).unwrap();
        let verdicts = theorem_checks(&model, &side).unwrap();
        let get = |key: ConditionKey| verdicts.iter().find(|v| v.key == key).copied().unwrap();

        let thm1 = get(ConditionKey::Thm1);
        assert!((thm1.rhs - 0.016916910404576588).abs() < 1e-12);
        let thm2 = get(ConditionKey::Thm2);
        assert!((thm2.rhs - 0.4033955135180354).abs() < 1e-12);
        assert!((thm2.lhs - 0.056001534354847345).abs() < 1e-9);
        assert!(thm2.holds);
        let thm2v = get(ConditionKey::Thm2v);
        assert!((thm2v.lhs - 0.01).abs() < 1e-12);
        assert!(thm2v.holds);

        // An erased-state observation at 0.95 clears the margin condition
        // (margin = erasure level, threshold 1 - 1/e).
        let side = crate::channel::generalized_erasure(0.95, 2).unwrap();
        let verdicts = theorem_checks(&model, &side).unwrap();
        let thm1v = verdicts
            .iter()
            .find(|v| v.key == ConditionKey::Thm1v)
            .unwrap();
        assert!((thm1v.lhs - 0.95).abs() < 1e-12);
        assert!(thm1v.holds);
    }

    #[test]
    fn hbar_is_nonnegative_and_scales() {
        let p_s = ProbVector::new(vec![0.5, 0.5]).unwrap();
        let side = generalized_symmetric(0.1, 2).unwrap();
        let h = hbar(&p_s, &side).unwrap();
        let expected = 0.3250829733914482 / (2.0 * 0.5 * std::f64::consts::LN_2);
        assert!((h - expected).abs() < 1e-12);
    }
}
