//! Capacity solvers.
//!
//! The workhorse is the Blahut-Arimoto iteration for a plain discrete
//! memoryless channel, with the standard lower/upper sandwich as the
//! convergence certificate. On top of it sit the capacity functionals of the
//! state-channel model: no side information, perfect encoder side
//! information, causal noisy side information (through Shannon strategies),
//! and the no-decoder-state variants.

use crate::channel::{SideChannel, StateChannelModel};
use crate::error::{Error, Result};
use crate::prob::{kl_slices, ProbVector, StochasticMatrix};
use crate::strategy::{induced_channel, StrategyTable};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Inputs with mass above this are treated as active in KKT checks.
pub const ACTIVE_TOL: f64 = 1e-6;

/// The maximizing argument of a capacity problem.
#[derive(Debug, Clone)]
pub enum Argmax {
    /// A distribution over the input (or strategy) alphabet.
    Dist(ProbVector),
    /// A conditional table, rows indexed by the conditioning symbol.
    Table(StochasticMatrix),
}

impl Argmax {
    pub fn dist(&self) -> Option<&ProbVector> {
        match self {
            Argmax::Dist(p) => Some(p),
            Argmax::Table(_) => None,
        }
    }

    pub fn table(&self) -> Option<&StochasticMatrix> {
        match self {
            Argmax::Table(t) => Some(t),
            Argmax::Dist(_) => None,
        }
    }
}

/// A solved capacity problem.
///
/// `value` is the mutual information attained by `argmax` (a true lower bound
/// on the capacity), and `gap_bound` bounds both the distance to the true
/// capacity and the spread of the per-letter divergences around `value`.
#[derive(Debug, Clone)]
pub struct CapacitySolution {
    pub value: f64,
    pub argmax: Argmax,
    /// `D(W(.|u) || pW)` per input letter, at the returned argmax.
    pub per_letter_divergence: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub gap_bound: f64,
}

fn divergences(channel: &StochasticMatrix, p: &[f64], out: &mut Vec<f64>) {
    let mut q = vec![0.0; channel.cols()];
    for (x, &px) in p.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for (y, &w) in channel.row(x).iter().enumerate() {
            q[y] += px * w;
        }
    }
    out.clear();
    out.extend((0..channel.rows()).map(|x| kl_slices(channel.row(x), &q)));
}

/// Blahut-Arimoto capacity of a discrete memoryless channel, in nats.
///
/// Iterates the multiplicative update from the uniform input until the
/// sandwich `max_x D_x - sum_x p(x) D_x` falls below `tol`. On iteration
/// exhaustion the best iterate is returned with `converged = false`.
pub fn ba_capacity(channel: &StochasticMatrix, tol: f64, max_iter: usize) -> CapacitySolution {
    ba_core(channel, tol, max_iter, None)
}

/// Same as [`ba_capacity`] but records the lower-bound trajectory, which is
/// nondecreasing across iterations.
pub fn ba_capacity_trace(
    channel: &StochasticMatrix,
    tol: f64,
    max_iter: usize,
) -> (CapacitySolution, Vec<f64>) {
    let mut trace = Vec::new();
    let solution = ba_core(channel, tol, max_iter, Some(&mut trace));
    (solution, trace)
}

fn ba_core(
    channel: &StochasticMatrix,
    tol: f64,
    max_iter: usize,
    mut trace: Option<&mut Vec<f64>>,
) -> CapacitySolution {
    let n = channel.rows();
    let mut p = vec![1.0 / n as f64; n];
    let mut divs = Vec::with_capacity(n);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        iterations += 1;
        divergences(channel, &p, &mut divs);
        let lower: f64 = p.iter().zip(&divs).map(|(&px, &d)| px * d).sum();
        let upper = divs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if let Some(t) = trace.as_deref_mut() {
            t.push(lower.max(0.0));
        }
        if upper - lower <= tol {
            converged = true;
            break;
        }
        // Multiplicative update, shifted by the maximum to avoid overflow.
        let mut z = 0.0;
        for (px, &d) in p.iter_mut().zip(&divs) {
            *px *= (d - upper).exp();
            z += *px;
        }
        for px in p.iter_mut() {
            *px /= z;
        }
    }

    // Report divergences at the returned input distribution.
    divergences(channel, &p, &mut divs);
    let lower: f64 = p.iter().zip(&divs).map(|(&px, &d)| px * d).sum();
    let upper = divs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let active_spread = p
        .iter()
        .zip(&divs)
        .filter(|(&px, _)| px > ACTIVE_TOL)
        .map(|(_, &d)| lower - d)
        .fold(0.0f64, f64::max);
    let gap_bound = (upper - lower).max(active_spread).max(0.0);
    let value = lower.max(0.0);
    let argmax = Argmax::Dist(ProbVector::new(p).expect("iterates stay normalized"));
    CapacitySolution {
        value,
        argmax,
        per_letter_divergence: divs,
        iterations,
        converged,
        gap_bound,
    }
}

/// Capacity with no encoder side information: the capacity of the channel
/// `X -> (Y, S)` whose rows are `p_S(s) p(y|x,s)`.
pub fn capacity_no_csi(model: &StateChannelModel) -> CapacitySolution {
    capacity_no_csi_with(model, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub fn capacity_no_csi_with(
    model: &StateChannelModel,
    tol: f64,
    max_iter: usize,
) -> CapacitySolution {
    ba_capacity(&model.no_csi_channel(), tol, max_iter)
}

/// Per-state capacity problems underlying the perfect-side-information
/// capacity and the plateau thresholds.
#[derive(Debug, Clone)]
pub struct PerStateOptima {
    /// Optimal input distribution per state, rows indexed by the state.
    pub table: StochasticMatrix,
    /// Capacity of each per-state channel, in nats.
    pub values: Vec<f64>,
    /// KKT gap certificate per state.
    pub gaps: Vec<f64>,
    /// States whose channel has identical rows, so any input distribution is
    /// optimal. For binary inputs every other state has a unique maximizer.
    pub degenerate: Vec<bool>,
    /// Set when some per-state maximizer may be non-unique beyond the
    /// `degenerate` marks (possible only for more than two inputs).
    pub ambiguous: bool,
    pub converged: bool,
    pub iterations: usize,
}

fn rows_all_equal(w: &StochasticMatrix) -> bool {
    (1..w.rows()).all(|r| {
        w.row(0)
            .iter()
            .zip(w.row(r))
            .all(|(&a, &b)| (a - b).abs() < 1e-14)
    })
}

/// High-precision maximizer of `I((t, 1-t); W)` for a two-row channel.
///
/// The derivative `D(W_0 || q_t) - D(W_1 || q_t)` is strictly decreasing in
/// `t` whenever the rows differ, so bisection on its sign pins the unique
/// maximizer to near machine precision (far tighter than the value-based
/// sandwich of the multiplicative iteration).
fn binary_input_optimum(w: &StochasticMatrix) -> (f64, f64, f64) {
    let deriv = |t: f64| -> f64 {
        let q: Vec<f64> = (0..w.cols())
            .map(|y| t * w.get(0, y) + (1.0 - t) * w.get(1, y))
            .collect();
        kl_slices(w.row(0), &q) - kl_slices(w.row(1), &q)
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if deriv(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let p = [t, 1.0 - t];
    let q: Vec<f64> = (0..w.cols())
        .map(|y| t * w.get(0, y) + (1.0 - t) * w.get(1, y))
        .collect();
    let d0 = kl_slices(w.row(0), &q);
    let d1 = kl_slices(w.row(1), &q);
    let value = (p[0] * d0 + p[1] * d1).max(0.0);
    let gap = (d0.max(d1) - value).max(0.0);
    (t, value, gap)
}

/// Solves the per-state capacity problems.
pub fn per_state_optima(model: &StateChannelModel, tol: f64, max_iter: usize) -> PerStateOptima {
    let s_size = model.s_size();
    let mut rows = Vec::with_capacity(s_size);
    let mut values = Vec::with_capacity(s_size);
    let mut gaps = Vec::with_capacity(s_size);
    let mut degenerate = Vec::with_capacity(s_size);
    let mut ambiguous = false;
    let mut converged = true;
    let mut iterations = 0;
    for s in 0..s_size {
        let w = model.per_state_channel(s);
        if rows_all_equal(&w) {
            rows.push(vec![1.0 / model.x_size() as f64; model.x_size()]);
            values.push(0.0);
            gaps.push(0.0);
            degenerate.push(true);
            continue;
        }
        degenerate.push(false);
        if model.x_size() == 2 {
            let (t, value, gap) = binary_input_optimum(&w);
            rows.push(vec![t, 1.0 - t]);
            values.push(value);
            gaps.push(gap);
        } else {
            let sol = ba_capacity(&w, tol, max_iter);
            converged &= sol.converged;
            iterations = iterations.max(sol.iterations);
            let p = sol.argmax.dist().expect("BA returns a distribution");
            // A zero-mass input whose divergence ties the capacity marks an
            // alternative maximizer.
            for (x, &d) in sol.per_letter_divergence.iter().enumerate() {
                if p.get(x) <= ACTIVE_TOL && d >= sol.value - 1e-8 {
                    ambiguous = true;
                }
            }
            rows.push(p.as_slice().to_vec());
            values.push(sol.value);
            gaps.push(sol.gap_bound);
        }
    }
    PerStateOptima {
        table: StochasticMatrix::from_rows(rows).expect("rows are distributions"),
        values,
        gaps,
        degenerate,
        ambiguous,
        converged,
        iterations,
    }
}

/// Capacity with perfect state information at the encoder (and decoder):
/// the state-weighted sum of per-state capacities. The argmax is the
/// conditional input table `p(x|s)`.
pub fn capacity_full_csi(model: &StateChannelModel) -> CapacitySolution {
    capacity_full_csi_with(model, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub fn capacity_full_csi_with(
    model: &StateChannelModel,
    tol: f64,
    max_iter: usize,
) -> CapacitySolution {
    let optima = per_state_optima(model, tol, max_iter);
    let value: f64 = (0..model.s_size())
        .map(|s| model.state_dist().get(s) * optima.values[s])
        .sum();
    let gap_bound: f64 = (0..model.s_size())
        .map(|s| model.state_dist().get(s) * optima.gaps[s])
        .sum();
    CapacitySolution {
        value: value.max(0.0),
        argmax: Argmax::Table(optima.table),
        per_letter_divergence: Vec::new(),
        iterations: optima.iterations,
        converged: optima.converged,
        gap_bound,
    }
}

/// Capacity with causal noisy state observation at the encoder: the capacity
/// of the channel induced by Shannon strategies over the side channel.
pub fn capacity_causal(model: &StateChannelModel, side: &SideChannel) -> Result<CapacitySolution> {
    capacity_causal_with(model, side, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub fn capacity_causal_with(
    model: &StateChannelModel,
    side: &SideChannel,
    tol: f64,
    max_iter: usize,
) -> Result<CapacitySolution> {
    let strategies = StrategyTable::enumerate(model.x_size(), side.obs_size())?;
    let w = induced_channel(model, side, &strategies)?;
    Ok(ba_capacity(&w, tol, max_iter))
}

/// Capacities without state information at the decoder: returns the pair
/// `(no encoder observation, causal encoder observation)`, i.e. the capacity
/// of the state-averaged channel `X -> Y` and of the strategy channel
/// `U -> Y`.
pub fn capacity_no_decoder_csi(
    model: &StateChannelModel,
    side: &SideChannel,
) -> Result<(CapacitySolution, CapacitySolution)> {
    capacity_no_decoder_csi_with(model, side, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub fn capacity_no_decoder_csi_with(
    model: &StateChannelModel,
    side: &SideChannel,
    tol: f64,
    max_iter: usize,
) -> Result<(CapacitySolution, CapacitySolution)> {
    let lower = ba_capacity(&model.averaged_channel(), tol, max_iter);

    let strategies = StrategyTable::enumerate(model.x_size(), side.obs_size())?;
    let joint = induced_channel(model, side, &strategies)?;
    // Marginalize the joint output (y, s) over the state.
    let mut data = vec![0.0; strategies.count() * model.y_size()];
    for u in 0..strategies.count() {
        for y in 0..model.y_size() {
            for s in 0..model.s_size() {
                data[u * model.y_size() + y] += joint.get(u, y * model.s_size() + s);
            }
        }
    }
    let marginal = StochasticMatrix::new(strategies.count(), model.y_size(), data)?;
    let causal = ba_capacity(&marginal, tol, max_iter);
    Ok((lower, causal))
}

/// Evaluates `I(X;Y|S) = sum_s p_S(s) I(p(.|s); W_s)` for a conditional input
/// table with rows indexed by the state.
pub fn conditional_mutual_information(
    model: &StateChannelModel,
    table: &StochasticMatrix,
) -> Result<f64> {
    if table.rows() != model.s_size() || table.cols() != model.x_size() {
        return Err(Error::DimensionMismatch {
            context: "conditional_mutual_information",
            expected: model.s_size() * model.x_size(),
            got: table.rows() * table.cols(),
        });
    }
    let mut total = 0.0;
    for s in 0..model.s_size() {
        let w = model.per_state_channel(s);
        let p = ProbVector::new(table.row(s).to_vec())?;
        total += model.state_dist().get(s) * crate::prob::mutual_information(&p, &w)?;
    }
    Ok(total.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generalized_erasure, sz_channel};

    fn bsc_matrix(q: f64) -> StochasticMatrix {
        StochasticMatrix::from_rows(vec![vec![1.0 - q, q], vec![q, 1.0 - q]]).unwrap()
    }

    #[test]
    fn ba_bsc() {
        let sol = ba_capacity(&bsc_matrix(0.1), 1e-10, 10_000);
        assert!(sol.converged);
        assert!((sol.value - 0.3680642071684971).abs() < 1e-9);
        let p = sol.argmax.dist().unwrap();
        assert!((p.get(0) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn ba_identical_rows_zero() {
        let w = StochasticMatrix::from_rows(vec![vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap();
        let sol = ba_capacity(&w, 1e-10, 1000);
        assert!(sol.value.abs() < 1e-12);
    }

    #[test]
    fn ba_z_channel() {
        // Z-channel with crossover 1/2 from the noisy input.
        let w = StochasticMatrix::from_rows(vec![vec![0.5, 0.5], vec![0.0, 1.0]]).unwrap();
        let sol = ba_capacity(&w, 1e-11, 100_000);
        assert!((sol.value - 0.22314355131420976).abs() < 1e-9);
    }

    #[test]
    fn ba_monotone_trace() {
        let (_, trace) = ba_capacity_trace(&bsc_matrix(0.2), 1e-10, 10_000);
        for pair in trace.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-12);
        }
    }

    #[test]
    fn no_csi_closed_form() {
        let model = sz_channel(0.5).unwrap();
        let sol = capacity_no_csi(&model);
        assert!(sol.converged);
        assert!((sol.value - 0.2157615543388357).abs() < 2e-9);
        // The maximizer is uniform for this symmetric model.
        let p = sol.argmax.dist().unwrap();
        assert!((p.get(0) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn no_csi_endpoints_in_theta() {
        let sol = capacity_no_csi(&sz_channel(0.0).unwrap());
        assert!((sol.value - std::f64::consts::LN_2).abs() < 2e-9);
        let sol = capacity_no_csi(&sz_channel(1.0).unwrap());
        assert!(sol.value.abs() < 1e-9);
    }

    #[test]
    fn full_csi_closed_form() {
        let model = sz_channel(0.5).unwrap();
        let sol = capacity_full_csi(&model);
        assert!((sol.value - 0.22314355131420976).abs() < 1e-10);
        let table = sol.argmax.table().unwrap();
        // Known optimum for this model: p(x = s | s) = 2/5.
        assert!((table.get(0, 0) - 0.4).abs() < 1e-9);
        assert!((table.get(1, 1) - 0.4).abs() < 1e-9);
        assert!((sol.value - conditional_mutual_information(&model, table).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn full_csi_single_input_is_zero() {
        let model = StateChannelModel::new(
            1,
            2,
            2,
            vec![vec![0.9, 0.1], vec![0.2, 0.8]],
            ProbVector::new(vec![0.5, 0.5]).unwrap(),
        )
        .unwrap();
        let sol = capacity_full_csi(&model);
        assert!(sol.value.abs() < 1e-12);
    }

    #[test]
    fn causal_interpolates_between_extremes() {
        let model = sz_channel(0.5).unwrap();
        let lower = capacity_no_csi(&model).value;
        let upper = capacity_full_csi(&model).value;

        let c0 = capacity_causal(&model, &generalized_erasure(0.0, 2).unwrap())
            .unwrap()
            .value;
        assert!((c0 - upper).abs() < 2e-9);

        let c1 = capacity_causal(&model, &generalized_erasure(1.0, 2).unwrap())
            .unwrap()
            .value;
        assert!((c1 - lower).abs() < 2e-9);

        let chalf = capacity_causal(&model, &generalized_erasure(0.5, 2).unwrap())
            .unwrap()
            .value;
        assert!((chalf - lower).abs() < 2e-9, "past the collapse threshold");
    }

    #[test]
    fn no_decoder_state_endpoints_for_the_additive_channel() {
        let model = crate::channel::xor_channel(0.25).unwrap();
        // ln 2 - H(S): the averaged channel is binary symmetric at mu.
        let expected = std::f64::consts::LN_2 - 0.5623351446188083;
        let (lower, causal) =
            capacity_no_decoder_csi(&model, &generalized_erasure(1.0, 2).unwrap()).unwrap();
        assert!((lower.value - expected).abs() < 2e-9);
        assert!((causal.value - expected).abs() < 2e-9);
        // A noiseless observation restores the full alphabet rate.
        let (_, causal) =
            capacity_no_decoder_csi(&model, &generalized_erasure(0.0, 2).unwrap()).unwrap();
        assert!((causal.value - std::f64::consts::LN_2).abs() < 2e-9);
    }

    #[test]
    fn binary_argmax_mass_exceeds_inverse_e() {
        // For binary inputs the optimizer of the no-side-information problem
        // keeps both letters above 1/e once reduced to its active support.
        for &theta in &[0.2, 0.5, 0.8] {
            let sol = capacity_no_csi(&sz_channel(theta).unwrap());
            let p = sol.argmax.dist().unwrap();
            assert!(p.get(0) > (-1.0f64).exp());
            assert!(p.get(1) > (-1.0f64).exp());
        }
    }

    #[test]
    fn kkt_certificate_holds() {
        let model = sz_channel(0.3).unwrap();
        let side = generalized_erasure(0.2, 2).unwrap();
        let sol = capacity_causal(&model, &side).unwrap();
        assert!(sol.converged);
        let p = sol.argmax.dist().unwrap();
        for (u, &d) in sol.per_letter_divergence.iter().enumerate() {
            if p.get(u) > ACTIVE_TOL {
                assert!((d - sol.value).abs() <= sol.gap_bound + 1e-15, "u={u}");
            } else {
                assert!(d <= sol.value + sol.gap_bound + 1e-15, "u={u}");
            }
        }
    }
}
