//! Stochastic-degradation tests and witnesses.
//!
//! Side channel `A` is a stochastically degraded version of `B` when `A`
//! equals `B` followed by some stochastic post-processing. For the erasure
//! family the ordering has a closed form; the general case is a linear
//! feasibility problem solved by the two-phase simplex. Estimator channels
//! (maximum-likelihood and maximum a posteriori) and the singular-value
//! certificate connect degradation to conditional-entropy thresholds.

use crate::channel::SideChannel;
use crate::error::{Error, Result};
use crate::prob::{xlnx, JointTable, ProbVector, StochasticMatrix};
use crate::simplex;

/// Residual above which an LP outcome is reported as not degraded even though
/// phase 1 nearly closed; such verdicts carry the `indeterminate` flag.
pub const INDETERMINATE_TOL: f64 = 1e-6;

/// Outcome of a degradation test.
#[derive(Debug, Clone)]
pub struct DegradationVerdict {
    pub degraded: bool,
    /// Post-processing channel reproducing the target from the source.
    pub witness: Option<StochasticMatrix>,
    /// Maximum violation of the composition equalities (or the phase-1
    /// residual when infeasible).
    pub residual: f64,
    /// Set when the LP landed between the feasibility and rejection
    /// tolerances; such cases are reported as not degraded.
    pub indeterminate: bool,
}

/// `sum_{s~} min_s p(s~|s)`, in `[0, 1]`.
///
/// The side channel is a stochastically degraded version of the generalized
/// erasure channel with parameter `epsilon` exactly when this margin is at
/// least `epsilon`.
pub fn erasure_margin(side: &SideChannel) -> f64 {
    side.matrix().column_min().iter().sum()
}

/// Closed-form erasure-family degradation test with witness construction.
///
/// When the margin permits, the witness sends the revealed state `s` to the
/// row `(p(s~|s) - eps r(s~)) / (1 - eps)` and the erasure symbol to `r`,
/// where `r` is the columnwise-minimum vector normalized by the margin.
pub fn erasure_degradation_witness(side: &SideChannel, epsilon: f64) -> Result<DegradationVerdict> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let margin = erasure_margin(side);
    if margin < epsilon {
        return Ok(DegradationVerdict {
            degraded: false,
            witness: None,
            residual: epsilon - margin,
            indeterminate: false,
        });
    }
    let s_size = side.state_size();
    let obs = side.obs_size();
    let mins = side.matrix().column_min();
    let star_row: Vec<f64> = if margin > 0.0 {
        mins.iter().map(|&v| v / margin).collect()
    } else {
        vec![1.0 / obs as f64; obs]
    };
    let mut rows = Vec::with_capacity(s_size + 1);
    if epsilon < 1.0 {
        for s in 0..s_size {
            let row: Vec<f64> = (0..obs)
                .map(|o| ((side.get(o, s) - epsilon * star_row[o]) / (1.0 - epsilon)).max(0.0))
                .collect();
            rows.push(row);
        }
    } else {
        // Margin 1 forces all side rows equal, so any row works here; the
        // composition only uses the erasure row.
        for _ in 0..s_size {
            rows.push(star_row.clone());
        }
    }
    rows.push(star_row);
    let witness = StochasticMatrix::from_rows(rows)?;
    let ge = crate::channel::generalized_erasure(epsilon, s_size)?;
    let composed = ge.matrix().compose(&witness)?;
    let mut residual = 0.0f64;
    for s in 0..s_size {
        for o in 0..obs {
            residual = residual.max((composed.get(s, o) - side.get(o, s)).abs());
        }
    }
    Ok(DegradationVerdict {
        degraded: true,
        witness: Some(witness),
        residual,
        indeterminate: false,
    })
}

/// Linear feasibility test: is `target` a stochastically degraded version of
/// `source`? Both must share the input alphabet `S`.
///
/// Solves for a post-processing matrix `W >= 0` with stochastic rows such
/// that `source . W = target`, using the exact two-phase simplex.
pub fn stochastic_degradation_lp(
    target: &SideChannel,
    source: &SideChannel,
) -> Result<DegradationVerdict> {
    if target.state_size() != source.state_size() {
        return Err(Error::DimensionMismatch {
            context: "stochastic_degradation_lp",
            expected: source.state_size(),
            got: target.state_size(),
        });
    }
    let s_size = target.state_size();
    let t_out = target.obs_size();
    let s_out = source.obs_size();
    let nvars = s_out * t_out; // w[o2][o1], o2-major.

    let mut a = Vec::with_capacity(s_size * t_out + s_out);
    let mut b = Vec::with_capacity(a.capacity());
    for s in 0..s_size {
        for o1 in 0..t_out {
            let mut row = vec![0.0; nvars];
            for o2 in 0..s_out {
                row[o2 * t_out + o1] = source.get(o2, s);
            }
            a.push(row);
            b.push(target.get(o1, s));
        }
    }
    for o2 in 0..s_out {
        let mut row = vec![0.0; nvars];
        for o1 in 0..t_out {
            row[o2 * t_out + o1] = 1.0;
        }
        a.push(row);
        b.push(1.0);
    }

    let (phase1, point) = simplex::feasible_point(&a, &b);
    let Some(x) = point else {
        let indeterminate = phase1 <= INDETERMINATE_TOL;
        return Ok(DegradationVerdict {
            degraded: false,
            witness: None,
            residual: phase1,
            indeterminate,
        });
    };
    let witness = StochasticMatrix::new(s_out, t_out, x)?;
    let composed = source.matrix().compose(&witness)?;
    let mut residual = 0.0f64;
    for s in 0..s_size {
        for o1 in 0..t_out {
            residual = residual.max((composed.get(s, o1) - target.get(o1, s)).abs());
        }
    }
    if residual > INDETERMINATE_TOL {
        return Ok(DegradationVerdict {
            degraded: false,
            witness: None,
            residual,
            indeterminate: true,
        });
    }
    Ok(DegradationVerdict {
        degraded: true,
        witness: Some(witness),
        residual,
        indeterminate: false,
    })
}

/// A deterministic estimate of the state from the observation, folded with
/// the side channel into the estimator channel `p(s^ | s)`.
#[derive(Debug, Clone)]
pub struct EstimatorChannel {
    /// `assignment[s~] = s^`: the estimate for each observation symbol.
    pub assignment: Vec<usize>,
    /// The estimator channel `S -> S^` (rows indexed by the true state).
    pub matrix: StochasticMatrix,
    /// Estimates that receive positive column mass.
    pub support: Vec<usize>,
}

/// Maximum-likelihood estimator: `s^(s~) = argmax_s p(s~|s)`, ties to the
/// lowest state index.
pub fn ml_estimator(side: &SideChannel) -> EstimatorChannel {
    build_estimator(side, |o, s| side.get(o, s))
}

/// Maximum a posteriori estimator: `s^(s~) = argmax_s p_S(s) p(s~|s)`, same
/// tie rule.
pub fn map_estimator(p_s: &ProbVector, side: &SideChannel) -> EstimatorChannel {
    build_estimator(side, |o, s| p_s.get(s) * side.get(o, s))
}

fn build_estimator(side: &SideChannel, weight: impl Fn(usize, usize) -> f64) -> EstimatorChannel {
    let s_size = side.state_size();
    let assignment: Vec<usize> = (0..side.obs_size())
        .map(|o| {
            let mut best = 0;
            let mut best_w = weight(o, 0);
            for s in 1..s_size {
                let w = weight(o, s);
                if w > best_w {
                    best = s;
                    best_w = w;
                }
            }
            best
        })
        .collect();
    let mut data = vec![0.0; s_size * s_size];
    for s in 0..s_size {
        for (o, &est) in assignment.iter().enumerate() {
            data[s * s_size + est] += side.get(o, s);
        }
    }
    let matrix = StochasticMatrix::new(s_size, s_size, data).expect("rows are stochastic");
    let support = matrix
        .column_sum()
        .iter()
        .enumerate()
        .filter(|&(_, &m)| m > 0.0)
        .map(|(i, _)| i)
        .collect();
    EstimatorChannel {
        assignment,
        matrix,
        support,
    }
}

impl EstimatorChannel {
    /// Total off-diagonal mass `sum_{s != s^} p(s^|s)`.
    pub fn offdiagonal_mass(&self) -> f64 {
        let n = self.matrix.rows();
        let mut total = 0.0;
        for s in 0..n {
            for e in 0..n {
                if e != s {
                    total += self.matrix.get(s, e);
                }
            }
        }
        total
    }

    /// Probability of a wrong estimate under the state distribution.
    pub fn error_probability(&self, p_s: &ProbVector) -> f64 {
        let n = self.matrix.rows();
        1.0 - (0..n).map(|s| p_s.get(s) * self.matrix.get(s, s)).sum::<f64>()
    }

    /// `max_{s != s^, s^ in S_+} p(s^|s) / sum_{s'} p(s^|s')`.
    pub fn offdiagonal_ratio(&self) -> f64 {
        let n = self.matrix.rows();
        let col_sums = self.matrix.column_sum();
        let mut worst = 0.0f64;
        for &est in &self.support {
            for s in 0..n {
                if s != est {
                    worst = worst.max(self.matrix.get(s, est) / col_sums[est]);
                }
            }
        }
        worst
    }
}

/// Exact inverse of the generalized symmetric channel: diagonal
/// `(q-1)/(|S|q-1)`, off-diagonal `q/(|S|q-1)`. Singular at `q = 1/|S|`.
pub fn gs_inverse(q: f64, state_size: usize) -> Result<Vec<Vec<f64>>> {
    let hi = 1.0 / state_size as f64;
    if !(0.0..hi).contains(&q) {
        if q == hi {
            return Err(Error::Singular);
        }
        return Err(Error::OutOfRange {
            name: "q",
            value: q,
            lo: 0.0,
            hi,
        });
    }
    let denom = state_size as f64 * q - 1.0;
    let diag = (q - 1.0) / denom;
    let off = q / denom;
    Ok((0..state_size)
        .map(|i| {
            (0..state_size)
                .map(|j| if i == j { diag } else { off })
                .collect()
        })
        .collect())
}

/// Mass threshold below which an input column counts as unused.
pub const SUPPORT_TOL: f64 = 1e-9;

/// The smallest share `p(x|s) / sum_{s'} p(x|s')` over used inputs and all
/// states. The table is a stochastically degraded version of the generalized
/// symmetric channel with crossover `q` exactly when this is at least `q`.
pub fn symmetric_degradation_threshold(table: &StochasticMatrix) -> f64 {
    let col_sums = table.column_sum();
    let mut worst = f64::INFINITY;
    for x in 0..table.cols() {
        if col_sums[x] <= SUPPORT_TOL {
            continue;
        }
        for s in 0..table.rows() {
            worst = worst.min(table.get(s, x) / col_sums[x]);
        }
    }
    if worst.is_finite() {
        worst
    } else {
        0.0
    }
}

/// Whether `table` (rows indexed by the state) is reachable from the
/// generalized symmetric channel with crossover `q`.
pub fn symmetric_degradation_condition(table: &StochasticMatrix, q: f64) -> bool {
    symmetric_degradation_threshold(table) >= q
}

/// Sufficient threshold from the maximum-likelihood estimator: the
/// generalized symmetric channel with crossover `q` is a stochastically
/// degraded version of `side` for every `q` at least the returned value (and
/// at most `1/|S|`). Sufficiency comes from the M-matrix structure of the
/// inverted estimator channel; the condition is not necessary.
pub fn ml_cover_threshold(side: &SideChannel) -> f64 {
    ml_estimator(side).offdiagonal_ratio()
}

/// Conditional-entropy certificate for degradation of a conditional input
/// table from a side channel.
#[derive(Debug, Clone)]
pub struct EntropyCertificate {
    /// `tau = min_{x in X_+} (min_s p(x|s)) / (max_s p(x|s))`.
    pub tau: f64,
    /// Lower bound on the smallest singular value of the ML estimator
    /// channel: `1 - 3 H(S|S~) / (4 rho ln 2)`.
    pub sigma_min_lower: f64,
    /// Threshold `4 tau rho ln 2 / (3 tau + 2 sqrt(2|S|))` on `H(S|S~)`.
    pub threshold: f64,
    /// Whether `H(S|S~)` is at or below the threshold, certifying that the
    /// table is a stochastically degraded version of the side channel.
    pub holds: bool,
    /// The conditional entropy `H(S|S~)` itself, in nats.
    pub conditional_entropy: f64,
}

/// Evaluates the singular-value certificate for `table` (rows indexed by the
/// state) against the side channel.
pub fn conditional_entropy_certificate(
    p_s: &ProbVector,
    side: &SideChannel,
    table: &StochasticMatrix,
) -> Result<EntropyCertificate> {
    let joint = JointTable::from_input_and_channel(p_s, side.matrix())?;
    let (h_cond, _) = crate::prob::conditional_entropy_and_mi(&joint)?;
    let rho = p_s.min();
    let ln2 = std::f64::consts::LN_2;
    let col_sums = table.column_sum();
    let mut tau = f64::INFINITY;
    for x in 0..table.cols() {
        if col_sums[x] <= SUPPORT_TOL {
            continue;
        }
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for s in 0..table.rows() {
            lo = lo.min(table.get(s, x));
            hi = hi.max(table.get(s, x));
        }
        tau = tau.min(if hi > 0.0 { lo / hi } else { 0.0 });
    }
    if !tau.is_finite() {
        tau = 0.0;
    }
    let s_size = side.state_size() as f64;
    let sigma_min_lower = 1.0 - 3.0 * h_cond / (4.0 * rho * ln2);
    let threshold = 4.0 * tau * rho * ln2 / (3.0 * tau + 2.0 * (2.0 * s_size).sqrt());
    Ok(EntropyCertificate {
        tau,
        sigma_min_lower,
        threshold,
        holds: h_cond <= threshold,
        conditional_entropy: h_cond,
    })
}

/// `H(S|S~)` of the joint induced by `p_s` and the side channel, in nats.
pub fn conditional_state_entropy(p_s: &ProbVector, side: &SideChannel) -> Result<f64> {
    // H(S|S~) = H(S) + H(S~|S) - H(S~).
    let mut h_obs_given_s = 0.0;
    let mut obs = vec![0.0; side.obs_size()];
    for s in 0..side.state_size() {
        let ps = p_s.get(s);
        let mut row_entropy = 0.0;
        for o in 0..side.obs_size() {
            let v = side.get(o, s);
            row_entropy -= xlnx(v);
            obs[o] += ps * v;
        }
        h_obs_given_s += ps * row_entropy;
    }
    let h_obs = -obs.iter().map(|&v| xlnx(v)).sum::<f64>();
    let h_s = -p_s.iter().map(|&v| xlnx(v)).sum::<f64>();
    Ok((h_s + h_obs_given_s - h_obs).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generalized_erasure, generalized_symmetric};

    fn bsc(q: f64) -> SideChannel {
        generalized_symmetric(q, 2).unwrap()
    }

    #[test]
    fn margin_values() {
        assert_eq!(erasure_margin(&SideChannel::identity(3)), 0.0);
        assert!((erasure_margin(&bsc(0.1)) - 0.2).abs() < 1e-15);
        let uniform = SideChannel::new(
            StochasticMatrix::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(),
        );
        assert!((erasure_margin(&uniform) - 1.0).abs() < 1e-15);
        // The erasure channel itself has margin epsilon.
        assert!((erasure_margin(&generalized_erasure(0.35, 3).unwrap()) - 0.35).abs() < 1e-15);
    }

    #[test]
    fn erasure_witness_cases() {
        let v = erasure_degradation_witness(&bsc(0.2), 0.4).unwrap();
        assert!(v.degraded);
        assert!(v.residual <= 1e-12);

        let v = erasure_degradation_witness(&bsc(0.1), 0.5).unwrap();
        assert!(!v.degraded);

        // At epsilon = 1 only channels with identical rows qualify.
        let uniform = SideChannel::new(
            StochasticMatrix::from_rows(vec![vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap(),
        );
        let v = erasure_degradation_witness(&uniform, 1.0).unwrap();
        assert!(v.degraded);
        assert!(v.residual <= 1e-12);
        let v = erasure_degradation_witness(&bsc(0.1), 1.0).unwrap();
        assert!(!v.degraded);
    }

    #[test]
    fn lp_self_degradation_gives_identityish_witness() {
        let side = bsc(0.15);
        let v = stochastic_degradation_lp(&side, &side).unwrap();
        assert!(v.degraded);
        assert!(v.residual <= 1e-9);
    }

    #[test]
    fn lp_erasure_ordering() {
        let worse = generalized_erasure(0.7, 2).unwrap();
        let better = generalized_erasure(0.3, 2).unwrap();
        let v = stochastic_degradation_lp(&worse, &better).unwrap();
        assert!(v.degraded);
        assert!(v.residual <= 1e-9);
        // A noisy channel cannot be refined back to noiseless.
        let v = stochastic_degradation_lp(&SideChannel::identity(2), &bsc(0.1)).unwrap();
        assert!(!v.degraded);
    }

    #[test]
    fn ml_estimator_cases() {
        let est = ml_estimator(&bsc(0.1));
        assert_eq!(est.assignment, vec![0, 1]);
        assert_eq!(est.matrix, bsc(0.1).matrix().clone());

        let uniform = SideChannel::new(
            StochasticMatrix::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(),
        );
        let est = ml_estimator(&uniform);
        assert_eq!(est.assignment, vec![0, 0]);
        assert_eq!(est.support, vec![0]);

        let est = ml_estimator(&generalized_erasure(0.3, 2).unwrap());
        assert_eq!(est.assignment, vec![0, 1, 0]);
        assert!((est.matrix.get(1, 0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn map_estimator_uses_prior() {
        let p_s = ProbVector::new(vec![0.9, 0.1]).unwrap();
        // Under a heavily skewed prior every observation maps to state 0.
        let est = map_estimator(&p_s, &bsc(0.2));
        assert_eq!(est.assignment, vec![0, 0]);
    }

    #[test]
    fn gs_inverse_cases() {
        let inv = gs_inverse(0.0, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(inv[i][j], if i == j { 1.0 } else { 0.0 });
            }
        }
        let inv = gs_inverse(0.1, 2).unwrap();
        assert!((inv[0][0] - 0.9 / 0.8).abs() < 1e-12);
        assert!((inv[0][1] + 0.1 / 0.8).abs() < 1e-12);
        let inv = gs_inverse(0.2, 3).unwrap();
        assert!((inv[0][0] - 2.0).abs() < 1e-12);
        assert!((inv[0][1] + 0.5).abs() < 1e-12);
        assert!(matches!(gs_inverse(0.5, 2), Err(Error::Singular)));

        // Product with the forward channel is the identity.
        for &(q, n) in &[(0.05, 2), (0.2, 3), (0.3, 2)] {
            let inv = gs_inverse(q, n).unwrap();
            let fwd = generalized_symmetric(q, n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let mut v = 0.0;
                    for k in 0..n {
                        v += inv[i][k] * fwd.get(j, k);
                    }
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() < 1e-12, "q={q} n={n}");
                }
            }
        }
    }

    #[test]
    fn share_threshold_cases() {
        // X independent of S: every ratio is 1/|S|.
        let table = StochasticMatrix::from_rows(vec![vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap();
        assert!((symmetric_degradation_threshold(&table) - 0.5).abs() < 1e-12);
        assert!(symmetric_degradation_condition(&table, 0.5));

        // A zero entry in a used column pins the threshold at zero.
        let table = StochasticMatrix::from_rows(vec![vec![0.0, 1.0], vec![0.5, 0.5]]).unwrap();
        assert_eq!(symmetric_degradation_threshold(&table), 0.0);
        assert!(symmetric_degradation_condition(&table, 0.0));
        assert!(!symmetric_degradation_condition(&table, 0.01));
    }

    #[test]
    fn ml_cover_threshold_cases() {
        assert_eq!(ml_cover_threshold(&SideChannel::identity(2)), 0.0);
        assert!((ml_cover_threshold(&bsc(0.1)) - 0.1).abs() < 1e-12);
        let uniform = SideChannel::new(
            StochasticMatrix::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(),
        );
        assert!((ml_cover_threshold(&uniform) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn entropy_certificate_cases() {
        let p_s = ProbVector::new(vec![0.5, 0.5]).unwrap();
        let table = StochasticMatrix::from_rows(vec![vec![0.4, 0.6], vec![0.6, 0.4]]).unwrap();
        // Noiseless observation: certificate always holds.
        let cert =
            conditional_entropy_certificate(&p_s, &SideChannel::identity(2), &table).unwrap();
        assert!(cert.holds);
        assert!(cert.conditional_entropy.abs() < 1e-12);

        // X independent of S gives tau = 1.
        let flat = StochasticMatrix::from_rows(vec![vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap();
        let cert = conditional_entropy_certificate(&p_s, &bsc(0.01), &flat).unwrap();
        assert!((cert.tau - 1.0).abs() < 1e-12);
        let expected = 4.0 * 0.5 * std::f64::consts::LN_2 / (3.0 + 2.0 * 4.0f64.sqrt());
        assert!((cert.threshold - expected).abs() < 1e-12);
    }
}
