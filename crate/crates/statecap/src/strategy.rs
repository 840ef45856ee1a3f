//! Shannon strategies: deterministic maps from the encoder's observation to
//! the channel input, and the induced channel over the strategy alphabet.
//!
//! A strategy table enumerates all `|X|^{|S~|}` maps `psi(u, .): S~ -> X` with
//! a canonical ordering: the first `|X|` entries are the constant maps
//! `psi(u, .) = u`, which ignore the observation. Selecting a strategy index
//! `u` turns causal side information into an ordinary memoryless channel
//! from `U` to `(Y, S)`.

use crate::channel::{SideChannel, StateChannelModel};
use crate::error::{Error, Result};
use crate::prob::StochasticMatrix;

/// Default cap on the number of enumerated strategies.
pub const DEFAULT_ENUMERATION_CAP: usize = 4096;

/// Membership tolerance for the inert sets: a strategy counts as inert when
/// the largest perturbation entry is below this. The entries are differences
/// of exact table values, so anything nonzero is far larger.
pub const INERT_TOL: f64 = 1e-10;

/// The enumeration of all maps `S~ -> X`, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyTable {
    x_size: usize,
    s_tilde_size: usize,
    /// `table[u * s_tilde_size + s_tilde] = psi(u, s_tilde)`.
    table: Vec<usize>,
}

// Fixed ordering for the binary three-observation table (the erased-state
// case with |X| = |S| = 2). The first two rows are the constant maps.
const BINARY_ERASED_ORDER: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 1, 1],
    [1, 1, 0],
    [0, 0, 1],
    [0, 1, 0],
    [0, 1, 1],
    [1, 0, 0],
    [1, 0, 1],
];

impl StrategyTable {
    pub fn enumerate(x_size: usize, s_tilde_size: usize) -> Result<Self> {
        Self::enumerate_capped(x_size, s_tilde_size, DEFAULT_ENUMERATION_CAP)
    }

    pub fn enumerate_capped(x_size: usize, s_tilde_size: usize, cap: usize) -> Result<Self> {
        if x_size == 0 || s_tilde_size == 0 {
            return Err(Error::DimensionMismatch {
                context: "StrategyTable::enumerate",
                expected: 1,
                got: 0,
            });
        }
        let needed = (x_size as u128).pow(s_tilde_size as u32);
        if needed > cap as u128 {
            return Err(Error::EnumerationCap { needed, cap });
        }
        let count = needed as usize;

        if x_size == 2 && s_tilde_size == 3 {
            let table = BINARY_ERASED_ORDER.iter().flatten().copied().collect();
            return Ok(Self {
                x_size,
                s_tilde_size,
                table,
            });
        }

        // Constant maps first, then the rest in lexicographic digit order
        // (the observation s~ = 0 is the most significant digit).
        let mut table = Vec::with_capacity(count * s_tilde_size);
        for u in 0..x_size {
            table.extend(std::iter::repeat(u).take(s_tilde_size));
        }
        let mut digits = vec![0usize; s_tilde_size];
        for _ in 0..count {
            if digits.iter().any(|&d| d != digits[0]) {
                table.extend_from_slice(&digits);
            }
            for pos in (0..s_tilde_size).rev() {
                digits[pos] += 1;
                if digits[pos] < x_size {
                    break;
                }
                digits[pos] = 0;
            }
        }
        Ok(Self {
            x_size,
            s_tilde_size,
            table,
        })
    }

    /// Number of strategies, `|U| = |X|^{|S~|}`.
    pub fn count(&self) -> usize {
        self.table.len() / self.s_tilde_size
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn s_tilde_size(&self) -> usize {
        self.s_tilde_size
    }

    /// `psi(u, s_tilde)`.
    pub fn action(&self, u: usize, s_tilde: usize) -> usize {
        self.table[u * self.s_tilde_size + s_tilde]
    }

    pub fn row(&self, u: usize) -> &[usize] {
        &self.table[u * self.s_tilde_size..(u + 1) * self.s_tilde_size]
    }
}

/// The channel `U -> (Y, S)` induced by a strategy table and a side channel:
/// `p(y, s | u) = sum_{s~} p_S(s) p(s~|s) p(y | psi(u, s~), s)`, with the
/// joint output index linearized y-major.
pub fn induced_channel(
    model: &StateChannelModel,
    side: &SideChannel,
    strategies: &StrategyTable,
) -> Result<StochasticMatrix> {
    if side.state_size() != model.s_size() {
        return Err(Error::DimensionMismatch {
            context: "induced_channel side",
            expected: model.s_size(),
            got: side.state_size(),
        });
    }
    if strategies.s_tilde_size() != side.obs_size() || strategies.x_size() != model.x_size() {
        return Err(Error::DimensionMismatch {
            context: "induced_channel strategies",
            expected: side.obs_size(),
            got: strategies.s_tilde_size(),
        });
    }
    let cols = model.y_size() * model.s_size();
    let mut data = vec![0.0; strategies.count() * cols];
    for u in 0..strategies.count() {
        let base = u * cols;
        for s in 0..model.s_size() {
            let ps = model.state_dist().get(s);
            for s_tilde in 0..side.obs_size() {
                let w = ps * side.get(s_tilde, s);
                if w == 0.0 {
                    continue;
                }
                let x = strategies.action(u, s_tilde);
                for y in 0..model.y_size() {
                    data[base + y * model.s_size() + s] += w * model.transition(y, x, s);
                }
            }
        }
    }
    StochasticMatrix::new(strategies.count(), cols, data)
}

/// Which one-parameter side-channel family a perturbation table describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationFamily {
    /// Erased-state family; the strategy table must include the erasure
    /// column as its last observation symbol.
    Erasure,
    /// Symmetric-crossover family; the strategy table is over `S~ = S`.
    Symmetric,
}

/// First-order response of the induced channel to the family parameter.
///
/// For the erasure family the entry at `(u, y, s)` is
/// `p(y | psi(u, *), s) - p(y | psi(u, s), s)`; for the symmetric family it is
/// `sum_{s' != s} p(y | psi(u, s'), s) - (|S| - 1) p(y | psi(u, s), s)`.
/// Rows sum to zero over `y` for every `(u, s)`. Strategies whose table is
/// identically zero are "inert": their divergence does not depend on the
/// parameter. Constant strategies are always inert.
#[derive(Debug, Clone)]
pub struct PerturbationTables {
    family: PerturbationFamily,
    y_size: usize,
    s_size: usize,
    entries: Vec<f64>,
    inert: Vec<bool>,
}

impl PerturbationTables {
    pub fn family(&self) -> PerturbationFamily {
        self.family
    }

    /// The perturbation entry at `(u, y, s)`.
    pub fn value(&self, u: usize, y: usize, s: usize) -> f64 {
        self.entries[(u * self.y_size + y) * self.s_size + s]
    }

    /// Whether strategy `u` has an identically-zero perturbation.
    pub fn is_inert(&self, u: usize) -> bool {
        self.inert[u]
    }

    /// Indices of all inert strategies.
    pub fn inert_set(&self) -> Vec<usize> {
        (0..self.inert.len()).filter(|&u| self.inert[u]).collect()
    }
}

/// Builds the perturbation table for a strategy enumeration under one of the
/// two side-channel families.
pub fn perturbation_tables(
    model: &StateChannelModel,
    strategies: &StrategyTable,
    family: PerturbationFamily,
) -> Result<PerturbationTables> {
    let expected_obs = match family {
        PerturbationFamily::Erasure => model.s_size() + 1,
        PerturbationFamily::Symmetric => model.s_size(),
    };
    if strategies.s_tilde_size() != expected_obs || strategies.x_size() != model.x_size() {
        return Err(Error::DimensionMismatch {
            context: "perturbation_tables strategies",
            expected: expected_obs,
            got: strategies.s_tilde_size(),
        });
    }
    let count = strategies.count();
    let mut entries = vec![0.0; count * model.y_size() * model.s_size()];
    let mut inert = vec![true; count];
    for u in 0..count {
        let mut max_abs = 0.0f64;
        for y in 0..model.y_size() {
            for s in 0..model.s_size() {
                let own = model.transition(y, strategies.action(u, s), s);
                let v = match family {
                    PerturbationFamily::Erasure => {
                        model.transition(y, strategies.action(u, model.s_size()), s) - own
                    }
                    PerturbationFamily::Symmetric => {
                        let others: f64 = (0..model.s_size())
                            .filter(|&o| o != s)
                            .map(|o| model.transition(y, strategies.action(u, o), s))
                            .sum();
                        others - (model.s_size() as f64 - 1.0) * own
                    }
                };
                entries[(u * model.y_size() + y) * model.s_size() + s] = v;
                max_abs = max_abs.max(v.abs());
            }
        }
        inert[u] = max_abs < INERT_TOL;
    }
    Ok(PerturbationTables {
        family,
        y_size: model.y_size(),
        s_size: model.s_size(),
        entries,
        inert,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generalized_erasure, sz_channel};
    use crate::prob::ProbVector;

    #[test]
    fn binary_two_observation_table() {
        let t = StrategyTable::enumerate(2, 2).unwrap();
        assert_eq!(t.count(), 4);
        assert_eq!(t.row(0), &[0, 0]);
        assert_eq!(t.row(1), &[1, 1]);
        assert_eq!(t.row(2), &[0, 1]);
        assert_eq!(t.row(3), &[1, 0]);
    }

    #[test]
    fn binary_three_observation_table() {
        let t = StrategyTable::enumerate(2, 3).unwrap();
        assert_eq!(t.count(), 8);
        let expected: [[usize; 3]; 8] = [
            [0, 0, 0],
            [1, 1, 1],
            [1, 1, 0],
            [0, 0, 1],
            [0, 1, 0],
            [0, 1, 1],
            [1, 0, 0],
            [1, 0, 1],
        ];
        for (u, row) in expected.iter().enumerate() {
            assert_eq!(t.row(u), row, "u = {u}");
        }
    }

    #[test]
    fn single_input_single_strategy() {
        let t = StrategyTable::enumerate(1, 3).unwrap();
        assert_eq!(t.count(), 1);
        assert_eq!(t.row(0), &[0, 0, 0]);
    }

    #[test]
    fn constants_first_and_distinct_in_general() {
        let t = StrategyTable::enumerate(3, 2).unwrap();
        assert_eq!(t.count(), 9);
        for u in 0..3 {
            assert!(t.row(u).iter().all(|&x| x == u));
        }
        let mut rows: Vec<_> = (0..9).map(|u| t.row(u).to_vec()).collect();
        rows.sort();
        rows.dedup();
        assert_eq!(rows.len(), 9);
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(
            StrategyTable::enumerate(2, 13),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn induced_rows_are_distributions_with_state_marginal() {
        let model = sz_channel(0.3).unwrap();
        let side = generalized_erasure(0.4, 2).unwrap();
        let strategies = StrategyTable::enumerate(2, 3).unwrap();
        let w = induced_channel(&model, &side, &strategies).unwrap();
        assert_eq!(w.rows(), 8);
        assert_eq!(w.cols(), 4);
        for u in 0..8 {
            let total: f64 = w.row(u).iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            for s in 0..2 {
                let marg: f64 = (0..2).map(|y| w.get(u, y * 2 + s)).sum();
                assert!((marg - model.state_dist().get(s)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_strategy_rows_ignore_the_side_channel() {
        let model = sz_channel(0.3).unwrap();
        let side = generalized_erasure(0.7, 2).unwrap();
        let strategies = StrategyTable::enumerate(2, 3).unwrap();
        let w = induced_channel(&model, &side, &strategies).unwrap();
        for u in 0..2 {
            for y in 0..2 {
                for s in 0..2 {
                    let direct = model.state_dist().get(s) * model.transition(y, u, s);
                    assert!((w.get(u, y * 2 + s) - direct).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn fully_erased_rows_are_mixtures_of_constant_rows() {
        let model = sz_channel(0.3).unwrap();
        let side = generalized_erasure(1.0, 2).unwrap();
        let strategies = StrategyTable::enumerate(2, 3).unwrap();
        let w = induced_channel(&model, &side, &strategies).unwrap();
        for u in 0..8 {
            let c = strategies.action(u, 2);
            for col in 0..4 {
                assert!((w.get(u, col) - w.get(c, col)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn erasure_identity_relates_induced_channel_and_perturbation() {
        let model = sz_channel(0.5).unwrap();
        let strategies = StrategyTable::enumerate(2, 3).unwrap();
        let pert =
            perturbation_tables(&model, &strategies, PerturbationFamily::Erasure).unwrap();
        for &eps in &[0.0, 0.25, 0.5, 1.0] {
            let side = generalized_erasure(eps, 2).unwrap();
            let w = induced_channel(&model, &side, &strategies).unwrap();
            for u in 0..8 {
                for y in 0..2 {
                    for s in 0..2 {
                        let expected = model.state_dist().get(s)
                            * (model.transition(y, strategies.action(u, s), s)
                                + eps * pert.value(u, y, s));
                        assert!((w.get(u, y * 2 + s) - expected).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn perturbation_rows_sum_to_zero_and_constants_are_inert() {
        let model = sz_channel(0.3).unwrap();
        for (family, obs) in [
            (PerturbationFamily::Erasure, 3),
            (PerturbationFamily::Symmetric, 2),
        ] {
            let strategies = StrategyTable::enumerate(2, obs).unwrap();
            let pert = perturbation_tables(&model, &strategies, family).unwrap();
            for u in 0..strategies.count() {
                for s in 0..2 {
                    let sum: f64 = (0..2).map(|y| pert.value(u, y, s)).sum();
                    assert!(sum.abs() < 1e-12);
                }
            }
            assert!(pert.is_inert(0) && pert.is_inert(1));
        }
    }

    #[test]
    fn symmetric_perturbation_matches_two_state_form() {
        let model = sz_channel(0.3).unwrap();
        let strategies = StrategyTable::enumerate(2, 2).unwrap();
        let pert =
            perturbation_tables(&model, &strategies, PerturbationFamily::Symmetric).unwrap();
        for u in 0..4 {
            for y in 0..2 {
                for s in 0..2 {
                    let expected = model.transition(y, strategies.action(u, 1 - s), s)
                        - model.transition(y, strategies.action(u, s), s);
                    assert!((pert.value(u, y, s) - expected).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn uninformative_side_gives_mixture_rows() {
        // With every observation row identical the induced row of any
        // strategy is a mixture of constant-strategy rows.
        let model = sz_channel(0.4).unwrap();
        let side = SideChannel::new(
            crate::prob::StochasticMatrix::from_rows(vec![
                vec![0.2, 0.3, 0.5],
                vec![0.2, 0.3, 0.5],
            ])
            .unwrap(),
        );
        let strategies = StrategyTable::enumerate(2, 3).unwrap();
        let w = induced_channel(&model, &side, &strategies).unwrap();
        let weights = ProbVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        for u in 0..8 {
            for col in 0..4 {
                let mix: f64 = (0..3)
                    .map(|o| weights.get(o) * w.get(strategies.action(u, o), col))
                    .sum();
                assert!((w.get(u, col) - mix).abs() < 1e-12);
            }
        }
    }
}
