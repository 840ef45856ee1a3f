//! State-dependent channel models and side channels.
//!
//! A [`StateChannelModel`] is the triple `(p_{Y|X,S}, p_S)` together with its
//! alphabet sizes; a [`SideChannel`] is the stochastic map from the true state
//! `S` to the encoder's observation `S~`.

use crate::error::{Error, Result};
use crate::prob::{ProbVector, StochasticMatrix};

/// A finite memoryless channel with state: `p_{Y|X,S}` plus the state
/// distribution `p_S`.
///
/// Transition rows are stored in `(x, s)` order, x-major. Every state must
/// have strictly positive probability; callers holding a state with zero mass
/// should merge it away before constructing the model.
#[derive(Debug, Clone, PartialEq)]
pub struct StateChannelModel {
    x_size: usize,
    y_size: usize,
    s_size: usize,
    /// `transition[(x * s_size + s) * y_size + y] = p(y | x, s)`.
    transition: Vec<f64>,
    state_dist: ProbVector,
}

impl StateChannelModel {
    /// Builds a model from `|X| * |S|` transition rows in x-major, s-minor
    /// order, each a distribution over `Y`.
    pub fn new(
        x_size: usize,
        y_size: usize,
        s_size: usize,
        rows: Vec<Vec<f64>>,
        state_dist: ProbVector,
    ) -> Result<Self> {
        if rows.len() != x_size * s_size {
            return Err(Error::DimensionMismatch {
                context: "StateChannelModel rows",
                expected: x_size * s_size,
                got: rows.len(),
            });
        }
        if state_dist.dim() != s_size {
            return Err(Error::DimensionMismatch {
                context: "StateChannelModel state distribution",
                expected: s_size,
                got: state_dist.dim(),
            });
        }
        let mut transition = Vec::with_capacity(x_size * s_size * y_size);
        for row in rows {
            if row.len() != y_size {
                return Err(Error::DimensionMismatch {
                    context: "StateChannelModel row",
                    expected: y_size,
                    got: row.len(),
                });
            }
            let pv = ProbVector::new(row)?;
            transition.extend_from_slice(pv.as_slice());
        }
        for s in 0..s_size {
            if state_dist.get(s) <= 0.0 {
                return Err(Error::ZeroStateProbability { state: s });
            }
        }
        Ok(Self {
            x_size,
            y_size,
            s_size,
            transition,
            state_dist,
        })
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn s_size(&self) -> usize {
        self.s_size
    }

    pub fn state_dist(&self) -> &ProbVector {
        &self.state_dist
    }

    /// Minimum state probability; strictly positive by construction.
    pub fn rho(&self) -> f64 {
        self.state_dist.min()
    }

    /// `p(y | x, s)`.
    pub fn transition(&self, y: usize, x: usize, s: usize) -> f64 {
        self.transition[(x * self.s_size + s) * self.y_size + y]
    }

    /// The output distribution row for input `x` in state `s`.
    pub fn row(&self, x: usize, s: usize) -> &[f64] {
        let base = (x * self.s_size + s) * self.y_size;
        &self.transition[base..base + self.y_size]
    }

    /// The channel `X -> (Y, S)` seen by an encoder without side information:
    /// `W(y,s | x) = p_S(s) p(y | x, s)`, with the joint output index
    /// linearized y-major.
    pub fn no_csi_channel(&self) -> StochasticMatrix {
        let cols = self.y_size * self.s_size;
        let mut data = vec![0.0; self.x_size * cols];
        for x in 0..self.x_size {
            for y in 0..self.y_size {
                for s in 0..self.s_size {
                    data[x * cols + y * self.s_size + s] =
                        self.state_dist.get(s) * self.transition(y, x, s);
                }
            }
        }
        StochasticMatrix::new(self.x_size, cols, data).expect("rows are stochastic")
    }

    /// The channel `X -> Y` conditioned on state `s`.
    pub fn per_state_channel(&self, s: usize) -> StochasticMatrix {
        let mut data = Vec::with_capacity(self.x_size * self.y_size);
        for x in 0..self.x_size {
            data.extend_from_slice(self.row(x, s));
        }
        StochasticMatrix::new(self.x_size, self.y_size, data).expect("rows are stochastic")
    }

    /// The state-averaged channel `X -> Y`: `sum_s p_S(s) p(y | x, s)`.
    pub fn averaged_channel(&self) -> StochasticMatrix {
        let mut data = vec![0.0; self.x_size * self.y_size];
        for x in 0..self.x_size {
            for s in 0..self.s_size {
                let ps = self.state_dist.get(s);
                for y in 0..self.y_size {
                    data[x * self.y_size + y] += ps * self.transition(y, x, s);
                }
            }
        }
        StochasticMatrix::new(self.x_size, self.y_size, data).expect("rows are stochastic")
    }
}

/// A side channel `p_{S~|S}` delivering the encoder's state observation.
#[derive(Debug, Clone, PartialEq)]
pub struct SideChannel {
    matrix: StochasticMatrix,
}

impl SideChannel {
    pub fn new(matrix: StochasticMatrix) -> Self {
        Self { matrix }
    }

    pub fn state_size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn obs_size(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &StochasticMatrix {
        &self.matrix
    }

    /// `p(s~ | s)`.
    pub fn get(&self, obs: usize, s: usize) -> f64 {
        self.matrix.get(s, obs)
    }

    /// Noiseless observation of the state.
    pub fn identity(s_size: usize) -> Self {
        Self::new(StochasticMatrix::identity(s_size))
    }

    /// Post-composes with another channel acting on the observation.
    pub fn then(&self, post: &StochasticMatrix) -> Result<SideChannel> {
        Ok(SideChannel::new(self.matrix.compose(post)?))
    }
}

/// Generalized erasure side channel: reveals the true state with probability
/// `1 - epsilon` and the erasure symbol otherwise. The erasure symbol is
/// always the last output column.
pub fn generalized_erasure(epsilon: f64, state_size: usize) -> Result<SideChannel> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let cols = state_size + 1;
    let mut data = vec![0.0; state_size * cols];
    for s in 0..state_size {
        data[s * cols + s] = 1.0 - epsilon;
        data[s * cols + state_size] = epsilon;
    }
    Ok(SideChannel::new(StochasticMatrix::new(
        state_size, cols, data,
    )?))
}

/// Generalized symmetric side channel: diagonal `1 - (|S|-1) q`, off-diagonal
/// `q`, for `q` in `[0, 1/|S|]`.
pub fn generalized_symmetric(q: f64, state_size: usize) -> Result<SideChannel> {
    let hi = 1.0 / state_size as f64;
    if !(0.0..=hi + 1e-15).contains(&q) {
        return Err(Error::OutOfRange {
            name: "q",
            value: q,
            lo: 0.0,
            hi,
        });
    }
    let mut data = vec![q; state_size * state_size];
    for s in 0..state_size {
        data[s * state_size + s] = 1.0 - (state_size as f64 - 1.0) * q;
    }
    Ok(SideChannel::new(StochasticMatrix::new(
        state_size, state_size, data,
    )?))
}

/// The binary example channel: state 0 selects a Z-channel with parameter
/// `theta`, state 1 its mirrored S-channel, and the state is uniform.
///
/// Concretely `p(0|0,0) = 1 - theta`, `p(1|0,0) = theta`, `p(1|1,0) = 1`, and
/// state 1 swaps the roles of the two inputs and outputs.
pub fn sz_channel(theta: f64) -> Result<StateChannelModel> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            lo: 0.0,
            hi: 1.0,
        });
    }
    StateChannelModel::new(
        2,
        2,
        2,
        vec![
            vec![1.0 - theta, theta], // x=0, s=0
            vec![1.0, 0.0],           // x=0, s=1
            vec![0.0, 1.0],           // x=1, s=0
            vec![theta, 1.0 - theta], // x=1, s=1
        ],
        ProbVector::new(vec![0.5, 0.5])?,
    )
}

/// Ternary-input channel whose causal capacity stays strictly above the
/// no-side-information capacity for every erasure level below one: the
/// observation never becomes useless.
pub fn ternary_no_collapse_channel() -> StateChannelModel {
    StateChannelModel::new(
        3,
        2,
        2,
        vec![
            vec![1.0, 0.0],        // x=0, s=0
            vec![3.0 / 5.0, 2.0 / 5.0], // x=0, s=1
            vec![2.0 / 5.0, 3.0 / 5.0], // x=1, s=0
            vec![0.0, 1.0],        // x=1, s=1
            vec![3.0 / 10.0, 7.0 / 10.0], // x=2, s=0
            vec![1.0 / 5.0, 4.0 / 5.0],   // x=2, s=1
        ],
        ProbVector::new(vec![0.5, 0.5]).unwrap(),
    )
    .expect("fixed table is valid")
}

/// Ternary-input channel whose probing capacity drops strictly below the
/// full-state capacity for every positive crossover: the per-state optimal
/// input supports differ, so no noisy observation reaches the plateau.
pub fn ternary_no_plateau_channel() -> StateChannelModel {
    StateChannelModel::new(
        3,
        2,
        2,
        vec![
            vec![1.0, 0.0],        // x=0, s=0
            vec![3.0 / 5.0, 2.0 / 5.0], // x=0, s=1
            vec![2.0 / 5.0, 3.0 / 5.0], // x=1, s=0
            vec![1.0 / 5.0, 4.0 / 5.0], // x=1, s=1
            vec![4.0 / 5.0, 1.0 / 5.0], // x=2, s=0
            vec![0.0, 1.0],        // x=2, s=1
        ],
        ProbVector::new(vec![0.5, 0.5]).unwrap(),
    )
    .expect("fixed table is valid")
}

/// Binary additive channel `Y = X xor S` with `p_S(1) = mu`.
pub fn xor_channel(mu: f64) -> Result<StateChannelModel> {
    if !(0.0..0.5).contains(&mu) || mu == 0.0 {
        return Err(Error::OutOfRange {
            name: "mu",
            value: mu,
            lo: 0.0,
            hi: 0.5,
        });
    }
    StateChannelModel::new(
        2,
        2,
        2,
        vec![
            vec![1.0, 0.0], // x=0, s=0
            vec![0.0, 1.0], // x=0, s=1
            vec![0.0, 1.0], // x=1, s=0
            vec![1.0, 0.0], // x=1, s=1
        ],
        ProbVector::new(vec![1.0 - mu, mu])?,
    )
}

/// The three channels used to probe the boundaries of the collapse and
/// plateau phenomena, with the additive channel at its default `mu = 1/4`.
pub fn counterexample_channels() -> (StateChannelModel, StateChannelModel, StateChannelModel) {
    (
        ternary_no_collapse_channel(),
        ternary_no_plateau_channel(),
        xor_channel(0.25).expect("0.25 is in range"),
    )
}
