//! Best-effort lower bound on the noncausal (Gelfand-Pinsker) capacity.
//!
//! With the observation available noncausally the capacity is
//! `max_{p(u|s~)} I(U;Y,S) - I(U;S~)` over the strategy alphabet. The
//! objective is a difference of mutual informations and is not concave, so
//! this module runs multi-restart alternating maximization with
//! deterministic seeded starting points and reports the best value found as
//! a lower bound, paired with the probing capacity as the upper bound. No
//! claim of global optimality is made.
//!
//! The inner solver uses the variational form
//! `J(Q) = H(U|S~) + max_Phi E[ln Phi(U|Y,S)]`: the `Phi` step is the exact
//! posterior and the `Q` step is a closed-form Gibbs reweighting, so every
//! iteration increases the objective.

use crate::capacity::{capacity_causal_with, DEFAULT_MAX_ITER};
use crate::channel::{SideChannel, StateChannelModel};
use crate::error::{Error, Result};
use crate::probing::capacity_probing;
use crate::prob::{xlny_ratio, StochasticMatrix};
use crate::strategy::StrategyTable;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Lower/upper sandwich for the noncausal capacity.
#[derive(Debug, Clone)]
pub struct GpSolution {
    /// Best `I(U;Y,S) - I(U;S~)` found over all restarts, in nats.
    pub lower_bound: f64,
    /// `min(probing capacity, ln |U|)`.
    pub upper_bound: f64,
    pub restarts: usize,
    /// The conditional `p(u|s~)` attaining the lower bound.
    pub argmax: StochasticMatrix,
}

struct GpObjective<'a> {
    model: &'a StateChannelModel,
    strategies: &'a StrategyTable,
    /// `p(s~)`.
    obs: Vec<f64>,
    /// `post[o * s_size + s] = p(s | s~ = o)`.
    post: Vec<f64>,
}

impl<'a> GpObjective<'a> {
    fn new(
        model: &'a StateChannelModel,
        side: &'a SideChannel,
        strategies: &'a StrategyTable,
    ) -> Self {
        let s_size = model.s_size();
        let obs: Vec<f64> = (0..side.obs_size())
            .map(|o| {
                (0..s_size)
                    .map(|s| model.state_dist().get(s) * side.get(o, s))
                    .sum()
            })
            .collect();
        let mut post = vec![0.0; side.obs_size() * s_size];
        for o in 0..side.obs_size() {
            for s in 0..s_size {
                post[o * s_size + s] = if obs[o] > 0.0 {
                    model.state_dist().get(s) * side.get(o, s) / obs[o]
                } else {
                    1.0 / s_size as f64
                };
            }
        }
        Self {
            model,
            strategies,
            obs,
            post,
        }
    }

    fn n_obs(&self) -> usize {
        self.obs.len()
    }

    fn n_u(&self) -> usize {
        self.strategies.count()
    }

    /// `p(y, s | u, s~)`.
    fn kernel(&self, y: usize, s: usize, u: usize, o: usize) -> f64 {
        let x = self.strategies.action(u, o);
        self.post[o * self.model.s_size() + s] * self.model.transition(y, x, s)
    }

    /// Joint `p(u, y, s)` and marginals `p(u)`, `p(y, s)` under `q(u|s~)`.
    fn marginals(&self, q: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (ny, ns) = (self.model.y_size(), self.model.s_size());
        let (n_u, n_obs) = (self.n_u(), self.n_obs());
        let mut p_u = vec![0.0; n_u];
        let mut p_uys = vec![0.0; n_u * ny * ns];
        for o in 0..n_obs {
            let po = self.obs[o];
            if po == 0.0 {
                continue;
            }
            for u in 0..n_u {
                let w = po * q[o * n_u + u];
                p_u[u] += w;
                if w == 0.0 {
                    continue;
                }
                for y in 0..ny {
                    for s in 0..ns {
                        p_uys[(u * ny + y) * ns + s] += w * self.kernel(y, s, u, o);
                    }
                }
            }
        }
        let mut p_ys = vec![0.0; ny * ns];
        for u in 0..n_u {
            for i in 0..ny * ns {
                p_ys[i] += p_uys[u * ny * ns + i];
            }
        }
        (p_uys, p_u, p_ys)
    }

    /// Objective value at `q(u|s~)`.
    fn value(&self, q: &[f64]) -> f64 {
        let (ny, ns) = (self.model.y_size(), self.model.s_size());
        let (n_u, n_obs) = (self.n_u(), self.n_obs());
        let (p_uys, p_u, p_ys) = self.marginals(q);
        let mut info_joint = 0.0;
        for u in 0..n_u {
            for i in 0..ny * ns {
                let joint = p_uys[u * ny * ns + i];
                // Log-difference form: the product p(u) p(y,s) can underflow
                // for strategies whose mass has shrunk to the denormal range.
                if joint > 0.0 {
                    info_joint += joint * (joint.ln() - p_u[u].ln() - p_ys[i].ln());
                }
            }
        }
        let mut info_obs = 0.0;
        for o in 0..n_obs {
            let po = self.obs[o];
            if po == 0.0 {
                continue;
            }
            for u in 0..n_u {
                info_obs += po * xlny_ratio(q[o * n_u + u], p_u[u]);
            }
        }
        info_joint - info_obs
    }

    /// One alternating-maximization step: posterior update followed by the
    /// closed-form Gibbs reweighting of each observation row.
    fn step(&self, q: &[f64]) -> Vec<f64> {
        let (ny, ns) = (self.model.y_size(), self.model.s_size());
        let (n_u, n_obs) = (self.n_u(), self.n_obs());
        let (p_uys, _, p_ys) = self.marginals(q);
        let mut next = vec![0.0; q.len()];
        for o in 0..n_obs {
            if self.obs[o] == 0.0 {
                for u in 0..n_u {
                    next[o * n_u + u] = 1.0 / n_u as f64;
                }
                continue;
            }
            // log-weight g(u,o) = sum_{ys} k(ys|u,o) ln Phi(u|ys).
            let mut logw = vec![f64::NEG_INFINITY; n_u];
            let mut max_logw = f64::NEG_INFINITY;
            for u in 0..n_u {
                let mut g = 0.0;
                let mut dead = false;
                for y in 0..ny {
                    for s in 0..ns {
                        let k = self.kernel(y, s, u, o);
                        if k > 0.0 {
                            let phi = if p_ys[y * ns + s] > 0.0 {
                                p_uys[(u * ny + y) * ns + s] / p_ys[y * ns + s]
                            } else {
                                0.0
                            };
                            if phi > 0.0 {
                                g += k * phi.ln();
                            } else {
                                dead = true;
                            }
                        }
                    }
                }
                if !dead {
                    logw[u] = g;
                    max_logw = max_logw.max(g);
                }
            }
            let row = &mut next[o * n_u..(o + 1) * n_u];
            if max_logw.is_finite() {
                let mut z = 0.0;
                for (u, r) in row.iter_mut().enumerate() {
                    *r = if logw[u].is_finite() {
                        let w = (logw[u] - max_logw).exp();
                        // Mass this small is numerically dead; dropping it
                        // keeps later joints out of the denormal range.
                        if w < 1e-100 {
                            0.0
                        } else {
                            w
                        }
                    } else {
                        0.0
                    };
                    z += *r;
                }
                for r in row.iter_mut() {
                    *r /= z;
                }
            } else {
                for r in row.iter_mut() {
                    *r = 1.0 / n_u as f64;
                }
            }
        }
        next
    }
}

fn ascend(objective: &GpObjective, q: &mut Vec<f64>, max_steps: usize) -> f64 {
    let mut value = objective.value(q);
    for _ in 0..max_steps {
        let next = objective.step(q);
        let next_value = objective.value(&next);
        if next_value <= value + 1e-14 {
            if next_value > value {
                *q = next;
                value = next_value;
            }
            break;
        }
        *q = next;
        value = next_value;
    }
    value
}

/// Multi-restart alternating maximization on the noncausal objective.
///
/// Deterministic given `seed`. The first restarts embed the causal optimum
/// (so the lower bound dominates the causal capacity up to solver error) and
/// the per-observation mix of the full-information optimum; the rest are
/// seeded near-corner and random interior points.
pub fn capacity_gp(
    model: &StateChannelModel,
    side: &SideChannel,
    restarts: usize,
    seed: u64,
) -> Result<GpSolution> {
    let strategies = StrategyTable::enumerate(model.x_size(), side.obs_size())?;
    let objective = GpObjective::new(model, side, &strategies);
    let n_u = strategies.count();
    let n_obs = side.obs_size();
    let restarts = restarts.max(1);

    let causal = capacity_causal_with(model, side, 1e-10, DEFAULT_MAX_ITER)?;
    let causal_dist = causal
        .argmax
        .dist()
        .ok_or_else(|| Error::Inconsistency("causal solver returned no distribution".into()))?;

    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(restarts);
    // Observation-independent selector reproducing the causal solution.
    starts.push(
        (0..n_obs)
            .flat_map(|_| causal_dist.as_slice().to_vec())
            .collect(),
    );
    // Constant strategies weighted by the posterior mix of the
    // full-information optimum: exact at a noiseless observation.
    let full = crate::capacity::capacity_full_csi_with(model, 1e-10, DEFAULT_MAX_ITER);
    let full_table = full.argmax.table().expect("full CSI returns a table");
    let mut mix = vec![1e-9; n_obs * n_u];
    for o in 0..n_obs {
        for x in 0..model.x_size() {
            let mut mass = 0.0;
            for s in 0..model.s_size() {
                mass += objective.post[o * model.s_size() + s] * full_table.get(s, x);
            }
            // Strategy x is the constant map onto input x.
            mix[o * n_u + x] += mass;
        }
        let row = &mut mix[o * n_u..(o + 1) * n_u];
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= sum);
    }
    starts.push(mix);
    starts.push(vec![1.0 / n_u as f64; n_obs * n_u]);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Uniform::new(0.0f64, 1.0f64);
    while starts.len() < restarts {
        let idx = starts.len();
        let mut q = vec![0.0; n_obs * n_u];
        if idx % 2 == 1 {
            // Near-corner start: one dominant strategy per observation row.
            for o in 0..n_obs {
                let pick = (unit.sample(&mut rng) * n_u as f64) as usize % n_u;
                for u in 0..n_u {
                    q[o * n_u + u] = if u == pick { 1.0 } else { 1e-6 };
                }
                let row = &mut q[o * n_u..(o + 1) * n_u];
                let sum: f64 = row.iter().sum();
                row.iter_mut().for_each(|v| *v /= sum);
            }
        } else {
            // Random interior point.
            for o in 0..n_obs {
                let row = &mut q[o * n_u..(o + 1) * n_u];
                let mut sum = 0.0;
                for v in row.iter_mut() {
                    *v = -unit.sample(&mut rng).max(1e-12).ln();
                    sum += *v;
                }
                row.iter_mut().for_each(|v| *v /= sum);
            }
        }
        starts.push(q);
    }

    let mut best_value = f64::NEG_INFINITY;
    let mut best_q = starts[0].clone();
    for mut q in starts {
        let value = ascend(&objective, &mut q, 20_000);
        if value > best_value {
            best_value = value;
            best_q = q;
        }
    }

    let probing = capacity_probing(model, side, 1e-9)?;
    let upper_bound = (probing.value + probing.gap_bound).min((n_u as f64).ln());
    let argmax = StochasticMatrix::new(n_obs, n_u, best_q)?;
    Ok(GpSolution {
        lower_bound: best_value.max(0.0),
        upper_bound,
        restarts,
        argmax,
    })
}
