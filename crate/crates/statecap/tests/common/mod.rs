//! Shared deterministic generators and small numeric oracles for the
//! integration suites.

#![allow(dead_code)]

use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use statecap::{ProbVector, SideChannel, StateChannelModel, StochasticMatrix};


/// A random distribution with every entry at least `floor / n`.
pub fn rand_dist<R: Rng>(rng: &mut R, n: usize, floor: f64) -> Vec<f64> {
    let unit = Uniform::new(0.0f64, 1.0f64);
    loop {
        let raw: Vec<f64> = (0..n).map(|_| unit.sample(rng) + 1e-3).collect();
        let sum: f64 = raw.iter().sum();
        let dist: Vec<f64> = raw.iter().map(|v| v / sum).collect();
        if dist.iter().all(|&v| v >= floor / n as f64) {
            return dist;
        }
    }
}

pub fn rand_prob_vector<R: Rng>(rng: &mut R, n: usize) -> ProbVector {
    ProbVector::new(rand_dist(rng, n, 0.0)).unwrap()
}

pub fn rand_stochastic<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> StochasticMatrix {
    let data: Vec<Vec<f64>> = (0..rows).map(|_| rand_dist(rng, cols, 0.0)).collect();
    StochasticMatrix::from_rows(data).unwrap()
}

pub fn rand_side<R: Rng>(rng: &mut R, s_size: usize, obs_size: usize) -> SideChannel {
    SideChannel::new(rand_stochastic(rng, s_size, obs_size))
}

/// A random model with strictly positive state probabilities (at least
/// `0.2 / |S|` each).
pub fn rand_model<R: Rng>(
    rng: &mut R,
    x_size: usize,
    y_size: usize,
    s_size: usize,
) -> StateChannelModel {
    let rows: Vec<Vec<f64>> = (0..x_size * s_size)
        .map(|_| rand_dist(rng, y_size, 0.0))
        .collect();
    let state = ProbVector::new(rand_dist(rng, s_size, 0.2)).unwrap();
    StateChannelModel::new(x_size, y_size, s_size, rows, state).unwrap()
}

/// Blends a side channel toward a target matrix: `(1-t) base + t noise`.
pub fn blend_side(base: &StochasticMatrix, noise: &StochasticMatrix, t: f64) -> SideChannel {
    let rows: Vec<Vec<f64>> = (0..base.rows())
        .map(|r| {
            base.row(r)
                .iter()
                .zip(noise.row(r))
                .map(|(&b, &n)| (1.0 - t) * b + t * n)
                .collect()
        })
        .collect();
    SideChannel::new(StochasticMatrix::from_rows(rows).unwrap())
}

/// A side channel with identical rows (an uninformative observation).
pub fn uninformative_side(dist: &[f64], s_size: usize) -> SideChannel {
    let rows: Vec<Vec<f64>> = (0..s_size).map(|_| dist.to_vec()).collect();
    SideChannel::new(StochasticMatrix::from_rows(rows).unwrap())
}

/// Smallest singular value by one-sided Jacobi orthogonalization: rotate
/// column pairs until they are mutually orthogonal; the singular values are
/// the column norms. Independent of any bound being tested.
pub fn jacobi_svd_min(matrix: &StochasticMatrix) -> f64 {
    let m = matrix.rows();
    let n = matrix.cols();
    let mut a: Vec<Vec<f64>> = (0..m).map(|r| matrix.row(r).to_vec()).collect();
    for _ in 0..60 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let mut aii = 0.0;
                let mut ajj = 0.0;
                let mut aij = 0.0;
                for row in &a {
                    aii += row[i] * row[i];
                    ajj += row[j] * row[j];
                    aij += row[i] * row[j];
                }
                off = off.max(aij.abs());
                if aij.abs() < 1e-15 {
                    continue;
                }
                let tau = (ajj - aii) / (2.0 * aij);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for row in a.iter_mut() {
                    let vi = row[i];
                    let vj = row[j];
                    row[i] = c * vi - s * vj;
                    row[j] = s * vi + c * vj;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    (0..n)
        .map(|j| a.iter().map(|row| row[j] * row[j]).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min)
}
