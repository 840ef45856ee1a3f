//! Probability primitives: distributions, row-stochastic matrices, joint
//! tables, and the information functionals built on them.
//!
//! All information quantities are in nats. The conventions `0 log 0 = 0` and
//! `0 log (0/0) = 0` are enforced in one shared kernel ([`xlny_ratio`]), so
//! every functional in the crate treats zero-probability terms identically.

use crate::error::{Error, Result};

/// Tolerance used when validating that probabilities sum to one. Inputs whose
/// sum deviates by more than this are rejected rather than silently rescaled,
/// so malformed channel specifications are caught at construction.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Rescaling is skipped when the sum is already this close to one, making
/// normalization idempotent: construct, serialize, and re-parse reproduces
/// the same bits.
const RESCALE_TOL: f64 = 1e-14;

fn normalize_in_place(entries: &mut [f64]) {
    let sum: f64 = entries.iter().sum();
    if (sum - 1.0).abs() > RESCALE_TOL {
        for v in entries.iter_mut() {
            *v /= sum;
        }
    }
}

/// `x ln x`, with `0 ln 0 = 0`.
#[inline]
pub(crate) fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `x ln(x/y)`, with `0 ln(0/0) = 0` and `x ln(x/0) = +inf` for `x > 0`.
#[inline]
pub(crate) fn xlny_ratio(x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if y <= 0.0 {
        f64::INFINITY
    } else {
        x * (x / y).ln()
    }
}

/// A probability distribution over a finite alphabet.
///
/// Entries are nonnegative and sum to one. Construction checks the sum to
/// [`NORMALIZATION_TOL`] and then rescales exactly, so downstream code can
/// rely on the sum being 1 up to machine rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    entries: Vec<f64>,
}

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "ProbVector",
                expected: 1,
                got: 0,
            });
        }
        for (index, &value) in entries.iter().enumerate() {
            if value < 0.0 || !value.is_finite() {
                return Err(Error::NegativeEntry { index, value });
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        let mut entries = entries;
        normalize_in_place(&mut entries);
        Ok(Self { entries })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            entries: vec![1.0 / n as f64; n],
        }
    }

    /// Point mass on symbol `i`.
    pub fn point_mass(i: usize, n: usize) -> Self {
        let mut entries = vec![0.0; n];
        entries[i] = 1.0;
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> f64 {
        self.entries[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.entries.iter()
    }

    pub fn min(&self) -> f64 {
        self.entries.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Pushes the distribution through a channel: `(pW)(y) = sum_x p(x) W(y|x)`.
    pub fn push_through(&self, channel: &StochasticMatrix) -> Result<ProbVector> {
        if channel.rows() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "push_through",
                expected: self.dim(),
                got: channel.rows(),
            });
        }
        let mut out = vec![0.0; channel.cols()];
        for (x, &px) in self.entries.iter().enumerate() {
            for (y, &w) in channel.row(x).iter().enumerate() {
                out[y] += px * w;
            }
        }
        Ok(ProbVector { entries: out })
    }
}

impl std::ops::Index<usize> for ProbVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

/// A row-stochastic matrix: every row is a [`ProbVector`].
///
/// This is the common representation for side channels, estimator channels,
/// and the channels induced by strategy tables. Composition of two stochastic
/// matrices is again stochastic.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl StochasticMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "StochasticMatrix",
                expected: rows * cols,
                got: data.len(),
            });
        }
        for r in 0..rows {
            ProbVector::new(data[r * cols..(r + 1) * cols].to_vec())?;
        }
        // Re-normalize each row, matching ProbVector construction.
        let mut data = data;
        for r in 0..rows {
            normalize_in_place(&mut data[r * cols..(r + 1) * cols]);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in &rows {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch {
                    context: "StochasticMatrix::from_rows",
                    expected: ncols,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(nrows, ncols, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    /// Matrix composition `self * other`: first `self`, then `other`.
    pub fn compose(&self, other: &StochasticMatrix) -> Result<StochasticMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "compose",
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut data = vec![0.0; self.rows * other.cols];
        for r in 0..self.rows {
            for k in 0..self.cols {
                let v = self.get(r, k);
                if v == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    data[r * other.cols + c] += v * other.get(k, c);
                }
            }
        }
        StochasticMatrix::new(self.rows, other.cols, data)
    }

    /// Columnwise minimum over rows.
    pub fn column_min(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|c| {
                (0..self.rows)
                    .map(|r| self.get(r, c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// Columnwise sum over rows.
    pub fn column_sum(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.get(r, c)).sum())
            .collect()
    }
}

/// A joint distribution over a product of finite alphabets, stored row-major
/// with the last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    axes: Vec<usize>,
    data: Vec<f64>,
}

impl JointTable {
    pub fn new(axes: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let expected: usize = axes.iter().product();
        if data.len() != expected || axes.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "JointTable",
                expected,
                got: data.len(),
            });
        }
        for (index, &value) in data.iter().enumerate() {
            if value < 0.0 || !value.is_finite() {
                return Err(Error::NegativeEntry { index, value });
            }
        }
        let sum: f64 = data.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        let mut data = data;
        normalize_in_place(&mut data);
        Ok(Self { axes, data })
    }

    /// Joint distribution of `(X, Y)` where `X ~ p` and `Y | X=x ~ W(.|x)`.
    pub fn from_input_and_channel(p: &ProbVector, w: &StochasticMatrix) -> Result<Self> {
        if w.rows() != p.dim() {
            return Err(Error::DimensionMismatch {
                context: "from_input_and_channel",
                expected: p.dim(),
                got: w.rows(),
            });
        }
        let mut data = Vec::with_capacity(p.dim() * w.cols());
        for x in 0..p.dim() {
            for y in 0..w.cols() {
                data.push(p.get(x) * w.get(x, y));
            }
        }
        Self::new(vec![p.dim(), w.cols()], data)
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.axes.len()];
        for i in (0..self.axes.len() - 1).rev() {
            strides[i] = strides[i + 1] * self.axes[i + 1];
        }
        strides
    }

    /// Marginal distribution of one axis.
    pub fn marginal(&self, axis: usize) -> ProbVector {
        let strides = self.strides();
        let mut out = vec![0.0; self.axes[axis]];
        for (idx, &v) in self.data.iter().enumerate() {
            out[(idx / strides[axis]) % self.axes[axis]] += v;
        }
        // Sums of a valid table are already normalized to rounding error.
        ProbVector { entries: out }
    }

    /// Sums out one axis, returning the joint over the remaining axes.
    pub fn marginalize_out(&self, axis: usize) -> Result<JointTable> {
        if self.axes.len() < 2 {
            return Err(Error::DimensionMismatch {
                context: "marginalize_out",
                expected: 2,
                got: self.axes.len(),
            });
        }
        let strides = self.strides();
        let new_axes: Vec<usize> = self
            .axes
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != axis)
            .map(|(_, &n)| n)
            .collect();
        let mut out = vec![0.0; new_axes.iter().product()];
        for (idx, &v) in self.data.iter().enumerate() {
            let mut pos = 0;
            for (i, stride) in strides.iter().enumerate() {
                if i == axis {
                    continue;
                }
                pos = pos * self.axes[i] + (idx / stride) % self.axes[i];
            }
            out[pos] += v;
        }
        JointTable::new(new_axes, out)
    }

    pub fn entropy(&self) -> f64 {
        -self.data.iter().map(|&v| xlnx(v)).sum::<f64>()
    }
}

/// Shannon entropy `H(p) = -sum p log p` in nats.
pub fn entropy(p: &ProbVector) -> f64 {
    entropy_slice(p.as_slice())
}

pub(crate) fn entropy_slice(p: &[f64]) -> f64 {
    -p.iter().map(|&v| xlnx(v)).sum::<f64>()
}

/// Mutual information `I(X;Y) = sum_x p(x) D(W(.|x) || pW)` in nats.
pub fn mutual_information(p_in: &ProbVector, channel: &StochasticMatrix) -> Result<f64> {
    if channel.rows() != p_in.dim() {
        return Err(Error::DimensionMismatch {
            context: "mutual_information",
            expected: p_in.dim(),
            got: channel.rows(),
        });
    }
    let out = p_in.push_through(channel)?;
    let mut total = 0.0;
    for x in 0..p_in.dim() {
        let px = p_in.get(x);
        if px == 0.0 {
            continue;
        }
        total += px * kl_slices(channel.row(x), out.as_slice());
    }
    Ok(total.max(0.0))
}

/// For a two-axis joint over `(S, S~)`: returns `(H(S|S~), I(S;S~))`.
///
/// The chain identity `H(S|S~) + I(S;S~) = H(S)` holds to rounding error.
pub fn conditional_entropy_and_mi(joint: &JointTable) -> Result<(f64, f64)> {
    if joint.axes().len() != 2 {
        return Err(Error::DimensionMismatch {
            context: "conditional_entropy_and_mi",
            expected: 2,
            got: joint.axes().len(),
        });
    }
    let h_joint = joint.entropy();
    let h_s = entropy(&joint.marginal(0));
    let h_obs = entropy(&joint.marginal(1));
    let h_cond = (h_joint - h_obs).max(0.0);
    let mi = (h_s - h_cond).max(0.0);
    Ok((h_cond, mi))
}

/// Kullback-Leibler divergence `D(p || q)` in nats.
///
/// Returns `+inf` when the support of `p` is not contained in the support of
/// `q`; dimension mismatches are an error.
pub fn kl_divergence(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            context: "kl_divergence",
            expected: p.dim(),
            got: q.dim(),
        });
    }
    Ok(kl_slices(p.as_slice(), q.as_slice()))
}

pub(crate) fn kl_slices(p: &[f64], q: &[f64]) -> f64 {
    let d: f64 = p
        .iter()
        .zip(q.iter())
        .map(|(&pi, &qi)| xlny_ratio(pi, qi))
        .sum();
    if d.is_nan() {
        f64::INFINITY
    } else {
        d.max(0.0)
    }
}

/// Total variational distance `0.5 sum |p - q|`, in `[0, 1]`.
pub fn variational_distance(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            context: "variational_distance",
            expected: p.dim(),
            got: q.dim(),
        });
    }
    Ok(0.5
        * p.iter()
            .zip(q.iter())
            .map(|(&pi, &qi)| (pi - qi).abs())
            .sum::<f64>())
}

/// Converts nats to bits for display.
pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}
