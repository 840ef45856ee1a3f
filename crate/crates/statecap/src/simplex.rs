//! Dense two-phase simplex with Bland's rule.
//!
//! Solves `min c.x  s.t.  A x = b, x >= 0` for the small equality systems
//! that arise in stochastic-degradation feasibility checks. Problem sizes are
//! tiny (tens of variables), so a dense tableau with Bland's anti-cycling
//! pivot rule is the simplest deterministic choice.

/// Pivot tolerance: entries smaller than this are treated as zero.
const PIVOT_TOL: f64 = 1e-11;

/// Phase-1 objective below this certifies feasibility.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    #[allow(dead_code)]
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpSolution),
    /// Phase 1 could not drive the artificial variables to zero; the best
    /// residual sum is reported.
    Infeasible { phase1_objective: f64 },
    Unbounded,
}

struct Tableau {
    /// `m` rows of `ncols + 1` entries; the last entry is the rhs.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let scale = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= scale;
        }
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..=self.ncols {
                let delta = factor * self.rows[row][j];
                self.rows[i][j] -= delta;
            }
            // Keep the eliminated entry exactly zero.
            self.rows[i][col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Runs the simplex with Bland's rule on the given cost vector, allowing
    /// only columns below `col_limit` to enter the basis. Returns false when
    /// the problem is unbounded in the entering direction.
    fn run(&mut self, cost: &[f64], col_limit: usize) -> bool {
        loop {
            // Multipliers of the basic rows in the reduced-cost computation.
            let duals: Vec<f64> = (0..self.rows.len())
                .map(|i| cost[self.basis[i]])
                .collect();
            let mut entering = None;
            for j in 0..col_limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j];
                for i in 0..self.rows.len() {
                    if duals[i] != 0.0 {
                        reduced -= duals[i] * self.rows[i][j];
                    }
                }
                if reduced < -PIVOT_TOL {
                    entering = Some(j);
                    break; // Bland: lowest index.
                }
            }
            let Some(col) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let coef = self.rows[i][col];
                if coef > PIVOT_TOL {
                    let ratio = self.rhs(i) / coef;
                    let better = match leaving {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - PIVOT_TOL
                                || (ratio < lr + PIVOT_TOL && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return false;
            };
            self.pivot(row, col);
        }
    }
}

/// Minimizes `c.x` subject to `A x = b, x >= 0`.
pub fn solve(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let ncols = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, arow) in a.iter().enumerate() {
        debug_assert_eq!(arow.len(), n);
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; ncols + 1];
        for (j, &v) in arow.iter().enumerate() {
            row[j] = flip * v;
        }
        row[n + i] = 1.0;
        row[ncols] = flip * b[i];
        rows.push(row);
    }
    let basis: Vec<usize> = (n..n + m).collect();
    let mut tab = Tableau { rows, basis, ncols };

    // Phase 1: minimize the sum of artificials.
    let mut phase1_cost = vec![0.0; ncols];
    for j in n..ncols {
        phase1_cost[j] = 1.0;
    }
    if !tab.run(&phase1_cost, ncols) {
        // The phase-1 objective is bounded below by zero, so this cannot
        // trigger; kept as a guard.
        return LpOutcome::Unbounded;
    }
    let phase1_objective: f64 = (0..m)
        .filter(|&i| tab.basis[i] >= n)
        .map(|i| tab.rhs(i))
        .sum();
    if phase1_objective > FEASIBILITY_TOL {
        return LpOutcome::Infeasible { phase1_objective };
    }

    // Pivot zero-level artificials out of the basis where possible; rows
    // without a usable structural column are redundant constraints.
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(col) = (0..n).find(|&j| tab.rows[i][j].abs() > PIVOT_TOL) {
                tab.pivot(i, col);
            }
        }
    }

    // Phase 2: minimize the real objective; artificials may not re-enter.
    let mut phase2_cost = vec![0.0; ncols];
    phase2_cost[..n].copy_from_slice(c);
    if !tab.run(&phase2_cost, n) {
        return LpOutcome::Unbounded;
    }

    let mut x = vec![0.0; n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.rhs(i).max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal(LpSolution { x, objective })
}

/// Feasibility check for `A x = b, x >= 0`: returns the phase-1 residual and,
/// when feasible, a point.
pub fn feasible_point(a: &[Vec<f64>], b: &[f64]) -> (f64, Option<Vec<f64>>) {
    match solve(&vec![0.0; a.first().map(|r| r.len()).unwrap_or(0)], a, b) {
        LpOutcome::Optimal(sol) => (0.0, Some(sol.x)),
        LpOutcome::Infeasible { phase1_objective } => (phase1_objective, None),
        LpOutcome::Unbounded => (f64::INFINITY, None),
    }
}
