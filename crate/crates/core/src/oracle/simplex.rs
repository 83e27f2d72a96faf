//! Dense two-phase tableau simplex for small linear programs
//! (a handful of rows, a few thousand columns).
//!
//! Solves `min c.x` subject to row constraints and `x >= 0`.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RowKind {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub coeffs: Vec<f64>,
    pub kind: RowKind,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-11;
const MAX_ITER: usize = 50_000;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 50;

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    cost: Vec<f64>,
    cost_rhs: f64,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize) {
        let inv = 1.0 / self.rows[r][e];
        for v in self.rows[r].iter_mut() {
            *v *= inv;
        }
        self.rhs[r] *= inv;
        self.rows[r][e] = 1.0;

        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][e];
            if f != 0.0 {
                for (v, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                self.rows[i][e] = 0.0;
                self.rhs[i] -= f * pivot_rhs;
                if self.rhs[i] < 0.0 && self.rhs[i] > -FEAS_TOL {
                    self.rhs[i] = 0.0;
                }
            }
        }
        let f = self.cost[e];
        if f != 0.0 {
            for (v, p) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            self.cost[e] = 0.0;
            self.cost_rhs -= f * pivot_rhs;
        }
        self.basis[r] = e;
    }

    /// Runs simplex iterations over columns `< allowed`. Returns `false` if
    /// the problem is unbounded.
    fn optimize(&mut self, allowed: usize) -> Result<bool, ()> {
        let mut degenerate = 0usize;
        for _ in 0..MAX_ITER {
            let entering = if degenerate < DEGENERATE_LIMIT {
                let mut best = None;
                let mut best_cost = -COST_TOL;
                for j in 0..allowed {
                    if self.cost[j] < best_cost {
                        best_cost = self.cost[j];
                        best = Some(j);
                    }
                }
                best
            } else {
                (0..allowed).find(|&j| self.cost[j] < -COST_TOL)
            };
            let Some(e) = entering else {
                return Ok(true);
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][e];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i] / a;
                    let better = match leave {
                        None => true,
                        Some((r, best)) => {
                            ratio < best - 1e-15
                                || (ratio <= best + 1e-15 && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(false);
            };
            if ratio <= 1e-15 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, e);
        }
        Err(())
    }
}

pub(crate) fn solve(objective: &[f64], constraints: &[Row]) -> LpOutcome {
    let n = objective.len();
    let m = constraints.len();

    let mut slack_cols = 0;
    let mut art_rows = Vec::new();
    let mut rows: Vec<(Vec<f64>, RowKind, f64)> = Vec::with_capacity(m);
    for (i, row) in constraints.iter().enumerate() {
        debug_assert_eq!(row.coeffs.len(), n);
        let (mut coeffs, mut kind, mut rhs) = (row.coeffs.clone(), row.kind, row.rhs);
        if rhs < 0.0 {
            coeffs.iter_mut().for_each(|v| *v = -*v);
            rhs = -rhs;
            kind = match kind {
                RowKind::Le => RowKind::Ge,
                RowKind::Ge => RowKind::Le,
                RowKind::Eq => RowKind::Eq,
            };
        }
        if kind != RowKind::Eq {
            slack_cols += 1;
        }
        if kind != RowKind::Le {
            art_rows.push(i);
        }
        rows.push((coeffs, kind, rhs));
    }

    let art_start = n + slack_cols;
    let ncols = art_start + art_rows.len();
    let mut t = Tableau {
        rows: vec![vec![0.0; ncols]; m],
        rhs: vec![0.0; m],
        basis: vec![0; m],
        cost: vec![0.0; ncols],
        cost_rhs: 0.0,
        ncols,
    };
    let mut slack = n;
    let mut art = art_start;
    for (i, (coeffs, kind, rhs)) in rows.into_iter().enumerate() {
        t.rows[i][..n].copy_from_slice(&coeffs);
        t.rhs[i] = rhs;
        match kind {
            RowKind::Le => {
                t.rows[i][slack] = 1.0;
                t.basis[i] = slack;
                slack += 1;
            }
            RowKind::Ge => {
                t.rows[i][slack] = -1.0;
                slack += 1;
                t.rows[i][art] = 1.0;
                t.basis[i] = art;
                art += 1;
            }
            RowKind::Eq => {
                t.rows[i][art] = 1.0;
                t.basis[i] = art;
                art += 1;
            }
        }
    }

    // Phase 1: minimize the sum of artificials.
    if !art_rows.is_empty() {
        for &i in &art_rows {
            for j in 0..art_start {
                t.cost[j] -= t.rows[i][j];
            }
            t.cost_rhs -= t.rhs[i];
        }
        match t.optimize(ncols) {
            Ok(true) => {}
            Ok(false) | Err(()) => return LpOutcome::Infeasible,
        }
        if -t.cost_rhs > FEAS_TOL {
            return LpOutcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..m {
            if t.basis[r] >= art_start {
                if let Some(e) = (0..art_start).find(|&j| t.rows[r][j].abs() > 1e-9) {
                    t.pivot(r, e);
                }
            }
        }
    }

    // Phase 2.
    t.cost = vec![0.0; t.ncols];
    t.cost[..n].copy_from_slice(objective);
    t.cost_rhs = 0.0;
    for r in 0..m {
        let b = t.basis[r];
        let cb = if b < n { objective[b] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..t.ncols {
                t.cost[j] -= cb * t.rows[r][j];
            }
            t.cost_rhs -= cb * t.rhs[r];
        }
    }
    match t.optimize(art_start) {
        Ok(true) => {}
        Ok(false) => return LpOutcome::Unbounded,
        Err(()) => return LpOutcome::Infeasible,
    }

    let mut x = vec![0.0; n];
    for r in 0..m {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rhs[r].max(0.0);
        }
    }
    let objective_value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
    LpOutcome::Optimal { x, objective: objective_value }
}
