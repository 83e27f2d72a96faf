//! Low-dimensional oracle over distributions with two or three atoms.
//!
//! With `k` atoms there are `2k` unknowns (positions and masses) and one
//! equation per moment condition plus normalization. The first `d = 2k - E`
//! positions are searched over; the remaining positions and all masses are
//! solved from the equations by damped Newton iteration.

use nalgebra::{DMatrix, DVector};

use super::{MomentConstraintSet, OracleResult, OracleStatus};
use crate::distributions::DiscreteDistribution;
use crate::{Error, Event, Result};

const START_NODES: usize = 24;
const NEWTON_ITERS: usize = 60;
const RESIDUAL_TOL: f64 = 1e-11;
const STEP_TOL: f64 = 1e-10;
const INVPHI: f64 = 0.618_033_988_749_894_9;

struct Problem<'a> {
    cs: &'a MomentConstraintSet,
    k: usize,
    free: usize,
    event: Event,
}

/// A candidate: sorted positions and their masses.
#[derive(Debug, Clone)]
struct Point {
    xs: Vec<f64>,
    ws: Vec<f64>,
}

impl Problem<'_> {
    fn equations(&self) -> usize {
        self.cs.constraints().len() + 1
    }

    /// Scaled residuals: `sum w - 1` and `(sum w m(x) - t) / max(1, |t|)`.
    fn residual(&self, xs: &[f64], ws: &[f64]) -> DVector<f64> {
        let mut r = DVector::zeros(self.equations());
        r[0] = ws.iter().sum::<f64>() - 1.0;
        for (i, c) in self.cs.constraints().iter().enumerate() {
            let s = c.target.abs().max(1.0);
            let m: f64 = xs.iter().zip(ws).map(|(&x, &w)| w * c.eval(x)).sum();
            r[i + 1] = (m - c.target) / s;
        }
        r
    }

    /// Jacobian with respect to the solved positions `xs[free..]` and all masses.
    fn jacobian(&self, xs: &[f64], ws: &[f64]) -> DMatrix<f64> {
        let solved = self.k - self.free;
        let mut j = DMatrix::zeros(self.equations(), solved + self.k);
        for a in 0..self.k {
            j[(0, solved + a)] = 1.0;
        }
        for (i, c) in self.cs.constraints().iter().enumerate() {
            let s = c.target.abs().max(1.0);
            for (col, a) in (self.free..self.k).enumerate() {
                j[(i + 1, col)] = ws[a] * c.eval_deriv(xs[a]) / s;
            }
            for a in 0..self.k {
                j[(i + 1, solved + a)] = c.eval(xs[a]) / s;
            }
        }
        j
    }

    /// Least-squares masses for fixed positions.
    fn masses_for(&self, xs: &[f64]) -> Option<Vec<f64>> {
        let e = self.equations();
        let mut m = DMatrix::zeros(e, self.k);
        let mut t = DVector::zeros(e);
        t[0] = 1.0;
        for a in 0..self.k {
            m[(0, a)] = 1.0;
        }
        for (i, c) in self.cs.constraints().iter().enumerate() {
            let s = c.target.abs().max(1.0);
            t[i + 1] = c.target / s;
            for a in 0..self.k {
                m[(i + 1, a)] = c.eval(xs[a]) / s;
            }
        }
        let w = m.svd(true, true).solve(&t, 1e-14).ok()?;
        Some(w.iter().copied().collect())
    }

    /// Newton solve of the solved block, starting from `start`.
    fn solve(&self, start: &Point) -> Option<Point> {
        let mut p = start.clone();
        let mut r = self.residual(&p.xs, &p.ws);
        let mut norm = r.norm();
        for _ in 0..NEWTON_ITERS {
            if norm < RESIDUAL_TOL * 1e-2 {
                break;
            }
            let j = self.jacobian(&p.xs, &p.ws);
            let step = j.svd(true, true).solve(&(-&r), 1e-14).ok()?;
            let solved = self.k - self.free;
            let mut lambda = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let mut trial = p.clone();
                for (col, a) in (self.free..self.k).enumerate() {
                    trial.xs[a] += lambda * step[col];
                }
                for a in 0..self.k {
                    trial.ws[a] += lambda * step[solved + a];
                }
                let tr = self.residual(&trial.xs, &trial.ws);
                let tn = tr.norm();
                if tn.is_finite() && tn < norm {
                    p = trial;
                    r = tr;
                    norm = tn;
                    improved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (r.amax() <= RESIDUAL_TOL && self.valid(&p)).then_some(p)
    }

    /// Every valid point reached by Newton from `k`-subsets of `nodes`.
    fn converged(&self, nodes: &[f64]) -> Vec<Point> {
        combinations(nodes.len(), self.k)
            .into_iter()
            .filter_map(|combo| {
                let xs: Vec<f64> = combo.iter().map(|&i| nodes[i]).collect();
                let ws = self.masses_for(&xs)?;
                self.solve(&Point { xs, ws })
            })
            .collect()
    }

    fn valid(&self, p: &Point) -> bool {
        p.xs.windows(2).all(|w| w[0] < w[1])
            && p.ws.iter().all(|&w| w > 0.0 && w < 1.0)
            && p.xs.iter().all(|x| x.is_finite())
    }

    fn objective(&self, p: &Point) -> f64 {
        p.xs.iter().zip(&p.ws).filter(|(&x, _)| self.event.contains(x)).map(|(_, &w)| w).sum()
    }

    /// Re-solves with the free coordinate `j` moved to `y`.
    fn eval_at(&self, base: &Point, j: usize, y: f64) -> (f64, Option<Point>) {
        let mut start = base.clone();
        start.xs[j] = y;
        match self.solve(&start) {
            Some(p) => (self.objective(&p), Some(p)),
            None => (f64::INFINITY, None),
        }
    }

    /// Golden-section search on coordinate `j` over `[lo, hi]`.
    fn golden(&self, base: &Point, j: usize, mut lo: f64, mut hi: f64) -> Option<(f64, Point)> {
        let mut c = hi - INVPHI * (hi - lo);
        let mut d = lo + INVPHI * (hi - lo);
        let (mut fc, mut pc) = self.eval_at(base, j, c);
        let (mut fd, mut pd) = self.eval_at(base, j, d);
        while hi - lo > STEP_TOL {
            if fc <= fd {
                hi = d;
                d = c;
                (fd, pd) = (fc, pc);
                c = hi - INVPHI * (hi - lo);
                (fc, pc) = self.eval_at(base, j, c);
            } else {
                lo = c;
                c = d;
                (fc, pc) = (fd, pd);
                d = lo + INVPHI * (hi - lo);
                (fd, pd) = self.eval_at(base, j, d);
            }
        }
        let (f, p) = if fc <= fd { (fc, pc) } else { (fd, pd) };
        p.map(|p| (f, p))
    }
}

fn start_nodes(half_width: f64) -> Vec<f64> {
    let beta = half_width.asinh();
    let n = START_NODES / 2;
    let pos: Vec<f64> = (1..=n)
        .map(|i| half_width * (beta * i as f64 / n as f64).sinh() / beta.sinh())
        .collect();
    let mut nodes: Vec<f64> = pos.iter().rev().map(|x| -x).chain(pos.iter().copied()).collect();
    nodes.sort_by(f64::total_cmp);
    nodes
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for t in i..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

/// Minimum of `P(event)` over distributions with `atom_count` atoms (2 or 3)
/// satisfying `cs`.
///
/// A coarse grid of starting positions is solved by Newton iteration; the
/// best valid point is then refined by cyclic golden-section search over the
/// free positions until the step falls below `1e-10`.
pub fn min_prob_parametric(
    cs: &MomentConstraintSet,
    atom_count: usize,
    event: Event,
) -> Result<OracleResult> {
    if !(2..=3).contains(&atom_count) {
        return Err(Error::domain("atom count must be 2 or 3"));
    }
    let k = atom_count;
    let e = cs.constraints().len() + 1;
    let free = (2 * k).saturating_sub(e).min(k);
    let problem = Problem { cs, k, free, event };

    let nodes = start_nodes(cs.support_bound());
    let mut found = problem.converged(&nodes);
    if k == 3 {
        // Near-degenerate constraint sets leave no room for three spread-out
        // atoms; split each two-atom solution instead.
        let pair = Problem { cs, k: 2, free: 4usize.saturating_sub(e).min(2), event };
        for p in pair.converged(&nodes) {
            for a in 0..2 {
                let d = 1e-3 * p.xs[a].abs().max(1.0);
                let mut xs = p.xs.clone();
                let mut ws = p.ws.clone();
                xs.splice(a..=a, [p.xs[a] - d, p.xs[a] + d]);
                ws.splice(a..=a, [p.ws[a] / 2.0, p.ws[a] / 2.0]);
                found.extend(problem.solve(&Point { xs, ws }));
            }
        }
    }
    let mut best: Option<(f64, Point)> = None;
    for p in found {
        let f = problem.objective(&p);
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((f, p));
        }
    }
    let Some((mut best_f, mut best_p)) = best else {
        return Err(Error::Infeasible);
    };

    let status = if free > 0 {
        let mut step = best_p.xs.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        while step >= STEP_TOL {
            let mut moved = false;
            for j in 0..free {
                let left = if j == 0 { f64::NEG_INFINITY } else { best_p.xs[j - 1] };
                let right = best_p.xs[j + 1];
                let lo = (best_p.xs[j] - step).max(left);
                let hi = (best_p.xs[j] + step).min(right);
                if let Some((f, p)) = problem.golden(&best_p, j, lo, hi) {
                    if f < best_f {
                        best_f = f;
                        best_p = p;
                        moved = true;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        OracleStatus::Refined
    } else {
        OracleStatus::Optimal
    };

    let witness = DiscreteDistribution::new(best_p.xs.iter().copied().zip(best_p.ws.iter().copied()))?;
    Ok(OracleResult {
        min_prob: best_f,
        event,
        constraint_residuals: cs.residuals(&witness),
        slacks: vec![RESIDUAL_TOL; cs.constraints().len()],
        witness,
        status,
        constraints: cs.clone(),
        grid: None,
        support_size: k,
        notes: vec![format!("parametric search over {k}-atom distributions")],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{FirstPProfile, FourthProfile};
    use crate::oracle::MomentConstraint;
    use approx::assert_abs_diff_eq;

    #[test]
    fn combination_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(24, 3).len(), 2024);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn two_atoms_first_p() {
        let cs = MomentConstraintSet::first_p(&FirstPProfile::new(2.0, 0.8).unwrap());
        let r = min_prob_parametric(&cs, 2, Event::GeZero).unwrap();
        assert_abs_diff_eq!(r.min_prob, 0.2, epsilon = 1e-6);
        let atoms = r.witness.atoms();
        assert_abs_diff_eq!(atoms[0].0, -0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(atoms[1].0, 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(atoms[1].1, 0.2, epsilon = 1e-6);
        assert_eq!(r.status, OracleStatus::Optimal);
    }

    #[test]
    fn two_atoms_symmetric_cases() {
        let cs = MomentConstraintSet::fourth(&FourthProfile::new(1.0).unwrap());
        let r = min_prob_parametric(&cs, 2, Event::GeZero).unwrap();
        // Kurtosis 1 is a singular point of the moment map; Newton only
        // reaches about the square root of its residual tolerance.
        assert_abs_diff_eq!(r.min_prob, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(r.witness.atoms()[0].0, -1.0, epsilon = 1e-6);

        let cs = MomentConstraintSet::new(vec![
            MomentConstraint::raw(1, 0.0),
            MomentConstraint::absolute(1.0, 1.0),
            MomentConstraint::absolute(2.0, 1.0),
        ])
        .unwrap();
        let r = min_prob_parametric(&cs, 2, Event::GeZero).unwrap();
        assert_abs_diff_eq!(r.min_prob, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn three_atoms_large_kurtosis() {
        let cs = MomentConstraintSet::fourth(&FourthProfile::new(3.0).unwrap());
        let r = min_prob_parametric(&cs, 3, Event::GeZero).unwrap();
        assert!((r.min_prob - (2.0 * 3f64.sqrt() - 3.0) / 3.0).abs() < 2e-3, "{}", r.min_prob);
        assert_eq!(r.status, OracleStatus::Refined);
    }

    #[test]
    fn rejects_bad_atom_count() {
        let cs = MomentConstraintSet::fourth(&FourthProfile::new(2.0).unwrap());
        assert!(min_prob_parametric(&cs, 4, Event::GeZero).is_err());
    }
}
