//! Brute-force verification of the closed-form bounds.
//!
//! Minimizes `P(X >= 0)` (or `P(X > 0)`) over discrete distributions that
//! satisfy a set of moment constraints, either by linear programming over a
//! support grid ([`min_prob_lp`]) or by searching over the positions of two
//! or three atoms ([`min_prob_parametric`]).

mod parametric;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundReport, FirstPProfile, FourthProfile, PthProfile};
use crate::distributions::DiscreteDistribution;
use crate::{Error, Event, Result};

pub use parametric::min_prob_parametric;

use simplex::{LpOutcome, Row, RowKind};

/// Smallest atom mass used to derive the default support bound.
pub const MIN_PROB_FLOOR: f64 = 1e-4;

/// Hard cap on the default support half-width.
pub const MAX_SUPPORT: f64 = 100.0;

/// Default number of grid nodes.
pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Each refinement window is this many times finer than the grid around it.
pub const REFINE_FACTOR: usize = 100;

/// Relative half-width of the band each moment equality is relaxed to.
pub const SLACK_REL: f64 = 1e-6;

/// Width of the near-uniform core of [`SupportGrid::nodes`].
pub const GRID_CORE_SCALE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentKind {
    /// `E X^k`, integer `k`.
    Raw,
    /// `E |X|^q`, real `q >= 1`.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Eq,
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentConstraint {
    pub kind: MomentKind,
    pub exponent: f64,
    pub target: f64,
    pub relation: Relation,
}

impl MomentConstraint {
    pub fn raw(k: u32, target: f64) -> Self {
        Self { kind: MomentKind::Raw, exponent: k as f64, target, relation: Relation::Eq }
    }

    pub fn absolute(q: f64, target: f64) -> Self {
        Self { kind: MomentKind::Absolute, exponent: q, target, relation: Relation::Eq }
    }

    pub fn at_most(mut self) -> Self {
        self.relation = Relation::AtMost;
        self
    }

    /// Contribution `x^k` or `|x|^q` of an atom at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            MomentKind::Raw => x.powi(self.exponent as i32),
            MomentKind::Absolute => x.abs().powf(self.exponent),
        }
    }

    /// Derivative of [`MomentConstraint::eval`] in `x`.
    pub fn eval_deriv(&self, x: f64) -> f64 {
        let q = self.exponent;
        match self.kind {
            MomentKind::Raw => q * x.powi(q as i32 - 1),
            MomentKind::Absolute => q * x.abs().powf(q - 1.0) * x.signum(),
        }
    }

    /// Half-width of the feasibility band around the target.
    pub fn slack(&self) -> f64 {
        SLACK_REL * self.target.abs().max(1.0)
    }

    fn is_centering(&self) -> bool {
        self.kind == MomentKind::Raw && self.exponent == 1.0 && self.target == 0.0
    }

    /// Even or absolute moments with a positive target bound the support.
    fn bounds_support(&self) -> bool {
        self.target > 0.0
            && (self.kind == MomentKind::Absolute || (self.exponent as u32).is_multiple_of(2))
    }
}

/// Moment conditions on a centered distribution. Always contains `E X = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentConstraintSet {
    constraints: Vec<MomentConstraint>,
}

impl MomentConstraintSet {
    /// Validates and wraps `constraints`. At most four moment conditions,
    /// including centering, are accepted.
    pub fn new(constraints: Vec<MomentConstraint>) -> Result<Self> {
        let centering = constraints.iter().filter(|c| c.is_centering()).count();
        if centering != 1 {
            return Err(Error::domain("constraint set must contain E X = 0 exactly once"));
        }
        if constraints.len() > 4 {
            return Err(Error::domain("at most four moment conditions are supported"));
        }
        for c in &constraints {
            if !c.target.is_finite() || !c.exponent.is_finite() || c.exponent < 1.0 {
                return Err(Error::Domain(format!("invalid moment constraint {c:?}")));
            }
            if c.kind == MomentKind::Raw && c.exponent.fract() != 0.0 {
                return Err(Error::domain("raw moments need an integer exponent"));
            }
            if c.is_centering() && c.relation != Relation::Eq {
                return Err(Error::domain("centering must be an equality"));
            }
        }
        if !constraints.iter().any(|c| c.bounds_support() && c.relation == Relation::Eq) {
            return Err(Error::domain(
                "constraint set needs a normalizing even or absolute moment equality",
            ));
        }
        Ok(Self { constraints })
    }

    /// `E X = 0`, `E|X| = c1p`, `E|X|^p = 1`.
    pub fn first_p(profile: &FirstPProfile) -> Self {
        Self::new(vec![
            MomentConstraint::raw(1, 0.0),
            MomentConstraint::absolute(1.0, profile.c1p()),
            MomentConstraint::absolute(profile.p(), 1.0),
        ])
        .expect("valid by construction")
    }

    /// `E X = 0`, `E X^2 = 1`, `E X^4 = x`.
    pub fn fourth(profile: &FourthProfile) -> Self {
        Self::new(vec![
            MomentConstraint::raw(1, 0.0),
            MomentConstraint::raw(2, 1.0),
            MomentConstraint::raw(4, profile.x()),
        ])
        .expect("valid by construction")
    }

    /// `E X = 0`, `E X^2 = 1`, `E|X|^p = r^p`.
    pub fn pth(profile: &PthProfile) -> Self {
        Self::new(vec![
            MomentConstraint::raw(1, 0.0),
            MomentConstraint::raw(2, 1.0),
            MomentConstraint::absolute(profile.p(), profile.r().powf(profile.p())),
        ])
        .expect("valid by construction")
    }

    /// Turns the highest-order moment condition into a one-sided cap
    /// `E|X|^q <= target`.
    pub fn with_one_sided_cap(mut self) -> Self {
        if let Some(c) = self
            .constraints
            .iter_mut()
            .filter(|c| !c.is_centering())
            .max_by(|a, b| a.exponent.total_cmp(&b.exponent))
        {
            c.relation = Relation::AtMost;
        }
        self
    }

    pub fn constraints(&self) -> &[MomentConstraint] {
        &self.constraints
    }

    pub fn has_one_sided_cap(&self) -> bool {
        self.constraints.iter().any(|c| c.relation == Relation::AtMost)
    }

    /// Largest `|x|` at which an atom of mass [`MIN_PROB_FLOOR`] is
    /// compatible with every normalizing constraint, capped at
    /// [`MAX_SUPPORT`].
    pub fn support_bound(&self) -> f64 {
        self.constraints
            .iter()
            .filter(|c| c.bounds_support())
            .map(|c| (c.target / MIN_PROB_FLOOR).powf(1.0 / c.exponent))
            .fold(MAX_SUPPORT, f64::min)
    }

    /// `witness moment - target` for each constraint.
    pub fn residuals(&self, d: &DiscreteDistribution) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|c| d.atoms().iter().map(|&(x, w)| w * c.eval(x)).sum::<f64>() - c.target)
            .collect()
    }
}

/// Candidate support for [`min_prob_lp`].
///
/// Nodes are `x = s sinh(beta t)` for uniform `t`, with `s` =
/// [`GRID_CORE_SCALE`]: roughly uniform on `|x| < s` and geometric beyond, so
/// even a coarse grid resolves the unit scale set by the normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportGrid {
    pub xmin: f64,
    pub xmax: f64,
    pub points: usize,
    pub includes_zero: bool,
}

impl SupportGrid {
    pub fn new(xmin: f64, xmax: f64, points: usize, includes_zero: bool) -> Result<Self> {
        if !(xmin.is_finite() && xmax.is_finite() && xmin < 0.0 && xmax > 0.0) {
            return Err(Error::domain("grid needs xmin < 0 < xmax"));
        }
        if points < 3 {
            return Err(Error::domain("grid needs at least 3 points"));
        }
        Ok(Self { xmin, xmax, points, includes_zero })
    }

    /// Symmetric grid on `[-X, X]` with `X` from
    /// [`MomentConstraintSet::support_bound`].
    pub fn for_constraints(cs: &MomentConstraintSet, points: usize) -> Result<Self> {
        let x = cs.support_bound();
        Self::new(-x, x, points, true)
    }

    /// Same range with `2 (points - 1) + 1` nodes; contains every node of
    /// `self`.
    pub fn doubled(&self) -> Self {
        Self { points: 2 * (self.points - 1) + 1, ..*self }
    }

    pub fn nodes(&self) -> Vec<f64> {
        let n = self.points;
        let map = |t: f64| {
            let half = if t < 0.0 { -self.xmin } else { self.xmax };
            let beta = (half / GRID_CORE_SCALE).asinh();
            t.signum() * half * (beta * t.abs()).sinh() / beta.sinh()
        };
        let mut nodes: Vec<f64> = (0..n)
            .map(|i| {
                if i == 0 {
                    self.xmin
                } else if i == n - 1 {
                    self.xmax
                } else {
                    map(-1.0 + 2.0 * i as f64 / (n - 1) as f64)
                }
            })
            .collect();
        if self.includes_zero {
            if !nodes.contains(&0.0) {
                let nearest = (1..n - 1)
                    .min_by(|&a, &b| nodes[a].abs().total_cmp(&nodes[b].abs()))
                    .expect("at least three nodes");
                nodes[nearest] = 0.0;
            }
        } else {
            nodes.retain(|&x| x != 0.0);
        }
        nodes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleStatus {
    /// Basic optimal solution on the original grid, or an isolated
    /// parametric solution.
    Optimal,
    /// Result after local refinement.
    Refined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub min_prob: f64,
    pub event: Event,
    pub witness: DiscreteDistribution,
    pub status: OracleStatus,
    pub constraints: MomentConstraintSet,
    /// `witness moment - target`, one per constraint.
    pub constraint_residuals: Vec<f64>,
    /// Band half-width each constraint was allowed, one per constraint.
    pub slacks: Vec<f64>,
    pub grid: Option<SupportGrid>,
    /// Number of candidate atoms in the final solve.
    pub support_size: usize,
    pub notes: Vec<String>,
}

/// Minimum of `P(event)` over distributions supported on `nodes` meeting
/// `cs` up to each constraint's slack. No refinement.
pub fn min_prob_on_support(
    cs: &MomentConstraintSet,
    nodes: &[f64],
    event: Event,
) -> Result<(f64, DiscreteDistribution)> {
    let objective: Vec<f64> =
        nodes.iter().map(|&x| if event.contains(x) { 1.0 } else { 0.0 }).collect();

    let mut rows = vec![Row { coeffs: vec![1.0; nodes.len()], kind: RowKind::Eq, rhs: 1.0 }];
    for c in cs.constraints() {
        let raw: Vec<f64> = nodes.iter().map(|&x| c.eval(x)).collect();
        let scale = raw.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let coeffs: Vec<f64> = raw.iter().map(|v| v / scale).collect();
        let (lo, hi) = ((c.target - c.slack()) / scale, (c.target + c.slack()) / scale);
        rows.push(Row { coeffs: coeffs.clone(), kind: RowKind::Le, rhs: hi });
        if c.relation == Relation::Eq {
            rows.push(Row { coeffs, kind: RowKind::Ge, rhs: lo });
        }
    }

    match simplex::solve(&objective, &rows) {
        LpOutcome::Optimal { x, .. } => {
            let total: f64 = x.iter().sum();
            let atoms = nodes
                .iter()
                .zip(&x)
                .filter(|(_, &w)| w > 1e-15)
                .map(|(&node, &w)| (node, w / total));
            let witness = DiscreteDistribution::new(atoms)?;
            Ok((witness.prob_event(event), witness))
        }
        LpOutcome::Infeasible => Err(Error::Infeasible),
        LpOutcome::Unbounded => Err(Error::Convergence("probability LP reported unbounded".into())),
    }
}

/// LP oracle: solves on `grid`, then re-solves once with each incumbent
/// atom's neighbourhood re-gridded [`REFINE_FACTOR`] times finer.
pub fn min_prob_lp(
    cs: &MomentConstraintSet,
    grid: &SupportGrid,
    event: Event,
) -> Result<OracleResult> {
    let nodes = grid.nodes();
    let (_, coarse) = min_prob_on_support(cs, &nodes, event)?;

    let mut refined_nodes = nodes.clone();
    for &(x, _) in coarse.atoms() {
        let i = nodes.partition_point(|&v| v < x);
        let lo = nodes[i.saturating_sub(1)];
        let hi = nodes[(i + 1).min(nodes.len() - 1)];
        let steps = 2 * REFINE_FACTOR;
        refined_nodes.extend((0..=steps).map(|s| lo + (hi - lo) * s as f64 / steps as f64));
    }
    if !grid.includes_zero {
        refined_nodes.retain(|&x| x != 0.0);
    }
    refined_nodes.sort_by(f64::total_cmp);
    refined_nodes.dedup();

    let (min_prob, witness, status) = match min_prob_on_support(cs, &refined_nodes, event) {
        Ok((p, w)) => (p, w, OracleStatus::Refined),
        Err(_) => (coarse.prob_event(event), coarse, OracleStatus::Optimal),
    };

    let mut notes = vec![if cs.has_one_sided_cap() {
        "highest-order moment modeled as a one-sided cap".to_string()
    } else {
        "moment caps modeled as equalities at the cap".to_string()
    }];
    if event == Event::GtZero {
        notes.push(
            "strict event: mass just above 0 is excluded only on the grid; the true infimum may not be attained"
                .to_string(),
        );
    }
    Ok(OracleResult {
        min_prob,
        event,
        constraint_residuals: cs.residuals(&witness),
        slacks: cs.constraints().iter().map(MomentConstraint::slack).collect(),
        witness,
        status,
        constraints: cs.clone(),
        grid: Some(*grid),
        support_size: refined_nodes.len(),
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    /// The oracle found a feasible distribution below the bound.
    BoundTooHigh,
    OracleLoose,
}

/// Compares a closed-form bound with an oracle minimum for the same
/// constraints and event.
pub fn certify(bound: &BoundReport, oracle: &OracleResult, tol: f64) -> Verdict {
    certify_values(bound.value, oracle.min_prob, tol)
}

pub fn certify_values(bound: f64, min_prob: f64, tol: f64) -> Verdict {
    if min_prob < bound - tol {
        Verdict::BoundTooHigh
    } else if (min_prob - bound).abs() <= tol {
        Verdict::Certified
    } else {
        Verdict::OracleLoose
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn first_p(p: f64, c: f64) -> MomentConstraintSet {
        MomentConstraintSet::first_p(&FirstPProfile::new(p, c).unwrap())
    }

    fn fourth(x: f64) -> MomentConstraintSet {
        MomentConstraintSet::fourth(&FourthProfile::new(x).unwrap())
    }

    fn run(cs: &MomentConstraintSet, event: Event) -> OracleResult {
        let grid = SupportGrid::for_constraints(cs, DEFAULT_GRID_POINTS).unwrap();
        min_prob_lp(cs, &grid, event).unwrap()
    }

    #[test]
    fn constraint_set_validation() {
        assert!(MomentConstraintSet::new(vec![MomentConstraint::raw(2, 1.0)]).is_err());
        assert!(MomentConstraintSet::new(vec![
            MomentConstraint::raw(1, 0.0),
            MomentConstraint::raw(1, 0.0),
            MomentConstraint::raw(2, 1.0),
        ])
        .is_err());
        assert!(MomentConstraintSet::new(vec![MomentConstraint::raw(1, 0.0)]).is_err());
        assert!(MomentConstraintSet::new(vec![
            MomentConstraint::raw(1, 0.0),
            MomentConstraint::raw(3, 1.0),
        ])
        .is_err());
        let mut bad = MomentConstraint::raw(2, 1.0);
        bad.exponent = 2.5;
        assert!(MomentConstraintSet::new(vec![MomentConstraint::raw(1, 0.0), bad]).is_err());
        assert!(fourth(3.0).clone().with_one_sided_cap().has_one_sided_cap());
    }

    #[test]
    fn support_bound_from_normalization() {
        assert_eq!(first_p(2.0, 0.8).support_bound(), 100.0);
        assert_abs_diff_eq!(fourth(3.0).support_bound(), (3.0f64 / 1e-4).powf(0.25), epsilon = 1e-12);
    }

    #[test]
    fn grid_layout() {
        let g = SupportGrid::new(-10.0, 10.0, 101, true).unwrap();
        let nodes = g.nodes();
        assert_eq!(nodes.len(), 101);
        assert_eq!(nodes[0], -10.0);
        assert_eq!(nodes[100], 10.0);
        assert!(nodes.contains(&0.0));
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        // Finer near zero than at the edges.
        assert!(nodes[51] - nodes[50] < nodes[100] - nodes[99]);

        let even = SupportGrid::new(-1.0, 2.0, 10, true).unwrap().nodes();
        assert!(even.contains(&0.0));
        let no_zero = SupportGrid::new(-1.0, 1.0, 11, false).unwrap().nodes();
        assert!(!no_zero.contains(&0.0));

        let doubled = g.doubled().nodes();
        assert!(nodes.iter().all(|x| doubled.iter().any(|y| (x - y).abs() < 1e-12)));

        assert!(SupportGrid::new(0.0, 1.0, 11, true).is_err());
        assert!(SupportGrid::new(-1.0, 1.0, 2, true).is_err());
    }

    #[test]
    fn lp_first_p_p2() {
        let r = run(&first_p(2.0, 0.8), Event::GeZero);
        assert!((r.min_prob - 0.2).abs() < 2e-3, "{}", r.min_prob);
        assert_eq!(r.status, OracleStatus::Refined);
    }

    #[test]
    fn lp_fourth_both_branches() {
        let r = run(&fourth(3.0), Event::GeZero);
        assert!((r.min_prob - 0.154_700_538).abs() < 2e-3, "{}", r.min_prob);
        let r = run(&fourth(1.05), Event::GeZero);
        assert!((r.min_prob - 4.0 / 9.0).abs() < 2e-3, "{}", r.min_prob);
    }

    #[test]
    fn witness_respects_slack_and_atom_count() {
        for cs in [first_p(2.0, 0.8), fourth(3.0), fourth(1.05)] {
            let r = run(&cs, Event::GeZero);
            for (res, slack) in r.constraint_residuals.iter().zip(&r.slacks) {
                assert!(res.abs() <= slack * (1.0 + 1e-6) + 1e-12, "{res} > {slack}");
            }
            assert!(r.witness.len() <= cs.constraints().len() + 1, "{:?}", r.witness);
            assert_abs_diff_eq!(r.witness.prob_event(Event::GeZero), r.min_prob, epsilon = 1e-12);
        }
    }

    #[test]
    fn infeasible_constraints() {
        // E|X| > (E X^2)^(1/2) violates Jensen.
        let cs = MomentConstraintSet::new(vec![
            MomentConstraint::raw(1, 0.0),
            MomentConstraint::absolute(1.0, 1.5),
            MomentConstraint::raw(2, 1.0),
        ])
        .unwrap();
        let grid = SupportGrid::for_constraints(&cs, 201).unwrap();
        assert_eq!(min_prob_lp(&cs, &grid, Event::GeZero).unwrap_err(), Error::Infeasible);
    }

    #[test]
    fn one_sided_cap_sits_at_boundary() {
        let cs = fourth(3.0);
        let eq = run(&cs, Event::GeZero);
        let capped = run(&cs.clone().with_one_sided_cap(), Event::GeZero);
        assert!((eq.min_prob - capped.min_prob).abs() < 2e-3);
        assert!(capped.constraint_residuals[2] <= capped.slacks[2] * (1.0 + 1e-6));
        assert!(capped.constraint_residuals[2] > 0.0);
    }

    #[test]
    fn strict_event_excludes_zero() {
        let r = run(&fourth(3.0), Event::GtZero);
        assert!(r.witness.prob_event(Event::GtZero) <= r.min_prob + 1e-12);
        assert!((r.min_prob - 0.154_700_538).abs() < 2e-3);
        assert!(r.notes.iter().any(|n| n.contains("strict")));
    }

    #[test]
    fn coarse_grid_is_loose_until_refined() {
        let cs = first_p(2.0, 0.8);
        let grid = SupportGrid::for_constraints(&cs, 11).unwrap();
        let (coarse, _) = min_prob_on_support(&cs, &grid.nodes(), Event::GeZero).unwrap();
        assert_eq!(certify_values(0.2, coarse, 2e-3), Verdict::OracleLoose, "{coarse}");
        let refined = min_prob_lp(&cs, &grid, Event::GeZero).unwrap();
        assert!(refined.min_prob < coarse);
        assert_ne!(certify_values(0.2, refined.min_prob, 2e-3), Verdict::BoundTooHigh);
    }

    #[test]
    fn certify_definitions() {
        assert_eq!(certify_values(0.2, 0.2003, 2e-3), Verdict::Certified);
        assert_eq!(certify_values(0.2, 0.26, 2e-3), Verdict::OracleLoose);
        assert_eq!(certify_values(0.2, 0.18, 2e-3), Verdict::BoundTooHigh);
    }
}
