//! Finite discrete distributions and the extremal constructions that attain
//! the bounds in [`crate::bounds`].

use serde::{Deserialize, Serialize};

use crate::bounds::{self, FirstPProfile, FourthProfile};
use crate::{Error, Event, Result};

/// Atoms closer than this are merged at construction.
pub const MERGE_TOL: f64 = 1e-14;

/// Allowed deviation of the total mass from 1.
pub const MASS_TOL: f64 = 1e-12;

/// A distribution with finitely many atoms, sorted by value.
///
/// Serializes as `{"atoms": [[value, prob], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
struct RawDistribution {
    atoms: Vec<(f64, f64)>,
}

impl TryFrom<RawDistribution> for DiscreteDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        Self::new(raw.atoms)
    }
}

impl DiscreteDistribution {
    /// Builds a distribution from `(value, prob)` pairs in any order.
    ///
    /// Zero-mass atoms are dropped and atoms within [`MERGE_TOL`] of each
    /// other are merged (the mass-weighted position is kept).
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = atoms.into_iter().collect();
        for &(x, w) in &atoms {
            if !x.is_finite() || !w.is_finite() || w < 0.0 {
                return Err(Error::Input(format!("invalid atom ({x}, {w})")));
            }
        }
        atoms.retain(|&(_, w)| w > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            match merged.last_mut() {
                Some(last) if x - last.0 < MERGE_TOL => {
                    let total = last.1 + w;
                    last.0 = (last.0 * last.1 + x * w) / total;
                    last.1 = total;
                }
                _ => merged.push((x, w)),
            }
        }
        for atom in &mut merged {
            if atom.0 == 0.0 {
                atom.0 = 0.0; // drop the sign of -0.0
            }
        }

        let total: f64 = merged.iter().map(|a| a.1).sum();
        if merged.is_empty() || (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Input(format!("probabilities sum to {total}, not 1")));
        }
        if merged.iter().any(|a| a.1 > 1.0) {
            return Err(Error::Input("atom probability exceeds 1".into()));
        }
        Ok(Self { atoms: merged })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `E X^k`.
    pub fn raw_moment(&self, k: u32) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * x.powi(k as i32)).sum()
    }

    /// `E |X|^p` (not its `p`-th root).
    pub fn abs_moment(&self, p: f64) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * x.abs().powf(p)).sum()
    }

    pub fn prob_event(&self, event: Event) -> f64 {
        self.atoms.iter().filter(|a| event.contains(a.0)).map(|a| a.1).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }
}

/// Two-point distribution attaining [`bounds::bound_first_p`] for `P(X <= 0)`,
/// normalized to `E|X|^p = 1` and `E|X| = c`.
pub fn extremal_first_p(p: f64, c: f64) -> Result<DiscreteDistribution> {
    let mu = bounds::bound_first_p(&FirstPProfile::new(p, c)?)?.value;
    DiscreteDistribution::new([(-c / (2.0 * mu), mu), (c / (2.0 * (1.0 - mu)), 1.0 - mu)])
}

/// Two-point distribution with `E X = 0`, `E X^2 = 1`, `E X^4 = x` and
/// `P(X >= 0)` equal to [`bounds::bound_fourth`], for `x` below the splice
/// point.
pub fn extremal_fourth_twopoint(x: f64) -> Result<DiscreteDistribution> {
    FourthProfile::new(x)?;
    let x0 = bounds::fourth_splice_point();
    if x >= x0 {
        return Err(Error::Domain(format!(
            "two-point witness needs c42-fourth in [1, {x0}), got {x}"
        )));
    }
    let hi = 0.5 * (2.0 + 2.0 * x + 2.0 * ((x - 1.0) * (x + 3.0)).sqrt()).sqrt();
    let lo = -1.0 / hi;
    // The positive atom carries 1 / (hi^2 + 1), the smaller mass.
    let p_hi = 1.0 / (hi * hi + 1.0);
    DiscreteDistribution::new([(lo, 1.0 - p_hi), (hi, p_hi)])
}

/// A member of the three-point family approaching the large-kurtosis branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalFamilyMember {
    pub distribution: DiscreteDistribution,
    pub epsilon: f64,
    pub target_fourth: f64,
}

/// Masses `(l1, l2, l3)` of the three-point family for target kurtosis `c`.
pub fn family_masses(c: f64) -> Result<(f64, f64, f64)> {
    FourthProfile::new(c)?;
    let s3 = 3f64.sqrt();
    let x0 = bounds::fourth_splice_point();
    let l2 = 1.0 - x0 / c;
    if l2 < 0.0 {
        return Err(Error::Domain(format!(
            "three-point family needs c42-fourth >= {x0}, got {c}"
        )));
    }
    Ok(((1.5 - s3 / 2.0) / c, l2, bounds::fourth_tail_constant() / c))
}

/// Supremum of the `epsilon` values for which the family stays ordered
/// (`x1 < -epsilon < 0 < x3`). At the supremum the two negative atoms meet.
pub fn family_epsilon_threshold(c: f64) -> Result<f64> {
    let (_, _, l3) = family_masses(c)?;
    Ok((l3 / (1.0 - l3)).sqrt())
}

/// Three-point distribution with atoms `x1 < -epsilon <= 0 < x3`, unit
/// variance and `P(X >= 0) = (2*sqrt(3) - 3)/c` for `epsilon > 0`. Its
/// fourth moment tends to `c` as `epsilon -> 0`.
pub fn extremal_fourth_family(c: f64, epsilon: f64) -> Result<ExtremalFamilyMember> {
    let (l1, l2, l3) = family_masses(c)?;
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::domain("epsilon must be finite and non-negative"));
    }
    // Eliminating x1 from the two moment equations leaves
    // a x3^2 + b x3 + k = 0.
    let a = l3 * (l1 + l3);
    let b = -2.0 * l2 * l3 * epsilon;
    let k = l2 * l2 * epsilon * epsilon - l1 + l1 * l2 * epsilon * epsilon;
    let disc = b * b - 4.0 * a * k;
    let threshold = family_epsilon_threshold(c)?;
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "epsilon = {epsilon} too large (ordering threshold {threshold})"
        )));
    }
    let x3 = (-b + disc.sqrt()) / (2.0 * a);
    let x1 = (l2 * epsilon - l3 * x3) / l1;
    let mid = if epsilon == 0.0 { 0.0 } else { -epsilon };
    let ordered = x1 < mid && mid <= 0.0 && x3 > 0.0;
    if !ordered || (l2 > 0.0 && epsilon >= threshold) {
        return Err(Error::Domain(format!(
            "epsilon = {epsilon} breaks x1 < -epsilon < 0 < x3 (threshold {threshold})"
        )));
    }
    Ok(ExtremalFamilyMember {
        distribution: DiscreteDistribution::new([(x1, l1), (mid, l2), (x3, l3)])?,
        epsilon,
        target_fourth: c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rademacher() -> DiscreteDistribution {
        DiscreteDistribution::new([(-1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    fn skewed() -> DiscreteDistribution {
        DiscreteDistribution::new([(-2.0, 0.2), (0.5, 0.8)]).unwrap()
    }

    #[test]
    fn moments() {
        assert_eq!(rademacher().raw_moment(1), 0.0);
        assert_eq!(rademacher().raw_moment(4), 1.0);
        assert_abs_diff_eq!(skewed().raw_moment(2), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(skewed().abs_moment(1.0), 0.8, epsilon = 1e-15);
        assert_eq!(rademacher().abs_moment(3.0), 1.0);
        assert_abs_diff_eq!(skewed().abs_moment(2.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn events() {
        assert_eq!(rademacher().prob_event(Event::GeZero), 0.5);
        let d = DiscreteDistribution::new([(-1.0, 0.25), (0.0, 0.25), (1.0, 0.5)]).unwrap();
        assert_eq!(d.prob_event(Event::GtZero), 0.5);
        assert_eq!(d.prob_event(Event::GeZero), 0.75);
        assert_eq!(d.prob_event(Event::LtZero), 0.25);
        assert_eq!(skewed().prob_event(Event::LeZero), 0.2);
    }

    #[test]
    fn construction_sorts_merges_and_validates() {
        let d = DiscreteDistribution::new([(1.0, 0.3), (-1.0, 0.5), (1.0 + 1e-16, 0.2), (3.0, 0.0)])
            .unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.atoms()[0], (-1.0, 0.5));
        assert_abs_diff_eq!(d.atoms()[1].1, 0.5, epsilon = 1e-15);
        assert!(DiscreteDistribution::new([(0.0, 0.5)]).is_err());
        assert!(DiscreteDistribution::new([(0.0, -0.5), (1.0, 1.5)]).is_err());
        assert!(DiscreteDistribution::new([(f64::NAN, 1.0)]).is_err());
        assert!(DiscreteDistribution::new(Vec::new()).is_err());
        let z = DiscreteDistribution::new([(-0.0, 1.0)]).unwrap();
        assert!(z.atoms()[0].0.is_sign_positive());
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&skewed()).unwrap();
        assert_eq!(s, r#"{"atoms":[[-2.0,0.2],[0.5,0.8]]}"#);
        let back: DiscreteDistribution = serde_json::from_str(&s).unwrap();
        assert_eq!(back, skewed());
        assert!(serde_json::from_str::<DiscreteDistribution>(r#"{"atoms":[[0,0.4]]}"#).is_err());
    }

    #[test]
    fn first_p_witness_p2() {
        let d = extremal_first_p(2.0, 0.8).unwrap();
        assert_abs_diff_eq!(d.atoms()[0].0, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.atoms()[0].1, 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(d.atoms()[1].0, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.raw_moment(1), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.abs_moment(1.0), 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(d.raw_moment(2), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.prob_event(Event::LeZero), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn first_p_witness_symmetric_and_p3() {
        for p in [1.5, 3.0, 6.0] {
            let d = extremal_first_p(p, 1.0).unwrap();
            assert_abs_diff_eq!(d.atoms()[0].0, -1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(d.atoms()[1].0, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(d.atoms()[0].1, 0.5, epsilon = 1e-12);
        }
        let d = extremal_first_p(3.0, 0.5).unwrap();
        assert_abs_diff_eq!(d.abs_moment(3.0), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn fourth_twopoint_examples() {
        let d = extremal_fourth_twopoint(1.0).unwrap();
        assert_eq!(d.atoms(), &[(-1.0, 0.5), (1.0, 0.5)]);

        let d = extremal_fourth_twopoint(1.05).unwrap();
        let expected = 2.0 / (3.0 + 1.05 + (0.05f64 * 4.05).sqrt());
        assert_abs_diff_eq!(expected, 4.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.prob_event(Event::GeZero), 4.0 / 9.0, epsilon = 1e-12);

        let d = extremal_fourth_twopoint(1.09).unwrap();
        assert_abs_diff_eq!(d.raw_moment(4), 1.09, epsilon = 1e-10);
        assert_abs_diff_eq!(d.raw_moment(2), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.raw_moment(1), 0.0, epsilon = 1e-12);

        assert!(extremal_fourth_twopoint(1.1).is_err());
        assert!(extremal_fourth_twopoint(0.9).is_err());
    }

    #[test]
    fn family_at_zero_epsilon_matches_closed_form() {
        let s3 = 3f64.sqrt();
        for c in [bounds::fourth_splice_point(), 2.0, 5.0, 40.0] {
            let (l1, _, l3) = family_masses(c).unwrap();
            let x1 = -(1.0 - s3 / 3.0) / (2.0 - s3).sqrt() * c.sqrt();
            let x3 = (s3 / 3.0) / (2.0 - s3).sqrt() * c.sqrt();
            assert_abs_diff_eq!(l1 * x1 + l3 * x3, 0.0, epsilon = 1e-12);
            let fam = extremal_fourth_family(c, 0.0).unwrap();
            let atoms = fam.distribution.atoms();
            assert_abs_diff_eq!(atoms[0].0, x1, epsilon = 1e-12);
            assert_abs_diff_eq!(atoms.last().unwrap().0, x3, epsilon = 1e-12);
        }
        let fam = extremal_fourth_family(2.0, 0.0).unwrap();
        assert_abs_diff_eq!(fam.distribution.raw_moment(4), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn family_small_epsilon() {
        let fam = extremal_fourth_family(2.0, 1e-4).unwrap();
        let d = &fam.distribution;
        assert_eq!(d.len(), 3);
        assert_eq!(d.prob_event(Event::GeZero), (2.0 * 3f64.sqrt() - 3.0) / 2.0);
        assert!((d.raw_moment(4) - 2.0).abs() < 1e-3);
        assert_abs_diff_eq!(d.raw_moment(1), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.raw_moment(2), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn family_converges_monotonically() {
        for c in [1.5, 2.0, 5.0] {
            let devs: Vec<f64> = [1e-2, 1e-3, 1e-4]
                .iter()
                .map(|&e| (extremal_fourth_family(c, e).unwrap().distribution.raw_moment(4) - c).abs())
                .collect();
            assert!(devs[0] > devs[1] && devs[1] > devs[2], "{c}: {devs:?}");
        }
    }

    #[test]
    fn family_rejects_bad_parameters() {
        assert!(matches!(extremal_fourth_family(1.05, 0.01), Err(Error::Domain(_))));
        let t = family_epsilon_threshold(2.0).unwrap();
        assert!(extremal_fourth_family(2.0, 0.99 * t).is_ok());
        assert!(extremal_fourth_family(2.0, t * 1.01).is_err());
        assert!(extremal_fourth_family(2.0, -1e-3).is_err());
    }

    #[test]
    fn family_at_splice_collapses_to_two_atoms() {
        let x0 = bounds::fourth_splice_point();
        let fam = extremal_fourth_family(x0, 1e-4).unwrap();
        assert_eq!(fam.distribution.len(), 2);
        assert_eq!(
            fam.distribution.prob_event(Event::GeZero),
            bounds::fourth_tail_constant() / x0
        );
    }
}
