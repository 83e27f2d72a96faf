//! Closed-form lower bounds on `P(X > 0)` for a centered random variable `X`.
//!
//! Every bound is a function of a scale-free moment ratio, captured by one of
//! the three profile types below. Each value returned here also bounds
//! `P(X >= 0)`, `P(X < 0)` and `P(X <= 0)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Event, Result};

/// Right end of the bracket used when inverting [`psi`]. Beyond it
/// `(1 - u)^(-1/(p-1))` loses all precision.
pub const PSI_BRACKET_RIGHT: f64 = 1.0 - 1e-15;

const PSI_MAX_BISECTIONS: usize = 200;

/// Splice point `3*sqrt(3)/2 - 3/2` of the piecewise fourth-moment bound.
pub fn fourth_splice_point() -> f64 {
    3.0 * 3f64.sqrt() / 2.0 - 1.5
}

/// `2*sqrt(3) - 3`, the numerator of the large-kurtosis branch.
pub fn fourth_tail_constant() -> f64 {
    2.0 * 3f64.sqrt() - 3.0
}

/// First absolute moment relative to the `p`-th: `c1p = ||X||_1 / ||X||_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstPProfile {
    p: f64,
    c1p: f64,
}

impl FirstPProfile {
    pub fn new(p: f64, c1p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::domain("p must be finite and greater than 1"));
        }
        if !(c1p > 0.0 && c1p <= 1.0) {
            return Err(Error::domain("c1p must lie in (0,1]"));
        }
        Ok(Self { p, c1p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn c1p(&self) -> f64 {
        self.c1p
    }
}

/// Normalized fourth moment `x = E X^4 / (E X^2)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourthProfile {
    x: f64,
}

impl FourthProfile {
    pub fn new(x: f64) -> Result<Self> {
        if !(x.is_finite() && x >= 1.0) {
            return Err(Error::domain("c42-fourth must be finite and at least 1"));
        }
        Ok(Self { x })
    }

    pub fn x(&self) -> f64 {
        self.x
    }
}

/// `p`-th moment relative to the second: `r = ||X||_p / ||X||_2`, `p > 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PthProfile {
    p: f64,
    r: f64,
}

impl PthProfile {
    pub fn new(p: f64, r: f64) -> Result<Self> {
        if !(p.is_finite() && p > 2.0) {
            return Err(Error::domain("p must be finite and greater than 2"));
        }
        if !(r.is_finite() && r >= 1.0) {
            return Err(Error::domain("cp2 must be finite and at least 1"));
        }
        Ok(Self { p, r })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MomentProfile {
    FirstP(FirstPProfile),
    Fourth(FourthProfile),
    Pth(PthProfile),
}

impl From<FirstPProfile> for MomentProfile {
    fn from(p: FirstPProfile) -> Self {
        MomentProfile::FirstP(p)
    }
}

impl From<FourthProfile> for MomentProfile {
    fn from(p: FourthProfile) -> Self {
        MomentProfile::Fourth(p)
    }
}

impl From<PthProfile> for MomentProfile {
    fn from(p: PthProfile) -> Self {
        MomentProfile::Pth(p)
    }
}

/// Which formula produced a bound. The declaration order is the tie-break
/// order used by [`best_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClassicalFirstP,
    FirstPSharp,
    FirstPExplicit,
    P2Closed,
    FourthPiecewise,
    PthImproved,
    ClassicalFourth,
    ClassicalPth,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClassicalFirstP => "classical-first-p",
            Method::FirstPSharp => "first-p-sharp",
            Method::FirstPExplicit => "first-p-explicit",
            Method::P2Closed => "p2-closed",
            Method::FourthPiecewise => "fourth-piecewise",
            Method::PthImproved => "pth-improved",
            Method::ClassicalFourth => "classical-fourth",
            Method::ClassicalPth => "classical-pth",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A lower bound on the probability of `event`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub method: Method,
    pub value: f64,
    pub event: Event,
}

impl BoundReport {
    fn strict(method: Method, value: f64) -> Self {
        debug_assert!(value > 0.0 && value <= 0.5 + 1e-12, "{method}: {value}");
        Self { method, value, event: Event::GtZero }
    }
}

/// `psi(u) = 2 (u^(-1/(p-1)) + (1-u)^(-1/(p-1)))^(-(p-1)/p)` on `[1/2, 1)`.
///
/// Strictly decreasing from 1 at `u = 1/2` towards 0 as `u -> 1`.
pub fn psi(p: f64, u: f64) -> Result<f64> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::domain("p must be finite and greater than 1"));
    }
    if !(0.5..1.0).contains(&u) {
        return Err(Error::domain("psi is defined for u in [1/2, 1)"));
    }
    Ok(psi_unchecked(p, u))
}

fn psi_unchecked(p: f64, u: f64) -> f64 {
    // log-sum-exp keeps the sum finite when p is close to 1.
    let a = 1.0 / (p - 1.0);
    let l1 = -a * u.ln();
    let l2 = -a * (-u).ln_1p();
    let hi = l1.max(l2);
    let log_sum = hi + ((l1 - hi).exp() + (l2 - hi).exp()).ln();
    2.0 * (-(p - 1.0) / p * log_sum).exp()
}

/// Inverse of [`psi`] by bisection on `[1/2, 1 - 1e-15]`.
///
/// Returns exactly `1/2` for `c = 1`. Values of `c` below
/// `psi(p, 1 - 1e-15)` are rejected.
pub fn psi_inverse(p: f64, c: f64) -> Result<f64> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::domain("p must be finite and greater than 1"));
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::domain("c1p must lie in (0,1]"));
    }
    if c == 1.0 {
        return Ok(0.5);
    }
    let floor = psi_unchecked(p, PSI_BRACKET_RIGHT);
    if c < floor {
        return Err(Error::Domain(format!(
            "c = {c} is below psi(p, 1 - 1e-15) = {floor}; the inverse is not resolvable in f64"
        )));
    }

    let (mut lo, mut hi) = (0.5, PSI_BRACKET_RIGHT);
    for _ in 0..PSI_MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if psi_unchecked(p, mid) > c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo > 1e-14 {
        return Err(Error::Convergence(format!(
            "psi inversion did not converge for p = {p}, c = {c}"
        )));
    }
    let (flo, fhi) = (psi_unchecked(p, lo), psi_unchecked(p, hi));
    Ok(if (flo - c).abs() <= (fhi - c).abs() { lo } else { hi })
}

/// `v = 1 - psi^{-1}(c)` in `(0, 1/2]`, with full relative precision.
///
/// `psi` is symmetric under `u -> 1 - u`, so `v` solves `psi(p, v) = c` on
/// the lower branch. Bisection runs on `ln v`, so unlike [`psi_inverse`]
/// there is no floor on `c`; returns 0 when the root underflows.
pub fn psi_inverse_complement(p: f64, c: f64) -> Result<f64> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::domain("p must be finite and greater than 1"));
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::domain("c1p must lie in (0,1]"));
    }
    if c == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (f64::MIN_POSITIVE.ln(), 0.5f64.ln());
    if psi_lower(p, lo.exp()) >= c {
        return Ok(0.0);
    }
    for _ in 0..PSI_MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if psi_lower(p, mid.exp()) < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (vlo, vhi) = (lo.exp(), hi.exp());
    let (flo, fhi) = (psi_lower(p, vlo), psi_lower(p, vhi));
    Ok(if (flo - c).abs() <= (fhi - c).abs() { vlo } else { vhi })
}

/// `psi` evaluated at `u = 1 - v` from `v` itself.
fn psi_lower(p: f64, v: f64) -> f64 {
    let a = 1.0 / (p - 1.0);
    let l1 = -a * (-v).ln_1p();
    let l2 = -a * v.ln();
    let hi = l1.max(l2);
    let log_sum = hi + ((l1 - hi).exp() + (l2 - hi).exp()).ln();
    2.0 * (-(p - 1.0) / p * log_sum).exp()
}

/// `(1 - v)^(-1/(p-1))` without rounding `1 - v`.
fn complement_factor(p: f64, v: f64) -> f64 {
    (-(-v).ln_1p() / (p - 1.0)).exp()
}

/// Sharp bound `(c/2)^(p/(p-1)) * psi^{-1}(c)^(-1/(p-1))`.
///
/// Evaluated through [`psi_inverse_complement`], so it is defined for every
/// valid profile, including those where [`psi_inverse`] cannot resolve `u`.
pub fn bound_first_p(profile: &FirstPProfile) -> Result<BoundReport> {
    let FirstPProfile { p, c1p } = *profile;
    let v = psi_inverse_complement(p, c1p)?;
    let value = (c1p / 2.0).powf(p / (p - 1.0)) * complement_factor(p, v);
    Ok(BoundReport::strict(Method::FirstPSharp, value))
}

/// `y` in the explicit bound `t (1 - y)^(-1/(p-1))`, where
/// `t = (c/2)^(p/(p-1))` and `y = (1/t - 1)^(-(p-1))`. The explicit bound
/// replaces `v` of [`psi_inverse_complement`] by `y <= v`.
pub fn explicit_complement(p: f64, c1p: f64) -> Result<f64> {
    let FirstPProfile { p, c1p } = FirstPProfile::new(p, c1p)?;
    let base = (c1p / 2.0).powf(p / (p - 1.0));
    // base < 1/2 for c1p <= 1, so 1/base - 1 > 1 and y lies in [0, 1).
    Ok((1.0 / base - 1.0).powf(-(p - 1.0)))
}

/// Explicit (non-sharp) variant of [`bound_first_p`] that avoids inverting
/// `psi`. Never exceeds it.
pub fn bound_first_p_explicit(profile: &FirstPProfile) -> Result<BoundReport> {
    let FirstPProfile { p, c1p } = *profile;
    let base = (c1p / 2.0).powf(p / (p - 1.0));
    let y = explicit_complement(p, c1p)?;
    Ok(BoundReport::strict(Method::FirstPExplicit, base * complement_factor(p, y)))
}

/// `1/2 - sqrt(1 - c^2)/2`, the `p = 2` case of [`bound_first_p`].
pub fn bound_p2_closed(c12: f64) -> Result<BoundReport> {
    if !(c12 > 0.0 && c12 <= 1.0) {
        return Err(Error::domain("c1p must lie in (0,1]"));
    }
    // Same quantity, written without the cancellation at small c.
    let s = (1.0 - c12 * c12).sqrt();
    Ok(BoundReport::strict(Method::P2Closed, c12 * c12 / (2.0 * (1.0 + s))))
}

/// Piecewise bound in terms of the normalized fourth moment `x`.
pub fn bound_fourth(profile: &FourthProfile) -> Result<BoundReport> {
    Ok(BoundReport::strict(Method::FourthPiecewise, fourth_piecewise(profile.x)))
}

fn fourth_piecewise(x: f64) -> f64 {
    if x < fourth_splice_point() {
        0.5 - 0.5 * ((x - 1.0) / (x + 3.0)).sqrt()
    } else {
        fourth_tail_constant() / x
    }
}

/// `p`-th moment bound with the improved leading factor
/// `((3 - 4/p)^(-1/(p-2)) + 1) / 4`.
pub fn bound_pth(profile: &PthProfile) -> Result<BoundReport> {
    let PthProfile { p, r } = *profile;
    let value = 0.25 * pth_scale(p, r) * pth_improvement(p);
    Ok(BoundReport::strict(Method::PthImproved, value))
}

/// Ratio of [`bound_pth`] to the classical `r^(-2p/(p-2)) / 4`.
pub fn pth_improvement(p: f64) -> f64 {
    (3.0 - 4.0 / p).powf(-1.0 / (p - 2.0)) + 1.0
}

fn pth_scale(p: f64, r: f64) -> f64 {
    r.powf(-2.0 * p / (p - 2.0))
}

/// The classical estimate matching the kind of `profile`.
pub fn classical_bound(profile: &MomentProfile) -> Result<BoundReport> {
    Ok(match *profile {
        MomentProfile::FirstP(FirstPProfile { p, c1p }) => {
            BoundReport::strict(Method::ClassicalFirstP, (c1p / 2.0).powf(p / (p - 1.0)))
        }
        MomentProfile::Fourth(FourthProfile { x }) => {
            BoundReport::strict(Method::ClassicalFourth, fourth_tail_constant() / x)
        }
        MomentProfile::Pth(PthProfile { p, r }) => {
            BoundReport::strict(Method::ClassicalPth, 0.25 * pth_scale(p, r))
        }
    })
}

/// The strongest bound for `profile`. For `p = 2` this is the closed form.
pub fn improved_bound(profile: &MomentProfile) -> Result<BoundReport> {
    match profile {
        MomentProfile::FirstP(fp) if fp.p == 2.0 => bound_p2_closed(fp.c1p),
        MomentProfile::FirstP(fp) => bound_first_p(fp),
        MomentProfile::Fourth(f) => bound_fourth(f),
        MomentProfile::Pth(pp) => bound_pth(pp),
    }
}

/// Every bound that applies to `profile`, ordered by [`Method`].
pub fn applicable_bounds(profile: &MomentProfile) -> Result<Vec<BoundReport>> {
    let mut out = vec![classical_bound(profile)?, improved_bound(profile)?];
    if let MomentProfile::FirstP(fp) = profile {
        out.push(bound_first_p_explicit(fp)?);
    }
    out.sort_by_key(|b| b.method);
    Ok(out)
}

/// Largest applicable bound across all supplied profiles.
///
/// Ties go to the method declared first in [`Method`]. Returns `None` for an
/// empty slice.
pub fn best_bound(profiles: &[MomentProfile]) -> Result<Option<BoundReport>> {
    let mut best: Option<BoundReport> = None;
    for profile in profiles {
        for b in applicable_bounds(profile)? {
            best = match best {
                Some(cur) if cur.value > b.value => Some(cur),
                Some(cur) if cur.value == b.value && cur.method <= b.method => Some(cur),
                _ => Some(b),
            };
        }
    }
    Ok(best)
}
