//! Second-order chaos `S = sum_{i<j} xi_i xi_j a_ij` with Rademacher or
//! Gaussian `xi`, and the probability bounds that follow from its fourth
//! moment.
//!
//! For any such chaos `||S||_4 <= 15^(1/4) ||S||_2`, so the fourth-moment
//! bound gives `P(S >= 0) >= (2*sqrt(3) - 3)/15`. The same constant bounds
//! Hilbert-space norm events `||sum r_i a_i|| >= (sum ||a_i||^2)^(1/2)` and
//! `||G|| > (E||G||^2)^(1/2)` for Gaussian `G`.

pub mod eigen;
pub mod enumerate;
pub mod io;
pub mod montecarlo;

use rand::Rng as _;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Event, Result};

pub use enumerate::{rademacher_enumerate, rademacher_enumerate_with_tol, EnumerationResult, MAX_ENUM_DIM};
pub use montecarlo::{wilson_interval, MonteCarloResult};

/// Symmetric coefficient matrix with zero diagonal.
///
/// The upper triangle is authoritative; the lower one mirrors it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaosCoefficients {
    n: usize,
    a: Vec<f64>,
}

impl ChaosCoefficients {
    /// From the strict upper triangle in row order
    /// `a_12, a_13, ..., a_1n, a_23, ..., a_{n-1,n}`.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("dimension must be positive".into()));
        }
        if upper.len() != n * (n - 1) / 2 {
            return Err(Error::Input(format!(
                "expected {} upper-triangle entries for n = {n}, got {}",
                n * (n - 1) / 2,
                upper.len()
            )));
        }
        if let Some(v) = upper.iter().find(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite coefficient {v}")));
        }
        let mut a = vec![0.0; n * n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = *it.next().expect("length checked");
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        Ok(Self { n, a })
    }

    /// From a dense square matrix. The diagonal must be zero and the matrix
    /// symmetric within `1e-12`.
    #[allow(clippy::needless_range_loop)]
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Input("matrix must be square and non-empty".into()));
        }
        let mut upper = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(Error::Input(format!("diagonal entry a[{i}][{i}] = {} is not 0", rows[i][i])));
            }
            for j in i + 1..n {
                if (rows[i][j] - rows[j][i]).abs() > 1e-12 {
                    return Err(Error::Input(format!(
                        "matrix is not symmetric at ({i}, {j}): {} vs {}",
                        rows[i][j], rows[j][i]
                    )));
                }
                upper.push(rows[i][j]);
            }
        }
        Self::from_upper(n, &upper)
    }

    /// `a_ij = 1` for all `i != j`.
    pub fn all_ones(n: usize) -> Self {
        Self::from_upper(n, &vec![1.0; n * (n - 1) / 2]).expect("valid by construction")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    /// Row-major `n x n` matrix.
    pub fn dense(&self) -> &[f64] {
        &self.a
    }

    pub fn upper(&self) -> Vec<f64> {
        let n = self.n;
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| self.get(i, j)).collect()
    }

    /// `sum_{i<j} a_ij^2`, which equals `E S^2` for unit-variance inputs.
    pub fn upper_sq_sum(&self) -> f64 {
        self.upper().iter().map(|v| v * v).sum()
    }

    pub fn upper_abs_sum(&self) -> f64 {
        self.upper().iter().map(|v| v.abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&v| v == 0.0)
    }

    /// `S = sum_{i<j} x_i x_j a_ij` at a given point.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            let row = &self.a[i * n..(i + 1) * n];
            let mut acc = 0.0;
            for j in i + 1..n {
                acc += row[j] * x[j];
            }
            s += x[i] * acc;
        }
        s
    }
}

/// Eigenvalues (descending) with their second and fourth power sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub frobenius_sq: f64,
    pub fourth_power_sum: f64,
}

impl Spectrum {
    /// Wraps arbitrary eigenvalues. Spectra from [`eigen_symmetric`] also have
    /// zero trace.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let frobenius_sq = eigenvalues.iter().map(|l| l * l).sum();
        let fourth_power_sum = eigenvalues.iter().map(|l| l.powi(4)).sum();
        Self { eigenvalues, frobenius_sq, fourth_power_sum }
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

pub fn eigen_symmetric(c: &ChaosCoefficients) -> Result<Spectrum> {
    Ok(Spectrum::from_eigenvalues(eigen::symmetric_eigenvalues(c.dense(), c.n())?))
}

/// `(E S^2, E S^4)` for the Gaussian chaos with this spectrum, where
/// `S = (1/2) sum_i l_i (g_i^2 - 1)`.
///
/// With `Y = g^2 - 1` (`E Y^2 = 2`, `E Y^4 = 60`):
/// `E (sum l Y)^4 = 48 sum l^4 + 12 (sum l^2)^2`.
pub fn gaussian_chaos_moments(s: &Spectrum) -> (f64, f64) {
    let m2 = s.frobenius_sq / 2.0;
    let m4 = (48.0 * s.fourth_power_sum + 12.0 * s.frobenius_sq * s.frobenius_sq) / 16.0;
    (m2, m4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioModel {
    RademacherExact,
    GaussianSpectral,
}

/// `||S||_4 / ||S||_2`.
pub fn lemma_ratio(c: &ChaosCoefficients, model: RatioModel) -> Result<f64> {
    if c.is_zero() {
        return Err(Error::domain("coefficients are identically zero"));
    }
    let (m2, m4) = match model {
        RatioModel::RademacherExact => {
            let e = rademacher_enumerate(c)?;
            (e.m2, e.m4)
        }
        RatioModel::GaussianSpectral => gaussian_chaos_moments(&eigen_symmetric(c)?),
    };
    Ok(m4.powf(0.25) / m2.sqrt())
}

/// `15^((p-2)/(2p))` on `(2, 4]` and `15^((2-p)/(2p))` on `(0, 2)`.
pub fn interpolation_constant(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 4.0) || p == 2.0 {
        return Err(Error::domain("p must lie in (0,2) or (2,4]"));
    }
    let exponent = if p > 2.0 { (p - 2.0) / (2.0 * p) } else { (2.0 - p) / (2.0 * p) };
    Ok(15f64.powf(exponent))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Rademacher,
    Gaussian,
}

/// Monte Carlo estimate of `P(S in event)` with a 95% Wilson interval.
pub fn mc_estimate(
    c: &ChaosCoefficients,
    model: Model,
    event: Event,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloResult> {
    if samples == 0 {
        return Err(Error::domain("samples must be at least 1"));
    }
    let n = c.n();
    let zero_tol = enumerate::default_zero_tol(c);
    let tally = montecarlo::run(samples, seed, |rng| {
        let x: Vec<f64> = match model {
            Model::Rademacher => (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect(),
            Model::Gaussian => (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect(),
        };
        let s = c.quadratic_form(&x);
        (event.contains_within(s, zero_tol), s)
    });
    Ok(MonteCarloResult::proportion(tally.hits, samples, seed))
}

/// Real vectors `a_1, ..., a_n` of a common dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVectors")]
pub struct VectorSystem {
    vectors: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawVectors {
    vectors: Vec<Vec<f64>>,
}

impl TryFrom<RawVectors> for VectorSystem {
    type Error = Error;

    fn try_from(raw: RawVectors) -> Result<Self> {
        Self::new(raw.vectors)
    }
}

impl VectorSystem {
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::Input("vector system is empty".into()));
        };
        let d = first.len();
        if d == 0 || vectors.iter().any(|v| v.len() != d) {
            return Err(Error::Input("vectors must share a positive dimension".into()));
        }
        if vectors.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Input("vector entries must be finite".into()));
        }
        if vectors.iter().flatten().all(|&v| v == 0.0) {
            return Err(Error::Input("vectors are all zero".into()));
        }
        Ok(Self { vectors })
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `sum ||a_i||^2`.
    pub fn norm_sq_sum(&self) -> f64 {
        self.vectors.iter().map(|v| dot(v, v)).sum()
    }

    /// Coefficients `2 <a_i, a_j>`, so that
    /// `||sum r_i a_i||^2 - sum ||a_i||^2 = sum_{i<j} r_i r_j a_ij`.
    pub fn gram_offdiag(&self) -> ChaosCoefficients {
        let n = self.len();
        let upper: Vec<f64> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| 2.0 * dot(&self.vectors[i], &self.vectors[j]))
            .collect();
        ChaosCoefficients::from_upper(n, &upper).expect("valid by construction")
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum HilbertMode {
    Exact,
    Mc { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HilbertProbs {
    /// `P(||sum r_i a_i|| >= (sum ||a_i||^2)^(1/2))`.
    pub p_upper: f64,
    /// `P(||sum r_i a_i|| <= (sum ||a_i||^2)^(1/2))`.
    pub p_lower: f64,
    /// Monte Carlo intervals `(upper, lower)` when sampled.
    pub mc: Option<(MonteCarloResult, MonteCarloResult)>,
}

/// Both Rademacher norm probabilities, through the chaos on
/// [`VectorSystem::gram_offdiag`].
pub fn hilbert_norm_probs(v: &VectorSystem, mode: HilbertMode) -> Result<HilbertProbs> {
    let c = v.gram_offdiag();
    let zero_tol = 1e-9 * v.norm_sq_sum();
    match mode {
        HilbertMode::Exact => {
            let e = rademacher_enumerate_with_tol(&c, zero_tol)?;
            Ok(HilbertProbs { p_upper: e.prob_ge, p_lower: e.prob_le, mc: None })
        }
        HilbertMode::Mc { samples, seed } => {
            if samples == 0 {
                return Err(Error::domain("samples must be at least 1"));
            }
            let n = c.n();
            let tally = |event: Event| {
                montecarlo::run(samples, seed, |rng| {
                    let r: Vec<f64> =
                        (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
                    let s = c.quadratic_form(&r);
                    (event.contains_within(s, zero_tol), s)
                })
            };
            let up = MonteCarloResult::proportion(tally(Event::GeZero).hits, samples, seed);
            let lo = MonteCarloResult::proportion(tally(Event::LeZero).hits, samples, seed);
            Ok(HilbertProbs { p_upper: up.estimate, p_lower: lo.estimate, mc: Some((up, lo)) })
        }
    }
}

/// Monte Carlo estimate of `P(||G|| > (E||G||^2)^(1/2))` for
/// `G = sum sqrt(l_k) g_k e_k`, i.e. `P(sum l_k (g_k^2 - 1) > 0)`.
pub fn gaussian_hilbert_prob(lambdas: &[f64], samples: u64, seed: u64) -> Result<MonteCarloResult> {
    if lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) || !lambdas.iter().any(|&l| l > 0.0) {
        return Err(Error::domain("need non-negative lambdas with at least one positive"));
    }
    if samples == 0 {
        return Err(Error::domain("samples must be at least 1"));
    }
    let tally = montecarlo::run(samples, seed, |rng| {
        let q: f64 = lambdas
            .iter()
            .map(|&l| {
                let g: f64 = rng.sample(StandardNormal);
                l * (g * g - 1.0)
            })
            .sum();
        (q > 0.0, q)
    });
    Ok(MonteCarloResult::proportion(tally.hits, samples, seed))
}

/// Monte Carlo mean of `(sum l_k (g_k^2 - 1))^4`, an independent check on
/// the quartic coefficients of [`gaussian_chaos_moments`].
pub fn gaussian_form_fourth_mc(lambdas: &[f64], samples: u64, seed: u64) -> MonteCarloResult {
    let tally = montecarlo::run(samples, seed, |rng| {
        let q: f64 = lambdas
            .iter()
            .map(|&l| {
                let g: f64 = rng.sample(StandardNormal);
                l * (g * g - 1.0)
            })
            .sum();
        (false, q.powi(4))
    });
    MonteCarloResult::mean(tally.sum, tally.sum_sq, samples, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialSumStats {
    /// `E xi^2 = sum a_i^2`.
    pub c2sq: f64,
    /// `E xi^4 = 6 sum a_i^4 + 3 (sum a_i^2)^2`.
    pub c4fourth: f64,
    /// `E xi^4 / (E xi^2)^2`, at most 9.
    pub ratio: f64,
    /// Monte Carlo `E|xi|`.
    pub c1_mc: MonteCarloResult,
    /// Monte Carlo `P(xi >= 0)`.
    pub prob_ge_mc: MonteCarloResult,
}

/// Moments of `xi = sum a_i (eta_i - 1)` with i.i.d. unit exponentials
/// `eta_i`, plus Monte Carlo estimates of `E|xi|` and `P(xi >= 0)`.
///
/// Uses `E(eta - 1)^2 = 1`, `E(eta - 1)^4 = 9`.
pub fn exponential_sum_stats(a: &[f64], samples: u64, seed: u64) -> Result<ExponentialSumStats> {
    if a.iter().any(|v| !v.is_finite()) || a.iter().all(|&v| v == 0.0) {
        return Err(Error::domain("coefficients must be finite and not all zero"));
    }
    if samples == 0 {
        return Err(Error::domain("samples must be at least 1"));
    }
    let s2: f64 = a.iter().map(|v| v * v).sum();
    let s4: f64 = a.iter().map(|v| v.powi(4)).sum();
    let c4fourth = 6.0 * s4 + 3.0 * s2 * s2;

    let draw = |rng: &mut montecarlo::Rng| -> f64 {
        a.iter()
            .map(|&ai| {
                let eta: f64 = rng.sample(Exp1);
                ai * (eta - 1.0)
            })
            .sum()
    };
    let abs = montecarlo::run(samples, seed, |rng| (false, draw(rng).abs()));
    let ge = montecarlo::run(samples, seed, |rng| (draw(rng) >= 0.0, 0.0));
    Ok(ExponentialSumStats {
        c2sq: s2,
        c4fourth,
        ratio: c4fourth / (s2 * s2),
        c1_mc: MonteCarloResult::mean(abs.sum, abs.sum_sq, samples, seed),
        prob_ge_mc: MonteCarloResult::proportion(ge.hits, samples, seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coefficient_construction() {
        let c = ChaosCoefficients::from_upper(3, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(c.get(0, 2), 2.0);
        assert_eq!(c.get(2, 0), 2.0);
        assert_eq!(c.get(1, 1), 0.0);
        assert_eq!(c.upper(), vec![1.0, 2.0, 3.0]);
        assert!(ChaosCoefficients::from_upper(3, &[1.0]).is_err());
        assert!(ChaosCoefficients::from_upper(0, &[]).is_err());

        let rows = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(ChaosCoefficients::from_dense(&rows).unwrap().upper(), vec![1.0]);
        assert!(ChaosCoefficients::from_dense(&[vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
        assert!(ChaosCoefficients::from_dense(&[vec![0.0, 1.0], vec![1.1, 0.0]]).is_err());
        assert!(ChaosCoefficients::from_dense(&[vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn quadratic_form_counts_each_pair_once() {
        let c = ChaosCoefficients::all_ones(3);
        assert_eq!(c.quadratic_form(&[1.0, 1.0, 1.0]), 3.0);
        assert_eq!(c.quadratic_form(&[1.0, -1.0, 1.0]), -1.0);
    }

    #[test]
    fn spectrum_examples() {
        let s = eigen_symmetric(&ChaosCoefficients::all_ones(3)).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.eigenvalues[1], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.eigenvalues[2], -1.0, epsilon = 1e-12);

        let s = eigen_symmetric(&ChaosCoefficients::from_upper(2, &[1.0]).unwrap()).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn spectrum_trace_identities() {
        let upper: Vec<f64> = (0..15).map(|i| ((i as f64) * 1.3).cos()).collect();
        let c = ChaosCoefficients::from_upper(6, &upper).unwrap();
        let s = eigen_symmetric(&c).unwrap();
        assert_abs_diff_eq!(s.trace(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.frobenius_sq, 2.0 * c.upper_sq_sum(), epsilon = 1e-9);
    }

    #[test]
    fn gaussian_moment_examples() {
        let (m2, m4) = gaussian_chaos_moments(&Spectrum::from_eigenvalues(vec![1.0, 0.0, 0.0]));
        assert_abs_diff_eq!(m4 / (m2 * m2), 15.0, epsilon = 1e-12);

        // E(sum l (g^2 - 1))^4 = 16 m4.
        let h = 0.5f64.sqrt();
        let (_, m4) = gaussian_chaos_moments(&Spectrum::from_eigenvalues(vec![h, h]));
        assert_abs_diff_eq!(16.0 * m4, 36.0, epsilon = 1e-12);

        assert_eq!(gaussian_chaos_moments(&Spectrum::from_eigenvalues(vec![0.0; 4])), (0.0, 0.0));
    }

    #[test]
    fn ratio_examples() {
        let r = lemma_ratio(&ChaosCoefficients::all_ones(3), RatioModel::RademacherExact).unwrap();
        assert_abs_diff_eq!(r, 21f64.powf(0.25) / 3f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(r, 1.235_931, epsilon = 1e-6);
        let r = lemma_ratio(&ChaosCoefficients::from_upper(2, &[1.0]).unwrap(), RatioModel::RademacherExact)
            .unwrap();
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-14);
        let g = lemma_ratio(&ChaosCoefficients::all_ones(200), RatioModel::GaussianSpectral).unwrap();
        assert!((g.powi(4) - 15.0).abs() < 0.15, "{}", g.powi(4));
        assert!(lemma_ratio(&ChaosCoefficients::from_upper(2, &[0.0]).unwrap(), RatioModel::GaussianSpectral)
            .is_err());
    }

    #[test]
    fn interpolation_examples() {
        assert_abs_diff_eq!(interpolation_constant(4.0).unwrap(), 15f64.powf(0.25), epsilon = 1e-15);
        assert_abs_diff_eq!(interpolation_constant(1.0).unwrap(), 3.872_983_346, epsilon = 1e-9);
        assert_abs_diff_eq!(interpolation_constant(2.0 + 1e-6).unwrap(), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(interpolation_constant(2.0 - 1e-6).unwrap(), 1.0, epsilon = 1e-6);
        assert!(interpolation_constant(2.0).is_err());
        assert!(interpolation_constant(0.0).is_err());
        assert!(interpolation_constant(4.5).is_err());
    }

    #[test]
    fn mc_single_sample_and_determinism() {
        let c = ChaosCoefficients::all_ones(3);
        let r = mc_estimate(&c, Model::Rademacher, Event::GeZero, 1, 5).unwrap();
        assert!(r.estimate == 0.0 || r.estimate == 1.0);
        assert!(r.ci_low <= r.estimate && r.estimate <= r.ci_high);
        let a = mc_estimate(&c, Model::Gaussian, Event::GtZero, 10_000, 9).unwrap();
        let b = mc_estimate(&c, Model::Gaussian, Event::GtZero, 10_000, 9).unwrap();
        assert_eq!(a, b);
        assert!(mc_estimate(&c, Model::Gaussian, Event::GtZero, 0, 9).is_err());
    }

    #[test]
    fn vector_system_reduction() {
        let v = VectorSystem::new(vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![1.0, 1.0]]).unwrap();
        let g = v.gram_offdiag();
        assert_eq!(g.upper(), vec![0.0, 2.0, 4.0]);
        assert_eq!(v.norm_sq_sum(), 7.0);
        // ||sum r a||^2 - sum ||a||^2 = S(r) for every sign vector.
        for mask in 0..8u32 {
            let r: Vec<f64> = (0..3).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
            let sum: Vec<f64> = (0..2).map(|k| (0..3).map(|i| r[i] * v.vectors()[i][k]).sum()).collect();
            let lhs = dot(&sum, &sum) - v.norm_sq_sum();
            assert_abs_diff_eq!(lhs, g.quadratic_form(&r), epsilon = 1e-12);
        }
        assert!(VectorSystem::new(vec![]).is_err());
        assert!(VectorSystem::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(VectorSystem::new(vec![vec![0.0, 0.0]]).is_err());
    }

    #[test]
    fn hilbert_examples() {
        let v = VectorSystem::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 3.0]]).unwrap();
        let h = hilbert_norm_probs(&v, HilbertMode::Exact).unwrap();
        assert_eq!((h.p_upper, h.p_lower), (1.0, 1.0));

        let v = VectorSystem::new(vec![vec![1.0, 0.0]; 3]).unwrap();
        assert_eq!(v.gram_offdiag(), ChaosCoefficients::from_upper(3, &[2.0; 3]).unwrap());
        let h = hilbert_norm_probs(&v, HilbertMode::Exact).unwrap();
        assert_eq!(h.p_upper, 0.25);
        assert_eq!(h.p_lower, 0.75);

        let m = hilbert_norm_probs(&v, HilbertMode::Mc { samples: 100_000, seed: 3 }).unwrap();
        assert!((m.p_upper - 0.25).abs() < 0.01);
        assert!(m.mc.is_some());
    }

    #[test]
    fn exponential_sum_examples() {
        let s = exponential_sum_stats(&[1.0], 1000, 1).unwrap();
        assert_eq!(s.ratio, 9.0);
        let s = exponential_sum_stats(&[1.0, -1.0], 1000, 1).unwrap();
        assert_eq!((s.c2sq, s.c4fourth, s.ratio), (2.0, 24.0, 6.0));
        let s = exponential_sum_stats(&[1.0, 1.0], 1000, 1).unwrap();
        assert_eq!(s.ratio, 6.0);
        assert!(exponential_sum_stats(&[0.0, 0.0], 10, 1).is_err());
    }

    #[test]
    fn gaussian_hilbert_validation() {
        assert!(gaussian_hilbert_prob(&[], 10, 1).is_err());
        assert!(gaussian_hilbert_prob(&[0.0], 10, 1).is_err());
        assert!(gaussian_hilbert_prob(&[-1.0, 2.0], 10, 1).is_err());
    }
}
