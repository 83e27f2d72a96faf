//! Reproducible Monte Carlo driver.
//!
//! Samples are split into fixed-size chunks; chunk `i` draws from its own
//! xoshiro256++ stream, seeded by SplitMix64 expansion of
//! `seed + i * 0x9E3779B97F4A7C15`. Chunk results are merged in chunk order,
//! so output depends only on `(seed, samples)` and never on the number of
//! worker threads.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub type Rng = Xoshiro256PlusPlus;

pub const CHUNK: u64 = 1 << 16;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;
/// Two-sided 99.9% normal quantile.
pub const Z999: f64 = 3.290_526_731_491_926;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Plug-in standard error of `estimate`.
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl MonteCarloResult {
    /// Result for a proportion `successes / samples` with a 95% Wilson
    /// interval.
    pub fn proportion(successes: u64, samples: u64, seed: u64) -> Self {
        let n = samples as f64;
        let p = successes as f64 / n;
        let (ci_low, ci_high) = wilson_interval(successes, samples, Z95);
        Self { estimate: p, ci_low, ci_high, std_error: (p * (1.0 - p) / n).sqrt(), samples, seed }
    }

    /// Result for a sample mean with a 95% normal interval.
    pub fn mean(sum: f64, sum_sq: f64, samples: u64, seed: u64) -> Self {
        let n = samples as f64;
        let mean = sum / n;
        let var = if samples > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        let se = (var / n).sqrt();
        Self { estimate: mean, ci_low: mean - Z95 * se, ci_high: mean + Z95 * se, std_error: se, samples, seed }
    }

    /// Number of standard errors separating `value` from the estimate.
    pub fn z_score(&self, value: f64) -> f64 {
        (self.estimate - value).abs() / self.std_error
    }
}

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    assert!(n > 0, "Wilson interval needs at least one sample");
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

pub fn stream(seed: u64, index: u64) -> Rng {
    Rng::seed_from_u64(seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Accumulated statistics of one chunk.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    pub hits: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.hits += other.hits;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }
}

/// Runs `draw` `samples` times over per-chunk streams and merges in order.
///
/// `draw` returns `(hit, value)`; hits are counted and values summed with
/// their squares.
pub fn run<F>(samples: u64, seed: u64, draw: F) -> Tally
where
    F: Fn(&mut Rng) -> (bool, f64) + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let tallies: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            let count = CHUNK.min(samples - i * CHUNK);
            let mut t = Tally::default();
            for _ in 0..count {
                let (hit, v) = draw(&mut rng);
                t.hits += hit as u64;
                t.sum += v;
                t.sum_sq += v * v;
            }
            t
        })
        .collect();
    tallies.into_iter().fold(Tally::default(), Tally::merge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn wilson_contains_estimate() {
        for (k, n) in [(0, 1), (1, 1), (0, 10), (3, 10), (10, 10), (500, 1000)] {
            let (lo, hi) = wilson_interval(k, n, Z95);
            let p = k as f64 / n as f64;
            assert!(lo <= p && p <= hi && lo >= 0.0 && hi <= 1.0, "{k}/{n}: [{lo}, {hi}]");
        }
    }

    #[test]
    fn wilson_known_value() {
        // 50/100 at z = 1.96: center 0.5, half-width 0.0961...
        let (lo, hi) = wilson_interval(50, 100, Z95);
        assert!((lo - 0.403_831).abs() < 1e-5, "{lo}");
        assert!((hi - 0.596_169).abs() < 1e-5, "{hi}");
    }

    #[test]
    fn single_sample_interval() {
        let r = MonteCarloResult::proportion(1, 1, 7);
        assert_eq!(r.estimate, 1.0);
        assert!(r.ci_low <= 1.0 && r.ci_high == 1.0);
        let r = MonteCarloResult::proportion(0, 1, 7);
        assert!(r.ci_low == 0.0 && r.ci_high >= 0.0);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let draw = |rng: &mut Rng| {
            let u: f64 = rng.random();
            (u < 0.3, u)
        };
        let a = run(200_000, 11, draw);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run(200_000, 11, draw));
        assert_eq!(a, b);
        let c = run(200_000, 12, draw);
        assert_ne!(a, c);
        assert!((a.hits as f64 / 200_000.0 - 0.3).abs() < 0.01);
    }
}
