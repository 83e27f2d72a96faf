//! Exact enumeration of `S = sum_{i<j} r_i r_j a_ij` over all sign vectors.
//!
//! `S` is invariant under `r -> -r`, so `r_1 = +1` is fixed and the remaining
//! `n - 1` signs are enumerated. The sign space is cut into fixed blocks by
//! the high bits; inside a block the low bits follow a Gray code, so each
//! step flips one sign and updates `S` and the local fields `h = A r` in
//! `O(n)`. Blocks run in parallel and are merged in block order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ChaosCoefficients;
use crate::{Error, Result};

/// Largest dimension accepted for exact enumeration.
pub const MAX_ENUM_DIM: usize = 24;

/// Upper bound on the number of high bits fixed per block.
const BLOCK_BITS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnumerationResult {
    pub n: usize,
    /// Number of sign vectors visited (`2^(n-1)`).
    pub total: u64,
    pub count_ge: u64,
    pub count_gt: u64,
    pub count_le: u64,
    pub count_lt: u64,
    pub prob_ge: f64,
    pub prob_gt: f64,
    pub prob_le: f64,
    pub prob_lt: f64,
    /// `E|S|`.
    pub m1_abs: f64,
    /// `E S^2`.
    pub m2: f64,
    /// `E S^4`.
    pub m4: f64,
    /// Values with `|S| <= zero_tol` were counted as exactly zero.
    pub zero_tol: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct BlockStats {
    pos: u64,
    neg: u64,
    zero: u64,
    abs: f64,
    sq: f64,
    quad: f64,
}

impl BlockStats {
    fn record(&mut self, s: f64, zero_tol: f64) {
        if s.abs() <= zero_tol {
            self.zero += 1;
        } else if s > 0.0 {
            self.pos += 1;
        } else {
            self.neg += 1;
        }
        let s2 = s * s;
        self.abs += s.abs();
        self.sq += s2;
        self.quad += s2 * s2;
    }
}

/// Default zero band: `1e-9` times `sum_{i<j} |a_ij|`.
pub fn default_zero_tol(c: &ChaosCoefficients) -> f64 {
    1e-9 * c.upper_abs_sum()
}

pub fn rademacher_enumerate(c: &ChaosCoefficients) -> Result<EnumerationResult> {
    rademacher_enumerate_with_tol(c, default_zero_tol(c))
}

/// As [`rademacher_enumerate`] with an explicit zero band for the sign
/// events.
pub fn rademacher_enumerate_with_tol(c: &ChaosCoefficients, zero_tol: f64) -> Result<EnumerationResult> {
    let n = c.n();
    if n > MAX_ENUM_DIM {
        return Err(Error::Dimension { n, max: MAX_ENUM_DIM });
    }
    let free = n - 1;
    let high = free.min(BLOCK_BITS);
    let low = free - high;

    let blocks: Vec<BlockStats> =
        (0..1u64 << high).into_par_iter().map(|b| enumerate_block(c, b, low, zero_tol)).collect();

    let mut total = BlockStats::default();
    for b in blocks {
        total.pos += b.pos;
        total.neg += b.neg;
        total.zero += b.zero;
        total.abs += b.abs;
        total.sq += b.sq;
        total.quad += b.quad;
    }
    let count = 1u64 << free;
    let cf = count as f64;
    let (ge, gt, le, lt) = (total.pos + total.zero, total.pos, total.neg + total.zero, total.neg);
    Ok(EnumerationResult {
        n,
        total: count,
        count_ge: ge,
        count_gt: gt,
        count_le: le,
        count_lt: lt,
        prob_ge: ge as f64 / cf,
        prob_gt: gt as f64 / cf,
        prob_le: le as f64 / cf,
        prob_lt: lt as f64 / cf,
        m1_abs: total.abs / cf,
        m2: total.sq / cf,
        m4: total.quad / cf,
        zero_tol,
    })
}

/// Signs `r_2 .. r_{low+1}` follow the Gray code; `r_{low+2} ..` come from
/// the bits of `block`.
fn enumerate_block(c: &ChaosCoefficients, block: u64, low: usize, zero_tol: f64) -> BlockStats {
    let n = c.n();
    let a = c.dense();
    let mut r = vec![1.0f64; n];
    for bit in 0..n - 1 - low {
        if block >> bit & 1 == 1 {
            r[1 + low + bit] = -1.0;
        }
    }
    let mut h: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i * n + j] * r[j]).sum()).collect();
    let mut s = 0.5 * r.iter().zip(&h).map(|(ri, hi)| ri * hi).sum::<f64>();

    let mut stats = BlockStats::default();
    stats.record(s, zero_tol);
    for step in 1..1u64 << low {
        let k = 1 + step.trailing_zeros() as usize;
        let old = r[k];
        s -= 2.0 * old * h[k];
        r[k] = -old;
        let delta = -2.0 * old;
        let row = &a[k * n..(k + 1) * n];
        for (hj, akj) in h.iter_mut().zip(row) {
            *hj += delta * akj;
        }
        stats.record(s, zero_tol);
    }
    stats
}
