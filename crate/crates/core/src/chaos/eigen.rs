//! Cyclic Jacobi eigenvalues for dense symmetric matrices.

use crate::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
pub const REL_TOL: f64 = 1e-12;

/// Eigenvalues of the symmetric `n x n` row-major matrix `a`, unsorted.
///
/// Sweeps every off-diagonal pair with a Jacobi rotation until the
/// off-diagonal Frobenius norm drops below `1e-12` times the initial
/// Frobenius norm.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let scale = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    if scale == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = REL_TOL * scale;

    for _ in 0..MAX_SWEEPS {
        if off_norm(&m, n) <= target {
            return Ok((0..n).map(|i| m[i * n + i]).collect());
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, n, p, q);
            }
        }
    }
    if off_norm(&m, n) <= target {
        return Ok((0..n).map(|i| m[i * n + i]).collect());
    }
    Err(Error::Convergence(format!("Jacobi eigen-solver did not converge in {MAX_SWEEPS} sweeps")))
}

fn off_norm(m: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[i * n + j] * m[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Annihilates `m[p][q]` with a rotation in the `(p, q)` plane.
fn rotate(m: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = m[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = m[p * n + p];
    let aqq = m[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    // signum(0.0) = 1, so theta = 0 gives the 45 degree rotation.
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let mkp = m[k * n + p];
        let mkq = m[k * n + q];
        m[k * n + p] = c * mkp - s * mkq;
        m[k * n + q] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let mpk = m[p * n + k];
        let mqk = m[q * n + k];
        m[p * n + k] = c * mpk - s * mqk;
        m[q * n + k] = s * mpk + c * mqk;
    }
    m[p * n + q] = 0.0;
    m[q * n + p] = 0.0;
}
