use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::spectral::matrix::{check_len, TransitionMatrix};

/// Largest dimension handed to the dense eigensolver.
pub const DENSE_EIGEN_CAP: usize = 1 << 12;

/// Tolerated detailed-balance residual before the kernel is rejected.
pub const BALANCE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    /// Absolute spectral gap `1 − max |λ|` over non-dominant eigenvalues.
    pub gamma: f64,
    /// Largest non-dominant eigenvalue.
    pub lambda_2: f64,
    /// Smallest eigenvalue.
    pub lambda_min: f64,
    pub pi_min: f64,
    /// Full spectrum, descending.
    pub eigenvalues: Vec<f64>,
}

/// Spectrum of a reversible kernel through the symmetric matrix
/// `Π^{1/2} P Π^{-1/2}`.
pub fn absolute_spectral_gap(p: &TransitionMatrix, pi: &[f64]) -> Result<SpectralReport> {
    let n = p.dim();
    check_len(n, pi.len(), "kernel and stationary distribution")?;
    if n > DENSE_EIGEN_CAP {
        return Err(Error::limit(format!(
            "dense eigensolve supports at most {DENSE_EIGEN_CAP} states, kernel has {n}"
        )));
    }
    if pi.iter().any(|&q| !q.is_finite() || q <= 0.0) {
        return Err(Error::invalid("stationary distribution must be positive"));
    }
    let balance = p.detailed_balance_error(pi);
    if balance > BALANCE_TOLERANCE {
        return Err(Error::invalid(format!(
            "kernel violates detailed balance by {balance:e}"
        )));
    }
    let root: Vec<f64> = pi.iter().map(|q| q.sqrt()).collect();
    let mut s = DMatrix::<f64>::zeros(n, n);
    for x in 0..n {
        for (y, v) in p.row(x) {
            s[(x, y)] = root[x] * v / root[y];
        }
    }
    let s = (&s + s.transpose()) * 0.5;
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let pi_min = pi.iter().copied().fold(f64::INFINITY, f64::min);
    if n == 1 {
        return Ok(SpectralReport {
            gamma: 1.0,
            lambda_2: 0.0,
            lambda_min: eigenvalues[0],
            pi_min,
            eigenvalues,
        });
    }
    let dominant = eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - 1.0).abs().total_cmp(&(b.1 - 1.0).abs()))
        .map(|e| e.0)
        .expect("nonempty spectrum");
    let rest = eigenvalues
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != dominant)
        .map(|e| *e.1);
    let lambda_2 = rest.clone().fold(f64::NEG_INFINITY, f64::max);
    let lambda_min = eigenvalues[n - 1];
    let worst = rest.map(f64::abs).fold(0.0, f64::max);
    Ok(SpectralReport {
        gamma: (1.0 - worst).clamp(0.0, 1.0),
        lambda_2,
        lambda_min,
        pi_min,
        eigenvalues,
    })
}
