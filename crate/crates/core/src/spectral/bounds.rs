use crate::error::{Error, Result};
use crate::fg::{max_factor_weight, FactorGraph};
use crate::width::hierarchy_width;

/// `(log 4 + n log s + e M) · n · exp(3 h M)`.
pub fn theorem2_bound(n: usize, s: usize, e: usize, m: f64, h: usize) -> f64 {
    let n = n as f64;
    (4f64.ln() + n * (s.max(1) as f64).ln() + e as f64 * m) * n * (3.0 * h as f64 * m).exp()
}

/// `−log(ε π_min) / γ`.
pub fn relaxation_bound(gamma: f64, pi_min: f64, epsilon: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid(format!("gap must lie in (0, 1], got {gamma}")));
    }
    if !(pi_min > 0.0 && pi_min <= 1.0) {
        return Err(Error::invalid(format!("minimum probability must lie in (0, 1], got {pi_min}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ok(-(epsilon * pi_min).ln() / gamma)
}

/// `(1/n) exp(−3 h M)`.
pub fn gap_lower_bound(n: usize, h: usize, m: f64) -> f64 {
    (-3.0 * h as f64 * m).exp() / n.max(1) as f64
}

/// The structural quantities the closed-form bounds depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub n: usize,
    pub s: usize,
    pub e: usize,
    pub m: f64,
    pub hw: usize,
}

impl BoundInputs {
    pub fn of(graph: &FactorGraph) -> Result<Self> {
        Ok(BoundInputs {
            n: graph.num_variables(),
            s: graph.max_domain_size(),
            e: graph.num_factors(),
            m: max_factor_weight(graph),
            hw: hierarchy_width(graph)?,
        })
    }

    pub fn theorem2(&self) -> f64 {
        theorem2_bound(self.n, self.s, self.e, self.m, self.hw)
    }

    pub fn gap_lower_bound(&self) -> f64 {
        gap_lower_bound(self.n, self.hw, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem2_arithmetic() {
        assert!((theorem2_bound(1, 2, 0, 0.0, 0) - 8f64.ln()).abs() < 1e-12);
        let v = theorem2_bound(2, 2, 1, 1.0, 1);
        let expect = (4f64.ln() + 2.0 * 2f64.ln() + 1.0) * 2.0 * 3f64.exp();
        assert!((v - expect).abs() < 1e-12);
        assert!((v - 151.55).abs() < 0.01);
    }

    #[test]
    fn relaxation_arithmetic() {
        assert!((relaxation_bound(1.0, 0.5, 0.25).unwrap() - 0.125f64.ln().abs()).abs() < 1e-12);
        let v = relaxation_bound(0.5, 0.25, 0.25).unwrap();
        assert!((v - 5.545).abs() < 1e-3);
    }

    #[test]
    fn relaxation_domain() {
        assert!(relaxation_bound(0.0, 0.5, 0.25).is_err());
        assert!(relaxation_bound(1.5, 0.5, 0.25).is_err());
        assert!(relaxation_bound(0.5, 0.0, 0.25).is_err());
        assert!(relaxation_bound(0.5, 0.5, 1.0).is_err());
        assert!(relaxation_bound(0.5, 0.5, f64::NAN).is_err());
    }
}
