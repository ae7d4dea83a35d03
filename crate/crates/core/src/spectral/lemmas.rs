use crate::error::{Error, Result};
use crate::fg::{exact_joint, FactorGraph};
use crate::spectral::bounds::BoundInputs;
use crate::spectral::gap::{absolute_spectral_gap, SpectralReport};
use crate::spectral::matrix::transition_matrix;

/// Slack allowed for eigensolver and rounding error in the checks below.
pub const LEMMA_TOLERANCE: f64 = 1e-8;

pub fn spectral_report(graph: &FactorGraph) -> Result<SpectralReport> {
    let p = transition_matrix(graph)?;
    let pi = exact_joint(graph)?.probabilities;
    absolute_spectral_gap(&p, &pi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapCheck {
    pub gamma: f64,
    /// `(1/n) exp(−3 hw M)`.
    pub bound: f64,
}

impl GapCheck {
    pub fn holds(&self) -> bool {
        self.gamma >= self.bound - LEMMA_TOLERANCE
    }
}

pub fn check_gap_lemma(graph: &FactorGraph) -> Result<GapCheck> {
    let inputs = BoundInputs::of(graph)?;
    Ok(GapCheck {
        gamma: spectral_report(graph)?.gamma,
        bound: inputs.gap_lower_bound(),
    })
}

/// Gap with and without one factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorRemovalCheck {
    pub gamma: f64,
    pub gamma_without: f64,
    /// Value range of the removed factor.
    pub weight_range: f64,
    /// `γ(without) · exp(−3 M)`.
    pub bound: f64,
}

impl FactorRemovalCheck {
    pub fn holds(&self) -> bool {
        self.gamma >= self.bound - LEMMA_TOLERANCE
    }
}

pub fn check_factor_removal(graph: &FactorGraph, factor: usize) -> Result<FactorRemovalCheck> {
    if factor >= graph.num_factors() {
        return Err(Error::invalid(format!("factor {factor} out of range")));
    }
    let m = graph.factor(factor).weight_range();
    let gamma = spectral_report(graph)?.gamma;
    let gamma_without = spectral_report(&graph.without_factor(factor))?.gamma;
    Ok(FactorRemovalCheck {
        gamma,
        gamma_without,
        weight_range: m,
        bound: gamma_without * (-3.0 * m).exp(),
    })
}

/// Gap and spectrum of a graph against those of its connected components.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentCheck {
    pub components: usize,
    pub gamma: f64,
    /// `min_i (n_i/n) γ_i`.
    pub bound: f64,
    /// Largest gap between the sorted spectrum and the sorted multiset of
    /// weighted sums `Σ (n_i/n) λ_i` over one eigenvalue per component.
    pub spectrum_mismatch: f64,
}

impl ComponentCheck {
    pub fn holds(&self) -> bool {
        self.gamma >= self.bound - LEMMA_TOLERANCE && self.spectrum_mismatch <= LEMMA_TOLERANCE
    }
}

pub fn check_components(graph: &FactorGraph) -> Result<ComponentCheck> {
    let full = spectral_report(graph)?;
    let n = graph.num_variables().max(1) as f64;
    let comps = graph.connected_components();
    let mut bound = f64::INFINITY;
    let mut combos = vec![0.0];
    for vars in &comps {
        let sub = spectral_report(&graph.induced(vars))?;
        let share = vars.len() as f64 / n;
        bound = bound.min(share * sub.gamma);
        combos = combos
            .iter()
            .flat_map(|&c| sub.eigenvalues.iter().map(move |&l| c + share * l))
            .collect();
    }
    if comps.is_empty() {
        bound = full.gamma;
    }
    combos.sort_by(|a, b| b.total_cmp(a));
    let spectrum_mismatch = if combos.len() == full.eigenvalues.len() {
        combos
            .iter()
            .zip(&full.eigenvalues)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(ComponentCheck {
        components: comps.len(),
        gamma: full.gamma,
        bound,
        spectrum_mismatch,
    })
}

/// Largest log-ratios between the stationary laws and between the
/// off-diagonal kernel entries of a graph with and without one factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichCheck {
    pub weight_range: f64,
    pub max_log_ratio_pi: f64,
    pub max_log_ratio_kernel: f64,
}

impl SandwichCheck {
    pub fn holds(&self) -> bool {
        self.max_log_ratio_pi <= self.weight_range + LEMMA_TOLERANCE
            && self.max_log_ratio_kernel <= self.weight_range + LEMMA_TOLERANCE
    }
}

pub fn check_sandwich(graph: &FactorGraph, factor: usize) -> Result<SandwichCheck> {
    if factor >= graph.num_factors() {
        return Err(Error::invalid(format!("factor {factor} out of range")));
    }
    let reduced = graph.without_factor(factor);
    let pi = exact_joint(graph)?.probabilities;
    let pi_bar = exact_joint(&reduced)?.probabilities;
    let max_log_ratio_pi = pi
        .iter()
        .zip(&pi_bar)
        .map(|(a, b)| (a / b).ln().abs())
        .fold(0.0, f64::max);
    let p = transition_matrix(graph)?;
    let p_bar = transition_matrix(&reduced)?;
    let mut max_log_ratio_kernel: f64 = 0.0;
    for x in 0..p.dim() {
        for (y, v) in p.row(x) {
            if y != x {
                max_log_ratio_kernel = max_log_ratio_kernel.max((v / p_bar.get(x, y)).ln().abs());
            }
        }
    }
    Ok(SandwichCheck {
        weight_range: graph.factor(factor).weight_range(),
        max_log_ratio_pi,
        max_log_ratio_kernel,
    })
}
