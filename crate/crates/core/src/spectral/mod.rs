//! Exact transition matrices, spectral gaps, mixing times and the
//! closed-form mixing bounds.
//!
//! Worlds are indexed row-major by variable id, the same order used by
//! [`crate::fg::WorldIndexer`].

mod bounds;
mod gap;
mod lemmas;
mod matrix;
mod mixing;

pub use bounds::{gap_lower_bound, relaxation_bound, theorem2_bound, BoundInputs};
pub use gap::{absolute_spectral_gap, SpectralReport, BALANCE_TOLERANCE, DENSE_EIGEN_CAP};
pub use lemmas::{
    check_components, check_factor_removal, check_gap_lemma, check_sandwich, spectral_report, ComponentCheck,
    FactorRemovalCheck, GapCheck, SandwichCheck, LEMMA_TOLERANCE,
};
pub use matrix::{transition_matrix, transition_matrix_with_cap, TransitionMatrix, SPECTRAL_CAP};
pub use mixing::{
    exact_mixing_time, exact_mixing_time_from, exact_mixing_time_with, mixing_time_of, total_variation, tv_curve,
    worst_case_tv_curve, MixingTime, ALL_STARTS_CAP, DEFAULT_MAX_STEPS, MIXING_THRESHOLD,
};
