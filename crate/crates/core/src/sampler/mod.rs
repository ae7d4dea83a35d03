//! Seeded random-scan Gibbs sampling, marginal estimation and the
//! correlated-flip coupler.
//!
//! Every chain draws from its own `(seed, stream)` generator, so results are
//! reproducible and chains can run in parallel.

mod chain;
mod coupling;
mod state;

pub use chain::{
    marginal_variance_experiment, marginal_variance_with_streams, run_chain, run_chain_checkpoints, run_chain_on_stream, ChainTrace,
    Init, SamplerConfig, VariancePoint,
};
pub use coupling::{
    coupled_step, maximal_coupling, run_coupling, tv_bound_from_coupling, wilson_upper, CoupledChains,
    CouplingBoundPoint, CouplingRecord, Partner, BAND_Z,
};
pub use state::{gibbs_step, GibbsSampler};
