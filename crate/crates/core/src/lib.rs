//! Gibbs sampling on discrete factor graphs, together with the structural
//! quantity (hierarchy width) that controls how fast it mixes.
//!
//! * [`fg`]: factor graphs, energies, conditionals, brute-force and
//!   join-tree exact inference, and the `fg 1` text format.
//! * [`width`]: hierarchy width, the bounded-`k` decision procedure,
//!   hierarchy decompositions, line-graph tree-depth and acyclicity.
//! * [`sampler`]: seeded random-scan Gibbs chains, marginal-variance runs and
//!   the correlated-flip coupler.
//! * [`spectral`]: exact transition kernels, absolute spectral gaps, exact
//!   mixing times and the closed-form mixing bounds.
//! * [`templates`]: a small template language with head/body symbols and
//!   grounding under linear, logical or ratio semantics.
//! * [`models`], [`experiment`] and [`cli`]: graph builders, the experiment
//!   drivers and the output rendering behind the `hwgibbs` binary.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod fg;
pub mod models;
pub mod rng;
pub mod sampler;
pub mod spectral;
pub mod templates;
pub mod width;

pub use error::{Error, Result};
pub use fg::{Factor, FactorGraph, Semantics, TableFactor, Variable, World};
