//! Exact identification analysis for random utility models.
//!
//! A *model* is a set of strict preferences over a small universe of
//! alternatives. A probability distribution over the model induces a random
//! choice rule, and the model is *identified* when distinct distributions
//! always induce distinct rules. This crate decides identification exactly,
//! builds maximal identified models, peels edge decomposable models to recover
//! the generating distribution, and generates the single-crossing and
//! Latin-square families.
//!
//! Everything is computed in exact rational arithmetic; no floating point
//! value ever enters a decision.
//!
//! Module map:
//!
//! - [`preference`]: universes, menus, preferences, models and contour pairs.
//! - [`lattice`]: the canonical coordinate order over contour pairs.
//! - [`stochastic`]: choice rules, distributions and the Möbius inverse.
//! - [`flowgraph`]: the probability flow diagram, spanning tree and preference basis.
//! - [`identify`]: rank-based identification with nullspace certificates.
//! - [`decompose`]: edge decomposability, peeling recovery and greedy extension.
//! - [`families`]: single-crossing and Latin-square models.
//! - [`fixtures`]: worked example models.
//! - [`documents`]: JSON document formats.

pub mod decompose;
pub mod documents;
mod error;
pub mod families;
pub mod fixtures;
pub mod flowgraph;
pub mod identify;
pub mod lattice;
pub mod limits;
mod linalg;
pub mod preference;
pub mod rational;
pub mod sampling;
pub mod stochastic;

pub use error::{Error, Result};
pub use lattice::{Menu, PairIndex, PairTable};
pub use preference::{ContourPair, Model, Preference, Universe};
pub use rational::Rational;
