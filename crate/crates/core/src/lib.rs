//! Refined assortment optimization.
//!
//! A firm that can only include or exclude products solves the traditional
//! assortment problem. A firm that can also make products *harder to get*,
//! shifting product `i`'s mean utility by `ln(x_i)` for an availability
//! level `x_i ∈ [0, 1]`, solves the refined problem. This crate implements
//! both sides for latent-class MNL mixtures and the random consideration-set
//! model, together with:
//!
//! - exact solvers (subset enumeration, finite-menu enumeration) and the
//!   revenue-ordered refinement heuristics RO1/RO2/RO3;
//! - provable upper bounds: the revenue-ordered factor `ω_n`, the
//!   sell-through factor `η`, the personalized per-segment bound, and a
//!   McCormick linear relaxation backed by a dense two-phase simplex;
//! - instance generators, including the tight constructions showing how far
//!   refinement can beat binary assortments;
//! - a numerically careful log-space evaluation path for mixtures whose
//!   attraction ratios span hundreds of orders of magnitude.
//!
//! Everything is deterministic under fixed seeds and safe to evaluate from
//! many threads.

pub mod bounds;
pub mod choice;
pub mod error;
pub mod instance;
pub mod instance_gen;
pub mod lcmnl;
pub mod raop;
pub mod rcs;
pub mod simplex;
pub mod taop;

pub use choice::{
    refine_utilities, ChoiceModel, ChoiceProbabilities, DomainSpec, RefinedUtility,
    RefinementDomain, RefinementVector, RevenueVector, SolveResult,
};
pub use error::{Error, Result};
pub use instance::{expected_revenue, ChoiceModelSpec, Instance, Metadata};
