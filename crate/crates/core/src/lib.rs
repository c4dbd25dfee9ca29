//! Desk-scale model selection for binary fundus-image classifiers.
//!
//! The crate covers the arithmetic around training rather than training
//! itself: evaluation metrics from prediction logs ([`metrics`]), weighted
//! rank aggregation of candidate models ([`ranking`]), dataset balancing and
//! split planning ([`dataset_plan`]), pixel-level augmentation ([`augment`]),
//! the two-stage selection protocol with generalization verification
//! ([`protocol`]), and the file formats tying them together ([`io`]).
//! Published experiment tables ship as offline fixtures ([`fixtures`]).
//!
//! All operations are pure functions over immutable values; results are
//! deterministic given their inputs and any explicit seeds.

pub mod augment;
pub mod dataset_plan;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod metrics;
pub mod protocol;
pub mod ranking;
mod rng;

pub use error::{Error, Result};
