//! Benchmark toolkit for time-varying rectangular treemaps.
//!
//! The crate bundles fourteen layout algorithms (eleven stateless, three that
//! carry the previous layout forward), the aspect-ratio and corner-travel
//! metrics, a baseline-aware stability measure built on an order-preserving
//! area realizer, a four-feature dataset classifier with a matching
//! synthetic generator, and the evaluation harness that scores and reports
//! algorithms across dataset classes.

pub mod baseline;
pub mod classify;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod layout;
pub mod metrics;
pub mod model;
pub mod stateful;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{Layout, Rect};
pub use layout::Algorithm;
pub use model::{normalize_step, parse_dataset, NormalizedStep, TimeVaryingTree};
