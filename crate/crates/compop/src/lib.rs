//! Exact engine for composition operators on the space of bounded functions
//! over an unbounded, locally finite rooted metric space.
//!
//! A symbolic self-map of such a space induces a composition operator on the
//! bounded functions. For the class of self-maps represented here (a decidable
//! tail rule plus a finite override table) every question the engine answers
//! is decided exactly: which of the four range/deviation relations holds for a
//! pair of maps, the operator norm and essential norm of a single operator or
//! of a difference, compactness, and the structure of the operator space under
//! the uniform and essential pseudo-metrics. A separate oracle module
//! cross-validates the closed-form answers by exhaustive finite search.
//!
//! The main types are [`space::Space`] and [`space::Point`],
//! [`selfmap::SelfMap`], [`funcspace::BoundedFunction`], the decision
//! procedures in [`analysis`], the metric structure in [`topology`], and the
//! brute-force checks in [`oracle`]. The [`scenario`] and [`report`] modules
//! back the batch command-line interface.

pub mod analysis;
pub mod error;
pub mod funcspace;
pub mod oracle;
pub mod report;
pub mod scenario;
pub mod selfmap;
pub mod space;
pub mod topology;

pub use error::{Error, Result};
pub use space::{Point, Space};
