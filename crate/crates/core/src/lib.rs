//! Essential spectra of Schrödinger operators on bounded-degree graphs via
//! R-limits: graph truncations, ball signatures, limit-class enumeration,
//! closed-form spectra and numerical cross-checks.

pub mod analytic;
pub mod canon;
pub mod error;
pub mod generators;
pub mod graph;
pub mod numeric;
pub mod operator;
pub mod rlimit;

pub use error::{Error, Result};
pub use graph::{BallView, GrowthProfile, Layers, RootedGraph, Vertex};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
