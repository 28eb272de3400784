//! Numerical side: truncated eigensolves, comparison against predicted sets
//! and generalized-eigenfunction diagnostics.

pub mod demo;
pub mod eigen;
pub mod growth;
pub mod report;
pub mod witness;

pub use demo::{strict_inclusion_demo, DemoConfig, StrictInclusionReport};
pub use eigen::{
    dense_eigen, eig_matrix, eig_truncated, lanczos_extremal, residual_norm, EigenConfig,
    EigenMode, Eigenpairs,
};
pub use growth::{
    growth_envelope, omega_weight, shnol_check, GrowthEnvelope, ShnolConfig, ShnolReport,
    DEFAULT_RATE_TOL,
};
pub use report::{boundary_filter, hausdorff_report, SpectralReport, DEFAULT_BOUNDARY_TAU};
pub use witness::{sigma_infty_witness, WitnessConfig, WitnessResult, WitnessVerdict};
