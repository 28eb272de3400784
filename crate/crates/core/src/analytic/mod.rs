//! Closed-form spectra and the m-function machinery behind them.

mod families;
mod jacobi;
mod mfunc;
mod spectral_set;

pub use families::{
    comb_fiber_eigenvalue, comb_fiber_extra_eigenvalues, comb_spectrum,
    predict_essential_spectrum, star_spectrum, tree_spectrum, zn_spectrum, FamilyTag, Prediction,
};
pub use jacobi::{jacobi_star_decomposition, JacobiMatrix, StarDecomposition};
pub use mfunc::{m_halfline, m_line, sqrt_z2_minus_4, MHandle};
pub use spectral_set::SpectralSet;
