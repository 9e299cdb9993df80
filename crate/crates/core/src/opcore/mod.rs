//! Operator representations, numerical rank and kernel analysis, spectra.

mod cardinal;
mod matrix;
mod rank;
mod spectrum;
mod structured;

pub use cardinal::CardinalDim;
pub use matrix::{
    block_diagonal, frobenius_norm, is_finite, permutation_matrix, spectral_norm,
    unitarity_defect, CMatrix, MatrixOperator, C64,
};
pub use rank::{kernel_defect, rank_analysis, truncation_defect, RankReport, Tolerance};
pub use spectrum::{sort_spectrum, spectrum};
pub use structured::{
    block_shift_matrix, volterra_matrix, ShiftParams, StructuredOperator, DEFAULT_DENSE_CAP,
};


pub(crate) use rank::singular_values;
pub(crate) use spectrum::{schur, unsigned_phase};
pub(crate) use structured::isometry_defect_on;
