//! Symmetric matrices, eigendecomposition, spectral norms and structured
//! matrix families.

pub mod eigen;
pub mod generators;
pub mod io;
pub mod matrix;
pub mod sparse;
pub mod spectral;

pub use eigen::{eigen, eigenvalues, EigenMethod, SymmetricEigen};
pub use generators::{
    gen_block_ones, gen_block_ones_plus_identity, gen_identity, gen_ones, gen_sparse_member, gen_sparse_precision,
    gen_uniform_random, gen_zero,
};
pub use matrix::{SymmetricMatrix, MAX_DIM};
pub use sparse::{is_in_sparse_class, ClassMembership, SparseClass};
pub use spectral::{
    inverse_sqrt, log_det, singular_values, singular_values_with, spectral_radius, SpectralSummary,
};

use crate::scalar::Real;

/// `|A|_F`.
pub fn frobenius_norm<T: Real>(a: &SymmetricMatrix<T>) -> T {
    a.frobenius_norm()
}
