//! Generalized symmetric eigenproblems `A x = lambda M x` in banded storage.

pub mod gap;
pub mod lanczos;
pub mod ldlt;

pub use gap::{operator_gap_norm, DEFAULT_GAP_TOL};
pub use lanczos::{residual, smallest_eigenpairs, smallest_eigenpairs_with, LanczosOptions, Spectrum, DEFAULT_TOL};
pub use ldlt::{factor, is_positive_definite, ldlt_banded, BandedFactorization};
