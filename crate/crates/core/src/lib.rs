//! Spectral computations for the Laplacian on thin curved strips.
//!
//! A strip of width `eps` is built over a reference curve given by its
//! curvature `kappa(s)`. In curvilinear coordinates `(s, t)` on
//! `I x (0, 1)` the Laplacian becomes a variable-coefficient operator that
//! is discretized with bilinear elements and solved by shift-invert
//! Lanczos. The [`analysis`] module runs `eps`-sweeps against the
//! one-dimensional comparison operators.

pub mod analysis;
pub mod banded;
pub mod coefficients;
pub mod discretize;
pub mod eigensolve;
pub mod error;
pub mod geometry;
pub mod quadrature;

pub use banded::SymBand;
pub use coefficients::{effective_potential, Alpha, CoefficientPoint, EffectivePotential, EffectiveVariant};
pub use discretize::{
    build_grid, BoundaryConditionSet, FlatBasis, GeneralizedPencil, OuterCondition, TensorGrid,
};
pub use eigensolve::{smallest_eigenpairs, Spectrum};
pub use error::{Error, Result};
pub use geometry::{make_profile, CurvatureProfile, Interval, Preset, ProfileSpec, ValidityReport};
