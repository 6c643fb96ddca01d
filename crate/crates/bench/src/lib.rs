//! Fixtures shared by the benchmarks.

use thinstrip::discretize::assemble_weighted;
use thinstrip::{build_grid, make_profile, BoundaryConditionSet, CurvatureProfile, GeneralizedPencil, Interval, TensorGrid};

/// Width used by every fixture.
pub const EPS: f64 = 0.1;

/// The Gaussian dip on (-6, 6) that most sweeps run on.
pub fn dip() -> CurvatureProfile {
    make_profile("gaussian_dip", &[1.0, 0.0, 1.0], Interval::truncated(-6.0, 6.0).unwrap()).unwrap()
}

pub fn grid(ns: usize, nt: usize) -> TensorGrid {
    build_grid(dip().interval(), ns, nt).unwrap()
}

/// Weighted DN pencil of the dip on an `ns x nt` grid.
pub fn dip_pencil(ns: usize, nt: usize) -> GeneralizedPencil {
    assemble_weighted(&dip(), EPS, &BoundaryConditionSet::DN, &grid(ns, nt)).unwrap()
}

/// Shift a little below the strip threshold, where the sweeps factor.
pub fn shift() -> f64 {
    (std::f64::consts::PI / (2.0 * EPS)).powi(2) - 1.0
}
