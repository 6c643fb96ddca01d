//! Single-problem spectral computations.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::ladder::{romberg, GridLadder};
use crate::coefficients::{effective_potential, Alpha, EffectiveVariant};
use crate::discretize::{
    assemble_1d, assemble_transverse, assemble_weighted, BoundaryConditionSet, OuterCondition, TensorGrid,
};
use crate::eigensolve::{smallest_eigenpairs, Spectrum};
use crate::error::{Error, Result};
use crate::geometry::{ensure_admissible, CurvatureProfile, Interval};

const ONE_D_TOL_FLOOR: f64 = 1e-9;

/// One spectral experiment: a profile, a width and boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct StripProblem {
    pub profile: CurvatureProfile,
    pub eps: f64,
    pub bc: BoundaryConditionSet,
}

impl StripProblem {
    pub fn new(profile: CurvatureProfile, eps: f64, bc: BoundaryConditionSet) -> Result<Self> {
        ensure_admissible(&profile, eps)?;
        Ok(Self { profile, eps, bc })
    }

    pub fn dn(profile: CurvatureProfile, eps: f64) -> Result<Self> {
        Self::new(profile, eps, BoundaryConditionSet::DN)
    }

    /// Bottom of the transverse spectrum: `(pi / 2 eps)^2` when the outer
    /// boundary is Neumann or Robin, `(pi / eps)^2` when it is Dirichlet.
    pub fn threshold(&self) -> f64 {
        match self.bc.outer {
            OuterCondition::Dirichlet => (2.0 * FRAC_PI_2 / self.eps).powi(2),
            _ => (FRAC_PI_2 / self.eps).powi(2),
        }
    }

    /// Potential of the matching one-dimensional comparison operator.
    pub fn effective_variant(&self) -> (EffectiveVariant, Option<Alpha>) {
        match self.bc.outer {
            OuterCondition::Neumann => (EffectiveVariant::DN, None),
            OuterCondition::Dirichlet => (EffectiveVariant::Dirichlet, None),
            OuterCondition::Robin(a) => (EffectiveVariant::Robin, Some(a)),
        }
    }
}

/// Lowest `m` eigenvalues of the strip on one grid.
pub fn strip_spectrum(problem: &StripProblem, grid: &TensorGrid, m: usize, tol: f64) -> Result<Spectrum> {
    let pencil = assemble_weighted(&problem.profile, problem.eps, &problem.bc, grid)?;
    smallest_eigenpairs(&pencil, m, None, tol)
}

/// Eigenvalues extrapolated over a grid ladder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extrapolated {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// Raw values per ladder level, coarsest first.
    pub levels: Vec<Vec<f64>>,
}

fn extrapolate(levels: Vec<Vec<f64>>, m: usize) -> Extrapolated {
    let (values, errors) = (0..m)
        .map(|j| romberg(&levels.iter().map(|l| l[j]).collect::<Vec<_>>()))
        .unzip();
    Extrapolated { values, errors, levels }
}

pub fn strip_extrapolated(problem: &StripProblem, ladder: &GridLadder, m: usize, tol: f64) -> Result<Extrapolated> {
    let grids = ladder.grids(problem.profile.interval())?;
    let levels = grids
        .iter()
        .map(|g| strip_spectrum(problem, g, m, tol).map(|s| s.eigenvalues))
        .collect::<Result<Vec<_>>>()?;
    Ok(extrapolate(levels, m))
}

/// Lowest `m` eigenvalues of `-d^2/ds^2 + V` with Dirichlet ends,
/// extrapolated over `levels` doublings starting from `ns` cells.
pub fn one_d_extrapolated(
    potential: &dyn Fn(f64) -> f64,
    interval: Interval,
    ns: usize,
    levels: usize,
    m: usize,
    tol: f64,
) -> Result<Extrapolated> {
    // Fine 1D grids have a residual floor near 1e-16 |A| ~ 1e-16 / h^2, far
    // above the eigenvalue scale; eigenvalue errors are quadratic in the
    // residual, so 1e-9 costs nothing in accuracy.
    let tol = tol.max(ONE_D_TOL_FLOOR);
    let vals = (0..levels)
        .map(|l| {
            let p = assemble_1d(potential, interval, ns << l)?;
            smallest_eigenpairs(&p, m, None, tol).map(|s| s.eigenvalues)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(extrapolate(vals, m))
}

/// Comparison eigenvalues for a strip problem.
pub fn effective_extrapolated(
    problem: &StripProblem,
    ns: usize,
    levels: usize,
    m: usize,
    tol: f64,
) -> Result<Extrapolated> {
    let (variant, alpha) = problem.effective_variant();
    let v = effective_potential(&problem.profile, problem.eps, variant, alpha)?;
    one_d_extrapolated(&|s| v.value(s), problem.profile.interval(), ns, levels, m, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationCheck {
    pub lambda: f64,
    pub lambda_doubled: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Compares the ground state on `grid` with the one on the doubled
/// interval at the same mesh size. The check passes when the shift is
/// below `0.1 * tol * max(1, |lambda|)`.
pub fn truncation_check(problem: &StripProblem, grid: &TensorGrid, tol: f64) -> Result<TruncationCheck> {
    let lambda = strip_spectrum(problem, grid, 1, tol)?.eigenvalues[0];
    let doubled = problem.profile.interval().doubled();
    let wide = StripProblem {
        profile: problem.profile.on_interval(doubled),
        ..problem.clone()
    };
    let lambda_doubled = strip_spectrum(&wide, &grid.on_interval(doubled)?, 1, tol)?.eigenvalues[0];
    let threshold = 0.1 * tol * lambda.abs().max(1.0);
    Ok(TruncationCheck {
        lambda,
        lambda_doubled,
        threshold,
        passed: (lambda - lambda_doubled).abs() < threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransverseEstimate {
    pub nu: f64,
    pub error: f64,
    pub nt: usize,
}

/// Lowest eigenvalue of the transverse operator with weight `1 - c t`,
/// Richardson-extrapolated from two resolutions; resolutions are doubled
/// until successive extrapolations agree to `tol`.
pub fn transverse_nu(c: f64, tol: f64) -> Result<f64> {
    transverse_nu_detailed(c, tol).map(|e| e.nu)
}

pub fn transverse_nu_detailed(c: f64, tol: f64) -> Result<TransverseEstimate> {
    if !(c < 1.0) {
        return Err(Error::OutOfDomain {
            name: "c",
            value: c,
            domain: "c < 1",
        });
    }
    let solve = |nt: usize| -> Result<f64> {
        let p = assemble_transverse(c, nt)?;
        Ok(smallest_eigenpairs(&p, 1, None, 1e-10_f64.max(0.01 * tol))?.eigenvalues[0])
    };
    let mut nt = 64;
    let mut coarse = solve(nt)?;
    let mut fine = solve(2 * nt)?;
    let mut prev = fine + (fine - coarse) / 3.0;
    loop {
        nt *= 2;
        coarse = fine;
        fine = solve(2 * nt)?;
        let rich = fine + (fine - coarse) / 3.0;
        let error = (rich - prev).abs();
        if error <= tol || nt >= 1 << 16 {
            return Ok(TransverseEstimate {
                nu: rich,
                error,
                nt: 2 * nt,
            });
        }
        prev = rich;
    }
}
