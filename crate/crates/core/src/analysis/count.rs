//! Counting eigenvalues below the continuum threshold.

use serde::{Deserialize, Serialize};

use super::ladder::romberg;
use super::strip::{strip_spectrum, StripProblem};
use crate::discretize::{assemble_weighted, build_grid, OuterCondition, TensorGrid};
use crate::eigensolve::ldlt_banded;
use crate::error::{Error, Result};

/// Margin below the threshold, in units of the discretization error of
/// the ground state.
pub const MARGIN_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundStateCount {
    pub count: usize,
    pub threshold: f64,
    pub margin: f64,
    /// Count on the doubled interval; only for truncated intervals.
    pub doubled: Option<usize>,
}

/// Ten times the Richardson error estimate of the ground state, from the
/// given grid and the grid with half the cells in each direction.
pub fn default_margin(problem: &StripProblem, grid: &TensorGrid, tol: f64) -> Result<f64> {
    let coarse = build_grid(grid.interval, (grid.ns / 2).max(2), (grid.nt / 2).max(2))?;
    let lc = strip_spectrum(problem, &coarse, 1, tol)?.eigenvalues[0];
    let lf = strip_spectrum(problem, grid, 1, tol)?.eigenvalues[0];
    Ok(MARGIN_FACTOR * romberg(&[lc, lf]).1)
}

/// Number of eigenvalues below `threshold - margin`, from the inertia of
/// the shifted pencil.
fn inertia_below(problem: &StripProblem, grid: &TensorGrid, sigma: f64) -> Result<usize> {
    let pencil = assemble_weighted(&problem.profile, problem.eps, &problem.bc, grid)?;
    let f = match ldlt_banded(&pencil, sigma) {
        Ok(f) => f,
        // a shift exactly on an eigenvalue: nudge it up by a relative 1e-9
        Err(Error::Breakdown { .. }) => ldlt_banded(&pencil, sigma + 1e-9 * sigma.abs().max(1.0))?,
        Err(e) => return Err(e),
    };
    Ok(f.negative_pivots())
}

/// Counts eigenvalues of a Dirichlet-Neumann strip below
/// `(pi / 2 eps)^2 - margin`. On a truncated interval the count is
/// repeated on the doubled interval at the same mesh size and must agree.
pub fn count_bound_states(problem: &StripProblem, grid: &TensorGrid, margin: Option<f64>, tol: f64) -> Result<BoundStateCount> {
    if problem.bc.outer != OuterCondition::Neumann {
        return Err(Error::InvalidArgument("bound states are counted for the Dirichlet-Neumann strip".into()));
    }
    let margin = match margin {
        Some(m) if m > 0.0 => m,
        Some(m) => {
            return Err(Error::OutOfDomain {
                name: "margin",
                value: m,
                domain: "margin > 0",
            })
        }
        None => default_margin(problem, grid, tol)?,
    };
    let threshold = problem.threshold();
    let sigma = threshold - margin;
    let count = inertia_below(problem, grid, sigma)?;
    let doubled = if problem.profile.interval().truncated {
        let iv = problem.profile.interval().doubled();
        let wide = StripProblem {
            profile: problem.profile.on_interval(iv),
            ..problem.clone()
        };
        let d = inertia_below(&wide, &grid.on_interval(iv)?, sigma)?;
        if d != count {
            return Err(Error::UnstableCount { count, doubled: d });
        }
        Some(d)
    } else {
        None
    };
    Ok(BoundStateCount {
        count,
        threshold,
        margin,
        doubled,
    })
}
