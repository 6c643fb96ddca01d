//! Distance between the resolvents of the flat strip operator and the
//! decoupled reference operator.

use serde::{Deserialize, Serialize};

use super::sweep::{ensure_decreasing, loglog_slope, run_parallel};
use crate::discretize::{assemble_flat, assemble_reference, build_grid, BoundaryConditionSet};
use crate::eigensolve::operator_gap_norm;
use crate::error::{Error, Result};
use crate::geometry::{ensure_admissible, CurvatureProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventGap {
    pub eps: f64,
    pub k: f64,
    pub gap: f64,
    /// `gap / eps^(3/2)`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub gaps: Vec<ResolventGap>,
    /// Log-log slope of gap against eps; NaN if any gap vanishes.
    pub fitted_exponent: f64,
    /// `max ratio / min ratio`.
    pub ratio_spread: f64,
}

/// `1 + 2 max(0, -inf kappa)`.
pub fn default_shift(profile: &CurvatureProfile) -> f64 {
    1.0 + 2.0 * (-profile.inf_kappa()).max(0.0)
}

pub fn resolvent_gap(profile: &CurvatureProfile, k: f64, eps: f64, ns: usize, nt: usize, tol: f64) -> Result<ResolventGap> {
    ensure_admissible(profile, eps)?;
    let grid = build_grid(profile.interval(), ns, nt)?;
    let flat = assemble_flat(profile, eps, &BoundaryConditionSet::DN, &grid, Some(k))?;
    let reference = assemble_reference(profile, eps, &grid, k)?;
    let gap = operator_gap_norm(&flat, &reference, tol)?;
    Ok(ResolventGap {
        eps,
        k,
        gap,
        ratio: gap / eps.powf(1.5),
    })
}

/// Gap for every eps on one grid. `k` defaults to [`default_shift`].
pub fn resolvent_gap_sweep(
    profile: &CurvatureProfile,
    k: Option<f64>,
    eps_list: &[f64],
    (ns, nt): (usize, usize),
    tol: f64,
    workers: usize,
) -> Result<GapReport> {
    ensure_decreasing(eps_list)?;
    if !profile.has_derivative() {
        return Err(Error::MissingDerivative(profile.name().to_string()));
    }
    let k = k.unwrap_or_else(|| default_shift(profile));
    let bound = -profile.inf_kappa();
    if !(k > bound) {
        return Err(Error::InvalidShift { k, bound });
    }
    let gaps = run_parallel(eps_list, workers, |&e| resolvent_gap(profile, k, e, ns, nt, tol))?;
    let eps: Vec<f64> = gaps.iter().map(|g| g.eps).collect();
    let vals: Vec<f64> = gaps.iter().map(|g| g.gap).collect();
    let fitted_exponent = if gaps.len() >= 2 && vals.iter().all(|&g| g > 0.0) {
        loglog_slope(&eps, &vals)
    } else {
        f64::NAN
    };
    let rmax = gaps.iter().map(|g| g.ratio).fold(f64::NAN, f64::max);
    let rmin = gaps.iter().map(|g| g.ratio).fold(f64::NAN, f64::min);
    Ok(GapReport {
        gaps,
        fitted_exponent,
        ratio_spread: rmax / rmin,
    })
}
