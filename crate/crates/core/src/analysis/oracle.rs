//! Separable reference spectrum for a constant-curvature strip, i.e. an
//! annular sector with Dirichlet data on the radial edges and on one
//! circular arc, Neumann data on the other.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::bessel::{bessel_j, bessel_j_prime, bessel_y, bessel_y_prime, bisect};
use crate::error::{Error, Result};

/// Position of the Neumann arc relative to the Dirichlet arc of radius `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NeumannSide {
    /// Neumann at `R - eps`: the strip curves towards its free edge (kappa > 0).
    Inner,
    /// Neumann at `R + eps` (kappa < 0).
    Outer,
}

impl NeumannSide {
    pub fn for_curvature(kappa: f64) -> Self {
        if kappa >= 0.0 {
            NeumannSide::Inner
        } else {
            NeumannSide::Outer
        }
    }
}

/// Cross product whose zeros in `k` are the radial eigenvalues for angular
/// order `nu`.
pub fn cross_product(nu: f64, k: f64, r_dirichlet: f64, r_neumann: f64) -> f64 {
    let a = k * r_dirichlet;
    let b = k * r_neumann;
    bessel_j(nu, a) * bessel_y_prime(nu, b) - bessel_y(nu, a) * bessel_j_prime(nu, b)
}

/// Eigenvalues `k^2` of the annular sector of opening angle `theta`,
/// Dirichlet radius `r` and width `eps`, for angular orders
/// `nu = m pi / theta`, `m = 1..=m_max`. Every root with
/// `k <= 4 pi / eps` is returned, sorted ascending.
pub fn annulus_oracle(r: f64, eps: f64, theta: f64, side: NeumannSide, m_max: usize) -> Result<Vec<f64>> {
    if !(eps > 0.0 && eps < r) {
        return Err(Error::OutOfDomain {
            name: "eps",
            value: eps,
            domain: "0 < eps < R",
        });
    }
    if !(theta > 0.0 && theta <= 2.0 * PI) {
        return Err(Error::OutOfDomain {
            name: "theta",
            value: theta,
            domain: "0 < theta <= 2 pi",
        });
    }
    let r_neumann = match side {
        NeumannSide::Inner => r - eps,
        NeumannSide::Outer => r + eps,
    };
    let k_start = 0.25 * PI / eps;
    let k_end = 4.0 * PI / eps;
    let step = PI / (40.0 * eps);

    let mut out = Vec::new();
    for m in 1..=m_max {
        let nu = m as f64 * PI / theta;
        let f = |k: f64| cross_product(nu, k, r, r_neumann);
        let mut lo = k_start;
        let mut f_lo = f(lo);
        while lo < k_end {
            let hi = lo + step;
            let f_hi = f(hi);
            if f_lo.signum() != f_hi.signum() {
                let k = bisect(&f, lo, hi).ok_or(Error::Bracketing { lo, hi })?;
                out.push(k * k);
            }
            lo = hi;
            f_lo = f_hi;
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}
