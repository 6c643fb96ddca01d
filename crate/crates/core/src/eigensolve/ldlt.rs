//! In-band LDLᵀ factorization without pivoting.

use crate::banded::SymBand;
use crate::discretize::GeneralizedPencil;
use crate::error::{Error, Result};

/// Pivots smaller than this multiple of the largest matrix entry count as
/// a breakdown.
pub const PIVOT_TOLERANCE: f64 = 1e-11;

/// `A - sigma M = L D Lᵀ` with unit lower-triangular banded `L`.
#[derive(Debug, Clone)]
pub struct BandedFactorization {
    n: usize,
    hb: usize,
    /// Strictly lower band of `L`, row-major with the diagonal slot unused.
    l: Vec<f64>,
    d: Vec<f64>,
    sigma: f64,
}

/// Factors a single symmetric banded matrix.
pub fn factor(a: &SymBand, sigma: f64) -> Result<BandedFactorization> {
    let n = a.n();
    let hb = a.half_bandwidth();
    let w = hb + 1;
    let mut l = a.data().to_vec();
    let mut d = vec![0.0; n];
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let mut tmp = vec![0.0; w];
    for i in 0..n {
        let j0 = i.saturating_sub(hb);
        let row = i * w;
        // tmp[k - j0] = L[i][k] * D[k] for the finished part of row i
        for j in j0..i {
            let mut v = l[row + j + hb - i];
            let k0 = j0.max(j.saturating_sub(hb));
            let jrow = j * w;
            for k in k0..j {
                v -= tmp[k - j0] * l[jrow + k + hb - j];
            }
            tmp[j - j0] = v;
            l[row + j + hb - i] = v / d[j];
        }
        let mut di = l[row + hb];
        for k in j0..i {
            di -= tmp[k - j0] * l[row + k + hb - i];
        }
        if !di.is_finite() || di.abs() <= PIVOT_TOLERANCE * scale {
            return Err(Error::Breakdown {
                pivot: i,
                value: di,
                sigma,
            });
        }
        d[i] = di;
        l[row + hb] = 1.0;
    }
    Ok(BandedFactorization { n, hb, l, d, sigma })
}

/// Factors `A - sigma M` of a pencil.
pub fn ldlt_banded(pencil: &GeneralizedPencil, sigma: f64) -> Result<BandedFactorization> {
    let shifted = if sigma == 0.0 {
        pencil.stiffness.clone()
    } else {
        pencil.stiffness.axpy(-sigma, &pencil.mass)
    };
    factor(&shifted, sigma)
}

/// True when the LDLᵀ factorization succeeds with only positive pivots.
pub fn is_positive_definite(a: &SymBand) -> bool {
    factor(a, 0.0).is_ok_and(|f| f.negative_pivots() == 0)
}

impl BandedFactorization {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn pivots(&self) -> &[f64] {
        &self.d
    }

    /// Number of eigenvalues below the shift (Sylvester's law of inertia).
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&d| d < 0.0).count()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        let w = self.hb + 1;
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.hb);
            let row = &self.l[i * w..(i + 1) * w];
            let mut v = x[i];
            for j in j0..i {
                v -= row[j + self.hb - i] * x[j];
            }
            x[i] = v;
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for i in (0..self.n).rev() {
            let j0 = i.saturating_sub(self.hb);
            let row = &self.l[i * w..(i + 1) * w];
            let xi = x[i];
            for j in j0..i {
                x[j] -= row[j + self.hb - i] * xi;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// `L D Lᵀ x`, for reconstruction checks.
    pub fn reconstruct_mul(&self, x: &[f64]) -> Vec<f64> {
        let w = self.hb + 1;
        // y = Lᵀ x
        let mut y = x.to_vec();
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.hb);
            for j in j0..i {
                y[j] += self.l[i * w + j + self.hb - i] * x[i];
            }
        }
        for (yi, di) in y.iter_mut().zip(&self.d) {
            *yi *= di;
        }
        // z = L y
        let mut z = y.clone();
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.hb);
            for j in j0..i {
                z[i] += self.l[i * w + j + self.hb - i] * y[j];
            }
        }
        z
    }
}
