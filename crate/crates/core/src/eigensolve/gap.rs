//! Norm of the difference of two inverse operators sharing a mass matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ldlt::factor;
use crate::banded::dot;
use crate::discretize::GeneralizedPencil;
use crate::error::{Error, Result};

pub const DEFAULT_GAP_TOL: f64 = 1e-6;

const MAX_DIM: usize = 200;

fn positive_definite(p: &GeneralizedPencil) -> Result<super::ldlt::BandedFactorization> {
    let f = factor(&p.stiffness, 0.0).map_err(|e| match e {
        Error::Breakdown { pivot, value, .. } => Error::NotPositiveDefinite { pivot, value },
        other => other,
    })?;
    if let Some(pivot) = f.pivots().iter().position(|&d| d < 0.0) {
        return Err(Error::NotPositiveDefinite {
            pivot,
            value: f.pivots()[pivot],
        });
    }
    Ok(f)
}

/// Largest singular value, in the M-inner product, of
/// `A_a^{-1} M - A_b^{-1} M`. Both stiffness matrices must be positive
/// definite and both pencils must carry the same mass matrix.
pub fn operator_gap_norm(a: &GeneralizedPencil, b: &GeneralizedPencil, tol: f64) -> Result<f64> {
    if a.n() != b.n() || a.mass != b.mass {
        return Err(Error::DimensionMismatch(
            "operator gap needs pencils with a shared mass matrix".into(),
        ));
    }
    let fa = positive_definite(a)?;
    let fb = positive_definite(b)?;
    let mass = &a.mass;
    let n = a.n();
    let apply = |x: &[f64]| -> Vec<f64> {
        let mx = mass.mul(x);
        let ya = fa.solve(&mx);
        let yb = fb.solve(&mx);
        ya.iter().zip(&yb).map(|(p, q)| p - q).collect()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x9a9);
    let mut v: Vec<f64> = a
        .probe
        .iter()
        .map(|p| p + 0.1 * rng.gen_range(-1.0..1.0))
        .collect();
    let mut mv = mass.mul(&v);
    let nv = dot(&v, &mv).sqrt();
    v.iter_mut().for_each(|x| *x /= nv);
    mv.iter_mut().for_each(|x| *x /= nv);

    let mut basis = vec![v];
    let mut m_basis = vec![mv];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut prev = f64::NAN;
    loop {
        let j = basis.len() - 1;
        let mut w = apply(&basis[j]);
        alpha.push(dot(&m_basis[j], &w));
        for _ in 0..2 {
            for (q, mq) in basis.iter().zip(&m_basis) {
                let c = dot(mq, &w);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let mut mw = mass.mul(&w);
        let bnorm = dot(&w, &mw).max(0.0).sqrt();
        let k = basis.len();

        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (idx, theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.abs()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if theta == 0.0 && bnorm == 0.0 {
            return Ok(0.0);
        }
        let estimate = bnorm * eig.eigenvectors[(k - 1, idx)].abs();
        let settled = (theta - prev).abs() <= tol * theta;
        if (estimate <= tol * theta && settled) || bnorm <= 1e-15 * theta || k >= MAX_DIM.min(n) {
            return Ok(theta);
        }
        prev = theta;
        w.iter_mut().for_each(|x| *x /= bnorm);
        mw.iter_mut().for_each(|x| *x /= bnorm);
        beta.push(bnorm);
        basis.push(w);
        m_basis.push(mw);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{assemble_1d, assemble_flat, assemble_reference, build_grid, BoundaryConditionSet};
    use crate::geometry::{make_profile, Interval};

    #[test]
    fn identical_pencils_have_zero_gap() {
        let p = assemble_1d(&|_| 1.0, Interval::new(0.0, 1.0).unwrap(), 50).unwrap();
        assert_eq!(operator_gap_norm(&p, &p, 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn constant_potential_shift_gap_is_exact() {
        // A_b = A_a + c M: the gap is max over eigenvalues of 1/l - 1/(l + c),
        // attained at the smallest eigenvalue
        let iv = Interval::new(0.0, 1.0).unwrap();
        let a = assemble_1d(&|_| 0.0, iv, 200).unwrap();
        let b = assemble_1d(&|_| 5.0, iv, 200).unwrap();
        let b = GeneralizedPencil {
            mass: a.mass.clone(),
            ..b
        };
        let l1 = crate::eigensolve::smallest_eigenpairs(&a, 1, None, 1e-10).unwrap().eigenvalues[0];
        let expect = 1.0 / l1 - 1.0 / (l1 + 5.0);
        let got = operator_gap_norm(&a, &b, 1e-10).unwrap();
        assert!(((got - expect) / expect).abs() < 1e-8, "{got} vs {expect}");
        let back = operator_gap_norm(&b, &a, 1e-10).unwrap();
        assert!(((got - back) / got).abs() < 1e-8);
    }

    #[test]
    fn straight_strip_gap_vanishes() {
        let z = make_profile("zero", &[], Interval::new(0.0, 1.0).unwrap()).unwrap();
        let g = build_grid(z.interval(), 32, 8).unwrap();
        let f = assemble_flat(&z, 0.1, &BoundaryConditionSet::DN, &g, Some(1.0)).unwrap();
        let r = assemble_reference(&z, 0.1, &g, 1.0).unwrap();
        assert!(operator_gap_norm(&f, &r, 1e-6).unwrap() <= 1e-10);
    }

    #[test]
    fn rejects_indefinite_and_mismatched() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let a = assemble_1d(&|_| 0.0, iv, 20).unwrap();
        let neg = a.shifted(-50.0);
        assert!(matches!(operator_gap_norm(&a, &neg, 1e-6), Err(Error::NotPositiveDefinite { .. })));
        let other = assemble_1d(&|_| 0.0, iv, 21).unwrap();
        assert!(matches!(operator_gap_norm(&a, &other, 1e-6), Err(Error::DimensionMismatch(_))));
    }
}
