//! Shift-invert Lanczos for the lowest eigenpairs of a banded pencil.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ldlt::{factor, ldlt_banded, BandedFactorization};
use crate::banded::dot;
use crate::discretize::GeneralizedPencil;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `|A x - lambda M x|_{M^-1} / (|x|_M max(1, |lambda|))`.
    pub residuals: Vec<f64>,
    pub converged: Vec<bool>,
    /// M-normalized eigenvectors; the first entry of magnitude above
    /// `1e-12` is positive.
    #[serde(skip)]
    pub vectors: Vec<Vec<f64>>,
    /// Shift used by the final Lanczos phase.
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LanczosOptions {
    pub tol: f64,
    pub sigma: Option<f64>,
    /// Krylov dimension of the first phase; later phases double it.
    pub krylov_dim: usize,
    pub max_krylov_dim: usize,
    pub max_phases: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            sigma: None,
            krylov_dim: 60,
            max_krylov_dim: 320,
            max_phases: 8,
            seed: 0x5eed,
        }
    }
}

/// Residual certificate of an approximate eigenpair, computed directly
/// from the pencil.
pub fn residual(pencil: &GeneralizedPencil, mass_factor: &BandedFactorization, x: &[f64], lambda: f64) -> f64 {
    let ax = pencil.stiffness.mul(x);
    let mx = pencil.mass.mul(x);
    let r: Vec<f64> = ax.iter().zip(&mx).map(|(a, m)| a - lambda * m).collect();
    let rn = dot(&r, &mass_factor.solve(&r)).max(0.0).sqrt();
    let xn = dot(x, &mx).sqrt();
    rn / (xn * lambda.abs().max(1.0))
}

/// The `m` smallest eigenpairs of `A x = lambda M x`.
pub fn smallest_eigenpairs(pencil: &GeneralizedPencil, m: usize, sigma: Option<f64>, tol: f64) -> Result<Spectrum> {
    smallest_eigenpairs_with(
        pencil,
        m,
        &LanczosOptions {
            tol,
            sigma,
            ..Default::default()
        },
    )
}

struct Locked {
    lambda: f64,
    x: Vec<f64>,
    mx: Vec<f64>,
    res: f64,
}

pub fn smallest_eigenpairs_with(pencil: &GeneralizedPencil, m: usize, opts: &LanczosOptions) -> Result<Spectrum> {
    let n = pencil.n();
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!("cannot compute {m} eigenpairs of a {n}-dimensional pencil")));
    }
    let mass_factor = factor(&pencil.mass, 0.0).map_err(|e| match e {
        Error::Breakdown { pivot, value, .. } => Error::NotPositiveDefinite { pivot, value },
        other => other,
    })?;
    if mass_factor.negative_pivots() > 0 {
        let pivot = mass_factor.pivots().iter().position(|&d| d < 0.0).unwrap_or(0);
        return Err(Error::NotPositiveDefinite {
            pivot,
            value: mass_factor.pivots()[pivot],
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut sigma = match opts.sigma {
        Some(s) => s,
        None => {
            let rq = pencil.rayleigh_quotient(&pencil.probe);
            rq - 0.1 * rq.abs().max(1.0)
        }
    };
    let mut fact = factor_with_retry(pencil, sigma, &mut rng)?;
    sigma = fact.sigma();
    if opts.sigma.is_none() {
        // move below the bottom of the spectrum
        let mut step = 0.1 * sigma.abs().max(1.0);
        while fact.negative_pivots() > 0 {
            sigma -= step;
            step *= 2.0;
            fact = factor_with_retry(pencil, sigma, &mut rng)?;
            sigma = fact.sigma();
        }
    }

    let mut locked: Vec<Locked> = Vec::new();
    let mut dim = opts.krylov_dim.max(2 * m + 20);
    let mut best_residuals = Vec::new();
    for _phase in 0..opts.max_phases {
        let need = if locked.len() < m { m - locked.len() } else { 1 };
        let room = n - locked.len();
        if room == 0 {
            break;
        }
        let k_max = dim.min(room);
        let outcome = lanczos_phase(pencil, &fact, &mass_factor, &locked, need, k_max, opts.tol, &mut rng);
        best_residuals = outcome.residuals;
        let found = outcome.pairs.len();
        locked.extend(outcome.pairs);
        locked.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));

        if locked.len() >= m {
            let lm = locked[m - 1].lambda;
            let above = locked.get(m).map(|p| p.lambda);
            if certify(pencil, &locked, lm, above, opts.tol, &mut rng)? {
                return Ok(finish(locked, m, sigma));
            }
        }
        if found < need {
            dim = (2 * dim).min(opts.max_krylov_dim);
            if let Some(est) = outcome.lowest_unconverged {
                // re-shift towards the wanted part of the spectrum, keeping
                // the shift below it
                let target = est - 0.5 * (est - sigma).abs();
                if target > sigma {
                    if let Ok(f) = factor_with_retry(pencil, target, &mut rng) {
                        let below_locked = locked.iter().filter(|p| p.lambda < f.sigma()).count();
                        if f.negative_pivots() <= below_locked {
                            sigma = f.sigma();
                            fact = f;
                        }
                    }
                }
            }
        }
    }
    Err(Error::NonConvergence {
        wanted: m,
        converged: locked.len().min(m),
        residuals: best_residuals,
    })
}

fn factor_with_retry(pencil: &GeneralizedPencil, sigma: f64, rng: &mut ChaCha8Rng) -> Result<BandedFactorization> {
    match ldlt_banded(pencil, sigma) {
        Err(Error::Breakdown { .. }) => {
            let perturbed = sigma + 1e-6 * sigma.abs().max(1.0) * (1.0 + rng.gen::<f64>());
            ldlt_banded(pencil, perturbed)
        }
        other => other,
    }
}

/// Checks via inertia that no eigenvalue below `lm` was missed.
fn certify(
    pencil: &GeneralizedPencil,
    locked: &[Locked],
    lm: f64,
    above: Option<f64>,
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> Result<bool> {
    let mut delta = 100.0 * tol * lm.abs().max(1.0);
    if let Some(next) = above {
        if next > lm {
            delta = delta.min(0.5 * (next - lm)).max(1e-3 * delta);
        }
    }
    let f = factor_with_retry(pencil, lm + delta, rng)?;
    let below = locked.iter().filter(|p| p.lambda < f.sigma()).count();
    Ok(f.negative_pivots() == below)
}

fn finish(locked: Vec<Locked>, m: usize, sigma: f64) -> Spectrum {
    let mut spec = Spectrum {
        eigenvalues: Vec::with_capacity(m),
        residuals: Vec::with_capacity(m),
        converged: Vec::with_capacity(m),
        vectors: Vec::with_capacity(m),
        sigma,
    };
    for mut p in locked.into_iter().take(m) {
        if let Some(first) = p.x.iter().find(|v| v.abs() > 1e-12) {
            if *first < 0.0 {
                p.x.iter_mut().for_each(|v| *v = -*v);
            }
        }
        spec.eigenvalues.push(p.lambda);
        spec.residuals.push(p.res);
        spec.converged.push(true);
        spec.vectors.push(p.x);
    }
    spec
}

struct PhaseOutcome {
    /// Converged pairs only.
    pairs: Vec<Locked>,
    /// Residuals of every examined Ritz pair.
    residuals: Vec<f64>,
    lowest_unconverged: Option<f64>,
}

/// M-orthogonalizes `w` against `basis` (given with `M basis`), twice.
fn m_orthogonalize(w: &mut [f64], basis: &[Vec<f64>], m_basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for (v, mv) in basis.iter().zip(m_basis) {
            let c = dot(mv, w);
            w.iter_mut().zip(v).for_each(|(a, b)| *a -= c * b);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn lanczos_phase(
    pencil: &GeneralizedPencil,
    fact: &BandedFactorization,
    mass_factor: &BandedFactorization,
    locked: &[Locked],
    need: usize,
    k_max: usize,
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> PhaseOutcome {
    let n = pencil.n();
    let lx: Vec<Vec<f64>> = locked.iter().map(|p| p.x.clone()).collect();
    let lmx: Vec<Vec<f64>> = locked.iter().map(|p| p.mx.clone()).collect();

    let mut start: Vec<f64> = pencil
        .probe
        .iter()
        .map(|p| p + 1e-3 * rng.gen_range(-1.0..1.0))
        .collect();
    m_orthogonalize(&mut start, &lx, &lmx);
    let mut mv = pencil.mass.mul(&start);
    let norm = dot(&start, &mv).sqrt();
    start.iter_mut().for_each(|v| *v /= norm);
    mv.iter_mut().for_each(|v| *v /= norm);

    let mut basis = vec![start];
    let mut m_basis = vec![mv];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last = PhaseOutcome {
        pairs: Vec::new(),
        residuals: Vec::new(),
        lowest_unconverged: None,
    };
    let check_every = 10;

    loop {
        let j = basis.len() - 1;
        let mut w = fact.solve(&m_basis[j]);
        let a = dot(&m_basis[j], &w);
        alpha.push(a);
        m_orthogonalize(&mut w, &lx, &lmx);
        m_orthogonalize(&mut w, &basis, &m_basis);
        let mut mw = pencil.mass.mul(&w);
        let b = dot(&w, &mw).max(0.0).sqrt();
        let k = basis.len();
        let exhausted = b <= 1e-14 * a.abs().max(f64::MIN_POSITIVE);
        let at_end = k >= k_max || exhausted;
        if k >= need && (k % check_every == 0 || at_end) {
            last = ritz_extract(pencil, mass_factor, &basis, &alpha, &beta, need, tol);
            if last.pairs.len() >= need || at_end {
                return last;
            }
        } else if at_end {
            return ritz_extract(pencil, mass_factor, &basis, &alpha, &beta, need, tol);
        }
        if exhausted {
            // invariant subspace: continue with a fresh random direction
            let mut r: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            m_orthogonalize(&mut r, &lx, &lmx);
            m_orthogonalize(&mut r, &basis, &m_basis);
            let mut mr = pencil.mass.mul(&r);
            let rn = dot(&r, &mr).sqrt();
            if rn == 0.0 {
                return last;
            }
            r.iter_mut().for_each(|v| *v /= rn);
            mr.iter_mut().for_each(|v| *v /= rn);
            beta.push(0.0);
            basis.push(r);
            m_basis.push(mr);
            continue;
        }
        w.iter_mut().for_each(|v| *v /= b);
        mw.iter_mut().for_each(|v| *v /= b);
        beta.push(b);
        basis.push(w);
        m_basis.push(mw);
    }
}

#[allow(clippy::too_many_arguments)]
fn ritz_extract(
    pencil: &GeneralizedPencil,
    mass_factor: &BandedFactorization,
    basis: &[Vec<f64>],
    alpha: &[f64],
    beta: &[f64],
    need: usize,
    tol: f64,
) -> PhaseOutcome {
    let k = basis.len();
    let n = pencil.n();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    // Ritz values of largest magnitude correspond to the eigenvalues
    // nearest the shift and converge first
    let mut order: Vec<usize> = (0..k).filter(|&i| eig.eigenvalues[i] != 0.0).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()));
    let take = (need + 2).min(order.len());
    let mut pairs = Vec::with_capacity(take);
    let mut lowest_unconverged: Option<f64> = None;
    let mut residuals = Vec::with_capacity(take);
    for &i in order.iter().take(take) {
        let s = eig.eigenvectors.column(i);
        let mut x = vec![0.0; n];
        for (c, v) in s.iter().zip(basis) {
            x.iter_mut().zip(v).for_each(|(a, b)| *a += c * b);
        }
        let mx = pencil.mass.mul(&x);
        let xn = dot(&x, &mx).sqrt();
        x.iter_mut().for_each(|v| *v /= xn);
        let mx: Vec<f64> = mx.iter().map(|v| v / xn).collect();
        let lambda = pencil.stiffness.quad_form(&x);
        let res = residual(pencil, mass_factor, &x, lambda);
        residuals.push(res);
        if res <= tol {
            pairs.push(Locked { lambda, x, mx, res });
        } else {
            lowest_unconverged = Some(lowest_unconverged.map_or(lambda, |l: f64| l.min(lambda)));
        }
    }
    PhaseOutcome {
        pairs,
        residuals,
        lowest_unconverged,
    }
}
