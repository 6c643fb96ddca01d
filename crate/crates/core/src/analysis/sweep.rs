//! Width sweeps comparing strip eigenvalues with their one-dimensional
//! comparison operators.

use serde::{Deserialize, Serialize};

use super::ladder::GridLadder;
use super::strip::{effective_extrapolated, strip_extrapolated, truncation_check, StripProblem, TruncationCheck};
use crate::coefficients::Alpha;
use crate::discretize::{build_grid, BoundaryConditionSet};
use crate::error::{Error, Result};
use crate::geometry::CurvatureProfile;

/// Tolerance band around the predicted limit of the scaled sequence.
pub const LIMIT_BAND: f64 = 0.05;
/// Largest admissible `max |R| / |R(eps_max)|` for a bounded remainder.
pub const BOUNDED_RATIO: f64 = 3.0;
/// A record is trusted when its discretization error is below this
/// fraction of the remainder.
pub const TRUST_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Strip grids, extrapolated over all levels.
    pub ladder: GridLadder,
    /// Cells of the coarsest one-dimensional grid.
    pub ns_1d: usize,
    pub levels_1d: usize,
    pub tol: f64,
    pub workers: usize,
    /// Run the domain-doubling check on truncated intervals.
    pub truncation_check: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            ladder: GridLadder {
                ns: 128,
                nt: 32,
                levels: 3,
            },
            ns_1d: 1024,
            levels_1d: 3,
            tol: 1e-9,
            workers: 1,
            truncation_check: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub eps: f64,
    pub lambda_strip: Vec<f64>,
    pub lambda_1d: Vec<f64>,
    pub remainder_thm2: Vec<f64>,
    pub scaled_thm1: Vec<f64>,
    pub grid: String,
    /// Largest per-mode error estimate.
    pub discretization_error_estimate: f64,
    /// Strip plus comparison error estimate, per mode.
    pub disc_err: Vec<f64>,
    pub trusted: Vec<bool>,
    pub truncation: Option<TruncationCheck>,
}

impl SweepRecord {
    pub fn modes(&self) -> usize {
        self.lambda_strip.len()
    }

    pub fn all_trusted(&self) -> bool {
        self.trusted.iter().all(|&t| t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Thm1,
    Thm2,
    Dirichlet,
    Robin,
}

impl SweepKind {
    pub fn name(&self) -> &'static str {
        match self {
            SweepKind::Thm1 => "thm1",
            SweepKind::Thm2 => "thm2",
            SweepKind::Dirichlet => "dirichlet",
            SweepKind::Robin => "robin",
        }
    }
}

/// Fit of `L + c sqrt(eps)` through the last three points of the scaled
/// sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitFit {
    pub j: usize,
    pub limit: f64,
    pub slope: f64,
    pub raw_last: f64,
    pub expected: f64,
    pub within_band: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderSummary {
    pub j: usize,
    /// `(eps, remainder)` over trusted records, largest eps first.
    pub trusted: Vec<(f64, f64)>,
    /// `max |R| / |R(eps_max)|`.
    pub growth: f64,
    /// `max |R| / min |R|`.
    pub spread: f64,
    pub bounded: bool,
    /// `|R|` strictly decreasing along the sweep.
    pub decreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub kind: SweepKind,
    pub records: Vec<SweepRecord>,
    pub limits: Vec<LimitFit>,
    pub remainders: Vec<RemainderSummary>,
}

impl SweepReport {
    /// Verdicts of the sweep kind: limits within band (thm1, robin),
    /// bounded remainders (thm1, thm2, robin) or decreasing remainders
    /// (dirichlet).
    pub fn verdicts(&self) -> Vec<(String, bool)> {
        let mut v = Vec::new();
        if matches!(self.kind, SweepKind::Thm1 | SweepKind::Robin) {
            v.extend(self.limits.iter().map(|l| (format!("limit_j{}", l.j), l.within_band)));
        }
        if matches!(self.kind, SweepKind::Thm1 | SweepKind::Thm2 | SweepKind::Robin) {
            v.extend(self.remainders.iter().map(|r| (format!("bounded_j{}", r.j), r.bounded)));
        }
        if self.kind == SweepKind::Dirichlet {
            v.extend(self.remainders.iter().map(|r| (format!("decreasing_j{}", r.j), r.decreasing)));
        }
        v
    }
}

pub fn ensure_decreasing(eps_list: &[f64]) -> Result<()> {
    if eps_list.is_empty() {
        return Err(Error::InvalidArgument("eps_list is empty".into()));
    }
    if let Some(&e) = eps_list.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidEps(e));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("eps_list must be decreasing".into()));
    }
    Ok(())
}

/// Runs `job` on every item using a pool of `workers` threads. Results
/// keep the order of `items`.
pub fn run_parallel<I, T, F>(items: &[I], workers: usize, job: F) -> Result<Vec<T>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    if workers <= 1 {
        return items.iter().map(job).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    pool.install(|| items.par_iter().map(job).collect())
}

/// One sweep point: strip and comparison eigenvalues with error estimates.
pub fn sweep_record(problem: &StripProblem, j_max: usize, opts: &SweepOptions) -> Result<SweepRecord> {
    let strip = strip_extrapolated(problem, &opts.ladder, j_max, opts.tol)?;
    let one_d = effective_extrapolated(problem, opts.ns_1d, opts.levels_1d, j_max, opts.tol)?;
    let thr = problem.threshold();
    let eps = problem.eps;
    let remainder: Vec<f64> = (0..j_max)
        .map(|j| strip.values[j] - thr - one_d.values[j])
        .collect();
    let disc_err: Vec<f64> = (0..j_max).map(|j| strip.errors[j] + one_d.errors[j]).collect();

    let truncation = if opts.truncation_check && problem.profile.interval().truncated {
        let grid = build_grid(problem.profile.interval(), opts.ladder.ns, opts.ladder.nt)?;
        Some(truncation_check(problem, &grid, opts.tol)?)
    } else {
        None
    };
    let truncation_ok = truncation.is_none_or(|t| t.passed);
    let trusted = (0..j_max)
        .map(|j| truncation_ok && disc_err[j] < TRUST_FRACTION * remainder[j].abs())
        .collect();
    Ok(SweepRecord {
        eps,
        scaled_thm1: strip.values.iter().map(|l| eps * (l - thr)).collect(),
        lambda_strip: strip.values,
        lambda_1d: one_d.values,
        remainder_thm2: remainder,
        grid: opts.ladder.tag(),
        discretization_error_estimate: disc_err.iter().copied().fold(0.0, f64::max),
        disc_err,
        trusted,
        truncation,
    })
}

fn run_records(
    profile: &CurvatureProfile,
    bc: BoundaryConditionSet,
    eps_list: &[f64],
    j_max: usize,
    opts: &SweepOptions,
) -> Result<Vec<SweepRecord>> {
    ensure_decreasing(eps_list)?;
    if j_max == 0 {
        return Err(Error::InvalidArgument("j_max must be at least 1".into()));
    }
    // admissibility of the whole sweep before any work starts
    let problems = eps_list
        .iter()
        .map(|&e| StripProblem::new(profile.clone(), e, bc))
        .collect::<Result<Vec<_>>>()?;
    run_parallel(&problems, opts.workers, |p| sweep_record(p, j_max, opts))
}

/// Least-squares fit of `y = L + c sqrt(eps)` through the last three
/// points; fewer points give an exact fit or the raw value.
pub fn fit_sqrt_limit(eps: &[f64], y: &[f64]) -> (f64, f64) {
    let n = eps.len().min(y.len());
    let start = n.saturating_sub(3);
    let xs: Vec<f64> = eps[start..n].iter().map(|e| e.sqrt()).collect();
    let ys = &y[start..n];
    match xs.len() {
        0 => (f64::NAN, f64::NAN),
        1 => (ys[0], 0.0),
        m => {
            let mf = m as f64;
            let mx = xs.iter().sum::<f64>() / mf;
            let my = ys.iter().sum::<f64>() / mf;
            let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
            let c = sxy / sxx;
            (my - c * mx, c)
        }
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn limits(records: &[SweepRecord], expected: f64) -> Vec<LimitFit> {
    let m = records.first().map_or(0, SweepRecord::modes);
    let eps: Vec<f64> = records.iter().map(|r| r.eps).collect();
    (0..m)
        .map(|j| {
            let y: Vec<f64> = records.iter().map(|r| r.scaled_thm1[j]).collect();
            let (limit, slope) = fit_sqrt_limit(&eps, &y);
            LimitFit {
                j: j + 1,
                limit,
                slope,
                raw_last: *y.last().unwrap_or(&f64::NAN),
                expected,
                within_band: (limit - expected).abs() <= LIMIT_BAND,
            }
        })
        .collect()
}

fn remainders(records: &[SweepRecord]) -> Vec<RemainderSummary> {
    let m = records.first().map_or(0, SweepRecord::modes);
    (0..m)
        .map(|j| {
            let trusted: Vec<(f64, f64)> = records
                .iter()
                .filter(|r| r.trusted[j])
                .map(|r| (r.eps, r.remainder_thm2[j]))
                .collect();
            let abs: Vec<f64> = trusted.iter().map(|p| p.1.abs()).collect();
            let max = abs.iter().copied().fold(f64::NAN, f64::max);
            let min = abs.iter().copied().fold(f64::NAN, f64::min);
            let growth = abs.first().map_or(f64::NAN, |first| max / first);
            RemainderSummary {
                j: j + 1,
                growth,
                spread: max / min,
                bounded: growth <= BOUNDED_RATIO,
                decreasing: abs.len() >= 2 && abs.windows(2).all(|w| w[1] < w[0]),
                trusted,
            }
        })
        .collect()
}

fn report(kind: SweepKind, records: Vec<SweepRecord>, expected: f64) -> SweepReport {
    SweepReport {
        kind,
        limits: limits(&records, expected),
        remainders: remainders(&records),
        records,
    }
}

/// Scaled eigenvalues `eps (lambda_j - (pi / 2 eps)^2)` and their limit,
/// compared with `inf kappa`.
pub fn sweep_thm1(profile: &CurvatureProfile, eps_list: &[f64], j_max: usize, opts: &SweepOptions) -> Result<SweepReport> {
    let records = run_records(profile, BoundaryConditionSet::DN, eps_list, j_max, opts)?;
    Ok(report(SweepKind::Thm1, records, profile.inf_kappa()))
}

/// Remainders `lambda_j - (pi / 2 eps)^2 - lambda_j(-d^2 + kappa / eps)`
/// and their boundedness along the sweep.
pub fn check_thm2(profile: &CurvatureProfile, eps_list: &[f64], j_max: usize, opts: &SweepOptions) -> Result<SweepReport> {
    let records = run_records(profile, BoundaryConditionSet::DN, eps_list, j_max, opts)?;
    Ok(report(SweepKind::Thm2, records, profile.inf_kappa()))
}

/// Dirichlet strip against `-d^2 - kappa^2 / 4`; the remainder should
/// decay along the sweep. Both operators live on the given interval, whose
/// ground state is typically spread over all of it, so the interval is
/// treated as the domain and no doubling check is run.
pub fn dirichlet_compare(
    profile: &CurvatureProfile,
    eps_list: &[f64],
    j_max: usize,
    opts: &SweepOptions,
) -> Result<SweepReport> {
    let opts = SweepOptions {
        truncation_check: false,
        ..opts.clone()
    };
    let records = run_records(profile, BoundaryConditionSet::DD, eps_list, j_max, &opts)?;
    Ok(report(SweepKind::Dirichlet, records, 0.0))
}

/// Robin strip with coefficient `alpha` on the outer edge, against
/// `-d^2 + (kappa + 2 alpha) / eps`. The expected limit is
/// `inf (kappa + 2 alpha)`.
pub fn robin_sweep(
    profile: &CurvatureProfile,
    alpha: Alpha,
    eps_list: &[f64],
    j_max: usize,
    opts: &SweepOptions,
) -> Result<SweepReport> {
    let records = run_records(profile, BoundaryConditionSet::robin(alpha), eps_list, j_max, opts)?;
    Ok(report(SweepKind::Robin, records, inf_kappa_plus_2alpha(profile, &alpha)))
}

fn inf_kappa_plus_2alpha(profile: &CurvatureProfile, alpha: &Alpha) -> f64 {
    let iv = profile.interval();
    let n = 20_000;
    (0..=n)
        .map(|i| iv.a + iv.length() * i as f64 / n as f64)
        .map(|s| profile.kappa(s) + 2.0 * alpha.value(s))
        .fold(f64::INFINITY, f64::min)
}
