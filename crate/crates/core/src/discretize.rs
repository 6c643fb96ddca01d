//! Bilinear finite-element assembly of the strip forms on `I x (0, 1)`.
//!
//! Degrees of freedom are ordered transverse-fastest: node `(i, j)` with
//! `1 <= i <= Ns - 1` and `1 <= j <= Nt_dofs` gets index
//! `(i - 1) * Nt_dofs + (j - 1)`, which gives a half-bandwidth of
//! `Nt_dofs + 1`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::banded::SymBand;
use crate::coefficients::{boundary_weight, potentials_raw, Alpha};
use crate::error::{Error, Result};
use crate::geometry::{ensure_admissible, CurvatureProfile, Interval};
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorGrid {
    pub interval: Interval,
    pub ns: usize,
    pub nt: usize,
    pub s_nodes: Vec<f64>,
    pub t_nodes: Vec<f64>,
}

pub fn build_grid(interval: Interval, ns: usize, nt: usize) -> Result<TensorGrid> {
    if ns < 2 || nt < 2 {
        return Err(Error::DegenerateGrid(format!(
            "need Ns >= 2 and Nt >= 2, got {ns} x {nt}"
        )));
    }
    let hs = interval.length() / ns as f64;
    Ok(TensorGrid {
        interval,
        ns,
        nt,
        s_nodes: (0..=ns).map(|i| interval.a + i as f64 * hs).collect(),
        t_nodes: (0..=nt).map(|j| j as f64 / nt as f64).collect(),
    })
}

impl TensorGrid {
    pub fn hs(&self) -> f64 {
        self.interval.length() / self.ns as f64
    }

    pub fn ht(&self) -> f64 {
        1.0 / self.nt as f64
    }

    /// Same interval with both cell counts doubled.
    pub fn refined(&self) -> TensorGrid {
        build_grid(self.interval, 2 * self.ns, 2 * self.nt).expect("refining a valid grid")
    }

    /// Same cell size on another interval.
    pub fn on_interval(&self, interval: Interval) -> Result<TensorGrid> {
        let ns = (interval.length() / self.hs()).round() as usize;
        build_grid(interval, ns, self.nt)
    }

    pub fn retained_dofs(&self, outer: &OuterCondition) -> usize {
        (self.ns - 1) * outer.transverse_dofs(self.nt)
    }

    pub fn tag(&self) -> String {
        format!("{}x{}", self.ns, self.nt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum OuterCondition {
    Neumann,
    Robin(Alpha),
    Dirichlet,
}

impl OuterCondition {
    pub fn transverse_dofs(&self, nt: usize) -> usize {
        match self {
            OuterCondition::Dirichlet => nt - 1,
            _ => nt,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            OuterCondition::Neumann => "DN",
            OuterCondition::Robin(_) => "DR",
            OuterCondition::Dirichlet => "DD",
        }
    }
}

/// Dirichlet on `t = 0` and on the sides `s = a, b`; the outer condition
/// at `t = 1` is selectable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryConditionSet {
    pub outer: OuterCondition,
}

impl BoundaryConditionSet {
    pub const DN: Self = Self {
        outer: OuterCondition::Neumann,
    };
    pub const DD: Self = Self {
        outer: OuterCondition::Dirichlet,
    };

    pub fn robin(alpha: Alpha) -> Self {
        Self {
            outer: OuterCondition::Robin(alpha),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FormKind {
    Weighted,
    Flat,
    Reference,
    OneD,
    Transverse,
}

/// Basis used for the flat form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FlatBasis {
    /// Bilinear hat functions.
    Plain,
    /// Hat functions multiplied by `sqrt(h)`, the image of the weighted
    /// basis under the change of unknowns between the two formulations.
    Transformed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PencilMeta {
    pub form: FormKind,
    pub eps: Option<f64>,
    pub bc: String,
    pub grid: String,
    /// Multiple of the mass matrix already added to the stiffness.
    pub shift: f64,
}

/// Node coordinates of the retained degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct DofLayout {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    /// Transverse dofs per column (1 for one-dimensional pencils).
    pub stride: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedPencil {
    pub stiffness: SymBand,
    pub mass: SymBand,
    pub meta: PencilMeta,
    /// Nodal interpolant of a separable test function, used to place the
    /// default shift.
    pub probe: Vec<f64>,
    pub layout: DofLayout,
}

impl GeneralizedPencil {
    pub fn n(&self) -> usize {
        self.stiffness.n()
    }

    pub fn half_bandwidth(&self) -> usize {
        self.stiffness.half_bandwidth()
    }

    pub fn rayleigh_quotient(&self, x: &[f64]) -> f64 {
        self.stiffness.quad_form(x) / self.mass.quad_form(x)
    }

    /// Adds `c * M` to the stiffness.
    pub fn shifted(&self, c: f64) -> GeneralizedPencil {
        let mut p = self.clone();
        p.stiffness = self.stiffness.axpy(c, &self.mass);
        p.meta.shift += c;
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AssemblyOptions {
    /// Gauss points per direction in each cell and on the outer edge.
    pub quad_points: usize,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self { quad_points: 2 }
    }
}

/// Coefficients of a bilinear form
/// `int c_ss u_s v_s + c_tt u_t v_t + c_0 u v + c_s (u v_s + u_s v) / 2`
/// with mass `int m_0 u v`.
#[derive(Debug, Clone, Copy, Default)]
struct Integrand {
    c_ss: f64,
    c_tt: f64,
    c_0: f64,
    c_s: f64,
    m_0: f64,
}

/// Multiplier applied to every basis function: value and its two partial
/// derivatives.
type BasisWeight<'a> = Option<&'a dyn Fn(f64, f64) -> (f64, f64, f64)>;

struct StripForm<'a> {
    cell: &'a dyn Fn(f64, f64) -> Integrand,
    /// Coefficient of `int_{t=1} u v ds`.
    edge: Option<&'a dyn Fn(f64) -> f64>,
    weight: BasisWeight<'a>,
}

fn assemble_strip(
    grid: &TensorGrid,
    outer: &OuterCondition,
    form: StripForm<'_>,
    opts: &AssemblyOptions,
    meta: PencilMeta,
) -> GeneralizedPencil {
    let ntd = outer.transverse_dofs(grid.nt);
    let n = (grid.ns - 1) * ntd;
    let hb = ntd + 1;
    let mut a = SymBand::zeros(n, hb);
    let mut m = SymBand::zeros(n, hb);
    let (hs, ht) = (grid.hs(), grid.ht());
    let gid = |i: usize, j: usize| -> Option<usize> {
        (i >= 1 && i < grid.ns && j >= 1 && j <= ntd).then(|| (i - 1) * ntd + (j - 1))
    };
    let rule: Vec<(f64, f64)> = GaussLegendre::new(opts.quad_points).unit().collect();
    // local node order: (0,0), (1,0), (0,1), (1,1)
    const LOC: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

    for i in 0..grid.ns {
        for j in 0..grid.nt {
            let ids: [Option<usize>; 4] = LOC.map(|(di, dj)| gid(i + di, j + dj));
            if ids.iter().all(Option::is_none) {
                continue;
            }
            let mut ke = [[0.0; 4]; 4];
            let mut me = [[0.0; 4]; 4];
            for &(u, wu) in &rule {
                for &(v, wv) in &rule {
                    let s = grid.s_nodes[i] + u * hs;
                    let t = grid.t_nodes[j] + v * ht;
                    let w = wu * wv * hs * ht;
                    let c = (form.cell)(s, t);
                    let mut val = [(1.0 - u) * (1.0 - v), u * (1.0 - v), (1.0 - u) * v, u * v];
                    let mut ds = [-(1.0 - v) / hs, (1.0 - v) / hs, -v / hs, v / hs];
                    let mut dt = [-(1.0 - u) / ht, -u / ht, (1.0 - u) / ht, u / ht];
                    if let Some(wf) = form.weight {
                        let (g, gs, gt) = wf(s, t);
                        for p in 0..4 {
                            ds[p] = gs * val[p] + g * ds[p];
                            dt[p] = gt * val[p] + g * dt[p];
                            val[p] *= g;
                        }
                    }
                    for p in 0..4 {
                        for q in 0..=p {
                            let k = c.c_ss * ds[p] * ds[q]
                                + c.c_tt * dt[p] * dt[q]
                                + c.c_0 * val[p] * val[q]
                                + 0.5 * c.c_s * (val[p] * ds[q] + val[q] * ds[p]);
                            ke[p][q] += w * k;
                            me[p][q] += w * c.m_0 * val[p] * val[q];
                        }
                    }
                }
            }
            if j + 1 == grid.nt {
                if let Some(edge) = form.edge {
                    for &(u, wu) in &rule {
                        let s = grid.s_nodes[i] + u * hs;
                        let coef = edge(s);
                        if coef == 0.0 {
                            continue;
                        }
                        let mut val = [1.0 - u, u];
                        if let Some(wf) = form.weight {
                            let g = wf(s, 1.0).0;
                            val = [val[0] * g, val[1] * g];
                        }
                        let w = wu * hs * coef;
                        ke[2][2] += w * val[0] * val[0];
                        ke[3][2] += w * val[1] * val[0];
                        ke[3][3] += w * val[1] * val[1];
                    }
                }
            }
            for p in 0..4 {
                let Some(gp) = ids[p] else { continue };
                for q in 0..=p {
                    let Some(gq) = ids[q] else { continue };
                    a.add(gp, gq, ke[p][q]);
                    m.add(gp, gq, me[p][q]);
                }
            }
        }
    }

    let chi: Box<dyn Fn(f64) -> f64> = match outer {
        OuterCondition::Dirichlet => Box::new(|t: f64| (PI * t).sin()),
        _ => Box::new(|t: f64| (FRAC_PI_2 * t).sin()),
    };
    let iv = grid.interval;
    let mut layout = DofLayout {
        s: Vec::with_capacity(n),
        t: Vec::with_capacity(n),
        stride: ntd,
    };
    let mut probe = Vec::with_capacity(n);
    for i in 1..grid.ns {
        for j in 1..=ntd {
            let (s, t) = (grid.s_nodes[i], grid.t_nodes[j]);
            layout.s.push(s);
            layout.t.push(t);
            probe.push((PI * (s - iv.a) / iv.length()).sin() * chi(t));
        }
    }
    GeneralizedPencil {
        stiffness: a,
        mass: m,
        meta,
        probe,
        layout,
    }
}

fn strip_meta(form: FormKind, eps: f64, bc: &str, grid: &TensorGrid) -> PencilMeta {
    PencilMeta {
        form,
        eps: Some(eps),
        bc: bc.to_string(),
        grid: grid.tag(),
        shift: 0.0,
    }
}

/// Pencil of the curvilinear form with Jacobian-weighted mass.
pub fn assemble_weighted(
    profile: &CurvatureProfile,
    eps: f64,
    bc: &BoundaryConditionSet,
    grid: &TensorGrid,
) -> Result<GeneralizedPencil> {
    assemble_weighted_with(profile, eps, bc, grid, &AssemblyOptions::default())
}

pub fn assemble_weighted_with(
    profile: &CurvatureProfile,
    eps: f64,
    bc: &BoundaryConditionSet,
    grid: &TensorGrid,
    opts: &AssemblyOptions,
) -> Result<GeneralizedPencil> {
    ensure_admissible(profile, eps)?;
    let inv_eps2 = 1.0 / (eps * eps);
    let cell = |s: f64, t: f64| {
        let h = 1.0 - profile.kappa(s) * eps * t;
        Integrand {
            c_ss: 1.0 / h,
            c_tt: h * inv_eps2,
            m_0: h,
            ..Default::default()
        }
    };
    let robin = |s: f64| -> f64 {
        match bc.outer {
            OuterCondition::Robin(alpha) => {
                alpha.value(s) * (1.0 - profile.kappa(s) * eps) / eps
            }
            _ => 0.0,
        }
    };
    let form = StripForm {
        cell: &cell,
        edge: matches!(bc.outer, OuterCondition::Robin(_)).then_some(&robin as &dyn Fn(f64) -> f64),
        weight: None,
    };
    let meta = strip_meta(FormKind::Weighted, eps, bc.outer.tag(), grid);
    Ok(assemble_strip(grid, &bc.outer, form, opts, meta))
}

/// Pencil of the flat-space form obtained after removing the Jacobian from
/// the measure. With `shift_k` the stiffness is shifted by
/// `(-(pi / 2 eps)^2 + k / eps) M`.
pub fn assemble_flat(
    profile: &CurvatureProfile,
    eps: f64,
    bc: &BoundaryConditionSet,
    grid: &TensorGrid,
    shift_k: Option<f64>,
) -> Result<GeneralizedPencil> {
    assemble_flat_with(profile, eps, bc, grid, shift_k, FlatBasis::Plain, &AssemblyOptions::default())
}

pub fn assemble_flat_with(
    profile: &CurvatureProfile,
    eps: f64,
    bc: &BoundaryConditionSet,
    grid: &TensorGrid,
    shift_k: Option<f64>,
    basis: FlatBasis,
    opts: &AssemblyOptions,
) -> Result<GeneralizedPencil> {
    if bc.outer != OuterCondition::Neumann {
        return Err(Error::InvalidArgument(
            "the flat form is defined for the Dirichlet-Neumann strip only".into(),
        ));
    }
    if !profile.has_derivative() {
        return Err(Error::MissingDerivative(profile.name().to_string()));
    }
    ensure_admissible(profile, eps)?;
    let shift = match shift_k {
        Some(k) => {
            check_shift(profile, k)?;
            -(FRAC_PI_2 / eps).powi(2) + k / eps
        }
        None => 0.0,
    };
    let inv_eps2 = 1.0 / (eps * eps);
    let cell = |s: f64, t: f64| {
        let kp = profile.kappa_prime(s).unwrap_or(0.0);
        let c = potentials_raw(profile.kappa(s), kp, eps, t);
        Integrand {
            c_ss: 1.0 / (c.h * c.h),
            c_tt: inv_eps2,
            c_0: c.v1 - c.v3 + shift,
            c_s: c.v2,
            m_0: 1.0,
        }
    };
    let edge = |s: f64| boundary_weight(profile.kappa(s), eps);
    let sqrt_h = |s: f64, t: f64| {
        let k = profile.kappa(s);
        let kp = profile.kappa_prime(s).unwrap_or(0.0);
        let g = (1.0 - k * eps * t).sqrt();
        (g, -0.5 * kp * eps * t / g, -0.5 * k * eps / g)
    };
    let form = StripForm {
        cell: &cell,
        edge: Some(&edge),
        weight: match basis {
            FlatBasis::Plain => None,
            FlatBasis::Transformed => Some(&sqrt_h),
        },
    };
    let mut meta = strip_meta(FormKind::Flat, eps, "DN", grid);
    meta.shift = shift;
    Ok(assemble_strip(grid, &bc.outer, form, opts, meta))
}

fn check_shift(profile: &CurvatureProfile, k: f64) -> Result<()> {
    let bound = -profile.inf_kappa();
    if k.is_finite() && k > bound {
        Ok(())
    } else {
        Err(Error::InvalidShift { k, bound })
    }
}

/// Pencil of the decoupled reference form
/// `int |u_s|^2 + eps^-2 (|u_t|^2 - (pi/2)^2 |u|^2) + (k + kappa) / eps |u|^2`
/// on the Dirichlet-Neumann dof layout.
pub fn assemble_reference(
    profile: &CurvatureProfile,
    eps: f64,
    grid: &TensorGrid,
    k: f64,
) -> Result<GeneralizedPencil> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidEps(eps));
    }
    check_shift(profile, k)?;
    let inv_eps2 = 1.0 / (eps * eps);
    let cell = |s: f64, _t: f64| Integrand {
        c_ss: 1.0,
        c_tt: inv_eps2,
        c_0: -FRAC_PI_2.powi(2) * inv_eps2 + (k + profile.kappa(s)) / eps,
        c_s: 0.0,
        m_0: 1.0,
    };
    let form = StripForm {
        cell: &cell,
        edge: None,
        weight: None,
    };
    let meta = strip_meta(FormKind::Reference, eps, "DN", grid);
    Ok(assemble_strip(
        grid,
        &OuterCondition::Neumann,
        form,
        &AssemblyOptions::default(),
        meta,
    ))
}

/// Shared 1D assembly on `[a, b]` with `n` cells: `int p u' v' + q u v`
/// over `int r u v`. The left end is always Dirichlet; the right end is
/// Dirichlet when `dirichlet_right` holds and natural otherwise.
fn assemble_line(
    a: f64,
    b: f64,
    n: usize,
    dirichlet_right: bool,
    coef: &dyn Fn(f64) -> (f64, f64, f64),
    quad_points: usize,
) -> (SymBand, SymBand, Vec<f64>) {
    let dofs = if dirichlet_right { n - 1 } else { n };
    let h = (b - a) / n as f64;
    let mut k = SymBand::zeros(dofs, 1);
    let mut m = SymBand::zeros(dofs, 1);
    let rule: Vec<(f64, f64)> = GaussLegendre::new(quad_points).unit().collect();
    for e in 0..n {
        let mut ke = [[0.0; 2]; 2];
        let mut me = [[0.0; 2]; 2];
        for &(u, w) in &rule {
            let x = a + (e as f64 + u) * h;
            let (p, q, r) = coef(x);
            let val = [1.0 - u, u];
            let der = [-1.0 / h, 1.0 / h];
            for i in 0..2 {
                for j in 0..2 {
                    ke[i][j] += w * h * (p * der[i] * der[j] + q * val[i] * val[j]);
                    me[i][j] += w * h * r * val[i] * val[j];
                }
            }
        }
        let id = |l: usize| -> Option<usize> {
            let node = e + l;
            (node >= 1 && node <= dofs).then(|| node - 1)
        };
        for i in 0..2 {
            let Some(gi) = id(i) else { continue };
            for j in 0..=i {
                let Some(gj) = id(j) else { continue };
                k.add(gi, gj, ke[i][j]);
                m.add(gi, gj, me[i][j]);
            }
        }
    }
    let nodes = (1..=dofs).map(|i| a + i as f64 * h).collect();
    (k, m, nodes)
}

/// Pencil of `int |u'|^2 + V |u|^2` with Dirichlet ends.
pub fn assemble_1d(potential: &dyn Fn(f64) -> f64, interval: Interval, ns: usize) -> Result<GeneralizedPencil> {
    if ns < 2 {
        return Err(Error::DegenerateGrid(format!("need Ns >= 2, got {ns}")));
    }
    let coef = |s: f64| (1.0, potential(s), 1.0);
    let (k, m, nodes) = assemble_line(interval.a, interval.b, ns, true, &coef, 2);
    let probe = nodes
        .iter()
        .map(|s| (PI * (s - interval.a) / interval.length()).sin())
        .collect();
    Ok(GeneralizedPencil {
        stiffness: k,
        mass: m,
        meta: PencilMeta {
            form: FormKind::OneD,
            eps: None,
            bc: "D".into(),
            grid: ns.to_string(),
            shift: 0.0,
        },
        probe,
        layout: DofLayout {
            t: vec![0.0; nodes.len()],
            s: nodes,
            stride: 1,
        },
    })
}

/// Pencil of `int_0^1 |chi'|^2 (1 - c t) dt` over `int_0^1 |chi|^2 (1 - c t) dt`
/// with `chi(0) = 0` and a natural condition at `t = 1`.
pub fn assemble_transverse(c: f64, nt: usize) -> Result<GeneralizedPencil> {
    if !(c < 1.0) {
        return Err(Error::OutOfDomain {
            name: "c",
            value: c,
            domain: "c < 1",
        });
    }
    if nt < 2 {
        return Err(Error::DegenerateGrid(format!("need Nt >= 2, got {nt}")));
    }
    let coef = |t: f64| {
        let w = 1.0 - c * t;
        (w, 0.0, w)
    };
    let (k, m, nodes) = assemble_line(0.0, 1.0, nt, false, &coef, 2);
    let probe = nodes.iter().map(|t| (FRAC_PI_2 * t).sin()).collect();
    Ok(GeneralizedPencil {
        stiffness: k,
        mass: m,
        meta: PencilMeta {
            form: FormKind::Transverse,
            eps: None,
            bc: "DN".into(),
            grid: nt.to_string(),
            shift: 0.0,
        },
        probe,
        layout: DofLayout {
            s: vec![0.0; nodes.len()],
            t: nodes,
            stride: 1,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_profile, Preset};
    use proptest::prelude::*;

    fn zero() -> CurvatureProfile {
        make_profile("zero", &[], Interval::new(0.0, 1.0).unwrap()).unwrap()
    }

    fn dip() -> CurvatureProfile {
        make_profile("gaussian_dip", &[1.0, 0.0, 1.0], Interval::truncated(-6.0, 6.0).unwrap()).unwrap()
    }

    #[test]
    fn grid_counts() {
        let g = build_grid(Interval::new(0.0, 1.0).unwrap(), 4, 3).unwrap();
        assert_eq!(g.retained_dofs(&OuterCondition::Neumann), 9);
        let g = build_grid(Interval::new(0.0, 1.0).unwrap(), 2, 2).unwrap();
        assert_eq!(g.retained_dofs(&OuterCondition::Neumann), 2);
        let g = build_grid(Interval::new(-6.0, 6.0).unwrap(), 512, 32).unwrap();
        assert_eq!(g.retained_dofs(&OuterCondition::Neumann), 511 * 32);
        let p = assemble_weighted(&dip(), 0.1, &BoundaryConditionSet::DN, &g).unwrap();
        assert_eq!(p.n(), 511 * 32);
        assert_eq!(p.half_bandwidth(), 33);
        assert!(build_grid(Interval::new(0.0, 1.0).unwrap(), 1, 4).is_err());
        assert!(g.s_nodes.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*g.t_nodes.last().unwrap(), 1.0);
    }

    #[test]
    fn straight_strip_is_kronecker_sum() {
        let eps = 0.1;
        let g = build_grid(Interval::new(0.0, 1.0).unwrap(), 6, 4).unwrap();
        let p = assemble_weighted(&zero(), eps, &BoundaryConditionSet::DN, &g).unwrap();
        let s = assemble_1d(&|_| 0.0, g.interval, 6).unwrap();
        let t = assemble_transverse(0.0, 4).unwrap();
        let nt = 4;
        for r in 0..p.n() {
            for c in 0..p.n() {
                let (i, j) = (r / nt, r % nt);
                let (k, l) = (c / nt, c % nt);
                let a = s.stiffness.get(i, k) * t.mass.get(j, l)
                    + s.mass.get(i, k) * t.stiffness.get(j, l) / (eps * eps);
                let m = s.mass.get(i, k) * t.mass.get(j, l);
                assert!((p.stiffness.get(r, c) - a).abs() < 1e-10 * (1.0 + a.abs()));
                assert!((p.mass.get(r, c) - m).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn flat_equals_weighted_when_straight() {
        let g = build_grid(Interval::new(0.0, 1.0).unwrap(), 8, 4).unwrap();
        let w = assemble_weighted(&zero(), 0.1, &BoundaryConditionSet::DN, &g).unwrap();
        let f = assemble_flat(&zero(), 0.1, &BoundaryConditionSet::DN, &g, None).unwrap();
        assert_eq!(w.stiffness, f.stiffness);
        assert_eq!(w.mass, f.mass);
    }

    #[test]
    fn robin_with_zero_alpha_matches_dn_bitwise() {
        let g = build_grid(dip().interval(), 48, 6).unwrap();
        let dn = assemble_weighted(&dip(), 0.1, &BoundaryConditionSet::DN, &g).unwrap();
        let r = assemble_weighted(&dip(), 0.1, &BoundaryConditionSet::robin(Preset::Zero), &g).unwrap();
        assert_eq!(dn.stiffness.data(), r.stiffness.data());
        assert_eq!(dn.mass.data(), r.mass.data());
    }

    #[test]
    fn robin_edge_term() {
        // constant alpha on a straight strip only touches the t = 1 row
        let g = build_grid(Interval::new(0.0, 1.0).unwrap(), 4, 2).unwrap();
        let dn = assemble_weighted(&zero(), 0.1, &BoundaryConditionSet::DN, &g).unwrap();
        let r = assemble_weighted(&zero(), 0.1, &BoundaryConditionSet::robin(Preset::Constant { c: 2.0 }), &g)
            .unwrap();
        let edge = assemble_1d(&|_| 0.0, g.interval, 4).unwrap().mass;
        for i in 0..3 {
            for k in 0..3 {
                let d = r.stiffness.get(2 * i + 1, 2 * k + 1) - dn.stiffness.get(2 * i + 1, 2 * k + 1);
                assert!((d - 20.0 * edge.get(i, k)).abs() < 1e-12);
                assert_eq!(r.stiffness.get(2 * i, 2 * k), dn.stiffness.get(2 * i, 2 * k));
            }
        }
    }

    #[test]
    fn one_d_constant_potential_is_mass_shift() {
        let iv = Interval::new(0.0, 2.0).unwrap();
        let a0 = assemble_1d(&|_| 0.0, iv, 10).unwrap();
        let a3 = assemble_1d(&|_| 3.0, iv, 10).unwrap();
        let expect = a0.stiffness.axpy(3.0, &a0.mass);
        for (x, y) in a3.stiffness.data().iter().zip(expect.data()) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn dirichlet_outer_layout() {
        let g = build_grid(Interval::new(0.0, 1.0).unwrap(), 4, 3).unwrap();
        let p = assemble_weighted(&zero(), 0.1, &BoundaryConditionSet::DD, &g).unwrap();
        assert_eq!(p.n(), 3 * 2);
        assert_eq!(p.half_bandwidth(), 3);
    }

    #[test]
    fn flat_requires_derivative_and_valid_shift() {
        let g = build_grid(dip().interval(), 16, 4).unwrap();
        let bc = BoundaryConditionSet::DN;
        assert!(matches!(
            assemble_flat(&dip().without_derivative(), 0.1, &bc, &g, None),
            Err(Error::MissingDerivative(_))
        ));
        assert!(matches!(
            assemble_flat(&dip(), 0.1, &bc, &g, Some(1.0)),
            Err(Error::InvalidShift { .. })
        ));
        assert!(matches!(assemble_reference(&dip(), 0.1, &g, 0.5), Err(Error::InvalidShift { .. })));
        assert!(assemble_flat(&dip(), 0.1, &BoundaryConditionSet::DD, &g, None).is_err());
    }

    #[test]
    fn transverse_domain() {
        assert!(assemble_transverse(1.0, 8).is_err());
        assert!(assemble_transverse(0.5, 1).is_err());
        let p = assemble_transverse(0.0, 8).unwrap();
        assert_eq!(p.n(), 8);
    }

    #[test]
    fn tensor_test_function_identity() {
        // Q(phi chi_1) - (pi / 2 eps)^2 |phi chi_1|^2 = int a |phi'|^2 + (kappa / eps) |phi|^2
        let p = dip();
        let eps = 0.05;
        let g = build_grid(p.interval(), 600, 64).unwrap();
        let pencil = assemble_weighted(&p, eps, &BoundaryConditionSet::DN, &g).unwrap();
        let phi = |s: f64| (-s * s).exp();
        let dphi = |s: f64| -2.0 * s * phi(s);
        let x: Vec<f64> = pencil
            .layout
            .s
            .iter()
            .zip(&pencil.layout.t)
            .map(|(&s, &t)| phi(s) * 2f64.sqrt() * (FRAC_PI_2 * t).sin())
            .collect();
        let rq = pencil.rayleigh_quotient(&x);

        let gl = GaussLegendre::new(20);
        let rhs = gl.integrate_composite(-6.0, 6.0, 120, |s| {
            let a = crate::coefficients::overlap_a(&p, eps, s).unwrap();
            a * dphi(s).powi(2) + p.kappa(s) / eps * phi(s).powi(2)
        });
        let norm = gl.integrate_composite(-6.0, 6.0, 120, |s| {
            let k = p.kappa(s);
            phi(s).powi(2) * gl.integrate(0.0, 1.0, |t| 2.0 * (1.0 - k * eps * t) * (FRAC_PI_2 * t).sin().powi(2))
        });
        let expect = (FRAC_PI_2 / eps).powi(2) + rhs / norm;
        assert!(((rq - expect) / expect).abs() < 1e-3, "{rq} vs {expect}");
    }

    proptest! {
        #[test]
        fn pencils_symmetric_and_mass_positive(a in -2.0f64..2.0, eps in 0.02f64..0.2,
                                               ns in 4usize..24, nt in 2usize..8) {
            let p = make_profile("gaussian_dip", &[a, 0.0, 1.0], Interval::new(-3.0, 3.0).unwrap()).unwrap();
            let g = build_grid(p.interval(), ns, nt).unwrap();
            let pencil = assemble_weighted(&p, eps, &BoundaryConditionSet::DN, &g).unwrap();
            let dense = pencil.stiffness.to_dense();
            for i in 0..pencil.n() {
                for j in 0..pencil.n() {
                    prop_assert_eq!(dense[i][j], dense[j][i]);
                }
            }
            prop_assert!(crate::eigensolve::ldlt::is_positive_definite(&pencil.mass));
            let flat = assemble_flat(&p, eps, &BoundaryConditionSet::DN, &g, None).unwrap();
            prop_assert!(crate::eigensolve::ldlt::is_positive_definite(&flat.mass));
        }
    }
}
