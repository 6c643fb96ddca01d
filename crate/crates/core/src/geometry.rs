//! Curvature profiles, admissibility of the strip map and reconstruction of
//! the embedded strip.
//!
//! A strip is described entirely by the signed curvature `kappa(s)` of its
//! reference curve on an interval `I`. Positive curvature bends the
//! parallel curve towards the centre of curvature, so it is locally
//! shorter than the reference curve.

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strip maps with `eps * sup|kappa|` above this value are rejected.
pub const ADMISSIBILITY_SAFETY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
    /// Finite stand-in for an unbounded interval.
    #[serde(default)]
    pub truncated: bool,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(Self {
            a,
            b,
            truncated: false,
        })
    }

    pub fn truncated(a: f64, b: f64) -> Result<Self> {
        Ok(Self {
            truncated: true,
            ..Self::new(a, b)?
        })
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Same midpoint, twice the length.
    pub fn doubled(&self) -> Self {
        let half = self.length();
        let c = self.midpoint();
        Self {
            a: c - half,
            b: c + half,
            truncated: self.truncated,
        }
    }

    pub fn contains(&self, s: f64) -> bool {
        self.a <= s && s <= self.b
    }

    pub fn clamp(&self, s: f64) -> f64 {
        s.clamp(self.a, self.b)
    }
}

/// Closed-form curvature shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum Preset {
    Zero,
    Constant { c: f64 },
    /// `-a * exp(-(s - s0)^2 / w^2)`
    GaussianDip { a: f64, s0: f64, w: f64 },
    /// `-cos(s)`
    Negcos,
}

impl Preset {
    pub fn parse(name: &str, params: &[f64]) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidParams {
            preset: name.to_string(),
            reason: reason.to_string(),
        };
        if params.iter().any(|p| !p.is_finite()) {
            return Err(bad("parameters must be finite"));
        }
        match name {
            "zero" => {
                if !params.is_empty() {
                    return Err(bad("takes no parameters"));
                }
                Ok(Preset::Zero)
            }
            "constant" => match params {
                [c] => Ok(Preset::Constant { c: *c }),
                _ => Err(bad("expects one parameter c")),
            },
            "gaussian_dip" => match params {
                [a, s0, w] => {
                    if *w <= 0.0 {
                        return Err(bad("width w must be positive"));
                    }
                    Ok(Preset::GaussianDip {
                        a: *a,
                        s0: *s0,
                        w: *w,
                    })
                }
                _ => Err(bad("expects parameters a, s0, w")),
            },
            "negcos" => {
                if !params.is_empty() {
                    return Err(bad("takes no parameters"));
                }
                Ok(Preset::Negcos)
            }
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    /// Parses `name` or `name:p1,p2,...`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let (name, rest) = match spec.split_once(':') {
            Some((n, r)) => (n.trim(), r.trim()),
            None => (spec.trim(), ""),
        };
        let params = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(',')
                .map(|p| {
                    p.trim().parse::<f64>().map_err(|_| Error::InvalidParams {
                        preset: name.to_string(),
                        reason: format!("cannot parse `{p}` as a number"),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        };
        Self::parse(name, &params)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Zero => "zero",
            Preset::Constant { .. } => "constant",
            Preset::GaussianDip { .. } => "gaussian_dip",
            Preset::Negcos => "negcos",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Preset::Zero | Preset::Negcos => Vec::new(),
            Preset::Constant { c } => vec![c],
            Preset::GaussianDip { a, s0, w } => vec![a, s0, w],
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match *self {
            Preset::Zero => 0.0,
            Preset::Constant { c } => c,
            Preset::GaussianDip { a, s0, w } => {
                let x = (s - s0) / w;
                -a * (-x * x).exp()
            }
            Preset::Negcos => -s.cos(),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match *self {
            Preset::Zero | Preset::Constant { .. } => 0.0,
            Preset::GaussianDip { a, s0, w } => {
                let x = (s - s0) / w;
                2.0 * a * x / w * (-x * x).exp()
            }
            Preset::Negcos => s.sin(),
        }
    }

    /// Points of `interval` where the value or the derivative can attain an
    /// extremum: the endpoints and the interior critical points.
    fn critical_points(&self, interval: &Interval) -> Vec<f64> {
        let mut pts = vec![interval.a, interval.b];
        match *self {
            Preset::Zero | Preset::Constant { .. } => {}
            Preset::GaussianDip { s0, w, .. } => {
                let r = w / 2f64.sqrt();
                pts.extend([s0, s0 - r, s0 + r].into_iter().map(|p| interval.clamp(p)));
            }
            Preset::Negcos => {
                let first = (interval.a / (0.5 * PI)).ceil() as i64;
                let last = (interval.b / (0.5 * PI)).floor() as i64;
                pts.extend((first..=last).map(|k| k as f64 * 0.5 * PI));
            }
        }
        pts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivativeSource {
    Analytic,
    /// Centered difference with step `1e-6 * |I|`.
    FiniteDifference,
    Missing,
}

/// Serializable record of a profile: `{name, interval, params}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub name: String,
    pub interval: Interval,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureProfile {
    preset: Preset,
    interval: Interval,
    derivative: DerivativeSource,
    inf_kappa: f64,
    sup_kappa: f64,
    sup_abs_kappa: f64,
    sup_abs_kappa_prime: f64,
}

/// Builds a profile from a preset name, its parameters and an interval.
pub fn make_profile(preset: &str, params: &[f64], interval: Interval) -> Result<CurvatureProfile> {
    Ok(CurvatureProfile::new(Preset::parse(preset, params)?, interval))
}

impl CurvatureProfile {
    pub fn new(preset: Preset, interval: Interval) -> Self {
        let pts = preset.critical_points(&interval);
        let (mut lo, mut hi, mut dmax) = (f64::INFINITY, f64::NEG_INFINITY, 0f64);
        for &s in &pts {
            let k = preset.value(s);
            lo = lo.min(k);
            hi = hi.max(k);
            dmax = dmax.max(preset.derivative(s).abs());
        }
        Self {
            preset,
            interval,
            derivative: DerivativeSource::Analytic,
            inf_kappa: lo,
            sup_kappa: hi,
            sup_abs_kappa: lo.abs().max(hi.abs()),
            sup_abs_kappa_prime: dmax,
        }
    }

    pub fn from_spec(spec: &ProfileSpec) -> Result<Self> {
        make_profile(&spec.name, &spec.params, spec.interval)
    }

    pub fn spec(&self) -> ProfileSpec {
        ProfileSpec {
            name: self.preset.name().to_string(),
            interval: self.interval,
            params: self.preset.params(),
        }
    }

    /// Replaces the analytic derivative by a centered finite difference.
    pub fn with_finite_difference_derivative(mut self) -> Self {
        self.derivative = DerivativeSource::FiniteDifference;
        self
    }

    /// Drops the derivative entirely, as for a merely bounded curvature.
    pub fn without_derivative(mut self) -> Self {
        self.derivative = DerivativeSource::Missing;
        self
    }

    /// Same curvature shape on another interval.
    pub fn on_interval(&self, interval: Interval) -> Self {
        let mut p = Self::new(self.preset, interval);
        p.derivative = self.derivative;
        p
    }

    pub fn preset(&self) -> Preset {
        self.preset
    }

    pub fn name(&self) -> &'static str {
        self.preset.name()
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn derivative_source(&self) -> DerivativeSource {
        self.derivative
    }

    pub fn kappa(&self, s: f64) -> f64 {
        self.preset.value(s)
    }

    pub fn kappa_prime(&self, s: f64) -> Option<f64> {
        match self.derivative {
            DerivativeSource::Analytic => Some(self.preset.derivative(s)),
            DerivativeSource::FiniteDifference => {
                let step = 1e-6 * self.interval.length();
                Some((self.preset.value(s + step) - self.preset.value(s - step)) / (2.0 * step))
            }
            DerivativeSource::Missing => None,
        }
    }

    pub fn inf_kappa(&self) -> f64 {
        self.inf_kappa
    }

    pub fn sup_kappa(&self) -> f64 {
        self.sup_kappa
    }

    pub fn sup_abs_kappa(&self) -> f64 {
        self.sup_abs_kappa
    }

    /// Zero when the derivative is missing.
    pub fn sup_abs_kappa_prime(&self) -> f64 {
        match self.derivative {
            DerivativeSource::Missing => 0.0,
            _ => self.sup_abs_kappa_prime,
        }
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative != DerivativeSource::Missing
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub eps: f64,
    pub eps_sup_kappa: f64,
    pub admissible: bool,
    /// Bounds `1 - eps max(sup kappa, 0) <= h <= 1 - eps min(inf kappa, 0)`
    /// on the Jacobian.
    pub h_lower: f64,
    pub h_upper: f64,
    pub messages: Vec<String>,
}

pub fn validate(profile: &CurvatureProfile, eps: f64) -> Result<ValidityReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidEps(eps));
    }
    let eps_sup_kappa = eps * profile.sup_abs_kappa();
    let admissible = eps_sup_kappa <= ADMISSIBILITY_SAFETY;
    // h = 1 on the reference curve, so the bracket always contains 1
    let h_lower = 1.0 - eps * profile.sup_kappa().max(0.0);
    let h_upper = 1.0 - eps * profile.inf_kappa().min(0.0);
    let mut messages = Vec::new();
    if !admissible {
        messages.push(format!(
            "eps * sup|kappa| = {eps_sup_kappa:.6} exceeds the safety bound {ADMISSIBILITY_SAFETY}"
        ));
    }
    if profile.interval().truncated {
        messages.push("interval is a truncation of an unbounded one".to_string());
    }
    messages.push("global injectivity of the strip map is not certified".to_string());
    Ok(ValidityReport {
        eps,
        eps_sup_kappa,
        admissible,
        h_lower,
        h_upper,
        messages,
    })
}

pub(crate) fn ensure_admissible(profile: &CurvatureProfile, eps: f64) -> Result<()> {
    let report = validate(profile, eps)?;
    if report.admissible {
        Ok(())
    } else {
        Err(Error::Inadmissible {
            eps_sup_kappa: report.eps_sup_kappa,
            limit: ADMISSIBILITY_SAFETY,
        })
    }
}

pub type Point = [f64; 2];

/// Plot data for the embedded strip.
#[derive(Debug, Clone, PartialEq)]
pub struct StripOutline {
    pub s: Vec<f64>,
    /// The reference curve.
    pub base: Vec<Point>,
    /// The parallel curve at distance `eps`.
    pub parallel: Vec<Point>,
    pub start_cap: [Point; 2],
    pub end_cap: [Point; 2],
}

/// Reconstructs the reference curve from its curvature (starting at the
/// origin with a horizontal tangent) together with its parallel curve.
pub fn embed(profile: &CurvatureProfile, eps: f64, n_points: usize) -> Result<StripOutline> {
    ensure_admissible(profile, eps)?;
    if n_points < 2 {
        return Err(Error::InvalidArgument("embed needs at least 2 points".into()));
    }
    let iv = profile.interval();
    let segments = n_points - 1;
    let substeps = 1024usize.max(n_points).div_ceil(segments);
    let h = iv.length() / (segments * substeps) as f64;

    // state: x, y, tangent angle
    let rhs = |s: f64, y: [f64; 3]| [y[2].cos(), y[2].sin(), profile.kappa(s)];
    let mut state = [0.0, 0.0, 0.0];
    let mut s = iv.a;
    let mut out = StripOutline {
        s: Vec::with_capacity(n_points),
        base: Vec::with_capacity(n_points),
        parallel: Vec::with_capacity(n_points),
        start_cap: [[0.0; 2]; 2],
        end_cap: [[0.0; 2]; 2],
    };
    let record = |s: f64, st: [f64; 3], out: &mut StripOutline| {
        let normal = [-st[2].sin(), st[2].cos()];
        out.s.push(s);
        out.base.push([st[0], st[1]]);
        out.parallel
            .push([st[0] + eps * normal[0], st[1] + eps * normal[1]]);
    };
    record(s, state, &mut out);
    for seg in 0..segments {
        for _ in 0..substeps {
            let k1 = rhs(s, state);
            let k2 = rhs(s + 0.5 * h, add(state, k1, 0.5 * h));
            let k3 = rhs(s + 0.5 * h, add(state, k2, 0.5 * h));
            let k4 = rhs(s + h, add(state, k3, h));
            for i in 0..3 {
                state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            s += h;
        }
        // pin the abscissa to the grid to avoid drift
        s = iv.a + (seg + 1) as f64 * iv.length() / segments as f64;
        record(s, state, &mut out);
    }
    out.start_cap = [out.base[0], out.parallel[0]];
    out.end_cap = [out.base[segments], out.parallel[segments]];
    Ok(out)
}

fn add(y: [f64; 3], k: [f64; 3], h: f64) -> [f64; 3] {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]]
}

impl StripOutline {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "s,x_base,y_base,x_parallel,y_parallel")?;
        for i in 0..self.s.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.s[i], self.base[i][0], self.base[i][1], self.parallel[i][0], self.parallel[i][1]
            )?;
        }
        Ok(())
    }

    /// Sampled scan for crossings between non-adjacent segments of the
    /// closed outline (base, end cap, reversed parallel, start cap).
    /// Returns pairs of segment indices of that outline.
    pub fn self_intersections(&self) -> Vec<(usize, usize)> {
        let mut ring: Vec<Point> = self.base.clone();
        ring.extend(self.parallel.iter().rev());
        let n = ring.len();
        let mut hits = Vec::new();
        for i in 0..n {
            let (p1, p2) = (ring[i], ring[(i + 1) % n]);
            for j in (i + 2)..n {
                if (j + 1) % n == i {
                    continue;
                }
                let (q1, q2) = (ring[j], ring[(j + 1) % n]);
                if segments_cross(p1, p2, q1, q2) {
                    hits.push((i, j));
                }
            }
        }
        hits
    }
}

fn segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let orient = |a: Point, b: Point, c: Point| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dip() -> CurvatureProfile {
        make_profile("gaussian_dip", &[1.0, 0.0, 1.0], Interval::truncated(-6.0, 6.0).unwrap()).unwrap()
    }

    #[test]
    fn preset_bounds() {
        let zero = make_profile("zero", &[], Interval::new(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(zero.inf_kappa(), 0.0);
        assert_eq!(zero.sup_abs_kappa(), 0.0);

        let c = make_profile("constant", &[1.0], Interval::new(0.0, PI).unwrap()).unwrap();
        assert_eq!(c.inf_kappa(), 1.0);

        let g = dip();
        assert_eq!(g.inf_kappa(), -1.0);
        assert_eq!(g.sup_abs_kappa(), 1.0);
        assert!((g.sup_abs_kappa_prime() - 2f64.sqrt() * (-0.5f64).exp()).abs() < 1e-15);

        let n = make_profile("negcos", &[], Interval::new(-PI, PI).unwrap()).unwrap();
        assert_eq!(n.inf_kappa(), -1.0);
        assert!((n.sup_kappa() - 1.0).abs() < 1e-15);
        assert!((n.sup_abs_kappa_prime() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_dip_outside_interval() {
        let g = make_profile("gaussian_dip", &[2.0, 5.0, 1.0], Interval::new(0.0, 1.0).unwrap()).unwrap();
        assert!((g.inf_kappa() - (-2.0 * (-16.0f64).exp())).abs() < 1e-15);
        assert!((g.sup_kappa() - (-2.0 * (-25.0f64).exp())).abs() < 1e-18);
    }

    #[test]
    fn preset_errors() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        assert!(matches!(make_profile("spiral", &[], iv), Err(Error::UnknownPreset(_))));
        assert!(matches!(
            make_profile("gaussian_dip", &[1.0, 0.0, 0.0], iv),
            Err(Error::InvalidParams { .. })
        ));
        assert!(matches!(
            make_profile("constant", &[f64::NAN], iv),
            Err(Error::InvalidParams { .. })
        ));
        assert!(Interval::new(1.0, 1.0).is_err());
    }

    #[test]
    fn spec_strings() {
        let p = Preset::parse_spec("gaussian_dip:1, 0, 1").unwrap();
        assert_eq!(p, Preset::GaussianDip { a: 1.0, s0: 0.0, w: 1.0 });
        assert_eq!(Preset::parse_spec("negcos").unwrap(), Preset::Negcos);
        assert!(Preset::parse_spec("constant:x").is_err());
    }

    #[test]
    fn spec_round_trip() {
        let g = dip();
        let text = serde_json::to_string(&g.spec()).unwrap();
        let back = CurvatureProfile::from_spec(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn finite_difference_derivative_matches() {
        let g = dip();
        let fd = g.clone().with_finite_difference_derivative();
        for i in 0..=100 {
            let s = -6.0 + 0.12 * i as f64;
            let d = (g.kappa_prime(s).unwrap() - fd.kappa_prime(s).unwrap()).abs();
            assert!(d < 1e-8, "s = {s}: {d}");
        }
        assert_eq!(g.clone().without_derivative().kappa_prime(0.3), None);
    }

    #[test]
    fn validity_examples() {
        let r = validate(&dip(), 0.1).unwrap();
        assert!(r.admissible);
        assert!((r.eps_sup_kappa - 0.1).abs() < 1e-15);
        assert!((r.h_upper - 1.1).abs() < 1e-15);

        let c = make_profile("constant", &[1.0], Interval::new(0.0, PI).unwrap()).unwrap();
        assert!(!validate(&c, 0.8).unwrap().admissible);

        let z = make_profile("zero", &[], Interval::new(0.0, 1.0).unwrap()).unwrap();
        let r = validate(&z, 0.3).unwrap();
        assert!(r.admissible);
        assert_eq!(r.eps_sup_kappa, 0.0);

        assert!(matches!(validate(&z, 0.0), Err(Error::InvalidEps(_))));
        assert!(matches!(validate(&z, -1.0), Err(Error::InvalidEps(_))));
    }

    #[test]
    fn straight_strip_embedding() {
        let z = make_profile("zero", &[], Interval::new(0.0, 1.0).unwrap()).unwrap();
        let out = embed(&z, 0.1, 11).unwrap();
        for (i, (b, p)) in out.base.iter().zip(&out.parallel).enumerate() {
            assert!((b[0] - 0.1 * i as f64).abs() < 1e-12);
            assert_eq!(b[1], 0.0);
            assert!((p[1] - 0.1).abs() < 1e-15);
        }
        assert!(out.self_intersections().is_empty());
    }

    #[test]
    fn circle_embedding() {
        let c = make_profile("constant", &[1.0], Interval::new(0.0, PI).unwrap()).unwrap();
        let out = embed(&c, 0.1, 65).unwrap();
        // centre of curvature sits at (0, 1)
        for (b, p) in out.base.iter().zip(&out.parallel) {
            let rb = (b[0].powi(2) + (b[1] - 1.0).powi(2)).sqrt();
            let rp = (p[0].powi(2) + (p[1] - 1.0).powi(2)).sqrt();
            assert!((rb - 1.0).abs() < 1e-10);
            assert!((rp - 0.9).abs() < 1e-10);
        }
    }

    #[test]
    fn full_circle_closes() {
        let c = make_profile("constant", &[2.0], Interval::new(0.0, PI).unwrap()).unwrap();
        let out = embed(&c, 0.1, 200).unwrap();
        let end = out.base.last().unwrap();
        assert!(end[0].hypot(end[1]) < 1e-10);
    }

    #[test]
    fn parallel_distance_is_eps() {
        let out = embed(&dip(), 0.1, 400).unwrap();
        for (b, p) in out.base.iter().zip(&out.parallel) {
            let d = (p[0] - b[0]).hypot(p[1] - b[1]);
            assert!((d - 0.1).abs() < 1e-12);
        }
        assert!(out.self_intersections().is_empty());
    }

    #[test]
    fn embed_rejects_inadmissible() {
        let c = make_profile("constant", &[1.0], Interval::new(0.0, PI).unwrap()).unwrap();
        assert!(matches!(embed(&c, 0.8, 10), Err(Error::Inadmissible { .. })));
        assert!(embed(&c, 0.1, 1).is_err());
    }

    #[test]
    fn csv_header() {
        let z = make_profile("zero", &[], Interval::new(0.0, 1.0).unwrap()).unwrap();
        let mut buf = Vec::new();
        embed(&z, 0.1, 3).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("s,x_base,y_base,x_parallel,y_parallel\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
