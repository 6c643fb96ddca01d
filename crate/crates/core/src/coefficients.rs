//! Pointwise coefficients of the strip forms in curvilinear coordinates.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ensure_admissible, CurvatureProfile, Preset, ADMISSIBILITY_SAFETY};
use crate::quadrature::GaussLegendre;

/// Robin coefficients reuse the curvature presets as shapes of `alpha(s)`.
pub type Alpha = Preset;

/// Number of Gauss-Legendre points used for the overlap integral.
pub const OVERLAP_POINTS: usize = 32;

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            name: "t",
            value: t,
            domain: "[0, 1]",
        })
    }
}

/// `h = 1 - kappa(s) eps t`.
pub fn jacobian_h(profile: &CurvatureProfile, eps: f64, s: f64, t: f64) -> Result<f64> {
    check_t(t)?;
    ensure_admissible(profile, eps)?;
    Ok(1.0 - profile.kappa(s) * eps * t)
}

/// Normalized lowest Dirichlet-Neumann mode on (0, 1).
pub fn transverse_mode(t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(SQRT_2 * (FRAC_PI_2 * t).sin())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientPoint {
    pub h: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    pub v4: f64,
    pub v_boundary: f64,
}

/// Raw formulas; callers are responsible for admissibility.
pub(crate) fn potentials_raw(kappa: f64, kappa_prime: f64, eps: f64, t: f64) -> CoefficientPoint {
    let h = 1.0 - kappa * eps * t;
    CoefficientPoint {
        h,
        v1: 0.25 * kappa_prime * kappa_prime * eps * eps * t * t / h.powi(4),
        v2: kappa_prime * eps * t / h.powi(3),
        v3: 0.25 * kappa * kappa / (h * h),
        v4: kappa / (eps * h),
        v_boundary: boundary_weight(kappa, eps),
    }
}

pub(crate) fn boundary_weight(kappa: f64, eps: f64) -> f64 {
    0.5 * kappa / (eps * (1.0 - eps * kappa))
}

pub fn potentials(profile: &CurvatureProfile, eps: f64, s: f64, t: f64) -> Result<CoefficientPoint> {
    check_t(t)?;
    ensure_admissible(profile, eps)?;
    let kp = profile
        .kappa_prime(s)
        .ok_or_else(|| Error::MissingDerivative(profile.name().to_string()))?;
    Ok(potentials_raw(profile.kappa(s), kp, eps, t))
}

/// Constant `C` such that `|h - 1| <= C eps`, `|V1| <= C eps^2`,
/// `|V2| <= C eps`, `|V3| <= C`, `|V4| <= C / eps` and
/// `|v_boundary| <= C / eps` for every admissible `eps`.
pub fn v_estimate_constant(profile: &CurvatureProfile) -> f64 {
    let k = profile.sup_abs_kappa();
    let kp = profile.sup_abs_kappa_prime();
    let h_min = 1.0 - ADMISSIBILITY_SAFETY;
    [
        k,
        0.25 * kp * kp / h_min.powi(4),
        kp / h_min.powi(3),
        0.25 * k * k / (h_min * h_min),
        k / h_min,
        0.5 * k / h_min,
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EffectiveVariant {
    /// `kappa / eps`
    DN,
    /// `-kappa^2 / 4`
    Dirichlet,
    /// `(kappa + 2 alpha) / eps`
    Robin,
}

/// Potential of the one-dimensional comparison operator on `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectivePotential {
    pub variant: EffectiveVariant,
    profile: CurvatureProfile,
    eps: f64,
    alpha: Option<Alpha>,
}

impl EffectivePotential {
    pub fn value(&self, s: f64) -> f64 {
        let k = self.profile.kappa(s);
        match self.variant {
            EffectiveVariant::DN => k / self.eps,
            EffectiveVariant::Dirichlet => -0.25 * k * k,
            EffectiveVariant::Robin => {
                let a = self.alpha.as_ref().map_or(0.0, |a| a.value(s));
                (k + 2.0 * a) / self.eps
            }
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn profile(&self) -> &CurvatureProfile {
        &self.profile
    }
}

pub fn effective_potential(
    profile: &CurvatureProfile,
    eps: f64,
    variant: EffectiveVariant,
    alpha: Option<Alpha>,
) -> Result<EffectivePotential> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidEps(eps));
    }
    if variant == EffectiveVariant::Robin && alpha.is_none() {
        return Err(Error::MissingAlpha);
    }
    Ok(EffectivePotential {
        variant,
        profile: profile.clone(),
        eps,
        alpha,
    })
}

/// `a(s) = int_0^1 chi_1(t)^2 / h(s, t) dt`.
pub fn overlap_a(profile: &CurvatureProfile, eps: f64, s: f64) -> Result<f64> {
    ensure_admissible(profile, eps)?;
    let k = profile.kappa(s);
    let g = GaussLegendre::new(OVERLAP_POINTS);
    Ok(g.integrate(0.0, 1.0, |t| {
        let chi = SQRT_2 * (FRAC_PI_2 * t).sin();
        chi * chi / (1.0 - k * eps * t)
    }))
}

/// Writes `s,t,h,v1,v2,v3,v4,v_boundary` on an `ns x nt` node lattice.
pub fn write_coefficients_csv<W: Write>(
    profile: &CurvatureProfile,
    eps: f64,
    ns: usize,
    nt: usize,
    mut w: W,
) -> Result<()> {
    ensure_admissible(profile, eps)?;
    let io_err = |e: io::Error| Error::InvalidArgument(format!("write failed: {e}"));
    writeln!(w, "s,t,h,v1,v2,v3,v4,v_boundary").map_err(io_err)?;
    let iv = profile.interval();
    for i in 0..=ns {
        let s = iv.a + iv.length() * i as f64 / ns.max(1) as f64;
        for j in 0..=nt {
            let t = j as f64 / nt.max(1) as f64;
            let c = potentials(profile, eps, s, t)?;
            writeln!(
                w,
                "{s},{t},{},{},{},{},{},{}",
                c.h, c.v1, c.v2, c.v3, c.v4, c.v_boundary
            )
            .map_err(io_err)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_profile, Interval};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn constant(c: f64) -> CurvatureProfile {
        make_profile("constant", &[c], Interval::new(0.0, PI).unwrap()).unwrap()
    }

    fn dip() -> CurvatureProfile {
        make_profile("gaussian_dip", &[1.0, 0.0, 1.0], Interval::truncated(-6.0, 6.0).unwrap()).unwrap()
    }

    #[test]
    fn jacobian_examples() {
        let z = make_profile("zero", &[], Interval::new(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(jacobian_h(&z, 0.3, 0.4, 0.7).unwrap(), 1.0);
        assert!((jacobian_h(&constant(1.0), 0.1, 1.0, 1.0).unwrap() - 0.9).abs() < 1e-15);
        assert!((jacobian_h(&constant(-1.0), 0.1, 1.0, 0.5).unwrap() - 1.05).abs() < 1e-15);
        assert!(jacobian_h(&z, 0.1, 0.0, 1.5).is_err());
    }

    #[test]
    fn transverse_mode_examples() {
        assert_eq!(transverse_mode(0.0).unwrap(), 0.0);
        assert!((transverse_mode(1.0).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        let g = GaussLegendre::new(20);
        let norm = g.integrate(0.0, 1.0, |t| transverse_mode(t).unwrap().powi(2));
        assert!((norm - 1.0).abs() < 1e-14);
        assert!(transverse_mode(-0.1).is_err());
    }

    #[test]
    fn transverse_mode_ode_residual() {
        let t = 0.37;
        let mut prev = f64::INFINITY;
        for k in 1..5 {
            let d = 0.05 / 2f64.powi(k);
            let f = |x: f64| transverse_mode(x).unwrap();
            let second = (f(t + d) - 2.0 * f(t) + f(t - d)) / (d * d);
            let res = (-second - FRAC_PI_2.powi(2) * f(t)).abs();
            assert!(res < prev / 3.5 || res < 1e-7);
            prev = res;
        }
    }

    #[test]
    fn potentials_vanish_for_straight() {
        let z = make_profile("zero", &[], Interval::new(0.0, 1.0).unwrap()).unwrap();
        let c = potentials(&z, 0.1, 0.5, 0.5).unwrap();
        assert_eq!(
            c,
            CoefficientPoint {
                h: 1.0,
                v1: 0.0,
                v2: 0.0,
                v3: 0.0,
                v4: 0.0,
                v_boundary: 0.0
            }
        );
    }

    #[test]
    fn potentials_for_constant() {
        let c = potentials(&constant(2.0), 0.1, 0.5, 0.5).unwrap();
        assert_eq!(c.v1, 0.0);
        assert_eq!(c.v2, 0.0);
        assert!((c.v3 - 1.0 / 0.81).abs() < 1e-14);
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn potentials_gaussian_dip_reference_values() {
        // kappa = -e^{-1}, kappa' = 2 e^{-1} at s = 1; eps = 0.1, t = 1,
        // evaluated independently at 30 digits.
        let c = potentials(&dip(), 0.1, 1.0, 1.0).unwrap();
        let expect = [
            1.03678794411714423215955237702,
            0.00117125452586422908642364471761,
            0.0660185069348714327797789273534,
            0.031475393464578003314417048041,
            -3.54826117779275111322200802144,
            -1.77413058889637555661100401072,
        ];
        let got = [c.h, c.v1, c.v2, c.v3, c.v4, c.v_boundary];
        for (g, e) in got.iter().zip(expect) {
            assert!(((g - e) / e).abs() < 1e-13, "{g} vs {e}");
        }
    }

    #[test]
    fn potentials_need_derivative() {
        let p = dip().without_derivative();
        assert!(matches!(potentials(&p, 0.1, 0.0, 0.5), Err(Error::MissingDerivative(_))));
    }

    #[test]
    fn effective_examples() {
        let z = make_profile("zero", &[], Interval::new(0.0, 1.0).unwrap()).unwrap();
        let e = effective_potential(&z, 0.1, EffectiveVariant::DN, None).unwrap();
        assert_eq!(e.value(0.3), 0.0);
        let e = effective_potential(&constant(1.0), 0.1, EffectiveVariant::Dirichlet, None).unwrap();
        assert_eq!(e.value(1.0), -0.25);
        let alpha = Preset::Constant { c: 1.0 };
        let e = effective_potential(&constant(-1.0), 0.1, EffectiveVariant::Robin, Some(alpha)).unwrap();
        assert!((e.value(2.0) - 10.0).abs() < 1e-12);
        assert!(matches!(
            effective_potential(&z, 0.1, EffectiveVariant::Robin, None),
            Err(Error::MissingAlpha)
        ));
    }

    #[test]
    fn scaled_dn_potential_is_kappa() {
        let p = dip();
        for eps in [0.2, 0.1, 0.05] {
            let e = effective_potential(&p, eps, EffectiveVariant::DN, None).unwrap();
            for s in [-2.0, -0.3, 0.0, 1.7] {
                assert!((eps * e.value(s) - p.kappa(s)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn overlap_examples() {
        let z = make_profile("zero", &[], Interval::new(0.0, 1.0).unwrap()).unwrap();
        assert!((overlap_a(&z, 0.1, 0.5).unwrap() - 1.0).abs() < 1e-14);

        // first-order term: 1 + eps c int t chi^2 dt, int t chi^2 = 1/2 + 2/pi^2
        let lead = 0.5 + 2.0 / (PI * PI);
        for eps in [1e-2, 1e-3, 1e-4] {
            let c = 0.5;
            let a = overlap_a(&constant(c), eps, 1.0).unwrap();
            assert!(((a - 1.0) / (eps * c) - lead).abs() < eps * c);
        }
    }

    #[test]
    fn overlap_sup_is_one_plus_order_eps() {
        let p = dip();
        let sup = |eps: f64| {
            (0..=240)
                .map(|i| (overlap_a(&p, eps, -6.0 + 0.05 * i as f64).unwrap() - 1.0).abs())
                .fold(0.0, f64::max)
        };
        let d: Vec<f64> = [0.2, 0.1, 0.05].iter().map(|&e| sup(e)).collect();
        assert!(d.iter().all(|&x| x > 0.0));
        for w in d.windows(2) {
            let ratio = w[0] / w[1];
            assert!((1.7..2.3).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn csv_dump() {
        let mut buf = Vec::new();
        write_coefficients_csv(&dip(), 0.1, 4, 2, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("s,t,h,v1,v2,v3,v4,v_boundary\n"));
        assert_eq!(text.lines().count(), 1 + 5 * 3);
    }

    proptest! {
        #[test]
        fn jacobian_bracket(a in 0.1f64..3.0, w in 0.3f64..2.0, eps in 0.01f64..0.16,
                            s in -6.0f64..6.0, t in 0.0f64..=1.0) {
            let p = make_profile("gaussian_dip", &[a, 0.0, w], Interval::new(-6.0, 6.0).unwrap()).unwrap();
            let h = jacobian_h(&p, eps, s, t).unwrap();
            let r = crate::geometry::validate(&p, eps).unwrap();
            prop_assert!(h > 0.0);
            prop_assert!(h >= r.h_lower - 1e-15);
            prop_assert!(h <= r.h_upper + 1e-15);
        }

        #[test]
        fn v_estimates(a in -3.0f64..3.0, w in 0.3f64..2.0, eps in 0.005f64..0.16,
                       s in -6.0f64..6.0, t in 0.0f64..=1.0) {
            let p = make_profile("gaussian_dip", &[a, 0.0, w], Interval::new(-6.0, 6.0).unwrap()).unwrap();
            let c = potentials(&p, eps, s, t).unwrap();
            let k = v_estimate_constant(&p) * (1.0 + 1e-12);
            prop_assert!((c.h - 1.0).abs() <= k * eps);
            prop_assert!(c.v1 >= 0.0 && c.v1 <= k * eps * eps);
            prop_assert!(c.v2.abs() <= k * eps);
            prop_assert!(c.v3 >= 0.0 && c.v3 <= k);
            prop_assert!(c.v4.abs() <= k / eps);
            prop_assert!(c.v_boundary.abs() <= k / eps);
        }

        #[test]
        fn overlap_bracket(a in -2.0f64..2.0, eps in 0.01f64..0.2, s in -6.0f64..6.0) {
            let p = make_profile("gaussian_dip", &[a, 0.0, 1.0], Interval::new(-6.0, 6.0).unwrap()).unwrap();
            let v = overlap_a(&p, eps, s).unwrap();
            prop_assert!(v >= 1.0 / (1.0 - eps * p.inf_kappa()) - 1e-13);
            prop_assert!(v <= 1.0 / (1.0 - eps * p.sup_kappa()) + 1e-13);
        }
    }
}
