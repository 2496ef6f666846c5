//! Li-Yau and Harnack inequalities on the Heisenberg group, the
//! curvature-dimension inequality on polynomials, and the diameter bounds.

use crate::error::{Error, Result};
use crate::heat_kernels::{heisenberg_kernel, heisenberg_kernel_derivatives, QuadratureSpec};
use crate::model_spaces::{Convention, CurvatureConstants, GammaOrder, HeisenbergFrame, RadialPoint};
use crate::poly::{rat_from_f64, rat_to_f64, Poly};
use crate::quadrature::adaptive_semi_infinite;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiYauConstants {
    pub alpha: f64,
    /// Horizontal dimension.
    pub n: usize,
    pub kappa: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl LiYauConstants {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 2.0) {
            return Err(Error::domain(format!("alpha must exceed 2, got {}", self.alpha)));
        }
        if !(self.rho2 > 0.0) {
            return Err(Error::domain(format!("rho2 must be positive, got {}", self.rho2)));
        }
        Ok(())
    }

    /// `1 + alpha kappa / ((alpha - 1) rho2)`.
    fn factor(&self) -> f64 {
        1.0 + self.alpha * self.kappa / ((self.alpha - 1.0) * self.rho2)
    }
}

/// `D_alpha = n (alpha-1)^2 (1 + alpha kappa / ((alpha-1) rho2)) / (4 (alpha-2))`.
pub fn d_alpha(n: usize, kappa: f64, rho2: f64, alpha: f64) -> Result<f64> {
    let c = LiYauConstants {
        alpha,
        n,
        kappa,
        rho1: 0.0,
        rho2,
    };
    c.validate()?;
    Ok(n as f64 * (alpha - 1.0).powi(2) * c.factor() / (4.0 * (alpha - 2.0)))
}

/// Right side minus left side of the Li-Yau inequality at time `t`, given
/// `Gamma(ln u)`, `Gamma^V(ln u)` and `L u / u` at a point.
pub fn liyau_margin(c: &LiYauConstants, t: f64, gamma: f64, gamma_v: f64, lap_ratio: f64) -> Result<f64> {
    c.validate()?;
    if !(t > 0.0) {
        return Err(Error::domain(format!("time must be positive, got {t}")));
    }
    let (a, n, f) = (c.alpha, c.n as f64, c.factor());
    let lhs = gamma + 2.0 * c.rho2 / a * t * gamma_v;
    let rhs = (f - 2.0 * c.rho1 / a * t) * lap_ratio + n * c.rho1 * c.rho1 / (2.0 * a) * t
        - c.rho1 * n / 2.0 * f
        + n * (a - 1.0).powi(2) * f * f / (8.0 * (a - 2.0) * t);
    Ok(rhs - lhs)
}

/// Li-Yau margin on the Heisenberg group `H^{2n+1}` for `u = P_t p_s = p_{s+t}`,
/// with `Gamma(ln u) = (u_r^2 + r^2 u_z^2) / u^2`, `Gamma^V(ln u) = u_z^2 / u^2`
/// and `L u = du/dt`.
pub fn liyau_slack(n: usize, s: f64, t: f64, point: RadialPoint, c: &LiYauConstants) -> Result<f64> {
    if c.rho1 != 0.0 {
        return Err(Error::Unsupported(
            "the Heisenberg check uses the estimate with rho1 = 0".into(),
        ));
    }
    if c.n != 2 * n {
        return Err(Error::domain("constants must use the horizontal dimension 2n"));
    }
    if !(s > 0.0) {
        return Err(Error::domain(format!("s must be positive, got {s}")));
    }
    let quad = QuadratureSpec {
        tolerance: 1e-12,
        ..QuadratureSpec::default()
    };
    let d = heisenberg_kernel_derivatives(n, s + t, point.r, point.fiber, &quad)?;
    let r = point.r;
    let gamma = (d.p_r * d.p_r + r * r * d.p_z * d.p_z) / (d.p * d.p);
    let gamma_v = d.p_z * d.p_z / (d.p * d.p);
    liyau_margin(c, t, gamma, gamma_v, d.p_t / d.p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarnackReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub d_alpha: f64,
}

/// `u(x, s) <= u(y, t) (t/s)^{D/2} exp(D d(x, y)^2 / (4 n (t - s)))` for the
/// Heisenberg heat kernel `u` from the origin, with `x` and `y` on the first
/// horizontal axis so that `d(x, y) = |x - y|`.
pub fn harnack_check(n: usize, x: f64, y: f64, s: f64, t: f64, alpha: f64) -> Result<HarnackReport> {
    if !(s > 0.0 && s < t) {
        return Err(Error::domain(format!("need 0 < s < t, got s = {s}, t = {t}")));
    }
    let c = crate::model_spaces::curvature_constants(
        crate::model_spaces::ModelSpace::heisenberg(n)?,
        Convention::CdQuarterTrace,
    )?;
    let dim = c.horizontal_dim as f64;
    let da = d_alpha(c.horizontal_dim, c.kappa, c.rho2, alpha)?;
    let quad = QuadratureSpec {
        tolerance: 1e-12,
        ..QuadratureSpec::default()
    };
    let lhs = heisenberg_kernel(n, s, x.abs(), 0.0, &quad)?.value;
    let uy = heisenberg_kernel(n, t, y.abs(), 0.0, &quad)?.value;
    let dist = (x - y).abs();
    let rhs = uy * (t / s).powf(da / 2.0) * (da * dist * dist / (4.0 * dim * (t - s))).exp();
    Ok(HarnackReport {
        lhs,
        rhs,
        slack: rhs - lhs,
        d_alpha: da,
    })
}

/// `Gamma_2 + eps Gamma_2^V - (1/n)(L f)^2 - (rho1 - kappa/eps) Gamma - rho2 Gamma^V`
/// for a polynomial on the Heisenberg group, evaluated exactly at a rational point.
pub fn cd_inequality_slack_exact(
    f: &Poly,
    point: &[BigRational],
    epsilon: &BigRational,
    c: &CurvatureConstants,
) -> Result<BigRational> {
    c.require(Convention::CdQuarterTrace)?;
    if *epsilon <= BigRational::zero() {
        return Err(Error::domain("epsilon must be positive"));
    }
    if c.horizontal_dim == 0 || c.horizontal_dim % 2 == 1 {
        return Err(Error::domain("Heisenberg horizontal dimension must be even and positive"));
    }
    let n = c.horizontal_dim / 2;
    let frame = HeisenbergFrame::new(n);
    if f.nvars() != frame.nvars() || point.len() != frame.nvars() {
        return Err(Error::domain(format!(
            "expected {} variables for the Heisenberg group",
            frame.nvars()
        )));
    }
    let ev = |order| frame.apply(order, f).eval(point);
    let lap = ev(GammaOrder::DeltaH);
    let dim = BigRational::from_integer(c.horizontal_dim.into());
    let rho1 = rat_from_f64(c.rho1);
    let kappa = rat_from_f64(c.kappa);
    let rho2 = rat_from_f64(c.rho2);
    let lhs = ev(GammaOrder::Gamma2) + epsilon * ev(GammaOrder::Gamma2V);
    let rhs = &lap * &lap / dim + (rho1 - kappa / epsilon) * ev(GammaOrder::Gamma) + rho2 * ev(GammaOrder::GammaV);
    Ok(lhs - rhs)
}

pub fn cd_inequality_slack(f: &Poly, point: &[f64], epsilon: f64, c: &CurvatureConstants) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::domain("epsilon must be positive"));
    }
    let p: Vec<BigRational> = point.iter().map(|&v| rat_from_f64(v)).collect();
    cd_inequality_slack_exact(f, &p, &rat_from_f64(epsilon), c).map(|v| rat_to_f64(&v))
}

/// `-2 int_0^inf sqrt(x) Phi''(x) dx` for `Phi''(x) = -2D / (x (2x + alpha D))`
/// by adaptive quadrature after `x = w^2`, and the closed form
/// `2 pi sqrt(2D / alpha)`.
pub fn phi_diameter(alpha: f64, d: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && d > 0.0) {
        return Err(Error::domain(format!("need alpha, D > 0; got ({alpha}, {d})")));
    }
    let phi2 = |x: f64| -2.0 * d / (x * (2.0 * x + alpha * d));
    let closed = 2.0 * PI * (2.0 * d / alpha).sqrt();
    let q = adaptive_semi_infinite(
        |w| {
            if w == 0.0 {
                8.0 / alpha
            } else {
                -4.0 * w * w * phi2(w * w)
            }
        },
        0.0,
        1e-14,
        1e-13,
        4000,
    );
    Ok((q.value, closed))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiameterInputs {
    pub rho1: f64,
    pub rho2: f64,
    pub kappa: f64,
    pub n: usize,
    /// Defaults to 3.
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiameterBounds {
    pub beta: f64,
    pub general: f64,
    pub beta3: f64,
}

/// The diameter bound for a given `beta > 2`,
/// `pi (1 + kappa/rho2) sqrt(n/rho1) sqrt(beta (beta-1) (beta - rho2/(rho2+kappa)) / (beta-2))`,
/// next to its `beta = 3` form
/// `2 sqrt(3) pi sqrt((rho2 + kappa)(1 + 3 kappa / (2 rho2)) n / (rho1 rho2))`.
pub fn bonnet_myers_diameter(inp: &DiameterInputs) -> Result<DiameterBounds> {
    let beta = inp.beta.unwrap_or(3.0);
    if !(beta > 2.0) {
        return Err(Error::domain(format!("beta must exceed 2, got {beta}")));
    }
    let DiameterInputs { rho1, rho2, kappa, n, .. } = *inp;
    if !(rho1 > 0.0 && rho2 > 0.0 && kappa >= 0.0 && n >= 1) {
        return Err(Error::domain(format!(
            "need rho1, rho2 > 0, kappa >= 0, n >= 1; got ({rho1}, {rho2}, {kappa}, {n})"
        )));
    }
    let nf = n as f64;
    let general = PI
        * (1.0 + kappa / rho2)
        * (nf / rho1).sqrt()
        * (beta * (beta - 1.0) * (beta - rho2 / (rho2 + kappa)) / (beta - 2.0)).sqrt();
    let beta3 = 2.0 * 3f64.sqrt() * PI * ((rho2 + kappa) / (rho1 * rho2) * (1.0 + 1.5 * kappa / rho2) * nf).sqrt();
    Ok(DiameterBounds { beta, general, beta3 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_spaces::{curvature_constants, ModelSpace};

    fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        while b - a > 1e-10 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn d_alpha_values() {
        assert!((d_alpha(4, 0.0, 1.0, 3.0).unwrap() - 4.0).abs() < 1e-14);
        let (k, r) = (0.7, 1.3);
        assert!((d_alpha(2, k, r, 3.0).unwrap() - 2.0 * (1.0 + 3.0 * k / (2.0 * r))).abs() < 1e-14);
        assert!(d_alpha(2, 1.0, 1.0, 2.0).is_err());
        let a0: f64 = golden_min(|a| d_alpha(2, 0.0, 1.0, a).unwrap(), 2.0 + 1e-9, 10.0);
        assert!((a0 - 3.0).abs() < 1e-6);
    }

    #[test]
    fn d_alpha_minimizer() {
        // stationary point of (a-1)(a-1+c a)/(a-2) with c = kappa/rho2
        for &c in &[0.0f64, 0.5, 4.0] {
            let star = 2.0 + ((1.0 + 2.0 * c) / (1.0 + c)).sqrt();
            let found = golden_min(|a| d_alpha(2, c, 1.0, a).unwrap(), 2.0 + 1e-9, 10.0);
            assert!((found - star).abs() < 1e-6, "c={c}: {found} vs {star}");
        }
    }

    fn heis_constants(alpha: f64) -> LiYauConstants {
        let c = curvature_constants(ModelSpace::heisenberg(1).unwrap(), Convention::CdQuarterTrace).unwrap();
        LiYauConstants {
            alpha,
            n: c.horizontal_dim,
            kappa: c.kappa,
            rho1: c.rho1,
            rho2: c.rho2,
        }
    }

    #[test]
    fn liyau_on_heisenberg() {
        let c = heis_constants(3.0);
        assert_eq!((c.kappa, c.rho2), (4.0, 2.0));
        let p = RadialPoint::new(0.5, 0.2);
        assert!(liyau_slack(1, 0.2, 0.3, p, &c).unwrap() >= -1e-6);
        for &t in &[0.3, 0.6, 1.2] {
            assert!(liyau_slack(1, 0.2, t, p, &c).unwrap() >= -1e-6);
        }
        assert!(liyau_slack(1, 0.2, 5.0, p, &c).unwrap() > 0.0);
    }

    #[test]
    fn harnack_on_axis() {
        let h = harnack_check(1, 0.5, 0.0, 0.3, 0.6, 3.0).unwrap();
        assert!(h.slack >= -1e-6, "{h:?}");
        let same = harnack_check(1, 0.0, 0.0, 0.3, 0.6, 3.0).unwrap();
        assert!(same.slack >= -1e-6);
        let slacks: Vec<f64> = [0.0, 0.5, 1.0]
            .iter()
            .map(|&x| harnack_check(1, x, 0.0, 0.3, 0.6, 3.0).unwrap().slack)
            .collect();
        assert!(slacks.iter().all(|&s| s >= -1e-6));
    }

    #[test]
    fn cd_examples() {
        let c = curvature_constants(ModelSpace::heisenberg(1).unwrap(), Convention::CdQuarterTrace).unwrap();
        let x = Poly::var(3, 0);
        let s = cd_inequality_slack(&x, &[0.3, -0.2, 0.7], 1.0, &c).unwrap();
        assert_eq!(s, 4.0);
        let z = Poly::var(3, 2);
        assert!(cd_inequality_slack(&z, &[1.0, 2.0, 0.0], 0.5, &c).unwrap() >= 0.0);
        let wrong = CurvatureConstants {
            convention: Convention::LichneFullTrace,
            ..c
        };
        assert!(cd_inequality_slack(&x, &[0.0; 3], 1.0, &wrong).is_err());
    }

    #[test]
    fn phi_quadrature() {
        let (q, c) = phi_diameter(1.0, 1.0).unwrap();
        assert!((q - c).abs() < 1e-8);
        assert!((q - 8.885766).abs() < 1e-6);
        let (q2, _) = phi_diameter(2.0, 2.0).unwrap();
        assert!((q2 - q).abs() < 1e-8);
        let (a, _) = phi_diameter(2.5, 0.7).unwrap();
        let (b, _) = phi_diameter(1.0, 0.7 / 2.5).unwrap();
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn diameter_forms() {
        let b = bonnet_myers_diameter(&DiameterInputs {
            rho1: 1.0,
            rho2: 1.0,
            kappa: 0.0,
            n: 2,
            beta: None,
        })
        .unwrap();
        assert!((b.general - b.beta3).abs() < 1e-12);
        assert!((b.beta3 - 2.0 * 6f64.sqrt() * PI).abs() < 1e-12);
        let mut prev = 0.0;
        for k in 0..5 {
            let v = bonnet_myers_diameter(&DiameterInputs {
                rho1: 4.0,
                rho2: 0.5,
                kappa: k as f64,
                n: 2,
                beta: Some(3.0),
            })
            .unwrap()
            .beta3;
            assert!(v > prev);
            prev = v;
        }
        assert!(bonnet_myers_diameter(&DiameterInputs {
            rho1: 1.0,
            rho2: 1.0,
            kappa: 0.0,
            n: 2,
            beta: Some(2.0),
        })
        .is_err());
    }
}
