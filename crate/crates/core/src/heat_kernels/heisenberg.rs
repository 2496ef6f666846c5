//! Heat kernel of the radial horizontal Laplacian on the Heisenberg group,
//! `(2 pi)^{-(n+1)} int e^{i lambda z} (lambda / sinh 2 lambda t)^n
//! exp(-(lambda r^2 / 2) coth 2 lambda t) dlambda`.

use super::{check_time, two_level, KernelEvaluation, Method, QuadratureSpec};
use crate::error::{Error, Result};
use crate::model_spaces::RadialPoint;
use serde::Serialize;
use std::f64::consts::PI;

/// `ln(u / sinh u)`.
fn ln_u_over_sinh(u: f64) -> f64 {
    if u < 1e-3 {
        let u2 = u * u;
        (1.0 - u2 / 6.0 + 7.0 * u2 * u2 / 360.0).ln()
    } else if u < 20.0 {
        (u / u.sinh()).ln()
    } else {
        u.ln() - u - (-(-2.0 * u).exp()).ln_1p() + std::f64::consts::LN_2
    }
}

/// `u coth u`.
fn u_coth(u: f64) -> f64 {
    if u < 1e-3 {
        let u2 = u * u;
        1.0 + u2 / 3.0 - u2 * u2 / 45.0
    } else {
        u / u.tanh()
    }
}

/// `lambda` beyond which `(2t lambda / sinh 2 lambda t)^n < 1e-18`.
fn envelope_cutoff(n: usize, t: f64) -> f64 {
    let target = -18.0 * std::f64::consts::LN_10;
    let f = |u: f64| n as f64 * ln_u_over_sinh(u) - target;
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi / (2.0 * t)
}

fn check_inputs(n: usize, t: f64, r: f64) -> Result<()> {
    check_time(t)?;
    if n == 0 {
        return Err(Error::domain("Heisenberg parameter n must be at least 1"));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("r must be nonnegative, got {r}")));
    }
    Ok(())
}

struct Layout {
    cutoff: f64,
    panels: usize,
}

fn layout(n: usize, t: f64, z: f64, quad: &QuadratureSpec) -> Layout {
    let cutoff = quad.cutoff.unwrap_or_else(|| envelope_cutoff(n, t));
    let panels = quad.panels.unwrap_or_else(|| {
        let smooth = (cutoff * 2.0 * t / 2.0).ceil() as usize;
        let osc = (cutoff * z.abs() / PI).ceil() as usize;
        (smooth + osc).max(8)
    });
    Layout { cutoff, panels }
}

/// Quadrature nodes in `lambda` resolving `cos(lambda z)` for `|z| <= z_max`.
pub(crate) fn lambda_nodes(n: usize, t: f64, z_max: f64, quad: &QuadratureSpec) -> Vec<(f64, f64)> {
    let lay = layout(n, t, z_max, quad);
    crate::quadrature::GaussLegendre::new(quad.nodes).composite(0.0, lay.cutoff, lay.panels)
}

/// `2 (2 pi)^{-(n+1)} (lambda / sinh 2 lambda t)^n exp(-(lambda r^2 / 2) coth 2 lambda t)`.
pub(crate) fn spectral_density(n: usize, t: f64, r: f64, lambda: f64) -> f64 {
    2.0 / (2.0 * PI).powi(n as i32 + 1) * pieces(n, t, r, lambda).0.exp()
}

/// Integrand pieces at `lambda`: `(ln base, lambda coth 2 lambda t, (lambda / sinh 2 lambda t)^2)`.
fn pieces(n: usize, t: f64, r: f64, lambda: f64) -> (f64, f64, f64) {
    let u = 2.0 * lambda * t;
    let ln_s = ln_u_over_sinh(u) - (2.0 * t).ln();
    let c = u_coth(u) / (2.0 * t);
    (n as f64 * ln_s - 0.5 * r * r * c, c, (2.0 * ln_s).exp())
}

pub fn heisenberg_kernel(
    n: usize,
    t: f64,
    r: f64,
    z: f64,
    quad: &QuadratureSpec,
) -> Result<KernelEvaluation> {
    check_inputs(n, t, r)?;
    let lay = layout(n, t, z, quad);
    let pref = 2.0 / (2.0 * PI).powi(n as i32 + 1);
    let (re, _, err, work) = two_level(0.0, lay.cutoff, quad.nodes, lay.panels, |lambda| {
        let (lb, _, _) = pieces(n, t, r, lambda);
        ((lambda * z).cos() * lb.exp(), 0.0)
    });
    let value = pref * re;
    let error_estimate = pref * err;
    if error_estimate > quad.tolerance * value.abs().max(1e-300) {
        return Err(Error::accuracy(
            "Heisenberg kernel quadrature",
            error_estimate / value.abs(),
            quad.tolerance,
        ));
    }
    Ok(KernelEvaluation {
        value,
        t,
        point: RadialPoint::new(r, z),
        method: Method::Integral,
        error_estimate,
        imaginary_residue: 0.0,
        work,
    })
}

/// The kernel with its first derivatives in `r`, `z` and `t`, each from the
/// differentiated integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeisenbergDerivatives {
    pub p: f64,
    pub p_r: f64,
    pub p_z: f64,
    pub p_t: f64,
}

pub fn heisenberg_kernel_derivatives(
    n: usize,
    t: f64,
    r: f64,
    z: f64,
    quad: &QuadratureSpec,
) -> Result<HeisenbergDerivatives> {
    check_inputs(n, t, r)?;
    let lay = layout(n, t, z, quad);
    let pref = 2.0 / (2.0 * PI).powi(n as i32 + 1);
    let gl = crate::quadrature::GaussLegendre::new(quad.nodes);
    let mut acc = [0.0f64; 4];
    for (lambda, w) in gl.composite(0.0, lay.cutoff, lay.panels) {
        let (lb, c, s2) = pieces(n, t, r, lambda);
        let base = w * lb.exp();
        let (sin, cos) = (lambda * z).sin_cos();
        acc[0] += cos * base;
        acc[1] += -r * c * cos * base;
        acc[2] += -lambda * sin * base;
        acc[3] += (-2.0 * n as f64 * c + r * r * s2) * cos * base;
    }
    Ok(HeisenbergDerivatives {
        p: pref * acc[0],
        p_r: pref * acc[1],
        p_z: pref * acc[2],
        p_t: pref * acc[3],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_in_z() {
        let q = QuadratureSpec::default();
        let a = heisenberg_kernel(1, 0.5, 0.4, 0.7, &q).unwrap().value;
        let b = heisenberg_kernel(1, 0.5, 0.4, -0.7, &q).unwrap().value;
        assert!((a - b).abs() < 1e-14 * a);
    }

    #[test]
    fn origin_value_closed_form() {
        // at r = z = 0: 2 (2 pi)^{-(n+1)} int_0^inf (lambda / sinh 2 lambda t)^n,
        // and int_0^inf u / sinh u du = pi^2 / 4 gives 1 / (32 t^2) for n = 1
        let q = QuadratureSpec::default();
        for &t in &[0.1, 0.25, 1.0] {
            let v = heisenberg_kernel(1, t, 0.0, 0.0, &q).unwrap().value;
            assert!((v - 1.0 / (32.0 * t * t)).abs() < 1e-12 * v, "t={t}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let q = QuadratureSpec::default();
        let (n, t, r, z) = (1, 0.4, 0.5, 0.3);
        let d = heisenberg_kernel_derivatives(n, t, r, z, &q).unwrap();
        let p = |t: f64, r: f64, z: f64| heisenberg_kernel(n, t, r, z, &q).unwrap().value;
        assert!((d.p - p(t, r, z)).abs() < 1e-13);
        let h = 1e-3;
        let fr = crate::fd::d1_o6(|x| p(t, x, z), r, h);
        let fz = crate::fd::d1_o6(|x| p(t, r, x), z, h);
        let ft = crate::fd::d1_o6(|x| p(x, r, z), t, h);
        assert!((d.p_r - fr).abs() < 1e-9 * d.p);
        assert!((d.p_z - fz).abs() < 1e-9 * d.p);
        assert!((d.p_t - ft).abs() < 1e-9 * d.p);
    }

    #[test]
    fn rejects_bad_time() {
        assert!(heisenberg_kernel(1, 0.0, 0.1, 0.0, &QuadratureSpec::default()).is_err());
        assert!(heisenberg_kernel(1, 0.5, -0.1, 0.0, &QuadratureSpec::default()).is_err());
    }
}
