//! Riemannian heat kernel of `S^{2n+1}` as a function of `cos(delta)`.

use super::check_time;
use super::series::ln_binom;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::specfun::{gegenbauer_all, ln_gamma, theta_v_jet, ThetaArgs};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereForm {
    /// Gegenbauer expansion in `cos(delta)`.
    Gegenbauer,
    /// `e^{n^2 t} (-(2 pi sin delta)^{-1} d/ddelta)^n` applied to the theta function.
    Theta,
}

const MAX_TERMS: usize = 200_000;

fn ln_prefactor(n: usize) -> f64 {
    ln_gamma(n as f64) - (2.0f64).ln() - (n as f64 + 1.0) * PI.ln()
}

/// Number of Gegenbauer terms after which every dropped term is below
/// `1e-18` of the leading one.
fn gegenbauer_terms(n: usize, t: f64) -> Result<usize> {
    let nf = n as f64;
    let lb = |m: usize| {
        let mf = m as f64;
        (mf + nf).ln() - mf * (mf + 2.0 * nf) * t + ln_binom(mf + 2.0 * nf - 1.0, mf)
    };
    let top = (0..64).map(lb).fold(f64::NEG_INFINITY, f64::max);
    let mut m = 1;
    while !(lb(m) < top - 18.0 * std::f64::consts::LN_10 && lb(m + 1) < lb(m)) {
        m += 1;
        if m > MAX_TERMS {
            return Err(Error::accuracy("sphere kernel series length", m as f64, MAX_TERMS as f64));
        }
    }
    Ok(m)
}

/// `q_t(cos delta)` on `S^{2n+1}`.
pub fn sphere_kernel(n: usize, t: f64, cos_delta: f64, form: SphereForm) -> Result<f64> {
    check_time(t)?;
    if n == 0 {
        return Err(Error::domain("sphere parameter n must be at least 1"));
    }
    if !(cos_delta.abs() <= 1.0) {
        return Err(Error::domain(format!("cos(delta) = {cos_delta} outside [-1, 1]")));
    }
    match form {
        SphereForm::Gegenbauer => {
            let m_max = gegenbauer_terms(n, t)?;
            let c = gegenbauer_all(n as f64, m_max, cos_delta);
            let nf = n as f64;
            let mut sum = 0.0;
            for m in (0..=m_max).rev() {
                let mf = m as f64;
                sum += (mf + nf) * (-mf * (mf + 2.0 * nf) * t).exp() * c[m];
            }
            Ok(ln_prefactor(n).exp() * sum)
        }
        SphereForm::Theta => {
            let delta = cos_delta.acos();
            let eps = crate::model_spaces::CHART_EPSILON;
            if !(delta >= eps && delta <= PI - eps) {
                return Err(Error::domain(format!(
                    "theta form needs delta in [{eps}, pi - {eps}], got {delta}"
                )));
            }
            let args = ThetaArgs::auto(t, delta)?;
            let mut g = theta_v_jet(args, n)?;
            let (s, _) = Jet::variable(delta, n).sin_cos();
            let inv = s.recip().scale(-1.0 / (2.0 * PI));
            for _ in 0..n {
                let d = g.differentiate();
                let order = d.order();
                g = &d * &inv.truncate(order);
            }
            Ok(((n * n) as f64 * t).exp() * g.value())
        }
    }
}

/// `ln q_t(cosh a)` for `a >= 0`, continuing the Gegenbauer series past
/// `cos(delta) = 1` with scaled polynomials `C_m(cosh a) e^{-m a}`.
pub fn ln_sphere_kernel_cosh(n: usize, t: f64, a: f64) -> Result<f64> {
    check_time(t)?;
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("continuation parameter must be >= 0, got {a}")));
    }
    let nf = n as f64;
    let q = (-2.0 * a).exp();
    let half_sum = 0.5 * (1.0 + q);
    // exponent of term m: -m(m+2n)t + m a + ln((m+n) c_m)
    let mut logs: Vec<f64> = Vec::new();
    let (mut c_prev, mut c_cur) = (0.0f64, 1.0f64);
    let mut best = f64::NEG_INFINITY;
    let peak = (a / (2.0 * t)).ceil() as usize;
    for m in 0..MAX_TERMS {
        let mf = m as f64;
        if m == 1 {
            c_prev = c_cur;
            c_cur = 2.0 * nf * half_sum;
        } else if m > 1 {
            let k = mf - 1.0;
            let next =
                (2.0 * (k + nf) * half_sum * c_cur - (k + 2.0 * nf - 1.0) * q * c_prev) / (k + 1.0);
            c_prev = c_cur;
            c_cur = next;
        }
        let e = -mf * (mf + 2.0 * nf) * t + mf * a + ((mf + nf) * c_cur).ln();
        best = best.max(e);
        logs.push(e);
        if m > peak + 2 && e < best - 45.0 {
            let s: f64 = logs.iter().rev().map(|&v| (v - best).exp()).sum();
            return Ok(ln_prefactor(n) + best + s.ln());
        }
    }
    Err(Error::accuracy(
        "continued sphere kernel series length",
        MAX_TERMS as f64,
        MAX_TERMS as f64,
    ))
}

/// `ln q_t(x)` for `x > 0`: the plain series below one, the continuation above.
pub(crate) fn ln_sphere_kernel_pos(n: usize, t: f64, x: f64) -> Result<f64> {
    if x <= 1.0 {
        let v = sphere_kernel(n, t, x, SphereForm::Gegenbauer)?;
        if !(v > 0.0) {
            return Err(Error::accuracy("sphere kernel positivity", v, 0.0));
        }
        Ok(v.ln())
    } else {
        ln_sphere_kernel_cosh(n, t, x.acosh())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;

    #[test]
    fn gegenbauer_and_theta_forms_agree() {
        for n in 1..=3 {
            for &(t, d) in &[(0.4, 1.0), (0.1, 0.5), (1.3, 2.5), (0.05, 0.3)] {
                let g = sphere_kernel(n, t, f64::cos(d), SphereForm::Gegenbauer).unwrap();
                let th = sphere_kernel(n, t, f64::cos(d), SphereForm::Theta).unwrap();
                assert!((g - th).abs() < 1e-9 * g.abs(), "n={n} t={t} d={d}: {g} {th}");
            }
        }
    }

    #[test]
    fn long_time_limit() {
        let v = sphere_kernel(1, 40.0, f64::cos(2.0), SphereForm::Gegenbauer).unwrap();
        assert!((v - 1.0 / (2.0 * PI * PI)).abs() < 1e-10);
    }

    #[test]
    fn unit_mass_on_s3() {
        // mu(S^{2n}) int_0^pi q sin^{2n} = 1 with mu(S^2) = 4 pi
        let gl = GaussLegendre::new(40);
        let m = gl.integrate_panels(0.0, PI, 8, |d| {
            sphere_kernel(1, 0.5, d.cos(), SphereForm::Gegenbauer).unwrap() * d.sin().powi(2)
        });
        assert!((4.0 * PI * m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn continuation_matches_series_at_one() {
        for n in 1..=3 {
            let a = ln_sphere_kernel_cosh(n, 0.3, 0.0).unwrap();
            let b = sphere_kernel(n, 0.3, 1.0, SphereForm::Gegenbauer).unwrap().ln();
            assert!((a - b).abs() < 1e-13);
        }
        // continuity across x = 1
        let below = ln_sphere_kernel_pos(2, 0.5, 1.0 - 1e-9).unwrap();
        let above = ln_sphere_kernel_pos(2, 0.5, 1.0 + 1e-9).unwrap();
        assert!((below - above).abs() < 1e-7);
    }

    #[test]
    fn domain_errors() {
        assert!(sphere_kernel(1, 0.0, 0.5, SphereForm::Gegenbauer).is_err());
        assert!(sphere_kernel(1, 0.5, 1.5, SphereForm::Gegenbauer).is_err());
        assert!(sphere_kernel(1, 0.5, 1.0, SphereForm::Theta).is_err());
    }
}
