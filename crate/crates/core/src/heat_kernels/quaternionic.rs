//! Horizontal heat kernel of the quaternionic Hopf fibration
//! `S^{4n+3} -> HP^n` in the radial chart `(r, eta)`.

use super::hopf::log_cutoff;
use super::series::{ln_binom, ln_jacobi_sup, plan, tail_bound};
use super::sphere::ln_sphere_kernel_pos;
use super::{check_time, two_level, KernelEvaluation, Method, QuadratureSpec, SeriesTruncation};
use crate::error::{Error, Result};
use crate::model_spaces::RadialPoint;
use crate::specfun::{jacobi_all, ln_gamma};
use std::f64::consts::{FRAC_PI_2, PI};

/// Exponent `4 k (k + 2n + m + 1) + 4 n m` for Jacobi degree `k` and fiber
/// degree `m`.
pub(crate) fn quaternionic_rate(n: usize, k: usize, m: usize) -> u64 {
    (4 * k * (k + 2 * n + m + 1) + 4 * n * m) as u64
}

fn ln_coefficient(n: usize, k: usize, m: usize) -> f64 {
    let (nf, kf, mf) = (n as f64, k as f64, m as f64);
    ln_gamma(2.0 * nf) - 2f64.ln() - (2.0 * nf + 2.0) * PI.ln()
        + (2.0 * kf + mf + 2.0 * nf + 1.0).ln()
        + (mf + 1.0).ln()
        + ln_binom(kf + mf + 2.0 * nf, 2.0 * nf - 1.0)
}

/// `alpha_{k,m} = Gamma(2n) / (2 pi^{2n+2}) (2k+m+2n+1)(m+1) binom(k+m+2n, 2n-1)`.
pub fn quaternionic_coefficient(n: usize, k: usize, m: usize) -> f64 {
    ln_coefficient(n, k, m).exp()
}

/// Triples `(k, m, rate)` summed by the series for this truncation, where
/// `max_m` bounds the fiber degree and `max_k` the Jacobi degree.
pub fn quaternionic_series_terms(n: usize, max_m: usize, max_k: usize) -> Vec<(usize, usize, u64)> {
    let mut out = Vec::new();
    for m in 0..=max_m {
        for k in 0..=max_k {
            out.push((k, m, quaternionic_rate(n, k, m)));
        }
    }
    out
}

/// `sin((m+1) eta) / sin(eta)` for `m <= max_m` by the Chebyshev recurrence.
fn chebyshev_u(max_m: usize, c: f64) -> Vec<f64> {
    let mut u = Vec::with_capacity(max_m + 1);
    u.push(1.0);
    if max_m >= 1 {
        u.push(2.0 * c);
    }
    for m in 2..=max_m {
        let next = 2.0 * c * u[m - 1] - u[m - 2];
        u.push(next);
    }
    u
}

fn check_chart(n: usize, t: f64, r: f64) -> Result<()> {
    check_time(t)?;
    if n == 0 {
        return Err(Error::domain("quaternionic parameter n must be at least 1"));
    }
    if !(r >= 0.0 && r < FRAC_PI_2) {
        return Err(Error::domain(format!("r = {r} outside [0, pi/2)")));
    }
    Ok(())
}

/// Coefficients `a_m` with `p(r, eta) = sum_m a_m sin((m+1) eta) / sin(eta)`,
/// the tail bound, and the number of terms summed.
pub(crate) fn quaternionic_modes(
    n: usize,
    t: f64,
    r: f64,
    trunc: &SeriesTruncation,
) -> Result<(Vec<f64>, f64, usize)> {
    check_chart(n, t, r)?;
    let ln_cos = r.cos().ln();
    // first index: Jacobi degree k, second: fiber degree m
    let lb = |k: usize, m: usize| {
        ln_coefficient(n, k, m) - quaternionic_rate(n, k, m) as f64 * t
            + (m as f64 + 1.0).ln()
            + m as f64 * ln_cos
            + ln_jacobi_sup(k, 2.0 * n as f64 - 1.0, m as f64 + 1.0)
    };
    let (max_k, max_m, tail) = if trunc.is_auto() {
        let p = plan(&lb, trunc.tail_tolerance);
        (p.max_m, p.max_k, p.tail)
    } else {
        let tail = tail_bound(&lb, trunc.max_k, trunc.max_m, trunc.tail_tolerance);
        (trunc.max_k, trunc.max_m, tail)
    };
    if tail > trunc.tail_tolerance {
        return Err(Error::accuracy(
            "quaternionic series tail (increase max_m / max_k)",
            tail,
            trunc.tail_tolerance,
        ));
    }
    let x = (2.0 * r).cos();
    let cos_r = r.cos();
    let modes = (0..=max_m)
        .map(|m| {
            let p = jacobi_all(2.0 * n as f64 - 1.0, m as f64 + 1.0, max_k, x);
            let s: f64 = (0..=max_k)
                .rev()
                .map(|k| (ln_coefficient(n, k, m) - quaternionic_rate(n, k, m) as f64 * t).exp() * p[k])
                .sum();
            s * cos_r.powi(m as i32)
        })
        .collect();
    Ok((modes, tail, (max_m + 1) * (max_k + 1)))
}

/// `sum_m a_m sin((m+1) eta) / sin(eta)` by the Chebyshev recurrence.
pub(crate) fn sum_modes(modes: &[f64], eta: f64) -> f64 {
    let u = chebyshev_u(modes.len().saturating_sub(1), eta.cos());
    modes.iter().zip(&u).rev().map(|(a, u)| a * u).sum()
}

pub fn quaternionic_kernel_series(
    n: usize,
    t: f64,
    r: f64,
    eta: f64,
    trunc: &SeriesTruncation,
) -> Result<KernelEvaluation> {
    if !(0.0..=PI).contains(&eta) {
        return Err(Error::domain(format!("eta = {eta} outside [0, pi]")));
    }
    let (modes, tail, work) = quaternionic_modes(n, t, r, trunc)?;
    Ok(KernelEvaluation {
        value: sum_modes(&modes, eta),
        t,
        point: RadialPoint::new(r, eta),
        method: Method::Series,
        error_estimate: tail,
        imaginary_residue: 0.0,
        work,
    })
}

/// `sin(c eta) / sin(eta)`, with its expansion near `eta = 0`.
fn sin_ratio(c: f64, eta: f64) -> f64 {
    if eta.abs() < 1e-6 {
        let e2 = eta * eta;
        c * (1.0 - (c * c - 1.0) * e2 / 6.0)
    } else {
        (c * eta).sin() / eta.sin()
    }
}

/// The integral representation evaluated at any `eta` with `sin(eta) != 0`
/// or `eta` near zero.
pub(crate) fn quaternionic_integral_raw(
    n: usize,
    t: f64,
    r: f64,
    eta: f64,
    quad: &QuadratureSpec,
) -> Result<KernelEvaluation> {
    check_chart(n, t, r)?;
    let sphere_n = 2 * n + 1;
    let cos_r = r.cos();
    let log_env = |y: f64| -> Result<f64> {
        Ok(y.sinh().ln() + (eta * eta - y * y) / (4.0 * t)
            + ln_sphere_kernel_pos(sphere_n, t, cos_r * y.cosh())?)
    };
    let step = (t.sqrt() / 4.0).min(0.05);
    let (cutoff, peak) = match quad.cutoff {
        Some(c) => (c, log_env(c.min(1.0))?),
        None => log_cutoff(&log_env, step)?,
    };
    let freq = eta.abs() / (2.0 * t);
    let scale = t.sqrt().min(if freq > 0.0 { PI / freq } else { f64::INFINITY });
    let panels = quad
        .panels
        .unwrap_or_else(|| ((cutoff / scale).ceil() as usize).max(8));
    let mut failure = None;
    let (re, _, err, work) = two_level(0.0, cutoff, quad.nodes, panels, |y| {
        if y == 0.0 {
            return (0.0, 0.0);
        }
        match log_env(y) {
            Ok(l) => (l.exp() * sin_ratio(y / (2.0 * t), eta), 0.0),
            Err(e) => {
                failure.get_or_insert(e);
                (f64::NAN, 0.0)
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let norm = (-t).exp() / (PI * t).sqrt();
    let value = norm * re;
    let error_estimate = norm * (err + cutoff * (peak - 40.0).exp() * cutoff / (2.0 * t));
    if !(error_estimate <= quad.tolerance * value.abs()) {
        return Err(Error::accuracy(
            "quaternionic integral quadrature",
            error_estimate / value.abs(),
            quad.tolerance,
        ));
    }
    Ok(KernelEvaluation {
        value,
        t,
        point: RadialPoint::new(r, eta),
        method: Method::Integral,
        error_estimate,
        imaginary_residue: 0.0,
        work,
    })
}

/// `e^{-t} (pi t)^{-1/2} int_0^inf sinh y sin(eta y / 2t) / sin(eta)
/// e^{-(y^2 - eta^2)/4t} q_t(cos r cosh y) dy` with `q_t` the heat kernel of
/// `S^{4n+3}`.
pub fn quaternionic_kernel_integral(
    n: usize,
    t: f64,
    r: f64,
    eta: f64,
    quad: &QuadratureSpec,
) -> Result<KernelEvaluation> {
    if !(0.0..PI).contains(&eta) {
        return Err(Error::domain(format!("eta = {eta} outside [0, pi)")));
    }
    quaternionic_integral_raw(n, t, r, eta, quad)
}
