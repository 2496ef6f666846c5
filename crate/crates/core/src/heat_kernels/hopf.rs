//! Horizontal heat kernel of the Hopf fibration `S^{2n+1} -> CP^n` in the
//! radial chart `(r, theta)`.

use super::series::{ln_binom, ln_jacobi_sup, plan, tail_bound};
use super::sphere::ln_sphere_kernel_pos;
use super::{check_time, two_level, KernelEvaluation, Method, QuadratureSpec, SeriesTruncation};
use crate::error::{Error, Result};
use crate::model_spaces::RadialPoint;
use crate::specfun::{jacobi_all, ln_gamma};
use std::f64::consts::{FRAC_PI_2, PI};

/// Exponent `4 m (m + k + n) + 2 k n` of the `(m, k)` term.
pub(crate) fn hopf_rate(n: usize, m: usize, k: usize) -> u64 {
    (4 * m * (m + k + n) + 2 * k * n) as u64
}

fn ln_prefactor(n: usize) -> f64 {
    ln_gamma(n as f64) - 2f64.ln() - (n as f64 + 1.0) * PI.ln()
}

/// `ln` of `(2m+k+n) binom(m+k+n-1, n-1)`.
fn ln_weight(n: usize, m: usize, k: usize) -> f64 {
    let (nf, mf, kf) = (n as f64, m as f64, k as f64);
    (2.0 * mf + kf + nf).ln() + ln_binom(mf + kf + nf - 1.0, nf - 1.0)
}

fn check_radius(r: f64) -> Result<()> {
    if !(r >= 0.0 && r < FRAC_PI_2) {
        return Err(Error::domain(format!("r = {r} outside [0, pi/2)")));
    }
    Ok(())
}

struct Truncated {
    max_m: usize,
    max_k: usize,
    tail: f64,
}

fn truncate(n: usize, t: f64, r: f64, trunc: &SeriesTruncation) -> Result<Truncated> {
    let ln_cos = r.cos().ln();
    let lb = |m: usize, k: usize| {
        let sym = if k > 0 { 2f64.ln() } else { 0.0 };
        ln_prefactor(n) + sym + ln_weight(n, m, k) - hopf_rate(n, m, k) as f64 * t
            + ln_jacobi_sup(m, n as f64 - 1.0, k as f64)
            + k as f64 * ln_cos
    };
    let (max_m, max_k, tail) = if trunc.is_auto() {
        let p = plan(&lb, trunc.tail_tolerance);
        (p.max_m, p.max_k, p.tail)
    } else {
        let tail = tail_bound(&lb, trunc.max_m, trunc.max_k, trunc.tail_tolerance);
        (trunc.max_m, trunc.max_k, tail)
    };
    if tail > trunc.tail_tolerance {
        return Err(Error::accuracy(
            "Hopf series tail (increase max_m / max_k)",
            tail,
            trunc.tail_tolerance,
        ));
    }
    Ok(Truncated { max_m, max_k, tail })
}

/// Coefficients `c_k` with `p(r, theta) = sum_k c_k cos(k theta)`, and the
/// tail bound of the truncation.
pub fn hopf_fourier_modes(
    n: usize,
    t: f64,
    r: f64,
    trunc: &SeriesTruncation,
) -> Result<(Vec<f64>, f64)> {
    check_time(t)?;
    check_radius(r)?;
    if n == 0 {
        return Err(Error::domain("Hopf parameter n must be at least 1"));
    }
    let tr = truncate(n, t, r, trunc)?;
    let x = (2.0 * r).cos();
    let cos_r = r.cos();
    let pref = ln_prefactor(n).exp();
    let mut modes = Vec::with_capacity(tr.max_k + 1);
    for k in 0..=tr.max_k {
        let p = jacobi_all(n as f64 - 1.0, k as f64, tr.max_m, x);
        let mut s = 0.0;
        for m in (0..=tr.max_m).rev() {
            let w = (ln_weight(n, m, k) - hopf_rate(n, m, k) as f64 * t).exp();
            s += w * p[m];
        }
        let sym = if k > 0 { 2.0 } else { 1.0 };
        modes.push(pref * sym * cos_r.powi(k as i32) * s);
    }
    Ok((modes, tr.tail))
}

/// Index pairs `(m, k)` and exponents summed by the series for this truncation.
pub fn hopf_series_terms(n: usize, max_m: usize, max_k: usize) -> Vec<(usize, usize, u64)> {
    let mut out = Vec::new();
    for k in 0..=max_k {
        for m in 0..=max_m {
            out.push((m, k, hopf_rate(n, m, k)));
        }
    }
    out
}

pub fn hopf_kernel_series(
    n: usize,
    t: f64,
    r: f64,
    theta: f64,
    trunc: &SeriesTruncation,
) -> Result<KernelEvaluation> {
    if !(theta.abs() <= PI) {
        return Err(Error::domain(format!("theta = {theta} outside [-pi, pi]")));
    }
    let (modes, tail) = hopf_fourier_modes(n, t, r, trunc)?;
    let value = modes
        .iter()
        .enumerate()
        .rev()
        .map(|(k, c)| c * (k as f64 * theta).cos())
        .sum();
    Ok(KernelEvaluation {
        value,
        t,
        point: RadialPoint::new(r, theta),
        method: Method::Series,
        error_estimate: tail,
        imaginary_residue: 0.0,
        work: modes.len(),
    })
}

/// Finds `Y` such that `ln|integrand|` stays below its maximum minus 40 on
/// `[Y, inf)`, scanning outward from zero.
pub(crate) fn log_cutoff(log_f: &dyn Fn(f64) -> Result<f64>, step: f64) -> Result<(f64, f64)> {
    let mut best = log_f(0.0)?;
    let mut prev = best;
    let mut y = 0.0;
    loop {
        y += step;
        let v = log_f(y)?;
        best = best.max(v);
        if v < best - 40.0 && v < prev {
            return Ok((y, best));
        }
        prev = v;
        if y > 700.0 {
            return Err(Error::accuracy("integrand does not decay before y = 700", y, 700.0));
        }
    }
}

/// `(4 pi t)^{-1/2} int exp(-(y + i theta)^2 / 4t) q_t(cos r cosh y) dy` with
/// the sphere kernel of `S^{2n+1}` continued to arguments above one.
pub fn hopf_kernel_integral(
    n: usize,
    t: f64,
    r: f64,
    theta: f64,
    quad: &QuadratureSpec,
) -> Result<KernelEvaluation> {
    check_time(t)?;
    check_radius(r)?;
    if !(theta.abs() <= PI) {
        return Err(Error::domain(format!("theta = {theta} outside [-pi, pi]")));
    }
    let cos_r = r.cos();
    let log_f = |y: f64| -> Result<f64> {
        Ok(-(y * y - theta * theta) / (4.0 * t) + ln_sphere_kernel_pos(n, t, cos_r * y.cosh())?)
    };
    let step = (t.sqrt() / 4.0).min(0.05);
    let (cutoff, peak) = match quad.cutoff {
        Some(c) => (c, log_f(0.0)?),
        None => log_cutoff(&log_f, step)?,
    };
    let freq = theta.abs() / (2.0 * t);
    let scale = t.sqrt().min(if freq > 0.0 { PI / freq } else { f64::INFINITY });
    let panels = quad
        .panels
        .unwrap_or_else(|| ((2.0 * cutoff / scale).ceil() as usize).max(8));
    let norm = 1.0 / (4.0 * PI * t).sqrt();
    let mut failure = None;
    let (re, im, err, work) = two_level(-cutoff, cutoff, quad.nodes, panels, |y| {
        match log_f(y) {
            Ok(l) => {
                let mag = l.exp();
                let phase = y * theta / (2.0 * t);
                (mag * phase.cos(), -mag * phase.sin())
            }
            Err(e) => {
                failure.get_or_insert(e);
                (f64::NAN, f64::NAN)
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let value = norm * re;
    let error_estimate = norm * (err + 2.0 * cutoff * (peak - 40.0).exp());
    if !(error_estimate <= quad.tolerance * value.abs()) {
        return Err(Error::accuracy(
            "Hopf integral quadrature",
            error_estimate / value.abs(),
            quad.tolerance,
        ));
    }
    Ok(KernelEvaluation {
        value,
        t,
        point: RadialPoint::new(r, theta),
        method: Method::Integral,
        error_estimate,
        imaginary_residue: norm * im.abs(),
        work,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_time_limit() {
        let v = hopf_kernel_series(1, 50.0, 0.3, 0.2, &SeriesTruncation::default()).unwrap();
        assert!((v.value - 1.0 / (2.0 * PI * PI)).abs() < 1e-10);
    }

    #[test]
    fn series_and_integral_agree() {
        let s = hopf_kernel_series(1, 0.5, 0.7, 0.4, &SeriesTruncation::default()).unwrap();
        let i = hopf_kernel_integral(1, 0.5, 0.7, 0.4, &QuadratureSpec::default()).unwrap();
        assert!((s.value - i.value).abs() < 1e-8 * s.value, "{} {}", s.value, i.value);
        assert!(i.imaginary_residue < 1e-12 * i.value.abs());
        let s = hopf_kernel_series(2, 1.0, 0.5, 1.0, &SeriesTruncation::default()).unwrap();
        let i = hopf_kernel_integral(2, 1.0, 0.5, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((s.value - i.value).abs() < 1e-6 * s.value);
    }

    #[test]
    fn integral_is_even_in_theta() {
        let q = QuadratureSpec::default();
        let a = hopf_kernel_integral(1, 0.6, 0.4, 0.9, &q).unwrap().value;
        let b = hopf_kernel_integral(1, 0.6, 0.4, -0.9, &q).unwrap().value;
        assert!((a - b).abs() <= 1e-15 * a.abs());
    }

    #[test]
    fn explicit_truncation_reports_tail() {
        let tight = SeriesTruncation {
            max_m: 1,
            max_k: 1,
            tail_tolerance: 1e-12,
        };
        assert!(matches!(
            hopf_kernel_series(1, 0.2, 0.3, 0.1, &tight),
            Err(Error::Accuracy { .. })
        ));
    }
}
