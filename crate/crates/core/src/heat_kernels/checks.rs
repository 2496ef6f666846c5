//! Consistency checks on the kernels: the heat equation, conservation of
//! mass, the semigroup property and the Hopf/quaternionic relation.

use super::heisenberg::{lambda_nodes, spectral_density};
use super::hopf::hopf_fourier_modes;
use super::quaternionic::{quaternionic_modes, sum_modes};
use super::{
    check_time, heisenberg_kernel, hopf_kernel_series, quaternionic_kernel_series, sphere_kernel,
    QuadratureSpec, SeriesTruncation, SphereForm,
};
use crate::error::{Error, Result};
use crate::fd::{d1_o4, d1_o6};
use crate::model_spaces::{apply_radial, measure_density, radial_operator, ModelSpace, RadialPoint};
use crate::quadrature::GaussLegendre;
use crate::specfun::ln_gamma;
use rayon::prelude::*;
use serde::Serialize;
use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, PI};

/// `|dp/dt - L p|` at `(t, point)`, with `p(t, r, fiber)` supplied by the
/// caller and `L` the model's radial operator.
pub fn pde_residual(
    model: ModelSpace,
    p: &dyn Fn(f64, f64, f64) -> Result<f64>,
    t: f64,
    point: RadialPoint,
) -> Result<f64> {
    check_time(t)?;
    let failure = RefCell::new(None);
    let eval = |t: f64, r: f64, s: f64| match p(t, r, s) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let dt = d1_o4(|s| eval(s, point.r, point.fiber), t, 1e-3 * t);
    let lp = apply_radial(&radial_operator(model), |r, s| eval(t, r, s), point)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((dt - lp).abs())
}

/// Both sides of the relation between the quaternionic kernel at `(r, eta)`
/// and the `eta`-derivative of the Hopf kernel of `S^{4n+1}` at `(r, eta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationResidual {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub relative: f64,
}

/// `p_quat(r, eta) = -e^{4nt} / (2 pi sin(eta) cos(r)) d/deta p_hopf(r, eta)`,
/// the derivative taken by sixth-order central differences with step `1e-2`.
pub fn hopf_quaternionic_relation(n: usize, t: f64, r: f64, eta: f64) -> Result<RelationResidual> {
    let h = 1e-2;
    if !(eta > 3.0 * h && eta < PI - 3.0 * h) {
        return Err(Error::domain(format!("eta = {eta} too close to 0 or pi")));
    }
    if !(r > 0.0 && r < FRAC_PI_2) {
        return Err(Error::domain(format!("r = {r} outside (0, pi/2)")));
    }
    let trunc = SeriesTruncation::default();
    let lhs = quaternionic_kernel_series(n, t, r, eta, &trunc)?.value;
    let (modes, _) = hopf_fourier_modes(2 * n, t, r, &trunc)?;
    let hopf = |th: f64| -> f64 {
        modes
            .iter()
            .enumerate()
            .rev()
            .map(|(k, c)| c * (k as f64 * th).cos())
            .sum()
    };
    let d = d1_o6(hopf, eta, h);
    let rhs = -(4.0 * n as f64 * t).exp() / (2.0 * PI * eta.sin() * r.cos()) * d;
    let residual = (lhs - rhs).abs();
    Ok(RelationResidual {
        lhs,
        rhs,
        residual,
        relative: residual / lhs.abs(),
    })
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("model parameter n must be at least 1"));
    }
    Ok(())
}

/// `int p_t dmu` over the Hopf base chart: Gauss-Legendre in `r`, and the
/// trapezoid rule in `theta`, which is exact on the truncated Fourier series.
pub fn hopf_mass(n: usize, t: f64) -> Result<f64> {
    check_n(n)?;
    check_time(t)?;
    let model = ModelSpace::hopf(n)?;
    let gl = GaussLegendre::new(20);
    let nodes = gl.composite(0.0, FRAC_PI_2, 16);
    let trunc = SeriesTruncation::default();
    let parts: Result<Vec<f64>> = nodes
        .par_iter()
        .map(|&(r, w)| {
            let (modes, _) = hopf_fourier_modes(n, t, r, &trunc)?;
            let nt = 2 * modes.len() + 8;
            let h = 2.0 * PI / nt as f64;
            let ring: f64 = (0..nt)
                .map(|j| {
                    let th = -PI + j as f64 * h;
                    modes
                        .iter()
                        .enumerate()
                        .map(|(k, c)| c * (k as f64 * th).cos())
                        .sum::<f64>()
                })
                .sum();
            Ok(w * h * ring * measure_density(model, RadialPoint::new(r, 0.0)))
        })
        .collect();
    Ok(parts?.iter().sum())
}

/// `int p_t dmu` over `[0, pi/2] x [0, pi]` by Gauss-Legendre in both
/// coordinates.
pub fn quaternionic_mass(n: usize, t: f64) -> Result<f64> {
    check_n(n)?;
    check_time(t)?;
    let model = ModelSpace::quaternionic(n)?;
    let gl = GaussLegendre::new(20);
    let r_nodes = gl.composite(0.0, FRAC_PI_2, 16);
    let eta_nodes = gl.composite(0.0, PI, 16);
    let trunc = SeriesTruncation::default();
    let parts: Result<Vec<f64>> = r_nodes
        .par_iter()
        .map(|&(r, wr)| {
            let (modes, _, _) = quaternionic_modes(n, t, r, &trunc)?;
            let ring: f64 = eta_nodes
                .iter()
                .map(|&(eta, we)| {
                    we * sum_modes(&modes, eta) * measure_density(model, RadialPoint::new(r, eta))
                })
                .sum();
            Ok(wr * ring)
        })
        .collect();
    Ok(parts?.iter().sum())
}

/// `int p_t dmu` over `r >= 0`, `z` real.
///
/// The `r` range uses `p(r, z) <= p(0, 0) e^{-r^2/4t}`; the `z` range is
/// doubled until the kernel is below `1e-13 p(0, 0)` on a few radii. All
/// kernel values share one `lambda` grid, so the cosines are tabulated once.
pub fn heisenberg_mass(n: usize, t: f64) -> Result<f64> {
    check_n(n)?;
    check_time(t)?;
    let model = ModelSpace::heisenberg(n)?;
    let quad = QuadratureSpec {
        tolerance: f64::INFINITY,
        ..QuadratureSpec::default()
    };
    let p = |r: f64, z: f64| heisenberg_kernel(n, t, r, z, &quad).map(|e| e.value);
    let peak = p(0.0, 0.0)?;
    let r_max = (4.0 * t * 40.0).sqrt();
    let mut z_max = t;
    loop {
        let mut small = true;
        for j in 0..8 {
            if p(r_max * j as f64 / 8.0, z_max)?.abs() > 1e-13 * peak {
                small = false;
            }
        }
        if small {
            break;
        }
        z_max *= 2.0;
        if z_max > 1e4 {
            return Err(Error::accuracy("Heisenberg kernel decay in z", z_max, 1e4));
        }
    }
    let gl = GaussLegendre::new(20);
    let r_nodes = gl.composite(0.0, r_max, 8);
    let z_panels = ((z_max / (2.0 * t.sqrt())).ceil() as usize).max(8);
    let z_nodes = gl.composite(0.0, z_max, z_panels);
    let lambdas = lambda_nodes(n, t, z_max, &quad);
    let cosines: Vec<f64> = lambdas
        .iter()
        .map(|&(l, w)| w * z_nodes.iter().map(|&(z, wz)| wz * (l * z).cos()).sum::<f64>())
        .collect();
    let total: f64 = r_nodes
        .par_iter()
        .map(|&(r, wr)| {
            let line: f64 = lambdas
                .iter()
                .zip(&cosines)
                .map(|(&(l, _), c)| c * spectral_density(n, t, r, l))
                .sum();
            2.0 * wr * line * measure_density(model, RadialPoint::new(r, 0.0))
        })
        .sum();
    Ok(total)
}

/// `int q_t dmu` over the round sphere `S^{2n+1}`.
pub fn sphere_mass(n: usize, t: f64) -> Result<f64> {
    check_n(n)?;
    check_time(t)?;
    let nf = n as f64;
    let area = 2.0 * PI.powf(nf + 0.5) / ln_gamma(nf + 0.5).exp();
    let gl = GaussLegendre::new(20);
    let mut total = 0.0;
    for (d, w) in gl.composite(0.0, PI, 32) {
        total += w * sphere_kernel(n, t, d.cos(), SphereForm::Gegenbauer)? * d.sin().powi(2 * n as i32);
    }
    Ok(area * total)
}

/// `(int p_t p_s dmu, p_{t+s}(0, 0))` for the Hopf kernel; the two agree by
/// the semigroup property and the symmetry of the kernel.
pub fn hopf_chapman_kolmogorov(n: usize, t: f64, s: f64) -> Result<(f64, f64)> {
    check_n(n)?;
    check_time(t)?;
    check_time(s)?;
    let model = ModelSpace::hopf(n)?;
    let gl = GaussLegendre::new(20);
    let nodes = gl.composite(0.0, FRAC_PI_2, 16);
    let trunc = SeriesTruncation::default();
    let parts: Result<Vec<f64>> = nodes
        .par_iter()
        .map(|&(r, w)| {
            let (a, _) = hopf_fourier_modes(n, t, r, &trunc)?;
            let (b, _) = hopf_fourier_modes(n, s, r, &trunc)?;
            let nt = 2 * (a.len() + b.len()) + 8;
            let h = 2.0 * PI / nt as f64;
            let eval = |c: &[f64], th: f64| -> f64 {
                c.iter().enumerate().map(|(k, c)| c * (k as f64 * th).cos()).sum()
            };
            let ring: f64 = (0..nt)
                .map(|j| {
                    let th = -PI + j as f64 * h;
                    eval(&a, th) * eval(&b, th)
                })
                .sum();
            Ok(w * h * ring * measure_density(model, RadialPoint::new(r, 0.0)))
        })
        .collect();
    let composed = parts?.iter().sum();
    let direct = hopf_kernel_series(n, t + s, 0.0, 0.0, &trunc)?.value;
    Ok((composed, direct))
}
