//! Heat semigroup of the radial Laplacian `d^2/deta^2 + 2 coth(eta) d/deta`
//! shifted by `-1`, acting on radial functions.

use super::check_time;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use std::f64::consts::{LN_2, PI};

fn ln_sinh(x: f64) -> f64 {
    if x < 20.0 {
        x.sinh().ln()
    } else {
        x - LN_2 + (-(-2.0 * x).exp()).ln_1p()
    }
}

/// `ln` of the kernel `sinh r sinh(eta r / 2t) / sinh(eta) e^{-(r^2 + eta^2)/4t}`.
fn ln_kernel(t: f64, eta: f64, r: f64) -> f64 {
    ln_sinh(r) + ln_sinh(eta * r / (2.0 * t)) - ln_sinh(eta) - (r * r + eta * eta) / (4.0 * t)
}

fn integrate(f: &dyn Fn(f64) -> f64, t: f64, eta: f64, cutoff: f64) -> f64 {
    let gl = GaussLegendre::new(20);
    let panels = ((cutoff / (0.5 * t.sqrt())).ceil() as usize).max(8);
    gl.composite(0.0, cutoff, panels)
        .into_iter()
        .filter(|&(r, _)| r > 0.0)
        .map(|(r, w)| w * ln_kernel(t, eta, r).exp() * f(r))
        .sum()
}

/// `(e^{-t} / sqrt(pi t)) int_0^inf sinh r sinh(eta r / 2t) / sinh(eta)
/// e^{-(r^2 + eta^2)/4t} f(r) dr`.
///
/// The integral is truncated where the kernel has dropped 40 e-folds below
/// its peak at `r = eta + 2t`, then recomputed on a cutoff half again as
/// long; disagreement means `f` grows too fast for the kernel.
pub fn sl2_heat_apply(f: &dyn Fn(f64) -> f64, t: f64, eta: f64) -> Result<f64> {
    check_time(t)?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::domain(format!("eta must be positive, got {eta}")));
    }
    // the log-kernel is concave past its peak near eta + 2t with curvature ~ -1/2t
    let cutoff = eta + 2.0 * t + (4.0 * t * 40.0).sqrt() + 4.0 * t.sqrt();
    let norm = (-t).exp() / (PI * t).sqrt();
    let a = norm * integrate(f, t, eta, cutoff);
    let b = norm * integrate(f, t, eta, 1.5 * cutoff);
    let diff = (a - b).abs();
    if !(diff <= 1e-12 * b.abs().max(1e-300)) {
        return Err(Error::accuracy(
            "SL(2) semigroup integral does not settle as the cutoff grows",
            diff / b.abs(),
            1e-12,
        ));
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_fixed() {
        for &(t, eta) in &[(0.3, 0.5), (1.0, 2.0), (0.05, 0.01)] {
            let v = sl2_heat_apply(&|_| 1.0, t, eta).unwrap();
            assert!((v - 1.0).abs() < 1e-10, "{t} {eta} {v}");
        }
    }

    #[test]
    fn semigroup_property() {
        let f = |r: f64| (-r * r).exp();
        let (t, eta) = (0.4, 0.7);
        let once = sl2_heat_apply(&f, t, eta).unwrap();
        let half = |x: f64| sl2_heat_apply(&f, t / 2.0, x).unwrap();
        let twice = sl2_heat_apply(&half, t / 2.0, eta).unwrap();
        assert!((once - twice).abs() < 1e-7, "{once} {twice}");
    }

    #[test]
    fn small_eta_limit() {
        let f = |r: f64| (-r * r).exp();
        let a = sl2_heat_apply(&f, 0.5, 1e-4).unwrap();
        let b = sl2_heat_apply(&f, 0.5, 1e-5).unwrap();
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn super_gaussian_growth_is_rejected() {
        let f = |r: f64| (r * r).exp();
        assert!(sl2_heat_apply(&f, 0.4, 0.5).is_err());
    }
}
