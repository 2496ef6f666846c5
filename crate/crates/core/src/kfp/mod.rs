//! The kinetic Fokker-Planck operator `L = d_vv - v d_v + V'(x) d_v - v d_x`
//! on the phase plane, with the twisted metric in which `e1 = 2 d_x + d_v`
//! (horizontal) and `e2 = d_v` (vertical) are orthonormal.

mod grid;

pub use grid::{
    gradient_bound_check, grid_solve, hypocoercive_decay, logsob_constant, poincare_constant,
    fit_rate, predicted_rate, DecayMode, GradientBoundReport, HypocoerciveReport, LogSobolevResult,
    PhaseGrid, PoincareResult, Trajectory, Transport,
};

use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::linalg::min_eig_2x2;
use crate::quadrature::{adaptive_semi_infinite, GaussLegendre};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// A test function given through its Taylor expansion: called with the jets
/// of the coordinates `x` and `v`.
pub type TestFunction<'a> = &'a dyn Fn(&Jet2, &Jet2) -> Jet2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    /// `k x^2 / 2`.
    Quadratic { k: f64 },
    /// `k x^2 / 2 + a cos x`.
    Perturbed { k: f64, a: f64 },
}

impl Potential {
    pub fn quadratic(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::domain(format!("confinement needs k > 0, got {k}")));
        }
        Ok(Potential::Quadratic { k })
    }

    pub fn perturbed(k: f64, a: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite() && a.is_finite()) {
            return Err(Error::domain(format!("need k > 0 and finite a, got ({k}, {a})")));
        }
        Ok(Potential::Perturbed { k, a })
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Potential::Quadratic { k } => 0.5 * k * x * x,
            Potential::Perturbed { k, a } => 0.5 * k * x * x + a * x.cos(),
        }
    }

    pub fn d1(&self, x: f64) -> f64 {
        match *self {
            Potential::Quadratic { k } => k * x,
            Potential::Perturbed { k, a } => k * x - a * x.sin(),
        }
    }

    pub fn d2(&self, x: f64) -> f64 {
        match *self {
            Potential::Quadratic { k } => k,
            Potential::Perturbed { k, a } => k - a * x.cos(),
        }
    }

    /// Interval containing every value of `V''`.
    pub fn hessian_range(&self) -> (f64, f64) {
        match *self {
            Potential::Quadratic { k } => (k, k),
            Potential::Perturbed { k, a } => (k - a.abs(), k + a.abs()),
        }
    }

    /// `M` with `|V''| <= M` everywhere.
    pub fn hessian_bound(&self) -> f64 {
        let (lo, hi) = self.hessian_range();
        lo.abs().max(hi.abs())
    }

    pub fn is_quadratic(&self) -> bool {
        matches!(self, Potential::Quadratic { .. })
    }

    /// `V'` as a jet in `x`.
    pub fn d1_jet(&self, x: &Jet2) -> Jet2 {
        match *self {
            Potential::Quadratic { k } => x.scale(k),
            Potential::Perturbed { k, a } => &x.scale(k) - &x.sin().scale(a),
        }
    }

    /// `int e^{-V(x)} dx`.
    pub fn x_mass(&self) -> f64 {
        let f = |x: f64| (-self.value(x)).exp();
        adaptive_semi_infinite(f, 0.0, 1e-15, 1e-13, 2000).value
            + adaptive_semi_infinite(|x| f(-x), 0.0, 1e-15, 1e-13, 2000).value
    }

    /// Half-width beyond which `e^{-V}` carries less than `1e-11` of its mass.
    pub fn x_half_width(&self) -> f64 {
        let total = self.x_mass();
        let mut w = 1.0;
        while outside_mass(self, w) > 1e-11 * total {
            w *= 1.1;
        }
        w
    }
}

fn outside_mass(v: &Potential, w: f64) -> f64 {
    let f = |x: f64| (-v.value(x)).exp();
    adaptive_semi_infinite(f, w, 1e-300, 1e-10, 2000).value
        + adaptive_semi_infinite(|x| f(-x), w, 1e-300, 1e-10, 2000).value
}

/// Mass of the normalized invariant measure outside `[-x_half, x_half] x [-v_half, v_half]`.
pub fn mass_outside_box(v: &Potential, x_half: f64, v_half: f64) -> f64 {
    let fx = 1.0 - outside_mass(v, x_half) / v.x_mass();
    let fv = 1.0 - libm::erfc(v_half / 2f64.sqrt());
    1.0 - fx * fv
}

fn apply_jet(pot: &Potential, x: &Jet2, v: &Jet2, g: &Jet2) -> Jet2 {
    let o = g.order().saturating_sub(2);
    let gv = g.dv();
    let gx = g.dx();
    let drift = &pot.d1_jet(x) - v;
    let first = &(&drift * &gv) - &(v * &gx);
    &gv.dv() + &first.truncate(o)
}

/// `L f` at `(x, v)`.
pub fn kfp_apply(pot: &Potential, f: TestFunction, x: f64, v: f64) -> f64 {
    let (jx, jv) = (Jet2::var_x(x, 2), Jet2::var_v(v, 2));
    apply_jet(pot, &jx, &jv, &f(&jx, &jv)).value()
}

/// `(e1 f, e2 f) = (2 f_x + f_v, f_v)` at `(x, v)`.
pub fn twisted_gradient(f: TestFunction, x: f64, v: f64) -> (f64, f64) {
    let g = f(&Jet2::var_x(x, 1), &Jet2::var_v(v, 1));
    let (fx, fv) = (g.partial(1, 0), g.partial(0, 1));
    (2.0 * fx + fv, fv)
}

/// `T_2(f) = (1/2)(L |grad f|^2 - 2 <grad f, grad L f>)` in the twisted metric,
/// by exact differentiation of the Taylor expansion.
pub fn t2_form(pot: &Potential, f: TestFunction, x: f64, v: f64) -> f64 {
    let (jx, jv) = (Jet2::var_x(x, 3), Jet2::var_v(v, 3));
    let g = f(&jx, &jv);
    let a = &g.dx().scale(2.0) + &g.dv();
    let b = g.dv();
    let norm = &(&a * &a) + &(&b * &b);
    let l_norm = apply_jet(pot, &jx.truncate(2), &jv.truncate(2), &norm).value();
    let lf = apply_jet(pot, &jx, &jv, &g);
    let e1_lf = 2.0 * lf.partial(1, 0) + lf.partial(0, 1);
    let e2_lf = lf.partial(0, 1);
    0.5 * l_norm - (a.value() * e1_lf + b.value() * e2_lf)
}

/// `(Ric_V - DY)(grad f, grad f) = a^2/2 + (1 - 2 V'') a b + b^2/2` with
/// `(a, b) = (e1 f, e2 f)`; the leaves are flat, so only the drift contributes.
pub fn bochner_lower_bound(pot: &Potential, x: f64, a: f64, b: f64) -> f64 {
    0.5 * a * a + (1.0 - 2.0 * pot.d2(x)) * a * b + 0.5 * b * b
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KEta {
    pub eta: f64,
    pub k: f64,
    /// Value of `V''` at which the constraint is tight.
    pub worst_hessian: f64,
}

fn hessian_samples(pot: &Potential) -> Vec<f64> {
    let (lo, hi) = pot.hessian_range();
    (0..=64).map(|i| lo + (hi - lo) * i as f64 / 64.0).collect()
}

/// Margin of `[[1/2 - eta, c/2], [c/2, 1/2 + K]] >= 0` over the Hessian range,
/// with `c = 1 - 2 V''`, and the Hessian value attaining it.
fn psd_margin(pot: &Potential, eta: f64, k: f64) -> (f64, f64) {
    hessian_samples(pot)
        .into_iter()
        .map(|h| {
            let c = 1.0 - 2.0 * h;
            (min_eig_2x2(0.5 - eta, 0.5 * c, 0.5 + k), h)
        })
        .fold((f64::INFINITY, 0.0), |acc, x| if x.0 < acc.0 { x } else { acc })
}

/// Smallest `K >= -1/2` with `T_2(f) >= -K |e2 f|^2 + eta |e1 f|^2` for all `f`,
/// by bisection on `[-1/2, 100]` with a positive-semidefiniteness test.
pub fn k_eta(pot: &Potential, eta: f64) -> Result<KEta> {
    if !(eta > 0.0 && eta < 0.5) {
        return Err(Error::domain(format!("eta must lie in (0, 1/2), got {eta}")));
    }
    let tol = -1e-13;
    let (mut lo, mut hi) = (-0.5, 100.0);
    let (m_hi, h_hi) = psd_margin(pot, eta, hi);
    if m_hi < tol {
        return Err(Error::Infeasible(format!(
            "no K <= 100 works at eta = {eta}: margin {m_hi:e} at V'' = {h_hi}"
        )));
    }
    if psd_margin(pot, eta, lo).0 >= tol {
        hi = lo;
    }
    while hi - lo > 1e-13 * (1.0 + hi.abs()) {
        let mid = 0.5 * (lo + hi);
        if psd_margin(pot, eta, mid).0 >= tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (_, worst) = psd_margin(pot, eta, hi);
    Ok(KEta {
        eta,
        k: hi,
        worst_hessian: worst,
    })
}

/// `K` with `Ric_V - DY >= -K` in the twisted metric: the largest
/// `|1 - 2 V''| / 2 - 1/2` over the Hessian range.
pub fn gradient_bound_k(pot: &Potential) -> f64 {
    hessian_samples(pot)
        .into_iter()
        .map(|h| -min_eig_2x2(0.5, 0.5 * (1.0 - 2.0 * h), 0.5))
        .fold(f64::NEG_INFINITY, f64::max)
        + 0.0 // turns -0 into 0
}

/// `|int L f dmu|` with `mu` normalized, by Gauss-Legendre quadrature on the
/// box `[-x_half, x_half] x [-v_half, v_half]`.
pub fn invariance_residual_in(pot: &Potential, f: TestFunction, x_half: f64, v_half: f64) -> Result<f64> {
    let outside = mass_outside_box(pot, x_half, v_half);
    if outside > 1e-10 {
        return Err(Error::domain(format!(
            "box [-{x_half}, {x_half}] x [-{v_half}, {v_half}] leaves mass {outside:e} of mu outside"
        )));
    }
    let z = pot.x_mass() * (2.0 * PI).sqrt();
    let gl = GaussLegendre::new(20);
    let xs = gl.composite(-x_half, x_half, (x_half / 0.5).ceil() as usize);
    let vs = gl.composite(-v_half, v_half, (v_half / 0.5).ceil() as usize);
    let mut total = 0.0;
    for &(x, wx) in &xs {
        let ex = (-pot.value(x)).exp();
        for &(v, wv) in &vs {
            total += wx * wv * ex * (-0.5 * v * v).exp() * kfp_apply(pot, f, x, v);
        }
    }
    Ok((total / z).abs())
}

/// [`invariance_residual_in`] on a box holding all but `1e-11` of `mu`.
pub fn invariance_residual(pot: &Potential, f: TestFunction) -> Result<f64> {
    invariance_residual_in(pot, f, pot.x_half_width(), 7.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovReport {
    /// Smallest value of `W = 1 + x^2 + v^2` on the grid.
    pub min_w: f64,
    /// Largest `L W / W` on the grid.
    pub generator_constant: f64,
    /// Largest `|grad W| / W` on the grid, twisted metric.
    pub gradient_constant: f64,
    /// Smallest `C` with `L W <= C W` and `|grad W| <= C W` on the grid.
    pub c: f64,
}

pub fn lyapunov_check(pot: &Potential, grid: &PhaseGrid) -> LyapunovReport {
    let w = |x: &Jet2, v: &Jet2| (&(x * x) + &(v * v)).add_const(1.0);
    let mut rep = LyapunovReport {
        min_w: f64::INFINITY,
        generator_constant: f64::NEG_INFINITY,
        gradient_constant: 0.0,
        c: 0.0,
    };
    for (x, v) in grid.points() {
        let wv = 1.0 + x * x + v * v;
        let lw = kfp_apply(pot, &w, x, v);
        let (a, b) = twisted_gradient(&w, x, v);
        rep.min_w = rep.min_w.min(wv);
        rep.generator_constant = rep.generator_constant.max(lw / wv);
        rep.gradient_constant = rep.gradient_constant.max((a * a + b * b).sqrt() / wv);
    }
    rep.c = rep.generator_constant.max(rep.gradient_constant);
    rep
}

/// A random cubic polynomial times a Gaussian, `p(x, v) e^{-s (x^2 + v^2)}`.
pub fn random_test_function<R: Rng>(rng: &mut R) -> impl Fn(&Jet2, &Jet2) -> Jet2 {
    let c: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let s = rng.gen_range(0.1..0.6);
    move |x: &Jet2, v: &Jet2| {
        let one = Jet2::constant(1.0, x.order());
        let mons = [
            one,
            x.clone(),
            v.clone(),
            x * x,
            x * v,
            v * v,
            &(x * x) * x,
            &(x * x) * v,
            &(x * v) * v,
            &(v * v) * v,
        ];
        let mut p = Jet2::constant(0.0, x.order());
        for (ci, m) in c.iter().zip(&mons) {
            p = &p + &m.scale(*ci);
        }
        &p * &(&(x * x) + &(v * v)).scale(-s).exp()
    }
}

/// Smallest `T_2(f) - (Ric_V - DY)(grad f, grad f)` over `samples` random
/// points in `[-3, 3]^2` and random test functions.
pub fn bochner_min_slack(pot: &Potential, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let f = random_test_function(&mut rng);
            let (x, v) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let (a, b) = twisted_gradient(&f, x, v);
            t2_form(pot, &f, x, v) - bochner_lower_bound(pot, x, a, b)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Smallest `T_2(f) + K |e2 f|^2 - eta |e1 f|^2` over random samples.
pub fn k_eta_min_slack(pot: &Potential, eta: f64, k: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let f = random_test_function(&mut rng);
            let (x, v) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let (a, b) = twisted_gradient(&f, x, v);
            t2_form(pot, &f, x, v) + k * b * b - eta * a * a
        })
        .fold(f64::INFINITY, f64::min)
}

pub type BoxedTestFunction = Box<dyn Fn(&Jet2, &Jet2) -> Jet2 + Send + Sync>;

/// Twenty rapidly decaying test functions: monomials of degree at most two
/// times Gaussian bumps at five centers and two widths.
pub fn invariance_battery() -> Vec<(String, BoxedTestFunction)> {
    let centers = [(0.0, 0.0), (1.0, -0.5), (-1.5, 1.0), (0.5, 2.0), (-2.0, -1.5)];
    let widths = [0.7, 1.3];
    let mut out: Vec<(String, BoxedTestFunction)> = Vec::new();
    for &(a, b) in &centers {
        for &w in &widths {
            for deg in 0..2 {
                let name = format!("bump(center=({a},{b}),width={w},factor={})", ["1", "x*v"][deg]);
                let f = move |x: &Jet2, v: &Jet2| {
                    let dx = x.add_const(-a);
                    let dv = v.add_const(-b);
                    let g = (&(&dx * &dx) + &(&dv * &dv)).scale(-0.5 / (w * w)).exp();
                    if deg == 0 {
                        g
                    } else {
                        &(x * v) * &g
                    }
                };
                out.push((name, Box::new(f)));
            }
        }
    }
    out
}

/// Test functions selectable by name: `x`, `v`, `xv`, `gauss`, `sin-gauss`.
pub fn named_test_function(name: &str) -> Option<BoxedTestFunction> {
    let f: BoxedTestFunction = match name {
        "x" => Box::new(|x: &Jet2, _: &Jet2| x.clone()),
        "v" => Box::new(|_: &Jet2, v: &Jet2| v.clone()),
        "xv" => Box::new(|x: &Jet2, v: &Jet2| x * v),
        "gauss" => Box::new(|x: &Jet2, v: &Jet2| (&(x * x) + &(v * v)).scale(-0.5).exp()),
        "sin-gauss" => Box::new(|x: &Jet2, v: &Jet2| &x.sin() * &(v * v).scale(-1.0).exp()),
        _ => return None,
    };
    Some(f)
}

pub const TEST_FUNCTION_NAMES: [&str; 5] = ["x", "v", "xv", "gauss", "sin-gauss"];

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> Potential {
        Potential::quadratic(1.0).unwrap()
    }

    #[test]
    fn apply_examples() {
        let p = Potential::perturbed(1.0, 0.3).unwrap();
        let (x, v) = (0.7, -0.4);
        let fv = |_: &Jet2, v: &Jet2| v.clone();
        assert!((kfp_apply(&p, &fv, x, v) - (-v + p.d1(x))).abs() < 1e-14);
        let fc = |x: &Jet2, _: &Jet2| Jet2::constant(2.0, x.order());
        assert_eq!(kfp_apply(&p, &fc, x, v), 0.0);
        let fx = |x: &Jet2, _: &Jet2| x.clone();
        assert!((kfp_apply(&p, &fx, x, v) + v).abs() < 1e-14);
    }

    #[test]
    fn t2_examples() {
        let zero = Potential::Quadratic { k: 0.0 };
        let fv = |_: &Jet2, v: &Jet2| v.clone();
        for &(x, v) in &[(0.0, 0.0), (1.0, -2.0)] {
            assert!((t2_form(&zero, &fv, x, v) - 2.0).abs() < 1e-12);
        }
        let fc = |x: &Jet2, _: &Jet2| Jet2::constant(1.0, x.order());
        assert_eq!(t2_form(&quad(), &fc, 0.3, 0.1), 0.0);
        // f = x + v: a = 3, b = 1 and no second derivatives
        let fs = |x: &Jet2, v: &Jet2| x + v;
        let t2 = t2_form(&quad(), &fs, 0.0, 0.0);
        assert!((t2 - bochner_lower_bound(&quad(), 0.0, 3.0, 1.0)).abs() < 1e-12);
        assert!((t2 - (4.5 - 3.0 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn bochner_inequality_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pots = [quad(), Potential::perturbed(1.0, 0.4).unwrap()];
        for i in 0..200 {
            let pot = pots[i % 2];
            let f = random_test_function(&mut rng);
            let (x, v) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let (a, b) = twisted_gradient(&f, x, v);
            let slack = t2_form(&pot, &f, x, v) - bochner_lower_bound(&pot, x, a, b);
            assert!(slack >= -1e-9, "sample {i}: {slack}");
        }
    }

    #[test]
    fn k_eta_matches_closed_form() {
        for pot in [quad(), Potential::perturbed(1.0, 0.4).unwrap()] {
            let (lo, hi) = pot.hessian_range();
            let cmax = (1.0 - 2.0 * lo).abs().max((1.0 - 2.0 * hi).abs());
            let mut prev = -0.5;
            for &eta in &[0.1, 0.2, 0.25, 0.3, 0.4] {
                let k = k_eta(&pot, eta).unwrap().k;
                let closed = (cmax * cmax / (2.0 - 4.0 * eta) - 0.5).max(-0.5);
                assert!((k - closed).abs() < 1e-10, "{pot:?} {eta}: {k} vs {closed}");
                assert!(k >= -0.5 && k >= prev);
                prev = k;
            }
        }
        assert!((k_eta(&quad(), 0.25).unwrap().k - 0.5).abs() < 1e-12);
        assert!(k_eta(&quad(), 0.5).is_err());
        let stiff = Potential::quadratic(200.0).unwrap();
        assert!(matches!(k_eta(&stiff, 0.45), Err(Error::Infeasible(_))));
    }

    #[test]
    fn k_eta_certificate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pot = Potential::perturbed(1.0, 0.4).unwrap();
        for &eta in &[0.1, 0.2, 0.3, 0.4] {
            let k = k_eta(&pot, eta).unwrap().k;
            for _ in 0..125 {
                let f = random_test_function(&mut rng);
                let (x, v) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let (a, b) = twisted_gradient(&f, x, v);
                let s = t2_form(&pot, &f, x, v) + k * b * b - eta * a * a;
                assert!(s >= -1e-9, "{eta}: {s}");
            }
        }
    }

    #[test]
    fn gradient_k_for_quadratic_is_zero() {
        assert!(gradient_bound_k(&quad()).abs() < 1e-15);
        assert!(gradient_bound_k(&Potential::perturbed(1.0, 0.4).unwrap()) > 0.0);
    }

    #[test]
    fn battery_is_invariant() {
        let b = invariance_battery();
        assert_eq!(b.len(), 20);
        for (name, f) in &b {
            let r = invariance_residual(&quad(), f.as_ref()).unwrap();
            assert!(r < 1e-8, "{name}: {r:e}");
        }
        assert!(bochner_min_slack(&quad(), 50, 3) >= -1e-9);
    }

    #[test]
    fn invariance() {
        let p = quad();
        let f1 = |x: &Jet2, v: &Jet2| v * &(&(x * x) + &(v * v)).scale(-1.0).exp();
        assert!(invariance_residual(&p, &f1).unwrap() < 1e-8);
        let f2 = |x: &Jet2, v: &Jet2| x * v;
        assert!(invariance_residual(&p, &f2).unwrap() < 1e-8);
        let fc = |x: &Jet2, _: &Jet2| Jet2::constant(1.0, x.order());
        assert_eq!(invariance_residual(&p, &fc).unwrap(), 0.0);
        assert!(matches!(invariance_residual_in(&p, &f2, 3.0, 3.0), Err(Error::Domain(_))));
    }

    #[test]
    fn lyapunov_quadratic() {
        let p = quad();
        let grid = PhaseGrid::new(64, 64, 5.0, 0.01).unwrap();
        let rep = lyapunov_check(&p, &grid);
        assert!(rep.min_w >= 1.0);
        // L W = 2 - 2 v^2 + 2 v V' - 2 x v
        let w = |x: &Jet2, v: &Jet2| (&(x * x) + &(v * v)).add_const(1.0);
        for &(x, v) in &[(0.3, -1.2), (2.0, 0.5)] {
            let lw = 2.0 - 2.0 * v * v + 2.0 * v * p.d1(x) - 2.0 * x * v;
            assert!((kfp_apply(&p, &w, x, v) - lw).abs() < 1e-12);
            let (a, b) = twisted_gradient(&w, x, v);
            assert!((a * a + b * b - ((4.0 * x + 2.0 * v).powi(2) + 4.0 * v * v)).abs() < 1e-12);
        }
        assert!(rep.generator_constant <= 2.0 + 1e-12 && rep.generator_constant > 1.9);
        assert!(rep.gradient_constant > 2.0 && rep.gradient_constant < 2.3);
    }
}
