//! The three model foliations: radial operators, symmetric measures, the
//! Heisenberg Γ-calculus and curvature constants.

mod gamma;

pub use gamma::{
    check_commutation, heisenberg_gamma_calculus, heisenberg_gamma_calculus_exact,
    heisenberg_j_matrix, GammaOrder, HeisenbergFrame, VectorField,
};

use crate::error::{Error, Result};
use crate::fd::{d1_o4, d2_o4};
use crate::poly::{rat_to_f64, ratio};
use crate::specfun::ln_gamma;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// Distance kept from the coordinate singularities of the radial charts.
pub const CHART_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Heisenberg,
    Hopf,
    QuaternionicHopf,
}

/// One of the model foliations together with its dimension parameter `n`.
///
/// Heisenberg lives on `R^{2n+1}`, Hopf on `S^{2n+1}` and the quaternionic
/// fibration on `S^{4n+3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ModelSpace {
    pub kind: ModelKind,
    pub n: usize,
}

impl ModelSpace {
    pub fn new(kind: ModelKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("model dimension parameter n must be at least 1"));
        }
        Ok(Self { kind, n })
    }

    pub fn heisenberg(n: usize) -> Result<Self> {
        Self::new(ModelKind::Heisenberg, n)
    }

    pub fn hopf(n: usize) -> Result<Self> {
        Self::new(ModelKind::Hopf, n)
    }

    pub fn quaternionic(n: usize) -> Result<Self> {
        Self::new(ModelKind::QuaternionicHopf, n)
    }

    pub fn horizontal_dim(&self) -> usize {
        match self.kind {
            ModelKind::Heisenberg | ModelKind::Hopf => 2 * self.n,
            ModelKind::QuaternionicHopf => 4 * self.n,
        }
    }

    pub fn total_dim(&self) -> usize {
        match self.kind {
            ModelKind::Heisenberg | ModelKind::Hopf => 2 * self.n + 1,
            ModelKind::QuaternionicHopf => 4 * self.n + 3,
        }
    }

    /// Total mass of the symmetric measure; `None` for the Heisenberg group.
    pub fn volume(&self) -> Option<f64> {
        let n = self.n as f64;
        match self.kind {
            ModelKind::Heisenberg => None,
            ModelKind::Hopf => Some(2.0 * PI.powf(n + 1.0) / ln_gamma(n + 1.0).exp()),
            ModelKind::QuaternionicHopf => {
                Some(2.0 * PI.powf(2.0 * n + 2.0) / ln_gamma(2.0 * n + 2.0).exp())
            }
        }
    }
}

/// A point of the two-dimensional radial chart: `r` and the fiber coordinate
/// (`z`, `theta` or `eta` depending on the model).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialPoint {
    pub r: f64,
    pub fiber: f64,
}

impl RadialPoint {
    pub fn new(r: f64, fiber: f64) -> Self {
        Self { r, fiber }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberOperator {
    /// `d^2/dz^2` on the real line.
    Line,
    /// `d^2/dtheta^2` on the circle.
    Circle,
    /// `d^2/deta^2 + 2 cot(eta) d/deta`, the radial Laplacian of `S^3`.
    Sphere3,
}

/// `d^2/dr^2 + a(r) d/dr + b(r) * fiber_operator`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialOperator {
    pub model: ModelSpace,
    pub fiber_operator: FiberOperator,
    pub r_domain: (f64, f64),
}

impl RadialOperator {
    pub fn drift(&self, r: f64) -> f64 {
        let n = self.model.n as f64;
        match self.model.kind {
            ModelKind::Heisenberg => (2.0 * n - 1.0) / r,
            ModelKind::Hopf => (2.0 * n - 1.0) / r.tan() - r.tan(),
            ModelKind::QuaternionicHopf => (4.0 * n - 1.0) / r.tan() - 3.0 * r.tan(),
        }
    }

    pub fn fiber_coefficient(&self, r: f64) -> f64 {
        match self.model.kind {
            ModelKind::Heisenberg => r * r,
            ModelKind::Hopf | ModelKind::QuaternionicHopf => r.tan().powi(2),
        }
    }
}

pub fn radial_operator(model: ModelSpace) -> RadialOperator {
    let (fiber_operator, r_domain) = match model.kind {
        ModelKind::Heisenberg => (FiberOperator::Line, (0.0, f64::INFINITY)),
        ModelKind::Hopf => (FiberOperator::Circle, (0.0, FRAC_PI_2)),
        ModelKind::QuaternionicHopf => (FiberOperator::Sphere3, (0.0, FRAC_PI_2)),
    };
    RadialOperator {
        model,
        fiber_operator,
        r_domain,
    }
}

/// Finite-difference step for a coordinate value.
pub fn fd_step(coord: f64) -> f64 {
    1e-4f64.max(1e-3 * coord.abs())
}

fn check_interior(op: &RadialOperator, p: RadialPoint) -> Result<()> {
    let (lo, hi) = op.r_domain;
    let eps = CHART_EPSILON;
    if !(p.r >= lo + eps && p.r <= hi - eps) {
        return Err(Error::domain(format!(
            "r = {} outside the interior [{}, {}] of the radial chart",
            p.r,
            lo + eps,
            hi - eps
        )));
    }
    if op.fiber_operator == FiberOperator::Sphere3 && !(p.fiber >= eps && p.fiber <= PI - eps) {
        return Err(Error::domain(format!(
            "eta = {} outside [{eps}, pi - {eps}]",
            p.fiber
        )));
    }
    Ok(())
}

/// Applies the radial operator to `f(r, fiber)` with fourth-order central
/// differences.
pub fn apply_radial(
    op: &RadialOperator,
    f: impl Fn(f64, f64) -> f64,
    p: RadialPoint,
) -> Result<f64> {
    check_interior(op, p)?;
    let hr = fd_step(p.r);
    let hf = fd_step(p.fiber);
    let fr = |r: f64| f(r, p.fiber);
    let ff = |s: f64| f(p.r, s);
    let radial = d2_o4(fr, p.r, hr) + op.drift(p.r) * d1_o4(fr, p.r, hr);
    let fiber = match op.fiber_operator {
        FiberOperator::Line | FiberOperator::Circle => d2_o4(ff, p.fiber, hf),
        FiberOperator::Sphere3 => {
            d2_o4(ff, p.fiber, hf) + 2.0 / p.fiber.tan() * d1_o4(ff, p.fiber, hf)
        }
    };
    Ok(radial + op.fiber_coefficient(p.r) * fiber)
}

/// Density of the symmetric measure in the `(r, fiber)` chart.
///
/// Heisenberg: `2 pi^n / Gamma(n) r^{2n-1}` against `dr dz`. Hopf:
/// `2 pi^n / Gamma(n) sin^{2n-1} r cos r` against `dr dtheta` on
/// `[0, pi/2] x [-pi, pi]`. Quaternionic: `8 pi^{2n+1} / Gamma(2n)
/// sin^{4n-1} r cos^3 r sin^2 eta` against `dr deta` on `[0, pi/2] x [0, pi]`.
pub fn measure_density(model: ModelSpace, p: RadialPoint) -> f64 {
    let n = model.n as f64;
    match model.kind {
        ModelKind::Heisenberg => {
            2.0 * PI.powf(n) / ln_gamma(n).exp() * p.r.abs().powf(2.0 * n - 1.0)
        }
        ModelKind::Hopf => {
            let (s, c) = p.r.sin_cos();
            2.0 * PI.powf(n) / ln_gamma(n).exp() * s.abs().powf(2.0 * n - 1.0) * c.abs()
        }
        ModelKind::QuaternionicHopf => {
            let (s, c) = p.r.sin_cos();
            8.0 * PI.powf(2.0 * n + 1.0) / ln_gamma(2.0 * n).exp()
                * s.abs().powf(4.0 * n - 1.0)
                * c.abs().powi(3)
                * p.fiber.sin().powi(2)
        }
    }
}

/// Normalization of `rho_2` (and `kappa`) that a set of constants refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `-(1/4) Tr_H(J_Z^2) >= rho_2`, as in the curvature-dimension inequality.
    CdQuarterTrace,
    /// `Tr(J_Z^* J_Z) >= rho_2`, as in the first-eigenvalue bound.
    LichneFullTrace,
    /// `(1/4) Tr(J_Z^* J_Z) >= rho_2`, as in the diameter bound.
    BonnetQuarterTrace,
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Convention::CdQuarterTrace => "cd-quarter-trace",
            Convention::LichneFullTrace => "lichne-full-trace",
            Convention::BonnetQuarterTrace => "bonnet-quarter-trace",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureConstants {
    pub rho1: f64,
    pub kappa: f64,
    pub rho2: f64,
    pub horizontal_dim: usize,
    pub convention: Convention,
}

impl CurvatureConstants {
    /// Rejects constants stated in a different convention.
    pub fn require(&self, convention: Convention) -> Result<()> {
        if self.convention != convention {
            return Err(Error::Convention {
                expected: convention.to_string(),
                got: self.convention.to_string(),
            });
        }
        Ok(())
    }
}

/// Curvature constants of a model in the requested convention.
///
/// Only the pairs for which the constants are known are supported:
/// Hopf and quaternionic Hopf in the full-trace convention and Heisenberg in
/// the quarter-trace convention, the latter derived from the structure
/// constants of the frame.
pub fn curvature_constants(model: ModelSpace, convention: Convention) -> Result<CurvatureConstants> {
    let d = model.n as f64;
    match (model.kind, convention) {
        (ModelKind::Hopf, Convention::LichneFullTrace) => Ok(CurvatureConstants {
            rho1: 2.0 * (d + 1.0),
            kappa: 1.0,
            rho2: 2.0 * d,
            horizontal_dim: 2 * model.n,
            convention,
        }),
        (ModelKind::QuaternionicHopf, Convention::LichneFullTrace) => Ok(CurvatureConstants {
            rho1: d + 2.0,
            kappa: 3.0,
            rho2: 4.0 * d,
            horizontal_dim: 4 * model.n,
            convention,
        }),
        (ModelKind::Heisenberg, Convention::CdQuarterTrace) => {
            let (kappa, rho2) = heisenberg_kappa_rho2(model.n);
            Ok(CurvatureConstants {
                rho1: 0.0,
                kappa,
                rho2: rat_to_f64(&rho2),
                horizontal_dim: 2 * model.n,
                convention,
            })
        }
        (kind, conv) => Err(Error::Unsupported(format!(
            "no curvature constants for {kind:?} in the {conv} convention"
        ))),
    }
}

/// `kappa` as the largest eigenvalue of `-J_Z^2` and `rho_2 = -(1/4) Tr(J_Z^2)`,
/// both from the bracket-derived `J_Z`.
fn heisenberg_kappa_rho2(n: usize) -> (f64, BigRational) {
    let j = heisenberg_j_matrix(n);
    let dim = j.len();
    let mut minus_j2 = vec![vec![BigRational::zero(); dim]; dim];
    for (a, row) in minus_j2.iter_mut().enumerate() {
        for (b, entry) in row.iter_mut().enumerate() {
            let mut acc = BigRational::zero();
            for (c, jc) in j.iter().enumerate() {
                acc -= &j[a][c] * &jc[b];
            }
            *entry = acc;
        }
    }
    let trace: BigRational = (0..dim).map(|a| minus_j2[a][a].clone()).sum();
    let rho2 = trace * ratio(1, 4);
    let float: Vec<Vec<f64>> = minus_j2
        .iter()
        .map(|row| row.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect())
        .collect();
    let kappa = *crate::linalg::symmetric_eigenvalues(&float)
        .last()
        .expect("nonempty");
    (kappa, rho2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use crate::specfun::jacobi_all;

    #[test]
    fn radial_coefficient_examples() {
        let h = radial_operator(ModelSpace::heisenberg(1).unwrap());
        assert_eq!(h.drift(0.5), 2.0);
        assert_eq!(h.fiber_coefficient(0.5), 0.25);
        let hopf = radial_operator(ModelSpace::hopf(1).unwrap());
        assert!(hopf.drift(PI / 4.0).abs() < 1e-15);
        let q = radial_operator(ModelSpace::quaternionic(1).unwrap());
        let r = 1e-4;
        assert!((q.drift(r) * r - 3.0).abs() < 1e-6);
    }

    #[test]
    fn apply_radial_examples() {
        for model in [
            ModelSpace::heisenberg(2).unwrap(),
            ModelSpace::hopf(1).unwrap(),
            ModelSpace::quaternionic(1).unwrap(),
        ] {
            let op = radial_operator(model);
            let v = apply_radial(&op, |_, _| 1.0, RadialPoint::new(0.4, 0.7)).unwrap();
            assert!(v.abs() < 1e-9);
        }
        let op = radial_operator(ModelSpace::heisenberg(1).unwrap());
        let v = apply_radial(&op, |r, _| r * r, RadialPoint::new(0.5, 0.0)).unwrap();
        assert!((v - 4.0).abs() < 1e-8);
        assert!(apply_radial(&op, |r, _| r, RadialPoint::new(0.0, 0.0)).is_err());
        let hopf = radial_operator(ModelSpace::hopf(1).unwrap());
        assert!(apply_radial(&hopf, |r, _| r, RadialPoint::new(FRAC_PI_2, 0.0)).is_err());
    }

    #[test]
    fn hopf_eigenfunctions() {
        // (cos r)^k P_m^{n-1,k}(cos 2r) cos(k theta) has eigenvalue
        // -(4 m (m + k + n) + 2 k n)
        for n in 1..=2usize {
            let op = radial_operator(ModelSpace::hopf(n).unwrap());
            for m in 0..=5usize {
                for k in 0..=5usize {
                    let f = |r: f64, th: f64| {
                        r.cos().powi(k as i32)
                            * jacobi_all((n - 1) as f64, k as f64, m, (2.0 * r).cos())[m]
                            * (k as f64 * th).cos()
                    };
                    let lambda = (4 * m * (m + k + n) + 2 * k * n) as f64;
                    for &(r, th) in &[(0.3, 0.2), (0.7, 1.1), (1.1, -0.4)] {
                        let p = RadialPoint::new(r, th);
                        let v = apply_radial(&op, f, p).unwrap();
                        let resid = (v + lambda * f(r, th)).abs();
                        assert!(resid < 1e-7 * (1.0 + lambda), "n={n} m={m} k={k}: {resid}");
                    }
                }
            }
        }
    }

    #[test]
    fn measure_masses() {
        let gl = GaussLegendre::new(30);
        for n in 1..=3 {
            let m = ModelSpace::hopf(n).unwrap();
            let radial = gl.integrate_panels(0.0, FRAC_PI_2, 4, |r| {
                measure_density(m, RadialPoint::new(r, 0.0))
            });
            let mass = radial * 2.0 * PI;
            let want = m.volume().unwrap();
            assert!((mass - want).abs() < 1e-12 * want);
            if n == 1 {
                assert!((mass - 2.0 * PI * PI).abs() < 1e-12);
            }
        }
        let q = ModelSpace::quaternionic(1).unwrap();
        let mass = gl.integrate_panels(0.0, FRAC_PI_2, 4, |r| {
            gl.integrate(0.0, PI, |e| measure_density(q, RadialPoint::new(r, e)))
        });
        assert!((mass - PI.powi(4) / 3.0).abs() < 1e-12);
        assert!((q.volume().unwrap() - PI.powi(4) / 3.0).abs() < 1e-12);
        for i in 0..50 {
            let r = i as f64 * 0.03;
            assert!(measure_density(q, RadialPoint::new(r, r * 2.0)) >= 0.0);
        }
    }

    #[test]
    fn curvature_constant_examples() {
        let c = curvature_constants(ModelSpace::hopf(1).unwrap(), Convention::LichneFullTrace)
            .unwrap();
        assert_eq!((c.rho1, c.kappa, c.rho2, c.horizontal_dim), (4.0, 1.0, 2.0, 2));
        let c = curvature_constants(
            ModelSpace::quaternionic(1).unwrap(),
            Convention::LichneFullTrace,
        )
        .unwrap();
        assert_eq!((c.rho1, c.kappa, c.rho2, c.horizontal_dim), (3.0, 3.0, 4.0, 4));
        for n in 1..=3 {
            let c = curvature_constants(ModelSpace::heisenberg(n).unwrap(), Convention::CdQuarterTrace)
                .unwrap();
            assert_eq!(c.rho1, 0.0);
            assert!((c.kappa - 4.0).abs() < 1e-14);
            assert_eq!(c.rho2, 2.0 * n as f64);
            assert_eq!(c.horizontal_dim, 2 * n);
        }
        assert!(matches!(
            curvature_constants(ModelSpace::heisenberg(1).unwrap(), Convention::LichneFullTrace),
            Err(Error::Unsupported(_))
        ));
        assert!(curvature_constants(ModelSpace::hopf(1).unwrap(), Convention::BonnetQuarterTrace)
            .is_err());
        assert!(c_require_rejects());
    }

    fn c_require_rejects() -> bool {
        let c = curvature_constants(ModelSpace::hopf(1).unwrap(), Convention::LichneFullTrace)
            .unwrap();
        matches!(c.require(Convention::CdQuarterTrace), Err(Error::Convention { .. }))
    }
}
