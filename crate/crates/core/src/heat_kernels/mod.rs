//! Heat kernels of the radial horizontal Laplacians, by spectral series and
//! by integral representation, plus the cross-checks between them.

mod checks;
mod heisenberg;
mod hopf;
mod quaternionic;
mod series;
mod sl2;
mod sphere;

pub use checks::{
    heisenberg_mass, hopf_chapman_kolmogorov, hopf_mass, hopf_quaternionic_relation, pde_residual,
    quaternionic_mass, sphere_mass, RelationResidual,
};
pub use heisenberg::{heisenberg_kernel, heisenberg_kernel_derivatives, HeisenbergDerivatives};
pub use hopf::{hopf_fourier_modes, hopf_kernel_integral, hopf_kernel_series, hopf_series_terms};
pub use quaternionic::{
    quaternionic_coefficient, quaternionic_kernel_integral, quaternionic_kernel_series,
    quaternionic_series_terms,
};
pub use sl2::sl2_heat_apply;
pub use sphere::{ln_sphere_kernel_cosh, sphere_kernel, SphereForm};

use crate::error::{Error, Result};
use crate::model_spaces::RadialPoint;
use serde::Serialize;

/// Truncation of a double spectral sum: indices up to `max_m` and `max_k`,
/// with a required absolute bound on the dropped terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesTruncation {
    pub max_m: usize,
    pub max_k: usize,
    pub tail_tolerance: f64,
}

impl SeriesTruncation {
    /// Lets the evaluator choose the indices for the given tail tolerance.
    pub fn auto(tail_tolerance: f64) -> Self {
        Self {
            max_m: 0,
            max_k: 0,
            tail_tolerance,
        }
    }

    pub(crate) fn is_auto(&self) -> bool {
        self.max_m == 0 && self.max_k == 0
    }
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        Self::auto(1e-15)
    }
}

/// Composite Gauss-Legendre rule for the improper integrals.
///
/// `cutoff` and `panels` are chosen from the integrand when left `None`.
/// The error estimate is the difference between the rule and the same rule
/// with half as many panels; `tolerance` bounds it relative to the value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub cutoff: Option<f64>,
    pub nodes: usize,
    pub panels: Option<usize>,
    pub tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            cutoff: None,
            nodes: 20,
            panels: None,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    Integral,
}

/// A kernel value (density against the model's symmetric measure) with the
/// information needed to judge it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelEvaluation {
    pub value: f64,
    pub t: f64,
    pub point: RadialPoint,
    pub method: Method,
    pub error_estimate: f64,
    /// Imaginary part left by complex quadrature; zero for series.
    pub imaginary_residue: f64,
    /// Terms summed or quadrature nodes used.
    pub work: usize,
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time must be positive, got {t}")));
    }
    Ok(())
}

/// Composite Gauss-Legendre sum of a complex-valued integrand at two
/// resolutions; returns the finer value and the difference.
pub(crate) fn two_level<F>(
    a: f64,
    b: f64,
    nodes: usize,
    panels: usize,
    mut f: F,
) -> (f64, f64, f64, usize)
where
    F: FnMut(f64) -> (f64, f64),
{
    let gl = crate::quadrature::GaussLegendre::new(nodes);
    let mut run = |p: usize| {
        let (mut re, mut im) = (0.0, 0.0);
        for (x, w) in gl.composite(a, b, p) {
            let (u, v) = f(x);
            re += w * u;
            im += w * v;
        }
        (re, im)
    };
    let coarse = run(panels.div_ceil(2).max(1));
    let fine = run(panels);
    (fine.0, fine.1, (fine.0 - coarse.0).abs(), 2 * panels * nodes)
}
