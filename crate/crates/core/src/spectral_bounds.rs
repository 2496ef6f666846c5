//! Spectra of the horizontal Laplacians on the two Hopf fibrations and the
//! first-eigenvalue bound in terms of the curvature constants.

use crate::error::{Error, Result};
use crate::heat_kernels::{hopf_kernel_series, quaternionic_kernel_series, SeriesTruncation};
use crate::model_spaces::{curvature_constants, Convention, CurvatureConstants, ModelKind, ModelSpace};
use crate::poly::rat_from_f64;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::ops::RangeInclusive;

/// One eigenvalue of `-L` with the lexicographically smallest index pair
/// producing it.
///
/// For the Hopf fibration `m` is the Jacobi degree and `k` the fiber
/// frequency; for the quaternionic fibration `k` is the Jacobi degree and `m`
/// the fiber degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpectrumEntry {
    pub eigenvalue: u64,
    pub m: u64,
    pub k: u64,
    pub model: ModelKind,
}

/// `4m(m + k + n) + 2kn`.
pub fn hopf_eigenvalue(n: u64, m: u64, k: u64) -> u64 {
    4 * m * (m + k + n) + 2 * k * n
}

/// `4k(k + 2n + m + 1) + 4nm`.
pub fn quaternionic_eigenvalue(n: u64, k: u64, m: u64) -> u64 {
    4 * k * (k + 2 * n + m + 1) + 4 * n * m
}

/// The `count` smallest distinct eigenvalues.
///
/// Both formulas increase in each index, so scanning every pair with
/// eigenvalue at most `bound` (rows stop at the first value above it) finds
/// all of them; the bound doubles until enough distinct values are present.
pub fn enumerate_spectrum(model: ModelSpace, count: usize) -> Result<Vec<SpectrumEntry>> {
    if count == 0 {
        return Err(Error::domain("count must be at least 1"));
    }
    let n = model.n as u64;
    let eig: fn(u64, u64, u64) -> u64 = match model.kind {
        ModelKind::Hopf => hopf_eigenvalue,
        ModelKind::QuaternionicHopf => quaternionic_eigenvalue,
        ModelKind::Heisenberg => {
            return Err(Error::Unsupported(
                "the Heisenberg horizontal Laplacian has continuous spectrum".into(),
            ))
        }
    };
    let mut bound = 8 * n;
    loop {
        // (first index, second index) in the argument order of `eig`
        let mut found: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
        let mut i = 0;
        while eig(n, i, 0) <= bound {
            let mut j = 0;
            while eig(n, i, j) <= bound {
                found.entry(eig(n, i, j)).or_insert((i, j));
                j += 1;
            }
            i += 1;
        }
        if found.len() >= count {
            return Ok(found
                .into_iter()
                .take(count)
                .map(|(eigenvalue, (a, b))| {
                    let (m, k) = match model.kind {
                        ModelKind::Hopf => (a, b),
                        _ => (b, a),
                    };
                    SpectrumEntry {
                        eigenvalue,
                        m,
                        k,
                        model: model.kind,
                    }
                })
                .collect());
        }
        bound *= 2;
    }
}

/// First nonzero eigenvalue.
pub fn first_eigenvalue(model: ModelSpace) -> Result<u64> {
    Ok(enumerate_spectrum(model, 2)?[1].eigenvalue)
}

/// `rho_1 / (1 - 1/n + 3 kappa / rho_2)` computed exactly from the binary
/// values of the constants.
pub fn lichnerowicz_bound_exact(c: &CurvatureConstants) -> Result<BigRational> {
    c.require(Convention::LichneFullTrace)?;
    if !(c.rho1 > 0.0 && c.rho2 > 0.0 && c.kappa >= 0.0) {
        return Err(Error::domain(format!(
            "need rho1 > 0, rho2 > 0, kappa >= 0; got ({}, {}, {})",
            c.rho1, c.kappa, c.rho2
        )));
    }
    if c.horizontal_dim < 2 {
        return Err(Error::domain("horizontal dimension must be at least 2"));
    }
    let rho1 = rat_from_f64(c.rho1);
    let kappa = rat_from_f64(c.kappa);
    let rho2 = rat_from_f64(c.rho2);
    let n = BigRational::from_integer(BigInt::from(c.horizontal_dim));
    let three = BigRational::from_integer(BigInt::from(3));
    let denom = BigRational::one() - n.recip() + three * kappa / rho2;
    if denom <= BigRational::zero() {
        return Err(Error::domain("bound denominator is not positive"));
    }
    Ok(rho1 / denom)
}

pub fn lichnerowicz_bound(c: &CurvatureConstants) -> Result<f64> {
    Ok(lichnerowicz_bound_exact(c)?.to_f64().unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessRow {
    pub d: usize,
    pub bound: BigRational,
    pub lambda1: u64,
    pub equal: bool,
}

/// Bound and first eigenvalue for each `d`, compared exactly.
pub fn check_sharpness(kind: ModelKind, d_range: RangeInclusive<usize>) -> Result<Vec<SharpnessRow>> {
    check_sharpness_shifted(kind, d_range, 0.0)
}

/// As [`check_sharpness`] with `kappa` increased by `kappa_shift`.
pub fn check_sharpness_shifted(
    kind: ModelKind,
    d_range: RangeInclusive<usize>,
    kappa_shift: f64,
) -> Result<Vec<SharpnessRow>> {
    if kind == ModelKind::Heisenberg {
        return Err(Error::Unsupported("sharpness is stated for the Hopf fibrations".into()));
    }
    d_range
        .map(|d| {
            let model = ModelSpace::new(kind, d)?;
            let mut c = curvature_constants(model, Convention::LichneFullTrace)?;
            c.kappa += kappa_shift;
            let bound = lichnerowicz_bound_exact(&c)?;
            let lambda1 = first_eigenvalue(model)?;
            let equal = bound == BigRational::from_integer(BigInt::from(lambda1));
            Ok(SharpnessRow {
                d,
                bound,
                lambda1,
                equal,
            })
        })
        .collect()
}

/// `-d/dt ln(p_t(0, 0) - 1/vol)` by a centered difference of width `t/100`,
/// which tends to the first eigenvalue as `t` grows.
pub fn log_derivative_rate(model: ModelSpace, t: f64) -> Result<f64> {
    let trunc = SeriesTruncation::default();
    let vol = model
        .volume()
        .ok_or_else(|| Error::Unsupported("non-compact model".into()))?;
    let centered = |s: f64| -> Result<f64> {
        let p = match model.kind {
            ModelKind::Hopf => hopf_kernel_series(model.n, s, 0.0, 0.0, &trunc)?.value,
            ModelKind::QuaternionicHopf => quaternionic_kernel_series(model.n, s, 0.0, 0.0, &trunc)?.value,
            ModelKind::Heisenberg => unreachable!("volume() is None for Heisenberg"),
        };
        Ok(p - 1.0 / vol)
    };
    let h = t / 100.0;
    let (a, b) = (centered(t - h)?, centered(t + h)?);
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::accuracy("centered kernel is not positive", a.min(b), 0.0));
    }
    Ok(-(b.ln() - a.ln()) / (2.0 * h))
}
