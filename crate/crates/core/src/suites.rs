//! Verification suites shared by the command line and the acceptance tests.
//!
//! Each suite evaluates one family of identities or inequalities on a fixed
//! lattice and returns a table of the evaluations with pass/fail verdicts.

use crate::error::{Error, Result};
use crate::geometry_estimates::{
    bonnet_myers_diameter, cd_inequality_slack_exact, harnack_check, liyau_slack, phi_diameter, DiameterInputs,
    LiYauConstants,
};
use crate::heat_kernels::{
    heisenberg_mass, hopf_kernel_integral, hopf_kernel_series, hopf_mass, hopf_quaternionic_relation,
    hopf_series_terms, quaternionic_kernel_integral, quaternionic_kernel_series, quaternionic_mass,
    quaternionic_series_terms, QuadratureSpec, SeriesTruncation,
};
use crate::kfp::{
    bochner_min_slack, gradient_bound_check, hypocoercive_decay, invariance_battery, invariance_residual, k_eta,
    k_eta_min_slack, DecayMode, PhaseGrid, Potential,
};
use crate::model_spaces::{check_commutation, curvature_constants, Convention, ModelKind, ModelSpace, RadialPoint};
use crate::poly::{monomials_up_to, rat, ratio, rat_to_f64, Poly};
use crate::spectral_bounds::{check_sharpness, enumerate_spectrum, first_eigenvalue};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
}

impl Verdict {
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            relation: Relation::AtMost,
            threshold,
            passed: measured <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            relation: Relation::AtLeast,
            threshold,
            passed: measured >= threshold,
        }
    }

    /// Exact comparison; `measured` and `threshold` are shown for reference.
    pub fn exact(name: impl Into<String>, measured: f64, threshold: f64, holds: bool) -> Self {
        Self {
            name: name.into(),
            measured,
            relation: Relation::Equal,
            threshold,
            passed: holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    /// What is being exercised, in words.
    pub anchor: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub verdicts: Vec<Verdict>,
}

impl SuiteReport {
    fn new(suite: &str, anchor: &str, columns: &[&str]) -> Self {
        Self {
            suite: suite.into(),
            anchor: anchor.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn failures(&self) -> Vec<&Verdict> {
        self.verdicts.iter().filter(|v| !v.passed).collect()
    }
}

/// Named overrides of the default thresholds.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    pub fn new(overrides: BTreeMap<String, f64>) -> Self {
        Self(overrides)
    }

    pub fn get(&self, key: &str, default: f64) -> f64 {
        self.0.get(key).copied().unwrap_or(default)
    }

    pub fn overrides(&self) -> &BTreeMap<String, f64> {
        &self.0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl SuiteConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            tolerances: Tolerances::default(),
        }
    }

    fn tol(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key, default)
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

fn lattice3(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::with_capacity(27);
    for &x in a {
        for &y in b {
            for &z in c {
                out.push((x, y, z));
            }
        }
    }
    out
}

pub const REPRESENTATION_TIMES: [f64; 3] = [0.3, 0.8, 2.0];
pub const REPRESENTATION_RADII: [f64; 3] = [0.3, 0.8, 1.3];
pub const HOPF_ANGLES: [f64; 3] = [0.0, 1.1, 2.4];
pub const QUATERNIONIC_ANGLES: [f64; 3] = [0.2, 1.1, 2.4];

/// Series against integral representation of the Hopf kernels (`n = 1, 2`)
/// and the quaternionic kernel (`n = 1`) on 27-point lattices.
pub fn representations(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(
        "representations",
        "heat kernels on the Hopf fibrations: spectral series against integral representation",
        &["model", "n", "t", "r", "fiber", "series", "integral", "rel_diff"],
    );
    let trunc = SeriesTruncation::default();
    let quad = QuadratureSpec::default();
    let mut jobs = Vec::new();
    for n in [1, 2] {
        for p in lattice3(&REPRESENTATION_TIMES, &REPRESENTATION_RADII, &HOPF_ANGLES) {
            jobs.push((ModelKind::Hopf, n, p));
        }
    }
    for p in lattice3(&REPRESENTATION_TIMES, &REPRESENTATION_RADII, &QUATERNIONIC_ANGLES) {
        jobs.push((ModelKind::QuaternionicHopf, 1, p));
    }
    let evals: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|&(kind, n, (t, r, f))| match kind {
            ModelKind::Hopf => Ok((
                hopf_kernel_series(n, t, r, f, &trunc)?.value,
                hopf_kernel_integral(n, t, r, f, &quad)?.value,
            )),
            _ => Ok((
                quaternionic_kernel_series(n, t, r, f, &trunc)?.value,
                quaternionic_kernel_integral(n, t, r, f, &quad)?.value,
            )),
        })
        .collect::<Result<_>>()?;
    let (mut hopf, mut quat) = (Vec::new(), Vec::new());
    for (&(kind, n, (t, r, f)), &(s, i)) in jobs.iter().zip(&evals) {
        let d = rel_diff(s, i);
        let name = if kind == ModelKind::Hopf {
            hopf.push(d);
            "hopf"
        } else {
            quat.push(d);
            "quaternionic"
        };
        rep.rows.push(vec![json!(name), json!(n), json!(t), json!(r), json!(f), json!(s), json!(i), json!(d)]);
    }
    rep.verdicts.push(Verdict::at_most(
        "hopf max relative difference (n = 1, 2; 54 points)",
        max_of(hopf),
        cfg.tol("hopf_rel", 1e-8),
    ));
    rep.verdicts.push(Verdict::at_most(
        "quaternionic max relative difference (n = 1; 27 points)",
        max_of(quat),
        cfg.tol("quaternionic_rel", 1e-6),
    ));
    Ok(rep)
}

/// Relation between the quaternionic kernel and the fiber derivative of the
/// Hopf kernel of `S^{4n+1}`, at nine points.
pub fn relation(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(
        "relation",
        "quaternionic kernel from the fiber derivative of a Hopf kernel",
        &["n", "t", "r", "eta", "lhs", "rhs", "relative"],
    );
    let mut jobs = Vec::new();
    for &t in &[0.3, 0.8, 1.5] {
        for &(r, eta) in &[(0.4, 0.5), (0.9, 1.2), (1.2, 2.4)] {
            jobs.push((t, r, eta));
        }
    }
    let res: Vec<_> = jobs
        .par_iter()
        .map(|&(t, r, eta)| hopf_quaternionic_relation(1, t, r, eta))
        .collect::<Result<_>>()?;
    for (&(t, r, eta), x) in jobs.iter().zip(&res) {
        rep.rows.push(vec![json!(1), json!(t), json!(r), json!(eta), json!(x.lhs), json!(x.rhs), json!(x.relative)]);
    }
    rep.verdicts.push(Verdict::at_most(
        "max relative residual (9 points)",
        max_of(res.iter().map(|x| x.relative)),
        cfg.tol("relation_rel", 1e-6),
    ));
    Ok(rep)
}

/// Total mass of the kernel of each model for `n = 1`.
pub fn masses(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(
        "masses",
        "stochastic completeness: the heat semigroup preserves constants",
        &["model", "n", "t", "mass", "deviation"],
    );
    let tol = cfg.tol("mass_abs", 1e-6);
    let jobs: Vec<(&str, f64)> = ["heisenberg", "hopf", "quaternionic"]
        .iter()
        .flat_map(|&m| [0.1, 0.5, 2.0].map(|t| (m, t)))
        .collect();
    let res: Vec<f64> = jobs
        .par_iter()
        .map(|&(m, t)| match m {
            "heisenberg" => heisenberg_mass(1, t),
            "hopf" => hopf_mass(1, t),
            _ => quaternionic_mass(1, t),
        })
        .collect::<Result<_>>()?;
    for (&(m, t), &mass) in jobs.iter().zip(&res) {
        rep.rows.push(vec![json!(m), json!(1), json!(t), json!(mass), json!((mass - 1.0).abs())]);
    }
    for m in ["heisenberg", "hopf", "quaternionic"] {
        let worst = max_of(jobs.iter().zip(&res).filter(|(j, _)| j.0 == m).map(|(_, &x)| (x - 1.0).abs()));
        rep.verdicts.push(Verdict::at_most(format!("{m} max |mass - 1|"), worst, tol));
    }
    Ok(rep)
}

/// The first `count` eigenvalues of each fibration (`n = 1`), checked against
/// the exponents of the kernel series, and the first nonzero eigenvalues.
pub fn spectra(count: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(
        "spectra",
        "spectrum of the sub-Laplacian on the Hopf fibrations (n = 1)",
        &["model", "level", "eigenvalue", "m", "k"],
    );
    for (name, model, exps) in [
        ("hopf", ModelSpace::hopf(1)?, hopf_series_terms(1, 40, 40)),
        ("quaternionic", ModelSpace::quaternionic(1)?, quaternionic_series_terms(1, 40, 40)),
    ] {
        let levels = enumerate_spectrum(model, count)?;
        let top = levels.last().map_or(0, |e| e.eigenvalue);
        let listed: BTreeSet<u64> = levels.iter().map(|e| e.eigenvalue).collect();
        let series: BTreeSet<u64> = exps.iter().map(|e| e.2).filter(|&r| r <= top).collect();
        for (i, e) in levels.iter().enumerate() {
            rep.rows.push(vec![json!(name), json!(i), json!(e.eigenvalue), json!(e.m), json!(e.k)]);
        }
        rep.verdicts.push(Verdict::exact(
            format!("{name}: first {count} levels equal the series exponents up to {top}"),
            listed.len() as f64,
            series.len() as f64,
            listed == series,
        ));
    }
    let hopf = first_eigenvalue(ModelSpace::hopf(1)?)?;
    rep.verdicts.push(Verdict::exact("hopf n = 1 first eigenvalue", hopf as f64, 2.0, hopf == 2));
    let quat = first_eigenvalue(ModelSpace::quaternionic(1)?)?;
    rep.verdicts.push(Verdict::exact("quaternionic n = 1 first eigenvalue", quat as f64, 1.0, quat == 1));
    Ok(rep)
}

/// Eigenvalue bound against the first eigenvalue in exact arithmetic.
pub fn lichnerowicz(d_lo: usize, d_hi: usize) -> Result<SuiteReport> {
    if d_lo == 0 || d_lo > d_hi {
        return Err(Error::domain(format!("need 1 <= d_lo <= d_hi, got {d_lo}..{d_hi}")));
    }
    let mut rep = SuiteReport::new(
        "lichnerowicz",
        "first-eigenvalue lower bound and its sharpness on the Hopf fibrations",
        &["model", "d", "bound", "lambda1", "equal"],
    );
    for (name, kind) in [("hopf", ModelKind::Hopf), ("quaternionic", ModelKind::QuaternionicHopf)] {
        for row in check_sharpness(kind, d_lo..=d_hi)? {
            rep.rows.push(vec![
                json!(name),
                json!(row.d),
                json!(row.bound.to_string()),
                json!(row.lambda1),
                json!(row.equal),
            ]);
            rep.verdicts.push(Verdict::exact(
                format!("{name} d = {}: bound = lambda1", row.d),
                rat_to_f64(&row.bound),
                row.lambda1 as f64,
                row.equal,
            ));
        }
    }
    if d_lo == 1 {
        let b = &check_sharpness(ModelKind::Hopf, 1..=1)?[0].bound;
        rep.verdicts.push(Verdict::exact("hopf d = 1 bound", rat_to_f64(b), 2.0, *b == rat(2)));
    }
    Ok(rep)
}

/// A random polynomial of degree at most three with small integer coefficients.
pub fn random_cubic<R: Rng>(nvars: usize, rng: &mut R) -> Poly {
    let mut p = Poly::zero(nvars);
    for exps in monomials_up_to(nvars, 3) {
        let c = rng.gen_range(-3i64..=3);
        if c != 0 {
            p = &p + &Poly::monomial(exps, rat(c));
        }
    }
    p
}

/// Curvature-dimension slack on the Heisenberg groups `n = 1, 2`, in exact
/// arithmetic at rational points.
pub fn cd(cfg: &SuiteConfig, polys: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(
        "cd",
        "generalized curvature-dimension inequality on the Heisenberg group",
        &["n", "epsilon", "polynomials", "min_slack"],
    );
    let eps = [ratio(1, 10), rat(1), rat(10)];
    let mut worst = f64::INFINITY;
    for n in [1usize, 2] {
        let c = curvature_constants(ModelSpace::heisenberg(n)?, Convention::CdQuarterTrace)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(n as u64));
        let nv = 2 * n + 1;
        let samples: Vec<(Poly, Vec<BigRational>)> = (0..polys)
            .map(|_| {
                let f = random_cubic(nv, &mut rng);
                let pt = (0..nv).map(|_| ratio(rng.gen_range(-8..=8), 4)).collect();
                (f, pt)
            })
            .collect();
        for e in &eps {
            let slacks: Vec<BigRational> = samples
                .par_iter()
                .map(|(f, pt)| cd_inequality_slack_exact(f, pt, e, &c))
                .collect::<Result<_>>()?;
            let min = slacks.iter().min().cloned().unwrap_or_else(|| rat(0));
            let m = rat_to_f64(&min);
            worst = worst.min(m);
            rep.rows.push(vec![json!(n), json!(rat_to_f64(e)), json!(polys), json!(m)]);
        }
    }
    rep.verdicts.push(Verdict::at_least("min slack", worst, -cfg.tol("cd_slack", 1e-10)));
    Ok(rep)
}

/// Both commutation identities on every monomial of degree at most `degree`.
pub fn commutation(max_degree: u32) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(
        "commutation",
        "commutation of horizontal and vertical operators on the Heisenberg group",
        &["n", "monomials", "nonzero", "max_residual"],
    );
    for n in [1usize, 2] {
        let nv = 2 * n + 1;
        let mons = monomials_up_to(nv, max_degree);
        let res: Vec<f64> = mons
            .par_iter()
            .map(|e| check_commutation(n, &Poly::monomial(e.clone(), rat(1))))
            .collect::<Result<_>>()?;
        let nonzero = res.iter().filter(|&&r| r != 0.0).count();
        let worst = max_of(res.iter().copied());
        rep.rows.push(vec![json!(n), json!(mons.len()), json!(nonzero), json!(worst)]);
        rep.verdicts.push(Verdict::exact(
            format!("n = {n}: identities hold exactly on {} monomials", mons.len()),
            nonzero as f64,
            0.0,
            nonzero == 0,
        ));
    }
    Ok(rep)
}

fn heisenberg_liyau_constants(n: usize, alpha: f64) -> Result<LiYauConstants> {
    let c = curvature_constants(ModelSpace::heisenberg(n)?, Convention::CdQuarterTrace)?;
    Ok(LiYauConstants {
        alpha,
        n: c.horizontal_dim,
        kappa: c.kappa,
        rho1: c.rho1,
        rho2: c.rho2,
    })
}

/// Li-Yau slack for `u = p_{s+t}` on `H^3` over a lattice of points, times
/// and exponents.
pub fn liyau(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(
        "liyau",
        "Li-Yau gradient estimate on the Heisenberg group (rho1 = 0)",
        &["alpha", "s", "t", "r", "z", "slack"],
    );
    let mut jobs = Vec::new();
    for &alpha in &[3.0, 4.0] {
        for &s in &[0.2, 0.5] {
            for &t in &[0.3, 1.0, 2.0] {
                for &r in &[0.0, 0.5, 1.5] {
                    for &z in &[0.0, 0.4, 1.2] {
                        jobs.push((alpha, s, t, r, z));
                    }
                }
            }
        }
    }
    let res: Vec<f64> = jobs
        .par_iter()
        .map(|&(alpha, s, t, r, z)| {
            let c = heisenberg_liyau_constants(1, alpha)?;
            liyau_slack(1, s, t, RadialPoint::new(r, z), &c)
        })
        .collect::<Result<_>>()?;
    for (&(alpha, s, t, r, z), &sl) in jobs.iter().zip(&res) {
        rep.rows.push(vec![json!(alpha), json!(s), json!(t), json!(r), json!(z), json!(sl)]);
    }
    rep.verdicts.push(Verdict::at_least(
        format!("min slack ({} points)", jobs.len()),
        min_of(res),
        -cfg.tol("liyau_slack", 1e-6),
    ));
    Ok(rep)
}

/// Parabolic Harnack inequality between points of the first horizontal axis
/// of `H^3`, where the distance is `|x - y|`.
pub fn harnack(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(
        "harnack",
        "parabolic Harnack inequality on the Heisenberg group",
        &["alpha", "x", "y", "s", "t", "lhs", "rhs", "slack"],
    );
    let mut jobs = Vec::new();
    for &alpha in &[3.0, 4.0] {
        for &(s, t) in &[(0.3, 0.6), (0.5, 1.5), (1.0, 2.0)] {
            for &x in &[0.0, 0.5, 1.0, 2.0] {
                for &y in &[0.0, 0.5, 1.0] {
                    jobs.push((alpha, x, y, s, t));
                }
            }
        }
    }
    let res: Vec<_> = jobs
        .par_iter()
        .map(|&(alpha, x, y, s, t)| harnack_check(1, x, y, s, t, alpha))
        .collect::<Result<_>>()?;
    for (&(alpha, x, y, s, t), h) in jobs.iter().zip(&res) {
        rep.rows.push(vec![
            json!(alpha),
            json!(x),
            json!(y),
            json!(s),
            json!(t),
            json!(h.lhs),
            json!(h.rhs),
            json!(h.slack),
        ]);
    }
    rep.verdicts.push(Verdict::at_least(
        format!("min slack ({} points)", jobs.len()),
        min_of(res.iter().map(|h| h.slack)),
        -cfg.tol("harnack_slack", 1e-6),
    ));
    Ok(rep)
}

/// Quadrature against closed form for the diameter integral at random
/// `(alpha, D)` and at `(1, 1)`.
pub fn phi(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(
        "phi",
        "diameter bound from the ultracontractivity integral",
        &["alpha", "D", "quadrature", "closed_form", "rel_diff"],
    );
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pts: Vec<(f64, f64)> = (0..10)
        .map(|_| (rng.gen_range(0.2..5.0), rng.gen_range(0.1..10.0)))
        .collect();
    pts.push((1.0, 1.0));
    let mut worst: f64 = 0.0;
    for &(a, d) in &pts {
        let (q, c) = phi_diameter(a, d)?;
        let r = rel_diff(q, c);
        worst = worst.max(r);
        rep.rows.push(vec![json!(a), json!(d), json!(q), json!(c), json!(r)]);
    }
    rep.verdicts.push(Verdict::at_most(
        "max relative difference",
        worst,
        cfg.tol("phi_rel", 1e-8),
    ));
    let (q11, _) = phi_diameter(1.0, 1.0)?;
    rep.verdicts.push(Verdict::at_most(
        "|value at (1, 1) - 8.885766|",
        (q11 - 8.885766).abs(),
        cfg.tol("phi_anchor", 1e-6),
    ));
    Ok(rep)
}

/// General diameter formula at `beta = 3` against its closed `beta = 3` form.
pub fn diameter(cfg: &SuiteConfig, points: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(
        "diameter",
        "Bonnet-Myers type diameter bound",
        &["rho1", "rho2", "kappa", "n", "general", "beta3", "rel_diff"],
    );
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let inp = DiameterInputs {
            rho1: rng.gen_range(0.1..10.0),
            rho2: rng.gen_range(0.1..10.0),
            kappa: rng.gen_range(0.0..10.0),
            n: rng.gen_range(1..=8),
            beta: Some(3.0),
        };
        let b = bonnet_myers_diameter(&inp)?;
        let r = rel_diff(b.general, b.beta3);
        worst = worst.max(r);
        rep.rows.push(vec![
            json!(inp.rho1),
            json!(inp.rho2),
            json!(inp.kappa),
            json!(inp.n),
            json!(b.general),
            json!(b.beta3),
            json!(r),
        ]);
    }
    rep.verdicts.push(Verdict::at_most(
        format!("max relative difference ({points} points)"),
        worst,
        cfg.tol("diameter_rel", 1e-12),
    ));
    Ok(rep)
}

pub const K_ETA_VALUES: [f64; 4] = [0.1, 0.2, 0.3, 0.4];

/// Invariance of the Gibbs measure, the Bochner lower bound and the
/// `K(eta)` certificates for the kinetic Fokker-Planck operator.
pub fn kfp_identities(cfg: &SuiteConfig, pot: &Potential) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(
        "kfp-identities",
        "kinetic Fokker-Planck operator: invariant measure, Bochner bound and K(eta)",
        &["check", "parameter", "value"],
    );
    let battery = invariance_battery();
    let res: Vec<f64> = battery
        .par_iter()
        .map(|(_, f)| invariance_residual(pot, f.as_ref()))
        .collect::<Result<_>>()?;
    for ((name, _), r) in battery.iter().zip(&res) {
        rep.rows.push(vec![json!("invariance"), json!(name), json!(r)]);
    }
    rep.verdicts.push(Verdict::at_most(
        format!("max invariance residual ({} functions)", battery.len()),
        max_of(res),
        cfg.tol("invariance_abs", 1e-8),
    ));
    let slack = bochner_min_slack(pot, 200, cfg.seed);
    rep.rows.push(vec![json!("bochner"), json!("min slack, 200 samples"), json!(slack)]);
    rep.verdicts.push(Verdict::at_least("bochner min slack", slack, -cfg.tol("bochner_slack", 1e-9)));
    let mut prev = f64::NEG_INFINITY;
    let mut monotone = true;
    for (i, &eta) in K_ETA_VALUES.iter().enumerate() {
        let ke = k_eta(pot, eta)?;
        let cert = k_eta_min_slack(pot, eta, ke.k, 500, cfg.seed.wrapping_add(1 + i as u64));
        rep.rows.push(vec![json!("k_eta"), json!(eta), json!(ke.k)]);
        rep.rows.push(vec![json!("k_eta certificate"), json!(eta), json!(cert)]);
        rep.verdicts.push(Verdict::at_least(
            format!("K({eta}) certificate min slack"),
            cert,
            -cfg.tol("k_eta_slack", 1e-9),
        ));
        rep.verdicts.push(Verdict::at_least(format!("K({eta})"), ke.k, -0.5));
        monotone &= ke.k >= prev;
        prev = ke.k;
    }
    rep.verdicts.push(Verdict::exact("K(eta) nondecreasing in eta", prev, prev, monotone));
    Ok(rep)
}

/// Hypocoercive decay and the gradient bound for `V = x^2/2` on an
/// `n x n` phase-space grid, with the gradient bound's negative control.
pub fn hypocoercivity(cfg: &SuiteConfig, n: usize, eta: f64, t_end: f64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(
        "hypocoercivity",
        "hypocoercive decay of the twisted functional and the gradient bound",
        &["quantity", "value"],
    );
    let pot = Potential::quadratic(1.0)?;
    let grid = PhaseGrid::for_potential(&pot, n, n)?;
    let d = hypocoercive_decay(&pot, None, t_end, &grid, DecayMode::Poincare, eta)?;
    for (k, v) in [
        ("kappa", d.kappa),
        ("rho1", d.rho1),
        ("rho2", d.rho2),
        ("lambda_predicted", d.lambda_predicted),
        ("lambda_fitted", d.lambda_fitted),
        ("max_increase", d.max_increase),
        ("mass_drift", d.mass_drift),
    ] {
        rep.rows.push(vec![json!(k), json!(v)]);
    }
    rep.verdicts.push(Verdict::at_least(
        "fitted rate / predicted rate",
        d.lambda_fitted / d.lambda_predicted,
        cfg.tol("decay_ratio", 0.95),
    ));
    let f0 = |x: &crate::jet::Jet2, v: &crate::jet::Jet2| &x.sin() * &(v * v).scale(-1.0).exp();
    let g = gradient_bound_check(&pot, &f0, 0.5, &grid, None)?;
    rep.rows.push(vec![json!("gradient_bound_k"), json!(g.k)]);
    rep.rows.push(vec![json!("gradient_bound_interior_min"), json!(g.interior_min)]);
    rep.verdicts.push(Verdict::at_least(
        "gradient bound interior relative slack",
        g.interior_min,
        -cfg.tol("gradient_slack", 1e-4),
    ));
    let neg = gradient_bound_check(&pot, &f0, 0.5, &grid, Some(g.k - 1.0))?;
    rep.rows.push(vec![json!("negative_control_interior_min"), json!(neg.interior_min)]);
    rep.verdicts.push(Verdict::at_most(
        "negative control (K - 1) shows a violation",
        neg.interior_min,
        -1e-2,
    ));
    Ok(rep)
}
