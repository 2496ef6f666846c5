//! Command-line front end: argument parsing, dispatch and report output.

mod output;

pub use output::{write_atomic, Report, Table};

use crate::error::{Error, Result};
use crate::heat_kernels::{
    heisenberg_kernel, hopf_kernel_integral, hopf_kernel_series, quaternionic_kernel_integral,
    quaternionic_kernel_series, KernelEvaluation, QuadratureSpec, SeriesTruncation,
};
use crate::kfp::{
    gradient_bound_check, hypocoercive_decay, invariance_battery, invariance_residual, k_eta, k_eta_min_slack,
    kfp_apply, lyapunov_check, named_test_function, twisted_gradient, DecayMode, PhaseGrid, Potential,
    TEST_FUNCTION_NAMES,
};
use crate::model_spaces::{ModelKind, ModelSpace};
use crate::spectral_bounds::enumerate_spectrum;
use crate::suites::{self, SuiteConfig, Tolerances, Verdict};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

pub const THREADS_ENV: &str = "HYPOLAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "hypolab", version, about = "Heat kernels, spectral bounds and hypocoercive decay on model foliations")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Threshold override, `name=value`; repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate a heat kernel by series, integral or both.
    Kernel(KernelArgs),
    /// List the lowest eigenvalues of a compact model.
    Spectrum(SpectrumArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Kinetic Fokker-Planck tools.
    Kfp {
        #[command(subcommand)]
        command: KfpCommand,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Heisenberg,
    Hopf,
    Quaternionic,
}

impl ModelArg {
    fn kind(self) -> ModelKind {
        match self {
            ModelArg::Heisenberg => ModelKind::Heisenberg,
            ModelArg::Hopf => ModelKind::Hopf,
            ModelArg::Quaternionic => ModelKind::QuaternionicHopf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Series,
    Integral,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KernelArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long)]
    pub t: f64,
    #[arg(long)]
    pub r: f64,
    /// Fiber coordinate: `z`, `theta` or `eta` depending on the model.
    #[arg(long, visible_aliases = ["z", "eta"], default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteArg {
    Lichnerowicz,
    Cd,
    Commutation,
    Masses,
    Representations,
    Relation,
    Liyau,
    Harnack,
    Diameter,
    Phi,
    Spectra,
    KfpIdentities,
    Hypocoercivity,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: SuiteArg,
    /// Dimension range `lo..hi` (inclusive) for the eigenvalue bound.
    #[arg(long, default_value = "1..5", value_parser = parse_range)]
    pub d: (usize, usize),
    /// Random polynomials per dimension for the curvature-dimension suite.
    #[arg(long, default_value_t = 100)]
    pub polys: usize,
    /// Parameter samples for the diameter suite.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Largest monomial degree for the commutation suite.
    #[arg(long, default_value_t = 6)]
    pub degree: u32,
    /// Levels for the spectra suite.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    /// Grid size per axis for the hypocoercivity suite.
    #[arg(long, default_value_t = 128)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.25)]
    pub eta: f64,
    #[arg(long = "T", default_value_t = 10.0)]
    pub t_end: f64,
    #[command(flatten)]
    pub potential: PotentialArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    Quadratic,
    Perturbed,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PotentialArgs {
    /// `k x^2/2`, or `k x^2/2 + a cos x` when perturbed.
    #[arg(long, value_enum, default_value_t = PotentialKind::Quadratic)]
    pub potential: PotentialKind,
    #[arg(long = "k", default_value_t = 1.0)]
    pub stiffness: f64,
    #[arg(long = "a", default_value_t = 0.3)]
    pub amplitude: f64,
}

impl PotentialArgs {
    fn build(&self) -> Result<Potential> {
        match self.potential {
            PotentialKind::Quadratic => Potential::quadratic(self.stiffness),
            PotentialKind::Perturbed => Potential::perturbed(self.stiffness, self.amplitude),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Poincare,
    Logsob,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum KfpCommand {
    /// Apply the operator to a named test function at a point.
    Apply {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value = "sin-gauss", value_parser = clap::builder::PossibleValuesParser::new(TEST_FUNCTION_NAMES))]
        f: String,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        v: f64,
    },
    /// Integral of the operator against the Gibbs measure over the test battery.
    Invariance {
        #[command(flatten)]
        potential: PotentialArgs,
    },
    /// The constant `K(eta)` with a sampled certificate.
    Keta {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4")]
        eta: Vec<f64>,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Decay of the twisted functional along the grid semigroup.
    Decay {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 0.25)]
        eta: f64,
        #[arg(long = "T", default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Poincare)]
        mode: ModeArg,
    },
    /// Both sides of the gradient bound at time `t`.
    Gradbound {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value = "sin-gauss", value_parser = clap::builder::PossibleValuesParser::new(TEST_FUNCTION_NAMES))]
        f: String,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Curvature constant to test instead of the computed one.
        #[arg(long = "K")]
        k: Option<f64>,
    },
    /// Lyapunov constants of `1 + x^2 + v^2` on the grid.
    Lyapunov {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
}

fn parse_tolerance(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = v.parse().map_err(|e| format!("bad tolerance value `{v}`: {e}"))?;
    if !(v.is_finite() && v >= 0.0) {
        return Err(format!("tolerance must be finite and non-negative, got {v}"));
    }
    Ok((k.to_string(), v))
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("bad bound `{x}`: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok((parse(a)?, parse(b)?))
        }
        None => {
            let d = parse(s)?;
            Ok((d, d))
        }
    }
}

fn params_of<T: Serialize>(cmd: &T, cfg: &RunConfig) -> serde_json::Value {
    let mut p = serde_json::to_value(cmd).expect("arguments serialize");
    if let Some(obj) = p.as_object_mut() {
        obj.insert("format".into(), json!(cfg.format));
        obj.insert("tolerances".into(), json!(tolerances(cfg).overrides()));
    }
    p
}

fn tolerances(cfg: &RunConfig) -> Tolerances {
    Tolerances::new(cfg.tolerances.iter().cloned().collect::<BTreeMap<_, _>>())
}

fn eval_row(e: &KernelEvaluation) -> (f64, f64) {
    (e.value, e.error_estimate)
}

fn kernel(a: &KernelArgs, cfg: &RunConfig) -> Result<Report> {
    let model = ModelSpace::new(a.model.kind(), a.n)?;
    let trunc = SeriesTruncation::default();
    let quad = QuadratureSpec::default();
    let series = |m: ModelKind| -> Result<KernelEvaluation> {
        match m {
            ModelKind::Hopf => hopf_kernel_series(a.n, a.t, a.r, a.theta, &trunc),
            ModelKind::QuaternionicHopf => quaternionic_kernel_series(a.n, a.t, a.r, a.theta, &trunc),
            ModelKind::Heisenberg => Err(Error::Unsupported("the Heisenberg kernel has no spectral series".into())),
        }
    };
    let integral = |m: ModelKind| -> Result<KernelEvaluation> {
        match m {
            ModelKind::Hopf => hopf_kernel_integral(a.n, a.t, a.r, a.theta, &quad),
            ModelKind::QuaternionicHopf => quaternionic_kernel_integral(a.n, a.t, a.r, a.theta, &quad),
            ModelKind::Heisenberg => heisenberg_kernel(a.n, a.t, a.r, a.theta, &quad),
        }
    };
    let mut t = Table::new(&["model", "n", "t", "r", "fiber", "method", "value", "error_estimate"]);
    let base = || vec![json!(a.model), json!(a.n), json!(a.t), json!(a.r), json!(a.theta)];
    let push = |t: &mut Table, method: &str, (v, e): (f64, f64)| {
        let mut row = base();
        row.extend([json!(method), json!(v), json!(e)]);
        t.rows.push(row);
    };
    let s = match a.method {
        MethodArg::Series | MethodArg::Both => Some(eval_row(&series(model.kind)?)),
        MethodArg::Integral => None,
    };
    let i = match a.method {
        MethodArg::Integral | MethodArg::Both => Some(eval_row(&integral(model.kind)?)),
        MethodArg::Series => None,
    };
    if let Some(s) = s {
        push(&mut t, "series", s);
    }
    if let Some(i) = i {
        push(&mut t, "integral", i);
    }
    let mut rep = Report::new(
        "kernel",
        params_of(a, cfg),
        cfg.seed,
        "heat kernel of the sub-Laplacian on a model foliation",
    )
    .with_table(t);
    if let (Some(s), Some(i)) = (s, i) {
        let rel = (s.0 - i.0).abs() / s.0.abs().max(i.0.abs());
        rep.results.push(json!({ "series": s.0, "integral": i.0, "relative_difference": rel }));
        let default = if model.kind == ModelKind::Hopf { 1e-8 } else { 1e-6 };
        rep.verdicts.push(Verdict::at_most(
            "series and integral agree",
            rel,
            tolerances(cfg).get("kernel_rel", default),
        ));
    }
    Ok(rep)
}

fn spectrum(a: &SpectrumArgs, cfg: &RunConfig) -> Result<Report> {
    let model = ModelSpace::new(a.model.kind(), a.n)?;
    let mut t = Table::new(&["level", "eigenvalue", "m", "k"]);
    for (i, e) in enumerate_spectrum(model, a.count)?.iter().enumerate() {
        t.rows.push(vec![json!(i), json!(e.eigenvalue), json!(e.m), json!(e.k)]);
    }
    Ok(Report::new(
        "spectrum",
        params_of(a, cfg),
        cfg.seed,
        "spectrum of the sub-Laplacian on a Hopf fibration",
    )
    .with_table(t))
}

fn verify(a: &VerifyArgs, cfg: &RunConfig) -> Result<Report> {
    let sc = SuiteConfig {
        seed: cfg.seed,
        tolerances: tolerances(cfg),
    };
    let s = match a.suite {
        SuiteArg::Lichnerowicz => suites::lichnerowicz(a.d.0, a.d.1)?,
        SuiteArg::Cd => suites::cd(&sc, a.polys)?,
        SuiteArg::Commutation => suites::commutation(a.degree)?,
        SuiteArg::Masses => suites::masses(&sc)?,
        SuiteArg::Representations => suites::representations(&sc)?,
        SuiteArg::Relation => suites::relation(&sc)?,
        SuiteArg::Liyau => suites::liyau(&sc)?,
        SuiteArg::Harnack => suites::harnack(&sc)?,
        SuiteArg::Diameter => suites::diameter(&sc, a.points)?,
        SuiteArg::Phi => suites::phi(&sc)?,
        SuiteArg::Spectra => suites::spectra(a.count)?,
        SuiteArg::KfpIdentities => suites::kfp_identities(&sc, &a.potential.build()?)?,
        SuiteArg::Hypocoercivity => suites::hypocoercivity(&sc, a.grid, a.eta, a.t_end)?,
    };
    Ok(Report::from_suite("verify", params_of(a, cfg), cfg.seed, s))
}

fn kfp(c: &KfpCommand, cfg: &RunConfig) -> Result<Report> {
    let params = params_of(c, cfg);
    let tol = tolerances(cfg);
    match c {
        KfpCommand::Apply { potential, f, x, v } => {
            let pot = potential.build()?;
            let func = named_test_function(f).ok_or_else(|| Error::domain(format!("unknown test function {f}")))?;
            let lf = kfp_apply(&pot, func.as_ref(), *x, *v);
            let (e1, e2) = twisted_gradient(func.as_ref(), *x, *v);
            let mut t = Table::new(&["f", "x", "v", "Lf", "e1f", "e2f"]);
            t.rows.push(vec![json!(f), json!(x), json!(v), json!(lf), json!(e1), json!(e2)]);
            Ok(Report::new("kfp apply", params, cfg.seed, "kinetic Fokker-Planck generator").with_table(t))
        }
        KfpCommand::Invariance { potential } => {
            let pot = potential.build()?;
            let mut t = Table::new(&["function", "residual"]);
            let mut worst: f64 = 0.0;
            for (name, f) in invariance_battery() {
                let r = invariance_residual(&pot, f.as_ref())?;
                worst = worst.max(r);
                t.rows.push(vec![json!(name), json!(r)]);
            }
            let mut rep = Report::new(
                "kfp invariance",
                params,
                cfg.seed,
                "invariance of the Gibbs measure under the kinetic Fokker-Planck generator",
            )
            .with_table(t);
            rep.verdicts
                .push(Verdict::at_most("max invariance residual", worst, tol.get("invariance_abs", 1e-8)));
            Ok(rep)
        }
        KfpCommand::Keta { potential, eta, samples } => {
            let pot = potential.build()?;
            let mut t = Table::new(&["eta", "k"]);
            let mut rep = Report::new(
                "kfp keta",
                params,
                cfg.seed,
                "twisted Bochner bound: the constant K(eta)",
            );
            let mut objects = Vec::new();
            for (i, &e) in eta.iter().enumerate() {
                let ke = k_eta(&pot, e)?;
                objects.push(serde_json::to_value(ke).expect("serializes"));
                let cert = k_eta_min_slack(&pot, e, ke.k, *samples, cfg.seed.wrapping_add(i as u64));
                t.rows.push(vec![json!(e), json!(ke.k)]);
                rep.verdicts.push(Verdict::at_least(
                    format!("K({e}) certificate min slack"),
                    cert,
                    -tol.get("k_eta_slack", 1e-9),
                ));
                rep.verdicts.push(Verdict::at_least(format!("K({e})"), ke.k, -0.5));
            }
            rep.table = t;
            rep.results = objects;
            Ok(rep)
        }
        KfpCommand::Decay {
            potential,
            eta,
            t_end,
            grid,
            mode,
        } => {
            let pot = potential.build()?;
            let g = PhaseGrid::for_potential(&pot, *grid, *grid)?;
            let mode = match mode {
                ModeArg::Poincare => DecayMode::Poincare,
                ModeArg::Logsob => DecayMode::Logsob,
            };
            let d = hypocoercive_decay(&pot, None, *t_end, &g, mode, *eta)?;
            let mut t = Table::new(&["t", "functional"]);
            t.rows = d.times.iter().zip(&d.functional).map(|(a, b)| vec![json!(a), json!(b)]).collect();
            let mut rep = Report::new(
                "kfp decay",
                params,
                cfg.seed,
                "hypocoercive exponential decay of the twisted functional",
            );
            rep.verdicts.push(Verdict::at_least(
                "fitted rate / predicted rate",
                d.lambda_fitted / d.lambda_predicted,
                tol.get("decay_ratio", 0.95),
            ));
            rep.results.push(serde_json::to_value(&d).expect("report serializes"));
            rep.table = t;
            Ok(rep)
        }
        KfpCommand::Gradbound {
            potential,
            f,
            t,
            grid,
            k,
        } => {
            let pot = potential.build()?;
            let func = named_test_function(f).ok_or_else(|| Error::domain(format!("unknown test function {f}")))?;
            let g = PhaseGrid::for_potential(&pot, *grid, *grid)?;
            let r = gradient_bound_check(&pot, func.as_ref(), *t, &g, *k)?;
            let mut rep = Report::new(
                "kfp gradbound",
                params,
                cfg.seed,
                "pointwise gradient bound for the kinetic Fokker-Planck semigroup",
            );
            rep.verdicts.push(Verdict::at_least(
                "interior relative slack",
                r.interior_min,
                -tol.get("gradient_slack", 1e-4),
            ));
            let v = serde_json::to_value(&r).expect("report serializes");
            let mut tab = Table::new(&["quantity", "value"]);
            for key in ["t", "k", "scale", "interior_min", "overall_min"] {
                tab.rows.push(vec![json!(key), v[key].clone()]);
            }
            rep.results.push(v);
            rep.table = tab;
            Ok(rep)
        }
        KfpCommand::Lyapunov { potential, grid } => {
            let pot = potential.build()?;
            let g = PhaseGrid::for_potential(&pot, *grid, *grid)?;
            let r = lyapunov_check(&pot, &g);
            let mut rep = Report::new(
                "kfp lyapunov",
                params,
                cfg.seed,
                "Lyapunov function for the kinetic Fokker-Planck generator",
            );
            rep.verdicts.push(Verdict::at_least("min W", r.min_w, 1.0));
            rep.verdicts.push(Verdict::exact("C finite", r.c, r.c, r.c.is_finite()));
            let v = serde_json::to_value(r).expect("report serializes");
            let mut tab = Table::new(&["quantity", "value"]);
            for key in ["min_w", "generator_constant", "gradient_constant", "c"] {
                tab.rows.push(vec![json!(key), v[key].clone()]);
            }
            rep.results.push(v);
            rep.table = tab;
            Ok(rep)
        }
    }
}

/// Executes a parsed configuration and returns its report.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    match &cfg.command {
        Command::Kernel(a) => kernel(a, cfg),
        Command::Spectrum(a) => spectrum(a, cfg),
        Command::Verify(a) => verify(a, cfg),
        Command::Kfp { command } => kfp(command, cfg),
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got `{v}`"))?;
    // a pool built earlier in the same process keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args`, runs the command and writes the report; returns the exit
/// status: 0 when every verdict passes, 1 on a failed verdict or evaluation
/// error, 2 on a usage error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return 2;
    }
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let text = report.render(cfg.format);
    match &cfg.output {
        Some(p) => {
            if let Err(e) = write_atomic(p, &text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return 1;
            }
        }
        None => {
            use std::io::Write;
            if let Err(e) = std::io::stdout().lock().write_all(text.as_bytes()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: cannot write report: {e}");
                    return 1;
                }
            }
        }
    }
    for v in report.verdicts.iter().filter(|v| !v.passed) {
        eprintln!(
            "FAIL {}: measured {:e}, required {} {:e}",
            v.name,
            v.measured,
            serde_json::to_value(v.relation).ok().and_then(|r| r.as_str().map(String::from)).unwrap_or_default(),
            v.threshold
        );
    }
    i32::from(!report.passed())
}

pub fn main() -> i32 {
    main_with_args(std::env::args_os())
}
