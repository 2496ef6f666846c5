//! Jacobi and Gegenbauer polynomials and the Gaussian theta function.
//!
//! All polynomial evaluations go through the three-term recurrence in the
//! degree. Gamma-function ratios are formed from log-gamma differences.

use crate::error::{Error, Result};
use crate::jet::Jet;
use std::f64::consts::PI;

/// Parameters of the Jacobi polynomial `P_m^{(alpha, beta)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    pub degree: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiParams {
    pub fn new(degree: usize, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self {
            degree,
            alpha,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > -1.0 && self.beta > -1.0) {
            return Err(Error::domain(format!(
                "Jacobi parameters must exceed -1, got alpha={}, beta={}",
                self.alpha, self.beta
            )));
        }
        Ok(())
    }
}

/// Parameters of the Gegenbauer polynomial `C_m^{(nu)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GegenbauerParams {
    pub degree: usize,
    pub order: f64,
}

impl GegenbauerParams {
    pub fn new(degree: usize, order: f64) -> Result<Self> {
        if !(order > 0.0) {
            return Err(Error::domain(format!(
                "Gegenbauer order must be positive, got {order}"
            )));
        }
        Ok(Self { degree, order })
    }
}

/// Arguments of the theta function `V(t, delta)`; the lattice sum runs over
/// `|k| <= k_cutoff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaArgs {
    pub t: f64,
    pub delta: f64,
    pub k_cutoff: usize,
}

impl ThetaArgs {
    /// Chooses the cutoff so that the first dropped term is below `1e-18` of
    /// the running sum.
    pub fn auto(t: f64, delta: f64) -> Result<Self> {
        check_time(t)?;
        let d = reduce_angle(delta);
        let term = |k: i64| (-(d - 2.0 * PI * k as f64).powi(2) / (4.0 * t)).exp();
        let mut sum = term(0);
        let mut k = 1i64;
        loop {
            let next = term(k).max(term(-k));
            if next < 1e-18 * sum || k > 100_000 {
                break;
            }
            sum += term(k) + term(-k);
            k += 1;
        }
        Ok(Self {
            t,
            delta,
            k_cutoff: (k - 1).max(1) as usize,
        })
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("time must be positive, got {t}")));
    }
    Ok(())
}

/// Maps an angle into `[-pi, pi]`.
fn reduce_angle(delta: f64) -> f64 {
    delta - 2.0 * PI * (delta / (2.0 * PI)).round()
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `P_m^{(alpha, beta)}(x)` for `|x| <= 1`.
pub fn jacobi_p(params: JacobiParams, x: f64) -> Result<f64> {
    params.validate()?;
    if !(x.abs() <= 1.0) {
        return Err(Error::domain(format!("Jacobi argument must lie in [-1,1], got {x}")));
    }
    Ok(*jacobi_all(params.alpha, params.beta, params.degree, x)
        .last()
        .expect("nonempty"))
}

/// `[P_0, ..., P_max_degree]` at `x`; no domain check on `x`.
pub fn jacobi_all(alpha: f64, beta: f64, max_degree: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(1.0);
    if max_degree == 0 {
        return out;
    }
    let ab = alpha + beta;
    out.push((alpha + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0);
    for n in 1..max_degree {
        let nf = n as f64;
        let c = 2.0 * nf + ab;
        let a1 = 2.0 * (nf + 1.0) * (nf + ab + 1.0) * c;
        let a2 = (c + 1.0) * (alpha * alpha - beta * beta);
        let a3 = c * (c + 1.0) * (c + 2.0);
        let a4 = 2.0 * (nf + alpha) * (nf + beta) * (c + 2.0);
        let next = ((a2 + a3 * x) * out[n] - a4 * out[n - 1]) / a1;
        out.push(next);
    }
    out
}

/// `ln` of the orthogonality constant `int_{-1}^{1} P_m^2 (1-x)^alpha (1+x)^beta dx`.
pub fn ln_jacobi_norm(params: JacobiParams) -> Result<f64> {
    params.validate()?;
    let (a, b) = (params.alpha, params.beta);
    let m = params.degree as f64;
    let ln2 = std::f64::consts::LN_2;
    if params.degree == 0 {
        return Ok((a + b + 1.0) * ln2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
            - ln_gamma(a + b + 2.0));
    }
    Ok((a + b + 1.0) * ln2 - (2.0 * m + a + b + 1.0).ln() + ln_gamma(m + a + 1.0)
        + ln_gamma(m + b + 1.0)
        - ln_gamma(m + 1.0)
        - ln_gamma(m + a + b + 1.0))
}

/// Orthogonality constant of `P_m^{(alpha, beta)}`. The fiber weight exponent
/// of the Hopf expansion is `params.beta = |k|` with `params.alpha = n - 1`.
pub fn jacobi_norm(params: JacobiParams) -> Result<f64> {
    ln_jacobi_norm(params).map(f64::exp)
}

/// `C_m^{(nu)}(x)` for `|x| <= 1`.
pub fn gegenbauer_c(params: GegenbauerParams, x: f64) -> Result<f64> {
    if !(params.order > 0.0) {
        return Err(Error::domain("Gegenbauer order must be positive"));
    }
    if !(x.abs() <= 1.0) {
        return Err(Error::domain(format!(
            "Gegenbauer argument must lie in [-1,1], got {x}"
        )));
    }
    Ok(*gegenbauer_all(params.order, params.degree, x)
        .last()
        .expect("nonempty"))
}

/// `[C_0, ..., C_max_degree]` at any real `x` (the polynomials are entire).
pub fn gegenbauer_all(nu: f64, max_degree: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(1.0);
    if max_degree == 0 {
        return out;
    }
    out.push(2.0 * nu * x);
    for m in 1..max_degree {
        let mf = m as f64;
        let next = (2.0 * (mf + nu) * x * out[m] - (mf + 2.0 * nu - 1.0) * out[m - 1]) / (mf + 1.0);
        out.push(next);
    }
    out
}

/// `[C_m(cosh a) e^{-m a}]_{m <= max_degree}` for `a >= 0`.
///
/// The scaled values stay of polynomial size in `m`, which keeps the
/// continuation of the sphere kernel to arguments above one free of overflow.
pub fn gegenbauer_scaled_cosh(nu: f64, max_degree: usize, a: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(1.0);
    if max_degree == 0 {
        return out;
    }
    let q = (-2.0 * a).exp();
    let half_sum = 0.5 * (1.0 + q); // cosh(a) e^{-a}
    out.push(2.0 * nu * half_sum);
    for m in 1..max_degree {
        let mf = m as f64;
        let next = (2.0 * (mf + nu) * half_sum * out[m] - (mf + 2.0 * nu - 1.0) * q * out[m - 1])
            / (mf + 1.0);
        out.push(next);
    }
    out
}

/// `V(t, delta) = (4 pi t)^{-1/2} sum_{|k| <= K} exp(-(delta - 2 k pi)^2 / 4t)`.
pub fn theta_v(args: ThetaArgs) -> Result<f64> {
    check_time(args.t)?;
    let d = reduce_angle(args.delta);
    let k = args.k_cutoff as i64;
    // sum from the smallest terms inwards
    let mut sum = 0.0;
    for j in (1..=k).rev() {
        let jf = 2.0 * PI * j as f64;
        sum += (-(d - jf).powi(2) / (4.0 * args.t)).exp();
        sum += (-(d + jf).powi(2) / (4.0 * args.t)).exp();
    }
    sum += (-d * d / (4.0 * args.t)).exp();
    Ok(sum / (4.0 * PI * args.t).sqrt())
}

/// Taylor jet of `delta -> V(t, delta)` of the given order at `args.delta`.
pub fn theta_v_jet(args: ThetaArgs, order: usize) -> Result<Jet> {
    check_time(args.t)?;
    let d = reduce_angle(args.delta);
    let k = args.k_cutoff as i64;
    let mut acc = Jet::constant(0.0, order);
    for j in -k..=k {
        let shift = Jet::variable(d - 2.0 * PI * j as f64, order);
        let e = (&shift * &shift).scale(-1.0 / (4.0 * args.t)).exp();
        acc = &acc + &e;
    }
    Ok(acc.scale(1.0 / (4.0 * PI * args.t).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{adaptive, GaussLegendre};

    /// Generalized binomial coefficient `binom(a, j)` for real `a`.
    fn binom(a: f64, j: usize) -> f64 {
        (0..j).fold(1.0, |acc, i| acc * (a - i as f64) / (i as f64 + 1.0))
    }

    /// Explicit expansion of the Rodrigues formula:
    /// `P_m = sum_s binom(m+a, m-s) binom(m+b, s) ((x-1)/2)^s ((x+1)/2)^{m-s}`.
    fn rodrigues(m: usize, a: f64, b: f64, x: f64) -> f64 {
        (0..=m)
            .map(|s| {
                binom(m as f64 + a, m - s)
                    * binom(m as f64 + b, s)
                    * ((x - 1.0) / 2.0).powi(s as i32)
                    * ((x + 1.0) / 2.0).powi((m - s) as i32)
            })
            .sum()
    }

    #[test]
    fn jacobi_examples() {
        let p = |m, a, b, x| jacobi_p(JacobiParams::new(m, a, b).unwrap(), x).unwrap();
        assert_eq!(p(0, 1.0, 2.0, 0.3), 1.0);
        assert!((p(1, 0.0, 0.0, 0.5) - rodrigues(1, 0.0, 0.0, 0.5)).abs() < 1e-15);
        assert!((p(1, 0.0, 0.0, 0.5) - 0.5).abs() < 1e-15);
        assert!(rodrigues(1, 1.0, 1.0, 0.0).abs() < 1e-15);
        assert!(p(1, 1.0, 1.0, 0.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_domain_errors() {
        assert!(JacobiParams::new(2, -1.0, 0.0).is_err());
        let p = JacobiParams::new(2, 0.0, 0.0).unwrap();
        assert!(jacobi_p(p, 1.5).is_err());
    }

    #[test]
    fn recurrence_matches_rodrigues_at_chebyshev_points() {
        for &(a, b) in &[(0.0, 0.0), (1.0, 3.0), (0.5, -0.5), (2.0, 7.0), (-0.3, 1.7)] {
            for m in 0..=10 {
                for j in 0..21 {
                    let x = ((2 * j + 1) as f64 * PI / 42.0).cos();
                    let r = rodrigues(m, a, b, x);
                    let v = jacobi_all(a, b, m, x)[m];
                    let scale = r.abs().max(1.0);
                    assert!((r - v).abs() < 1e-12 * scale, "m={m} a={a} b={b} x={x}");
                }
            }
        }
    }

    #[test]
    fn orthogonality_integer_weights() {
        let gl = GaussLegendre::new(40);
        for &(a, b) in &[(0i32, 0i32), (1, 2), (2, 5), (0, 3)] {
            for m in 0..=15usize {
                for l in 0..m {
                    let v = gl.integrate(-1.0, 1.0, |x| {
                        let p = jacobi_all(a as f64, b as f64, 15, x);
                        p[m] * p[l] * (1.0 - x).powi(a) * (1.0 + x).powi(b)
                    });
                    assert!(v.abs() < 1e-10, "m={m} l={l} a={a} b={b}: {v}");
                }
            }
        }
    }

    #[test]
    fn norm_examples_and_quadrature() {
        let nm = |m, a, b| jacobi_norm(JacobiParams::new(m, a, b).unwrap()).unwrap();
        let gl = GaussLegendre::new(40);
        let ones = gl.integrate(-1.0, 1.0, |_| 1.0);
        assert!((ones - 2.0).abs() < 1e-14);
        assert!((nm(0, 0.0, 0.0) - 2.0).abs() < 1e-13);
        let lin = gl.integrate(-1.0, 1.0, |x| 1.0 + x);
        assert!((lin - 2.0).abs() < 1e-14);
        assert!((nm(0, 0.0, 1.0) - 2.0).abs() < 1e-13);
        for n in 1..=3 {
            for k in 0..=3 {
                let (a, b) = ((n - 1) as f64, k as f64);
                for m in 0..=20 {
                    let q = adaptive(
                        |x| {
                            let p = jacobi_all(a, b, m, x)[m];
                            p * p * (1.0 - x).powf(a) * (1.0 + x).powf(b)
                        },
                        -1.0,
                        1.0,
                        0.0,
                        1e-14,
                        2000,
                    );
                    let f = nm(m, a, b);
                    assert!((q.value - f).abs() < 1e-12 * f, "n={n} k={k} m={m}");
                }
            }
        }
    }

    #[test]
    fn jacobi_ode_residual() {
        // (1-x^2) P'' + [(k+1-n) - (k+1+n) x] P' = -m (m+n+k) P
        use crate::fd::{d1_o6, d2_o6};
        let h = 1e-2;
        for n in 1..=3usize {
            for k in 0..=3usize {
                for m in 0..=6usize {
                    let p = |x: f64| jacobi_all((n - 1) as f64, k as f64, m, x)[m];
                    for &x in &[-0.7, -0.2, 0.1, 0.55, 0.8] {
                        let (d1, d2) = (d1_o6(p, x, h), d2_o6(p, x, h));
                        let (nf, kf, mf) = (n as f64, k as f64, m as f64);
                        let lhs = (1.0 - x * x) * d2 + ((kf + 1.0 - nf) - (kf + 1.0 + nf) * x) * d1;
                        let rhs = -mf * (mf + nf + kf) * p(x);
                        assert!((lhs - rhs).abs() < 1e-8 * p(x).abs().max(1.0), "n={n} k={k} m={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn high_degree_is_stable() {
        let p = jacobi_all(0.0, 0.0, 500, 1.0);
        assert!((p[500] - 1.0).abs() < 1e-12);
        let p = jacobi_all(2.0, 3.0, 200, 0.3);
        assert!(p[200].is_finite() && p[200].abs() < 1e3);
        assert!(ln_jacobi_norm(JacobiParams::new(500, 5.0, 300.0).unwrap())
            .unwrap()
            .is_finite());
    }

    #[test]
    fn gegenbauer_examples() {
        let c = |m, nu, x| gegenbauer_c(GegenbauerParams::new(m, nu).unwrap(), x).unwrap();
        assert_eq!(c(0, 1.0, 0.9), 1.0);
        assert!((c(1, 1.0, 0.25) - 0.5).abs() < 1e-15);
        assert!((c(2, 1.0, 1.0) - 3.0).abs() < 1e-14);
        assert!(gegenbauer_c(GegenbauerParams::new(2, 1.0).unwrap(), 1.01).is_err());
        // C_m^nu(1) = binom(m + 2 nu - 1, m)
        for m in 0..30 {
            let v = c(m, 2.5, 1.0);
            let b = binom(m as f64 + 4.0, m);
            assert!((v - b).abs() < 1e-12 * b);
        }
    }

    #[test]
    fn scaled_continuation_matches_direct() {
        for &a in &[0.0f64, 0.3, 1.2, 3.0] {
            let direct = gegenbauer_all(1.5, 25, a.cosh());
            let scaled = gegenbauer_scaled_cosh(1.5, 25, a);
            for m in 0..=25 {
                let v = scaled[m] * (m as f64 * a).exp();
                assert!((v - direct[m]).abs() < 1e-11 * direct[m].abs().max(1.0));
            }
        }
    }

    #[test]
    fn theta_symmetry_periodicity_convergence() {
        let v = |t, d| theta_v(ThetaArgs::auto(t, d).unwrap()).unwrap();
        assert_eq!(v(0.3, 1.1), v(0.3, -1.1));
        assert!((v(0.3, 0.4 + 2.0 * PI) - v(0.3, 0.4)).abs() < 1e-15);
        let a = ThetaArgs::auto(0.25, 0.0).unwrap();
        let big = ThetaArgs {
            k_cutoff: 10 * a.k_cutoff,
            ..a
        };
        let (x, y) = (theta_v(a).unwrap(), theta_v(big).unwrap());
        assert!((x - y).abs() < 1e-14 * y);
        assert!(theta_v(ThetaArgs { t: 0.0, delta: 0.0, k_cutoff: 3 }).is_err());
    }

    #[test]
    fn theta_jet_derivative() {
        let a = ThetaArgs::auto(0.4, 1.0).unwrap();
        let j = theta_v_jet(a, 2).unwrap();
        let h = 1e-4;
        let f = |d| theta_v(ThetaArgs { delta: d, ..a }).unwrap();
        let fd = (f(1.0 + h) - f(1.0 - h)) / (2.0 * h);
        assert!((j.value() - f(1.0)).abs() < 1e-15);
        assert!((j.derivative_at(1) - fd).abs() < 1e-8);
    }
}
