//! The Heisenberg kernel at the origin against an independent time stepper.
//!
//! After a Fourier transform in `z`, each frequency `lambda` leaves the radial
//! problem `u_t = u_rr + (2n-1)/r u_r - lambda^2 r^2 u` on `R^{2n}`. It is
//! stepped by Crank-Nicolson (finite volumes in `r`) from the free Gaussian at
//! a small time `s0` on two grids, and `p_t(0, 0) = (1/pi) int_0^inf u(t, 0; lambda) dlambda`.

use hypolab::heat_kernels::{heisenberg_kernel, QuadratureSpec};
use std::f64::consts::PI;

fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &mut [f64]) {
    let n = d.len();
    let mut cp = vec![0.0; n];
    let mut m = b[0];
    cp[0] = c[0] / m;
    d[0] /= m;
    for i in 1..n {
        m = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / m;
        d[i] = (d[i] - a[i] * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= cp[i] * d[i + 1];
    }
}

/// `u(t, r = 0)` for one frequency, from the first cell center.
fn radial_value(n: usize, lambda: f64, t: f64, s0: f64, rmax: f64, cells: usize, steps: usize) -> f64 {
    let dr = rmax / cells as f64;
    let p = 2 * n as i32;
    let face = |i: usize| (i as f64 * dr).powi(p - 1);
    let vol = |i: usize| (((i + 1) as f64 * dr).powi(p) - (i as f64 * dr).powi(p)) / p as f64;
    // L u = lo u_{i-1} + di u_i + up u_{i+1}
    let (mut lo, mut di, mut up) = (vec![0.0; cells], vec![0.0; cells], vec![0.0; cells]);
    for i in 0..cells {
        let c = (i as f64 + 0.5) * dr;
        let (wl, wr) = (face(i) / (dr * vol(i)), face(i + 1) / (dr * vol(i)));
        lo[i] = wl;
        up[i] = if i + 1 < cells { wr } else { 0.0 };
        di[i] = -wl - wr - lambda * lambda * c * c;
    }
    let mut u: Vec<f64> = (0..cells)
        .map(|i| {
            let c = (i as f64 + 0.5) * dr;
            (4.0 * PI * s0).powi(-(n as i32)) * (-c * c / (4.0 * s0)).exp()
        })
        .collect();
    let dt = (t - s0) / steps as f64;
    let step = |u: &mut Vec<f64>, h: f64, theta: f64| {
        let a: Vec<f64> = lo.iter().map(|x| -theta * h * x).collect();
        let b: Vec<f64> = di.iter().map(|x| 1.0 - theta * h * x).collect();
        let c: Vec<f64> = up.iter().map(|x| -theta * h * x).collect();
        let e = (1.0 - theta) * h;
        let mut rhs: Vec<f64> = (0..cells)
            .map(|i| {
                let l = if i > 0 { lo[i] * u[i - 1] } else { 0.0 };
                let r = if i + 1 < cells { up[i] * u[i + 1] } else { 0.0 };
                u[i] + e * (l + di[i] * u[i] + r)
            })
            .collect();
        thomas(&a, &b, &c, &mut rhs);
        *u = rhs;
    };
    // damped start: four implicit Euler quarter steps, then Crank-Nicolson
    for _ in 0..4 {
        step(&mut u, dt / 4.0, 1.0);
    }
    for _ in 1..steps {
        step(&mut u, dt, 0.5);
    }
    u[0]
}

fn origin_value(t: f64, s0: f64, cells: usize, steps: usize) -> f64 {
    let (lmax, m) = (60.0, 240);
    let h = lmax / m as f64;
    let sum: f64 = (0..=m)
        .map(|k| {
            let w = if k == 0 || k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            w * radial_value(1, k as f64 * h, t, s0, 4.0, cells, steps)
        })
        .sum();
    sum * h / 3.0 / PI
}

#[test]
fn origin_value_matches_time_stepper() {
    let t = 0.25;
    let p = heisenberg_kernel(1, t, 0.0, 0.0, &QuadratureSpec::default()).unwrap().value;
    let (a, b) = (origin_value(t, 2e-3, 800, 800), origin_value(t, 2e-3, 1600, 800));
    // first order in the cell width; extrapolate
    let oracle = 2.0 * b - a;
    assert!((oracle - p).abs() < 1e-3 * p, "{p} vs {oracle}");
}
