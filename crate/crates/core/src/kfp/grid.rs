//! Finite-volume semigroup on a phase-plane box.
//!
//! The symmetric part `d_vv - v d_v` is stepped by Crank-Nicolson in flux form
//! and the transport `V' d_v - v d_x` explicitly, Strang-split. Fluxes come from
//! the stream function `-e^{-H}` and exact cell masses, so the conservative
//! transports keep `mu`-mass and do not increase `int h^2 dmu`. They are only
//! accurate pointwise where the grid resolves `mu`; [`Transport::Pointwise`]
//! trades the `mu` structure for pointwise consistency everywhere.
//! Cells are twice as wide in `x` as in `v`, which puts `e1 = 2 d_x + d_v` on
//! the grid diagonals.

use super::{gradient_bound_k, k_eta, twisted_gradient, Potential, TestFunction};
use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::linalg::solve_tridiagonal;
use crate::quadrature::GaussLegendre;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    ZeroFlux,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Transport {
    /// Central `mu`-antisymmetric fluxes with RK4.
    Skew,
    /// Limited upwind `mu`-fluxes with SSP-RK3 substeps; keeps `h` positive.
    Upwind,
    /// Central differences of `h` with RK4, mirrored at the edges.
    Pointwise,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseGrid {
    pub x_range: (f64, f64),
    pub v_range: (f64, f64),
    pub nx: usize,
    pub nv: usize,
    pub dt: f64,
    pub boundary: Boundary,
    pub transport: Transport,
}

impl PhaseGrid {
    /// Symmetric box with `v` in `[-v_half, v_half]` and `x` sized so that `dx = 2 dv`.
    pub fn new(nx: usize, nv: usize, v_half: f64, dt: f64) -> Result<Self> {
        if nx < 8 || nv < 8 {
            return Err(Error::domain(format!("grid too small: {nx} x {nv}")));
        }
        if !(v_half > 0.0 && dt > 0.0) {
            return Err(Error::domain("need positive box and time step"));
        }
        let x_half = 2.0 * v_half * nx as f64 / nv as f64;
        Ok(PhaseGrid {
            x_range: (-x_half, x_half),
            v_range: (-v_half, v_half),
            nx,
            nv,
            dt,
            boundary: Boundary::ZeroFlux,
            transport: Transport::Skew,
        })
    }

    /// Box `|v| <= 7` and half the stable time step, capped at `0.02`.
    pub fn for_potential(pot: &Potential, nx: usize, nv: usize) -> Result<Self> {
        let mut g = PhaseGrid::new(nx, nv, 7.0, 1.0)?;
        g.dt = (0.5 * g.stable_dt(pot)).min(0.02);
        Ok(g)
    }

    pub fn with_transport(&self, transport: Transport) -> Self {
        PhaseGrid {
            transport,
            ..self.clone()
        }
    }

    pub fn dx(&self) -> f64 {
        (self.x_range.1 - self.x_range.0) / self.nx as f64
    }

    pub fn dv(&self) -> f64 {
        (self.v_range.1 - self.v_range.0) / self.nv as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_range.0 + (i as f64 + 0.5) * self.dx()
    }

    pub fn v(&self, j: usize) -> f64 {
        self.v_range.0 + (j as f64 + 0.5) * self.dv()
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    /// Cell centers in storage order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.nx).flat_map(move |i| (0..self.nv).map(move |j| (self.x(i), self.v(j))))
    }

    pub fn sample(&self, f: &dyn Fn(f64, f64) -> f64) -> Vec<f64> {
        self.points().map(|(x, v)| f(x, v)).collect()
    }

    /// RK4 stability limit for the transport step.
    pub fn stable_dt(&self, pot: &Potential) -> f64 {
        let vmax = self.v_range.0.abs().max(self.v_range.1.abs());
        let gmax = (0..=self.nx)
            .map(|a| pot.d1(self.x_range.0 + a as f64 * self.dx()).abs())
            .fold(0.0, f64::max);
        2.0 / (vmax / self.dx() + gmax / self.dv())
    }

    fn check(&self, pot: &Potential) -> Result<()> {
        if ((self.dx() - 2.0 * self.dv()) / self.dx()).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "need dx = 2 dv, got dx = {}, dv = {}",
                self.dx(),
                self.dv()
            )));
        }
        let limit = self.stable_dt(pot);
        if self.dt > limit {
            return Err(Error::domain(format!("dt = {} exceeds the stability limit {limit}", self.dt)));
        }
        Ok(())
    }
}

fn hamiltonian(pot: &Potential, x: f64, v: f64) -> f64 {
    pot.value(x) + 0.5 * v * v
}

/// `int e^{-(V - V(x_i))}` over each column of cells and `int e^{-(v^2 - v_j^2)/2}`
/// over each row.
fn axis_factors(pot: &Potential, g: &PhaseGrid) -> (Vec<f64>, Vec<f64>) {
    let gl = GaussLegendre::new(12);
    let (dx, dv) = (g.dx(), g.dv());
    let fx: Vec<f64> = (0..g.nx)
        .map(|i| {
            let c = g.x(i);
            gl.integrate(c - 0.5 * dx, c + 0.5 * dx, |x| (pot.value(c) - pot.value(x)).exp())
        })
        .collect();
    let fv: Vec<f64> = (0..g.nv)
        .map(|j| {
            let c = g.v(j);
            gl.integrate(c - 0.5 * dv, c + 0.5 * dv, |v| (0.5 * (c * c - v * v)).exp())
        })
        .collect();
    (fx, fv)
}

/// `int_cell e^{-(H - H_center)}` for every cell.
fn cell_factors(pot: &Potential, g: &PhaseGrid) -> Vec<f64> {
    let (fx, fv) = axis_factors(pot, g);
    fx.iter().flat_map(|a| fv.iter().map(move |b| a * b)).collect()
}

/// Normalized cell masses of `mu = e^{-V - v^2/2}` on the grid.
fn cell_weights(pot: &Potential, g: &PhaseGrid) -> Vec<f64> {
    let raw: Vec<f64> = g
        .points()
        .zip(cell_factors(pot, g))
        .map(|((x, v), r)| (-hamiltonian(pot, x, v)).exp() * r)
        .collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / z).collect()
}

struct Solver {
    nx: usize,
    nv: usize,
    dt: f64,
    transport: Transport,
    /// Upwind substeps per time step.
    substeps: usize,
    /// Pointwise velocities `v_j / (2 dx)` and `V'(x_i) / (2 dv)`.
    vel_x: Vec<f64>,
    vel_v: Vec<f64>,
    /// Transport coefficients relative to the cell weight: east, west, north, south.
    ce: Vec<f64>,
    cw: Vec<f64>,
    cn: Vec<f64>,
    cs: Vec<f64>,
    /// Crank-Nicolson half-step matrices for one column.
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    /// Explicit half of the same step.
    s_lo: Vec<f64>,
    s_hi: Vec<f64>,
    mu: Vec<f64>,
    work: [Vec<f64>; 5],
    col: Vec<f64>,
    scratch: Vec<f64>,
}

impl Solver {
    fn new(pot: &Potential, g: &PhaseGrid) -> Result<Self> {
        g.check(pot)?;
        let (nx, nv) = (g.nx, g.nv);
        let (dx, dv) = (g.dx(), g.dv());
        let corner_h = |a: usize, b: usize| -> Option<f64> {
            if a == 0 || b == 0 || a == nx || b == nv {
                None
            } else {
                Some(hamiltonian(pot, g.x_range.0 + a as f64 * dx, g.v_range.0 + b as f64 * dv))
            }
        };
        let factors = cell_factors(pot, g);
        // psi / (cell mass) with psi = -e^{-H} at the corner
        let ratio = |h_cell: f64, f: f64, a: usize, b: usize| match corner_h(a, b) {
            Some(h) => -(h_cell - h).exp() / f,
            None => 0.0,
        };
        let n = nx * nv;
        let (mut ce, mut cw, mut cn, mut cs) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for i in 0..nx {
            for j in 0..nv {
                let h = hamiltonian(pot, g.x(i), g.v(j));
                let k = g.idx(i, j);
                let ratio = |a, b| ratio(h, factors[k], a, b);
                // east face at corner column i+1, west face at corner column i
                ce[k] = 0.5 * (ratio(i + 1, j + 1) - ratio(i + 1, j));
                cw[k] = 0.5 * (ratio(i, j + 1) - ratio(i, j));
                // north face at corner row j+1, south face at corner row j
                cn[k] = -0.5 * (ratio(i + 1, j + 1) - ratio(i, j + 1));
                cs[k] = -0.5 * (ratio(i + 1, j) - ratio(i, j));
            }
        }
        let tau = 0.25 * g.dt;
        let fv = axis_factors(pot, g).1;
        let (mut s_lo, mut s_hi) = (vec![0.0; nv], vec![0.0; nv]);
        for j in 0..nv {
            let vj = g.v(j);
            if j > 0 {
                let vf = vj - 0.5 * dv;
                s_lo[j] = (-(vf * vf - vj * vj) / 2.0).exp() / (fv[j] * dv);
            }
            if j + 1 < nv {
                let vf = vj + 0.5 * dv;
                s_hi[j] = (-(vf * vf - vj * vj) / 2.0).exp() / (fv[j] * dv);
            }
        }
        if g.transport == Transport::Upwind {
            // outflow rates per unit cell mass towards east, west, north, south
            for k in 0..n {
                cw[k] = -cw[k];
                cs[k] = -cs[k];
            }
            for c in [&mut ce, &mut cw, &mut cn, &mut cs] {
                c.iter_mut().for_each(|x| *x *= 2.0);
            }
            if (0..nv).any(|j| tau * (s_lo[j] + s_hi[j]) > 1.0) {
                return Err(Error::domain("time step too large for a positive diffusion step"));
            }
        }
        let rate = (0..n)
            .map(|k| ce[k].abs() + cw[k].abs() + cn[k].abs() + cs[k].abs())
            .fold(0.0, f64::max);
        let substeps = if g.transport == Transport::Upwind {
            (g.dt * rate).ceil().max(1.0) as usize
        } else {
            1
        };
        let lower: Vec<f64> = s_lo.iter().map(|s| -tau * s).collect();
        let upper: Vec<f64> = s_hi.iter().map(|s| -tau * s).collect();
        let diag: Vec<f64> = (0..nv).map(|j| 1.0 + tau * (s_lo[j] + s_hi[j])).collect();
        Ok(Solver {
            nx,
            nv,
            dt: g.dt,
            transport: g.transport,
            substeps,
            vel_x: (0..nv).map(|j| g.v(j) / (2.0 * dx)).collect(),
            vel_v: (0..nx).map(|i| pot.d1(g.x(i)) / (2.0 * dv)).collect(),
            ce,
            cw,
            cn,
            cs,
            lower,
            diag,
            upper,
            s_lo,
            s_hi,
            mu: cell_weights(pot, g),
            work: std::array::from_fn(|_| vec![0.0; n]),
            col: vec![0.0; nv],
            scratch: vec![0.0; nv],
        })
    }

    fn transport(&self, h: &[f64], out: &mut [f64]) {
        match self.transport {
            Transport::Skew => self.transport_skew(h, out),
            Transport::Upwind => self.transport_upwind(h, out),
            Transport::Pointwise => self.transport_pointwise(h, out),
        }
    }

    /// Limited upwind fluxes: the face value is the upwind cell plus a van Leer
    /// correction, so it always lies between the two cells.
    fn transport_upwind(&self, h: &[f64], out: &mut [f64]) {
        let (nx, nv) = (self.nx as isize, self.nv as isize);
        let at = |i: isize, j: isize| -> Option<f64> {
            (i >= 0 && j >= 0 && i < nx && j < nv).then(|| h[(i * nv + j) as usize])
        };
        let limited = |a: f64, b: f64| if a * b > 0.0 { a * b / (a + b) } else { 0.0 };
        // face value between `here` and the neighbor in direction (di, dj)
        let face = |i: isize, j: isize, di: isize, dj: isize, flow: f64| -> f64 {
            let (here, next) = (at(i, j).unwrap(), at(i + di, j + dj).unwrap());
            if flow >= 0.0 {
                let back = at(i - di, j - dj).unwrap_or(here);
                here + limited(here - back, next - here)
            } else {
                let beyond = at(i + 2 * di, j + 2 * dj).unwrap_or(next);
                next + limited(next - beyond, here - next)
            }
        };
        for i in 0..nx {
            for j in 0..nv {
                let k = (i * nv + j) as usize;
                let hk = h[k];
                let mut s = 0.0;
                if i + 1 < nx {
                    s += self.ce[k] * (face(i, j, 1, 0, self.ce[k]) - hk);
                }
                if i > 0 {
                    s += self.cw[k] * (face(i, j, -1, 0, self.cw[k]) - hk);
                }
                if j + 1 < nv {
                    s += self.cn[k] * (face(i, j, 0, 1, self.cn[k]) - hk);
                }
                if j > 0 {
                    s += self.cs[k] * (face(i, j, 0, -1, self.cs[k]) - hk);
                }
                out[k] = -s;
            }
        }
    }

    fn transport_pointwise(&self, h: &[f64], out: &mut [f64]) {
        let (nx, nv) = (self.nx, self.nv);
        for i in 0..nx {
            for j in 0..nv {
                let k = i * nv + j;
                let east = if i + 1 < nx { h[k + nv] } else { h[k] };
                let west = if i > 0 { h[k - nv] } else { h[k] };
                let north = if j + 1 < nv { h[k + 1] } else { h[k] };
                let south = if j > 0 { h[k - 1] } else { h[k] };
                out[k] = -self.vel_x[j] * (east - west) + self.vel_v[i] * (north - south);
            }
        }
    }

    fn transport_skew(&self, h: &[f64], out: &mut [f64]) {
        let nv = self.nv;
        for i in 0..self.nx {
            for j in 0..nv {
                let k = i * nv + j;
                let mut s = 0.0;
                if i + 1 < self.nx {
                    s += self.ce[k] * h[k + nv];
                }
                if i > 0 {
                    s -= self.cw[k] * h[k - nv];
                }
                if j + 1 < nv {
                    s += self.cn[k] * h[k + 1];
                }
                if j > 0 {
                    s -= self.cs[k] * h[k - 1];
                }
                out[k] = -s;
            }
        }
    }

    fn half_diffusion(&mut self, h: &mut [f64]) {
        let tau = 0.25 * self.dt;
        let nv = self.nv;
        for i in 0..self.nx {
            let c = &mut h[i * nv..(i + 1) * nv];
            for j in 0..nv {
                let mut s = 0.0;
                if j > 0 {
                    s += self.s_lo[j] * (c[j - 1] - c[j]);
                }
                if j + 1 < nv {
                    s += self.s_hi[j] * (c[j + 1] - c[j]);
                }
                self.col[j] = c[j] + tau * s;
            }
            solve_tridiagonal(&self.lower, &self.diag, &self.upper, &mut self.col, &mut self.scratch);
            c.copy_from_slice(&self.col);
        }
    }

    fn rk4(&mut self, h: &mut [f64]) {
        let dt = self.dt;
        let [k1, k2, k3, k4, tmp] = std::mem::take(&mut self.work);
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (k1, k2, k3, k4, tmp);
        self.transport(h, &mut k1);
        for (t, (a, b)) in tmp.iter_mut().zip(h.iter().zip(&k1)) {
            *t = a + 0.5 * dt * b;
        }
        self.transport(&tmp, &mut k2);
        for (t, (a, b)) in tmp.iter_mut().zip(h.iter().zip(&k2)) {
            *t = a + 0.5 * dt * b;
        }
        self.transport(&tmp, &mut k3);
        for (t, (a, b)) in tmp.iter_mut().zip(h.iter().zip(&k3)) {
            *t = a + dt * b;
        }
        self.transport(&tmp, &mut k4);
        for (idx, x) in h.iter_mut().enumerate() {
            *x += dt / 6.0 * (k1[idx] + 2.0 * k2[idx] + 2.0 * k3[idx] + k4[idx]);
        }
        self.work = [k1, k2, k3, k4, tmp];
    }

    fn ssp_rk3(&mut self, h: &mut [f64]) {
        let dt = self.dt / self.substeps as f64;
        let [k, u1, u2, a, b] = std::mem::take(&mut self.work);
        let (mut k, mut u1, mut u2) = (k, u1, u2);
        for _ in 0..self.substeps {
            self.transport(h, &mut k);
            for i in 0..h.len() {
                u1[i] = h[i] + dt * k[i];
            }
            self.transport(&u1, &mut k);
            for i in 0..h.len() {
                u2[i] = 0.75 * h[i] + 0.25 * (u1[i] + dt * k[i]);
            }
            self.transport(&u2, &mut k);
            for i in 0..h.len() {
                h[i] = h[i] / 3.0 + 2.0 / 3.0 * (u2[i] + dt * k[i]);
            }
        }
        self.work = [k, u1, u2, a, b];
    }

    fn step(&mut self, h: &mut [f64]) {
        self.half_diffusion(h);
        if self.transport == Transport::Upwind {
            self.ssp_rk3(h);
        } else {
            self.rk4(h);
        }
        self.half_diffusion(h);
    }

    fn sup(h: &[f64]) -> f64 {
        h.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    fn mass(&self, h: &[f64]) -> f64 {
        self.mu.iter().zip(h).map(|(m, x)| m * x).sum()
    }

    fn norm2(&self, h: &[f64]) -> f64 {
        self.mu.iter().zip(h).map(|(m, x)| m * x * x).sum()
    }
}

/// Runs the discrete semigroup, calling `visit(step, t, h)` after every step.
/// Conservative transports fail if `int h^2 dmu` grows or mass drifts by more
/// than `1e-6`; the pointwise one fails if `sup |h|` exceeds `2 e^t sup |h0|`.
fn evolve(
    pot: &Potential,
    grid: &PhaseGrid,
    h: &mut [f64],
    t_end: f64,
    mut visit: impl FnMut(usize, f64, &[f64]) -> Result<()>,
) -> Result<f64> {
    let mut s = Solver::new(pot, grid)?;
    let steps = (t_end / grid.dt).round() as usize;
    let (m0, n0) = (s.mass(h), s.norm2(h));
    let scale = s.mu.iter().zip(h.iter()).map(|(m, x)| m * x.abs()).sum::<f64>().max(1e-300);
    visit(0, 0.0, h)?;
    let sup0 = Solver::sup(h);
    let mut drift: f64 = 0.0;
    for k in 1..=steps {
        s.step(h);
        if s.transport == Transport::Pointwise {
            let sup = Solver::sup(h);
            let t = k as f64 * grid.dt;
            if !sup.is_finite() || sup > 2.0 * t.exp() * sup0 + 1e-300 {
                return Err(Error::Solver(format!("sup norm grew from {sup0:e} to {sup:e} at step {k}")));
            }
            drift = drift.max((s.mass(h) - m0).abs() / scale);
            visit(k, t, h)?;
            continue;
        }
        let n = s.norm2(h);
        if !n.is_finite() || n > n0 * (1.0 + 1e-9) + 1e-300 {
            return Err(Error::Solver(format!("L2(mu) norm grew from {n0:e} to {n:e} at step {k}")));
        }
        drift = drift.max((s.mass(h) - m0).abs() / scale);
        if drift > 1e-6 {
            return Err(Error::Solver(format!("mass drift {drift:e} at step {k}")));
        }
        visit(k, k as f64 * grid.dt, h)?;
    }
    Ok(drift)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Largest relative drift of `int h dmu`.
    pub mass_drift: f64,
}

/// Solves `dh/dt = L h` on the grid up to `t_end`, keeping every `stride`-th state.
pub fn grid_solve(
    pot: &Potential,
    f0: &dyn Fn(f64, f64) -> f64,
    t_end: f64,
    grid: &PhaseGrid,
    stride: usize,
) -> Result<Trajectory> {
    let mut h = grid.sample(f0);
    if h.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("initial data not finite on the grid"));
    }
    let stride = stride.max(1);
    let (mut times, mut states) = (Vec::new(), Vec::new());
    let steps = (t_end / grid.dt).round() as usize;
    let mass_drift = evolve(pot, grid, &mut h, t_end, |k, t, h| {
        if k % stride == 0 || k == steps {
            times.push(t);
            states.push(h.to_vec());
        }
        Ok(())
    })?;
    Ok(Trajectory {
        times,
        states,
        mass_drift,
    })
}

/// Edges of the discrete Dirichlet form: `(a, b, weight / dv^2)` for diagonal
/// (`e1`) and vertical (`e2`) neighbors, weights normalized like the cells.
fn dirichlet_edges(pot: &Potential, g: &PhaseGrid) -> Vec<(usize, usize, f64)> {
    let (dx, dv) = (g.dx(), g.dv());
    let z: f64 = g
        .points()
        .zip(cell_factors(pot, g))
        .map(|((x, v), r)| (-hamiltonian(pot, x, v)).exp() * r)
        .sum();
    let w = |x: f64, v: f64| (-hamiltonian(pot, x, v)).exp() * dx * dv / (z * dv * dv);
    let mut edges = Vec::with_capacity(2 * g.len());
    for i in 0..g.nx {
        for j in 0..g.nv {
            let a = g.idx(i, j);
            if j + 1 < g.nv {
                edges.push((a, g.idx(i, j + 1), w(g.x(i), g.v(j) + 0.5 * dv)));
                if i + 1 < g.nx {
                    edges.push((a, g.idx(i + 1, j + 1), w(g.x(i) + 0.5 * dx, g.v(j) + 0.5 * dv)));
                }
            }
        }
    }
    edges
}

fn dirichlet(edges: &[(usize, usize, f64)], h: &[f64]) -> f64 {
    edges.iter().map(|&(a, b, w)| w * (h[b] - h[a]).powi(2)).sum()
}

fn variance(mu: &[f64], h: &[f64]) -> f64 {
    let m: f64 = mu.iter().zip(h).map(|(w, x)| w * x).sum();
    mu.iter().zip(h).map(|(w, x)| w * (x - m).powi(2)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoincareResult {
    pub kappa: f64,
    /// `int |grad phi|^2 dmu / Var(phi)` recomputed from the returned eigenfunction.
    pub rayleigh: f64,
    pub iterations: usize,
    #[serde(skip)]
    pub eigenfunction: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn project_out(x: &mut [f64], ground: &[f64]) {
    let c = dot(x, ground);
    for (a, g) in x.iter_mut().zip(ground) {
        *a -= c * g;
    }
}

/// Conjugate gradients for `A y = b` on the complement of `ground`.
fn cg(apply: &dyn Fn(&[f64], &mut [f64]), b: &[f64], ground: &[f64], tol: f64) -> Result<Vec<f64>> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    project_out(&mut r, ground);
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let b_norm = dot(&r, &r).sqrt();
    let mut rr = dot(&r, &r);
    for _ in 0..20 * n {
        if rr.sqrt() <= tol * b_norm {
            return Ok(x);
        }
        apply(&p, &mut ap);
        project_out(&mut ap, ground);
        let alpha = rr / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    Err(Error::accuracy("conjugate gradients", rr.sqrt() / b_norm, tol))
}

/// Smallest nonzero eigenvalue of `int |grad f|^2 dmu` relative to `Var_mu(f)`,
/// by inverse iteration on the symmetrized operator with constants deflated.
pub fn poincare_constant(pot: &Potential, grid: &PhaseGrid) -> Result<PoincareResult> {
    let mu = cell_weights(pot, grid);
    if mu.iter().any(|&m| m < 1e-280) {
        return Err(Error::domain("invariant measure underflows on this box"));
    }
    let edges = dirichlet_edges(pot, grid);
    let root: Vec<f64> = mu.iter().map(|m| m.sqrt()).collect();
    let apply = |y: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|o| *o = 0.0);
        for &(a, b, w) in &edges {
            let d = y[a] / root[a] - y[b] / root[b];
            out[a] += w * d / root[a];
            out[b] -= w * d / root[b];
        }
    };
    let mut y: Vec<f64> = grid
        .points()
        .zip(&root)
        .map(|((x, v), r)| r * (x + 0.5 * v + 0.1 * x * v))
        .collect();
    let mut ky = vec![0.0; y.len()];
    let mut q_prev = f64::INFINITY;
    for it in 1..=200 {
        project_out(&mut y, &root);
        let n = dot(&y, &y).sqrt();
        y.iter_mut().for_each(|a| *a /= n);
        apply(&y, &mut ky);
        let q = dot(&y, &ky);
        if (q - q_prev).abs() <= 1e-13 * q {
            let phi: Vec<f64> = y.iter().zip(&root).map(|(a, r)| a / r).collect();
            let rayleigh = dirichlet(&edges, &phi) / variance(&mu, &phi);
            return Ok(PoincareResult {
                kappa: q,
                rayleigh,
                iterations: it,
                eigenfunction: phi,
            });
        }
        q_prev = q;
        y = cg(&apply, &y, &root, 1e-12)?;
    }
    Err(Error::accuracy("inverse iteration", f64::NAN, 1e-13))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogSobolevResult {
    pub kappa: f64,
    /// Direction `(cos theta, sin theta)` of the optimal exponential tilt.
    pub theta: f64,
    /// The same quotient evaluated on the grid for a finite tilt.
    pub grid_ratio: f64,
}

/// Log-Sobolev constant of the Gaussian `mu` for quadratic `V`, from the
/// exponential tilts `e^{s (cos theta x + sin theta v)}`, with a grid check.
pub fn logsob_constant(pot: &Potential, grid: &PhaseGrid) -> Result<LogSobolevResult> {
    let k = match *pot {
        Potential::Quadratic { k } => k,
        _ => return Err(Error::Unsupported("log-Sobolev constant for non-quadratic V".into())),
    };
    // Fisher information over entropy of a tilt tends to 2 a'Ga / a'Sa as s -> 0
    let quotient = |th: f64| {
        let (a, b) = (th.cos(), th.sin());
        2.0 * ((2.0 * a + b).powi(2) + b * b) / (a * a / k + b * b)
    };
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..720 {
        let th = std::f64::consts::PI * i as f64 / 720.0;
        let q = quotient(th);
        if q < best.0 {
            best = (q, th);
        }
    }
    let step = std::f64::consts::PI / 720.0;
    let (mut lo, mut hi) = (best.1 - step, best.1 + step);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    while hi - lo > 1e-12 {
        let (m1, m2) = (hi - r * (hi - lo), lo + r * (hi - lo));
        if quotient(m1) < quotient(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let theta = 0.5 * (lo + hi);
    let kappa = quotient(theta);
    let mu = cell_weights(pot, grid);
    let edges = dirichlet_edges(pot, grid);
    let (a, b) = (theta.cos(), theta.sin());
    let f = grid.sample(&|x, v| (0.2 * (a * x + b * v)).exp());
    let grid_ratio = fisher(&edges, &f) / entropy(&mu, &f);
    Ok(LogSobolevResult {
        kappa,
        theta,
        grid_ratio,
    })
}

fn entropy(mu: &[f64], f: &[f64]) -> f64 {
    let m: f64 = dot(mu, f);
    mu.iter().zip(f).map(|(w, x)| w * x * (x / m).ln()).sum()
}

/// `int f |grad ln f|^2 dmu` on the edges, with `f` averaged on each edge.
fn fisher(edges: &[(usize, usize, f64)], f: &[f64]) -> f64 {
    edges
        .iter()
        .map(|&(a, b, w)| w * 0.5 * (f[a] + f[b]) * (f[b].ln() - f[a].ln()).powi(2))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayMode {
    Poincare,
    Logsob,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypocoerciveReport {
    pub mode: DecayMode,
    pub eta: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub kappa: f64,
    pub lambda_predicted: f64,
    pub lambda_fitted: f64,
    pub times: Vec<f64>,
    pub functional: Vec<f64>,
    /// Largest relative one-step increase of the functional.
    pub max_increase: f64,
    pub mass_drift: f64,
    pub passed: bool,
}

/// `2 rho2 kappa / (kappa + rho1 + rho2)`, or with `2 (rho1 + rho2)` in the
/// denominator for the entropy functional.
pub fn predicted_rate(mode: DecayMode, rho1: f64, rho2: f64, kappa: f64) -> f64 {
    match mode {
        DecayMode::Poincare => 2.0 * rho2 * kappa / (kappa + rho1 + rho2),
        DecayMode::Logsob => 2.0 * rho2 * kappa / (kappa + 2.0 * (rho1 + rho2)),
    }
}

/// Slope of the least-squares line through `(t, ln F)` on `t >= t_end / 2`,
/// ignoring values below `1e-12`.
pub fn fit_rate(times: &[f64], values: &[f64]) -> Result<f64> {
    let t_end = times.last().copied().unwrap_or(0.0);
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|&(&t, &f)| t >= 0.5 * t_end && f >= 1e-12)
        .map(|(&t, &f)| (t, f.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::accuracy("rate fit: too few points above the noise floor", pts.len() as f64, 3.0));
    }
    let n = pts.len() as f64;
    let (mt, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Ok(-sxy / sxx)
}

/// Log-Sobolev mode runs with [`Transport::Upwind`] to keep `h` positive.
///
/// Tracks the composite functional along the grid semigroup and compares its
/// fitted decay rate with [`predicted_rate`] at `rho1 = K(eta)`, `rho2 = eta`.
pub fn hypocoercive_decay(
    pot: &Potential,
    f0: Option<&dyn Fn(f64, f64) -> f64>,
    t_end: f64,
    grid: &PhaseGrid,
    mode: DecayMode,
    eta: f64,
) -> Result<HypocoerciveReport> {
    let ke = k_eta(pot, eta)?;
    let (rho1, rho2) = (ke.k.max(0.0), eta);
    let mu = cell_weights(pot, grid);
    let edges = dirichlet_edges(pot, grid);
    let mut h = match (f0, mode) {
        (Some(f), _) => grid.sample(f),
        (None, DecayMode::Poincare) => grid.sample(&|x, _| x),
        (None, DecayMode::Logsob) => grid.sample(&|x, _| 1.0 + 0.5 * x.tanh()),
    };
    let kappa = match mode {
        DecayMode::Poincare => {
            let m = dot(&mu, &h);
            h.iter_mut().for_each(|x| *x -= m);
            poincare_constant(pot, grid)?.kappa
        }
        DecayMode::Logsob => {
            if h.iter().any(|&x| x <= 0.0) {
                return Err(Error::domain("log-Sobolev mode needs positive initial data"));
            }
            let m = dot(&mu, &h);
            h.iter_mut().for_each(|x| *x /= m);
            logsob_constant(pot, grid)?.kappa
        }
    };
    let lambda_predicted = predicted_rate(mode, rho1, rho2, kappa);
    let functional = |h: &[f64]| -> Result<f64> {
        match mode {
            DecayMode::Poincare => Ok((rho1 + rho2) * dot(&mu, &h.iter().map(|x| x * x).collect::<Vec<_>>())
                + dirichlet(&edges, h)),
            DecayMode::Logsob => {
                if h.iter().any(|&x| x <= 0.0) {
                    return Err(Error::Solver("positivity lost".into()));
                }
                Ok(2.0 * (rho1 + rho2) * entropy(&mu, h) + fisher(&edges, h))
            }
        }
    };
    let (mut times, mut values) = (Vec::new(), Vec::new());
    let mut max_increase: f64 = 0.0;
    let run_grid = match mode {
        DecayMode::Poincare => grid.clone(),
        DecayMode::Logsob => grid.with_transport(Transport::Upwind),
    };
    let mass_drift = evolve(pot, &run_grid, &mut h, t_end, |_, t, h| {
        let f = functional(h)?;
        if let Some(&prev) = values.last() {
            max_increase = max_increase.max((f - prev) / prev);
            if f > prev * (1.0 + 1e-6) {
                return Err(Error::Solver(format!("functional increased from {prev:e} to {f:e} at t = {t}")));
            }
        }
        times.push(t);
        values.push(f);
        Ok(())
    })?;
    let lambda_fitted = fit_rate(&times, &values)?;
    Ok(HypocoerciveReport {
        mode,
        eta,
        rho1,
        rho2,
        kappa,
        lambda_predicted,
        lambda_fitted,
        passed: lambda_fitted >= 0.95 * lambda_predicted,
        times,
        functional: values,
        max_increase,
        mass_drift,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientBoundReport {
    pub t: f64,
    pub k: f64,
    /// Largest value of `|grad f0|^2` on the grid.
    pub scale: f64,
    /// Smallest `(e^{2Kt} P_t |grad f|^2 - |grad P_t f|^2) / scale` away from the edges.
    pub interior_min: f64,
    /// The same minimum over every cell with a full stencil.
    pub overall_min: f64,
    pub worst_point: (f64, f64),
    /// Violations occur only within five cells of the box edge.
    pub boundary_artifact: bool,
    pub passed: bool,
}

const MARGIN: usize = 5;

/// Compares both sides of `|grad P_t f|^2 <= e^{2Kt} P_t(|grad f|^2)` on the grid,
/// solving with [`Transport::Pointwise`].
/// `k` defaults to the constant of the drift's symmetric part in the twisted metric.
pub fn gradient_bound_check(
    pot: &Potential,
    f0: TestFunction,
    t: f64,
    grid: &PhaseGrid,
    k: Option<f64>,
) -> Result<GradientBoundReport> {
    let k = k.unwrap_or_else(|| gradient_bound_k(pot));
    let f_init = |x: f64, v: f64| f0(&Jet2::var_x(x, 0), &Jet2::var_v(v, 0)).value();
    let g_init = |x: f64, v: f64| {
        let (a, b) = twisted_gradient(f0, x, v);
        a * a + b * b
    };
    let scale = grid.sample(&g_init).into_iter().fold(0.0, f64::max);
    let grid = &grid.with_transport(Transport::Pointwise);
    let hf = grid_solve(pot, &f_init, t, grid, usize::MAX)?;
    let hg = grid_solve(pot, &g_init, t, grid, usize::MAX)?;
    let (h, g) = (hf.states.last().unwrap(), hg.states.last().unwrap());
    let dv = grid.dv();
    let growth = (2.0 * k * t).exp();
    let tol = 1e-4;
    let (mut interior_min, mut overall_min) = (f64::INFINITY, f64::INFINITY);
    let mut worst_point = (0.0, 0.0);
    for i in 1..grid.nx - 1 {
        for j in 1..grid.nv - 1 {
            let e1 = (h[grid.idx(i + 1, j + 1)] - h[grid.idx(i - 1, j - 1)]) / (2.0 * dv);
            let e2 = (h[grid.idx(i, j + 1)] - h[grid.idx(i, j - 1)]) / (2.0 * dv);
            let slack = growth * g[grid.idx(i, j)] - e1 * e1 - e2 * e2;
            let rel = if scale > 0.0 { slack / scale } else { slack };
            overall_min = overall_min.min(rel);
            let inside = i >= MARGIN && j >= MARGIN && i < grid.nx - MARGIN && j < grid.nv - MARGIN;
            if inside && rel < interior_min {
                interior_min = rel;
                worst_point = (grid.x(i), grid.v(j));
            }
        }
    }
    let passed = interior_min >= -tol;
    Ok(GradientBoundReport {
        t,
        k,
        scale,
        interior_min,
        overall_min,
        worst_point,
        boundary_artifact: passed && overall_min < -tol,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> Potential {
        Potential::quadratic(1.0).unwrap()
    }

    #[test]
    fn grid_shape() {
        let g = PhaseGrid::for_potential(&quad(), 32, 32).unwrap();
        assert!((g.dx() - 2.0 * g.dv()).abs() < 1e-14);
        assert!(g.dt <= 0.5 * g.stable_dt(&quad()) + 1e-15);
        let mut bad = g.clone();
        bad.dt = 10.0;
        assert!(grid_solve(&quad(), &|_, _| 1.0, 1.0, &bad, 1).is_err());
    }

    #[test]
    fn constants_are_stationary() {
        let g = PhaseGrid::for_potential(&quad(), 32, 32).unwrap();
        let tr = grid_solve(&quad(), &|_, _| 3.0, 10.0, &g, 50).unwrap();
        for s in &tr.states {
            for i in MARGIN..g.nx - MARGIN {
                for j in MARGIN..g.nv - MARGIN {
                    assert!((s[g.idx(i, j)] - 3.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn mass_conserved_and_l2_decays() {
        let p = quad();
        let g = PhaseGrid::for_potential(&p, 48, 48).unwrap();
        let mu = cell_weights(&p, &g);
        let tr = grid_solve(&p, &|x, v| x + 0.3 * v * v, 5.0, &g, 20).unwrap();
        assert!(tr.mass_drift < 1e-6);
        let m0 = dot(&mu, &tr.states[0]);
        let mut prev = f64::INFINITY;
        for s in &tr.states {
            let c: Vec<f64> = s.iter().map(|x| x - m0).collect();
            let n = dot(&mu, &c.iter().map(|x| x * x).collect::<Vec<_>>());
            assert!(n <= prev * (1.0 + 1e-12));
            prev = n;
        }
    }

    #[test]
    fn poincare_quadratic() {
        let p = quad();
        let r = poincare_constant(&p, &PhaseGrid::for_potential(&p, 64, 64).unwrap()).unwrap();
        assert!((r.kappa - r.rayleigh).abs() < 1e-8 * r.kappa);
        // Gaussian mu with the twisted metric: smallest eigenvalue of [[4, 2], [2, 2]]
        assert!((r.kappa - (3.0 - 5f64.sqrt())).abs() < 0.02, "{}", r.kappa);
    }

    #[test]
    fn logsob_quadratic() {
        let p = quad();
        let r = logsob_constant(&p, &PhaseGrid::for_potential(&p, 64, 64).unwrap()).unwrap();
        assert!((r.kappa - 2.0 * (3.0 - 5f64.sqrt())).abs() < 1e-10);
        assert!((r.grid_ratio / r.kappa - 1.0).abs() < 0.05, "{}", r.grid_ratio);
        assert!(logsob_constant(&Potential::perturbed(1.0, 0.2).unwrap(), &PhaseGrid::new(16, 16, 7.0, 0.01).unwrap()).is_err());
    }

    #[test]
    fn fit_rate_exact_exponential() {
        let t: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let f: Vec<f64> = t.iter().map(|t| 3.0 * (-0.7 * t).exp()).collect();
        assert!((fit_rate(&t, &f).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn predicted_rate_arithmetic() {
        let l = predicted_rate(DecayMode::Poincare, 0.5, 0.25, 1.0);
        assert!((l - 2.0 / 7.0).abs() < 1e-15);
        let l = predicted_rate(DecayMode::Logsob, 0.5, 0.25, 1.0);
        assert!((l - 0.5 / 2.5).abs() < 1e-15);
    }

    #[test]
    fn poincare_decay_monotone_and_fast_enough() {
        let p = quad();
        let g = PhaseGrid::for_potential(&p, 48, 48).unwrap();
        let r = hypocoercive_decay(&p, None, 10.0, &g, DecayMode::Poincare, 0.25).unwrap();
        assert!(r.functional.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        assert!(r.passed, "{} vs {}", r.lambda_fitted, r.lambda_predicted);
        assert!((r.rho1 - 0.5).abs() < 1e-12 && r.rho2 == 0.25);
        assert!(r.mass_drift < 1e-6);
    }

    #[test]
    fn logsob_decay_stays_positive() {
        let p = quad();
        let g = PhaseGrid::for_potential(&p, 48, 48).unwrap();
        let r = hypocoercive_decay(&p, None, 8.0, &g, DecayMode::Logsob, 0.25).unwrap();
        assert!(r.passed, "{} vs {}", r.lambda_fitted, r.lambda_predicted);
        assert!(r.functional.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        let neg = |x: f64, _: f64| x;
        assert!(hypocoercive_decay(&p, Some(&neg), 1.0, &g, DecayMode::Logsob, 0.25).is_err());
    }

    #[test]
    fn gradient_bound_and_negative_control() {
        let p = quad();
        let g = PhaseGrid::for_potential(&p, 64, 64).unwrap();
        let f0 = |x: &Jet2, v: &Jet2| &x.sin() * &(v * v).scale(-1.0).exp();
        let r = gradient_bound_check(&p, &f0, 0.5, &g, None).unwrap();
        assert!(r.passed && r.interior_min >= -1e-4);
        let neg = gradient_bound_check(&p, &f0, 0.5, &g, Some(r.k - 1.0)).unwrap();
        assert!(!neg.passed && neg.interior_min < -1e-2);
        let fc = |x: &Jet2, _: &Jet2| Jet2::constant(2.0, x.order());
        let c = gradient_bound_check(&p, &fc, 0.5, &g, None).unwrap();
        assert_eq!(c.scale, 0.0);
        assert!(c.overall_min.abs() < 1e-20);
    }
}
