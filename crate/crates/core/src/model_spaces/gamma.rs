//! Exact Γ-calculus on the Heisenberg group `R^{2n+1}` with coordinates
//! `(x_1..x_n, y_1..y_n, z)` and frame `X_i = d/dx_i - y_i d/dz`,
//! `Y_i = d/dy_i + x_i d/dz`, `Z = d/dz`.

use crate::error::{Error, Result};
use crate::poly::{rat, rat_from_f64, rat_to_f64, Poly};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

/// Which bilinear form or operator to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GammaOrder {
    Gamma,
    GammaV,
    Gamma2,
    Gamma2V,
    DeltaH,
    DeltaV,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeisenbergFrame {
    pub n: usize,
}

impl HeisenbergFrame {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        Self { n }
    }

    pub fn nvars(&self) -> usize {
        2 * self.n + 1
    }

    pub fn x_index(&self, i: usize) -> usize {
        i
    }

    pub fn y_index(&self, i: usize) -> usize {
        self.n + i
    }

    pub fn z_index(&self) -> usize {
        2 * self.n
    }

    pub fn coord(&self, index: usize) -> Poly {
        Poly::var(self.nvars(), index)
    }

    pub fn x_op(&self, i: usize, f: &Poly) -> Poly {
        let y = self.coord(self.y_index(i));
        &f.deriv(self.x_index(i)) - &(&y * &f.deriv(self.z_index()))
    }

    pub fn y_op(&self, i: usize, f: &Poly) -> Poly {
        let x = self.coord(self.x_index(i));
        &f.deriv(self.y_index(i)) + &(&x * &f.deriv(self.z_index()))
    }

    pub fn z_op(&self, f: &Poly) -> Poly {
        f.deriv(self.z_index())
    }

    pub fn delta_h(&self, f: &Poly) -> Poly {
        let mut acc = Poly::zero(self.nvars());
        for i in 0..self.n {
            acc = &acc + &self.x_op(i, &self.x_op(i, f));
            acc = &acc + &self.y_op(i, &self.y_op(i, f));
        }
        acc
    }

    pub fn delta_v(&self, f: &Poly) -> Poly {
        self.z_op(&self.z_op(f))
    }

    /// `sum_i X_i f X_i g + Y_i f Y_i g`.
    pub fn gamma(&self, f: &Poly, g: &Poly) -> Poly {
        let mut acc = Poly::zero(self.nvars());
        for i in 0..self.n {
            acc = &acc + &(&self.x_op(i, f) * &self.x_op(i, g));
            acc = &acc + &(&self.y_op(i, f) * &self.y_op(i, g));
        }
        acc
    }

    /// `Z f Z g`.
    pub fn gamma_v(&self, f: &Poly, g: &Poly) -> Poly {
        &self.z_op(f) * &self.z_op(g)
    }

    /// `(1/2)(Delta_H Gamma(f,g) - Gamma(g, Delta_H f) - Gamma(f, Delta_H g))`.
    pub fn gamma2(&self, f: &Poly, g: &Poly) -> Poly {
        let t = &(&self.delta_h(&self.gamma(f, g)) - &self.gamma(g, &self.delta_h(f)))
            - &self.gamma(f, &self.delta_h(g));
        t.scale(&BigRational::new(1.into(), 2.into()))
    }

    /// Same iteration with `Gamma^V` in place of `Gamma`.
    pub fn gamma2_v(&self, f: &Poly, g: &Poly) -> Poly {
        let t = &(&self.delta_h(&self.gamma_v(f, g)) - &self.gamma_v(g, &self.delta_h(f)))
            - &self.gamma_v(f, &self.delta_h(g));
        t.scale(&BigRational::new(1.into(), 2.into()))
    }

    pub fn apply(&self, order: GammaOrder, f: &Poly) -> Poly {
        match order {
            GammaOrder::Gamma => self.gamma(f, f),
            GammaOrder::GammaV => self.gamma_v(f, f),
            GammaOrder::Gamma2 => self.gamma2(f, f),
            GammaOrder::Gamma2V => self.gamma2_v(f, f),
            GammaOrder::DeltaH => self.delta_h(f),
            GammaOrder::DeltaV => self.delta_v(f),
        }
    }

    /// The frame `X_1..X_n, Y_1..Y_n` followed by `Z`, as polynomial vector fields.
    pub fn frame_fields(&self) -> Vec<VectorField> {
        let nv = self.nvars();
        let mut out = Vec::with_capacity(nv);
        for i in 0..self.n {
            let mut c = vec![Poly::zero(nv); nv];
            c[self.x_index(i)] = Poly::constant(nv, BigRational::one());
            c[self.z_index()] = -&self.coord(self.y_index(i));
            out.push(VectorField { comps: c });
        }
        for i in 0..self.n {
            let mut c = vec![Poly::zero(nv); nv];
            c[self.y_index(i)] = Poly::constant(nv, BigRational::one());
            c[self.z_index()] = self.coord(self.x_index(i));
            out.push(VectorField { comps: c });
        }
        let mut c = vec![Poly::zero(nv); nv];
        c[self.z_index()] = Poly::constant(nv, BigRational::one());
        out.push(VectorField { comps: c });
        out
    }

    /// Coefficient of `Z` when `w` is expanded in the frame.
    pub fn vertical_component(&self, w: &VectorField) -> Poly {
        let mut c = w.comps[self.z_index()].clone();
        for i in 0..self.n {
            let y = self.coord(self.y_index(i));
            let x = self.coord(self.x_index(i));
            // X_i carries -y_i along d/dz and Y_i carries +x_i
            c = &c + &(&w.comps[self.x_index(i)] * &y);
            c = &c - &(&w.comps[self.y_index(i)] * &x);
        }
        c
    }
}

/// A polynomial vector field `sum_k comps[k] d/dx_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub comps: Vec<Poly>,
}

impl VectorField {
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut acc = Poly::zero(f.nvars());
        for (k, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &(c * &f.deriv(k));
            }
        }
        acc
    }

    pub fn bracket(&self, other: &VectorField) -> VectorField {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| &self.apply(b) - &other.apply(a))
            .collect();
        VectorField { comps }
    }
}

/// The matrix `g_H(J_Z e_a, e_b) = g_V(Z, T(e_a, e_b))` on the horizontal
/// frame, with torsion `T(X, Y) = -[X, Y]_V`.
pub fn heisenberg_j_matrix(n: usize) -> Vec<Vec<BigRational>> {
    let frame = HeisenbergFrame::new(n);
    let fields = frame.frame_fields();
    let h = 2 * n;
    let mut j = vec![vec![BigRational::zero(); h]; h];
    for a in 0..h {
        for b in 0..h {
            let br = fields[a].bracket(&fields[b]);
            let vert = frame
                .vertical_component(&br)
                .as_constant()
                .expect("left-invariant bracket has constant components");
            j[a][b] = -vert;
        }
    }
    j
}

fn check_vars(n: usize, f: &Poly) -> Result<()> {
    if f.nvars() != 2 * n + 1 {
        return Err(Error::Unsupported(format!(
            "expected a polynomial in {} variables on the Heisenberg group with n = {n}, got {}",
            2 * n + 1,
            f.nvars()
        )));
    }
    Ok(())
}

/// Exact value of the requested form at a rational point.
pub fn heisenberg_gamma_calculus_exact(
    n: usize,
    f: &Poly,
    order: GammaOrder,
    point: &[BigRational],
) -> Result<BigRational> {
    check_vars(n, f)?;
    if point.len() != 2 * n + 1 {
        return Err(Error::domain("point dimension does not match the group"));
    }
    Ok(HeisenbergFrame::new(n).apply(order, f).eval(point))
}

/// Value of the requested form at a point; the point is converted exactly to
/// a rational before evaluation.
pub fn heisenberg_gamma_calculus(
    n: usize,
    f: &Poly,
    order: GammaOrder,
    point: &[f64],
) -> Result<f64> {
    let p: Vec<BigRational> = point.iter().map(|&v| rat_from_f64(v)).collect();
    heisenberg_gamma_calculus_exact(n, f, order, &p).map(|v| rat_to_f64(&v))
}

/// Residuals of `Delta_H Delta_V f = Delta_V Delta_H f` and
/// `Gamma(f, Gamma^V f) = Gamma^V(f, Gamma f)`.
///
/// Both differences are formed as exact polynomials; the return value is
/// zero exactly when both vanish identically, and otherwise the largest
/// absolute value over a fixed sample grid.
pub fn check_commutation(n: usize, f: &Poly) -> Result<f64> {
    check_vars(n, f)?;
    let fr = HeisenbergFrame::new(n);
    let d1 = &fr.delta_h(&fr.delta_v(f)) - &fr.delta_v(&fr.delta_h(f));
    let d2 = &fr.gamma(f, &fr.gamma_v(f, f)) - &fr.gamma_v(f, &fr.gamma(f, f));
    if d1.is_zero() && d2.is_zero() {
        return Ok(0.0);
    }
    let nv = 2 * n + 1;
    let mut worst = 0.0f64;
    for s in 0..27usize {
        let point: Vec<BigRational> = (0..nv)
            .map(|k| rat(((s / 3usize.pow((k % 3) as u32)) % 3) as i64 - 1 + k as i64 % 2))
            .collect();
        worst = worst
            .max(rat_to_f64(&d1.eval(&point)).abs())
            .max(rat_to_f64(&d2.eval(&point)).abs());
    }
    Ok(worst.max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{monomials_up_to, ratio};

    fn pt(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn gamma_examples() {
        let fr = HeisenbergFrame::new(1);
        let z = fr.coord(2);
        let x = fr.coord(0);
        let g = heisenberg_gamma_calculus_exact(1, &z, GammaOrder::Gamma, &pt(&[1, 2, 0])).unwrap();
        assert_eq!(g, rat(5));
        let gv = heisenberg_gamma_calculus(1, &x, GammaOrder::GammaV, &[0.3, -1.0, 2.0]).unwrap();
        assert_eq!(gv, 0.0);
        let g2 = heisenberg_gamma_calculus(1, &x, GammaOrder::Gamma2, &[0.3, -1.0, 2.0]).unwrap();
        assert_eq!(g2, 0.0);
        let bad = Poly::var(2, 0);
        assert!(matches!(
            heisenberg_gamma_calculus(1, &bad, GammaOrder::Gamma, &[0.0, 0.0, 0.0]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn frame_gamma_matches_carre_du_champ_definition() {
        // Gamma(f, g) = (1/2)(Delta_H(fg) - f Delta_H g - g Delta_H f)
        let fr = HeisenbergFrame::new(2);
        let nv = fr.nvars();
        let monos = monomials_up_to(nv, 3);
        for (i, e1) in monos.iter().enumerate().step_by(7) {
            let e2 = &monos[(i * 13 + 5) % monos.len()];
            let f = &Poly::monomial(e1.clone(), ratio(3, 2)) + &fr.coord(4);
            let g = Poly::monomial(e2.clone(), rat(-2));
            let def = &(&fr.delta_h(&(&f * &g)) - &(&f * &fr.delta_h(&g))) - &(&g * &fr.delta_h(&f));
            assert_eq!(fr.gamma(&f, &g), def.scale(&ratio(1, 2)));
        }
    }

    #[test]
    fn brackets_and_j_tensor() {
        for n in 1..=3 {
            let fr = HeisenbergFrame::new(n);
            let fields = fr.frame_fields();
            let z = &fields[2 * n];
            for i in 0..n {
                for j in 0..n {
                    let br = fields[i].bracket(&fields[n + j]);
                    if i == j {
                        let two_z = VectorField {
                            comps: z.comps.iter().map(|c| c.scale(&rat(2))).collect(),
                        };
                        assert_eq!(br, two_z);
                    } else {
                        assert!(br.comps.iter().all(Poly::is_zero));
                    }
                }
            }
            let j = heisenberg_j_matrix(n);
            // J^2 = -4 Id
            for a in 0..2 * n {
                for b in 0..2 * n {
                    let s: BigRational = (0..2 * n).map(|c| &j[a][c] * &j[c][b]).sum();
                    let want = if a == b { rat(-4) } else { rat(0) };
                    assert_eq!(s, want);
                }
            }
        }
    }

    #[test]
    fn commutation_examples() {
        let fr = HeisenbergFrame::new(1);
        let (x, y, z) = (fr.coord(0), fr.coord(1), fr.coord(2));
        assert_eq!(check_commutation(1, &(&(&x * &x) * &z)).unwrap(), 0.0);
        assert_eq!(check_commutation(1, &(&(&x * &y) * &(&z * &z))).unwrap(), 0.0);
        assert_eq!(check_commutation(1, &Poly::constant(3, rat(7))).unwrap(), 0.0);
    }
}
