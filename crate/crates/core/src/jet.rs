//! Truncated Taylor arithmetic ("jets") for exact-to-rounding derivatives.
//!
//! [`Jet`] carries `f(a + h) = sum c_k h^k` up to a fixed order in one variable,
//! [`Jet2`] does the same for two variables. Both support the handful of
//! elementary functions needed by the theta-function derivative stack and the
//! phase-space operators.

use std::ops::{Add, Mul, Neg, Sub};

/// Univariate truncated Taylor series; `coeffs[k] = f^(k)(a) / k!`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Self { coeffs }
    }

    /// The identity function expanded at `at`.
    pub fn variable(at: f64, order: usize) -> Self {
        let mut j = Self::constant(at, order);
        if order >= 1 {
            j.coeffs[1] = 1.0;
        }
        j
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// k-th derivative at the expansion point.
    pub fn derivative_at(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.coeffs.get(k).copied().unwrap_or(0.0) * fact
    }

    /// Derivative as a jet of one lower order.
    pub fn differentiate(&self) -> Jet {
        if self.order() == 0 {
            return Jet::constant(0.0, 0);
        }
        let coeffs = (1..self.coeffs.len())
            .map(|k| k as f64 * self.coeffs[k])
            .collect();
        Jet { coeffs }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, 0.0);
        Jet { coeffs }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn exp(&self) -> Jet {
        // f' = f g'  =>  k e_k = sum_{j=1..k} j g_j e_{k-j}
        let n = self.coeffs.len();
        let mut e = vec![0.0; n];
        e[0] = self.coeffs[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k)
                .map(|j| j as f64 * self.coeffs[j] * e[k - j])
                .sum();
            e[k] = s / k as f64;
        }
        Jet { coeffs: e }
    }

    /// Simultaneous sine and cosine.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.coeffs.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = self.coeffs[0].sin();
        c[0] = self.coeffs[0].cos();
        for k in 1..n {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                let jg = j as f64 * self.coeffs[j];
                ss += jg * c[k - j];
                cc -= jg * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = cc / k as f64;
        }
        (Jet { coeffs: s }, Jet { coeffs: c })
    }

    pub fn recip(&self) -> Jet {
        let n = self.coeffs.len();
        let a0 = self.coeffs[0];
        let mut r = vec![0.0; n];
        r[0] = 1.0 / a0;
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| self.coeffs[j] * r[k - j]).sum();
            r[k] = -s / a0;
        }
        Jet { coeffs: r }
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        Jet {
            coeffs: (0..n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        Jet {
            coeffs: (0..n).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            for (j, b) in rhs.coeffs.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Jet { coeffs: out }
    }
}

/// Bivariate truncated Taylor series in `(x, v)` with total degree `<= order`.
///
/// Coefficients are stored densely in a `(order+1) x (order+1)` array; entries
/// with `i + j > order` stay zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    order: usize,
    c: Vec<f64>,
}

impl Jet2 {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.order + 1) + j
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut c = vec![0.0; (order + 1) * (order + 1)];
        c[0] = value;
        Self { order, c }
    }

    /// The coordinate `x` expanded at `(x0, v0)`.
    pub fn var_x(x0: f64, order: usize) -> Self {
        let mut j = Self::constant(x0, order);
        if order >= 1 {
            let k = j.idx(1, 0);
            j.c[k] = 1.0;
        }
        j
    }

    /// The coordinate `v` expanded at `(x0, v0)`.
    pub fn var_v(v0: f64, order: usize) -> Self {
        let mut j = Self::constant(v0, order);
        if order >= 1 {
            let k = j.idx(0, 1);
            j.c[k] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Taylor coefficient of `h_x^i h_v^j`.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.c[self.idx(i, j)]
        }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Mixed partial derivative `d^i/dx^i d^j/dv^j` at the expansion point.
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        let fi: f64 = (1..=i).map(|k| k as f64).product();
        let fj: f64 = (1..=j).map(|k| k as f64).product();
        self.coeff(i, j) * fi * fj
    }

    pub fn dx(&self) -> Jet2 {
        self.derive(true)
    }

    pub fn dv(&self) -> Jet2 {
        self.derive(false)
    }

    fn derive(&self, in_x: bool) -> Jet2 {
        let order = self.order.saturating_sub(1);
        let mut out = Jet2::constant(0.0, order);
        if self.order == 0 {
            return out;
        }
        for i in 0..=order {
            for j in 0..=(order - i) {
                let v = if in_x {
                    (i + 1) as f64 * self.coeff(i + 1, j)
                } else {
                    (j + 1) as f64 * self.coeff(i, j + 1)
                };
                let k = out.idx(i, j);
                out.c[k] = v;
            }
        }
        out
    }

    pub fn truncate(&self, order: usize) -> Jet2 {
        let mut out = Jet2::constant(0.0, order);
        for i in 0..=order {
            for j in 0..=(order - i) {
                let k = out.idx(i, j);
                out.c[k] = self.coeff(i, j);
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Jet2 {
        Jet2 {
            order: self.order,
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add_const(&self, s: f64) -> Jet2 {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    /// Applies a univariate function given through its Taylor coefficients
    /// at the constant term: `sum_k g_k (f - f0)^k`.
    fn compose(&self, g: &[f64]) -> Jet2 {
        let mut nil = self.clone();
        nil.c[0] = 0.0;
        let mut out = Jet2::constant(g[0], self.order);
        let mut power = Jet2::constant(1.0, self.order);
        for gk in g.iter().skip(1) {
            power = &power * &nil;
            for (o, p) in out.c.iter_mut().zip(&power.c) {
                *o += gk * p;
            }
        }
        out
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.c[0].exp();
        let mut g = vec![e; self.order + 1];
        let mut fact = 1.0;
        for (k, gk) in g.iter_mut().enumerate().skip(1) {
            fact *= k as f64;
            *gk = e / fact;
        }
        self.compose(&g)
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = (self.c[0].sin(), self.c[0].cos());
        let cycle = [s, c, -s, -c];
        let mut fact = 1.0;
        let g: Vec<f64> = (0..=self.order)
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                cycle[k % 4] / fact
            })
            .collect();
        self.compose(&g)
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = (self.c[0].sin(), self.c[0].cos());
        let cycle = [c, -s, -c, s];
        let mut fact = 1.0;
        let g: Vec<f64> = (0..=self.order)
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                cycle[k % 4] / fact
            })
            .collect();
        self.compose(&g)
    }

    pub fn powi(&self, n: u32) -> Jet2 {
        let mut out = Jet2::constant(1.0, self.order);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        let order = self.order.min(rhs.order);
        let (a, b) = (self.truncate(order), rhs.truncate(order));
        Jet2 {
            order,
            c: a.c.iter().zip(&b.c).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        let order = self.order.min(rhs.order);
        let (a, b) = (self.truncate(order), rhs.truncate(order));
        Jet2 {
            order,
            c: a.c.iter().zip(&b.c).map(|(x, y)| x - y).collect(),
        }
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        let order = self.order.min(rhs.order);
        let mut out = Jet2::constant(0.0, order);
        for i1 in 0..=order {
            for j1 in 0..=(order - i1) {
                let a = self.coeff(i1, j1);
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..=(order - i1 - j1) {
                    for j2 in 0..=(order - i1 - j1 - i2) {
                        let k = out.idx(i1 + i2, j1 + j2);
                        out.c[k] += a * rhs.coeff(i2, j2);
                    }
                }
            }
        }
        out
    }
}
