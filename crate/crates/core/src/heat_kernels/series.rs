//! Truncation planning for the double spectral sums.
//!
//! Every term is bounded in absolute value by `exp(log_bound(m, k))`. The
//! planner keeps all terms whose bound exceeds a threshold and reports the
//! summed bound of everything it dropped.

use crate::specfun::ln_gamma;

/// `ln binom(a + b, b)` for nonnegative reals.
pub(crate) fn ln_binom(top: f64, bottom: f64) -> f64 {
    ln_gamma(top + 1.0) - ln_gamma(bottom + 1.0) - ln_gamma(top - bottom + 1.0)
}

/// `ln sup_{[-1,1]} |P_m^{(a,b)}|` for `max(a, b) >= -1/2`.
pub(crate) fn ln_jacobi_sup(m: usize, a: f64, b: f64) -> f64 {
    let q = a.max(b);
    ln_binom(m as f64 + q, m as f64)
}

/// Every scanned index pair with its log bound, in row-major order.
fn scan(log_bound: &dyn Fn(usize, usize) -> f64, floor: f64) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    let mut prev_row_max = f64::INFINITY;
    for k in 0.. {
        let mut row_max = f64::NEG_INFINITY;
        let mut prev = f64::INFINITY;
        for m in 0.. {
            let lb = log_bound(m, k);
            out.push((m, k, lb));
            row_max = row_max.max(lb);
            if (lb < floor && lb <= prev && m >= 2) || m > 100_000 {
                break;
            }
            prev = lb;
        }
        if (row_max < floor && row_max <= prev_row_max && k >= 2) || k > 100_000 {
            break;
        }
        prev_row_max = row_max;
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Plan {
    pub max_m: usize,
    pub max_k: usize,
    pub tail: f64,
}

/// Smallest rectangle `[0, M] x [0, K]` whose excluded bound sum is below `tol`.
pub(crate) fn plan(log_bound: &dyn Fn(usize, usize) -> f64, tol: f64) -> Plan {
    let floor = tol.ln() - 45.0;
    let terms = scan(log_bound, floor);
    let mut thresh = tol.ln() - 4.0 * std::f64::consts::LN_10;
    loop {
        let (mut max_m, mut max_k) = (0, 0);
        for &(m, k, lb) in &terms {
            if lb >= thresh {
                max_m = max_m.max(m);
                max_k = max_k.max(k);
            }
        }
        let tail = excluded(&terms, max_m, max_k);
        if tail <= tol || thresh < floor {
            return Plan { max_m, max_k, tail };
        }
        thresh -= 2.0;
    }
}

fn excluded(terms: &[(usize, usize, f64)], max_m: usize, max_k: usize) -> f64 {
    terms
        .iter()
        .filter(|&&(m, k, _)| m > max_m || k > max_k)
        .map(|&(_, _, lb)| lb.exp())
        .sum()
}

/// Summed bound of the terms outside `[0, max_m] x [0, max_k]`.
pub(crate) fn tail_bound(
    log_bound: &dyn Fn(usize, usize) -> f64,
    max_m: usize,
    max_k: usize,
    tol: f64,
) -> f64 {
    let terms = scan(log_bound, tol.ln() - 45.0);
    excluded(&terms, max_m, max_k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_plan() {
        // bound 2^{-(m+k)}: tail outside the square [0,M]^2 is about 4 * 2^{-M}
        let lb = |m: usize, k: usize| -((m + k) as f64) * std::f64::consts::LN_2;
        let p = plan(&lb, 1e-6);
        assert!(p.tail <= 1e-6);
        assert!(p.max_m >= 20 && p.max_m <= 40);
        let t = tail_bound(&lb, p.max_m, p.max_k, 1e-6);
        assert!((t - p.tail).abs() < 1e-12);
    }

    #[test]
    fn binomials() {
        assert!((ln_binom(5.0, 2.0).exp() - 10.0).abs() < 1e-12);
        assert!((ln_jacobi_sup(3, 1.0, 2.0).exp() - 10.0).abs() < 1e-12);
    }
}
