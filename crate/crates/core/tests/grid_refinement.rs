//! Grid quantities for `V = x^2/2` under one refinement doubling.

use hypolab::kfp::{hypocoercive_decay, logsob_constant, poincare_constant, DecayMode, PhaseGrid, Potential};

fn grid(n: usize) -> PhaseGrid {
    PhaseGrid::for_potential(&Potential::quadratic(1.0).unwrap(), n, n).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

#[test]
fn functional_inequality_constants_are_stable() {
    let pot = Potential::quadratic(1.0).unwrap();
    let (p1, p2) = (poincare_constant(&pot, &grid(64)).unwrap(), poincare_constant(&pot, &grid(128)).unwrap());
    assert!(close(p1.kappa, p2.kappa, 0.02), "{} vs {}", p1.kappa, p2.kappa);
    let (l1, l2) = (logsob_constant(&pot, &grid(64)).unwrap(), logsob_constant(&pot, &grid(128)).unwrap());
    assert!(close(l1.kappa, l2.kappa, 0.02), "{} vs {}", l1.kappa, l2.kappa);
}

#[test]
fn decay_rates_are_stable() {
    let pot = Potential::quadratic(1.0).unwrap();
    for (mode, t_end, n) in [(DecayMode::Poincare, 10.0, 64), (DecayMode::Logsob, 8.0, 48)] {
        let a = hypocoercive_decay(&pot, None, t_end, &grid(n), mode, 0.25).unwrap();
        let b = hypocoercive_decay(&pot, None, t_end, &grid(2 * n), mode, 0.25).unwrap();
        assert!(
            close(a.lambda_fitted, b.lambda_fitted, 0.05),
            "{mode:?}: {} vs {}",
            a.lambda_fitted,
            b.lambda_fitted
        );
        assert!(a.passed && b.passed);
    }
}
