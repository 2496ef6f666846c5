//! Decay of the twisted functional on a phase-space grid, printed as (t, F).

use hypolab::kfp::{hypocoercive_decay, poincare_constant, DecayMode, PhaseGrid, Potential};

fn main() -> hypolab::Result<()> {
    let pot = Potential::quadratic(1.0)?;
    let grid = PhaseGrid::for_potential(&pot, 64, 64)?;
    let p = poincare_constant(&pot, &grid)?;
    println!("# Poincare constant on the grid: {:.6} (exact {:.6})", p.kappa, 3.0 - 5f64.sqrt());
    let r = hypocoercive_decay(&pot, None, 10.0, &grid, DecayMode::Poincare, 0.25)?;
    println!("# predicted rate {:.4}, fitted rate {:.4}", r.lambda_predicted, r.lambda_fitted);
    println!("t,functional");
    for (t, f) in r.times.iter().zip(&r.functional).step_by(30) {
        println!("{t:.3},{f:.6e}");
    }
    Ok(())
}
