//! Both sides of the semigroup gradient bound, with a constant that is too small.

use hypolab::jet::Jet2;
use hypolab::kfp::{gradient_bound_check, PhaseGrid, Potential};

fn main() -> hypolab::Result<()> {
    let pot = Potential::quadratic(1.0)?;
    let grid = PhaseGrid::for_potential(&pot, 64, 64)?;
    let f0 = |x: &Jet2, v: &Jet2| &x.sin() * &(v * v).scale(-1.0).exp();
    let ok = gradient_bound_check(&pot, &f0, 0.5, &grid, None)?;
    println!("K = {}: interior relative slack {:.3e}, passed {}", ok.k, ok.interior_min, ok.passed);
    let bad = gradient_bound_check(&pot, &f0, 0.5, &grid, Some(ok.k - 1.0))?;
    println!(
        "K = {}: interior relative slack {:.3e} at {:?}, passed {}",
        bad.k, bad.interior_min, bad.worst_point, bad.passed
    );
    Ok(())
}
