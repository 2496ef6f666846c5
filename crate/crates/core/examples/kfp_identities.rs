//! Pointwise identities of the kinetic Fokker-Planck operator.

use hypolab::kfp::{
    bochner_min_slack, gradient_bound_k, invariance_battery, invariance_residual, k_eta, Potential,
};

fn main() -> hypolab::Result<()> {
    for pot in [Potential::quadratic(1.0)?, Potential::perturbed(1.0, 0.3)?] {
        println!("{pot:?}");
        let worst = invariance_battery()
            .iter()
            .map(|(_, f)| invariance_residual(&pot, f.as_ref()))
            .collect::<hypolab::Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("  max invariance residual: {worst:.2e}");
        println!("  Bochner min slack (200 samples): {:.3e}", bochner_min_slack(&pot, 200, 1));
        for eta in [0.1, 0.2, 0.3, 0.4] {
            let k = k_eta(&pot, eta)?;
            println!("  K({eta}) = {:.6} (tight at V'' = {:.3})", k.k, k.worst_hessian);
        }
        println!("  gradient-bound K = {}", gradient_bound_k(&pot));
    }
    Ok(())
}
