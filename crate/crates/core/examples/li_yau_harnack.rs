//! Li-Yau and Harnack slacks for the Heisenberg heat kernel.

use hypolab::geometry_estimates::{d_alpha, harnack_check, liyau_slack, LiYauConstants};
use hypolab::model_spaces::{curvature_constants, Convention, ModelSpace, RadialPoint};

fn main() -> hypolab::Result<()> {
    let c = curvature_constants(ModelSpace::heisenberg(1)?, Convention::CdQuarterTrace)?;
    let ly = LiYauConstants {
        alpha: 3.0,
        n: c.horizontal_dim,
        kappa: c.kappa,
        rho1: c.rho1,
        rho2: c.rho2,
    };
    println!("D_alpha at alpha = 3: {}", d_alpha(ly.n, ly.kappa, ly.rho2, 3.0)?);
    for t in [0.3, 1.0, 2.0] {
        let s = liyau_slack(1, 0.2, t, RadialPoint::new(0.5, 0.4), &ly)?;
        println!("Li-Yau slack at t = {t}: {s:.6}");
    }
    for x in [0.0, 1.0, 2.0] {
        let h = harnack_check(1, x, 0.5, 0.5, 1.5, 3.0)?;
        println!("Harnack x = {x}: u(x, s) = {:.6e} <= {:.6e}", h.lhs, h.rhs);
    }
    Ok(())
}
