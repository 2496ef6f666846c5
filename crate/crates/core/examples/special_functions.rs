//! Jacobi and Gegenbauer recurrences and the theta function.

use hypolab::specfun::{gegenbauer_all, jacobi_all, theta_v, ThetaArgs};

fn main() -> hypolab::Result<()> {
    let x = 0.3;
    println!("P_m^(1,2)({x}), m = 0..5: {:?}", jacobi_all(1.0, 2.0, 5, x));
    println!("C_m^(1.5)({x}), m = 0..5: {:?}", gegenbauer_all(1.5, 5, x));
    for t in [0.05, 0.5, 2.0] {
        let v = theta_v(ThetaArgs::auto(t, 1.0)?)?;
        println!("V({t}, 1) = {v:.12}");
    }
    Ok(())
}
