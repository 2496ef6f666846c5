//! Diameter bounds: the ultracontractivity integral and the Bonnet-Myers form.

use hypolab::geometry_estimates::{bonnet_myers_diameter, phi_diameter, DiameterInputs};

fn main() -> hypolab::Result<()> {
    for (alpha, d) in [(1.0, 1.0), (3.0, 2.0), (0.5, 8.0)] {
        let (q, closed) = phi_diameter(alpha, d)?;
        println!("alpha = {alpha}, D = {d}: quadrature {q:.12} closed form {closed:.12}");
    }
    for beta in [2.5, 3.0, 4.0] {
        let b = bonnet_myers_diameter(&DiameterInputs {
            rho1: 4.0,
            rho2: 2.0,
            kappa: 1.0,
            n: 2,
            beta: Some(beta),
        })?;
        println!("beta = {beta}: bound {:.10} (beta = 3 form {:.10})", b.general, b.beta3);
    }
    Ok(())
}
