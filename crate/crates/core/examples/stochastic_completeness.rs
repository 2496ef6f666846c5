//! Total mass of each heat kernel, and the fibration relation.

use hypolab::heat_kernels::{heisenberg_mass, hopf_mass, hopf_quaternionic_relation, quaternionic_mass};

fn main() -> hypolab::Result<()> {
    for t in [0.1, 0.5, 2.0] {
        println!(
            "t = {t}: heisenberg {:.15}  hopf {:.15}  quaternionic {:.15}",
            heisenberg_mass(1, t)?,
            hopf_mass(1, t)?,
            quaternionic_mass(1, t)?
        );
    }
    let rel = hopf_quaternionic_relation(1, 0.8, 0.9, 1.2)?;
    println!("quaternionic kernel {:.14e} vs Hopf derivative {:.14e} (relative {:.1e})", rel.lhs, rel.rhs, rel.relative);
    Ok(())
}
