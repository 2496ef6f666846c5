//! Exact curvature-dimension slack and commutation on the Heisenberg group.

use hypolab::geometry_estimates::cd_inequality_slack_exact;
use hypolab::model_spaces::{check_commutation, curvature_constants, Convention, ModelSpace};
use hypolab::poly::{rat, ratio, Poly};
use hypolab::suites::random_cubic;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hypolab::Result<()> {
    let c = curvature_constants(ModelSpace::heisenberg(1)?, Convention::CdQuarterTrace)?;
    println!("constants: rho1 = {}, kappa = {}, rho2 = {}, n = {}", c.rho1, c.kappa, c.rho2, c.horizontal_dim);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let point = [ratio(1, 2), ratio(-3, 4), rat(1)];
    for _ in 0..3 {
        let f = random_cubic(3, &mut rng);
        for eps in [ratio(1, 10), rat(1), rat(10)] {
            let s = cd_inequality_slack_exact(&f, &point, &eps, &c)?;
            println!("eps = {eps}: slack = {s}");
        }
    }
    let f = Poly::monomial(vec![2, 1, 3], rat(1));
    println!("commutation residual on x^2 y z^3: {}", check_commutation(1, &f)?);
    Ok(())
}
