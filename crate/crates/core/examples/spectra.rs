//! Low spectrum of the Hopf fibrations and the first-eigenvalue bound.

use hypolab::model_spaces::{ModelKind, ModelSpace};
use hypolab::spectral_bounds::{check_sharpness, enumerate_spectrum};

fn main() -> hypolab::Result<()> {
    for model in [ModelSpace::hopf(1)?, ModelSpace::quaternionic(1)?] {
        let levels: Vec<u64> = enumerate_spectrum(model, 10)?.iter().map(|e| e.eigenvalue).collect();
        println!("{:?} n = 1: {levels:?}", model.kind);
    }
    for kind in [ModelKind::Hopf, ModelKind::QuaternionicHopf] {
        for row in check_sharpness(kind, 1..=5)? {
            println!("{kind:?} d = {}: bound {} lambda1 {} equal {}", row.d, row.bound, row.lambda1, row.equal);
        }
    }
    Ok(())
}
