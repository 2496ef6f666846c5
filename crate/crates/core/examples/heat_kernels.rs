//! Heat kernels on the three model spaces, each compact one by two routes.

use hypolab::heat_kernels::{
    heisenberg_kernel, hopf_kernel_integral, hopf_kernel_series, quaternionic_kernel_integral,
    quaternionic_kernel_series, QuadratureSpec, SeriesTruncation,
};

fn main() -> hypolab::Result<()> {
    let trunc = SeriesTruncation::default();
    let quad = QuadratureSpec::default();
    println!("{:>14} {:>5} {:>5} {:>5} {:>20} {:>20} {:>10}", "model", "t", "r", "fiber", "series", "integral", "rel diff");
    for &(t, r, th) in &[(0.3, 0.4, 0.0), (0.5, 0.7, 0.4), (1.5, 1.2, 2.0)] {
        let s = hopf_kernel_series(1, t, r, th, &trunc)?.value;
        let i = hopf_kernel_integral(1, t, r, th, &quad)?.value;
        println!("{:>14} {t:>5} {r:>5} {th:>5} {s:>20.14e} {i:>20.14e} {:>10.2e}", "hopf n=1", (s - i).abs() / s);
        let s = quaternionic_kernel_series(1, t, r, th + 0.2, &trunc)?.value;
        let i = quaternionic_kernel_integral(1, t, r, th + 0.2, &quad)?.value;
        println!("{:>14} {t:>5} {r:>5} {:>5.1} {s:>20.14e} {i:>20.14e} {:>10.2e}", "quaternionic", th + 0.2, (s - i).abs() / s);
    }
    for &(t, r, z) in &[(0.5, 0.0, 0.0), (1.0, 0.5, 0.3), (2.0, 1.5, 1.0)] {
        let p = heisenberg_kernel(1, t, r, z, &quad)?;
        println!("heisenberg n=1 t={t} r={r} z={z}: {:.14e} (error estimate {:.1e})", p.value, p.error_estimate);
    }
    Ok(())
}
