//! Central finite-difference stencils.

/// Fourth-order first derivative.
pub fn d1_o4(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Fourth-order second derivative.
pub fn d2_o4(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
        / (12.0 * h * h)
}

/// Sixth-order first derivative.
pub fn d1_o6(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x - 3.0 * h) + 9.0 * f(x - 2.0 * h) - 45.0 * f(x - h) + 45.0 * f(x + h)
        - 9.0 * f(x + 2.0 * h)
        + f(x + 3.0 * h))
        / (60.0 * h)
}

/// Sixth-order second derivative.
pub fn d2_o6(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (2.0 * f(x - 3.0 * h) - 27.0 * f(x - 2.0 * h) + 270.0 * f(x - h) - 490.0 * f(x)
        + 270.0 * f(x + h)
        - 27.0 * f(x + 2.0 * h)
        + 2.0 * f(x + 3.0 * h))
        / (180.0 * h * h)
}
