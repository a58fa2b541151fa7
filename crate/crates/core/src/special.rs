//! Gamma-function helpers that stay finite at the poles.

use statrs::function::gamma::gamma;
use std::f64::consts::PI;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// `1/Γ(x)`, exactly zero at `x = 0, −1, −2, …`.
pub fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x < 0.5 {
        // Reflection keeps full relative accuracy for negative arguments.
        return (PI * x).sin() * gamma(1.0 - x) / PI;
    }
    1.0 / gamma(x)
}

/// `Γ(x)`, `None` at a pole.
pub fn gamma_checked(x: f64) -> Option<f64> {
    if is_nonpositive_integer(x) {
        None
    } else {
        Some(gamma(x))
    }
}

/// `1/B(a, b) = Γ(a+b) / (Γ(a) Γ(b))`, `None` if `a + b` is a pole.
pub fn recip_beta(a: f64, b: f64) -> Option<f64> {
    gamma_checked(a + b).map(|g| g * recip_gamma(a) * recip_gamma(b))
}
