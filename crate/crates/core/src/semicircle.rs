//! Semicircle law special functions.

use std::f64::consts::PI;

use crate::error::{GlassError, Result};

/// Density of the semicircle law on `[−2, 2]`.
pub fn density(x: f64) -> f64 {
    if x.abs() <= 2.0 {
        (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI)
    } else {
        0.0
    }
}

/// Log-potential `Ω(x) = ∫ log|λ − x| dμ(λ)` of the semicircle law.
pub fn omega(x: f64) -> f64 {
    let a = x.abs();
    let inner = x * x / 4.0 - 0.5;
    if a <= 2.0 {
        inner
    } else {
        let s = (x * x - 4.0).sqrt();
        inner - (a / 4.0 * s - ((x * x / 4.0 - 1.0).sqrt() + a / 2.0).ln())
    }
}

/// `Ω'(x)`; bounded by 1 in absolute value.
pub fn omega_prime(x: f64) -> f64 {
    if x.abs() <= 2.0 {
        x / 2.0
    } else {
        (x - x.signum() * (x * x - 4.0).sqrt()) / 2.0
    }
}

/// Large deviation rate function of the top GOE eigenvalue, defined for
/// `x ≥ √2`.
pub fn goe_rate_i1(x: f64) -> Result<f64> {
    let lo = 2f64.sqrt();
    if !(x >= lo) {
        return Err(GlassError::Domain(format!("I1 requires x >= sqrt(2), got {x}")));
    }
    let s = (x * x - 2.0).max(0.0).sqrt();
    Ok(0.5 * (x * s + 2f64.ln() - 2.0 * (x + s).ln()).max(0.0))
}
