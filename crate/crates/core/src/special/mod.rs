//! Airy functions, their zeros and the Gamma function.

mod airy;
mod zeros;

pub use airy::{
    airy, airy_bi_series, airy_scaled, decay_exponent, AiryValue, ScaledAiry, AI_PRIME_ZERO,
    AI_ZERO, X_MAX,
};
pub use zeros::{
    ai_prime_zero, ai_zero, airy_root, asymptotic_root, AiryRootTable, ZeroKind, TABLE_SIZE,
};

use crate::error::{Error, Result};

/// Gamma function for positive arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma_fn requires x > 0, got {x}")));
    }
    Ok(libm::tgamma(x))
}

/// Field at which the ground level of the attractive wall crosses zero energy,
/// `Gamma(1/3)^3 / (3 Gamma(2/3)^3)`.
pub fn zero_energy_field() -> f64 {
    let g13 = libm::tgamma(1.0 / 3.0);
    let g23 = libm::tgamma(2.0 / 3.0);
    g13.powi(3) / (3.0 * g23.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert!((gamma_fn(0.5).unwrap() - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert!((gamma_fn(5.0).unwrap() - 24.0).abs() < 1e-12);
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
    }

    #[test]
    fn zero_energy_field_value() {
        assert!((zero_energy_field() - 2.581_056_539_840_464).abs() < 1e-12);
    }
}
