//! Hidden-variable models for spin-1/2 and spin-1 systems.
//!
//! The crate builds deterministic outcome formulas out of sign functions of
//! hidden variables, evaluates their ensemble statistics in closed form and by
//! Monte Carlo, and compares them against an exact quantum-mechanical
//! reference for 2×2 and 3×3 Hermitian observables.
//!
//! Module map:
//!
//! - [`oracle`]: operator bases, Hermitian eigendecomposition, Born
//!   probabilities, expectations and variances.
//! - [`distributions`]: the power-law hidden-variable densities, sign
//!   functions, their exact averages and a seeded Monte Carlo estimator.
//! - [`spin_half`]: Bell's spin-1/2 rule, the ε-vector rule and the
//!   homogeneity split.
//! - [`spin_one`]: the case-table constructor for spin-1 beables.
//! - [`ks`]: the Kochen-Specker beable `Sx²+Sy²+Sz²` and its ε-deformation.
//! - [`quadrature`]: piecewise trapezoid integration used as an independent
//!   check on the closed forms.

pub mod distributions;
mod error;
pub mod ks;
pub mod oracle;
pub mod quadrature;
pub mod spin_half;
pub mod spin_one;

pub use error::{Error, Infeasible, Result};

/// Sign with `sign(0) = +1`.
///
/// Every sign evaluation in the crate goes through this function so the
/// convention at zero is uniform.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::sign;

    #[test]
    fn sign_of_zero_is_positive() {
        assert_eq!(sign(0.0), 1.0);
        assert_eq!(sign(-0.0), 1.0);
        assert_eq!(sign(1e-300), 1.0);
        assert_eq!(sign(-1e-300), -1.0);
    }
}
