//! Normalization constants for the nonlocal operators.
//!
//! All constants are evaluated in `f64` through log-Gamma (to dodge
//! overflow and keep the poles explicit) and converted to the working
//! scalar type at the end.

use crate::error::{FracError, Result};
use crate::scalar::Scalar;
use statrs::function::gamma::ln_gamma;

/// Gamma function on the real line, poles excluded.
///
/// Positive arguments go through `exp(ln_gamma)`; negative non-integer
/// arguments use the reflection formula so that the sign comes out right
/// (needed for the negative constant in the fractional Laplacian).
pub fn gamma(x: f64) -> f64 {
    if x > 0.0 {
        ln_gamma(x).exp()
    } else {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let s = (std::f64::consts::PI * x).sin();
        std::f64::consts::PI / (s * ln_gamma(1.0 - x).exp())
    }
}

fn check_not_pole(x: f64, what: &str) -> Result<()> {
    let nearest = x.round();
    if nearest <= 0.0 && (x - nearest).abs() < 1e-12 {
        return Err(FracError::AlphaRange(format!(
            "{what}: Gamma argument {x} sits on a nonpositive-integer pole"
        )));
    }
    Ok(())
}

/// mu_{n,alpha} = 2^alpha pi^{-n/2} Gamma((n+alpha+1)/2) / Gamma((1-alpha)/2).
///
/// Defined for any real `alpha` away from the Gamma poles; negative orders
/// are legal (the 1D sharp example uses mu_{1,-alpha}).
pub fn mu(n: usize, alpha: f64) -> Result<f64> {
    let num_arg = (n as f64 + alpha + 1.0) / 2.0;
    let den_arg = (1.0 - alpha) / 2.0;
    check_not_pole(num_arg, "mu numerator")?;
    check_not_pole(den_arg, "mu denominator")?;
    let ln_mag = alpha * std::f64::consts::LN_2 - (n as f64 / 2.0) * std::f64::consts::PI.ln();
    Ok(gamma_sign(num_arg) * gamma_sign(den_arg) * (ln_mag + ln_gamma_abs(num_arg) - ln_gamma_abs(den_arg)).exp())
}

/// nu_{n,alpha} = 2^alpha pi^{-n/2} Gamma((n+alpha)/2) / Gamma(-alpha/2).
///
/// Negative for alpha in (0,1) because Gamma(-alpha/2) < 0; the fractional
/// Laplacian written against this constant is the usual positive operator.
pub fn nu_lap(n: usize, alpha: f64) -> Result<f64> {
    let num_arg = (n as f64 + alpha) / 2.0;
    let den_arg = -alpha / 2.0;
    check_not_pole(num_arg, "nu numerator")?;
    check_not_pole(den_arg, "nu denominator")?;
    let ln_mag = alpha * std::f64::consts::LN_2 - (n as f64 / 2.0) * std::f64::consts::PI.ln();
    Ok(gamma_sign(num_arg) * gamma_sign(den_arg) * (ln_mag + ln_gamma_abs(num_arg) - ln_gamma_abs(den_arg)).exp())
}

/// Riesz potential normalization 2^{-alpha} pi^{-n/2} Gamma((n-alpha)/2) / Gamma(alpha/2).
pub fn riesz_norm(n: usize, alpha: f64) -> Result<f64> {
    if alpha <= 0.0 || alpha >= n as f64 {
        return Err(FracError::AlphaRange(format!(
            "Riesz potential order {alpha} outside (0, {n})"
        )));
    }
    let ln_mag = -alpha * std::f64::consts::LN_2 - (n as f64 / 2.0) * std::f64::consts::PI.ln();
    Ok((ln_mag + ln_gamma((n as f64 - alpha) / 2.0) - ln_gamma(alpha / 2.0)).exp())
}

/// omega_beta = pi^{beta/2} / Gamma((beta+2)/2); omega_n is the volume of
/// the unit ball, so omega_1 = 2 and omega_2 = pi.
pub fn omega(beta: f64) -> f64 {
    ((beta / 2.0) * std::f64::consts::PI.ln() - ln_gamma((beta + 2.0) / 2.0)).exp()
}

fn ln_gamma_abs(x: f64) -> f64 {
    if x > 0.0 {
        ln_gamma(x)
    } else {
        // |Gamma(x)| via reflection
        let s = (std::f64::consts::PI * x).sin().abs();
        std::f64::consts::PI.ln() - s.ln() - ln_gamma(1.0 - x)
    }
}

fn gamma_sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        // Gamma alternates sign between consecutive negative integers
        if (std::f64::consts::PI * x).sin() >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Evaluated constants for one (n, alpha) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracConstants<T: Scalar> {
    pub n: usize,
    pub alpha: T,
    /// mu_{n,alpha}, gradient/divergence normalization
    pub mu: T,
    /// nu_{n,alpha}, fractional Laplacian constant (negative)
    pub nu_lap: T,
}

impl<T: Scalar> FracConstants<T> {
    pub fn new(n: usize, alpha: T) -> Result<Self> {
        let a = alpha.f64();
        Ok(Self {
            n,
            alpha,
            mu: T::of(mu(n, a)?),
            nu_lap: T::of(nu_lap(n, a)?),
        })
    }

    /// Riesz normalization at an arbitrary order in (0, n).
    pub fn riesz_norm(&self, order: T) -> Result<T> {
        Ok(T::of(riesz_norm(self.n, order.f64())?))
    }

    /// omega_beta for any beta > 0.
    pub fn omega(&self, beta: T) -> T {
        T::of(omega(beta.f64()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // reference values computed with 30-digit arithmetic
    #[test]
    fn mu_matches_reference() {
        assert_relative_eq!(mu(1, 0.25).unwrap(), 0.266554830338112025903896575951, max_relative = 1e-13);
        assert_relative_eq!(mu(1, 0.5).unwrap(), 0.199471140200716338969973029967, max_relative = 1e-13);
        assert_relative_eq!(mu(1, 0.75).unwrap(), 0.111952770812210745953447961854, max_relative = 1e-13);
        assert_relative_eq!(mu(2, 0.5).unwrap(), 0.114111419793701561950134714662, max_relative = 1e-13);
    }

    #[test]
    fn mu_negative_order() {
        assert_relative_eq!(mu(1, -0.3).unwrap(), 0.368149501758254844334826544, max_relative = 1e-13);
        assert_relative_eq!(mu(1, -0.5).unwrap(), 0.398942280401432677939946059934, max_relative = 1e-13);
        assert_relative_eq!(mu(1, -0.7).unwrap(), 0.432310630142871512966168470703, max_relative = 1e-13);
    }

    #[test]
    fn nu_is_negative_and_matches_reference() {
        assert_relative_eq!(nu_lap(1, 0.5).unwrap(), -0.199471140200716338969973029967, max_relative = 1e-13);
        assert_relative_eq!(nu_lap(2, 0.3).unwrap(), -0.0493011909158835434718431165696, max_relative = 1e-12);
        assert!(nu_lap(1, 0.9).unwrap() < 0.0);
    }

    #[test]
    fn riesz_norm_matches_reference() {
        assert_relative_eq!(riesz_norm(1, 0.5).unwrap(), 0.398942280401432677939946059934, max_relative = 1e-13);
        assert_relative_eq!(riesz_norm(1, 0.7).unwrap(), 0.848457384359951248765803532751, max_relative = 1e-13);
        assert_relative_eq!(riesz_norm(2, 0.5).unwrap(), 0.0760742798624677079667564764417, max_relative = 1e-13);
        assert!(riesz_norm(1, 1.2).is_err());
    }

    #[test]
    fn omega_small_dims() {
        assert_relative_eq!(omega(1.0), 2.0, max_relative = 1e-14);
        assert_relative_eq!(omega(2.0), std::f64::consts::PI, max_relative = 1e-14);
        assert_relative_eq!(omega(0.5), 1.46881258326360937622844867274, max_relative = 1e-13);
    }

    #[test]
    fn mu_pole_is_an_error() {
        // (1-alpha)/2 hits 0 at alpha = 1
        assert!(mu(1, 1.0).is_err());
    }

    #[test]
    fn constants_struct_generic_over_scalar() {
        let c64 = FracConstants::<f64>::new(1, 0.5).unwrap();
        let c32 = FracConstants::<f32>::new(1, 0.5).unwrap();
        assert_relative_eq!(c64.mu, 0.199471140200716, max_relative = 1e-12);
        assert!((c32.mu - 0.19947114f32).abs() < 1e-6);
    }
}
