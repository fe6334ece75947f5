//! The spectral budget profile `f(t) = 1/(1 + μt²)` and the constants it induces.
//!
//! With `∫₀^∞ f² = 1` (which pins `μ = π²/16`) the remainder kernel of the
//! filtered family is bounded by `A·E` with `A = √μ/16 = π/64`, and the final
//! integration step turns `A` into the constant `1/(6A) = 32/(3π)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{integrate_semi_infinite, Strategy};

/// `μ = π²/16`, the unique parameter with unit `L²` mass.
pub const OPTIMAL_MU: f64 = PI * PI / 16.0;

const QUAD_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetProfile {
    pub mu: f64,
}

impl Default for BudgetProfile {
    fn default() -> Self {
        BudgetProfile { mu: OPTIMAL_MU }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub mu: f64,
    pub normalization_residual: f64,
    pub objective_value: f64,
    pub induced_a: f64,
}

impl BudgetProfile {
    pub fn new(mu: f64) -> Result<Self> {
        if mu > 0.0 && mu.is_finite() {
            Ok(BudgetProfile { mu })
        } else {
            Err(Error::InvalidParameter(format!(
                "profile parameter must be positive, got {mu}"
            )))
        }
    }

    /// `f(t) = 1/(1 + μt²)`.
    pub fn eval(&self, t: f64) -> f64 {
        1.0 / (1.0 + self.mu * t * t)
    }

    /// `∫₀^∞ f² dt − 1` in closed form, `(π/4)μ^{-1/2} − 1`.
    pub fn normalization_residual(&self) -> f64 {
        PI / (4.0 * self.mu.sqrt()) - 1.0
    }

    /// The same residual by quadrature.
    pub fn normalization_residual_quadrature(&self) -> Result<f64> {
        let mass =
            integrate_semi_infinite(|t| self.eval(t).powi(2), Strategy::SmoothDecay, QUAD_TOL)?;
        Ok(mass.value - 1.0)
    }

    /// `π ∫₀^∞ (1 − f)² t⁻² dt = π²√μ/4`.
    pub fn objective_value(&self) -> f64 {
        PI * PI * self.mu.sqrt() / 4.0
    }

    pub fn objective_value_quadrature(&self) -> Result<f64> {
        objective_of(|t| self.eval(t))
    }

    /// The constant `A` in `‖χ^E‖² < A·E`: `(1/4π)·√μ·∫₀^∞(1+t²)⁻² dt = √μ/16`.
    pub fn induced_a(&self) -> f64 {
        self.mu.sqrt() / 16.0
    }

    pub fn report(&self) -> ProfileReport {
        ProfileReport {
            mu: self.mu,
            normalization_residual: self.normalization_residual(),
            objective_value: self.objective_value(),
            induced_a: self.induced_a(),
        }
    }
}

/// `π ∫₀^∞ (1 − g(t))² t⁻² dt` for an arbitrary profile `g` with `g(0) = 1`.
pub fn objective_of(g: impl Fn(f64) -> f64) -> Result<f64> {
    let integral = integrate_semi_infinite(
        |t| {
            let d = (1.0 - g(t)) / t;
            d * d
        },
        Strategy::SmoothDecay,
        QUAD_TOL,
    )?;
    Ok(PI * integral.value)
}

/// `∫₀^∞ g(t)² dt` for an arbitrary profile.
pub fn mass_of(g: impl Fn(f64) -> f64) -> Result<f64> {
    Ok(integrate_semi_infinite(|t| g(t).powi(2), Strategy::SmoothDecay, QUAD_TOL)?.value)
}

/// The `μ` with zero normalization residual, found by bisection on the residual
/// (which is strictly decreasing in `μ`).
pub fn normalizing_mu() -> f64 {
    let (mut lo, mut hi) = (1e-3f64, 1e3f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if (BudgetProfile { mu: mid }).normalization_residual() > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Relative deviation of `∫₀^∞ (√ρ − √(A·E))₊² dE`, evaluated by quadrature,
/// from its closed form `ρ²/(6A)`. Returns 0 for `ρ = 0`.
pub fn integral_identity_check(rho: f64, a: f64) -> Result<f64> {
    if rho < 0.0 || !(a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need rho >= 0 and A > 0, got rho = {rho}, A = {a}"
        )));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    let quadrature = crate::specfun::gauss_kronrod_adaptive(
        |e| {
            let d = (rho.sqrt() - (a * e).sqrt()).max(0.0);
            d * d
        },
        0.0,
        rho / a,
        1e-15 * rho * rho / a,
    )?;
    let closed = rho * rho / (6.0 * a);
    Ok((quadrature.value - closed) / closed)
}

/// Value of the integral itself (by quadrature), for reporting.
pub fn positive_part_integral(rho: f64, a: f64) -> Result<f64> {
    let dev = integral_identity_check(rho, a)?;
    Ok(rho * rho / (6.0 * a) * (1.0 + dev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn profile_values() {
        let p = BudgetProfile::default();
        assert_eq!(p.eval(0.0), 1.0);
        assert!((p.eval(4.0 / PI) - 0.5).abs() < 1e-15);
        assert_eq!(BudgetProfile::new(1.0).unwrap().eval(1.0), 0.5);
        let mut prev = 1.0;
        for i in 1..100 {
            let v = p.eval(0.1 * i as f64);
            assert!(v < prev && v > 0.0);
            prev = v;
        }
        assert!(BudgetProfile::new(0.0).is_err());
    }

    #[test]
    fn normalization() {
        let p = BudgetProfile::default();
        assert!(p.normalization_residual().abs() <= 1e-12);
        assert!(p.normalization_residual_quadrature().unwrap().abs() <= 1e-12);
        let p = BudgetProfile::new(1.0).unwrap();
        assert!((p.normalization_residual() - (PI / 4.0 - 1.0)).abs() < 1e-15);
        assert!((p.normalization_residual() - -0.214_601_836_602_551_7).abs() < 1e-15);
        let p = BudgetProfile::new(PI * PI / 64.0).unwrap();
        assert!((p.normalization_residual() - 1.0).abs() < 1e-15);
        for mu in [0.3, 1.0, OPTIMAL_MU, 7.0] {
            let p = BudgetProfile::new(mu).unwrap();
            let q = p.normalization_residual_quadrature().unwrap();
            assert!((q - p.normalization_residual()).abs() < 1e-12, "mu = {mu}");
        }
    }

    #[test]
    fn objective() {
        let p = BudgetProfile::default();
        assert!((p.objective_value() - PI.powi(3) / 16.0).abs() < 1e-15);
        assert!((p.objective_value_quadrature().unwrap() - PI.powi(3) / 16.0).abs() < 1e-10);
        let p = BudgetProfile::new(1.0).unwrap();
        assert!((p.objective_value() - PI * PI / 4.0).abs() < 1e-15);
        assert!((p.objective_value_quadrature().unwrap() - 2.467_401_100_272_339_7).abs() < 1e-10);
        assert!((normalizing_mu() - OPTIMAL_MU).abs() < 1e-13);
    }

    #[test]
    fn induced_constant() {
        let p = BudgetProfile::default();
        assert!((p.induced_a() - PI / 64.0).abs() < 1e-17);
        assert!((6.0 * p.induced_a() - 3.0 * PI / 32.0).abs() < 1e-16);
        let doubled = BudgetProfile::new(2.0 * p.mu).unwrap();
        assert!((doubled.induced_a() / p.induced_a() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn positive_part_identity() {
        let dev = integral_identity_check(1.0, PI / 64.0).unwrap();
        assert!(dev.abs() < 1e-10);
        let v = positive_part_integral(1.0, PI / 64.0).unwrap();
        assert!((v - 64.0 / (6.0 * PI)).abs() < 1e-9);
        assert!((v - 3.395_305_452_627_100_7).abs() < 1e-9);
        assert!(integral_identity_check(2.0, 1.0).unwrap().abs() < 1e-10);
        assert!((positive_part_integral(2.0, 1.0).unwrap() - 4.0 / 6.0).abs() < 1e-10);
        assert_eq!(integral_identity_check(0.0, 3.0).unwrap(), 0.0);
    }

    /// Constrained first-order optimality: perturb `f` by log-Gaussian bumps,
    /// restore unit mass by dilating the argument, and confirm the objective
    /// does not drop below `π³/16`.
    #[test]
    fn perturbations_do_not_improve_objective() {
        let f = BudgetProfile::default();
        let base = f.objective_value();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let eps = 1e-3;
        for i in 0..50 {
            // log-spaced centres over [0.05, 20]
            let centre = 0.05 * (400f64).powf(i as f64 / 49.0);
            let width = rng.gen_range(0.2..1.0);
            let amp = if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * rng.gen_range(0.5..1.5);
            let bump = move |t: f64| {
                if t <= 0.0 {
                    0.0
                } else {
                    let z = (t / centre).ln() / width;
                    amp * (-0.5 * z * z).exp()
                }
            };
            let g = |t: f64| f.eval(t) + eps * bump(t);
            let kappa = mass_of(g).unwrap();
            let projected = |t: f64| g(kappa * t);
            assert!((mass_of(projected).unwrap() - 1.0).abs() < 1e-10);
            let obj = objective_of(projected).unwrap();
            assert!(obj >= base - 1e-4, "bump {i}: {obj} < {base}");
        }
    }
}
