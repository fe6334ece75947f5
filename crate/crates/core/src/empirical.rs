//! Measured Lieb–Thirring ratios `∫ρ² / Σ‖∇ψ_j‖²` for explicit orthonormal
//! families, and the scalar identities behind the improved constant.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::compensated_sum;
use crate::harmonics::{
    FamilyKind, Member, ModeProfile, OrthonormalFamily, Quadrature, ScalarHarmonic, TorusMode,
};
use crate::profile::BudgetProfile;
use crate::record::VerificationRecord;
use crate::specfun::{integrate_semi_infinite, Strategy};
use crate::sphere::h_s2_direct;
use crate::LT_CONSTANT;

/// Largest Gram residual accepted by [`lt_ratio`].
pub const GRAM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainTag {
    Sphere,
    Torus { aspect: [f64; 2] },
}

/// `ρ = Σ_j |ψ_j|²` at the quadrature points of a family.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub domain: DomainTag,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DensityField {
    pub fn of(family: &OrthonormalFamily) -> Result<Self> {
        let samples = family.sample()?;
        Ok(DensityField {
            domain: domain_of(family),
            values: samples.density(),
            weights: samples.weights,
        })
    }

    /// `∫ρ`, equal to the member count for orthonormal families.
    pub fn integral(&self) -> f64 {
        compensated_sum(self.values.iter().zip(&self.weights).map(|(r, w)| r * w))
    }

    pub fn square_integral(&self) -> f64 {
        compensated_sum(
            self.values
                .iter()
                .zip(&self.weights)
                .map(|(r, w)| r * r * w),
        )
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn domain_of(family: &OrthonormalFamily) -> DomainTag {
    match family.kind() {
        FamilyKind::Torus { aspect } => DomainTag::Torus { aspect },
        _ => DomainTag::Sphere,
    }
}

/// Constant the family is measured against.
///
/// Scalar and single-kind vector families on S² and the square torus use
/// `3π/32`; mixed vector families double it; a torus with side ratio `1/α`
/// multiplies it by `1/α`.
pub fn lt_bound(kind: FamilyKind) -> f64 {
    match kind {
        FamilyKind::SphereScalar | FamilyKind::SphereVector => LT_CONSTANT,
        FamilyKind::SphereMixed => 2.0 * LT_CONSTANT,
        FamilyKind::Torus { aspect } => {
            let (lo, hi) = (aspect[0].min(aspect[1]), aspect[0].max(aspect[1]));
            LT_CONSTANT * hi / lo
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtReport {
    pub family: String,
    pub count: usize,
    pub rho_integral: f64,
    pub rho_sq_integral: f64,
    pub dirichlet_sum: f64,
    pub ratio: f64,
    pub bound: f64,
    pub margin: f64,
    pub gram_residual: f64,
}

/// `∫ρ²` by exact quadrature over the exact Dirichlet sum.
pub fn lt_ratio(family: &OrthonormalFamily) -> Result<LtReport> {
    let samples = family.sample()?;
    let gram_residual = samples.gram_residual();
    if !(gram_residual <= GRAM_TOLERANCE) {
        return Err(Error::OrthonormalityViolation {
            residual: gram_residual,
        });
    }
    let density = DensityField {
        domain: domain_of(family),
        values: samples.density(),
        weights: samples.weights,
    };
    let rho_sq_integral = density.square_integral();
    let dirichlet_sum = family.dirichlet_sum();
    let ratio = rho_sq_integral / dirichlet_sum;
    let bound = lt_bound(family.kind());
    Ok(LtReport {
        family: family.descriptor().to_string(),
        count: family.count(),
        rho_integral: density.integral(),
        rho_sq_integral,
        dirichlet_sum,
        ratio,
        bound,
        margin: bound - ratio,
        gram_residual,
    })
}

impl LtReport {
    pub fn record(&self) -> VerificationRecord {
        VerificationRecord::below(
            &format!("lt_ratio {}", self.family),
            "∫ρ² <= k Σ‖∇ψ_j‖²",
            self.ratio,
            self.bound,
        )
        .note(format!(
            "∫ρ = {:.15} for {} members, ∫ρ² = {:.15e}, Dirichlet sum {}",
            self.rho_integral, self.count, self.rho_sq_integral, self.dirichlet_sum
        ))
    }
}

/// `(N² − 1)/(2πN²)`, the ratio of the full eigenspaces below degree `N`.
pub fn sphere_scalar_ratio(n: usize) -> f64 {
    let n2 = (n * n) as f64;
    (n2 - 1.0) / (2.0 * PI * n2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalPoint {
    pub n: usize,
    pub ratio: f64,
    pub closed_form: f64,
    /// `1/(2π) − ratio`.
    pub gap: f64,
    pub report: LtReport,
}

/// Measured ratios of `sphere-scalar(N)` for `N = 2..=n_max`.
pub fn semiclassical_sequence(n_max: usize) -> Result<Vec<SemiclassicalPoint>> {
    if n_max < 2 {
        return Err(Error::InvalidParameter(format!(
            "need N_max >= 2, got {n_max}"
        )));
    }
    (2..=n_max)
        .map(|n| {
            let family =
                crate::harmonics::build_family(&crate::harmonics::FamilySpec::SphereScalar { n })?;
            let report = lt_ratio(&family)?;
            Ok(SemiclassicalPoint {
                n,
                ratio: report.ratio,
                closed_form: sphere_scalar_ratio(n),
                gap: crate::SEMICLASSICAL_BOUND - report.ratio,
                report,
            })
        })
        .collect()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )))
    }
}

/// The normalized trial function `sin(αx₁)` on `[0, 2π/α) × [0, 2π)`.
pub fn elongated_family(alpha: f64) -> Result<OrthonormalFamily> {
    check_alpha(alpha)?;
    let mode = TorusMode::with_aspect([1, 0], [alpha, 1.0], ModeProfile::Sine)?;
    OrthonormalFamily::from_torus_modes(
        vec![mode],
        format!("elongated sin(alpha x1), alpha={alpha}"),
    )
}

/// Ratio of the elongated trial function; the bound is `(1/α)(3π/32)`.
pub fn elongated_ratio(alpha: f64) -> Result<LtReport> {
    lt_ratio(&elongated_family(alpha)?)
}

/// `3/(8π²α)`.
pub fn elongated_closed_form(alpha: f64) -> f64 {
    3.0 / (8.0 * PI * PI * alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormComponents {
    /// `‖ψ‖⁴_{L⁴}`
    pub l4: f64,
    /// `‖ψ‖²`
    pub l2: f64,
    /// `‖∇ψ‖²`
    pub h1: f64,
}

/// Norms of the unnormalized `sin(αx₁)` by trapezoid quadrature.
pub fn elongated_components(alpha: f64) -> Result<NormComponents> {
    check_alpha(alpha)?;
    let family = elongated_family(alpha)?;
    let Quadrature::Torus(grid) = family.quadrature() else {
        unreachable!("elongated family lives on a torus")
    };
    let (mut l4, mut l2, mut h1) = (Vec::new(), Vec::new(), Vec::new());
    for (x1, _, w) in grid.points() {
        let s = (alpha * x1).sin();
        let c = alpha * (alpha * x1).cos();
        l4.push(w * s.powi(4));
        l2.push(w * s * s);
        h1.push(w * c * c);
    }
    Ok(NormComponents {
        l4: compensated_sum(l4.into_iter()),
        l2: compensated_sum(l2.into_iter()),
        h1: compensated_sum(h1.into_iter()),
    })
}

/// Repeats each member `k` times in `x₂` and multiplies by `√α`, mapping
/// `[0, 2π/α) × [0, 2π)` onto the square of side `2π/α`.
pub fn periodic_lift(family: &OrthonormalFamily, k: u32) -> Result<OrthonormalFamily> {
    let FamilyKind::Torus { aspect } = family.kind() else {
        return Err(Error::InvalidFamily(
            "periodic lift needs a torus family".into(),
        ));
    };
    if aspect[1] != 1.0 || k == 0 || (aspect[0] * k as f64 - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "lift by k = {k} needs the torus [0, 2π/α) × [0, 2π) with α = 1/k, got aspect {aspect:?}"
        )));
    }
    let alpha = aspect[0];
    let modes = family
        .basis()
        .iter()
        .map(|m| match m {
            Member::Torus(t) => {
                TorusMode::with_aspect([t.k[0], t.k[1] * k as i64], [alpha, alpha], t.profile)
            }
            _ => Err(Error::InvalidFamily("non-torus member".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    let lifted = OrthonormalFamily::from_torus_modes(
        modes,
        format!("lift of {} by {k}", family.descriptor()),
    )?;
    match family.mixing() {
        Some(c) => lifted.mixed(c.to_vec()),
        None => Ok(lifted),
    }
}

/// Lift by `k = 1/α`: orthonormality on the square, `∫ρ̃² = α∫ρ²` and equal
/// Dirichlet sums, all by quadrature on both domains.
pub fn periodic_lift_check(family: &OrthonormalFamily, k: u32) -> Result<VerificationRecord> {
    let lifted = periodic_lift(family, k)?;
    let FamilyKind::Torus { aspect } = family.kind() else {
        unreachable!()
    };
    let alpha = aspect[0];
    let tol = 1e-10;
    let original = lt_ratio(family)?;
    let lifted_report = lt_ratio(&lifted)?;
    let rho_gap = (lifted_report.rho_sq_integral - alpha * original.rho_sq_integral).abs();
    let energy_gap = (lifted_report.dirichlet_sum - original.dirichlet_sum).abs();
    Ok(VerificationRecord::below(
        &format!("periodic_lift k={k}"),
        "lifted family orthonormal, ∫ρ̃² = α∫ρ², Dirichlet sums equal",
        rho_gap,
        tol * original.rho_sq_integral.max(1.0),
    )
    .require("lifted Gram residual", tol - lifted_report.gram_residual)
    .require(
        "Dirichlet sums",
        tol * original.dirichlet_sum.max(1.0) - energy_gap,
    )
    .note(format!(
        "ratio {:.15e} on T²_α, {:.15e} after the lift; quotient {:.15}",
        original.ratio,
        lifted_report.ratio,
        original.ratio / lifted_report.ratio
    )))
}

/// `(1/4π) Σ_{n>=1} (2n+1)(1 − f(E/(n(n+1))))²`.
pub fn chi_series(e: f64) -> Result<f64> {
    if !(e > 0.0 && e.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "E must be positive, got {e}"
        )));
    }
    let f = BudgetProfile::default();
    let mu = f.mu;
    // Σ_{n>N} (2n+1)(1−f)² <= μ²E⁴ Σ_{n>N} (2n+1)/(n(n+1))⁴ <= μ²E⁴ / (3 (N(N+1))³)
    let target = 1e-17;
    let mut n_max = 8usize;
    while mu * mu * e.powi(4) / (3.0 * ((n_max * (n_max + 1)) as f64).powi(3)) > target {
        n_max *= 2;
    }
    let terms = (1..=n_max).rev().map(|n| {
        let lambda = (n * (n + 1)) as f64;
        let t = e / lambda;
        // 1 − f(t) without cancellation
        let one_minus_f = mu * t * t / (1.0 + mu * t * t);
        (2 * n + 1) as f64 * one_minus_f * one_minus_f
    });
    Ok(compensated_sum(terms) / (4.0 * PI))
}

/// For each `E`: the χ-series equals `(a/16)H_S2(a)` at `a = πE/4` and stays
/// strictly below `AE` with `A = π/64`.
pub fn chi_bound_check(e_grid: &[f64]) -> Result<VerificationRecord> {
    if e_grid.is_empty() {
        return Err(Error::InvalidParameter("empty E grid".into()));
    }
    let a_coeff = BudgetProfile::default().induced_a();
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut worst_link = 0.0f64;
    let mut notes = Vec::new();
    for &e in e_grid {
        let series = chi_series(e)?;
        let a = PI * e / 4.0;
        let h = h_s2_direct(a, 1e-15)?;
        let link = a / 16.0 * h.value;
        worst_link = worst_link.max((series - link).abs() / series.max(1e-300));
        let ratio = series / (a_coeff * e);
        worst_ratio = worst_ratio.max(ratio);
        notes.push(format!(
            "E = {e}: series {series:.15e}, AE = {:.15e}",
            a_coeff * e
        ));
    }
    let mut record =
        VerificationRecord::below("chi_bound", "‖χ^E(·,s)‖² < (π/64)E", worst_ratio, 1.0)
            .require(
                "series equals (a/16)H_S2(a) at a = πE/4",
                1e-10 - worst_link,
            )
            .note(format!(
                "largest relative gap to (a/16)H_S2(a): {worst_link:.3e}"
            ));
    for n in notes {
        record = record.note(n);
    }
    Ok(record)
}

/// Spectral filtering `ψ^E = f(E/λ)ψ` of a scalar sphere family: pointwise
/// `Σ|ψ^E_j|² >= (√ρ − √(AE))²₊` on the grid for every `E`, and
/// `‖∇ψ_j‖² = ∫₀^∞ ‖ψ^E_j‖² dE` for every member.
pub fn pipeline_consistency(
    family: &OrthonormalFamily,
    e_grid: &[f64],
) -> Result<VerificationRecord> {
    if family.kind() != FamilyKind::SphereScalar {
        return Err(Error::InvalidFamily(format!(
            "{}: pipeline check needs a scalar sphere family",
            family.descriptor()
        )));
    }
    if e_grid.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter("E values must be positive".into()));
    }
    let profile = BudgetProfile::default();
    let a_coeff = profile.induced_a();
    let basis = family.unmixed().sample()?;
    let n = family.count();
    let identity: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mixing = family.mixing().map(<[_]>::to_vec).unwrap_or(identity);
    let eigen: Vec<f64> = family.basis().iter().map(Member::eigenvalue).collect();

    // member values with every basis coefficient damped by `damp`
    let filtered = |damp: &[f64]| -> Vec<f64> {
        let mut out = Vec::with_capacity(basis.n_points * n);
        for p in 0..basis.n_points {
            for row in &mixing {
                out.push(
                    row.iter()
                        .enumerate()
                        .map(|(c, x)| x * damp[c] * basis.at(p, c)[0])
                        .sum(),
                );
            }
        }
        out
    };
    let ones = vec![1.0; n];
    let full = filtered(&ones);
    let rho: Vec<f64> = full
        .chunks(n)
        .map(|r| r.iter().map(|v| v * v).sum())
        .collect();

    let mut worst_pointwise = f64::INFINITY;
    for &e in e_grid {
        let damp: Vec<f64> = eigen.iter().map(|l| profile.eval(e / l)).collect();
        let values = filtered(&damp);
        for (p, row) in values.chunks(n).enumerate() {
            let rho_e: f64 = row.iter().map(|v| v * v).sum();
            let floor = (rho[p].sqrt() - (a_coeff * e).sqrt()).max(0.0).powi(2);
            worst_pointwise = worst_pointwise.min(rho_e - floor);
        }
    }

    let energies = family.member_energies();
    let mut worst_energy = 0.0f64;
    for (i, &energy) in energies.iter().enumerate() {
        let norm_sq = |e: f64| {
            let damp: Vec<f64> = eigen.iter().map(|l| profile.eval(e / l)).collect();
            (0..basis.n_points)
                .map(|p| {
                    let v: f64 = mixing[i]
                        .iter()
                        .enumerate()
                        .map(|(c, x)| x * damp[c] * basis.at(p, c)[0])
                        .sum();
                    basis.weights[p] * v * v
                })
                .sum::<f64>()
        };
        let integral = integrate_semi_infinite(norm_sq, Strategy::SmoothDecay, 1e-12)?;
        worst_energy = worst_energy.max((integral.value - energy).abs() / energy);
    }
    Ok(VerificationRecord::above(
        &format!("pipeline {}", family.descriptor()),
        "Σ|ψ^E_j|² >= (√ρ − √(AE))²₊ pointwise; ‖∇ψ‖² = ∫‖ψ^E‖² dE",
        worst_pointwise,
        -1e-12,
    )
    .require("energy identity per member (relative 1e-8)", 1e-8 - worst_energy)
    .note(format!(
        "{} grid points, E ∈ {e_grid:?}; smallest slack {worst_pointwise:.3e}, largest energy gap {worst_energy:.3e}",
        basis.n_points
    )))
}

/// Single-harmonic family, for instance `{Y_1^1}`.
pub fn single_harmonic(n: usize, k: usize) -> Result<OrthonormalFamily> {
    let h = ScalarHarmonic::new(n, k)?;
    OrthonormalFamily::from_sphere_harmonics(vec![h], format!("Y_{n}^{k}"))
}
