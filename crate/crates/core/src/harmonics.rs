//! Real spherical harmonics, their gradients, torus Fourier modes and the
//! quadratures that integrate products of them exactly.
//!
//! Convention: `Y_n^k` with `k = 1..=2n+1` has order `m = k − n − 1`; `m = 0`
//! is the zonal function, `m > 0` carries `√2 cos(mφ)` and `m < 0` carries
//! `√2 sin(|m|φ)`. No Condon–Shortley phase. Any orthonormal real basis gives
//! the same densities, so the choice is immaterial to the checks built on it.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::gauss_legendre;

/// Distance from the poles inside which gradients are refused.
pub const POLE_GUARD: f64 = 1e-8;

/// Degrees above this are outside the tested range of the recurrences.
pub const MAX_DEGREE: usize = 128;

/// Product rule on S²: Gauss–Legendre in `cos θ` times the uniform rule in `φ`.
///
/// With `L` latitude nodes and `2L` longitudes the rule is exact for spherical
/// polynomials of degree `<= 2L − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    pub theta_nodes: Vec<f64>,
    pub theta_weights: Vec<f64>,
    pub phi_nodes: Vec<f64>,
}

impl SphereGrid {
    pub fn new(l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidParameter("sphere grid needs L >= 1".into()));
        }
        let rule = gauss_legendre(l);
        let theta_nodes = rule.nodes.iter().map(|x| x.acos()).collect();
        let n_phi = 2 * l;
        let phi_nodes = (0..n_phi)
            .map(|j| 2.0 * PI * j as f64 / n_phi as f64)
            .collect();
        Ok(SphereGrid {
            theta_nodes,
            theta_weights: rule.weights,
            phi_nodes,
        })
    }

    /// Smallest grid exact for degree `degree`.
    pub fn exact_for(degree: usize) -> Result<Self> {
        Self::new(degree / 2 + 1)
    }

    pub fn l(&self) -> usize {
        self.theta_nodes.len()
    }

    pub fn len(&self) -> usize {
        self.theta_nodes.len() * self.phi_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(θ, φ, weight)` in θ-major order; the weights sum to `4π`.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let dphi = 2.0 * PI / self.phi_nodes.len() as f64;
        self.theta_nodes
            .iter()
            .zip(&self.theta_weights)
            .flat_map(move |(&t, &w)| self.phi_nodes.iter().map(move |&p| (t, p, w * dphi)))
    }

    pub fn weights(&self) -> Vec<f64> {
        self.points().map(|p| p.2).collect()
    }

    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points().map(|(t, p, w)| w * f(t, p)).sum()
    }
}

/// Trapezoid rule on `[0, 2π/α₁) × [0, 2π/α₂)`, exact for trigonometric
/// polynomials of degree below the point count on each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusGrid {
    pub aspect: [f64; 2],
    pub counts: [usize; 2],
}

impl TorusGrid {
    pub fn new(aspect: [f64; 2], counts: [usize; 2]) -> Result<Self> {
        if !aspect.iter().all(|a| *a > 0.0 && a.is_finite()) || counts.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "torus grid needs positive aspect and counts, got {aspect:?}, {counts:?}"
            )));
        }
        Ok(TorusGrid { aspect, counts })
    }

    pub fn area(&self) -> f64 {
        4.0 * PI * PI / (self.aspect[0] * self.aspect[1])
    }

    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(x₁, x₂, weight)` with `x₁` outermost.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let [n1, n2] = self.counts;
        let h1 = 2.0 * PI / self.aspect[0] / n1 as f64;
        let h2 = 2.0 * PI / self.aspect[1] / n2 as f64;
        (0..n1).flat_map(move |i| (0..n2).map(move |j| (i as f64 * h1, j as f64 * h2, h1 * h2)))
    }

    pub fn weights(&self) -> Vec<f64> {
        self.points().map(|p| p.2).collect()
    }
}

/// `Y_n^k`, `k ∈ 1..=2n+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScalarHarmonic {
    pub n: usize,
    pub k: usize,
}

impl ScalarHarmonic {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n > MAX_DEGREE || k == 0 || k > 2 * n + 1 {
            return Err(Error::InvalidParameter(format!(
                "no harmonic with degree {n} and index {k}"
            )));
        }
        Ok(ScalarHarmonic { n, k })
    }

    pub fn order(&self) -> i64 {
        self.k as i64 - self.n as i64 - 1
    }

    /// Eigenvalue of `−Δ`.
    pub fn eigenvalue(&self) -> f64 {
        (self.n * (self.n + 1)) as f64
    }

    /// All `2n + 1` harmonics of degree `n`.
    pub fn degree(n: usize) -> impl Iterator<Item = ScalarHarmonic> {
        (1..=2 * n + 1).map(move |k| ScalarHarmonic { n, k })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorKind {
    /// `∇⊥Y/√(n(n+1))`, divergence free.
    W,
    /// `∇Y/√(n(n+1))`, curl free.
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VectorEigenfield {
    pub kind: VectorKind,
    pub harmonic: ScalarHarmonic,
}

impl VectorEigenfield {
    pub fn new(kind: VectorKind, n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "vector eigenfields start at n = 1".into(),
            ));
        }
        Ok(VectorEigenfield {
            kind,
            harmonic: ScalarHarmonic::new(n, k)?,
        })
    }

    pub fn eigenvalue(&self) -> f64 {
        self.harmonic.eigenvalue()
    }
}

/// Normalized associated Legendre values `p̄_n^m(cos θ)` for `0 <= m <= n <= n_max`,
/// scaled so that `∫_{S²} (p̄_n^0)² dS = 1`.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    n_max: usize,
    theta: f64,
    p: Vec<f64>,
    dp: Vec<f64>,
}

fn tri(n: usize, m: usize) -> usize {
    n * (n + 1) / 2 + m
}

impl LegendreTable {
    /// Values only; valid at any `θ`.
    pub fn new(n_max: usize, theta: f64) -> Self {
        let (sin_t, cos_t) = theta.sin_cos();
        let mut p = vec![0.0; tri(n_max, n_max) + 1];
        p[0] = 1.0 / (4.0 * PI).sqrt();
        for m in 1..=n_max {
            let mf = m as f64;
            p[tri(m, m)] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_t * p[tri(m - 1, m - 1)];
        }
        for m in 0..n_max {
            let mf = m as f64;
            p[tri(m + 1, m)] = (2.0 * mf + 3.0).sqrt() * cos_t * p[tri(m, m)];
            for n in m + 2..=n_max {
                let nf = n as f64;
                let a = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
                let b = (((nf - 1.0).powi(2) - mf * mf) / (4.0 * (nf - 1.0).powi(2) - 1.0)).sqrt();
                p[tri(n, m)] = a * (cos_t * p[tri(n - 1, m)] - b * p[tri(n - 2, m)]);
            }
        }
        LegendreTable {
            n_max,
            theta,
            p,
            dp: Vec::new(),
        }
    }

    /// Values and `θ`-derivatives; fails within `guard` of a pole.
    pub fn with_derivatives(n_max: usize, theta: f64, guard: f64) -> Result<Self> {
        if theta < guard || theta > PI - guard {
            return Err(Error::PoleEvaluation { theta });
        }
        let mut table = Self::new(n_max, theta);
        let (sin_t, cos_t) = theta.sin_cos();
        let mut dp = vec![0.0; table.p.len()];
        for n in 1..=n_max {
            let nf = n as f64;
            for m in 0..=n {
                let mf = m as f64;
                let lower = if m < n { table.p[tri(n - 1, m)] } else { 0.0 };
                let c = ((2.0 * nf + 1.0) * (nf * nf - mf * mf) / (2.0 * nf - 1.0)).sqrt();
                dp[tri(n, m)] = (nf * cos_t * table.p[tri(n, m)] - c * lower) / sin_t;
            }
        }
        table.dp = dp;
        Ok(table)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn p(&self, n: usize, m: usize) -> f64 {
        self.p[tri(n, m)]
    }

    /// `∂_θ p̄_n^m`; zero if the table was built without derivatives.
    pub fn dp(&self, n: usize, m: usize) -> f64 {
        self.dp.get(tri(n, m)).copied().unwrap_or(0.0)
    }

    /// `Y` from the table at longitude `φ`.
    pub fn ylm(&self, h: ScalarHarmonic, phi: f64) -> f64 {
        let m = h.order();
        let mu = m.unsigned_abs() as usize;
        let p = self.p(h.n, mu);
        match m.signum() {
            0 => p,
            1 => SQRT_2 * p * (mu as f64 * phi).cos(),
            _ => SQRT_2 * p * (mu as f64 * phi).sin(),
        }
    }

    /// `(∂_θY, ∂_φY / sin θ)` from a table built with derivatives.
    pub fn grad_ylm(&self, h: ScalarHarmonic, phi: f64) -> [f64; 2] {
        let m = h.order();
        let mu = m.unsigned_abs() as usize;
        let p = self.p(h.n, mu);
        let dp = self.dp(h.n, mu);
        let sin_t = self.theta.sin();
        let (s, c) = (mu as f64 * phi).sin_cos();
        let mf = mu as f64;
        match m.signum() {
            0 => [dp, 0.0],
            1 => [SQRT_2 * dp * c, -SQRT_2 * mf * p * s / sin_t],
            _ => [SQRT_2 * dp * s, SQRT_2 * mf * p * c / sin_t],
        }
    }

    /// Vector eigenfield in the `(e_θ, e_φ)` frame.
    pub fn field(&self, f: VectorEigenfield, phi: f64) -> [f64; 2] {
        let g = self.grad_ylm(f.harmonic, phi);
        let scale = 1.0 / f.eigenvalue().sqrt();
        match f.kind {
            VectorKind::V => [g[0] * scale, g[1] * scale],
            VectorKind::W => [g[1] * scale, -g[0] * scale],
        }
    }
}

/// Real orthonormal `Y_n^k(θ, φ)`.
pub fn eval_ylm(h: ScalarHarmonic, theta: f64, phi: f64) -> f64 {
    LegendreTable::new(h.n, theta).ylm(h, phi)
}

/// `(∂_θY, ∂_φY / sin θ)`, refusing points within [`POLE_GUARD`] of a pole.
pub fn eval_grad_ylm(h: ScalarHarmonic, theta: f64, phi: f64) -> Result<[f64; 2]> {
    eval_grad_ylm_guarded(h, theta, phi, POLE_GUARD)
}

pub fn eval_grad_ylm_guarded(
    h: ScalarHarmonic,
    theta: f64,
    phi: f64,
    guard: f64,
) -> Result<[f64; 2]> {
    Ok(LegendreTable::with_derivatives(h.n, theta, guard)?.grad_ylm(h, phi))
}

pub fn eval_field(f: VectorEigenfield, theta: f64, phi: f64) -> Result<[f64; 2]> {
    Ok(LegendreTable::with_derivatives(f.harmonic.n, theta, POLE_GUARD)?.field(f, phi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeProfile {
    /// `e^{iξ·x}`
    Exponential,
    /// `√2 sin(ξ·x)`
    Sine,
}

/// Normalized Fourier mode on `[0, 2π/α₁) × [0, 2π/α₂)` with frequency
/// `ξ = (α₁k₁, α₂k₂)`. On the square torus this is `e^{ik·x}/(2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusMode {
    pub k: [i64; 2],
    pub aspect: [f64; 2],
    pub profile: ModeProfile,
}

impl TorusMode {
    /// Exponential mode on the torus `[0, 2π/α) × [0, 2π)`.
    pub fn new(k: [i64; 2], alpha: f64) -> Result<Self> {
        Self::with_aspect(k, [alpha, 1.0], ModeProfile::Exponential)
    }

    pub fn with_aspect(k: [i64; 2], aspect: [f64; 2], profile: ModeProfile) -> Result<Self> {
        if k == [0, 0] {
            return Err(Error::InvalidParameter("torus modes need k ≠ 0".into()));
        }
        if !aspect.iter().all(|a| *a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "aspect must be positive, got {aspect:?}"
            )));
        }
        Ok(TorusMode { k, aspect, profile })
    }

    pub fn frequency(&self) -> [f64; 2] {
        [
            self.aspect[0] * self.k[0] as f64,
            self.aspect[1] * self.k[1] as f64,
        ]
    }

    pub fn eigenvalue(&self) -> f64 {
        let [a, b] = self.frequency();
        a * a + b * b
    }

    pub fn eval(&self, x1: f64, x2: f64) -> Complex64 {
        let [a, b] = self.frequency();
        let norm = (self.aspect[0] * self.aspect[1]).sqrt() / (2.0 * PI);
        let phase = a * x1 + b * x2;
        match self.profile {
            ModeProfile::Exponential => Complex64::from_polar(norm, phase),
            ModeProfile::Sine => Complex64::new(SQRT_2 * norm * phase.sin(), 0.0),
        }
    }
}

/// What to build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum FamilySpec {
    /// `Y_n^k` for `n = 1..N−1`.
    SphereScalar {
        n: usize,
    },
    SphereW {
        n: usize,
    },
    SphereV {
        n: usize,
    },
    /// `w` and `v` fields together.
    SphereMixed {
        n: usize,
    },
    Torus {
        modes: Vec<[i64; 2]>,
        alpha: f64,
    },
}

impl FamilySpec {
    /// `{(±1, 0), (0, ±1)}` on the square torus.
    pub fn unit_torus() -> Self {
        FamilySpec::Torus {
            modes: vec![[1, 0], [-1, 0], [0, 1], [0, -1]],
            alpha: 1.0,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::SphereScalar { n } => write!(f, "sphere-scalar({n})"),
            FamilySpec::SphereW { n } => write!(f, "sphere-w({n})"),
            FamilySpec::SphereV { n } => write!(f, "sphere-v({n})"),
            FamilySpec::SphereMixed { n } => write!(f, "sphere-mixed({n})"),
            FamilySpec::Torus { modes, alpha } => {
                write!(f, "torus({} modes, alpha={alpha})", modes.len())
            }
        }
    }
}

/// Shape of the members and therefore of the applicable constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    SphereScalar,
    /// Only one of `w` or `v`.
    SphereVector,
    SphereMixed,
    Torus {
        aspect: [f64; 2],
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Member {
    Scalar(ScalarHarmonic),
    Vector(VectorEigenfield),
    Torus(TorusMode),
}

impl Member {
    pub fn eigenvalue(&self) -> f64 {
        match self {
            Member::Scalar(h) => h.eigenvalue(),
            Member::Vector(v) => v.eigenvalue(),
            Member::Torus(t) => t.eigenvalue(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Quadrature {
    Sphere(SphereGrid),
    Torus(TorusGrid),
}

impl Quadrature {
    pub fn weights(&self) -> Vec<f64> {
        match self {
            Quadrature::Sphere(g) => g.weights(),
            Quadrature::Torus(g) => g.weights(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Quadrature::Sphere(g) => g.len(),
            Quadrature::Torus(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Member values at the quadrature points, point-major.
///
/// Each member occupies `width` reals per point: one for real scalars, two for
/// complex scalars (`re, im`) or tangent vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub n_points: usize,
    pub n_members: usize,
    pub width: usize,
    pub complex: bool,
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
}

impl Samples {
    pub fn at(&self, point: usize, member: usize) -> &[f64] {
        let start = (point * self.n_members + member) * self.width;
        &self.values[start..start + self.width]
    }

    /// `Σ_j |ψ_j|²` at every point.
    pub fn density(&self) -> Vec<f64> {
        let stride = self.n_members * self.width;
        self.values
            .chunks(stride.max(1))
            .map(|row| row.iter().map(|v| v * v).sum())
            .collect()
    }

    /// `max_{ij} |⟨ψ_i, ψ_j⟩ − δ_ij|`.
    pub fn gram_residual(&self) -> f64 {
        let n = self.n_members;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut worst = 0.0f64;
                for j in i..n {
                    let (mut re, mut im) = (0.0, 0.0);
                    for p in 0..self.n_points {
                        let w = self.weights[p];
                        let a = self.at(p, i);
                        let b = self.at(p, j);
                        if self.complex {
                            re += w * (a[0] * b[0] + a[1] * b[1]);
                            im += w * (a[1] * b[0] - a[0] * b[1]);
                        } else {
                            re += w * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
                        }
                    }
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((re - target).hypot(im));
                }
                worst
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Basis eigenfunctions with exact eigenvalues, optionally rotated by a real
/// orthogonal matrix: member `i` is `Σ_j C_ij φ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalFamily {
    descriptor: String,
    kind: FamilyKind,
    basis: Vec<Member>,
    mixing: Option<Vec<Vec<f64>>>,
    quadrature: Quadrature,
}

/// Builds the family with its natural exact quadrature.
pub fn build_family(spec: &FamilySpec) -> Result<OrthonormalFamily> {
    let sphere_cutoff = |n: usize| {
        if !(2..=MAX_DEGREE).contains(&n) {
            Err(Error::InvalidFamily(format!(
                "{spec}: need 2 <= N <= {MAX_DEGREE}"
            )))
        } else {
            Ok(n)
        }
    };
    let scalars = |n: usize| (1..n).flat_map(ScalarHarmonic::degree);
    let (kind, basis) = match spec {
        FamilySpec::SphereScalar { n } => {
            let n = sphere_cutoff(*n)?;
            (
                FamilyKind::SphereScalar,
                scalars(n).map(Member::Scalar).collect::<Vec<_>>(),
            )
        }
        FamilySpec::SphereW { n } | FamilySpec::SphereV { n } => {
            let n = sphere_cutoff(*n)?;
            let kind = if matches!(spec, FamilySpec::SphereW { .. }) {
                VectorKind::W
            } else {
                VectorKind::V
            };
            let members = scalars(n)
                .map(|harmonic| Member::Vector(VectorEigenfield { kind, harmonic }))
                .collect();
            (FamilyKind::SphereVector, members)
        }
        FamilySpec::SphereMixed { n } => {
            let n = sphere_cutoff(*n)?;
            let members = [VectorKind::W, VectorKind::V]
                .into_iter()
                .flat_map(|kind| {
                    scalars(n)
                        .map(move |harmonic| Member::Vector(VectorEigenfield { kind, harmonic }))
                })
                .collect();
            (FamilyKind::SphereMixed, members)
        }
        FamilySpec::Torus { modes, alpha } => {
            let modes = modes
                .iter()
                .map(|&k| TorusMode::new(k, *alpha))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::InvalidFamily(format!("{spec}: {e}")))?;
            return OrthonormalFamily::from_torus_modes(modes, spec.to_string());
        }
    };
    let degree = match spec {
        FamilySpec::SphereScalar { n }
        | FamilySpec::SphereW { n }
        | FamilySpec::SphereV { n }
        | FamilySpec::SphereMixed { n } => *n - 1,
        FamilySpec::Torus { .. } => unreachable!(),
    };
    // ρ² has degree 4(N − 1)
    let grid = SphereGrid::exact_for(4 * degree)?;
    Ok(OrthonormalFamily {
        descriptor: spec.to_string(),
        kind,
        basis,
        mixing: None,
        quadrature: Quadrature::Sphere(grid),
    })
}

impl OrthonormalFamily {
    /// Family of distinct torus modes sharing one aspect.
    pub fn from_torus_modes(modes: Vec<TorusMode>, descriptor: String) -> Result<Self> {
        let first = *modes
            .first()
            .ok_or_else(|| Error::InvalidFamily(format!("{descriptor}: empty mode set")))?;
        for (i, m) in modes.iter().enumerate() {
            if m.aspect != first.aspect {
                return Err(Error::InvalidFamily(format!("{descriptor}: mixed aspects")));
            }
            if modes[..i].iter().any(|o| o.k == m.k) {
                return Err(Error::InvalidFamily(format!(
                    "{descriptor}: repeated mode {:?}",
                    m.k
                )));
            }
        }
        let count = |axis: usize| {
            let k_max = modes
                .iter()
                .map(|m| m.k[axis].unsigned_abs() as usize)
                .max()
                .unwrap_or(0);
            (4 * k_max + 2).max(8)
        };
        let grid = TorusGrid::new(first.aspect, [count(0), count(1)])?;
        Ok(OrthonormalFamily {
            descriptor,
            kind: FamilyKind::Torus {
                aspect: first.aspect,
            },
            basis: modes.into_iter().map(Member::Torus).collect(),
            mixing: None,
            quadrature: Quadrature::Torus(grid),
        })
    }

    /// Scalar family made of the given distinct harmonics of degree `>= 1`.
    pub fn from_sphere_harmonics(
        harmonics: Vec<ScalarHarmonic>,
        descriptor: String,
    ) -> Result<Self> {
        if harmonics.is_empty() || harmonics.iter().any(|h| h.n == 0) {
            return Err(Error::InvalidFamily(format!(
                "{descriptor}: need degrees >= 1"
            )));
        }
        for (i, h) in harmonics.iter().enumerate() {
            if harmonics[..i].contains(h) {
                return Err(Error::InvalidFamily(format!(
                    "{descriptor}: repeated harmonic"
                )));
            }
        }
        let degree = harmonics.iter().map(|h| h.n).max().unwrap_or(1);
        Ok(OrthonormalFamily {
            descriptor,
            kind: FamilyKind::SphereScalar,
            basis: harmonics.into_iter().map(Member::Scalar).collect(),
            mixing: None,
            quadrature: Quadrature::Sphere(SphereGrid::exact_for(4 * degree)?),
        })
    }

    /// The same family before any mixing.
    pub fn unmixed(&self) -> Self {
        OrthonormalFamily {
            mixing: None,
            ..self.clone()
        }
    }

    /// Applies a real orthogonal matrix to the members.
    pub fn mixed(&self, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = self.count();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidFamily(format!(
                "mixing matrix must be {n}×{n} for {}",
                self.descriptor
            )));
        }
        let combined = match &self.mixing {
            None => matrix,
            Some(old) => (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|l| matrix[i][l] * old[l][j]).sum())
                        .collect()
                })
                .collect(),
        };
        Ok(OrthonormalFamily {
            descriptor: format!("{} (mixed)", self.descriptor),
            mixing: Some(combined),
            ..self.clone()
        })
    }

    /// Replaces the sphere quadrature by `L` latitude nodes.
    pub fn with_sphere_quadrature(&self, l: usize) -> Result<Self> {
        match self.quadrature {
            Quadrature::Sphere(_) => Ok(OrthonormalFamily {
                quadrature: Quadrature::Sphere(SphereGrid::new(l)?),
                ..self.clone()
            }),
            Quadrature::Torus(_) => Err(Error::InvalidFamily("not a sphere family".into())),
        }
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn basis(&self) -> &[Member] {
        &self.basis
    }

    pub fn mixing(&self) -> Option<&[Vec<f64>]> {
        self.mixing.as_deref()
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quadrature
    }

    pub fn count(&self) -> usize {
        self.basis.len()
    }

    /// `Σ_i ‖∇ψ_i‖² = Σ_i Σ_j C_ij² λ_j`, exact up to rounding.
    pub fn dirichlet_sum(&self) -> f64 {
        match &self.mixing {
            None => self.basis.iter().map(Member::eigenvalue).sum(),
            Some(c) => c
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&self.basis)
                        .map(|(x, m)| x * x * m.eigenvalue())
                        .sum::<f64>()
                })
                .sum(),
        }
    }

    /// Per-member Dirichlet energies.
    pub fn member_energies(&self) -> Vec<f64> {
        match &self.mixing {
            None => self.basis.iter().map(Member::eigenvalue).collect(),
            Some(c) => c
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&self.basis)
                        .map(|(x, m)| x * x * m.eigenvalue())
                        .sum()
                })
                .collect(),
        }
    }

    fn width(&self) -> (usize, bool) {
        match self.basis[0] {
            Member::Scalar(_) => (1, false),
            Member::Vector(_) => (2, false),
            Member::Torus(_) => (2, true),
        }
    }

    /// Samples the basis on the quadrature, then mixes.
    pub fn sample(&self) -> Result<Samples> {
        let (width, complex) = self.width();
        let n_members = self.count();
        let basis = self.sample_basis(width)?;
        let values = match &self.mixing {
            None => basis,
            Some(c) => basis
                .par_chunks(n_members * width)
                .flat_map_iter(|row| {
                    c.iter().flat_map(move |coeffs| {
                        (0..width).map(move |d| {
                            coeffs
                                .iter()
                                .enumerate()
                                .map(|(j, x)| x * row[j * width + d])
                                .sum::<f64>()
                        })
                    })
                })
                .collect(),
        };
        Ok(Samples {
            n_points: self.quadrature.len(),
            n_members,
            width,
            complex,
            weights: self.quadrature.weights(),
            values,
        })
    }

    fn sample_basis(&self, width: usize) -> Result<Vec<f64>> {
        match &self.quadrature {
            Quadrature::Sphere(grid) => {
                let n_max = self
                    .basis
                    .iter()
                    .map(|m| match m {
                        Member::Scalar(h) => h.n,
                        Member::Vector(v) => v.harmonic.n,
                        Member::Torus(_) => 0,
                    })
                    .max()
                    .unwrap_or(0);
                let vector = width == 2;
                let rows = grid
                    .theta_nodes
                    .par_iter()
                    .map(|&theta| {
                        let table = if vector {
                            LegendreTable::with_derivatives(n_max, theta, POLE_GUARD)?
                        } else {
                            LegendreTable::new(n_max, theta)
                        };
                        let mut row =
                            Vec::with_capacity(grid.phi_nodes.len() * self.count() * width);
                        for &phi in &grid.phi_nodes {
                            for m in &self.basis {
                                match *m {
                                    Member::Scalar(h) => row.push(table.ylm(h, phi)),
                                    Member::Vector(v) => row.extend(table.field(v, phi)),
                                    Member::Torus(_) => {
                                        return Err(Error::InvalidFamily(
                                            "torus mode on the sphere".into(),
                                        ))
                                    }
                                }
                            }
                        }
                        Ok(row)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(rows.concat())
            }
            Quadrature::Torus(grid) => {
                let mut out = Vec::with_capacity(grid.len() * self.count() * 2);
                for (x1, x2, _) in grid.points() {
                    for m in &self.basis {
                        match m {
                            Member::Torus(t) => {
                                let z = t.eval(x1, x2);
                                out.push(z.re);
                                out.push(z.im);
                            }
                            _ => {
                                return Err(Error::InvalidFamily(
                                    "sphere member on the torus".into(),
                                ))
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn gram_residual(&self) -> Result<f64> {
        Ok(self.sample()?.gram_residual())
    }
}
