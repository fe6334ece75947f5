//! The sphere series
//!
//! ```text
//! H(a) = (4/π) a³ Σ_{n≥1} (2n+1) / ((n(n+1))² + a²)²
//! ```
//!
//! by direct summation with a rigorous tail, by an exact digamma/trigamma
//! closed form, and by its large-`a` expansion `1 − 8/(3πa) − 64/(315πa³)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{compensated_sum, summarize, uniform_grid};
use crate::record::VerificationRecord;
use crate::specfun::{digamma, trigamma, Complex64};

/// Limit of `(H(a) − 1 + 8/(3πa))·a³` as `a → ∞`.
pub const REMAINDER_LIMIT: f64 = -64.0 / (315.0 * PI);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesMethod {
    Direct,
    ClosedForm,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereSeriesEval {
    pub a: f64,
    pub value: f64,
    pub method: SeriesMethod,
    pub tail_bound: f64,
}

fn check_a(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "series parameter a must be positive, got {a}"
        )))
    }
}

/// Truncation index for tolerance `tol`, from `(2n+1)/((n(n+1))²+a²)² <= 2/n⁷`
/// and `Σ_{n>N} 2/n⁷ <= 1/(3N⁶)`.
fn truncation(a: f64, tol: f64) -> (usize, f64) {
    let prefactor = 4.0 / PI * a.powi(3);
    let n = (prefactor / (3.0 * tol)).powf(1.0 / 6.0).ceil().max(1.0) as usize;
    let bound = prefactor / (3.0 * (n as f64).powi(6));
    (n, bound)
}

/// Direct summation, truncated so the rigorous tail bound is at most `tol`.
pub fn h_s2_direct(a: f64, tol: f64) -> Result<SphereSeriesEval> {
    check_a(a)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let (n_max, tail_bound) = truncation(a, tol);
    let a2 = a * a;
    let sum = compensated_sum((1..=n_max).rev().map(|n| {
        let nf = n as f64;
        let lam = nf * (nf + 1.0);
        let d = lam * lam + a2;
        (2.0 * nf + 1.0) / (d * d)
    }));
    Ok(SphereSeriesEval {
        a,
        value: 4.0 / PI * a.powi(3) * sum,
        method: SeriesMethod::Direct,
        tail_bound,
    })
}

/// Closed form of `H(a)` with its imaginary residue left in place.
///
/// With `x = n(n+1)`, `u = n + 1/2` and `β² = 1/4 + ia` (so `x − ia = u² − β²`):
///
/// ```text
/// 1/(x²+a²)² = −(1/4a²)[(x−ia)⁻² + (x+ia)⁻²] + (1/4ia³)[(x−ia)⁻¹ − (x+ia)⁻¹]
/// Σ 2u/(u²−β²)  = −ψ(3/2−β) − ψ(3/2+β)               (up to a real divergent constant)
/// Σ 2u/(u²−β²)² = [ψ′(3/2−β) − ψ′(3/2+β)] / (2β)
/// ```
///
/// The `x + ia` terms use the conjugate root `β̄`, evaluated independently, so the
/// imaginary part of the assembled sum measures the round-off of the evaluation.
pub fn h_s2_closed_form_complex(a: f64) -> Result<Complex64> {
    check_a(a)?;
    let i = Complex64::i();
    let root = (Complex64::new(0.25, a)).sqrt();
    let root_conj = (Complex64::new(0.25, -a)).sqrt();
    let simple = |b: Complex64| -> Result<Complex64> { Ok(-digamma(1.5 - b)? - digamma(1.5 + b)?) };
    let double = |b: Complex64| -> Result<Complex64> {
        Ok((trigamma(1.5 - b)? - trigamma(1.5 + b)?) / (2.0 * b))
    };
    let a2 = a * a;
    let a3 = a2 * a;
    let sum = -(double(root)? + double(root_conj)?) / (4.0 * a2)
        + (simple(root)? - simple(root_conj)?) / (4.0 * i * a3);
    Ok(4.0 / PI * a3 * sum)
}

pub fn h_s2_closed_form(a: f64) -> Result<SphereSeriesEval> {
    let z = h_s2_closed_form_complex(a)?;
    Ok(SphereSeriesEval {
        a,
        value: z.re,
        method: SeriesMethod::ClosedForm,
        tail_bound: 0.0,
    })
}

/// The leading terms `1 − 8/(3πa) − 64/(315πa³)`.
pub fn h_s2_asymptotic(a: f64) -> Result<SphereSeriesEval> {
    check_a(a)?;
    let c = AsymptoticCoefficients::spectral_kernel();
    let value = 4.0 / (PI * a) * spectral_expansion(&c, 1.0 / a)?;
    Ok(SphereSeriesEval {
        a,
        value,
        method: SeriesMethod::Asymptotic,
        tail_bound: f64::NAN,
    })
}

/// `g(0)`, `g′(0)`, `g″(0)` and `∫₀^∞ g` for a kernel `g` in `Σ (2n+1) g(ν n(n+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCoefficients {
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    pub integral: f64,
}

impl AsymptoticCoefficients {
    /// The kernel `g(t) = (1 + t²)⁻²`.
    pub fn spectral_kernel() -> Self {
        AsymptoticCoefficients {
            g0: 1.0,
            g1: 0.0,
            g2: -4.0,
            integral: PI / 4.0,
        }
    }
}

/// `∫g/ν − (2/3)g(0) − (ν/15)g′(0) + (4ν²/315)g″(0)`, the expansion of
/// `Σ_{n≥1} (2n+1) g(ν n(n+1))` as `ν → 0` without its `O(ν³)` remainder.
pub fn spectral_expansion(c: &AsymptoticCoefficients, nu: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "nu must be positive, got {nu}"
        )));
    }
    Ok(c.integral / nu - 2.0 / 3.0 * c.g0 - nu / 15.0 * c.g1 + 4.0 / 315.0 * nu * nu * c.g2)
}

/// `Σ_{n≥1} (2n+1) / (1 + (n(n+1)/a)²)² = (πa/4)·H(a)`, summed directly.
pub fn kernel_series(a: f64, tol: f64) -> Result<f64> {
    let h = h_s2_direct(a, tol * 4.0 / (PI * a))?;
    Ok(PI * a / 4.0 * h.value)
}

/// `(H(a) − 1 + 8/(3πa))·a³` on the grid.
///
/// Plotted against the horizontal line `−64/(315π)`. Written with a plus sign in
/// front of `8/(3πa)`, which is the combination that converges to that line.
pub fn remainder_curve(a_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    a_grid
        .par_iter()
        .map(|&a| {
            if a < 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "remainder grid needs a >= 1, got {a}"
                )));
            }
            Ok((a, scaled_remainder(a)?))
        })
        .collect()
}

fn scaled_remainder(a: f64) -> Result<f64> {
    let h = h_s2_direct(a, 1e-16)?.value;
    Ok((h - 1.0 + 8.0 / (3.0 * PI * a)) * a.powi(3))
}

/// Grid certificate for `H(a) < 1` on `(0, a_max]`.
///
/// Between grid points `H` is controlled by a local Lipschitz bound (twice the
/// largest neighbouring finite-difference slope); beyond `a_max` the expansion
/// `1 − H = 8/(3πa) − r(a)/a³` is used with `|r|` bounded by the largest remainder
/// observed on `[a_max/2, a_max]`.
pub fn certify_below_one_sphere(a_max: f64, step: f64) -> Result<VerificationRecord> {
    if !(a_max > 0.0 && step > 0.0 && step <= a_max) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < step <= a_max, got a_max = {a_max}, step = {step}"
        )));
    }
    let grid = uniform_grid(a_max, step);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&a| h_s2_direct(a, 1e-13).map(|e| e.value + e.tail_bound))
        .collect::<Result<_>>()?;
    // H(0) = 0 closes the first interval
    let mut points = vec![(0.0, 0.0)];
    points.extend(grid.iter().copied().zip(values.iter().copied()));
    let summary = summarize(&points, 1.0);

    let tail_grid: Vec<f64> = uniform_grid(a_max, step)
        .into_iter()
        .filter(|&a| a >= (0.5 * a_max).max(1.0))
        .step_by(((0.5 * a_max / step) as usize / 200).max(1))
        .collect();
    let worst_remainder = remainder_curve(&tail_grid)?
        .into_iter()
        .map(|(_, r)| r.abs())
        .fold(0.0, f64::max);
    // 8/(3πa) − C/a³ > 0 for every a >= a_max
    let asymptotic_margin = 8.0 / (3.0 * PI * a_max) - worst_remainder / a_max.powi(3);

    let right_edge = *values.last().expect("non-empty grid");
    let record = VerificationRecord::below(
        "sphere_series_below_one",
        "H_S2(a) < 1 for all a > 0",
        summary.max_value,
        1.0,
    )
    .note(format!(
        "grid (0, {a_max}] step {step}: {} points, max H = {:.17e} at a = {}",
        grid.len(),
        summary.max_value,
        summary.argmax
    ))
    .note(format!(
        "margin at right edge a = {a_max}: {:.6e}",
        1.0 - right_edge
    ))
    .require(
        "lipschitz interpolation between grid points",
        summary.lipschitz_margin,
    )
    .require(
        &format!("asymptotic tail a > {a_max} with |remainder| <= {worst_remainder:.4e}"),
        asymptotic_margin,
    );
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    // 40-digit evaluations of the series
    const REFERENCE: [(f64, f64); 8] = [
        (0.5, 0.027_105_371_781_259_642),
        (1.0, 0.157_960_271_407_338_75),
        (5.0, 0.831_661_888_878_432),
        (7.3, 0.883_422_214_423_606),
        (10.0, 0.915_030_343_163_701_3),
        (20.0, 0.957_550_485_981_349_7),
        (40.0, 0.978_778_331_477_257_4),
        (100.0, 0.991_511_671_706_517_7),
    ];

    #[test]
    fn direct_matches_reference() {
        for (a, want) in REFERENCE {
            let e = h_s2_direct(a, 1e-14).unwrap();
            assert!(e.tail_bound <= 1e-14);
            assert!(
                (e.value - want).abs() < 1e-13,
                "a = {a}: {}",
                e.value - want
            );
        }
    }

    #[test]
    fn leading_term_at_one() {
        // dominant n = 1 term (4/π)·3/25
        let h = h_s2_direct(1.0, 1e-14).unwrap().value;
        assert!(h > 4.0 / PI * 3.0 / 25.0);
        assert!((h - 0.1579).abs() < 1e-4);
    }

    #[test]
    fn small_a_limit() {
        // (4/π) Σ (2n+1)/(n(n+1))⁴, brute-force oracle
        let series: f64 = (1..20_000u64)
            .rev()
            .map(|n| {
                let l = (n * (n + 1)) as f64;
                (2 * n + 1) as f64 / (l * l * l * l)
            })
            .sum();
        let limit = 4.0 / PI * series;
        assert!((limit - 0.244_172_187_177_087_95).abs() < 1e-14);
        let a = 1e-3;
        let ratio = h_s2_direct(a, 1e-25).unwrap().value / a.powi(3);
        assert!((ratio - limit).abs() < 1e-6);
    }

    #[test]
    fn closed_form_matches_direct() {
        for a in [0.5, 5.0, 7.3, 100.0] {
            let closed = h_s2_closed_form(a).unwrap().value;
            let direct = h_s2_direct(a, 1e-12).unwrap().value;
            assert!((closed - direct).abs() < 1e-10, "a = {a}");
        }
        for (a, want) in REFERENCE {
            assert!(
                (h_s2_closed_form(a).unwrap().value - want).abs() < 1e-12,
                "a = {a}"
            );
        }
        assert!(h_s2_closed_form_complex(7.3).unwrap().im.abs() <= 1e-12);
    }

    #[test]
    fn closed_form_log_spaced() {
        for i in 0..20 {
            let a = 0.1 * 1000f64.powf(i as f64 / 19.0);
            let closed = h_s2_closed_form_complex(a).unwrap();
            let direct = h_s2_direct(a, 1e-13).unwrap().value;
            assert!((closed.re - direct).abs() <= 1e-10, "a = {a}");
            assert!(closed.im.abs() <= 1e-12, "a = {a}: im {}", closed.im);
        }
    }

    #[test]
    fn expansion_terms() {
        let c = AsymptoticCoefficients::spectral_kernel();
        for a in [3.0, 50.0] {
            let v = spectral_expansion(&c, 1.0 / a).unwrap();
            let want = a * PI / 4.0 - 2.0 / 3.0 - 16.0 / 315.0 / (a * a);
            assert!((v - want).abs() < 1e-13);
        }
        let zero = AsymptoticCoefficients {
            g0: 0.0,
            g1: 0.0,
            g2: 0.0,
            integral: 0.0,
        };
        assert_eq!(spectral_expansion(&zero, 0.3).unwrap(), 0.0);
        let simple = AsymptoticCoefficients {
            g0: 1.0,
            g1: 0.0,
            g2: 0.0,
            integral: 1.0,
        };
        assert!((spectral_expansion(&simple, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(spectral_expansion(&c, 0.0).is_err());
    }

    /// The four displayed terms leave an O(a⁻³) remainder with a small constant.
    #[test]
    fn expansion_remainder_is_third_order() {
        let c = AsymptoticCoefficients::spectral_kernel();
        let mut fitted: f64 = 0.0;
        for i in 0..=18 {
            let a = 10.0 * 10f64.powf(i as f64 / 18.0);
            let direct = kernel_series(a, 1e-13).unwrap();
            let expansion = spectral_expansion(&c, 1.0 / a).unwrap();
            fitted = fitted.max((direct - expansion).abs() * a.powi(3));
        }
        assert!(fitted < 1.0, "fitted constant {fitted}");
    }

    #[test]
    fn remainder_converges_to_limit() {
        let curve = remainder_curve(&[10.0, 100.0]).unwrap();
        assert!((curve[0].1 - REMAINDER_LIMIT).abs() < 0.05);
        assert!((curve[1].1 - REMAINDER_LIMIT).abs() < 5e-3);
        // 40-digit value of the scaled remainder at a = 100
        assert!((curve[1].1 - -0.064_661_914_587_381_36).abs() < 1e-8);
        assert!((REMAINDER_LIMIT - -0.064_672_484_811_944_77).abs() < 1e-16);
        assert!(remainder_curve(&[0.5]).is_err());
    }

    #[test]
    fn asymptotic_form_tracks_series() {
        let e = h_s2_asymptotic(20.0).unwrap();
        assert_eq!(e.method, SeriesMethod::Asymptotic);
        let d = h_s2_direct(20.0, 1e-14).unwrap().value;
        assert!((e.value - d).abs() < 1e-6);
        assert!(
            (1.0 - 8.0 / (3.0 * PI * 20.0) - 64.0 / (315.0 * PI * 8000.0) - e.value).abs() < 1e-15
        );
    }

    #[test]
    fn certificate_passes_to_forty() {
        let r = certify_below_one_sphere(40.0, 0.01).unwrap();
        assert!(r.pass, "{r:?}");
        let edge = 8.0 / (3.0 * PI * 40.0);
        assert!(r.margin >= edge - 1e-3);
        assert!((r.margin - 0.021_221_668_522_742_55).abs() < 1e-9);
    }

    #[test]
    fn invalid_inputs() {
        assert!(h_s2_direct(0.0, 1e-10).is_err());
        assert!(h_s2_direct(1.0, 0.0).is_err());
        assert!(h_s2_closed_form(-1.0).is_err());
        assert!(certify_below_one_sphere(1.0, 0.0).is_err());
    }
}
