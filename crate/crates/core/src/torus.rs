//! Lattice sums over `ℤ² ∖ {0}` and the estimates that bound the torus series
//!
//! ```text
//! H(a) = (4/π²) a³ Σ_{k≠0} 1/(|k|⁴ + a²)².
//! ```
//!
//! Poisson summation gives `Σ_{k≠0} 1/((|k|/√a)⁴ + 1)² = π²a/4 − 1 + R(a)`, that
//! is `H(a) = 1 − (4/(π²a))(1 − R(a))`, so `H < 1` as soon as `|R(a)| < 1`.
//! `R` is controlled through the radial Fourier transform `ĥ` of
//! `h(r) = 1/(r⁴+1)²`, either by a shifted-contour estimate (rigorous, kicks
//! in at `a ≈ 273.8`) or by the numerically checked bound `|ĥ(ξ)| < e^{−ξ/2}`
//! (kicks in at `a ≈ 14.73`).

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{compensated_sum, summarize, uniform_grid};
use crate::record::VerificationRecord;
use crate::specfun::{bessel_j0, integrate_semi_infinite, Strategy};

/// Strip half-width used in the shifted-contour estimate.
pub const STRIP_ALPHA: f64 = 1.0 / 4.6;
/// Constant `b` of the polynomial lower bound `|F|² > (t⁴+1)/b`.
pub const STRIP_B: f64 = 4.75;

/// Shells beyond this norm are refused.
pub const MAX_SHELL_NORM: u64 = 1 << 26;

/// Multiplicities `r₂(m)` of `|k|² = m` over `ℤ² ∖ {0}` for `1 <= m <= M`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeShellTable {
    max_norm: u64,
    r2: Vec<u32>,
    // cumulative[m] = #{k ≠ 0 : |k|² <= m}
    cumulative: Vec<u64>,
    occupied: Vec<(f64, f64)>,
}

impl LatticeShellTable {
    /// Counts lattice points with `0 < |k|² <= max_norm` by enumeration.
    pub fn build(max_norm: u64) -> Result<Self> {
        if max_norm == 0 {
            return Err(Error::InvalidParameter("shell table needs M >= 1".into()));
        }
        if max_norm > MAX_SHELL_NORM {
            return Err(Error::ResourceLimit(format!(
                "shell table up to |k|² = {max_norm} exceeds the cap {MAX_SHELL_NORM}"
            )));
        }
        let m = max_norm as usize;
        let mut r2 = vec![0u32; m + 1];
        let radius = (max_norm as f64).sqrt() as i64 + 1;
        for x in -radius..=radius {
            let x2 = (x * x) as u64;
            if x2 > max_norm {
                continue;
            }
            let y_max = ((max_norm - x2) as f64).sqrt() as i64 + 1;
            for y in -y_max..=y_max {
                let n = x2 + (y * y) as u64;
                if n != 0 && n <= max_norm {
                    r2[n as usize] += 1;
                }
            }
        }
        let mut cumulative = vec![0u64; m + 1];
        let mut acc = 0u64;
        for (i, &c) in r2.iter().enumerate() {
            acc += c as u64;
            cumulative[i] = acc;
        }
        let occupied = r2
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i as f64, c as f64))
            .collect();
        Ok(LatticeShellTable {
            max_norm,
            r2,
            cumulative,
            occupied,
        })
    }

    pub fn max_norm(&self) -> u64 {
        self.max_norm
    }

    /// `r₂(m)`; zero outside `1..=M`.
    pub fn r2(&self, m: u64) -> u32 {
        if m == 0 || m > self.max_norm {
            0
        } else {
            self.r2[m as usize]
        }
    }

    /// Number of lattice points with `0 < |k|² <= M`.
    pub fn point_count(&self) -> u64 {
        self.cumulative[self.max_norm as usize]
    }

    /// Non-empty shells as `(m, r₂(m))`, ascending.
    pub fn shells(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.occupied.iter().map(|&(m, c)| (m as u64, c as u32))
    }

    /// `λ_j`, the `j`-th value (from 1) of `|k|²` in non-decreasing order.
    pub fn lambda(&self, j: u64) -> Option<u64> {
        if j == 0 || j > self.point_count() {
            return None;
        }
        Some(self.cumulative.partition_point(|&c| c < j) as u64)
    }

    /// The ordered multiset `{λ_j}`.
    pub fn lambdas(&self) -> impl Iterator<Item = u64> + '_ {
        self.shells()
            .flat_map(|(m, c)| std::iter::repeat_n(m, c as usize))
    }

    /// `Σ_{0<|k|²<=M'} 1/(|k|⁴ + a²)²` with `M' = min(M, limit)`, smallest terms first.
    fn inverse_square_sum(&self, a: f64, limit: u64) -> f64 {
        let a2 = a * a;
        let end = self.occupied.partition_point(|&(m, _)| m <= limit as f64);
        compensated_sum(self.occupied[..end].iter().rev().map(|&(m, c)| {
            let d = m * m + a2;
            c / (d * d)
        }))
    }

    /// Shell radius needed so the tail of `weight · Σ|k|⁻⁸` is below `tol`.
    ///
    /// For decreasing radial `g`, `Σ_{|k|>K} g(|k|) <= (2π/3)(K − √2)⁻⁶` when
    /// `g(r) = r⁻⁸` and `K >= 3/√2`: compare each point with the unit square
    /// centred on it, then integrate over `|x| > K − √2/2`.
    pub fn required_norm(weight: f64, tol: f64) -> u64 {
        let radius = SQRT_2 + (2.0 * PI / 3.0 * weight / tol).powf(1.0 / 6.0);
        let radius = radius.max(3.0);
        (radius * radius).ceil() as u64
    }

    fn tail_bound(norm: u64, weight: f64) -> f64 {
        let k = (norm as f64).sqrt();
        weight * 2.0 * PI / 3.0 / (k - SQRT_2).powi(6)
    }

    /// Shells actually summed for `weight` and `tol`, capped by the table.
    fn cutoff(&self, weight: f64, tol: f64) -> u64 {
        Self::required_norm(weight, tol).min(self.max_norm)
    }

    /// `H(a)` summed over the table. Fails if the table is too small for `tol`.
    pub fn h_t2(&self, a: f64, tol: f64) -> Result<TorusSeriesEval> {
        check_a(a)?;
        let weight = 4.0 / (PI * PI) * a.powi(3);
        let cutoff = self.cutoff(weight, tol);
        let tail_bound = Self::tail_bound(cutoff, weight);
        if cutoff < 5 || tail_bound > tol {
            return Err(Error::InvalidParameter(format!(
                "shell table up to {} too small for a = {a}, tol = {tol:e}",
                self.max_norm
            )));
        }
        Ok(TorusSeriesEval {
            a,
            value: weight * self.inverse_square_sum(a, cutoff),
            tail_bound,
        })
    }

    /// `R(a) = Σ_{k≠0} 1/((|k|²/a)² + 1)² + 1 − π²a/4` from the direct sum.
    pub fn remainder(&self, a: f64, tol: f64) -> Result<RemainderEstimate> {
        check_a(a)?;
        let weight = a.powi(4);
        let cutoff = self.cutoff(weight, tol);
        let tail_bound = Self::tail_bound(cutoff, weight);
        if cutoff < 5 || tail_bound > tol {
            return Err(Error::InvalidParameter(format!(
                "shell table up to {} too small for the remainder at a = {a}, tol = {tol:e}",
                self.max_norm
            )));
        }
        let sum = weight * self.inverse_square_sum(a, cutoff);
        Ok(RemainderEstimate {
            a,
            r: sum + 1.0 - PI * PI * a / 4.0,
            tail_bound,
            conservative_bound: conservative_envelope(a),
            optimistic_bound: optimistic_envelope(a),
        })
    }
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

/// Multiplicity table for `0 < |k|² <= max_norm`.
pub fn build_shells(max_norm: u64) -> Result<LatticeShellTable> {
    LatticeShellTable::build(max_norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusSeriesEval {
    pub a: f64,
    pub value: f64,
    pub tail_bound: f64,
}

/// Direct lattice sum with a rigorous tail bound `<= tol`.
pub fn h_t2_direct(a: f64, tol: f64) -> Result<TorusSeriesEval> {
    check_a(a)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let weight = 4.0 / (PI * PI) * a.powi(3);
    let table = LatticeShellTable::build(LatticeShellTable::required_norm(weight, tol))?;
    table.h_t2(a, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemainderEstimate {
    pub a: f64,
    /// The Poisson remainder computed from the direct sum.
    pub r: f64,
    /// Truncation bound on `r`.
    pub tail_bound: f64,
    pub conservative_bound: f64,
    pub optimistic_bound: f64,
}

/// `R(a)` with truncation error at most `1e-12`.
pub fn poisson_remainder(a: f64) -> Result<RemainderEstimate> {
    poisson_remainder_with_tol(a, 1e-12)
}

pub fn poisson_remainder_with_tol(a: f64, tol: f64) -> Result<RemainderEstimate> {
    check_a(a)?;
    let table = LatticeShellTable::build(LatticeShellTable::required_norm(a.powi(4), tol))?;
    table.remainder(a, tol)
}

/// `(2^{3/2} b/α²) e^{−απ√a/2}` from the shifted contour with `α = 1/4.6`, `b = 4.75`.
pub fn conservative_envelope(a: f64) -> f64 {
    conservative_envelope_with(a, STRIP_ALPHA, STRIP_B)
}

pub fn conservative_envelope_with(a: f64, alpha: f64, b: f64) -> f64 {
    2f64.powf(1.5) * b / (alpha * alpha) * (-alpha * PI * a.sqrt() / 2.0).exp()
}

/// `(64/π) e^{−π√a/4}`, from `|ĥ(ξ)| < e^{−ξ/2}` and `λ_j >= j/4`.
pub fn optimistic_envelope(a: f64) -> f64 {
    64.0 / PI * (-PI * a.sqrt() / 4.0).exp()
}

/// `[(2/(απ)) log(2^{3/2} b/α²)]²`, where the conservative envelope equals one.
pub fn conservative_threshold() -> f64 {
    let alpha = STRIP_ALPHA;
    (2.0 / (alpha * PI) * (2f64.powf(1.5) * STRIP_B / (alpha * alpha)).ln()).powi(2)
}

/// `[(4/π) log(64/π)]²`, where the optimistic envelope equals one.
pub fn optimistic_threshold() -> f64 {
    (4.0 / PI * (64.0 / PI).ln()).powi(2)
}

/// Where a decreasing envelope crosses one, by bisection.
pub fn envelope_crossing(envelope: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (1e-6f64, 1e8f64);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if envelope(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Radial Fourier transform `ĥ(ξ) = ∫₀^∞ J₀(ξr) r/(r⁴+1)² dr`.
pub fn hankel_hhat(xi: f64) -> Result<f64> {
    if !(xi >= 0.0) || !xi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "xi must be non-negative, got {xi}"
        )));
    }
    let h = |r: f64| r / (r.powi(4) + 1.0).powi(2);
    let integral = if xi == 0.0 {
        integrate_semi_infinite(h, Strategy::SmoothDecay, 1e-15)?
    } else {
        integrate_semi_infinite(
            |r| bessel_j0(xi * r) * h(r),
            Strategy::BesselOscillatory { frequency: xi },
            1e-16,
        )?
    };
    Ok(integral.value)
}

/// `P(t) = (t² − 12α²t + 4α⁴ + 1)² − 32α²t(t − 2α²)² − (t⁴ + 1)/b` as
/// ascending coefficients.
pub fn strip_polynomial(alpha: f64, b: f64) -> [f64; 5] {
    let a2 = alpha * alpha;
    let a4 = a2 * a2;
    let c = 4.0 * a4 + 1.0;
    // (t² + pt + c)² with p = −12α²
    let p = -12.0 * a2;
    let square = [c * c, 2.0 * p * c, p * p + 2.0 * c, 2.0 * p, 1.0];
    // 32α² t (t − 2α²)² = 32α² (t³ − 4α² t² + 4α⁴ t)
    let cross = [
        0.0,
        32.0 * a2 * 4.0 * a4,
        -32.0 * a2 * 4.0 * a2,
        32.0 * a2,
        0.0,
    ];
    let mut out = [0.0; 5];
    for k in 0..5 {
        out[k] = square[k] - cross[k];
    }
    out[0] -= 1.0 / b;
    out[4] -= 1.0 / b;
    out
}

fn poly_eval(c: &[f64; 5], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
}

/// Lower bound of the quartic on `[lo, hi]` from its exact Taylor expansion at the midpoint.
fn interval_lower_bound(c: &[f64; 5], lo: f64, hi: f64) -> f64 {
    let m = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    // derivatives / k! at m
    let d0 = poly_eval(c, m);
    let d1 = c[1] + 2.0 * c[2] * m + 3.0 * c[3] * m * m + 4.0 * c[4] * m.powi(3);
    let d2 = c[2] + 3.0 * c[3] * m + 6.0 * c[4] * m * m;
    let d3 = c[3] + 4.0 * c[4] * m;
    let d4 = c[4];
    d0 - d1.abs() * h - d2.abs() * h * h - d3.abs() * h.powi(3) - d4.abs() * h.powi(4)
}

/// Certifies `P(t) > 0` on `[0, t_max]` by subdividing a dense grid until every
/// cell's Taylor lower bound is positive, and covers `t > t_max` through the
/// leading coefficient `1 − 1/b`.
pub fn strip_inequality_check(alpha: f64, b: f64, t_max: f64) -> Result<VerificationRecord> {
    if !(alpha > 0.0 && b > 0.0 && t_max >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need alpha, b > 0 and t_max >= 1, got {alpha}, {b}, {t_max}"
        )));
    }
    let c = strip_polynomial(alpha, b);
    // fine cells where the minimum sits, coarse ones further out
    let knee = t_max.min(10.0);
    let cells = 20_000usize;
    let fine = (0..cells / 2).map(|i| knee * i as f64 / (cells / 2) as f64);
    let coarse = (0..cells / 2).map(|i| knee + (t_max - knee) * i as f64 / (cells / 2) as f64);
    let mut edges: Vec<f64> = fine.chain(coarse).collect();
    edges.push(t_max);
    edges.dedup();
    let mut stack: Vec<(f64, f64, u32)> = edges.windows(2).rev().map(|w| (w[0], w[1], 0)).collect();
    let mut certified_min = f64::INFINITY;
    let mut sampled_min = f64::INFINITY;
    let mut sampled_at = 0.0;
    let mut subdivisions = 0usize;
    let mut failed_at = None;
    while let Some((lo, hi, depth)) = stack.pop() {
        let value = poly_eval(&c, lo).min(poly_eval(&c, hi));
        if value < sampled_min {
            sampled_min = value;
            sampled_at = if poly_eval(&c, lo) <= poly_eval(&c, hi) {
                lo
            } else {
                hi
            };
        }
        if value <= 0.0 {
            failed_at = Some(if poly_eval(&c, lo) <= 0.0 { lo } else { hi });
            certified_min = certified_min.min(value);
            break;
        }
        let lower = interval_lower_bound(&c, lo, hi);
        if lower > 0.0 {
            certified_min = certified_min.min(lower);
        } else if depth < 40 {
            subdivisions += 1;
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        } else {
            certified_min = certified_min.min(lower);
            failed_at = Some(0.5 * (lo + hi));
            break;
        }
    }
    // for t >= t_max >= 1: P(t) >= t³ (c₄ t − Σ_{k<4} |c_k|)
    let lower_sum: f64 = c[..4].iter().map(|v| v.abs()).sum();
    let tail_margin = c[4] * t_max - lower_sum;
    let mut record = VerificationRecord::with_margin(
        "strip_polynomial_positive",
        "(t²−12α²t+4α⁴+1)² − 32α²t(t−2α²)² > (t⁴+1)/b for t >= 0, α = 1/4.6, b = 4.75",
        sampled_min,
        0.0,
        certified_min,
    )
    .note(format!(
        "grid [0, {t_max}] with {} cells, {subdivisions} subdivisions; smallest sample P({sampled_at:.6}) = {sampled_min:.6e}",
        edges.len() - 1
    ))
    .note(format!("P(0) = {:.12}", c[0]))
    .require("leading coefficient 1 − 1/b", c[4])
    .require(&format!("tail t > {t_max}: c4·t_max − Σ|c_k|"), tail_margin);
    if let Some(t) = failed_at {
        record = record.note(format!("positivity not certified near t = {t}"));
    }
    Ok(record)
}

/// Upper bound on `Σ_{j>=1} e^{−2L√j}`: explicit terms plus the integral tail.
pub fn tail_chain_lhs(l: f64) -> f64 {
    let mut sum = 0.0;
    let mut j = 1u64;
    loop {
        let term = (-2.0 * l * (j as f64).sqrt()).exp();
        sum += term;
        if term < 1e-18 * sum || j > 50_000_000 {
            break;
        }
        j += 1;
    }
    // Σ_{i>j} e^{−2L√i} <= ∫_j^∞ e^{−2L√x} dx = e^{−2L√j}(2L√j + 1)/(2L²)
    let s = (j as f64).sqrt();
    sum + (-2.0 * l * s).exp() * (2.0 * l * s + 1.0) / (2.0 * l * l)
}

/// `Σ_{j≥1} e^{−2L√j} <= e^{−L}·2/L²`.
pub fn tail_chain_check(l: f64) -> Result<VerificationRecord> {
    if !(l > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "L must be positive, got {l}"
        )));
    }
    let lhs = tail_chain_lhs(l);
    let rhs = (-l).exp() * 2.0 / (l * l);
    Ok(VerificationRecord::below(
        &format!("tail_chain_L{l}"),
        "Σ_j e^{−2L√j} <= e^{−L}·2/L²",
        lhs,
        rhs,
    )
    .note(format!("ratio lhs/rhs = {:.6e}", lhs / rhs)))
}

/// Grid certificate for `H_T2(a) < 1` on `(0, a_max]`, with the remainder
/// certificate `|R(a)| <= (64/π)e^{−π√a/4} < 1` covering `a > a_max` once
/// `a_max` is past the optimistic threshold.
pub fn certify_below_one_torus(a_max: f64, step: f64) -> Result<VerificationRecord> {
    if !(a_max > 0.0 && step > 0.0 && step <= a_max) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < step <= a_max, got a_max = {a_max}, step = {step}"
        )));
    }
    let tol = 1e-10;
    let weight = 4.0 / (PI * PI) * a_max.powi(3);
    let table = LatticeShellTable::build(LatticeShellTable::required_norm(weight, tol))?;
    let grid = uniform_grid(a_max, step);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&a| table.h_t2(a, tol).map(|e| e.value + e.tail_bound))
        .collect::<Result<_>>()?;
    let mut points = vec![(0.0, 0.0)];
    points.extend(grid.iter().copied().zip(values.iter().copied()));
    let summary = summarize(&points, 1.0);
    let right_edge = *values.last().expect("non-empty grid");

    let mut record = VerificationRecord::below(
        "torus_series_below_one",
        "H_T2(a) < 1 for all a > 0",
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
    );

    let threshold = optimistic_threshold();
    if a_max >= threshold {
        let envelope = optimistic_envelope(a_max);
        record = record
            .require(
                &format!("optimistic envelope (64/π)e^(−π√a/4) < 1 for a >= {a_max}"),
                1.0 - envelope,
            )
            .note("envelope assumes |ĥ(ξ)| < e^(−ξ/2), checked on ξ ∈ [0.5, 60]");
        let r = table.remainder(a_max, 1e-6)?;
        record = record.require(
            &format!("computed |R({a_max})| below envelope"),
            envelope - r.r.abs(),
        );
    } else {
        record = record.note(format!(
            "analytic tail not engaged below {threshold:.2}: only (0, {a_max}] is certified"
        ));
    }
    Ok(record.note(format!(
        "rigorous contour estimate gives |R| < 1 for a > {:.1}",
        conservative_threshold()
    )))
}

/// Least-squares slope `C` of `log|R(a)| ≈ c − C√a` over the samples.
pub fn fitted_decay_rate(samples: &[RemainderEstimate]) -> f64 {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.r.abs() > 1e3 * s.tail_bound.max(1e-300))
        .map(|s| (s.a.sqrt(), s.r.abs().ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    -sxy / sxx
}
