use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::bessel::bessel_j0_zero;

/// Interval a rule is attached to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite { lo: f64, hi: f64 },
    SemiInfinite { lo: f64 },
}

/// Nodes and positive weights of an interpolatory rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: Domain,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `n`-point Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
///
/// Newton iteration on the three-term recurrence; exact for polynomials of
/// degree `<= 2n - 1`.
pub fn gauss_legendre(n: usize) -> QuadratureRule {
    assert!(n >= 1, "a rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule {
        nodes,
        weights,
        domain: Domain::Finite { lo: -1.0, hi: 1.0 },
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Value of an integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

const MAX_SUBINTERVALS: usize = 4000;

/// Globally adaptive Gauss–Kronrod (7/15) integration on `[lo, hi]` to absolute
/// tolerance `tol`, or to the roundoff level of the result if that is larger.
pub fn gauss_kronrod_adaptive(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<Integral> {
    let (v, e) = kronrod15(&f, lo, hi);
    let mut pieces = vec![(lo, hi, v, e)];
    let mut value = v;
    let mut error = e;
    // error estimates cannot drop below the roundoff level of the result
    let floor = |value: f64| tol.max(50.0 * f64::EPSILON * value.abs());
    while error > floor(value) || !error.is_finite() {
        if pieces.len() >= MAX_SUBINTERVALS || !error.is_finite() {
            return Err(Error::NonConvergence {
                estimate: error,
                tol,
            });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.total_cmp(&b.1 .3))
            .map(|(i, _)| i)
            .expect("non-empty");
        let (a, b, v, e) = pieces.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // interval exhausted at machine resolution
            return Err(Error::NonConvergence {
                estimate: error,
                tol,
            });
        }
        let (v1, e1) = kronrod15(&f, a, mid);
        let (v2, e2) = kronrod15(&f, mid, b);
        pieces.push((a, mid, v1, e1));
        pieces.push((mid, b, v2, e2));
        value += v1 + v2 - v;
        error += e1 + e2 - e;
    }
    // final re-sum removes drift from the incremental updates
    let value = if pieces.len() > 1 {
        pieces.iter().map(|p| p.2).sum()
    } else {
        value
    };
    Ok(Integral { value, error })
}

/// How a semi-infinite integral is attacked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// Integrand decays without oscillating; `t = s/(1-s)` maps onto `[0, 1)`.
    SmoothDecay,
    /// Integrand carries a `J₀(frequency · r)` factor: panels between consecutive
    /// zeros, summed with alternating-series acceleration.
    BesselOscillatory { frequency: f64 },
}

/// Consecutive panels whose increment must fall below `tol/10` before stopping.
const QUIET_PANELS: usize = 3;
const MAX_PANELS: usize = 200_000;

/// `∫₀^∞ integrand(t) dt` to absolute tolerance `tol`.
pub fn integrate_semi_infinite(
    integrand: impl Fn(f64) -> f64,
    strategy: Strategy,
    tol: f64,
) -> Result<Integral> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    match strategy {
        Strategy::SmoothDecay => {
            let mapped = |s: f64| {
                let one_minus = 1.0 - s;
                let t = s / one_minus;
                let v = integrand(t);
                if v == 0.0 {
                    0.0
                } else {
                    v / (one_minus * one_minus)
                }
            };
            gauss_kronrod_adaptive(mapped, 0.0, 1.0, tol)
        }
        Strategy::BesselOscillatory { frequency } => {
            if !(frequency > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "oscillatory strategy needs a positive frequency, got {frequency}"
                )));
            }
            oscillatory(&integrand, frequency, tol)
        }
    }
}

fn oscillatory(f: &impl Fn(f64) -> f64, frequency: f64, tol: f64) -> Result<Integral> {
    let panel_tol = tol / 100.0;
    let mut partials: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut quad_error = 0.0;
    let mut quiet = 0;
    let mut lo = 0.0;
    for k in 1..=MAX_PANELS {
        let hi = bessel_j0_zero(k) / frequency;
        let piece = gauss_kronrod_adaptive(f, lo, hi, panel_tol)?;
        total += piece.value;
        quad_error += piece.error;
        partials.push(total);
        if piece.value.abs() < tol / 10.0 {
            quiet += 1;
            if quiet >= QUIET_PANELS {
                let (value, accel_error) = accelerate(&partials);
                return Ok(Integral {
                    value,
                    error: accel_error + quad_error,
                });
            }
        } else {
            quiet = 0;
        }
        lo = hi;
    }
    Err(Error::NonConvergence {
        estimate: partials.last().copied().unwrap_or(0.0).abs(),
        tol,
    })
}

/// Repeated averaging of the trailing partial sums (Euler-type acceleration of an
/// alternating series). Only the quiet tail enters the window. Returns the
/// accelerated value and its distance from the last raw partial sum.
fn accelerate(partials: &[f64]) -> (f64, f64) {
    let window = partials.len().min(QUIET_PANELS + 1);
    let mut row: Vec<f64> = partials[partials.len() - window..].to_vec();
    while row.len() > 1 {
        row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    let last = *partials.last().expect("at least one panel");
    (row[0], (row[0] - last).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_j0;
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_small_rules() {
        let r = gauss_legendre(2);
        let x = 1.0 / 3f64.sqrt();
        assert!((r.nodes[1] - x).abs() < 1e-15 && (r.nodes[0] + x).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
        let r = gauss_legendre(5);
        assert!(r.weights.iter().all(|&w| w > 0.0));
        assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_monomial_exactness() {
        for n in [1usize, 3, 8, 20, 41, 64] {
            let rule = gauss_legendre(n);
            for deg in 0..2 * n {
                let got = rule.integrate(|x| x.powi(deg as i32));
                let want = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!(
                    (got - want).abs() < 1e-13,
                    "n={n} deg={deg}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn kronrod_finite_interval() {
        let r = gauss_kronrod_adaptive(|x| x.sin(), 0.0, PI, 1e-14).unwrap();
        assert!((r.value - 2.0).abs() < 1e-14);
        let r = gauss_kronrod_adaptive(|x| x.sqrt(), 0.0, 1.0, 1e-13).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn nonconvergence_is_reported() {
        let err = gauss_kronrod_adaptive(|x| 1.0 / x, 0.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn smooth_decay_reference_integrals() {
        let r = integrate_semi_infinite(|t| (1.0 + t * t).powi(-2), Strategy::SmoothDecay, 1e-14)
            .unwrap();
        assert!((r.value - PI / 4.0).abs() < 1e-13);
        let r = integrate_semi_infinite(|x| (-5.0 * x.sqrt()).exp(), Strategy::SmoothDecay, 1e-14)
            .unwrap();
        assert!((r.value - 0.08).abs() < 1e-13);
        // ∫ r/(r⁴+1)² dr = π/8 after u = r²
        let r = integrate_semi_infinite(
            |r| bessel_j0(0.0) * r / (r.powi(4) + 1.0).powi(2),
            Strategy::SmoothDecay,
            1e-14,
        )
        .unwrap();
        assert!((r.value - PI / 8.0).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_matches_closed_form() {
        // ∫₀^∞ J₀(ωr) e^{-r} dr = 1/√(1+ω²)
        for w in [0.5, 3.0, 20.0] {
            let r = integrate_semi_infinite(
                |r| bessel_j0(w * r) * (-r).exp(),
                Strategy::BesselOscillatory { frequency: w },
                1e-13,
            )
            .unwrap();
            let want = 1.0 / (1.0 + w * w).sqrt();
            assert!((r.value - want).abs() < 1e-12, "w={w}: {}", r.value - want);
        }
        // ∫₀^∞ J₀(ωr) r e^{-r²/2} dr = e^{-ω²/2}
        let w = 4.0;
        let r = integrate_semi_infinite(
            |r| bessel_j0(w * r) * r * (-0.5 * r * r).exp(),
            Strategy::BesselOscillatory { frequency: w },
            1e-15,
        )
        .unwrap();
        assert!((r.value - (-8.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn bad_parameters() {
        assert!(integrate_semi_infinite(|t| t, Strategy::SmoothDecay, 0.0).is_err());
        assert!(integrate_semi_infinite(
            |t| t,
            Strategy::BesselOscillatory { frequency: 0.0 },
            1e-8
        )
        .is_err());
    }
}
