use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Recurrence target: the asymptotic series is applied once `|z|` reaches this radius.
const ASYMPTOTIC_RADIUS: f64 = 12.0;

/// Bernoulli numbers B_2, B_4, ..., B_16.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polygamma {
    /// ψ(z)
    Digamma,
    /// ψ′(z)
    Trigamma,
}

impl TryFrom<u32> for Polygamma {
    type Error = Error;

    fn try_from(order: u32) -> Result<Self> {
        match order {
            0 => Ok(Polygamma::Digamma),
            1 => Ok(Polygamma::Trigamma),
            _ => Err(Error::InvalidParameter(format!(
                "polygamma order {order} is not supported (0 or 1)"
            ))),
        }
    }
}

/// Digamma or trigamma at a complex argument.
///
/// Arguments in the left half-plane (`Re z < 1/2`) are reflected; everything
/// else is shifted upward by the recurrence until `|z| >= 12` and finished with
/// the Stirling-type asymptotic series through B₁₆.
pub fn polygamma(order: Polygamma, z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::PoleInput { re: z.re, im: z.im });
    }
    Ok(match order {
        Polygamma::Digamma => digamma_unchecked(z),
        Polygamma::Trigamma => trigamma_unchecked(z),
    })
}

pub fn digamma(z: Complex64) -> Result<Complex64> {
    polygamma(Polygamma::Digamma, z)
}

pub fn trigamma(z: Complex64) -> Result<Complex64> {
    polygamma(Polygamma::Trigamma, z)
}

fn digamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // ψ(z) = ψ(1 − z) − π cot(πz)
        return digamma_unchecked(1.0 - z) - PI * cot_pi(z);
    }
    let (w, shift) = shift_up(z, |w| w.inv());
    digamma_asymptotic(w) - shift
}

fn trigamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // ψ′(z) = −ψ′(1 − z) + π² / sin²(πz)
        return -trigamma_unchecked(1.0 - z) + PI * PI * csc2_pi(z);
    }
    let (w, shift) = shift_up(z, |w| (w * w).inv());
    trigamma_asymptotic(w) + shift
}

/// Moves `z` to `z + k` with `|z + k| >= ASYMPTOTIC_RADIUS`, accumulating
/// `Σ term(z + j)` for `j < k`.
fn shift_up(mut z: Complex64, term: impl Fn(Complex64) -> Complex64) -> (Complex64, Complex64) {
    let mut acc = Complex64::new(0.0, 0.0);
    while z.norm() < ASYMPTOTIC_RADIUS {
        acc += term(z);
        z += 1.0;
    }
    (z, acc)
}

fn digamma_asymptotic(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        series += power * (b / two_k);
        power *= inv2;
    }
    z.ln() - 0.5 * inv - series
}

fn trigamma_asymptotic(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv2 * inv;
    for b in BERNOULLI {
        series += power * b;
        power *= inv2;
    }
    inv + 0.5 * inv2 + series
}

/// cot(πz), written with the decaying exponential so large |Im z| cannot overflow.
fn cot_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im >= 0.0 {
        let e = (2.0 * PI * i * z).exp();
        i * (e + 1.0) / (e - 1.0)
    } else {
        let e = (-2.0 * PI * i * z).exp();
        -i * (e + 1.0) / (e - 1.0)
    }
}

/// 1 / sin²(πz) in the same overflow-free form.
fn csc2_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let e = if z.im >= 0.0 {
        (2.0 * PI * i * z).exp()
    } else {
        (-2.0 * PI * i * z).exp()
    };
    -4.0 * e / ((e - 1.0) * (e - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    /// ψ(1) from the harmonic-number limit H_M − ln M − 1/(2M) + 1/(12M²).
    #[test]
    fn digamma_one_matches_harmonic_limit() {
        let m = 100_000usize;
        let harmonic: f64 = (1..=m).rev().map(|n| 1.0 / n as f64).sum();
        let mf = m as f64;
        let gamma = harmonic - mf.ln() - 0.5 / mf + 1.0 / (12.0 * mf * mf);
        let psi1 = digamma(c(1.0, 0.0)).unwrap();
        assert!((psi1.re + gamma).abs() < 1e-13, "{}", psi1.re + gamma);
        assert!((psi1.re - -0.577_215_664_901_532_9).abs() < 1e-15);
        assert_eq!(psi1.im, 0.0);
    }

    #[test]
    fn digamma_two_by_recurrence() {
        let psi2 = digamma(c(2.0, 0.0)).unwrap().re;
        assert!((psi2 - 0.422_784_335_098_467_1).abs() < 1e-15);
    }

    /// ψ′(1) = Σ 1/n², brute force plus the Euler–Maclaurin tail 1/M − 1/(2M²) + 1/(6M³).
    #[test]
    fn trigamma_one_matches_zeta_two() {
        let m = 1_000_000usize;
        let partial: f64 = (1..=m).rev().map(|n| 1.0 / (n as f64 * n as f64)).sum();
        let mf = m as f64;
        let oracle = partial + 1.0 / mf - 0.5 / (mf * mf) + 1.0 / (6.0 * mf * mf * mf);
        let t = trigamma(c(1.0, 0.0)).unwrap().re;
        assert!((t - oracle).abs() < 1e-14);
        assert!((t - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
    }

    /// 40-digit reference values.
    #[test]
    fn complex_reference_values() {
        let cases = [
            (
                Polygamma::Digamma,
                c(1.0, 2.0),
                c(0.714_591_515_373_977_5, 1.320_807_282_642_230_2),
            ),
            (
                Polygamma::Trigamma,
                c(1.0, 2.0),
                c(0.124_931_162_140_944_58, -0.477_825_550_147_229_75),
            ),
            (
                Polygamma::Digamma,
                c(-3.5, 0.2),
                c(1.390_100_578_416_177_5, 1.699_827_273_237_970_4),
            ),
            (
                Polygamma::Trigamma,
                c(-3.5, 0.2),
                c(6.560_622_354_911_212, -0.012_281_700_299_032_754),
            ),
            (
                Polygamma::Digamma,
                c(1e6, 3.0),
                c(13.815_510_057_968_69, 3.000_001_499_991_5e-6),
            ),
            (
                Polygamma::Digamma,
                c(0.1, 0.0),
                c(-10.423_754_940_411_077, 0.0),
            ),
        ];
        for (order, z, want) in cases {
            let got = polygamma(order, z).unwrap();
            assert!(
                rel(got, want) < 1e-13,
                "{order:?}({z}) = {got}, want {want}"
            );
        }
    }

    /// Independent Hurwitz-type oracle: ψ′(z) = Σ_{n≥0} 1/(z+n)², summed to M plus an
    /// Euler–Maclaurin tail.
    #[test]
    fn trigamma_matches_truncated_hurwitz_sum() {
        let z = c(0.7, -1.3);
        let m = 20_000;
        let mut sum = Complex64::new(0.0, 0.0);
        for n in (0..m).rev() {
            let w = z + n as f64;
            sum += (w * w).inv();
        }
        let w = z + m as f64;
        let tail = w.inv() + 0.5 * (w * w).inv() + (w * w * w).inv() / 6.0;
        let oracle = sum + tail;
        assert!(rel(trigamma(z).unwrap(), oracle) < 1e-12);
    }

    #[test]
    fn conjugation_symmetry() {
        let z = c(1.0, 2.0);
        for order in [Polygamma::Digamma, Polygamma::Trigamma] {
            let a = polygamma(order, z.conj()).unwrap();
            let b = polygamma(order, z).unwrap().conj();
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn poles_are_rejected() {
        for re in [0.0, -1.0, -7.0] {
            assert!(matches!(digamma(c(re, 0.0)), Err(Error::PoleInput { .. })));
            assert!(trigamma(c(re, 0.0)).is_err());
        }
        assert!(digamma(c(-1.0, 1e-9)).is_ok());
        assert!(Polygamma::try_from(2).is_err());
    }

    #[test]
    fn recurrence_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let z = c(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
            let lhs = digamma(z + 1.0).unwrap() - digamma(z).unwrap();
            let rhs = z.inv();
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0), "z = {z}");
            let lhs = trigamma(z).unwrap() - trigamma(z + 1.0).unwrap();
            let rhs = (z * z).inv();
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0), "z = {z}");
        }
    }

    #[test]
    fn trigamma_is_derivative_of_digamma() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-4;
        for _ in 0..50 {
            let z = c(rng.gen_range(0.2..30.0), rng.gen_range(-30.0..30.0));
            let fd = (digamma(z + h).unwrap() - digamma(z - h).unwrap()) / (2.0 * h);
            assert!((fd - trigamma(z).unwrap()).norm() < 1e-6, "z = {z}");
        }
    }
}
