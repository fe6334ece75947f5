use std::f64::consts::{FRAC_PI_4, PI};

/// Power series is used up to here.
const SERIES_LIMIT: f64 = 8.0;
/// Hankel asymptotic expansion is used from here on.
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// Bessel function of the first kind of order zero.
///
/// Three regimes: the Taylor series for `|x| <= 8`, Miller's backward
/// recurrence normalised by `J₀ + 2ΣJ₂ₖ = 1` in between, and the Hankel
/// expansion for `|x| >= 25`. Absolute accuracy is ~1e-15 throughout.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        series(x)
    } else if x < ASYMPTOTIC_LIMIT {
        miller(x)
    } else {
        hankel(x)
    }
}

fn series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-3) {
            return sum;
        }
        k += 1.0;
    }
}

fn miller(x: f64) -> f64 {
    let start = 2 * ((x + 30.0 + (40.0 * x).sqrt()) as usize / 2);
    // walk J_k downward from k = start with J_{start+1} = 0
    let mut upper = 0.0;
    let mut cur = 1e-300;
    let mut even_sum = 0.0;
    for k in (1..=start).rev() {
        let lower = 2.0 * k as f64 / x * cur - upper;
        upper = cur;
        cur = lower;
        let order = k - 1;
        if order > 0 && order % 2 == 0 {
            even_sum += cur;
        }
        if cur.abs() > 1e250 {
            upper *= 1e-250;
            cur *= 1e-250;
            even_sum *= 1e-250;
        }
    }
    cur / (cur + 2.0 * even_sum)
}

fn hankel(x: f64) -> f64 {
    // J₀(x) = √(2/(πx)) (P cos χ − Q sin χ), χ = x − π/4, with
    // P = Σ (−1)^m a_{2m} x^{−2m}, Q = Σ (−1)^m a_{2m+1} x^{−2m−1},
    // a_k = Π_{j≤k} (−(2j−1)²) / (k! 8^k).
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200usize {
        let odd = (2 * k - 1) as f64;
        term *= -odd * odd / (k as f64 * eight_x);
        if term.abs() >= last || term.abs() < 1e-18 {
            break;
        }
        last = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// The `k`-th positive zero of J₀ (`k >= 1`), from McMahon's expansion polished
/// by a secant iteration on [`bessel_j0`].
pub fn bessel_j0_zero(k: usize) -> f64 {
    assert!(k >= 1, "zeros are numbered from 1");
    let beta = (k as f64 - 0.25) * PI;
    let b8 = 8.0 * beta;
    let mut x1 = beta + 1.0 / b8 - 124.0 / (3.0 * b8.powi(3)) + 120_928.0 / (15.0 * b8.powi(5));
    let mut x0 = x1 - 1e-3;
    let mut f0 = bessel_j0(x0);
    let mut f1 = bessel_j0(x1);
    for _ in 0..50 {
        if f1 == 0.0 || f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = bessel_j0(x1);
        if (x1 - x0).abs() < 1e-15 * x1 {
            break;
        }
    }
    x1
}
