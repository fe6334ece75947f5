//! Grid sweeps shared by the sphere and torus certificates.

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `step, 2·step, …, a_max` (the last point is `a_max` up to rounding).
pub fn uniform_grid(a_max: f64, step: f64) -> Vec<f64> {
    let n = (a_max / step).round() as usize;
    (1..=n).map(|i| i as f64 * step).collect()
}

/// Summary of a sampled function checked against an upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSummary {
    pub max_value: f64,
    pub argmax: f64,
    /// `bound − (upper envelope between samples)`, where the envelope adds twice
    /// the largest neighbouring finite-difference slope times half a cell.
    pub lipschitz_margin: f64,
}

/// `points` must be sorted by abscissa and contain at least two entries.
pub fn summarize(points: &[(f64, f64)], bound: f64) -> GridSummary {
    let (mut max_value, mut argmax) = (f64::NEG_INFINITY, f64::NAN);
    for &(x, v) in points {
        if v > max_value {
            max_value = v;
            argmax = x;
        }
    }
    let slopes: Vec<f64> = points
        .windows(2)
        .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
        .collect();
    let mut lipschitz_margin = f64::INFINITY;
    for (i, w) in points.windows(2).enumerate() {
        let slope = slopes[i.saturating_sub(1)]
            .max(slopes[i])
            .max(slopes.get(i + 1).copied().unwrap_or(0.0));
        let envelope = w[0].1.max(w[1].1) + 2.0 * slope * 0.5 * (w[1].0 - w[0].0);
        lipschitz_margin = lipschitz_margin.min(bound - envelope);
    }
    GridSummary {
        max_value,
        argmax,
        lipschitz_margin,
    }
}
