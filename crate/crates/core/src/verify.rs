//! Verification runs: each target produces a list of records, and a run passes
//! iff every record does.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::empirical::chi_bound_check;
use crate::error::{Error, Result};
use crate::profile::{integral_identity_check, BudgetProfile, OPTIMAL_MU};
use crate::record::VerificationRecord;
use crate::sphere::{
    certify_below_one_sphere, h_s2_closed_form_complex, h_s2_direct, remainder_curve,
    REMAINDER_LIMIT,
};
use crate::torus::{
    certify_below_one_torus, conservative_envelope, conservative_threshold, envelope_crossing,
    hankel_hhat, optimistic_envelope, optimistic_threshold, poisson_remainder,
    strip_inequality_check, tail_chain_check, STRIP_ALPHA, STRIP_B,
};
use crate::LT_CONSTANT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Sphere,
    Torus,
    Profile,
    All,
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(Target::Sphere),
            "torus" => Ok(Target::Torus),
            "profile" => Ok(Target::Profile),
            "all" => Ok(Target::All),
            _ => Err(Error::InvalidParameter(format!("unknown target {s:?}"))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Sphere => "sphere",
            Target::Torus => "torus",
            Target::Profile => "profile",
            Target::All => "all",
        })
    }
}

/// Everything a run produced, in a form that survives a JSON round trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub target: Target,
    pub config: RunConfig,
    pub records: Vec<VerificationRecord>,
    pub all_pass: bool,
}

impl Report {
    pub fn new(target: Target, config: RunConfig, records: Vec<VerificationRecord>) -> Self {
        let all_pass = records.iter().all(|r| r.pass);
        Report {
            target,
            config,
            records,
            all_pass,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerificationRecord> {
        self.records.iter().filter(|r| !r.pass)
    }
}

pub fn run(target: Target, config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let mut records = Vec::new();
    if matches!(target, Target::Sphere | Target::All) {
        records.extend(sphere_records(config)?);
    }
    if matches!(target, Target::Torus | Target::All) {
        records.extend(torus_records(config)?);
    }
    if matches!(target, Target::Profile | Target::All) {
        records.extend(profile_records()?);
    }
    Ok(Report::new(target, config.clone(), records))
}

/// `n` points spaced evenly in `log a` on `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn sphere_records(config: &RunConfig) -> Result<Vec<VerificationRecord>> {
    let a_max = config.a_max_sphere;
    let certificate = certify_below_one_sphere(a_max, config.step)?;

    let edge = h_s2_direct(a_max, 1e-15)?;
    let edge_margin = 1.0 - edge.value - edge.tail_bound;
    let edge_record = VerificationRecord::above(
        "sphere_right_edge_margin",
        "1 − H_S2(a_max) >= 8/(3π a_max) − 1e-3",
        edge_margin,
        8.0 / (3.0 * PI * a_max) - 1e-3,
    );

    let mut worst = 0.0f64;
    let mut worst_imag = 0.0f64;
    for a in log_spaced(0.1, 100.0, 20) {
        let closed = h_s2_closed_form_complex(a)?;
        let direct = h_s2_direct(a, config.tol.min(1e-12))?;
        worst = worst.max((closed.re - direct.value).abs());
        worst_imag = worst_imag.max(closed.im.abs());
    }
    let closed_form = VerificationRecord::below(
        "sphere_closed_form_agreement",
        "digamma closed form equals the series",
        worst,
        1e-10,
    )
    .note("20 log-spaced a in [0.1, 100]")
    .note(format!("largest imaginary residue {worst_imag:.3e}"));

    let remainder = remainder_curve(&[100.0])?[0].1;
    let remainder_record = VerificationRecord::within(
        "sphere_remainder_a100",
        "(H_S2(a) − 1 + 8/(3πa))·a³ → −64/(315π)",
        remainder,
        REMAINDER_LIMIT,
        5e-3,
    )
    .note("the curve is H − 1 + 8/(3πa); with H − 1 − 8/(3πa) it would grow like a²");

    let chi = chi_bound_check(&[0.1, 1.0, 5.0, 10.0, 20.0, 50.0, 100.0, 1000.0])?;
    Ok(vec![
        certificate,
        edge_record,
        closed_form,
        remainder_record,
        chi,
    ])
}

pub fn torus_records(config: &RunConfig) -> Result<Vec<VerificationRecord>> {
    let certificate = certify_below_one_torus(config.a_max_torus, config.step)?;

    let r20 = poisson_remainder(20.0)?;
    let r20_record =
        VerificationRecord::below("torus_remainder_a20", "|R(20)| is small", r20.r.abs(), 5e-3)
            .note(format!(
                "R(20) = {:.17e}, truncation <= {:.1e}",
                r20.r, r20.tail_bound
            ));

    let optimistic = VerificationRecord::within(
        "optimistic_threshold",
        "(64/π)e^(−π√a/4) = 1 at a = 14.73",
        envelope_crossing(optimistic_envelope),
        14.73,
        0.1,
    )
    .note(format!("closed form {:.12}", optimistic_threshold()));
    let conservative = VerificationRecord::within(
        "conservative_threshold",
        "(2^(3/2) b/α²)e^(−απ√a/2) = 1 at a = 273.8",
        envelope_crossing(conservative_envelope),
        273.8,
        0.5,
    )
    .note(format!("closed form {:.12}", conservative_threshold()));

    let mut min_margin = f64::INFINITY;
    let mut worst_ratio = 0.0f64;
    for i in 1..=120 {
        let xi = 0.5 * i as f64;
        let h = hankel_hhat(xi)?;
        let envelope = (-xi / 2.0).exp();
        min_margin = min_margin.min(envelope - h.abs());
        worst_ratio = worst_ratio.max(h.abs() / envelope);
    }
    let hhat = VerificationRecord::with_margin(
        "hhat_exponential_bound",
        "|ĥ(ξ)| < e^(−ξ/2)",
        worst_ratio,
        1.0,
        min_margin,
    )
    .note("ξ = 0.5, 1, ..., 60; computed is max |ĥ(ξ)|e^(ξ/2), margin is min e^(−ξ/2) − |ĥ(ξ)|");

    let strip = strip_inequality_check(STRIP_ALPHA, STRIP_B, 1e4)?;
    let chain = tail_chain_check(5.0)?;
    Ok(vec![
        certificate,
        r20_record,
        optimistic,
        conservative,
        hhat,
        strip,
        chain,
    ])
}

pub fn profile_records() -> Result<Vec<VerificationRecord>> {
    let profile = BudgetProfile::new(OPTIMAL_MU)?;
    let residual = VerificationRecord::below(
        "profile_normalization",
        "∫₀^∞ f(t)² dt = 1 at μ = π²/16",
        profile.normalization_residual().abs(),
        1e-12,
    )
    .note(format!(
        "quadrature residual {:.3e}",
        profile.normalization_residual_quadrature()?
    ));
    let objective = VerificationRecord::within(
        "profile_objective",
        "π ∫₀^∞ (1 − f)² t⁻² dt = π³/16",
        profile.objective_value_quadrature()?,
        PI.powi(3) / 16.0,
        1e-10,
    );
    let a = profile.induced_a();
    let six_a = VerificationRecord::within(
        "six_a",
        "6A = 3π/32",
        6.0 * a,
        LT_CONSTANT,
        4.0 * f64::EPSILON,
    )
    .note(format!("A = {a:.17e}"));
    let mut worst = 0.0f64;
    for rho in [1e-3, 0.1, 1.0, 7.5, 100.0] {
        worst = worst.max(integral_identity_check(rho, a)?.abs());
    }
    let identity = VerificationRecord::below(
        "positive_part_identity",
        "∫₀^∞ (√ρ − √(AE))₊² dE = ρ²/(6A)",
        worst,
        1e-10,
    )
    .note("relative deviation over ρ ∈ {1e-3, 0.1, 1, 7.5, 100}");
    Ok(vec![residual, objective, six_a, identity])
}
