//! End-to-end acceptance criteria, one line each.

use std::f64::consts::PI;
use std::process::ExitCode;

use ltcert::empirical::{
    elongated_closed_form, elongated_ratio, lt_ratio, periodic_lift_check, pipeline_consistency,
    semiclassical_sequence, sphere_scalar_ratio,
};
use ltcert::harmonics::{
    build_family, FamilySpec, LegendreTable, ScalarHarmonic, VectorEigenfield, VectorKind,
    POLE_GUARD,
};
use ltcert::profile::{BudgetProfile, OPTIMAL_MU};
use ltcert::sphere::{certify_below_one_sphere, h_s2_direct, remainder_curve, REMAINDER_LIMIT};
use ltcert::torus::{
    certify_below_one_torus, conservative_envelope, envelope_crossing, hankel_hhat,
    optimistic_envelope, poisson_remainder, strip_inequality_check, STRIP_ALPHA, STRIP_B,
};
use ltcert::verify::{log_spaced, sphere_records};
use ltcert::{config::RunConfig, Result, LT_CONSTANT, SEMICLASSICAL_BOUND};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String)>;

fn sphere_certificate() -> Outcome {
    let r = certify_below_one_sphere(40.0, 0.01)?;
    let edge = h_s2_direct(40.0, 1e-15)?;
    let edge_margin = 1.0 - edge.value - edge.tail_bound;
    let need = 8.0 / (3.0 * PI * 40.0) - 1e-3;
    Ok((
        r.pass && edge_margin >= need,
        format!(
            "max H = {:.12}, edge margin {edge_margin:.6e} >= {need:.6e}",
            r.computed
        ),
    ))
}

fn closed_form() -> Outcome {
    let r = sphere_records(&RunConfig::default())?
        .into_iter()
        .find(|r| r.name == "sphere_closed_form_agreement")
        .expect("record present");
    let n = log_spaced(0.1, 100.0, 20).len();
    Ok((
        r.pass && n == 20,
        format!("max |closed − direct| = {:.3e}", r.computed),
    ))
}

fn remainder() -> Outcome {
    let r = remainder_curve(&[100.0])?[0].1;
    let gap = (r - REMAINDER_LIMIT).abs();
    Ok((
        gap <= 5e-3,
        format!("remainder(100) = {r:.8}, limit {REMAINDER_LIMIT:.8}"),
    ))
}

fn torus_certificate() -> Outcome {
    let cert = certify_below_one_torus(50.0, 0.01)?;
    let r20 = poisson_remainder(20.0)?.r;
    let opt = envelope_crossing(optimistic_envelope);
    let cons = envelope_crossing(conservative_envelope);
    let ok =
        cert.pass && r20.abs() < 5e-3 && (opt - 14.73).abs() <= 0.1 && (cons - 273.8).abs() <= 0.5;
    Ok((
        ok,
        format!(
            "max H = {:.12}, R(20) = {r20:.4e}, crossings {opt:.4} and {cons:.3}",
            cert.computed
        ),
    ))
}

fn hhat_bound() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut at = 0.0;
    for i in 1..=120 {
        let xi = 0.5 * i as f64;
        let m = (-xi / 2.0).exp() - hankel_hhat(xi)?.abs();
        if m < worst {
            worst = m;
            at = xi;
        }
    }
    Ok((
        worst > 0.0,
        format!("smallest margin {worst:.3e} at ξ = {at}"),
    ))
}

fn strip() -> Outcome {
    let r = strip_inequality_check(STRIP_ALPHA, STRIP_B, 1e4)?;
    Ok((
        r.pass,
        format!(
            "min P = {:.6e}, certified lower bound {:.3e}",
            r.computed, r.margin
        ),
    ))
}

fn addition_theorems() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_scalar = 0.0f64;
    let mut worst_vector = 0.0f64;
    for _ in 0..100 {
        let theta = rng.gen_range(-1.0f64..1.0).acos();
        let phi = rng.gen_range(0.0..2.0 * PI);
        let table = LegendreTable::with_derivatives(20, theta, POLE_GUARD)?;
        for n in 0..=20 {
            let target = (2 * n + 1) as f64 / (4.0 * PI);
            let s: f64 = ScalarHarmonic::degree(n)
                .map(|h| table.ylm(h, phi).powi(2))
                .sum();
            worst_scalar = worst_scalar.max((s - target).abs());
            if (1..=10).contains(&n) {
                for kind in [VectorKind::W, VectorKind::V] {
                    let v: f64 = ScalarHarmonic::degree(n)
                        .map(|harmonic| {
                            let f = table.field(VectorEigenfield { kind, harmonic }, phi);
                            f[0] * f[0] + f[1] * f[1]
                        })
                        .sum();
                    worst_vector = worst_vector.max((v - target).abs());
                }
            }
        }
    }
    Ok((
        worst_scalar <= 1e-10 && worst_vector <= 1e-10,
        format!("scalar {worst_scalar:.2e}, vector {worst_vector:.2e}"),
    ))
}

fn semiclassical() -> Outcome {
    let seq = semiclassical_sequence(20)?;
    let mut ok = true;
    let mut worst = 0.0f64;
    for (i, p) in seq.iter().enumerate() {
        let dev = (p.ratio - sphere_scalar_ratio(p.n)).abs();
        worst = worst.max(dev);
        ok &= dev <= 1e-10 && p.ratio < LT_CONSTANT;
        ok &= SEMICLASSICAL_BOUND - p.ratio <= 1.0 / (2.0 * PI * (p.n * p.n) as f64) + 1e-12;
        if i > 0 {
            ok &= p.ratio > seq[i - 1].ratio;
        }
    }
    let last = seq.last().expect("non-empty");
    Ok((
        ok,
        format!(
            "N = 2..20, worst deviation {worst:.2e}, ratio(20) = {:.10}",
            last.ratio
        ),
    ))
}

fn profile() -> Outcome {
    let p = BudgetProfile::new(OPTIMAL_MU)?;
    let residual = p
        .normalization_residual()
        .abs()
        .max(p.normalization_residual_quadrature()?.abs());
    let objective = p.objective_value_quadrature()?;
    let six_a = 6.0 * p.induced_a();
    let ok =
        residual <= 1e-12 && (objective - PI.powi(3) / 16.0).abs() <= 1e-10 && six_a == LT_CONSTANT;
    Ok((
        ok,
        format!("residual {residual:.2e}, objective {objective:.15}, 6A = {six_a:.17}"),
    ))
}

fn pipeline() -> Outcome {
    let family = build_family(&FamilySpec::SphereScalar { n: 3 })?;
    let r = pipeline_consistency(&family, &[1.0, 5.0, 20.0])?;
    Ok((
        r.pass,
        format!("smallest pointwise slack {:.3e}", r.computed),
    ))
}

fn elongated() -> Outcome {
    let mut ok = true;
    let mut worst = 0.0f64;
    for alpha in [1.0, 0.5, 0.1, 0.01] {
        let r = elongated_ratio(alpha)?;
        let dev = (r.ratio - elongated_closed_form(alpha)).abs();
        worst = worst.max(dev);
        ok &= dev <= 1e-10 && r.ratio < LT_CONSTANT / alpha;
    }
    let family = build_family(&FamilySpec::Torus {
        modes: vec![[1, 0], [-1, 0], [0, 1], [0, -1]],
        alpha: 0.5,
    })?;
    let lift = periodic_lift_check(&family, 2)?;
    Ok((
        ok && lift.pass,
        format!(
            "worst deviation {worst:.2e}, lift gap {:.2e}",
            lift.computed
        ),
    ))
}

fn vector_families() -> Outcome {
    let mut ok = true;
    let mut worst_gap = 0.0f64;
    let mut mixed_max = 0.0f64;
    for n in 2..=6 {
        let scalar = lt_ratio(&build_family(&FamilySpec::SphereScalar { n })?)?;
        let w = lt_ratio(&build_family(&FamilySpec::SphereW { n })?)?;
        let v = lt_ratio(&build_family(&FamilySpec::SphereV { n })?)?;
        let mixed = lt_ratio(&build_family(&FamilySpec::SphereMixed { n })?)?;
        worst_gap = worst_gap.max((scalar.ratio - w.ratio).abs());
        mixed_max = mixed_max.max(mixed.ratio);
        ok &= w.ratio <= LT_CONSTANT && v.ratio <= LT_CONSTANT && mixed.ratio <= 2.0 * LT_CONSTANT;
    }
    Ok((
        ok && worst_gap <= 1e-10,
        format!(
            "scalar/w gap {worst_gap:.2e}, largest mixed ratio {mixed_max:.6} <= {:.6}",
            2.0 * LT_CONSTANT
        ),
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("sphere series below one on (0, 40]", sphere_certificate),
        ("closed form matches direct sum", closed_form),
        ("sphere remainder at a = 100", remainder),
        (
            "torus series below one and envelope thresholds",
            torus_certificate,
        ),
        ("exponential bound on the Hankel transform", hhat_bound),
        ("strip polynomial positive", strip),
        ("scalar and vector addition theorems", addition_theorems),
        ("semiclassical sequence", semiclassical),
        ("budget profile", profile),
        ("filtering pipeline", pipeline),
        ("elongated torus and periodic lift", elongated),
        ("vector families", vector_families),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(outcome) => outcome,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {title}: {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
