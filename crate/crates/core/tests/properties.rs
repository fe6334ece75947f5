use std::f64::consts::PI;

use ltcert::config::RunConfig;
use ltcert::empirical::{lt_ratio, DensityField};
use ltcert::harmonics::{build_family, eval_ylm, FamilySpec, OrthonormalFamily, ScalarHarmonic};
use ltcert::profile::integral_identity_check;
use ltcert::specfun::{polygamma, Complex64, Polygamma};
use ltcert::sphere::{h_s2_closed_form, h_s2_direct};
use ltcert::torus::{build_shells, h_t2_direct};
use ltcert::verify::{Report, Target};
use ltcert::VerificationRecord;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_orthogonal(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(n);
    while q.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        // two passes of Gram–Schmidt keep the columns orthogonal to rounding
        for _ in 0..2 {
            for u in &q {
                let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            q.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    q
}

fn families() -> Vec<OrthonormalFamily> {
    [
        FamilySpec::SphereScalar { n: 3 },
        FamilySpec::SphereMixed { n: 2 },
        FamilySpec::SphereW { n: 3 },
        FamilySpec::unit_torus(),
    ]
    .iter()
    .map(|s| build_family(s).unwrap())
    .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn record_pass_iff_positive_margin(computed in -10.0f64..10.0, bound in -10.0f64..10.0) {
        let r = VerificationRecord::below("p", "p", computed, bound);
        prop_assert_eq!(r.pass, r.margin > 0.0);
        let r = r.require("aux", computed);
        prop_assert_eq!(r.pass, r.margin > 0.0);
    }

    #[test]
    fn digamma_recurrence(re in -20.0f64..20.0, im in 0.05f64..20.0) {
        let z = Complex64::new(re, im);
        let a = polygamma(Polygamma::Digamma, z + 1.0).unwrap();
        let b = polygamma(Polygamma::Digamma, z).unwrap() + 1.0 / z;
        prop_assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()));
        let c = polygamma(Polygamma::Digamma, z.conj()).unwrap();
        prop_assert!((c - polygamma(Polygamma::Digamma, z).unwrap().conj()).norm() < 1e-13 * (1.0 + c.norm()));
    }

    #[test]
    fn closed_form_matches_direct(a in 0.1f64..200.0) {
        let closed = h_s2_closed_form(a).unwrap().value;
        let direct = h_s2_direct(a, 1e-13).unwrap().value;
        prop_assert!((closed - direct).abs() < 1e-10);
    }

    #[test]
    fn sphere_series_in_unit_interval(log_a in -3.0f64..4.0) {
        let a = 10f64.powf(log_a);
        let h = h_s2_direct(a, 1e-14).unwrap();
        prop_assert!(h.value > 0.0 && h.value + h.tail_bound < 1.0);
    }

    #[test]
    fn torus_series_below_one(a in 0.01f64..60.0) {
        let h = h_t2_direct(a, 1e-12).unwrap();
        prop_assert!(h.value > 0.0 && h.value + h.tail_bound < 1.0);
    }

    #[test]
    fn positive_part_identity(rho in 1e-4f64..1e3, a in 1e-3f64..10.0) {
        prop_assert!(integral_identity_check(rho, a).unwrap().abs() < 1e-10);
    }

    #[test]
    fn addition_theorem(n in 0usize..=20, z in -0.999f64..0.999, phi in 0.0f64..(2.0 * PI)) {
        let s: f64 = ScalarHarmonic::degree(n).map(|h| eval_ylm(h, z.acos(), phi).powi(2)).sum();
        prop_assert!((s - (2 * n + 1) as f64 / (4.0 * PI)).abs() < 1e-10);
    }

    #[test]
    fn shells_have_fourfold_symmetry(m in 1u64..20_000) {
        let t = build_shells(m).unwrap();
        prop_assert_eq!(t.r2(m) % 4, 0);
    }

    #[test]
    fn csv_digits_round_trip(x in proptest::num::f64::NORMAL) {
        let s = format!("{x:.16e}");
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn report_json_round_trip(computed in proptest::num::f64::NORMAL, bound in -1e3f64..1e3, note in "[a-z ]{0,12}") {
        let record = VerificationRecord::below("r", "r < b", computed, bound).note(note);
        let report = Report::new(Target::All, RunConfig::default(), vec![record]);
        let text = serde_json::to_string(&report).unwrap();
        prop_assert_eq!(serde_json::from_str::<Report>(&text).unwrap(), report);
    }

    #[test]
    fn config_round_trip(a in 1.0f64..500.0, step in 1e-3f64..0.5, n in 2usize..40, alpha in 0.01f64..1.0) {
        let cfg = RunConfig { a_max_sphere: a, a_max_torus: a, step, n_max: n, alpha, ..RunConfig::default() };
        prop_assert_eq!(RunConfig::from_text(&cfg.to_text()).unwrap(), cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mixing_leaves_density_unchanged(seed in any::<u64>()) {
        for family in families() {
            let base = DensityField::of(&family).unwrap();
            let mixed = family.mixed(random_orthogonal(family.count(), seed)).unwrap();
            let rotated = DensityField::of(&mixed).unwrap();
            for (x, y) in base.values.iter().zip(&rotated.values) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            let a = lt_ratio(&family).unwrap();
            let b = lt_ratio(&mixed).unwrap();
            prop_assert!((a.ratio - b.ratio).abs() < 1e-12);
            prop_assert!((a.dirichlet_sum - b.dirichlet_sum).abs() < 1e-12 * a.dirichlet_sum);
        }
    }
}
