use super::*;
use crate::rational_class::sample_star;

fn fixture(name: &str) -> ExtremalFraction {
    let f = default_fixtures().into_iter().find(|f| f.name == name).unwrap();
    build_extremal(&f.system, &f.poles).unwrap()
}

#[test]
fn extremal_fraction_attains_the_profile() {
    for f in default_fixtures() {
        let ef = build_extremal(&f.system, &f.poles).unwrap();
        let s = check_sharpness(&ef, 401).unwrap();
        assert!(s.pointwise.pass, "{}: {:?}", f.name, s);
        assert!(s.zero_gap <= 1e-8 && s.outside_gap <= 1e-8, "{}: {:?}", f.name, s);

        let m = RationalFraction::from_extremal(&ef);
        let b = check_bernstein(&m, &ef, 401, EQUALITY_TOL).unwrap();
        assert!(b.max_violation.abs() <= 1e-8, "{}: {}", f.name, b.max_violation);
        let k = check_markov(&m, &ef, EQUALITY_TOL).unwrap();
        assert!(k.max_violation.abs() <= 1e-8, "{}: {}", f.name, k.max_violation);
    }
}

#[test]
fn sampled_fractions_respect_all_bounds() {
    for name in ["symmetric-polynomial", "symmetric-real-pairs"] {
        let ef = fixture(name);
        for seed in 1..=5 {
            let r = sample_star(&ef, 0.05, seed).unwrap();
            for report in [
                check_pointwise(&r, &ef, 501, POINTWISE_TOL).unwrap(),
                check_markov(&r, &ef, POINTWISE_TOL).unwrap(),
                check_bernstein(&r, &ef, 501, POINTWISE_TOL).unwrap(),
            ] {
                assert!(report.pass, "{name} seed {seed}: {report:?}");
                assert_eq!(report.pass, report.max_violation <= report.tol);
            }
        }
    }
}

#[test]
fn vanishing_in_a_gap_leaves_the_star_class() {
    let system = IntervalSystem::new(vec![-1.0, -0.1, 0.1, 1.0]).unwrap();
    let ef = build_extremal(&system, &PoleConfiguration::at_infinity(4).unwrap()).unwrap();
    let t3 = RationalFraction::from_polynomial(vec![4.0, 0.0, -3.0, 0.0], ef.poles().clone()).unwrap();
    assert!(matches!(
        check_pointwise(&t3, &ef, 101, POINTWISE_TOL),
        Err(Error::NotInStarClass { .. })
    ));
}

#[test]
fn unnormalized_input_is_rejected_and_near_unit_is_rescaled() {
    let ef = fixture("symmetric-polynomial");
    let m = RationalFraction::from_extremal(&ef);
    assert!(matches!(
        check_pointwise(&m.scaled(1.5), &ef, 101, POINTWISE_TOL),
        Err(Error::NotNormalized { .. })
    ));
    let near = check_pointwise(&m.scaled(1.0 + 1e-9), &ef, 101, POINTWISE_TOL).unwrap();
    assert!(near.max_violation.abs() <= 1e-8);
}

#[test]
fn sign_flip_leaves_violation_unchanged() {
    let ef = fixture("symmetric-real-pairs");
    let r = sample_star(&ef, 0.05, 7).unwrap();
    let a = check_pointwise(&r, &ef, 301, POINTWISE_TOL).unwrap();
    let b = check_pointwise(&r.scaled(-1.0), &ef, 301, POINTWISE_TOL).unwrap();
    assert_eq!(a.max_violation, b.max_violation);
    assert_eq!(a.violation_point, b.violation_point);
}

#[test]
fn complex_poles_are_flagged_exploratory() {
    let system = IntervalSystem::new(vec![-1.0, -0.5, 0.5, 1.0]).unwrap();
    let poles: PoleConfiguration = "2i,-2i,inf,inf".parse().unwrap();
    let ef = build_extremal(&system, &poles).unwrap();
    let m = RationalFraction::from_extremal(&ef);
    let report = check_markov(&m, &ef, POINTWISE_TOL).unwrap();
    assert!(report.exploratory && report.pass);
}

#[test]
fn remark_m4_counterexample() {
    let report = reproduce_remark_m4(&[0.1, 0.3]).unwrap();
    assert!(report.pass);
    let row = &report.rows[0];
    assert!((row.t3_prime - 2.88).abs() < 1e-12);
    assert!((row.m4_prime - 1.6 / 0.99).abs() < 1e-12);
    assert!(row.t3_exceeds && !report.rows[1].t3_exceeds);
    let (lo, hi) = report.crossover;
    assert!(0.16 < lo && hi < 0.17);
    assert!(reproduce_remark_m4(&[1.0]).is_err());
}

#[test]
fn rusak_remark_values() {
    let report = reproduce_rusak_remark();
    assert!((report.r_prime_at_1 - 639.0 / 10201.0).abs() < 1e-12);
    assert!((report.m2_prime_at_1 - 404.0 / 10201.0).abs() < 1e-12);
    assert!((report.r_norm - 0.798).abs() < 1e-3);
    assert!((report.m2_prime_norm_argmax - 1.0 / 300f64.sqrt()).abs() < 1e-6);
    assert!((report.m2_prime_norm - 13.1).abs() < 0.05);
    assert!(report.pass);
}

#[test]
fn corollary_reproduction() {
    let report = reproduce_corollary(0.5, 1.0, 4).unwrap();
    assert!(report.pass, "{report:?}");
    assert!((report.markov_constant - 64.0 / 3.0).abs() < 64.0 / 3.0 * 1e-8);
    assert!(reproduce_corollary(0.5, 1.0, 3).is_err());
}

#[test]
fn batch_is_ordered_and_deterministic() {
    let config = BatchConfig {
        samples: 3,
        grid: 201,
        ..BatchConfig::default()
    };
    let a = batch_verify(&config).unwrap();
    let b = batch_verify(&config).unwrap();
    assert_eq!(a.len(), 12);
    assert_eq!(a, b);
    let claims: Vec<_> = a.iter().take(4).map(|r| r.claim.as_str()).collect();
    assert_eq!(claims, ["sharpness", "pointwise", "markov", "bernstein"]);
    assert!(a.iter().all(|r| r.pass), "{a:?}");
    assert!(a[1..4].iter().all(|r| r.n_samples == 3));
    let text = |v: &[VerificationReport]| {
        serde_json::to_string(&v.iter().map(VerificationReport::to_json).collect::<Vec<_>>()).unwrap()
    };
    assert_eq!(text(&a), text(&b));
}

#[test]
fn batch_edge_cases() {
    let empty = BatchConfig {
        fixtures: vec![],
        ..BatchConfig::default()
    };
    assert!(batch_verify(&empty).unwrap().is_empty());

    let starved = BatchConfig {
        samples: 2,
        budget: 0,
        ..BatchConfig::default()
    };
    assert!(matches!(
        batch_verify(&starved),
        Err(Error::SamplingExhausted { .. })
    ));
}
