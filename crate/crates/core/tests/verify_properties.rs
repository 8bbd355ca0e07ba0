use detvol_core::families::{pretzel_det, Family, FamilySpec};
use detvol_core::hypvol::{constants, montesinos_bound, two_pi_log};
use detvol_core::verify::{
    check, check_with, dihedral_arrangements, high_twist_threshold, pretzel_tier,
    stoimenow_certificate, sweep, write_csv, HyperbolicStatus, SweepPattern, ThresholdRule,
    Verdict, VerifyConfig,
};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn threshold_inequality_replays() {
    let k = constants();
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..200 {
        let t = rng.gen_range(1..=12u32);
        let th = high_twist_threshold(t, ThresholdRule::General).unwrap();
        let c = th.c_threshold.value.ceil().max(t as f64) as u64 + rng.gen_range(0..10_000u64);
        let lhs = 10.0 * k.v4.value * (t - 1) as f64;
        let rhs = std::f64::consts::TAU
            * (2.0 * k.gamma.value.powi(t as i32 - 1) + (c - u64::from(t)) as f64).ln();
        assert!(lhs <= rhs + 1e-9, "t={t} c={c}");
    }
}

#[test]
fn certificate_from_threshold_onwards() {
    for rule in [ThresholdRule::General, ThresholdRule::Montesinos] {
        for t in 1..=9u32 {
            let th = high_twist_threshold(t, rule).unwrap().c_threshold.value;
            let start = th.ceil().max(t as f64) as u64;
            for c in start..start + 50 {
                assert!(stoimenow_certificate(t, c, rule).unwrap(), "{rule:?} t={t} c={c}");
            }
            if th.ceil() as u64 > u64::from(t) + 1 {
                let below = th.ceil() as u64 - 2;
                assert!(!stoimenow_certificate(t, below, rule).unwrap(), "{rule:?} t={t} c={below}");
            }
        }
    }
    let t13 = high_twist_threshold(13, ThresholdRule::Montesinos).unwrap();
    let k = constants();
    let direct = 13.0 + k.zeta.value.powi(13) - 2.0 * k.gamma.value.powi(12);
    assert!((t13.c_threshold.value - direct).abs() < 1e-6 * direct);
}

#[test]
fn frontier_certified_tuples_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for t in 3..=5u32 {
        let tier = pretzel_tier(t).unwrap();
        assert!(!tier.frontier.is_empty());
        for _ in 0..20 {
            let base = &tier.frontier[rng.gen_range(0..tier.frontier.len())];
            let mut a: Vec<u32> = base.iter().map(|&x| x + rng.gen_range(0..3)).collect();
            // Random cyclic arrangement.
            for i in (1..a.len()).rev() {
                a.swap(i, rng.gen_range(0..=i));
            }
            let r = check(&FamilySpec::Pretzel(a.clone())).unwrap();
            assert_eq!(r.verdict, Verdict::Holds, "P{a:?}");
            let bound = montesinos_bound(t).unwrap().value;
            assert!(two_pi_log(&pretzel_det(&a).unwrap()).value > bound);
        }
    }
}

#[test]
fn tier_partition_is_exact() {
    // Brute force over a box: a sorted tuple fails the Montesinos comparison
    // exactly when it is in the downset, and passes exactly when it dominates
    // a frontier element.
    let t = 3u32;
    let tier = pretzel_tier(t).unwrap();
    let bound = montesinos_bound(t).unwrap().value;
    for a in 1..=60u32 {
        for b in a..=60 {
            for c in b..=60 {
                let tuple = vec![a, b, c];
                let passes = two_pi_log(&pretzel_det(&tuple).unwrap()).value > bound;
                assert_eq!(!passes, tier.downset.contains(&tuple), "{tuple:?}");
                let dominated = tier
                    .frontier
                    .iter()
                    .any(|f| f.iter().zip(&tuple).all(|(x, y)| x <= y));
                assert_eq!(passes, dominated, "{tuple:?}");
            }
        }
    }
}

#[test]
fn arrangement_counts_match_burnside() {
    // Bracelets of t distinct beads: (t-1)!/2 for t >= 3.
    for t in 3..=7u32 {
        let beads: Vec<u32> = (1..=t).collect();
        let expected: usize = (1..t as usize).product::<usize>() / 2;
        assert_eq!(dihedral_arrangements(&beads).len(), expected);
    }
    assert_eq!(dihedral_arrangements(&[2, 2, 2, 2]).len(), 1);
}

#[test]
fn swept_determinants_respect_twist_lower_bound() {
    let outcome = sweep(
        &SweepPattern {
            families: vec![Family::TwoBridge, Family::ThreeBraid, Family::Pretzel],
            sum_max: 11,
            max_crossings: None,
        },
        &VerifyConfig::default(),
    )
    .unwrap();
    let gamma = constants().gamma.value;
    for r in outcome
        .reports
        .iter()
        .filter(|r| r.hyperbolic_status == HyperbolicStatus::AssumedHyperbolic)
    {
        let lower = 2.0 * gamma.powi(r.t as i32 - 1);
        assert!(r.det.to_f64().unwrap() >= lower - 1e-9, "{}", r.spec);
    }
}

#[test]
fn report_invariants() {
    let outcome = sweep(
        &SweepPattern {
            families: vec![Family::TwoBridge, Family::ThreeBraid, Family::Pretzel, Family::Weaving],
            sum_max: 9,
            max_crossings: None,
        },
        &VerifyConfig::default(),
    )
    .unwrap();
    for r in &outcome.reports {
        for (_, v) in &r.bounds {
            assert!(r.best_bound.value <= v.value, "{}", r.spec);
        }
        assert!((r.margin.value - (r.two_pi_log_det.value - r.best_bound.value)).abs() < 1e-9);
        let expected = match r.hyperbolic_status {
            HyperbolicStatus::KnownNonhyperbolic => Verdict::Vacuous,
            _ if r.margin.value > 0.0 => Verdict::Holds,
            _ => Verdict::BoundInconclusive,
        };
        assert_eq!(r.verdict, expected, "{}", r.spec);
        assert_eq!(r.oracle_checked, r.c <= 40);
        assert_eq!(r.spec.to_string().parse::<FamilySpec>().unwrap(), r.spec);
    }
}

#[test]
fn sweep_respects_crossing_cap_and_workers() {
    let pattern = SweepPattern {
        families: vec![Family::Pretzel],
        sum_max: 8,
        max_crossings: Some(6),
    };
    let one = sweep(&pattern, &VerifyConfig { oracle_cap: 40, workers: 1 }).unwrap();
    let four = sweep(&pattern, &VerifyConfig { oracle_cap: 40, workers: 4 }).unwrap();
    assert!(one.reports.iter().all(|r| r.c <= 6));
    assert!(one.skipped.iter().all(|(s, _)| s.crossing_count() > 6));
    assert!(!one.skipped.is_empty());
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_csv(&one.reports, &mut a).unwrap();
    write_csv(&four.reports, &mut b).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with(
        "spec,family,t,c,det,two_pi_log_det,adams_exact,adams_log,lackenby,montesinos,best_bound,margin,hyperbolic_status,verdict\n"
    ));
}

#[test]
fn oracle_cap_zero_skips_matrix_tree() {
    let s: FamilySpec = "R(3,3,2)".parse().unwrap();
    let r = check_with(&s, &VerifyConfig { oracle_cap: 0, workers: 0 }).unwrap();
    assert!(!r.oracle_checked);
    assert_eq!(r.det.to_u64(), Some(23));
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(check(&FamilySpec::TwoBridge(vec![])).is_err());
    assert!(check(&FamilySpec::Pretzel(vec![2, 0, 3])).is_err());
    assert!(check(&FamilySpec::Weaving(0)).is_err());
}
