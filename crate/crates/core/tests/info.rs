use std::collections::BTreeMap;

use hmp_core::classical::presets::{
    constant_protocol, edge_parity_protocol, guess_protocol, random_protocol, verbatim_protocol,
};
use hmp_core::classical::{derandomize_senders, OneWayProtocol};
use hmp_core::families::{cyclic_family, projective_plane_family};
use hmp_core::info::{
    averaged_conditional_entropy, bound_e_a, check_information_facts, conditional_entropy, entropy,
    extract_ab, information_accounting, markov_bound_check, markov_random_checks,
    mutual_information, random_joint, superadditivity_terms, AccountingMode, EmpiricalDistribution,
};
use hmp_core::{seed, Bits, Construction, HmpError, MatchingFamily};

fn two_matchings() -> MatchingFamily {
    MatchingFamily::new(
        4,
        vec![vec![(1, 2), (3, 4)], vec![(1, 3), (2, 4)]],
        None,
        Construction::ExplicitFile,
    )
    .unwrap()
}

#[test]
fn parity_of_three_fair_bits() {
    let mut probs = Vec::new();
    for y in 0..8u64 {
        let bits: Vec<u64> = (0..3).map(|i| (y >> i) & 1).collect();
        let x = bits.iter().sum::<u64>() % 2;
        probs.push(([vec![x], bits].concat(), 0.125));
    }
    let d = EmpiricalDistribution::new(probs).unwrap();
    let (whole, parts) = superadditivity_terms(&d).unwrap();
    assert!((whole - 1.0).abs() < 1e-12);
    assert!(parts.abs() < 1e-12);
}

#[test]
fn conditioning_on_a_constant() {
    let mut rng = seed::rng(5);
    for _ in 0..50 {
        let d = random_joint(&mut rng, 64);
        let flat =
            EmpiricalDistribution::new(d.support().map(|(o, p)| (vec![o[0], o[1], 7], p))).unwrap();
        let a = mutual_information(&flat, &[0], &[1], &[2]).unwrap();
        let b = mutual_information(&flat, &[0], &[1], &[]).unwrap();
        assert!((a - b).abs() < 1e-9);
        let h = conditional_entropy(&d, &[0], &[1]).unwrap();
        assert!((h - averaged_conditional_entropy(&d, &[0], &[1]).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn random_identity_sweep() {
    let mut rng = seed::rng(11);
    let report = check_information_facts(&[], 1000, &mut rng).unwrap();
    assert_eq!(report.joints_checked, 1000);
    assert_eq!(report.superadditivity_checked, 1000);
    assert!(report.passed(), "{report:?}");
}

#[test]
fn supplied_joints_are_checked() {
    let copy = EmpiricalDistribution::new([(vec![0, 0], 0.5), (vec![1, 1], 0.5)]).unwrap();
    let mut rng = seed::rng(0);
    let report = check_information_facts(&[copy], 0, &mut rng).unwrap();
    assert_eq!(report.joints_checked, 1);
    assert!(report.passed());
    let single = EmpiricalDistribution::new([(vec![0], 1.0)]).unwrap();
    assert!(check_information_facts(&[single], 0, &mut rng).is_err());
}

#[test]
fn markov_examples() {
    let r = markov_bound_check(&[3.0; 10], 1.5, 3.0).unwrap();
    assert_eq!(r.tail, 1.0);
    assert!(r.holds);
    let r = markov_bound_check(&[0.0, 2.0], 1.0, 2.0).unwrap();
    assert_eq!(r.tail, 0.5);
    assert!(r.lower_bound.abs() < 1e-15);
    assert!(r.holds);
    assert!(matches!(
        markov_bound_check(&[2.5], 1.0, 2.0),
        Err(HmpError::InvalidInput(_))
    ));
    assert!(matches!(
        markov_bound_check(&[-0.1], 0.0, 2.0),
        Err(HmpError::InvalidInput(_))
    ));
    assert!(matches!(
        markov_bound_check(&[1.0], 2.0, 2.0),
        Err(HmpError::InvalidInput(_))
    ));
}

#[test]
fn markov_on_random_samples() {
    use rand::Rng;
    let mut rng = seed::rng(3);
    let beta = 5.0;
    let samples: Vec<f64> = (0..1000).map(|_| rng.gen_range(0.0..=beta)).collect();
    for _ in 0..100 {
        let alpha = rng.gen_range(0.0..beta);
        assert!(markov_bound_check(&samples, alpha, beta).unwrap().holds);
    }
    assert_eq!(markov_random_checks(10_000, &mut rng).violations, 0);
}

#[test]
fn single_matching_runs_once() {
    let f = MatchingFamily::new(
        4,
        vec![vec![(1, 2), (3, 4)]],
        None,
        Construction::ExplicitFile,
    )
    .unwrap();
    let p = edge_parity_protocol(&f, 2).unwrap();
    let rec = extract_ab(&p, &f, &"1100".parse().unwrap(), &mut seed::rng(0)).unwrap();
    assert_eq!(rec.s, 1);
    assert_eq!(rec.a, vec![(1, 2)]);
    assert_eq!(rec.b, "0".parse().unwrap());
}

#[test]
fn hand_traced_two_matchings() {
    // Step 1 takes (1,2) from m1. Both edges of m2 then touch the support in
    // one endpoint, so m2 is still eligible and contributes (1,3). Afterwards
    // (1,2) and (1,3) are fully covered and the loop halts.
    let f = two_matchings();
    let p = edge_parity_protocol(&f, 2).unwrap();
    for c in Bits::all(4) {
        let rec = extract_ab(&p, &f, &c, &mut seed::rng(0)).unwrap();
        assert_eq!(rec.s, 2);
        assert_eq!(rec.a, vec![(1, 2), (1, 3)]);
        let expected = Bits::new(vec![c.get(0) ^ c.get(1), c.get(0) ^ c.get(2)]);
        assert_eq!(rec.b, expected);
        assert_eq!(
            rec.support.iter().copied().collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
        assert_eq!(rec.bundle_bits, 2);
        assert!(rec.correctness(&c).iter().all(|&ok| ok));
    }
}

#[test]
fn extraction_invariants() {
    let families = [
        cyclic_family(8).unwrap(),
        projective_plane_family(2).unwrap(),
        two_matchings(),
    ];
    for f in &families {
        for k in 2..=3 {
            let p = match random_protocol(f, k, 2, 4) {
                Ok(p) => p,
                Err(HmpError::Refused { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let mut rng = seed::rng(9);
            for value in [0u64, 1, 5, 77, 200] {
                let c = Bits::from_u64(value % (1 << f.n()), f.n());
                let rec = extract_ab(&p, f, &c, &mut rng).unwrap();
                assert_eq!(rec.a.len(), rec.s);
                assert_eq!(rec.b.len(), rec.s);
                assert!(rec.support.len() <= 2 * rec.s);
                let endpoints: std::collections::BTreeSet<usize> =
                    rec.a.iter().flat_map(|&(u, v)| [u, v]).collect();
                assert_eq!(endpoints, rec.support);
                for (&e, &j) in rec.a.iter().zip(&rec.queried) {
                    assert!(f.matching(j).contains(&e));
                }
                assert!(rec.s + rec.discarded.len() >= 1);
            }
        }
    }
}

#[test]
fn extraction_preconditions() {
    let f = two_matchings();
    let p = edge_parity_protocol(&f, 2).unwrap();
    let other = cyclic_family(6).unwrap();
    assert!(matches!(
        extract_ab(&p, &other, &Bits::zeros(6), &mut seed::rng(0)),
        Err(HmpError::InvalidInput(_))
    ));
    assert!(matches!(
        extract_ab(&p, &f, &Bits::zeros(6), &mut seed::rng(0)),
        Err(HmpError::InvalidInput(_))
    ));
}

#[test]
fn randomized_decoders_can_be_extracted() {
    let f = two_matchings();
    let p = derandomize_senders(&guess_protocol(&f, 2).unwrap()).unwrap();
    let mut rng = seed::rng(1);
    let mut seen = BTreeMap::new();
    for _ in 0..200 {
        let rec = extract_ab(&p, &f, &Bits::zeros(4), &mut rng).unwrap();
        assert_eq!(rec.s, 2);
        *seen.entry(rec.b.to_u64()).or_insert(0) += 1;
    }
    assert_eq!(seen.len(), 4);
}

#[test]
fn constant_messages_carry_nothing() {
    let f = cyclic_family(6).unwrap();
    let p = constant_protocol(&f, 2, 3).unwrap();
    let exact = information_accounting(&p, &f, AccountingMode::Exact).unwrap();
    assert!(exact.i_ab_c.abs() < 1e-12);
    assert!(exact.h_w.abs() < 1e-12);
    assert_eq!(exact.bundle_bits, 3);
    assert!(exact.e0_holds);
    let sampled = information_accounting(
        &p,
        &f,
        AccountingMode::Sampled {
            samples: 100_000,
            seed: 1,
        },
    )
    .unwrap();
    assert!(sampled.i_ab_c.abs() < 0.02);
}

#[test]
fn verbatim_answers_are_all_correct() {
    for k in 2..=3 {
        let f = cyclic_family(6).unwrap();
        let p = verbatim_protocol(&f, k).unwrap();
        let r = information_accounting(&p, &f, AccountingMode::Exact).unwrap();
        assert!(r.success_rates.iter().all(|&x| x == 1.0));
        assert_eq!(r.margin, 0.5);
        assert_eq!(r.epsilon, 1.0);
        assert_eq!(r.xi, 1.0 / 64.0);
        assert_eq!(r.bundle_bits, 6 << (k - 2));
        assert!(r.e0_holds);
        assert!((r.i_w_c - 6.0).abs() < 1e-9);
    }
}

/// Since `(A, B)` is a function of `c`, `I(AB; C) = H(AB)`; count directly.
#[test]
fn exact_mode_matches_enumeration() {
    let f = two_matchings();
    let p = edge_parity_protocol(&f, 2).unwrap();
    let report = information_accounting(&p, &f, AccountingMode::Exact).unwrap();
    let mut counts: BTreeMap<(Vec<(usize, usize)>, Bits), usize> = BTreeMap::new();
    for c in Bits::all(4) {
        let rec = extract_ab(&p, &f, &c, &mut seed::rng(0)).unwrap();
        *counts.entry((rec.a, rec.b)).or_insert(0) += 1;
    }
    let h: f64 = counts
        .values()
        .map(|&n| n as f64 / 16.0)
        .map(|q| -q * q.log2())
        .sum();
    assert!((report.i_ab_c - h).abs() < 1e-12);
    assert!((report.i_ab_c - 2.0).abs() < 1e-12);
    assert_eq!(report.evaluated, 16);
    assert_eq!((report.s_min, report.s_max), (2, 2));

    // A sampled run over many draws approaches the exhaustive value.
    let sampled = information_accounting(
        &p,
        &f,
        AccountingMode::Sampled {
            samples: 100_000,
            seed: 3,
        },
    )
    .unwrap();
    assert!((sampled.i_ab_c - report.i_ab_c).abs() < 0.01);
}

#[test]
fn sampled_estimates_converge() {
    // n = 8: the plug-in bias is about (|AB| - 1)(2^8 - 1) / (2N ln 2), well
    // below 0.05 bits for the supports seen here.
    let f = cyclic_family(8).unwrap();
    for s in 0..3 {
        let p = random_protocol(&f, 2, 2, s).unwrap();
        let exact = information_accounting(&p, &f, AccountingMode::Exact).unwrap();
        let sampled = information_accounting(
            &p,
            &f,
            AccountingMode::Sampled {
                samples: 100_000,
                seed: s,
            },
        )
        .unwrap();
        assert!(
            (exact.i_ab_c - sampled.i_ab_c).abs() < 0.05,
            "{} vs {}",
            exact.i_ab_c,
            sampled.i_ab_c
        );
    }
}

#[test]
fn e0_on_random_protocols() {
    let f = cyclic_family(6).unwrap();
    for s in 0..20 {
        for k in 2..=3 {
            let p = random_protocol(&f, k, 1 + (s as usize % 3), s).unwrap();
            let r = information_accounting(&p, &f, AccountingMode::Exact).unwrap();
            assert!(r.e0_holds, "{r:?}");
            assert!(r.i_ab_c <= r.bundle_bits as f64 + 1e-9);
        }
    }
}

#[test]
fn accounting_limits() {
    let f = cyclic_family(14).unwrap();
    let p = constant_protocol(&f, 2, 1).unwrap();
    assert!(matches!(
        information_accounting(&p, &f, AccountingMode::Exact),
        Err(HmpError::Refused { .. })
    ));
    let small = two_matchings();
    let g: OneWayProtocol = derandomize_senders(&guess_protocol(&small, 2).unwrap()).unwrap();
    assert!(matches!(
        information_accounting(&g, &small, AccountingMode::Exact),
        Err(HmpError::InvalidInput(_))
    ));
    assert!(information_accounting(
        &g,
        &small,
        AccountingMode::Sampled {
            samples: 1000,
            seed: 0
        }
    )
    .is_ok());
}

#[test]
fn step_bound_values() {
    assert!((bound_e_a(1, 1) - 1.0 / 360.0).abs() < 1e-15);
    let t: f64 = 1024.0;
    assert!((bound_e_a(1024, 2) - t.powf(0.8) / 720.0).abs() < 1e-12);
}

#[test]
fn accounting_report_round_trips() {
    let f = two_matchings();
    let p = edge_parity_protocol(&f, 2).unwrap();
    let r = information_accounting(
        &p,
        &f,
        AccountingMode::Sampled {
            samples: 50,
            seed: 8,
        },
    )
    .unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back = serde_json::from_str(&text).unwrap();
    assert_eq!(r, back);
    let _ = entropy(&EmpiricalDistribution::new([(vec![1], 1.0)]).unwrap());
}
