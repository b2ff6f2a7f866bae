use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use persuasion_core::lab;
use persuasion_core::report::{BenchRow, BenchmarkReport, Bracket};
use persuasion_core::{
    q, Instance, LeakageModel, LeakagePattern, MixtureComponent, Rational, ReceiverSet, SignalingScheme,
    UtilityFunction,
};

fn variants(rng: &mut ChaCha8Rng, n: usize) -> Vec<UtilityFunction> {
    let prefix = {
        let mut w = vec![Rational::zero()];
        for j in 1..=n {
            w.push(&w[j - 1] + Rational::from_int(j as i64 % 3));
        }
        UtilityFunction::prefix(w).unwrap()
    };
    let additive = UtilityFunction::additive((0..n).map(|i| q(i as i64, 2)).collect()).unwrap();
    let mut out =
        vec![prefix, additive, lab::random_xos(rng, n, 3).unwrap(), lab::random_concave(rng, n).unwrap()];
    if n <= 8 {
        out.push(lab::random_monotone(rng, n).unwrap());
        out.push(lab::random_supermodular(rng, n).unwrap());
    }
    out
}

#[test]
fn every_variant_is_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [1, 2, 5, 10] {
        for v in variants(&mut rng, n) {
            let table = v.materialize().unwrap();
            assert_eq!(table[0], Rational::zero(), "{} at empty set", v.kind());
            for s in 0..1usize << n {
                // enough to check single-element growth
                for i in 0..n {
                    let t = s | 1 << i;
                    assert!(table[s] <= table[t], "{} not monotone at n={n}", v.kind());
                }
            }
        }
    }
}

#[test]
fn structured_variants_match_their_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [3, 7, 10] {
        let xos = lab::random_xos(&mut rng, n, 4).unwrap();
        let concave = lab::random_concave(&mut rng, n).unwrap();
        for v in [xos, concave] {
            let table = UtilityFunction::table(n, v.materialize().unwrap()).unwrap();
            for m in 0..1u64 << n {
                let s = ReceiverSet(m);
                assert_eq!(v.value(s), table.value(s));
            }
        }
    }
    let clauses = vec![vec![q(1, 1), q(0, 1), q(2, 1)], vec![q(0, 1), q(3, 1), q(0, 1)]];
    let xos = UtilityFunction::xos(clauses).unwrap();
    assert_eq!(xos.value(ReceiverSet::from_indices([0, 2])), q(3, 1));
    assert_eq!(xos.value(ReceiverSet::from_indices([1])), q(3, 1));
    assert_eq!(xos.value(ReceiverSet::full(3)), q(3, 1));
}

#[test]
fn unsorted_theta_is_named() {
    let text = r#"{"n":2,"lambda":"1/2","theta":["1/4","1/2"],
        "utility":{"kind":"additive","weights":["1","1"]}}"#;
    let err = serde_json::from_str::<Instance>(text).unwrap_err().to_string();
    assert!(err.contains("theta not sorted descending"), "{err}");
}

#[test]
fn sparse_point_mass() {
    let s = SignalingScheme::from_sets(
        3,
        vec![(ReceiverSet::EMPTY, Rational::one())],
        vec![(ReceiverSet::full(3), Rational::one())],
    )
    .unwrap();
    let v = serde_json::to_value(&s).unwrap();
    assert_eq!(v["mu1"].as_object().unwrap().len(), 1);
    assert_eq!(v["mu1"]["111"], "1");
}

fn rational() -> impl Strategy<Value = Rational> {
    (-1_000_000i64..1_000_000, 1i64..1_000_000).prop_map(|(p, d)| Rational::new(p, d))
}

fn probability_vector(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(0i64..20, len).prop_map(|w| {
        let total: i64 = w.iter().sum::<i64>() + 1;
        let mut out: Vec<Rational> = w.iter().map(|&x| Rational::new(x, total)).collect();
        out[0] = &out[0] + Rational::new(1, total);
        out
    })
}

fn instance() -> impl Strategy<Value = Instance> {
    (1usize..=5, 1i64..97, any::<u64>()).prop_map(|(n, l, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let utility = match seed % 4 {
            0 => lab::random_monotone(&mut rng, n).unwrap(),
            1 => lab::random_xos(&mut rng, n, 2).unwrap(),
            2 => lab::random_concave(&mut rng, n).unwrap(),
            _ => UtilityFunction::additive(vec![q(1, 3); n]).unwrap(),
        };
        Instance::new(n, Rational::new(l, 97), lab::random_theta(&mut rng, n, 1009), utility).unwrap()
    })
}

fn scheme() -> impl Strategy<Value = SignalingScheme> {
    (1usize..=5).prop_flat_map(|n| {
        let size = 1usize << n;
        (probability_vector(size), probability_vector(size)).prop_map(move |(a, b)| {
            let sets = |p: Vec<Rational>| -> Vec<(ReceiverSet, Rational)> {
                p.into_iter().enumerate().map(|(m, w)| (ReceiverSet(m as u64), w)).collect()
            };
            SignalingScheme::from_sets(n, sets(a), sets(b)).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn rational_text_round_trip(r in rational()) {
        let text = serde_json::to_string(&r).unwrap();
        prop_assert_eq!(serde_json::from_str::<Rational>(&text).unwrap(), r.clone());
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
    }

    #[test]
    fn instance_round_trip(inst in instance()) {
        let text = serde_json::to_string(&inst).unwrap();
        let back: Instance = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(back.hash(), inst.hash());
    }

    #[test]
    fn scheme_round_trip(s in scheme()) {
        let text = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<SignalingScheme>(&text).unwrap(), s);
    }

    #[test]
    fn model_round_trip(k in 1usize..4, edges in prop::collection::vec((0usize..4, 0usize..4), 0..6)) {
        let edges: Vec<_> = edges
            .into_iter()
            .filter(|(a, b)| a != b)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let pattern = LeakagePattern::from_edges(4, &edges).unwrap();
        let models = vec![
            LeakageModel::KStar { k },
            LeakageModel::KClique { k },
            LeakageModel::KBroadcast { k },
            LeakageModel::KErdosRenyi { k },
            LeakageModel::Fixed { pattern: pattern.clone() },
            LeakageModel::Mixture {
                components: vec![
                    MixtureComponent { weight: q(1, 3), pattern: pattern.clone() },
                    MixtureComponent { weight: q(2, 3), pattern: LeakagePattern::empty(4) },
                ],
            },
        ];
        for m in models {
            let text = serde_json::to_string(&m).unwrap();
            prop_assert_eq!(serde_json::from_str::<LeakageModel>(&text).unwrap(), m);
        }
    }

    #[test]
    fn report_round_trip(lo in rational(), gap in 0i64..50, seed in any::<u64>()) {
        let hi = &lo + Rational::new(gap, 7);
        let row = BenchRow {
            instance_id: "x".into(),
            n: 3,
            k: 1,
            model: "kstar:1".into(),
            opt_private: hi.clone(),
            opt_persuasive_k: lo.clone(),
            opt_public: lo.clone(),
            opt_expected: Bracket::new(lo.clone(), hi.clone()),
            powr_k: Bracket::Exact(q(3, 2)),
            podr: Bracket::new(q(1, 1), q(2, 1)),
            method: "exact".into(),
            seed,
        };
        let report = BenchmarkReport {
            version: "0.1.0".into(),
            instance_hash: "abc".into(),
            seed,
            samples: 10,
            rows: vec![row],
        };
        let text = serde_json::to_string(&report).unwrap();
        prop_assert_eq!(serde_json::from_str::<BenchmarkReport>(&text).unwrap(), report);
    }
}
