use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use persuasion_core::construct::{
    mask_remove, mask_remove_window, optimal_private, subsample_half, subsample_rate,
};
use persuasion_core::downstream::{
    bruteforce_optimal_responses, downstream_utility_fixed, downstream_utility_model, no_leak_utility,
    prefix_adoption_probabilities, Estimate, Method, SearchMode,
};
use persuasion_core::lab;
use persuasion_core::lp::{self, build_persuasive_lp, scheme_from_solution, Objective};
use persuasion_core::response::best_response;
use persuasion_core::{
    k_subsets, q, sample_pattern, Alphabet, BestResponseMode, Instance, LeakageModel, LeakagePattern,
    Observation, Rational, ReceiverSet, SignalingScheme, UtilityFunction,
};

fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    let utility = if rng.gen_bool(0.5) {
        lab::random_supermodular(rng, n).unwrap()
    } else {
        lab::random_monotone(rng, n).unwrap()
    };
    Instance::new(n, lab::random_lambda(rng, 8), lab::random_theta(rng, n, 8), utility).unwrap()
}

fn exact(inst: &Instance, s: &SignalingScheme, model: &LeakageModel) -> Rational {
    downstream_utility_model(inst, s, model, Method::Exact, BestResponseMode::Standard)
        .unwrap()
        .point()
        .clone()
}

fn in_degrees(g: &LeakagePattern) -> Vec<usize> {
    (0..g.n()).map(|i| g.sources(i).len()).collect()
}

#[test]
fn persuasive_schemes_keep_their_no_leak_utility() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for _ in 0..30 {
        let n = rng.gen_range(2..=4);
        let inst = random_instance(&mut rng, n);
        let k = rng.gen_range(1..n);
        let base = optimal_private(&inst).to_scheme();
        let sol = lp::solve(&build_persuasive_lp(&inst, k, Objective::Full).unwrap()).unwrap();
        let schemes = [
            subsample_half(&inst, &base, k).unwrap(),
            subsample_rate(&inst, &base, k, &Rational::new(1, k as i64)).unwrap(),
            scheme_from_solution(n, &sol.assignment).unwrap(),
        ];
        let models = [
            LeakageModel::KStar { k },
            LeakageModel::KBroadcast { k },
            LeakageModel::KClique { k: k + 1 },
            LeakageModel::KErdosRenyi { k },
        ];
        for s in &schemes {
            let quiet = no_leak_utility(&inst, s, BestResponseMode::Standard).unwrap();
            // indifferent receivers told 0 adopt under the tie rule, and a
            // leak can take that back; the recommended adopters always stay
            let obedient = s.obedient_utility(&inst);
            assert!(quiet >= obedient);
            for m in &models {
                assert!(m.max_in_degree(n) <= k);
                let v = exact(&inst, s, m);
                assert!(v >= obedient, "{}: {v} < {obedient}", m.label());
                if quiet == obedient {
                    assert!(v >= quiet);
                }
            }
        }
    }
}

#[test]
fn samples_are_pure_functions_of_seed_and_index() {
    let models = [
        LeakageModel::KStar { k: 2 },
        LeakageModel::KClique { k: 3 },
        LeakageModel::KBroadcast { k: 2 },
        LeakageModel::KErdosRenyi { k: 1 },
    ];
    for m in &models {
        let forward: Vec<_> = (0..200).map(|i| sample_pattern(m, 6, 99, i).unwrap()).collect();
        let backward: Vec<_> = (0..200).rev().map(|i| sample_pattern(m, 6, 99, i).unwrap()).collect();
        assert!(forward.iter().eq(backward.iter().rev()));
        let other: Vec<_> = (0..200).map(|i| sample_pattern(m, 6, 100, i).unwrap()).collect();
        assert_ne!(forward, other);
    }
}

#[test]
fn sampled_shapes_follow_the_model() {
    let n = 7;
    for k in 1..=3 {
        for i in 0..10_000 {
            let b = sample_pattern(&LeakageModel::KBroadcast { k }, n, 5, i).unwrap();
            // leakers are exactly the receivers with in-degree k-1
            let deg = in_degrees(&b);
            let leakers: Vec<usize> = (0..n).filter(|&r| deg[r] == k - 1).collect();
            assert_eq!(leakers.len(), k);
            for r in 0..n {
                let expect = ReceiverSet::from_indices(leakers.iter().copied().filter(|&l| l != r));
                assert_eq!(b.sources(r), expect);
            }

            let s = sample_pattern(&LeakageModel::KStar { k }, n, 5, i).unwrap();
            let deg = in_degrees(&s);
            let positive: Vec<usize> = deg.iter().copied().filter(|&d| d > 0).collect();
            assert_eq!(positive, vec![k]);

            let e = sample_pattern(&LeakageModel::KErdosRenyi { k }, n, 5, i).unwrap();
            assert!(in_degrees(&e).iter().all(|&d| d == k));
        }
    }
    let clique = LeakageModel::KClique { k: n };
    let support = clique.support(n).unwrap();
    assert_eq!(support.len(), 1);
    assert_eq!(support[0].0, Rational::one());
    assert!(in_degrees(&support[0].1).iter().all(|&d| d == n - 1));
}

#[test]
fn broadcast_leakers_are_uniform() {
    let n = 5;
    let k = 2;
    let draws = 20_000u64;
    let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    for i in 0..draws {
        let g = sample_pattern(&LeakageModel::KBroadcast { k }, n, 17, i).unwrap();
        let deg = in_degrees(&g);
        let leakers = (0..n).filter(|&r| deg[r] == k - 1).collect();
        *counts.entry(leakers).or_insert(0) += 1;
    }
    assert_eq!(counts.len(), k_subsets(n, k).len());
    let p = 1.0 / counts.len() as f64;
    let sigma = (p * (1.0 - p) / draws as f64).sqrt();
    for (set, c) in counts {
        let freq = c as f64 / draws as f64;
        assert!((freq - p).abs() < 4.0 * sigma, "{set:?}: {freq}");
    }
}

#[test]
fn search_modes_agree_on_small_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let patterns = [
        LeakagePattern::empty(2),
        LeakagePattern::from_edges(2, &[(0, 1)]).unwrap(),
        LeakagePattern::from_edges(2, &[(1, 0)]).unwrap(),
        LeakagePattern::cycle(2),
    ];
    for _ in 0..6 {
        let inst = random_instance(&mut rng, 2);
        for g in &patterns {
            let alphabets = vec![Alphabet::binary(), Alphabet::binary()];
            let a = bruteforce_optimal_responses(&inst, alphabets.clone(), g, SearchMode::PerInformationSet)
                .unwrap();
            let b = bruteforce_optimal_responses(&inst, alphabets, g, SearchMode::PerProfile).unwrap();
            assert_eq!(a.value, b.value);
            // the witness really earns the value under best responses
            let v = downstream_utility_fixed(&inst, &a.scheme, g, BestResponseMode::Standard).unwrap();
            assert!(v >= a.value);
        }
    }
}

/// Direct replay of the sampling procedure behind `subsample_rate`.
fn draw_subsample(rng: &mut ChaCha8Rng, base: &[(ReceiverSet, f64)], k: usize, gamma: f64) -> ReceiverSet {
    let mut u = rng.gen::<f64>();
    let mut set = base.last().unwrap().0;
    for (s, p) in base {
        if u < *p {
            set = *s;
            break;
        }
        u -= p;
    }
    if rng.gen::<f64>() >= (1.0 - gamma).powi(k as i32) {
        return ReceiverSet::EMPTY;
    }
    ReceiverSet::from_indices(set.iter().filter(|_| rng.gen::<f64>() < gamma))
}

#[test]
fn subsample_rate_matches_its_sampling_procedure() {
    let inst = lab::hard_supermodular(4).unwrap();
    let base = optimal_private(&inst).to_scheme();
    let base_f: Vec<(ReceiverSet, f64)> =
        base.mu0().iter().map(|(p, w)| (SignalingScheme::recommended(p), w.to_f64())).collect();
    for (k, gamma) in [(1, q(1, 2)), (2, q(1, 3))] {
        let scheme = subsample_rate(&inst, &base, k, &gamma).unwrap();
        let draws = 1_000_000u64;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = vec![0u64; 16];
        for _ in 0..draws {
            counts[draw_subsample(&mut rng, &base_f, k, gamma.to_f64()).0 as usize] += 1;
        }
        let mut tv = 0.0;
        let mut sigma = 0.0;
        for m in 0..16u64 {
            let p = scheme.prob(0, &persuasion_core::set_to_profile(ReceiverSet(m), 4)).to_f64();
            tv += (counts[m as usize] as f64 / draws as f64 - p).abs() / 2.0;
            sigma += (p * (1.0 - p) / draws as f64).sqrt() / 2.0;
        }
        assert!(tv < 3.0 * sigma, "k={k}: tv {tv} vs sigma {sigma}");
    }
}

#[test]
fn masked_window_adopts_without_leakers_inside() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for n in 2..=6 {
        let inst = random_instance(&mut rng, n);
        for k in 1..=n / 2 {
            for i in 1..=n {
                let scheme = mask_remove(&inst, i, k).unwrap().to_scheme();
                let (lo, hi) = mask_remove_window(n, i, k);
                let window = ReceiverSet::from_indices(lo - 1..hi);
                for leakers in k_subsets(n, k) {
                    let l = ReceiverSet::from_indices(leakers.iter().copied());
                    if !l.intersection(window).is_empty() {
                        continue;
                    }
                    for j in lo..=hi {
                        let realized = ReceiverSet::prefix(j);
                        for a in realized.iter() {
                            let leaked = l
                                .iter()
                                .filter(|&x| x != a)
                                .map(|x| (x, realized.contains(x) as u8))
                                .collect();
                            let obs = Observation::new(a, 1, leaked).unwrap();
                            assert!(
                                best_response(&inst, &scheme, &obs, BestResponseMode::Standard).unwrap(),
                                "n={n} k={k} i={i} j={j} receiver {a}"
                            );
                        }
                    }
                }
                // so each window prefix fully adopts at least as often as the leakers miss the window
                let probs =
                    prefix_adoption_probabilities(&inst, &scheme, &LeakageModel::KBroadcast { k }).unwrap();
                let miss = Rational::binomial((n - (hi - lo + 1)) as u64, k as u64)
                    / Rational::binomial(n as u64, k as u64);
                for j in lo..=hi {
                    assert!(probs[j - 1] >= miss, "n={n} k={k} i={i} j={j}");
                }
            }
        }
    }
}

#[test]
fn monte_carlo_tracks_exact_on_kstar() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..5 {
        let n = rng.gen_range(3..=5);
        let inst = random_instance(&mut rng, n);
        let s = optimal_private(&inst).to_scheme();
        let model = LeakageModel::KStar { k: 2 };
        let truth = exact(&inst, &s, &model);
        let est = downstream_utility_model(
            &inst,
            &s,
            &model,
            Method::MonteCarlo { samples: 100_000, seed: 3 },
            BestResponseMode::Standard,
        )
        .unwrap();
        let Estimate::MonteCarlo { mean, stderr, .. } = est else { panic!("expected a sampled estimate") };
        let gap = (mean.to_f64() - truth.to_f64()).abs();
        assert!(gap <= 4.0 * stderr + 1e-12, "{gap} vs {stderr}");
    }
}

#[test]
fn zero_utility_everywhere_is_zero() {
    let inst = Instance::new(
        3,
        q(1, 2),
        vec![q(1, 2); 3],
        UtilityFunction::additive(vec![Rational::zero(); 3]).unwrap(),
    )
    .unwrap();
    let s = optimal_private(&inst).to_scheme();
    assert_eq!(exact(&inst, &s, &LeakageModel::KBroadcast { k: 2 }), Rational::zero());
}

#[test]
fn mask_match_keeps_prefixes_under_a_three_star() {
    use persuasion_core::construct::{mask_match, MaskMatchParams};
    let n = 20;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let params = MaskMatchParams::halves(n, &q(2, 5));
    assert_eq!(params.m, 9);
    let hard = lab::hard_supermodular(n).unwrap();
    let mut theta = lab::random_theta(&mut rng, n, 8);
    while theta[params.m - 1].is_zero() {
        theta = lab::random_theta(&mut rng, n, 8);
    }
    let shuffled = Instance::new(n, q(1, 3), theta, hard.utility().clone()).unwrap();
    for inst in [hard, shuffled] {
        let scheme = mask_match(&inst, &params).unwrap().to_scheme();
        let probs = prefix_adoption_probabilities(&inst, &scheme, &LeakageModel::KStar { k: 3 }).unwrap();
        for (j, p) in probs.iter().enumerate() {
            assert!(*p >= q(3, 25), "j={} p={p}", j + 1);
        }
    }
}
