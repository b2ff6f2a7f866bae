use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use persuasion_core::construct::{
    best_public_prefix, full_information, lp_private_base, optimal_private, public_prefix, subsample_half,
    subsample_rate,
};
use persuasion_core::lab;
use persuasion_core::lp::{self, build_persuasive_lp, scheme_from_solution, Objective};
use persuasion_core::persuasive::{
    check_k_worst_case, check_private, check_public, check_two_sided, worst_case_downstream,
};
use persuasion_core::response::{best_response, private_response};
use persuasion_core::{
    BestResponseMode, Instance, Observation, PrefixScheme, Rational, ReceiverSet, SignalingScheme,
    UtilityFunction,
};

fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    let utility = match rng.gen_range(0..3) {
        0 => lab::random_supermodular(rng, n).unwrap(),
        1 => lab::random_monotone(rng, n).unwrap(),
        _ => lab::random_concave(rng, n).unwrap(),
    };
    Instance::new(n, lab::random_lambda(rng, 8), lab::random_theta(rng, n, 8), utility).unwrap()
}

fn random_scheme(rng: &mut ChaCha8Rng, n: usize) -> SignalingScheme {
    let mut dist = || -> Vec<(ReceiverSet, Rational)> {
        let size = rng.gen_range(1..=5);
        let weights: Vec<i64> = (0..size).map(|_| rng.gen_range(1..=6)).collect();
        let total: i64 = weights.iter().sum();
        weights
            .into_iter()
            .map(|w| (ReceiverSet(rng.gen_range(0..1u64 << n)), Rational::new(w, total)))
            .collect()
    };
    let mu0 = dist();
    let mu1 = dist();
    SignalingScheme::from_sets(n, mu0, mu1).unwrap()
}

/// Random prefix scheme with masses on a small grid.
fn random_prefix(rng: &mut ChaCha8Rng, n: usize) -> SignalingScheme {
    let mut dist = || -> Vec<Rational> {
        let w: Vec<i64> = (0..=n).map(|_| rng.gen_range(0..=3)).collect();
        let total = w.iter().sum::<i64>().max(1);
        let mut out: Vec<Rational> = w.iter().map(|&x| Rational::new(x, total)).collect();
        if w.iter().all(|&x| x == 0) {
            out[n] = Rational::one();
        }
        out
    };
    let mu0 = dist();
    let mu1 = dist();
    PrefixScheme::new(mu0, mu1).unwrap().to_scheme()
}

fn lp_scheme(inst: &Instance, k: usize) -> SignalingScheme {
    let sol = lp::solve(&build_persuasive_lp(inst, k, Objective::Full).unwrap()).unwrap();
    scheme_from_solution(inst.n(), &sol.assignment).unwrap()
}

#[test]
fn empty_leaks_match_the_private_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut adopted = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=5);
        let inst = random_instance(&mut rng, n);
        let scheme = random_scheme(&mut rng, n);
        let i = rng.gen_range(0..n);
        let own = rng.gen_range(0..2u8);
        let obs = Observation::private(i, own);
        let a = best_response(&inst, &scheme, &obs, BestResponseMode::Standard).unwrap();
        assert_eq!(a, private_response(&inst, &scheme, i, own));
        adopted += a as usize;
    }
    // both actions show up
    assert!(adopted > 1000 && adopted < 9000, "{adopted}");
}

#[test]
fn smaller_index_leaks_carry_no_information_on_prefixes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let n = rng.gen_range(2..=6);
        let inst = random_instance(&mut rng, n);
        let scheme = random_prefix(&mut rng, n);
        for i in 1..n {
            let base = Observation::private(i, 1);
            let before = best_response(&inst, &scheme, &base, BestResponseMode::Standard).unwrap();
            for j in 0..i {
                let obs = Observation::new(i, 1, vec![(j, 1)]).unwrap();
                let after = best_response(&inst, &scheme, &obs, BestResponseMode::Standard).unwrap();
                assert_eq!(before, after, "receiver {i} leak from {j}");
            }
            // the full smaller-index block at once
            let obs = Observation::new(i, 1, (0..i).map(|j| (j, 1)).collect()).unwrap();
            assert_eq!(before, best_response(&inst, &scheme, &obs, BestResponseMode::Standard).unwrap());
        }
    }
}

#[test]
fn verdicts_nest_in_k() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut strict = 0;
    for _ in 0..150 {
        let n = rng.gen_range(2..=5);
        let inst = random_instance(&mut rng, n);
        let candidates = [
            random_scheme(&mut rng, n),
            random_prefix(&mut rng, n),
            optimal_private(&inst).to_scheme(),
            subsample_half(&inst, &optimal_private(&inst).to_scheme(), 1).unwrap(),
        ];
        for s in &candidates {
            let ok: Vec<bool> = (0..n).map(|k| check_k_worst_case(&inst, s, k).unwrap().is_ok()).collect();
            for k in 1..n {
                assert!(!ok[k] || ok[k - 1], "k={k} passes but k-1 fails");
            }
            strict += ok.windows(2).any(|w| w[0] && !w[1]) as usize;
        }
    }
    assert!(strict > 0);
}

#[test]
fn worst_case_utility_of_persuasive_schemes_is_obedient_utility() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..60 {
        let n = rng.gen_range(2..=4);
        let inst = random_instance(&mut rng, n);
        let k = rng.gen_range(1..n);
        let base = optimal_private(&inst).to_scheme();
        let schemes = [
            subsample_half(&inst, &base, k).unwrap(),
            subsample_rate(&inst, &base, k, &Rational::new(1, k as i64 + 1)).unwrap(),
            lp_scheme(&inst, k),
            full_information(&inst),
        ];
        for s in &schemes {
            assert!(check_k_worst_case(&inst, s, k).unwrap().is_ok());
            assert_eq!(worst_case_downstream(&inst, s, k).unwrap(), s.obedient_utility(&inst));
        }
        // the non-persuasive optimum can only lose
        let opt = worst_case_downstream(&inst, &base, k).unwrap();
        assert!(opt <= base.obedient_utility(&inst));
    }
}

#[test]
fn two_sided_forces_public_prefix_schemes() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut passing = 0;
    let mut tried = 0;
    while tried < 400 {
        let n = rng.gen_range(3..=4);
        let inst = random_instance(&mut rng, n);
        if inst.theta().windows(2).any(|w| w[0] <= w[1]) || inst.theta()[n - 1].is_zero() {
            continue;
        }
        tried += 1;
        let k = rng.gen_range(2..n);
        let mut candidates = vec![
            random_scheme(&mut rng, n),
            random_prefix(&mut rng, n),
            full_information(&inst),
            public_prefix(&inst, best_public_prefix(&inst)).unwrap(),
            lp_scheme(&inst, n - 1),
        ];
        // sparse schemes drawn among prefixes and near-prefixes
        for _ in 0..4 {
            let mut s = random_prefix(&mut rng, n);
            if rng.gen_bool(0.5) {
                let extra = ReceiverSet(rng.gen_range(0..1u64 << n));
                let mut mu1: Vec<_> = s
                    .mu1()
                    .iter()
                    .map(|(p, w)| (SignalingScheme::recommended(p), w / Rational::from_int(2)))
                    .collect();
                mu1.push((extra, Rational::new(1, 2)));
                let mu0: Vec<_> =
                    s.mu0().iter().map(|(p, w)| (SignalingScheme::recommended(p), w.clone())).collect();
                s = SignalingScheme::from_sets(n, mu0, mu1).unwrap();
            }
            candidates.push(s);
        }
        for s in &candidates {
            if !check_two_sided(&inst, s, k).unwrap().is_ok() {
                continue;
            }
            passing += 1;
            for state in 0..2 {
                for p in s.mu(state).keys() {
                    let set = SignalingScheme::recommended(p);
                    assert_eq!(set, ReceiverSet::prefix(set.len()), "{} not a prefix", set.to_bits(n));
                }
            }
            assert!(check_public(&inst, s).unwrap().is_ok());
        }
    }
    assert!(passing >= 20, "only {passing} schemes passed");
}

#[test]
fn verdicts_ignore_utility_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..80 {
        let n = rng.gen_range(2..=4);
        let inst = random_instance(&mut rng, n);
        let scale = Rational::new(rng.gen_range(1..=9), rng.gen_range(1..=9));
        let scaled_values = inst.utility().materialize().unwrap().into_iter().map(|v| v * &scale).collect();
        let scaled = inst.with_utility(UtilityFunction::table(n, scaled_values).unwrap()).unwrap();
        let schemes = [random_scheme(&mut rng, n), random_prefix(&mut rng, n), lp_scheme(&inst, 1)];
        for s in &schemes {
            assert_eq!(check_private(&inst, s).unwrap(), check_private(&scaled, s).unwrap());
            for k in 0..n {
                assert_eq!(
                    check_k_worst_case(&inst, s, k).unwrap(),
                    check_k_worst_case(&scaled, s, k).unwrap()
                );
                assert_eq!(check_two_sided(&inst, s, k).unwrap(), check_two_sided(&scaled, s, k).unwrap());
            }
        }
    }
}

#[test]
fn lp_private_base_is_private_optimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..20 {
        let n = rng.gen_range(1..=4);
        let inst = random_instance(&mut rng, n);
        let base = lp_private_base(&inst).unwrap();
        assert!(check_private(&inst, &base).unwrap().is_ok());
        let sol = lp::solve(&build_persuasive_lp(&inst, 0, Objective::Full).unwrap()).unwrap();
        assert_eq!(base.obedient_utility(&inst), sol.value);
    }
}
