//! Expected downstream utility under leakage, exact and sampled, and the
//! brute-force search for optimal schemes under a fixed pattern.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{refuse_if, Error, Result};
use crate::lp::{self, BrLp, LpSolution, ResponseTable};
use crate::model::leakage::sample_pattern;
use crate::model::{
    Alphabet, Instance, LeakageModel, LeakagePattern, Observation, Profile, ReceiverSet, SignalingScheme,
};
use crate::par;
use crate::rational::Rational;
use crate::response::{check_inputs, decide, BestResponseMode};

/// Cap on the number of support profiles a downstream evaluation visits.
pub const DOWNSTREAM_MAX_SUPPORT: u128 = 1 << 22;
/// Cap on the LPs solved per brute-force search.
pub const PER_INFORMATION_SET_CAP: u128 = 1_000_000;
pub const PER_PROFILE_CAP: u128 = 100_000_000;
/// Elements scored per parallel batch of the brute force.
const BATCH: usize = 4096;

/// Precomputed leak-free decisions plus the weighted support of a scheme.
struct Evaluator<'a> {
    inst: &'a Instance,
    scheme: &'a SignalingScheme,
    mode: BestResponseMode,
    /// `private[i][s]`: decision of receiver `i` holding symbol `s` with no
    /// leaks.
    private: Vec<Vec<bool>>,
    /// `(profile, (1-lambda) mu0 + lambda mu1)` over the union of supports.
    support: Vec<(Profile, Rational)>,
}

impl<'a> Evaluator<'a> {
    fn new(inst: &'a Instance, scheme: &'a SignalingScheme, mode: BestResponseMode) -> Result<Self> {
        let n = inst.n();
        check_inputs(inst, scheme, &Observation::private(0, 0), mode)?;
        let entries = (scheme.mu0().len() + scheme.mu1().len()) as u128;
        refuse_if("downstream support profiles", entries, DOWNSTREAM_MAX_SUPPORT)?;
        let private = (0..n)
            .map(|i| {
                (0..scheme.alphabets()[i].len() as u8)
                    .map(|s| decide(inst, scheme, &Observation::private(i, s), mode).adopt)
                    .collect()
            })
            .collect();
        let w0 = Rational::one() - inst.lambda();
        let mut weights: BTreeMap<&Profile, Rational> = BTreeMap::new();
        for (p, v) in scheme.mu0() {
            *weights.entry(p).or_insert_with(Rational::zero) += &w0 * v;
        }
        for (p, v) in scheme.mu1() {
            *weights.entry(p).or_insert_with(Rational::zero) += inst.lambda() * v;
        }
        let support = weights.into_iter().map(|(p, w)| (p.clone(), w)).collect();
        Ok(Evaluator { inst, scheme, mode, private, support })
    }

    fn check_pattern(&self, pattern: &LeakagePattern) -> Result<()> {
        if pattern.n() != self.inst.n() {
            return Err(Error::Domain(format!(
                "pattern has {} receivers, instance has {}",
                pattern.n(),
                self.inst.n()
            )));
        }
        Ok(())
    }

    fn adopters(
        &self,
        pattern: &LeakagePattern,
        profile: &[u8],
        cache: &mut HashMap<Observation, bool>,
    ) -> ReceiverSet {
        let mut set = ReceiverSet::EMPTY;
        for i in 0..self.inst.n() {
            let sources = pattern.sources(i);
            let adopt = if sources.is_empty() {
                self.private[i][profile[i] as usize]
            } else {
                let obs = Observation {
                    receiver: i,
                    own: profile[i],
                    leaked: sources.iter().map(|j| (j, profile[j])).collect(),
                };
                *cache.entry(obs).or_insert_with_key(|o| decide(self.inst, self.scheme, o, self.mode).adopt)
            };
            if adopt {
                set = set.with(i);
            }
        }
        set
    }

    fn fixed(&self, pattern: &LeakagePattern) -> Rational {
        let mut cache = HashMap::new();
        self.support.iter().map(|(p, w)| w * self.inst.value(self.adopters(pattern, p, &mut cache))).sum()
    }

    fn expected(&self, support: Vec<(Rational, LeakagePattern)>) -> Rational {
        par::map(support, |(w, g)| w * self.fixed(&g)).into_iter().sum()
    }
}

/// Exact expected utility when every receiver best responds to what it
/// sees under `pattern`.
pub fn downstream_utility_fixed(
    inst: &Instance,
    scheme: &SignalingScheme,
    pattern: &LeakagePattern,
    mode: BestResponseMode,
) -> Result<Rational> {
    let ev = Evaluator::new(inst, scheme, mode)?;
    ev.check_pattern(pattern)?;
    Ok(ev.fixed(pattern))
}

/// Utility when no signal leaks.
pub fn no_leak_utility(
    inst: &Instance,
    scheme: &SignalingScheme,
    mode: BestResponseMode,
) -> Result<Rational> {
    downstream_utility_fixed(inst, scheme, &LeakagePattern::empty(inst.n()), mode)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Estimate {
    Exact {
        value: Rational,
    },
    MonteCarlo {
        /// Exact mean of the sampled values.
        mean: Rational,
        stderr: f64,
        samples: u64,
        seed: u64,
    },
}

impl Estimate {
    pub fn point(&self) -> &Rational {
        match self {
            Estimate::Exact { value } => value,
            Estimate::MonteCarlo { mean, .. } => mean,
        }
    }
}

pub fn downstream_utility_model(
    inst: &Instance,
    scheme: &SignalingScheme,
    model: &LeakageModel,
    method: Method,
    mode: BestResponseMode,
) -> Result<Estimate> {
    let n = inst.n();
    model.validate(n)?;
    let ev = Evaluator::new(inst, scheme, mode)?;
    match method {
        Method::Exact => Ok(Estimate::Exact { value: ev.expected(model.support(n)?) }),
        Method::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::Domain("monte carlo needs at least one sample".into()));
            }
            let counts = tally_patterns(model, n, samples, seed)?;
            let distinct: Vec<(u64, LeakagePattern)> = counts.into_iter().map(|(g, c)| (c, g)).collect();
            let values = par::map(distinct, |(c, g)| (c, ev.fixed(&g)));
            let total = Rational::from_int(samples as i64);
            let mean: Rational =
                values.iter().map(|(c, v)| Rational::from_int(*c as i64) * v).sum::<Rational>() / &total;
            let m = mean.to_f64();
            let ss: f64 = values.iter().map(|(c, v)| *c as f64 * (v.to_f64() - m).powi(2)).sum();
            let stderr = if samples > 1 { (ss / (samples - 1) as f64 / samples as f64).sqrt() } else { 0.0 };
            Ok(Estimate::MonteCarlo { mean, stderr, samples, seed })
        }
    }
}

/// How often each pattern appears among samples `0..samples`.
fn tally_patterns(
    model: &LeakageModel,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<BTreeMap<LeakagePattern, u64>> {
    let chunk = 8192u64;
    let starts: Vec<u64> = (0..samples.div_ceil(chunk)).map(|c| c * chunk).collect();
    let parts = par::map(starts, |start| -> Result<BTreeMap<LeakagePattern, u64>> {
        let mut local = BTreeMap::new();
        for idx in start..(start + chunk).min(samples) {
            *local.entry(sample_pattern(model, n, seed, idx)?).or_insert(0) += 1;
        }
        Ok(local)
    });
    let mut counts = BTreeMap::new();
    for part in parts {
        for (g, c) in part? {
            *counts.entry(g).or_insert(0) += c;
        }
    }
    Ok(counts)
}

/// For each prefix length `j >= 1`, the probability over the model that
/// every member of `[j]` adopts when the realized profile is `[j]`.
pub fn prefix_adoption_probabilities(
    inst: &Instance,
    scheme: &SignalingScheme,
    model: &LeakageModel,
) -> Result<Vec<Rational>> {
    let n = inst.n();
    scheme.require_binary("prefix adoption")?;
    let ev = Evaluator::new(inst, scheme, BestResponseMode::Standard)?;
    let support = model.support(n)?;
    let per = par::map(support, |(w, g)| {
        let mut cache = HashMap::new();
        (1..=n)
            .map(|j| {
                let set = ReceiverSet::prefix(j);
                let profile = crate::model::set_to_profile(set, n);
                if set.is_subset_of(ev.adopters(&g, &profile, &mut cache)) {
                    w.clone()
                } else {
                    Rational::zero()
                }
            })
            .collect::<Vec<_>>()
    });
    let mut out = vec![Rational::zero(); n];
    for row in per {
        for (acc, v) in out.iter_mut().zip(row) {
            *acc += v;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchMode {
    /// One action per reachable observation of each receiver.
    #[default]
    PerInformationSet,
    /// One action profile per signal profile.
    PerProfile,
}

#[derive(Clone, Debug)]
pub struct BruteForce {
    pub value: Rational,
    pub scheme: SignalingScheme,
    /// Best responses to `scheme` at every reachable observation.
    pub responses: ResponseTable,
    pub lps_solved: u64,
    pub pruned: u64,
    /// Enumeration index of the winning element.
    pub index: u128,
}

/// Enumerates response assignments, solves the response-constrained LP for
/// each, and keeps the best (lowest index on ties).
pub fn bruteforce_optimal_responses(
    inst: &Instance,
    alphabets: Vec<Alphabet>,
    pattern: &LeakagePattern,
    mode: SearchMode,
) -> Result<BruteForce> {
    let t = BrLp::new(inst, alphabets, pattern)?;
    let n = inst.n();
    let obs_counts: Vec<usize> = (0..n).map(|i| t.observations(i).len()).collect();
    let profiles = t.profiles().len();
    let total = match mode {
        SearchMode::PerInformationSet => obs_counts
            .iter()
            .try_fold(1u128, |acc, &c| 1u128.checked_shl(c as u32).and_then(|f| acc.checked_mul(f)))
            .unwrap_or(u128::MAX),
        SearchMode::PerProfile => {
            (0..profiles).try_fold(1u128, |acc, _| acc.checked_mul(1u128 << n)).unwrap_or(u128::MAX)
        }
    };
    let cap = match mode {
        SearchMode::PerInformationSet => PER_INFORMATION_SET_CAP,
        SearchMode::PerProfile => PER_PROFILE_CAP,
    };
    refuse_if("brute-force LP count", total, cap)?;

    let decode_info = |e: u128| -> Vec<Vec<bool>> {
        let mut rest = e;
        let mut out = vec![Vec::new(); n];
        for i in (0..n).rev() {
            let c = obs_counts[i];
            let mask = rest & ((1u128 << c) - 1);
            rest >>= c;
            out[i] = (0..c).map(|o| mask >> o & 1 == 1).collect();
        }
        out
    };
    let decode_profile = |e: u128| -> Vec<ReceiverSet> {
        let mut rest = e;
        let mut out = vec![ReceiverSet::EMPTY; profiles];
        for x in (0..profiles).rev() {
            out[x] = ReceiverSet((rest & ((1u128 << n) - 1)) as u64);
            rest >>= n;
        }
        out
    };
    let values: Vec<Rational> = (0..1u64 << n).map(|m| inst.value(ReceiverSet(m))).collect();

    let mut best: Option<(Rational, u128, LpSolution)> = None;
    let mut lps_solved = 0u64;
    let mut pruned = 0u64;
    let mut start = 0u128;
    while start < total {
        let end = (start + BATCH as u128).min(total);
        let floor = best.as_ref().map(|b| b.0.clone());
        let batch: Vec<u128> = (start..end).collect();
        let scored = par::map(batch, |e| -> Result<Option<Option<(Rational, u128, LpSolution)>>> {
            let (bound, program) = match mode {
                SearchMode::PerInformationSet => {
                    let actions = decode_info(e);
                    (t.upper_bound(&actions), t.lp_for(&actions))
                }
                SearchMode::PerProfile => {
                    let actions = decode_profile(e);
                    let bound = actions
                        .iter()
                        .map(|a| values[a.0 as usize].clone())
                        .max()
                        .unwrap_or_else(Rational::zero);
                    (bound, t.lp_for_profile_actions(&actions))
                }
            };
            if floor.as_ref().is_some_and(|f| bound <= *f) {
                return Ok(None);
            }
            let sol = lp::solve(&program)?;
            Ok(Some(sol.is_optimal().then(|| (sol.value.clone(), e, sol))))
        });
        for item in scored {
            match item? {
                None => pruned += 1,
                Some(outcome) => {
                    lps_solved += 1;
                    if let Some((v, e, sol)) = outcome {
                        if best.as_ref().is_none_or(|b| v > b.0) {
                            best = Some((v, e, sol));
                        }
                    }
                }
            }
        }
        start = end;
    }
    let (value, index, sol) =
        best.ok_or_else(|| Error::Internal("no feasible response assignment".into()))?;
    let scheme = t.scheme_from(&sol.assignment)?;
    let responses = best_responses(inst, &t, &scheme);
    Ok(BruteForce { value, scheme, responses, lps_solved, pruned, index })
}

fn best_responses(inst: &Instance, t: &BrLp<'_>, scheme: &SignalingScheme) -> ResponseTable {
    (0..inst.n())
        .flat_map(|i| t.observations(i).iter())
        .map(|o| (o.clone(), decide(inst, scheme, o, BestResponseMode::Standard).adopt))
        .collect()
}

/// The scheme's own best responses at every observation reachable under
/// `pattern`.
pub fn scheme_best_responses(
    inst: &Instance,
    scheme: &SignalingScheme,
    pattern: &LeakagePattern,
) -> Result<ResponseTable> {
    let t = BrLp::new(inst, scheme.alphabets().to_vec(), pattern)?;
    Ok(best_responses(inst, &t, scheme))
}

#[derive(Clone, Debug)]
pub struct ResponseCheck {
    pub value: Option<Rational>,
    pub scheme: Option<SignalingScheme>,
    /// Whether the candidate satisfies every response row and both
    /// normalizations, when a candidate was given.
    pub candidate_feasible: Option<bool>,
    pub candidate_objective: Option<Rational>,
}

/// Solves the single LP for prescribed responses and optionally tests a
/// candidate scheme against it.
pub fn verify_responses(
    inst: &Instance,
    alphabets: Vec<Alphabet>,
    pattern: &LeakagePattern,
    responses: &ResponseTable,
    candidate: Option<&SignalingScheme>,
) -> Result<ResponseCheck> {
    let t = BrLp::new(inst, alphabets, pattern)?;
    let actions = t.actions_from_table(responses)?;
    let program = t.lp_for(&actions);
    let sol = lp::solve(&program)?;
    let (value, scheme) = if sol.is_optimal() {
        (Some(sol.value.clone()), Some(t.scheme_from(&sol.assignment)?))
    } else {
        (None, None)
    };
    let (candidate_feasible, candidate_objective) = match candidate {
        Some(c) => {
            if c.alphabets() != t.alphabets() {
                return Err(Error::Domain("candidate alphabets differ".into()));
            }
            let x = t.assignment_of(c);
            let ok = program.constraints.iter().all(|row| match row.relation {
                lp::Relation::Le => row.lhs(&x) <= row.rhs,
                lp::Relation::Ge => row.lhs(&x) >= row.rhs,
                lp::Relation::Eq => row.lhs(&x) == row.rhs,
            });
            let obj: Rational = program.objective.iter().zip(&x).map(|(a, b)| a * b).sum();
            (Some(ok), Some(obj))
        }
        None => (None, None),
    };
    Ok(ResponseCheck { value, scheme, candidate_feasible, candidate_objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::appendix_c::appendix_c;
    use crate::rational::q;

    #[test]
    fn worked_example_schemes_under_the_cycle() {
        let c = appendix_c();
        let std = BestResponseMode::Standard;
        assert_eq!(downstream_utility_fixed(&c.instance, &c.three_signal, &c.cycle, std).unwrap(), q(9, 4));
        assert_eq!(
            downstream_utility_fixed(&c.instance, &c.best_two_signal, &c.cycle, std).unwrap(),
            q(17, 8)
        );
        let v = downstream_utility_model(
            &c.indirect_instance,
            &c.somewhat_indirect,
            &c.indirect_leakage,
            Method::Exact,
            std,
        )
        .unwrap();
        assert_eq!(v.point(), &q(7, 4));
    }

    #[test]
    fn two_signal_search() {
        let c = appendix_c();
        let bin = vec![Alphabet::binary(); 3];
        let r =
            bruteforce_optimal_responses(&c.instance, bin, &c.cycle, SearchMode::PerInformationSet).unwrap();
        assert_eq!(r.value, q(17, 8));
        let v =
            downstream_utility_fixed(&c.instance, &r.scheme, &c.cycle, BestResponseMode::Standard).unwrap();
        assert_eq!(v, q(17, 8));
    }

    #[test]
    fn single_receiver_search() {
        let inst = Instance::new(
            1,
            q(1, 3),
            vec![q(1, 2)],
            crate::model::UtilityFunction::additive(vec![q(2, 1)]).unwrap(),
        )
        .unwrap();
        let g = LeakagePattern::empty(1);
        let r =
            bruteforce_optimal_responses(&inst, vec![Alphabet::binary()], &g, SearchMode::PerInformationSet)
                .unwrap();
        // (lambda + (1 - lambda) theta) V({1})
        assert_eq!(r.value, (q(1, 3) + q(2, 3) * q(1, 2)) * q(2, 1));
        let p = bruteforce_optimal_responses(&inst, vec![Alphabet::binary()], &g, SearchMode::PerProfile)
            .unwrap();
        assert_eq!(p.value, r.value);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let c = appendix_c();
        let run = |seed| {
            downstream_utility_model(
                &c.indirect_instance,
                &c.somewhat_indirect,
                &c.indirect_leakage,
                Method::MonteCarlo { samples: 500, seed },
                BestResponseMode::Standard,
            )
            .unwrap()
        };
        assert_eq!(run(3), run(3));
        assert!(downstream_utility_model(
            &c.indirect_instance,
            &c.somewhat_indirect,
            &c.indirect_leakage,
            Method::MonteCarlo { samples: 0, seed: 0 },
            BestResponseMode::Standard,
        )
        .is_err());
    }
}
