use std::collections::BTreeMap;

use super::{LinearProgram, Relation};
use crate::error::{refuse_if, Error, Result};
use crate::model::set::{k_subsets, ReceiverSet};
use crate::model::{Alphabet, Instance, LeakagePattern, Observation, Profile, SignalingScheme};
use crate::rational::Rational;

/// Largest `n` the persuasive LP builder accepts.
pub const PERSUASIVE_LP_MAX_N: usize = 12;

/// Which part of the sender's utility the LP maximizes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Objective {
    #[default]
    Full,
    /// Only `(1-lambda) sum mu0(s) V(s)`.
    Omega0,
}

/// Lexicographic index of a direct profile; receiver 1 is the most
/// significant digit.
pub fn profile_index(set: ReceiverSet, n: usize) -> usize {
    set.iter().map(|i| 1usize << (n - 1 - i)).sum()
}

pub fn profile_set(index: usize, n: usize) -> ReceiverSet {
    ReceiverSet::from_indices((0..n).filter(|&i| index >> (n - 1 - i) & 1 == 1))
}

/// Row count of the persuasive LP.
pub fn persuasive_lp_rows(n: usize, k: usize) -> u128 {
    let per: u128 = (1..=k.min(n.saturating_sub(1))).map(|j| binom(n as u128 - 1, j as u128) << j).sum();
    2 * n as u128 + n as u128 * per + 2
}

fn binom(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Variables `mu0` then `mu1` over `{0,1}^n` in lexicographic order.
/// Rows: both private obedience rows per receiver; one leak row per
/// `(i, J, v)` with `1 <= |J| <= k`; the two normalizations.
pub fn build_persuasive_lp(inst: &Instance, k: usize, objective: Objective) -> Result<LinearProgram> {
    let n = inst.n();
    if k + 1 > n {
        return Err(Error::Domain(format!("k = {k} outside 0..={}", n - 1)));
    }
    let vars = 2u128 << n.min(100);
    refuse_if(
        "persuasive LP (variables)",
        if n > PERSUASIVE_LP_MAX_N { vars } else { 0 },
        2u128 << PERSUASIVE_LP_MAX_N,
    )?;
    let size = 1usize << n;
    let lambda = inst.lambda();
    let w0 = Rational::one() - lambda;
    let mut c = Vec::with_capacity(2 * size);
    let values: Vec<Rational> = (0..size).map(|x| inst.value(profile_set(x, n))).collect();
    c.extend(values.iter().map(|v| &w0 * v));
    match objective {
        Objective::Full => c.extend(values.iter().map(|v| lambda * v)),
        Objective::Omega0 => c.extend(std::iter::repeat_n(Rational::zero(), size)),
    }
    let mut lp = LinearProgram::new(2 * size, c);
    lp.names =
        (0..2 * size).map(|x| format!("mu{}_{}", x / size, profile_set(x % size, n).to_bits(n))).collect();

    // sum over profiles with s_i = own and s_J = v of mu0 - theta mu1
    let row = |i: usize, own: bool, fixed: ReceiverSet, ones: ReceiverSet| {
        let theta = inst.theta_at(i);
        let mut coeffs = Vec::new();
        let mut coeffs1 = Vec::new();
        for x in 0..size {
            let s = profile_set(x, n);
            if s.contains(i) == own && s.intersection(fixed) == ones {
                coeffs.push((x, Rational::one()));
                coeffs1.push((size + x, -theta));
            }
        }
        coeffs.extend(coeffs1);
        coeffs
    };
    for i in 0..n {
        lp.add(row(i, true, ReceiverSet::EMPTY, ReceiverSet::EMPTY), Relation::Le, Rational::zero());
        lp.add(row(i, false, ReceiverSet::EMPTY, ReceiverSet::EMPTY), Relation::Ge, Rational::zero());
    }
    for i in 0..n {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        for size_j in 1..=k {
            for sub in k_subsets(n - 1, size_j) {
                let senders: Vec<usize> = sub.iter().map(|&x| others[x]).collect();
                let fixed = ReceiverSet::from_indices(senders.iter().copied());
                for bits in 0..1u64 << size_j {
                    let ones = ReceiverSet::from_indices(
                        senders
                            .iter()
                            .enumerate()
                            .filter(|(t, _)| bits >> (size_j - 1 - t) & 1 == 1)
                            .map(|(_, &j)| j),
                    );
                    lp.add(row(i, true, fixed, ones), Relation::Le, Rational::zero());
                }
            }
        }
    }
    for state in 0..2 {
        let coeffs = (0..size).map(|x| (state * size + x, Rational::one())).collect();
        lp.add(coeffs, Relation::Eq, Rational::one());
    }
    Ok(lp)
}

/// Direct scheme read off a persuasive-LP assignment.
pub fn scheme_from_solution(n: usize, x: &[Rational]) -> Result<SignalingScheme> {
    let size = 1usize << n;
    if x.len() != 2 * size {
        return Err(Error::Domain("assignment length does not match 2^(n+1)".into()));
    }
    let entries = |state: usize| -> Vec<(ReceiverSet, Rational)> {
        (0..size)
            .filter(|&i| !x[state * size + i].is_zero())
            .map(|i| (profile_set(i, n), x[state * size + i].clone()))
            .collect()
    };
    SignalingScheme::from_sets(n, entries(0), entries(1))
}

/// Prescribed action for each reachable observation.
pub type ResponseTable = BTreeMap<Observation, bool>;

/// Template for best-response-constrained LPs over a fixed alphabet and
/// leakage pattern. Variables are `mu0` then `mu1` over the profile space
/// in lexicographic order.
pub struct BrLp<'a> {
    inst: &'a Instance,
    alphabets: Vec<Alphabet>,
    profiles: Vec<Profile>,
    /// Per receiver, every reachable observation in enumeration order.
    observations: Vec<Vec<Observation>>,
    /// `obs_of[x][i]`: index of receiver `i`'s observation at profile `x`.
    obs_of: Vec<Vec<usize>>,
    values: Vec<Rational>,
}

/// Cap on the profile space of the response-constrained LP.
pub const BR_LP_MAX_PROFILES: u128 = 1 << 12;

impl<'a> BrLp<'a> {
    pub fn new(inst: &'a Instance, alphabets: Vec<Alphabet>, pattern: &LeakagePattern) -> Result<Self> {
        let n = inst.n();
        if alphabets.len() != n || pattern.n() != n {
            return Err(Error::Domain("alphabets or pattern do not match n".into()));
        }
        let space = alphabets.iter().map(|a| a.len() as u128).product::<u128>();
        refuse_if("response-constrained LP profiles", space, BR_LP_MAX_PROFILES)?;
        let profiles = enumerate_profiles(&alphabets);
        let observations: Vec<Vec<Observation>> = (0..n)
            .map(|i| {
                let senders: Vec<usize> = pattern.sources(i).iter().collect();
                let mut radices = vec![alphabets[i].len()];
                radices.extend(senders.iter().map(|&j| alphabets[j].len()));
                mixed_radix(&radices)
                    .into_iter()
                    .map(|digits| Observation {
                        receiver: i,
                        own: digits[0],
                        leaked: senders.iter().copied().zip(digits[1..].iter().copied()).collect(),
                    })
                    .collect()
            })
            .collect();
        let obs_of = profiles
            .iter()
            .map(|p| {
                (0..n)
                    .map(|i| {
                        observations[i]
                            .iter()
                            .position(|o| o.own == p[i] && o.leaked.iter().all(|&(j, v)| p[j] == v))
                            .expect("every profile induces an observation")
                    })
                    .collect()
            })
            .collect();
        let values = (0..1u64 << n).map(|m| inst.value(ReceiverSet(m))).collect();
        Ok(BrLp { inst, alphabets, profiles, observations, obs_of, values })
    }

    pub fn alphabets(&self) -> &[Alphabet] {
        &self.alphabets
    }

    pub fn observations(&self, i: usize) -> &[Observation] {
        &self.observations[i]
    }

    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    /// Adopter set at profile `x` under per-observation actions.
    pub fn adopters(&self, x: usize, actions: &[Vec<bool>]) -> ReceiverSet {
        ReceiverSet::from_indices(
            self.obs_of[x].iter().enumerate().filter(|&(i, &o)| actions[i][o]).map(|(i, _)| i),
        )
    }

    /// `max_s V(adopters(s))`, an upper bound on the LP value.
    pub fn upper_bound(&self, actions: &[Vec<bool>]) -> Rational {
        (0..self.profiles.len())
            .map(|x| self.values[self.adopters(x, actions).0 as usize].clone())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    fn obedience_row(&self, i: usize, o: usize) -> Vec<(usize, Rational)> {
        let size = self.profiles.len();
        let theta = self.inst.theta_at(i);
        let hits: Vec<usize> = (0..size).filter(|&x| self.obs_of[x][i] == o).collect();
        let mut coeffs: Vec<(usize, Rational)> = hits.iter().map(|&x| (x, Rational::one())).collect();
        coeffs.extend(hits.iter().map(|&x| (size + x, -theta)));
        coeffs
    }

    fn with_rows(
        &self,
        objective: Vec<Rational>,
        rows: impl Iterator<Item = (usize, usize, Relation)>,
    ) -> LinearProgram {
        let size = self.profiles.len();
        let mut lp = LinearProgram::new(2 * size, objective);
        for (i, o, rel) in rows {
            lp.add(self.obedience_row(i, o), rel, Rational::zero());
        }
        for state in 0..2 {
            let coeffs = (0..size).map(|x| (state * size + x, Rational::one())).collect();
            lp.add(coeffs, Relation::Eq, Rational::one());
        }
        lp.names = (0..2 * size)
            .map(|x| {
                let p = &self.profiles[x % size];
                let text: String = p.iter().zip(&self.alphabets).map(|(&s, a)| a.symbol(s)).collect();
                format!("mu{}_{text}", x / size)
            })
            .collect();
        lp
    }

    fn objective(&self, adopters: impl Fn(usize) -> ReceiverSet) -> Vec<Rational> {
        let size = self.profiles.len();
        let lambda = self.inst.lambda();
        let w0 = Rational::one() - lambda;
        let v: Vec<&Rational> = (0..size).map(|x| &self.values[adopters(x).0 as usize]).collect();
        v.iter().map(|v| &w0 * *v).chain(v.iter().map(|v| lambda * *v)).collect()
    }

    /// LP for per-observation actions `actions[i][o]`.
    pub fn lp_for(&self, actions: &[Vec<bool>]) -> LinearProgram {
        let c = self.objective(|x| self.adopters(x, actions));
        let rows = (0..self.observations.len()).flat_map(|i| {
            (0..self.observations[i].len())
                .map(move |o| (i, o, if actions[i][o] { Relation::Le } else { Relation::Ge }))
        });
        self.with_rows(c, rows)
    }

    /// LP for an action profile per signal profile. An observation that
    /// receives both actions gets both rows.
    pub fn lp_for_profile_actions(&self, actions: &[ReceiverSet]) -> LinearProgram {
        let n = self.observations.len();
        let c = self.objective(|x| actions[x]);
        let mut need: Vec<Vec<(bool, bool)>> =
            self.observations.iter().map(|o| vec![(false, false); o.len()]).collect();
        for (x, act) in actions.iter().enumerate() {
            for i in 0..n {
                let slot = &mut need[i][self.obs_of[x][i]];
                if act.contains(i) {
                    slot.0 = true;
                } else {
                    slot.1 = true;
                }
            }
        }
        let mut rows = Vec::new();
        for (i, per) in need.iter().enumerate() {
            for (o, &(adopt, refrain)) in per.iter().enumerate() {
                if adopt {
                    rows.push((i, o, Relation::Le));
                }
                if refrain {
                    rows.push((i, o, Relation::Ge));
                }
            }
        }
        self.with_rows(c, rows.into_iter())
    }

    /// Converts a response table into per-observation actions.
    pub fn actions_from_table(&self, table: &ResponseTable) -> Result<Vec<Vec<bool>>> {
        self.observations
            .iter()
            .map(|obs| {
                obs.iter()
                    .map(|o| {
                        table.get(o).copied().ok_or_else(|| {
                            Error::Domain(format!(
                                "no response for receiver {} with own symbol {} and leaks {:?}",
                                o.receiver + 1,
                                self.alphabets[o.receiver].symbol(o.own),
                                o.leaked
                                    .iter()
                                    .map(|&(j, v)| (j + 1, self.alphabets[j].symbol(v)))
                                    .collect::<Vec<_>>()
                            ))
                        })
                    })
                    .collect()
            })
            .collect()
    }

    pub fn table_from_actions(&self, actions: &[Vec<bool>]) -> ResponseTable {
        self.observations
            .iter()
            .zip(actions)
            .flat_map(|(obs, act)| obs.iter().cloned().zip(act.iter().copied()))
            .collect()
    }

    /// Scheme read off an assignment of this template's variables.
    pub fn scheme_from(&self, x: &[Rational]) -> Result<SignalingScheme> {
        let size = self.profiles.len();
        let entries = |state: usize| -> Vec<(Profile, Rational)> {
            (0..size)
                .filter(|&i| !x[state * size + i].is_zero())
                .map(|i| (self.profiles[i].clone(), x[state * size + i].clone()))
                .collect()
        };
        SignalingScheme::new(self.alphabets.clone(), entries(0), entries(1))
    }

    /// Variable assignment of an existing scheme over the same alphabets.
    pub fn assignment_of(&self, scheme: &SignalingScheme) -> Vec<Rational> {
        (0..2).flat_map(|state| self.profiles.iter().map(move |p| scheme.prob(state, p))).collect()
    }
}

/// LP with responses fixed by a table.
pub fn build_br_constrained_lp(
    inst: &Instance,
    alphabets: Vec<Alphabet>,
    pattern: &LeakagePattern,
    responses: &ResponseTable,
) -> Result<LinearProgram> {
    let t = BrLp::new(inst, alphabets, pattern)?;
    let actions = t.actions_from_table(responses)?;
    Ok(t.lp_for(&actions))
}

/// All profiles in lexicographic order.
pub fn enumerate_profiles(alphabets: &[Alphabet]) -> Vec<Profile> {
    let radices: Vec<usize> = alphabets.iter().map(Alphabet::len).collect();
    mixed_radix(&radices)
}

fn mixed_radix(radices: &[usize]) -> Vec<Vec<u8>> {
    let total: usize = radices.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0u8; radices.len()];
    for _ in 0..total {
        out.push(cur.clone());
        for p in (0..radices.len()).rev() {
            cur[p] += 1;
            if (cur[p] as usize) < radices[p] {
                break;
            }
            cur[p] = 0;
        }
    }
    out
}
