//! Private, k-worst-case, public and two-sided persuasiveness checks, plus
//! worst-case downstream utility.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::observation::ObservationView;
use crate::model::set::ReceiverSet;
use crate::model::{Instance, Observation, SignalingScheme};
use crate::par;
use crate::rational::Rational;
use crate::response::{check_inputs, decide, BestResponseMode};

/// First failing observation with its masses. `m1` is the unscaled
/// right-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub obs: Observation,
    pub m0: Rational,
    pub m1: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub violation: Option<Violation>,
    /// Zero-probability observations settled by the tie rule.
    pub degenerate_ties: usize,
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        self.violation.is_none()
    }

    pub fn render(&self, scheme: &SignalingScheme) -> VerdictView {
        VerdictView {
            ok: self.is_ok(),
            violation: self.violation.as_ref().map(|v| {
                let ObservationView { receiver, own, leaked } = v.obs.render(scheme);
                ViolationView { receiver, own, leaked, m0: v.m0.clone(), m1: v.m1.clone() }
            }),
            degenerate_ties: self.degenerate_ties,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictView {
    pub ok: bool,
    pub violation: Option<ViolationView>,
    pub degenerate_ties: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ViolationView {
    pub receiver: usize,
    pub own: String,
    pub leaked: Vec<(usize, String)>,
    pub m0: Rational,
    pub m1: Rational,
}

/// What a receiver with a given own signal must do.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Need {
    Adopt,
    /// `m0 >= theta * m1`, ties allowed.
    Refrain,
}

struct Probe<'a> {
    inst: &'a Instance,
    scheme: &'a SignalingScheme,
    mode: BestResponseMode,
}

impl Probe<'_> {
    /// `Ok(degenerate?)` or the violation.
    fn test(&self, obs: Observation, need: Need) -> std::result::Result<bool, Violation> {
        let d = decide(self.inst, self.scheme, &obs, self.mode);
        let theta = self.inst.theta_at(obs.receiver);
        let ok = match need {
            Need::Adopt => d.adopt,
            Need::Refrain => d.m0 >= theta * &d.m1,
        };
        if ok {
            Ok(d.degenerate())
        } else {
            Err(Violation { obs, m0: d.m0, m1: d.m1 })
        }
    }

    /// Runs every observation of each receiver in enumeration order and
    /// keeps the first violation by receiver index.
    fn sweep(&self, k: usize, needs: &[(u8, Need)]) -> Verdict {
        let n = self.inst.n();
        let per_receiver = par::map((0..n).collect(), |i| {
            let mut degenerate = 0;
            for &(own, need) in needs {
                for obs in leak_observations(n, i, own, k) {
                    match self.test(obs, need) {
                        Ok(d) => degenerate += d as usize,
                        Err(v) => return (degenerate, Some(v)),
                    }
                }
            }
            (degenerate, None)
        });
        let mut degenerate_ties = 0;
        for (d, v) in per_receiver {
            degenerate_ties += d;
            if v.is_some() {
                return Verdict { violation: v, degenerate_ties };
            }
        }
        Verdict { violation: None, degenerate_ties }
    }
}

/// Observations of receiver `i` with own signal `own` and at most `k`
/// leaked binary signals: by size, then lexicographic sender set, then
/// lexicographic values.
pub fn leak_observations(n: usize, i: usize, own: u8, k: usize) -> impl Iterator<Item = Observation> {
    let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    (0..=k.min(others.len())).flat_map(move |size| {
        let others = others.clone();
        crate::model::set::k_subsets(others.len(), size).into_iter().flat_map(move |sub| {
            let senders: Vec<usize> = sub.iter().map(|&x| others[x]).collect();
            (0..1u64 << size).map(move |bits| {
                // first sender is the most significant value bit
                let leaked = senders
                    .iter()
                    .enumerate()
                    .map(|(t, &j)| (j, (bits >> (size - 1 - t) & 1) as u8))
                    .collect();
                Observation { receiver: i, own, leaked }
            })
        })
    })
}

fn precheck(inst: &Instance, scheme: &SignalingScheme, mode: BestResponseMode) -> Result<()> {
    scheme.require_binary("persuasiveness checks")?;
    check_inputs(inst, scheme, &Observation::private(0, 0), mode)
}

fn check_k(inst: &Instance, k: usize) -> Result<()> {
    if k + 1 > inst.n() {
        return Err(Error::Domain(format!("k = {k} outside 0..={}", inst.n() - 1)));
    }
    Ok(())
}

/// Both private obedience inequalities for every receiver.
pub fn check_private(inst: &Instance, scheme: &SignalingScheme) -> Result<Verdict> {
    check_private_with(inst, scheme, BestResponseMode::Standard)
}

pub fn check_private_with(
    inst: &Instance,
    scheme: &SignalingScheme,
    mode: BestResponseMode,
) -> Result<Verdict> {
    precheck(inst, scheme, mode)?;
    let probe = Probe { inst, scheme, mode };
    Ok(probe.sweep(0, &[(1, Need::Adopt), (0, Need::Refrain)]))
}

/// Private obedience plus adoption after any `k` leaked signals.
pub fn check_k_worst_case(inst: &Instance, scheme: &SignalingScheme, k: usize) -> Result<Verdict> {
    check_k_worst_case_with(inst, scheme, k, BestResponseMode::Standard)
}

pub fn check_k_worst_case_with(
    inst: &Instance,
    scheme: &SignalingScheme,
    k: usize,
    mode: BestResponseMode,
) -> Result<Verdict> {
    check_k(inst, k)?;
    let private = check_private_with(inst, scheme, mode)?;
    if !private.is_ok() || k == 0 {
        return Ok(private);
    }
    let probe = Probe { inst, scheme, mode };
    let mut v = probe.sweep(k, &[(1, Need::Adopt)]);
    v.degenerate_ties += private.degenerate_ties;
    Ok(v)
}

pub fn check_public(inst: &Instance, scheme: &SignalingScheme) -> Result<Verdict> {
    check_k_worst_case(inst, scheme, inst.n() - 1)
}

/// Every receiver follows its signal, in both directions, after up to `k`
/// leaks.
pub fn check_two_sided(inst: &Instance, scheme: &SignalingScheme, k: usize) -> Result<Verdict> {
    check_k(inst, k)?;
    precheck(inst, scheme, BestResponseMode::Standard)?;
    let probe = Probe { inst, scheme, mode: BestResponseMode::Standard };
    Ok(probe.sweep(k, &[(1, Need::Adopt), (0, Need::Refrain)]))
}

/// Expected utility when, in each realization, a receiver recommended 1
/// counts only if no choice of at most `k` leaked signals from that
/// realization makes it refuse. Receivers recommended 0 never count.
pub fn worst_case_downstream(inst: &Instance, scheme: &SignalingScheme, k: usize) -> Result<Rational> {
    check_k(inst, k)?;
    precheck(inst, scheme, BestResponseMode::Standard)?;
    let n = inst.n();
    // (receiver, sender mask, value mask) of observations that refuse
    let bad: Vec<HashSet<(u64, u64)>> = par::map((0..n).collect(), |i| {
        leak_observations(n, i, 1, k)
            .filter(|obs| !decide(inst, scheme, obs, BestResponseMode::Standard).adopt)
            .map(|obs| {
                let senders = ReceiverSet::from_indices(obs.leaked.iter().map(|&(j, _)| j));
                let ones = ReceiverSet::from_indices(obs.leaked.iter().filter(|p| p.1 == 1).map(|&(j, _)| j));
                (senders.0, ones.0)
            })
            .collect()
    });
    let survivors = |set: ReceiverSet| -> ReceiverSet {
        ReceiverSet::from_indices(set.iter().filter(|&i| {
            let others = ReceiverSet::full(n).without(i);
            !others.subsets().filter(|j| j.len() <= k).any(|j| bad[i].contains(&(j.0, j.intersection(set).0)))
        }))
    };
    let mut total = Rational::zero();
    let lambda = inst.lambda();
    let weights = [Rational::one() - lambda, lambda.clone()];
    for (state, w) in weights.iter().enumerate() {
        for (p, mass) in scheme.mu(state) {
            let rec = SignalingScheme::recommended(p);
            total += w * mass * inst.value(survivors(rec));
        }
    }
    Ok(total)
}
