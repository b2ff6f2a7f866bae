//! Closed-form scheme constructions: the private optimum, full information,
//! public prefixes, subsampling and masking transforms.

use serde::{Deserialize, Serialize};

use crate::error::{refuse_if, Error, Result};
use crate::lp::{self, build_persuasive_lp, Objective};
use crate::model::{Instance, PrefixScheme, ReceiverSet, SignalingScheme};
use crate::persuasive::check_private;
use crate::rational::Rational;

/// Largest `n` for which a transform materializes all `2^n` profiles.
pub const TRANSFORM_MAX_N: usize = 20;

/// `mu1([n]) = 1` and `mu0([j]) = theta_j - theta_{j+1}`.
pub fn optimal_private(inst: &Instance) -> PrefixScheme {
    let n = inst.n();
    let mu0 = (0..=n).map(|j| inst.theta_ext(j) - inst.theta_ext(j + 1)).collect();
    let mut mu1 = vec![Rational::zero(); n + 1];
    mu1[n] = Rational::one();
    PrefixScheme::new(mu0, mu1).expect("theta differences telescope to 1")
}

/// Reveals the state: all ones under `w1`, all zeros under `w0`.
pub fn full_information(inst: &Instance) -> SignalingScheme {
    let n = inst.n();
    SignalingScheme::from_sets(
        n,
        [(ReceiverSet::EMPTY, Rational::one())],
        [(ReceiverSet::full(n), Rational::one())],
    )
    .expect("point masses")
}

/// Recommends the prefix `[i_star]` (1-based) under `w1`, and under `w0`
/// with probability `theta_{i_star}`.
pub fn public_prefix(inst: &Instance, i_star: usize) -> Result<SignalingScheme> {
    let n = inst.n();
    if !(1..=n).contains(&i_star) {
        return Err(Error::Domain(format!("i* = {i_star} outside 1..={n}")));
    }
    let t = inst.theta_ext(i_star);
    let top = ReceiverSet::prefix(i_star);
    SignalingScheme::from_sets(
        n,
        [(top, t.clone()), (ReceiverSet::EMPTY, Rational::one() - t)],
        [(top, Rational::one())],
    )
}

/// First `i` maximizing `(theta_i - theta_{i+1}) V([i])`, 1-based.
pub fn best_public_prefix(inst: &Instance) -> usize {
    let score = |i: usize| (inst.theta_ext(i) - inst.theta_ext(i + 1)) * inst.value(ReceiverSet::prefix(i));
    let mut best = 1;
    let mut best_score = score(1);
    for i in 2..=inst.n() {
        let s = score(i);
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

/// Private optimum for any monotone `V`: the `w0` part maximized by the LP,
/// with `mu1` moved to a point mass on `N`. Needs a tractable LP size.
pub fn lp_private_base(inst: &Instance) -> Result<SignalingScheme> {
    let n = inst.n();
    let program = build_persuasive_lp(inst, 0, Objective::Omega0)?;
    let sol = lp::solve(&program)?;
    if !sol.is_optimal() {
        return Err(Error::Internal(format!("private LP ended {:?}", sol.status)));
    }
    let size = 1usize << n;
    let mu0: Vec<_> = (0..size).map(|x| (lp::profile_set(x, n), sol.assignment[x].clone())).collect();
    SignalingScheme::from_sets(n, mu0, [(ReceiverSet::full(n), Rational::one())])
}

/// `w0` part of the obedient utility, `(1-lambda) sum mu0(S) V(S)`.
pub fn omega0_utility(inst: &Instance, scheme: &SignalingScheme) -> Rational {
    scheme.obedient_utility_parts(inst).0
}

fn check_base(inst: &Instance, base: &SignalingScheme) -> Result<()> {
    let n = inst.n();
    base.require_binary("subsampling base")?;
    if base.n() != n {
        return Err(Error::Domain(format!("base has {} receivers, instance has {n}", base.n())));
    }
    let full = crate::model::set_to_profile(ReceiverSet::full(n), n);
    if base.mu1().len() != 1 || base.prob(1, &full) != Rational::one() {
        return Err(Error::Domain("base mu1 is not a point mass on N".into()));
    }
    let verdict = check_private(inst, base)?;
    if let Some(v) = verdict.violation {
        let view = v.obs.render(base);
        return Err(Error::Domain(format!(
            "base is not privately persuasive: receiver {} with signal {} has m0 = {}, m1 = {}",
            view.receiver, view.own, v.m0, v.m1
        )));
    }
    refuse_if(
        "subsampled scheme profiles",
        if n > TRANSFORM_MAX_N { 1u128 << n } else { 0 },
        1u128 << TRANSFORM_MAX_N,
    )
}

fn all_sets(n: usize) -> impl Iterator<Item = ReceiverSet> {
    ReceiverSet::full(n).subsets()
}

/// Uniform `mu1`; nonempty `w0` recommendations kept with probability
/// `2^-(k+1)`, the rest moved to the empty set.
pub fn subsample_half(inst: &Instance, base: &SignalingScheme, k: usize) -> Result<SignalingScheme> {
    check_base(inst, base)?;
    let n = inst.n();
    let scale = Rational::pow2(-(k as i32 + 1));
    let mut kept = Rational::zero();
    let mut mu0 = Vec::new();
    for (p, v) in base.mu0() {
        let set = SignalingScheme::recommended(p);
        if !set.is_empty() {
            let m = &scale * v;
            kept += &m;
            mu0.push((set, m));
        }
    }
    mu0.push((ReceiverSet::EMPTY, Rational::one() - kept));
    let uniform = Rational::pow2(-(n as i32));
    let mu1 = all_sets(n).map(|s| (s, uniform.clone()));
    SignalingScheme::from_sets(n, mu0, mu1)
}

/// `Pr[S' | S]` when each member of `S` is kept independently at rate `gamma`.
fn keep_prob(gamma: &Rational, kept: usize, dropped: usize) -> Rational {
    gamma.pow(kept as i32) * (Rational::one() - gamma).pow(dropped as i32)
}

/// Every signal drawn independently at rate `gamma` under `w1`. Under `w0`
/// the recommendation is emptied with probability `1 - (1-gamma)^k` and
/// otherwise subsampled at rate `gamma`.
pub fn subsample_rate(
    inst: &Instance,
    base: &SignalingScheme,
    k: usize,
    gamma: &Rational,
) -> Result<SignalingScheme> {
    if !gamma.is_positive() || *gamma > Rational::one() {
        return Err(Error::Domain(format!("gamma = {gamma} outside (0,1]")));
    }
    check_base(inst, base)?;
    let n = inst.n();
    let work: u128 = base.mu0().keys().map(|p| 1u128 << SignalingScheme::recommended(p).len()).sum();
    refuse_if("subsampling convolution", work, 1u128 << 24)?;

    let survive = (Rational::one() - gamma).pow(k as i32);
    let mut mu0: std::collections::BTreeMap<ReceiverSet, Rational> = Default::default();
    mu0.insert(ReceiverSet::EMPTY, Rational::one() - &survive);
    for (p, v) in base.mu0() {
        let set = SignalingScheme::recommended(p);
        let weight = &survive * v;
        for sub in set.subsets() {
            let m = &weight * keep_prob(gamma, sub.len(), set.len() - sub.len());
            *mu0.entry(sub).or_insert_with(Rational::zero) += m;
        }
    }
    let mu1 = all_sets(n).map(|s| (s, keep_prob(gamma, s.len(), n - s.len())));
    SignalingScheme::from_sets(n, mu0, mu1)
}

/// Keeps only the window `[i, i + floor(n/k)]` (clamped to `n`) of the
/// private optimum; `mu1` is a point mass on its top prefix.
pub fn mask_remove(inst: &Instance, i: usize, k: usize) -> Result<PrefixScheme> {
    let n = inst.n();
    if k == 0 || 2 * k > n {
        return Err(Error::Domain(format!("k = {k} outside 1..=n/2")));
    }
    if !(1..=n).contains(&i) {
        return Err(Error::Domain(format!("i = {i} outside 1..={n}")));
    }
    let top = (i + n / k).min(n);
    let mut mu0 = vec![Rational::zero(); n + 1];
    for (j, m) in mu0.iter_mut().enumerate().take(top + 1).skip(i) {
        *m = inst.theta_ext(j) - inst.theta_ext(j + 1);
    }
    mu0[0] = Rational::one() - (inst.theta_ext(i) - inst.theta_ext(top + 1));
    let mut mu1 = vec![Rational::zero(); n + 1];
    mu1[top] = Rational::one();
    PrefixScheme::new(mu0, mu1)
}

/// Window of receivers `mask_remove` recommends under `w0`, 1-based and
/// inclusive.
pub fn mask_remove_window(n: usize, i: usize, k: usize) -> (usize, usize) {
    (i, (i + n / k).min(n))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskMatchParams {
    pub c0: Rational,
    pub c1: Rational,
    /// Cutoff receiver, 1-based.
    pub m: usize,
}

impl MaskMatchParams {
    /// `c0 = c1 = 1/2` with cutoff `floor(alpha n) + 1`.
    pub fn halves(n: usize, alpha: &Rational) -> Self {
        let scaled = alpha * Rational::from_int(n as i64);
        let floor = scaled.numer() / scaled.denom();
        let m: usize = floor.try_into().unwrap_or(0);
        MaskMatchParams { c0: Rational::new(1, 2), c1: Rational::new(1, 2), m: (m + 1).min(n) }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let one = Rational::one();
        if !(self.c0.is_positive() && self.c0 <= self.c1 && self.c1 < one) {
            return Err(Error::Domain("need 0 < c0 <= c1 < 1".into()));
        }
        if &self.c0 + &self.c1 > one {
            return Err(Error::Domain("need c0 + c1 <= 1".into()));
        }
        if !(1..=n).contains(&self.m) {
            return Err(Error::Domain(format!("cutoff m = {} outside 1..={n}", self.m)));
        }
        Ok(())
    }
}

/// Scaled private optimum under `w0`; under `w1` the same differences
/// rescaled by `c1/theta_m` from the cutoff on, with the rest on `N`.
pub fn mask_match(inst: &Instance, params: &MaskMatchParams) -> Result<PrefixScheme> {
    let n = inst.n();
    params.validate(n)?;
    let tm = inst.theta_ext(params.m);
    if tm.is_zero() {
        return Err(Error::Domain(format!("theta_{} = 0", params.m)));
    }
    let diff = |j: usize| inst.theta_ext(j) - inst.theta_ext(j + 1);
    let one = Rational::one();
    let mut mu0 = vec![Rational::zero(); n + 1];
    for (j, m) in mu0.iter_mut().enumerate().skip(1) {
        *m = &params.c0 * diff(j);
    }
    mu0[0] = &one - &params.c0 * inst.theta_ext(1);
    let ratio = &params.c1 / &tm;
    let mut mu1 = vec![Rational::zero(); n + 1];
    for (j, m) in mu1.iter_mut().enumerate().take(n).skip(params.m) {
        *m = &ratio * diff(j);
    }
    mu1[n] = &one - &params.c1 + &ratio * inst.theta_ext(n);
    let scheme = PrefixScheme::new(mu0, mu1)?;
    if let Some(msg) = mask_match_failure(inst, &scheme, params.m) {
        return Err(Error::Internal(format!("mask_match property failed: {msg}")));
    }
    Ok(scheme)
}

/// Checks the two masking properties directly on the prefix masses:
/// a receiver told 1 adopts without leaks, and
/// `mu0([j]) <= theta_i mu1([j])` for `i <= m <= j`.
pub fn mask_match_failure(inst: &Instance, scheme: &PrefixScheme, m: usize) -> Option<String> {
    let n = inst.n();
    for i in 1..=n {
        let m0: Rational = scheme.mu0[i..].iter().sum();
        let m1: Rational = scheme.mu1[i..].iter().sum();
        if m0 > inst.theta_ext(i) * m1 {
            return Some(format!("receiver {i} refuses a private 1"));
        }
    }
    for i in 1..=m {
        for j in m..=n {
            if scheme.mu0[j] > inst.theta_ext(i) * &scheme.mu1[j] {
                return Some(format!("mu0([{j}]) > theta_{i} mu1([{j}])"));
            }
        }
    }
    None
}
