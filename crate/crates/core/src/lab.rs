//! Hard instances, the subcube partition, random instance generators and
//! the lower-bound verification suite.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{self, build_persuasive_lp, Objective};
use crate::model::{Instance, ReceiverSet, UtilityFunction};
use crate::rational::Rational;

/// `theta_i = 2^-i`, `lambda = 2^-n`, `V(S) = sum of 2^i over prefixes [i]
/// inside S`, so `w[j] = 2^(j+1) - 2`.
pub fn hard_supermodular(n: usize) -> Result<Instance> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let theta = (1..=n).map(|i| Rational::pow2(-(i as i32))).collect();
    let weights = (0..=n).map(|j| Rational::pow2(j as i32 + 1) - Rational::from_int(2)).collect();
    Instance::new(n, Rational::pow2(-(n as i32)), theta, UtilityFunction::prefix(weights)?)
}

/// Block size `4 ceil(n/k)` of the clique instance.
pub fn block_size(n: usize, k: usize) -> usize {
    4 * n.div_ceil(k)
}

/// `theta_i = 2^-floor(i/B)` and `V(S) = sum_{b=1..k} 1{[bB] in S} 2^b`
/// with `B = 4 ceil(n/k)`. The prior is `2^-n`.
pub fn hard_clique_blocks(n: usize, k: usize) -> Result<Instance> {
    if n == 0 || k == 0 {
        return Err(Error::Domain("n and k must be at least 1".into()));
    }
    let b = block_size(n, k);
    let theta = (1..=n).map(|i| Rational::pow2(-((i / b) as i32))).collect();
    let weights = (0..=n)
        .map(|j| (1..=k).filter(|&blk| blk * b <= j).map(|blk| Rational::pow2(blk as i32)).sum())
        .collect();
    Instance::new(n, Rational::pow2(-(n as i32)), theta, UtilityFunction::prefix(weights)?)
}

/// `theta_i = 1/n`, `V(S) = 1{S nonempty}`, `lambda = 2^-n`.
pub fn hard_submodular_public(n: usize) -> Result<Instance> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let f = (0..=n).map(|s| Rational::from_int((s >= 1) as i64)).collect();
    Instance::new(
        n,
        Rational::pow2(-(n as i32)),
        vec![Rational::new(1, n as i64); n],
        UtilityFunction::anonymous(f)?,
    )
}

/// `f(s) = 1 - C(n-s, k)/C(n, k)`.
pub fn submodular_k_curve(n: usize, k: usize) -> Vec<Rational> {
    let total = Rational::binomial(n as u64, k as u64);
    (0..=n).map(|s| Rational::one() - Rational::binomial((n - s) as u64, k as u64) / &total).collect()
}

/// `theta_i = 1/k`, `V(S) = Pr[a uniform k-subset meets S]`, `lambda = 2^-n`.
pub fn hard_submodular_k(n: usize, k: usize) -> Result<Instance> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("k = {k} outside 1..={n}")));
    }
    Instance::new(
        n,
        Rational::pow2(-(n as i32)),
        vec![Rational::new(1, k as i64); n],
        UtilityFunction::anonymous(submodular_k_curve(n, k))?,
    )
}

/// `theta_1 = 1`, other thetas and the prior equal `epsilon`,
/// `V(S) = 1{1 in S}`. Meant for the externality response mode.
pub fn externality_instance(n: usize, epsilon: &Rational) -> Result<Instance> {
    if n < 2 {
        return Err(Error::Domain("needs at least two receivers".into()));
    }
    if !epsilon.is_positive() || *epsilon >= Rational::one() {
        return Err(Error::Domain(format!(
            "epsilon = {epsilon} must lie in (0,1) since it is also the prior"
        )));
    }
    let mut theta = vec![epsilon.clone(); n];
    theta[0] = Rational::one();
    let v = UtilityFunction::from_fn(n, |s| Rational::from_int(s.contains(0) as i64))?;
    Instance::new(n, epsilon.clone(), theta, v)
}

/// One cube of the partition: fixed `(coordinate, bit)` pairs, 1-based
/// coordinates, in query order.
pub type Cube = Vec<(usize, u8)>;

/// Leaves of the binary-search decision tree over `{0,1}^(2^k)`: `C_0`
/// fixes `x_1 = 0`; `C_i` certifies `x_i = 1` and `x_{i+1} = 0`.
pub fn subcube_partition(k: u32) -> Vec<Cube> {
    let n = 1usize << k;
    let mut cubes = vec![Vec::new(); n + 1];
    cubes[0] = vec![(1, 0)];
    // (l, r, fixings) with x_l = 1 and x_r = 0 known; r = n+1 is virtual
    let mut stack = vec![(1usize, n + 1, vec![(1usize, 1u8)])];
    while let Some((l, r, fixed)) = stack.pop() {
        if r == l + 1 {
            cubes[l] = fixed;
            continue;
        }
        let mid = (l + r) / 2;
        let mut zero = fixed.clone();
        zero.push((mid, 0));
        let mut one = fixed;
        one.push((mid, 1));
        stack.push((l, mid, zero));
        stack.push((mid, r, one));
    }
    cubes
}

/// Index of the cube containing `x` (bit `i` is coordinate `i+1`).
pub fn cube_of(cubes: &[Cube], x: u64) -> Vec<usize> {
    cubes
        .iter()
        .enumerate()
        .filter(|(_, c)| c.iter().all(|&(j, b)| (x >> (j - 1) & 1) as u8 == b))
        .map(|(i, _)| i)
        .collect()
}

fn small_rational(rng: &mut impl Rng, denom: i64) -> Rational {
    Rational::new(rng.gen_range(0..=denom), denom)
}

/// Sorted descending thetas on the grid `{0, 1/d, ..., 1}`.
pub fn random_theta(rng: &mut impl Rng, n: usize, denom: i64) -> Vec<Rational> {
    let mut t: Vec<Rational> = (0..n).map(|_| small_rational(rng, denom)).collect();
    t.sort_by(|a, b| b.cmp(a));
    t
}

/// Prior on `{1/d, ..., (d-1)/d}`.
pub fn random_lambda(rng: &mut impl Rng, denom: i64) -> Rational {
    Rational::new(rng.gen_range(1..denom), denom)
}

/// Supermodular table: nonnegative Moebius coefficients summed over
/// subsets. About half the coefficients are zero.
pub fn random_supermodular(rng: &mut impl Rng, n: usize) -> Result<UtilityFunction> {
    let mut mobius = vec![Rational::zero(); 1 << n];
    for m in mobius.iter_mut().skip(1) {
        if rng.gen_bool(0.5) {
            *m = Rational::from_int(rng.gen_range(1..=4));
        }
    }
    UtilityFunction::from_fn(n, |s| s.subsets().map(|t| mobius[t.0 as usize].clone()).sum())
}

/// Monotone table built from random nonnegative increments along a random
/// order of the subsets by size; not structured otherwise.
pub fn random_monotone(rng: &mut impl Rng, n: usize) -> Result<UtilityFunction> {
    let size = 1usize << n;
    let mut values = vec![Rational::zero(); size];
    let mut masks: Vec<usize> = (1..size).collect();
    masks.sort_by_key(|m| m.count_ones());
    for m in masks {
        let floor = (0..n)
            .filter(|&i| m >> i & 1 == 1)
            .map(|i| values[m & !(1 << i)].clone())
            .max()
            .unwrap_or_else(Rational::zero);
        values[m] = floor + Rational::new(rng.gen_range(0..=3), 2);
    }
    UtilityFunction::table(n, values)
}

/// Maximum of `clauses` additive clauses with weights in `{0, ..., 4}`.
pub fn random_xos(rng: &mut impl Rng, n: usize, clauses: usize) -> Result<UtilityFunction> {
    let c = (0..clauses.max(1))
        .map(|_| (0..n).map(|_| Rational::from_int(rng.gen_range(0..=4))).collect())
        .collect();
    UtilityFunction::xos(c)
}

/// Concave nondecreasing `f` with `f(0) = 0`: random nonincreasing
/// nonnegative increments.
pub fn random_concave(rng: &mut impl Rng, n: usize) -> Result<UtilityFunction> {
    let mut steps: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=6)).collect();
    steps.sort_unstable_by(|a, b| b.cmp(a));
    let mut f = vec![Rational::zero()];
    for s in steps {
        let next = f.last().expect("nonempty") + Rational::from_int(s);
        f.push(next);
    }
    UtilityFunction::anonymous(f)
}

/// `E[V(S')]` where `S'` keeps each member of `S` independently at rate
/// `gamma`.
pub fn subsample_expectation(v: &UtilityFunction, s: ReceiverSet, gamma: &Rational) -> Rational {
    let one_minus = Rational::one() - gamma;
    s.subsets()
        .map(|t| gamma.pow(t.len() as i32) * one_minus.pow((s.len() - t.len()) as i32) * v.value(t))
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: Rational,
    pub bound: Rational,
    pub holds: bool,
}

/// Benchmark values on one instance, plus any explicit bounds that apply.
#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub label: String,
    pub instance_hash: String,
    pub n: usize,
    pub k: usize,
    pub opt_private: Rational,
    pub opt_persuasive_k: Rational,
    pub opt_public: Rational,
    /// LP maxima of the `w0` part alone.
    pub persuasive_k_omega0: Rational,
    pub public_omega0: Rational,
    pub powr_k: Option<Rational>,
    pub checks: Vec<BoundCheck>,
}

impl BoundRow {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Which explicit bounds to assert.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    HardSupermodular,
    HardSubmodularPublic,
    Other,
}

fn lp_value(inst: &Instance, k: usize, objective: Objective) -> Result<Rational> {
    let sol = lp::solve(&build_persuasive_lp(inst, k, objective)?)?;
    if !sol.is_optimal() {
        return Err(Error::Internal(format!("persuasive LP ended {:?}", sol.status)));
    }
    Ok(sol.value)
}

/// Solves the private, `k`-persuasive and public LPs and checks the
/// bounds that apply to the family: the `w0` part of the public optimum on
/// the supermodular instance is at most `2(1-lambda)`, as is that of the
/// `k`-persuasive optimum when `n = 2^k`; the submodular public `w0` part
/// is at most `1/n`.
pub fn verify_lower_bound_suite(label: &str, inst: &Instance, family: Family, k: usize) -> Result<BoundRow> {
    let n = inst.n();
    if k + 1 > n {
        return Err(Error::Domain(format!("k = {k} outside 0..={}", n - 1)));
    }
    let opt_private = lp_value(inst, 0, Objective::Full)?;
    let opt_persuasive_k = lp_value(inst, k, Objective::Full)?;
    let opt_public = lp_value(inst, n - 1, Objective::Full)?;
    let persuasive_k_omega0 = lp_value(inst, k, Objective::Omega0)?;
    let public_omega0 = lp_value(inst, n - 1, Objective::Omega0)?;
    let w0 = Rational::one() - inst.lambda();
    let mut checks = Vec::new();
    let mut add = |name: &str, lhs: &Rational, bound: Rational| {
        checks.push(BoundCheck { name: name.into(), lhs: lhs.clone(), holds: *lhs <= bound, bound });
    };
    match family {
        Family::HardSupermodular => {
            let two = Rational::from_int(2) * &w0;
            add("public w0 part <= 2(1-lambda)", &public_omega0, two.clone());
            if n == 1 << k {
                add("k-persuasive w0 part <= 2(1-lambda)", &persuasive_k_omega0, two);
            }
        }
        Family::HardSubmodularPublic => {
            add("public w0 part <= 1/n", &public_omega0, Rational::new(1, n as i64));
        }
        Family::Other => {}
    }
    let powr_k = (!opt_persuasive_k.is_zero()).then(|| &opt_private / &opt_persuasive_k);
    Ok(BoundRow {
        label: label.into(),
        instance_hash: inst.hash(),
        n,
        k,
        opt_private,
        opt_persuasive_k,
        opt_public,
        persuasive_k_omega0,
        public_omega0,
        powr_k,
        checks,
    })
}
