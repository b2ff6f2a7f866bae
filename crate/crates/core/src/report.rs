//! Benchmark tables: the private, persuasive and public optima next to
//! bracketed downstream values for a list of leakage models.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::construct::{full_information, optimal_private};
use crate::downstream::{bruteforce_optimal_responses, downstream_utility_model, Method, SearchMode};
use crate::error::{Error, Result};
use crate::lp::{self, build_persuasive_lp, scheme_from_solution, Objective};
use crate::model::{Alphabet, Instance, LeakageModel, SignalingScheme, EXACT_SUPPORT_CAP};
use crate::rational::Rational;
use crate::response::BestResponseMode;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// An exact value or a closed interval known to contain it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bracket {
    Exact(Rational),
    Interval(Rational, Rational),
}

impl Bracket {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        if lo == hi {
            Bracket::Exact(lo)
        } else {
            Bracket::Interval(lo, hi)
        }
    }

    pub fn lo(&self) -> &Rational {
        match self {
            Bracket::Exact(v) | Bracket::Interval(v, _) => v,
        }
    }

    pub fn hi(&self) -> &Rational {
        match self {
            Bracket::Exact(v) | Bracket::Interval(_, v) => v,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Bracket::Exact(v) => Some(v),
            Bracket::Interval(..) => None,
        }
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bracket::Exact(v) => write!(f, "{v}"),
            Bracket::Interval(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

impl FromStr for Bracket {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            Some(body) => {
                let (a, b) = body.split_once(',').ok_or_else(|| Error::MalformedRational(s.to_string()))?;
                let (a, b): (Rational, Rational) = (a.parse()?, b.parse()?);
                if a > b {
                    return Err(Error::invariant("interval bounds reversed"));
                }
                Ok(Bracket::new(a, b))
            }
            None => Ok(Bracket::Exact(s.parse()?)),
        }
    }
}

impl Serialize for Bracket {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bracket {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One (k, model) row. Column order is the CSV order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance_id: String,
    pub n: usize,
    pub k: usize,
    pub model: String,
    pub opt_private: Rational,
    pub opt_persuasive_k: Rational,
    pub opt_public: Rational,
    pub opt_expected: Bracket,
    pub powr_k: Bracket,
    pub podr: Bracket,
    pub method: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub version: String,
    pub instance_hash: String,
    pub seed: u64,
    pub samples: u64,
    pub rows: Vec<BenchRow>,
}

impl BenchmarkReport {
    /// Row-wise chain `private >= expected >= persuasive_k >= public`,
    /// using the bracket ends that make each comparison checkable.
    pub fn ordering_holds(&self) -> bool {
        self.rows.iter().all(|r| {
            r.opt_private >= *r.opt_expected.hi()
                && r.opt_expected.hi() >= r.opt_expected.lo()
                && *r.opt_expected.hi() >= r.opt_persuasive_k
                && r.opt_persuasive_k >= r.opt_public
        })
    }
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub seed: u64,
    /// Samples per Monte Carlo estimate, used when a model's support is
    /// too large to enumerate.
    pub samples: u64,
    /// Fixed patterns at `n` up to this size also get a binary brute force.
    pub bruteforce_max_n: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { seed: 0, samples: 100_000, bruteforce_max_n: 3 }
    }
}

fn solve_opt(inst: &Instance, k: usize) -> Result<(Rational, SignalingScheme)> {
    let sol = lp::solve(&build_persuasive_lp(inst, k, Objective::Full)?)?;
    if !sol.is_optimal() {
        return Err(Error::Internal(format!("persuasive LP ended {:?}", sol.status)));
    }
    let scheme = scheme_from_solution(inst.n(), &sol.assignment)?;
    Ok((sol.value, scheme))
}

fn ratio(top: &Rational, b: &Bracket) -> Bracket {
    if b.lo().is_zero() {
        // an unbounded ratio is reported against the private optimum itself
        return Bracket::new(Rational::one(), top.clone().max(Rational::one()));
    }
    let lo = if b.hi().is_zero() { Rational::one() } else { top / b.hi() };
    Bracket::new(lo, top / b.lo())
}

/// Rows for every `k` in `ks` and every model.
///
/// `opt_expected` is bracketed: the upper end is the private optimum and
/// the lower end is the best downstream value among the `k`-persuasive LP
/// optimum, the private optimum's scheme, full information, and (fixed
/// patterns at small `n`) the binary brute force. Monte Carlo lower ends
/// are estimates and the row's method says so.
pub fn run_bench(
    inst: &Instance,
    instance_id: &str,
    ks: &[usize],
    models: &[LeakageModel],
    opts: &BenchOptions,
) -> Result<BenchmarkReport> {
    let n = inst.n();
    if let Some(&k) = ks.iter().find(|&&k| k + 1 > n) {
        return Err(Error::Domain(format!("k = {k} outside 0..={}", n - 1)));
    }
    for m in models {
        m.validate(n)?;
    }
    let (opt_private, private_scheme) = solve_opt(inst, 0)?;
    let (opt_public, _) = solve_opt(inst, n - 1)?;
    let prefix = optimal_private(inst).to_scheme();
    let full = full_information(inst);
    let mode = BestResponseMode::Standard;
    let mut rows = Vec::new();
    for &k in ks {
        let (opt_k, scheme_k) = solve_opt(inst, k)?;
        for model in models {
            let exact = model.support_size(n) <= EXACT_SUPPORT_CAP;
            let method = if exact {
                Method::Exact
            } else {
                Method::MonteCarlo { samples: opts.samples, seed: opts.seed }
            };
            let mut lo = Rational::zero();
            for s in [&scheme_k, &private_scheme, &prefix, &full] {
                let est = downstream_utility_model(inst, s, model, method, mode)?;
                lo = lo.max(est.point().clone());
            }
            let mut method_label = match method {
                Method::Exact => "exact".to_string(),
                Method::MonteCarlo { .. } => "mc".to_string(),
            };
            if let LeakageModel::Fixed { pattern } = model {
                if n <= opts.bruteforce_max_n {
                    let bf = bruteforce_optimal_responses(
                        inst,
                        vec![Alphabet::binary(); n],
                        pattern,
                        SearchMode::PerInformationSet,
                    )?;
                    lo = lo.max(bf.value);
                    method_label.push_str("+bruteforce");
                }
            }
            let hi = opt_private.clone();
            if lo > hi {
                if exact {
                    return Err(Error::Internal("downstream value above the private optimum".into()));
                }
                lo = hi.clone();
            }
            let expected = Bracket::new(lo, hi);
            rows.push(BenchRow {
                instance_id: instance_id.to_string(),
                n,
                k,
                model: model.label(),
                powr_k: ratio(&opt_private, &Bracket::Exact(opt_k.clone())),
                podr: ratio(&opt_private, &expected),
                opt_private: opt_private.clone(),
                opt_persuasive_k: opt_k.clone(),
                opt_public: opt_public.clone(),
                opt_expected: expected,
                method: method_label,
                seed: opts.seed,
            });
        }
    }
    Ok(BenchmarkReport {
        version: VERSION.to_string(),
        instance_hash: inst.hash(),
        seed: opts.seed,
        samples: opts.samples,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::appendix_c::appendix_c;
    use crate::rational::q;

    #[test]
    fn bracket_text() {
        let b: Bracket = "[1/2,3/4]".parse().unwrap();
        assert_eq!(b, Bracket::Interval(q(1, 2), q(3, 4)));
        assert_eq!(b.to_string(), "[1/2,3/4]");
        assert_eq!("5/7".parse::<Bracket>().unwrap(), Bracket::Exact(q(5, 7)));
        assert!("[3/4,1/2]".parse::<Bracket>().is_err());
    }

    #[test]
    fn cycle_row() {
        let c = appendix_c();
        let model = LeakageModel::Fixed { pattern: c.cycle };
        let r = run_bench(&c.instance, "worked-example", &[1], &[model], &BenchOptions::default()).unwrap();
        let row = &r.rows[0];
        assert_eq!(row.opt_private, q(9, 4));
        assert_eq!(row.opt_expected, Bracket::Interval(q(17, 8), q(9, 4)));
        assert!(r.ordering_holds());
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<BenchmarkReport>(&json).unwrap(), r);
    }
}
