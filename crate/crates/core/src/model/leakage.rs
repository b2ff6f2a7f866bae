use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{refuse_if, Error, Result};
use crate::model::set::{k_subsets, ReceiverSet};
use crate::rational::Rational;

/// Directed leakage graph; `sources[i]` holds every `j` with `j -> i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "PatternRepr", into = "PatternRepr")]
pub struct LeakagePattern {
    sources: Vec<ReceiverSet>,
}

#[derive(Serialize, Deserialize)]
struct PatternRepr {
    n: usize,
    /// `[from, to]`, 1-based.
    edges: Vec<(usize, usize)>,
}

impl TryFrom<PatternRepr> for LeakagePattern {
    type Error = Error;
    fn try_from(r: PatternRepr) -> Result<Self> {
        let edges = r
            .edges
            .iter()
            .map(|&(j, i)| {
                if j == 0 || i == 0 {
                    Err(Error::invariant("leakage edges are 1-based"))
                } else {
                    Ok((j - 1, i - 1))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        LeakagePattern::from_edges(r.n, &edges)
    }
}

impl From<LeakagePattern> for PatternRepr {
    fn from(p: LeakagePattern) -> Self {
        PatternRepr { n: p.n(), edges: p.edges().into_iter().map(|(j, i)| (j + 1, i + 1)).collect() }
    }
}

impl LeakagePattern {
    pub fn empty(n: usize) -> Self {
        LeakagePattern { sources: vec![ReceiverSet::EMPTY; n] }
    }

    /// Builds a pattern from 0-based `(from, to)` edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > ReceiverSet::CAPACITY {
            return Err(Error::invariant("pattern exceeds 64 receivers"));
        }
        let mut sources = vec![ReceiverSet::EMPTY; n];
        for &(j, i) in edges {
            if i >= n || j >= n {
                return Err(Error::invariant(format!("edge {}->{} outside 1..={n}", j + 1, i + 1)));
            }
            if i == j {
                return Err(Error::invariant("leakage pattern has a self-loop"));
            }
            if sources[i].contains(j) {
                return Err(Error::invariant("leakage pattern repeats an edge"));
            }
            sources[i] = sources[i].with(j);
        }
        Ok(LeakagePattern { sources })
    }

    pub fn from_sources(sources: Vec<ReceiverSet>) -> Result<Self> {
        let n = sources.len();
        for (i, s) in sources.iter().enumerate() {
            if s.contains(i) || !s.is_subset_of(ReceiverSet::full(n)) {
                return Err(Error::invariant("leakage sources out of range or self-loop"));
            }
        }
        Ok(LeakagePattern { sources })
    }

    /// Directed cycle where receiver `i` sees `i+1` and receiver `n` sees
    /// receiver 1.
    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| ((i + 1) % n, i)).collect();
        LeakagePattern::from_edges(n, &edges).expect("valid cycle")
    }

    pub fn n(&self) -> usize {
        self.sources.len()
    }

    pub fn sources(&self, i: usize) -> ReceiverSet {
        self.sources[i]
    }

    pub fn max_in_degree(&self) -> usize {
        self.sources.iter().map(|s| s.len()).max().unwrap_or(0)
    }

    /// 0-based `(from, to)` pairs sorted by `to`, then `from`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.sources.iter().enumerate().flat_map(|(i, s)| s.iter().map(move |j| (j, i))).collect()
    }
}

/// Weighted component of a finite mixture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: Rational,
    pub pattern: LeakagePattern,
}

/// Distribution over leakage patterns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LeakageModel {
    Fixed {
        pattern: LeakagePattern,
    },
    /// `k` random leakers all feeding one random center.
    KStar {
        k: usize,
    },
    /// `k` random receivers share signals among themselves.
    KClique {
        k: usize,
    },
    /// `k` random signals are seen by everyone.
    KBroadcast {
        k: usize,
    },
    /// Each receiver independently sees `k` random others.
    #[serde(rename = "ker")]
    KErdosRenyi {
        k: usize,
    },
    Mixture {
        components: Vec<MixtureComponent>,
    },
}

/// Largest exact support the evaluator will enumerate.
pub const EXACT_SUPPORT_CAP: u128 = 1_000_000;

impl LeakageModel {
    pub fn label(&self) -> String {
        match self {
            Self::Fixed { .. } => "fixed".into(),
            Self::KStar { k } => format!("kstar:{k}"),
            Self::KClique { k } => format!("kclique:{k}"),
            Self::KBroadcast { k } => format!("kbroadcast:{k}"),
            Self::KErdosRenyi { k } => format!("ker:{k}"),
            Self::Mixture { components } => format!("mix[{}]", components.len()),
        }
    }

    /// Checks the parameters against `n` receivers.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad_k = |k: usize, max: usize| {
            Error::Domain(format!("{} needs k <= {max} at n = {n} (got {k})", self.label()))
        };
        match self {
            Self::KStar { k } | Self::KErdosRenyi { k } if *k + 1 > n => Err(bad_k(*k, n - 1)),
            Self::KClique { k } | Self::KBroadcast { k } if *k > n => Err(bad_k(*k, n)),
            Self::Fixed { pattern } if pattern.n() != n => {
                Err(Error::Domain("pattern size differs from n".into()))
            }
            Self::Mixture { components } => {
                if components.is_empty() {
                    return Err(Error::invariant("mixture needs a component"));
                }
                if components.iter().any(|c| c.weight.is_negative() || c.pattern.n() != n) {
                    return Err(Error::invariant("mixture weights negative or sizes differ"));
                }
                if components.iter().map(|c| &c.weight).sum::<Rational>() != Rational::one() {
                    return Err(Error::invariant("mixture weights do not sum to 1"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Upper bound on the maximum in-degree of any pattern in the support.
    pub fn max_in_degree(&self, n: usize) -> usize {
        match self {
            Self::Fixed { pattern } => pattern.max_in_degree(),
            Self::KStar { k } | Self::KErdosRenyi { k } => *k,
            Self::KClique { k } => k.saturating_sub(1),
            Self::KBroadcast { k } => (*k).min(n.saturating_sub(1)),
            Self::Mixture { components } => {
                components.iter().map(|c| c.pattern.max_in_degree()).max().unwrap_or(0)
            }
        }
    }

    /// Number of equally likely (or weighted) patterns exact evaluation visits.
    pub fn support_size(&self, n: usize) -> u128 {
        let c = |a: usize, b: usize| binom(a as u128, b as u128);
        match self {
            Self::Fixed { .. } => 1,
            Self::Mixture { components } => components.len() as u128,
            Self::KStar { k } => (n as u128).saturating_mul(c(n - 1, *k)),
            Self::KClique { k } | Self::KBroadcast { k } => c(n, *k),
            Self::KErdosRenyi { k } => {
                let per = c(n - 1, *k);
                (0..n).try_fold(1u128, |acc, _| acc.checked_mul(per)).unwrap_or(u128::MAX)
            }
        }
    }

    /// Full support with exact probabilities; refused above the cap.
    pub fn support(&self, n: usize) -> Result<Vec<(Rational, LeakagePattern)>> {
        self.validate(n)?;
        let size = self.support_size(n);
        refuse_if("exact leakage support", size, EXACT_SUPPORT_CAP)?;
        let uniform = |patterns: Vec<LeakagePattern>| {
            let w = Rational::new(1, patterns.len() as i64);
            patterns.into_iter().map(|p| (w.clone(), p)).collect()
        };
        Ok(match self {
            Self::Fixed { pattern } => vec![(Rational::one(), pattern.clone())],
            Self::Mixture { components } => {
                components.iter().map(|c| (c.weight.clone(), c.pattern.clone())).collect()
            }
            Self::KStar { k } => {
                let mut out = Vec::new();
                for center in 0..n {
                    let others: Vec<usize> = (0..n).filter(|&j| j != center).collect();
                    for sub in k_subsets(n - 1, *k) {
                        out.push(star(n, center, sub.iter().map(|&x| others[x])));
                    }
                }
                uniform(out)
            }
            Self::KClique { k } => uniform(
                k_subsets(n, *k).into_iter().map(|s| clique(n, ReceiverSet::from_indices(s))).collect(),
            ),
            Self::KBroadcast { k } => uniform(
                k_subsets(n, *k).into_iter().map(|s| broadcast(n, ReceiverSet::from_indices(s))).collect(),
            ),
            Self::KErdosRenyi { k } => {
                let choices: Vec<Vec<ReceiverSet>> = (0..n)
                    .map(|i| {
                        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                        k_subsets(n - 1, *k)
                            .into_iter()
                            .map(|s| ReceiverSet::from_indices(s.iter().map(|&x| others[x])))
                            .collect()
                    })
                    .collect();
                let mut out = Vec::with_capacity(size as usize);
                let mut idx = vec![0usize; n];
                loop {
                    let sources = (0..n).map(|i| choices[i][idx[i]]).collect();
                    out.push(LeakagePattern { sources });
                    let Some(p) = (0..n).rev().find(|&p| idx[p] + 1 < choices[p].len()) else {
                        break;
                    };
                    idx[p] += 1;
                    idx[p + 1..].iter_mut().for_each(|x| *x = 0);
                }
                uniform(out)
            }
        })
    }
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn star(n: usize, center: usize, leakers: impl Iterator<Item = usize>) -> LeakagePattern {
    let mut sources = vec![ReceiverSet::EMPTY; n];
    sources[center] = ReceiverSet::from_indices(leakers);
    LeakagePattern { sources }
}

fn clique(n: usize, members: ReceiverSet) -> LeakagePattern {
    let sources =
        (0..n).map(|i| if members.contains(i) { members.without(i) } else { ReceiverSet::EMPTY }).collect();
    LeakagePattern { sources }
}

fn broadcast(n: usize, leakers: ReceiverSet) -> LeakagePattern {
    let sources = (0..n).map(|i| leakers.without(i)).collect();
    LeakagePattern { sources }
}

/// Generator for sample `index` of stream `seed`: ChaCha8 keyed by the
/// seed, with the index as the stream id.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws one pattern; a pure function of `(model, n, seed, index)`.
pub fn sample_pattern(model: &LeakageModel, n: usize, seed: u64, index: u64) -> Result<LeakagePattern> {
    model.validate(n)?;
    let mut rng = sample_rng(seed, index);
    Ok(draw(model, n, &mut rng))
}

pub(crate) fn draw(model: &LeakageModel, n: usize, rng: &mut impl Rng) -> LeakagePattern {
    let subset = |rng: &mut _, m: usize, k: usize| index::sample(rng, m, k).into_vec();
    match model {
        LeakageModel::Fixed { pattern } => pattern.clone(),
        LeakageModel::Mixture { components } => {
            // exact rational weights drive a float draw; only sampling uses this
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            for c in components {
                acc += c.weight.to_f64();
                if u < acc {
                    return c.pattern.clone();
                }
            }
            components.last().expect("validated").pattern.clone()
        }
        LeakageModel::KStar { k } => {
            let center = rng.gen_range(0..n);
            let others: Vec<usize> = (0..n).filter(|&j| j != center).collect();
            let picks = subset(rng, n - 1, *k);
            star(n, center, picks.into_iter().map(|x| others[x]))
        }
        LeakageModel::KClique { k } => clique(n, ReceiverSet::from_indices(subset(rng, n, *k))),
        LeakageModel::KBroadcast { k } => broadcast(n, ReceiverSet::from_indices(subset(rng, n, *k))),
        LeakageModel::KErdosRenyi { k } => {
            let sources = (0..n)
                .map(|i| {
                    let picks = subset(rng, n - 1, *k);
                    ReceiverSet::from_indices(picks.into_iter().map(|x| if x >= i { x + 1 } else { x }))
                })
                .collect();
            LeakagePattern { sources }
        }
    }
}
