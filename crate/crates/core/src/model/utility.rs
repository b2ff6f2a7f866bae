use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::set::ReceiverSet;
use crate::rational::Rational;

/// Largest receiver count for which explicit tables and exhaustive checks run.
pub const TABLE_MAX_N: usize = 12;

/// Monotone sender utility `V: 2^N -> Q` with `V(empty) = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "UtilityRepr", into = "UtilityRepr")]
pub enum UtilityFunction {
    /// One value per subset, indexed by bitmask.
    Table {
        n: usize,
        values: Vec<Rational>,
    },
    /// `V(S) = w[length of the longest prefix contained in S]`, `w[0] = 0`.
    Prefix {
        weights: Vec<Rational>,
    },
    /// `V(S) = f(|S|)` for concave nondecreasing `f`.
    Anonymous {
        f: Vec<Rational>,
    },
    /// Maximum over additive clauses.
    Xos {
        clauses: Vec<Vec<Rational>>,
    },
    Additive {
        weights: Vec<Rational>,
    },
}

impl UtilityFunction {
    pub fn table(n: usize, values: Vec<Rational>) -> Result<Self> {
        Self::Table { n, values }.validated()
    }

    pub fn prefix(weights: Vec<Rational>) -> Result<Self> {
        Self::Prefix { weights }.validated()
    }

    pub fn anonymous(f: Vec<Rational>) -> Result<Self> {
        Self::Anonymous { f }.validated()
    }

    pub fn xos(clauses: Vec<Vec<Rational>>) -> Result<Self> {
        Self::Xos { clauses }.validated()
    }

    pub fn additive(weights: Vec<Rational>) -> Result<Self> {
        Self::Additive { weights }.validated()
    }

    /// Table built by evaluating `f` on every subset of `n` receivers.
    pub fn from_fn(n: usize, f: impl Fn(ReceiverSet) -> Rational) -> Result<Self> {
        if n > TABLE_MAX_N {
            return Err(Error::SizeRefused {
                what: "explicit utility table".into(),
                estimate: 1u128 << n,
                cap: 1u128 << TABLE_MAX_N,
            });
        }
        let values = (0..1u64 << n).map(|m| f(ReceiverSet(m))).collect();
        Self::table(n, values)
    }

    /// Number of receivers the function is defined over.
    pub fn arity(&self) -> usize {
        match self {
            Self::Table { n, .. } => *n,
            Self::Prefix { weights } => weights.len().saturating_sub(1),
            Self::Anonymous { f } => f.len().saturating_sub(1),
            Self::Xos { clauses } => clauses.first().map_or(0, Vec::len),
            Self::Additive { weights } => weights.len(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Table { .. } => "table",
            Self::Prefix { .. } => "prefix",
            Self::Anonymous { .. } => "anonymous",
            Self::Xos { .. } => "xos",
            Self::Additive { .. } => "additive",
        }
    }

    /// `V(S)`, rejecting receivers outside `1..=n`.
    pub fn evaluate(&self, set: ReceiverSet) -> Result<Rational> {
        let n = self.arity();
        if !set.is_subset_of(ReceiverSet::full(n)) {
            return Err(Error::Domain(format!("subset {set:?} has receivers outside 1..={n}")));
        }
        Ok(self.value(set))
    }

    /// `V(S)` without range checks; bits beyond `n` are ignored.
    pub fn value(&self, set: ReceiverSet) -> Rational {
        let n = self.arity();
        let set = set.intersection(ReceiverSet::full(n));
        match self {
            Self::Table { values, .. } => values[set.0 as usize].clone(),
            Self::Prefix { weights } => weights[set.longest_prefix(n)].clone(),
            Self::Anonymous { f } => f[set.len()].clone(),
            Self::Xos { clauses } => clauses
                .iter()
                .map(|c| set.iter().map(|i| &c[i]).sum::<Rational>())
                .max()
                .unwrap_or_else(Rational::zero),
            Self::Additive { weights } => set.iter().map(|i| &weights[i]).sum(),
        }
    }

    /// All `2^n` values, indexed by bitmask.
    pub fn materialize(&self) -> Result<Vec<Rational>> {
        let n = self.arity();
        if n > TABLE_MAX_N {
            return Err(Error::SizeRefused {
                what: "utility materialization".into(),
                estimate: 1u128 << n.min(100),
                cap: 1u128 << TABLE_MAX_N,
            });
        }
        Ok((0..1u64 << n).map(|m| self.value(ReceiverSet(m))).collect())
    }

    /// Same function over `n + pad` receivers; the extra receivers never
    /// change the value.
    pub fn padded(&self, pad: usize) -> Result<Self> {
        let n = self.arity();
        match self {
            Self::Prefix { weights } => {
                let mut w = weights.clone();
                let last = w[n].clone();
                w.extend(std::iter::repeat_n(last, pad));
                Self::prefix(w)
            }
            Self::Xos { clauses } => Self::xos(
                clauses
                    .iter()
                    .map(|c| {
                        let mut c = c.clone();
                        c.extend(std::iter::repeat_n(Rational::zero(), pad));
                        c
                    })
                    .collect(),
            ),
            Self::Additive { weights } => {
                let mut w = weights.clone();
                w.extend(std::iter::repeat_n(Rational::zero(), pad));
                Self::additive(w)
            }
            Self::Table { .. } | Self::Anonymous { .. } => {
                let base = ReceiverSet::full(n);
                Self::from_fn(n + pad, |s| self.value(s.intersection(base)))
            }
        }
    }

    fn validated(self) -> Result<Self> {
        let nonneg = |v: &[Rational], what: &str| -> Result<()> {
            if v.iter().any(Rational::is_negative) {
                Err(Error::invariant(format!("{what} must be nonnegative")))
            } else {
                Ok(())
            }
        };
        let nondecreasing = |v: &[Rational], what: &str| -> Result<()> {
            if v.windows(2).any(|w| w[1] < w[0]) {
                Err(Error::invariant(format!("{what} not nondecreasing")))
            } else {
                Ok(())
            }
        };
        match &self {
            Self::Table { n, values } => {
                if *n > TABLE_MAX_N {
                    return Err(Error::SizeRefused {
                        what: "explicit utility table".into(),
                        estimate: 1u128 << (*n).min(100),
                        cap: 1u128 << TABLE_MAX_N,
                    });
                }
                if values.len() != 1usize << n {
                    return Err(Error::invariant(format!(
                        "utility table has {} entries, expected 2^{n}",
                        values.len()
                    )));
                }
            }
            Self::Prefix { weights } => {
                if weights.is_empty() {
                    return Err(Error::invariant("prefix weights must include w[0]"));
                }
                nondecreasing(weights, "prefix weights")?;
            }
            Self::Anonymous { f } => {
                if f.is_empty() {
                    return Err(Error::invariant("anonymous f must include f(0)"));
                }
                nondecreasing(f, "anonymous f")?;
                let concave = f.windows(3).all(|w| &w[2] - &w[1] <= &w[1] - &w[0]);
                if !concave {
                    return Err(Error::invariant("anonymous f not concave"));
                }
            }
            Self::Xos { clauses } => {
                if clauses.is_empty() {
                    return Err(Error::invariant("xos needs at least one clause"));
                }
                let n = clauses[0].len();
                if clauses.iter().any(|c| c.len() != n) {
                    return Err(Error::invariant("xos clauses differ in length"));
                }
                for c in clauses {
                    nonneg(c, "xos clause weights")?;
                }
            }
            Self::Additive { weights } => nonneg(weights, "additive weights")?,
        }
        if !self.value(ReceiverSet::EMPTY).is_zero() {
            return Err(Error::invariant("V(empty set) must be 0"));
        }
        let n = self.arity();
        if n > ReceiverSet::CAPACITY {
            return Err(Error::invariant("more than 64 receivers"));
        }
        if n <= TABLE_MAX_N && !self.is_monotone_exhaustive() {
            return Err(Error::invariant("utility not monotone"));
        }
        Ok(self)
    }

    /// `V(S) <= V(S + i)` for every `S` and `i`; enough for monotonicity.
    fn is_monotone_exhaustive(&self) -> bool {
        let n = self.arity();
        let values: Vec<Rational> = (0..1u64 << n).map(|m| self.value(ReceiverSet(m))).collect();
        (0..1u64 << n)
            .all(|m| (0..n).all(|i| m >> i & 1 == 1 || values[m as usize] <= values[(m | 1 << i) as usize]))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum UtilityRepr {
    Table { n: usize, values: BTreeMap<String, Rational> },
    Prefix { weights: Vec<Rational> },
    Anonymous { f: Vec<Rational> },
    Xos { clauses: Vec<Vec<Rational>> },
    Additive { weights: Vec<Rational> },
}

impl TryFrom<UtilityRepr> for UtilityFunction {
    type Error = Error;

    fn try_from(r: UtilityRepr) -> Result<Self> {
        match r {
            UtilityRepr::Table { n, values } => {
                if n > TABLE_MAX_N {
                    return Err(Error::invariant(format!("utility table n={n} exceeds {TABLE_MAX_N}")));
                }
                let mut table = vec![None; 1 << n];
                for (key, v) in values {
                    let mask = parse_bits(&key, n)?;
                    table[mask.0 as usize] = Some(v);
                }
                let values = table
                    .into_iter()
                    .enumerate()
                    .map(|(m, v)| {
                        v.ok_or_else(|| {
                            Error::invariant(format!(
                                "utility table missing subset {}",
                                ReceiverSet(m as u64).to_bits(n)
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                UtilityFunction::table(n, values)
            }
            UtilityRepr::Prefix { weights } => UtilityFunction::prefix(weights),
            UtilityRepr::Anonymous { f } => UtilityFunction::anonymous(f),
            UtilityRepr::Xos { clauses } => UtilityFunction::xos(clauses),
            UtilityRepr::Additive { weights } => UtilityFunction::additive(weights),
        }
    }
}

impl From<UtilityFunction> for UtilityRepr {
    fn from(u: UtilityFunction) -> Self {
        match u {
            UtilityFunction::Table { n, values } => UtilityRepr::Table {
                n,
                values: values
                    .into_iter()
                    .enumerate()
                    .map(|(m, v)| (ReceiverSet(m as u64).to_bits(n), v))
                    .collect(),
            },
            UtilityFunction::Prefix { weights } => UtilityRepr::Prefix { weights },
            UtilityFunction::Anonymous { f } => UtilityRepr::Anonymous { f },
            UtilityFunction::Xos { clauses } => UtilityRepr::Xos { clauses },
            UtilityFunction::Additive { weights } => UtilityRepr::Additive { weights },
        }
    }
}

/// Parses a 0/1 string (receiver 1 first) into a set.
pub fn parse_bits(bits: &str, n: usize) -> Result<ReceiverSet> {
    if bits.chars().count() != n {
        return Err(Error::invariant(format!("subset {bits:?} must have exactly {n} bits")));
    }
    bits.chars().enumerate().try_fold(ReceiverSet::EMPTY, |s, (i, c)| match c {
        '0' => Ok(s),
        '1' => Ok(s.with(i)),
        _ => Err(Error::invariant(format!("subset {bits:?} is not a 0/1 string"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_int(x)).collect()
    }

    #[test]
    fn prefix_values() {
        let u = UtilityFunction::prefix(ints(&[0, 1, 2, 3])).unwrap();
        assert_eq!(u.evaluate(ReceiverSet::from_indices([0, 1])).unwrap(), q(2, 1));
        assert_eq!(u.evaluate(ReceiverSet::EMPTY).unwrap(), Rational::zero());
        let hard = UtilityFunction::prefix(ints(&[0, 2, 6, 14])).unwrap();
        let s = ReceiverSet::from_indices([0, 2]);
        // brute force: sum of 2^i over i with [i] inside S
        let brute: i64 = (1..=3).filter(|&i| ReceiverSet::prefix(i).is_subset_of(s)).map(|i| 1 << i).sum();
        assert_eq!(hard.evaluate(s).unwrap(), Rational::from_int(brute));
        assert_eq!(brute, 2);
    }

    #[test]
    fn out_of_range_subset() {
        let u = UtilityFunction::additive(ints(&[1, 1])).unwrap();
        assert!(matches!(u.evaluate(ReceiverSet::from_indices([2])), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_bad_data() {
        assert!(UtilityFunction::prefix(ints(&[0, 2, 1])).is_err());
        assert!(UtilityFunction::prefix(ints(&[1, 2])).is_err());
        assert!(UtilityFunction::anonymous(ints(&[0, 1, 3])).is_err());
        assert!(UtilityFunction::xos(vec![ints(&[1, -1])]).is_err());
        let nonmono = vec![q(0, 1), q(2, 1), q(1, 1), q(1, 1)];
        assert!(UtilityFunction::table(2, nonmono).is_err());
    }

    #[test]
    fn xos_matches_table() {
        let u = UtilityFunction::xos(vec![ints(&[1, 0, 2]), ints(&[0, 3, 0])]).unwrap();
        let t = UtilityFunction::table(3, u.materialize().unwrap()).unwrap();
        for m in 0..8 {
            assert_eq!(u.value(ReceiverSet(m)), t.value(ReceiverSet(m)));
        }
        assert_eq!(u.value(ReceiverSet(0b111)), q(3, 1));
    }

    #[test]
    fn json_shapes() {
        let u = UtilityFunction::prefix(ints(&[0, 1, 2, 3])).unwrap();
        let js = serde_json::to_value(&u).unwrap();
        assert_eq!(js["kind"], "prefix");
        assert_eq!(js["weights"][3], "3");
        let t = UtilityFunction::from_fn(2, |s| Rational::from_int(s.len() as i64)).unwrap();
        let text = serde_json::to_string(&t).unwrap();
        assert!(text.contains("\"11\":\"2\""));
        let back: UtilityFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
        let missing = r#"{"kind":"table","n":1,"values":{"0":"0"}}"#;
        assert!(serde_json::from_str::<UtilityFunction>(missing).is_err());
    }

    #[test]
    fn padding_keeps_values() {
        let u = UtilityFunction::prefix(ints(&[0, 2, 6])).unwrap();
        let p = u.padded(2).unwrap();
        assert_eq!(p.arity(), 4);
        for m in 0..16u64 {
            assert_eq!(p.value(ReceiverSet(m)), u.value(ReceiverSet(m & 0b11)));
        }
    }
}
