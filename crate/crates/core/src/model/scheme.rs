use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::instance::Instance;
use crate::model::set::ReceiverSet;
use crate::rational::Rational;

/// Symbol indices, one per receiver. Ordering is lexicographic with
/// receiver 1 most significant.
pub type Profile = Vec<u8>;

/// A receiver's finite signal alphabet; each symbol is one character.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::invariant("alphabet must be nonempty"));
        }
        if symbols.len() > u8::MAX as usize {
            return Err(Error::invariant("alphabet has more than 255 symbols"));
        }
        for (i, c) in symbols.iter().enumerate() {
            if symbols[..i].contains(c) {
                return Err(Error::invariant(format!("alphabet repeats symbol {c:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// The direct alphabet `{0, 1}`; index 1 recommends adoption.
    pub fn binary() -> Self {
        Alphabet { symbols: vec!['0', '1'] }
    }

    /// Symbols `0, 1, ..., size-1` (digits, then letters).
    pub fn numbered(size: usize) -> Result<Self> {
        const DIGITS: &str = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
        if size == 0 || size > DIGITS.len() {
            return Err(Error::invariant(format!("alphabet size {size} outside 1..={}", DIGITS.len())));
        }
        Alphabet::new(DIGITS.chars().take(size))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.symbols == ['0', '1']
    }

    pub fn symbol(&self, idx: u8) -> char {
        self.symbols[idx as usize]
    }

    pub fn index_of(&self, c: char) -> Option<u8> {
        self.symbols.iter().position(|&s| s == c).map(|p| p as u8)
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }
}

impl Serialize for Alphabet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.symbols.iter().collect::<String>())
    }
}

impl<'de> Deserialize<'de> for Alphabet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Size(usize),
            Symbols(String),
        }
        let raw = Raw::deserialize(d)?;
        match raw {
            Raw::Size(n) => Alphabet::numbered(n),
            Raw::Symbols(s) => Alphabet::new(s.chars()),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Pair of state-conditional distributions over signal profiles, stored
/// sparsely with zero entries dropped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SchemeRepr", into = "SchemeRepr")]
pub struct SignalingScheme {
    alphabets: Vec<Alphabet>,
    mu: [BTreeMap<Profile, Rational>; 2],
}

impl SignalingScheme {
    pub fn new(
        alphabets: Vec<Alphabet>,
        mu0: impl IntoIterator<Item = (Profile, Rational)>,
        mu1: impl IntoIterator<Item = (Profile, Rational)>,
    ) -> Result<Self> {
        if alphabets.is_empty() {
            return Err(Error::invariant("scheme needs at least one receiver"));
        }
        let collect = |entries: &mut dyn Iterator<Item = (Profile, Rational)>, name: &str| {
            let mut map = BTreeMap::new();
            let mut total = Rational::zero();
            for (p, v) in entries {
                if p.len() != alphabets.len() || p.iter().zip(&alphabets).any(|(&s, a)| s as usize >= a.len())
                {
                    return Err(Error::invariant(format!("{name} profile outside the alphabets")));
                }
                if v.is_negative() {
                    return Err(Error::invariant(format!("{name} has a negative probability")));
                }
                total += &v;
                if !v.is_zero() {
                    let slot: &mut Rational = map.entry(p).or_insert_with(Rational::zero);
                    *slot += v;
                }
            }
            if total != Rational::one() {
                return Err(Error::invariant(format!("{name} does not sum to 1 (sum {total})")));
            }
            Ok(map)
        };
        let mu0 = collect(&mut mu0.into_iter(), "mu0")?;
        let mu1 = collect(&mut mu1.into_iter(), "mu1")?;
        Ok(SignalingScheme { alphabets, mu: [mu0, mu1] })
    }

    /// Direct scheme over `{0,1}^n` given as distributions over adopter sets.
    pub fn from_sets(
        n: usize,
        mu0: impl IntoIterator<Item = (ReceiverSet, Rational)>,
        mu1: impl IntoIterator<Item = (ReceiverSet, Rational)>,
    ) -> Result<Self> {
        let conv = |(s, v): (ReceiverSet, Rational)| (set_to_profile(s, n), v);
        SignalingScheme::new(
            vec![Alphabet::binary(); n],
            mu0.into_iter().map(conv),
            mu1.into_iter().map(conv),
        )
    }

    pub fn n(&self) -> usize {
        self.alphabets.len()
    }

    pub fn alphabets(&self) -> &[Alphabet] {
        &self.alphabets
    }

    pub fn is_binary(&self) -> bool {
        self.alphabets.iter().all(Alphabet::is_binary)
    }

    pub fn require_binary(&self, what: &str) -> Result<()> {
        if self.is_binary() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("{what} needs binary alphabets")))
        }
    }

    /// `mu_w` for `w` in `{0, 1}`.
    pub fn mu(&self, state: usize) -> &BTreeMap<Profile, Rational> {
        &self.mu[state]
    }

    pub fn mu0(&self) -> &BTreeMap<Profile, Rational> {
        &self.mu[0]
    }

    pub fn mu1(&self) -> &BTreeMap<Profile, Rational> {
        &self.mu[1]
    }

    pub fn prob(&self, state: usize, profile: &[u8]) -> Rational {
        self.mu[state].get(profile).cloned().unwrap_or_else(Rational::zero)
    }

    /// Number of profiles in the product of the alphabets.
    pub fn profile_space_size(&self) -> u128 {
        self.alphabets.iter().try_fold(1u128, |acc, a| acc.checked_mul(a.len() as u128)).unwrap_or(u128::MAX)
    }

    /// Receivers whose signal has symbol index 1 (the adoption
    /// recommendation for binary alphabets).
    pub fn recommended(profile: &[u8]) -> ReceiverSet {
        ReceiverSet::from_indices(profile.iter().enumerate().filter(|(_, &s)| s == 1).map(|(i, _)| i))
    }

    /// Sender utility if every receiver follows its recommendation, split
    /// into the `w0` and `w1` parts, each already weighted by its prior.
    pub fn obedient_utility_parts(&self, inst: &Instance) -> (Rational, Rational) {
        let part = |state: usize| -> Rational {
            self.mu[state].iter().map(|(p, v)| v * inst.value(Self::recommended(p))).sum()
        };
        let lambda = inst.lambda();
        ((Rational::one() - lambda) * part(0), lambda * part(1))
    }

    pub fn obedient_utility(&self, inst: &Instance) -> Rational {
        let (a, b) = self.obedient_utility_parts(inst);
        a + b
    }

    pub fn render_profile(&self, profile: &[u8]) -> String {
        profile.iter().zip(&self.alphabets).map(|(&s, a)| a.symbol(s)).collect()
    }

    pub fn parse_profile(&self, text: &str) -> Result<Profile> {
        parse_profile(&self.alphabets, text)
    }
}

pub fn set_to_profile(set: ReceiverSet, n: usize) -> Profile {
    (0..n).map(|i| set.contains(i) as u8).collect()
}

pub fn parse_profile(alphabets: &[Alphabet], text: &str) -> Result<Profile> {
    let chars: Vec<char> = text.chars().collect();
    if chars.len() != alphabets.len() {
        return Err(Error::invariant(format!(
            "profile {text:?} has {} symbols, expected {}",
            chars.len(),
            alphabets.len()
        )));
    }
    chars
        .iter()
        .zip(alphabets)
        .map(|(&c, a)| {
            a.index_of(c).ok_or_else(|| {
                Error::invariant(format!("profile {text:?} uses symbol {c:?} outside its alphabet"))
            })
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct SchemeRepr {
    alphabets: Vec<Alphabet>,
    mu0: BTreeMap<String, Rational>,
    mu1: BTreeMap<String, Rational>,
}

impl TryFrom<SchemeRepr> for SignalingScheme {
    type Error = Error;
    fn try_from(r: SchemeRepr) -> Result<Self> {
        let parse = |m: BTreeMap<String, Rational>| -> Result<Vec<(Profile, Rational)>> {
            m.into_iter().map(|(k, v)| Ok((parse_profile(&r.alphabets, &k)?, v))).collect()
        };
        let mu0 = parse(r.mu0)?;
        let mu1 = parse(r.mu1)?;
        SignalingScheme::new(r.alphabets, mu0, mu1)
    }
}

impl From<SignalingScheme> for SchemeRepr {
    fn from(s: SignalingScheme) -> Self {
        let render =
            |state: usize| s.mu[state].iter().map(|(p, v)| (s.render_profile(p), v.clone())).collect();
        SchemeRepr { mu0: render(0), mu1: render(1), alphabets: s.alphabets.clone() }
    }
}

/// Direct scheme supported on the empty set and the prefixes `[j]`;
/// index `j` holds the mass of `[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixScheme {
    pub mu0: Vec<Rational>,
    pub mu1: Vec<Rational>,
}

impl PrefixScheme {
    pub fn new(mu0: Vec<Rational>, mu1: Vec<Rational>) -> Result<Self> {
        if mu0.len() != mu1.len() || mu0.len() < 2 {
            return Err(Error::invariant("prefix masses must have length n+1 >= 2"));
        }
        for (name, m) in [("mu0", &mu0), ("mu1", &mu1)] {
            if m.iter().any(Rational::is_negative) {
                return Err(Error::invariant(format!("{name} has a negative probability")));
            }
            if m.iter().sum::<Rational>() != Rational::one() {
                return Err(Error::invariant(format!("{name} does not sum to 1")));
            }
        }
        Ok(PrefixScheme { mu0, mu1 })
    }

    pub fn n(&self) -> usize {
        self.mu0.len() - 1
    }

    pub fn to_scheme(&self) -> SignalingScheme {
        let n = self.n();
        let entries = |m: &[Rational]| -> Vec<(ReceiverSet, Rational)> {
            m.iter().enumerate().map(|(j, v)| (ReceiverSet::prefix(j), v.clone())).collect()
        };
        SignalingScheme::from_sets(n, entries(&self.mu0), entries(&self.mu1)).expect("prefix scheme is valid")
    }

    /// Recovers prefix masses if the scheme is direct and prefix-supported.
    pub fn from_scheme(scheme: &SignalingScheme) -> Option<Self> {
        if !scheme.is_binary() {
            return None;
        }
        let n = scheme.n();
        let mut out = [vec![Rational::zero(); n + 1], vec![Rational::zero(); n + 1]];
        for (state, masses) in out.iter_mut().enumerate() {
            for (p, v) in scheme.mu(state) {
                let set = SignalingScheme::recommended(p);
                let j = set.len();
                if set != ReceiverSet::prefix(j) {
                    return None;
                }
                masses[j] = v.clone();
            }
        }
        let [mu0, mu1] = out;
        Some(PrefixScheme { mu0, mu1 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn one_entry_map() {
        let s =
            SignalingScheme::from_sets(3, [(ReceiverSet::EMPTY, q(1, 1))], [(ReceiverSet::full(3), q(1, 1))])
                .unwrap();
        let js = serde_json::to_value(&s).unwrap();
        assert_eq!(js["mu1"].as_object().unwrap().len(), 1);
        assert_eq!(js["mu1"]["111"], "1");
        assert_eq!(js["alphabets"][0], "01");
        let back: SignalingScheme = serde_json::from_value(js).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn general_alphabets() {
        let text = r#"{"alphabets":["+-0","XY",3],
            "mu0":{"+X0":"1/2","-Y2":"1/2"},"mu1":{"0X1":"1"}}"#;
        let s: SignalingScheme = serde_json::from_str(text).unwrap();
        assert!(!s.is_binary());
        assert_eq!(s.prob(0, &[1, 1, 2]), q(1, 2));
        assert_eq!(s.profile_space_size(), 18);
        let bad = text.replace("\"-Y2\"", "\"-Z2\"");
        assert!(serde_json::from_str::<SignalingScheme>(&bad).is_err());
    }

    #[test]
    fn sums_checked() {
        let err =
            SignalingScheme::from_sets(1, [(ReceiverSet::EMPTY, q(1, 2))], [(ReceiverSet::full(1), q(1, 1))])
                .unwrap_err();
        assert!(err.to_string().contains("mu0 does not sum to 1"));
    }

    #[test]
    fn prefix_round_trip() {
        let p = PrefixScheme::new(
            vec![q(1, 4), q(1, 4), q(1, 4), q(1, 4)],
            vec![q(0, 1), q(0, 1), q(0, 1), q(1, 1)],
        )
        .unwrap();
        let s = p.to_scheme();
        assert_eq!(s.prob(0, &[1, 1, 0]), q(1, 4));
        assert_eq!(PrefixScheme::from_scheme(&s).unwrap(), p);
        let off = SignalingScheme::from_sets(
            2,
            [(ReceiverSet::from_indices([1]), q(1, 1))],
            [(ReceiverSet::full(2), q(1, 1))],
        )
        .unwrap();
        assert!(PrefixScheme::from_scheme(&off).is_none());
    }
}
