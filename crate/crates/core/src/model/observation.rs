use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::scheme::SignalingScheme;

/// A receiver's information set: its own signal plus leaked
/// `(sender, symbol)` pairs. Indices are 0-based internally.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Observation {
    pub receiver: usize,
    pub own: u8,
    /// Sorted by sender; senders distinct and different from `receiver`.
    pub leaked: Vec<(usize, u8)>,
}

impl Observation {
    pub fn new(receiver: usize, own: u8, mut leaked: Vec<(usize, u8)>) -> Result<Self> {
        leaked.sort_unstable();
        if leaked.iter().any(|&(j, _)| j == receiver) {
            return Err(Error::invariant("observation leaks the receiver's own signal"));
        }
        if leaked.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invariant("observation repeats a sender"));
        }
        Ok(Observation { receiver, own, leaked })
    }

    /// No leaked signals.
    pub fn private(receiver: usize, own: u8) -> Self {
        Observation { receiver, own, leaked: Vec::new() }
    }

    /// Checks every index against the scheme's receivers and alphabets.
    pub fn validate(&self, scheme: &SignalingScheme) -> Result<()> {
        let a = scheme.alphabets();
        let ok = self.receiver < a.len()
            && (self.own as usize) < a[self.receiver].len()
            && self.leaked.iter().all(|&(j, v)| j < a.len() && (v as usize) < a[j].len());
        if ok {
            Ok(())
        } else {
            Err(Error::Domain("observation outside the scheme's alphabets".into()))
        }
    }

    /// JSON view with 1-based receivers and symbol characters.
    pub fn render(&self, scheme: &SignalingScheme) -> ObservationView {
        let a = scheme.alphabets();
        ObservationView {
            receiver: self.receiver + 1,
            own: a[self.receiver].symbol(self.own).to_string(),
            leaked: self.leaked.iter().map(|&(j, v)| (j + 1, a[j].symbol(v).to_string())).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObservationView {
    pub receiver: usize,
    pub own: String,
    pub leaked: Vec<(usize, String)>,
}

/// `I |> s_{-i}`: every leaked pair agrees with the profile.
pub fn consistent(leaked: &[(usize, u8)], profile: &[u8]) -> bool {
    leaked.iter().all(|&(j, v)| profile[j] == v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consistency() {
        // profiles carry a placeholder at the observer's own slot
        assert!(consistent(&[(1, 0)], &[9, 0, 1]));
        assert!(!consistent(&[(1, 0)], &[9, 1, 0]));
        assert!(consistent(&[], &[1, 1, 0]));
    }

    #[test]
    fn invariants() {
        assert!(Observation::new(0, 1, vec![(0, 1)]).is_err());
        assert!(Observation::new(0, 1, vec![(2, 1), (2, 0)]).is_err());
        let o = Observation::new(0, 1, vec![(2, 0), (1, 1)]).unwrap();
        assert_eq!(o.leaked, vec![(1, 1), (2, 0)]);
    }
}
