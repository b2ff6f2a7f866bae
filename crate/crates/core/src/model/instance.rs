use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::set::ReceiverSet;
use crate::model::utility::UtilityFunction;
use crate::rational::Rational;

/// Prior `lambda = Pr[w1]`, persuasion levels sorted descending, and the
/// sender's utility.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct Instance {
    n: usize,
    lambda: Rational,
    theta: Vec<Rational>,
    utility: UtilityFunction,
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    n: usize,
    lambda: Rational,
    theta: Vec<Rational>,
    utility: UtilityFunction,
}

impl TryFrom<InstanceRepr> for Instance {
    type Error = Error;
    fn try_from(r: InstanceRepr) -> Result<Self> {
        Instance::new(r.n, r.lambda, r.theta, r.utility)
    }
}

impl From<Instance> for InstanceRepr {
    fn from(i: Instance) -> Self {
        InstanceRepr { n: i.n, lambda: i.lambda, theta: i.theta, utility: i.utility }
    }
}

impl Instance {
    pub fn new(n: usize, lambda: Rational, theta: Vec<Rational>, utility: UtilityFunction) -> Result<Self> {
        if n == 0 {
            return Err(Error::invariant("n must be at least 1"));
        }
        if n > ReceiverSet::CAPACITY {
            return Err(Error::invariant("n exceeds 64 receivers"));
        }
        if !(lambda.is_positive() && lambda < Rational::one()) {
            return Err(Error::invariant("lambda not in (0,1)"));
        }
        if theta.len() != n {
            return Err(Error::invariant(format!("theta has {} entries, expected {n}", theta.len())));
        }
        if theta.iter().any(|t| t.is_negative() || *t > Rational::one()) {
            return Err(Error::invariant("theta not in [0,1]"));
        }
        if theta.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invariant("theta not sorted descending"));
        }
        if utility.arity() != n {
            return Err(Error::invariant(format!(
                "utility defined over {} receivers, expected {n}",
                utility.arity()
            )));
        }
        Ok(Instance { n, lambda, theta, utility })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn theta(&self) -> &[Rational] {
        &self.theta
    }

    /// `theta_i` for a 0-based receiver index.
    pub fn theta_at(&self, i: usize) -> &Rational {
        &self.theta[i]
    }

    /// `theta_j` with 1-based `j`, extended by `theta_0 = 1` and
    /// `theta_{n+1} = 0`.
    pub fn theta_ext(&self, j: usize) -> Rational {
        match j {
            0 => Rational::one(),
            j if j > self.n => Rational::zero(),
            j => self.theta[j - 1].clone(),
        }
    }

    pub fn utility(&self) -> &UtilityFunction {
        &self.utility
    }

    pub fn value(&self, set: ReceiverSet) -> Rational {
        self.utility.value(set)
    }

    /// Same instance with `utility` swapped in.
    pub fn with_utility(&self, utility: UtilityFunction) -> Result<Self> {
        Instance::new(self.n, self.lambda.clone(), self.theta.clone(), utility)
    }

    /// Appends `pad` receivers with `theta = 0` that never change `V`.
    pub fn pad_dummies(&self, pad: usize) -> Result<Self> {
        let mut theta = self.theta.clone();
        theta.extend(std::iter::repeat_n(Rational::zero(), pad));
        Instance::new(self.n + pad, self.lambda.clone(), theta, self.utility.padded(pad)?)
    }

    /// Closed-form `(1-lambda) * sum_j (theta_j - theta_{j+1}) V([j])`.
    pub fn prefix_private_omega0(&self) -> Rational {
        let sum: Rational = (1..=self.n)
            .map(|j| (self.theta_ext(j) - self.theta_ext(j + 1)) * self.value(ReceiverSet::prefix(j)))
            .sum();
        (Rational::one() - &self.lambda) * sum
    }

    /// `lambda V(N)` plus the prefix omega0 term; the private optimum when
    /// `V` is supermodular.
    pub fn prefix_private_value(&self) -> Rational {
        &self.lambda * self.value(ReceiverSet::full(self.n)) + self.prefix_private_omega0()
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("instance serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `theta_i = lambda/(1-lambda) * p/(1-p)` for a receiver whose adoption
/// threshold on `Pr[w1]` is `p`.
pub fn theta_from_threshold(lambda: &Rational, p: &Rational) -> Result<Rational> {
    let one = Rational::one();
    if !(lambda.is_positive() && *lambda < one) {
        return Err(Error::Domain("lambda not in (0,1)".into()));
    }
    if p.is_negative() || *p >= one {
        return Err(Error::Domain("threshold p not in [0,1)".into()));
    }
    Ok(lambda / (&one - lambda) * p / (&one - p))
}
