//! Posterior masses and receiver best responses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::observation::consistent;
use crate::model::{Instance, Observation, SignalingScheme};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BestResponseMode {
    #[default]
    Standard,
    /// Adoption needs every other receiver to be recommended adoption in
    /// state `w1`; binary alphabets only.
    Externality,
}

/// `(m0, m1)`: total `mu0` and `mu1` mass of profiles matching the
/// receiver's own signal and every leaked pair.
pub fn conditional_masses(scheme: &SignalingScheme, obs: &Observation) -> (Rational, Rational) {
    let mass = |state: usize| -> Rational {
        scheme
            .mu(state)
            .iter()
            .filter(|(p, _)| p[obs.receiver] == obs.own && consistent(&obs.leaked, p))
            .map(|(_, v)| v)
            .sum()
    };
    (mass(0), mass(1))
}

/// The right-hand side mass the receiver compares `m0` against, before
/// scaling by `theta_i`.
fn comparison_mass(
    scheme: &SignalingScheme,
    obs: &Observation,
    m1: Rational,
    mode: BestResponseMode,
) -> Rational {
    match mode {
        BestResponseMode::Standard => m1,
        BestResponseMode::Externality => {
            if obs.leaked.iter().any(|&(_, v)| v != 1) {
                return Rational::zero();
            }
            let mut ones = vec![1u8; scheme.n()];
            ones[obs.receiver] = obs.own;
            scheme.prob(1, &ones)
        }
    }
}

/// Adoption decision with the masses that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub adopt: bool,
    pub m0: Rational,
    /// Mass on the right-hand side, unscaled by `theta_i`.
    pub m1: Rational,
}

impl Decision {
    /// Both masses vanish: the observation has probability zero and the
    /// tie rule decided it.
    pub fn degenerate(&self) -> bool {
        self.m0.is_zero() && self.m1.is_zero()
    }
}

pub fn decide(
    inst: &Instance,
    scheme: &SignalingScheme,
    obs: &Observation,
    mode: BestResponseMode,
) -> Decision {
    let (m0, m1) = conditional_masses(scheme, obs);
    let rhs = comparison_mass(scheme, obs, m1, mode);
    let adopt = m0 <= inst.theta_at(obs.receiver) * &rhs;
    Decision { adopt, m0, m1: rhs }
}

/// `1{m0 <= theta_i * m1}`; ties adopt.
pub fn best_response(
    inst: &Instance,
    scheme: &SignalingScheme,
    obs: &Observation,
    mode: BestResponseMode,
) -> Result<bool> {
    check_inputs(inst, scheme, obs, mode)?;
    Ok(decide(inst, scheme, obs, mode).adopt)
}

pub(crate) fn check_inputs(
    inst: &Instance,
    scheme: &SignalingScheme,
    obs: &Observation,
    mode: BestResponseMode,
) -> Result<()> {
    if scheme.n() != inst.n() {
        return Err(Error::Domain(format!("scheme has {} receivers, instance has {}", scheme.n(), inst.n())));
    }
    obs.validate(scheme)?;
    if mode == BestResponseMode::Externality {
        scheme.require_binary("externality responses")?;
    }
    Ok(())
}

/// The leak-free rule, computed from the marginal of receiver `i` alone.
pub fn private_response(inst: &Instance, scheme: &SignalingScheme, i: usize, own: u8) -> bool {
    let marginal = |state: usize| -> Rational {
        scheme.mu(state).iter().filter(|(p, _)| p[i] == own).map(|(_, v)| v).sum()
    };
    marginal(0) <= inst.theta_at(i) * marginal(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ReceiverSet, UtilityFunction};
    use crate::rational::q;

    fn worked_example() -> (Instance, SignalingScheme) {
        let inst = Instance::new(
            3,
            q(1, 2),
            vec![q(3, 4), q(1, 2), q(1, 4)],
            UtilityFunction::prefix((0..4).map(Rational::from_int).collect()).unwrap(),
        )
        .unwrap();
        let mu0 = (0..4).map(|j| (ReceiverSet::prefix(j), q(1, 4)));
        let s = SignalingScheme::from_sets(3, mu0, [(ReceiverSet::full(3), q(1, 1))]).unwrap();
        (inst, s)
    }

    #[test]
    fn masses_under_leaks() {
        let (inst, s) = worked_example();
        let obs = Observation::new(0, 1, vec![(2, 0)]).unwrap();
        assert_eq!(conditional_masses(&s, &obs), (q(1, 2), q(0, 1)));
        assert!(!best_response(&inst, &s, &obs, BestResponseMode::Standard).unwrap());
        let obs = Observation::private(1, 1);
        assert_eq!(conditional_masses(&s, &obs), (q(1, 2), q(1, 1)));
    }

    #[test]
    fn full_information_adopts() {
        let (inst, _) = worked_example();
        let s =
            SignalingScheme::from_sets(3, [(ReceiverSet::EMPTY, q(1, 1))], [(ReceiverSet::full(3), q(1, 1))])
                .unwrap();
        for i in 0..3 {
            let obs = Observation::private(i, 1);
            assert_eq!(conditional_masses(&s, &obs), (q(0, 1), q(1, 1)));
            assert!(best_response(&inst, &s, &obs, BestResponseMode::Standard).unwrap());
        }
    }

    #[test]
    fn zero_mass_ties_adopt() {
        let (inst, s) = worked_example();
        // 0?1 never occurs in either state
        let obs = Observation::new(0, 0, vec![(2, 1)]).unwrap();
        let d = decide(&inst, &s, &obs, BestResponseMode::Standard);
        assert!(d.adopt && d.degenerate());
    }

    #[test]
    fn externality_rule() {
        let (inst, s) = worked_example();
        let obs = Observation::new(1, 1, vec![(0, 1)]).unwrap();
        let d = decide(&inst, &s, &obs, BestResponseMode::Externality);
        assert_eq!(d.m1, q(1, 1));
        let obs = Observation::new(1, 1, vec![(2, 0)]).unwrap();
        let d = decide(&inst, &s, &obs, BestResponseMode::Externality);
        assert_eq!(d.m1, q(0, 1));
        assert!(!d.adopt);
    }
}
