//! The three-receiver direct-versus-indirect instances, stored as literal
//! data files.

use serde::Serialize;

use crate::downstream::{
    bruteforce_optimal_responses, downstream_utility_fixed, downstream_utility_model, verify_responses,
    Method, SearchMode,
};
use crate::error::Result;
use crate::lp::{self, build_persuasive_lp, Objective, ResponseTable};
use crate::model::{Alphabet, Instance, LeakageModel, LeakagePattern, Observation, SignalingScheme};
use crate::rational::{q, Rational};
use crate::response::BestResponseMode;

const INSTANCE: &str = include_str!("../data/appendix_c/instance.json");
const CYCLE: &str = include_str!("../data/appendix_c/cycle.json");
const THREE_SIGNAL: &str = include_str!("../data/appendix_c/three_signal.json");
const TWO_SIGNAL: &str = include_str!("../data/appendix_c/two_signal.json");
const INDIRECT_INSTANCE: &str = include_str!("../data/appendix_c/indirect_instance.json");
const SOMEWHAT_INDIRECT: &str = include_str!("../data/appendix_c/somewhat_indirect.json");
const INDIRECT_LEAKAGE: &str = include_str!("../data/appendix_c/indirect_leakage.json");

/// Raw files by name, for export.
pub const FILES: [(&str, &str); 7] = [
    ("instance.json", INSTANCE),
    ("cycle.json", CYCLE),
    ("three_signal.json", THREE_SIGNAL),
    ("two_signal.json", TWO_SIGNAL),
    ("indirect_instance.json", INDIRECT_INSTANCE),
    ("somewhat_indirect.json", SOMEWHAT_INDIRECT),
    ("indirect_leakage.json", INDIRECT_LEAKAGE),
];

#[derive(Clone, Debug)]
pub struct AppendixC {
    /// `lambda = 1/2`, `theta = (3/4, 1/2, 1/4)`, longest-prefix utility.
    pub instance: Instance,
    /// Receiver `i` sees receiver `i+1`; receiver 3 sees receiver 1.
    pub cycle: LeakagePattern,
    pub three_signal: SignalingScheme,
    pub best_two_signal: SignalingScheme,
    /// `V(S) = |S|` with `theta = (1/2, 0, 0)`; the receiver that is easy to
    /// persuade is listed first so that `theta` is sorted.
    pub indirect_instance: Instance,
    pub somewhat_indirect: SignalingScheme,
    /// Receivers 2 and 3 see each other; receiver 1 sees one of them, each
    /// with probability 1/2.
    pub indirect_leakage: LeakageModel,
}

fn parse<T: serde::de::DeserializeOwned>(name: &str, text: &str) -> T {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("bundled {name} is invalid: {e}"))
}

pub fn appendix_c() -> AppendixC {
    AppendixC {
        instance: parse("instance", INSTANCE),
        cycle: parse("cycle", CYCLE),
        three_signal: parse("three_signal", THREE_SIGNAL),
        best_two_signal: parse("two_signal", TWO_SIGNAL),
        indirect_instance: parse("indirect_instance", INDIRECT_INSTANCE),
        somewhat_indirect: parse("somewhat_indirect", SOMEWHAT_INDIRECT),
        indirect_leakage: parse("indirect_leakage", INDIRECT_LEAKAGE),
    }
}

/// The intended play of the three-signal scheme on the cycle: receiver 1
/// adopts iff receiver 2 holds `X`; receiver 2 iff it holds `X` and
/// receiver 3 does not hold `0`; receiver 3 iff its symbol equals receiver
/// 1's.
pub fn three_signal_responses(scheme: &SignalingScheme) -> ResponseTable {
    let a = scheme.alphabets();
    let idx = |i: usize, c: char| a[i].index_of(c).expect("three-signal alphabet");
    let (x, zero) = (idx(1, 'X'), idx(2, '0'));
    let mut table = ResponseTable::new();
    for s0 in 0..a[0].len() as u8 {
        for s1 in 0..a[1].len() as u8 {
            table.insert(Observation { receiver: 0, own: s0, leaked: vec![(1, s1)] }, s1 == x);
        }
    }
    for s1 in 0..a[1].len() as u8 {
        for s2 in 0..a[2].len() as u8 {
            table.insert(Observation { receiver: 1, own: s1, leaked: vec![(2, s2)] }, s1 == x && s2 != zero);
        }
    }
    for s2 in 0..a[2].len() as u8 {
        for s0 in 0..a[0].len() as u8 {
            let same = a[2].symbol(s2) == a[0].symbol(s0);
            table.insert(Observation { receiver: 2, own: s2, leaked: vec![(0, s0)] }, same);
        }
    }
    table
}

/// Every exact value of the direct-versus-indirect comparison.
#[derive(Clone, Debug, Serialize)]
pub struct Reproduction {
    pub opt_private_lp: Rational,
    pub three_signal_cycle: Rational,
    pub two_signal_scheme_cycle: Rational,
    pub best_two_signal_search: Rational,
    pub search_lps_solved: u64,
    pub search_pruned: u64,
    pub three_signal_lp: Option<Rational>,
    pub three_signal_feasible: bool,
    pub somewhat_indirect_mixture: Rational,
    pub pass: bool,
}

pub const EXPECTED_OPT_PRIVATE: (i64, i64) = (9, 4);
pub const EXPECTED_TWO_SIGNAL: (i64, i64) = (17, 8);
pub const EXPECTED_INDIRECT: (i64, i64) = (7, 4);

pub fn reproduce(mode: SearchMode) -> Result<Reproduction> {
    let c = appendix_c();
    let std = BestResponseMode::Standard;
    let sol = lp::solve(&build_persuasive_lp(&c.instance, 0, Objective::Full)?)?;
    let three = downstream_utility_fixed(&c.instance, &c.three_signal, &c.cycle, std)?;
    let two = downstream_utility_fixed(&c.instance, &c.best_two_signal, &c.cycle, std)?;
    let search = bruteforce_optimal_responses(&c.instance, vec![Alphabet::binary(); 3], &c.cycle, mode)?;
    let check = verify_responses(
        &c.instance,
        c.three_signal.alphabets().to_vec(),
        &c.cycle,
        &three_signal_responses(&c.three_signal),
        Some(&c.three_signal),
    )?;
    let indirect = downstream_utility_model(
        &c.indirect_instance,
        &c.somewhat_indirect,
        &c.indirect_leakage,
        Method::Exact,
        std,
    )?
    .point()
    .clone();
    let qp = |(a, b): (i64, i64)| q(a, b);
    let nine = qp(EXPECTED_OPT_PRIVATE);
    let feasible = check.candidate_feasible == Some(true);
    let pass = sol.value == nine
        && three == nine
        && search.value == qp(EXPECTED_TWO_SIGNAL)
        && two == qp(EXPECTED_TWO_SIGNAL)
        && check.value.as_ref() == Some(&nine)
        && feasible
        && indirect == qp(EXPECTED_INDIRECT);
    Ok(Reproduction {
        opt_private_lp: sol.value,
        three_signal_cycle: three,
        two_signal_scheme_cycle: two,
        best_two_signal_search: search.value,
        search_lps_solved: search.lps_solved,
        search_pruned: search.pruned,
        three_signal_lp: check.value,
        three_signal_feasible: feasible,
        somewhat_indirect_mixture: indirect,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intended_play_matches_best_responses() {
        let c = appendix_c();
        let table = three_signal_responses(&c.three_signal);
        let r = verify_responses(
            &c.instance,
            c.three_signal.alphabets().to_vec(),
            &c.cycle,
            &table,
            Some(&c.three_signal),
        )
        .unwrap();
        assert_eq!(r.value, Some(q(9, 4)));
        assert_eq!(r.candidate_feasible, Some(true));
        assert_eq!(r.candidate_objective, Some(q(9, 4)));
    }

    #[test]
    fn bundled_files_load() {
        let c = appendix_c();
        assert_eq!(c.cycle, LeakagePattern::cycle(3));
        assert_eq!(c.three_signal.alphabets()[0].len(), 3);
        c.indirect_leakage.validate(3).unwrap();
    }
}
