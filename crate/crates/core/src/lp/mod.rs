//! Exact linear programming over the rationals.

mod build;
mod simplex;

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use build::{
    build_br_constrained_lp, build_persuasive_lp, enumerate_profiles, persuasive_lp_rows, profile_index,
    profile_set, scheme_from_solution, BrLp, Objective, ResponseTable, BR_LP_MAX_PROFILES,
    PERSUASIVE_LP_MAX_N,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

/// One constraint row, stored sparsely; absent coefficients are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Constraint { coeffs, relation, rhs }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, c)| c * &x[*j]).sum()
    }
}

/// `maximize c.x` subject to the rows and `x >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    /// Optional variable labels for the text export.
    pub names: Vec<String>,
}

impl LinearProgram {
    pub fn new(num_vars: usize, objective: Vec<Rational>) -> Self {
        LinearProgram { num_vars, objective, constraints: Vec::new(), names: Vec::new() }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return Err(Error::Domain(format!(
                "objective has {} coefficients for {} variables",
                self.objective.len(),
                self.num_vars
            )));
        }
        if !self.names.is_empty() && self.names.len() != self.num_vars {
            return Err(Error::Domain("variable names do not match the count".into()));
        }
        for (r, row) in self.constraints.iter().enumerate() {
            if row.coeffs.iter().any(|(j, _)| *j >= self.num_vars) {
                return Err(Error::Domain(format!("row {r} references a missing variable")));
            }
        }
        Ok(())
    }

    fn name(&self, j: usize) -> String {
        self.names.get(j).cloned().unwrap_or_else(|| format!("x{j}"))
    }

    /// One line per row with exact rationals:
    /// `max: c x + ...`, then `rK: a x + ... <= b`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let terms = |coeffs: &mut dyn Iterator<Item = (usize, &Rational)>| -> String {
            let parts: Vec<String> =
                coeffs.filter(|(_, c)| !c.is_zero()).map(|(j, c)| format!("{c} {}", self.name(j))).collect();
            if parts.is_empty() {
                "0".into()
            } else {
                parts.join(" + ")
            }
        };
        let _ = writeln!(out, "max: {}", terms(&mut self.objective.iter().enumerate()));
        for (r, row) in self.constraints.iter().enumerate() {
            let lhs = terms(&mut row.coeffs.iter().map(|(j, c)| (*j, c)));
            let _ = writeln!(out, "r{r}: {lhs} {} {}", row.relation.symbol(), row.rhs);
        }
        let _ = writeln!(out, "bounds: all >= 0");
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: Rational,
    pub assignment: Vec<Rational>,
    /// One multiplier per constraint row; `A^T y >= c`, `b.y = value`.
    pub dual: Vec<Rational>,
    /// Original variables that ended basic.
    pub basis: Vec<usize>,
    pub pivots: usize,
}

impl LpSolution {
    fn without_optimum(status: LpStatus, pivots: usize) -> Self {
        LpSolution {
            status,
            value: Rational::zero(),
            assignment: Vec::new(),
            dual: Vec::new(),
            basis: Vec::new(),
            pivots,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Exact two-phase simplex with Bland's rule. Optimal results are
/// re-verified (primal feasibility, objective, dual certificate) before
/// they are returned.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let sol = simplex::run(lp);
    if sol.is_optimal() {
        verify(lp, &sol)?;
    }
    Ok(sol)
}

/// Independent check of an optimal solution and its dual certificate.
pub fn verify(lp: &LinearProgram, sol: &LpSolution) -> Result<()> {
    let fail = |what: &str| Err(Error::Internal(format!("lp certificate: {what}")));
    if sol.assignment.len() != lp.num_vars || sol.dual.len() != lp.constraints.len() {
        return fail("dimension");
    }
    if sol.assignment.iter().any(Rational::is_negative) {
        return fail("negative variable");
    }
    for row in &lp.constraints {
        if !row.relation.holds(&row.lhs(&sol.assignment), &row.rhs) {
            return fail("primal row violated");
        }
    }
    let value: Rational = lp.objective.iter().zip(&sol.assignment).map(|(c, x)| c * x).sum();
    if value != sol.value {
        return fail("objective mismatch");
    }
    let mut aty = vec![Rational::zero(); lp.num_vars];
    let mut by = Rational::zero();
    for (row, y) in lp.constraints.iter().zip(&sol.dual) {
        let sign_ok = match row.relation {
            Relation::Le => !y.is_negative(),
            Relation::Ge => !y.is_positive(),
            Relation::Eq => true,
        };
        if !sign_ok {
            return fail("dual sign");
        }
        if y.is_zero() {
            continue;
        }
        for (j, a) in &row.coeffs {
            aty[*j] += a * y;
        }
        by += &row.rhs * y;
    }
    if aty.iter().zip(&lp.objective).any(|(a, c)| a < c) {
        return fail("dual infeasible");
    }
    if by != sol.value {
        return fail("duality gap");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn single_bound() {
        let mut lp = LinearProgram::new(1, vec![q(1, 1)]);
        lp.add(vec![(0, q(1, 1))], Relation::Le, q(3, 7));
        let s = solve(&lp).unwrap();
        assert_eq!(s.value, q(3, 7));
    }

    #[test]
    fn simplex_face() {
        let mut lp = LinearProgram::new(2, vec![q(1, 1), q(1, 1)]);
        lp.add(vec![(0, q(1, 1)), (1, q(1, 1))], Relation::Le, q(1, 1));
        let s = solve(&lp).unwrap();
        assert_eq!(s.value, q(1, 1));
    }

    #[test]
    fn equality_and_ge_rows() {
        // max 2x + 3y, x + y = 4, x >= 1, y <= 5/2
        let mut lp = LinearProgram::new(2, vec![q(2, 1), q(3, 1)]);
        lp.add(vec![(0, q(1, 1)), (1, q(1, 1))], Relation::Eq, q(4, 1));
        lp.add(vec![(0, q(1, 1))], Relation::Ge, q(1, 1));
        lp.add(vec![(1, q(1, 1))], Relation::Le, q(5, 2));
        let s = solve(&lp).unwrap();
        assert_eq!(s.value, q(21, 2));
        assert_eq!(s.assignment, vec![q(3, 2), q(5, 2)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1, vec![q(1, 1)]);
        lp.add(vec![(0, q(1, 1))], Relation::Le, q(1, 1));
        lp.add(vec![(0, q(1, 1))], Relation::Ge, q(2, 1));
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
        let mut lp = LinearProgram::new(2, vec![q(1, 1), q(0, 1)]);
        lp.add(vec![(0, q(1, 1)), (1, q(-1, 1))], Relation::Le, q(1, 1));
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2, vec![q(1, 1), q(2, 1)]);
        lp.add(vec![(0, q(1, 1)), (1, q(1, 1))], Relation::Eq, q(1, 1));
        lp.add(vec![(0, q(2, 1)), (1, q(2, 1))], Relation::Eq, q(2, 1));
        lp.add(vec![(0, q(0, 1))], Relation::Le, q(0, 1));
        let s = solve(&lp).unwrap();
        assert_eq!(s.value, q(2, 1));
    }

    #[test]
    fn text_export() {
        let mut lp = LinearProgram::new(2, vec![q(1, 2), q(0, 1)]);
        lp.add(vec![(0, q(1, 1)), (1, q(-1, 3))], Relation::Ge, q(0, 1));
        let text = lp.to_text();
        assert!(text.contains("max: 1/2 x0"));
        assert!(text.contains("r0: 1 x0 + -1/3 x1 >= 0"));
    }

    #[test]
    fn dimension_mismatch() {
        let mut lp = LinearProgram::new(1, vec![q(1, 1)]);
        lp.add(vec![(3, q(1, 1))], Relation::Le, q(1, 1));
        assert!(solve(&lp).is_err());
    }
}
