//! Dictionary-form simplex. The tableau keeps one column per nonbasic
//! variable, so its width never exceeds the variable count plus the number
//! of surplus and artificial columns.

use super::{LinearProgram, LpSolution, LpStatus, Relation};
use crate::rational::Rational;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Original,
    Slack,
    Surplus,
    Artificial,
}

struct Tableau {
    /// Row `r` reads `x_basic[r] + sum_j a[r][j] x_nonbasic[j] = rhs[r]`.
    a: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// Objective rows in the same form, `z + sum_j o[j] x_j = o_rhs`.
    phase1: (Vec<Rational>, Rational),
    phase2: (Vec<Rational>, Rational),
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    kinds: Vec<Kind>,
    pivots: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl Tableau {
    fn pivot(&mut self, p: usize, q: usize, with_phase1: bool) {
        self.pivots += 1;
        let inv = self.a[p][q].recip();
        let mut prow = std::mem::take(&mut self.a[p]);
        for (j, v) in prow.iter_mut().enumerate() {
            if j != q && !v.is_zero() {
                *v *= &inv;
            }
        }
        prow[q] = inv.clone();
        self.rhs[p] = &self.rhs[p] * &inv;
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| j != q && !prow[j].is_zero()).collect();
        let prhs = self.rhs[p].clone();

        let eliminate = |row: &mut Vec<Rational>, rhs: &mut Rational| {
            let f = std::mem::take(&mut row[q]);
            if f.is_zero() {
                row[q] = f;
                return;
            }
            for &j in &nz {
                row[j] -= &(&f * &prow[j]);
            }
            if !prhs.is_zero() {
                *rhs -= &(&f * &prhs);
            }
            row[q] = -(&f * &inv);
        };
        for r in 0..self.a.len() {
            if r != p {
                let (row, rhs) = (&mut self.a[r], &mut self.rhs[r]);
                eliminate(row, rhs);
            }
        }
        if with_phase1 {
            let (o, orhs) = &mut self.phase1;
            eliminate(o, orhs);
        }
        let (o, orhs) = &mut self.phase2;
        eliminate(o, orhs);

        self.a[p] = prow;
        std::mem::swap(&mut self.basic[p], &mut self.nonbasic[q]);
    }

    fn can_enter(&self, label: usize) -> bool {
        self.kinds[label] != Kind::Artificial
    }

    /// One Bland step on the chosen objective row.
    fn step(&mut self, phase1: bool) -> Step {
        let o = if phase1 { &self.phase1.0 } else { &self.phase2.0 };
        let entering = (0..self.nonbasic.len())
            .filter(|&j| o[j].is_negative() && self.can_enter(self.nonbasic[j]))
            .min_by_key(|&j| self.nonbasic[j]);
        let Some(q) = entering else {
            return Step::Optimal;
        };
        let mut best: Option<(Rational, usize)> = None;
        for r in 0..self.a.len() {
            if !self.a[r][q].is_positive() {
                continue;
            }
            let ratio = &self.rhs[r] / &self.a[r][q];
            let better = match &best {
                None => true,
                Some((b, br)) => ratio < *b || (ratio == *b && self.basic[r] < self.basic[*br]),
            };
            if better {
                best = Some((ratio, r));
            }
        }
        let Some((_, p)) = best else {
            return Step::Unbounded;
        };
        self.pivot(p, q, phase1);
        Step::Pivoted
    }
}

pub(super) fn run(lp: &LinearProgram) -> LpSolution {
    let nv = lp.num_vars;
    let m = lp.constraints.len();
    let mut kinds = vec![Kind::Original; nv];
    kinds.extend(std::iter::repeat_n(Kind::Slack, m));
    let mut sigma = Vec::with_capacity(m);
    let mut basic = Vec::with_capacity(m);
    let mut surplus_rows = Vec::new();
    for (r, row) in lp.constraints.iter().enumerate() {
        let (s, needs_art) = match row.relation {
            Relation::Le if !row.rhs.is_negative() => (1, false),
            Relation::Le => (-1, true),
            Relation::Ge if !row.rhs.is_positive() => (-1, false),
            Relation::Ge => (1, true),
            Relation::Eq if row.rhs.is_negative() => (-1, true),
            Relation::Eq => (1, true),
        };
        sigma.push(s);
        basic.push(nv + r);
        if needs_art {
            kinds[nv + r] = Kind::Artificial;
            if row.relation != Relation::Eq {
                surplus_rows.push(r);
            }
        }
    }
    let mut nonbasic: Vec<usize> = (0..nv).collect();
    let width = nv + surplus_rows.len();
    let mut a = vec![vec![Rational::zero(); width]; m];
    let mut rhs = Vec::with_capacity(m);
    for (r, row) in lp.constraints.iter().enumerate() {
        for (j, c) in &row.coeffs {
            a[r][*j] = if sigma[r] > 0 { c.clone() } else { -c };
        }
        rhs.push(if sigma[r] > 0 { row.rhs.clone() } else { -&row.rhs });
    }
    for (t, &r) in surplus_rows.iter().enumerate() {
        kinds.push(Kind::Surplus);
        nonbasic.push(nv + m + t);
        a[r][nv + t] = -Rational::one();
    }

    let mut o1 = vec![Rational::zero(); width];
    let mut o1_rhs = Rational::zero();
    for r in (0..m).filter(|&r| kinds[basic[r]] == Kind::Artificial) {
        for (j, v) in a[r].iter().enumerate() {
            if !v.is_zero() {
                o1[j] -= v;
            }
        }
        o1_rhs -= &rhs[r];
    }
    let mut o2 = vec![Rational::zero(); width];
    for (j, c) in lp.objective.iter().enumerate() {
        o2[j] = -c;
    }

    let mut t = Tableau {
        a,
        rhs,
        phase1: (o1, o1_rhs),
        phase2: (o2, Rational::zero()),
        basic,
        nonbasic,
        kinds,
        pivots: 0,
    };

    let has_artificials = t.basic.iter().any(|&b| t.kinds[b] == Kind::Artificial);
    if has_artificials {
        loop {
            match t.step(true) {
                Step::Pivoted => continue,
                // phase one is bounded above by zero
                Step::Unbounded | Step::Optimal => break,
            }
        }
        if t.phase1.1.is_negative() {
            return LpSolution::without_optimum(LpStatus::Infeasible, t.pivots);
        }
        // drive zero-level artificials out where a usable column exists
        for r in 0..m {
            if t.kinds[t.basic[r]] != Kind::Artificial {
                continue;
            }
            let col = (0..t.nonbasic.len())
                .filter(|&j| t.can_enter(t.nonbasic[j]) && !t.a[r][j].is_zero())
                .min_by_key(|&j| t.nonbasic[j]);
            if let Some(q) = col {
                t.pivot(r, q, false);
            }
        }
    }

    loop {
        match t.step(false) {
            Step::Pivoted => continue,
            Step::Unbounded => return LpSolution::without_optimum(LpStatus::Unbounded, t.pivots),
            Step::Optimal => break,
        }
    }

    let mut x = vec![Rational::zero(); nv];
    let mut basis = Vec::new();
    for (r, &b) in t.basic.iter().enumerate() {
        if b < nv {
            x[b] = t.rhs[r].clone();
            basis.push(b);
        }
    }
    basis.sort_unstable();
    let mut dual = vec![Rational::zero(); m];
    for (j, &label) in t.nonbasic.iter().enumerate() {
        if (nv..nv + m).contains(&label) {
            let r = label - nv;
            let y = t.phase2.0[j].clone();
            dual[r] = if sigma[r] > 0 { y } else { -y };
        }
    }
    LpSolution { status: LpStatus::Optimal, value: t.phase2.1, assignment: x, dual, basis, pivots: t.pivots }
}
