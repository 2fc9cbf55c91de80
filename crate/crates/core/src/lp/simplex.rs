use num_traits::{One, Signed, Zero};

use super::{Assignment, LinearProgram, LpOutcome, Relation, Sense, VarBound};
use crate::rational::Rational;

/// Dense tableau in canonical form with respect to `basis`.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
}

struct Unbounded;

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, reduced: &mut [Rational], value: &mut Rational) {
        let inv = Rational::one() / &self.rows[r][c];
        if !inv.is_one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            let row = &mut self.rows[i];
            for (j, p) in pivot_row.iter().enumerate() {
                if !p.is_zero() {
                    row[j] -= &f * p;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        if !reduced[c].is_zero() {
            let f = reduced[c].clone();
            for (j, p) in pivot_row.iter().enumerate() {
                if !p.is_zero() {
                    reduced[j] -= &f * p;
                }
            }
            *value += &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Reduced costs `c - c_B B^-1 A` and objective value for maximizing `cost`.
    fn reduced_costs(&self, cost: &[Rational]) -> (Vec<Rational>, Rational) {
        let mut reduced = cost.to_vec();
        let mut value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.rows[i].iter().enumerate() {
                if !a.is_zero() {
                    reduced[j] -= cb * a;
                }
            }
            value += cb * &self.rhs[i];
        }
        (reduced, value)
    }

    /// Maximizes `cost` over columns with `allowed[j]`, Bland's rule.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> Result<Rational, Unbounded> {
        let (mut reduced, mut value) = self.reduced_costs(cost);
        loop {
            let entering = (0..self.ncols).find(|&j| allowed[j] && reduced[j].is_positive());
            let Some(c) = entering else {
                return Ok(value);
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leaving {
                    None => true,
                    Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((r, _)) = leaving else {
                return Err(Unbounded);
            };
            self.pivot(r, c, &mut reduced, &mut value);
        }
    }
}

/// Exact two-phase primal simplex with Bland's anti-cycling rule.
///
/// Free variables are split into a positive and a negative part. Without an
/// objective the outcome is [`LpOutcome::Feasible`] with the phase-one
/// basic solution.
pub fn solve_lp(lp: &LinearProgram) -> LpOutcome {
    // structural columns
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(lp.num_vars());
    let mut ncols = 0;
    for var in &lp.variables {
        match var.bound {
            VarBound::NonNegative => {
                col_of.push((ncols, None));
                ncols += 1;
            }
            VarBound::Free => {
                col_of.push((ncols, Some(ncols + 1)));
                ncols += 2;
            }
        }
    }
    let nstruct = ncols;

    // normalized rows with rhs >= 0
    let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    for c in &lp.constraints {
        let mut row = vec![Rational::zero(); nstruct];
        for (v, k) in c.expr.terms() {
            let (pos, neg) = col_of[v];
            row[pos] += k;
            if let Some(neg) = neg {
                row[neg] -= k;
            }
        }
        let (mut rel, mut rhs) = (c.relation, c.rhs.clone());
        if rhs.is_negative() {
            for x in row.iter_mut() {
                *x = -&*x;
            }
            rhs = -rhs;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        rows.push((row, rel, rhs));
    }

    let nslack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let nart = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let total = nstruct + nslack + nart;
    let art_start = nstruct + nslack;

    let mut tab = Tableau {
        rows: Vec::with_capacity(rows.len()),
        rhs: Vec::with_capacity(rows.len()),
        basis: Vec::with_capacity(rows.len()),
        ncols: total,
    };
    let (mut next_slack, mut next_art) = (nstruct, art_start);
    for (mut row, rel, rhs) in rows {
        row.resize(total, Rational::zero());
        match rel {
            Relation::Le => {
                row[next_slack] = Rational::one();
                tab.basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -Rational::one();
                next_slack += 1;
                row[next_art] = Rational::one();
                tab.basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = Rational::one();
                tab.basis.push(next_art);
                next_art += 1;
            }
        }
        tab.rows.push(row);
        tab.rhs.push(rhs);
    }

    // phase one: maximize -sum(artificials)
    if nart > 0 {
        let mut cost = vec![Rational::zero(); total];
        for c in cost.iter_mut().skip(art_start) {
            *c = -Rational::one();
        }
        let allowed = vec![true; total];
        let value = match tab.optimize(&cost, &allowed) {
            Ok(v) => v,
            Err(Unbounded) => unreachable!("phase one is bounded by zero"),
        };
        if value.is_negative() {
            return LpOutcome::Infeasible;
        }
        // drive zero-level artificials out of the basis; drop redundant rows
        let mut dummy = vec![Rational::zero(); total];
        let mut dummy_value = Rational::zero();
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] < art_start {
                r += 1;
                continue;
            }
            match (0..art_start).find(|&j| !tab.rows[r][j].is_zero()) {
                Some(c) => {
                    tab.pivot(r, c, &mut dummy, &mut dummy_value);
                    r += 1;
                }
                None => {
                    tab.rows.remove(r);
                    tab.rhs.remove(r);
                    tab.basis.remove(r);
                }
            }
        }
    }

    let mut allowed = vec![true; total];
    for a in allowed.iter_mut().skip(art_start) {
        *a = false;
    }

    let extract = |tab: &Tableau| -> Assignment {
        let mut col_value = vec![Rational::zero(); total];
        for (i, &b) in tab.basis.iter().enumerate() {
            col_value[b] = tab.rhs[i].clone();
        }
        col_of
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(neg) => &col_value[pos] - &col_value[neg],
                None => col_value[pos].clone(),
            })
            .collect()
    };

    let Some(objective) = &lp.objective else {
        let assignment = extract(&tab);
        debug_assert!(lp.is_satisfied_by(&assignment));
        return LpOutcome::Feasible(assignment);
    };

    let flip = objective.sense == Sense::Minimize;
    let mut cost = vec![Rational::zero(); total];
    for (v, k) in objective.expr.terms() {
        let k = if flip { -k.clone() } else { k.clone() };
        let (pos, neg) = col_of[v];
        cost[pos] += &k;
        if let Some(neg) = neg {
            cost[neg] -= &k;
        }
    }
    match tab.optimize(&cost, &allowed) {
        Err(Unbounded) => LpOutcome::Unbounded,
        Ok(_) => {
            let assignment = extract(&tab);
            debug_assert!(lp.is_satisfied_by(&assignment));
            let value = objective.expr.eval(&assignment);
            LpOutcome::Optimal { assignment, value }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LinExpr, VarBound};
    use crate::rational::{int, rat};

    #[test]
    fn bounded_maximum() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", VarBound::NonNegative);
        lp.add_constraint(LinExpr::var(x), Relation::Le, int(3));
        lp.set_objective(LinExpr::var(x), Sense::Maximize);
        assert_eq!(
            solve_lp(&lp),
            LpOutcome::Optimal {
                assignment: vec![int(3)],
                value: int(3)
            }
        );
    }

    #[test]
    fn infeasible() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", VarBound::NonNegative);
        lp.add_constraint(LinExpr::var(x), Relation::Ge, int(1));
        lp.add_constraint(LinExpr::var(x), Relation::Le, int(0));
        assert_eq!(solve_lp(&lp), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", VarBound::NonNegative);
        lp.add_constraint(LinExpr::var(x), Relation::Ge, int(0));
        lp.set_objective(LinExpr::var(x), Sense::Maximize);
        assert_eq!(solve_lp(&lp), LpOutcome::Unbounded);
    }

    #[test]
    fn free_variables_and_minimization() {
        // min x s.t. x >= -5/2, x free
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", VarBound::Free);
        lp.add_constraint(LinExpr::var(x), Relation::Ge, rat(-5, 2));
        lp.set_objective(LinExpr::var(x), Sense::Minimize);
        assert_eq!(
            solve_lp(&lp),
            LpOutcome::Optimal {
                assignment: vec![rat(-5, 2)],
                value: rat(-5, 2)
            }
        );
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        // x + y = 1 twice, 2x + 2y = 2; max x - y
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", VarBound::NonNegative);
        let y = lp.add_var("y", VarBound::NonNegative);
        let sum = LinExpr::var(x).plus(y, int(1));
        lp.add_constraint(sum.clone(), Relation::Eq, int(1));
        lp.add_constraint(sum, Relation::Eq, int(1));
        lp.add_constraint(
            LinExpr::new().plus(x, int(2)).plus(y, int(2)),
            Relation::Eq,
            int(2),
        );
        lp.set_objective(LinExpr::var(x).plus(y, int(-1)), Sense::Maximize);
        assert_eq!(
            solve_lp(&lp),
            LpOutcome::Optimal {
                assignment: vec![int(1), int(0)],
                value: int(1)
            }
        );
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Beale's example cycles under the textbook largest-coefficient rule.
        let mut lp = LinearProgram::new();
        let v: Vec<_> = (0..4)
            .map(|i| lp.add_var(format!("x{i}"), VarBound::NonNegative))
            .collect();
        let row = |c: [Rational; 4]| -> LinExpr { v.iter().zip(c).map(|(&v, c)| (v, c)).collect() };
        lp.add_constraint(
            row([rat(1, 4), int(-60), rat(-1, 25), int(9)]),
            Relation::Le,
            int(0),
        );
        lp.add_constraint(
            row([rat(1, 2), int(-90), rat(-1, 50), int(3)]),
            Relation::Le,
            int(0),
        );
        lp.add_constraint(row([int(0), int(0), int(1), int(0)]), Relation::Le, int(1));
        lp.set_objective(row([rat(3, 4), int(-150), rat(1, 50), int(-6)]), Sense::Maximize);
        match solve_lp(&lp) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(1, 20)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn feasibility_without_objective_satisfies_rows() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", VarBound::NonNegative);
        let y = lp.add_var("y", VarBound::NonNegative);
        lp.add_constraint(LinExpr::var(x).plus(y, int(1)), Relation::Eq, int(1));
        lp.add_constraint(LinExpr::var(x).plus(y, int(-1)), Relation::Ge, rat(1, 3));
        let out = solve_lp(&lp);
        let a = out.assignment().expect("feasible");
        assert!(lp.is_satisfied_by(a));
    }
}
