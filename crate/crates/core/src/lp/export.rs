//! CPLEX LP format writer.
//!
//! LP format has no fraction syntax. Coefficients whose denominators are
//! products of 2 and 5 are written as exact decimals; anything else is
//! rounded to 30 significant digits and the line is tagged `\ inexact`.

use std::fmt::Write;

use num_traits::{One, Signed, Zero};

use super::{AtomRelation, DisjunctiveProgram, LinExpr, LinearProgram, Relation, Sense, VarBound};
use crate::error::{Error, Result};
use crate::rational::{exact_decimal, to_decimal, Rational};

const INEXACT_DIGITS: usize = 30;

#[derive(Debug, Clone, Default)]
pub struct ExportOptions {
    /// Default big-M for atoms that do not carry their own.
    pub big_m: Option<Rational>,
    /// Margin used for strict atoms, `e > c` becoming `e >= c + eps`.
    pub strict_epsilon: Option<Rational>,
}

struct Writer<'a> {
    names: Vec<String>,
    out: String,
    first_var: &'a str,
}

fn number(r: &Rational, inexact: &mut bool) -> String {
    match exact_decimal(r) {
        Some(s) => s,
        None => {
            *inexact = true;
            to_decimal(r, INEXACT_DIGITS)
        }
    }
}

fn sanitize(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "!\"#$%&()/,.;?@_`'{}|~".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        s.insert(0, '_');
    }
    s
}

impl Writer<'_> {
    /// ` 3 x + 1.5 y - z` style terms; `0 first_var` for an empty expression.
    fn terms(&self, expr: &LinExpr, extra: &[(String, Rational)], inexact: &mut bool) -> String {
        let mut parts: Vec<(String, Rational)> = expr
            .terms()
            .map(|(v, c)| (self.names[v].clone(), c.clone()))
            .collect();
        parts.extend(extra.iter().cloned());
        parts.retain(|(_, c)| !c.is_zero());
        if parts.is_empty() {
            return format!("0 {}", self.first_var);
        }
        let mut s = String::new();
        for (i, (name, c)) in parts.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => s.push_str("- "),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            if !mag.is_one() {
                s.push_str(&number(&mag, inexact));
                s.push(' ');
            }
            s.push_str(name);
        }
        s
    }

    fn row(&mut self, label: &str, lhs: String, rel: &str, rhs: &Rational, mut inexact: bool) {
        let rhs = number(rhs, &mut inexact);
        let _ = write!(self.out, " {label}: {lhs} {rel} {rhs}");
        if inexact {
            self.out.push_str(" \\ inexact");
        }
        self.out.push('\n');
    }
}

fn header(lp: &LinearProgram, w: &mut Writer<'_>) {
    w.out
        .push_str("\\ exact rationals; see `inexact` tags for rounded coefficients\n");
    let mut inexact = false;
    match &lp.objective {
        Some(obj) => {
            w.out.push_str(match obj.sense {
                Sense::Maximize => "Maximize\n",
                Sense::Minimize => "Minimize\n",
            });
            let t = w.terms(&obj.expr, &[], &mut inexact);
            let _ = write!(w.out, " obj: {t}");
        }
        None => {
            w.out.push_str("Minimize\n");
            let _ = write!(w.out, " obj: 0 {}", w.first_var);
        }
    }
    if inexact {
        w.out.push_str(" \\ inexact");
    }
    w.out.push_str("\nSubject To\n");
    for (i, c) in lp.constraints.iter().enumerate() {
        let label = c
            .label
            .as_deref()
            .map(sanitize)
            .unwrap_or_else(|| format!("c{i}"));
        let mut inexact = false;
        let lhs = w.terms(&c.expr, &[], &mut inexact);
        w.row(&label, lhs, c.relation.symbol(), &c.rhs, inexact);
    }
}

fn bounds(lp: &LinearProgram, w: &mut Writer<'_>) {
    w.out.push_str("Bounds\n");
    for (v, var) in lp.variables.iter().enumerate() {
        match var.bound {
            VarBound::NonNegative => {
                let _ = writeln!(w.out, " {} >= 0", w.names[v]);
            }
            VarBound::Free => {
                let _ = writeln!(w.out, " {} free", w.names[v]);
            }
        }
    }
}

fn var_names(lp: &LinearProgram) -> Vec<String> {
    lp.variables.iter().map(|v| sanitize(&v.name)).collect()
}

/// Writes a plain LP. A missing objective becomes `Minimize 0`.
pub fn export_lp(lp: &LinearProgram) -> String {
    let names = var_names(lp);
    let first = names.first().cloned().unwrap_or_else(|| "_".into());
    let mut w = Writer {
        names,
        out: String::new(),
        first_var: &first,
    };
    header(lp, &mut w);
    bounds(lp, &mut w);
    w.out.push_str("End\n");
    w.out
}

/// Writes a disjunctive program as a MILP with one binary indicator per
/// disjunct. For indicator `z` and big-M `M`:
///
/// * clause: `sum z >= 1`
/// * `e <= c`: `e + M z <= c + M`
/// * `e >= c`: `e - M z >= c - M`
/// * `e = c`: both of the above
/// * `e > c`: `e - (eps + M) z >= c - M`
///
/// This is a cross-checking aid for external solvers; the exact decision
/// procedure is [`super::solve_disjunctive`].
pub fn export_disjunctive(dp: &DisjunctiveProgram, opts: &ExportOptions) -> Result<String> {
    let mut names = var_names(&dp.base);
    let mut binaries = Vec::new();
    for (c, clause) in dp.clauses.iter().enumerate() {
        for k in 0..clause.disjuncts.len() {
            let mut name = format!("z_c{c}_d{k}");
            while names.contains(&name) {
                name.insert(0, '_');
            }
            binaries.push(name.clone());
            names.push(name);
        }
    }
    let first = names.first().cloned().unwrap_or_else(|| "_".into());
    let nbase = dp.base.num_vars();
    let mut w = Writer {
        names,
        out: String::new(),
        first_var: &first,
    };
    header(&dp.base, &mut w);

    let mut z = nbase;
    for (c, clause) in dp.clauses.iter().enumerate() {
        let start = z;
        let sel: LinExpr = (start..start + clause.disjuncts.len())
            .map(|v| (v, Rational::one()))
            .collect();
        let mut inexact = false;
        let lhs = w.terms(&sel, &[], &mut inexact);
        w.row(&format!("clause{c}"), lhs, ">=", &Rational::one(), inexact);
        for (k, disjunct) in clause.disjuncts.iter().enumerate() {
            let zname = w.names[z].clone();
            for (j, atom) in disjunct.iter().enumerate() {
                let m = atom.big_m.clone().or_else(|| opts.big_m.clone()).ok_or_else(|| {
                    Error::Export(format!("big-M missing for atom {j} of clause {c} disjunct {k}"))
                })?;
                let label = format!("clause{c}_d{k}_a{j}");
                let mut rows: Vec<(String, Rational, Relation, Rational)> = Vec::new();
                match atom.relation {
                    AtomRelation::Le => {
                        rows.push((label, m.clone(), Relation::Le, &atom.rhs + &m));
                    }
                    AtomRelation::Ge => {
                        rows.push((label, -m.clone(), Relation::Ge, &atom.rhs - &m));
                    }
                    AtomRelation::Eq => {
                        rows.push((format!("{label}_le"), m.clone(), Relation::Le, &atom.rhs + &m));
                        rows.push((format!("{label}_ge"), -m.clone(), Relation::Ge, &atom.rhs - &m));
                    }
                    AtomRelation::Gt => {
                        let eps = opts
                            .strict_epsilon
                            .clone()
                            .ok_or_else(|| Error::Export("strict atom needs an epsilon".into()))?;
                        rows.push((label, -(eps + &m), Relation::Ge, &atom.rhs - &m));
                    }
                }
                for (label, zc, rel, rhs) in rows {
                    let mut inexact = false;
                    let lhs = w.terms(&atom.expr, &[(zname.clone(), zc)], &mut inexact);
                    w.row(&label, lhs, rel.symbol(), &rhs, inexact);
                }
            }
            z += 1;
        }
    }
    bounds(&dp.base, &mut w);
    if !binaries.is_empty() {
        w.out.push_str("Binary\n");
        for b in &binaries {
            let _ = writeln!(w.out, " {b}");
        }
    }
    w.out.push_str("End\n");
    Ok(w.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{Atom, Clause};
    use crate::rational::{int, rat};

    #[test]
    fn simple_maximization() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", VarBound::NonNegative);
        lp.add_constraint(LinExpr::var(x), Relation::Le, int(3));
        lp.set_objective(LinExpr::var(x), Sense::Maximize);
        let text = export_lp(&lp);
        assert!(text.contains("Maximize"));
        assert!(text.contains("x <= 3"));
        assert!(text.contains("Bounds"));
        assert!(text.ends_with("End\n"));
    }

    #[test]
    fn inexact_coefficients_are_tagged() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", VarBound::Free);
        let y = lp.add_var("1y", VarBound::NonNegative);
        lp.add_constraint(LinExpr::var(x).plus(y, rat(-3, 8)), Relation::Ge, rat(1, 3));
        let text = export_lp(&lp);
        assert!(
            text.contains(" c0: x - 0.375 _1y >= 0.333333333333333333333333333333 \\ inexact"),
            "{text}"
        );
        assert!(text.contains(" x free"));
    }

    #[test]
    fn binary_section_lists_indicators() {
        let mut base = LinearProgram::new();
        let x = base.add_var("x", VarBound::NonNegative);
        let dp = DisjunctiveProgram {
            base,
            clauses: vec![Clause {
                disjuncts: vec![vec![Atom::new(LinExpr::var(x), AtomRelation::Le, int(1))]],
            }],
        };
        let opts = ExportOptions {
            big_m: Some(int(100)),
            strict_epsilon: None,
        };
        let text = export_disjunctive(&dp, &opts).unwrap();
        assert!(text.contains("Binary\n z_c0_d0\n"), "{text}");
        assert!(text.contains(" clause0_d0_a0: x + 100 z_c0_d0 <= 101"), "{text}");
        assert!(matches!(
            export_disjunctive(&dp, &ExportOptions::default()),
            Err(Error::Export(_))
        ));
    }
}
