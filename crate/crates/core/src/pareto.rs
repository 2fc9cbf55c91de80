//! Two-objective Pareto curve approximation with certified error.
//!
//! Each weight query maximizes `w1 * v1 + w2 * v2` and yields an achieved
//! point together with the valid half-plane `w . v <= opt`. The achieved
//! points span an inner approximation (their concave hull), the
//! half-planes an outer one. For a hull facet with outward normal `w` the
//! certified gap is the smallest bound on `w . v` implied by the stored
//! half-planes minus `w . p` for a facet end `p`. The facet with the
//! largest gap is refined with its own normal until every gap is at most
//! epsilon.

use std::fmt::Write;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::MecDecomposition;
use crate::mdp::{Mdp, RewardStructure};
use crate::rational::{fmt_rational, parse_rational, to_decimal, to_f64, Rational};
use crate::system::{optimize_weighted, RewardBound, SystemLSolution, WeightedOutcome};

pub type Point = (Rational, Rational);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParetoPoint {
    /// Weights of the query that produced the point.
    pub weights: Point,
    pub value: Point,
    /// Certificate of achievability.
    pub solution: SystemLSolution,
}

/// `weights . v <= bound` for every achievable `v`, attained at `tangent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfPlane {
    pub weights: Point,
    pub bound: Rational,
    pub tangent: Point,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParetoApprox {
    /// Vertices of the inner approximation, ascending in `v1`. Dominated
    /// and collinear points are removed.
    pub points: Vec<ParetoPoint>,
    /// Half-planes in the order they were computed.
    pub halfplanes: Vec<HalfPlane>,
    pub epsilon: Rational,
    /// Largest remaining facet gap.
    pub gap: Rational,
    /// Number of weight queries issued.
    pub queries: usize,
}

impl ParetoApprox {
    /// True when the constraints admit no strategy.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn dot(w: &Point, v: &Point) -> Rational {
    &w.0 * &v.0 + &w.1 * &v.1
}

struct Query<'a> {
    mdp: &'a Mdp,
    obj: (&'a RewardStructure, &'a RewardStructure),
    constraints: &'a [RewardBound],
    mecs: &'a MecDecomposition,
}

impl Query<'_> {
    /// Maximizes `w . v`. When a weight is zero the optimum face may
    /// contain dominated points, so a second LP maximizes `v1 + v2` on it.
    fn run(&self, w: &Point) -> Result<Option<(Rational, ParetoPoint)>> {
        let objectives = [
            (self.obj.0.clone(), w.0.clone()),
            (self.obj.1.clone(), w.1.clone()),
        ];
        let (opt, mut values, mut solution) =
            match optimize_weighted(self.mdp, &objectives, self.constraints, self.mecs)? {
                WeightedOutcome::Infeasible => return Ok(None),
                WeightedOutcome::Optimal {
                    value,
                    objective_values,
                    solution,
                } => (value, objective_values, solution),
            };
        if w.0.is_zero() || w.1.is_zero() {
            let mut combined = self.obj.0.scaled(&w.0);
            for (a, r) in self.obj.1.scaled(&w.1).entries() {
                combined.add(a, r);
            }
            let mut constraints = self.constraints.to_vec();
            constraints.push(RewardBound::new(combined, opt.clone()));
            let both = [
                (self.obj.0.clone(), Rational::one()),
                (self.obj.1.clone(), Rational::one()),
            ];
            match optimize_weighted(self.mdp, &both, &constraints, self.mecs)? {
                WeightedOutcome::Optimal {
                    objective_values,
                    solution: s,
                    ..
                } => {
                    values = objective_values;
                    solution = s;
                }
                WeightedOutcome::Infeasible => {
                    return Err(Error::Internal("tie-break LP lost its optimum".into()));
                }
            }
        }
        let value = (values[0].clone(), values[1].clone());
        Ok(Some((
            opt,
            ParetoPoint {
                weights: w.clone(),
                value,
                solution,
            },
        )))
    }
}

/// Upper-right concave chain of `points`, ascending in `v1`.
fn hull(mut points: Vec<ParetoPoint>) -> Vec<ParetoPoint> {
    points.sort_by(|a, b| a.value.0.cmp(&b.value.0).then(b.value.1.cmp(&a.value.1)));
    // drop dominated points: scanning by decreasing v1 the kept v2 must rise
    let mut kept: Vec<ParetoPoint> = Vec::new();
    for p in points.into_iter().rev() {
        if kept.last().is_none_or(|q| p.value.1 > q.value.1) {
            kept.push(p);
        }
    }
    kept.reverse();
    let mut chain: Vec<ParetoPoint> = Vec::new();
    for p in kept {
        while chain.len() >= 2 {
            let o = &chain[chain.len() - 2].value;
            let a = &chain[chain.len() - 1].value;
            let cross = (&a.0 - &o.0) * (&p.value.1 - &o.1) - (&a.1 - &o.1) * (&p.value.0 - &o.0);
            if cross.is_negative() {
                break;
            }
            chain.pop();
        }
        chain.push(p);
    }
    chain
}

/// Smallest bound on `w . v` implied by non-negative combinations of at
/// most two stored half-planes; `None` if `w` is outside their cone.
pub fn certified_bound(halfplanes: &[HalfPlane], w: &Point) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    let mut offer = |b: Rational| {
        if best.as_ref().is_none_or(|x| b < *x) {
            best = Some(b);
        }
    };
    for (i, hi) in halfplanes.iter().enumerate() {
        let wi = &hi.weights;
        // w = alpha * wi
        let det1 = &wi.0 * &w.1 - &wi.1 * &w.0;
        if det1.is_zero() {
            let alpha = if !wi.0.is_zero() {
                &w.0 / &wi.0
            } else {
                &w.1 / &wi.1
            };
            if !alpha.is_negative() {
                offer(alpha * &hi.bound);
            }
        }
        for hj in &halfplanes[i + 1..] {
            let wj = &hj.weights;
            let det = &wi.0 * &wj.1 - &wi.1 * &wj.0;
            if det.is_zero() {
                continue;
            }
            let alpha = (&w.0 * &wj.1 - &w.1 * &wj.0) / &det;
            let beta = (&wi.0 * &w.1 - &wi.1 * &w.0) / &det;
            if !alpha.is_negative() && !beta.is_negative() {
                offer(alpha * &hi.bound + beta * &hj.bound);
            }
        }
    }
    best
}

/// Outward normal of the facet `p -> q` (p has the smaller `v1`),
/// normalized to sum 1.
fn facet_normal(p: &Point, q: &Point) -> Point {
    let w = (&p.1 - &q.1, &q.0 - &p.0);
    let s = &w.0 + &w.1;
    (&w.0 / &s, &w.1 / &s)
}

fn facet_gaps(points: &[ParetoPoint], halfplanes: &[HalfPlane]) -> Vec<(Point, Rational)> {
    points
        .windows(2)
        .map(|f| {
            let w = facet_normal(&f[0].value, &f[1].value);
            let bound = certified_bound(halfplanes, &w).expect("seed half-planes span the quadrant");
            let gap = bound - dot(&w, &f[0].value);
            (w, gap)
        })
        .collect()
}

/// Approximates the Pareto curve of `(obj1, obj2)` under `constraints`
/// within `epsilon`. Returns an empty approximation when the constraints
/// are unsatisfiable.
pub fn approximate_pareto(
    mdp: &Mdp,
    obj1: &RewardStructure,
    obj2: &RewardStructure,
    constraints: &[RewardBound],
    epsilon: &Rational,
    mecs: &MecDecomposition,
) -> Result<ParetoApprox> {
    if !epsilon.is_positive() {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    let q = Query {
        mdp,
        obj: (obj1, obj2),
        constraints,
        mecs,
    };
    let mut approx = ParetoApprox {
        points: Vec::new(),
        halfplanes: Vec::new(),
        epsilon: epsilon.clone(),
        gap: Rational::zero(),
        queries: 0,
    };
    let mut pool = Vec::new();
    let ask = |w: Point, approx: &mut ParetoApprox, pool: &mut Vec<ParetoPoint>| -> Result<bool> {
        approx.queries += 1;
        match q.run(&w)? {
            None => Ok(false),
            Some((bound, p)) => {
                approx.halfplanes.push(HalfPlane {
                    weights: w,
                    bound,
                    tangent: p.value.clone(),
                });
                if !pool.iter().any(|q| q.value == p.value) {
                    pool.push(p);
                }
                Ok(true)
            }
        }
    };

    for w in [
        (Rational::one(), Rational::zero()),
        (Rational::zero(), Rational::one()),
    ] {
        if !ask(w, &mut approx, &mut pool)? {
            return Ok(approx);
        }
    }
    loop {
        let points = hull(pool.clone());
        let gaps = facet_gaps(&points, &approx.halfplanes);
        let worst = gaps
            .into_iter()
            .fold(None::<(Point, Rational)>, |acc, (w, g)| match acc {
                Some((_, ref best)) if *best >= g => acc,
                _ => Some((w, g)),
            });
        match worst {
            Some((w, g)) if g > *epsilon && !approx.halfplanes.iter().any(|h| h.weights == w) => {
                ask(w, &mut approx, &mut pool)?;
            }
            other => {
                approx.gap = other.map(|(_, g)| g).unwrap_or_else(Rational::zero);
                approx.points = points;
                return Ok(approx);
            }
        }
    }
}

/// CSV with header `w1,w2,v1,v2,kind`: one `point` row per hull vertex
/// (ascending `v1`, then `v2`) followed by one `halfplane` row per
/// half-plane, giving its normal and the point where it is tight.
pub fn write_csv(approx: &ParetoApprox) -> String {
    let mut out = String::from("w1,w2,v1,v2,kind\n");
    let mut points: Vec<&ParetoPoint> = approx.points.iter().collect();
    points.sort_by(|a, b| a.value.cmp(&b.value));
    let mut row = |w: &Point, v: &Point, kind: &str| {
        let _ = writeln!(
            out,
            "{},{},{},{},{kind}",
            fmt_rational(&w.0),
            fmt_rational(&w.1),
            fmt_rational(&v.0),
            fmt_rational(&v.1)
        );
    };
    for p in points {
        row(&p.weights, &p.value, "point");
    }
    for h in &approx.halfplanes {
        row(&h.weights, &h.tangent, "halfplane");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvKind {
    Point,
    HalfPlane,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvRow {
    pub weights: Point,
    pub value: Point,
    pub kind: CsvKind,
}

/// Parses the output of [`write_csv`].
pub fn read_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "w1,w2,v1,v2,kind")) => {}
        _ => return Err(Error::parse(1, 1, "expected header w1,w2,v1,v2,kind")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::parse(i + 1, 1, "expected 5 fields"));
        }
        let mut nums = Vec::with_capacity(4);
        for (k, f) in fields[..4].iter().enumerate() {
            let col = fields[..k].iter().map(|f| f.len() + 1).sum::<usize>() + 1;
            nums.push(parse_rational(f).map_err(|e| Error::parse(i + 1, col, e))?);
        }
        let kind = match fields[4] {
            "point" => CsvKind::Point,
            "halfplane" => CsvKind::HalfPlane,
            other => {
                let col = line.len() - other.len() + 1;
                return Err(Error::parse(i + 1, col, format!("unknown kind {other}")));
            }
        };
        let mut it = nums.into_iter();
        let mut next = || it.next().expect("four numbers");
        rows.push(CsvRow {
            weights: (next(), next()),
            value: (next(), next()),
            kind,
        });
    }
    Ok(rows)
}

/// Vertices of the outer approximation, ascending in `v1`.
pub fn envelope(halfplanes: &[HalfPlane]) -> Vec<Point> {
    let mut verts: Vec<Point> = Vec::new();
    for (i, a) in halfplanes.iter().enumerate() {
        for b in &halfplanes[i + 1..] {
            let (wa, wb) = (&a.weights, &b.weights);
            let det = &wa.0 * &wb.1 - &wa.1 * &wb.0;
            if det.is_zero() {
                continue;
            }
            let x = (&a.bound * &wb.1 - &wa.1 * &b.bound) / &det;
            let y = (&wa.0 * &b.bound - &a.bound * &wb.0) / &det;
            let v = (x, y);
            if halfplanes.iter().all(|h| dot(&h.weights, &v) <= h.bound) && !verts.contains(&v) {
                verts.push(v);
            }
        }
    }
    verts.sort();
    verts
}

const MARGIN: f64 = 50.0;

/// Standalone SVG plot: axes with labels, the inner approximation as a
/// solid polyline, the outer approximation dashed, achieved points as
/// circles. Output depends only on `approx`.
pub fn write_svg(approx: &ParetoApprox, width: u32, height: u32) -> Result<String> {
    if approx.is_empty() {
        return Err(Error::Precondition("nothing to plot".into()));
    }
    let env = envelope(&approx.halfplanes);
    let all: Vec<&Point> = approx.points.iter().map(|p| &p.value).chain(env.iter()).collect();
    let range = |f: fn(&Point) -> &Rational| {
        let lo = all.iter().map(|p| f(p)).min().expect("nonempty").clone();
        let hi = all.iter().map(|p| f(p)).max().expect("nonempty").clone();
        if lo == hi {
            (lo.clone() - Rational::one(), hi + Rational::one())
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = range(|p| &p.0);
    let (y0, y1) = range(|p| &p.1);
    let (w, h) = (f64::from(width), f64::from(height));
    let px = |v: &Rational| MARGIN + to_f64(&((v - &x0) / (&x1 - &x0))) * (w - 2.0 * MARGIN);
    let py = |v: &Rational| h - MARGIN - to_f64(&((v - &y0) / (&y1 - &y0))) * (h - 2.0 * MARGIN);
    let coords = |pts: &mut dyn Iterator<Item = &Point>| {
        pts.map(|p| format!("{:.2},{:.2}", px(&p.0), py(&p.1)))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let (left, right, top, bottom) = (MARGIN, w - MARGIN, MARGIN, h - MARGIN);
    let _ = writeln!(
        s,
        r#"<line x1="{left:.2}" y1="{bottom:.2}" x2="{right:.2}" y2="{bottom:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{left:.2}" y1="{bottom:.2}" x2="{left:.2}" y2="{top:.2}" stroke="black"/>"#
    );
    const TICKS: i64 = 4;
    for i in 0..=TICKS {
        let f = Rational::new(i.into(), TICKS.into());
        let xv = &x0 + (&x1 - &x0) * &f;
        let yv = &y0 + (&y1 - &y0) * &f;
        let (tx, ty) = (px(&xv), py(&yv));
        let _ = writeln!(
            s,
            r#"<text x="{tx:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            bottom + 16.0,
            to_decimal(&xv, 4)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
            left - 6.0,
            ty + 4.0,
            to_decimal(&yv, 4)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">objective 1</text>"#,
        w / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">objective 2</text>"#,
        h / 2.0,
        h / 2.0
    );
    if env.len() >= 2 {
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="gray" stroke-dasharray="6,4"/>"#,
            coords(&mut env.iter())
        );
    }
    if approx.points.len() >= 2 {
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="blue" stroke-width="2"/>"#,
            coords(&mut approx.points.iter().map(|p| &p.value))
        );
    }
    for p in &approx.points {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="blue"/>"#,
            px(&p.value.0),
            py(&p.value.1)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
