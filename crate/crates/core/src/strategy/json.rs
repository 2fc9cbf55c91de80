//! Strategy files: UTF-8 JSON keyed by state and action names, with exact
//! rationals written as strings.
//!
//! ```json
//! {"kind": "two-memory",
//!  "transient": {"s0": {"go": "1"}},
//!  "recurrent": {"s0": {"stay": "1"}, "s1": {"loop": "1"}},
//!  "switch": {"s0": "1/2", "s1": "1"}}
//! ```
//!
//! Only positive probabilities are listed. A memoryless strategy has a
//! single `"choice"` map. States missing from `"recurrent"` have no
//! recurrent distribution; states missing from `"switch"` never switch.

use num_traits::Zero;
use serde_json::{Map, Value};

use super::{Distribution, MemorylessStrategy, Strategy, TwoMemoryStrategy};
use crate::error::{Error, Result};
use crate::mdp::Mdp;
use crate::rational::{fmt_rational, parse_rational, Rational};

fn dist_value(mdp: &Mdp, d: &Distribution) -> Value {
    Value::Object(
        d.iter()
            .map(|(a, p)| (mdp.action(*a).name.clone(), Value::String(fmt_rational(p))))
            .collect(),
    )
}

fn per_state<'a>(mdp: &Mdp, items: impl Iterator<Item = (usize, Option<&'a Distribution>)>) -> Value {
    Value::Object(
        items
            .filter_map(|(s, d)| Some((mdp.state_name(s).to_string(), dist_value(mdp, d?))))
            .collect(),
    )
}

/// Pretty-printed JSON, states in model order.
pub fn strategy_to_json(mdp: &Mdp, strategy: &Strategy) -> String {
    let mut obj = Map::new();
    match strategy {
        Strategy::Memoryless(m) => {
            obj.insert("kind".into(), "memoryless".into());
            obj.insert(
                "choice".into(),
                per_state(mdp, m.choice.iter().map(Some).enumerate()),
            );
        }
        Strategy::TwoMemory(t) => {
            obj.insert("kind".into(), "two-memory".into());
            obj.insert(
                "transient".into(),
                per_state(mdp, t.transient.iter().map(Some).enumerate()),
            );
            obj.insert(
                "recurrent".into(),
                per_state(mdp, t.recurrent.iter().map(Option::as_ref).enumerate()),
            );
            let switch: Map<String, Value> = t
                .switch
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(s, p)| (mdp.state_name(s).to_string(), Value::String(fmt_rational(p))))
                .collect();
            obj.insert("switch".into(), Value::Object(switch));
        }
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize");
    text.push('\n');
    text
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Strategy(msg.into())
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| bad(format!("{what}: expected an object")))
}

fn number(v: &Value, what: &str) -> Result<Rational> {
    let text = v
        .as_str()
        .ok_or_else(|| bad(format!("{what}: expected a string")))?;
    parse_rational(text).map_err(|e| bad(format!("{what}: {e}")))
}

fn state_id(mdp: &Mdp, name: &str) -> Result<usize> {
    mdp.state_by_name(name)
        .ok_or_else(|| bad(format!("unknown state {name}")))
}

fn read_map(mdp: &Mdp, v: Option<&Value>, what: &str) -> Result<Vec<Option<Distribution>>> {
    let mut out = vec![None; mdp.num_states()];
    let Some(v) = v else {
        return Err(bad(format!("missing \"{what}\"")));
    };
    for (name, dv) in object(v, what)? {
        let s = state_id(mdp, name)?;
        let mut d = Distribution::new();
        for (aname, pv) in object(dv, &format!("{what}.{name}"))? {
            let a = mdp
                .action_by_name(s, aname)
                .ok_or_else(|| bad(format!("{what}.{name}: unknown action {aname}")))?;
            d.push((a, number(pv, &format!("{what}.{name}.{aname}"))?));
        }
        d.sort_by_key(|(a, _)| *a);
        out[s] = Some(d);
    }
    Ok(out)
}

fn total(mdp: &Mdp, dists: Vec<Option<Distribution>>, what: &str) -> Result<Vec<Distribution>> {
    dists
        .into_iter()
        .enumerate()
        .map(|(s, d)| d.ok_or_else(|| bad(format!("{what}: no entry for state {}", mdp.state_name(s)))))
        .collect()
}

/// Parses and validates a strategy for `mdp`.
pub fn strategy_from_json(mdp: &Mdp, text: &str) -> Result<Strategy> {
    let root: Value = serde_json::from_str(text)?;
    let obj = object(&root, "strategy")?;
    let strategy = match obj.get("kind").and_then(Value::as_str) {
        Some("memoryless") => Strategy::Memoryless(MemorylessStrategy {
            choice: total(mdp, read_map(mdp, obj.get("choice"), "choice")?, "choice")?,
        }),
        Some("two-memory") => {
            let mut switch = vec![Rational::zero(); mdp.num_states()];
            if let Some(v) = obj.get("switch") {
                for (name, pv) in object(v, "switch")? {
                    switch[state_id(mdp, name)?] = number(pv, &format!("switch.{name}"))?;
                }
            }
            Strategy::TwoMemory(TwoMemoryStrategy {
                transient: total(
                    mdp,
                    read_map(mdp, obj.get("transient"), "transient")?,
                    "transient",
                )?,
                recurrent: read_map(mdp, obj.get("recurrent"), "recurrent")?,
                switch,
            })
        }
        Some(k) => return Err(bad(format!("unknown kind {k:?}"))),
        None => return Err(bad("missing \"kind\"")),
    };
    let problems = strategy.validate(mdp);
    if !problems.is_empty() {
        return Err(bad(problems.join("; ")));
    }
    Ok(strategy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, rat};

    fn m2_witness() -> Strategy {
        Strategy::TwoMemory(TwoMemoryStrategy {
            transient: vec![vec![(1, int(1))], vec![(2, int(1))]],
            recurrent: vec![Some(vec![(0, int(1))]), Some(vec![(2, int(1))])],
            switch: vec![rat(1, 2), int(1)],
        })
    }

    #[test]
    fn two_memory_layout() {
        let m = fixtures::m2();
        let text = strategy_to_json(&m.mdp, &m2_witness());
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["kind"], "two-memory");
        assert_eq!(v["transient"]["s0"]["go"], "1");
        assert_eq!(v["switch"]["s0"], "1/2");
        assert_eq!(v["recurrent"]["s1"]["loop"], "1");
        assert_eq!(strategy_from_json(&m.mdp, &text).unwrap(), m2_witness());
    }

    #[test]
    fn memoryless_round_trip() {
        let m = fixtures::m1();
        let st = Strategy::Memoryless(MemorylessStrategy {
            choice: vec![vec![(0, rat(1, 3)), (1, rat(2, 3))]],
        });
        let text = strategy_to_json(&m.mdp, &st);
        assert!(text.contains("\"b\": \"2/3\""), "{text}");
        assert_eq!(strategy_from_json(&m.mdp, &text).unwrap(), st);
    }

    #[test]
    fn rejects_bad_files() {
        let m = fixtures::m1();
        let cases = [
            r#"{"kind":"memoryless","choice":{"s":{"a":"1/2"}}}"#,
            r#"{"kind":"memoryless","choice":{"t":{"a":"1"}}}"#,
            r#"{"kind":"memoryless","choice":{"s":{"c":"1"}}}"#,
            r#"{"kind":"memoryless","choice":{}}"#,
            r#"{"kind":"three-memory"}"#,
            r#"{"choice":{}}"#,
        ];
        for c in cases {
            assert!(
                matches!(strategy_from_json(&m.mdp, c), Err(Error::Strategy(_))),
                "{c}"
            );
        }
        assert!(matches!(strategy_from_json(&m.mdp, "{"), Err(Error::Json(_))));
    }
}
