//! A single-module subset of the PRISM guarded-command language.
//!
//! ```text
//! mdp
//! const double p = 0.5;
//! module walker
//!   x : [0..2] init 0;
//!   [go]   x<2 -> p : (x'=x+1) + 1-p : true;
//!   [stay] true -> (x'=x);
//! endmodule
//! rewards "progress"
//!   [go] true : 1;
//! endrewards
//! ```
//!
//! Supported: `int`/`double`/`bool` constants declared before the module,
//! bounded integer variables, labelled or unlabelled commands, and reward
//! blocks whose items are scoped to every action (no brackets), to
//! unlabelled commands (`[]`) or to one label (`[a]`). Expressions cover
//! arithmetic, comparisons, `& | ! =>`, `c ? a : b`, `min`, `max`,
//! `floor`, `ceil` and `mod`; `/` always yields a rational.

mod ast;
mod explore;
mod lexer;
mod parser;
mod property;

pub use ast::{
    BinOp, Command, Expr, Func, Program, RewardItem, RewardScope, RewardsDecl, Type, UnOp, Update, Value,
    Variable,
};
pub use explore::{explore, DEFAULT_STATE_CAP};
pub use property::{parse_property, print_property, Query, QueryItem, QueryKind, Spec};

use crate::error::Result;
use crate::mdp::Model;

/// Parses and type-checks a program. Update probabilities that are
/// constant are checked to sum to one here; the rest during exploration.
pub fn parse_program(text: &str) -> Result<Program> {
    parser::Parser::new(text)?.program()
}

/// Parses and explores in one step.
pub fn load_prism_model(text: &str, cap: usize) -> Result<Model> {
    explore(&parse_program(text)?, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::{Error, Location};
    use crate::rational::rat;

    const M2_PRISM: &str = "
mdp
module m2
  loc : [0..1] init 0;
  [stay] loc=0 -> (loc'=0);
  [go]   loc=0 -> (loc'=1);
  [loop] loc=1 -> true;
endmodule
rewards \"r1\"
  [stay] true : 1;
endrewards
rewards \"r2\"
  [loop] true : 1;
endrewards
";

    #[test]
    fn m2_encoding_matches_fixture() {
        let model = load_prism_model(M2_PRISM, DEFAULT_STATE_CAP).unwrap();
        let fx = crate::fixtures::m2();
        assert_eq!(model.mdp.num_states(), 2);
        assert_eq!(model.mdp.state_names(), &["loc=0", "loc=1"]);
        let names: Vec<&str> = model.mdp.actions().iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, vec!["stay", "go", "loop"]);
        for a in 0..3 {
            assert_eq!(model.mdp.action(a).successors, fx.mdp.action(a).successors);
            assert_eq!(model.rewards[0].get(a), fx.rewards[0].get(a));
            assert_eq!(model.rewards[1].get(a), fx.rewards[1].get(a));
        }
    }

    #[test]
    fn two_commands_one_variable() {
        let p =
            parse_program("module m x:[0..1] init 0; [] x=0 -> (x'=1); [] x=0 -> true; endmodule").unwrap();
        assert_eq!(p.variables.len(), 1);
        assert_eq!(p.commands.len(), 2);
    }

    #[test]
    fn probability_sum_errors() {
        let err =
            parse_program("module m x:[0..1]; [] true -> 0.5:(x'=0) + 0.25:(x'=1); endmodule").unwrap_err();
        assert!(
            err.to_string().contains("update probabilities sum to 3/4"),
            "{err}"
        );
        // state-dependent probabilities are checked during exploration
        let p =
            parse_program("module m x:[0..1]; [] true -> x/4+1/2:(x'=0) + 1/4:(x'=1); endmodule").unwrap();
        let err = explore(&p, 100).unwrap_err().to_string();
        assert!(
            err.contains("update probabilities sum to 3/4") && err.contains("x=0"),
            "{err}"
        );
    }

    #[test]
    fn undeclared_and_type_errors() {
        let err = parse_program("module m x:[0..1];\n[] y=0 -> true; endmodule").unwrap_err();
        match err {
            Error::Undeclared { name, location } => {
                assert_eq!(name, "y");
                assert_eq!(location, Location { line: 2, column: 4 });
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_program("module m x:[0..1]; [] x -> true; endmodule"),
            Err(Error::Type { .. })
        ));
        assert!(matches!(
            parse_program("module m x:[0..1]; [] true -> (x'=1/2); endmodule"),
            Err(Error::Type { .. })
        ));
        assert!(matches!(
            parse_program("module m x:[0..1]; [] true & 1 -> true; endmodule"),
            Err(Error::Type { .. })
        ));
        assert!(matches!(
            parse_program("module m x:[0..1] [] true -> true; endmodule"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn unreachable_states_are_absent() {
        let model = load_prism_model(
            "module m x:[0..5] init 0; [] x<2 -> (x'=x+1); [] x=2 -> true; endmodule",
            100,
        )
        .unwrap();
        assert_eq!(model.mdp.num_states(), 3);
    }

    #[test]
    fn deadlock_names_the_valuation() {
        let err = load_prism_model(
            "module m x:[0..3] init 0; y:[0..1]; [] x<3 -> (x'=x+1); endmodule",
            100,
        )
        .unwrap_err();
        match err {
            Error::Deadlock { valuation } => assert_eq!(valuation, "x=3,y=0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn state_cap() {
        let err =
            load_prism_model("module m x:[0..100]; [] true -> (x'=min(x+1,100)); endmodule", 10).unwrap_err();
        assert!(matches!(err, Error::StateCap { cap: 10 }));
    }

    #[test]
    fn constants_rewards_and_duplicate_labels() {
        let model = load_prism_model(
            "mdp
const int N = 2;
const double p = 1/3;
module m
  x : [0..N] init 0;
  [a] x<N -> p:(x'=x+1) + 1-p:(x'=x);
  [a] x<N -> (x'=N);
  [] x=N -> true;
endmodule
rewards \"cost\"
  [a] x=0 : 2;
  true : 1/2;
  [] true : 10;
endrewards
",
            100,
        )
        .unwrap();
        let mdp = &model.mdp;
        assert_eq!(mdp.state_names(), &["x=0", "x=1", "x=2"]);
        let names: Vec<&str> = mdp
            .enabled(0)
            .iter()
            .map(|&a| mdp.action(a).name.as_str())
            .collect();
        assert_eq!(names, vec!["a", "a#1"]);
        assert_eq!(mdp.action(0).successors, vec![(1, rat(1, 3)), (0, rat(2, 3))]);
        let cost = &model.rewards[0];
        assert_eq!(cost.get(0), rat(5, 2));
        let last = mdp.enabled(2)[0];
        assert_eq!(mdp.action(last).name, "cmd2");
        assert_eq!(cost.get(last), rat(21, 2));
        assert_eq!(cost.get(mdp.enabled(1)[0]), rat(1, 2));
    }

    #[test]
    fn expressions() {
        let model = load_prism_model(
            "const bool b = !false & (1 < 2 => true);
module m
  x : [0..4] init 1;
  [] b & x=1 -> (x'= x>0 ? mod(7, 3) + floor(5/2) : 0);
  [] x=3 -> (x'=max(ceil(1/2), -1));
endmodule",
            100,
        )
        .unwrap();
        assert_eq!(model.mdp.state_names(), &["x=1", "x=3"]);
    }

    #[test]
    fn deterministic_exploration() {
        let a = load_prism_model(M2_PRISM, 100).unwrap();
        let b = load_prism_model(M2_PRISM, 100).unwrap();
        assert_eq!(a, b);
    }
}
