//! Small reference models used throughout the tests and documentation.
//!
//! * `M1`: one state `s` with self-loops `a` (r1 = 1) and `b` (r2 = 1).
//! * `M2`: `s0` chooses between `stay` (self-loop, r1 = 1) and `go` (to
//!   `s1`); `s1` has `loop` (r2 = 1).
//! * `M3`: a deterministic two-cycle `u -m-> v -n-> u` with r1(m) = 2.

use crate::mdp::{MdpBuilder, Model, RewardStructure};
use crate::rational::int;

pub const M1_TEXT: &str = "\
mdp
state s
action a from s reward r1=1 r2=0 -> s:1
action b from s reward r2=1 -> s:1
initial s
";

pub const M2_TEXT: &str = "\
mdp
state s0
state s1
action stay from s0 reward r1=1 r2=0 -> s0:1
action go from s0 -> s1:1
action loop from s1 reward r2=1 -> s1:1
initial s0
";

pub const M3_TEXT: &str = "\
mdp
state u
state v
action m from u reward r1=2 -> v:1
action n from v -> u:1
initial u
";

pub fn m1() -> Model {
    let mut b = MdpBuilder::new();
    let s = b.add_state("s");
    let a = b.add_action("a", s, vec![(s, int(1))]);
    let bb = b.add_action("b", s, vec![(s, int(1))]);
    b.set_initial(s);
    Model {
        mdp: b.build().expect("M1 fixture"),
        rewards: vec![
            RewardStructure::new("r1").with(a, int(1)),
            RewardStructure::new("r2").with(bb, int(1)),
        ],
    }
}

pub fn m2() -> Model {
    let mut b = MdpBuilder::new();
    let s0 = b.add_state("s0");
    let s1 = b.add_state("s1");
    let stay = b.add_action("stay", s0, vec![(s0, int(1))]);
    b.add_action("go", s0, vec![(s1, int(1))]);
    let lp = b.add_action("loop", s1, vec![(s1, int(1))]);
    b.set_initial(s0);
    Model {
        mdp: b.build().expect("M2 fixture"),
        rewards: vec![
            RewardStructure::new("r1").with(stay, int(1)),
            RewardStructure::new("r2").with(lp, int(1)),
        ],
    }
}

pub fn m3() -> Model {
    let mut b = MdpBuilder::new();
    let u = b.add_state("u");
    let v = b.add_state("v");
    let m = b.add_action("m", u, vec![(v, int(1))]);
    b.add_action("n", v, vec![(u, int(1))]);
    b.set_initial(u);
    Model {
        mdp: b.build().expect("M3 fixture"),
        rewards: vec![RewardStructure::new("r1").with(m, int(2))],
    }
}
