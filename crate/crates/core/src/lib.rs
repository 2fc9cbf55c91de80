//! Strategy synthesis for Markov decision processes with multiple
//! mean-payoff objectives.
//!
//! The pipeline is: load a model ([`mdp::explicit`] or [`prism`]), decompose
//! it into maximal end components ([`graph`]), instantiate the
//! frequency/flow linear system ([`system`]) and solve it exactly
//! ([`lp`]), then turn solutions into strategies and verify them on the
//! induced Markov chain ([`strategy`]). [`pareto`] approximates the
//! trade-off curve for two objectives and [`query`] ties everything to the
//! `multi(...)` / `mlessmulti(...)` property language.

pub mod error;
pub mod fixtures;
pub mod gen;
pub mod graph;
pub mod linalg;
pub mod lp;
pub mod mdp;
pub mod pareto;
pub mod prism;
pub mod query;
pub mod rational;
pub mod session;
pub mod strategy;
pub mod system;

pub use error::{Error, Result};
pub use rational::Rational;
