//! Deciding entailment between support/confidence-constrained implications.
//!
//! A constrained implication `(A -> B, s, c)` asserts that the attribute set
//! `A` implies `B` with support at least `s` and confidence at least `c` in a
//! formal context. A set of such rules entails another rule when every finite
//! non-empty context modeling all of the set also models the rule. This crate
//! decides that question exactly: it compiles the instance into a pair of
//! implicitly represented linear programs over arbitrary-precision rationals,
//! solves them with a revised simplex method that only ever materializes one
//! column at a time, and, when entailment fails, extracts a concrete
//! counter-model context from the optimal vertex.
//!
//! Module map:
//! - [`numeric`]: exact rational scalars and parsing/formatting helpers.
//! - [`context`]: formal contexts, derivation operators, support/confidence,
//!   the model relation, and Burmeister CXT I/O.
//! - [`rules`]: constrained implications, rule files, and a desk-scale miner.
//! - [`lp`]: the implicit inequality system, its column oracles, and the
//!   explicit starting basis.
//! - [`simplex`]: a revised simplex maximizer generic over any exact ordered
//!   scalar, driven purely through column oracles.
//! - [`entail`]: the decision procedure and counter-model extraction.

pub mod context;
pub mod entail;
pub mod lp;
pub mod numeric;
pub mod rules;
pub mod simplex;

pub use numeric::{BigInt, Rational};
