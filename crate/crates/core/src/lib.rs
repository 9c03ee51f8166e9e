//! Decision procedure and interpolant synthesizer for multi-agent S5.
//!
//! The prover works on *cross-sequents*: trees of hypersequents whose
//! components are connected by agent-indexed brackets. Proof search in the
//! terminating calculus decides validity; failed searches yield finite
//! countermodels, and successful split proofs yield Lyndon interpolants that
//! also respect the common agent vocabulary.

pub mod corpus;
pub mod cross_sequent;
pub mod interpolation;
pub mod prover;
pub mod semantics;
pub mod syntax;

pub use cross_sequent::{Component, CrossSequent, Hole, Label, LabelAllocator};
pub use interpolation::{interpolate, InterpolationError, InterpolationReport, Multiformula};
pub use prover::{prove, prove_formula, ProofResult, ProofTree, RuleInstance, RuleName};
pub use semantics::{Interpretation, KripkeModel};
pub use syntax::{Agent, Atom, Formula, SurfaceFormula};
