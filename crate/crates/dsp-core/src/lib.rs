//! Core data model for session-based task-oriented semantic parsing with the
//! decoupled intent-slot representation.
//!
//! The crate covers the representation side of the problem: semantic trees and
//! their structural validators ([`tree`]), the bracketed text serialization and
//! canonicalization used for exact-match scoring ([`linearize`]), mechanical
//! conversions between annotation schemes ([`convert`]), multi-turn sessions
//! with reference resolution and slot carryover ([`session`]), and the
//! evaluation metric suite ([`metrics`]). Model code lives in a separate crate.

pub mod convert;
#[cfg(test)]
pub(crate) mod fixtures;
pub mod linearize;
pub mod metrics;
pub mod ontology;
pub mod random;
pub mod session;
pub mod tokenize;
pub mod tree;

pub use linearize::{CanonPolicy, LinearSeq};
pub use session::{Session, Turn};
pub use tree::{Label, LabelKind, Node, SemanticTree, TokenSource, TreeForm, ValidationReport};
