//! A workbench for computational universal algebra on finite algebras.
//!
//! The crate revolves around a handful of concrete objects:
//!
//! * [`FiniteAlgebra`](algebra::FiniteAlgebra) — a finite universe `0..n-1`
//!   together with total operation tables,
//! * [`Partition`](rel::Partition) and [`BinRel`](rel::BinRel) — equivalence
//!   relations (congruences, when compatible) and plain binary relations,
//! * [`RelTerm`](termlang::RelTerm) — terms over relation variables built from
//!   meet, composition, join and commutator brackets,
//! * [`LabelledGraph`](termgraph::LabelledGraph) — the labelled graph of a
//!   `{∧,∘}`-term, with both directions of the evaluation/witness
//!   correspondence,
//! * [`MalcevCondition`](pwgen::MalcevCondition) — the strong Mal'cev
//!   condition emitted by the Pixley-Wille construction, in its standard and
//!   commutator-equation variants.
//!
//! On top of those sit the congruence-lattice and TC-commutator engines
//! ([`relcalc`], [`commutator`]), term-existence search over generated
//! subpowers, and the scenario checks in [`searchcheck`]. The `malcev` binary
//! exposes all of it on the command line; [`fileio`] defines the algebra file
//! format it consumes.

pub mod algebra;
pub mod commutator;
pub mod error;
pub mod fileio;
pub mod pwgen;
pub mod rel;
pub mod relcalc;
pub mod searchcheck;
pub mod termgraph;
pub mod termlang;

#[cfg(test)]
pub(crate) mod testfix;

pub use error::{Error, Result};
