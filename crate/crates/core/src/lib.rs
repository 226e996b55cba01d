//! Tree-walking automata toolkit.
//!
//! Simulation of nondeterministic, deterministic and one-pebble tree-walking
//! automata; the tree language `L` of consecutive `a`-leaf triples and its
//! recognizers; the algebra of patterns with ports and their run relations;
//! synthesis of idempotent elements; and instance-level checks of the
//! inclusion between the run relations of correct and faulty chains.

pub mod elements;
pub mod error;
pub mod pattern;
pub mod pebble;
pub mod relation;
pub mod separation;
mod text;
pub mod automaton;
pub mod cli;
pub mod tree;

pub use error::{Error, Result};
