//! Exact simulation of semantic numeration systems over non-negative
//! rationals, with a partial signed extension.
//!
//! A [`model::Cao`] describes entities and the operators that move carries
//! between them. Two independent backends advance its state:
//! [`engine::operator`] fires operators one by one from their carry rules and
//! [`engine::matrix`] evaluates the matrix state equation. [`runner`] drives
//! either to a fixed point, cycle or step limit and writes traces; [`dsl`]
//! reads and writes the `.sns` text format.

pub mod dsl;
pub mod engine;
pub mod model;
pub mod rational;
pub mod runner;

#[cfg(test)]
pub(crate) mod testing;

pub use rational::Rational;
