//! The two step backends.
//!
//! [`operator`] fires each operator directly from its carry rules;
//! [`matrix`] evaluates the state equation
//! `#(k+1) = #(k) + (Rt - N) Λ N⁻ #(k)`. Both read only the step-k state and
//! apply every change at once, so on any CAO they must agree exactly.

pub mod matrix;
pub mod operator;

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::model::ScheduleError;
use crate::rational::{Rational, RationalError};

/// Cardinals of all entities, index-aligned with the CAO's entity list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct StateVector(Vec<Rational>);

impl StateVector {
    pub fn zeros(m: usize) -> Self {
        StateVector(vec![Rational::zero(); m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    /// First component below zero, if any.
    pub fn first_negative(&self) -> Option<(usize, &Rational)> {
        self.0.iter().enumerate().find(|(_, v)| v.is_negative())
    }

    pub fn all_integer(&self) -> bool {
        self.0.iter().all(Rational::is_integer)
    }
}

impl From<Vec<Rational>> for StateVector {
    fn from(v: Vec<Rational>) -> Self {
        StateVector(v)
    }
}

impl FromIterator<Rational> for StateVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        StateVector(iter.into_iter().collect())
    }
}

impl Index<usize> for StateVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl IndexMut<usize> for StateVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.0[i]
    }
}

impl<'a> IntoIterator for &'a StateVector {
    type Item = &'a Rational;
    type IntoIter = std::slice::Iter<'a, Rational>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Rational::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    /// A step would leave a cardinal below zero.
    #[error("cardinal of {} would become {value}", describe_entity(*.entity, .name.as_deref()))]
    NegativeCardinal { entity: usize, name: Option<String>, value: Rational },
    #[error("non-positive radix {0}")]
    NonPositiveRadix(Rational),
    #[error("state has {found} components, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state equation without common carry requires singleton carry groups")]
    FusionGroupPresent,
    #[error("malformed configuration matrix: {0}")]
    MalformedMatrix(String),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Arithmetic(#[from] RationalError),
}

fn describe_entity(index: usize, name: Option<&str>) -> String {
    match name {
        Some(n) => format!("entity `{n}`"),
        None => format!("entity #{index}"),
    }
}

pub(crate) fn check_dimension(state: &StateVector, expected: usize) -> Result<(), StepError> {
    if state.len() != expected {
        return Err(StepError::DimensionMismatch { expected, found: state.len() });
    }
    Ok(())
}

/// Fails on the first negative component of a post-step state.
pub(crate) fn check_non_negative(state: &StateVector, names: Option<&[&str]>) -> Result<(), StepError> {
    match state.first_negative() {
        Some((entity, value)) => Err(StepError::NegativeCardinal {
            entity,
            name: names.map(|n| n[entity].to_string()),
            value: value.clone(),
        }),
        None => Ok(()),
    }
}
