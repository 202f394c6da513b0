//! Per-step parameter overrides for non-stationary objects.
//!
//! An override takes effect at its step and stays in force until a later
//! override touches the same parameter.

use std::collections::BTreeMap;

use super::{Cao, Mode, Operator};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Change {
    Radix { entity: usize, value: Rational },
    Coefficient { entity: usize, value: Rational },
    Enabled(bool),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Override {
    pub operator: usize,
    pub change: Change,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schedule {
    steps: BTreeMap<u64, Vec<Override>>,
}

impl Schedule {
    pub fn is_empty(&self) -> bool {
        self.steps.values().all(Vec::is_empty)
    }

    pub fn push(&mut self, step: u64, entry: Override) {
        self.steps.entry(step).or_default().push(entry);
    }

    /// Overrides at exactly `step`, in declaration order.
    pub fn at(&self, step: u64) -> &[Override] {
        self.steps.get(&step).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All `(step, overrides)` pairs in ascending step order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, &[Override])> {
        self.steps.iter().filter(|(_, v)| !v.is_empty()).map(|(k, v)| (*k, v.as_slice()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("step {step}: no operator with index {operator}")]
    UnknownOperator { step: u64, operator: usize },
    #[error("step {step}: entity #{entity} is not an operand of operator {operator}")]
    NotAnOperand { step: u64, operator: usize, entity: usize },
    #[error("step {step}: entity #{entity} is not an image of operator {operator}")]
    NotAnImage { step: u64, operator: usize, entity: usize },
    #[error("step {step}: non-positive radix {value} for operator {operator}")]
    NonPositiveRadix { step: u64, operator: usize, value: Rational },
    #[error("step {step}: negative coefficient {value} for operator {operator} outside qminus mode")]
    NegativeCoefficient { step: u64, operator: usize, value: Rational },
}

/// Checks one override against the declared operators and the sign rule.
pub(crate) fn check_override(
    operators: &[Operator],
    mode: Mode,
    step: u64,
    entry: &Override,
) -> Result<(), ScheduleError> {
    let operator = entry.operator;
    let op = operators.get(operator).ok_or(ScheduleError::UnknownOperator { step, operator })?;
    match &entry.change {
        Change::Radix { entity, value } => {
            if op.operand(*entity).is_none() {
                return Err(ScheduleError::NotAnOperand { step, operator, entity: *entity });
            }
            if !value.is_positive() {
                return Err(ScheduleError::NonPositiveRadix { step, operator, value: value.clone() });
            }
        }
        Change::Coefficient { entity, value } => {
            if op.image(*entity).is_none() {
                return Err(ScheduleError::NotAnImage { step, operator, entity: *entity });
            }
            if value.is_negative() && mode != Mode::QMinus {
                return Err(ScheduleError::NegativeCoefficient { step, operator, value: value.clone() });
            }
        }
        Change::Enabled(_) => {}
    }
    Ok(())
}

fn apply_override(operators: &mut [Operator], entry: &Override) {
    let op = &mut operators[entry.operator];
    match &entry.change {
        Change::Radix { entity, value } => {
            if let Some(o) = op.operands.iter_mut().find(|o| o.entity == *entity) {
                o.radix = value.clone();
            }
        }
        Change::Coefficient { entity, value } => {
            if let Some(i) = op.images.iter_mut().find(|i| i.entity == *entity) {
                i.coefficient = value.clone();
            }
        }
        Change::Enabled(flag) => op.enabled = *flag,
    }
}

/// Operator parameters in force at step `k`: the declared operators with
/// every override at steps `<= k` applied in order. The CAO itself is not
/// modified.
pub fn apply_schedule(cao: &Cao, k: u64) -> Result<Vec<Operator>, ScheduleError> {
    let mut operators = cao.operators.clone();
    for (step, entries) in cao.schedule.steps.range(..=k) {
        for entry in entries {
            check_override(&operators, cao.mode, *step, entry)?;
            apply_override(&mut operators, entry);
        }
    }
    Ok(operators)
}
