//! Reference backend: one step by direct per-operator semantics.
//!
//! Each enabled operator computes a partial carry per operand, takes the
//! minimum as the common carry, leaves `# - common * n` in each operand and
//! sends `r * common` to each image. All firings read the step-k state; their
//! effects are applied together afterwards.

use super::{check_dimension, check_non_negative, StateVector, StepError};
use crate::model::{apply_schedule, Cao, CarryKind, Operator};
use crate::rational::Rational;

/// Everything one operator computed during a step. Vectors are aligned with
/// the operator's operand and image lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Firing {
    pub operator: usize,
    pub partial_carries: Vec<Rational>,
    pub common_carry: Rational,
    pub remainders: Vec<Rational>,
    pub transformants: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub state: StateVector,
    pub firings: Vec<Firing>,
}

pub fn partial_carry(cardinal: &Rational, radix: &Rational, kind: CarryKind) -> Result<Rational, StepError> {
    if !radix.is_positive() {
        return Err(StepError::NonPositiveRadix(radix.clone()));
    }
    let quotient = cardinal.checked_div(radix)?;
    Ok(match kind {
        CarryKind::RationalExact => quotient,
        CarryKind::IntegerFloor => quotient.floor(),
    })
}

/// Computes a firing from `state` without modifying it. A disabled operator
/// yields an idle firing: zero carries, full remainders, zero transformants.
pub fn fire_operator(state: &StateVector, op: &Operator, index: usize) -> Result<Firing, StepError> {
    let partial_carries = if op.enabled {
        op.operands.iter().map(|o| partial_carry(&state[o.entity], &o.radix, op.kind)).collect::<Result<Vec<_>, _>>()?
    } else {
        vec![Rational::zero(); op.operands.len()]
    };
    let common_carry = partial_carries.iter().cloned().reduce(Rational::min).unwrap_or_else(Rational::zero);
    let remainders = op.operands.iter().map(|o| &state[o.entity] - &(&common_carry * &o.radix)).collect();
    let transformants = op.images.iter().map(|i| &i.coefficient * &common_carry).collect();
    Ok(Firing { operator: index, partial_carries, common_carry, remainders, transformants })
}

/// Fires every operator on `state` and applies the results at once.
pub fn step_operators(state: &StateVector, operators: &[Operator], names: Option<&[&str]>) -> Result<Step, StepError> {
    let firings = operators
        .iter()
        .enumerate()
        .map(|(index, op)| fire_operator(state, op, index))
        .collect::<Result<Vec<_>, _>>()?;

    let mut next = state.clone();
    for (op, firing) in operators.iter().zip(&firings) {
        for (operand, remainder) in op.operands.iter().zip(&firing.remainders) {
            next[operand.entity] = remainder.clone();
        }
    }
    for (op, firing) in operators.iter().zip(&firings) {
        for (image, q) in op.images.iter().zip(&firing.transformants) {
            next[image.entity] += q;
        }
    }
    check_non_negative(&next, names)?;
    Ok(Step { state: next, firings })
}

/// One transformation step of `cao` at step index `k`, honouring the schedule.
pub fn step(state: &StateVector, cao: &Cao, k: u64) -> Result<Step, StepError> {
    check_dimension(state, cao.dimension())?;
    let operators = apply_schedule(cao, k)?;
    step_operators(state, &operators, Some(&cao.entity_names()))
}

/// Common-carry vector implied by a set of firings: each operand entity gets
/// its operator's common carry, every other entity 0.
pub fn carry_vector(m: usize, operators: &[Operator], firings: &[Firing]) -> Vec<Rational> {
    let mut carries = vec![Rational::zero(); m];
    for (op, firing) in operators.iter().zip(firings) {
        for operand in &op.operands {
            carries[operand.entity] = firing.common_carry.clone();
        }
    }
    carries
}
