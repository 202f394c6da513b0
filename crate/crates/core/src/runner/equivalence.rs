//! Lockstep comparison of the two backends.

use std::fmt;

use super::{ensure_valid, Backend, RunError, Stepper};
use crate::engine::StepError;
use crate::model::Cao;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    CommonCarry,
    State,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DivergenceKind {
    /// Both backends stepped, but a component differs.
    Value { entity: usize, quantity: Quantity, operator: Rational, matrix: Rational },
    /// One backend failed where the other did not, or they failed differently.
    Outcome { operator: String, matrix: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub step: u64,
    pub kind: DivergenceKind,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DivergenceKind::Value { entity, quantity, operator, matrix } => {
                let what = match quantity {
                    Quantity::CommonCarry => "common carry",
                    Quantity::State => "cardinal",
                };
                write!(
                    f,
                    "step {}: {what} of entity #{entity} differs (operator {operator}, matrix {matrix})",
                    self.step
                )
            }
            DivergenceKind::Outcome { operator, matrix } => {
                write!(f, "step {}: operator backend {operator}; matrix backend {matrix}", self.step)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    /// Steps both backends executed and agreed on.
    pub steps_compared: u64,
    /// Both backends stopped at the same negative-cardinal violation.
    pub stopped_by_violation: bool,
    pub divergence: Option<Divergence>,
}

impl EquivalenceReport {
    pub fn is_equivalent(&self) -> bool {
        self.divergence.is_none()
    }
}

fn first_difference(quantity: Quantity, left: &[Rational], right: &[Rational]) -> Option<DivergenceKind> {
    left.iter().zip(right).position(|(a, b)| a != b).map(|entity| DivergenceKind::Value {
        entity,
        quantity,
        operator: left[entity].clone(),
        matrix: right[entity].clone(),
    })
}

fn outcome(result: &Result<super::Advance, StepError>) -> String {
    match result {
        Ok(_) => "stepped".to_string(),
        Err(e) => format!("failed: {e}"),
    }
}

/// Runs both backends side by side for `steps` steps, each from its own
/// state, and reports the first disagreement in carries or cardinals.
pub fn check_equivalence(cao: &Cao, steps: u64) -> Result<EquivalenceReport, RunError> {
    ensure_valid(cao)?;
    let by_operator = Stepper::new(cao, Backend::Operator)?;
    let by_matrix = Stepper::new(cao, Backend::Matrix)?;
    let mut op_state = cao.initial_state();
    let mut mat_state = op_state.clone();

    for k in 0..steps {
        let a = by_operator.advance(&op_state, k);
        let b = by_matrix.advance(&mat_state, k);
        let divergence = match (&a, &b) {
            (Ok(x), Ok(y)) => first_difference(Quantity::CommonCarry, &x.carries, &y.carries)
                .or_else(|| first_difference(Quantity::State, x.state.as_slice(), y.state.as_slice())),
            (Err(x), Err(y)) => {
                let same_violation = matches!(
                    (x, y),
                    (
                        StepError::NegativeCardinal { entity: e1, value: v1, .. },
                        StepError::NegativeCardinal { entity: e2, value: v2, .. },
                    ) if e1 == e2 && v1 == v2
                );
                if same_violation {
                    return Ok(EquivalenceReport { steps_compared: k, stopped_by_violation: true, divergence: None });
                }
                Some(DivergenceKind::Outcome { operator: outcome(&a), matrix: outcome(&b) })
            }
            _ => Some(DivergenceKind::Outcome { operator: outcome(&a), matrix: outcome(&b) }),
        };
        if let Some(kind) = divergence {
            return Ok(EquivalenceReport {
                steps_compared: k,
                stopped_by_violation: false,
                divergence: Some(Divergence { step: k, kind }),
            });
        }
        if let (Ok(x), Ok(y)) = (a, b) {
            op_state = x.state;
            mat_state = y.state;
        }
    }

    Ok(EquivalenceReport { steps_compared: steps, stopped_by_violation: false, divergence: None })
}
