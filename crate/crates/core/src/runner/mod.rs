//! Simulation driver.
//!
//! [`run`] advances a CAO with either backend until the state stops changing,
//! revisits an earlier state, hits the step limit or would go negative, and
//! keeps a [`StepRecord`] for every state it reached.

mod equivalence;
mod trace;

pub use equivalence::{check_equivalence, Divergence, DivergenceKind, EquivalenceReport, Quantity};
pub use trace::{emit_trace, TraceFormat};

use std::collections::HashMap;
use std::fmt;

use crate::engine::operator::{self, Firing};
use crate::engine::{matrix, StateVector, StepError};
use crate::model::{validate_cao, Cao, ValidationReport};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    /// Direct per-operator firing.
    #[default]
    Operator,
    /// Matrix state equation.
    Matrix,
}

/// Snapshot of the CAO at step `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub step: u64,
    pub state: StateVector,
    /// Control vector used to leave this state; `None` on the last record.
    pub common_carry: Option<Vec<Rational>>,
    /// Per-operator firings of the step leaving this state. Only the operator
    /// backend produces these.
    pub firings: Vec<Firing>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Termination {
    FixedPoint,
    StepLimit,
    /// The current state equals the state recorded at `first_seen`.
    CycleDetected {
        first_seen: u64,
    },
    /// The next step would have made `name` negative.
    QMinusViolation {
        entity: usize,
        name: String,
        value: Rational,
    },
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::FixedPoint => "fixed_point",
            Termination::StepLimit => "step_limit",
            Termination::CycleDetected { .. } => "cycle_detected",
            Termination::QMinusViolation { .. } => "qminus_violation",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::CycleDetected { first_seen } => {
                write!(f, "{} (state first seen at step {first_seen})", self.label())
            }
            Termination::QMinusViolation { name, value, .. } => {
                write!(f, "{} (`{name}` would become {value})", self.label())
            }
            _ => f.write_str(self.label()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub final_state: StateVector,
    /// Steps executed; the step that confirms a fixed point is not counted.
    pub steps: u64,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub outcome: RunOutcome,
    pub records: Vec<StepRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("invalid CAO: {}", describe(.0))]
    Invalid(ValidationReport),
    #[error(transparent)]
    Step(#[from] StepError),
}

fn describe(report: &ValidationReport) -> String {
    let parts: Vec<String> = report.violations.iter().map(|v| v.kind.to_string()).collect();
    parts.join("; ")
}

pub(crate) fn ensure_valid(cao: &Cao) -> Result<(), RunError> {
    let report = validate_cao(cao);
    if report.is_valid() {
        Ok(())
    } else {
        Err(RunError::Invalid(report))
    }
}

pub fn detect_fixed_point(prev: &StateVector, next: &StateVector) -> bool {
    prev == next
}

pub(crate) struct Advance {
    pub state: StateVector,
    pub carries: Vec<Rational>,
    pub firings: Vec<Firing>,
}

/// One step of a CAO with a chosen backend. Matrix operators are built once
/// for stationary CAOs.
pub(crate) struct Stepper<'a> {
    cao: &'a Cao,
    backend: Backend,
    cached: Option<(matrix::StateOperators, matrix::FloorMask)>,
}

impl<'a> Stepper<'a> {
    pub fn new(cao: &'a Cao, backend: Backend) -> Result<Self, StepError> {
        let cached = match backend {
            Backend::Matrix if cao.is_stationary() => Some(matrix::operators_at(cao, 0)?),
            _ => None,
        };
        Ok(Stepper { cao, backend, cached })
    }

    pub fn advance(&self, state: &StateVector, k: u64) -> Result<Advance, StepError> {
        match self.backend {
            Backend::Operator => {
                let step = operator::step(state, self.cao, k)?;
                let carries = operator::carry_vector(self.cao.dimension(), &self.cao.operators, &step.firings);
                Ok(Advance { state: step.state, carries, firings: step.firings })
            }
            Backend::Matrix => {
                let (state, carries) = match &self.cached {
                    Some((ops, floor)) => matrix::advance(state, ops, floor, Some(&self.cao.entity_names()))?,
                    None => matrix::advance_at(state, self.cao, k)?,
                };
                Ok(Advance { state, carries, firings: Vec::new() })
            }
        }
    }
}

/// Runs `cao` from its initial cardinals for at most `max_steps` steps.
pub fn run(cao: &Cao, max_steps: u64, backend: Backend) -> Result<Run, RunError> {
    ensure_valid(cao)?;
    let stepper = Stepper::new(cao, backend)?;

    let initial = cao.initial_state();
    let mut seen: HashMap<StateVector, u64> = HashMap::new();
    seen.insert(initial.clone(), 0);
    let mut records = vec![StepRecord { step: 0, state: initial, common_carry: None, firings: Vec::new() }];

    let mut k: u64 = 0;
    let termination = loop {
        let current = &records[k as usize].state;
        let next = match stepper.advance(current, k) {
            Ok(next) => next,
            Err(StepError::NegativeCardinal { entity, value, .. }) => {
                break Termination::QMinusViolation { entity, name: cao.entity_name(entity).to_string(), value };
            }
            Err(e) => return Err(e.into()),
        };
        if detect_fixed_point(current, &next.state) {
            break Termination::FixedPoint;
        }
        if k == max_steps {
            break Termination::StepLimit;
        }

        let record = &mut records[k as usize];
        record.common_carry = Some(next.carries);
        record.firings = next.firings;
        k += 1;
        let revisit = seen.get(&next.state).copied();
        if revisit.is_none() {
            seen.insert(next.state.clone(), k);
        }
        records.push(StepRecord { step: k, state: next.state, common_carry: None, firings: Vec::new() });
        if let Some(first_seen) = revisit {
            break Termination::CycleDetected { first_seen };
        }
    };

    let outcome = RunOutcome { final_state: records[k as usize].state.clone(), steps: k, termination };
    Ok(Run { outcome, records })
}
