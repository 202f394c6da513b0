//! Cardinal abstract objects: entities, operators and their topology.
//!
//! A [`Cao`] is a named set of entities (each holding a non-negative cardinal)
//! connected by operators. An operator takes a carry out of its operand
//! entities and delivers coefficient-scaled transformants to its images.

mod matrix;
mod schedule;
mod validate;

pub use matrix::{build_configuration_matrix, carry_partition, CarryPartition, ConfigurationMatrix};
pub use schedule::{apply_schedule, Change, Override, Schedule, ScheduleError};
pub use validate::{validate_cao, Location, ValidationReport, Violation, ViolationKind};

use std::fmt;

use crate::engine::StateVector;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntityId {
    pub index: usize,
    pub name: String,
}

/// Cardinal abstract entity: one state variable of the system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub id: EntityId,
    pub cardinal: Rational,
}

/// How an operator turns a cardinal into a carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CarryKind {
    /// `p = # / n`, no rounding.
    RationalExact,
    /// `p = floor(# / n)`, the classical integer radix carry.
    IntegerFloor,
}

impl CarryKind {
    pub fn keyword(self) -> &'static str {
        match self {
            CarryKind::RationalExact => "rational",
            CarryKind::IntegerFloor => "integer",
        }
    }
}

/// Operator form, fixed by its valence (operand count, image count).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorForm {
    /// Linear, valence (1, 1).
    L,
    /// Distribution, valence (1, v) with v >= 2.
    D,
    /// Fusion, valence (w, 1) with w >= 2.
    F,
    /// Multi, valence (w, v) with w, v >= 2.
    M,
}

impl OperatorForm {
    pub fn from_arity(operands: usize, images: usize) -> Option<Self> {
        match (operands, images) {
            (0, _) | (_, 0) => None,
            (1, 1) => Some(OperatorForm::L),
            (1, _) => Some(OperatorForm::D),
            (_, 1) => Some(OperatorForm::F),
            _ => Some(OperatorForm::M),
        }
    }
}

impl fmt::Display for OperatorForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OperatorForm::L => "L",
            OperatorForm::D => "D",
            OperatorForm::F => "F",
            OperatorForm::M => "M",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operand {
    pub entity: usize,
    pub radix: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub entity: usize,
    pub coefficient: Rational,
}

/// Cardinal semantic operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operator {
    pub kind: CarryKind,
    pub form: OperatorForm,
    pub operands: Vec<Operand>,
    pub images: Vec<Image>,
    pub enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no operator form has valence ({operands}, {images})")]
pub struct ArityError {
    pub operands: usize,
    pub images: usize,
}

impl Operator {
    /// Creates an enabled operator whose form is inferred from its arity.
    pub fn new(kind: CarryKind, operands: Vec<Operand>, images: Vec<Image>) -> Result<Self, ArityError> {
        let form = OperatorForm::from_arity(operands.len(), images.len())
            .ok_or(ArityError { operands: operands.len(), images: images.len() })?;
        Ok(Operator { kind, form, operands, images, enabled: true })
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.operands.len(), self.images.len())
    }

    pub fn operand(&self, entity: usize) -> Option<&Operand> {
        self.operands.iter().find(|o| o.entity == entity)
    }

    pub fn image(&self, entity: usize) -> Option<&Image> {
        self.images.iter().find(|i| i.entity == entity)
    }
}

/// Sign rule for conversion coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    /// All coefficients non-negative.
    #[default]
    QPlus,
    /// Coefficients (and hence transformants) may be negative; every cardinal
    /// must still be non-negative after each step.
    QMinus,
}

impl Mode {
    pub fn keyword(self) -> &'static str {
        match self {
            Mode::QPlus => "qplus",
            Mode::QMinus => "qminus",
        }
    }
}

/// Cardinal abstract object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cao {
    pub name: String,
    pub mode: Mode,
    /// Kind given to operators that do not state their own.
    pub default_kind: CarryKind,
    pub entities: Vec<Entity>,
    pub operators: Vec<Operator>,
    pub schedule: Schedule,
}

impl Cao {
    pub fn new(name: impl Into<String>) -> Self {
        Cao {
            name: name.into(),
            mode: Mode::QPlus,
            default_kind: CarryKind::RationalExact,
            entities: Vec::new(),
            operators: Vec::new(),
            schedule: Schedule::default(),
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_default_kind(mut self, kind: CarryKind) -> Self {
        self.default_kind = kind;
        self
    }

    /// Appends an entity and returns its index.
    pub fn add_entity(&mut self, name: impl Into<String>, cardinal: Rational) -> usize {
        let index = self.entities.len();
        self.entities.push(Entity { id: EntityId { index, name: name.into() }, cardinal });
        index
    }

    /// Appends an operator and returns its index.
    pub fn add_operator(&mut self, operator: Operator) -> usize {
        self.operators.push(operator);
        self.operators.len() - 1
    }

    pub fn dimension(&self) -> usize {
        self.entities.len()
    }

    pub fn entity_index(&self, name: &str) -> Option<usize> {
        self.entities.iter().position(|e| e.id.name == name)
    }

    pub fn entity_name(&self, index: usize) -> &str {
        &self.entities[index].id.name
    }

    pub fn entity_names(&self) -> Vec<&str> {
        self.entities.iter().map(|e| e.id.name.as_str()).collect()
    }

    pub fn initial_state(&self) -> StateVector {
        self.entities.iter().map(|e| e.cardinal.clone()).collect()
    }

    /// The operator that uses `entity` as an operand, if any.
    pub fn outgoing_operator(&self, entity: usize) -> Option<usize> {
        self.operators.iter().position(|op| op.operands.iter().any(|o| o.entity == entity))
    }

    pub fn is_stationary(&self) -> bool {
        self.schedule.is_empty()
    }
}
