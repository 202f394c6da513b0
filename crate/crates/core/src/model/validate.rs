//! Structural validation of a CAO. Every check runs; violations are collected
//! rather than returned on the first failure.

use std::collections::HashMap;

use super::schedule::{check_override, ScheduleError};
use super::{Cao, Mode, OperatorForm};
use crate::rational::Rational;

/// Where in the CAO a violation was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Entity(usize),
    Operator(usize),
    Operand { operator: usize, position: usize },
    Image { operator: usize, position: usize },
    Override { step: u64, position: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ViolationKind {
    #[error("duplicate entity name `{0}`")]
    DuplicateEntityName(String),
    #[error("entity name `{0}` is not an identifier")]
    InvalidEntityName(String),
    #[error("entity at position {position} carries index {index}")]
    IndexMismatch { position: usize, index: usize },
    #[error("negative cardinal {value} for entity `{entity}`")]
    NegativeCardinal { entity: String, value: Rational },
    #[error("operator refers to unknown entity #{0}")]
    UnknownEntity(usize),
    #[error("declared form {declared} does not match valence ({operands}, {images})")]
    FormMismatch { declared: OperatorForm, operands: usize, images: usize },
    #[error("non-positive radix {value} for operand `{entity}`")]
    NonPositiveRadix { entity: String, value: Rational },
    #[error("duplicate operand `{0}`")]
    DuplicateOperand(String),
    #[error("duplicate image `{0}`")]
    DuplicateImage(String),
    #[error("self-loop: `{0}` is both operand and image of the same operator")]
    SelfLoop(String),
    #[error("multiple outgoing operators: `{entity}` is an operand of operators {first} and {second}")]
    MultipleOutgoing { entity: String, first: usize, second: usize },
    #[error("negative coefficient {value} toward `{entity}` is only allowed in qminus mode")]
    NegativeCoefficient { entity: String, value: Rational },
    #[error("{0}")]
    Schedule(ScheduleError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: Location,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, location: Location, kind: ViolationKind) {
        self.violations.push(Violation { kind, location });
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn validate_cao(cao: &Cao) -> ValidationReport {
    let mut report = ValidationReport::default();
    let m = cao.entities.len();
    let name =
        |i: usize| -> String { cao.entities.get(i).map(|e| e.id.name.clone()).unwrap_or_else(|| format!("#{i}")) };

    let mut seen_names: HashMap<&str, usize> = HashMap::new();
    for (position, entity) in cao.entities.iter().enumerate() {
        let loc = Location::Entity(position);
        if entity.id.index != position {
            report.push(loc, ViolationKind::IndexMismatch { position, index: entity.id.index });
        }
        if !is_identifier(&entity.id.name) {
            report.push(loc, ViolationKind::InvalidEntityName(entity.id.name.clone()));
        }
        if seen_names.insert(entity.id.name.as_str(), position).is_some() {
            report.push(loc, ViolationKind::DuplicateEntityName(entity.id.name.clone()));
        }
        if entity.cardinal.is_negative() {
            report.push(
                loc,
                ViolationKind::NegativeCardinal { entity: entity.id.name.clone(), value: entity.cardinal.clone() },
            );
        }
    }

    let mut outgoing: Vec<Option<usize>> = vec![None; m];
    for (index, op) in cao.operators.iter().enumerate() {
        let (w, v) = op.valence();
        if OperatorForm::from_arity(w, v) != Some(op.form) {
            report.push(
                Location::Operator(index),
                ViolationKind::FormMismatch { declared: op.form, operands: w, images: v },
            );
        }

        for (position, operand) in op.operands.iter().enumerate() {
            let loc = Location::Operand { operator: index, position };
            if operand.entity >= m {
                report.push(loc, ViolationKind::UnknownEntity(operand.entity));
                continue;
            }
            if !operand.radix.is_positive() {
                report.push(
                    loc,
                    ViolationKind::NonPositiveRadix { entity: name(operand.entity), value: operand.radix.clone() },
                );
            }
            if op.operands[..position].iter().any(|o| o.entity == operand.entity) {
                report.push(loc, ViolationKind::DuplicateOperand(name(operand.entity)));
                continue;
            }
            match outgoing[operand.entity] {
                Some(first) => report
                    .push(loc, ViolationKind::MultipleOutgoing { entity: name(operand.entity), first, second: index }),
                None => outgoing[operand.entity] = Some(index),
            }
        }

        for (position, image) in op.images.iter().enumerate() {
            let loc = Location::Image { operator: index, position };
            if image.entity >= m {
                report.push(loc, ViolationKind::UnknownEntity(image.entity));
                continue;
            }
            if op.images[..position].iter().any(|i| i.entity == image.entity) {
                report.push(loc, ViolationKind::DuplicateImage(name(image.entity)));
            }
            if op.operand(image.entity).is_some() {
                report.push(loc, ViolationKind::SelfLoop(name(image.entity)));
            }
            if image.coefficient.is_negative() && cao.mode != Mode::QMinus {
                report.push(
                    loc,
                    ViolationKind::NegativeCoefficient { entity: name(image.entity), value: image.coefficient.clone() },
                );
            }
        }
    }

    // Overrides are checked against the declared operators; enablement and
    // parameter values never change which entities an override may target.
    for (step, entries) in cao.schedule.iter() {
        for (position, entry) in entries.iter().enumerate() {
            if let Err(e) = check_override(&cao.operators, cao.mode, step, entry) {
                report.push(Location::Override { step, position }, ViolationKind::Schedule(e));
            }
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CarryKind, Change, Image, Operand, Operator, Override};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn op(operands: &[(usize, Rational)], images: &[(usize, Rational)]) -> Operator {
        Operator::new(
            CarryKind::RationalExact,
            operands.iter().map(|(e, n)| Operand { entity: *e, radix: n.clone() }).collect(),
            images.iter().map(|(e, r)| Image { entity: *e, coefficient: r.clone() }).collect(),
        )
        .unwrap()
    }

    fn pair() -> Cao {
        let mut cao = Cao::new("pair");
        cao.add_entity("a", q(1, 1));
        cao.add_entity("b", q(0, 1));
        cao.add_entity("c", q(0, 1));
        cao
    }

    fn kinds(report: &ValidationReport) -> Vec<&ViolationKind> {
        report.violations.iter().map(|v| &v.kind).collect()
    }

    #[test]
    fn zero_radix_is_reported() {
        let mut cao = pair();
        cao.add_operator(op(&[(0, q(0, 1))], &[(1, q(1, 1))]));
        let report = validate_cao(&cao);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].location, Location::Operand { operator: 0, position: 0 });
        assert!(report.violations[0].kind.to_string().contains("non-positive radix"));
    }

    #[test]
    fn entity_with_two_outgoing_operators_is_reported() {
        let mut cao = pair();
        cao.add_operator(op(&[(0, q(1, 1))], &[(1, q(1, 1))]));
        cao.add_operator(op(&[(0, q(2, 1))], &[(2, q(1, 1))]));
        let report = validate_cao(&cao);
        assert_eq!(kinds(&report), vec![&ViolationKind::MultipleOutgoing { entity: "a".into(), first: 0, second: 1 }]);
        assert!(report.violations[0].kind.to_string().contains("multiple outgoing operators"));
    }

    #[test]
    fn all_violations_are_collected() {
        let mut cao = pair();
        cao.add_entity("a", q(-1, 1));
        cao.add_operator(op(&[(0, q(-1, 1)), (0, q(1, 1))], &[(0, q(-1, 2)), (1, q(1, 1)), (1, q(1, 1))]));
        cao.schedule.push(3, Override { operator: 5, change: Change::Enabled(false) });
        let report = validate_cao(&cao);
        let found = kinds(&report);
        assert!(found.contains(&&ViolationKind::DuplicateEntityName("a".into())));
        assert!(found.iter().any(|k| matches!(k, ViolationKind::NegativeCardinal { .. })));
        assert!(found.iter().any(|k| matches!(k, ViolationKind::NonPositiveRadix { .. })));
        assert!(found.contains(&&ViolationKind::DuplicateOperand("a".into())));
        assert!(found.contains(&&ViolationKind::SelfLoop("a".into())));
        assert!(found.contains(&&ViolationKind::DuplicateImage("b".into())));
        assert!(found.iter().any(|k| matches!(k, ViolationKind::NegativeCoefficient { .. })));
        assert!(found.iter().any(|k| matches!(k, ViolationKind::Schedule(_))));
    }

    #[test]
    fn negative_coefficients_are_legal_in_qminus_mode() {
        let mut cao = pair().with_mode(Mode::QMinus);
        cao.add_operator(op(&[(0, q(1, 1))], &[(1, q(-1, 1))]));
        assert!(validate_cao(&cao).is_valid());
    }

    #[test]
    fn cycles_are_permitted() {
        let mut cao = pair();
        cao.add_operator(op(&[(0, q(1, 1))], &[(1, q(1, 1))]));
        cao.add_operator(op(&[(1, q(1, 1))], &[(0, q(1, 1))]));
        assert!(validate_cao(&cao).is_valid());
    }

    #[test]
    fn form_mismatch_and_unknown_entities() {
        let mut cao = pair();
        let mut bad = op(&[(0, q(1, 1))], &[(1, q(1, 1))]);
        bad.form = OperatorForm::M;
        cao.add_operator(bad);
        cao.add_operator(op(&[(7, q(1, 1))], &[(1, q(1, 1))]));
        let report = validate_cao(&cao);
        let found = kinds(&report);
        assert!(found.iter().any(|k| matches!(k, ViolationKind::FormMismatch { .. })));
        assert!(found.contains(&&ViolationKind::UnknownEntity(7)));
    }

    #[test]
    fn names_must_be_identifiers() {
        let mut cao = Cao::new("names");
        cao.add_entity("ok_1", q(0, 1));
        cao.add_entity("1bad", q(0, 1));
        cao.add_entity("", q(0, 1));
        let report = validate_cao(&cao);
        assert_eq!(report.violations.len(), 2);
    }
}
