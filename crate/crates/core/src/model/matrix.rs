//! Configuration matrix and carry partition derived from a CAO's topology.

use std::fmt;

use super::{Cao, Operator, OperatorForm};
use crate::rational::Rational;

/// Square matrix over the entities of a CAO.
///
/// The diagonal holds each entity's radix (0 for sinks). Cell `(i, j)` with
/// `i != j` holds the conversion coefficient from operand `i` toward image
/// `j`. For fusion and multi operators the coefficient is replicated in the
/// row of every operand of the group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigurationMatrix {
    cells: Vec<Vec<Rational>>,
}

impl ConfigurationMatrix {
    pub fn zeros(m: usize) -> Self {
        ConfigurationMatrix { cells: vec![vec![Rational::zero(); m]; m] }
    }

    pub fn from_rows(cells: Vec<Vec<Rational>>) -> Self {
        let m = cells.len();
        assert!(cells.iter().all(|row| row.len() == m), "configuration matrix must be square");
        ConfigurationMatrix { cells }
    }

    /// Matrix of the given operators over `m` entities, skipping disabled ones.
    pub fn effective(m: usize, operators: &[Operator]) -> Self {
        Self::from_operators(m, operators.iter().filter(|op| op.enabled))
    }

    fn from_operators<'a>(m: usize, operators: impl Iterator<Item = &'a Operator>) -> Self {
        let mut pm = Self::zeros(m);
        for op in operators {
            for operand in &op.operands {
                let row = &mut pm.cells[operand.entity];
                row[operand.entity] = operand.radix.clone();
                for image in &op.images {
                    row[image.entity] = image.coefficient.clone();
                }
            }
        }
        pm
    }

    pub fn dimension(&self) -> usize {
        self.cells.len()
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.cells[row][col]
    }

    pub fn row(&self, row: usize) -> &[Rational] {
        &self.cells[row]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.cells
    }

    pub fn diagonal(&self) -> Vec<Rational> {
        (0..self.dimension()).map(|i| self.cells[i][i].clone()).collect()
    }
}

impl fmt::Display for ConfigurationMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.cells {
            let line: Vec<String> = row.iter().map(Rational::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Configuration matrix of the declared topology (every operator, enabled
/// or not).
pub fn build_configuration_matrix(cao: &Cao) -> ConfigurationMatrix {
    ConfigurationMatrix::from_operators(cao.dimension(), cao.operators.iter())
}

/// Entities grouped by shared carry.
///
/// Operands of a fusion or multi operator share one common carry and form a
/// multi-entity group; every linear or distribution operand is a singleton
/// group; entities that are operands of nothing are sinks. Groups are listed
/// by smallest member, members in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarryPartition {
    groups: Vec<Vec<usize>>,
    sinks: Vec<usize>,
    group_of: Vec<Option<usize>>,
}

impl CarryPartition {
    pub fn new(m: usize, mut groups: Vec<Vec<usize>>) -> Self {
        for g in &mut groups {
            g.sort_unstable();
        }
        groups.retain(|g| !g.is_empty());
        groups.sort();
        let mut group_of = vec![None; m];
        for (index, g) in groups.iter().enumerate() {
            for &e in g {
                assert!(group_of[e].is_none(), "entity {e} appears in two carry groups");
                group_of[e] = Some(index);
            }
        }
        let sinks = (0..m).filter(|&e| group_of[e].is_none()).collect();
        CarryPartition { groups, sinks, group_of }
    }

    pub fn dimension(&self) -> usize {
        self.group_of.len()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn sinks(&self) -> &[usize] {
        &self.sinks
    }

    pub fn group_of(&self, entity: usize) -> Option<usize> {
        self.group_of[entity]
    }

    pub fn is_sink(&self, entity: usize) -> bool {
        self.group_of[entity].is_none()
    }

    /// True when no group has more than one member.
    pub fn all_singletons(&self) -> bool {
        self.groups.iter().all(|g| g.len() == 1)
    }
}

pub fn carry_partition(cao: &Cao) -> CarryPartition {
    let mut groups = Vec::new();
    for op in &cao.operators {
        let members: Vec<usize> = op.operands.iter().map(|o| o.entity).collect();
        match op.form {
            OperatorForm::F | OperatorForm::M => groups.push(members),
            OperatorForm::L | OperatorForm::D => groups.extend(members.into_iter().map(|e| vec![e])),
        }
    }
    CarryPartition::new(cao.dimension(), groups)
}
