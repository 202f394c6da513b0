//! State-equation backend.
//!
//! The configuration matrix is split into the radix operator `N`, its
//! sink-safe inverse `N⁻`, the transposed conversion operator `Rt` and the
//! common-carry operator `Λ`; a step evaluates
//!
//! ```text
//! #(k+1) = #(k) + (Rt - N) Λ N⁻ #(k)
//! ```
//!
//! `Λ` is applied as a group minimum over the carry partition rather than as
//! a matrix product: every member of a fusion group receives the smallest
//! partial carry of the group, singletons pass through, sinks are 0.
//! `(Rt - N)` is applied as two sparse passes (outflow, then inflows).

use super::{check_dimension, check_non_negative, StateVector, StepError};
use crate::model::{apply_schedule, carry_partition, Cao, CarryKind, CarryPartition, ConfigurationMatrix, Operator};
use crate::rational::Rational;

/// Diagonal `N`: entity radices, 0 for sinks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadixOperator(Vec<Rational>);

/// Diagonal `N⁻`: reciprocal radices, 0 where the radix is 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseRadixOperator(Vec<Rational>);

/// `Rt`: cell `(image, operand)` holds the coefficient the operand's carry is
/// scaled by on its way to the image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversionTranspose {
    cells: Vec<Vec<Rational>>,
    // (image, coefficient) pairs per operand column, for the sparse inflow pass
    columns: Vec<Vec<(usize, Rational)>>,
}

/// `Λ`, held as the carry partition it is defined by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonCarryOperator(CarryPartition);

/// The four operators of the state equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateOperators {
    pub radix: RadixOperator,
    pub inverse: InverseRadixOperator,
    pub conversion: ConversionTranspose,
    pub common: CommonCarryOperator,
}

/// Entities whose partial carry is floored (operands of integer-kind operators).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloorMask(Vec<bool>);

impl RadixOperator {
    pub fn diagonal(&self) -> &[Rational] {
        &self.0
    }
}

impl InverseRadixOperator {
    pub fn diagonal(&self) -> &[Rational] {
        &self.0
    }
}

impl ConversionTranspose {
    pub fn get(&self, image: usize, operand: usize) -> &Rational {
        &self.cells[image][operand]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.cells
    }
}

impl CommonCarryOperator {
    pub fn new(partition: CarryPartition) -> Self {
        CommonCarryOperator(partition)
    }

    pub fn partition(&self) -> &CarryPartition {
        &self.0
    }
}

impl StateOperators {
    pub fn dimension(&self) -> usize {
        self.radix.0.len()
    }

    /// Dense `Rt - N`.
    pub fn conversion_minus_radix(&self) -> Vec<Vec<Rational>> {
        let mut out = self.conversion.cells.clone();
        for (i, n) in self.radix.0.iter().enumerate() {
            out[i][i] -= n;
        }
        out
    }
}

impl FloorMask {
    pub fn none(m: usize) -> Self {
        FloorMask(vec![false; m])
    }

    pub fn from_operators(m: usize, operators: &[Operator]) -> Self {
        let mut mask = vec![false; m];
        for op in operators.iter().filter(|op| op.kind == CarryKind::IntegerFloor) {
            for o in &op.operands {
                mask[o.entity] = true;
            }
        }
        FloorMask(mask)
    }

    pub fn is_floored(&self, entity: usize) -> bool {
        self.0[entity]
    }
}

fn malformed(msg: String) -> StepError {
    StepError::MalformedMatrix(msg)
}

/// Splits a configuration matrix into `N`, `N⁻`, `Rt` and `Λ`.
///
/// Within a fusion group every operand row carries the same coefficients;
/// `Rt` takes each image column once, attributing the t-th image of the group
/// (in column order) to its (t mod w)-th member. Any member would do, since
/// all members carry the same common carry.
pub fn build_operators(pm: &ConfigurationMatrix, partition: &CarryPartition) -> Result<StateOperators, StepError> {
    let m = pm.dimension();
    if partition.dimension() != m {
        return Err(malformed(format!("partition covers {} entities, matrix has {m}", partition.dimension())));
    }

    let radix = pm.diagonal();
    if let Some(i) = radix.iter().position(Rational::is_negative) {
        return Err(malformed(format!("negative radix on row {i}")));
    }
    let inverse = radix
        .iter()
        .map(|n| if n.is_zero() { Ok(Rational::zero()) } else { n.recip() })
        .collect::<Result<Vec<_>, _>>()?;

    let mut cells = vec![vec![Rational::zero(); m]; m];
    for &sink in partition.sinks() {
        if !radix[sink].is_zero() {
            return Err(malformed(format!("sink row {sink} has radix {}", radix[sink])));
        }
        if (0..m).any(|c| c != sink && !pm.get(sink, c).is_zero()) {
            return Err(malformed(format!("sink row {sink} has outgoing coefficients")));
        }
    }
    for group in partition.groups() {
        let lead = group[0];
        for &member in group {
            for c in 0..m {
                let in_group = group.contains(&c);
                let cell = pm.get(member, c);
                if in_group && c != member && !cell.is_zero() {
                    return Err(malformed(format!("row {member} feeds its own carry group at column {c}")));
                }
                if !in_group && cell != pm.get(lead, c) {
                    return Err(malformed(format!(
                        "rows {lead} and {member} of one carry group disagree at column {c}"
                    )));
                }
            }
        }
        let images = (0..m).filter(|&c| !group.contains(&c) && !pm.get(lead, c).is_zero());
        for (t, image) in images.enumerate() {
            let operand = group[t % group.len()];
            cells[image][operand] = pm.get(lead, image).clone();
        }
    }

    let mut columns = vec![Vec::new(); m];
    for (image, row) in cells.iter().enumerate() {
        for (operand, r) in row.iter().enumerate() {
            if !r.is_zero() {
                columns[operand].push((image, r.clone()));
            }
        }
    }

    Ok(StateOperators {
        radix: RadixOperator(radix),
        inverse: InverseRadixOperator(inverse),
        conversion: ConversionTranspose { cells, columns },
        common: CommonCarryOperator(partition.clone()),
    })
}

/// `N⁻ #`, floored where the mask says so.
pub fn partial_carries(state: &StateVector, inverse: &InverseRadixOperator, floor: &FloorMask) -> Vec<Rational> {
    state
        .iter()
        .zip(&inverse.0)
        .enumerate()
        .map(|(e, (cardinal, ninv))| {
            let p = cardinal * ninv;
            if floor.is_floored(e) {
                p.floor()
            } else {
                p
            }
        })
        .collect()
}

/// `Λ p`: group minimum for every carry group, 0 for sinks.
pub fn common_carry(lambda: &CommonCarryOperator, partial: &[Rational]) -> Vec<Rational> {
    let partition = &lambda.0;
    let mut out = vec![Rational::zero(); partial.len()];
    for group in partition.groups() {
        let least = group.iter().map(|&e| partial[e].clone()).reduce(Rational::min).unwrap_or_else(Rational::zero);
        for &e in group {
            out[e] = least.clone();
        }
    }
    out
}

/// `# + (Rt - N) c` for a control vector `c`.
fn apply_control(state: &StateVector, ops: &StateOperators, control: &[Rational]) -> StateVector {
    let mut next = state.clone();
    for (e, c) in control.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        next[e] -= &(&ops.radix.0[e] * c);
        for (image, r) in &ops.conversion.columns[e] {
            next[*image] += r * c;
        }
    }
    next
}

/// One step of the full state equation. Returns the next state together with
/// the common-carry (control) vector it was computed from.
pub fn advance(
    state: &StateVector,
    ops: &StateOperators,
    floor: &FloorMask,
    names: Option<&[&str]>,
) -> Result<(StateVector, Vec<Rational>), StepError> {
    check_dimension(state, ops.dimension())?;
    let partial = partial_carries(state, &ops.inverse, floor);
    let control = common_carry(&ops.common, &partial);
    let next = apply_control(state, ops, &control);
    check_non_negative(&next, names)?;
    Ok((next, control))
}

pub fn step_state(state: &StateVector, ops: &StateOperators, floor: &FloorMask) -> Result<StateVector, StepError> {
    advance(state, ops, floor, None).map(|(next, _)| next)
}

/// The state equation without `Λ`; only meaningful when every carry group is
/// a singleton.
pub fn step_singletons(state: &StateVector, ops: &StateOperators, floor: &FloorMask) -> Result<StateVector, StepError> {
    if !ops.common.0.all_singletons() {
        return Err(StepError::FusionGroupPresent);
    }
    check_dimension(state, ops.dimension())?;
    let control = partial_carries(state, &ops.inverse, floor);
    let next = apply_control(state, ops, &control);
    check_non_negative(&next, None)?;
    Ok(next)
}

/// Operators for step `k` of `cao`, with the schedule applied. The carry
/// partition always follows the declared topology.
pub fn operators_at(cao: &Cao, k: u64) -> Result<(StateOperators, FloorMask), StepError> {
    let effective = apply_schedule(cao, k)?;
    let pm = ConfigurationMatrix::effective(cao.dimension(), &effective);
    let ops = build_operators(&pm, &carry_partition(cao))?;
    Ok((ops, FloorMask::from_operators(cao.dimension(), &effective)))
}

/// Step of the time-dependent state equation: parameters in force at `k`.
pub fn advance_at(state: &StateVector, cao: &Cao, k: u64) -> Result<(StateVector, Vec<Rational>), StepError> {
    let (ops, floor) = operators_at(cao, k)?;
    advance(state, &ops, &floor, Some(&cao.entity_names()))
}

pub fn step_at(state: &StateVector, cao: &Cao, k: u64) -> Result<StateVector, StepError> {
    advance_at(state, cao, k).map(|(next, _)| next)
}
