//! Hand-built CAOs shared by unit tests.

use crate::model::{Cao, CarryKind, Image, Mode, Operand, Operator};
use crate::rational::Rational;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d).unwrap()
}

pub fn operator(kind: CarryKind, operands: &[(usize, Rational)], images: &[(usize, Rational)]) -> Operator {
    Operator::new(
        kind,
        operands.iter().map(|(e, n)| Operand { entity: *e, radix: n.clone() }).collect(),
        images.iter().map(|(e, r)| Image { entity: *e, coefficient: r.clone() }).collect(),
    )
    .unwrap()
}

/// Seven entities i, j, d, s, g, u, h joined by a 2M2, an L, a D2 and a 2F.
pub fn seven_entity_network() -> Cao {
    let mut cao = Cao::new("seven");
    let [i, j, d, s, g, u, h] = ["i", "j", "d", "s", "g", "u", "h"].map(|n| cao.add_entity(n, q(0, 1)));
    cao.entities[i].cardinal = q(33, 1);
    cao.entities[j].cardinal = q(21, 1);
    let k = CarryKind::RationalExact;
    cao.add_operator(operator(k, &[(i, q(10, 1)), (j, q(8, 1))], &[(d, q(1, 1)), (s, q(2, 1))]));
    cao.add_operator(operator(k, &[(d, q(8, 1))], &[(g, q(2, 1))]));
    cao.add_operator(operator(k, &[(s, q(10, 1))], &[(g, q(1, 1)), (u, q(3, 1))]));
    cao.add_operator(operator(k, &[(g, q(4, 1)), (u, q(2, 1))], &[(h, q(1, 1))]));
    cao
}

/// A single 2F operator: #i = 7, #j = 3, n = (1/3, 2/5), r = 2/7 toward h = 1.
pub fn fusion_pair() -> Cao {
    let mut cao = Cao::new("fusion");
    let i = cao.add_entity("i", q(7, 1));
    let j = cao.add_entity("j", q(3, 1));
    let h = cao.add_entity("h", q(1, 1));
    cao.add_operator(operator(CarryKind::RationalExact, &[(i, q(1, 3)), (j, q(2, 5))], &[(h, q(2, 7))]));
    cao
}

/// Two integer-floor L operators feeding s, the second with coefficient -1.
pub fn signed_pair() -> Cao {
    let mut cao = Cao::new("signed").with_mode(Mode::QMinus).with_default_kind(CarryKind::IntegerFloor);
    let i = cao.add_entity("i", q(21, 1));
    let j = cao.add_entity("j", q(27, 1));
    let s = cao.add_entity("s", q(5, 1));
    let k = CarryKind::IntegerFloor;
    cao.add_operator(operator(k, &[(i, q(10, 1))], &[(s, q(3, 1))]));
    cao.add_operator(operator(k, &[(j, q(8, 1))], &[(s, q(-1, 1))]));
    cao
}

pub fn state(values: &[(i64, i64)]) -> crate::engine::StateVector {
    values.iter().map(|&(n, d)| q(n, d)).collect()
}
