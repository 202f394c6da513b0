#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use snsq_core::model::{Cao, CarryKind, Change, Image, Mode, Operand, Operator, Override};
use snsq_core::Rational;

pub const MAX_ENTITIES: usize = 8;
pub const MAX_PART: i64 = 12;

#[derive(Debug, Clone, Copy, Default)]
pub struct Shape {
    /// Images always sit after every operand of their operator; Q+ only, no schedules.
    pub dag: bool,
    /// Integer cardinals, radices and coefficients; IntegerFloor throughout.
    pub integer: bool,
    /// Allow per-step overrides.
    pub schedules: bool,
}

impl Shape {
    pub const MIXED: Shape = Shape { dag: false, integer: false, schedules: true };
    pub const DAG: Shape = Shape { dag: true, integer: false, schedules: false };
    pub const INTEGER: Shape = Shape { dag: false, integer: true, schedules: true };
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d).unwrap()
}

fn magnitude(rng: &mut impl Rng, integer: bool) -> Rational {
    let n = rng.gen_range(1..=MAX_PART);
    let d = if integer { 1 } else { rng.gen_range(1..=MAX_PART) };
    q(n, d)
}

fn coefficient(rng: &mut impl Rng, integer: bool, mode: Mode) -> Rational {
    let value = magnitude(rng, integer);
    if mode == Mode::QMinus && rng.gen_bool(0.3) {
        -value
    } else {
        value
    }
}

fn kind(rng: &mut impl Rng, integer: bool) -> CarryKind {
    if integer || rng.gen_bool(0.5) {
        CarryKind::IntegerFloor
    } else {
        CarryKind::RationalExact
    }
}

/// Random valid CAO with at most [`MAX_ENTITIES`] entities.
pub fn random_cao(rng: &mut impl Rng, shape: Shape) -> Cao {
    let m = rng.gen_range(1..=MAX_ENTITIES);
    let mode = if shape.dag || rng.gen_bool(0.5) { Mode::QPlus } else { Mode::QMinus };
    let default_kind = kind(rng, shape.integer);
    let mut cao = Cao::new(format!("random {m}")).with_mode(mode).with_default_kind(default_kind);

    for e in 0..m {
        let n = rng.gen_range(0..=60);
        let d = if shape.integer { 1 } else { rng.gen_range(1..=MAX_PART) };
        cao.add_entity(format!("e{e}"), q(n, d));
    }

    let mut free: Vec<usize> = (0..m).collect();
    for _ in 0..rng.gen_range(0..=m) {
        free.shuffle(rng);
        let w = rng.gen_range(1..=3).min(free.len());
        if w == 0 {
            break;
        }
        let operands: Vec<usize> = free[..w].to_vec();
        let highest = *operands.iter().max().unwrap();
        let mut targets: Vec<usize> =
            (0..m).filter(|e| !operands.contains(e) && (!shape.dag || *e > highest)).collect();
        if targets.is_empty() {
            continue;
        }
        targets.shuffle(rng);
        let v = rng.gen_range(1..=3).min(targets.len());

        let kind = kind(rng, shape.integer);
        let operands: Vec<Operand> =
            operands.into_iter().map(|entity| Operand { entity, radix: magnitude(rng, shape.integer) }).collect();
        let images: Vec<Image> = targets[..v]
            .iter()
            .map(|&entity| Image { entity, coefficient: coefficient(rng, shape.integer, mode) })
            .collect();
        free.retain(|e| !operands.iter().any(|o| o.entity == *e));
        cao.add_operator(Operator::new(kind, operands, images).unwrap());
    }

    if shape.schedules && !shape.dag && !cao.operators.is_empty() && rng.gen_bool(0.3) {
        for _ in 0..rng.gen_range(1..=3) {
            let step = rng.gen_range(0..=5);
            let operator = rng.gen_range(0..cao.operators.len());
            let op = &cao.operators[operator];
            let change = match rng.gen_range(0..3) {
                0 => Change::Radix {
                    entity: op.operands.choose(rng).unwrap().entity,
                    value: magnitude(rng, shape.integer),
                },
                1 => Change::Coefficient {
                    entity: op.images.choose(rng).unwrap().entity,
                    value: coefficient(rng, shape.integer, mode),
                },
                _ => Change::Enabled(rng.gen_bool(0.5)),
            };
            cao.schedule.push(step, Override { operator, change });
        }
    }
    cao
}

/// `count` CAOs drawn from one seeded stream.
pub fn corpus(seed: u64, count: usize, shape: Shape) -> Vec<Cao> {
    let mut rng = rng(seed);
    (0..count).map(|_| random_cao(&mut rng, shape)).collect()
}

pub fn model_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("models").join(name)
}

pub fn model(name: &str) -> Cao {
    let text = std::fs::read_to_string(model_path(name)).unwrap();
    snsq_core::dsl::parse(&text).unwrap()
}
