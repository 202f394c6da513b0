use std::fmt::Write;

use crate::model::{Cao, CarryKind, Change, Mode, Override, Schedule};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical text of a valid CAO.
///
/// Entities are written in index order, operators in declaration order and
/// schedule blocks by ascending step. The text has no syntax for an operator
/// that starts out disabled, so such operators are written enabled with an
/// `enabled = false` override at step 0.
pub fn serialize(cao: &Cao) -> String {
    let mut out = String::new();
    let names = cao.entity_names();

    write!(out, "cao {}", quote(&cao.name)).unwrap();
    if cao.mode != Mode::QPlus {
        write!(out, " mode {}", cao.mode.keyword()).unwrap();
    }
    if cao.default_kind != CarryKind::RationalExact {
        write!(out, " kind {}", cao.default_kind.keyword()).unwrap();
    }
    out.push_str(" {\n");

    for entity in &cao.entities {
        writeln!(out, "    entity {} = {};", entity.id.name, entity.cardinal).unwrap();
    }

    for op in &cao.operators {
        out.push_str("    op ");
        if op.kind != cao.default_kind {
            write!(out, "{} ", op.kind.keyword()).unwrap();
        }
        let operands: Vec<String> = op.operands.iter().map(|o| format!("{}:{}", names[o.entity], o.radix)).collect();
        let images: Vec<String> = op.images.iter().map(|i| format!("{}:{}", names[i.entity], i.coefficient)).collect();
        writeln!(out, "({}) -> ({});", operands.join(", "), images.join(", ")).unwrap();
    }

    let mut schedule = Schedule::default();
    for (index, op) in cao.operators.iter().enumerate() {
        if !op.enabled {
            schedule.push(0, Override { operator: index, change: Change::Enabled(false) });
        }
    }
    for (step, entries) in cao.schedule.iter() {
        for entry in entries {
            schedule.push(step, entry.clone());
        }
    }
    for (step, entries) in schedule.iter() {
        writeln!(out, "    at {step} {{").unwrap();
        for entry in entries {
            let change = match &entry.change {
                Change::Radix { entity, value } => format!("radix {} = {}", names[*entity], value),
                Change::Coefficient { entity, value } => format!("coeff {} = {}", names[*entity], value),
                Change::Enabled(flag) => format!("enabled = {flag}"),
            };
            writeln!(out, "        op {} {};", entry.operator, change).unwrap();
        }
        out.push_str("    }\n");
    }

    out.push_str("}\n");
    out
}
