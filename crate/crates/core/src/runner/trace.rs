//! Trace output. Every number is written as exact rational text.

use std::io::{self, Write};
use std::str::FromStr;

use serde_json::{Map, Value};

use super::StepRecord;
use crate::model::Cao;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceFormat {
    /// One JSON object per step, with carries and firings.
    #[default]
    Jsonl,
    /// `step,entity,cardinal` rows; states only.
    Csv,
}

impl FromStr for TraceFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(TraceFormat::Jsonl),
            "csv" => Ok(TraceFormat::Csv),
            other => Err(format!("unknown trace format `{other}` (expected jsonl or csv)")),
        }
    }
}

fn named<'a>(names: impl IntoIterator<Item = &'a str>, values: &[Rational]) -> Value {
    let map: Map<String, Value> =
        names.into_iter().zip(values).map(|(n, v)| (n.to_string(), Value::String(v.to_string()))).collect();
    Value::Object(map)
}

fn jsonl_line(cao: &Cao, record: &StepRecord) -> Value {
    let names = cao.entity_names();
    let firings: Vec<Value> = record
        .firings
        .iter()
        .map(|firing| {
            let op = &cao.operators[firing.operator];
            let mut obj = Map::new();
            obj.insert("op".into(), Value::from(firing.operator));
            obj.insert("remainders".into(), named(op.operands.iter().map(|o| names[o.entity]), &firing.remainders));
            obj.insert("transformants".into(), named(op.images.iter().map(|i| names[i.entity]), &firing.transformants));
            Value::Object(obj)
        })
        .collect();

    let mut obj = Map::new();
    obj.insert("step".into(), Value::from(record.step));
    obj.insert("state".into(), named(names.iter().copied(), record.state.as_slice()));
    obj.insert(
        "common_carry".into(),
        record.common_carry.as_ref().map_or(Value::Null, |c| named(names.iter().copied(), c)),
    );
    obj.insert("firings".into(), Value::Array(firings));
    Value::Object(obj)
}

pub fn emit_trace(cao: &Cao, records: &[StepRecord], format: TraceFormat, out: &mut impl Write) -> io::Result<()> {
    match format {
        TraceFormat::Jsonl => {
            for record in records {
                serde_json::to_writer(&mut *out, &jsonl_line(cao, record))?;
                out.write_all(b"\n")?;
            }
        }
        TraceFormat::Csv => {
            if records.is_empty() {
                return Ok(());
            }
            writeln!(out, "step,entity,cardinal")?;
            for record in records {
                for (entity, value) in cao.entities.iter().zip(&record.state) {
                    writeln!(out, "{},{},{}", record.step, entity.id.name, value)?;
                }
            }
        }
    }
    out.flush()
}
