mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{corpus, model, model_path, Shape};
use snsq_core::dsl::{parse, serialize};
use snsq_core::engine::operator::{fire_operator, step};
use snsq_core::model::{apply_schedule, build_configuration_matrix, Cao, CarryKind, OperatorForm};
use snsq_core::runner::{check_equivalence, run, Backend, Termination};
use snsq_core::Rational;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d).unwrap()
}

fn v(values: &[(i64, i64)]) -> Vec<Rational> {
    values.iter().map(|&(n, d)| q(n, d)).collect()
}

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed < budget, || format!("took {elapsed:?}, budget {budget:?}"))
}

fn example_1() -> Outcome {
    let cao = model("example1.sns");
    let state = cao.initial_state();
    let started = Instant::now();
    let firing = fire_operator(&state, &cao.operators[0], 0).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let after = step(&state, &cao, 0).map_err(|e| e.to_string())?;

    ensure(firing.common_carry == q(15, 2), || format!("common carry {}", firing.common_carry))?;
    ensure(firing.remainders == v(&[(9, 2), (0, 1)]), || format!("remainders {:?}", firing.remainders))?;
    ensure(firing.transformants == v(&[(15, 7)]), || format!("transformant {:?}", firing.transformants))?;
    ensure(after.state[2] == q(22, 7), || format!("h' = {}", after.state[2]))?;
    within(elapsed, Duration::from_millis(1))?;
    Ok(format!("common 15/2, rem (9/2, 0), q_h 15/7, h' 22/7 in {elapsed:?}"))
}

fn example_2() -> Outcome {
    let cao = model("example2.sns");
    let expected_matrix: Vec<Vec<Rational>> = [
        [10, 0, 1, 2, 0, 0, 0],
        [0, 8, 1, 2, 0, 0, 0],
        [0, 0, 8, 0, 2, 0, 0],
        [0, 0, 0, 10, 1, 3, 0],
        [0, 0, 0, 0, 4, 0, 1],
        [0, 0, 0, 0, 0, 2, 1],
        [0, 0, 0, 0, 0, 0, 0],
    ]
    .iter()
    .map(|row| row.iter().map(|&x| Rational::integer(x)).collect())
    .collect();
    ensure(build_configuration_matrix(&cao).rows() == expected_matrix.as_slice(), || {
        "configuration matrix differs".into()
    })?;

    let states = [
        v(&[(33, 1), (21, 1), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1)]),
        v(&[(27, 4), (0, 1), (21, 8), (21, 4), (0, 1), (0, 1), (0, 1)]),
        v(&[(27, 4), (0, 1), (0, 1), (0, 1), (189, 160), (63, 40), (0, 1)]),
        v(&[(27, 4), (0, 1), (0, 1), (0, 1), (0, 1), (63, 64), (189, 640)]),
    ];
    let carries = [
        v(&[(21, 8), (21, 8), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1)]),
        v(&[(0, 1), (0, 1), (21, 64), (21, 40), (0, 1), (0, 1), (0, 1)]),
        v(&[(0, 1), (0, 1), (0, 1), (0, 1), (189, 640), (189, 640), (0, 1)]),
    ];

    let started = Instant::now();
    for backend in [Backend::Operator, Backend::Matrix] {
        let result = run(&cao, 10, backend).map_err(|e| e.to_string())?;
        let outcome = &result.outcome;
        ensure(outcome.termination == Termination::FixedPoint && outcome.steps == 3, || {
            format!("{backend:?}: {} after {} steps", outcome.termination, outcome.steps)
        })?;
        ensure(result.records.len() == 4, || format!("{backend:?}: {} records", result.records.len()))?;
        for (k, record) in result.records.iter().enumerate() {
            ensure(record.state.as_slice() == states[k].as_slice(), || {
                format!("{backend:?}: state at step {k} is {}", record.state)
            })?;
            let want = carries.get(k);
            ensure(record.common_carry.as_ref() == want, || {
                format!("{backend:?}: carry at step {k} is {:?}", record.common_carry)
            })?;
        }
    }
    let elapsed = started.elapsed();
    within(elapsed, Duration::from_millis(10))?;
    Ok(format!("both backends match |#(0..3)> and |p.(0..2)>, fixed point at 3, {elapsed:?}"))
}

fn example_3() -> Outcome {
    let cao = model("example3.sns");
    let after = step(&cao.initial_state(), &cao, 0).map_err(|e| e.to_string())?;
    let f = &after.firings;
    ensure(f[0].remainders == v(&[(1, 1)]) && f[1].remainders == v(&[(3, 1)]), || {
        format!("remainders {:?} {:?}", f[0].remainders, f[1].remainders)
    })?;
    ensure(f[0].transformants == v(&[(6, 1)]) && f[1].transformants == v(&[(-3, 1)]), || {
        format!("transformants {:?} {:?}", f[0].transformants, f[1].transformants)
    })?;
    ensure(after.state[2] == q(8, 1), || format!("s' = {}", after.state[2]))?;
    let report = check_equivalence(&cao, 1).map_err(|e| e.to_string())?;
    ensure(report.is_equivalent(), || format!("{:?}", report.divergence))?;
    Ok("rem 1 and 3, transformants 6 and -3, s' = 8".into())
}

const CORPUS_SEED: u64 = 0x5eed_0004;
const CORPUS_SIZE: usize = 1000;
const STEPS: u64 = 6;

fn backend_equivalence(corpus: &[Cao]) -> Outcome {
    let started = Instant::now();
    let mut violations = 0;
    for (index, cao) in corpus.iter().enumerate() {
        let report = check_equivalence(cao, STEPS).map_err(|e| format!("instance {index}: {e}"))?;
        ensure(report.is_equivalent(), || {
            format!("instance {index}: {}\n{}", report.divergence.unwrap(), serialize(cao))
        })?;
        violations += usize::from(report.stopped_by_violation);
    }
    let elapsed = started.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    let forms = form_counts(corpus);
    Ok(format!(
        "{} CAOs x {STEPS} steps identical ({violations} stop at a shared negative cardinal); forms L/D/F/M = {forms:?}; {elapsed:?}",
        corpus.len()
    ))
}

fn form_counts(corpus: &[Cao]) -> [usize; 4] {
    let mut counts = [0; 4];
    for op in corpus.iter().flat_map(|c| &c.operators) {
        let slot = match op.form {
            OperatorForm::L => 0,
            OperatorForm::D => 1,
            OperatorForm::F => 2,
            OperatorForm::M => 3,
        };
        counts[slot] += 1;
    }
    counts
}

fn zero_remainders(corpus: &[Cao]) -> Outcome {
    let mut exact = 0;
    let mut floored = 0;
    for (index, cao) in corpus.iter().enumerate() {
        let result = run(cao, STEPS, Backend::Operator).map_err(|e| e.to_string())?;
        for record in &result.records {
            let operators = apply_schedule(cao, record.step).map_err(|e| e.to_string())?;
            for firing in &record.firings {
                let op = &operators[firing.operator];
                if !op.enabled {
                    continue;
                }
                let context = || format!("instance {index}, step {}, operator {}", record.step, firing.operator);
                for (t, operand) in op.operands.iter().enumerate() {
                    let rem = &firing.remainders[t];
                    let achieves_min = firing.partial_carries[t] == firing.common_carry;
                    match op.kind {
                        CarryKind::RationalExact => {
                            if achieves_min {
                                ensure(rem.is_zero(), || format!("{}: remainder {rem}", context()))?;
                                exact += 1;
                            }
                            if op.operands.len() == 1 {
                                ensure(rem.is_zero(), || format!("{}: L/D remainder {rem}", context()))?;
                            }
                        }
                        CarryKind::IntegerFloor => {
                            if achieves_min {
                                ensure(!rem.is_negative() && rem < &operand.radix, || {
                                    format!("{}: floored remainder {rem} outside [0, {})", context(), operand.radix)
                                })?;
                                floored += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{exact} exact min-achieving remainders are 0 (L/D included); {floored} floored ones lie in [0, n)"))
}

fn acyclic_convergence() -> Outcome {
    let dags = corpus(0x5eed_0006, 500, Shape::DAG);
    let mut slowest = 0;
    for (index, cao) in dags.iter().enumerate() {
        let m = cao.dimension() as u64;
        for backend in [Backend::Operator, Backend::Matrix] {
            let result = run(cao, m + 1, backend).map_err(|e| e.to_string())?;
            let outcome = &result.outcome;
            ensure(outcome.termination == Termination::FixedPoint && outcome.steps <= m + 1, || {
                format!(
                    "instance {index} ({backend:?}): {} after {} steps, m = {m}",
                    outcome.termination, outcome.steps
                )
            })?;
            slowest = slowest.max(outcome.steps);
        }
    }
    Ok(format!("500 DAGs reach a fixed point within m+1 steps (slowest: {slowest})"))
}

fn qminus_enforcement() -> Outcome {
    let overdrawn = model("violation.sns");
    let result = run(&overdrawn, 10, Backend::Operator).map_err(|e| e.to_string())?;
    let Termination::QMinusViolation { name, value, .. } = &result.outcome.termination else {
        return Err(format!("terminated with {}", result.outcome.termination));
    };
    ensure(name == "s" && *value == q(-1, 1), || format!("named `{name}` at {value}"))?;

    let mut relaxed = overdrawn.clone();
    relaxed.operators[1].images[0].coefficient = q(-1, 3);
    let result = run(&relaxed, 10, Backend::Operator).map_err(|e| e.to_string())?;
    ensure(result.outcome.termination == Termination::FixedPoint, || {
        format!("relaxed CAO: {}", result.outcome.termination)
    })?;
    ensure(result.outcome.final_state.first_negative().is_none(), || "negative cardinal".into())?;
    Ok(format!("violation names `s` (-1); coefficient -1/3 runs to {}", result.outcome.termination))
}

fn integer_closure() -> Outcome {
    let integers = corpus(0x5eed_0008, 500, Shape::INTEGER);
    let mut states = 0;
    for (index, cao) in integers.iter().enumerate() {
        for backend in [Backend::Operator, Backend::Matrix] {
            let result = run(cao, STEPS, backend).map_err(|e| e.to_string())?;
            for record in &result.records {
                ensure(record.state.all_integer(), || {
                    format!("instance {index} ({backend:?}) step {}: {}", record.step, record.state)
                })?;
                states += 1;
            }
        }
    }
    Ok(format!("{states} states across 500 integer CAOs are integer-valued"))
}

fn round_trip(corpus: &[Cao]) -> Outcome {
    let mut checked = 0;
    for (index, cao) in corpus.iter().enumerate() {
        let text = serialize(cao);
        let again = parse(&text).map_err(|d| format!("instance {index}: {d}"))?;
        ensure(&again == cao && serialize(&again) == text, || format!("instance {index} changed"))?;
        checked += 1;
    }
    for name in ["example1.sns", "example2.sns", "example3.sns", "violation.sns"] {
        let original = model(name);
        let text = serialize(&original);
        let again = parse(&text).map_err(|d| format!("{name}: {d}"))?;
        ensure(again == original, || format!("{name} changed"))?;
        checked += 1;
    }
    ensure(serialize(&model("example3.sns")).contains("(s:-1)"), || "literal -1 missing".into())?;
    Ok(format!("{checked} CAOs survive parse(serialize(c)) unchanged"))
}

fn trace_fidelity() -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
    let paths = [dir.join("acceptance_trace_a.jsonl"), dir.join("acceptance_trace_b.jsonl")];
    for path in &paths {
        let output = Command::new(env!("CARGO_BIN_EXE_snsq"))
            .arg("run")
            .arg(model_path("example2.sns"))
            .args(["--steps", "10", "--trace"])
            .arg(path)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(output.status.success(), || format!("snsq exited with {}", output.status))?;
    }
    let first = std::fs::read(&paths[0]).map_err(|e| e.to_string())?;
    let second = std::fs::read(&paths[1]).map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&first);
    for literal in ["27/4", "189/160", "63/64", "189/640"] {
        ensure(text.contains(&format!("\"{literal}\"")), || format!("trace lacks {literal}"))?;
    }
    ensure(first == second, || "reruns differ".into())?;
    Ok(format!("{} lines, all literals present, rerun byte-identical", text.lines().count()))
}

fn main() -> ExitCode {
    panic::set_hook(Box::new(|_| {}));
    let mixed = corpus(CORPUS_SEED, CORPUS_SIZE, Shape::MIXED);
    let criteria: Vec<Criterion> = vec![
        ("example 1 fusion firing", Box::new(example_1)),
        ("example 2 trajectory", Box::new(example_2)),
        ("example 3 signed firing", Box::new(example_3)),
        ("backend equivalence", Box::new(|| backend_equivalence(&mixed))),
        ("zero-remainder invariant", Box::new(|| zero_remainders(&mixed))),
        ("acyclic convergence", Box::new(acyclic_convergence)),
        ("q- enforcement", Box::new(qminus_enforcement)),
        ("integer closure", Box::new(integer_closure)),
        ("dsl round trip", Box::new(|| round_trip(&mixed))),
        ("trace fidelity", Box::new(trace_fidelity)),
    ];

    let mut failed = 0;
    for (number, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|payload| {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {message}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", number + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", number + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
