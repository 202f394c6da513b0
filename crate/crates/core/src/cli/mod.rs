use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use snsq_core::dsl;
use snsq_core::engine::matrix::{build_operators, StateOperators};
use snsq_core::model::{build_configuration_matrix, carry_partition, Cao, CarryPartition};
use snsq_core::runner::{self, Backend, DivergenceKind, Quantity, Termination, TraceFormat};
use snsq_core::Rational;

mod table;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_VIOLATION: u8 = 2;
pub const EXIT_DIVERGENCE: u8 = 3;

/// Simulate semantic numeration systems with exact rational arithmetic.
#[derive(Debug, Parser)]
#[command(name = "snsq", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a definition file; diagnostics go to standard error.
    Validate { file: PathBuf },
    /// Run for a number of steps and print the final state.
    Run {
        file: PathBuf,
        #[arg(long)]
        steps: u64,
        #[arg(long, value_enum, default_value_t = BackendArg::Operator)]
        backend: BackendArg,
        /// Write a per-step trace to this path.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Jsonl)]
        format: FormatArg,
    },
    /// Run until a fixed point, cycle or step limit.
    Fixpoint {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        max_steps: u64,
    },
    /// Print the configuration matrix, N, N^-1, Rt - N and the carry partition.
    Matrix { file: PathBuf },
    /// Compare both backends step by step.
    Check {
        file: PathBuf,
        #[arg(long)]
        steps: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BackendArg {
    Operator,
    Matrix,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Jsonl,
    Csv,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Operator => Backend::Operator,
            BackendArg::Matrix => Backend::Matrix,
        }
    }
}

impl From<FormatArg> for TraceFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Jsonl => TraceFormat::Jsonl,
            FormatArg::Csv => TraceFormat::Csv,
        }
    }
}

/// Runs a command and returns the process exit code.
pub fn execute(cli: Cli) -> u8 {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Validate { file } => load(&file).map(|_| EXIT_OK),
        Command::Run { file, steps, backend, trace, format } => {
            load(&file).and_then(|cao| run(&cao, steps, backend.into(), trace.as_deref(), format.into(), &mut out))
        }
        Command::Fixpoint { file, max_steps } => load(&file).and_then(|cao| fixpoint(&cao, max_steps, &mut out)),
        Command::Matrix { file } => load(&file).and_then(|cao| matrix(&cao, &mut out)),
        Command::Check { file, steps } => load(&file).and_then(|cao| check(&cao, steps, &mut out)),
    };
    let _ = out.flush();
    result.unwrap_or_else(|(code, message)| {
        if !message.is_empty() {
            eprintln!("error: {message}");
        }
        code
    })
}

type Outcome = Result<u8, (u8, String)>;

fn io_failure(path: &Path, e: io::Error) -> (u8, String) {
    (EXIT_INVALID, format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<Cao, (u8, String)> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    match dsl::parse_with_warnings(&text) {
        Ok(parsed) => {
            for w in &parsed.warnings {
                eprintln!("{w}");
            }
            Ok(parsed.cao)
        }
        Err(diags) => {
            for d in &diags.0 {
                eprintln!("{d}");
            }
            Err((EXIT_INVALID, String::new()))
        }
    }
}

fn print_state(cao: &Cao, state: &[Rational], out: &mut impl Write) -> io::Result<()> {
    for (name, value) in cao.entity_names().into_iter().zip(state) {
        writeln!(out, "{name} = {value}")?;
    }
    Ok(())
}

fn stdout_failure(e: io::Error) -> (u8, String) {
    (EXIT_INVALID, format!("writing output: {e}"))
}

fn run(
    cao: &Cao,
    steps: u64,
    backend: Backend,
    trace: Option<&Path>,
    format: TraceFormat,
    out: &mut impl Write,
) -> Outcome {
    let result = runner::run(cao, steps, backend).map_err(|e| (EXIT_INVALID, e.to_string()))?;
    if let Some(path) = trace {
        let file = File::create(path).map_err(|e| io_failure(path, e))?;
        let mut writer = BufWriter::new(file);
        runner::emit_trace(cao, &result.records, format, &mut writer).map_err(|e| io_failure(path, e))?;
    }
    print_state(cao, result.outcome.final_state.as_slice(), out).map_err(stdout_failure)?;
    match &result.outcome.termination {
        Termination::QMinusViolation { .. } => {
            Err((EXIT_VIOLATION, format!("step {}: {}", result.outcome.steps, result.outcome.termination)))
        }
        _ => Ok(EXIT_OK),
    }
}

fn fixpoint(cao: &Cao, max_steps: u64, out: &mut impl Write) -> Outcome {
    let result = runner::run(cao, max_steps, Backend::Operator).map_err(|e| (EXIT_INVALID, e.to_string()))?;
    let outcome = &result.outcome;
    writeln!(out, "termination: {}", outcome.termination).map_err(stdout_failure)?;
    writeln!(out, "steps: {}", outcome.steps).map_err(stdout_failure)?;
    match outcome.termination {
        Termination::QMinusViolation { .. } => Ok(EXIT_VIOLATION),
        _ => Ok(EXIT_OK),
    }
}

fn partition_text(cao: &Cao, partition: &CarryPartition) -> String {
    let set = |members: &[usize]| {
        let names: Vec<&str> = members.iter().map(|&e| cao.entity_name(e)).collect();
        format!("{{{}}}", names.join(", "))
    };
    let groups: Vec<String> = partition.groups().iter().map(|g| set(g)).collect();
    format!("groups: {}\nsinks: {}\n", groups.join(" "), set(partition.sinks()))
}

fn diagonal(values: &[Rational]) -> Vec<Vec<Rational>> {
    let m = values.len();
    (0..m).map(|i| (0..m).map(|j| if i == j { values[i].clone() } else { Rational::zero() }).collect()).collect()
}

fn matrix(cao: &Cao, out: &mut impl Write) -> Outcome {
    let pm = build_configuration_matrix(cao);
    let partition = carry_partition(cao);
    let ops: StateOperators = build_operators(&pm, &partition).map_err(|e| (EXIT_INVALID, e.to_string()))?;
    let names = cao.entity_names();
    let sections = [
        ("configuration matrix", pm.rows().to_vec()),
        ("radix operator N", diagonal(ops.radix.diagonal())),
        ("inverse radix operator N^-1", diagonal(ops.inverse.diagonal())),
        ("Rt - N", ops.conversion_minus_radix()),
    ];
    let mut text = String::new();
    for (title, cells) in sections {
        text.push_str(title);
        text.push('\n');
        text.push_str(&table::render(&names, &cells));
        text.push('\n');
    }
    text.push_str("carry partition\n");
    text.push_str(&partition_text(cao, &partition));
    out.write_all(text.as_bytes()).map_err(stdout_failure)?;
    Ok(EXIT_OK)
}

fn check(cao: &Cao, steps: u64, out: &mut impl Write) -> Outcome {
    let report = runner::check_equivalence(cao, steps).map_err(|e| (EXIT_INVALID, e.to_string()))?;
    let Some(divergence) = report.divergence else {
        let suffix = if report.stopped_by_violation {
            format!(" (both stop at the same negative cardinal at step {})", report.steps_compared)
        } else {
            String::new()
        };
        writeln!(out, "equivalent over {} steps{suffix}", report.steps_compared).map_err(stdout_failure)?;
        return Ok(EXIT_OK);
    };
    let message = match &divergence.kind {
        DivergenceKind::Value { entity, quantity, operator, matrix } => {
            let what = match quantity {
                Quantity::CommonCarry => "common carry",
                Quantity::State => "cardinal",
            };
            format!(
                "divergence at step {}: {what} of `{}` is {operator} (operator) vs {matrix} (matrix)",
                divergence.step,
                cao.entity_name(*entity)
            )
        }
        DivergenceKind::Outcome { .. } => format!("divergence at {divergence}"),
    };
    writeln!(out, "{message}").map_err(stdout_failure)?;
    Ok(EXIT_DIVERGENCE)
}
