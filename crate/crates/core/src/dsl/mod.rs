//! The `.sns` definition language.
//!
//! ```text
//! cao "name" [mode qplus|qminus] [kind rational|integer] {
//!     entity a, b = 0;                  # initial cardinals
//!     op (a:10, b:8) -> (c:1, d:2);     # operands with radices -> images with coefficients
//!     op integer (c:4) -> (d:1);        # per-operator carry kind
//!     at 3 {                            # overrides from step 3 on
//!         op 0 radix a = 5;
//!         op 1 coeff d = 1/2;
//!         op 1 enabled = false;
//!     }
//! }
//! ```
//!
//! Operator forms are inferred from arity. `#` starts a comment. Rationals
//! are written `n` or `n/d` with an optional leading `-`.

mod lexer;
mod parser;
mod serialize;

pub use parser::{parse, parse_with_warnings, Parsed};
pub use serialize::serialize;

use std::fmt;

/// 1-based position of a run of characters in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    /// Length in characters.
    pub length: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize, length: usize) -> Self {
        SourceSpan { line, column, length }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: SourceSpan,
    /// What the parser was looking for, when that is meaningful.
    pub expected: Option<String>,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, span: SourceSpan) -> Self {
        Diagnostic { severity: Severity::Error, message: message.into(), span, expected: None }
    }

    pub fn warning(message: impl Into<String>, span: SourceSpan) -> Self {
        Diagnostic { severity: Severity::Warning, ..Diagnostic::error(message, span) }
    }

    pub fn expecting(mut self, what: impl Into<String>) -> Self {
        self.expected = Some(what.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

/// `line:col: severity: message`
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.span.line, self.span.column, self.severity, self.message)
    }
}

/// Diagnostics of a rejected document; always contains at least one error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter().filter(|d| d.is_error())
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostics {}
