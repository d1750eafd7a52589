//! `.seq` pulse-sequence language.
//!
//! ```text
//! sites 4
//! ramp on @[1] shift 10kHz dur 100us
//! pulse addressed x 45deg @[1]
//! ramp off @[1] shift 10kHz dur 100us
//! ```
//!
//! [`parse`] builds a [`SeqProgram`] with source positions, [`lint`] checks
//! the echo discipline, [`lower`] produces a [`Schedule`](eprsim_core::control::Schedule)
//! and [`format`] prints the canonical text.

pub mod ast;
pub mod diag;
pub mod format;
pub mod lexer;
pub mod lint;
pub mod lower;
pub mod parser;
#[cfg(feature = "proptest")]
pub mod strategy;

pub use ast::SeqProgram;
pub use diag::{render_all, Diagnostic, Severity, Span};
pub use format::format;
pub use lint::lint;
pub use lower::{from_schedule, lower, lower_with, LowerOptions};
pub use parser::{parse, parse_recovering, Parsed};

/// Parses and lints `text`; errors first, then warnings, each in source order.
pub fn check(text: &str) -> (Option<SeqProgram>, Vec<Diagnostic>) {
    let parsed = parse_recovering(text);
    let mut diagnostics = parsed.errors;
    if diagnostics.is_empty() {
        diagnostics = lint(&parsed.program);
        (Some(parsed.program), diagnostics)
    } else {
        diagnostics.sort_by_key(|d| (d.line, d.col));
        (None, diagnostics)
    }
}
