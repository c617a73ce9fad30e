//! The activity definition language: parsing, validation and formatting.

mod ast;
mod lexer;
mod parser;
mod printer;
mod validate;

#[cfg(any(test, feature = "test-support"))]
pub mod gen;

pub use ast::{
    ActivityDecl, Case, Condition, ConditionType, Diagnostic, Operand, Pattern, PatternKind,
    ProcessDecl, Severity, Span, TimeConstraint, TimeUnit,
};
pub use parser::parse_radiant;
pub(crate) use printer::format_number;
pub use printer::pretty_print;
pub use validate::validate;

/// True when no diagnostic is an error; warnings do not block execution.
pub fn is_executable(diags: &[Diagnostic]) -> bool {
    diags.iter().all(|d| d.severity != Severity::Error)
}
