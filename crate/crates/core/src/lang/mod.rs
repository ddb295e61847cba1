//! The constraint language: lexing, parsing, variable binding, CNF
//! normalization and printing.

pub mod ast;
pub mod binding;
pub mod lexer;
pub mod normalize;
pub mod parser;
pub mod printer;
pub mod source;

use std::fmt;

use thiserror::Error;

pub use ast::{Atom, Comparison, Formula, ParsedFormula};
pub use binding::{BindingSource, VariableBinding};
pub use normalize::{normalize, normalize_all, NormalizationConfig};
pub use parser::{parse, parse_formula, parse_source};
pub use printer::{print_constraint, print_set};
pub use source::{ConstraintSource, SourceLine};

use crate::algebra::{AlgebraError, ConstraintSet};

/// 1-based line and column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected {found}, expected {expected}")]
    Unexpected { found: String, expected: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("nonlinear term: product of two variables")]
    NonlinearTerm,
    #[error("invalid number `{0}`")]
    InvalidNumber(String),
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unterminated quoted identifier")]
    UnterminatedQuote,
    #[error("`vars:` header must appear once, before any formula")]
    MisplacedHeader,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Position,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(pos: Position, kind: ParseErrorKind) -> Self {
        ParseError { pos, kind }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("line {line}: CNF of `{formula}` exceeds {limit} clauses")]
    TooManyClauses { line: usize, formula: String, limit: usize },
    #[error("{0}")]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LangError {
    #[error(transparent)]
    Parse(ParseError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("invalid variable name `{0}`")]
    InvalidVariableName(String),
    #[error("declared variable `{0}` is not a data column")]
    MissingColumn(String),
}

/// Reads, binds, parses and normalizes a constraint file in one go.
pub fn load_constraints(
    text: &str,
    csv_header: Option<&[String]>,
    cfg: &NormalizationConfig,
) -> Result<(VariableBinding, ConstraintSet), LangError> {
    let source = ConstraintSource::read(text)?;
    let binding = VariableBinding::resolve(&source, csv_header)?;
    let formulas = parse_source(&source, &binding)?;
    let set = normalize_all(&formulas, binding.len(), cfg)?;
    Ok((binding, set))
}
