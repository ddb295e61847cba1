use std::collections::HashMap;

use super::lexer::{tokenize, Token};
use super::source::ConstraintSource;
use super::{LangError, ParseError};
use crate::algebra::Var;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BindingSource {
    /// `vars:` header in the constraint file.
    Declared,
    /// Header row of a CSV file.
    CsvHeader,
    /// Identifiers in order of first appearance.
    Inferred,
}

/// Ordered variable names; a name's position is its variable index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableBinding {
    names: Vec<String>,
    index: HashMap<String, Var>,
    source: BindingSource,
}

impl VariableBinding {
    pub fn new(names: Vec<String>, source: BindingSource) -> Result<Self, LangError> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.contains('"') {
                return Err(LangError::InvalidVariableName(name.clone()));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(LangError::DuplicateVariable(name.clone()));
            }
        }
        Ok(VariableBinding { names, index, source })
    }

    /// Resolves the variable universe for a constraint file: CSV header if
    /// given (declared names must then be columns), else the `vars:` header,
    /// else identifiers in order of appearance.
    pub fn resolve(source: &ConstraintSource, csv_header: Option<&[String]>) -> Result<Self, LangError> {
        match (csv_header, &source.declared) {
            (Some(header), declared) => {
                let binding = Self::new(header.to_vec(), BindingSource::CsvHeader)?;
                if let Some(declared) = declared {
                    if let Some(missing) = declared.iter().find(|n| binding.lookup(n).is_none()) {
                        return Err(LangError::MissingColumn(missing.clone()));
                    }
                }
                Ok(binding)
            }
            (None, Some(declared)) => Self::new(declared.clone(), BindingSource::Declared),
            (None, None) => Self::infer(source),
        }
    }

    pub fn infer(source: &ConstraintSource) -> Result<Self, LangError> {
        let mut names: Vec<String> = Vec::new();
        for line in &source.lines {
            let tokens = tokenize(&line.text, line.line, 0)?;
            for t in tokens {
                if let Token::Ident(name) = t.token {
                    if !names.contains(&name) {
                        names.push(name);
                    }
                }
            }
        }
        Self::new(names, BindingSource::Inferred)
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.index.get(name).copied()
    }

    pub fn name(&self, v: Var) -> Option<&str> {
        self.names.get(v).map(String::as_str)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn source(&self) -> BindingSource {
        self.source
    }
}

impl From<ParseError> for LangError {
    fn from(e: ParseError) -> Self {
        LangError::Parse(e)
    }
}
