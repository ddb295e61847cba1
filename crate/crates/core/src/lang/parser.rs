//! Recursive-descent parser for the constraint language.
//!
//! ```text
//! formula := implic
//! implic  := disj ["->" implic]
//! disj    := conj {("or" | "|") conj}
//! conj    := neg {("and" | "&") neg}
//! neg     := ("not" | "!") neg | "(" formula ")" | atom
//! atom    := expr cmp expr
//! cmp     := ">=" | "<=" | ">" | "<" | "==" | "!="
//! expr    := term {("+" | "-") term}
//! term    := ["-"] (number ["*" ident] | ident)
//! ```

use num_traits::One;

use super::ast::{Atom, Comparison, Formula, ParsedFormula};
use super::binding::VariableBinding;
use super::lexer::{tokenize, Spanned, Token};
use super::source::ConstraintSource;
use super::{ParseError, ParseErrorKind, Position};
use crate::algebra::{LinearExpr, Rational};

/// Parses every formula line of `text` against `binding`.
pub fn parse(text: &str, binding: &VariableBinding) -> Result<Vec<ParsedFormula>, ParseError> {
    let source = ConstraintSource::read(text)?;
    parse_source(&source, binding)
}

pub fn parse_source(source: &ConstraintSource, binding: &VariableBinding) -> Result<Vec<ParsedFormula>, ParseError> {
    source
        .lines
        .iter()
        .map(|l| parse_formula(&l.text, l.line, binding).map(|formula| ParsedFormula { line: l.line, formula }))
        .collect()
}

/// Parses a single formula occupying line `line`.
pub fn parse_formula(text: &str, line: usize, binding: &VariableBinding) -> Result<Formula, ParseError> {
    let tokens = tokenize(text, line, 0)?;
    let mut p = Parser { tokens, i: 0, binding };
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

struct Parser<'a> {
    tokens: Vec<Spanned>,
    i: usize,
    binding: &'a VariableBinding,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.i].token
    }

    fn peek_at(&self, offset: usize) -> &Token {
        let idx = (self.i + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].token
    }

    fn pos(&self) -> Position {
        self.tokens[self.i].pos
    }

    fn bump(&mut self) -> Spanned {
        let t = self.tokens[self.i].clone();
        if self.i + 1 < self.tokens.len() {
            self.i += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::new(
            self.pos(),
            ParseErrorKind::Unexpected { found: self.peek().describe(), expected: expected.to_string() },
        )
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            Token::Eof => Ok(()),
            _ => Err(self.unexpected("end of formula")),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.implic()
    }

    fn implic(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if *self.peek() == Token::Implies {
            self.bump();
            let rhs = self.implic()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut items = vec![self.conj()?];
        while *self.peek() == Token::Or {
            self.bump();
            items.push(self.conj()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Formula::Or(items) })
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut items = vec![self.neg()?];
        while *self.peek() == Token::And {
            self.bump();
            items.push(self.neg()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Formula::And(items) })
    }

    fn neg(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Token::Not => {
                self.bump();
                Ok(Formula::Not(Box::new(self.neg()?)))
            }
            Token::LParen => {
                self.bump();
                let f = self.formula()?;
                if *self.peek() != Token::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(f)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        let lhs = self.expr()?;
        let cmp = match self.peek() {
            Token::Ge => Comparison::Ge,
            Token::Le => Comparison::Le,
            Token::Gt => Comparison::Gt,
            Token::Lt => Comparison::Lt,
            Token::EqEq => Comparison::Eq,
            Token::Ne => Comparison::Ne,
            _ => return Err(self.unexpected("comparison operator")),
        };
        self.bump();
        let rhs = self.expr()?;
        Ok(Formula::Atom(Atom { lhs, cmp, rhs, pos }))
    }

    fn expr(&mut self) -> Result<LinearExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Token::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Token::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LinearExpr, ParseError> {
        let mut sign = Rational::one();
        if *self.peek() == Token::Minus {
            self.bump();
            sign = -sign;
        }
        match self.peek().clone() {
            Token::Number(n) => {
                self.bump();
                let coeff = sign * n;
                if *self.peek() == Token::Star {
                    self.bump();
                    match self.peek().clone() {
                        Token::Ident(name) => {
                            let v = self.resolve(&name)?;
                            self.bump();
                            self.reject_product()?;
                            Ok(LinearExpr::term(v, coeff))
                        }
                        _ => Err(self.unexpected("identifier after `*`")),
                    }
                } else {
                    Ok(LinearExpr::constant(coeff))
                }
            }
            Token::Ident(name) => {
                let v = self.resolve(&name)?;
                self.bump();
                self.reject_product()?;
                Ok(LinearExpr::term(v, sign))
            }
            _ => Err(self.unexpected("number or identifier")),
        }
    }

    /// A `*` right after a variable is either a product of variables or a
    /// coefficient on the wrong side; neither is in the grammar.
    fn reject_product(&self) -> Result<(), ParseError> {
        if *self.peek() != Token::Star {
            return Ok(());
        }
        match self.peek_at(1) {
            Token::Ident(_) => Err(ParseError::new(self.pos(), ParseErrorKind::NonlinearTerm)),
            _ => Err(self.unexpected("comparison or `+`/`-` (write coefficients before the variable)")),
        }
    }

    fn resolve(&self, name: &str) -> Result<usize, ParseError> {
        self.binding
            .lookup(name)
            .ok_or_else(|| ParseError::new(self.pos(), ParseErrorKind::UnknownIdentifier(name.to_string())))
    }
}
