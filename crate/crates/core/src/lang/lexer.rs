use super::{ParseError, ParseErrorKind, Position};
use crate::algebra::rational::{parse_decimal, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum Token {
    Number(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Ge,
    Le,
    Gt,
    Lt,
    EqEq,
    Ne,
    And,
    Or,
    Not,
    Implies,
    Eof,
}

impl Token {
    pub fn describe(&self) -> String {
        match self {
            Token::Number(n) => format!("number `{n}`"),
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Ge => "`>=`".into(),
            Token::Le => "`<=`".into(),
            Token::Gt => "`>`".into(),
            Token::Lt => "`<`".into(),
            Token::EqEq => "`==`".into(),
            Token::Ne => "`!=`".into(),
            Token::And => "`and`".into(),
            Token::Or => "`or`".into(),
            Token::Not => "`not`".into(),
            Token::Implies => "`->`".into(),
            Token::Eof => "end of line".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spanned {
    pub token: Token,
    pub pos: Position,
}

/// Keywords are matched case-insensitively; anything else is an identifier.
fn keyword(word: &str) -> Option<Token> {
    match word.to_ascii_lowercase().as_str() {
        "and" => Some(Token::And),
        "or" => Some(Token::Or),
        "not" => Some(Token::Not),
        _ => None,
    }
}

pub fn is_keyword(word: &str) -> bool {
    keyword(word).is_some()
}

/// Tokenizes one formula line. `line` and `col_offset` place positions in
/// the surrounding file.
pub fn tokenize(text: &str, line: usize, col_offset: usize) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let at = |i: usize| Position { line, column: col_offset + i + 1 };
    while i < chars.len() {
        let c = chars[i];
        let pos = at(i);
        let next = chars.get(i + 1).copied();
        let (token, len) = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => (Token::Plus, 1),
            '*' => (Token::Star, 1),
            '(' => (Token::LParen, 1),
            ')' => (Token::RParen, 1),
            '&' => (Token::And, 1),
            '|' => (Token::Or, 1),
            '-' if next == Some('>') => (Token::Implies, 2),
            '-' => (Token::Minus, 1),
            '>' if next == Some('=') => (Token::Ge, 2),
            '>' => (Token::Gt, 1),
            '<' if next == Some('=') => (Token::Le, 2),
            '<' => (Token::Lt, 1),
            '=' if next == Some('=') => (Token::EqEq, 2),
            '!' if next == Some('=') => (Token::Ne, 2),
            '!' => (Token::Not, 1),
            '"' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '"' {
                    j += 1;
                }
                if j >= chars.len() {
                    return Err(ParseError::new(pos, ParseErrorKind::UnterminatedQuote));
                }
                let name: String = chars[start..j].iter().collect();
                if name.is_empty() {
                    return Err(ParseError::new(pos, ParseErrorKind::UnexpectedChar('"')));
                }
                (Token::Ident(name), j + 1 - i)
            }
            c if c.is_ascii_digit() || (c == '.' && next.is_some_and(|n| n.is_ascii_digit())) => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let literal: String = chars[i..j].iter().collect();
                let value = parse_decimal(&literal)
                    .ok_or_else(|| ParseError::new(pos, ParseErrorKind::InvalidNumber(literal.clone())))?;
                (Token::Number(value), j - i)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                (keyword(&word).unwrap_or(Token::Ident(word)), j - i)
            }
            other => return Err(ParseError::new(pos, ParseErrorKind::UnexpectedChar(other))),
        };
        out.push(Spanned { token, pos });
        i += len;
    }
    out.push(Spanned { token: Token::Eof, pos: at(chars.len()) });
    Ok(out)
}
