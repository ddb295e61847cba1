use super::{ParseError, ParseErrorKind, Position};

/// One formula line of a constraint file, comment stripped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceLine {
    /// 1-based line number in the file.
    pub line: usize,
    pub text: String,
}

/// A constraint file split into its optional `vars:` header and formula lines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSource {
    pub declared: Option<Vec<String>>,
    pub lines: Vec<SourceLine>,
}

/// Everything before an unquoted `#`.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

impl ConstraintSource {
    pub fn read(text: &str) -> Result<Self, ParseError> {
        let mut out = ConstraintSource::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let body = strip_comment(raw);
            let trimmed = body.trim();
            if trimmed.is_empty() {
                continue;
            }
            let lower = trimmed.to_ascii_lowercase();
            if lower.starts_with("vars:") {
                if out.declared.is_some() || !out.lines.is_empty() {
                    let column = body.len() - body.trim_start().len() + 1;
                    return Err(ParseError::new(Position { line: line_no, column }, ParseErrorKind::MisplacedHeader));
                }
                let names = trimmed[5..]
                    .split(',')
                    .map(|n| n.trim().trim_matches('"').to_string())
                    .filter(|n| !n.is_empty())
                    .collect();
                out.declared = Some(names);
                continue;
            }
            out.lines.push(SourceLine { line: line_no, text: body.to_string() });
        }
        Ok(out)
    }
}
