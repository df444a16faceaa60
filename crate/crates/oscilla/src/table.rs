//! Two-column sample tables: `t value` per line, separated by whitespace
//! or a comma, with `#` starting a comment.

use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TableError {
    #[error("line {line}: expected two numeric columns, found {found}")]
    Columns { line: usize, found: usize },
    #[error("line {line}: `{token}` is not a number")]
    Number { line: usize, token: String },
    #[error("table has no samples")]
    Empty,
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

pub fn parse_table(text: &str) -> Result<Vec<(f64, f64)>, TableError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(TableError::Columns {
                line,
                found: fields.len(),
            });
        }
        let num = |s: &str| {
            s.parse::<f64>().map_err(|_| TableError::Number {
                line,
                token: s.to_string(),
            })
        };
        out.push((num(fields[0])?, num(fields[1])?));
    }
    if out.is_empty() {
        return Err(TableError::Empty);
    }
    Ok(out)
}

pub fn load_table(path: &Path) -> Result<Vec<(f64, f64)>, TableError> {
    let text = fs::read_to_string(path).map_err(|e| TableError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_table(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_delimiters_and_comments() {
        let t = parse_table("# header\n0 1\n1.5,2.5  # trailing\n\n2\t 3e1\n 3 , 4\n").unwrap();
        assert_eq!(t, vec![(0.0, 1.0), (1.5, 2.5), (2.0, 30.0), (3.0, 4.0)]);
    }

    #[test]
    fn reports_line_numbers() {
        assert_eq!(
            parse_table("0 1\n1 2 3\n"),
            Err(TableError::Columns { line: 2, found: 3 })
        );
        assert_eq!(
            parse_table("# c\n\n0 x\n"),
            Err(TableError::Number {
                line: 3,
                token: "x".into()
            })
        );
        assert_eq!(parse_table("# only comments\n"), Err(TableError::Empty));
    }
}
