//! The plain-text game format.
//!
//! ```text
//! bimatrix 2 2
//! 1 -1
//! -1 1
//! -1 1
//! 1 -1
//! ```
//!
//! A header with the dimensions, then the rows of A, then the rows of B.
//! Entries are integers or fractions `p/q`. Blank lines are ignored.

use std::fmt::Write as _;

use bimatrix_core::{BimatrixGame, Matrix, Rational};
use thiserror::Error;

/// A malformed game file. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn error(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(byte, tok)| (line[..byte].chars().count() + 1, tok)).collect()
}

fn dimension(line: usize, (column, tok): (usize, &str), what: &str) -> Result<usize, ParseError> {
    match tok.parse::<usize>() {
        Ok(0) => Err(error(line, column, format!("{what} must be at least 1"))),
        Ok(v) if tok.bytes().all(|b| b.is_ascii_digit()) => Ok(v),
        _ => Err(error(line, column, format!("expected {what}, found `{tok}`"))),
    }
}

pub fn parse_game(text: &str) -> Result<BimatrixGame, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let Some((hline, header)) = lines.next() else {
        return Err(error(1, 1, "empty input, expected `bimatrix <n> <m>`"));
    };
    let htoks = tokens(header);
    if htoks.first().map(|t| t.1) != Some("bimatrix") {
        let column = htoks.first().map_or(1, |t| t.0);
        return Err(error(hline, column, "expected header `bimatrix <n> <m>`"));
    }
    if htoks.len() != 3 {
        let column = htoks.get(3).map_or(header.chars().count() + 1, |t| t.0);
        return Err(error(hline, column, format!("header has {} fields, expected 3", htoks.len())));
    }
    let n = dimension(hline, htoks[1], "row count")?;
    let m = dimension(hline, htoks[2], "column count")?;

    let mut last_line = hline;
    let mut read_matrix = |name: &str| -> Result<Matrix, ParseError> {
        let mut data = Vec::with_capacity(n * m);
        for r in 0..n {
            let Some((lno, line)) = lines.next() else {
                return Err(error(last_line + 1, 1, format!("missing row {} of {name}, expected {n} rows", r + 1)));
            };
            last_line = lno;
            let toks = tokens(line);
            if toks.len() != m {
                let column = toks.get(m).map_or(line.chars().count() + 1, |t| t.0);
                let noun = if toks.len() == 1 { "entry" } else { "entries" };
                return Err(error(
                    lno,
                    column,
                    format!("row {} of {name} has {} {noun}, expected {m}", r + 1, toks.len()),
                ));
            }
            for (column, tok) in toks {
                let value: Rational = tok
                    .parse()
                    .map_err(|e| error(lno, column, format!("bad entry `{tok}`: {e}")))?;
                data.push(value);
            }
        }
        Ok(Matrix::new(n, m, data).expect("n * m entries were read"))
    };
    let a = read_matrix("A")?;
    let b = read_matrix("B")?;
    if let Some((lno, line)) = lines.next() {
        let column = tokens(line).first().map_or(1, |t| t.0);
        return Err(error(lno, column, "unexpected content after the B matrix"));
    }
    Ok(BimatrixGame::new(a, b).expect("both matrices are n x m"))
}

/// Canonical text: single spaces, reduced fractions, no `/1`.
pub fn write_game(game: &BimatrixGame) -> String {
    let mut out = format!("bimatrix {} {}\n", game.rows(), game.cols());
    for m in [game.a(), game.b()] {
        for i in 0..m.rows() {
            let row: Vec<String> = m.row(i).iter().map(Rational::to_string).collect();
            writeln!(out, "{}", row.join(" ")).expect("writing to a String");
        }
    }
    out
}
