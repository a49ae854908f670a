//! Plain-text board and instance formats.
//!
//! ```text
//! N 5 open
//! .....
//! ..*..
//! ```
//!
//! Boards use `*` for a mine and `.` for an empty site. Instances share the
//! header and use `#` (covered), `F` (flagged) and `0`–`8` (revealed label).

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use super::{Board, Boundary, Instance, Lattice, Site, Status};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

/// Size, boundary and the numbered grid rows.
type Header<'a> = (usize, Boundary, Vec<(usize, &'a str)>);

fn parse_header(text: &str) -> Result<Header<'_>, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    let (no, header) = lines.next().ok_or_else(|| err(1, 1, "empty input"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "N" {
        return Err(err(no, 1, "expected header `N <n> <torus|open>`"));
    }
    let n: usize = fields[1].parse().map_err(|_| err(no, 3, format!("bad size `{}`", fields[1])))?;
    if n == 0 {
        return Err(err(no, 3, "board size must be positive"));
    }
    let boundary: Boundary = fields[2].parse().map_err(|e: String| err(no, header.find(fields[2]).unwrap_or(0) + 1, e))?;
    let mut rows: Vec<(usize, &str)> = lines.collect();
    while rows.last().is_some_and(|(_, l)| l.is_empty()) {
        rows.pop();
    }
    if rows.len() != n {
        let line = rows.get(n).map_or(no + rows.len() + 1, |(l, _)| *l);
        return Err(err(line, 1, format!("expected {n} rows, found {}", rows.len())));
    }
    for &(line, row) in &rows {
        let len = row.chars().count();
        if len != n {
            return Err(err(line, len.min(n) + 1, format!("expected {n} characters, found {len}")));
        }
    }
    Ok((n, boundary, rows))
}

pub fn parse_board(text: &str) -> Result<Board, ParseError> {
    let (n, boundary, rows) = parse_header(text)?;
    let mut mines = Vec::new();
    for (r, (line, row)) in rows.iter().enumerate() {
        for (c, ch) in row.chars().enumerate() {
            match ch {
                '*' => mines.push(Site::new(r, c)),
                '.' => {}
                other => return Err(err(*line, c + 1, format!("unexpected `{other}` (expected `*` or `.`)"))),
            }
        }
    }
    Ok(Board::from_mines(n, boundary, mines))
}

pub fn serialize_board(board: &Board) -> String {
    let n = board.n();
    let mut out = String::with_capacity((n + 1) * (n + 1) + 16);
    writeln!(out, "N {} {}", n, board.boundary()).unwrap();
    for r in 0..n {
        for c in 0..n {
            out.push(if board.is_mine(Site::new(r, c)) { '*' } else { '.' });
        }
        out.push('\n');
    }
    out
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let (n, boundary, rows) = parse_header(text)?;
    let lattice = Arc::new(Lattice::new(n, boundary));
    let mut status = vec![Status::Covered; n * n];
    let mut labels = vec![0u8; n * n];
    for (r, (line, row)) in rows.iter().enumerate() {
        for (c, ch) in row.chars().enumerate() {
            let idx = r * n + c;
            match ch {
                '#' => {}
                'F' => status[idx] = Status::Flagged,
                '0'..='8' => {
                    status[idx] = Status::Revealed;
                    labels[idx] = ch as u8 - b'0';
                }
                other => return Err(err(*line, c + 1, format!("unexpected `{other}` (expected `#`, `F` or 0-8)"))),
            }
        }
    }
    Ok(Instance::from_parts(lattice, status, labels))
}

pub fn serialize_instance(instance: &Instance) -> String {
    let n = instance.n();
    let mut out = String::new();
    writeln!(out, "N {} {}", n, instance.boundary()).unwrap();
    for r in 0..n {
        for c in 0..n {
            let s = Site::new(r, c);
            out.push(match instance.status(s) {
                Status::Covered => '#',
                Status::Flagged => 'F',
                Status::Revealed => (b'0' + instance.label(s).unwrap()) as char,
            });
        }
        out.push('\n');
    }
    out
}
