//! DIMACS CNF and GCNF (group-oriented CNF) reading and writing.
//!
//! DIMACS: `p cnf V C`, then `C` zero-terminated clauses. GCNF: `p gcnf V C G`,
//! every clause prefixed by `{g}`; `{0}` marks hard clauses and `G` is the last
//! group index. Group `GroupId(i)` is written as `{i+1}`.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Clause, GroupId, GroupedCnf, Lit};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct CnfParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> CnfParseError {
    CnfParseError { line, message: message.into() }
}

fn write_clause(out: &mut String, clause: &Clause) {
    for l in clause.lits() {
        write!(out, "{} ", l.to_dimacs()).unwrap();
    }
    out.push_str("0\n");
}

pub fn export_dimacs(cnf: &GroupedCnf) -> String {
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", cnf.num_vars(), cnf.num_clauses()).unwrap();
    for c in cnf.clauses() {
        write_clause(&mut out, c);
    }
    out
}

pub fn export_gcnf(cnf: &GroupedCnf) -> String {
    let last = cnf.groups().last().map_or(0, |g| g.id.0 + 1);
    let mut out = String::new();
    writeln!(out, "p gcnf {} {} {}", cnf.num_vars(), cnf.num_clauses(), last).unwrap();
    for c in cnf.hard() {
        out.push_str("{0} ");
        write_clause(&mut out, c);
    }
    for g in cnf.groups() {
        for c in &g.clauses {
            write!(out, "{{{}}} ", g.id.0 + 1).unwrap();
            write_clause(&mut out, c);
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Flavor {
    Cnf,
    Gcnf,
}

struct Header {
    line: usize,
    flavor: Flavor,
    vars: u32,
    clauses: usize,
    groups: u32,
}

fn parse_header(line_no: usize, line: &str) -> Result<Header, CnfParseError> {
    let f: Vec<&str> = line.split_whitespace().collect();
    let num = |s: &str| s.parse::<u64>().map_err(|_| err(line_no, format!("bad number `{s}` in header")));
    match f.as_slice() {
        ["p", "cnf", v, c] => Ok(Header { line: line_no, flavor: Flavor::Cnf, vars: num(v)? as u32, clauses: num(c)? as usize, groups: 0 }),
        ["p", "gcnf", v, c, g] => Ok(Header {
            line: line_no,
            flavor: Flavor::Gcnf,
            vars: num(v)? as u32,
            clauses: num(c)? as usize,
            groups: num(g)? as u32,
        }),
        _ => Err(err(line_no, "expected `p cnf V C` or `p gcnf V C G`")),
    }
}

fn parse(text: &str, expect: Option<Flavor>) -> Result<GroupedCnf, CnfParseError> {
    let mut header: Option<Header> = None;
    let mut cnf = GroupedCnf::new(0);
    let mut current: Vec<Lit> = Vec::new();
    let mut current_group: Option<u32> = None;
    let mut count = 0usize;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, "duplicate header"));
            }
            let h = parse_header(line_no, line)?;
            if let Some(want) = expect {
                if want != h.flavor {
                    return Err(err(line_no, "unexpected formula flavor"));
                }
            }
            cnf = GroupedCnf::new(h.vars);
            header = Some(h);
            continue;
        }
        let h = header.as_ref().ok_or_else(|| err(line_no, "clause before header"))?;
        let mut rest = line;
        if h.flavor == Flavor::Gcnf && current.is_empty() && current_group.is_none() {
            let close = rest
                .strip_prefix('{')
                .and_then(|r| r.find('}').map(|p| (r, p)))
                .ok_or_else(|| err(line_no, "GCNF clause must start with `{g}`"))?;
            let g: u32 = close.0[..close.1].trim().parse().map_err(|_| err(line_no, "bad group index"))?;
            if g > h.groups {
                return Err(err(line_no, format!("group {g} exceeds declared {}", h.groups)));
            }
            current_group = Some(g);
            rest = &close.0[close.1 + 1..];
        }
        for tok in rest.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| err(line_no, format!("bad literal `{tok}`")))?;
            if v == 0 {
                let lits = std::mem::take(&mut current);
                let group = current_group.take();
                count += 1;
                let Some(clause) = normalize(lits) else { continue };
                let res = match group {
                    None | Some(0) => cnf.add_hard(clause),
                    Some(g) => cnf.push_group_clause(GroupId(g - 1), clause),
                };
                res.map_err(|e| err(line_no, e.to_string()))?;
            } else {
                let lit = Lit::from_dimacs(v).ok_or_else(|| err(line_no, format!("literal {v} out of range")))?;
                current.push(lit);
            }
        }
    }
    let h = header.ok_or_else(|| err(1, "missing header"))?;
    if !current.is_empty() {
        return Err(err(last_line, "last clause is not terminated by 0"));
    }
    if count != h.clauses {
        return Err(err(h.line, format!("header declares {} clauses, found {count}", h.clauses)));
    }
    Ok(cnf)
}

/// Drops repeated literals; tautologies become `None`. An empty input clause
/// is kept as is, which makes its group (or the whole formula) unsatisfiable.
fn normalize(mut lits: Vec<Lit>) -> Option<Clause> {
    let mut seen = Vec::with_capacity(lits.len());
    lits.retain(|l| {
        if seen.contains(l) {
            false
        } else {
            seen.push(*l);
            true
        }
    });
    if lits.iter().any(|l| lits.contains(&!*l)) {
        return None;
    }
    Some(Clause(lits))
}

/// Reads plain DIMACS CNF. Each clause becomes its own group, numbered in file order.
pub fn parse_dimacs(text: &str) -> Result<GroupedCnf, CnfParseError> {
    let flat = parse(text, Some(Flavor::Cnf))?;
    let mut out = GroupedCnf::new(flat.num_vars());
    for (i, c) in flat.hard().iter().enumerate() {
        out.add_group(GroupId(i as u32), vec![c.clone()]).expect("validated during parse");
    }
    Ok(out)
}

pub fn parse_gcnf(text: &str) -> Result<GroupedCnf, CnfParseError> {
    parse(text, Some(Flavor::Gcnf))
}

/// Reads either flavor, decided by the header.
pub fn parse_cnf(text: &str) -> Result<GroupedCnf, CnfParseError> {
    let gcnf = text.lines().map(str::trim).find(|l| l.starts_with('p')).is_some_and(|l| l.contains("gcnf"));
    if gcnf {
        parse_gcnf(text)
    } else {
        parse_dimacs(text)
    }
}
