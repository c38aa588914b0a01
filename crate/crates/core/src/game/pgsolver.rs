//! PGSolver text format.
//!
//! ```text
//! parity <bound>;
//! start <id>;                       (optional)
//! <id> <priority> <owner> <succ>,<succ>,... ["name"];
//! ```
//!
//! Statements end with `;` and may share a line. Owner 0 is System, 1 is
//! Environment. Vertex priorities become priorities of all outgoing edges;
//! exporting writes the largest outgoing edge priority per vertex, which is
//! lossless when a vertex's edges agree. Identifiers are renumbered densely
//! in increasing order; without `start` the smallest identifier is initial.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{ParityGame, Player, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PgSolverError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("vertex {vertex} has successor {target}, which is not declared")]
    Dangling { vertex: u64, target: u64 },
    #[error("invalid game: {0}")]
    Game(#[from] super::GameError),
}

struct Statement {
    line: usize,
    text: String,
}

fn statements(text: &str) -> Vec<Statement> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut start_line = 1;
    let mut cur = String::new();
    let mut quoted = false;
    for c in text.chars() {
        if cur.trim().is_empty() {
            start_line = line;
        }
        match c {
            '"' => {
                quoted = !quoted;
                cur.push(c);
            }
            ';' if !quoted => {
                if !cur.trim().is_empty() {
                    out.push(Statement {
                        line: start_line,
                        text: cur.trim().to_string(),
                    });
                }
                cur.clear();
            }
            _ => cur.push(c),
        }
        if c == '\n' {
            line += 1;
        }
    }
    if !cur.trim().is_empty() {
        out.push(Statement {
            line: start_line,
            text: cur.trim().to_string(),
        });
    }
    out
}

fn syntax(line: usize, message: impl Into<String>) -> PgSolverError {
    PgSolverError::Syntax {
        line,
        message: message.into(),
    }
}

fn number(line: usize, tok: Option<&str>, what: &str) -> Result<u64, PgSolverError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| syntax(line, format!("expected {what}, found '{tok}'")))
}

pub fn import_pgsolver(text: &str) -> Result<ParityGame, PgSolverError> {
    let stmts = statements(text);
    let mut iter = stmts.iter().peekable();
    let header = iter
        .next()
        .ok_or_else(|| syntax(1, "missing 'parity' header"))?;
    let mut words = header.text.split_whitespace();
    if words.next() != Some("parity") {
        return Err(syntax(header.line, "expected 'parity <bound>' header"));
    }
    number(header.line, words.next(), "bound")?;
    if words.next().is_some() {
        return Err(syntax(header.line, "trailing tokens in header"));
    }
    let mut start = None;
    if let Some(s) = iter.peek() {
        if s.text.starts_with("start") {
            let mut w = s.text.split_whitespace().skip(1);
            start = Some(number(s.line, w.next(), "start vertex")?);
            iter.next();
        }
    }

    let mut decl: BTreeMap<u64, (u32, Player, Vec<u64>)> = BTreeMap::new();
    for s in iter {
        // drop an optional quoted name
        let body = match s.text.find('"') {
            Some(i) => &s.text[..i],
            None => &s.text[..],
        };
        let mut w = body.split_whitespace();
        let id = number(s.line, w.next(), "vertex id")?;
        let prio = number(s.line, w.next(), "priority")?;
        let owner = match number(s.line, w.next(), "owner")? {
            0 => Player::System,
            1 => Player::Environment,
            o => return Err(syntax(s.line, format!("owner must be 0 or 1, found {o}"))),
        };
        let succ_text = w
            .next()
            .ok_or_else(|| syntax(s.line, "missing successors"))?;
        if w.next().is_some() {
            return Err(syntax(s.line, "trailing tokens after successors"));
        }
        let succ = succ_text
            .split(',')
            .map(|t| number(s.line, Some(t), "successor"))
            .collect::<Result<Vec<_>, _>>()?;
        let prio = u32::try_from(prio).map_err(|_| syntax(s.line, "priority too large"))?;
        if decl.insert(id, (prio, owner, succ)).is_some() {
            return Err(syntax(s.line, format!("vertex {id} declared twice")));
        }
    }
    if decl.is_empty() {
        return Err(syntax(header.line, "no vertices"));
    }
    let dense: BTreeMap<u64, VertexId> = decl.keys().enumerate().map(|(i, &k)| (k, i)).collect();
    let mut owners = Vec::new();
    let mut priorities = Vec::new();
    let mut successors = Vec::new();
    for (&id, (prio, owner, succ)) in &decl {
        owners.push(*owner);
        priorities.push(*prio);
        successors.push(
            succ.iter()
                .map(|t| {
                    dense.get(t).copied().ok_or(PgSolverError::Dangling {
                        vertex: id,
                        target: *t,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    let initial = match start {
        Some(s) => *dense.get(&s).ok_or(PgSolverError::Dangling {
            vertex: s,
            target: s,
        })?,
        None => 0,
    };
    Ok(ParityGame::from_vertex_priorities(
        owners,
        &priorities,
        &successors,
        initial,
    )?)
}

pub fn export_pgsolver(g: &ParityGame) -> String {
    let mut out = String::new();
    writeln!(out, "parity {};", g.vertex_count() - 1).unwrap();
    if g.initial() != 0 {
        writeln!(out, "start {};", g.initial()).unwrap();
    }
    for v in g.vertices() {
        let prio = g
            .out_edges(v)
            .iter()
            .map(|&e| g.edge(e).priority)
            .max()
            .unwrap();
        let owner = match g.owner(v) {
            Player::System => 0,
            Player::Environment => 1,
        };
        let succ: Vec<String> = g.successors(v).map(|w| w.to_string()).collect();
        writeln!(out, "{v} {prio} {owner} {};", succ.join(",")).unwrap();
    }
    out
}
