use serde::{Deserialize, Serialize};

use super::fragment::{classify_fragment, recurring_body, Fragment};
use crate::ltl::{after, Formula, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonitorKind {
    /// Tracks `G goal`: every position owes one copy of `goal`.
    Recurring,
    /// Tracks a co-safety goal that must be met once.
    FiniteObligation,
}

/// Progress tracker for one sub-goal.
///
/// Recurring monitors use a breakpoint: `tokens` holds the obligations being
/// waited for, `pending` collects the ones opened since. The monitor
/// discharges when `tokens` runs empty, after which `pending` takes its
/// place. Token lists are sorted and free of duplicates and constants.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monitor {
    pub kind: MonitorKind,
    pub goal: Formula,
    pub tokens: Vec<Formula>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pending: Vec<Formula>,
}

impl Monitor {
    pub fn new(kind: MonitorKind, goal: Formula) -> Self {
        Monitor {
            kind,
            tokens: vec![goal.clone()],
            goal,
            pending: Vec::new(),
        }
    }
}

/// Master formula plus monitors, front first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SemanticLabel {
    pub master: Formula,
    pub monitors: Vec<Monitor>,
}

impl SemanticLabel {
    pub fn sink(value: bool) -> Self {
        SemanticLabel {
            master: Formula::constant(value),
            monitors: Vec::new(),
        }
    }

    /// Initial label of `f`; `None` outside the supported fragment.
    pub fn initial(f: &Formula) -> Option<Self> {
        let monitors = match classify_fragment(f) {
            Fragment::Safety => Vec::new(),
            Fragment::CoSafety => vec![Monitor::new(MonitorKind::FiniteObligation, f.clone())],
            Fragment::GConjunction => {
                let mut recurring = Vec::new();
                let mut obligations = Vec::new();
                for c in f.conjuncts() {
                    if let Some(body) = recurring_body(&c) {
                        recurring.push(Monitor::new(MonitorKind::Recurring, body.clone()));
                    } else if !c.is_syntactic_safety() {
                        obligations.push(c);
                    }
                }
                let mut ms = Vec::new();
                if !obligations.is_empty() {
                    ms.push(Monitor::new(
                        MonitorKind::FiniteObligation,
                        Formula::and(obligations),
                    ));
                }
                ms.extend(recurring);
                ms
            }
            Fragment::Unsupported => return None,
        };
        Some(SemanticLabel {
            master: f.clone(),
            monitors,
        })
    }

    pub fn has_recurring(&self) -> bool {
        self.monitors
            .iter()
            .any(|m| m.kind == MonitorKind::Recurring)
    }
}

/// Where one step leads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Successor {
    Tt,
    Ff,
    State(SemanticLabel),
}

/// Bookkeeping of a single step, per monitor of the source label.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    /// Source positions whose token list ran empty.
    pub discharged: Vec<usize>,
    /// Fraction of each monitor's tokens that reached tt (1 on discharge).
    pub token_progress: Vec<f64>,
    /// Monitors that produced an ff token.
    pub failed: Vec<bool>,
}

impl StepInfo {
    pub fn front_discharged(&self) -> bool {
        self.discharged.first() == Some(&0)
    }
}

/// Drops conjuncts `F ψ` next to `G F ψ`, so a recurrence's master does
/// not flip between waiting and satisfied states.
fn absorb_recurrences(f: Formula) -> Formula {
    let Formula::And(cs) = &f else { return f };
    let recurring: Vec<&Formula> = cs
        .iter()
        .filter_map(|c| match c {
            Formula::Globally(x) if matches!(**x, Formula::Finally(_)) => Some(&**x),
            _ => None,
        })
        .collect();
    if recurring.is_empty() {
        return f;
    }
    Formula::and(cs.iter().filter(|c| !recurring.contains(c)).cloned())
}

fn advance(
    tokens: &[Formula],
    v: &Valuation,
    extra: Option<Formula>,
) -> (Vec<Formula>, usize, bool) {
    let mut out: Vec<Formula> = Vec::new();
    let mut done = 0;
    let mut failed = false;
    for t in tokens.iter().map(|t| after(t, v)).chain(extra) {
        match t {
            Formula::True => done += 1,
            Formula::False => failed = true,
            other => out.push(other),
        }
    }
    out.sort();
    out.dedup();
    (out, done, failed)
}

/// Advances a label by one letter.
pub fn step(label: &SemanticLabel, v: &Valuation) -> (Successor, StepInfo) {
    let master = absorb_recurrences(after(&label.master, v));
    let mut info = StepInfo::default();
    let mut kept = Vec::new();
    let mut rotated = Vec::new();
    for (i, m) in label.monitors.iter().enumerate() {
        let (tokens, done, mut failed) = advance(&m.tokens, v, None);
        let pending = match m.kind {
            MonitorKind::Recurring => {
                let (p, _, f) = advance(&m.pending, v, Some(after(&m.goal, v)));
                failed |= f;
                p
            }
            MonitorKind::FiniteObligation => Vec::new(),
        };
        info.failed.push(failed);
        if tokens.is_empty() {
            info.discharged.push(i);
            info.token_progress.push(1.0);
            if m.kind == MonitorKind::Recurring {
                rotated.push(Monitor {
                    kind: m.kind,
                    goal: m.goal.clone(),
                    tokens: pending,
                    pending: Vec::new(),
                });
            }
        } else {
            info.token_progress
                .push(done as f64 / m.tokens.len() as f64);
            kept.push(Monitor {
                kind: m.kind,
                goal: m.goal.clone(),
                tokens,
                pending,
            });
        }
    }
    if master.is_false() || info.failed.iter().any(|&f| f) {
        return (Successor::Ff, info);
    }
    kept.extend(rotated);
    let next = SemanticLabel {
        master,
        monitors: kept,
    };
    if next.master.is_true() && !next.has_recurring() {
        return (Successor::Tt, info);
    }
    (Successor::State(next), info)
}

/// Priority bound for labels starting with `monitors` monitors.
pub fn priority_bound(monitors: usize) -> u32 {
    2 * monitors as u32 + 2
}

/// Priority of a step from a label with `monitors` monitors.
///
/// A discharge at the front is the only odd event (1). Any other step is
/// even: 2 without discharge, `2(m - p) + 2` when the front-most discharge
/// happened at position `p >= 1`. Steps without monitors get 1, steps into
/// the sinks 1 (tt) and 0 (ff).
pub fn step_priority(monitors: usize, succ: &Successor, info: &StepInfo) -> u32 {
    match succ {
        Successor::Ff => 0,
        Successor::Tt => 1,
        Successor::State(_) if monitors == 0 => 1,
        Successor::State(_) => match info.discharged.first() {
            Some(0) => 1,
            Some(&p) => 2 * (monitors - p) as u32 + 2,
            None => 2,
        },
    }
}
