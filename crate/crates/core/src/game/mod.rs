//! Edge-labelled min-parity games: System wins a play iff the least priority
//! seen infinitely often is odd.

mod check;
pub mod json;
pub mod pgsolver;
pub mod random;
mod scc;
mod si;
mod zielonka;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use check::{one_player_check, opponent_wins};
pub use random::{random_game, RandomGameParams};
pub use scc::{component_index as scc_component_index, scc_decompose, tarjan};
pub use si::{strategy_iteration, SiResult};
pub use zielonka::zielonka_solve;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    System,
    Environment,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::System => Player::Environment,
            Player::Environment => Player::System,
        }
    }

    /// The player favoured by a priority under the min-parity convention.
    pub fn of_priority(p: u32) -> Player {
        if p % 2 == 1 {
            Player::System
        } else {
            Player::Environment
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::System => "system",
            Player::Environment => "environment",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: VertexId,
    pub target: VertexId,
    pub priority: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("game has no vertices")]
    Empty,
    #[error("vertex {0} has no outgoing edge")]
    DeadEnd(VertexId),
    #[error("edge {edge} references vertex {vertex} outside the game")]
    DanglingEdge { edge: EdgeId, vertex: VertexId },
    #[error("edge {edge} has priority {priority} above the bound {bound}")]
    PriorityAboveBound {
        edge: EdgeId,
        priority: u32,
        bound: u32,
    },
    #[error("initial vertex {0} does not exist")]
    BadInitial(VertexId),
    #[error("invalid lasso: {0}")]
    InvalidLasso(String),
    #[error("strategy is undefined on reachable vertex {0}")]
    StrategyUndefined(VertexId),
    #[error("strategy maps vertex {vertex} to edge {edge}, which does not leave it")]
    ForeignEdge { vertex: VertexId, edge: EdgeId },
}

/// A total game graph with edge priorities bounded by `max_priority`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGame {
    owners: Vec<Player>,
    edges: Vec<Edge>,
    out: Vec<Vec<EdgeId>>,
    initial: VertexId,
    max_priority: u32,
}

impl ParityGame {
    pub fn new(
        owners: Vec<Player>,
        edges: Vec<Edge>,
        initial: VertexId,
        max_priority: u32,
    ) -> Result<Self, GameError> {
        let n = owners.len();
        if n == 0 {
            return Err(GameError::Empty);
        }
        if initial >= n {
            return Err(GameError::BadInitial(initial));
        }
        let mut out = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            for v in [e.source, e.target] {
                if v >= n {
                    return Err(GameError::DanglingEdge {
                        edge: id,
                        vertex: v,
                    });
                }
            }
            if e.priority > max_priority {
                return Err(GameError::PriorityAboveBound {
                    edge: id,
                    priority: e.priority,
                    bound: max_priority,
                });
            }
            out[e.source].push(id);
        }
        if let Some(v) = out.iter().position(Vec::is_empty) {
            return Err(GameError::DeadEnd(v));
        }
        Ok(ParityGame {
            owners,
            edges,
            out,
            initial,
            max_priority,
        })
    }

    /// Builds a game from vertex priorities by stamping each outgoing edge
    /// with its source's priority.
    pub fn from_vertex_priorities(
        owners: Vec<Player>,
        priorities: &[u32],
        successors: &[Vec<VertexId>],
        initial: VertexId,
    ) -> Result<Self, GameError> {
        let edges = successors
            .iter()
            .enumerate()
            .flat_map(|(v, succ)| {
                succ.iter().map(move |&w| Edge {
                    source: v,
                    target: w,
                    priority: priorities[v],
                })
            })
            .collect();
        let bound = priorities.iter().copied().max().unwrap_or(0);
        ParityGame::new(owners, edges, initial, bound)
    }

    pub fn vertex_count(&self) -> usize {
        self.owners.len()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.owners.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn owner(&self, v: VertexId) -> Player {
        self.owners[v]
    }

    pub fn owners(&self) -> &[Player] {
        &self.owners
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out[v]
    }

    pub fn successors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.out[v].iter().map(|&e| self.edges[e].target)
    }

    pub fn initial(&self) -> VertexId {
        self.initial
    }

    pub fn max_priority(&self) -> u32 {
        self.max_priority
    }

    pub fn vertices_of(&self, p: Player) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(move |&v| self.owners[v] == p)
    }

    /// First edge from `u` to `w`, if any.
    pub fn find_edge(&self, u: VertexId, w: VertexId) -> Option<EdgeId> {
        self.out[u]
            .iter()
            .copied()
            .find(|&e| self.edges[e].target == w)
    }

    /// Vertices reachable from `roots`, following only `allowed` edges.
    pub fn reachable_with<F: Fn(EdgeId) -> bool>(
        &self,
        roots: &[VertexId],
        allowed: F,
    ) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack: Vec<VertexId> = roots.to_vec();
        for &r in roots {
            seen[r] = true;
        }
        while let Some(v) = stack.pop() {
            for &e in &self.out[v] {
                let w = self.edges[e].target;
                if allowed(e) && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Vertices reachable from the initial vertex.
    pub fn reachable(&self) -> Vec<bool> {
        self.reachable_with(&[self.initial], |_| true)
    }

    /// Vertices reachable from the initial vertex when System plays `sys`.
    pub fn reachable_under(&self, sys: &Strategy) -> Vec<bool> {
        self.reachable_with(&[self.initial], |e| {
            let v = self.edges[e].source;
            self.owners[v] != Player::System || sys.get(v).is_none_or(|c| c == e)
        })
    }

    /// Whether every outgoing edge of `v` is a self-loop.
    pub fn is_absorbing(&self, v: VertexId) -> bool {
        self.out[v].iter().all(|&e| self.edges[e].target == v)
    }
}

/// Positional strategy: chosen edge per vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategy(BTreeMap<VertexId, EdgeId>);

impl Strategy {
    pub fn new() -> Self {
        Strategy(BTreeMap::new())
    }

    pub fn set(&mut self, v: VertexId, e: EdgeId) {
        self.0.insert(v, e);
    }

    pub fn get(&self, v: VertexId) -> Option<EdgeId> {
        self.0.get(&v).copied()
    }

    pub fn remove(&mut self, v: VertexId) {
        self.0.remove(&v);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, EdgeId)> + '_ {
        self.0.iter().map(|(&v, &e)| (v, e))
    }

    /// Builds a strategy from `(vertex, successor)` pairs.
    pub fn from_moves(g: &ParityGame, moves: &[(VertexId, VertexId)]) -> Result<Self, GameError> {
        let mut s = Strategy::new();
        for &(u, w) in moves {
            let e = g
                .find_edge(u, w)
                .ok_or_else(|| GameError::InvalidLasso(format!("no edge {u} -> {w}")))?;
            s.set(u, e);
        }
        Ok(s)
    }

    /// Checks that each mapped edge leaves its vertex.
    pub fn validate(&self, g: &ParityGame) -> Result<(), GameError> {
        for (v, e) in self.iter() {
            if e >= g.edge_count() || g.edge(e).source != v {
                return Err(GameError::ForeignEdge { vertex: v, edge: e });
            }
        }
        Ok(())
    }
}

impl FromIterator<(VertexId, EdgeId)> for Strategy {
    fn from_iter<I: IntoIterator<Item = (VertexId, EdgeId)>>(iter: I) -> Self {
        Strategy(iter.into_iter().collect())
    }
}

/// Winning regions of both players plus a positional winning strategy for
/// each on its own region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub winner: Vec<Player>,
    pub system: Strategy,
    pub environment: Strategy,
}

impl Solution {
    pub fn region(&self, p: Player) -> Vec<VertexId> {
        (0..self.winner.len())
            .filter(|&v| self.winner[v] == p)
            .collect()
    }

    pub fn strategy(&self, p: Player) -> &Strategy {
        match p {
            Player::System => &self.system,
            Player::Environment => &self.environment,
        }
    }
}

/// An ultimately periodic play given by its edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub stem: Vec<EdgeId>,
    pub cycle: Vec<EdgeId>,
}

impl Lasso {
    pub fn new(g: &ParityGame, stem: Vec<EdgeId>, cycle: Vec<EdgeId>) -> Result<Self, GameError> {
        if cycle.is_empty() {
            return Err(GameError::InvalidLasso("empty loop".into()));
        }
        let path: Vec<EdgeId> = stem.iter().chain(&cycle).copied().collect();
        if let Some(&bad) = path.iter().find(|&&e| e >= g.edge_count()) {
            return Err(GameError::InvalidLasso(format!("unknown edge {bad}")));
        }
        for pair in path.windows(2) {
            if g.edge(pair[0]).target != g.edge(pair[1]).source {
                return Err(GameError::InvalidLasso(format!(
                    "edges {} and {} are not consecutive",
                    pair[0], pair[1]
                )));
            }
        }
        if g.edge(*cycle.last().unwrap()).target != g.edge(cycle[0]).source {
            return Err(GameError::InvalidLasso("loop does not close".into()));
        }
        Ok(Lasso { stem, cycle })
    }

    /// Builds a lasso from vertex sequences; the loop returns to its first
    /// vertex. Parallel edges resolve to the lowest edge id.
    pub fn from_vertices(
        g: &ParityGame,
        stem: &[VertexId],
        cycle: &[VertexId],
    ) -> Result<Self, GameError> {
        if cycle.is_empty() {
            return Err(GameError::InvalidLasso("empty loop".into()));
        }
        let edge = |u: VertexId, w: VertexId| {
            if u >= g.vertex_count() || w >= g.vertex_count() {
                return Err(GameError::InvalidLasso(format!(
                    "unknown vertex in {u} -> {w}"
                )));
            }
            g.find_edge(u, w)
                .ok_or_else(|| GameError::InvalidLasso(format!("no edge {u} -> {w}")))
        };
        let mut stem_edges = Vec::new();
        let mut walk: Vec<VertexId> = stem.to_vec();
        walk.push(cycle[0]);
        for pair in walk.windows(2) {
            stem_edges.push(edge(pair[0], pair[1])?);
        }
        let mut cycle_edges = Vec::new();
        for i in 0..cycle.len() {
            cycle_edges.push(edge(cycle[i], cycle[(i + 1) % cycle.len()])?);
        }
        Lasso::new(g, stem_edges, cycle_edges)
    }

    /// Priorities seen infinitely often.
    pub fn infinite_priorities(&self, g: &ParityGame) -> Vec<u32> {
        let mut ps: Vec<u32> = self.cycle.iter().map(|&e| g.edge(e).priority).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }
}

/// Winner of the play described by `l`.
pub fn play_winner(l: &Lasso, g: &ParityGame) -> Result<Player, GameError> {
    let checked = Lasso::new(g, l.stem.clone(), l.cycle.clone())?;
    let min = checked
        .cycle
        .iter()
        .map(|&e| g.edge(e).priority)
        .min()
        .unwrap();
    Ok(Player::of_priority(min))
}

/// The unique play from `start` when both players follow their strategies.
pub fn induced_play(
    g: &ParityGame,
    sys: &Strategy,
    env: &Strategy,
    start: VertexId,
) -> Result<Lasso, GameError> {
    let mut first_visit: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut edges = Vec::new();
    let mut v = start;
    loop {
        if let Some(&i) = first_visit.get(&v) {
            let cycle = edges.split_off(i);
            return Lasso::new(g, edges, cycle);
        }
        first_visit.insert(v, edges.len());
        let strat = match g.owner(v) {
            Player::System => sys,
            Player::Environment => env,
        };
        let e = strat.get(v).ok_or(GameError::StrategyUndefined(v))?;
        if g.edge(e).source != v {
            return Err(GameError::ForeignEdge { vertex: v, edge: e });
        }
        edges.push(e);
        v = g.edge(e).target;
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The five-vertex example game; vertex priorities 4, 2, 1, 3, 5 lifted
    /// to outgoing edges.
    pub fn example_game() -> ParityGame {
        use Player::*;
        ParityGame::from_vertex_priorities(
            vec![System, Environment, System, Environment, System],
            &[4, 2, 1, 3, 5],
            &[vec![0, 1, 2], vec![3, 2], vec![1, 3], vec![3, 4], vec![4]],
            0,
        )
        .unwrap()
    }

    pub fn example_sigma_s(g: &ParityGame) -> Strategy {
        Strategy::from_moves(g, &[(0, 2), (2, 3), (4, 4)]).unwrap()
    }

    pub fn example_sigma_e(g: &ParityGame) -> Strategy {
        Strategy::from_moves(g, &[(1, 2), (3, 3)]).unwrap()
    }
}
