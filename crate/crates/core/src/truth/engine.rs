//! Game-tree values with beta decay.
//!
//! A tree node is a path of vertices. Moving along an edge costs one factor
//! beta. A node is a leaf when its last vertex
//! - closes a loop (value 1 if the least priority on the loop is odd),
//! - is won by the environment (value 0),
//! - is absorbing, i.e. has only self-loops (value by the loop's parity).
//!
//! Inner nodes take the maximum over successors at System vertices and the
//! minimum at environment vertices.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::GtParams;
use crate::game::{scc_decompose, EdgeId, ParityGame, Player, VertexId};
use crate::rng;

pub(crate) struct Engine<'a> {
    pub g: &'a ParityGame,
    pub beta: f64,
    pub env_wins: Vec<bool>,
    /// Value of absorbing vertices.
    absorbing: Vec<Option<f64>>,
    comp: Vec<usize>,
    pub sccs: Vec<Vec<VertexId>>,
    pub current: usize,
    /// Exact or approximated vertex values of finished components.
    pub finished: Vec<Option<f64>>,
    use_cache: bool,
    depth: Option<usize>,
    threshold: Option<f64>,
    samples: usize,
    seed: u64,
    node_budget: usize,
    estimates: Vec<Option<f64>>,
    pub cache_hits: usize,
    pub budget_hit: bool,
}

/// Owner-aware value of a vertex with only self-loops.
fn absorbing_value(g: &ParityGame, v: VertexId) -> Option<f64> {
    if !g.is_absorbing(v) {
        return None;
    }
    let odd = |e: &EdgeId| g.edge(*e).priority % 2 == 1;
    let wins = match g.owner(v) {
        Player::System => g.out_edges(v).iter().any(odd),
        Player::Environment => g.out_edges(v).iter().all(odd),
    };
    Some(if wins { 1.0 } else { 0.0 })
}

/// Parity value of the loop closed by `closing` back to `path[i]`.
fn loop_value(g: &ParityGame, edges: &[EdgeId], i: usize, closing: EdgeId) -> f64 {
    let min = edges[i..]
        .iter()
        .chain(std::iter::once(&closing))
        .map(|&e| g.edge(e).priority)
        .min()
        .unwrap();
    if min % 2 == 1 {
        1.0
    } else {
        0.0
    }
}

impl<'a> Engine<'a> {
    pub fn new(g: &'a ParityGame, env_wins: Vec<bool>, params: &GtParams) -> Self {
        let sccs = scc_decompose(g);
        let comp = crate::game::scc_component_index(g.vertex_count(), &sccs);
        Engine {
            g,
            beta: params.beta,
            env_wins,
            absorbing: g.vertices().map(|v| absorbing_value(g, v)).collect(),
            comp,
            sccs,
            current: 0,
            finished: vec![None; g.vertex_count()],
            use_cache: params.scc_cache,
            depth: params.depth,
            threshold: params.threshold,
            samples: params.samples.max(1),
            seed: params.seed,
            node_budget: params.node_budget,
            estimates: vec![None; g.vertex_count()],
            cache_hits: 0,
            budget_hit: false,
        }
    }

    /// Leaf value of a vertex that needs no expansion, if any.
    fn settled(&mut self, x: VertexId) -> Option<f64> {
        if self.env_wins[x] {
            return Some(0.0);
        }
        if let Some(v) = self.absorbing[x] {
            return Some(v);
        }
        if self.use_cache && self.comp[x] != self.current {
            if let Some(v) = self.finished[x] {
                self.cache_hits += 1;
                return Some(v);
            }
        }
        None
    }

    fn settled_ro(&self, x: VertexId) -> Option<f64> {
        if self.env_wins[x] {
            return Some(0.0);
        }
        if let Some(v) = self.absorbing[x] {
            return Some(v);
        }
        if self.use_cache && self.comp[x] != self.current {
            return self.finished[x];
        }
        None
    }

    /// One guided random play from the end of `path`, returning the decayed
    /// value relative to the last vertex.
    pub fn simulate<R: Rng>(
        &self,
        path: &mut Vec<VertexId>,
        edges: &mut Vec<EdgeId>,
        rng: &mut R,
    ) -> f64 {
        let g = self.g;
        let keep = path.len();
        let mut decay = 1.0;
        let result = loop {
            let x = *path.last().unwrap();
            if let Some(v) = self.settled_ro(x) {
                break decay * v;
            }
            let e = match g.owner(x) {
                Player::System => self.system_move(x, rng),
                Player::Environment => self.environment_move(x, path, edges, rng),
            };
            decay *= self.beta;
            let y = g.edge(e).target;
            if let Some(i) = path.iter().position(|&p| p == y) {
                break decay * loop_value(g, edges, i, e);
            }
            path.push(y);
            edges.push(e);
        };
        path.truncate(keep);
        edges.truncate(keep - 1);
        result
    }

    fn system_move<R: Rng>(&self, x: VertexId, rng: &mut R) -> EdgeId {
        let out = self.g.out_edges(x);
        let into = |e: &EdgeId| self.absorbing[self.g.edge(*e).target];
        let wins: Vec<EdgeId> = out
            .iter()
            .copied()
            .filter(|e| into(e) == Some(1.0))
            .collect();
        if let Some(&e) = wins.choose(rng) {
            return e;
        }
        let safe: Vec<EdgeId> = out
            .iter()
            .copied()
            .filter(|e| into(e) != Some(0.0))
            .collect();
        *safe.choose(rng).unwrap_or_else(|| out.choose(rng).unwrap())
    }

    /// Environment heuristic: take an immediate zero if one exists (own
    /// winning region, losing sink, System-losing loop), otherwise delay by
    /// not closing a loop, otherwise close the longest loop.
    fn environment_move<R: Rng>(
        &self,
        x: VertexId,
        path: &[VertexId],
        edges: &[EdgeId],
        rng: &mut R,
    ) -> EdgeId {
        let g = self.g;
        let out = g.out_edges(x);
        let mut zero = Vec::new();
        let mut open = Vec::new();
        let mut closing: Vec<(usize, EdgeId)> = Vec::new();
        for &e in out {
            let y = g.edge(e).target;
            if let Some(i) = path.iter().position(|&p| p == y) {
                if loop_value(g, edges, i, e) == 0.0 {
                    zero.push(e);
                } else {
                    closing.push((path.len() - i, e));
                }
            } else if self.env_wins[y] || self.absorbing[y] == Some(0.0) {
                zero.push(e);
            } else if self.absorbing[y] == Some(1.0) {
                closing.push((1, e));
            } else {
                open.push(e);
            }
        }
        if let Some(&e) = zero.choose(rng) {
            return e;
        }
        if let Some(&e) = open.choose(rng) {
            return e;
        }
        let longest = closing.iter().map(|c| c.0).max().unwrap();
        let best: Vec<EdgeId> = closing
            .iter()
            .filter(|c| c.0 == longest)
            .map(|c| c.1)
            .collect();
        *best.choose(rng).unwrap()
    }

    /// Mean of `samples` simulations from `[v]`, one RNG stream per sample.
    pub fn estimate(&mut self, v: VertexId) -> f64 {
        if let Some(x) = self.settled_ro(v) {
            return x;
        }
        if let Some(x) = self.estimates[v] {
            return x;
        }
        let mut path = vec![v];
        let mut edges = Vec::new();
        let total: f64 = (0..self.samples)
            .map(|i| {
                let mut r = rng::stream(self.seed, &[0, v as u64, i as u64]);
                self.simulate(&mut path, &mut edges, &mut r)
            })
            .sum();
        let x = total / self.samples as f64;
        self.estimates[v] = Some(x);
        x
    }

    /// Value of the tree node `path` reached after `plies` moves.
    fn node(
        &mut self,
        path: &mut Vec<VertexId>,
        edges: &mut Vec<EdgeId>,
        plies: usize,
        nodes: &mut usize,
    ) -> f64 {
        let x = *path.last().unwrap();
        if let Some(v) = self.settled(x) {
            return v;
        }
        if self.depth.is_some_and(|d| plies >= d) {
            return self.estimate(x);
        }
        if *nodes >= self.node_budget {
            self.budget_hit = true;
            return self.estimate(x);
        }
        *nodes += 1;
        let g = self.g;
        let owner = g.owner(x);
        let mut options: Vec<EdgeId> = g.out_edges(x).to_vec();
        if owner == Player::Environment {
            if let Some(t) = self.threshold {
                let quick: Vec<f64> = options
                    .iter()
                    .map(|&e| {
                        let y = g.edge(e).target;
                        match path.iter().position(|&p| p == y) {
                            Some(i) => loop_value(g, edges, i, e),
                            None => self.estimate(y),
                        }
                    })
                    .collect();
                let min = quick.iter().copied().fold(f64::INFINITY, f64::min);
                options = options
                    .into_iter()
                    .zip(quick)
                    .filter(|&(_, q)| q <= min + t)
                    .map(|(e, _)| e)
                    .collect();
            }
        }
        let mut best: Option<f64> = None;
        for e in options {
            let v = self.beta * self.after_edge(path, edges, e, plies + 1, nodes);
            best = Some(match (best, owner) {
                (None, _) => v,
                (Some(b), Player::System) => b.max(v),
                (Some(b), Player::Environment) => b.min(v),
            });
        }
        best.unwrap()
    }

    /// Undecayed value after taking `e` from the end of `path`.
    pub fn after_edge(
        &mut self,
        path: &mut Vec<VertexId>,
        edges: &mut Vec<EdgeId>,
        e: EdgeId,
        plies: usize,
        nodes: &mut usize,
    ) -> f64 {
        let y = self.g.edge(e).target;
        if let Some(i) = path.iter().position(|&p| p == y) {
            return loop_value(self.g, edges, i, e);
        }
        path.push(y);
        edges.push(e);
        let v = self.node(path, edges, plies, nodes);
        path.pop();
        edges.pop();
        v
    }

    /// Tree value of taking edge `e` at the root `[source(e)]`.
    pub fn edge_value(&mut self, e: EdgeId) -> f64 {
        let mut path = vec![self.g.edge(e).source];
        let mut edges = Vec::new();
        let mut nodes = 0;
        self.beta * self.after_edge(&mut path, &mut edges, e, 1, &mut nodes)
    }

    /// Monte Carlo value of edge `e`, one stream per sample.
    pub fn mcts_edge_value(&self, e: EdgeId) -> f64 {
        let s = self.g.edge(e).source;
        let y = self.g.edge(e).target;
        if y == s {
            return self.beta * loop_value(self.g, &[], 0, e);
        }
        let mut path = vec![s, y];
        let mut edges = vec![e];
        let total: f64 = (0..self.samples)
            .map(|i| {
                let mut r = rng::stream(self.seed, &[1, e as u64, i as u64]);
                self.simulate(&mut path, &mut edges, &mut r)
            })
            .sum();
        self.beta * total / self.samples as f64
    }
}
