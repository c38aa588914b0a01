//! Ground-truth edge values: beta-decayed game-tree evaluation with a depth
//! bound, guided Monte Carlo leaves, SCC caching and environment pruning.

mod engine;

use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::game::{zielonka_solve, EdgeId, ParityGame, Player};
use crate::translate::LabeledGame;
use engine::Engine;

#[derive(Debug, thiserror::Error)]
pub enum GtError {
    #[error("invalid parameter: {0}")]
    Params(String),
    #[error("node budget of {0} exceeded")]
    Budget(usize),
    #[error("edge {0} does not exist")]
    NoEdge(EdgeId),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GtParams {
    pub beta: f64,
    /// Unfolding depth in plies; `None` unfolds until the node budget.
    pub depth: Option<usize>,
    pub samples: usize,
    /// Environment pruning threshold; `None` keeps every edge.
    pub threshold: Option<f64>,
    pub seed: u64,
    pub scc_cache: bool,
    /// Tree nodes expanded per root edge before falling back to sampling.
    pub node_budget: usize,
}

impl Default for GtParams {
    fn default() -> Self {
        GtParams {
            beta: 0.95,
            depth: Some(7),
            samples: 1000,
            threshold: Some(0.02),
            seed: 0,
            scc_cache: true,
            node_budget: 200_000,
        }
    }
}

impl GtParams {
    /// Exhaustive settings: no depth bound, no pruning.
    pub fn exhaustive(beta: f64) -> Self {
        GtParams {
            beta,
            depth: None,
            threshold: None,
            node_budget: usize::MAX,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), GtError> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(GtError::Params(format!(
                "beta must lie in (0,1), got {}",
                self.beta
            )));
        }
        if self.depth == Some(0) {
            return Err(GtError::Params("depth must be at least 1".into()));
        }
        if self.threshold.is_some_and(|t| !(t >= 0.0)) {
            return Err(GtError::Params("threshold must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GtEntry {
    pub edge: EdgeId,
    pub source: usize,
    pub target: usize,
    pub value: f64,
    /// Decided by a one-step look at the target (sink or absorbing vertex).
    pub trivial: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GtMeta {
    pub params: GtParams,
    pub game_hash: String,
    pub cache_hits: usize,
    pub budget_hit: bool,
    pub notice: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthTable {
    /// Sorted by edge id.
    pub entries: Vec<GtEntry>,
    pub meta: GtMeta,
}

impl GroundTruthTable {
    pub fn get(&self, e: EdgeId) -> Option<f64> {
        self.entries
            .binary_search_by_key(&e, |x| x.edge)
            .ok()
            .map(|i| self.entries[i].value)
    }

    pub fn entry(&self, e: EdgeId) -> Option<&GtEntry> {
        self.entries
            .binary_search_by_key(&e, |x| x.edge)
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// CSV with columns `edge_src,edge_dst,valuation,value`. The valuation
    /// column is empty for plain games.
    pub fn write_csv<W: Write>(&self, w: W, lg: Option<&LabeledGame>) -> Result<(), GtError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["edge_src", "edge_dst", "valuation", "value"])?;
        for x in &self.entries {
            let val = lg
                .map(|l| {
                    l.valuations[x.edge]
                        .iter()
                        .cloned()
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .unwrap_or_default();
            out.write_record([
                x.source.to_string(),
                x.target.to_string(),
                val,
                format!("{:.12}", x.value),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// The table without entries: parameters, hash and counters.
    pub fn sidecar_json(&self) -> Result<String, GtError> {
        Ok(serde_json::to_string_pretty(&self.meta)?)
    }
}

/// Hex sha256 of the game's structure.
pub fn game_hash(g: &ParityGame) -> String {
    let mut h = Sha256::new();
    h.update((g.vertex_count() as u64).to_le_bytes());
    h.update((g.initial() as u64).to_le_bytes());
    for v in g.vertices() {
        h.update([g.owner(v) as u8]);
    }
    for e in g.edges() {
        h.update((e.source as u64).to_le_bytes());
        h.update((e.target as u64).to_le_bytes());
        h.update(e.priority.to_le_bytes());
    }
    hex::encode(h.finalize())
}

fn env_region(g: &ParityGame) -> Vec<bool> {
    zielonka_solve(g)
        .winner
        .iter()
        .map(|&p| p == Player::Environment)
        .collect()
}

/// Ground truth for every edge of a System vertex in System's winning region.
pub fn compute_ground_truth(
    g: &ParityGame,
    params: &GtParams,
) -> Result<GroundTruthTable, GtError> {
    params.validate()?;
    let env_wins = env_region(g);
    let mut meta = GtMeta {
        params: params.clone(),
        game_hash: game_hash(g),
        cache_hits: 0,
        budget_hit: false,
        notice: None,
    };
    if env_wins.iter().all(|&w| w) {
        meta.notice = Some("System wins no vertex".into());
        return Ok(GroundTruthTable {
            entries: Vec::new(),
            meta,
        });
    }
    let mut engine = Engine::new(g, env_wins, params);
    let mut entries = Vec::new();
    let sccs = std::mem::take(&mut engine.sccs);
    for (k, scc) in sccs.iter().enumerate() {
        engine.current = k;
        let mut values = Vec::new();
        for &u in scc {
            if engine.env_wins[u] {
                values.push((u, 0.0));
                continue;
            }
            let mut best: Option<f64> = None;
            for &e in g.out_edges(u) {
                let v = engine.edge_value(e);
                best = Some(match (best, g.owner(u)) {
                    (None, _) => v,
                    (Some(b), Player::System) => b.max(v),
                    (Some(b), Player::Environment) => b.min(v),
                });
                if g.owner(u) == Player::System {
                    let target = g.edge(e).target;
                    entries.push(GtEntry {
                        edge: e,
                        source: u,
                        target,
                        value: v,
                        trivial: g.is_absorbing(target),
                    });
                }
            }
            values.push((u, best.unwrap()));
        }
        for (u, v) in values {
            engine.finished[u] = Some(v);
        }
    }
    entries.sort_by_key(|x| x.edge);
    meta.cache_hits = engine.cache_hits;
    meta.budget_hit = engine.budget_hit;
    Ok(GroundTruthTable { entries, meta })
}

/// Ground truth of a labelled game; trivial tags also cover sink edges.
pub fn compute_labeled(lg: &LabeledGame, params: &GtParams) -> Result<GroundTruthTable, GtError> {
    let mut t = compute_ground_truth(&lg.game, params)?;
    for x in &mut t.entries {
        x.trivial |= lg.is_trivial_edge(x.edge);
    }
    Ok(t)
}

/// Value of edge `e` in the full unfolding, with no depth bound, pruning or
/// caching. Fails when more than `node_budget` tree nodes are needed.
pub fn exact_tree_value(
    g: &ParityGame,
    e: EdgeId,
    beta: f64,
    node_budget: usize,
) -> Result<f64, GtError> {
    if e >= g.edge_count() {
        return Err(GtError::NoEdge(e));
    }
    let params = GtParams {
        scc_cache: false,
        node_budget,
        samples: 1,
        ..GtParams::exhaustive(beta)
    };
    params.validate()?;
    let mut engine = Engine::new(g, env_region(g), &params);
    let v = engine.edge_value(e);
    if engine.budget_hit {
        return Err(GtError::Budget(node_budget));
    }
    Ok(v)
}

/// Mean of `params.samples` guided simulations starting with edge `e`.
pub fn mcts_value(g: &ParityGame, e: EdgeId, params: &GtParams) -> Result<f64, GtError> {
    if e >= g.edge_count() {
        return Err(GtError::NoEdge(e));
    }
    params.validate()?;
    let p = GtParams {
        scc_cache: false,
        ..params.clone()
    };
    let engine = Engine::new(g, env_region(g), &p);
    Ok(engine.mcts_edge_value(e))
}
