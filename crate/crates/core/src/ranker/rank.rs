use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{ModelKey, RankerBank};
use crate::features::{successor_trueness, Extractor};
use crate::game::{EdgeId, Player, Strategy, VertexId};
use crate::translate::{LabeledGame, FF_SINK, TT_SINK};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedEdge {
    pub edge: EdgeId,
    pub target: VertexId,
    pub score: f64,
}

/// `s(i) = sum over j != i of c(i, j)` for an antisymmetric `c`; each
/// unordered pair is evaluated once.
pub fn score_sum(n: usize, c: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut s = vec![0.0; n];
    for i in 0..n {
        for j in i + 1..n {
            let x = c(i, j);
            s[i] += x;
            s[j] -= x;
        }
    }
    s
}

/// Ranks the edges of system choices of one game.
pub struct Ranker<'a> {
    lg: &'a LabeledGame,
    bank: &'a RankerBank,
    extractor: Extractor<'a>,
}

impl<'a> Ranker<'a> {
    pub fn new(lg: &'a LabeledGame, bank: &'a RankerBank) -> Self {
        Ranker { lg, bank, extractor: Extractor::new(lg, bank.schema.clone()) }
    }

    /// Score per out-edge: the sum of confidences against every other edge
    /// of the state, or centred successor trueness without a model.
    pub fn scores(&mut self, v: VertexId) -> Vec<(EdgeId, f64)> {
        let feats = self.extractor.state_features(v);
        if feats.len() == 1 {
            return vec![(feats[0].0, 0.0)];
        }
        let key = ModelKey { class: feats[0].1.class, complement: feats[0].1.complement };
        match self.bank.model(key) {
            Some(m) => {
                let s = score_sum(feats.len(), |i, j| m.confidence(&feats[i].1.values, &feats[j].1.values));
                feats.iter().map(|f| f.0).zip(s).collect()
            }
            None => {
                log::debug!("no model for {key}, ranking by trueness");
                let t: Vec<f64> = feats.iter().map(|f| successor_trueness(self.lg, f.0)).collect();
                let mean = t.iter().sum::<f64>() / t.len() as f64;
                feats.iter().map(|f| f.0).zip(t.into_iter().map(|x| x - mean)).collect()
            }
        }
    }

    /// Best edge first: tt-sink edges lead, ff-sink edges trail, the rest by
    /// descending score, ties by target vertex and letter.
    pub fn rank(&mut self, v: VertexId) -> Vec<RankedEdge> {
        let lg = self.lg;
        let tier = |e: EdgeId| match lg.game.edge(e).target {
            TT_SINK => 0,
            FF_SINK => 2,
            _ => 1,
        };
        let mut out: Vec<RankedEdge> = self
            .scores(v)
            .into_iter()
            .map(|(edge, score)| RankedEdge { edge, target: lg.game.edge(edge).target, score })
            .collect();
        out.sort_by(|a, b| {
            tier(a.edge)
                .cmp(&tier(b.edge))
                .then(b.score.partial_cmp(&a.score).unwrap_or(Ordering::Equal))
                .then(a.target.cmp(&b.target))
                .then(lg.valuations[a.edge].cmp(&lg.valuations[b.edge]))
        });
        out
    }

    /// Top-ranked edge at every reachable system vertex.
    pub fn strategy(&mut self) -> Strategy {
        let g = &self.lg.game;
        let mut s = Strategy::new();
        let reach = g.reachable();
        for v in g.vertices().filter(|&v| reach[v] && g.owner(v) == Player::System) {
            s.set(v, self.rank(v)[0].edge);
        }
        s
    }
}

pub fn rank_edges(lg: &LabeledGame, v: VertexId, bank: &RankerBank) -> Vec<RankedEdge> {
    Ranker::new(lg, bank).rank(v)
}

pub fn recommend_strategy(lg: &LabeledGame, bank: &RankerBank) -> Strategy {
    Ranker::new(lg, bank).strategy()
}
