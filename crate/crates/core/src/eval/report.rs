use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{baseline_random, baseline_trueness, immediately_solved, relative_distance, EvalError};
use crate::game::{zielonka_solve, Player};
use crate::ranker::{recommend_strategy, RankerBank};
use crate::rng;
use crate::translate::LabeledGame;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Ranker,
    Trueness,
    Random,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Ranker, Method::Trueness, Method::Random];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ranker => "ranker",
            Method::Trueness => "trueness",
            Method::Random => "random",
        }
    }
}

/// Distances are empty when System loses the game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub game: String,
    pub reachable: usize,
    pub winner: String,
    pub complement: bool,
    pub ranker_solved: bool,
    pub trueness_solved: bool,
    pub random_solved: bool,
    pub ranker_distance: Option<f64>,
    pub trueness_distance: Option<f64>,
    pub random_distance: Option<f64>,
}

impl EvalRow {
    pub fn solved(&self, m: Method) -> bool {
        match m {
            Method::Ranker => self.ranker_solved,
            Method::Trueness => self.trueness_solved,
            Method::Random => self.random_solved,
        }
    }

    pub fn distance(&self, m: Method) -> Option<f64> {
        match m {
            Method::Ranker => self.ranker_distance,
            Method::Trueness => self.trueness_distance,
            Method::Random => self.random_distance,
        }
    }

    pub fn system_wins(&self) -> bool {
        self.winner == "system"
    }

    fn unsolved_by_all(&self) -> bool {
        self.system_wins() && Method::ALL.iter().all(|&m| !self.solved(m))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    /// Games System wins.
    pub games: usize,
    pub solved_fraction: f64,
    /// Over games no method solves immediately: arithmetic mean of the
    /// distance, and geometric mean of its strictly positive values.
    pub hard_games: usize,
    pub mean_distance: Option<f64>,
    pub geo_mean_distance: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    pub fn summary(&self) -> Vec<MethodSummary> {
        let won: Vec<&EvalRow> = self.rows.iter().filter(|r| r.system_wins()).collect();
        let hard: Vec<&EvalRow> = won.iter().copied().filter(|r| r.unsolved_by_all()).collect();
        Method::ALL
            .into_iter()
            .map(|m| {
                let solved = won.iter().filter(|r| r.solved(m)).count();
                let d: Vec<f64> = hard.iter().filter_map(|r| r.distance(m)).collect();
                let pos: Vec<f64> = d.iter().copied().filter(|&x| x > 0.0).collect();
                MethodSummary {
                    method: m,
                    games: won.len(),
                    solved_fraction: if won.is_empty() { 0.0 } else { solved as f64 / won.len() as f64 },
                    hard_games: hard.len(),
                    mean_distance: (!d.is_empty()).then(|| d.iter().sum::<f64>() / d.len() as f64),
                    geo_mean_distance: (!pos.is_empty())
                        .then(|| (pos.iter().map(|x| x.ln()).sum::<f64>() / pos.len() as f64).exp()),
                }
            })
            .collect()
    }

    pub fn method(&self, m: Method) -> MethodSummary {
        self.summary().into_iter().find(|s| s.method == m).unwrap()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), EvalError> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> Result<String, EvalError> {
        Ok(serde_json::to_string_pretty(&self.summary())?)
    }
}

/// Evaluates the three methods on one game. The random baseline draws from
/// a stream derived from `seed` and the game id.
pub fn evaluate_game(id: &str, lg: &LabeledGame, bank: &RankerBank, seed: u64) -> Result<EvalRow, EvalError> {
    let g = &lg.game;
    let sol = zielonka_solve(g);
    let system_wins = sol.winner[g.initial()] == Player::System;
    let mut row = EvalRow {
        game: id.to_string(),
        reachable: g.reachable().iter().filter(|&&r| r).count(),
        winner: if system_wins { "system" } else { "environment" }.into(),
        complement: lg.complement_mode,
        ranker_solved: false,
        trueness_solved: false,
        random_solved: false,
        ranker_distance: None,
        trueness_distance: None,
        random_distance: None,
    };
    if !system_wins {
        return Ok(row);
    }
    let strategies = [
        recommend_strategy(lg, bank),
        baseline_trueness(lg),
        baseline_random(g, rng::derive(seed, &[rng::hash_str(id)])),
    ];
    let mut solved = [false; 3];
    let mut dist = [0.0; 3];
    for (i, s) in strategies.iter().enumerate() {
        solved[i] = immediately_solved(g, s)?;
        dist[i] = relative_distance(g, s)?;
    }
    [row.ranker_solved, row.trueness_solved, row.random_solved] = solved;
    row.ranker_distance = Some(dist[0]);
    row.trueness_distance = Some(dist[1]);
    row.random_distance = Some(dist[2]);
    Ok(row)
}
