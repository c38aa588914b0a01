//! Strategy metrics, baselines, exploration scores, corpora and reports.

mod corpus;
mod mutate;
mod report;

use rand::seq::IndexedRandom;

pub use corpus::{
    generate_corpus, prepare_game, read_corpus, write_corpus, Corpus, CorpusItem, CorpusParams, Family, Provenance,
    Split,
};
pub use mutate::mutate_formula;
pub use report::{evaluate_game, EvalReport, EvalRow, Method, MethodSummary};

use crate::features::successor_trueness;
use crate::game::{one_player_check, strategy_iteration, GameError, ParityGame, Player, Strategy, VertexId};
use crate::ltl::trueness_or_estimate;
use crate::ranker::{RankerBank, Ranker};
use crate::rng;
use crate::translate::{LabeledGame, VertexKind, FF_SINK, TT_SINK};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("System does not win the game")]
    SystemLoses,
    #[error("vertex {0} is not an environment choice")]
    NotEnvChoice(VertexId),
    #[error("vertex {q} is not reachable from {p} in two plies")]
    NotTwoPlies { p: VertexId, q: VertexId },
    #[error("formula {0} has no temporal operator")]
    NoTemporal(String),
    #[error("no in-fragment mutation of {0} found")]
    MutationFailed(String),
    #[error("corpus line {line}: {message}")]
    Corpus { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Whether the strategy wins without any improvement step.
pub fn immediately_solved(g: &ParityGame, s: &Strategy) -> Result<bool, EvalError> {
    Ok(one_player_check(g, s)?)
}

/// `s` extended by the first out-edge wherever it is undefined.
pub fn complete_strategy(g: &ParityGame, s: &Strategy) -> Strategy {
    let mut out = s.clone();
    for v in g.vertices_of(Player::System) {
        if out.get(v).is_none() {
            out.set(v, g.out_edges(v)[0]);
        }
    }
    out
}

/// Share of System vertices where a winning strategy obtained by strategy
/// iteration from `s` differs from `s`, among the System vertices reachable
/// when System plays that winning strategy.
pub fn relative_distance(g: &ParityGame, s: &Strategy) -> Result<f64, EvalError> {
    let init = complete_strategy(g, s);
    let si = strategy_iteration(g, &init)?;
    if si.winner[g.initial()] != Player::System {
        return Err(EvalError::SystemLoses);
    }
    let reach = g.reachable_under(&si.strategy);
    let sys: Vec<VertexId> = g.vertices().filter(|&v| reach[v] && g.owner(v) == Player::System).collect();
    if sys.is_empty() {
        return Ok(0.0);
    }
    let wrong = sys.iter().filter(|&&v| si.strategy.get(v) != init.get(v)).count();
    Ok(wrong as f64 / sys.len() as f64)
}

fn reachable_system(g: &ParityGame) -> Vec<VertexId> {
    let reach = g.reachable();
    g.vertices().filter(|&v| reach[v] && g.owner(v) == Player::System).collect()
}

/// Per reachable System vertex, the edge whose successor master has the
/// highest trueness; ties go to the lower target, then the smaller letter.
pub fn baseline_trueness(lg: &LabeledGame) -> Strategy {
    let g = &lg.game;
    reachable_system(g)
        .into_iter()
        .map(|v| {
            let best = g
                .out_edges(v)
                .iter()
                .copied()
                .map(|e| (e, successor_trueness(lg, e)))
                .reduce(|a, b| {
                    let key = |e: usize| (g.edge(e).target, &lg.valuations[e]);
                    if b.1 > a.1 || (b.1 == a.1 && key(b.0) < key(a.0)) {
                        b
                    } else {
                        a
                    }
                })
                .unwrap();
            (v, best.0)
        })
        .collect()
}

/// Uniform choice per reachable System vertex, one stream per vertex.
pub fn baseline_random(g: &ParityGame, seed: u64) -> Strategy {
    reachable_system(g)
        .into_iter()
        .map(|v| (v, *g.out_edges(v).choose(&mut rng::stream(seed, &[v as u64])).unwrap()))
        .collect()
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Score of the step from environment choice `p` to state `q` (an
/// environment choice or a sink): the minimum over the system choices in
/// between of logistic(rank score of the edge into `q`) times the trueness
/// of `q`'s master.
pub fn exploration_score(lg: &LabeledGame, bank: &RankerBank, p: VertexId, q: VertexId) -> Result<f64, EvalError> {
    let g = &lg.game;
    let is_env_choice = |v: VertexId| matches!(lg.kinds[v], VertexKind::EnvChoice);
    if !is_env_choice(p) {
        return Err(EvalError::NotEnvChoice(p));
    }
    if !is_env_choice(q) && !lg.is_sink(q) {
        return Err(EvalError::NotEnvChoice(q));
    }
    let mids: Vec<VertexId> = g.successors(p).filter(|&s| g.successors(s).any(|w| w == q)).collect();
    if mids.is_empty() {
        return Err(EvalError::NotTwoPlies { p, q });
    }
    match q {
        TT_SINK => return Ok(1.0),
        FF_SINK => return Ok(0.0),
        _ => {}
    }
    let global = trueness_or_estimate(&lg.labels[q].master).0;
    let mut ranker = Ranker::new(lg, bank);
    let mut low = f64::INFINITY;
    for s in mids {
        let best = ranker
            .scores(s)
            .into_iter()
            .filter(|&(e, _)| g.edge(e).target == q)
            .map(|(_, x)| x)
            .fold(f64::NEG_INFINITY, f64::max);
        low = low.min(logistic(best) * global);
    }
    Ok(low)
}
