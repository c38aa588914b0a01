//! Small JSON-in, JSON-out surface for the static page in `www/`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use synthrank::game::{zielonka_solve, Player};
use synthrank::ltl::{parse, syntactic_metrics, system_control, trueness_or_estimate, Formula, Partition};
use synthrank::translate::{build_game, classify_fragment, LabeledGame, TranslateOptions};
use synthrank::truth::{compute_labeled, GtParams};

// Browsers have no monotonic clock for std, so the vertex cap is the only budget.
const MAX_VERTICES: usize = 2000;

fn setup(formula: &str, sys: &str) -> Result<(Formula, Partition), String> {
    let f = parse(formula).map_err(|e| e.to_string())?;
    let p = Partition::from_system(&f, sys.split(',').map(str::trim).filter(|s| !s.is_empty()));
    Ok((f, p))
}

fn game(formula: &str, sys: &str) -> Result<LabeledGame, String> {
    let (f, p) = setup(formula, sys)?;
    let opts = TranslateOptions { max_vertices: MAX_VERTICES, time_limit: None };
    build_game(&f, &p, &opts).map_err(|e| e.to_string())
}

fn winner_name(p: Player) -> &'static str {
    match p {
        Player::System => "system",
        Player::Environment => "environment",
    }
}

pub fn solve_json(formula: &str, sys: &str) -> Result<Value, String> {
    let lg = game(formula, sys)?;
    let g = &lg.game;
    let sol = zielonka_solve(g);
    let strategy: Vec<Value> = sol
        .system
        .iter()
        .filter(|&(v, _)| sol.winner[v] == Player::System)
        .map(|(v, e)| json!({ "vertex": v, "target": g.edge(e).target, "valuation": lg.valuations[e].to_string() }))
        .collect();
    Ok(json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "initial_winner": winner_name(sol.winner[g.initial()]),
        "strategy": strategy,
        "game": lg.to_document(),
    }))
}

pub fn ground_truth_json(formula: &str, sys: &str, samples: usize, seed: u64) -> Result<Value, String> {
    let lg = game(formula, sys)?;
    let params = GtParams { samples: samples.max(1), seed, ..GtParams::default() };
    let table = compute_labeled(&lg, &params).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = table
        .entries
        .iter()
        .map(|x| {
            json!({
                "source": x.source,
                "target": x.target,
                "valuation": lg.valuations[x.edge].to_string(),
                "value": x.value,
                "trivial": x.trivial,
            })
        })
        .collect();
    Ok(json!({ "entries": rows, "budget_hit": table.meta.budget_hit, "notice": table.meta.notice }))
}

pub fn measures_json(formula: &str, sys: &str) -> Result<Value, String> {
    let (f, p) = setup(formula, sys)?;
    let (t, estimated) = trueness_or_estimate(&f);
    let m = syntactic_metrics(&f);
    Ok(json!({
        "nnf": f.to_string(),
        "fragment": classify_fragment(&f).to_string(),
        "trueness": t,
        "trueness_estimated": estimated,
        "system_control": system_control(&f, &p),
        "conjuncts": m.conjuncts,
        "disjuncts": m.disjuncts,
        "height": m.height,
        "temporal_ops": m.temporal_ops,
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

/// Translates and solves; returns the game document, winner and a winning System strategy.
#[wasm_bindgen]
pub fn solve(formula: &str, sys: &str) -> Result<String, JsError> {
    to_js(solve_json(formula, sys))
}

#[wasm_bindgen(js_name = groundTruth)]
pub fn ground_truth(formula: &str, sys: &str, samples: usize, seed: u32) -> Result<String, JsError> {
    to_js(ground_truth_json(formula, sys, samples, seed as u64))
}

#[wasm_bindgen]
pub fn measures(formula: &str, sys: &str) -> Result<String, JsError> {
    to_js(measures_json(formula, sys))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_small_game() {
        let v = solve_json("G a", "a").unwrap();
        assert_eq!(v["initial_winner"], "system");
        assert_eq!(v["vertices"], 4);
    }

    #[test]
    fn unrealizable_is_environment() {
        let v = solve_json("G (a <-> X e)", "a").unwrap();
        assert_eq!(v["initial_winner"], "environment");
    }

    #[test]
    fn ground_truth_is_seeded() {
        let a = ground_truth_json("G (r -> F g)", "g", 40, 3).unwrap();
        let b = ground_truth_json("G (r -> F g)", "g", 40, 3).unwrap();
        assert_eq!(a, b);
        assert!(a["entries"].as_array().unwrap().iter().all(|e| (0.0..=1.0).contains(&e["value"].as_f64().unwrap())));
    }

    #[test]
    fn measures_of_g_a() {
        let v = measures_json("G a", "a").unwrap();
        assert_eq!(v["trueness"], 0.5);
        assert_eq!(v["system_control"], 1.0);
    }

    #[test]
    fn errors_are_strings() {
        assert!(solve_json("G (a", "a").is_err());
        assert!(measures_json("a U", "").is_err());
    }
}
