//! Strategy improvement on the sink-game reduction.
//!
//! Each edge of priority p carries the unit vector at coordinate p, positive
//! for odd p and negative for even p; vectors compare lexicographically with
//! low coordinates most significant, so the sum along a cycle is positive
//! exactly when its least priority is odd. System may additionally retreat
//! from any of its vertices to a sink with weight zero. Values are shortest
//! path weights to the sink against the current System strategy; vertices
//! that cannot reach the sink (value +inf) are won by System.

use std::cmp::Ordering;

use super::{opponent_wins, EdgeId, GameError, ParityGame, Player, Strategy, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiResult {
    pub winner: Vec<Player>,
    /// System strategy: improved on System's region, the initial choice
    /// elsewhere.
    pub strategy: Strategy,
    /// Rounds in which at least one vertex switched.
    pub rounds: usize,
}

impl SiResult {
    pub fn region(&self, p: Player) -> Vec<VertexId> {
        (0..self.winner.len())
            .filter(|&v| self.winner[v] == p)
            .collect()
    }
}

/// `None` stands for +inf.
type Value = Option<Vec<i64>>;

fn cmp_value(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Greater,
        (Some(_), None) => Ordering::Less,
        (Some(x), Some(y)) => x.cmp(y),
    }
}

fn along(priority: u32, target: &Value) -> Value {
    target.as_ref().map(|t| {
        let mut v = t.clone();
        v[priority as usize] += if priority % 2 == 1 { 1 } else { -1 };
        v
    })
}

/// Vertices from which Environment wins without System ever moving: the
/// Environment attractor of cycles through Environment vertices only whose
/// least priority is even.
fn environment_only_losses(g: &ParityGame) -> Vec<bool> {
    let mut seeds = vec![false; g.vertex_count()];
    if let Some((sub, back)) = restrict_to_environment(g) {
        let all: Vec<VertexId> = sub.vertices().collect();
        let wins = opponent_wins(&sub, Player::System, &Strategy::new(), &all)
            .expect("no System vertices remain");
        for (i, &v) in back.iter().enumerate() {
            seeds[v] = wins[i];
        }
    }
    env_attractor(g, &seeds)
}

/// Environment vertices whose cycles stay among Environment vertices, as a
/// standalone game (vertices without such successors get dropped).
fn restrict_to_environment(g: &ParityGame) -> Option<(ParityGame, Vec<VertexId>)> {
    let n = g.vertex_count();
    let mut keep: Vec<bool> = g
        .vertices()
        .map(|v| g.owner(v) == Player::Environment)
        .collect();
    // prune vertices without successors inside the kept set
    loop {
        let mut changed = false;
        for v in 0..n {
            if keep[v] && !g.successors(v).any(|w| keep[w]) {
                keep[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let back: Vec<VertexId> = (0..n).filter(|&v| keep[v]).collect();
    if back.is_empty() {
        return None;
    }
    let mut index = vec![usize::MAX; n];
    for (i, &v) in back.iter().enumerate() {
        index[v] = i;
    }
    let edges = g
        .edges()
        .iter()
        .filter(|e| keep[e.source] && keep[e.target])
        .map(|e| super::Edge {
            source: index[e.source],
            target: index[e.target],
            priority: e.priority,
        })
        .collect();
    let sub = ParityGame::new(
        vec![Player::Environment; back.len()],
        edges,
        0,
        g.max_priority(),
    )
    .expect("pruned subgraph is total");
    Some((sub, back))
}

fn env_attractor(g: &ParityGame, seeds: &[bool]) -> Vec<bool> {
    let n = g.vertex_count();
    let mut inside = seeds.to_vec();
    let mut remaining: Vec<usize> = g.vertices().map(|v| g.out_edges(v).len()).collect();
    let mut preds = vec![Vec::new(); n];
    for e in g.edges() {
        preds[e.target].push(e.source);
    }
    let mut queue: Vec<VertexId> = (0..n).filter(|&v| seeds[v]).collect();
    while let Some(w) = queue.pop() {
        for &v in &preds[w] {
            if inside[v] {
                continue;
            }
            if g.owner(v) == Player::Environment {
                inside[v] = true;
                queue.push(v);
            } else {
                remaining[v] -= 1;
                if remaining[v] == 0 {
                    inside[v] = true;
                    queue.push(v);
                }
            }
        }
    }
    inside
}

/// Shortest path values to the sink against the System choice `sigma`
/// (`None` = retreat).
fn evaluate(g: &ParityGame, lost: &[bool], sigma: &[Option<EdgeId>]) -> Vec<Value> {
    let n = g.vertex_count();
    let dims = g.max_priority() as usize + 1;
    let mut d: Vec<Value> = vec![None; n];
    for round in 0..=n + 1 {
        let mut changed = false;
        for v in (0..n).filter(|&v| !lost[v]) {
            let new = match g.owner(v) {
                Player::System => match sigma[v] {
                    None => Some(vec![0; dims]),
                    Some(e) => along(g.edge(e).priority, &d[g.edge(e).target]),
                },
                Player::Environment => g
                    .out_edges(v)
                    .iter()
                    .map(|&e| along(g.edge(e).priority, &d[g.edge(e).target]))
                    .min_by(cmp_value)
                    .expect("total game"),
            };
            if cmp_value(&new, &d[v]) == Ordering::Less {
                d[v] = new;
                changed = true;
            }
        }
        if !changed {
            return d;
        }
        assert!(round <= n, "negative cycle under an admissible strategy");
    }
    d
}

/// Strategy improvement started from `init`, which must choose an edge at
/// every System vertex. Where `init` already wins it is kept unchanged.
pub fn strategy_iteration(g: &ParityGame, init: &Strategy) -> Result<SiResult, GameError> {
    init.validate(g)?;
    for v in g.vertices_of(Player::System) {
        if init.get(v).is_none() {
            return Err(GameError::StrategyUndefined(v));
        }
    }
    let n = g.vertex_count();
    let lost = environment_only_losses(g);
    let all: Vec<VertexId> = g.vertices().collect();
    let init_loses = opponent_wins(g, Player::System, init, &all)?;
    let mut sigma: Vec<Option<EdgeId>> = (0..n)
        .map(|v| {
            if g.owner(v) == Player::System && !lost[v] && !init_loses[v] {
                init.get(v)
            } else {
                None
            }
        })
        .collect();

    let mut rounds = 0;
    let values = loop {
        let d = evaluate(g, &lost, &sigma);
        let mut switched = false;
        for v in g.vertices_of(Player::System).filter(|&v| !lost[v]) {
            let current = match sigma[v] {
                None => Some(vec![0; g.max_priority() as usize + 1]),
                Some(e) => along(g.edge(e).priority, &d[g.edge(e).target]),
            };
            let mut best: Option<(EdgeId, Value)> = None;
            for &e in g.out_edges(v) {
                if lost[g.edge(e).target] {
                    continue;
                }
                let cand = along(g.edge(e).priority, &d[g.edge(e).target]);
                if cmp_value(&cand, &current) != Ordering::Greater {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((_, b)) => cmp_value(&cand, b) == Ordering::Greater,
                };
                if better {
                    best = Some((e, cand));
                }
            }
            if let Some((e, _)) = best {
                let preferred = init.get(v).filter(|&i| {
                    !lost[g.edge(i).target]
                        && cmp_value(&along(g.edge(i).priority, &d[g.edge(i).target]), &current)
                            == Ordering::Greater
                });
                sigma[v] = Some(preferred.unwrap_or(e));
                switched = true;
            }
        }
        if !switched {
            break d;
        }
        rounds += 1;
    };

    let winner: Vec<Player> = (0..n)
        .map(|v| {
            if !lost[v] && values[v].is_none() {
                Player::System
            } else {
                Player::Environment
            }
        })
        .collect();
    let strategy = g
        .vertices_of(Player::System)
        .map(|v| {
            let e = match (winner[v], sigma[v]) {
                (Player::System, Some(e)) => e,
                _ => init.get(v).unwrap(),
            };
            (v, e)
        })
        .collect();
    Ok(SiResult {
        winner,
        strategy,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{random_game, zielonka_solve, Edge, RandomGameParams};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_init(g: &ParityGame, rng: &mut impl Rng) -> Strategy {
        g.vertices_of(Player::System)
            .map(|v| {
                let out = g.out_edges(v);
                (v, out[rng.random_range(0..out.len())])
            })
            .collect()
    }

    #[test]
    fn example_game_from_sigma_s() {
        let g = example_game();
        let init = {
            let mut s = example_sigma_s(&g);
            // v0, v2 and v4 are the System vertices; all are covered
            s.set(4, g.find_edge(4, 4).unwrap());
            s
        };
        let r = strategy_iteration(&g, &init).unwrap();
        assert_eq!(r.winner, vec![Player::System; 5]);
        assert_eq!(r.rounds, 0);
        assert_eq!(r.strategy, init);
    }

    #[test]
    fn improves_a_losing_start() {
        let g = example_game();
        let init = Strategy::from_moves(&g, &[(0, 0), (2, 1), (4, 4)]).unwrap();
        let r = strategy_iteration(&g, &init).unwrap();
        assert_eq!(r.winner, vec![Player::System; 5]);
        assert!(r.rounds >= 1);
        assert!(super::super::one_player_check(&g, &r.strategy).unwrap());
    }

    #[test]
    fn rejects_partial_init() {
        let g = example_game();
        let init = Strategy::from_moves(&g, &[(0, 2)]).unwrap();
        assert!(matches!(
            strategy_iteration(&g, &init),
            Err(GameError::StrategyUndefined(_))
        ));
    }

    #[test]
    fn environment_only_even_cycle() {
        let g = ParityGame::new(
            vec![Player::System, Player::Environment],
            vec![
                Edge {
                    source: 0,
                    target: 1,
                    priority: 1,
                },
                Edge {
                    source: 0,
                    target: 0,
                    priority: 3,
                },
                Edge {
                    source: 1,
                    target: 1,
                    priority: 0,
                },
            ],
            0,
            3,
        )
        .unwrap();
        let init = Strategy::from_moves(&g, &[(0, 1)]).unwrap();
        let r = strategy_iteration(&g, &init).unwrap();
        assert_eq!(r.winner, vec![Player::System, Player::Environment]);
        assert_eq!(r.strategy.get(0), g.find_edge(0, 0));
    }

    #[test]
    fn agrees_with_zielonka_on_random_games() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let g = random_game(&RandomGameParams::small(8), &mut rng);
            let z = zielonka_solve(&g);
            for _ in 0..3 {
                let r = strategy_iteration(&g, &random_init(&g, &mut rng)).unwrap();
                assert_eq!(r.winner, z.winner);
                let region = r.region(Player::System);
                let env = opponent_wins(&g, Player::System, &r.strategy, &region).unwrap();
                assert!(region.iter().all(|&v| !env[v]));
            }
        }
    }

    #[test]
    fn winning_init_needs_no_rounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = random_game(&RandomGameParams::small(8), &mut rng);
            let z = zielonka_solve(&g);
            if z.winner.contains(&Player::Environment) {
                continue;
            }
            let mut init = random_init(&g, &mut rng);
            for (v, e) in z.system.iter() {
                init.set(v, e);
            }
            let r = strategy_iteration(&g, &init).unwrap();
            assert_eq!(r.rounds, 0);
            assert_eq!(r.strategy, init);
        }
    }
}
