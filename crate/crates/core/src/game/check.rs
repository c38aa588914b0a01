use super::{scc::tarjan, GameError, ParityGame, Player, Strategy, VertexId};

/// Fixes `strategy` for `owner` and solves the remaining one-player game for
/// the opponent. Returns, per vertex reachable from `roots`, whether the
/// opponent can win from it; unreached vertices report `false`.
pub fn opponent_wins(
    g: &ParityGame,
    owner: Player,
    strategy: &Strategy,
    roots: &[VertexId],
) -> Result<Vec<bool>, GameError> {
    strategy.validate(g)?;
    let allowed = |e: usize| {
        let v = g.edge(e).source;
        g.owner(v) != owner || strategy.get(v) == Some(e)
    };
    let reached = g.reachable_with(roots, allowed);
    for v in g.vertices().filter(|&v| reached[v] && g.owner(v) == owner) {
        if strategy.get(v).is_none() {
            return Err(GameError::StrategyUndefined(v));
        }
    }
    let n = g.vertex_count();
    let live: Vec<usize> = (0..g.edge_count())
        .filter(|&e| reached[g.edge(e).source] && allowed(e))
        .collect();

    // Seeds: vertices on a cycle whose least priority favours the opponent.
    // For each such priority q, look for an SCC of the edges >= q that
    // contains an edge of priority q.
    let favour = owner.opponent();
    let mut seed = vec![false; n];
    let mut priorities: Vec<u32> = live.iter().map(|&e| g.edge(e).priority).collect();
    priorities.sort_unstable();
    priorities.dedup();
    for q in priorities
        .into_iter()
        .filter(|&q| Player::of_priority(q) == favour)
    {
        let mut adj = vec![Vec::new(); n];
        for &e in &live {
            let ed = g.edge(e);
            if ed.priority >= q {
                adj[ed.source].push(ed.target);
            }
        }
        let sccs = tarjan(&adj);
        let idx = super::scc::component_index(n, &sccs);
        for &e in &live {
            let ed = g.edge(e);
            if ed.priority == q && idx[ed.source] == idx[ed.target] {
                for &v in &sccs[idx[ed.source]] {
                    seed[v] = true;
                }
            }
        }
    }

    // Backward reachability to the seeds inside the fixed graph.
    let mut preds = vec![Vec::new(); n];
    for &e in &live {
        preds[g.edge(e).target].push(g.edge(e).source);
    }
    let mut wins = seed.clone();
    let mut stack: Vec<VertexId> = (0..n).filter(|&v| seed[v]).collect();
    while let Some(v) = stack.pop() {
        for &u in &preds[v] {
            if !wins[u] {
                wins[u] = true;
                stack.push(u);
            }
        }
    }
    Ok(wins)
}

/// Whether `sys` wins from the initial vertex against every Environment
/// behaviour.
pub fn one_player_check(g: &ParityGame, sys: &Strategy) -> Result<bool, GameError> {
    let env = opponent_wins(g, Player::System, sys, &[g.initial()])?;
    Ok(!env[g.initial()])
}
