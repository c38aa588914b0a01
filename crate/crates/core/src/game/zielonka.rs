use super::{ParityGame, Player, Solution, Strategy};

/// Vertex-priority arena: one vertex per game vertex (neutral priority) and
/// one per edge carrying the edge's priority.
struct Arena {
    owner: Vec<Player>,
    prio: Vec<u32>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Arena {
    fn of(g: &ParityGame) -> Self {
        let n = g.vertex_count();
        let total = n + g.edge_count();
        let neutral = g.max_priority() + 1;
        let mut owner = g.owners().to_vec();
        let mut prio = vec![neutral; n];
        let mut succ = vec![Vec::new(); total];
        for (id, e) in g.edges().iter().enumerate() {
            owner.push(Player::System);
            prio.push(e.priority);
            succ[e.source].push(n + id);
            succ[n + id].push(e.target);
        }
        let mut pred = vec![Vec::new(); total];
        for (v, ws) in succ.iter().enumerate() {
            for &w in ws {
                pred[w].push(v);
            }
        }
        Arena {
            owner,
            prio,
            succ,
            pred,
        }
    }
}

struct Sub {
    winner: Vec<Option<Player>>,
    choice: Vec<Option<usize>>,
}

/// Attractor for `p` to `target` inside `mask`, recording attracting moves.
fn attract(
    a: &Arena,
    mask: &[bool],
    p: Player,
    target: &[usize],
    choice: &mut [Option<usize>],
) -> Vec<bool> {
    let mut inside = vec![false; a.owner.len()];
    let mut remaining: Vec<usize> = (0..a.owner.len())
        .map(|v| {
            if mask[v] {
                a.succ[v].iter().filter(|&&w| mask[w]).count()
            } else {
                0
            }
        })
        .collect();
    let mut queue: Vec<usize> = Vec::new();
    for &t in target {
        if !inside[t] {
            inside[t] = true;
            queue.push(t);
        }
    }
    while let Some(w) = queue.pop() {
        for &v in &a.pred[w] {
            if !mask[v] || inside[v] {
                continue;
            }
            if a.owner[v] == p {
                inside[v] = true;
                choice[v] = Some(w);
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

fn solve(a: &Arena, mask: &[bool]) -> Sub {
    let total = a.owner.len();
    let mut out = Sub {
        winner: vec![None; total],
        choice: vec![None; total],
    };
    let Some(d) = (0..total).filter(|&v| mask[v]).map(|v| a.prio[v]).min() else {
        return out;
    };
    let alpha = Player::of_priority(d);
    let top: Vec<usize> = (0..total).filter(|&v| mask[v] && a.prio[v] == d).collect();
    let mut attr_choice = vec![None; total];
    let attr_a = attract(a, mask, alpha, &top, &mut attr_choice);
    let rest: Vec<bool> = (0..total).map(|v| mask[v] && !attr_a[v]).collect();
    let first = solve(a, &rest);
    let opp: Vec<usize> = (0..total)
        .filter(|&v| first.winner[v] == Some(alpha.opponent()))
        .collect();

    if opp.is_empty() {
        for v in (0..total).filter(|&v| mask[v]) {
            out.winner[v] = Some(alpha);
            out.choice[v] = if rest[v] {
                first.choice[v]
            } else if a.prio[v] == d {
                a.succ[v].iter().copied().find(|&w| mask[w])
            } else {
                attr_choice[v]
            };
        }
        return out;
    }

    let mut opp_choice = vec![None; total];
    let attr_b = attract(a, mask, alpha.opponent(), &opp, &mut opp_choice);
    let rest2: Vec<bool> = (0..total).map(|v| mask[v] && !attr_b[v]).collect();
    let second = solve(a, &rest2);
    for v in (0..total).filter(|&v| mask[v]) {
        if attr_b[v] {
            out.winner[v] = Some(alpha.opponent());
            out.choice[v] = if first.winner[v] == Some(alpha.opponent()) {
                first.choice[v]
            } else {
                opp_choice[v]
            };
        } else {
            out.winner[v] = second.winner[v];
            out.choice[v] = second.choice[v];
        }
    }
    out
}

/// Recursive Zielonka solver over the edge-expanded arena.
pub fn zielonka_solve(g: &ParityGame) -> Solution {
    let a = Arena::of(g);
    let n = g.vertex_count();
    let sub = solve(&a, &vec![true; a.owner.len()]);
    let winner: Vec<Player> = (0..n)
        .map(|v| sub.winner[v].expect("every vertex is solved"))
        .collect();
    let mut system = Strategy::new();
    let mut environment = Strategy::new();
    for v in 0..n {
        if g.owner(v) != winner[v] {
            continue;
        }
        let edge = sub.choice[v].map(|w| w - n).unwrap_or(g.out_edges(v)[0]);
        match winner[v] {
            Player::System => system.set(v, edge),
            Player::Environment => environment.set(v, edge),
        }
    }
    Solution {
        winner,
        system,
        environment,
    }
}
