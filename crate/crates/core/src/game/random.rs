use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Edge, ParityGame, Player};

/// Parameters of the seeded random game generator.
///
/// Each vertex is System-owned with probability `system_ratio` and gets a
/// uniform out-degree in `out_degree` (capped at the vertex count) with
/// distinct uniform targets, self-loops allowed. Priorities are uniform in
/// `0..=max_priority`, drawn per edge or, with `vertex_priorities`, once per
/// vertex and stamped on all its outgoing edges. The bound of the result is
/// the largest priority actually drawn. Vertex 0 is initial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomGameParams {
    pub vertices: std::ops::RangeInclusive<usize>,
    pub out_degree: std::ops::RangeInclusive<usize>,
    pub max_priority: u32,
    pub system_ratio: f64,
    pub vertex_priorities: bool,
}

impl RandomGameParams {
    /// Games with 1..=n vertices, out-degree 1..=3, priorities up to 5.
    pub fn small(n: usize) -> Self {
        RandomGameParams {
            vertices: 1..=n,
            out_degree: 1..=3,
            max_priority: 5,
            system_ratio: 0.5,
            vertex_priorities: false,
        }
    }
}

pub fn random_game(p: &RandomGameParams, rng: &mut impl Rng) -> ParityGame {
    let n = rng.random_range(p.vertices.clone()).max(1);
    let owners: Vec<Player> = (0..n)
        .map(|_| {
            if rng.random_bool(p.system_ratio) {
                Player::System
            } else {
                Player::Environment
            }
        })
        .collect();
    let mut edges = Vec::new();
    for v in 0..n {
        let lo = (*p.out_degree.start()).clamp(1, n);
        let hi = (*p.out_degree.end()).clamp(lo, n);
        let k = rng.random_range(lo..=hi);
        let vertex_priority = rng.random_range(0..=p.max_priority);
        let mut targets = sample(rng, n, k).into_vec();
        targets.sort_unstable();
        for w in targets {
            let priority = if p.vertex_priorities {
                vertex_priority
            } else {
                rng.random_range(0..=p.max_priority)
            };
            edges.push(Edge {
                source: v,
                target: w,
                priority,
            });
        }
    }
    let bound = edges.iter().map(|e| e.priority).max().unwrap_or(0);
    ParityGame::new(owners, edges, 0, bound).expect("generated game is total")
}
