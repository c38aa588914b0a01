use super::{ParityGame, VertexId};

/// Strongly connected components of the graph `adj`, sinks first: every
/// edge between different components points to an earlier component.
pub fn tarjan(adj: &[Vec<VertexId>]) -> Vec<Vec<VertexId>> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut sccs = Vec::new();
    let mut next = 0;
    // explicit DFS stack of (vertex, next child position)
    let mut call: Vec<(VertexId, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&(v, child)) = call.last() {
            if child == 0 && index[v] == UNSEEN {
                index[v] = next;
                low[v] = next;
                next += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(child) {
                call.last_mut().unwrap().1 += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                sccs.push(comp);
            }
        }
    }
    sccs
}

/// SCCs of the game graph in reverse topological order.
pub fn scc_decompose(g: &ParityGame) -> Vec<Vec<VertexId>> {
    let adj: Vec<Vec<VertexId>> = g.vertices().map(|v| g.successors(v).collect()).collect();
    tarjan(&adj)
}

/// Component index per vertex for a decomposition.
pub fn component_index(n: usize, sccs: &[Vec<VertexId>]) -> Vec<usize> {
    let mut idx = vec![0; n];
    for (i, comp) in sccs.iter().enumerate() {
        for &v in comp {
            idx[v] = i;
        }
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::example_game;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn chain_lists_sink_first() {
        assert_eq!(tarjan(&[vec![0, 1], vec![1]]), vec![vec![1], vec![0]]);
    }

    #[test]
    fn cycle_is_one_component() {
        assert_eq!(tarjan(&[vec![1], vec![2], vec![0]]), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn example_game_order() {
        assert_eq!(
            scc_decompose(&example_game()),
            vec![vec![4], vec![3], vec![1, 2], vec![0]]
        );
    }

    fn reach(adj: &[Vec<usize>], s: usize) -> Vec<bool> {
        let mut seen = vec![false; adj.len()];
        let mut st = vec![s];
        seen[s] = true;
        while let Some(v) = st.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    st.push(w);
                }
            }
        }
        seen
    }

    proptest! {
        #[test]
        fn components_match_mutual_reachability(
            edges in proptest::collection::vec((0usize..9, 0usize..9), 0..30)
        ) {
            let mut adj = vec![Vec::new(); 9];
            for (u, w) in edges {
                adj[u].push(w);
            }
            let sccs = tarjan(&adj);
            let idx = component_index(9, &sccs);
            let r: Vec<Vec<bool>> = (0..9).map(|v| reach(&adj, v)).collect();
            for u in 0..9 {
                for w in 0..9 {
                    prop_assert_eq!(idx[u] == idx[w], r[u][w] && r[w][u]);
                    if r[u][w] && idx[u] != idx[w] {
                        prop_assert!(idx[w] < idx[u]);
                    }
                }
            }
        }
    }
}
