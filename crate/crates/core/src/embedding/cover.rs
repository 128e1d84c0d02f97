//! Minimum vertex cover of small conflict graphs.

use std::collections::BTreeMap;

/// Components with more vertices than this are covered greedily.
pub const EXACT_COVER_LIMIT: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    /// Sorted cover vertices.
    pub vertices: Vec<u32>,
    /// True when some component exceeded [`EXACT_COVER_LIMIT`].
    pub greedy: bool,
}

/// Vertex cover of the graph given by `edges`, minimum per connected
/// component and lexicographically smallest among minimum covers.
pub fn min_vertex_cover(edges: &[(u32, u32)]) -> Cover {
    // compact vertex ids in ascending order so index order is id order
    let mut ids: Vec<u32> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    ids.sort_unstable();
    ids.dedup();
    let pos: BTreeMap<u32, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = ids.len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        let (a, b) = (pos[&a], pos[&b]);
        if a != b && !adj[a].contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut out = Cover { vertices: Vec::new(), greedy: false };
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut members = vec![start];
        comp[start] = start;
        let mut i = 0;
        while i < members.len() {
            for &w in &adj[members[i]] {
                if comp[w] == usize::MAX {
                    comp[w] = start;
                    members.push(w);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        let chosen = if members.len() <= EXACT_COVER_LIMIT {
            exact_cover(&members, &adj)
        } else {
            out.greedy = true;
            greedy_cover(&members, &adj)
        };
        out.vertices.extend(chosen.into_iter().map(|i| ids[i]));
    }
    out.vertices.sort_unstable();
    out
}

/// Exact search over increasing cover sizes; within a size, vertices are
/// decided in ascending order trying inclusion first, so the first cover
/// found is the lexicographically smallest.
fn exact_cover(members: &[usize], adj: &[Vec<usize>]) -> Vec<usize> {
    let local: BTreeMap<usize, usize> = members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let nbrs: Vec<Vec<usize>> = members.iter().map(|v| adj[*v].iter().map(|w| local[w]).collect()).collect();
    let n = members.len();
    for k in 0..=n {
        let mut state = vec![0u8; n]; // 0 undecided, 1 in, 2 out
        if search(0, k, &nbrs, &mut state) {
            return (0..n).filter(|&i| state[i] == 1).map(|i| members[i]).collect();
        }
    }
    unreachable!("the full vertex set is a cover")
}

fn search(v: usize, budget: usize, nbrs: &[Vec<usize>], state: &mut [u8]) -> bool {
    let n = state.len();
    if v == n {
        return true;
    }
    if state[v] == 1 {
        return search(v + 1, budget, nbrs, state);
    }
    // include v
    if budget > 0 {
        state[v] = 1;
        if search(v + 1, budget - 1, nbrs, state) {
            return true;
        }
    }
    // exclude v: every neighbour must be in the cover
    if nbrs[v].iter().any(|&w| state[w] == 2) {
        state[v] = 0;
        return false;
    }
    let forced: Vec<usize> = nbrs[v].iter().copied().filter(|&w| state[w] == 0).collect();
    if forced.len() <= budget {
        state[v] = 2;
        for &w in &forced {
            state[w] = 1;
        }
        if search(v + 1, budget - forced.len(), nbrs, state) {
            return true;
        }
        for &w in &forced {
            state[w] = 0;
        }
    }
    state[v] = 0;
    false
}

/// Repeatedly takes the vertex covering most uncovered edges, lowest id
/// first on ties.
fn greedy_cover(members: &[usize], adj: &[Vec<usize>]) -> Vec<usize> {
    let mut taken = vec![false; adj.len()];
    let mut chosen = Vec::new();
    loop {
        let best = members
            .iter()
            .filter(|&&v| !taken[v])
            .map(|&v| (adj[v].iter().filter(|&&w| !taken[w]).count(), v))
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        match best {
            Some((d, v)) if d > 0 => {
                taken[v] = true;
                chosen.push(v);
            }
            _ => return chosen,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(min_vertex_cover(&[(4, 2)]).vertices, vec![2]);
        assert_eq!(min_vertex_cover(&[(1, 2), (2, 3)]).vertices, vec![2]);
        assert_eq!(min_vertex_cover(&[]).vertices, Vec::<u32>::new());
        // triangle: lexicographically smallest pair
        assert_eq!(min_vertex_cover(&[(5, 6), (6, 7), (5, 7)]).vertices, vec![5, 6]);
        // two components
        assert_eq!(min_vertex_cover(&[(0, 1), (10, 11), (11, 12)]).vertices, vec![0, 11]);
    }

    #[test]
    fn large_components_fall_back() {
        let path: Vec<(u32, u32)> = (0..40).map(|i| (i, i + 1)).collect();
        let c = min_vertex_cover(&path);
        assert!(c.greedy);
        assert!(path.iter().all(|&(a, b)| c.vertices.contains(&a) || c.vertices.contains(&b)));
    }
}
