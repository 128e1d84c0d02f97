//! Compressed sparse adjacency shared by lattices, models and hardware graphs.

use crate::error::{Error, Result};

/// Undirected simple graph on dense vertex ids `0..n`.
///
/// Edges are stored once as `(a, b)` with `a < b`, sorted lexicographically.
/// The adjacency lists reference edge indices so per-edge data (couplers) can
/// live in parallel arrays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(u32, u32)>,
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
    edge_of: Vec<u32>,
}

impl Graph {
    /// Builds a graph, normalizing edge orientation and order. Self-loops and
    /// duplicate edges are rejected.
    pub fn new(num_vertices: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut list: Vec<(u32, u32)> = edges.into_iter().map(|(a, b)| if a < b { (a, b) } else { (b, a) }).collect();
        list.sort_unstable();
        for w in list.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidArgument(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
            }
        }
        for &(a, b) in &list {
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop at {a}")));
            }
            if b as usize >= num_vertices {
                return Err(Error::InvalidArgument(format!("edge ({a}, {b}) references vertex beyond {num_vertices}")));
            }
        }
        Ok(Self::from_sorted(num_vertices, list))
    }

    fn from_sorted(num_vertices: usize, edges: Vec<(u32, u32)>) -> Self {
        let mut degree = vec![0u32; num_vertices + 1];
        for &(a, b) in &edges {
            degree[a as usize + 1] += 1;
            degree[b as usize + 1] += 1;
        }
        for i in 0..num_vertices {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let total = offsets[num_vertices] as usize;
        let mut neighbors = vec![0u32; total];
        let mut edge_of = vec![0u32; total];
        for (e, &(a, b)) in edges.iter().enumerate() {
            let slot = fill[a as usize] as usize;
            neighbors[slot] = b;
            edge_of[slot] = e as u32;
            fill[a as usize] += 1;
            let slot = fill[b as usize] as usize;
            neighbors[slot] = a;
            edge_of[slot] = e as u32;
            fill[b as usize] += 1;
        }
        // neighbor lists sorted by neighbor id
        for v in 0..num_vertices {
            let (s, t) = (offsets[v] as usize, offsets[v + 1] as usize);
            let mut pairs: Vec<(u32, u32)> = (s..t).map(|i| (neighbors[i], edge_of[i])).collect();
            pairs.sort_unstable();
            for (i, (n, e)) in pairs.into_iter().enumerate() {
                neighbors[s + i] = n;
                edge_of[s + i] = e;
            }
        }
        Self { num_vertices, edges, offsets, neighbors, edge_of }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_vertices).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    /// Edge indices parallel to [`Graph::neighbors`].
    pub fn incident_edges(&self, v: usize) -> &[u32] {
        &self.edge_of[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub(crate) fn offsets(&self) -> &[u32] {
        &self.offsets
    }

    pub(crate) fn flat_neighbors(&self) -> &[u32] {
        &self.neighbors
    }

    pub(crate) fn flat_edges(&self) -> &[u32] {
        &self.edge_of
    }

    /// Index of edge `{a, b}` if present.
    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        let nbrs = self.neighbors(a);
        nbrs.binary_search(&(b as u32)).ok().map(|i| self.incident_edges(a)[i] as usize)
    }

    /// True when the vertex subset induces a connected subgraph.
    pub fn is_connected_subset(&self, members: &[u32]) -> bool {
        if members.is_empty() {
            return true;
        }
        let mut inside = vec![false; self.num_vertices];
        for &m in members {
            inside[m as usize] = true;
        }
        let mut seen = vec![false; self.num_vertices];
        let mut stack = vec![members[0]];
        seen[members[0] as usize] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &n in self.neighbors(v as usize) {
                if inside[n as usize] && !seen[n as usize] {
                    seen[n as usize] = true;
                    count += 1;
                    stack.push(n);
                }
            }
        }
        count == members.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_adjacency() {
        let g = Graph::new(3, [(2, 0), (0, 1), (1, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert_eq!(g.find_edge(2, 1), Some(2));
        assert_eq!(g.max_degree(), 2);
    }

    #[test]
    fn rejects_duplicates_and_loops() {
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(1, 1)]).is_err());
        assert!(Graph::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn connectivity_of_subsets() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(g.is_connected_subset(&[0, 1]));
        assert!(!g.is_connected_subset(&[0, 1, 2]));
    }
}
