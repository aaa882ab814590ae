use serde::{Deserialize, Serialize};
use std::io::Write;

/// Undirected conflict graph over row ids.
///
/// Adjacency is indexed by row id, so neighbour and degree queries are O(1).
/// Rows without conflicts simply have an empty neighbour list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictGraph {
    row_count: usize,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl ConflictGraph {
    /// Builds a graph from unordered pairs; duplicates and orientation are
    /// normalised away.
    ///
    /// # Panics
    /// On self-loops or endpoints `>= row_count`.
    pub fn from_edges(row_count: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut edges: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(u, v)| {
                assert!(u != v, "self-loop on row {u}");
                assert!(u < row_count && v < row_count, "edge ({u},{v}) out of range");
                (u.min(v), u.max(v))
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();

        let mut adjacency = vec![Vec::new(); row_count];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        ConflictGraph {
            row_count,
            adjacency,
            edges,
        }
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn is_conflicting(&self, v: usize) -> bool {
        !self.adjacency[v].is_empty()
    }

    /// Conflicting rows (`I_C`), ascending.
    pub fn vertices(&self) -> Vec<usize> {
        (0..self.row_count).filter(|&v| self.is_conflicting(v)).collect()
    }

    /// Rows involved in no conflict (`I_R`), ascending.
    pub fn non_conflicting(&self) -> Vec<usize> {
        (0..self.row_count)
            .filter(|&v| !self.is_conflicting(v))
            .collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.iter().filter(|a| !a.is_empty()).count()
    }

    /// True when `removed` touches every edge.
    pub fn is_vertex_cover(&self, removed: &[usize]) -> bool {
        let mut mark = vec![false; self.row_count];
        for &r in removed {
            mark[r] = true;
        }
        self.edges.iter().all(|&(u, v)| mark[u] || mark[v])
    }

    /// Writes one `u v` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (u, v) in &self.edges {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalises_pairs() {
        let g = ConflictGraph::from_edges(4, [(2, 0), (0, 2), (1, 2)]);
        assert_eq!(g.edges(), &[(0, 2), (1, 2)]);
        assert_eq!(g.neighbors(2), &[0, 1]);
        assert_eq!(g.degree(2), 2);
        assert!(g.has_edge(2, 1) && g.has_edge(1, 2));
        assert_eq!(g.vertices(), vec![0, 1, 2]);
        assert_eq!(g.non_conflicting(), vec![3]);
    }

    #[test]
    fn vertex_cover_check() {
        let g = ConflictGraph::from_edges(3, [(0, 1), (1, 2)]);
        assert!(g.is_vertex_cover(&[1]));
        assert!(!g.is_vertex_cover(&[0]));
        assert!(g.is_vertex_cover(&[0, 2]));
    }

    #[test]
    fn edge_list_dump() {
        let g = ConflictGraph::from_edges(3, [(1, 0), (2, 1)]);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 1\n1 2\n");
    }

    #[test]
    #[should_panic(expected = "self-loop")]
    fn self_loop_panics() {
        ConflictGraph::from_edges(2, [(1, 1)]);
    }
}
