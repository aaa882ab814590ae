//! Connected components of the conflict graph.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ConflictGraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub id: usize,
    /// Ascending row ids.
    pub members: Vec<usize>,
    pub edge_count: usize,
    pub is_clique: bool,
}

impl Component {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, row: usize) -> bool {
        self.members.binary_search(&row).is_ok()
    }
}

/// Splits the graph into connected components with an explicit-stack DFS.
/// Components are ordered by their smallest member and numbered in that order.
pub fn decompose(graph: &ConflictGraph) -> Vec<Component> {
    let n = graph.row_count();
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();

    for root in 0..n {
        if seen[root] || !graph.is_conflicting(root) {
            continue;
        }
        seen[root] = true;
        stack.push(root);
        let mut members = Vec::new();
        let mut degree_sum = 0;
        while let Some(v) = stack.pop() {
            members.push(v);
            degree_sum += graph.degree(v);
            for &w in graph.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        let mut component = Component {
            id: components.len(),
            members,
            edge_count: degree_sum / 2,
            is_clique: false,
        };
        component.is_clique = is_clique(&component, graph);
        components.push(component);
    }
    components
}

/// Degree test: every member is adjacent to all `|C| - 1` others. Valid because
/// a component's members have no neighbours outside it.
pub fn is_clique(component: &Component, graph: &ConflictGraph) -> bool {
    let need = component.members.len().saturating_sub(1);
    component.members.iter().all(|&v| graph.degree(v) == need)
}

/// Checks that no edge joins two components and that together the components
/// cover exactly the conflicting rows.
pub fn check_independence(components: &[Component], graph: &ConflictGraph) -> Result<()> {
    let mut owner = vec![usize::MAX; graph.row_count()];
    for c in components {
        for &m in &c.members {
            if owner[m] != usize::MAX {
                return Err(Error::Invariant(format!(
                    "row {m} belongs to components {} and {}",
                    owner[m], c.id
                )));
            }
            owner[m] = c.id;
        }
    }
    for &(u, v) in graph.edges() {
        if owner[u] != owner[v] || owner[u] == usize::MAX {
            return Err(Error::Invariant(format!(
                "edge ({u},{v}) crosses components {} and {}",
                owner[u] as isize, owner[v] as isize
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionStats {
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
    pub cliques: usize,
    pub max_component: usize,
    pub min_component: usize,
}

impl DecompositionStats {
    pub fn new(components: &[Component], graph: &ConflictGraph) -> Self {
        DecompositionStats {
            nodes: graph.vertex_count(),
            edges: graph.edge_count(),
            components: components.len(),
            cliques: components.iter().filter(|c| c.is_clique).count(),
            max_component: components.iter().map(Component::len).max().unwrap_or(0),
            min_component: components.iter().map(Component::len).min().unwrap_or(0),
        }
    }
}
