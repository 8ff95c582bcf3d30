//! Lag-resolved directed multigraph of causal links.
//!
//! Edges are identified by their `(source, sink, lag)` triple; the same pair
//! of nodes may be linked at several lags. Edges are kept sorted by that
//! triple so every rendering of a graph is deterministic.

mod eval;
mod io;

pub use eval::{evaluate, EvalReport};
pub use io::{deserialize_json, serialize, to_table, write_table, Format, TableRow, TABLE_HEADER};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::default_names;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("edge {source_node}->{sink} references a node outside 0..{n_nodes}")]
    NodeOutOfRange {
        source_node: usize,
        sink: usize,
        n_nodes: usize,
    },
    #[error("duplicate edge {source_node}->{sink} at lag {lag}")]
    DuplicateEdgeTriple {
        source_node: usize,
        sink: usize,
        lag: usize,
    },
    #[error("edge lag must be at least 1")]
    InvalidLag,
    #[error("edge p-value {0} is outside (0, 1]")]
    InvalidPValue(f64),
    #[error("edge cmi {0} is not finite")]
    NonFiniteCmi(f64),
    #[error("{found} node names given for {expected} nodes")]
    NameCount { expected: usize, found: usize },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("graphs have different node counts ({predicted} vs {truth})")]
    NodeCountMismatch { predicted: usize, truth: usize },
}

/// One lagged causal link `source(t - lag) -> sink(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub source: usize,
    pub sink: usize,
    pub lag: usize,
    /// Conditional mutual information of the link given the sink's other
    /// parents, in nats.
    pub cmi: f64,
    pub p_value: f64,
}

impl EdgeRecord {
    pub fn triple(&self) -> (usize, usize, usize) {
        (self.source, self.sink, self.lag)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalGraph {
    n_nodes: usize,
    node_names: Vec<String>,
    edges: Vec<EdgeRecord>,
}

impl CausalGraph {
    pub fn new(n_nodes: usize) -> Self {
        CausalGraph {
            n_nodes,
            node_names: default_names(n_nodes),
            edges: Vec::new(),
        }
    }

    pub fn with_names(names: Vec<String>) -> Self {
        CausalGraph {
            n_nodes: names.len(),
            node_names: names,
            edges: Vec::new(),
        }
    }

    pub fn from_edges(
        names: Vec<String>,
        edges: impl IntoIterator<Item = EdgeRecord>,
    ) -> Result<Self, GraphError> {
        let mut g = Self::with_names(names);
        for e in edges {
            g.add_edge(e)?;
        }
        Ok(g)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn node_name(&self, i: usize) -> &str {
        &self.node_names[i]
    }

    /// Edges sorted by `(source, sink, lag)`.
    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, source: usize, sink: usize, lag: usize) -> bool {
        self.position(source, sink, lag).is_ok()
    }

    pub fn edge(&self, source: usize, sink: usize, lag: usize) -> Option<&EdgeRecord> {
        self.position(source, sink, lag).ok().map(|i| &self.edges[i])
    }

    fn position(&self, source: usize, sink: usize, lag: usize) -> Result<usize, usize> {
        self.edges
            .binary_search_by(|e| e.triple().cmp(&(source, sink, lag)))
    }

    pub fn add_edge(&mut self, e: EdgeRecord) -> Result<(), GraphError> {
        if e.source >= self.n_nodes || e.sink >= self.n_nodes {
            return Err(GraphError::NodeOutOfRange {
                source_node: e.source,
                sink: e.sink,
                n_nodes: self.n_nodes,
            });
        }
        if e.lag == 0 {
            return Err(GraphError::InvalidLag);
        }
        if !(e.p_value > 0.0 && e.p_value <= 1.0) {
            return Err(GraphError::InvalidPValue(e.p_value));
        }
        if !e.cmi.is_finite() {
            return Err(GraphError::NonFiniteCmi(e.cmi));
        }
        match self.position(e.source, e.sink, e.lag) {
            Ok(_) => Err(GraphError::DuplicateEdgeTriple {
                source_node: e.source,
                sink: e.sink,
                lag: e.lag,
            }),
            Err(at) => {
                self.edges.insert(at, e);
                Ok(())
            }
        }
    }

    /// Parents of `sink` as `(source, lag)` pairs.
    pub fn parents(&self, sink: usize) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .filter(|e| e.sink == sink)
            .map(|e| (e.source, e.lag))
            .collect()
    }

    /// Copy keeping only the edges that satisfy `keep`.
    pub fn filtered(&self, keep: impl Fn(&EdgeRecord) -> bool) -> CausalGraph {
        CausalGraph {
            n_nodes: self.n_nodes,
            node_names: self.node_names.clone(),
            edges: self.edges.iter().copied().filter(|e| keep(e)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(source: usize, sink: usize, lag: usize) -> EdgeRecord {
        EdgeRecord {
            source,
            sink,
            lag,
            cmi: 0.1,
            p_value: 0.01,
        }
    }

    #[test]
    fn edges_stay_sorted() {
        let mut g = CausalGraph::new(3);
        for e in [edge(2, 0, 1), edge(0, 1, 2), edge(0, 1, 1), edge(1, 2, 1)] {
            g.add_edge(e).unwrap();
        }
        let triples: Vec<_> = g.edges().iter().map(|e| e.triple()).collect();
        assert_eq!(triples, vec![(0, 1, 1), (0, 1, 2), (1, 2, 1), (2, 0, 1)]);
        assert_eq!(g.parents(1), vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn multigraph_rules() {
        let mut g = CausalGraph::new(2);
        g.add_edge(edge(0, 1, 1)).unwrap();
        g.add_edge(edge(0, 1, 2)).unwrap();
        assert_eq!(
            g.add_edge(edge(0, 1, 1)),
            Err(GraphError::DuplicateEdgeTriple { source_node: 0, sink: 1, lag: 1 })
        );
        assert!(matches!(g.add_edge(edge(0, 2, 1)), Err(GraphError::NodeOutOfRange { .. })));
        assert_eq!(g.add_edge(edge(1, 0, 0)), Err(GraphError::InvalidLag));
        let mut bad = edge(1, 0, 1);
        bad.p_value = 0.0;
        assert_eq!(g.add_edge(bad), Err(GraphError::InvalidPValue(0.0)));
        assert_eq!(g.edge_count(), 2);
    }
}
