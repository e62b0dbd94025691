//! Oriented metric graphs and their discrete operators.
//!
//! An edge `e` runs from `tail` to `head` and carries a length `L_e` and a
//! conductivity `k_e`. Its conductance is `c_e = k_e / L_e`. With the
//! edge-by-node incidence matrix `B` (−1 at the tail, +1 at the head) and
//! `C = diag(c)`, the weighted Laplacian is `L = BᵀCB`.

use std::collections::VecDeque;

use crate::error::{AssemblyError, NetworkError};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Node {
    pub position: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub length: f64,
    pub conductivity: f64,
    /// Cross-sectional area; `None` means "same as the conductivity".
    pub area: Option<f64>,
}

impl Edge {
    pub fn new(tail: usize, head: usize, length: f64, conductivity: f64) -> Self {
        Self { tail, head, length, conductivity, area: None }
    }

    pub fn with_area(mut self, area: f64) -> Self {
        self.area = Some(area);
        self
    }

    pub fn conductance(&self) -> f64 {
        self.conductivity / self.length
    }

    pub fn area(&self) -> f64 {
        self.area.unwrap_or(self.conductivity)
    }
}

/// A validated oriented metric graph with dense node and edge indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

impl Network {
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, NetworkError> {
        let n = nodes.len();
        for (id, e) in edges.iter().enumerate() {
            for node in [e.tail, e.head] {
                if node >= n {
                    return Err(NetworkError::DanglingNode { edge: id, node, n_nodes: n });
                }
            }
            if e.tail == e.head {
                return Err(NetworkError::SelfLoop { edge: id, node: e.tail });
            }
            if !(e.length > 0.0 && e.length.is_finite()) {
                return Err(NetworkError::NonPositiveLength { edge: id, value: e.length });
            }
            if !(e.conductivity > 0.0 && e.conductivity.is_finite()) {
                return Err(NetworkError::NonPositiveConductivity { edge: id, value: e.conductivity });
            }
            if let Some(a) = e.area {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(NetworkError::NonPositiveArea { edge: id, value: a });
                }
            }
        }
        Ok(Self { nodes, edges })
    }

    /// Network with `n` unplaced nodes.
    pub fn unplaced(n: usize, edges: Vec<Edge>) -> Result<Self, NetworkError> {
        Self::new(vec![Node::default(); n], edges)
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Number of incident edges (parallel edges counted separately).
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for e in &self.edges {
            deg[e.tail] += 1;
            deg[e.head] += 1;
        }
        deg
    }

    pub fn conductivities(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.conductivity).collect()
    }

    pub fn has_positions(&self) -> bool {
        !self.nodes.is_empty() && self.nodes.iter().all(|n| n.position.is_some())
    }
}

/// Edge-by-node incidence matrix: row `e` has −1 at `tail(e)` and +1 at `head(e)`.
pub fn build_incidence(net: &Network) -> SparseMatrix {
    let triplets = net
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(i, e)| [(i, e.tail, -1.0), (i, e.head, 1.0)])
        .collect();
    SparseMatrix::from_triplets(net.n_edges(), net.n_nodes(), triplets)
        .expect("network invariants keep indices in range")
}

/// Diagonal edge conductance matrix `C = diag(k_e / L_e)`.
pub fn build_conductance(net: &Network) -> SparseMatrix {
    let c: Vec<f64> = net.edges().iter().map(Edge::conductance).collect();
    SparseMatrix::diagonal(&c)
}

/// Weighted graph Laplacian `L = BᵀCB`.
pub fn build_laplacian(
    incidence: &SparseMatrix,
    conductance: &SparseMatrix,
) -> Result<SparseMatrix, AssemblyError> {
    if !conductance.is_diagonal() {
        return Err(AssemblyError::NotDiagonal);
    }
    if conductance.rows() != incidence.rows() {
        return Err(AssemblyError::DimensionMismatch {
            context: "laplacian assembly",
            expected: incidence.rows(),
            found: conductance.rows(),
        });
    }
    let cb = conductance.mul(incidence)?;
    incidence.transpose().mul(&cb)
}

/// Connected components of the underlying undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    labels: Vec<usize>,
    count: usize,
}

impl ComponentLabeling {
    pub fn label(&self, node: usize) -> usize {
        self.labels[node]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Node lists per component, each in ascending node order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &l) in self.labels.iter().enumerate() {
            out[l].push(v);
        }
        out
    }
}

/// Labels components by breadth-first search in node-id order, so component
/// `0` contains node 0 and labels increase with each component's smallest node.
pub fn connected_components(net: &Network) -> ComponentLabeling {
    let n = net.n_nodes();
    let mut adjacency = vec![Vec::new(); n];
    for e in net.edges() {
        adjacency[e.tail].push(e.head);
        adjacency[e.head].push(e.tail);
    }
    let mut labels = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if labels[start] != usize::MAX {
            continue;
        }
        labels[start] = count;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if labels[w] == usize::MAX {
                    labels[w] = count;
                    queue.push_back(w);
                }
            }
        }
        count += 1;
    }
    ComponentLabeling { labels, count }
}
