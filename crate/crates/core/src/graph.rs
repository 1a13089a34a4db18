//! Undirected simple graphs, generators, components, Laplacians.
//!
//! Graphs are stored as a node count plus a canonically sorted edge list
//! with every edge held once as `(u, v)` with `u < v`. The Laplacian is the
//! dense matrix `L = D - A` (degrees on the diagonal, -1 off-diagonal per
//! edge); it is symmetric positive semidefinite with zero row sums, and the
//! multiplicity of its zero eigenvalue equals the number of connected
//! components.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};

/// Undirected simple graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Sorted, deduplicated, each as (u, v) with u < v.
    edges: Vec<(usize, usize)>,
}

/// Graph families used throughout: the random family and the deterministic
/// families with closed-form Laplacian spectra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphKind {
    ErdosRenyi { n: usize, p: f64 },
    Star { n: usize },
    Cycle { n: usize },
    /// d-dimensional grid with m nodes per axis (n = m^d), row-major node
    /// order, no wrap-around.
    Lattice { m: usize, d: usize },
    Complete { n: usize },
    Empty { n: usize },
}

impl GraphKind {
    pub fn node_count(&self) -> usize {
        match *self {
            GraphKind::ErdosRenyi { n, .. }
            | GraphKind::Star { n }
            | GraphKind::Cycle { n }
            | GraphKind::Complete { n }
            | GraphKind::Empty { n } => n,
            GraphKind::Lattice { m, d } => m.pow(d as u32),
        }
    }
}

impl Graph {
    /// Normalizing constructor: deduplicates, orders endpoints, rejects
    /// self-loops and out-of-range endpoints.
    pub fn build(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph must have at least one node".into()));
        }
        let mut canon = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) has endpoint outside 0..{n}"
                )));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        canon.dedup();
        Ok(Graph { n, edges: canon })
    }

    /// Generate a graph of the given family. Only Erdos-Renyi consumes the
    /// seed; deterministic families ignore it. Edges of `ER(n, p)` are drawn
    /// by one uniform per pair, iterating pairs in canonical `(u, v)` order,
    /// so output depends only on `(n, p, seed)`.
    pub fn generate(kind: GraphKind, seed: u64) -> Result<Graph> {
        match kind {
            GraphKind::ErdosRenyi { n, p } => {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "Erdos-Renyi probability must lie in (0, 1), got {p}"
                    )));
                }
                if n < 2 {
                    return Err(Error::InvalidParameter("Erdos-Renyi needs n >= 2".into()));
                }
                let mut rng = stream(seed, Purpose::GraphGen, 0, 0);
                let mut edges = Vec::new();
                for u in 0..n {
                    for v in (u + 1)..n {
                        if rng.random::<f64>() < p {
                            edges.push((u, v));
                        }
                    }
                }
                Ok(Graph { n, edges })
            }
            GraphKind::Star { n } => {
                if n < 2 {
                    return Err(Error::InvalidParameter("star needs n >= 2".into()));
                }
                Ok(Graph {
                    n,
                    edges: (1..n).map(|v| (0, v)).collect(),
                })
            }
            GraphKind::Cycle { n } => {
                if n < 3 {
                    return Err(Error::InvalidParameter("cycle needs n >= 3".into()));
                }
                let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|u| (u, u + 1)).collect();
                edges.push((0, n - 1));
                edges.sort_unstable();
                Ok(Graph { n, edges })
            }
            GraphKind::Lattice { m, d } => {
                if m < 2 || d < 1 {
                    return Err(Error::InvalidParameter("lattice needs m >= 2, d >= 1".into()));
                }
                let n = m.checked_pow(d as u32).ok_or_else(|| {
                    Error::InvalidParameter(format!("lattice size m^d overflows: m={m}, d={d}"))
                })?;
                // Node id = row-major rank of its coordinate vector; the
                // stride of axis a is m^(d-1-a), so the +1 neighbor along
                // axis a is id + stride.
                let mut edges = Vec::new();
                for id in 0..n {
                    let mut stride = n / m;
                    let mut rest = id;
                    for _ in 0..d {
                        let coord = rest / stride;
                        if coord + 1 < m {
                            edges.push((id, id + stride));
                        }
                        rest %= stride;
                        stride /= m.max(1);
                        if stride == 0 {
                            break;
                        }
                    }
                }
                edges.sort_unstable();
                Ok(Graph { n, edges })
            }
            GraphKind::Complete { n } => {
                if n < 2 {
                    return Err(Error::InvalidParameter("complete graph needs n >= 2".into()));
                }
                let mut edges = Vec::with_capacity(n * (n - 1) / 2);
                for u in 0..n {
                    for v in (u + 1)..n {
                        edges.push((u, v));
                    }
                }
                Ok(Graph { n, edges })
            }
            GraphKind::Empty { n } => {
                if n == 0 {
                    return Err(Error::InvalidParameter("empty graph needs n >= 1".into()));
                }
                Ok(Graph { n, edges: Vec::new() })
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Dense Laplacian `L = D - A`. Entries are small integers converted to
    /// float, so `trace(L) = 2 |E|` holds exactly.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::<f64>::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            l[(u, v)] = -1.0;
            l[(v, u)] = -1.0;
            l[(u, u)] += 1.0;
            l[(v, v)] += 1.0;
        }
        l
    }

    /// Connected components: `(count, labels)` with labels numbered by
    /// first appearance in node order, so the labeling is deterministic.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut labels = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = Vec::new();
        for start in 0..self.n {
            if labels[start] != usize::MAX {
                continue;
            }
            labels[start] = count;
            queue.push(start);
            while let Some(u) = queue.pop() {
                for &v in &adj[u] {
                    if labels[v] == usize::MAX {
                        labels[v] = count;
                        queue.push(v);
                    }
                }
            }
            count += 1;
        }
        (count, labels)
    }
}
