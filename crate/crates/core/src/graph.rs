//! Undirected weighted graphs in compressed sparse row form.
//!
//! Every undirected edge `{u, v}` with `u != v` is stored as the two arcs
//! `(u, v, w)` and `(v, u, w)`. A self-loop is stored as a single arc whose
//! weight counts once towards the vertex degree.

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Raw weighted edges, prior to preprocessing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EdgeList {
    /// Declared vertex count; ids live in `[0, n)`.
    pub n: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl EdgeList {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, u: usize, v: usize, w: f64) {
        self.entries.push((u, v, w));
    }
}

/// Preprocessing applied by [`build_graph`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Add the reverse of every non-loop edge.
    pub symmetrize: bool,
    /// Give every vertex without a self-loop one of weight `default_weight`.
    pub add_self_loops: bool,
    pub default_weight: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            symmetrize: true,
            add_self_loops: false,
            default_weight: 1.0,
        }
    }
}

/// Immutable CSR graph. Rows are sorted by target and contain no duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    self_loops: Vec<f64>,
    total: f64,
}

impl Graph {
    /// Assembles a graph from raw CSR arrays, recomputing degrees and total.
    /// Rows must be sorted by target without duplicates and the arc set
    /// symmetric; callers check with [`Graph::check_invariants`] if unsure.
    pub(crate) fn from_csr(offsets: Vec<usize>, targets: Vec<usize>, weights: Vec<f64>) -> Self {
        let n = offsets.len() - 1;
        let mut degrees = vec![0.0; n];
        let mut self_loops = vec![0.0; n];
        for u in 0..n {
            let mut k = 0.0;
            for i in offsets[u]..offsets[u + 1] {
                k += weights[i];
                if targets[i] == u {
                    self_loops[u] = weights[i];
                }
            }
            degrees[u] = k;
        }
        let total = degrees.iter().sum();
        Self {
            offsets,
            targets,
            weights,
            degrees,
            self_loops,
            total,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Weighted degree `K_u`.
    #[inline]
    pub fn degree(&self, u: usize) -> f64 {
        self.degrees[u]
    }

    /// Weight of the self-loop arc at `u`, or zero.
    #[inline]
    pub fn self_loop(&self, u: usize) -> f64 {
        self.self_loops[u]
    }

    /// `2m`, the sum of all weighted degrees.
    #[inline]
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    /// Outgoing arcs of `u` as `(target, weight)`, sorted by target.
    #[inline]
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[u]..self.offsets[u + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    /// Arcs as `(source, target, weight)` in storage order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n()).flat_map(move |u| self.neighbors(u).map(move |(v, w)| (u, v, w)))
    }

    /// Verifies the structural invariants listed on the type.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.n();
        if self.offsets.len() != n + 1 || self.offsets[0] != 0 {
            return Err("bad offsets length".into());
        }
        if self.offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err("offsets decrease".into());
        }
        if self.offsets[n] != self.targets.len() || self.targets.len() != self.weights.len() {
            return Err("offsets/targets/weights disagree".into());
        }
        for u in 0..n {
            let row = &self.targets[self.offsets[u]..self.offsets[u + 1]];
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("row {u} not strictly sorted"));
            }
            for (v, w) in self.neighbors(u) {
                if v >= n {
                    return Err(format!("arc ({u}, {v}) leaves the graph"));
                }
                if !(w.is_finite() && w > 0.0) {
                    return Err(format!("arc ({u}, {v}) has weight {w}"));
                }
                if self.arc_weight(v, u) != Some(w) {
                    return Err(format!("arc ({u}, {v}) has no matching reverse"));
                }
            }
        }
        Ok(())
    }

    /// Weight of arc `(u, v)` if present.
    pub fn arc_weight(&self, u: usize, v: usize) -> Option<f64> {
        let row = self.offsets[u]..self.offsets[u + 1];
        self.targets[row.clone()]
            .binary_search(&v)
            .ok()
            .map(|i| self.weights[row.start + i])
    }
}

/// Builds a CSR graph from raw edges, applying the requested preprocessing.
///
/// Parallel arcs between the same ordered pair are merged by summing their
/// weights. Existing self-loops are kept; with `add_self_loops`, vertices that
/// lack one receive a loop of `default_weight`.
pub fn build_graph(edges: &EdgeList, opts: BuildOptions) -> Result<Graph, GraphError> {
    let n = edges.n;
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut arcs: Vec<(usize, usize, f64)> = Vec::with_capacity(edges.entries.len() * 2 + n);
    for &(u, v, w) in &edges.entries {
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::VertexOutOfRange { vertex: x, n });
            }
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(GraphError::InvalidWeight { u, v, weight: w });
        }
        arcs.push((u, v, w));
        if opts.symmetrize && u != v {
            arcs.push((v, u, w));
        }
    }
    if opts.add_self_loops {
        let w = opts.default_weight;
        if !(w.is_finite() && w > 0.0) {
            return Err(GraphError::InvalidWeight { u: 0, v: 0, weight: w });
        }
        let mut has_loop = vec![false; n];
        for &(u, v, _) in &arcs {
            if u == v {
                has_loop[u] = true;
            }
        }
        arcs.extend((0..n).filter(|&u| !has_loop[u]).map(|u| (u, u, w)));
    }
    // Stable sort keeps input order among parallel arcs, so merged sums are
    // reproducible for a given edge list.
    arcs.sort_by_key(|&(u, v, _)| (u, v));

    let mut offsets = vec![0usize; n + 1];
    let mut targets = Vec::with_capacity(arcs.len());
    let mut weights: Vec<f64> = Vec::with_capacity(arcs.len());
    let mut last: Option<(usize, usize)> = None;
    for (u, v, w) in arcs {
        if last == Some((u, v)) {
            *weights.last_mut().expect("merged arc follows a pushed arc") += w;
        } else {
            targets.push(v);
            weights.push(w);
            offsets[u + 1] += 1;
            last = Some((u, v));
        }
    }
    for u in 0..n {
        offsets[u + 1] += offsets[u];
    }
    let g = Graph::from_csr(offsets, targets, weights);
    if !opts.symmetrize {
        // Without symmetrization the caller promises a symmetric input.
        g.check_invariants().map_err(GraphError::Malformed)?;
    }
    Ok(g)
}

/// Size summary in the style of a dataset table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub vertices: usize,
    /// Stored arcs: each undirected edge twice, each self-loop once.
    pub undirected_edges: usize,
    pub avg_degree: f64,
}

pub fn graph_stats(g: &Graph) -> GraphStats {
    let vertices = g.n();
    let undirected_edges = g.arc_count();
    GraphStats {
        vertices,
        undirected_edges,
        avg_degree: undirected_edges as f64 / vertices as f64,
    }
}

impl std::fmt::Display for GraphStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "|V|={} |E|={} Davg={:.2}",
            self.vertices, self.undirected_edges, self.avg_degree
        )
    }
}
