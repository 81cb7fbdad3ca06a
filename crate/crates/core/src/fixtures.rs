//! Deterministic synthetic graphs: clique chains, rings of cliques,
//! Erdős–Rényi graphs and planted partitions.
//!
//! Generators return raw [`EdgeList`]s with each undirected edge listed once;
//! pass them through [`build_graph`] with symmetrization on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{build_graph, BuildOptions, EdgeList, Graph};

/// `count` cliques of `k` vertices. The first `bridges` consecutive pairs of
/// cliques are joined by one edge from the last vertex of clique `i` to the
/// first vertex of clique `i + 1`.
pub fn cliques(k: usize, count: usize, bridges: usize) -> EdgeList {
    let mut e = EdgeList::new(k * count);
    for c in 0..count {
        push_clique(&mut e, c * k, k);
    }
    for i in 0..bridges.min(count.saturating_sub(1)) {
        e.push(i * k + k - 1, (i + 1) * k, 1.0);
    }
    e
}

/// `count` cliques of `k` vertices joined into a ring by single edges.
pub fn ring_of_cliques(k: usize, count: usize) -> EdgeList {
    let mut e = cliques(k, count, count.saturating_sub(1));
    if count > 2 {
        e.push((count - 1) * k + k - 1, 0, 1.0);
    }
    e
}

/// Erdős–Rényi `G(n, p)`.
pub fn random(n: usize, p: f64, seed: u64) -> EdgeList {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = EdgeList::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                e.push(u, v, 1.0);
            }
        }
    }
    e
}

/// `groups` blocks of `size` vertices; pairs inside a block are linked with
/// probability `p_in`, pairs across blocks with `p_out`.
pub fn planted_partition(groups: usize, size: usize, p_in: f64, p_out: f64, seed: u64) -> EdgeList {
    let n = groups * size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = EdgeList::new(n);
    for u in 0..n {
        for v in u + 1..n {
            let p = if u / size == v / size { p_in } else { p_out };
            if rng.random::<f64>() < p {
                e.push(u, v, 1.0);
            }
        }
    }
    e
}

fn push_clique(e: &mut EdgeList, start: usize, k: usize) {
    for u in start..start + k {
        for v in u + 1..start + k {
            e.push(u, v, 1.0);
        }
    }
}

/// Symmetrized graph without added self-loops.
pub fn graph(edges: &EdgeList) -> Graph {
    build_graph(edges, BuildOptions::default()).expect("fixture edges are valid")
}

pub fn single_edge() -> Graph {
    graph(&EdgeList {
        n: 2,
        entries: vec![(0, 1, 1.0)],
    })
}

pub fn two_triangles() -> Graph {
    graph(&cliques(3, 2, 0))
}

/// Two triangles `{0,1,2}` and `{3,4,5}` joined by the edge `(2, 3)`.
pub fn two_triangles_bridged() -> Graph {
    graph(&cliques(3, 2, 1))
}

/// Copy of `g` with a self-loop of weight `w` on every vertex lacking one.
pub fn with_self_loops(g: &Graph, w: f64) -> Graph {
    let edges = EdgeList {
        n: g.n(),
        entries: g.arcs().collect(),
    };
    let opts = BuildOptions {
        symmetrize: false,
        add_self_loops: true,
        default_weight: w,
    };
    build_graph(&edges, opts).expect("graph arcs are symmetric")
}
