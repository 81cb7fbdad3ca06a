//! Static Louvain community detection.
//!
//! The crate provides a CSR graph type with the usual preprocessing
//! (symmetrization, self-loop insertion), exact and brute-force modularity,
//! closed-form move gains, a sequential Louvain engine with asynchronous and
//! synchronous local-moving plus threshold scaling, a multi-threaded
//! asynchronous engine, and report/sweep tables.
//!
//! ```
//! use louvain::{fixtures, louvain, Config};
//!
//! let g = fixtures::two_triangles();
//! let (dendrogram, report) = louvain(&g, &Config::default()).unwrap();
//! assert!((report.final_q - 0.5).abs() < 1e-9);
//! assert_eq!(dendrogram.flatten().unwrap().community_count(), 2);
//! ```

pub mod community;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod engine;
pub mod parallel;
pub mod report;

pub use community::{
    community_aggregates, delta_modularity, flatten, modularity, modularity_bruteforce, normalize,
    parse_membership, singleton_assignment, write_membership, Aggregates, Assignment, Dendrogram,
};
pub use error::{ConfigError, Error, GraphError, ParseError, Result};
pub use graph::{build_graph, graph_stats, BuildOptions, EdgeList, Graph, GraphStats};
pub use io::{parse_edge_list, parse_matrix_market, write_edge_list, write_matrix_market};
pub use engine::{
    aggregate, best_move, local_moving, louvain, scan_neighbor_communities, sweep_tolerance, Config, Mode,
    MoveOutcome, NeighborScratch, ToleranceGrid,
};
pub use parallel::{parallel_local_moving, parallel_louvain, sweep_threads, ParallelConfig};
pub use report::{PassRecord, PassRow, Report, SweepKind, SweepRow};
