//! Sequential Louvain: local-moving (asynchronous or synchronous),
//! aggregation into super-vertex graphs, and the pass loop with threshold
//! scaling.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::community::{community_aggregates, modularity, move_gain, Aggregates, Assignment, Dendrogram};
use crate::error::{ConfigError, GraphError, Result};
use crate::graph::Graph;
use crate::report::{PassRecord, Report, SweepKind, SweepRow};

/// Threshold scaling never lowers the tolerance below this.
pub const TOLERANCE_FLOOR: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Moves take effect immediately (Gauss–Seidel style).
    #[default]
    Async,
    /// Moves are decided against the iteration-start state and applied
    /// together (Jacobi style).
    Sync,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Async => "async",
            Mode::Sync => "sync",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Local-moving stops once an iteration gains no more than this.
    pub tolerance_initial: f64,
    /// The tolerance is divided by this after every pass.
    pub tolerance_decline_factor: f64,
    /// The pass loop stops once a pass gains no more than this.
    pub pass_tolerance: f64,
    pub max_passes: usize,
    pub max_iterations_per_pass: usize,
    pub mode: Mode,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tolerance_initial: 0.01,
            tolerance_decline_factor: 10.0,
            pass_tolerance: 0.0,
            max_passes: 20,
            max_iterations_per_pass: 500,
            mode: Mode::Async,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tolerance_initial > 0.0) {
            return Err(ConfigError::Tolerance);
        }
        if !(self.tolerance_decline_factor >= 1.0) {
            return Err(ConfigError::DeclineFactor);
        }
        if !(self.pass_tolerance >= 0.0) {
            return Err(ConfigError::PassTolerance);
        }
        if self.max_passes < 1 {
            return Err(ConfigError::Cap("max_passes"));
        }
        if self.max_iterations_per_pass < 1 {
            return Err(ConfigError::Cap("max_iterations_per_pass"));
        }
        Ok(())
    }
}

/// Per-worker scratch table mapping neighbor communities to the weight of
/// the arcs reaching them. Dense storage with a touched-key list so that
/// clearing costs O(degree).
#[derive(Debug, Clone)]
pub struct NeighborScratch {
    weight: Vec<f64>,
    present: Vec<bool>,
    keys: Vec<usize>,
}

impl NeighborScratch {
    pub fn new(communities: usize) -> Self {
        Self {
            weight: vec![0.0; communities],
            present: vec![false; communities],
            keys: Vec::new(),
        }
    }

    fn clear(&mut self) {
        for &c in &self.keys {
            self.weight[c] = 0.0;
            self.present[c] = false;
        }
        self.keys.clear();
    }

    #[inline]
    fn add(&mut self, c: usize, w: f64) {
        if !self.present[c] {
            self.present[c] = true;
            self.keys.push(c);
        }
        self.weight[c] += w;
    }

    /// Fills the table for `u`, whose community is `own`, reading neighbor
    /// labels through `label`. Self-loops are skipped; `own` is always present.
    #[inline]
    pub fn scan(&mut self, g: &Graph, u: usize, own: usize, label: impl Fn(usize) -> usize) {
        self.clear();
        self.add(own, 0.0);
        for (v, w) in g.neighbors(u) {
            if v != u {
                self.add(label(v), w);
            }
        }
    }

    /// Weight into community `c`, zero if absent.
    #[inline]
    pub fn get(&self, c: usize) -> f64 {
        if self.present[c] {
            self.weight[c]
        } else {
            0.0
        }
    }

    /// Communities seen by the last scan, in first-seen order.
    pub fn communities(&self) -> &[usize] {
        &self.keys
    }

    pub fn to_map(&self) -> BTreeMap<usize, f64> {
        self.keys.iter().map(|&c| (c, self.weight[c])).collect()
    }
}

/// Neighbor-community weights of `u` under `a`, as an ordered map.
pub fn scan_neighbor_communities(g: &Graph, a: &Assignment, u: usize) -> BTreeMap<usize, f64> {
    let mut s = NeighborScratch::new(g.n());
    s.scan(g, u, a.get(u), |v| a.get(v));
    s.to_map()
}

/// Outcome of evaluating every candidate community of one vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Choice {
    pub to: usize,
    pub gain: f64,
    /// Degree mass of `to` as read during evaluation.
    pub tot_to: f64,
}

/// Picks the community with the largest positive ΔQ, breaking exact ties
/// by lowest id. Returns `from` with zero gain when nothing improves.
#[inline]
pub(crate) fn choose(
    scan: &NeighborScratch,
    tot: impl Fn(usize) -> f64,
    k_u: f64,
    from: usize,
    tot_from: f64,
    m: f64,
) -> Choice {
    let k_from = scan.get(from);
    let mut best = Choice {
        to: from,
        gain: 0.0,
        tot_to: tot_from,
    };
    for &c in scan.communities() {
        if c == from {
            continue;
        }
        let tot_c = tot(c);
        let dq = move_gain(scan.get(c), k_from, k_u, tot_c, tot_from, m);
        if dq > best.gain || (dq == best.gain && dq > 0.0 && c < best.to) {
            best = Choice {
                to: c,
                gain: dq,
                tot_to: tot_c,
            };
        }
    }
    best
}

/// Best destination for a vertex of degree `k_u` currently in `from`.
pub fn best_move(scan: &NeighborScratch, agg: &Aggregates, k_u: f64, from: usize, two_m: f64) -> (usize, f64) {
    let c = choose(
        scan,
        |c| agg.sigma_tot[c],
        k_u,
        from,
        agg.sigma_tot[from],
        two_m / 2.0,
    );
    (c.to, c.gain)
}

/// Result of one local-moving phase.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MoveOutcome {
    pub iterations: usize,
    /// Sum of decision-time ΔQ over all accepted moves.
    pub gain: f64,
    pub moves: usize,
    /// The iteration cap stopped the phase before the tolerance did.
    pub cap_hit: bool,
    /// Parallel engine only: per-iteration count of moves whose source or
    /// target mass changed between evaluation and write.
    pub conflicts: Vec<u64>,
    /// Parallel engine only: largest gap between the incrementally
    /// maintained community masses and a recomputation from the labels.
    pub aggregate_drift: f64,
}

/// Runs local-moving on `a` until an iteration gains no more than
/// `tolerance` or `max_iterations` is reached.
pub fn local_moving(g: &Graph, a: &mut Assignment, tolerance: f64, mode: Mode, max_iterations: usize) -> MoveOutcome {
    match mode {
        Mode::Async => local_moving_async(g, a, tolerance, max_iterations),
        Mode::Sync => local_moving_sync(g, a, tolerance, max_iterations),
    }
}

fn local_moving_async(g: &Graph, a: &mut Assignment, tolerance: f64, max_iterations: usize) -> MoveOutcome {
    let m = g.total() / 2.0;
    let mut agg = community_aggregates(g, a);
    let mut scratch = NeighborScratch::new(g.n());
    let mut out = MoveOutcome::default();
    let labels = a.labels_mut();
    loop {
        let mut gain = 0.0;
        for u in 0..g.n() {
            let from = labels[u];
            scratch.scan(g, u, from, |v| labels[v]);
            let k_u = g.degree(u);
            let c = choose(&scratch, |c| agg.sigma_tot[c], k_u, from, agg.sigma_tot[from], m);
            if c.to != from {
                agg.apply_move(from, c.to, k_u, g.self_loop(u), scratch.get(from), scratch.get(c.to));
                labels[u] = c.to;
                gain += c.gain;
                out.moves += 1;
            }
        }
        out.iterations += 1;
        out.gain += gain;
        if !(gain > tolerance) {
            break;
        }
        if out.iterations >= max_iterations {
            out.cap_hit = true;
            break;
        }
    }
    out
}

fn local_moving_sync(g: &Graph, a: &mut Assignment, tolerance: f64, max_iterations: usize) -> MoveOutcome {
    let m = g.total() / 2.0;
    let mut scratch = NeighborScratch::new(g.n());
    let mut out = MoveOutcome::default();
    let mut decisions: Vec<(usize, usize)> = Vec::new();
    loop {
        let agg = community_aggregates(g, a);
        let snapshot = a.labels();
        let mut gain = 0.0;
        decisions.clear();
        for u in 0..g.n() {
            let from = snapshot[u];
            scratch.scan(g, u, from, |v| snapshot[v]);
            let c = choose(&scratch, |c| agg.sigma_tot[c], g.degree(u), from, agg.sigma_tot[from], m);
            // Two singletons choosing each other would swap labels forever;
            // only the move towards the lower label is allowed.
            let swap = agg.sizes[from] == 1 && agg.sizes[c.to] == 1 && c.to > from;
            if c.to != from && !swap {
                decisions.push((u, c.to));
                gain += c.gain;
            }
        }
        let labels = a.labels_mut();
        for &(u, to) in &decisions {
            labels[u] = to;
        }
        out.moves += decisions.len();
        out.iterations += 1;
        out.gain += gain;
        if !(gain > tolerance) {
            break;
        }
        if out.iterations >= max_iterations {
            out.cap_hit = true;
            break;
        }
    }
    out
}

/// Collapses every community of `a` into one super-vertex. Inter-community
/// arcs are merged by summing weights and each community's internal weight
/// becomes its self-loop. Returns the super-vertex graph and the normalized
/// assignment, which maps vertices of `g` to vertices of the result.
pub fn aggregate(g: &Graph, a: &Assignment) -> (Graph, Assignment) {
    let (mapping, count) = a.normalize();
    let labels = mapping.labels();

    // Members of each community, in vertex order.
    let mut start = vec![0usize; count + 1];
    for &c in labels {
        start[c + 1] += 1;
    }
    for c in 0..count {
        start[c + 1] += start[c];
    }
    let mut members = vec![0usize; g.n()];
    let mut fill = start.clone();
    for (u, &c) in labels.iter().enumerate() {
        members[fill[c]] = u;
        fill[c] += 1;
    }

    let mut scratch = NeighborScratch::new(count);
    let mut offsets = Vec::with_capacity(count + 1);
    let mut targets = Vec::new();
    let mut weights = Vec::new();
    offsets.push(0);
    for c in 0..count {
        scratch.clear();
        for &u in &members[start[c]..start[c + 1]] {
            for (v, w) in g.neighbors(u) {
                scratch.add(labels[v], w);
            }
        }
        let mut row: Vec<usize> = scratch.communities().to_vec();
        row.sort_unstable();
        for d in row {
            targets.push(d);
            weights.push(scratch.get(d));
        }
        offsets.push(targets.len());
    }
    // Row sums for (c, d) and (d, c) run in different orders; copy the upper
    // triangle down so the result is exactly symmetric.
    for c in 0..count {
        for i in offsets[c]..offsets[c + 1] {
            let d = targets[i];
            if d < c {
                let j = offsets[d] + targets[offsets[d]..offsets[d + 1]].binary_search(&c).expect("symmetric input");
                weights[i] = weights[j];
            }
        }
    }
    (Graph::from_csr(offsets, targets, weights), mapping)
}

/// Shared pass loop. `mover` runs one local-moving phase on the level graph.
pub(crate) fn run_passes<F>(
    g: &Graph,
    cfg: &Config,
    engine: &str,
    threads: usize,
    mut mover: F,
) -> Result<(Dendrogram, Report)>
where
    F: FnMut(&Graph, &mut Assignment, f64) -> MoveOutcome,
{
    cfg.validate()?;
    if !(g.total() > 0.0) {
        return Err(GraphError::ZeroTotal.into());
    }
    let wall = Instant::now();
    let mut level: Cow<'_, Graph> = Cow::Borrowed(g);
    let mut tolerance = cfg.tolerance_initial;
    let mut q_prev = modularity(g, &Assignment::singleton(g.n()))?;
    let mut dendrogram = Dendrogram::default();
    let mut report = Report {
        engine: engine.to_string(),
        threads,
        ..Default::default()
    };

    for pass in 0..cfg.max_passes {
        let n_level = level.n();
        let mut a = Assignment::singleton(n_level);
        let t = Instant::now();
        let out = mover(&level, &mut a, tolerance);
        let local_ms = t.elapsed().as_secs_f64() * 1e3;

        let (mapping, communities) = a.normalize();
        let q = modularity(&level, &mapping)?;
        let moved = out.moves > 0;
        // A level that lowers Q (possible with simultaneous moves) is dropped.
        let kept = dendrogram.levels.is_empty() || (moved && q >= q_prev);
        if kept {
            dendrogram.levels.push(mapping.clone());
            dendrogram.per_level_q.push(q);
        }
        let stop = !kept || !moved || communities >= n_level || q - q_prev <= cfg.pass_tolerance;

        let mut agg_ms = 0.0;
        if !stop {
            let t = Instant::now();
            level = Cow::Owned(aggregate(&level, &mapping).0);
            agg_ms = t.elapsed().as_secs_f64() * 1e3;
        }
        report.passes.push(PassRecord {
            pass,
            iterations: out.iterations,
            q,
            local_ms,
            agg_ms,
            vertices: n_level,
            communities,
            gain: out.gain,
            moves: out.moves,
            tolerance,
            iteration_cap_hit: out.cap_hit,
            kept,
            conflicts: out.conflicts,
            aggregate_drift: out.aggregate_drift,
            level_total: level.total(),
        });
        if stop {
            break;
        }
        if pass + 1 == cfg.max_passes {
            report.pass_cap_hit = true;
        }
        tolerance = (tolerance / cfg.tolerance_decline_factor).max(TOLERANCE_FLOOR);
        q_prev = q;
    }

    let flat = dendrogram.flatten()?;
    report.final_q = modularity(g, &flat)?;
    report.communities = flat.community_count();
    report.total_passes = report.passes.len();
    report.total_iterations = report.passes.iter().map(|p| p.iterations).sum();
    report.wall_ms = wall.elapsed().as_secs_f64() * 1e3;
    Ok((dendrogram, report))
}

/// Sequential Louvain in the configured mode.
pub fn louvain(g: &Graph, cfg: &Config) -> Result<(Dendrogram, Report)> {
    let mode = cfg.mode;
    let max_it = cfg.max_iterations_per_pass;
    run_passes(g, cfg, &mode.to_string(), 1, |lg, a, tol| {
        local_moving(lg, a, tol, mode, max_it)
    })
}

/// Grid of initial tolerances and decline factors.
#[derive(Debug, Clone, PartialEq)]
pub struct ToleranceGrid {
    pub initial: Vec<f64>,
    pub decline: Vec<f64>,
}

impl Default for ToleranceGrid {
    /// Initial tolerance 1, 0.1, …, 1e-12 against decline 10, 100, 1000, 10000.
    fn default() -> Self {
        Self {
            initial: (0..=12).map(|e| 10f64.powi(-e)).collect(),
            decline: (1..=4).map(|e| 10f64.powi(e)).collect(),
        }
    }
}

/// Runs [`louvain`] once per grid cell, initial tolerance outermost.
pub fn sweep_tolerance(g: &Graph, grid: &ToleranceGrid, cfg: &Config) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(grid.initial.len() * grid.decline.len());
    for &initial in &grid.initial {
        for &decline in &grid.decline {
            let cell = Config {
                tolerance_initial: initial,
                tolerance_decline_factor: decline,
                ..*cfg
            };
            let (_, report) = louvain(g, &cell)?;
            rows.push(SweepRow::from_report(SweepKind::Tolerance, &cell, &report));
        }
    }
    Ok(rows)
}
