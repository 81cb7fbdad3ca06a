//! Multi-threaded asynchronous local-moving.
//!
//! Workers share the label array and the per-community degree masses. Each
//! label slot is written only by the worker that owns the vertex's chunk;
//! masses are updated with atomic read-modify-write so no increment is lost.
//! Reads may be stale, which perturbs the trajectory but not the reported
//! modularity: aggregates and Q are recomputed from the final labels.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::{Barrier, Mutex};

use serde::{Deserialize, Serialize};

use crate::community::{community_aggregates, Assignment, Dendrogram};
use crate::error::{ConfigError, Result};
use crate::graph::Graph;
use crate::engine::{choose, run_passes, Config, MoveOutcome, NeighborScratch};
use crate::report::{Report, SweepKind, SweepRow};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParallelConfig {
    pub base: Config,
    pub threads: usize,
    /// Vertices per statically scheduled chunk.
    pub chunk_size: usize,
}

impl Default for ParallelConfig {
    fn default() -> Self {
        Self {
            base: Config::default(),
            threads: 12,
            chunk_size: 1024,
        }
    }
}

impl ParallelConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.base.validate()?;
        if self.threads < 1 {
            return Err(ConfigError::Cap("threads"));
        }
        if self.chunk_size < 1 {
            return Err(ConfigError::Cap("chunk_size"));
        }
        Ok(())
    }
}

/// `f64` stored as bits in an `AtomicU64`.
struct AtomicF64(AtomicU64);

impl AtomicF64 {
    fn new(v: f64) -> Self {
        Self(AtomicU64::new(v.to_bits()))
    }

    #[inline]
    fn load(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }

    /// Adds `delta` atomically and returns the previous value.
    #[inline]
    fn fetch_add(&self, delta: f64) -> f64 {
        let prev = self
            .0
            .fetch_update(Ordering::AcqRel, Ordering::Relaxed, |bits| {
                Some((f64::from_bits(bits) + delta).to_bits())
            })
            .expect("update closure never declines");
        f64::from_bits(prev)
    }
}

struct Control {
    iterations: usize,
    gain: f64,
    moves: usize,
    conflicts: Vec<u64>,
    cap_hit: bool,
}

/// Asynchronous local-moving over `cfg.threads` workers.
///
/// Vertex ids are cut into chunks of `cfg.chunk_size`; chunk `i` belongs to
/// worker `i % threads` for the whole phase, and each worker sweeps its
/// chunks in ascending id order with a private scratch table. Iterations end
/// at a barrier where the per-worker gains are summed in worker order.
/// With one worker the arithmetic matches the sequential engine exactly.
pub fn parallel_local_moving(g: &Graph, a: &mut Assignment, tolerance: f64, cfg: &ParallelConfig) -> MoveOutcome {
    let n = g.n();
    let threads = cfg.threads.max(1);
    let chunk = cfg.chunk_size.max(1);
    let max_iterations = cfg.base.max_iterations_per_pass;
    let m = g.total() / 2.0;

    let labels: Vec<AtomicUsize> = a.labels().iter().map(|&c| AtomicUsize::new(c)).collect();
    let tot: Vec<AtomicF64> = community_aggregates(g, a)
        .sigma_tot
        .into_iter()
        .map(AtomicF64::new)
        .collect();

    let chunk_count = n.div_ceil(chunk);
    let owned: Vec<Vec<std::ops::Range<usize>>> = (0..threads)
        .map(|t| {
            (t..chunk_count)
                .step_by(threads)
                .map(|i| i * chunk..((i + 1) * chunk).min(n))
                .collect()
        })
        .collect();

    let gains: Vec<AtomicF64> = (0..threads).map(|_| AtomicF64::new(0.0)).collect();
    let moves: Vec<AtomicUsize> = (0..threads).map(|_| AtomicUsize::new(0)).collect();
    let conflicts: Vec<AtomicUsize> = (0..threads).map(|_| AtomicUsize::new(0)).collect();
    let stop = AtomicBool::new(false);
    let barrier = Barrier::new(threads);
    let control = Mutex::new(Control {
        iterations: 0,
        gain: 0.0,
        moves: 0,
        conflicts: Vec::new(),
        cap_hit: false,
    });

    std::thread::scope(|s| {
        for (t, ranges) in owned.iter().enumerate() {
            let (labels, tot, gains, moves, conflicts) = (&labels, &tot, &gains, &moves, &conflicts);
            let (stop, barrier, control) = (&stop, &barrier, &control);
            s.spawn(move || {
                let mut scratch = NeighborScratch::new(n);
                loop {
                    let mut gain = 0.0;
                    let mut moved = 0;
                    let mut clashes = 0;
                    for range in ranges {
                        for u in range.clone() {
                            let from = labels[u].load(Ordering::Relaxed);
                            scratch.scan(g, u, from, |v| labels[v].load(Ordering::Relaxed));
                            let k_u = g.degree(u);
                            let tot_from = tot[from].load();
                            let c = choose(&scratch, |c| tot[c].load(), k_u, from, tot_from, m);
                            if c.to != from {
                                let seen_from = tot[from].fetch_add(-k_u);
                                let seen_to = tot[c.to].fetch_add(k_u);
                                if seen_from != tot_from || seen_to != c.tot_to {
                                    clashes += 1;
                                }
                                labels[u].store(c.to, Ordering::Relaxed);
                                gain += c.gain;
                                moved += 1;
                            }
                        }
                    }
                    gains[t].0.store(gain.to_bits(), Ordering::Relaxed);
                    moves[t].store(moved, Ordering::Relaxed);
                    conflicts[t].store(clashes, Ordering::Relaxed);

                    if barrier.wait().is_leader() {
                        let mut ctl = control.lock().expect("control lock poisoned");
                        let mut total = 0.0;
                        for g in gains.iter() {
                            total += g.load();
                        }
                        ctl.iterations += 1;
                        ctl.gain += total;
                        ctl.moves += moves.iter().map(|m| m.load(Ordering::Relaxed)).sum::<usize>();
                        ctl.conflicts
                            .push(conflicts.iter().map(|c| c.load(Ordering::Relaxed) as u64).sum());
                        let done = !(total > tolerance);
                        if !done && ctl.iterations >= max_iterations {
                            ctl.cap_hit = true;
                        }
                        stop.store(done || ctl.cap_hit, Ordering::Release);
                    }
                    barrier.wait();
                    if stop.load(Ordering::Acquire) {
                        break;
                    }
                }
            });
        }
    });

    let final_labels: Vec<usize> = labels.into_iter().map(AtomicUsize::into_inner).collect();
    let exact = community_aggregates(g, &Assignment::from_labels(final_labels.clone()));
    let drift = tot
        .iter()
        .zip(&exact.sigma_tot)
        .map(|(inc, &ex)| (inc.load() - ex).abs())
        .fold(0.0, f64::max);
    a.labels_mut().copy_from_slice(&final_labels);

    let ctl = control.into_inner().expect("control lock poisoned");
    MoveOutcome {
        iterations: ctl.iterations,
        gain: ctl.gain,
        moves: ctl.moves,
        cap_hit: ctl.cap_hit,
        conflicts: ctl.conflicts,
        aggregate_drift: drift,
    }
}

/// Louvain with the multi-threaded local-moving phase; aggregation stays
/// sequential. `cfg.base.mode` is ignored: the parallel engine is always
/// asynchronous.
pub fn parallel_louvain(g: &Graph, cfg: &ParallelConfig) -> Result<(Dendrogram, Report)> {
    cfg.validate()?;
    run_passes(g, &cfg.base, "parallel", cfg.threads, |lg, a, tol| {
        parallel_local_moving(lg, a, tol, cfg)
    })
}

/// One [`parallel_louvain`] run per thread count, in list order.
pub fn sweep_threads(g: &Graph, thread_list: &[usize], cfg: &ParallelConfig) -> Result<Vec<SweepRow>> {
    thread_list
        .iter()
        .map(|&threads| {
            let cell = ParallelConfig { threads, ..*cfg };
            let (_, report) = parallel_louvain(g, &cell)?;
            Ok(SweepRow::from_report(SweepKind::Threads, &cell.base, &report))
        })
        .collect()
}
