//! Community assignments, modularity, and the per-community bookkeeping
//! behind constant-time move evaluation.
//!
//! Modularity follows the arc convention of [`Graph`]: with `2m` the graph
//! total, `IN_c` the summed weight of stored arcs with both ends in `c` (so a
//! non-loop edge counts twice and a self-loop once) and `TOT_c` the summed
//! degree of `c`'s members,
//!
//! ```text
//! Q = Σ_c [ IN_c / 2m − (TOT_c / 2m)² ]
//! ```

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use crate::error::{GraphError, ParseError};
use crate::graph::Graph;

/// Community label per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    labels: Vec<usize>,
}

impl Assignment {
    /// Every vertex in its own community.
    pub fn singleton(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
        }
    }

    pub fn from_labels(labels: Vec<usize>) -> Self {
        Self { labels }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn labels_mut(&mut self) -> &mut [usize] {
        &mut self.labels
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn get(&self, u: usize) -> usize {
        self.labels[u]
    }

    /// Checks length and that every label lies in `[0, bound)`.
    pub fn validate(&self, n: usize, bound: usize) -> Result<(), GraphError> {
        if self.labels.len() != n {
            return Err(GraphError::AssignmentLength {
                expected: n,
                got: self.labels.len(),
            });
        }
        match self.labels.iter().enumerate().find(|(_, &c)| c >= bound) {
            Some((vertex, &label)) => Err(GraphError::LabelOutOfRange {
                vertex,
                label,
                bound,
            }),
            None => Ok(()),
        }
    }

    /// Relabels communities to `[0, C)` in order of first occurrence.
    pub fn normalize(&self) -> (Assignment, usize) {
        let mut remap: HashMap<usize, usize> = HashMap::new();
        let labels = self
            .labels
            .iter()
            .map(|&c| {
                let next = remap.len();
                *remap.entry(c).or_insert(next)
            })
            .collect();
        (Assignment { labels }, remap.len())
    }

    /// Number of distinct labels.
    pub fn community_count(&self) -> usize {
        let mut seen: Vec<usize> = self.labels.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Whether both assignments induce the same partition of the vertices.
    pub fn same_partition(&self, other: &Assignment) -> bool {
        self.normalize().0 == other.normalize().0
    }
}

pub fn singleton_assignment(n: usize) -> Assignment {
    Assignment::singleton(n)
}

pub fn normalize(a: &Assignment) -> (Assignment, usize) {
    a.normalize()
}

/// Per-community degree mass, internal arc weight and member count.
/// Indexed by community id; ids without members hold zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregates {
    pub sigma_tot: Vec<f64>,
    pub sigma_in: Vec<f64>,
    pub sizes: Vec<usize>,
}

impl Aggregates {
    /// Modularity implied by these aggregates for a graph of total `two_m`.
    pub fn modularity(&self, two_m: f64) -> f64 {
        self.sigma_tot
            .iter()
            .zip(&self.sigma_in)
            .filter(|(&tot, _)| tot != 0.0)
            .map(|(&tot, &inn)| inn / two_m - (tot / two_m) * (tot / two_m))
            .sum()
    }

    /// Applies a move of `u` (degree `k_u`, self-loop `self_loop`) from
    /// `from` to `to`. `k_from` is the weight of `u`'s non-loop arcs into the
    /// other members of `from`, `k_target` likewise for `to`.
    pub fn apply_move(
        &mut self,
        from: usize,
        to: usize,
        k_u: f64,
        self_loop: f64,
        k_from: f64,
        k_target: f64,
    ) {
        if from == to {
            return;
        }
        self.sigma_tot[from] -= k_u;
        self.sigma_tot[to] += k_u;
        self.sigma_in[from] -= 2.0 * k_from + self_loop;
        self.sigma_in[to] += 2.0 * k_target + self_loop;
        self.sizes[from] -= 1;
        self.sizes[to] += 1;
    }
}

/// Recomputes aggregates from scratch in arc order.
///
/// Labels must lie in `[0, g.n())`.
pub fn community_aggregates(g: &Graph, a: &Assignment) -> Aggregates {
    let n = g.n();
    let mut agg = Aggregates {
        sigma_tot: vec![0.0; n],
        sigma_in: vec![0.0; n],
        sizes: vec![0; n],
    };
    for u in 0..n {
        let c = a.get(u);
        agg.sizes[c] += 1;
        agg.sigma_tot[c] += g.degree(u);
        for (v, w) in g.neighbors(u) {
            if a.get(v) == c {
                agg.sigma_in[c] += w;
            }
        }
    }
    agg
}

fn check_inputs(g: &Graph, a: &Assignment) -> Result<(), GraphError> {
    a.validate(g.n(), g.n())?;
    if g.total() <= 0.0 {
        return Err(GraphError::ZeroTotal);
    }
    Ok(())
}

/// Modularity of `a` on `g`, via [`community_aggregates`].
pub fn modularity(g: &Graph, a: &Assignment) -> Result<f64, GraphError> {
    check_inputs(g, a)?;
    Ok(community_aggregates(g, a).modularity(g.total()))
}

/// Modularity by a direct loop over communities and arcs, with no shared
/// bookkeeping. Quadratic; meant as a test oracle for small graphs.
pub fn modularity_bruteforce(g: &Graph, a: &Assignment) -> Result<f64, GraphError> {
    check_inputs(g, a)?;
    let labels = a.labels();
    let arcs: Vec<(usize, usize, f64)> = g.arcs().collect();
    let two_m: f64 = arcs.iter().map(|&(_, _, w)| w).sum();
    let mut communities: Vec<usize> = labels.to_vec();
    communities.sort_unstable();
    communities.dedup();
    let mut q = 0.0;
    for c in communities {
        let mut internal = 0.0;
        let mut mass = 0.0;
        for &(u, v, w) in &arcs {
            if labels[u] == c {
                mass += w;
                if labels[v] == c {
                    internal += w;
                }
            }
        }
        q += internal / two_m - (mass / two_m).powi(2);
    }
    Ok(q)
}

/// Modularity change from moving `u` out of `from` into `to`, in closed form.
///
/// `k_to[c]` is the weight of `u`'s non-loop arcs into community `c`
/// (missing entries read as zero), `agg` describes the assignment before the
/// move, and `from` must be `u`'s current community. `to` may be an empty
/// community.
pub fn delta_modularity(
    g: &Graph,
    agg: &Aggregates,
    u: usize,
    k_to: &BTreeMap<usize, f64>,
    from: usize,
    to: usize,
) -> f64 {
    if from == to {
        return 0.0;
    }
    let get = |c: usize| k_to.get(&c).copied().unwrap_or(0.0);
    move_gain(
        get(to),
        get(from),
        g.degree(u),
        agg.sigma_tot[to],
        agg.sigma_tot[from],
        g.total() / 2.0,
    )
}

/// Closed-form ΔQ shared by every engine.
///
/// `tot_from` is the degree mass of the source community *including* `u`.
#[inline]
pub(crate) fn move_gain(
    k_target: f64,
    k_from: f64,
    k_u: f64,
    tot_target: f64,
    tot_from: f64,
    m: f64,
) -> f64 {
    (k_target - k_from) / m - k_u * (tot_target - (tot_from - k_u)) / (2.0 * m * m)
}

/// Hierarchy of assignments, one per pass. `levels[k]` maps the vertices of
/// level `k` to the vertices (communities) of level `k + 1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dendrogram {
    pub levels: Vec<Assignment>,
    /// Modularity on the input graph after each level.
    pub per_level_q: Vec<f64>,
}

impl Dendrogram {
    /// Composes all levels into one assignment over the original vertices.
    pub fn flatten(&self) -> Result<Assignment, GraphError> {
        let first = self.levels.first().ok_or(GraphError::EmptyDendrogram)?;
        let mut labels = first.labels().to_vec();
        let mut width = bound_of(first);
        for (k, level) in self.levels.iter().enumerate().skip(1) {
            if level.len() != width {
                return Err(GraphError::InconsistentLevel {
                    level: k,
                    expected: width,
                    got: level.len(),
                });
            }
            for l in labels.iter_mut() {
                *l = level.get(*l);
            }
            width = bound_of(level);
        }
        Ok(Assignment::from_labels(labels))
    }
}

// One past the largest label; equals the community count for normalized levels.
fn bound_of(a: &Assignment) -> usize {
    a.labels().iter().max().map_or(0, |&m| m + 1)
}

pub fn flatten(d: &Dendrogram) -> Result<Assignment, GraphError> {
    d.flatten()
}

/// Writes `vertex_id community_id` lines sorted by vertex id.
pub fn write_membership<W: Write>(a: &Assignment, mut out: W) -> std::io::Result<()> {
    for (u, c) in a.labels().iter().enumerate() {
        writeln!(out, "{u} {c}")?;
    }
    out.flush()
}

/// Reads a membership file. Every vertex id in `[0, N)` must appear exactly
/// once, in any order.
pub fn parse_membership<R: BufRead>(reader: R) -> Result<Assignment, ParseError> {
    let mut pairs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let no = i + 1;
        let line = line.map_err(|e| ParseError::Entry {
            line: no,
            reason: e.to_string(),
        })?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let nums: Vec<Option<usize>> = t.split_whitespace().map(|s| s.parse().ok()).collect();
        match nums.as_slice() {
            [Some(u), Some(c)] => pairs.push((no, *u, *c)),
            _ => {
                return Err(ParseError::Entry {
                    line: no,
                    reason: "expected `vertex_id community_id`".into(),
                })
            }
        }
    }
    let n = pairs.len();
    let mut labels = vec![usize::MAX; n];
    for (no, u, c) in pairs {
        if u >= n || labels[u] != usize::MAX {
            return Err(ParseError::Entry {
                line: no,
                reason: format!("vertex {u} missing, repeated or out of range"),
            });
        }
        labels[u] = c;
    }
    Ok(Assignment::from_labels(labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const EPS: f64 = 1e-12;

    #[test]
    fn singleton_examples() {
        assert_eq!(singleton_assignment(3).labels(), &[0, 1, 2]);
        assert_eq!(singleton_assignment(1).labels(), &[0]);
        let g = fixtures::two_triangles_bridged();
        assert!(modularity(&g, &singleton_assignment(g.n())).unwrap() < 0.0);
    }

    #[test]
    fn two_disjoint_triangles() {
        let g = fixtures::two_triangles();
        let a = Assignment::from_labels(vec![0, 0, 0, 1, 1, 1]);
        assert!((modularity(&g, &a).unwrap() - 0.5).abs() < EPS);
        assert!((modularity_bruteforce(&g, &a).unwrap() - 0.5).abs() < EPS);
        let agg = community_aggregates(&g, &a);
        assert_eq!(&agg.sigma_tot[..2], &[6.0, 6.0]);
        assert_eq!(&agg.sigma_in[..2], &[6.0, 6.0]);
        assert_eq!(&agg.sizes[..2], &[3, 3]);
    }

    #[test]
    fn all_in_one_is_zero() {
        for g in [fixtures::two_triangles(), fixtures::two_triangles_bridged()] {
            let a = Assignment::from_labels(vec![0; g.n()]);
            assert!(modularity(&g, &a).unwrap().abs() < EPS);
            assert!(modularity_bruteforce(&g, &a).unwrap().abs() < EPS);
        }
    }

    #[test]
    fn single_edge_lower_bound() {
        let g = fixtures::single_edge();
        let q = modularity(&g, &singleton_assignment(2)).unwrap();
        assert!((q + 0.5).abs() < EPS);
        assert!((modularity_bruteforce(&g, &singleton_assignment(2)).unwrap() + 0.5).abs() < EPS);
    }

    #[test]
    fn bridged_triangles() {
        let g = fixtures::two_triangles_bridged();
        let a = Assignment::from_labels(vec![0, 0, 0, 1, 1, 1]);
        assert!((modularity(&g, &a).unwrap() - 5.0 / 14.0).abs() < EPS);
        assert!((modularity_bruteforce(&g, &a).unwrap() - 5.0 / 14.0).abs() < EPS);
        let agg = community_aggregates(&g, &a);
        assert_eq!(&agg.sigma_tot[..2], &[7.0, 7.0]);
        assert_eq!(&agg.sigma_in[..2], &[6.0, 6.0]);
    }

    #[test]
    fn singleton_aggregates_are_degrees_and_loops() {
        let g = fixtures::with_self_loops(&fixtures::two_triangles_bridged(), 2.0);
        let agg = community_aggregates(&g, &singleton_assignment(g.n()));
        for u in 0..g.n() {
            assert_eq!(agg.sigma_tot[u], g.degree(u));
            assert_eq!(agg.sigma_in[u], 2.0);
            assert_eq!(agg.sizes[u], 1);
        }
    }

    #[test]
    fn zero_total_rejected() {
        let g = crate::build_graph(&crate::EdgeList::new(2), Default::default()).unwrap();
        assert_eq!(
            modularity(&g, &singleton_assignment(2)),
            Err(GraphError::ZeroTotal)
        );
    }

    #[test]
    fn invalid_assignment_rejected() {
        let g = fixtures::single_edge();
        assert!(matches!(
            modularity(&g, &Assignment::from_labels(vec![0])),
            Err(GraphError::AssignmentLength { .. })
        ));
        assert!(matches!(
            modularity(&g, &Assignment::from_labels(vec![0, 2])),
            Err(GraphError::LabelOutOfRange { .. })
        ));
    }

    #[test]
    fn delta_examples() {
        let g = fixtures::single_edge();
        let a = singleton_assignment(2);
        let agg = community_aggregates(&g, &a);
        let k_to = BTreeMap::from([(0, 0.0), (1, 1.0)]);
        assert_eq!(delta_modularity(&g, &agg, 0, &k_to, 0, 0), 0.0);
        assert!((delta_modularity(&g, &agg, 0, &k_to, 0, 1) - 0.5).abs() < EPS);

        // Bridge endpoint 2 of the joined triangles leaves the all-in-one
        // community for the (empty) community 5.
        let g = fixtures::two_triangles_bridged();
        let a = Assignment::from_labels(vec![0; 6]);
        let agg = community_aggregates(&g, &a);
        let k_to = BTreeMap::from([(0, 3.0)]);
        let dq = delta_modularity(&g, &agg, 2, &k_to, 0, 5);
        let mut b = a.clone();
        b.labels_mut()[2] = 5;
        let oracle = modularity_bruteforce(&g, &b).unwrap() - modularity_bruteforce(&g, &a).unwrap();
        assert!((dq - oracle).abs() < 1e-9);
    }

    #[test]
    fn normalize_examples() {
        let (a, c) = Assignment::from_labels(vec![5, 5, 2]).normalize();
        assert_eq!((a.labels(), c), (&[0, 0, 1][..], 2));
        let (b, c2) = a.normalize();
        assert_eq!((b, c2), (a.clone(), 2));
        let (s, c) = singleton_assignment(4).normalize();
        assert_eq!((s, c), (singleton_assignment(4), 4));
    }

    #[test]
    fn flatten_examples() {
        let one = Dendrogram {
            levels: vec![Assignment::from_labels(vec![1, 0, 1])],
            per_level_q: vec![0.0],
        };
        assert_eq!(one.flatten().unwrap().labels(), &[1, 0, 1]);

        let two = Dendrogram {
            levels: vec![
                Assignment::from_labels(vec![0, 0, 1, 1]),
                Assignment::from_labels(vec![0, 0]),
            ],
            per_level_q: vec![0.0, 0.0],
        };
        assert_eq!(two.flatten().unwrap().labels(), &[0, 0, 0, 0]);

        let bad = Dendrogram {
            levels: vec![
                Assignment::from_labels(vec![0, 0, 1, 1]),
                Assignment::from_labels(vec![0, 0, 0]),
            ],
            per_level_q: vec![],
        };
        assert!(matches!(
            bad.flatten(),
            Err(GraphError::InconsistentLevel { level: 1, .. })
        ));
        assert_eq!(Dendrogram::default().flatten(), Err(GraphError::EmptyDendrogram));
    }

    #[test]
    fn membership_round_trip() {
        let a = Assignment::from_labels(vec![0, 0, 1, 2, 1]);
        let mut buf = Vec::new();
        write_membership(&a, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap().lines().next(), Some("0 0"));
        assert_eq!(parse_membership(&buf[..]).unwrap(), a);
        assert!(parse_membership("0 0\n0 1\n".as_bytes()).is_err());
        assert!(parse_membership("0 0\n2 1\n".as_bytes()).is_err());
    }
}
