//! Exact K-nearest-neighbor search over a [`CovTree`].
//!
//! The descent threads the recursive query-to-node distance from parent to
//! child: a node's distance is the larger of its parent's distance and the
//! maximum signed projection of `query - corner_vertex` on its corner
//! normals. A full list prunes every node whose distance exceeds the
//! current K-th distance.
//!
//! Under a Mahalanobis metric each corner normal `u` with projection `p > 0`
//! gives `p² / (uᵀ Σ u)`, the smallest squared Mahalanobis distance from the
//! query to the half-space `{y : (y - vertex)ᵀu ≤ 0}`. A node's key is the
//! largest of these and its parent's key, and the list holds squared
//! Mahalanobis distances.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::linalg::{dist_sq, dot, eigendecompose, moments, EigenDecomposition, EIGEN_FLOOR};
use crate::point::DataPoint;
use crate::flat::{FlatTree, NO_CHILD};
use crate::tree::{CovTree, NodeId, ROOT};

/// Relative slack applied before pruning, so rounding in the bound can
/// never discard a point tied with the K-th candidate.
const PRUNE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub id: u64,
    /// Position of the point in the searched point slice.
    pub index: usize,
    pub dist: f64,
}

/// Bounded candidate list ordered by `(dist, id)` ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnList {
    capacity: usize,
    squared: bool,
    entries: Vec<Neighbor>,
}

impl KnnList {
    pub fn new(capacity: usize) -> Self {
        Self::with_convention(capacity, false)
    }

    /// `squared` records whether distances are squared Mahalanobis values.
    pub fn with_convention(capacity: usize, squared: bool) -> Self {
        Self {
            capacity,
            squared,
            entries: Vec::with_capacity(capacity.min(4096) + 1),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn is_squared(&self) -> bool {
        self.squared
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.capacity
    }

    pub fn entries(&self) -> &[Neighbor] {
        &self.entries
    }

    /// Distance of the last entry when full, infinity otherwise.
    pub fn top_dist(&self) -> f64 {
        if self.is_full() {
            self.entries.last().map_or(f64::INFINITY, |n| n.dist)
        } else {
            f64::INFINITY
        }
    }

    pub fn ids(&self) -> Vec<u64> {
        self.entries.iter().map(|n| n.id).collect()
    }

    /// Inserts the candidate if the list has room or it beats the current
    /// last entry, evicting that entry. Returns whether it was placed.
    pub fn insert(&mut self, id: u64, index: usize, dist: f64) -> bool {
        debug_assert!(dist >= 0.0 && dist.is_finite());
        if self.capacity == 0 {
            return false;
        }
        let before = |n: &Neighbor| (n.dist, n.id) <= (dist, id);
        if self.is_full() {
            let last = self.entries[self.entries.len() - 1];
            if (dist, id) >= (last.dist, last.id) {
                return false;
            }
            self.entries.pop();
        }
        let pos = self.entries.partition_point(before);
        self.entries.insert(pos, Neighbor { id, index, dist });
        true
    }
}

/// Max-heap entry ordered by `(dist, id)`.
#[derive(Debug, Clone, Copy)]
struct Candidate(Neighbor);

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .dist
            .total_cmp(&other.0.dist)
            .then(self.0.id.cmp(&other.0.id))
    }
}

/// Working set of a descent: same admission rule as [`KnnList::insert`],
/// sorted once at the end.
struct Candidates {
    capacity: usize,
    heap: BinaryHeap<Candidate>,
}

impl Candidates {
    fn new(capacity: usize) -> Self {
        Self {
            capacity,
            heap: BinaryHeap::with_capacity(capacity.min(4096) + 1),
        }
    }

    fn is_full(&self) -> bool {
        self.heap.len() >= self.capacity
    }

    fn top_dist(&self) -> f64 {
        match self.heap.peek() {
            Some(c) if self.is_full() => c.0.dist,
            _ => f64::INFINITY,
        }
    }

    fn insert(&mut self, id: u64, index: usize, dist: f64) -> bool {
        let c = Candidate(Neighbor { id, index, dist });
        if !self.is_full() {
            self.heap.push(c);
            return true;
        }
        match self.heap.peek_mut() {
            Some(mut top) if c < *top => {
                *top = c;
                true
            }
            _ => false,
        }
    }

    fn into_list(self, squared: bool) -> KnnList {
        KnnList {
            capacity: self.capacity,
            squared,
            entries: self.heap.into_sorted_vec().into_iter().map(|c| c.0).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchStats {
    /// Nodes reached by the descent, each point of a multi-point leaf
    /// counted as a unit node.
    pub nodes_visited: usize,
    /// Candidates actually placed into the list.
    pub insertions: usize,
    /// Set when K exceeded the number of stored points.
    pub truncated: bool,
}

impl std::ops::AddAssign for SearchStats {
    fn add_assign(&mut self, rhs: Self) {
        self.nodes_visited += rhs.nodes_visited;
        self.insertions += rhs.insertions;
        self.truncated |= rhs.truncated;
    }
}

/// Eigendecomposition of a neighborhood covariance, prepared for
/// Mahalanobis evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricState {
    eig: EigenDecomposition,
    /// Number of leading eigenpairs at or above the floor.
    used: usize,
    /// Row-major covariance rebuilt from the used eigenpairs.
    cov: Vec<f64>,
}

impl MetricState {
    pub fn new(eig: EigenDecomposition) -> Result<Self> {
        let top = eig.values.first().copied().unwrap_or(0.0);
        if !(top > 0.0) {
            return Err(Error::SingularMetric);
        }
        let floor = EIGEN_FLOOR * top;
        let used = eig.values.iter().take_while(|a| **a >= floor).count();
        Ok(Self::assemble(eig, used))
    }

    pub fn identity(dim: usize) -> Self {
        Self::assemble(EigenDecomposition::identity(dim), dim)
    }

    fn assemble(eig: EigenDecomposition, used: usize) -> Self {
        let d = eig.dim();
        let mut cov = vec![0.0; d * d];
        for (a, v) in eig.values[..used].iter().zip(&eig.vectors) {
            for i in 0..d {
                for j in 0..d {
                    cov[i * d + j] += a * v[i] * v[j];
                }
            }
        }
        Self { eig, used, cov }
    }

    pub fn eig(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    /// Largest over smallest used eigenvalue.
    pub fn anisotropy(&self) -> f64 {
        self.eig.values[0] / self.eig.values[self.used - 1]
    }

    /// Squared Mahalanobis length of `delta`.
    pub fn distance_sq(&self, delta: &[f64]) -> f64 {
        self.eig.values[..self.used]
            .iter()
            .zip(&self.eig.vectors)
            .map(|(a, u)| dot(delta, u).powi(2) / a)
            .sum()
    }

    #[inline]
    fn point_distance_sq(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut total = 0.0;
        for (s, u) in self.eig.values[..self.used].iter().zip(&self.eig.vectors) {
            let mut p = 0.0;
            for i in 0..a.len() {
                p += (a[i] - b[i]) * u[i];
            }
            total += p * p / s;
        }
        total
    }

    /// Smallest squared Mahalanobis distance from a point at signed
    /// Euclidean distance `d` outside the half-space with outward unit
    /// normal `normal`.
    #[inline]
    pub fn halfspace_bound_sq(&self, d: f64, normal: &[f64]) -> f64 {
        if !(d > 0.0) {
            return 0.0;
        }
        let dim = normal.len();
        if self.used < dim {
            let free: f64 = self.eig.vectors[self.used..]
                .iter()
                .map(|u| dot(normal, u).powi(2))
                .sum();
            // the normal leans on a direction the metric ignores
            if free > 0.0 {
                return 0.0;
            }
        }
        let mut spread = 0.0;
        for i in 0..dim {
            let row = &self.cov[i * dim..(i + 1) * dim];
            let mut r = 0.0;
            for j in 0..dim {
                r += row[j] * normal[j];
            }
            spread += normal[i] * r;
        }
        d * d / spread
    }
}

/// Recursive node bound: Euclidean distance and the pruning key, which is
/// the same value without a metric and a squared Mahalanobis bound with one.
#[derive(Debug, Clone, Copy)]
struct Bound {
    dist: f64,
    key: f64,
}

/// Maximum signed projection of `query - corner_vertex` on the node's
/// corner normals, with the index of the maximizing normal. `None` at the
/// root.
pub fn direct_distance(query: &[f64], tree: &CovTree, node: NodeId) -> Option<(f64, usize)> {
    let corner = tree.node(node).corner.as_ref()?;
    let mut best = (f64::NEG_INFINITY, 0);
    for (j, u) in corner.normals.iter().enumerate() {
        let p: f64 = query
            .iter()
            .zip(&corner.vertex)
            .zip(u)
            .map(|((q, c), n)| (q - c) * n)
            .sum();
        if p > best.0 {
            best = (p, j);
        }
    }
    Some(best)
}

/// Recursive query-to-node distance given the parent's value: zero at the
/// root, otherwise `max(inherited, direct_distance)`.
pub fn node_distance(query: &[f64], tree: &CovTree, node: NodeId, inherited: f64) -> f64 {
    match direct_distance(query, tree, node) {
        None => 0.0,
        Some((d, _)) => inherited.max(d),
    }
}

/// Mahalanobis query-to-node bound from the Euclidean recursive distance
/// and the normal that attains it.
pub fn mahalanobis_node_distance(euclidean: f64, normal: Option<&[f64]>, metric: &MetricState) -> f64 {
    match normal {
        Some(u) if euclidean > 0.0 => metric.halfspace_bound_sq(euclidean, u),
        _ => 0.0,
    }
}

struct Search<'a> {
    flat: &'a FlatTree,
    query: &'a [f64],
    metric: Option<&'a MetricState>,
    list: Candidates,
    stats: SearchStats,
    pruned: Option<Vec<NodeId>>,
}

impl Search<'_> {
    fn visit(&mut self, id: NodeId, inherited: Bound) {
        let f = self.flat;
        let d = f.dim;
        let q = self.query;
        let node = f.nodes[id];
        self.stats.nodes_visited += 1;

        let bound = if node.has_corner {
            let vertex = &f.vertex[id * d..(id + 1) * d];
            let mut dist = inherited.dist;
            let mut key = inherited.key;
            let first = node.normals as usize * d;
            for u in f.normals[first..first + node.n_normals as usize * d].chunks_exact(d) {
                let mut p = 0.0;
                for i in 0..d {
                    p += (q[i] - vertex[i]) * u[i];
                }
                dist = dist.max(p);
                // every corner half-plane bounds the node on its own
                if let Some(m) = self.metric {
                    key = key.max(m.halfspace_bound_sq(p, u));
                }
            }
            if self.metric.is_none() {
                key = dist;
            }
            Bound { dist, key }
        } else {
            Bound { dist: 0.0, key: 0.0 }
        };
        if self.list.is_full() && bound.key > self.list.top_dist() * (1.0 + PRUNE_SLACK) {
            if let Some(p) = self.pruned.as_mut() {
                p.push(id);
            }
            return;
        }

        if node.n_slots == 0 {
            self.stats.nodes_visited += (node.n_pts as usize).saturating_sub(1);
            let pts = &f.leaf_pts[node.pts as usize..(node.pts + node.n_pts) as usize];
            for &i in pts {
                let i = i as usize;
                let x = &f.coords[i * d..(i + 1) * d];
                let dist = match self.metric {
                    None => dist_sq(q, x).sqrt(),
                    Some(m) => m.point_distance_sq(q, x),
                };
                if self.list.insert(f.ids[i], i, dist) {
                    self.stats.insertions += 1;
                }
            }
            return;
        }

        // the hyperquadrant holding the query first, then index order
        let mean = &f.mean[id * d..(id + 1) * d];
        let first = node.axes as usize * d;
        let mut home = 0usize;
        for v in f.axes[first..first + node.lambda as usize * d].chunks_exact(d) {
            let mut p = 0.0;
            for i in 0..d {
                p += (q[i] - mean[i]) * v[i];
            }
            home = (home << 1) | usize::from(p >= 0.0);
        }
        let slots = &f.slots[node.slots as usize..(node.slots + node.n_slots) as usize];
        if slots[home] != NO_CHILD {
            self.visit(slots[home] as usize, bound);
        }
        for (beta, &c) in slots.iter().enumerate() {
            if beta != home && c != NO_CHILD {
                self.visit(c as usize, bound);
            }
        }
    }
}

fn check_query(tree: &CovTree, query: &[f64], k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidK(k));
    }
    if query.len() != tree.dim() {
        return Err(Error::DimensionMismatch {
            expected: tree.dim(),
            found: query.len(),
        });
    }
    if query.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn run_search<'a>(
    tree: &'a CovTree,
    query: &'a [f64],
    k: usize,
    metric: Option<&'a MetricState>,
    trace: bool,
) -> Result<(KnnList, SearchStats, Option<Vec<NodeId>>)> {
    check_query(tree, query, k)?;
    if let Some(m) = metric {
        if m.dim() != tree.dim() {
            return Err(Error::DimensionMismatch {
                expected: tree.dim(),
                found: m.dim(),
            });
        }
    }
    let mut s = Search {
        flat: &tree.flat,
        query,
        metric,
        list: Candidates::new(k),
        stats: SearchStats {
            truncated: k > tree.len(),
            ..SearchStats::default()
        },
        pruned: trace.then(Vec::new),
    };
    s.visit(ROOT, Bound { dist: 0.0, key: 0.0 });
    Ok((s.list.into_list(metric.is_some()), s.stats, s.pruned))
}

/// Exact K nearest neighbors of `query`. Without a metric distances are
/// Euclidean; with one they are squared Mahalanobis distances.
pub fn knn_find(
    tree: &CovTree,
    query: &[f64],
    k: usize,
    metric: Option<&MetricState>,
) -> Result<(KnnList, SearchStats)> {
    let (list, stats, _) = run_search(tree, query, k, metric, false)?;
    Ok((list, stats))
}

/// Like [`knn_find`], also returning the ids of the nodes the descent
/// pruned.
pub fn knn_find_traced(
    tree: &CovTree,
    query: &[f64],
    k: usize,
    metric: Option<&MetricState>,
) -> Result<(KnnList, SearchStats, Vec<NodeId>)> {
    let (list, stats, pruned) = run_search(tree, query, k, metric, true)?;
    Ok((list, stats, pruned.unwrap_or_default()))
}

/// Exhaustive scan with the same distance definitions and tie-break as
/// [`knn_find`].
pub fn brute_force_knn(
    points: &[DataPoint],
    query: &[f64],
    k: usize,
    metric: Option<&MetricState>,
) -> Result<KnnList> {
    if points.is_empty() {
        return Err(Error::EmptyPartition);
    }
    if k < 1 {
        return Err(Error::InvalidK(k));
    }
    let mut all: Vec<Neighbor> = points
        .iter()
        .enumerate()
        .map(|(index, p)| Neighbor {
            id: p.id,
            index,
            dist: match metric {
                None => dist_sq(query, &p.coords).sqrt(),
                Some(m) => m.point_distance_sq(query, &p.coords),
            },
        })
        .collect();
    all.sort_by(|a, b| a.dist.total_cmp(&b.dist).then(a.id.cmp(&b.id)));
    all.truncate(k);
    Ok(KnnList {
        capacity: k,
        squared: metric.is_some(),
        entries: all,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    /// Largest relative eigenvalue change accepted as converged.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-19,
            max_iterations: 50,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnisotropicResult {
    /// Neighbors under the converged metric; distances are squared
    /// Mahalanobis values.
    pub list: KnnList,
    pub metric: MetricState,
    pub iterations: usize,
    /// False when the iteration cap was reached first.
    pub converged: bool,
    /// Statistics of the final search.
    pub stats: SearchStats,
    /// Statistics summed over all iterations.
    pub total_stats: SearchStats,
}

/// Covariance of the listed points, accumulated in ascending index order so
/// that the same neighbor set always gives bit-identical moments.
pub fn neighborhood_metric(points: &[DataPoint], list: &KnnList) -> Result<MetricState> {
    let mut idx: Vec<usize> = list.entries().iter().map(|n| n.index).collect();
    idx.sort_unstable();
    let dim = points[idx[0]].dim();
    let (_, cov) = moments(dim, idx.iter().map(|&i| points[i].coords.as_slice()));
    MetricState::new(eigendecompose(&cov)?)
}

fn max_relative_change(old: &[f64], new: &[f64]) -> f64 {
    old.iter()
        .zip(new)
        .map(|(a, b)| {
            let scale = a.abs().max(b.abs());
            if scale == 0.0 {
                0.0
            } else {
                (a - b).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Anisotropic K nearest neighbors: starting from the identity metric,
/// alternate a Mahalanobis search with re-estimating the metric from the
/// neighbors found, until the eigenvalues stop changing.
pub fn anisotropic_knn(
    tree: &CovTree,
    query: &[f64],
    k: usize,
    config: &BootstrapConfig,
) -> Result<AnisotropicResult> {
    if k < 2 {
        return Err(Error::InvalidK(k));
    }
    if config.max_iterations == 0 {
        return Err(Error::InvalidArgument("max_iterations must be >= 1".into()));
    }
    let mut metric = MetricState::identity(tree.dim());
    let mut total = SearchStats::default();
    for it in 1..=config.max_iterations {
        let (list, stats) = knn_find(tree, query, k, Some(&metric))?;
        total += stats;
        let next = neighborhood_metric(tree.points(), &list)?;
        let change = max_relative_change(&metric.eig.values, &next.eig.values);
        let converged = change <= config.tolerance;
        if converged || it == config.max_iterations {
            return Ok(AnisotropicResult {
                list,
                metric: next,
                iterations: it,
                converged,
                stats,
                total_stats: total,
            });
        }
        metric = next;
    }
    unreachable!("loop returns on its last iteration")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::points_from_rows;
    use crate::tree::TreeConfig;

    #[test]
    fn insert_into_empty() {
        let mut l = KnnList::new(3);
        assert!(l.insert(1, 0, 5.0));
        assert_eq!(l.ids(), vec![1]);
        assert_eq!(l.top_dist(), f64::INFINITY);
    }

    #[test]
    fn insert_into_full_list_evicts_last() {
        let mut l = KnnList::new(3);
        l.insert(1, 0, 1.0);
        l.insert(2, 1, 2.0);
        l.insert(3, 2, 3.0);
        assert!(l.insert(4, 3, 2.5));
        assert_eq!(l.ids(), vec![1, 2, 4]);
        assert_eq!(l.top_dist(), 2.5);
        assert!(!l.insert(5, 4, 7.0));
        assert_eq!(l.ids(), vec![1, 2, 4]);
    }

    #[test]
    fn ties_break_by_id() {
        let mut l = KnnList::new(2);
        l.insert(9, 0, 1.0);
        l.insert(4, 1, 1.0);
        assert!(l.insert(2, 2, 1.0));
        assert_eq!(l.ids(), vec![2, 4]);
        assert!(!l.insert(7, 3, 1.0));
    }

    fn square_tree() -> CovTree {
        let rows = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
            vec![5.0, 5.0],
        ];
        CovTree::build(points_from_rows(rows), TreeConfig::default()).unwrap()
    }

    #[test]
    fn direct_distance_example() {
        // vertex (0,0), normals (1,0) and (0,1)
        let mut t = square_tree();
        let id = 1;
        t.nodes[id].corner = Some(crate::tree::Corner {
            vertex: vec![0.0, 0.0],
            normals: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        });
        assert_eq!(direct_distance(&[3.0, -5.0], &t, id).unwrap().0, 3.0);
        assert!(direct_distance(&[-1.0, -2.0], &t, id).unwrap().0 < 0.0);
        assert_eq!(direct_distance(&[0.0, -2.0], &t, id).unwrap().0, 0.0);
        assert_eq!(node_distance(&[-1.0, -2.0], &t, id, 2.0), 2.0);
        assert_eq!(node_distance(&[9.0, 9.0], &t, ROOT, 0.0), 0.0);
    }

    #[test]
    fn query_at_stored_point() {
        let t = square_tree();
        let (l, s) = knn_find(&t, &[1.0, 1.0], 1, None).unwrap();
        assert_eq!(l.ids(), vec![3]);
        assert_eq!(l.entries()[0].dist, 0.0);
        assert!(s.nodes_visited >= s.insertions && s.insertions >= 1);
    }

    #[test]
    fn k_larger_than_n_returns_everything() {
        let t = square_tree();
        let (l, s) = knn_find(&t, &[0.2, 0.1], 10, None).unwrap();
        assert_eq!(l.len(), 5);
        assert!(s.truncated);
        assert!(matches!(knn_find(&t, &[0.0, 0.0], 0, None), Err(Error::InvalidK(0))));
        assert!(knn_find(&t, &[0.0], 1, None).is_err());
    }

    #[test]
    fn mahalanobis_node_bound_examples() {
        let id = MetricState::identity(2);
        assert_eq!(mahalanobis_node_distance(3.0, Some(&[0.6, 0.8]), &id), 9.0);
        let m = MetricState::new(EigenDecomposition {
            values: vec![4.0, 1.0],
            vectors: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        })
        .unwrap();
        assert_eq!(mahalanobis_node_distance(2.0, Some(&[1.0, 0.0]), &m), 1.0);
        assert_eq!(mahalanobis_node_distance(-1.0, Some(&[1.0, 0.0]), &m), 0.0);
        assert_eq!(mahalanobis_node_distance(0.0, None, &m), 0.0);
    }

    #[test]
    fn halfspace_bound_is_attained() {
        // minimizer of ΔᵀΣ⁻¹Δ subject to uᵀΔ = d is Δ* = d Σu / (uᵀΣu)
        let m = MetricState::new(EigenDecomposition {
            values: vec![9.0, 1.0],
            vectors: vec![vec![0.8, 0.6], vec![-0.6, 0.8]],
        })
        .unwrap();
        let u = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
        let d = 1.5;
        let sigma = m.eig().reconstruct();
        let su = sigma.mul_vec(&u);
        let usu = dot(&u, &su);
        let opt: Vec<f64> = su.iter().map(|x| d * x / usu).collect();
        let bound = m.halfspace_bound_sq(d, &u);
        assert!((m.distance_sq(&opt) - bound).abs() < 1e-12 * bound);
        // the product form d²·uᵀΣ⁻¹u overestimates it for an oblique normal
        let product = d * d * m.distance_sq(&u);
        assert!(product > bound * 1.1);
    }

    #[test]
    fn anisotropic_needs_two_neighbors() {
        let t = square_tree();
        assert!(matches!(
            anisotropic_knn(&t, &[0.0, 0.0], 1, &BootstrapConfig::default()),
            Err(Error::InvalidK(1))
        ));
    }

    #[test]
    fn brute_force_all_points_sorted() {
        let t = square_tree();
        let l = brute_force_knn(t.points(), &[0.0, 0.0], 5, None).unwrap();
        assert_eq!(l.ids(), vec![0, 1, 2, 3, 4]);
        let l = brute_force_knn(t.points(), &[5.0, 5.0], 1, None).unwrap();
        assert_eq!(l.ids(), vec![4]);
    }
}
