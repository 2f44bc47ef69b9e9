//! The covariance hyper-quadtree.
//!
//! Each interior node splits its points at their mean along the hyperplanes
//! normal to the first `lambda` covariance eigenvectors, giving up to
//! `2^lambda` children. A child remembers the parent mean as its corner
//! vertex, and the eigenvectors, flipped to point out of its region, as its
//! corner normals. Search code uses these to bound distances without ever
//! building the node's polytope.

use crate::error::{Error, Result};
use crate::flat::FlatTree;
use crate::linalg::{
    dot, eigendecompose, moments, select_intrinsic_dim, weighted_moments, DimRule,
    EigenDecomposition,
};
use crate::point::{validate, DataPoint};

pub type NodeId = usize;

/// Stop rule for the recursive build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuildMode {
    /// Split until a node holds at most `leaf_capacity` points.
    Knn,
    /// Image tessellation: a node stops splitting once its value dispersion
    /// is at most this fraction of its parent's.
    Tessellation(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeConfig {
    pub dim_rule: DimRule,
    pub leaf_capacity: usize,
    pub max_depth: usize,
    pub mode: BuildMode,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            dim_rule: DimRule::Spacing,
            leaf_capacity: 1,
            max_depth: 64,
            mode: BuildMode::Knn,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.leaf_capacity == 0 {
            return Err(Error::InvalidArgument("leaf_capacity must be >= 1".into()));
        }
        if let BuildMode::Tessellation(t) = self.mode {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "tessellation tolerance must lie in (0, 1), got {t}"
                )));
            }
        }
        if let DimRule::Ratio(t) = self.dim_rule {
            if !(0.0..1.0).contains(&t) {
                return Err(Error::InvalidArgument(format!(
                    "dimension ratio must lie in [0, 1), got {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Lower-bounding corner inherited from the parent split.
#[derive(Debug, Clone, PartialEq)]
pub struct Corner {
    /// Parent expectation.
    pub vertex: Vec<f64>,
    /// Unit normals pointing out of this node's region, one per parent
    /// principal direction.
    pub normals: Vec<Vec<f64>>,
}

/// Mean and standard deviation of the per-point values (gray levels) of a
/// tessellation node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueSummary {
    pub mean: f64,
    pub dispersion: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovNode {
    pub depth: usize,
    pub n: usize,
    pub expectation: Vec<f64>,
    pub eig: EigenDecomposition,
    pub lambda: usize,
    /// `None` only at the root.
    pub corner: Option<Corner>,
    /// Slot `beta` holds the child for hyperquadrant `beta`. Empty for leaves.
    pub children: Vec<Option<NodeId>>,
    /// Leaf payload: indices into [`CovTree::points`]. Interior nodes drop it.
    pub points: Vec<usize>,
    pub summary: Option<ValueSummary>,
}

impl CovNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Hyperquadrant classifier: bit `j` (left to right) is set when the
/// deviation has a non-negative projection on the j-th eigenvector.
pub fn child_index(delta: &[f64], eig: &EigenDecomposition, lambda: usize) -> usize {
    eig.vectors[..lambda]
        .iter()
        .fold(0usize, |beta, v| (beta << 1) | usize::from(dot(delta, v) >= 0.0))
}

/// Outward corner normals of child `beta`: `u_j = (-1)^bit(j, beta) v_j`.
pub fn corner_normals(eig: &EigenDecomposition, lambda: usize, beta: usize) -> Vec<Vec<f64>> {
    (0..lambda)
        .map(|j| {
            let bit = (beta >> (lambda - 1 - j)) & 1;
            let v = &eig.vectors[j];
            if bit == 1 {
                v.iter().map(|c| -c).collect()
            } else {
                v.clone()
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Census {
    pub nodes: usize,
    pub leaves: usize,
    pub max_depth: usize,
    /// `lambda_histogram[l]` counts nodes with intrinsic dimensionality `l`.
    pub lambda_histogram: Vec<usize>,
}

/// Immutable covariance quadtree over a point set. Nodes are stored in
/// preorder; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct CovTree {
    pub(crate) dim: usize,
    pub(crate) config: TreeConfig,
    pub(crate) points: Vec<DataPoint>,
    pub(crate) nodes: Vec<CovNode>,
    pub(crate) flat: FlatTree,
}

pub const ROOT: NodeId = 0;

impl CovTree {
    /// Builds the tree top-down.
    pub fn build(points: Vec<DataPoint>, config: TreeConfig) -> Result<Self> {
        if let BuildMode::Tessellation(_) = config.mode {
            return Err(Error::InvalidArgument(
                "tessellation trees need per-point values; use build_tessellation".into(),
            ));
        }
        Self::build_inner(points, None, config)
    }

    /// Builds a tessellation tree: PCA uses `values` as weights and the stop
    /// rule compares value dispersions between parent and child.
    pub fn build_tessellation(
        points: Vec<DataPoint>,
        values: &[f64],
        config: TreeConfig,
    ) -> Result<Self> {
        if !matches!(config.mode, BuildMode::Tessellation(_)) {
            return Err(Error::InvalidArgument(
                "build_tessellation requires BuildMode::Tessellation".into(),
            ));
        }
        if values.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "tessellation values must be finite and non-negative".into(),
            ));
        }
        Self::build_inner(points, Some(values), config)
    }

    fn build_inner(points: Vec<DataPoint>, values: Option<&[f64]>, config: TreeConfig) -> Result<Self> {
        config.validate()?;
        let dim = validate(&points)?;
        let mut tree = CovTree {
            dim,
            config,
            points,
            nodes: Vec::new(),
            flat: FlatTree::new(dim, &[], &[]),
        };
        let all: Vec<usize> = (0..tree.points.len()).collect();
        let mut builder = Builder {
            tree: &mut tree,
            values,
        };
        builder.node(all, 0, None, None);
        tree.flat = FlatTree::new(dim, &tree.points, &tree.nodes);
        Ok(tree)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn config(&self) -> &TreeConfig {
        &self.config
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn nodes(&self) -> &[CovNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &CovNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> &CovNode {
        &self.nodes[ROOT]
    }

    /// Leaf node ids in preorder.
    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is_leaf())
            .map(|(i, _)| i)
    }

    /// Nodes whose region contains `query`, root first, following the
    /// child-index routing until a leaf or an empty slot.
    pub fn locate(&self, query: &[f64]) -> Vec<NodeId> {
        let mut path = vec![ROOT];
        let mut cur = ROOT;
        loop {
            let node = &self.nodes[cur];
            if node.is_leaf() {
                break;
            }
            let delta: Vec<f64> = query
                .iter()
                .zip(&node.expectation)
                .map(|(q, m)| q - m)
                .collect();
            match node.children[child_index(&delta, &node.eig, node.lambda)] {
                Some(c) => {
                    path.push(c);
                    cur = c;
                }
                None => break,
            }
        }
        path
    }

    /// Point indices stored in the subtree rooted at `id`.
    pub fn subtree_points(&self, id: NodeId) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            out.extend_from_slice(&node.points);
            stack.extend(node.children.iter().flatten().copied());
        }
        out
    }

    pub fn census(&self) -> Census {
        let mut c = Census::default();
        for node in &self.nodes {
            c.nodes += 1;
            if node.is_leaf() {
                c.leaves += 1;
            }
            c.max_depth = c.max_depth.max(node.depth);
            if c.lambda_histogram.len() <= node.lambda {
                c.lambda_histogram.resize(node.lambda + 1, 0);
            }
            c.lambda_histogram[node.lambda] += 1;
        }
        c
    }

    pub(crate) fn from_parts(
        dim: usize,
        config: TreeConfig,
        points: Vec<DataPoint>,
        nodes: Vec<CovNode>,
    ) -> Self {
        let flat = FlatTree::new(dim, &points, &nodes);
        Self {
            dim,
            config,
            points,
            nodes,
            flat,
        }
    }
}

struct Builder<'a> {
    tree: &'a mut CovTree,
    values: Option<&'a [f64]>,
}

impl Builder<'_> {
    fn node(
        &mut self,
        idx: Vec<usize>,
        depth: usize,
        corner: Option<Corner>,
        parent_dispersion: Option<f64>,
    ) -> NodeId {
        let dim = self.tree.dim;
        let n = idx.len();
        let pts = &self.tree.points;
        let rows = idx.iter().map(|&i| pts[i].coords.as_slice());
        let (expectation, cov, summary) = match self.values {
            None => {
                let (m, c) = moments(dim, rows);
                (m, c, None)
            }
            Some(values) => {
                let (m, c) = weighted_moments(dim, rows.zip(idx.iter().map(|&i| values[i])));
                (m, c, Some(summarize(idx.iter().map(|&i| values[i]))))
            }
        };
        let eig = if n == 1 {
            zero_eig(dim)
        } else {
            // covariance of finite points is symmetric by construction
            eigendecompose(&cov).unwrap_or_else(|_| zero_eig(dim))
        };
        let lambda = select_intrinsic_dim(&eig, n, self.tree.config.dim_rule);

        let cfg = self.tree.config;
        let stop = depth >= cfg.max_depth
            || lambda == 0
            || n <= cfg.leaf_capacity
            || match (cfg.mode, summary) {
                (BuildMode::Tessellation(t), Some(s)) => {
                    s.dispersion <= t * parent_dispersion.unwrap_or(s.dispersion)
                }
                _ => false,
            };

        let id = self.tree.nodes.len();
        self.tree.nodes.push(CovNode {
            depth,
            n,
            expectation,
            eig,
            lambda,
            corner,
            children: Vec::new(),
            points: Vec::new(),
            summary,
        });
        if stop {
            self.tree.nodes[id].points = idx;
            return id;
        }

        let node = &self.tree.nodes[id];
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); 1 << lambda];
        let mut delta = vec![0.0; dim];
        for i in idx {
            for ((d, x), m) in delta
                .iter_mut()
                .zip(&self.tree.points[i].coords)
                .zip(&node.expectation)
            {
                *d = x - m;
            }
            buckets[child_index(&delta, &node.eig, lambda)].push(i);
        }
        let vertex = node.expectation.clone();
        let eig = node.eig.clone();
        let dispersion = summary.map(|s| s.dispersion);

        let mut children = vec![None; 1 << lambda];
        for (beta, bucket) in buckets.into_iter().enumerate() {
            if bucket.is_empty() {
                continue;
            }
            let corner = Corner {
                vertex: vertex.clone(),
                normals: corner_normals(&eig, lambda, beta),
            };
            children[beta] = Some(self.node(bucket, depth + 1, Some(corner), dispersion));
        }
        self.tree.nodes[id].children = children;
        id
    }
}

fn zero_eig(dim: usize) -> EigenDecomposition {
    EigenDecomposition {
        values: vec![0.0; dim],
        vectors: EigenDecomposition::identity(dim).vectors,
    }
}

fn summarize(values: impl Iterator<Item = f64> + Clone) -> ValueSummary {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    ValueSummary {
        mean,
        dispersion: var.sqrt(),
    }
}
