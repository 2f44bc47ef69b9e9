//! Contiguous copy of a tree for the search loops: fixed-size node records
//! indexing into flat coordinate arrays.

use crate::point::DataPoint;
use crate::tree::CovNode;

pub(crate) const NO_CHILD: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FlatNode {
    pub has_corner: bool,
    pub lambda: u8,
    /// First normal, in units of `dim`.
    pub normals: u32,
    pub n_normals: u32,
    /// First routing axis, in units of `dim`.
    pub axes: u32,
    pub slots: u32,
    pub n_slots: u32,
    pub pts: u32,
    pub n_pts: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct FlatTree {
    pub dim: usize,
    pub nodes: Vec<FlatNode>,
    /// Per-node expectation, `dim` values each.
    pub mean: Vec<f64>,
    /// Per-node corner vertex, zeros at the root.
    pub vertex: Vec<f64>,
    pub normals: Vec<f64>,
    pub axes: Vec<f64>,
    pub slots: Vec<u32>,
    pub leaf_pts: Vec<u32>,
    pub coords: Vec<f64>,
    pub ids: Vec<u64>,
}

impl FlatTree {
    pub fn new(dim: usize, points: &[DataPoint], nodes: &[CovNode]) -> Self {
        let mut f = FlatTree {
            dim,
            nodes: Vec::with_capacity(nodes.len()),
            mean: Vec::with_capacity(nodes.len() * dim),
            vertex: Vec::with_capacity(nodes.len() * dim),
            normals: Vec::new(),
            axes: Vec::new(),
            slots: Vec::new(),
            leaf_pts: Vec::with_capacity(points.len()),
            coords: points.iter().flat_map(|p| p.coords.iter().copied()).collect(),
            ids: points.iter().map(|p| p.id).collect(),
        };
        for node in nodes {
            let rec = FlatNode {
                has_corner: node.corner.is_some(),
                lambda: node.lambda as u8,
                normals: (f.normals.len() / dim.max(1)) as u32,
                n_normals: node.corner.as_ref().map_or(0, |c| c.normals.len()) as u32,
                axes: (f.axes.len() / dim.max(1)) as u32,
                slots: f.slots.len() as u32,
                n_slots: node.children.len() as u32,
                pts: f.leaf_pts.len() as u32,
                n_pts: node.points.len() as u32,
            };
            f.mean.extend_from_slice(&node.expectation);
            match &node.corner {
                Some(c) => {
                    f.vertex.extend_from_slice(&c.vertex);
                    for u in &c.normals {
                        f.normals.extend_from_slice(u);
                    }
                }
                None => f.vertex.extend(std::iter::repeat_n(0.0, dim)),
            }
            if !node.is_leaf() {
                for v in &node.eig.vectors[..node.lambda] {
                    f.axes.extend_from_slice(v);
                }
            }
            f.slots
                .extend(node.children.iter().map(|c| c.map_or(NO_CHILD, |c| c as u32)));
            f.leaf_pts.extend(node.points.iter().map(|&i| i as u32));
            f.nodes.push(rec);
        }
        f
    }
}
