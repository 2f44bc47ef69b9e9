//! Image tessellation with the covariance quadtree.
//!
//! Every pixel center becomes a point weighted by its gray level. The tree
//! stops refining a node once the gray-level dispersion drops to a fraction
//! of the parent's. Each leaf is a convex polygon: the frame clipped by the
//! corner half-planes of all its ancestors.

use crate::error::Result;
use crate::image::Image;
use crate::linalg::DimRule;
use crate::point::DataPoint;
use crate::tree::{BuildMode, CovTree, NodeId, TreeConfig, ROOT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TessellationConfig {
    /// Child/parent dispersion ratio at which refinement stops, in (0, 1).
    pub tolerance: f64,
    pub dim_rule: DimRule,
    pub max_level: usize,
}

impl Default for TessellationConfig {
    fn default() -> Self {
        Self {
            tolerance: 0.5,
            dim_rule: DimRule::Spacing,
            max_level: 8,
        }
    }
}

/// Convex polygon, vertices in order.
pub type Polygon = Vec<[f64; 2]>;

/// A region of the partition. `node` is `None` for an empty hyperquadrant
/// that no pixel center fell into.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub node: Option<NodeId>,
    pub polygon: Polygon,
}

#[derive(Debug, Clone)]
pub struct Tessellation {
    pub tree: CovTree,
    width: usize,
    height: usize,
    colors: Vec<[u8; 3]>,
}

pub fn tessellate(image: &Image, config: TessellationConfig) -> Result<Tessellation> {
    let (w, h) = (image.width(), image.height());
    let points: Vec<DataPoint> = (0..h)
        .flat_map(|j| {
            (0..w).map(move |i| DataPoint::new((j * w + i) as u64, vec![i as f64 + 0.5, j as f64 + 0.5]))
        })
        .collect();
    let tree_config = TreeConfig {
        dim_rule: config.dim_rule,
        leaf_capacity: 1,
        max_depth: config.max_level,
        mode: BuildMode::Tessellation(config.tolerance),
    };
    let tree = CovTree::build_tessellation(points, &image.weights(), tree_config)?;
    let colors = tree
        .nodes()
        .iter()
        .map(|node| {
            if !node.is_leaf() {
                return [0; 3];
            }
            let mut sum = [0u64; 3];
            for &p in &node.points {
                let rgb = image.rgb(p % w, p / w);
                for c in 0..3 {
                    sum[c] += rgb[c] as u64;
                }
            }
            let n = node.points.len() as u64;
            sum.map(|s| ((s + n / 2) / n) as u8)
        })
        .collect();
    Ok(Tessellation {
        tree,
        width: w,
        height: h,
        colors,
    })
}

impl Tessellation {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn leaf_count(&self) -> usize {
        self.tree.leaves().count()
    }

    /// Mean color of a leaf's pixels.
    pub fn leaf_color(&self, leaf: NodeId) -> [u8; 3] {
        self.colors[leaf]
    }

    pub fn frame(&self) -> Polygon {
        let (w, h) = (self.width as f64, self.height as f64);
        vec![[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]]
    }

    /// All non-degenerate regions of the partition inside the frame.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        self.collect(ROOT, self.frame(), &mut out);
        out
    }

    fn collect(&self, id: NodeId, poly: Polygon, out: &mut Vec<Cell>) {
        let node = self.tree.node(id);
        if node.is_leaf() {
            out.push(Cell {
                node: Some(id),
                polygon: poly,
            });
            return;
        }
        let c = &node.expectation;
        for beta in 0..node.children.len() {
            let normals = crate::tree::corner_normals(&node.eig, node.lambda, beta);
            let mut p = poly.clone();
            for u in &normals {
                p = clip(&p, [c[0], c[1]], [u[0], u[1]]);
            }
            if area(&p) <= 0.0 {
                continue;
            }
            match node.children[beta] {
                Some(child) => self.collect(child, p, out),
                None => out.push(Cell {
                    node: None,
                    polygon: p,
                }),
            }
        }
    }

    /// Every pixel painted with its leaf's mean color.
    pub fn render(&self) -> Image {
        let mut data = vec![0u8; self.width * self.height * 3];
        for leaf in self.tree.leaves() {
            let rgb = self.colors[leaf];
            for &p in &self.tree.node(leaf).points {
                data[3 * p..3 * p + 3].copy_from_slice(&rgb);
            }
        }
        Image::new_rgb(self.width, self.height, data).expect("sized buffer")
    }

    /// [`render`](Self::render) with cell outlines drawn in `edge`.
    pub fn render_outlined(&self, edge: [u8; 3]) -> Image {
        let mut data = self.render().data().to_vec();
        for cell in self.cells() {
            let p = &cell.polygon;
            for i in 0..p.len() {
                draw_line(&mut data, self.width, self.height, p[i], p[(i + 1) % p.len()], edge);
            }
        }
        Image::new_rgb(self.width, self.height, data).expect("sized buffer")
    }
}

/// Keeps the part of a convex polygon with `(x - c) . u <= 0`.
pub fn clip(poly: &[[f64; 2]], c: [f64; 2], u: [f64; 2]) -> Polygon {
    let side = |p: [f64; 2]| (p[0] - c[0]) * u[0] + (p[1] - c[1]) * u[1];
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (sa, sb) = (side(a), side(b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Shoelace area; zero for fewer than three vertices.
pub fn area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let s: f64 = (0..poly.len())
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum();
    0.5 * s.abs()
}

fn draw_line(data: &mut [u8], w: usize, h: usize, a: [f64; 2], b: [f64; 2], rgb: [u8; 3]) {
    let steps = (b[0] - a[0]).abs().max((b[1] - a[1]).abs()).ceil().max(1.0) as usize;
    for s in 0..=steps {
        let t = s as f64 / steps as f64;
        let x = (a[0] + t * (b[0] - a[0])).floor();
        let y = (a[1] + t * (b[1] - a[1])).floor();
        if x >= 0.0 && y >= 0.0 {
            let (x, y) = ((x as usize).min(w - 1), (y as usize).min(h - 1));
            let o = 3 * (y * w + x);
            data[o..o + 3].copy_from_slice(&rgb);
        }
    }
}
