//! On-disk formats: a little-endian binary tree file and CSV point files.
//!
//! Tree layout: magic `CQT1`, `u32` dimension, `u64` point count, the build
//! configuration, the points, then every node in preorder. A node record
//! carries its statistics, corner, optional value summary, leaf payload and
//! a bitmask of occupied child slots; children follow their parent.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::linalg::{DimRule, EigenDecomposition, MAX_DIM};
use crate::point::{validate, DataPoint};
use crate::tree::{BuildMode, Corner, CovNode, CovTree, TreeConfig, ValueSummary};

const MAGIC: &[u8; 4] = b"CQT1";

struct Enc(Vec<u8>);

impl Enc {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64s(&mut self, v: &[f64]) {
        v.iter().for_each(|x| self.f64(*x));
    }
}

/// Serializes a tree to bytes.
pub fn encode_tree(tree: &CovTree) -> Vec<u8> {
    let mut e = Enc(Vec::new());
    e.0.extend_from_slice(MAGIC);
    e.u32(tree.dim as u32);
    e.u64(tree.points.len() as u64);
    let cfg = &tree.config;
    match cfg.dim_rule {
        DimRule::Spacing => {
            e.u8(0);
            e.f64(0.0);
        }
        DimRule::Ratio(t) => {
            e.u8(1);
            e.f64(t);
        }
    }
    e.u64(cfg.leaf_capacity as u64);
    e.u64(cfg.max_depth as u64);
    match cfg.mode {
        BuildMode::Knn => {
            e.u8(0);
            e.f64(0.0);
        }
        BuildMode::Tessellation(t) => {
            e.u8(1);
            e.f64(t);
        }
    }
    for p in &tree.points {
        e.u64(p.id);
        e.f64s(&p.coords);
    }
    e.u64(tree.nodes.len() as u64);
    for node in &tree.nodes {
        e.u64(node.depth as u64);
        e.u64(node.n as u64);
        e.u8(node.lambda as u8);
        e.f64s(&node.expectation);
        e.f64s(&node.eig.values);
        for v in &node.eig.vectors {
            e.f64s(v);
        }
        match &node.corner {
            None => e.u8(0),
            Some(c) => {
                e.u8(1);
                e.f64s(&c.vertex);
                e.u8(c.normals.len() as u8);
                for u in &c.normals {
                    e.f64s(u);
                }
            }
        }
        match node.summary {
            None => e.u8(0),
            Some(s) => {
                e.u8(1);
                e.f64(s.mean);
                e.f64(s.dispersion);
            }
        }
        e.u64(node.points.len() as u64);
        for &i in &node.points {
            e.u64(i as u64);
        }
        e.u64(node.children.len() as u64);
        let mut mask = vec![0u8; node.children.len().div_ceil(8)];
        for (slot, c) in node.children.iter().enumerate() {
            if c.is_some() {
                mask[slot / 8] |= 1 << (slot % 8);
            }
        }
        e.0.extend_from_slice(&mask);
    }
    e.0
}

struct Dec<'a> {
    bytes: &'a [u8],
    pos: usize,
}

type DecResult<T> = std::result::Result<T, String>;

impl Dec<'_> {
    fn take(&mut self, n: usize) -> DecResult<&[u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| format!("truncated at byte {}", self.pos))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> DecResult<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> DecResult<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> DecResult<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn usize(&mut self, what: &str, max: usize) -> DecResult<usize> {
        let v = self.u64()?;
        usize::try_from(v)
            .ok()
            .filter(|&v| v <= max)
            .ok_or_else(|| format!("{what} {v} out of range"))
    }
    fn f64(&mut self) -> DecResult<f64> {
        let v = f64::from_le_bytes(self.take(8)?.try_into().unwrap());
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("non-finite value before byte {}", self.pos))
        }
    }
    fn f64s(&mut self, n: usize) -> DecResult<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }
    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

/// Parses bytes written by [`encode_tree`].
pub fn decode_tree(bytes: &[u8]) -> std::result::Result<CovTree, String> {
    let mut d = Dec { bytes, pos: 0 };
    if d.take(4)? != MAGIC {
        return Err("bad magic, not a tree file".into());
    }
    let dim = d.u32()? as usize;
    if dim == 0 || dim > MAX_DIM {
        return Err(format!("unsupported dimension {dim}"));
    }
    let n = d.usize("point count", d.remaining() / (8 * (dim + 1)))?;
    let dim_rule = match (d.u8()?, d.f64()?) {
        (0, _) => DimRule::Spacing,
        (1, t) => DimRule::Ratio(t),
        (tag, _) => return Err(format!("unknown dimension rule tag {tag}")),
    };
    let leaf_capacity = d.usize("leaf capacity", usize::MAX)?;
    let max_depth = d.usize("max depth", usize::MAX)?;
    let mode = match (d.u8()?, d.f64()?) {
        (0, _) => BuildMode::Knn,
        (1, t) => BuildMode::Tessellation(t),
        (tag, _) => return Err(format!("unknown build mode tag {tag}")),
    };
    let config = TreeConfig {
        dim_rule,
        leaf_capacity,
        max_depth,
        mode,
    };
    config.validate().map_err(|e| e.to_string())?;

    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let id = d.u64()?;
        points.push(DataPoint::new(id, d.f64s(dim)?));
    }
    validate(&points).map_err(|e| e.to_string())?;

    let count = d.usize("node count", d.remaining())?;
    let mut nodes: Vec<CovNode> = Vec::with_capacity(count);
    let mut masks: Vec<Vec<bool>> = Vec::with_capacity(count);
    for _ in 0..count {
        let depth = d.usize("depth", usize::MAX)?;
        let size = d.usize("node size", n)?;
        let lambda = d.u8()? as usize;
        if lambda > dim {
            return Err(format!("lambda {lambda} exceeds dimension {dim}"));
        }
        let expectation = d.f64s(dim)?;
        let values = d.f64s(dim)?;
        let vectors = (0..dim).map(|_| d.f64s(dim)).collect::<DecResult<_>>()?;
        let corner = match d.u8()? {
            0 => None,
            1 => {
                let vertex = d.f64s(dim)?;
                let m = d.u8()? as usize;
                if m > dim {
                    return Err(format!("corner with {m} normals in dimension {dim}"));
                }
                let normals = (0..m).map(|_| d.f64s(dim)).collect::<DecResult<_>>()?;
                Some(Corner { vertex, normals })
            }
            t => return Err(format!("bad corner flag {t}")),
        };
        let summary = match d.u8()? {
            0 => None,
            1 => Some(ValueSummary {
                mean: d.f64()?,
                dispersion: d.f64()?,
            }),
            t => return Err(format!("bad summary flag {t}")),
        };
        let np = d.usize("leaf size", n)?;
        let pts = (0..np)
            .map(|_| d.usize("point index", n.saturating_sub(1)))
            .collect::<DecResult<Vec<_>>>()?;
        let slots = d.usize("child slots", 1 << MAX_DIM)?;
        if slots != 0 && slots != 1 << lambda {
            return Err(format!("{slots} child slots for lambda {lambda}"));
        }
        let mask = d.take(slots.div_ceil(8))?;
        masks.push((0..slots).map(|s| mask[s / 8] >> (s % 8) & 1 == 1).collect());
        nodes.push(CovNode {
            depth,
            n: size,
            expectation,
            eig: EigenDecomposition { values, vectors },
            lambda,
            corner,
            children: Vec::new(),
            points: pts,
            summary,
        });
    }
    if d.remaining() != 0 {
        return Err(format!("{} trailing bytes", d.remaining()));
    }
    if nodes.is_empty() {
        return Err("tree has no nodes".into());
    }

    // rebuild child links from the preorder layout
    let mut next = 1;
    link(&mut nodes, &masks, 0, &mut next)?;
    if next != nodes.len() {
        return Err(format!("{} unreachable nodes", nodes.len() - next));
    }
    let mut seen = vec![false; n];
    for node in &nodes {
        for &i in &node.points {
            if std::mem::replace(&mut seen[i], true) {
                return Err(format!("point index {i} stored twice"));
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err("some points are not stored in any leaf".into());
    }
    Ok(CovTree::from_parts(dim, config, points, nodes))
}

fn link(nodes: &mut [CovNode], masks: &[Vec<bool>], id: usize, next: &mut usize) -> DecResult<()> {
    let mut children = vec![None; masks[id].len()];
    for (slot, present) in masks[id].iter().enumerate() {
        if !present {
            continue;
        }
        let c = *next;
        if c >= nodes.len() {
            return Err("child link past the last node".into());
        }
        if nodes[c].depth != nodes[id].depth + 1 {
            return Err(format!("node {c} has inconsistent depth"));
        }
        *next += 1;
        children[slot] = Some(c);
        link(nodes, masks, c, next)?;
    }
    nodes[id].children = children;
    Ok(())
}

pub fn save_tree(tree: &CovTree, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_tree(tree)).map_err(|e| Error::io(path, e))
}

pub fn load_tree(path: impl AsRef<Path>) -> Result<CovTree> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_tree(&bytes).map_err(|message| Error::Format {
        path: path.to_path_buf(),
        message,
    })
}

/// Reads a CSV point file. An optional header line is recognized by a
/// non-numeric field; when its first field is `id` that column holds point
/// ids, otherwise ids are row numbers. Blank lines and `#` comments are
/// skipped.
pub fn read_points(path: impl AsRef<Path>) -> Result<Vec<DataPoint>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_points(&text, path)
}

pub fn parse_points(text: &str, path: &Path) -> Result<Vec<DataPoint>> {
    let perr = |line: usize, message: String| Error::Parse {
        path: PathBuf::from(path),
        line,
        message,
    };
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .peekable();
    let mut has_id = false;
    if let Some(&(_, first)) = rows.peek() {
        let fields: Vec<&str> = first.split(',').map(str::trim).collect();
        if fields.iter().any(|f| f.parse::<f64>().is_err()) {
            has_id = fields[0].eq_ignore_ascii_case("id");
            rows.next();
        }
    }
    let mut points = Vec::new();
    let mut ids = std::collections::HashSet::new();
    let mut dim = None;
    for (line, l) in rows {
        let mut fields = l.split(',').map(str::trim);
        let id = if has_id {
            let f = fields.next().unwrap_or("");
            f.parse::<u64>()
                .map_err(|_| perr(line, format!("invalid id {f:?}")))?
        } else {
            points.len() as u64
        };
        let coords = fields
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| perr(line, format!("invalid coordinate {f:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        match dim {
            None => dim = Some(coords.len()),
            Some(d) if d != coords.len() => {
                return Err(perr(
                    line,
                    format!("expected {d} coordinates, found {}", coords.len()),
                ))
            }
            _ => {}
        }
        if !ids.insert(id) {
            return Err(perr(line, format!("duplicate id {id}")));
        }
        points.push(DataPoint::new(id, coords));
    }
    if points.is_empty() {
        return Err(perr(0, "no points".into()));
    }
    validate(&points).map_err(|e| perr(0, e.to_string()))?;
    Ok(points)
}

/// Writes points with an `id,x0,x1,...` header; coordinates round-trip
/// exactly.
pub fn write_points(points: &[DataPoint], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    let dim = points.first().map_or(0, DataPoint::dim);
    let header: Vec<String> = (0..dim).map(|j| format!("x{j}")).collect();
    writeln!(out, "id,{}", header.join(",")).map_err(io)?;
    for p in points {
        write!(out, "{}", p.id).map_err(io)?;
        for c in &p.coords {
            write!(out, ",{c:?}").map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    out.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::points_from_rows;

    fn small_tree() -> CovTree {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.37).sin() * 3.0, (t * 1.3).cos() + t * 0.01]
            })
            .collect();
        CovTree::build(points_from_rows(rows), TreeConfig::default()).unwrap()
    }

    #[test]
    fn tree_round_trip() {
        let t = small_tree();
        let bytes = encode_tree(&t);
        assert_eq!(decode_tree(&bytes).unwrap(), t);
    }

    #[test]
    fn corrupt_inputs_are_rejected() {
        let bytes = encode_tree(&small_tree());
        assert!(decode_tree(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode_tree(&bad).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_tree(&extra).is_err());
        assert!(decode_tree(&[]).is_err());
    }

    #[test]
    fn csv_with_and_without_header() {
        let p = Path::new("mem.csv");
        let pts = parse_points("1.0,2.0\n3,4\n", p).unwrap();
        assert_eq!(pts[1], DataPoint::new(1, vec![3.0, 4.0]));
        let pts = parse_points("id,x,y\n# c\n10,1,2\n\n7,3,4\n", p).unwrap();
        assert_eq!(pts[0].id, 10);
        assert_eq!(pts[1], DataPoint::new(7, vec![3.0, 4.0]));
        let pts = parse_points("x,y\n1,2\n", p).unwrap();
        assert_eq!(pts[0], DataPoint::new(0, vec![1.0, 2.0]));
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let p = Path::new("mem.csv");
        match parse_points("1,2\n3,oops\n", p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_points("1,2\n3,4,5\n", p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_points("id,x\n1,2\n1,3\n", p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_points("", p).is_err());
        assert!(parse_points("1,nan\n", p).is_err());
    }
}
