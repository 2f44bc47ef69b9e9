//! Search-cost instrumentation: nodes visited per query and candidate
//! insertions per neighbor found, as functions of K.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::point::DataPoint;
use crate::search::knn_find;
use crate::tree::CovTree;

/// Smallest number of queries a sweep accepts.
pub const MIN_QUERIES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl Aggregate {
    pub fn of(values: &[f64]) -> Self {
        let (min, max, sum) = values.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, 0.0),
            |(lo, hi, s), &v| (lo.min(v), hi.max(v), s + v),
        );
        let mean = (sum / values.len() as f64).clamp(min, max);
        Self { min, mean, max }
    }

    pub fn spread(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub k: usize,
    pub nodes: Aggregate,
    /// Insertions per neighbor returned.
    pub candidates_per_neighbor: Aggregate,
    /// Wall time of the K step in seconds, when timing was requested.
    pub time_s: Option<f64>,
}

impl BenchRow {
    /// Mean search efficiency `K / C`.
    pub fn efficiency(&self) -> f64 {
        1.0 / self.candidates_per_neighbor.mean
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRun {
    pub dataset: String,
    pub queries: usize,
    pub rows: Vec<BenchRow>,
}

/// Query set: half drawn from the data, half uniform over its bounding box.
pub fn sample_queries(points: &[DataPoint], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let dim = points[0].dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in points {
        for (j, c) in p.coords.iter().enumerate() {
            lo[j] = lo[j].min(*c);
            hi[j] = hi[j].max(*c);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            if i % 2 == 0 {
                points[rng.random_range(0..points.len())].coords.clone()
            } else {
                lo.iter()
                    .zip(&hi)
                    .map(|(a, b)| a + (b - a) * rng.random::<f64>())
                    .collect()
            }
        })
        .collect()
}

/// Runs every query at every K and aggregates the search statistics.
pub fn sweep(
    tree: &CovTree,
    dataset: &str,
    queries: &[Vec<f64>],
    k_list: &[usize],
    timing: bool,
) -> Result<BenchRun> {
    if queries.len() < MIN_QUERIES {
        return Err(Error::InvalidArgument(format!(
            "a sweep needs at least {MIN_QUERIES} queries, got {}",
            queries.len()
        )));
    }
    if k_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("K list must be strictly ascending".into()));
    }
    let mut rows = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let start = Instant::now();
        let stats = queries
            .par_iter()
            .map(|q| knn_find(tree, q, k, None).map(|(list, s)| (list.len(), s)))
            .collect::<Result<Vec<_>>>()?;
        let elapsed = start.elapsed().as_secs_f64();
        let nodes: Vec<f64> = stats.iter().map(|(_, s)| s.nodes_visited as f64).collect();
        let cpn: Vec<f64> = stats
            .iter()
            .map(|(found, s)| s.insertions as f64 / *found as f64)
            .collect();
        rows.push(BenchRow {
            k,
            nodes: Aggregate::of(&nodes),
            candidates_per_neighbor: Aggregate::of(&cpn),
            time_s: timing.then_some(elapsed),
        });
    }
    Ok(BenchRun {
        dataset: dataset.to_string(),
        queries: queries.len(),
        rows,
    })
}

const CSV_HEADER: &str = "k,nodes_min,nodes_mean,nodes_max,cpn_min,cpn_mean,cpn_max,time_s";

/// Writes `<prefix>.csv` and a gnuplot-friendly `<prefix>.dat`; returns
/// both paths.
pub fn emit(run: &BenchRun, prefix: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
    let prefix = prefix.as_ref();
    let csv = prefix.with_extension("csv");
    let dat = prefix.with_extension("dat");
    write_text(&csv, &to_csv(run))?;
    write_text(&dat, &to_dat(run))?;
    Ok((csv, dat))
}

pub fn to_csv(run: &BenchRun) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in &run.rows {
        let time = r.time_s.map(|t| t.to_string()).unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.k,
            r.nodes.min,
            r.nodes.mean,
            r.nodes.max,
            r.candidates_per_neighbor.min,
            r.candidates_per_neighbor.mean,
            r.candidates_per_neighbor.max,
            time
        ));
    }
    s
}

fn to_dat(run: &BenchRun) -> String {
    let mut s = format!(
        "# dataset: {}\n# queries per K: {}\n# k nodes_min nodes_mean nodes_max cpn_min cpn_mean cpn_max time_s\n",
        run.dataset, run.queries
    );
    for r in &run.rows {
        let time = r.time_s.map_or_else(|| "NaN".to_string(), |t| t.to_string());
        s.push_str(&format!(
            "{} {} {} {} {} {} {} {}\n",
            r.k,
            r.nodes.min,
            r.nodes.mean,
            r.nodes.max,
            r.candidates_per_neighbor.min,
            r.candidates_per_neighbor.mean,
            r.candidates_per_neighbor.max,
            time
        ));
    }
    s
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Reads rows back from a CSV written by [`emit`].
pub fn parse_csv(path: impl AsRef<Path>) -> Result<Vec<BenchRow>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let perr = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => return Err(perr(1, "missing benchmark header".into())),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 8 {
                return Err(perr(i + 1, format!("expected 8 fields, got {}", f.len())));
            }
            let num = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| perr(i + 1, format!("invalid number {s:?}")))
            };
            Ok(BenchRow {
                k: f[0]
                    .parse()
                    .map_err(|_| perr(i + 1, format!("invalid K {:?}", f[0])))?,
                nodes: Aggregate {
                    min: num(f[1])?,
                    mean: num(f[2])?,
                    max: num(f[3])?,
                },
                candidates_per_neighbor: Aggregate {
                    min: num(f[4])?,
                    mean: num(f[5])?,
                    max: num(f[6])?,
                },
                time_s: if f[7].is_empty() { None } else { Some(num(f[7])?) },
            })
        })
        .collect()
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation, ties given average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// One-sided p-value for a positive rank correlation `rho` over `n` pairs,
/// via the t approximation with `n - 2` degrees of freedom.
pub fn spearman_p_positive(rho: f64, n: usize) -> f64 {
    if n < 3 {
        return 1.0;
    }
    if rho >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    1.0 - dist.cdf(t)
}

/// Least-squares slope of `y` against `ln x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
