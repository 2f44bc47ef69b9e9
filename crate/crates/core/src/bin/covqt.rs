use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use covqt::bench::{emit, sample_queries, sweep};
use covqt::codec::{load_tree, read_points, save_tree, write_points};
use covqt::density::{render_with, DensityEstimator, GridSpec};
use covqt::image::{sample_image, Image};
use covqt::synth::SpiralGalaxy;
use covqt::tessellate::{tessellate, TessellationConfig};
use covqt::{anisotropic_knn, knn_find, BootstrapConfig, CovTree, DataPoint, DimRule, TreeConfig};

#[derive(Parser)]
#[command(name = "covqt", version, about = "Covariance hyper-quadtree tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct TreeOpts {
    /// `spacing` or `ratio:<t>`
    #[arg(long, default_value = "spacing", value_parser = parse_dim_rule)]
    dim_rule: DimRule,
    #[arg(long, default_value_t = 64)]
    max_depth: usize,
    #[arg(long, default_value_t = 1)]
    leaf_capacity: usize,
}

impl TreeOpts {
    fn config(&self) -> TreeConfig {
        TreeConfig {
            dim_rule: self.dim_rule,
            leaf_capacity: self.leaf_capacity,
            max_depth: self.max_depth,
            ..TreeConfig::default()
        }
    }
}

#[derive(Args)]
struct QueryOpts {
    #[arg(long)]
    tree: PathBuf,
    /// CSV point file of queries.
    #[arg(long, conflicts_with = "query", required_unless_present = "query")]
    queries: Option<PathBuf>,
    /// A single comma-separated query point.
    #[arg(long, value_parser = parse_coords)]
    query: Option<Coords>,
    #[arg(short, long)]
    k: usize,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl QueryOpts {
    fn load(&self) -> anyhow::Result<(CovTree, Vec<DataPoint>)> {
        let tree = load_tree(&self.tree)?;
        let queries = match (&self.queries, &self.query) {
            (Some(p), _) => read_points(p)?,
            (None, Some(c)) => vec![DataPoint::new(0, c.0.clone())],
            (None, None) => bail!("give --queries or --query"),
        };
        Ok((tree, queries))
    }

    fn sink(&self) -> anyhow::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(std::io::stdout().lock())),
        })
    }
}

#[derive(Args)]
struct BootOpts {
    #[arg(long, default_value_t = 1e-19)]
    tolerance: f64,
    #[arg(long, default_value_t = 50)]
    max_iterations: usize,
}

impl BootOpts {
    fn config(&self) -> BootstrapConfig {
        BootstrapConfig {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a tree from a CSV point file and save it.
    Build {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        tree: TreeOpts,
    },
    /// Euclidean K nearest neighbors, one CSV row per neighbor.
    Knn {
        #[command(flatten)]
        q: QueryOpts,
    },
    /// Anisotropic K nearest neighbors with a bootstrapped metric.
    Aknn {
        #[command(flatten)]
        q: QueryOpts,
        #[command(flatten)]
        boot: BootOpts,
    },
    /// Render an anisotropic density field of a 2D tree.
    Density {
        #[arg(long)]
        tree: PathBuf,
        #[arg(short, long)]
        k: usize,
        /// `<width>x<height>`
        #[arg(long, default_value = "256x256", value_parser = parse_size)]
        grid: (usize, usize),
        /// `x0,y0,x1,y1`; defaults to the data bounding box.
        #[arg(long, value_parser = parse_coords)]
        extent: Option<Coords>,
        /// Normalization count; defaults to the number of points.
        #[arg(long)]
        n_total: Option<usize>,
        /// Output PGM.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        boot: BootOpts,
    },
    /// Tessellate a PPM/PGM image and write the mean-color rendering.
    Tessellate {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        tolerance: f64,
        #[arg(long, default_value_t = 8)]
        max_level: usize,
        #[arg(long, default_value = "spacing", value_parser = parse_dim_rule)]
        dim_rule: DimRule,
        /// Draw cell outlines.
        #[arg(long)]
        outline: bool,
    },
    /// Sweep K and record search cost.
    Bench {
        #[arg(long)]
        tree: PathBuf,
        /// `start:stop:step` or a comma list.
        #[arg(long, default_value = "8:512:8")]
        k_list: String,
        #[arg(long, default_value_t = 100)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output prefix; `.csv` and `.dat` are appended.
        #[arg(long)]
        out: PathBuf,
        /// Record wall time per K (makes the output non-reproducible).
        #[arg(long)]
        time: bool,
    },
    /// Draw points from an image's pixel intensities.
    Sample {
        #[arg(long, conflicts_with = "galaxy", required_unless_present = "galaxy")]
        image: Option<PathBuf>,
        /// Use the built-in spiral galaxy instead of an image file.
        #[arg(long)]
        galaxy: bool,
        /// Also write the source image (useful with --galaxy).
        #[arg(long)]
        write_image: Option<PathBuf>,
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_dim_rule(s: &str) -> Result<DimRule, String> {
    match s.split_once(':') {
        None if s == "spacing" => Ok(DimRule::Spacing),
        Some(("ratio", t)) => t
            .parse::<f64>()
            .map(DimRule::Ratio)
            .map_err(|e| format!("bad ratio {t:?}: {e}")),
        _ => Err(format!("expected `spacing` or `ratio:<t>`, got {s:?}")),
    }
}

#[derive(Clone, Debug)]
struct Coords(Vec<f64>);

fn parse_coords(s: &str) -> Result<Coords, String> {
    s.split(',')
        .map(|f| f.trim().parse::<f64>().map_err(|e| format!("bad number {f:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(Coords)
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once('x').ok_or("expected <width>x<height>")?;
    Ok((
        w.parse().map_err(|e| format!("bad width: {e}"))?,
        h.parse().map_err(|e| format!("bad height: {e}"))?,
    ))
}

fn parse_k_list(s: &str) -> anyhow::Result<Vec<usize>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let [a, b, step] = [parts[0], parts[1], parts[2]].map(|p| p.parse::<usize>());
        let (a, b, step) = (a?, b?, step?);
        if step == 0 {
            bail!("K step must be positive");
        }
        return Ok((a..=b).step_by(step).collect());
    }
    s.split(',')
        .map(|f| f.trim().parse::<usize>().with_context(|| format!("bad K {f:?}")))
        .collect()
}

fn bounding_box(tree: &CovTree) -> [f64; 4] {
    tree.points().iter().fold(
        [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY],
        |[a, b, c, d], p| {
            [
                a.min(p.coords[0]),
                b.min(p.coords[1]),
                c.max(p.coords[0]),
                d.max(p.coords[1]),
            ]
        },
    )
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Build { points, out, tree } => {
            let pts = read_points(&points)?;
            let t = CovTree::build(pts, tree.config())?;
            save_tree(&t, &out)?;
            let c = t.census();
            println!(
                "points={} nodes={} leaves={} depth={}",
                t.len(),
                c.nodes,
                c.leaves,
                c.max_depth
            );
        }
        Command::Knn { q } => {
            let (t, queries) = q.load()?;
            let mut out = q.sink()?;
            writeln!(out, "query_id,rank,neighbor_id,dist,nodes_visited,insertions")?;
            for query in &queries {
                let (list, stats) = knn_find(&t, &query.coords, q.k, None)?;
                for (rank, n) in list.entries().iter().enumerate() {
                    writeln!(
                        out,
                        "{},{},{},{:?},{},{}",
                        query.id, rank, n.id, n.dist, stats.nodes_visited, stats.insertions
                    )?;
                }
            }
            out.flush()?;
        }
        Command::Aknn { q, boot } => {
            let (t, queries) = q.load()?;
            let mut out = q.sink()?;
            let evs: Vec<String> = (0..t.dim()).map(|j| format!(",eigenvalue_{j}")).collect();
            writeln!(
                out,
                "query_id,rank,neighbor_id,dist_sq,nodes_visited,insertions,iterations,converged{}",
                evs.concat()
            )?;
            for query in &queries {
                let r = anisotropic_knn(&t, &query.coords, q.k, &boot.config())?;
                let evs: Vec<String> = r.metric.eig().values.iter().map(|v| format!(",{v:?}")).collect();
                for (rank, n) in r.list.entries().iter().enumerate() {
                    writeln!(
                        out,
                        "{},{},{},{:?},{},{},{},{}{}",
                        query.id,
                        rank,
                        n.id,
                        n.dist,
                        r.total_stats.nodes_visited,
                        r.total_stats.insertions,
                        r.iterations,
                        r.converged,
                        evs.concat()
                    )?;
                }
            }
            out.flush()?;
        }
        Command::Density {
            tree,
            k,
            grid,
            extent,
            n_total,
            out,
            csv,
            boot,
        } => {
            let t = load_tree(&tree)?;
            let extent = match extent.map(|c| c.0) {
                Some(e) if e.len() == 4 => [e[0], e[1], e[2], e[3]],
                Some(e) => bail!("extent needs 4 numbers, got {}", e.len()),
                None if t.dim() == 2 => bounding_box(&t),
                None => bail!("density needs a 2D tree, got dimension {}", t.dim()),
            };
            let spec = GridSpec::new(grid.0, grid.1, extent)?;
            let est = DensityEstimator::new(&t, k, n_total.unwrap_or(t.len()))?
                .with_bootstrap(boot.config());
            let field = render_with(&est, spec)?;
            field.write_pgm(&out)?;
            if let Some(csv) = csv {
                field.write_csv(csv)?;
            }
            println!("integral={} max={}", field.integral, field.max());
        }
        Command::Tessellate {
            image,
            out,
            tolerance,
            max_level,
            dim_rule,
            outline,
        } => {
            let img = Image::read(&image)?;
            let tess = tessellate(
                &img,
                TessellationConfig {
                    tolerance,
                    dim_rule,
                    max_level,
                },
            )?;
            let rendered = if outline {
                tess.render_outlined([255, 255, 255])
            } else {
                tess.render()
            };
            rendered.write(&out)?;
            println!("leaves={}", tess.leaf_count());
        }
        Command::Bench {
            tree,
            k_list,
            queries,
            seed,
            out,
            time,
        } => {
            let t = load_tree(&tree)?;
            let ks = parse_k_list(&k_list)?;
            let qs = sample_queries(t.points(), queries, seed);
            let name = tree.display().to_string();
            let run = sweep(&t, &name, &qs, &ks, time)?;
            let (csv, dat) = emit(&run, &out)?;
            println!("wrote {} and {}", csv.display(), dat.display());
        }
        Command::Sample {
            image,
            galaxy,
            write_image,
            n,
            seed,
            out,
        } => {
            let img = match image {
                Some(p) => Image::read(p)?,
                None if galaxy => SpiralGalaxy::m51_like().render(),
                None => bail!("give --image or --galaxy"),
            };
            if let Some(p) = write_image {
                img.write(p)?;
            }
            let pts = sample_image(&img, n, seed)?;
            write_points(&pts, &out)?;
            println!("wrote {} points", pts.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    covqt::init_threads_from_env();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
