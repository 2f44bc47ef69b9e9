mod common;

use std::process::Command;

use common::{gaussian, rng, uniform};
use covqt::codec::{load_tree, parse_points, read_points, save_tree, write_points};
use covqt::image::{sample_image, Image};
use covqt::{knn_find, CovTree, Error, TreeConfig};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn covqt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_covqt"))
}

#[test]
fn saved_tree_answers_queries_identically() {
    let dir = tempfile::tempdir().unwrap();
    let tree = CovTree::build(gaussian(3000, 3, 1), TreeConfig::default()).unwrap();
    let path = dir.path().join("t.cqt");
    save_tree(&tree, &path).unwrap();
    let back = load_tree(&path).unwrap();
    let mut r = rng(1);
    for _ in 0..50 {
        let q: Vec<f64> = (0..3).map(|_| r.random_range(-3.0..3.0)).collect();
        let a = knn_find(&tree, &q, 17, None).unwrap();
        let b = knn_find(&back, &q, 17, None).unwrap();
        assert_eq!(a.0.entries(), b.0.entries());
        assert_eq!(a.1, b.1);
    }
}

#[test]
fn truncated_tree_file_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let tree = CovTree::build(uniform(100, 2, 2), TreeConfig::default()).unwrap();
    let path = dir.path().join("t.cqt");
    save_tree(&tree, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    for cut in [0, 3, 10, bytes.len() / 2, bytes.len() - 1] {
        std::fs::write(&path, &bytes[..cut]).unwrap();
        assert!(matches!(load_tree(&path), Err(Error::Format { .. })), "cut {cut}");
    }
}

#[test]
fn point_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    let pts = gaussian(500, 4, 3);
    write_points(&pts, &path).unwrap();
    assert_eq!(read_points(&path).unwrap(), pts);
}

#[test]
fn malformed_point_files_report_the_line() {
    let cases = [
        ("1,2\n3,4,5\n", 2),
        ("x,y\n1,2\n1,nan\n", 3),
        ("# c\n1,2\n\n3,abc\n", 4),
        ("id,x,y\n1,0,0\n1,1,1\n", 3),
    ];
    for (text, line) in cases {
        match parse_points(text, std::path::Path::new("mem.csv")) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?} gave {other:?}"),
        }
    }
}

#[test]
fn gray_sampling_is_uniform() {
    let img = Image::new_gray(64, 64, vec![128; 64 * 64]).unwrap();
    let n = 32_000;
    let pts = sample_image(&img, n, 5).unwrap();
    let mut bins = [0usize; 64];
    for p in &pts {
        let (bx, by) = ((p.coords[0] / 8.0) as usize, (p.coords[1] / 8.0) as usize);
        bins[by * 8 + bx] += 1;
    }
    let expected = n as f64 / 64.0;
    let chi2: f64 = bins.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new(63.0).unwrap().inverse_cdf(0.99);
    assert!(chi2 < critical, "{chi2} >= {critical}");
}

#[test]
fn weighted_sampling_follows_brightness() {
    // left half three times brighter than the right
    let mut data = vec![0u8; 40 * 10];
    for (i, v) in data.iter_mut().enumerate() {
        *v = if i % 40 < 20 { 150 } else { 50 };
    }
    let img = Image::new_gray(40, 10, data).unwrap();
    let pts = sample_image(&img, 40_000, 6).unwrap();
    let left = pts.iter().filter(|p| p.coords[0] < 20.0).count() as f64 / 40_000.0;
    // binomial sd is about 0.002
    assert!((left - 0.75).abs() < 0.01, "{left}");
}

fn run(args: &[&str]) -> std::process::Output {
    covqt().args(args).output().unwrap()
}

#[test]
fn cli_build_and_query() {
    let dir = tempfile::tempdir().unwrap();
    let d = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let pts = uniform(400, 2, 7);
    write_points(&pts, d("p.csv")).unwrap();
    let out = run(&["build", "--points", &d("p.csv"), "--out", &d("t.cqt")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let q = format!("{},{}", pts[17].coords[0], pts[17].coords[1]);
    let out = run(&["knn", "--tree", &d("t.cqt"), "--query", &q, "-k", "1", "--out", &d("k.csv")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(d("k.csv")).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], "17");
    assert_eq!(row[3].parse::<f64>().unwrap(), 0.0);

    let out = run(&["aknn", "--tree", &d("t.cqt"), "--query", "0.5,0.5", "-k", "20", "--out", &d("a.csv")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(d("a.csv")).unwrap();
    assert!(text.lines().next().unwrap().contains("iterations"));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn cli_bench_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    write_points(&uniform(1000, 2, 8), d("p.csv")).unwrap();
    assert!(run(&["build", "--points", &d("p.csv"), "--out", &d("t.cqt")]).status.success());
    for name in ["a", "b"] {
        let out = run(&["bench", "--tree", &d("t.cqt"), "--k-list", "8:64:8", "--queries", "30", "--seed", "3", "--out", &d(name)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read(d("a.csv")).unwrap(), std::fs::read(d("b.csv")).unwrap());
    assert_eq!(std::fs::read(d("a.dat")).unwrap(), std::fs::read(d("b.dat")).unwrap());
}

#[test]
fn cli_rejects_bad_input_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let d = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    std::fs::write(d("bad.csv"), "1,2\n3,oops\n").unwrap();
    let out = run(&["build", "--points", &d("bad.csv"), "--out", &d("t.cqt")]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.csv") && err.contains('2'), "{err}");

    let out = run(&["build", "--points", &d("missing.csv"), "--out", &d("t.cqt")]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.csv"));

    std::fs::write(d("junk.cqt"), b"not a tree").unwrap();
    let out = run(&["knn", "--tree", &d("junk.cqt"), "--query", "0,0", "-k", "1"]);
    assert!(!out.status.success());

    let out = run(&["build", "--no-such-flag"]);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
}

#[test]
fn cli_samples_and_tessellates() {
    let dir = tempfile::tempdir().unwrap();
    let d = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let out = run(&["sample", "--galaxy", "--write-image", &d("g.ppm"), "-n", "300", "--seed", "1", "--out", &d("s.csv")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_points(d("s.csv")).unwrap().len(), 300);
    let out = run(&["tessellate", "--image", &d("g.ppm"), "--out", &d("t.ppm"), "--max-level", "3", "--dim-rule", "ratio:0.5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let img = Image::read(d("t.ppm")).unwrap();
    assert_eq!((img.width(), img.height()), (400, 300));
}
