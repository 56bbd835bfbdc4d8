use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use snowlab_core::graph::fixtures;
use snowlab_core::io;

fn workdir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn snowlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snowlab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("run snowlab")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = snowlab(dir, args);
    assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn sidecar(path: &Path) -> io::ComplexSidecar {
    io::parse_complex(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_records_face_counts() {
    let dir = workdir("generate");
    ok(&dir, &["generate", "--kind", "cube", "--level", "0", "--out", "g"]);
    let g = io::parse_graph(&fs::read_to_string(dir.join("g/cube-0.graph")).unwrap()).unwrap();
    assert_eq!(g.vertex_count(), 8);
    ok(&dir, &["generate", "--kind", "cube", "--level", "2", "--out", "g"]);
    assert_eq!(sidecar(&dir.join("g/cube-2.complex")).faces.len(), 1014);
    ok(&dir, &["generate", "--kind", "dodecahedron", "--level", "1", "--out", "g"]);
    assert_eq!(sidecar(&dir.join("g/dodecahedron-1.complex")).faces.len(), 72);
    assert!(dir.join("g/cube-2.manifest").exists());
    assert!(dir.join("g/dodecahedron-1.manifest").exists());
}

#[test]
fn exit_codes() {
    let dir = workdir("exit_codes");
    let o = snowlab(&dir, &["generate", "--kind", "cube", "--level", "6"]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource guard"));
    assert_eq!(code(&snowlab(&dir, &["generate", "--kind", "icosahedron", "--level", "1"])), 2);
    assert_eq!(code(&snowlab(&dir, &["pack", "--graph", "missing.graph"])), 2);
    fs::write(dir.join("bad.graph"), "snowlab-graph\nversion 1\nvertex_count 2\nadjacency\n1\n").unwrap();
    assert_eq!(code(&snowlab(&dir, &["pack", "--graph", "bad.graph"])), 2);

    ok(&dir, &["generate", "--kind", "cube", "--level", "1", "--out", "g"]);
    let o = snowlab(&dir, &["analyze", "--graph", "g/cube-1.graph", "--suite", "qs"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("packing"));
    let o = snowlab(&dir, &["analyze", "--graph", "g/cube-1.graph", "--suite", "volume", "--radii", "2,x"]);
    assert_eq!(code(&o), 2);

    let o = snowlab(&dir, &["pack", "--graph", "g/cube-1.graph", "--tol", "1e-300", "--out", "p"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!dir.join("p/packing.txt").exists());
}

#[test]
fn pack_small_disks() {
    let dir = workdir("pack");
    fs::write(dir.join("flower.graph"), io::graph_to_string(&fixtures::wheel(6))).unwrap();
    ok(&dir, &["pack", "--graph", "flower.graph", "--svg", "--out", "flower"]);
    let rec = io::parse_packing(&fs::read_to_string(dir.join("flower/packing.txt")).unwrap()).unwrap();
    for r in &rec.radii {
        assert!((r - 1.0).abs() < 1e-9, "{r}");
    }
    assert!(fs::read_to_string(dir.join("flower/packing.svg")).unwrap().starts_with("<svg"));

    fs::write(dir.join("tetra.graph"), io::graph_to_string(&fixtures::wheel(3))).unwrap();
    ok(&dir, &["pack", "--graph", "tetra.graph", "--out", "tetra"]);
    let rec = io::parse_packing(&fs::read_to_string(dir.join("tetra/packing.txt")).unwrap()).unwrap();
    let interior: Vec<usize> = (0..4).filter(|v| !rec.boundary.contains(v)).collect();
    assert_eq!(interior.len(), 1);
    let want = 2.0 / 3f64.sqrt() - 1.0;
    assert!((rec.radii[interior[0]] - want).abs() < 1e-6);
}

#[test]
fn snowball_pack_reports_embedding() {
    let dir = workdir("embedding");
    ok(&dir, &["generate", "--kind", "cube", "--level", "2", "--out", "g"]);
    let out = ok(&dir, &["pack", "--graph", "g/cube-2.graph", "--out", "p"]);
    assert!(out.contains("embedding:"));
    let csv = fs::read_to_string(dir.join("p/embedding.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("run_hash,"));
    let tri = io::parse_graph(&fs::read_to_string(dir.join("p/triangulation.graph")).unwrap()).unwrap();
    assert_eq!(tri.vertex_count(), 1016 + 1014);
}

#[test]
fn manifests_reproduce_bytes() {
    let dir = workdir("replay");
    ok(&dir, &["generate", "--kind", "cube", "--level", "2", "--out", "g"]);
    ok(&dir, &["pack", "--graph", "g/cube-2.graph", "--out", "p"]);
    let args = |out: &'static str| {
        vec![
            "analyze", "--graph", "g/cube-2.graph", "--packing", "p/packing.txt", "--suite", "all", "--seed", "7",
            "--trials", "200", "--out", out,
        ]
    };
    ok(&dir, &args("a"));
    ok(&dir, &args("b"));
    let names: Vec<String> = fs::read_dir(dir.join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(names.iter().any(|n| n == "qs.csv") && names.iter().any(|n| n == "walk_exit.csv"));
    for n in &names {
        assert_eq!(fs::read(dir.join("a").join(n)).unwrap(), fs::read(dir.join("b").join(n)).unwrap(), "{n}");
    }
    let manifest = fs::read_to_string(dir.join("a/analyze.manifest")).unwrap();
    let hash = manifest.lines().last().unwrap().strip_prefix("run_hash ").unwrap();
    for n in names.iter().filter(|n| n.ends_with(".csv")) {
        let csv = fs::read_to_string(dir.join("a").join(n)).unwrap();
        assert!(csv.lines().skip(1).all(|l| l.starts_with(hash)), "{n}");
    }

    let out = ok(&dir, &["replay", "a/analyze.manifest", "--out", "c"]);
    assert!(out.contains("reproduced"));
    assert_eq!(fs::read(dir.join("a/qs.csv")).unwrap(), fs::read(dir.join("c/qs.csv")).unwrap());
    ok(&dir, &["replay", "g/cube-2.manifest", "--out", "g2"]);
    ok(&dir, &["replay", "p/pack.manifest", "--out", "p2"]);

    let other_seed = ok(&dir, &[
        "analyze", "--graph", "g/cube-2.graph", "--suite", "walk", "--seed", "8", "--trials", "200", "--out", "d",
    ]);
    assert!(other_seed.contains("walk dimension"));
    assert_ne!(
        fs::read(dir.join("a/walk_exit.csv")).unwrap(),
        fs::read(dir.join("d/walk_exit.csv")).unwrap()
    );

    let mut g = fs::read_to_string(dir.join("g/cube-2.graph")).unwrap();
    g.push('\n');
    fs::write(dir.join("g/cube-2.graph"), g).unwrap();
    assert_eq!(code(&snowlab(&dir, &["replay", "a/analyze.manifest", "--out", "e"])), 2);
}

#[test]
fn path_capacity_reports_log_law_failure() {
    let dir = workdir("path");
    fs::write(dir.join("path.graph"), io::graph_to_string(&fixtures::path(201))).unwrap();
    let out = ok(&dir, &[
        "analyze", "--graph", "path.graph", "--suite", "capacity", "--center", "100", "--radii", "8",
    ]);
    assert!(out.contains("log law fails"), "{out}");
    assert!(dir.join("capacity.csv").exists());
}

#[test]
fn heat_kernel_dump() {
    let dir = workdir("dump");
    ok(&dir, &["generate", "--kind", "cube", "--level", "2", "--out", "g"]);
    ok(&dir, &[
        "analyze", "--graph", "g/cube-2.graph", "--suite", "walk", "--trials", "100", "--heat-steps", "200", "--dump",
    ]);
    let bytes = fs::read(dir.join("heat_kernel.bin")).unwrap();
    let (n, dist) = io::read_distribution(&mut bytes.as_slice()).unwrap();
    assert_eq!(n, 200);
    assert_eq!(dist.len(), 1016);
    assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}
