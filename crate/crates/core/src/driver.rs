//! The generate → pack → analyze pipeline behind the command-line tool.
//!
//! Every command writes its files into an output directory together with a
//! manifest recording parameters, input digests and output
//! digests. Replaying a manifest reruns the command and compares bytes.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fit::{fit_power_law, ExponentFit};
use crate::graph::PlanarGraph;
use crate::io::{self, fmt_f64, ComplexSidecar, CsvTable, PackingRecord};
use crate::manifest::{sha256_hex, RunManifest};
use crate::packing::{self, DiskTriangulation, LengthMetric, Packing};
use crate::potential;
use crate::qs::{self, MetricPair, TrustRegion};
use crate::subdivision::{self, BaseKind};
use crate::walk::{self, WalkConfig};

pub const DEFAULT_TRIALS: usize = 2000;
pub const DEFAULT_HEAT_STEPS: usize = 1000;
pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;
/// Adjacent-length ratio and flat-angle margin used for the embedding report.
pub const EMBEDDING_RATIO: f64 = 200.0;
pub const EMBEDDING_ETA: f64 = 0.05;
pub const ANNULAR_C_L: f64 = 8.0;
/// Number of trusted centers sampled by the distortion suite.
pub const QS_CENTERS: usize = 60;
pub const LOEWNER_CENTERS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Volume,
    Capacity,
    Walk,
    Qs,
    Loewner,
    All,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }

    pub fn needs_packing(self) -> bool {
        matches!(self, Suite::Qs | Suite::Loewner | Suite::All)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Volume => "volume",
            Suite::Capacity => "capacity",
            Suite::Walk => "walk",
            Suite::Qs => "qs",
            Suite::Loewner => "loewner",
            Suite::All => "all",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "volume" => Suite::Volume,
            "capacity" => Suite::Capacity,
            "walk" => Suite::Walk,
            "qs" => Suite::Qs,
            "loewner" => Suite::Loewner,
            "all" => Suite::All,
            other => return Err(Error::invalid(format!("unknown suite {other:?}"))),
        })
    }
}

/// What a command did: the manifest it wrote and a human summary.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
    pub lines: Vec<String>,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read(path)?).map_err(|_| Error::invalid(format!("{} is not UTF-8", path.display())))
}

/// Collects output files, writing them once the run has succeeded.
struct Outputs {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    fn add(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), bytes.into()));
    }

    fn commit(self, manifest: &mut RunManifest) -> Result<PathBuf> {
        let name = format!("{}.manifest", manifest.command);
        self.commit_as(manifest, &name)
    }

    fn commit_as(self, manifest: &mut RunManifest, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        for (name, bytes) in &self.files {
            fs::write(self.dir.join(name), bytes)?;
            manifest.output(name, bytes);
        }
        let path = self.dir.join(name);
        fs::write(&path, manifest.to_text())?;
        Ok(path)
    }
}

/// Builds the level graph and writes `<kind>-<level>.graph` and
/// `<kind>-<level>.complex`.
pub fn generate(kind: BaseKind, level: u32, max_level: u32, out_dir: &Path) -> Result<RunSummary> {
    let mut manifest = RunManifest::new("generate");
    manifest.param("kind", kind);
    manifest.param("level", level);
    manifest.param("max_level", max_level);
    let (complex, base) = subdivision::level_graph_guarded(kind, level, max_level)?;
    let stem = format!("{kind}-{level}");
    let mut out = Outputs::new(out_dir);
    out.add(&format!("{stem}.graph"), io::graph_to_string(&complex.graph));
    out.add(&format!("{stem}.complex"), io::complex_to_string(&ComplexSidecar::from(&complex)));
    let lines = vec![
        format!("{kind} level {level}"),
        format!("vertices {}", complex.vertex_count),
        format!("edges {}", complex.graph.edge_count()),
        format!("faces {}", complex.face_count()),
        format!("base point {}", base.0),
    ];
    let manifest_path = out.commit_as(&mut manifest, &format!("{stem}.manifest"))?;
    Ok(RunSummary {
        manifest,
        manifest_path,
        lines,
    })
}

/// The sidecar next to a graph file, if present.
fn sidecar_for(graph_path: &Path) -> Result<Option<(ComplexSidecar, Vec<u8>)>> {
    let path = graph_path.with_extension("complex");
    if !path.exists() {
        return Ok(None);
    }
    let bytes = read(&path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::invalid("sidecar is not UTF-8"))?;
    Ok(Some((io::parse_complex(&text)?, bytes)))
}

/// Chooses the disk to pack: a map with a single non-triangular face loses
/// that face; a triangulated sphere loses the face antipodal to `base`;
/// anything else is barycenter-triangulated first.
pub fn disk_for(g: &PlanarGraph, base: usize) -> Result<DiskTriangulation> {
    let faces = g.faces();
    let large: Vec<usize> = (0..faces.len()).filter(|&f| faces.faces[f].len() != 3).collect();
    match large.len() {
        0 => DiskTriangulation::with_antipodal_face(g.clone(), base),
        1 => DiskTriangulation::new(g.clone(), large[0]),
        _ => DiskTriangulation::with_antipodal_face(g.face_barycenter_triangulation()?, base),
    }
}

/// Packs the graph and writes `triangulation.graph`, `packing.txt`,
/// `embedding.csv` and optionally `packing.svg`.
pub fn pack(graph_path: &Path, tol: f64, svg: bool, out_dir: &Path) -> Result<RunSummary> {
    let bytes = read(graph_path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::invalid("graph file is not UTF-8"))?;
    let g = io::parse_graph(&text)?;
    let mut manifest = RunManifest::new("pack");
    manifest.param("tol", fmt_f64(tol));
    manifest.param("svg", svg);
    manifest.input("graph", &graph_path.display().to_string(), &bytes);
    let base = match sidecar_for(graph_path)? {
        Some((side, side_bytes)) => {
            manifest.input("complex", &graph_path.with_extension("complex").display().to_string(), &side_bytes);
            side.base_point
        }
        None => 0,
    };
    if base >= g.vertex_count() {
        return Err(Error::invalid(format!("base point {base} out of range")));
    }
    let disk = disk_for(&g, base)?;
    let packing = Packing::compute(disk, 1.0, tol)?;
    let run_hash = manifest.run_hash();

    let tri_text = io::graph_to_string(packing.graph());
    let tri_sha = sha256_hex(tri_text.as_bytes());
    let record = PackingRecord::from_packing(&packing, "triangulation.graph", &tri_sha);
    let report = packing::check_good_embedding(&packing, EMBEDDING_RATIO, EMBEDDING_ETA);
    let mut table = CsvTable::new(&[
        "run_hash",
        "vertices",
        "sweeps",
        "newton_steps",
        "angle_residual",
        "tangency_residual",
        "max_angle",
        "max_adjacent_length_ratio",
        "max_adjacent_radius_ratio",
        "ratio_bound",
        "eta",
        "pass",
    ]);
    table.push(vec![
        run_hash.clone(),
        packing.graph().vertex_count().to_string(),
        packing.sweeps.to_string(),
        packing.newton_steps.to_string(),
        fmt_f64(packing.angle_residual),
        fmt_f64(packing.tangency_residual()),
        fmt_f64(report.max_angle),
        fmt_f64(report.max_adjacent_length_ratio),
        fmt_f64(report.max_adjacent_radius_ratio),
        fmt_f64(EMBEDDING_RATIO),
        fmt_f64(EMBEDDING_ETA),
        report.pass.to_string(),
    ]);
    let mut out = Outputs::new(out_dir);
    out.add("triangulation.graph", tri_text);
    out.add("packing.txt", io::packing_to_string(&record));
    out.add("embedding.csv", table.to_csv());
    if svg {
        out.add("packing.svg", packing::packing_svg(&packing));
    }
    let lines = vec![
        format!("packed {} vertices ({} boundary)", packing.graph().vertex_count(), packing.triangulation.boundary.len()),
        format!("sweeps {} newton steps {}", packing.sweeps, packing.newton_steps),
        format!("angle residual {:e}", packing.angle_residual),
        format!("tangency residual {:e}", packing.tangency_residual()),
        format!(
            "embedding: max angle {:.6} max length ratio {:.3} max radius ratio {:.3} pass {}",
            report.max_angle, report.max_adjacent_length_ratio, report.max_adjacent_radius_ratio, report.pass
        ),
    ];
    let manifest_path = out.commit(&mut manifest)?;
    Ok(RunSummary {
        manifest,
        manifest_path,
        lines,
    })
}

/// A packing file with its triangulation loaded and checked.
pub struct LoadedPacking {
    pub record: PackingRecord,
    pub graph: PlanarGraph,
    pub metric: LengthMetric,
    packing_bytes: Vec<u8>,
    triangulation_bytes: Vec<u8>,
    triangulation_path: PathBuf,
}

pub fn load_packing(path: &Path) -> Result<LoadedPacking> {
    let packing_bytes = read(path)?;
    let text = String::from_utf8(packing_bytes.clone()).map_err(|_| Error::invalid("packing file is not UTF-8"))?;
    let record = io::parse_packing(&text)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let triangulation_path = dir.join(&record.triangulation_file);
    let triangulation_bytes = read(&triangulation_path)?;
    if sha256_hex(&triangulation_bytes) != record.triangulation_sha256 {
        return Err(Error::invalid("triangulation file does not match the packing's digest"));
    }
    let graph = io::parse_graph(&read_text(&triangulation_path)?)?;
    if graph.vertex_count() != record.centers.len() {
        return Err(Error::invalid("packing and triangulation disagree on the vertex count"));
    }
    let metric = LengthMetric::from_positions(graph.clone(), &record.centers)?;
    Ok(LoadedPacking {
        record,
        graph,
        metric,
        packing_bytes,
        triangulation_bytes,
        triangulation_path,
    })
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub suite: Suite,
    pub seed: u64,
    pub radii: Option<Vec<u32>>,
    pub center: Option<usize>,
    pub trials: usize,
    pub heat_steps: usize,
    pub dump: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            suite: Suite::All,
            seed: 0,
            radii: None,
            center: None,
            trials: DEFAULT_TRIALS,
            heat_steps: DEFAULT_HEAT_STEPS,
            dump: false,
        }
    }
}

fn join_radii(radii: &[u32]) -> String {
    radii.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse_radii(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .ok()
                .filter(|&r| r > 0)
                .ok_or_else(|| Error::invalid(format!("bad radius {t:?}")))
        })
        .collect()
}

/// `8, 16, ...` up to half the eccentricity, starting lower on small graphs.
fn default_radii(ecc: u32) -> Vec<u32> {
    for start in [8u32, 4, 2, 1] {
        let radii: Vec<u32> = (0..).map(|k| start << k).take_while(|&r| 2 * r <= ecc).collect();
        if radii.len() >= 3 {
            return radii;
        }
    }
    (1..=ecc.max(1)).collect()
}

fn fit_row(table: &mut CsvTable, run_hash: &str, quantity: &str, fit: &ExponentFit) {
    table.push(vec![
        run_hash.to_string(),
        quantity.to_string(),
        fmt_f64(fit.exponent),
        fmt_f64(fit.log_prefactor),
        fmt_f64(fit.r_squared),
        fmt_f64(fit.window.0),
        fmt_f64(fit.window.1),
        fit.points.to_string(),
    ]);
}

/// Runs the selected suites and writes their CSV reports.
pub fn analyze(graph_path: &Path, packing_path: Option<&Path>, opts: &AnalyzeOptions, out_dir: &Path) -> Result<RunSummary> {
    if opts.suite.needs_packing() && packing_path.is_none() {
        return Err(Error::invalid(format!("suite {} needs a packing (--packing)", opts.suite)));
    }
    if opts.trials == 0 || opts.heat_steps < 10 {
        return Err(Error::invalid("need at least one trial and ten heat-kernel steps"));
    }
    let bytes = read(graph_path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::invalid("graph file is not UTF-8"))?;
    let g = io::parse_graph(&text)?;
    let mut manifest = RunManifest::new("analyze");
    manifest.input("graph", &graph_path.display().to_string(), &bytes);
    let sidecar = sidecar_for(graph_path)?;
    if let Some((_, side_bytes)) = &sidecar {
        manifest.input("complex", &graph_path.with_extension("complex").display().to_string(), side_bytes);
    }
    let loaded = match packing_path {
        Some(p) => {
            let l = load_packing(p)?;
            manifest.input("packing", &p.display().to_string(), &l.packing_bytes);
            manifest.input("triangulation", &l.triangulation_path.display().to_string(), &l.triangulation_bytes);
            Some(l)
        }
        None => None,
    };
    let center = opts.center.or(sidecar.as_ref().map(|(s, _)| s.base_point)).unwrap_or(0);
    if center >= g.vertex_count() {
        return Err(Error::invalid(format!("center {center} out of range")));
    }
    let ecc = g.eccentricity(center);
    let radii = match &opts.radii {
        Some(r) => r.clone(),
        None => default_radii(ecc),
    };
    manifest.param("suite", opts.suite);
    manifest.param("seed", opts.seed);
    manifest.param("radii", opts.radii.as_deref().map_or("auto".to_string(), join_radii));
    manifest.param("center", opts.center.map_or("auto".to_string(), |c| c.to_string()));
    manifest.param("trials", opts.trials);
    manifest.param("heat_steps", opts.heat_steps);
    manifest.param("dump", opts.dump);
    let run_hash = manifest.run_hash();
    let h = run_hash.as_str();

    let mut out = Outputs::new(out_dir);
    let mut lines = vec![format!("center {center} eccentricity {ecc} run {}", &run_hash[..16])];
    let mut fits = CsvTable::new(&[
        "run_hash",
        "quantity",
        "exponent",
        "log_prefactor",
        "r_squared",
        "window_min",
        "window_max",
        "points",
    ]);

    let volume_fit = if opts.suite.includes(Suite::Volume) || opts.suite.includes(Suite::Walk) {
        let usable: Vec<u32> = radii.iter().copied().filter(|&r| r >= 2 && r <= ecc).collect();
        let sizes = g.ball_sizes(center, &usable);
        let fit = g.volume_growth_fit(center, &usable).ok();
        if opts.suite.includes(Suite::Volume) {
            let mut table = CsvTable::new(&["run_hash", "center", "radius", "ball_size"]);
            for (r, s) in usable.iter().zip(&sizes) {
                table.push(vec![h.to_string(), center.to_string(), r.to_string(), s.to_string()]);
            }
            out.add("volume.csv", table.to_csv());
            match &fit {
                Some(f) => {
                    fit_row(&mut fits, h, "volume", f);
                    lines.push(format!("volume exponent {:.4} (r² {:.4})", f.exponent, f.r_squared));
                }
                None => lines.push("volume exponent: not enough radii".to_string()),
            }
        }
        fit
    } else {
        None
    };

    if opts.suite.includes(Suite::Capacity) {
        let r0 = radii.iter().copied().min().unwrap_or(1);
        let scan = potential::annulus_capacity_scan(&g, center, r0, &[1, 2, 3, 4])?;
        let mut table = CsvTable::new(&[
            "run_hash",
            "center",
            "r",
            "k",
            "outer_radius",
            "capacity",
            "k_capacity",
            "trusted",
            "iterations",
            "residual",
        ]);
        for row in &scan.rows {
            table.push(vec![
                h.to_string(),
                center.to_string(),
                r0.to_string(),
                row.k.to_string(),
                row.outer_radius.to_string(),
                row.capacity.map_or("nan".into(), fmt_f64),
                row.product.map_or("nan".into(), fmt_f64),
                row.trusted.to_string(),
                row.iterations.to_string(),
                fmt_f64(row.residual),
            ]);
        }
        out.add("capacity.csv", table.to_csv());
        let products = scan.products();
        let beta = scan.decay_exponent();
        let spread = products.iter().copied().fold(0.0, f64::max) / products.iter().copied().fold(f64::INFINITY, f64::min);
        lines.push(format!(
            "capacity k·Cap spread {:.3} over {} scales, Cap ~ k^-{}: log law {}; Cap at M=2: {}",
            spread,
            products.len(),
            beta.map_or("?".into(), |b| format!("{b:.3}")),
            if beta.is_some_and(|b| (b - 1.0).abs() <= potential::LOG_LAW_TOLERANCE) { "holds" } else { "fails" },
            scan.doubling_capacity.map_or("n/a".into(), |c| format!("{c:.6}"))
        ));

        let mut table = CsvTable::new(&["run_hash", "center", "radius", "ball_size", "constant", "psi", "ratio"]);
        let d = volume_fit.map_or(2.0, |f| f.exponent.max(2.0));
        let small: Vec<u32> = radii.iter().copied().filter(|&r| r >= 2 && r < ecc).collect();
        let sizes = g.ball_sizes(center, &small);
        let small: Vec<u32> = small.into_iter().zip(sizes).filter(|&(_, s)| s <= 20_000).map(|(r, _)| r).collect();
        for row in potential::poincare_profile(&g, center, &small, d)? {
            table.push(vec![
                h.to_string(),
                center.to_string(),
                row.radius.to_string(),
                row.ball_size.to_string(),
                fmt_f64(row.constant),
                fmt_f64(row.psi),
                fmt_f64(row.ratio),
            ]);
        }
        out.add("poincare.csv", table.to_csv());

        let mut table = CsvTable::new(&[
            "run_hash",
            "center",
            "radius",
            "c_l",
            "pass",
            "vacuous",
            "components",
            "witness_y",
            "witness_z",
        ]);
        let mut all_pass = true;
        for &r in radii.iter().filter(|&&r| 2 * r <= ecc) {
            let rep = qs::annular_qc_check(&g, center, r, ANNULAR_C_L)?;
            all_pass &= rep.pass;
            let (y, z) = rep.witness.map_or((String::new(), String::new()), |(y, z)| (y.to_string(), z.to_string()));
            table.push(vec![
                h.to_string(),
                center.to_string(),
                r.to_string(),
                fmt_f64(ANNULAR_C_L),
                rep.pass.to_string(),
                rep.vacuous.to_string(),
                rep.components.to_string(),
                y,
                z,
            ]);
        }
        out.add("annular.csv", table.to_csv());
        lines.push(format!("annular quasi-convexity (C_L = {ANNULAR_C_L}): {}", if all_pass { "pass" } else { "fail" }));
    }

    if opts.suite.includes(Suite::Walk) {
        let walk_radii: Vec<u32> = radii.iter().copied().filter(|&r| r <= ecc).collect();
        let horizons: Vec<u64> = [64u64, 256, 1024, 4096].to_vec();
        let cfg = WalkConfig {
            seed: opts.seed,
            trials: opts.trials,
            max_steps: DEFAULT_MAX_STEPS,
        };
        let stats = walk::walk_monte_carlo(&g, center, &walk_radii, &horizons, &cfg)?;
        let mut table = CsvTable::new(&["run_hash", "center", "radius", "mean", "std_error", "samples", "censored", "trusted"]);
        for e in &stats.exits {
            table.push(vec![
                h.to_string(),
                center.to_string(),
                e.radius.to_string(),
                fmt_f64(e.mean),
                fmt_f64(e.std_error),
                e.samples.to_string(),
                e.censored.to_string(),
                e.trusted.to_string(),
            ]);
        }
        out.add("walk_exit.csv", table.to_csv());
        let mut table = CsvTable::new(&["run_hash", "center", "horizon", "mean", "std_error", "samples"]);
        for d in &stats.displacements {
            table.push(vec![
                h.to_string(),
                center.to_string(),
                d.horizon.to_string(),
                fmt_f64(d.mean),
                fmt_f64(d.std_error),
                d.samples.to_string(),
            ]);
        }
        out.add("walk_displacement.csv", table.to_csv());
        let dw_fit = stats.exit_exponent().ok();
        match &dw_fit {
            Some(f) => {
                fit_row(&mut fits, h, "walk_dimension", f);
                lines.push(format!("walk dimension {:.4} (r² {:.4}, censored {:.4})", f.exponent, f.r_squared, stats.censored_fraction));
            }
            None => lines.push("walk dimension: not enough trusted radii".to_string()),
        }
        let disp: Vec<(f64, f64)> = stats
            .displacements
            .iter()
            .filter(|d| d.mean > 0.0)
            .map(|d| (d.horizon as f64, d.mean))
            .collect();
        if let Ok(f) = fit_power_law(&disp) {
            fit_row(&mut fits, h, "displacement", &f);
        }

        let n = opts.heat_steps;
        let checkpoints = walk::geometric_times((n / 100).max(1), n, 3);
        let kernel = walk::heat_kernel_exact(&g, center, n, &checkpoints)?;
        let mut table = CsvTable::new(&["run_hash", "center", "n", "paired_return"]);
        for (&t, &v) in kernel.curve.n_values.iter().zip(&kernel.curve.values) {
            table.push(vec![h.to_string(), center.to_string(), t.to_string(), fmt_f64(v)]);
        }
        out.add("heat_kernel.csv", table.to_csv());
        if let Ok(f) = kernel.curve.fit((n / 100).max(10), n, 9) {
            fit_row(&mut fits, h, "return_probability", &f);
            lines.push(format!(
                "return-probability slope {:.4} → spectral dimension {:.4}; mass error {:e}",
                f.exponent,
                -2.0 * f.exponent,
                kernel.max_mass_error
            ));
        }
        if let (Some(vf), Some(wf)) = (&volume_fit, &dw_fit) {
            if wf.exponent > 1.0 {
                let dist = g.bfs_distances(center);
                let env = walk::subgaussian_envelope(&kernel, &dist, vf.exponent, wf.exponent, None)?;
                let mut table = CsvTable::new(&["run_hash", "d", "d_w", "upper_c", "lower_c", "upper_samples", "lower_samples"]);
                table.push(vec![
                    h.to_string(),
                    fmt_f64(vf.exponent),
                    fmt_f64(wf.exponent),
                    env.upper.map_or("inf".into(), fmt_f64),
                    env.lower.map_or("inf".into(), fmt_f64),
                    env.upper_samples.to_string(),
                    env.lower_samples.to_string(),
                ]);
                out.add("envelope.csv", table.to_csv());
                lines.push(format!(
                    "sub-Gaussian constants: upper {} lower {}",
                    env.upper.map_or("unbounded".into(), |c| format!("{c:.3}")),
                    env.lower.map_or("unbounded".into(), |c| format!("{c:.3}"))
                ));
            }
        }
        if opts.dump {
            if let Some(cp) = kernel.checkpoints.last() {
                let mut buf = Vec::new();
                io::write_distribution(&mut buf, cp.n as u64, &cp.at_n)?;
                out.add("heat_kernel.bin", buf);
            }
        }
    }

    if let Some(lp) = &loaded {
        if opts.suite.includes(Suite::Qs) || opts.suite.includes(Suite::Loewner) {
            let tg = &lp.graph;
            if center >= tg.vertex_count() {
                return Err(Error::invalid("center is not a vertex of the packed triangulation"));
            }
            let d = tg.bfs_distances(center);
            let tecc = tg.eccentricity(center);
            let trust = TrustRegion::from_boundary(tg, &lp.record.boundary);
            let qs_radii: Vec<f64> = (0..).map(|k| (1u32 << k) as f64).take_while(|&r| r <= (tecc / 3).max(1) as f64).collect();
            let r_max = qs_radii.last().copied().unwrap_or(1.0);
            let mut candidates: Vec<usize> = (0..tg.vertex_count())
                .filter(|&v| d[v] <= (tecc / 4).max(1) && trust.admits(v, r_max))
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(u64::MAX);
            candidates.shuffle(&mut rng);
            candidates.truncate(QS_CENTERS);
            candidates.sort_unstable();

            if opts.suite.includes(Suite::Qs) {
                let mp = MetricPair::new(tg, &lp.metric)?;
                let report = qs::qs_profile(&mp, &candidates, &qs_radii, Some(&trust))?;
                let mut table = CsvTable::new(&["run_hash", "center", "radius", "h"]);
                for s in &report.samples {
                    table.push(vec![h.to_string(), s.x.to_string(), fmt_f64(s.r), fmt_f64(s.h)]);
                }
                out.add("qs.csv", table.to_csv());
                let mut table = CsvTable::new(&["run_hash", "window_max", "h_max"]);
                for &(r, hm) in &report.window_maxima {
                    table.push(vec![h.to_string(), fmt_f64(r), fmt_f64(hm)]);
                }
                out.add("qs_summary.csv", table.to_csv());
                lines.push(format!(
                    "distortion H_max {:.4} over {} samples ({} excluded), radii {:?}",
                    report.h_max,
                    report.samples.len(),
                    report.excluded,
                    qs_radii
                ));
            }

            if opts.suite.includes(Suite::Loewner) {
                let mut pairs = Vec::new();
                for &x in candidates.iter().take(LOEWNER_CENTERS) {
                    for s in [2u32, 4] {
                        let spheres: Vec<u32> = [5u32, 6, 8, 12, 20]
                            .iter()
                            .map(|f| f * s / 4)
                            .filter(|&r| r > s && r + 2 <= tecc)
                            .collect();
                        pairs.extend(qs::loewner_pairs(tg, x, s, &spheres)?);
                    }
                }
                let scan = qs::loewner_scan(tg, &lp.metric, &pairs)?;
                let mut table = CsvTable::new(&["run_hash", "pair", "delta", "modulus"]);
                for r in &scan.rows {
                    table.push(vec![h.to_string(), r.pair.to_string(), fmt_f64(r.delta), fmt_f64(r.modulus)]);
                }
                out.add("loewner.csv", table.to_csv());
                let mut table = CsvTable::new(&["run_hash", "t", "envelope"]);
                for &(t, m) in &scan.envelope {
                    table.push(vec![h.to_string(), fmt_f64(t), fmt_f64(m)]);
                }
                out.add("loewner_envelope.csv", table.to_csv());
                lines.push(format!(
                    "Loewner scan: {} pairs, {} skipped, envelope(4) = {}",
                    scan.rows.len(),
                    scan.skipped.len(),
                    scan.envelope_at(4.0).map_or("n/a".into(), |m| format!("{m:.4}"))
                ));
            }
        }
    }

    out.add("fits.csv", fits.to_csv());
    let manifest_path = out.commit(&mut manifest)?;
    Ok(RunSummary {
        manifest,
        manifest_path,
        lines,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub manifest_path: PathBuf,
    /// Output files whose bytes differ from the recorded digests.
    pub mismatched: Vec<String>,
}

fn locate_input(recorded: &str, manifest_dir: &Path) -> PathBuf {
    let path = PathBuf::from(recorded);
    if path.exists() || path.is_absolute() {
        path
    } else {
        manifest_dir.join(path)
    }
}

fn param<T: FromStr>(m: &RunManifest, key: &str) -> Result<T> {
    m.get(key)
        .ok_or_else(|| Error::invalid(format!("manifest lacks parameter {key}")))?
        .parse()
        .map_err(|_| Error::invalid(format!("manifest parameter {key} is malformed")))
}

/// Reruns the command recorded in a manifest into `out_dir` and compares
/// output digests.
pub fn replay(manifest_path: &Path, out_dir: &Path) -> Result<ReplayReport> {
    let m = RunManifest::parse(&read_text(manifest_path)?)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mut inputs = std::collections::HashMap::new();
    for i in &m.inputs {
        let path = locate_input(&i.path, dir);
        if sha256_hex(&read(&path)?) != i.sha256 {
            return Err(Error::invalid(format!("input {} changed since the run", path.display())));
        }
        inputs.insert(i.role.as_str(), path);
    }
    let input = |role: &str| {
        inputs
            .get(role)
            .cloned()
            .ok_or_else(|| Error::invalid(format!("manifest lacks a {role} input")))
    };
    let summary = match m.command.as_str() {
        "generate" => generate(param(&m, "kind")?, param(&m, "level")?, param(&m, "max_level")?, out_dir)?,
        "pack" => pack(&input("graph")?, param(&m, "tol")?, param(&m, "svg")?, out_dir)?,
        "analyze" => {
            let radii = match m.get("radii") {
                Some("auto") | None => None,
                Some(s) => Some(parse_radii(s)?),
            };
            let center = match m.get("center") {
                Some("auto") | None => None,
                Some(s) => Some(s.parse().map_err(|_| Error::invalid("bad center"))?),
            };
            let opts = AnalyzeOptions {
                suite: param(&m, "suite")?,
                seed: param(&m, "seed")?,
                radii,
                center,
                trials: param(&m, "trials")?,
                heat_steps: param(&m, "heat_steps")?,
                dump: param(&m, "dump")?,
            };
            let packing = inputs.get("packing").cloned();
            analyze(&input("graph")?, packing.as_deref(), &opts, out_dir)?
        }
        other => return Err(Error::invalid(format!("unknown command {other:?} in manifest"))),
    };
    let mut mismatched = Vec::new();
    for o in &m.outputs {
        match summary.manifest.outputs.iter().find(|n| n.path == o.path) {
            Some(n) if n.sha256 == o.sha256 => {}
            _ => mismatched.push(o.path.clone()),
        }
    }
    Ok(ReplayReport {
        manifest_path: summary.manifest_path,
        mismatched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::Volume, Suite::Capacity, Suite::Walk, Suite::Qs, Suite::Loewner, Suite::All] {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("heat".parse::<Suite>().is_err());
    }

    #[test]
    fn radii_parsing() {
        assert_eq!(parse_radii("8,16, 32").unwrap(), vec![8, 16, 32]);
        assert!(parse_radii("8,x").is_err());
        assert!(parse_radii("0").is_err());
    }

    #[test]
    fn default_radii_are_dyadic() {
        assert_eq!(default_radii(269), vec![8, 16, 32, 64, 128]);
        assert_eq!(default_radii(20), vec![2, 4, 8]);
        assert!(default_radii(3).len() >= 1);
    }

    #[test]
    fn disk_choice() {
        use crate::graph::fixtures;
        let flower = disk_for(&fixtures::wheel(6), 0).unwrap();
        assert_eq!(flower.boundary.len(), 6);
        assert_eq!(flower.graph.vertex_count(), 7);
        let cube = disk_for(&fixtures::cube(), 0).unwrap();
        assert_eq!(cube.graph.vertex_count(), 14);
    }
}
