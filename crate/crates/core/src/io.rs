//! Text formats for graphs, complexes and packings; CSV tables; the binary
//! distribution dump.
//!
//! Text documents are line-oriented `key value` headers followed by a
//! body. Floats in graph-side files use Rust's shortest round-trip form so
//! reading back is exact; CSV cells use 17 significant digits.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::PlanarGraph;
use crate::packing::{Packing, Point};
use crate::subdivision::{BaseKind, SubdivisionComplex};

pub const GRAPH_VERSION: u32 = 1;
pub const DUMP_MAGIC: &[u8; 8] = b"SNOWHK01";

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-empty, non-comment line.
    fn next(&mut self) -> Result<&'a str> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let line = line.trim();
            if !line.is_empty() && !line.starts_with('#') {
                return Ok(line);
            }
        }
        Err(Error::parse(self.last + 1, "unexpected end of document"))
    }

    fn field<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let line = self.next()?;
        let rest = line
            .strip_prefix(key)
            .filter(|r| r.starts_with(' '))
            .ok_or_else(|| Error::parse(self.last, format!("expected `{key} ...`, found {line:?}")))?;
        self.value(rest.trim())
    }

    fn value<T: FromStr>(&self, token: &str) -> Result<T> {
        token
            .parse()
            .map_err(|_| Error::parse(self.last, format!("cannot parse {token:?}")))
    }

    fn list<T: FromStr>(&self, line: &str) -> Result<Vec<T>> {
        line.split_whitespace().map(|t| self.value(t)).collect()
    }

    fn keyword(&mut self, key: &str) -> Result<()> {
        let line = self.next()?;
        if line == key {
            Ok(())
        } else {
            Err(Error::parse(self.last, format!("expected `{key}`, found {line:?}")))
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.next() {
            Ok(line) => Err(Error::parse(self.last, format!("trailing content {line:?}"))),
            Err(_) => Ok(()),
        }
    }
}

/// `snowlab-graph` document: one line of cyclic neighbors per vertex.
pub fn graph_to_string(g: &PlanarGraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "snowlab-graph");
    let _ = writeln!(s, "version {GRAPH_VERSION}");
    let _ = writeln!(s, "vertex_count {}", g.vertex_count());
    let _ = writeln!(s, "adjacency");
    for v in 0..g.vertex_count() {
        let row: Vec<String> = g.neighbors(v).iter().map(|w| w.to_string()).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

pub fn parse_graph(text: &str) -> Result<PlanarGraph> {
    let mut lines = Lines::new(text);
    lines.keyword("snowlab-graph")?;
    let version: u32 = lines.field("version")?;
    if version != GRAPH_VERSION {
        return Err(Error::parse(lines.last, format!("unsupported graph version {version}")));
    }
    let n: usize = lines.field("vertex_count")?;
    lines.keyword("adjacency")?;
    let mut adjacency = Vec::with_capacity(n);
    for _ in 0..n {
        let line = lines.next()?;
        adjacency.push(lines.list(line)?);
    }
    lines.finish()?;
    PlanarGraph::from_rotation(adjacency)
}

/// Face cycles, level, base kind and base point of a subdivision complex.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSidecar {
    pub kind: BaseKind,
    pub level: u32,
    pub base_point: usize,
    pub faces: Vec<Vec<usize>>,
}

impl From<&SubdivisionComplex> for ComplexSidecar {
    fn from(c: &SubdivisionComplex) -> Self {
        ComplexSidecar {
            kind: c.kind,
            level: c.level,
            base_point: c.base_point().0,
            faces: c.faces.clone(),
        }
    }
}

pub fn complex_to_string(c: &ComplexSidecar) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "snowlab-complex");
    let _ = writeln!(s, "version {GRAPH_VERSION}");
    let _ = writeln!(s, "base_kind {}", c.kind);
    let _ = writeln!(s, "level {}", c.level);
    let _ = writeln!(s, "base_point {}", c.base_point);
    let _ = writeln!(s, "face_count {}", c.faces.len());
    let _ = writeln!(s, "faces");
    for f in &c.faces {
        let row: Vec<String> = f.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

pub fn parse_complex(text: &str) -> Result<ComplexSidecar> {
    let mut lines = Lines::new(text);
    lines.keyword("snowlab-complex")?;
    let version: u32 = lines.field("version")?;
    if version != GRAPH_VERSION {
        return Err(Error::parse(lines.last, format!("unsupported complex version {version}")));
    }
    let kind: String = lines.field("base_kind")?;
    let kind = BaseKind::from_str(&kind)?;
    let level = lines.field("level")?;
    let base_point = lines.field("base_point")?;
    let count: usize = lines.field("face_count")?;
    lines.keyword("faces")?;
    let mut faces = Vec::with_capacity(count);
    for _ in 0..count {
        let line = lines.next()?;
        faces.push(lines.list(line)?);
    }
    lines.finish()?;
    Ok(ComplexSidecar {
        kind,
        level,
        base_point,
        faces,
    })
}

/// Everything a packing file records. The triangulation itself lives in a
/// separate graph file referenced by name and digest.
#[derive(Debug, Clone, PartialEq)]
pub struct PackingRecord {
    pub triangulation_file: String,
    pub triangulation_sha256: String,
    pub removed_face: usize,
    pub boundary: Vec<usize>,
    pub tol: f64,
    pub sweeps: usize,
    pub newton_steps: usize,
    pub angle_residual: f64,
    pub radii: Vec<f64>,
    pub centers: Vec<Point>,
}

impl PackingRecord {
    pub fn from_packing(p: &Packing, triangulation_file: &str, triangulation_sha256: &str) -> Self {
        PackingRecord {
            triangulation_file: triangulation_file.to_string(),
            triangulation_sha256: triangulation_sha256.to_string(),
            removed_face: p.triangulation.removed_face,
            boundary: p.triangulation.boundary.clone(),
            tol: p.tol,
            sweeps: p.sweeps,
            newton_steps: p.newton_steps,
            angle_residual: p.angle_residual,
            radii: p.radii.clone(),
            centers: p.centers.clone(),
        }
    }
}

pub fn packing_to_string(p: &PackingRecord) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "snowlab-packing");
    let _ = writeln!(s, "version {GRAPH_VERSION}");
    let _ = writeln!(s, "triangulation {}", p.triangulation_file);
    let _ = writeln!(s, "triangulation_sha256 {}", p.triangulation_sha256);
    let _ = writeln!(s, "removed_face {}", p.removed_face);
    let boundary: Vec<String> = p.boundary.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(s, "boundary {}", boundary.join(" "));
    let _ = writeln!(s, "tol {:?}", p.tol);
    let _ = writeln!(s, "sweeps {}", p.sweeps);
    let _ = writeln!(s, "newton_steps {}", p.newton_steps);
    let _ = writeln!(s, "angle_residual {:?}", p.angle_residual);
    let _ = writeln!(s, "vertex_count {}", p.radii.len());
    let _ = writeln!(s, "radius center_x center_y");
    for (r, c) in p.radii.iter().zip(&p.centers) {
        let _ = writeln!(s, "{r:?} {:?} {:?}", c[0], c[1]);
    }
    s
}

pub fn parse_packing(text: &str) -> Result<PackingRecord> {
    let mut lines = Lines::new(text);
    lines.keyword("snowlab-packing")?;
    let version: u32 = lines.field("version")?;
    if version != GRAPH_VERSION {
        return Err(Error::parse(lines.last, format!("unsupported packing version {version}")));
    }
    let triangulation_file = lines.field("triangulation")?;
    let triangulation_sha256 = lines.field("triangulation_sha256")?;
    let removed_face = lines.field("removed_face")?;
    let line = lines.next()?;
    let boundary = match line.strip_prefix("boundary") {
        Some(rest) => lines.list(rest)?,
        None => return Err(Error::parse(lines.last, "expected `boundary ...`")),
    };
    let tol = lines.field("tol")?;
    let sweeps = lines.field("sweeps")?;
    let newton_steps = lines.field("newton_steps")?;
    let angle_residual = lines.field("angle_residual")?;
    let n: usize = lines.field("vertex_count")?;
    lines.keyword("radius center_x center_y")?;
    let mut radii = Vec::with_capacity(n);
    let mut centers = Vec::with_capacity(n);
    for _ in 0..n {
        let line = lines.next()?;
        let row: Vec<f64> = lines.list(line)?;
        if row.len() != 3 {
            return Err(Error::parse(lines.last, "expected radius and two coordinates"));
        }
        radii.push(row[0]);
        centers.push([row[1], row[2]]);
    }
    lines.finish()?;
    Ok(PackingRecord {
        triangulation_file,
        triangulation_sha256,
        removed_face,
        boundary,
        tol,
        sweeps,
        newton_steps,
        angle_residual,
        radii,
        centers,
    })
}

/// A CSV cell with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Comma-separated table with a fixed header, written with LF endings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// Writes one distribution as `magic, vertex count (u64 LE), n (u64 LE)`
/// followed by the values as little-endian `f64`.
pub fn write_distribution(mut w: impl Write, n: u64, values: &[f64]) -> Result<()> {
    w.write_all(DUMP_MAGIC)?;
    w.write_all(&(values.len() as u64).to_le_bytes())?;
    w.write_all(&n.to_le_bytes())?;
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_distribution(mut r: impl Read) -> Result<(u64, Vec<f64>)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(Error::invalid("not a distribution dump"));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let count = u64::from_le_bytes(word);
    r.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word);
    let count = usize::try_from(count).map_err(|_| Error::invalid("dump too large"))?;
    let mut values = Vec::with_capacity(count.min(1 << 24));
    for _ in 0..count {
        r.read_exact(&mut word)?;
        values.push(f64::from_le_bytes(word));
    }
    Ok((n, values))
}
