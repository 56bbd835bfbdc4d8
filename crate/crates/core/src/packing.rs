//! Circle packings of triangulated disks.
//!
//! A spherical triangulation becomes a disk by deleting one face; the
//! vertices of that face are the boundary and receive fixed radii. Interior
//! radii are found by sweeping the uniform-neighbor update and finishing
//! with Newton steps until every interior angle sum is `2π`; centers are
//! then laid out triangle by triangle across the dual graph.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{FaceList, PlanarGraph, UNREACHED};
use crate::linalg;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const MAX_SWEEPS: usize = 1_000_000;

pub type Point = [f64; 2];

/// A spherical triangulation with one face removed.
#[derive(Debug, Clone)]
pub struct DiskTriangulation {
    pub graph: PlanarGraph,
    pub faces: FaceList,
    pub removed_face: usize,
    /// Vertices of the removed face in its cyclic order.
    pub boundary: Vec<usize>,
    is_boundary: Vec<bool>,
}

impl DiskTriangulation {
    /// Every face other than `removed_face` must be a triangle.
    pub fn new(graph: PlanarGraph, removed_face: usize) -> Result<Self> {
        if !graph.is_spherical() {
            return Err(Error::invalid("packing needs a spherical map"));
        }
        let faces = graph.faces();
        if removed_face >= faces.len() {
            return Err(Error::invalid(format!("no face {removed_face}")));
        }
        for (f, cycle) in faces.faces.iter().enumerate() {
            if f != removed_face && cycle.len() != 3 {
                return Err(Error::invalid(format!(
                    "face {f} has {} sides; packings need a triangulation",
                    cycle.len()
                )));
            }
        }
        let boundary = faces.faces[removed_face].clone();
        let mut is_boundary = vec![false; graph.vertex_count()];
        for &b in &boundary {
            if is_boundary[b] {
                return Err(Error::invalid("removed face repeats a vertex"));
            }
            is_boundary[b] = true;
        }
        Ok(DiskTriangulation {
            graph,
            faces,
            removed_face,
            boundary,
            is_boundary,
        })
    }

    /// Removes the face farthest from `base` (distance of a face is the
    /// smallest distance of its corners); ties go to the lexicographically
    /// smallest sorted corner list.
    pub fn with_antipodal_face(graph: PlanarGraph, base: usize) -> Result<Self> {
        if base >= graph.vertex_count() {
            return Err(Error::invalid(format!("base vertex {base} out of range")));
        }
        let dist = graph.bfs_distances(base);
        let faces = graph.faces();
        let removed = faces
            .faces
            .iter()
            .enumerate()
            .map(|(f, cycle)| {
                let d = cycle.iter().map(|&v| dist[v]).min().unwrap_or(UNREACHED);
                let mut key = cycle.clone();
                key.sort_unstable();
                (f, d, key)
            })
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.2.cmp(&a.2)))
            .map(|(f, _, _)| f)
            .ok_or_else(|| Error::invalid("graph has no faces"))?;
        Self::new(graph, removed)
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.is_boundary[v]
    }

    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.graph.vertex_count()).filter(move |&v| !self.is_boundary[v])
    }

    /// Distance from every vertex to the boundary.
    pub fn boundary_distances(&self) -> Vec<u32> {
        self.graph.bfs_distances_from(&self.boundary)
    }
}

/// Angle at a circle of radius `r` in the triangle formed with tangent
/// circles of radii `a` and `b`.
pub fn tangency_angle(r: f64, a: f64, b: f64) -> f64 {
    let s = (a * b / ((r + a) * (r + b))).sqrt();
    2.0 * s.min(1.0).asin()
}

/// Radii produced by [`pack_radii`].
#[derive(Debug, Clone)]
pub struct RadiusSolution {
    pub radii: Vec<f64>,
    pub sweeps: usize,
    pub newton_steps: usize,
    /// Largest `|θ(v) - 2π|` over interior vertices.
    pub residual: f64,
}

fn angle_sum(g: &PlanarGraph, radii: &[f64], v: usize) -> f64 {
    let nb = g.neighbors(v);
    let r = radii[v];
    let k = nb.len();
    (0..k)
        .map(|i| tangency_angle(r, radii[nb[i]], radii[nb[(i + 1) % k]]))
        .sum()
}

/// Largest angle-sum defect over interior vertices.
pub fn angle_residual(t: &DiskTriangulation, radii: &[f64]) -> f64 {
    t.interior()
        .map(|v| (angle_sum(&t.graph, radii, v) - 2.0 * PI).abs())
        .fold(0.0, f64::max)
}

/// Solves for interior radii with fixed boundary radii.
///
/// `boundary_radii` is aligned with `t.boundary`. Uniform-neighbor sweeps
/// run first; once they stall, damped Newton steps on the log-radii finish
/// the solve.
pub fn pack_radii(t: &DiskTriangulation, boundary_radii: &[f64], tol: f64) -> Result<RadiusSolution> {
    pack_radii_capped(t, boundary_radii, tol, MAX_SWEEPS)
}

/// Residual below which sweeps hand over to Newton steps.
const NEWTON_SWITCH: f64 = 1e-3;
/// Sweeps allowed before Newton takes over regardless of the residual.
const SWEEPS_BEFORE_NEWTON: usize = 200;
const MAX_NEWTON_STEPS: usize = 100;

pub fn pack_radii_capped(
    t: &DiskTriangulation,
    boundary_radii: &[f64],
    tol: f64,
    max_sweeps: usize,
) -> Result<RadiusSolution> {
    if boundary_radii.len() != t.boundary.len() {
        return Err(Error::invalid(format!(
            "{} boundary radii for {} boundary vertices",
            boundary_radii.len(),
            t.boundary.len()
        )));
    }
    if boundary_radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(Error::invalid("boundary radii must be positive"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let g = &t.graph;
    let n = g.vertex_count();
    let mean = boundary_radii.iter().sum::<f64>() / boundary_radii.len() as f64;
    let mut radii = vec![mean; n];
    for (&b, &r) in t.boundary.iter().zip(boundary_radii) {
        radii[b] = r;
    }
    let interior: Vec<usize> = t.interior().collect();
    if interior.is_empty() {
        return Ok(RadiusSolution {
            radii,
            sweeps: 0,
            newton_steps: 0,
            residual: 0.0,
        });
    }
    let mut sweeps = 0;
    let mut residual = f64::INFINITY;
    while sweeps < max_sweeps.min(SWEEPS_BEFORE_NEWTON) {
        sweeps += 1;
        let mut worst = 0.0f64;
        for &v in &interior {
            let theta = angle_sum(g, &radii, v);
            worst = worst.max((theta - 2.0 * PI).abs());
            radii[v] = uniform_neighbor_update(radii[v], theta, g.degree(v));
        }
        residual = worst;
        if worst <= tol {
            residual = angle_residual(t, &radii);
            if residual <= tol {
                return Ok(RadiusSolution {
                    radii,
                    sweeps,
                    newton_steps: 0,
                    residual,
                });
            }
        }
        if worst <= NEWTON_SWITCH {
            break;
        }
    }
    if sweeps >= max_sweeps {
        return Err(Error::NonConvergence {
            what: "circle packing radii",
            iterations: sweeps,
            residual,
        });
    }
    let (newton_steps, residual) = newton_solve(t, &interior, &mut radii, tol);
    if residual <= tol {
        Ok(RadiusSolution {
            radii,
            sweeps,
            newton_steps,
            residual,
        })
    } else {
        Err(Error::NonConvergence {
            what: "circle packing radii",
            iterations: sweeps + newton_steps,
            residual,
        })
    }
}

/// Angle-sum defects `θ(v) - 2π` over `interior`.
fn defects(g: &PlanarGraph, radii: &[f64], interior: &[usize]) -> Vec<f64> {
    interior
        .iter()
        .map(|&v| angle_sum(g, radii, v) - 2.0 * PI)
        .collect()
}

/// Newton iteration on `u = ln r`. The Jacobian of the angle sums is
/// `-M` with `M` a symmetric weighted Laplacian (plus boundary terms), so
/// each step solves `M δ = θ - 2π` by conjugate gradients.
fn newton_solve(t: &DiskTriangulation, interior: &[usize], radii: &mut [f64], tol: f64) -> (usize, f64) {
    let g = &t.graph;
    let mut slot = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in interior.iter().enumerate() {
        slot[v] = i;
    }
    let m = interior.len();
    let target = tol * 1e-3;
    let mut f = defects(g, radii, interior);
    let mut norm = linalg::dot(&f, &f).sqrt();
    let mut worst = f.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut weights = vec![0.0; g.dart_count()];
    let mut diag = vec![0.0; m];
    let mut steps = 0;
    while steps < MAX_NEWTON_STEPS && worst > target {
        steps += 1;
        weights.fill(0.0);
        diag.fill(0.0);
        for (i, &v) in interior.iter().enumerate() {
            let darts = g.darts(v);
            let k = darts.len();
            let base = darts.start;
            let rv = radii[v];
            for j in 0..k {
                let (da, db) = (base + j, base + (j + 1) % k);
                let (ra, rb) = (radii[g.head(da)], radii[g.head(db)]);
                let half_tan = (ra * rb / (rv * (rv + ra + rb))).sqrt();
                let wa = half_tan * rv / (rv + ra);
                let wb = half_tan * rv / (rv + rb);
                weights[da] += wa;
                weights[db] += wb;
                diag[i] += wa + wb;
            }
        }
        let apply = |x: &[f64], out: &mut [f64]| {
            for (i, &v) in interior.iter().enumerate() {
                let mut acc = diag[i] * x[i];
                for d in g.darts(v) {
                    let s = slot[g.head(d)];
                    if s != usize::MAX {
                        acc -= weights[d] * x[s];
                    }
                }
                out[i] = acc;
            }
        };
        let cg = linalg::pcg(apply, &diag, &f, 1e-12, 20 * m + 100);
        let old = radii.to_vec();
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            for (i, &v) in interior.iter().enumerate() {
                radii[v] = old[v] * (step * cg.x[i]).exp();
            }
            let trial = defects(g, radii, interior);
            let trial_norm = linalg::dot(&trial, &trial).sqrt();
            if trial_norm < norm {
                f = trial;
                norm = trial_norm;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            radii.copy_from_slice(&old);
            break;
        }
        worst = f.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    }
    (steps, worst)
}

/// Radius giving angle sum `2π` if all `k` neighbors had the common radius
/// that reproduces the current angle sum `theta`.
fn uniform_neighbor_update(r: f64, theta: f64, k: usize) -> f64 {
    let k = k as f64;
    let beta = (theta / (2.0 * k)).sin();
    let delta = (PI / k).sin();
    let rho = beta * r / (1.0 - beta);
    rho * (1.0 - delta) / delta
}

/// Places every circle center.
///
/// The first boundary vertex sits at the origin and its edge to the next
/// boundary vertex points along the positive x-axis. Triangles are placed
/// breadth-first across the dual graph; a vertex reached twice must land
/// within `10 * tol` of its first position.
pub fn layout_centers(t: &DiskTriangulation, radii: &[f64], tol: f64) -> Result<Vec<Point>> {
    let g = &t.graph;
    let n = g.vertex_count();
    if radii.len() != n {
        return Err(Error::invalid("one radius per vertex required"));
    }
    let residual = angle_residual(t, radii);
    if residual > 10.0 * tol {
        return Err(Error::invalid(format!(
            "angle-sum residual {residual:e} too large for layout"
        )));
    }
    let layout_tol = 10.0 * tol;
    let mut centers = vec![[f64::NAN; 2]; n];
    let a = t.boundary[0];
    let b = t.boundary[1 % t.boundary.len()];
    centers[a] = [0.0, 0.0];
    if a == b {
        return Ok(centers);
    }
    centers[b] = [radii[a] + radii[b], 0.0];

    let faces = &t.faces;
    let start = g.find_dart(a, b).expect("boundary edge");
    let start = if faces.dart_face[start] == t.removed_face {
        g.twin(start)
    } else {
        start
    };
    let mut placed_face = vec![false; faces.len()];
    let mut queue = VecDeque::new();
    if faces.dart_face[start] != t.removed_face {
        queue.push_back(start);
    }
    while let Some(d) = queue.pop_front() {
        let f = faces.dart_face[d];
        if placed_face[f] {
            continue;
        }
        placed_face[f] = true;
        let u = g.tail(d);
        let v = g.head(d);
        let d2 = g.next_in_face(d);
        let w = g.head(d2);
        let predicted = third_center(centers[u], centers[v], radii[u], radii[v], radii[w]);
        if centers[w][0].is_nan() {
            centers[w] = predicted;
        } else {
            let gap = dist(centers[w], predicted);
            if gap > layout_tol {
                return Err(Error::invalid(format!(
                    "layout mismatch {gap:e} at vertex {w}; radii inconsistent"
                )));
            }
        }
        for e in [d, d2, g.next_in_face(d2)] {
            let back = g.twin(e);
            let h = faces.dart_face[back];
            if h != t.removed_face && !placed_face[h] {
                queue.push_back(back);
            }
        }
    }
    if let Some(v) = centers.iter().position(|c| c[0].is_nan()) {
        return Err(Error::invalid(format!("vertex {v} was never placed")));
    }
    Ok(centers)
}

/// Center of the circle of radius `rw` tangent to circles at `cu`, `cv`
/// and lying to the left of `cu -> cv`.
fn third_center(cu: Point, cv: Point, ru: f64, rv: f64, rw: f64) -> Point {
    let alpha = tangency_angle(ru, rv, rw);
    let dx = cv[0] - cu[0];
    let dy = cv[1] - cu[1];
    let len = (dx * dx + dy * dy).sqrt();
    let (ux, uy) = (dx / len, dy / len);
    let (s, c) = alpha.sin_cos();
    let dist = ru + rw;
    [
        cu[0] + dist * (c * ux - s * uy),
        cu[1] + dist * (s * ux + c * uy),
    ]
}

pub fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// A laid-out circle packing.
#[derive(Debug, Clone)]
pub struct Packing {
    pub triangulation: DiskTriangulation,
    pub radii: Vec<f64>,
    pub centers: Vec<Point>,
    pub tol: f64,
    pub sweeps: usize,
    pub newton_steps: usize,
    pub angle_residual: f64,
}

impl Packing {
    /// Packs with every boundary radius equal to `boundary_radius`.
    pub fn compute(t: DiskTriangulation, boundary_radius: f64, tol: f64) -> Result<Self> {
        let boundary_radii = vec![boundary_radius; t.boundary.len()];
        let solution = pack_radii(&t, &boundary_radii, tol)?;
        let centers = layout_centers(&t, &solution.radii, tol)?;
        Ok(Packing {
            triangulation: t,
            radii: solution.radii,
            centers,
            tol,
            sweeps: solution.sweeps,
            newton_steps: solution.newton_steps,
            angle_residual: solution.residual,
        })
    }

    pub fn graph(&self) -> &PlanarGraph {
        &self.triangulation.graph
    }

    /// Largest `| |c_u - c_v| - (r_u + r_v) |` over edges.
    pub fn tangency_residual(&self) -> f64 {
        self.graph()
            .edges()
            .map(|(u, v)| {
                (dist(self.centers[u], self.centers[v]) - (self.radii[u] + self.radii[v])).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Same packing with every radius and center multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Packing {
        let mut p = self.clone();
        for r in &mut p.radii {
            *r *= factor;
        }
        for c in &mut p.centers {
            c[0] *= factor;
            c[1] *= factor;
        }
        p
    }

    pub fn length_metric(&self) -> LengthMetric {
        length_metric(self)
    }
}

/// Edge lengths of a straight-line embedding.
#[derive(Debug, Clone)]
pub struct LengthMetric {
    pub graph: PlanarGraph,
    /// Length of every dart, symmetric under reversal.
    pub lengths: Vec<f64>,
    /// Shortest incident edge length at each vertex.
    pub separation_radii: Vec<f64>,
}

impl LengthMetric {
    pub fn from_lengths(graph: PlanarGraph, lengths: Vec<f64>) -> Result<Self> {
        if lengths.len() != graph.dart_count() {
            return Err(Error::invalid("one length per dart required"));
        }
        for d in 0..graph.dart_count() {
            if !(lengths[d] > 0.0) || lengths[d] != lengths[graph.twin(d)] {
                return Err(Error::invalid(format!(
                    "dart {d} has invalid or asymmetric length {}",
                    lengths[d]
                )));
            }
        }
        let separation_radii = (0..graph.vertex_count())
            .map(|v| {
                graph
                    .darts(v)
                    .map(|d| lengths[d])
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        Ok(LengthMetric {
            graph,
            lengths,
            separation_radii,
        })
    }

    pub fn from_positions(graph: PlanarGraph, positions: &[Point]) -> Result<Self> {
        let lengths = (0..graph.dart_count())
            .map(|d| {
                let (u, v) = (graph.tail(d), graph.head(d));
                // Evaluate in a fixed endpoint order so both darts agree bitwise.
                dist(positions[u.min(v)], positions[u.max(v)])
            })
            .collect();
        Self::from_lengths(graph, lengths)
    }

    pub fn unit(graph: PlanarGraph) -> Self {
        let lengths = vec![1.0; graph.dart_count()];
        Self::from_lengths(graph, lengths).expect("unit lengths")
    }

    pub fn scaled(&self, factor: f64) -> LengthMetric {
        LengthMetric {
            graph: self.graph.clone(),
            lengths: self.lengths.iter().map(|l| l * factor).collect(),
            separation_radii: self.separation_radii.iter().map(|l| l * factor).collect(),
        }
    }

    pub fn edge_length(&self, u: usize, v: usize) -> Option<f64> {
        self.graph.find_dart(u, v).map(|d| self.lengths[d])
    }

    /// Shortest-path distances `d_ℓ(source, ·)`.
    pub fn distances_from(&self, source: usize) -> Vec<f64> {
        self.distances_from_set(&[source])
    }

    pub fn distances_from_set(&self, sources: &[usize]) -> Vec<f64> {
        self.dijkstra(sources, &[])
    }

    /// Distances from `source` to each of `targets`, stopping the search
    /// once all of them are settled.
    pub fn distances_to(&self, source: usize, targets: &[usize]) -> Vec<f64> {
        let dist = self.dijkstra(&[source], targets);
        targets.iter().map(|&t| dist[t]).collect()
    }

    fn dijkstra(&self, sources: &[usize], targets: &[usize]) -> Vec<f64> {
        let g = &self.graph;
        let mut is_target = vec![false; if targets.is_empty() { 0 } else { g.vertex_count() }];
        let mut remaining = 0;
        for &t in targets {
            if !is_target[t] {
                is_target[t] = true;
                remaining += 1;
            }
        }
        let mut dist = vec![f64::INFINITY; g.vertex_count()];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0.0;
            heap.push(HeapEntry(0.0, s));
        }
        while let Some(HeapEntry(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            if !targets.is_empty() && is_target[v] {
                is_target[v] = false;
                remaining -= 1;
                if remaining == 0 {
                    break;
                }
            }
            for e in g.darts(v) {
                let u = g.head(e);
                let nd = d + self.lengths[e];
                if nd < dist[u] {
                    dist[u] = nd;
                    heap.push(HeapEntry(nd, u));
                }
            }
        }
        dist
    }
}

#[derive(PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

/// Length function `ℓ(e) = |c_u - c_v|` of a packing.
pub fn length_metric(p: &Packing) -> LengthMetric {
    LengthMetric::from_positions(p.graph().clone(), &p.centers).expect("packing centers are distinct")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingReport {
    /// Largest inner angle over the laid-out faces.
    pub max_angle: f64,
    /// Largest `|u - v| / |u - w|` over pairs of edges sharing `u`.
    pub max_adjacent_length_ratio: f64,
    /// Largest `r_u / r_v` over edges; `1.0` when no radii are given.
    pub max_adjacent_radius_ratio: f64,
    pub angles_ok: bool,
    pub ratios_ok: bool,
    pub pass: bool,
}

/// `(D, η)`-good embedding test of a packing, skipping the removed face.
pub fn check_good_embedding(p: &Packing, max_ratio: f64, eta: f64) -> EmbeddingReport {
    let t = &p.triangulation;
    check_straight_line_embedding(
        &t.graph,
        &t.faces,
        Some(t.removed_face),
        &p.centers,
        Some(&p.radii),
        max_ratio,
        eta,
    )
}

/// `(D, η)`-good embedding test of any straight-line drawing.
pub fn check_straight_line_embedding(
    graph: &PlanarGraph,
    faces: &FaceList,
    skip_face: Option<usize>,
    positions: &[Point],
    radii: Option<&[f64]>,
    max_ratio: f64,
    eta: f64,
) -> EmbeddingReport {
    let mut max_angle = 0.0f64;
    for (f, cycle) in faces.faces.iter().enumerate() {
        if Some(f) == skip_face {
            continue;
        }
        let k = cycle.len();
        for i in 0..k {
            let prev = positions[cycle[(i + k - 1) % k]];
            let here = positions[cycle[i]];
            let next = positions[cycle[(i + 1) % k]];
            let a = [next[0] - here[0], next[1] - here[1]];
            let b = [prev[0] - here[0], prev[1] - here[1]];
            let cross = a[0] * b[1] - a[1] * b[0];
            let dot = a[0] * b[0] + a[1] * b[1];
            let mut angle = cross.atan2(dot);
            if angle < 0.0 {
                angle += 2.0 * PI;
            }
            max_angle = max_angle.max(angle);
        }
    }
    let mut max_length_ratio = 1.0f64;
    for v in 0..graph.vertex_count() {
        let lens = graph.neighbors(v).iter().map(|&u| dist(positions[v], positions[u]));
        let (lo, hi) = lens.fold((f64::INFINITY, 0.0f64), |(lo, hi), l| (lo.min(l), hi.max(l)));
        if hi > 0.0 && lo.is_finite() {
            max_length_ratio = max_length_ratio.max(hi / lo);
        }
    }
    let max_radius_ratio = radii.map_or(1.0, |r| {
        graph
            .edges()
            .map(|(u, v)| (r[u] / r[v]).max(r[v] / r[u]))
            .fold(1.0, f64::max)
    });
    // Angles within 1e-12 of the limit count as meeting it.
    let angles_ok = max_angle <= PI - eta + 1e-12;
    let ratios_ok = max_length_ratio <= max_ratio;
    EmbeddingReport {
        max_angle,
        max_adjacent_length_ratio: max_length_ratio,
        max_adjacent_radius_ratio: max_radius_ratio,
        angles_ok,
        ratios_ok,
        pass: angles_ok && ratios_ok,
    }
}

/// One row of [`embedding_volume_profile`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeSample {
    pub center: usize,
    pub radius: f64,
    pub separation_radius: f64,
    pub mass: f64,
    /// `mass / (r (r ∨ r_x))`.
    pub ratio: f64,
}

/// Mass of `d_ℓ`-balls when each edge carries mass `ℓ(e)²` spread
/// uniformly along its length.
pub fn embedding_volume_profile(lm: &LengthMetric, centers: &[usize], radii: &[f64]) -> Vec<VolumeSample> {
    let g = &lm.graph;
    let mut out = Vec::with_capacity(centers.len() * radii.len());
    for &x in centers {
        let dist = lm.distances_from(x);
        let rx = lm.separation_radii[x];
        for &r in radii {
            let mut mass = 0.0;
            for d in 0..g.dart_count() {
                let (u, v) = (g.tail(d), g.head(d));
                if u > v {
                    continue;
                }
                let len = lm.lengths[d];
                let reach = (r - dist[u]).clamp(0.0, len) + (r - dist[v]).clamp(0.0, len);
                mass += len * len * (reach.min(len) / len);
            }
            out.push(VolumeSample {
                center: x,
                radius: r,
                separation_radius: rx,
                mass,
                ratio: mass / (r * r.max(rx)),
            });
        }
    }
    out
}

/// Circles and tangency edges as an SVG document, one user unit per length
/// unit. Edges come first in `(u, v)` order, then circles by vertex id.
pub fn packing_svg(p: &Packing) -> String {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (c, r) in p.centers.iter().zip(&p.radii) {
        x0 = x0.min(c[0] - r);
        y0 = y0.min(c[1] - r);
        x1 = x1.max(c[0] + r);
        y1 = y1.max(c[1] + r);
    }
    let stroke = (x1 - x0).max(y1 - y0) / 2000.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        x0,
        -y1,
        x1 - x0,
        y1 - y0
    );
    let _ = writeln!(
        s,
        r#"<g fill="none" stroke="black" stroke-width="{stroke}" transform="scale(1,-1)">"#
    );
    for (u, v) in p.graph().edges() {
        let (a, b) = (p.centers[u], p.centers[v]);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray"/>"#,
            a[0], a[1], b[0], b[1]
        );
    }
    for (c, r) in p.centers.iter().zip(&p.radii) {
        let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="{}"/>"#, c[0], c[1], r);
    }
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;

    fn wheel_disk(rim: usize) -> DiskTriangulation {
        let g = fixtures::wheel(rim);
        let outer = g.faces().faces.iter().position(|f| f.len() == rim).unwrap();
        DiskTriangulation::new(g, outer).unwrap()
    }

    fn tetra_disk() -> DiskTriangulation {
        let faces = vec![vec![0, 1, 2], vec![0, 3, 1], vec![1, 3, 2], vec![2, 3, 0]];
        let g = PlanarGraph::from_oriented_faces(4, &faces).unwrap();
        let removed = g
            .faces()
            .faces
            .iter()
            .position(|f| !f.contains(&3))
            .unwrap();
        DiskTriangulation::new(g, removed).unwrap()
    }

    #[test]
    fn hexagonal_flower_is_uniform() {
        let t = wheel_disk(6);
        let p = Packing::compute(t, 1.0, 1e-12).unwrap();
        assert!((p.radii[0] - 1.0).abs() < 1e-10);
        for v in 1..=6 {
            let c = p.centers[v];
            let d = dist(c, p.centers[0]);
            assert!((d - 2.0).abs() < 1e-9);
        }
        assert!(p.tangency_residual() < 1e-9);
    }

    #[test]
    fn three_and_four_petal_flowers_match_closed_form() {
        // 6 asin(R/(r+R)) = 2π  =>  r = R (2/√3 - 1).
        let p = Packing::compute(tetra_disk(), 1.0, 1e-13).unwrap();
        assert!((p.radii[3] - (2.0 / 3f64.sqrt() - 1.0)).abs() < 1e-10);
        // 8 asin(R/(r+R)) = 2π  =>  r = R (√2 - 1).
        let p4 = Packing::compute(wheel_disk(4), 1.0, 1e-13).unwrap();
        assert!((p4.radii[0] - (2f64.sqrt() - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn tetrahedron_center_is_the_centroid() {
        let p = Packing::compute(tetra_disk(), 1.0, 1e-13).unwrap();
        let b = &p.triangulation.boundary;
        let cx = b.iter().map(|&v| p.centers[v][0]).sum::<f64>() / 3.0;
        let cy = b.iter().map(|&v| p.centers[v][1]).sum::<f64>() / 3.0;
        assert!(dist(p.centers[3], [cx, cy]) < 1e-9);
        let lm = p.length_metric();
        let spoke = lm.edge_length(3, b[0]).unwrap();
        assert!((spoke - 2.0 / 3f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn two_tangent_circles() {
        let g = fixtures::path(2);
        let t = DiskTriangulation::new(g, 0).unwrap();
        let p = Packing::compute(t, 1.0, 1e-9).unwrap();
        assert_eq!(p.centers, vec![[0.0, 0.0], [2.0, 0.0]]);
        let lm = p.length_metric();
        assert_eq!(lm.lengths, vec![2.0, 2.0]);
        assert_eq!(lm.separation_radii, vec![2.0, 2.0]);
    }

    #[test]
    fn normalization_fixes_first_boundary_edge() {
        let p = Packing::compute(wheel_disk(5), 1.0, 1e-12).unwrap();
        let b = &p.triangulation.boundary;
        assert_eq!(p.centers[b[0]], [0.0, 0.0]);
        assert_eq!(p.centers[b[1]][1], 0.0);
        assert!(p.centers[b[1]][0] > 0.0);
    }

    #[test]
    fn flower_lengths_and_embedding() {
        let p = Packing::compute(wheel_disk(6), 1.0, 1e-12).unwrap();
        let lm = p.length_metric();
        assert!(lm.lengths.iter().all(|l| (l - 2.0).abs() < 1e-9));
        let report = check_good_embedding(&p, 1.0 + 1e-6, 2.0 * PI / 3.0 - 1e-6);
        assert!((report.max_angle - PI / 3.0).abs() < 1e-9);
        assert!(report.pass, "{report:?}");
        // Shortest paths never beat a straight spoke.
        let d = lm.distances_from(0);
        for v in 1..=6 {
            assert!(d[v] <= lm.edge_length(0, v).unwrap() + 1e-15);
        }
        assert_eq!(lm.distances_to(1, &[4, 2]), {
            let full = lm.distances_from(1);
            vec![full[4], full[2]]
        });
    }

    #[test]
    fn flat_angle_fails_the_check() {
        let g = fixtures::wheel(4);
        let faces = g.faces();
        let outer = faces.faces.iter().position(|f| f.len() == 4).unwrap();
        // Hub on the segment between rim vertices 1 and 3.
        let positions = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        let ok = check_straight_line_embedding(&g, &faces, Some(outer), &positions, None, 2.0, 0.1);
        assert!(ok.pass);
        let flat = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 0.0], [-1.0, 0.0], [0.0, -1.0]];
        let bad = check_straight_line_embedding(&g, &faces, Some(outer), &flat, None, 10.0, 0.1);
        assert!(!bad.pass);
        assert!((bad.max_angle - PI).abs() < 1e-12);
    }

    #[test]
    fn volume_of_single_edge_and_flower() {
        let lm = LengthMetric::unit(fixtures::path(2));
        let rows = embedding_volume_profile(&lm, &[0], &[0.5]);
        assert!((rows[0].mass - 0.5).abs() < 1e-15);
        let p = Packing::compute(wheel_disk(6), 1.0, 1e-13).unwrap();
        let lm = p.length_metric();
        let rows = embedding_volume_profile(&lm, &[0], &[2.0]);
        assert!((rows[0].mass - 24.0).abs() < 1e-7, "{rows:?}");
        assert!((rows[0].ratio - 6.0).abs() < 1e-7);
    }

    #[test]
    fn solver_is_deterministic_and_scale_covariant() {
        let t = wheel_disk(7);
        let a = pack_radii(&t, &vec![1.0; 7], 1e-12).unwrap();
        let b = pack_radii(&t, &vec![1.0; 7], 1e-12).unwrap();
        assert_eq!(a.radii, b.radii);
        let c = pack_radii(&t, &vec![3.0; 7], 1e-12).unwrap();
        assert!((c.radii[0] - 3.0 * a.radii[0]).abs() < 1e-10);
    }

    #[test]
    fn nonconvergence_reports_residual() {
        let t = wheel_disk(7);
        match pack_radii_capped(&t, &vec![1.0; 7], 1e-15, 1) {
            Err(Error::NonConvergence { residual, .. }) => assert!(residual > 0.0),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn newton_finishes_irregular_packings() {
        let (c, p) = crate::subdivision::level_graph(crate::subdivision::BaseKind::Cube, 1).unwrap();
        let tri = c.graph.face_barycenter_triangulation().unwrap();
        let disk = DiskTriangulation::with_antipodal_face(tri, p.0).unwrap();
        let pk = Packing::compute(disk, 1.0, 1e-10).unwrap();
        assert!(pk.angle_residual <= 1e-10);
        assert!(pk.tangency_residual() <= 1e-9);
    }

    #[test]
    fn angle_jacobian_matches_finite_differences() {
        let t = wheel_disk(5);
        let mut radii = vec![0.7, 1.0, 1.3, 0.9, 1.1, 0.8];
        let v = 0;
        let h: f64 = 1e-6;
        for a in 1..6 {
            let base = radii[a];
            radii[a] = base * h.exp();
            let up = angle_sum(&t.graph, &radii, v);
            radii[a] = base * (-h).exp();
            let down = angle_sum(&t.graph, &radii, v);
            radii[a] = base;
            let numeric = (up - down) / (2.0 * h);
            let rv = radii[v];
            let mut analytic = 0.0;
            let nbrs = t.graph.neighbors(v);
            for j in 0..nbrs.len() {
                let (x, y) = (nbrs[j], nbrs[(j + 1) % nbrs.len()]);
                for (w, o) in [(x, y), (y, x)] {
                    if w == a {
                        let (rw, ro) = (radii[w], radii[o]);
                        let half_tan = (rw * ro / (rv * (rv + rw + ro))).sqrt();
                        analytic += half_tan * rv / (rv + rw);
                    }
                }
            }
            assert!((numeric - analytic).abs() < 1e-7, "{a}: {numeric} vs {analytic}");
        }
    }

    #[test]
    fn rejects_non_triangulations() {
        let cube = fixtures::cube();
        assert!(DiskTriangulation::new(cube, 0).is_err());
    }

    #[test]
    fn svg_is_deterministic() {
        let p = Packing::compute(wheel_disk(6), 1.0, 1e-12).unwrap();
        let s = packing_svg(&p);
        assert_eq!(s, packing_svg(&p));
        assert_eq!(s.matches("<circle").count(), 7);
        assert_eq!(s.matches("<line").count(), 12);
    }
}
