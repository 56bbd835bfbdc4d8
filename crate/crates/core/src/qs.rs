//! Quasisymmetry diagnostics comparing the graph metric with a packing
//! metric, annular quasi-convexity, and Loewner-type modulus scans.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{PlanarGraph, UNREACHED};
use crate::packing::{dist, LengthMetric, Point};
use crate::potential::edge_modulus;

/// A metric on the vertices `0..point_count()`.
pub trait VertexMetric {
    fn point_count(&self) -> usize;

    fn distances_from(&self, x: usize) -> Vec<f64>;

    /// Distances from the nearest of `xs`.
    fn distances_from_set(&self, xs: &[usize]) -> Vec<f64>;

    /// Distances from `x` to each of `targets`.
    fn distances_to(&self, x: usize, targets: &[usize]) -> Vec<f64> {
        let d = self.distances_from(x);
        targets.iter().map(|&t| d[t]).collect()
    }
}

impl VertexMetric for PlanarGraph {
    fn point_count(&self) -> usize {
        self.vertex_count()
    }

    fn distances_from(&self, x: usize) -> Vec<f64> {
        self.distances_from_set(&[x])
    }

    fn distances_from_set(&self, xs: &[usize]) -> Vec<f64> {
        self.bfs_distances_from(xs)
            .into_iter()
            .map(|d| if d == UNREACHED { f64::INFINITY } else { d as f64 })
            .collect()
    }
}

impl VertexMetric for LengthMetric {
    fn point_count(&self) -> usize {
        self.graph.vertex_count()
    }

    fn distances_from(&self, x: usize) -> Vec<f64> {
        LengthMetric::distances_from(self, x)
    }

    fn distances_from_set(&self, xs: &[usize]) -> Vec<f64> {
        LengthMetric::distances_from_set(self, xs)
    }

    fn distances_to(&self, x: usize, targets: &[usize]) -> Vec<f64> {
        LengthMetric::distances_to(self, x, targets)
    }
}

/// Straight-line distance between vertex positions.
#[derive(Debug, Clone)]
pub struct EuclideanMetric {
    pub points: Vec<Point>,
}

impl VertexMetric for EuclideanMetric {
    fn point_count(&self) -> usize {
        self.points.len()
    }

    fn distances_from(&self, x: usize) -> Vec<f64> {
        self.points.iter().map(|&p| dist(self.points[x], p)).collect()
    }

    fn distances_from_set(&self, xs: &[usize]) -> Vec<f64> {
        self.points
            .iter()
            .map(|&p| xs.iter().map(|&x| dist(self.points[x], p)).fold(f64::INFINITY, f64::min))
            .collect()
    }
}

/// Two metrics on one vertex set, compared through the identity map.
pub struct MetricPair<'a> {
    pub d1: &'a dyn VertexMetric,
    pub d2: &'a dyn VertexMetric,
}

impl<'a> MetricPair<'a> {
    pub fn new(d1: &'a dyn VertexMetric, d2: &'a dyn VertexMetric) -> Result<Self> {
        if d1.point_count() != d2.point_count() {
            return Err(Error::invalid(format!(
                "metrics live on {} and {} points",
                d1.point_count(),
                d2.point_count()
            )));
        }
        Ok(MetricPair { d1, d2 })
    }

    pub fn swapped(&self) -> MetricPair<'a> {
        MetricPair {
            d1: self.d2,
            d2: self.d1,
        }
    }
}

/// `sup{d2(x,y) : d1(x,y) ≤ r} / inf{d2(x,y) : d1(x,y) ≥ r}` from
/// precomputed distance rows.
fn distortion_from_rows(row1: &[f64], row2: &[f64], r: f64) -> Option<f64> {
    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    let mut outside = false;
    for (&a, &b) in row1.iter().zip(row2) {
        if a <= r {
            sup = sup.max(b);
        }
        if a >= r && a.is_finite() {
            inf = inf.min(b);
            outside = true;
        }
    }
    (outside && inf > 0.0).then(|| sup / inf)
}

/// Distortion `H(x, r)` of the identity from `d1` to `d2`.
pub fn distortion(mp: &MetricPair, x: usize, r: f64) -> Result<f64> {
    if x >= mp.d1.point_count() {
        return Err(Error::invalid(format!("vertex {x} out of range")));
    }
    if !(r > 0.0) {
        return Err(Error::invalid("radius must be positive"));
    }
    let row1 = mp.d1.distances_from(x);
    let row2 = mp.d2.distances_from(x);
    distortion_from_rows(&row1, &row2, r)
        .ok_or_else(|| Error::invalid(format!("no vertex at d1-distance ≥ {r} from {x}")))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionSample {
    pub x: usize,
    pub r: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport {
    pub samples: Vec<DistortionSample>,
    pub h_max: f64,
    pub window: (f64, f64),
    /// `(r, max H over samples with radius ≤ r)` for each admitted radius.
    pub window_maxima: Vec<(f64, f64)>,
    /// Samples dropped as untrusted or out of range.
    pub excluded: usize,
}

impl DistortionReport {
    /// Largest `H` over samples with radius at most `r`.
    pub fn h_max_up_to(&self, r: f64) -> Option<f64> {
        self.window_maxima
            .iter()
            .take_while(|(w, _)| *w <= r)
            .last()
            .map(|&(_, h)| h)
    }
}

/// Samples at distance (in `d1`) less than `r / 4` from `boundary` are
/// untrusted.
pub struct TrustRegion {
    pub boundary_distance: Vec<f64>,
}

impl TrustRegion {
    pub fn from_boundary(d1: &dyn VertexMetric, boundary: &[usize]) -> Self {
        TrustRegion {
            boundary_distance: d1.distances_from_set(boundary),
        }
    }

    pub fn admits(&self, x: usize, r: f64) -> bool {
        self.boundary_distance[x] >= r / 4.0
    }
}

/// Distortion at every `(center, radius)` combination.
pub fn qs_profile(
    mp: &MetricPair,
    centers: &[usize],
    radii: &[f64],
    trust: Option<&TrustRegion>,
) -> Result<DistortionReport> {
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::invalid("radii must be positive and nonempty"));
    }
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut samples = Vec::new();
    let mut excluded = 0;
    for &x in centers {
        if x >= mp.d1.point_count() {
            return Err(Error::invalid(format!("vertex {x} out of range")));
        }
        let row1 = mp.d1.distances_from(x);
        let row2 = mp.d2.distances_from(x);
        for &r in &sorted {
            if trust.is_some_and(|t| !t.admits(x, r)) {
                excluded += 1;
                continue;
            }
            match distortion_from_rows(&row1, &row2, r) {
                Some(h) => samples.push(DistortionSample { x, r, h }),
                None => excluded += 1,
            }
        }
    }
    let h_max = samples.iter().map(|s| s.h).fold(f64::NEG_INFINITY, f64::max);
    let mut window_maxima = Vec::new();
    let mut running = f64::NEG_INFINITY;
    for &r in &sorted {
        let here = samples
            .iter()
            .filter(|s| s.r == r)
            .map(|s| s.h)
            .fold(f64::NEG_INFINITY, f64::max);
        if here.is_finite() {
            running = running.max(here);
            window_maxima.push((r, running));
        }
    }
    let window = (
        samples.iter().map(|s| s.r).fold(f64::INFINITY, f64::min),
        samples.iter().map(|s| s.r).fold(f64::NEG_INFINITY, f64::max),
    );
    Ok(DistortionReport {
        samples,
        h_max,
        window,
        window_maxima,
        excluded,
    })
}

/// Largest distance between two points of `set`.
pub fn diameter(set: &[usize], metric: &dyn VertexMetric) -> f64 {
    set.iter()
        .map(|&x| metric.distances_to(x, set).into_iter().fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

/// `dist(E, F) / min(diam E, diam F)`.
pub fn relative_distance(e: &[usize], f: &[usize], metric: &dyn VertexMetric) -> Result<f64> {
    let n = metric.point_count();
    if e.is_empty() || f.is_empty() {
        return Err(Error::invalid("relative distance needs nonempty sets"));
    }
    if let Some(&v) = e.iter().chain(f).find(|&&v| v >= n) {
        return Err(Error::invalid(format!("vertex {v} out of range")));
    }
    if e.iter().any(|v| f.contains(v)) {
        return Err(Error::invalid("sets must be disjoint"));
    }
    let scale = min_diameter(e, f, metric);
    if scale == 0.0 {
        return Err(Error::invalid("sets must have positive diameter"));
    }
    let from_e = metric.distances_from_set(e);
    let gap = f.iter().map(|&y| from_e[y]).fold(f64::INFINITY, f64::min);
    Ok(gap / scale)
}

/// `min(diam E, diam F)`, skipping the larger set's full diameter when one
/// row already shows it is not the minimum.
fn min_diameter(e: &[usize], f: &[usize], metric: &dyn VertexMetric) -> f64 {
    let (small, large) = if e.len() <= f.len() { (e, f) } else { (f, e) };
    let ds = diameter(small, metric);
    let lower = metric.distances_to(large[0], large).into_iter().fold(0.0, f64::max);
    if lower >= ds {
        ds
    } else {
        ds.min(diameter(large, metric))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnularReport {
    pub pass: bool,
    /// The annulus `B(x,2r) ∖ B(x,r)` is empty.
    pub vacuous: bool,
    /// Two annulus vertices that no path inside the enlarged annulus joins.
    pub witness: Option<(usize, usize)>,
    pub annulus_size: usize,
    /// Components of the enlarged annulus that meet the annulus.
    pub components: usize,
}

/// Whether every pair of vertices in `B(x,2r) ∖ B(x,r)` is joined inside
/// `B(x, ⌈C_L r⌉) ∖ B(x, ⌊r / C_L⌋)`.
pub fn annular_qc_check(g: &PlanarGraph, x: usize, r: u32, c_l: f64) -> Result<AnnularReport> {
    if x >= g.vertex_count() {
        return Err(Error::invalid(format!("vertex {x} out of range")));
    }
    // Below 2 the enlarged annulus would not contain the annulus itself.
    if r < 1 || !(c_l >= 2.0) {
        return Err(Error::invalid("need r ≥ 1 and C_L ≥ 2"));
    }
    let d = g.bfs_distances(x);
    let outer = (c_l * r as f64).ceil() as u32;
    let inner = (r as f64 / c_l).floor() as u32;
    let in_region = |v: usize| d[v] != UNREACHED && d[v] >= inner && d[v] < outer;
    let annulus: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| d[v] != UNREACHED && d[v] >= r && d[v] < 2 * r)
        .collect();
    if annulus.is_empty() {
        return Ok(AnnularReport {
            pass: true,
            vacuous: true,
            witness: None,
            annulus_size: 0,
            components: 0,
        });
    }
    let mut label = vec![usize::MAX; g.vertex_count()];
    let mut components = 0;
    let mut witness = None;
    let mut queue = VecDeque::new();
    for &start in &annulus {
        if label[start] != usize::MAX {
            continue;
        }
        if components == 1 && witness.is_none() {
            witness = Some((annulus[0], start));
        }
        label[start] = components;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if label[w] == usize::MAX && in_region(w) {
                    label[w] = components;
                    queue.push_back(w);
                }
            }
        }
        components += 1;
    }
    Ok(AnnularReport {
        pass: components == 1,
        vacuous: false,
        witness,
        annulus_size: annulus.len(),
        components,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoewnerRow {
    pub pair: usize,
    pub delta: f64,
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoewnerScan {
    pub rows: Vec<LoewnerRow>,
    pub skipped: Vec<(usize, String)>,
    /// Knots `(t, min Mod over rows with Δ ≤ t)` at each distinct Δ.
    pub envelope: Vec<(f64, f64)>,
}

impl LoewnerScan {
    /// Smallest modulus among pairs with `Δ ≤ t`; `None` if there are none.
    pub fn envelope_at(&self, t: f64) -> Option<f64> {
        self.envelope.iter().take_while(|(d, _)| *d <= t).last().map(|&(_, m)| m)
    }
}

fn is_connected_subset(g: &PlanarGraph, set: &[usize]) -> bool {
    let adjacency = g.induced_adjacency(set);
    let mut seen = vec![false; set.len()];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == set.len()
}

/// Relative distance in `lm` and edge modulus for each `(E, F)` pair.
pub fn loewner_scan(g: &PlanarGraph, lm: &LengthMetric, pairs: &[(Vec<usize>, Vec<usize>)]) -> Result<LoewnerScan> {
    if lm.graph.vertex_count() != g.vertex_count() {
        return Err(Error::invalid("length metric lives on a different graph"));
    }
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (i, (e, f)) in pairs.iter().enumerate() {
        if e.len() < 2 || f.len() < 2 {
            skipped.push((i, "continua need at least 2 vertices".to_string()));
            continue;
        }
        if !is_connected_subset(g, e) || !is_connected_subset(g, f) {
            skipped.push((i, "disconnected continuum".to_string()));
            continue;
        }
        let delta = match relative_distance(e, f, lm) {
            Ok(d) => d,
            Err(err) => {
                skipped.push((i, err.to_string()));
                continue;
            }
        };
        rows.push(LoewnerRow {
            pair: i,
            delta,
            modulus: edge_modulus(g, e, f)?,
        });
    }
    let mut by_delta: Vec<(f64, f64)> = rows.iter().map(|r| (r.delta, r.modulus)).collect();
    by_delta.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut envelope: Vec<(f64, f64)> = Vec::new();
    let mut running = f64::INFINITY;
    for (d, m) in by_delta {
        running = running.min(m);
        match envelope.last_mut() {
            Some(last) if last.0 == d => last.1 = running,
            _ => envelope.push((d, running)),
        }
    }
    Ok(LoewnerScan {
        rows,
        skipped,
        envelope,
    })
}

/// Pairs around `center`: `E` a graph geodesic of `segment` edges starting
/// at the center, `F` an arc of the thickened sphere `{R ≤ d < R + 2}` of
/// graph-radius at most `R`, for each `R` in `sphere_radii`.
pub fn loewner_pairs(
    g: &PlanarGraph,
    center: usize,
    segment: u32,
    sphere_radii: &[u32],
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if center >= g.vertex_count() {
        return Err(Error::invalid(format!("vertex {center} out of range")));
    }
    let d = g.bfs_distances(center);
    let mut out = Vec::new();
    for &radius in sphere_radii {
        if radius <= segment {
            return Err(Error::invalid("sphere radius must exceed the segment length"));
        }
        // Geodesic from the center towards the smallest-id vertex at `radius`.
        let Some(target) = (0..g.vertex_count()).find(|&v| d[v] == radius) else {
            continue;
        };
        let mut path = vec![target];
        let mut v = target;
        while d[v] > 0 {
            v = *g
                .neighbors(v)
                .iter()
                .filter(|&&w| d[w] + 1 == d[v])
                .min()
                .expect("BFS predecessor");
            path.push(v);
        }
        path.reverse();
        let e: Vec<usize> = path[..=segment as usize].to_vec();
        let in_shell = |w: usize| d[w] != UNREACHED && d[w] >= radius && d[w] < radius + 2;
        let mut reach = vec![UNREACHED; g.vertex_count()];
        reach[target] = 0;
        let mut queue = VecDeque::from([target]);
        let mut f = Vec::new();
        while let Some(v) = queue.pop_front() {
            f.push(v);
            if reach[v] >= radius {
                continue;
            }
            for &w in g.neighbors(v) {
                if reach[w] == UNREACHED && in_shell(w) {
                    reach[w] = reach[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        f.sort_unstable();
        out.push((e, f));
    }
    Ok(out)
}
