//! Planar graphs stored as rotation systems.
//!
//! The cyclic order of each vertex's neighbor list is the counter-clockwise
//! order of the edges around that vertex in a fixed embedding. Every
//! directed edge ("dart") is addressed by its slot in the flattened
//! neighbor array, so dart `d` runs from `tail(d)` to `head(d)`.
//!
//! Faces are traced with the face kept on the left: after arriving at `v`
//! along `u -> v`, the walk leaves along the neighbor that precedes `u` in
//! the rotation at `v`. Faces of a spherical map therefore come out
//! counter-clockwise.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::fit::{fit_power_law, ExponentFit};

/// Sentinel distance for vertices not reached by a search.
pub const UNREACHED: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarGraph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    tails: Vec<usize>,
    twins: Vec<usize>,
    labels: Option<Vec<String>>,
}

/// Directed face cycles traced from a rotation system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceList {
    pub faces: Vec<Vec<usize>>,
    /// Face index of every dart, aligned with the graph's dart numbering.
    pub dart_face: Vec<usize>,
}

impl FaceList {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn total_length(&self) -> usize {
        self.faces.iter().map(Vec::len).sum()
    }
}

impl PlanarGraph {
    /// Builds a graph from per-vertex cyclic neighbor lists.
    ///
    /// Rejects self-loops, repeated neighbors, asymmetric adjacency and
    /// disconnected graphs.
    pub fn from_rotation(adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for list in &adjacency {
            offsets.push(offsets.last().unwrap() + list.len());
        }
        let mut neighbors = Vec::with_capacity(*offsets.last().unwrap());
        let mut tails = Vec::with_capacity(neighbors.capacity());
        for (v, list) in adjacency.iter().enumerate() {
            for &u in list {
                if u >= n {
                    return Err(Error::InvalidGraph(format!(
                        "vertex {v} lists out-of-range neighbor {u}"
                    )));
                }
                if u == v {
                    return Err(Error::InvalidGraph(format!("self-loop at vertex {v}")));
                }
                neighbors.push(u);
                tails.push(v);
            }
        }

        // Pair each dart with its reverse by sorting (min, max, tail) keys.
        let mut keyed: Vec<(usize, usize, usize)> = (0..neighbors.len())
            .map(|d| {
                let (a, b) = (tails[d], neighbors[d]);
                (a.min(b), a.max(b), d)
            })
            .collect();
        keyed.sort_unstable();
        let mut twins = vec![usize::MAX; neighbors.len()];
        let mut i = 0;
        while i < keyed.len() {
            let mut j = i + 1;
            while j < keyed.len() && keyed[j].0 == keyed[i].0 && keyed[j].1 == keyed[i].1 {
                j += 1;
            }
            let (a, b) = (keyed[i].0, keyed[i].1);
            match j - i {
                2 => {
                    let (d0, d1) = (keyed[i].2, keyed[i + 1].2);
                    if tails[d0] == tails[d1] {
                        return Err(Error::InvalidGraph(format!(
                            "vertex {} lists neighbor {} twice",
                            tails[d0], neighbors[d0]
                        )));
                    }
                    twins[d0] = d1;
                    twins[d1] = d0;
                }
                1 => {
                    return Err(Error::InvalidGraph(format!(
                        "edge {a}-{b} is listed by only one endpoint"
                    )))
                }
                _ => {
                    return Err(Error::InvalidGraph(format!(
                        "edge {a}-{b} is listed more than once"
                    )))
                }
            }
            i = j;
        }

        let graph = PlanarGraph {
            offsets,
            neighbors,
            tails,
            twins,
            labels: None,
        };
        let dist = graph.bfs_distances(0);
        if let Some(v) = dist.iter().position(|&d| d == UNREACHED) {
            return Err(Error::InvalidGraph(format!(
                "graph is disconnected (vertex {v} unreachable from 0)"
            )));
        }
        Ok(graph)
    }

    /// Builds the rotation system of a closed oriented surface from its
    /// counter-clockwise face cycles.
    pub fn from_oriented_faces(vertex_count: usize, faces: &[Vec<usize>]) -> Result<Self> {
        // succ[v] holds (w, u) pairs: in the rotation at v, u follows w.
        let mut succ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertex_count];
        for face in faces {
            let k = face.len();
            if k < 2 {
                return Err(Error::InvalidGraph("face with fewer than 2 sides".into()));
            }
            for i in 0..k {
                let u = face[(i + k - 1) % k];
                let v = face[i];
                let w = face[(i + 1) % k];
                if v >= vertex_count || u >= vertex_count || w >= vertex_count {
                    return Err(Error::InvalidGraph(format!("face vertex out of range: {face:?}")));
                }
                succ[v].push((w, u));
            }
        }
        let mut adjacency = Vec::with_capacity(vertex_count);
        for (v, pairs) in succ.iter_mut().enumerate() {
            if pairs.is_empty() {
                return Err(Error::InvalidGraph(format!("vertex {v} lies on no face")));
            }
            pairs.sort_unstable();
            for win in pairs.windows(2) {
                if win[0].0 == win[1].0 {
                    return Err(Error::InvalidGraph(format!(
                        "vertex {v} is not a manifold point (neighbor {} repeated)",
                        win[0].0
                    )));
                }
            }
            let start = pairs[0].0;
            let mut cycle = Vec::with_capacity(pairs.len());
            let mut cur = start;
            loop {
                cycle.push(cur);
                let idx = pairs
                    .binary_search_by(|p| p.0.cmp(&cur))
                    .map_err(|_| Error::InvalidGraph(format!("open link at vertex {v}")))?;
                cur = pairs[idx].1;
                if cur == start {
                    break;
                }
                if cycle.len() > pairs.len() {
                    return Err(Error::InvalidGraph(format!("link of vertex {v} is not a cycle")));
                }
            }
            if cycle.len() != pairs.len() {
                return Err(Error::InvalidGraph(format!(
                    "link of vertex {v} splits into several cycles"
                )));
            }
            adjacency.push(cycle);
        }
        Self::from_rotation(adjacency)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vertex_count() {
            return Err(Error::invalid(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.vertex_count()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn dart_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Neighbors of `v` in counter-clockwise order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Range of dart indices leaving `v`.
    pub fn darts(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    pub fn head(&self, dart: usize) -> usize {
        self.neighbors[dart]
    }

    pub fn tail(&self, dart: usize) -> usize {
        self.tails[dart]
    }

    pub fn twin(&self, dart: usize) -> usize {
        self.twins[dart]
    }

    /// Next dart around the face to the left of `dart`.
    pub fn next_in_face(&self, dart: usize) -> usize {
        let back = self.twins[dart];
        let v = self.neighbors[dart];
        let base = self.offsets[v];
        let deg = self.offsets[v + 1] - base;
        base + (back - base + deg - 1) % deg
    }

    /// Dart following `dart` counter-clockwise around its tail.
    pub fn rotate_ccw(&self, dart: usize) -> usize {
        let v = self.tails[dart];
        let base = self.offsets[v];
        let deg = self.offsets[v + 1] - base;
        base + (dart - base + 1) % deg
    }

    /// Dart from `u` to `v`, if the edge exists.
    pub fn find_dart(&self, u: usize, v: usize) -> Option<usize> {
        self.darts(u).find(|&d| self.neighbors[d] == v)
    }

    /// Undirected edges as `(u, v)` with `u < v`, in dart order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dart_count()).filter_map(move |d| {
            let (u, v) = (self.tails[d], self.neighbors[d]);
            (u < v).then_some((u, v))
        })
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.vertex_count())
            .map(|v| self.neighbors(v).to_vec())
            .collect()
    }

    /// Traces every face of the rotation system.
    pub fn faces(&self) -> FaceList {
        let mut dart_face = vec![usize::MAX; self.dart_count()];
        let mut faces = Vec::new();
        for start in 0..self.dart_count() {
            if dart_face[start] != usize::MAX {
                continue;
            }
            let f = faces.len();
            let mut cycle = Vec::new();
            let mut d = start;
            loop {
                dart_face[d] = f;
                cycle.push(self.tails[d]);
                d = self.next_in_face(d);
                if d == start {
                    break;
                }
            }
            faces.push(cycle);
        }
        FaceList { faces, dart_face }
    }

    /// `V - E + F` of the traced map.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.faces().len() as i64
    }

    pub fn is_spherical(&self) -> bool {
        self.euler_characteristic() == 2
    }

    /// Breadth-first graph distances from `source`.
    pub fn bfs_distances(&self, source: usize) -> Vec<u32> {
        self.bfs_distances_from(&[source])
    }

    /// Distances to the nearest of `sources`.
    pub fn bfs_distances_from(&self, sources: &[usize]) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let next = dist[v] + 1;
            for &u in self.neighbors(v) {
                if dist[u] == UNREACHED {
                    dist[u] = next;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    fn check_vertex(&self, x: usize) -> Result<()> {
        if x >= self.vertex_count() {
            return Err(Error::invalid(format!(
                "vertex {x} out of range (graph has {} vertices)",
                self.vertex_count()
            )));
        }
        Ok(())
    }

    /// Open ball `{y : d(x, y) < r}`, sorted by vertex id.
    pub fn ball(&self, x: usize, r: u32) -> Result<Vec<usize>> {
        self.check_vertex(x)?;
        let dist = self.bfs_distances(x);
        Ok((0..self.vertex_count()).filter(|&y| dist[y] < r).collect())
    }

    /// Log–log fit of `|B(center, r)|` against `r`.
    pub fn volume_growth_fit(&self, center: usize, radii: &[u32]) -> Result<ExponentFit> {
        self.check_vertex(center)?;
        if radii.len() < 3 {
            return Err(Error::invalid("volume growth fit needs at least 3 radii"));
        }
        if radii.iter().any(|&r| r < 2) || radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("radii must be increasing and at least 2"));
        }
        let counts = self.ball_sizes(center, radii);
        let points: Vec<(f64, f64)> = radii
            .iter()
            .zip(&counts)
            .map(|(&r, &c)| (r as f64, c as f64))
            .collect();
        fit_power_law(&points)
    }

    /// `|B(center, r)|` for each radius.
    pub fn ball_sizes(&self, center: usize, radii: &[u32]) -> Vec<usize> {
        let dist = self.bfs_distances(center);
        let mut histogram = Vec::new();
        for &d in &dist {
            if d != UNREACHED {
                let d = d as usize;
                if histogram.len() <= d {
                    histogram.resize(d + 1, 0usize);
                }
                histogram[d] += 1;
            }
        }
        radii
            .iter()
            .map(|&r| histogram.iter().take(r as usize).sum())
            .collect()
    }

    /// Largest graph distance from `x`.
    pub fn eccentricity(&self, x: usize) -> u32 {
        self.bfs_distances(x).into_iter().max().unwrap_or(0)
    }

    /// The planar dual: one vertex per face, adjacent across shared edges.
    pub fn planar_dual(&self) -> Result<PlanarGraph> {
        if !self.is_spherical() {
            return Err(Error::invalid("planar dual requires a spherical map"));
        }
        let faces = self.faces();
        let mut adjacency = Vec::with_capacity(faces.len());
        for (f, cycle) in faces.faces.iter().enumerate() {
            // Recover the darts of this face in traversal order.
            let first = self
                .darts(cycle[0])
                .find(|&d| faces.dart_face[d] == f && self.head(d) == cycle[1 % cycle.len()])
                .expect("face dart");
            let mut list = Vec::with_capacity(cycle.len());
            let mut d = first;
            loop {
                let g = faces.dart_face[self.twins[d]];
                if g == f {
                    return Err(Error::Multigraph(format!("face {f} borders itself (bridge)")));
                }
                if list.contains(&g) {
                    return Err(Error::Multigraph(format!(
                        "faces {f} and {g} share more than one edge"
                    )));
                }
                list.push(g);
                d = self.next_in_face(d);
                if d == first {
                    break;
                }
            }
            adjacency.push(list);
        }
        PlanarGraph::from_rotation(adjacency)
    }

    /// Adds one vertex per face joined to every corner of that face.
    ///
    /// Original vertices keep their ids; the vertex of face `f` gets id
    /// `vertex_count + f`.
    pub fn face_barycenter_triangulation(&self) -> Result<PlanarGraph> {
        if !self.is_spherical() {
            return Err(Error::invalid("barycenter triangulation requires a spherical map"));
        }
        let faces = self.faces();
        if let Some(f) = faces.faces.iter().position(|c| c.len() < 3) {
            return Err(Error::invalid(format!(
                "face {f} has length {} < 3",
                faces.faces[f].len()
            )));
        }
        let n = self.vertex_count();
        let mut adjacency = Vec::with_capacity(n + faces.len());
        for v in 0..n {
            let mut list = Vec::with_capacity(2 * self.degree(v));
            for d in self.darts(v) {
                list.push(self.head(d));
                list.push(n + faces.dart_face[d]);
            }
            adjacency.push(list);
        }
        adjacency.extend(faces.faces.iter().cloned());
        PlanarGraph::from_rotation(adjacency)
    }

    /// Neighbor lists of the subgraph induced on `vertices`, re-indexed by
    /// position in `vertices`. The result need not be connected.
    pub fn induced_adjacency(&self, vertices: &[usize]) -> Vec<Vec<usize>> {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        vertices
            .iter()
            .map(|&v| {
                self.neighbors(v)
                    .iter()
                    .filter_map(|&u| (index[u] != usize::MAX).then_some(index[u]))
                    .collect()
            })
            .collect()
    }

    /// Orientation-independent canonical code of the rotation system.
    /// Two maps are isomorphic (possibly reflecting) iff their codes match.
    pub fn canonical_code(&self) -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        for reversed in [false, true] {
            for start in 0..self.dart_count() {
                let code = self.code_from(start, reversed);
                if best.as_ref().is_none_or(|b| code < *b) {
                    best = Some(code);
                }
            }
        }
        best.unwrap_or_default()
    }

    fn code_from(&self, start: usize, reversed: bool) -> Vec<usize> {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut entry = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let root = self.tails[start];
        label[root] = 0;
        entry[root] = start;
        order.push(root);
        let mut code = Vec::with_capacity(n + self.dart_count());
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            let deg = self.degree(v);
            code.push(deg);
            let mut d = entry[v];
            for _ in 0..deg {
                let u = self.head(d);
                if label[u] == usize::MAX {
                    label[u] = order.len();
                    entry[u] = self.twins[d];
                    order.push(u);
                }
                code.push(label[u]);
                d = if reversed {
                    let base = self.offsets[v];
                    base + (d - base + deg - 1) % deg
                } else {
                    self.rotate_ccw(d)
                };
            }
            i += 1;
        }
        code
    }

    pub fn is_isomorphic(&self, other: &PlanarGraph) -> bool {
        self.vertex_count() == other.vertex_count()
            && self.edge_count() == other.edge_count()
            && self.canonical_code() == other.canonical_code()
    }
}

/// Standard small maps used by tests and examples.
pub mod fixtures {
    use super::PlanarGraph;

    /// Cube graph with counter-clockwise rotations as seen from outside.
    pub fn cube() -> PlanarGraph {
        PlanarGraph::from_oriented_faces(8, &cube_faces()).expect("cube")
    }

    /// Faces of the unit cube, counter-clockwise viewed from outside.
    /// Vertex `i` sits at `(i & 1, (i >> 1) & 1, (i >> 2) & 1)`.
    pub fn cube_faces() -> Vec<Vec<usize>> {
        vec![
            vec![0, 2, 3, 1], // z = 0
            vec![4, 5, 7, 6], // z = 1
            vec![0, 1, 5, 4], // y = 0
            vec![2, 6, 7, 3], // y = 1
            vec![0, 4, 6, 2], // x = 0
            vec![1, 3, 7, 5], // x = 1
        ]
    }

    /// Faces of the regular dodecahedron, consistently oriented.
    pub fn dodecahedron_faces() -> Vec<Vec<usize>> {
        // Outer ring 0..5, ring 5..10 and 10..15 zig-zag, inner ring 15..20.
        let mut faces = vec![vec![0, 4, 3, 2, 1]];
        for i in 0..5 {
            let j = (i + 1) % 5;
            faces.push(vec![i, j, 5 + j, 10 + i, 5 + i]);
        }
        for i in 0..5 {
            let j = (i + 1) % 5;
            faces.push(vec![10 + i, 5 + j, 10 + j, 15 + j, 15 + i]);
        }
        faces.push(vec![15, 16, 17, 18, 19]);
        faces
    }

    pub fn dodecahedron() -> PlanarGraph {
        PlanarGraph::from_oriented_faces(20, &dodecahedron_faces()).expect("dodecahedron")
    }

    /// A single triangle viewed as a sphere made of two triangular faces.
    pub fn triangle() -> PlanarGraph {
        PlanarGraph::from_rotation(vec![vec![1, 2], vec![2, 0], vec![0, 1]]).expect("triangle")
    }

    pub fn path(n: usize) -> PlanarGraph {
        let adjacency = (0..n)
            .map(|v| {
                let mut list = Vec::new();
                if v > 0 {
                    list.push(v - 1);
                }
                if v + 1 < n {
                    list.push(v + 1);
                }
                list
            })
            .collect();
        PlanarGraph::from_rotation(adjacency).expect("path")
    }

    pub fn cycle(n: usize) -> PlanarGraph {
        let adjacency = (0..n).map(|v| vec![(v + n - 1) % n, (v + 1) % n]).collect();
        PlanarGraph::from_rotation(adjacency).expect("cycle")
    }

    /// `width x height` grid; vertex `(i, j)` has id `j * width + i`, and the
    /// rotation is counter-clockwise (east, north, west, south).
    pub fn grid(width: usize, height: usize) -> PlanarGraph {
        let id = |i: usize, j: usize| j * width + i;
        let mut adjacency = Vec::with_capacity(width * height);
        for j in 0..height {
            for i in 0..width {
                let mut list = Vec::with_capacity(4);
                if i + 1 < width {
                    list.push(id(i + 1, j));
                }
                if j + 1 < height {
                    list.push(id(i, j + 1));
                }
                if i > 0 {
                    list.push(id(i - 1, j));
                }
                if j > 0 {
                    list.push(id(i, j - 1));
                }
                adjacency.push(list);
            }
        }
        PlanarGraph::from_rotation(adjacency).expect("grid")
    }

    pub fn complete(n: usize) -> PlanarGraph {
        let adjacency = (0..n)
            .map(|v| (0..n).filter(|&u| u != v).collect())
            .collect();
        PlanarGraph::from_rotation(adjacency).expect("complete graph")
    }

    /// Wheel with `rim` spokes: hub 0, rim vertices 1..=rim counter-clockwise.
    pub fn wheel(rim: usize) -> PlanarGraph {
        let mut adjacency = vec![(1..=rim).collect::<Vec<_>>()];
        for i in 0..rim {
            let next = (i + 1) % rim + 1;
            let prev = (i + rim - 1) % rim + 1;
            adjacency.push(vec![0, prev, next]);
        }
        PlanarGraph::from_rotation(adjacency).expect("wheel")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn cube_faces_and_euler() {
        let g = cube();
        let faces = g.faces();
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.edge_count(), 12);
        assert_eq!(faces.len(), 6);
        assert!(faces.faces.iter().all(|f| f.len() == 4));
        assert_eq!(g.euler_characteristic(), 2);
        assert_eq!(faces.total_length(), 2 * g.edge_count());
    }

    #[test]
    fn traced_faces_match_input_orientation() {
        let g = cube();
        let traced = g.faces();
        for face in cube_faces() {
            let found = traced.faces.iter().any(|t| {
                t.len() == face.len()
                    && (0..t.len()).any(|s| (0..t.len()).all(|i| t[(s + i) % t.len()] == face[i]))
            });
            assert!(found, "face {face:?} not traced with the same orientation");
        }
    }

    #[test]
    fn triangle_has_two_faces() {
        let faces = triangle().faces();
        assert_eq!(faces.len(), 2);
        assert!(faces.faces.iter().all(|f| f.len() == 3));
    }

    #[test]
    fn dodecahedron_faces_are_pentagons() {
        let g = dodecahedron();
        assert_eq!((g.vertex_count(), g.edge_count()), (20, 30));
        let faces = g.faces();
        assert_eq!(faces.len(), 12);
        assert!(faces.faces.iter().all(|f| f.len() == 5));
        assert!(g.is_spherical());
    }

    #[test]
    fn rejects_asymmetric_rotation() {
        let err = PlanarGraph::from_rotation(vec![vec![1], vec![]]).unwrap_err();
        assert!(matches!(err, Error::InvalidGraph(_)));
        assert!(PlanarGraph::from_rotation(vec![vec![0]]).is_err());
        assert!(PlanarGraph::from_rotation(vec![vec![1, 1], vec![0, 0]]).is_err());
        assert!(PlanarGraph::from_rotation(vec![vec![1], vec![0], vec![]]).is_err());
    }

    #[test]
    fn balls_are_strict() {
        let g = path(3);
        assert_eq!(g.ball(0, 1).unwrap(), vec![0]);
        assert_eq!(g.ball(0, 2).unwrap(), vec![0, 1]);
        let c = cube();
        for x in 0..8 {
            assert_eq!(c.ball(x, 1).unwrap(), vec![x]);
            let b = c.ball(x, 3).unwrap();
            assert_eq!(b.len(), 7);
            assert!(!b.contains(&(x ^ 7)), "antipode excluded");
        }
        assert!(c.ball(8, 1).is_err());
    }

    #[test]
    fn grid_volume_exponent() {
        let g = grid(257, 257);
        let center = 128 * 257 + 128;
        let fit = g.volume_growth_fit(center, &[8, 16, 32, 64]).unwrap();
        assert!(fit.exponent >= 1.85 && fit.exponent <= 2.15, "{fit:?}");
    }

    #[test]
    fn path_volume_exponent() {
        let g = path(201);
        let fit = g.volume_growth_fit(100, &[8, 16, 32]).unwrap();
        assert!((fit.exponent - 1.0).abs() < 0.05, "{fit:?}");
        assert!(g.volume_growth_fit(100, &[8, 16]).is_err());
        assert!(g.volume_growth_fit(100, &[1, 8, 16]).is_err());
    }

    #[test]
    fn duals_of_platonic_solids() {
        let oct = cube().planar_dual().unwrap();
        assert_eq!(oct.vertex_count(), 6);
        assert!((0..6).all(|v| oct.degree(v) == 4));
        assert!(oct.faces().faces.iter().all(|f| f.len() == 3));
        let ico = dodecahedron().planar_dual().unwrap();
        assert_eq!((ico.vertex_count(), ico.edge_count()), (12, 30));
        assert!((0..12).all(|v| ico.degree(v) == 5));
    }

    #[test]
    fn double_dual_is_identity() {
        for g in [cube(), dodecahedron()] {
            let dd = g.planar_dual().unwrap().planar_dual().unwrap();
            assert!(dd.is_isomorphic(&g));
        }
        let bary = cube().face_barycenter_triangulation().unwrap();
        let dd = bary.planar_dual().unwrap().planar_dual().unwrap();
        assert!(dd.is_isomorphic(&bary));
        assert!(!bary.is_isomorphic(&cube()));
    }

    #[test]
    fn two_triangle_dual_is_a_multigraph() {
        assert!(matches!(triangle().planar_dual(), Err(Error::Multigraph(_))));
    }

    #[test]
    fn cube_barycenter_triangulation() {
        let t = cube().face_barycenter_triangulation().unwrap();
        let faces = t.faces();
        assert_eq!((t.vertex_count(), t.edge_count(), faces.len()), (14, 36, 24));
        assert!(faces.faces.iter().all(|f| f.len() == 3));
        assert_eq!(t.euler_characteristic(), 2);
    }

    #[test]
    fn triangulation_input_splits_each_triangle() {
        let oct = cube().planar_dual().unwrap();
        let t = oct.face_barycenter_triangulation().unwrap();
        assert_eq!(t.faces().len(), 3 * oct.faces().len());
    }

    #[test]
    fn barycenter_rejects_digons() {
        assert!(path(2).face_barycenter_triangulation().is_err());
    }
}
