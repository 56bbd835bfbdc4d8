//! The 13-3 snowball rule on the cube and the 6-2 pentagon rule on the
//! dodecahedron.
//!
//! A complex is a list of counter-clockwise faces over integer vertex ids.
//! Subdivision keeps old ids, appends edge points (in sorted edge order),
//! then appends the interior vertices of each face in face order, so the
//! numbering is a deterministic function of the level.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{fixtures, PlanarGraph};

/// Highest level built without an explicit override.
pub const DEFAULT_MAX_LEVEL: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseKind {
    Cube,
    Dodecahedron,
}

impl BaseKind {
    /// Children produced from one face.
    pub fn branching(self) -> usize {
        match self {
            BaseKind::Cube => 13,
            BaseKind::Dodecahedron => 6,
        }
    }

    /// Factor by which side lengths shrink per level.
    pub fn side_divisor(self) -> u64 {
        match self {
            BaseKind::Cube => 3,
            BaseKind::Dodecahedron => 2,
        }
    }

    pub fn face_arity(self) -> usize {
        match self {
            BaseKind::Cube => 4,
            BaseKind::Dodecahedron => 5,
        }
    }

    pub fn base_faces(self) -> usize {
        match self {
            BaseKind::Cube => 6,
            BaseKind::Dodecahedron => 12,
        }
    }

    /// Predicted walk and volume exponent `log_{divisor}(branching)`.
    pub fn predicted_exponent(self) -> f64 {
        (self.branching() as f64).ln() / (self.side_divisor() as f64).ln()
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseKind::Cube => "cube",
            BaseKind::Dodecahedron => "dodecahedron",
        }
    }
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cube" => Ok(BaseKind::Cube),
            "dodecahedron" => Ok(BaseKind::Dodecahedron),
            other => Err(Error::invalid(format!("unknown base kind {other:?}"))),
        }
    }
}

/// A polygonal 2-sphere at some subdivision level.
#[derive(Debug, Clone)]
pub struct SubdivisionComplex {
    pub kind: BaseKind,
    pub level: u32,
    pub vertex_count: usize,
    /// Counter-clockwise face cycles.
    pub faces: Vec<Vec<usize>>,
    /// Whether each face descends from a level-0 face through center cells.
    pub central: Vec<bool>,
    /// Index of the level-`level - 1` face each face came from.
    pub parent: Vec<Option<usize>>,
    pub graph: PlanarGraph,
}

/// Vertex of a central face used as the observation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasePoint(pub usize);

impl SubdivisionComplex {
    /// Side length as the exact fraction `1 / side_denominator()`.
    pub fn side_denominator(&self) -> u64 {
        self.kind.side_divisor().pow(self.level)
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Smallest vertex id on any central face.
    pub fn base_point(&self) -> BasePoint {
        let p = self
            .faces
            .iter()
            .zip(&self.central)
            .filter(|(_, &c)| c)
            .flat_map(|(f, _)| f.iter().copied())
            .min()
            .expect("every complex has central faces");
        BasePoint(p)
    }
}

/// Level-0 complex of the given solid.
pub fn base_complex(kind: BaseKind) -> SubdivisionComplex {
    let (vertex_count, faces) = match kind {
        BaseKind::Cube => (8, fixtures::cube_faces()),
        BaseKind::Dodecahedron => (20, fixtures::dodecahedron_faces()),
    };
    let graph = PlanarGraph::from_oriented_faces(vertex_count, &faces).expect("platonic solid");
    SubdivisionComplex {
        kind,
        level: 0,
        vertex_count,
        central: vec![true; faces.len()],
        parent: vec![None; faces.len()],
        faces,
        graph,
    }
}

/// Shared points on subdivided edges, keyed by the sorted endpoint pair.
struct EdgePoints {
    index: HashMap<(usize, usize), usize>,
    per_edge: usize,
}

impl EdgePoints {
    fn new(faces: &[Vec<usize>], per_edge: usize, next_id: &mut usize) -> Self {
        let mut edges: Vec<(usize, usize)> = faces
            .iter()
            .flat_map(|f| {
                (0..f.len()).map(move |i| {
                    let (a, b) = (f[i], f[(i + 1) % f.len()]);
                    (a.min(b), a.max(b))
                })
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let mut index = HashMap::with_capacity(edges.len());
        for e in edges {
            index.insert(e, *next_id);
            *next_id += per_edge;
        }
        EdgePoints { index, per_edge }
    }

    /// Interior points of edge `a -> b`, ordered from `a` to `b`.
    fn between(&self, a: usize, b: usize) -> Vec<usize> {
        let base = self.index[&(a.min(b), a.max(b))];
        let mut pts: Vec<usize> = (base..base + self.per_edge).collect();
        if a > b {
            pts.reverse();
        }
        pts
    }
}

/// Replace each square by a 3x3 grid whose middle cell is raised into an
/// open box: eight grid squares, four walls and the lid (child 12).
fn subdivide_square(face: &[usize], edges: &EdgePoints, next_id: &mut usize) -> Vec<Vec<usize>> {
    let [a, b, c, d] = [face[0], face[1], face[2], face[3]];
    let mut g = [[usize::MAX; 4]; 4];
    g[0][0] = a;
    g[3][0] = b;
    g[3][3] = c;
    g[0][3] = d;
    let ab = edges.between(a, b);
    let bc = edges.between(b, c);
    let cd = edges.between(c, d);
    let da = edges.between(d, a);
    for k in 0..2 {
        g[1 + k][0] = ab[k];
        g[3][1 + k] = bc[k];
        g[2 - k][3] = cd[k];
        g[0][2 - k] = da[k];
    }
    for (i, j) in [(1, 1), (2, 1), (2, 2), (1, 2)] {
        g[i][j] = *next_id;
        *next_id += 1;
    }
    let mut top = [[usize::MAX; 3]; 3];
    for (i, j) in [(1, 1), (2, 1), (2, 2), (1, 2)] {
        top[i][j] = *next_id;
        *next_id += 1;
    }

    let mut children = Vec::with_capacity(13);
    for j in 0..3 {
        for i in 0..3 {
            if (i, j) != (1, 1) {
                children.push(vec![g[i][j], g[i + 1][j], g[i + 1][j + 1], g[i][j + 1]]);
            }
        }
    }
    let ring = [(1, 1), (2, 1), (2, 2), (1, 2)];
    for k in 0..4 {
        let (i0, j0) = ring[k];
        let (i1, j1) = ring[(k + 1) % 4];
        children.push(vec![g[i0][j0], g[i1][j1], top[i1][j1], top[i0][j0]]);
    }
    children.push(ring.iter().map(|&(i, j)| top[i][j]).collect());
    children
}

/// Split each pentagon into an inner pentagon (child 0) and five corner
/// pentagons, halving every side.
fn subdivide_pentagon(face: &[usize], edges: &EdgePoints, next_id: &mut usize) -> Vec<Vec<usize>> {
    let corners: Vec<usize> = face.to_vec();
    let mids: Vec<usize> = (0..5)
        .map(|i| edges.between(corners[i], corners[(i + 1) % 5])[0])
        .collect();
    let inner: Vec<usize> = (0..5).map(|k| *next_id + k).collect();
    *next_id += 5;
    let mut children = Vec::with_capacity(6);
    children.push(inner.clone());
    for i in 0..5 {
        let prev = (i + 4) % 5;
        children.push(vec![corners[i], mids[i], inner[i], inner[prev], mids[prev]]);
    }
    children
}

/// Index of the designated center cell among a face's children.
fn center_child(kind: BaseKind) -> usize {
    match kind {
        BaseKind::Cube => 12,
        BaseKind::Dodecahedron => 0,
    }
}

/// Applies the complex's rule to every face.
pub fn subdivide(c: &SubdivisionComplex) -> SubdivisionComplex {
    let mut next_id = c.vertex_count;
    let per_edge = c.kind.side_divisor() as usize - 1;
    let edges = EdgePoints::new(&c.faces, per_edge, &mut next_id);
    let branching = c.kind.branching();
    let mut faces = Vec::with_capacity(c.faces.len() * branching);
    let mut central = Vec::with_capacity(faces.capacity());
    let mut parent = Vec::with_capacity(faces.capacity());
    let center = center_child(c.kind);
    for (f, face) in c.faces.iter().enumerate() {
        let children = match c.kind {
            BaseKind::Cube => subdivide_square(face, &edges, &mut next_id),
            BaseKind::Dodecahedron => subdivide_pentagon(face, &edges, &mut next_id),
        };
        debug_assert_eq!(children.len(), branching);
        for (k, child) in children.into_iter().enumerate() {
            central.push(c.central[f] && k == center);
            parent.push(Some(f));
            faces.push(child);
        }
    }
    let graph = PlanarGraph::from_oriented_faces(next_id, &faces)
        .expect("subdivision preserves the sphere");
    SubdivisionComplex {
        kind: c.kind,
        level: c.level + 1,
        vertex_count: next_id,
        faces,
        central,
        parent,
        graph,
    }
}

/// Level-`n` complex and its base point, refusing levels above `max_level`.
pub fn level_graph_guarded(
    kind: BaseKind,
    n: u32,
    max_level: u32,
) -> Result<(SubdivisionComplex, BasePoint)> {
    if n > max_level {
        return Err(Error::ResourceGuard(format!(
            "level {n} exceeds the configured maximum {max_level} for {kind}"
        )));
    }
    let mut complex = base_complex(kind);
    for _ in 0..n {
        complex = subdivide(&complex);
    }
    let p = complex.base_point();
    Ok((complex, p))
}

/// Level-`n` complex with the default resource guard.
pub fn level_graph(kind: BaseKind, n: u32) -> Result<(SubdivisionComplex, BasePoint)> {
    level_graph_guarded(kind, n, DEFAULT_MAX_LEVEL)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_counts(c: &SubdivisionComplex) {
        let f = c.face_count();
        let g = &c.graph;
        assert_eq!(f, c.kind.base_faces() * c.kind.branching().pow(c.level));
        assert!(c.faces.iter().all(|face| face.len() == c.kind.face_arity()));
        match c.kind {
            BaseKind::Cube => {
                assert_eq!(g.edge_count(), 2 * f);
                assert_eq!(g.vertex_count(), f + 2);
            }
            BaseKind::Dodecahedron => {
                assert_eq!(2 * g.edge_count(), 5 * f);
                assert_eq!(2 * g.vertex_count(), 3 * f + 4);
            }
        }
        assert!(g.is_spherical());
    }

    #[test]
    fn base_complexes() {
        let cube = base_complex(BaseKind::Cube);
        assert_eq!(
            (cube.graph.vertex_count(), cube.graph.edge_count(), cube.face_count()),
            (8, 12, 6)
        );
        let dod = base_complex(BaseKind::Dodecahedron);
        assert_eq!(
            (dod.graph.vertex_count(), dod.graph.edge_count(), dod.face_count()),
            (20, 30, 12)
        );
        check_counts(&cube);
        check_counts(&dod);
    }

    #[test]
    fn first_subdivisions() {
        let c1 = subdivide(&base_complex(BaseKind::Cube));
        assert_eq!(
            (c1.face_count(), c1.graph.edge_count(), c1.graph.vertex_count()),
            (78, 156, 80)
        );
        let d1 = subdivide(&base_complex(BaseKind::Dodecahedron));
        assert_eq!(
            (d1.face_count(), d1.graph.edge_count(), d1.graph.vertex_count()),
            (72, 180, 110)
        );
        let c2 = subdivide(&c1);
        assert_eq!(c2.face_count(), 1014);
        for c in [&c1, &d1, &c2] {
            check_counts(c);
        }
    }

    #[test]
    fn traced_faces_equal_complex_faces() {
        let (c, _) = level_graph(BaseKind::Cube, 2).unwrap();
        let traced = c.graph.faces();
        let canon = |f: &[usize]| {
            let s = (0..f.len()).min_by_key(|&i| f[i]).unwrap();
            (0..f.len()).map(|i| f[(s + i) % f.len()]).collect::<Vec<_>>()
        };
        let mut a: Vec<_> = traced.faces.iter().map(|f| canon(f)).collect();
        let mut b: Vec<_> = c.faces.iter().map(|f| canon(f)).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn central_faces_and_base_point() {
        for kind in [BaseKind::Cube, BaseKind::Dodecahedron] {
            for n in 0..3 {
                let (c, p) = level_graph(kind, n).unwrap();
                assert_eq!(c.central.iter().filter(|&&x| x).count(), kind.base_faces());
                let on_central = c
                    .faces
                    .iter()
                    .zip(&c.central)
                    .any(|(f, &central)| central && f.contains(&p.0));
                assert!(on_central);
            }
        }
        let (_, p0) = level_graph(BaseKind::Cube, 0).unwrap();
        assert_eq!(p0, BasePoint(0));
    }

    #[test]
    fn degrees_stay_bounded() {
        let maxima: Vec<usize> = (0..4)
            .map(|n| level_graph(BaseKind::Cube, n).unwrap().0.graph.max_degree())
            .collect();
        assert_eq!(maxima[2], maxima[3]);
        assert_eq!(maxima[3], 5);
        let pent: Vec<usize> = (0..4)
            .map(|n| level_graph(BaseKind::Dodecahedron, n).unwrap().0.graph.max_degree())
            .collect();
        assert_eq!(pent, vec![3, 4, 4, 4]);
    }

    #[test]
    fn children_share_their_parent_boundary() {
        let c0 = base_complex(BaseKind::Cube);
        let c1 = subdivide(&c0);
        for (f, parent) in c0.faces.iter().enumerate() {
            let kids: Vec<&Vec<usize>> = c1
                .faces
                .iter()
                .zip(&c1.parent)
                .filter(|(_, p)| **p == Some(f))
                .map(|(k, _)| k)
                .collect();
            assert_eq!(kids.len(), 13);
            for corner in parent {
                assert!(kids.iter().any(|k| k.contains(corner)));
            }
        }
    }

    #[test]
    fn resource_guard() {
        assert!(matches!(
            level_graph_guarded(BaseKind::Cube, 6, 5),
            Err(Error::ResourceGuard(_))
        ));
    }

    #[test]
    fn predicted_exponents() {
        assert!((BaseKind::Cube.predicted_exponent() - 2.334717).abs() < 1e-6);
        assert!((BaseKind::Dodecahedron.predicted_exponent() - 2.584963).abs() < 1e-6);
    }
}
