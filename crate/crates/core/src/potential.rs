//! Dirichlet problems, capacities, edge moduli and Poincaré constants.
//!
//! Everything reduces to the weighted graph Laplacian. Harmonic extensions
//! are found with Jacobi-preconditioned conjugate gradients on the free
//! vertices; Neumann eigenvalues by inverse iteration with the constants
//! projected out.

use crate::error::{Error, Result};
use crate::fit::fit_power_law;
use crate::graph::{PlanarGraph, UNREACHED};
use crate::linalg::{self, pcg};

/// Relative residual for the reduced Laplacian solves.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Convergence tolerance on the Neumann eigenvalue.
pub const EIGEN_TOL: f64 = 1e-8;

/// Boundary-value problem `u = 1` on `sources`, `u = 0` on `sinks`,
/// harmonic elsewhere.
#[derive(Debug, Clone)]
pub struct DirichletProblem<'g> {
    pub graph: &'g PlanarGraph,
    /// Per-dart conductances (both darts of an edge carry the same value);
    /// `None` means unit conductance.
    pub conductances: Option<Vec<f64>>,
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
}

impl<'g> DirichletProblem<'g> {
    pub fn new(graph: &'g PlanarGraph, sources: Vec<usize>, sinks: Vec<usize>) -> Self {
        DirichletProblem {
            graph,
            conductances: None,
            sources,
            sinks,
        }
    }

    pub fn with_conductances(mut self, conductances: Vec<f64>) -> Self {
        self.conductances = Some(conductances);
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.graph.vertex_count();
        if self.sources.is_empty() || self.sinks.is_empty() {
            return Err(Error::invalid("source and sink sets must be nonempty"));
        }
        let mut seen = vec![0u8; n];
        for &v in &self.sources {
            if v >= n {
                return Err(Error::invalid(format!("source vertex {v} out of range")));
            }
            seen[v] = 1;
        }
        for &v in &self.sinks {
            if v >= n {
                return Err(Error::invalid(format!("sink vertex {v} out of range")));
            }
            if seen[v] == 1 {
                return Err(Error::invalid(format!("vertex {v} is both source and sink")));
            }
        }
        if let Some(c) = &self.conductances {
            if c.len() != self.graph.dart_count() {
                return Err(Error::invalid(format!(
                    "{} conductances for {} darts",
                    c.len(),
                    self.graph.dart_count()
                )));
            }
            for d in 0..c.len() {
                if !(c[d] > 0.0 && c[d].is_finite()) {
                    return Err(Error::invalid("conductances must be positive and finite"));
                }
                if c[d] != c[self.graph.twin(d)] {
                    return Err(Error::invalid("conductances must be symmetric"));
                }
            }
        }
        Ok(())
    }

    fn conductance(&self, dart: usize) -> f64 {
        self.conductances.as_ref().map_or(1.0, |c| c[dart])
    }
}

#[derive(Debug, Clone)]
pub struct PotentialSolution {
    pub u: Vec<f64>,
    /// `Σ_e c_e (u_x - u_y)²`.
    pub energy: f64,
    /// Net current leaving the sources.
    pub current: f64,
    /// Largest `|Σ_y c_xy (u_x - u_y)| / Σ_y c_xy` over free vertices.
    pub residual: f64,
    pub iterations: usize,
}

const FIXED_ONE: u8 = 1;
const FIXED_ZERO: u8 = 2;
const FREE: u8 = 0;

/// Harmonic extension of the boundary data.
///
/// Free components that see only one side take that side's value; those
/// that see neither are set to 0.
pub fn solve_dirichlet(p: &DirichletProblem, tol: f64) -> Result<PotentialSolution> {
    p.validate()?;
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let g = p.graph;
    let n = g.vertex_count();
    let mut state = vec![FREE; n];
    for &v in &p.sources {
        state[v] = FIXED_ONE;
    }
    for &v in &p.sinks {
        state[v] = FIXED_ZERO;
    }
    let mut u = vec![0.0; n];
    for &v in &p.sources {
        u[v] = 1.0;
    }

    // Sort free vertices into components and decide which need a solve.
    let mut component = vec![usize::MAX; n];
    let mut touches: Vec<(bool, bool)> = Vec::new();
    let mut stack = Vec::new();
    for s in 0..n {
        if state[s] != FREE || component[s] != usize::MAX {
            continue;
        }
        let id = touches.len();
        let mut seen = (false, false);
        component[s] = id;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                match state[w] {
                    FIXED_ONE => seen.0 = true,
                    FIXED_ZERO => seen.1 = true,
                    _ => {
                        if component[w] == usize::MAX {
                            component[w] = id;
                            stack.push(w);
                        }
                    }
                }
            }
        }
        touches.push(seen);
    }
    let mut slot = vec![usize::MAX; n];
    let mut free = Vec::new();
    for v in 0..n {
        if state[v] != FREE {
            continue;
        }
        match touches[component[v]] {
            (true, true) => {
                slot[v] = free.len();
                free.push(v);
            }
            (true, false) => u[v] = 1.0,
            _ => {}
        }
    }

    let mut iterations = 0;
    if !free.is_empty() {
        let m = free.len();
        let mut diag = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for (i, &v) in free.iter().enumerate() {
            for d in g.darts(v) {
                let c = p.conductance(d);
                diag[i] += c;
                let w = g.head(d);
                if slot[w] == usize::MAX {
                    rhs[i] += c * u[w];
                }
            }
        }
        let apply = |x: &[f64], out: &mut [f64]| {
            for (i, &v) in free.iter().enumerate() {
                let mut acc = diag[i] * x[i];
                for d in g.darts(v) {
                    let s = slot[g.head(d)];
                    if s != usize::MAX {
                        acc -= p.conductance(d) * x[s];
                    }
                }
                out[i] = acc;
            }
        };
        let out = pcg(apply, &diag, &rhs, tol, 20 * m + 1000);
        iterations = out.iterations;
        if !out.converged {
            return Err(Error::NonConvergence {
                what: "Dirichlet solve",
                iterations: out.iterations,
                residual: out.relative_residual,
            });
        }
        for (i, &v) in free.iter().enumerate() {
            u[v] = out.x[i];
        }
    }

    let mut energy = 0.0;
    let mut current = 0.0;
    let mut residual = 0.0f64;
    for v in 0..n {
        let mut flow = 0.0;
        let mut total = 0.0;
        for d in g.darts(v) {
            let c = p.conductance(d);
            let w = g.head(d);
            let du = u[v] - u[w];
            flow += c * du;
            total += c;
            if v < w {
                energy += c * du * du;
            }
        }
        match state[v] {
            FIXED_ONE => current += flow,
            FREE if slot[v] != usize::MAX => residual = residual.max(flow.abs() / total),
            _ => {}
        }
    }
    Ok(PotentialSolution {
        u,
        energy,
        current,
        residual,
        iterations,
    })
}

/// `Cap_D(A)`: energy of the harmonic function equal to 1 on `a` and 0
/// off `d`.
pub fn capacity(g: &PlanarGraph, conductances: Option<&[f64]>, a: &[usize], d: &[usize]) -> Result<f64> {
    Ok(capacity_solution(g, conductances, a, d, DEFAULT_TOL)?.energy)
}

pub fn capacity_solution(
    g: &PlanarGraph,
    conductances: Option<&[f64]>,
    a: &[usize],
    d: &[usize],
    tol: f64,
) -> Result<PotentialSolution> {
    let n = g.vertex_count();
    if a.is_empty() {
        return Err(Error::invalid("capacity needs a nonempty set"));
    }
    let mut in_d = vec![false; n];
    for &v in d {
        if v >= n {
            return Err(Error::invalid(format!("vertex {v} out of range")));
        }
        in_d[v] = true;
    }
    if let Some(&v) = a.iter().find(|&&v| v >= n || !in_d[v]) {
        return Err(Error::invalid(format!("vertex {v} of A lies outside D")));
    }
    let sinks: Vec<usize> = (0..n).filter(|&v| !in_d[v]).collect();
    if sinks.is_empty() {
        return Err(Error::invalid("D is the whole vertex set; capacity needs a sink"));
    }
    let mut p = DirichletProblem::new(g, a.to_vec(), sinks);
    if let Some(c) = conductances {
        p = p.with_conductances(c.to_vec());
    }
    solve_dirichlet(&p, tol)
}

/// Discrete 2-modulus of the family of paths joining `e` to `f` with unit
/// edge weights. By duality this is the effective conductance.
pub fn edge_modulus(g: &PlanarGraph, e: &[usize], f: &[usize]) -> Result<f64> {
    Ok(solve_dirichlet(&DirichletProblem::new(g, e.to_vec(), f.to_vec()), DEFAULT_TOL)?.energy)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusRow {
    pub k: u32,
    pub outer_radius: u32,
    /// `Cap_{B(x, R)}(B(x, r))`, absent when `B(x, R)` is the whole graph.
    pub capacity: Option<f64>,
    /// `k · capacity`.
    pub product: Option<f64>,
    /// `R + 2` does not exceed the eccentricity of `x`.
    pub trusted: bool,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct AnnulusScan {
    pub center: usize,
    pub radius: u32,
    pub rows: Vec<AnnulusRow>,
    /// `Cap_{B(x, 2r)}(B(x, r))`.
    pub doubling_capacity: Option<f64>,
}

impl AnnulusScan {
    /// Products of valid rows.
    pub fn products(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.product).collect()
    }

    /// Exponent `β` of the fit `Cap ≈ c·k^{-β}` over valid rows; a
    /// logarithmic law has `β ≈ 1`, geometric decay drives it upward.
    pub fn decay_exponent(&self) -> Option<f64> {
        let points: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter_map(|r| r.capacity.map(|c| (r.k as f64, c)))
            .collect();
        fit_power_law(&points).ok().map(|f| -f.exponent)
    }
}

/// Largest distance of the capacity decay exponent from 1 still read as a
/// logarithmic law.
pub const LOG_LAW_TOLERANCE: f64 = 0.4;

/// Capacities of `B(x, r)` inside `B(x, 2^k r)` for each `k`.
pub fn annulus_capacity_scan(g: &PlanarGraph, x: usize, r: u32, ks: &[u32]) -> Result<AnnulusScan> {
    if x >= g.vertex_count() {
        return Err(Error::invalid(format!("vertex {x} out of range")));
    }
    if r == 0 {
        return Err(Error::invalid("inner radius must be positive"));
    }
    let dist = g.bfs_distances(x);
    let ecc = dist.iter().copied().filter(|&d| d != UNREACHED).max().unwrap_or(0);
    let ball = |radius: u32| -> Vec<usize> { (0..dist.len()).filter(|&y| dist[y] < radius).collect() };
    let inner = ball(r);
    let cap_in = |outer: u32| -> Result<Option<PotentialSolution>> {
        if outer > ecc {
            return Ok(None);
        }
        capacity_solution(g, None, &inner, &ball(outer), DEFAULT_TOL).map(Some)
    };
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let outer = r
            .checked_shl(k)
            .filter(|&o| o >> k == r)
            .ok_or_else(|| Error::invalid(format!("outer radius 2^{k}·{r} overflows")))?;
        let solved = cap_in(outer)?;
        rows.push(AnnulusRow {
            k,
            outer_radius: outer,
            capacity: solved.as_ref().map(|s| s.energy),
            product: solved.as_ref().map(|s| k as f64 * s.energy),
            trusted: solved.is_some() && outer.saturating_add(2) <= ecc,
            iterations: solved.as_ref().map_or(0, |s| s.iterations),
            residual: solved.as_ref().map_or(0.0, |s| s.residual),
        });
    }
    let doubling_capacity = cap_in(2 * r)?.map(|s| s.energy);
    Ok(AnnulusScan {
        center: x,
        radius: r,
        rows,
        doubling_capacity,
    })
}

/// Whether all `values` fit in one band `[c, factor·c]`.
pub fn fits_band(values: &[f64], factor: f64) -> bool {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    !values.is_empty() && lo > 0.0 && hi <= factor * lo
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareEstimate {
    /// `1/λ₂` of the Neumann Laplacian on the induced subgraph.
    pub constant: f64,
    pub lambda2: f64,
    pub iterations: usize,
}

/// Best constant in `Σ_B (f - f̄)² ≤ λ Σ_{edges in B} (Δf)²`.
pub fn poincare_constant(g: &PlanarGraph, ball: &[usize]) -> Result<PoincareEstimate> {
    let mut sorted = ball.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() < 2 {
        return Err(Error::invalid("Poincaré constant needs at least 2 vertices"));
    }
    if let Some(&v) = sorted.iter().find(|&&v| v >= g.vertex_count()) {
        return Err(Error::invalid(format!("vertex {v} out of range")));
    }
    neumann_gap(&g.induced_adjacency(&sorted))
}

/// Smallest nonzero eigenvalue of the Laplacian of `adjacency`.
pub fn neumann_gap(adjacency: &[Vec<usize>]) -> Result<PoincareEstimate> {
    let n = adjacency.len();
    let mut seen = vec![false; n];
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
    if count != n {
        return Err(Error::invalid("ball is disconnected; the Poincaré constant is infinite"));
    }
    let diag: Vec<f64> = adjacency.iter().map(|a| a.len() as f64).collect();
    let apply = |x: &[f64], out: &mut [f64]| {
        for v in 0..n {
            out[v] = diag[v] * x[v] - adjacency[v].iter().map(|&w| x[w]).sum::<f64>();
        }
    };
    let deflate = |x: &mut [f64]| {
        let mean = x.iter().sum::<f64>() / n as f64;
        x.iter_mut().for_each(|v| *v -= mean);
        let norm = linalg::dot(x, x).sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    };
    let mut x: Vec<f64> = (0..n).map(|i| i as f64 + 0.5 * ((i * 7919) % 13) as f64).collect();
    deflate(&mut x);
    let mut lx = vec![0.0; n];
    apply(&x, &mut lx);
    let mut lambda = linalg::dot(&x, &lx);
    for it in 1..=10_000 {
        let solved = pcg(&apply, &diag, &x, 1e-13, 20 * n + 1000);
        let mut y = solved.x;
        deflate(&mut y);
        apply(&y, &mut lx);
        let next = linalg::dot(&y, &lx);
        let change = (next - lambda).abs();
        lambda = next;
        x = y;
        let resid: f64 = lx
            .iter()
            .zip(&x)
            .map(|(l, v)| (l - lambda * v).powi(2))
            .sum::<f64>()
            .sqrt();
        if change <= EIGEN_TOL * lambda && resid <= EIGEN_TOL.sqrt() * lambda {
            return Ok(PoincareEstimate {
                constant: 1.0 / lambda,
                lambda2: lambda,
                iterations: it,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "Neumann eigenvalue",
        iterations: 10_000,
        residual: lambda,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareRow {
    pub radius: u32,
    pub ball_size: usize,
    pub constant: f64,
    /// `r² ∨ r^d`.
    pub psi: f64,
    pub ratio: f64,
}

/// Poincaré constants of `B(x, r)` compared with `Ψ(r) = r² ∨ r^d`.
pub fn poincare_profile(g: &PlanarGraph, x: usize, radii: &[u32], d: f64) -> Result<Vec<PoincareRow>> {
    radii
        .iter()
        .map(|&r| {
            let ball = g.ball(x, r)?;
            let est = poincare_constant(g, &ball)?;
            let rf = r as f64;
            let psi = (rf * rf).max(rf.powf(d));
            Ok(PoincareRow {
                radius: r,
                ball_size: ball.len(),
                constant: est.constant,
                psi,
                ratio: est.constant / psi,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;

    fn close(a: f64, b: f64, eps: f64) -> bool {
        (a - b).abs() <= eps
    }

    #[test]
    fn three_vertex_path() {
        let g = fixtures::path(3);
        let s = solve_dirichlet(&DirichletProblem::new(&g, vec![0], vec![2]), 1e-12).unwrap();
        assert!(close(s.u[1], 0.5, 1e-12));
        assert!(close(s.energy, 0.5, 1e-12));
    }

    #[test]
    fn series_paths() {
        for k in 1..=12 {
            let g = fixtures::path(k + 1);
            let m = edge_modulus(&g, &[0], &[k]).unwrap();
            assert!(close(m, 1.0 / k as f64, 1e-12), "k={k}: {m}");
        }
    }

    #[test]
    fn four_cycle_parallel_arms() {
        let g = fixtures::cycle(4);
        let s = solve_dirichlet(&DirichletProblem::new(&g, vec![0], vec![2]), 1e-12).unwrap();
        assert!(close(s.energy, 1.0, 1e-12));
        for (got, want) in s.u.iter().zip([1.0, 0.5, 0.0, 0.5]) {
            assert!(close(*got, want, 1e-12));
        }
    }

    #[test]
    fn midpoint_of_long_path() {
        for k in [1, 2, 5, 9] {
            let g = fixtures::path(2 * k + 1);
            let d: Vec<usize> = (1..2 * k).collect();
            let cap = capacity(&g, None, &[k], &d).unwrap();
            assert!(close(cap, 2.0 / k as f64, 1e-10), "k={k}: {cap}");
        }
    }

    #[test]
    fn conductances_scale_energy() {
        let g = fixtures::path(4);
        let c = vec![2.0; g.dart_count()];
        let s = solve_dirichlet(&DirichletProblem::new(&g, vec![0], vec![3]).with_conductances(c), 1e-12)
            .unwrap();
        assert!(close(s.energy, 2.0 / 3.0, 1e-12));
    }

    #[test]
    fn inner_source_vertex_carries_no_energy() {
        let g = fixtures::grid(7, 7);
        let a = vec![24, 23, 25, 17, 31];
        let d: Vec<usize> = (0..49).filter(|&v| v % 7 != 0 && v % 7 != 6 && v >= 7 && v < 42).collect();
        let s = capacity_solution(&g, None, &a, &d, 1e-12).unwrap();
        let flow_24: f64 = g.neighbors(24).iter().map(|&w| s.u[24] - s.u[w]).sum();
        assert_eq!(flow_24, 0.0);
    }

    #[test]
    fn one_sided_components_take_constant_values() {
        // 0-1-2-3 with 4 hanging off 0: vertex 4 only sees the source.
        let g = PlanarGraph::from_rotation(vec![vec![1, 4], vec![0, 2], vec![1, 3], vec![2], vec![0]]).unwrap();
        let s = solve_dirichlet(&DirichletProblem::new(&g, vec![0], vec![3]), 1e-12).unwrap();
        assert_eq!(s.u[4], 1.0);
        assert!(close(s.energy, 1.0 / 3.0, 1e-12));
    }

    #[test]
    fn invalid_problems() {
        let g = fixtures::path(3);
        assert!(solve_dirichlet(&DirichletProblem::new(&g, vec![], vec![2]), 1e-10).is_err());
        assert!(solve_dirichlet(&DirichletProblem::new(&g, vec![1], vec![1]), 1e-10).is_err());
        assert!(capacity(&g, None, &[1], &[0, 1, 2]).is_err());
        assert!(capacity(&g, None, &[0], &[1]).is_err());
        let bad = DirichletProblem::new(&g, vec![0], vec![2]).with_conductances(vec![1.0, 2.0, 1.0, 1.0]);
        assert!(solve_dirichlet(&bad, 1e-10).is_err());
    }

    #[test]
    fn path_scan_decays_geometrically() {
        let g = fixtures::path(2049);
        let scan = annulus_capacity_scan(&g, 1024, 8, &[1, 2, 3, 4]).unwrap();
        for row in &scan.rows {
            // B(x, r) spans distance < r, so the arms have R - r + 1 edges.
            let want = 2.0 / (row.outer_radius - 8 + 1) as f64;
            assert!(close(row.capacity.unwrap(), want, 1e-10), "{row:?}");
            assert!(row.trusted);
        }
        assert!(!fits_band(&scan.products(), 3.0));
        assert!(scan.decay_exponent().unwrap() > 1.0 + LOG_LAW_TOLERANCE);
    }

    #[test]
    fn grid_scan_follows_log_law() {
        let g = fixtures::grid(129, 129);
        let scan = annulus_capacity_scan(&g, 64 * 129 + 64, 4, &[1, 2, 3]).unwrap();
        let beta = scan.decay_exponent().unwrap();
        assert!((beta - 1.0).abs() <= LOG_LAW_TOLERANCE, "beta {beta}");
        assert!(fits_band(&scan.products(), 4.0), "{:?}", scan.products());
    }

    #[test]
    fn scan_marks_escaping_balls() {
        let g = fixtures::path(19);
        let scan = annulus_capacity_scan(&g, 9, 2, &[1, 2, 3]).unwrap();
        assert!(scan.rows[0].trusted);
        assert!(scan.rows[0].capacity.is_some());
        assert!(scan.rows[1].capacity.is_some() && !scan.rows[1].trusted);
        assert!(scan.rows[2].capacity.is_none());
    }

    #[test]
    fn poincare_small_cases() {
        let edge = poincare_constant(&fixtures::path(2), &[0, 1]).unwrap();
        assert!(close(edge.constant, 0.5, 1e-10));
        for n in 3..8 {
            let k = fixtures::complete(n);
            let all: Vec<usize> = (0..n).collect();
            let est = poincare_constant(&k, &all).unwrap();
            assert!(close(est.constant, 1.0 / n as f64, 1e-8), "K_{n}: {est:?}");
        }
    }

    #[test]
    fn poincare_path_grows_quadratically() {
        let mut points = Vec::new();
        for r in [8usize, 16, 32] {
            let g = fixtures::path(r + 1);
            let all: Vec<usize> = (0..=r).collect();
            let est = poincare_constant(&g, &all).unwrap();
            let exact = 2.0 * (1.0 - (std::f64::consts::PI / (r + 1) as f64).cos());
            assert!((est.lambda2 - exact).abs() <= 1e-8 * exact, "r={r}");
            points.push(((r + 1) as f64, est.constant));
        }
        let fit = crate::fit::fit_power_law(&points).unwrap();
        assert!((fit.exponent - 2.0).abs() < 0.05, "{fit:?}");
    }

    #[test]
    fn poincare_rejects_disconnected_ball() {
        let g = fixtures::path(4);
        assert!(poincare_constant(&g, &[0, 2]).is_err());
        assert!(poincare_constant(&g, &[1]).is_err());
    }
}
