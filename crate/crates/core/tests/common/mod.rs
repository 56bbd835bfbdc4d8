#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use snowlab_core::graph::fixtures;
use snowlab_core::PlanarGraph;

/// Dense LU solve of the reduced Laplacian; returns the energy.
pub fn dense_energy(g: &PlanarGraph, e: &[usize], f: &[usize]) -> f64 {
    let n = g.vertex_count();
    let mut fixed = vec![None; n];
    for &v in e {
        fixed[v] = Some(1.0);
    }
    for &v in f {
        fixed[v] = Some(0.0);
    }
    let free: Vec<usize> = (0..n).filter(|&v| fixed[v].is_none()).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &v) in free.iter().enumerate() {
        index[v] = i;
    }
    let m = free.len();
    let mut u: Vec<f64> = fixed.iter().map(|x| x.unwrap_or(0.0)).collect();
    if m > 0 {
        let mut a = DMatrix::<f64>::zeros(m, m);
        let mut b = DVector::<f64>::zeros(m);
        for (i, &v) in free.iter().enumerate() {
            for &w in g.neighbors(v) {
                a[(i, i)] += 1.0;
                match fixed[w] {
                    Some(val) => b[i] += val,
                    None => a[(i, index[w])] -= 1.0,
                }
            }
        }
        let x = a.lu().solve(&b).expect("nonsingular reduced Laplacian");
        for (i, &v) in free.iter().enumerate() {
            u[v] = x[i];
        }
    }
    g.edges().map(|(a, b)| (u[a] - u[b]).powi(2)).sum()
}

/// All simple paths that start in `e`, end at their first vertex of `f`,
/// and otherwise avoid `e ∪ f`, as edge-index lists.
pub fn minimal_paths(g: &PlanarGraph, e: &[usize], f: &[usize]) -> Vec<Vec<usize>> {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let edge_id = |a: usize, b: usize| edges.iter().position(|&p| p == (a.min(b), a.max(b))).unwrap();
    let n = g.vertex_count();
    let in_e: Vec<bool> = (0..n).map(|v| e.contains(&v)).collect();
    let in_f: Vec<bool> = (0..n).map(|v| f.contains(&v)).collect();
    let mut out = Vec::new();
    fn walk(
        g: &PlanarGraph,
        v: usize,
        on_path: &mut Vec<bool>,
        trail: &mut Vec<usize>,
        in_e: &[bool],
        in_f: &[bool],
        edge_id: &dyn Fn(usize, usize) -> usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        for &w in g.neighbors(v) {
            if on_path[w] || in_e[w] {
                continue;
            }
            trail.push(edge_id(v, w));
            if in_f[w] {
                out.push(trail.clone());
            } else {
                on_path[w] = true;
                walk(g, w, on_path, trail, in_e, in_f, edge_id, out);
                on_path[w] = false;
            }
            trail.pop();
        }
    }
    for &s in e {
        let mut on_path = vec![false; n];
        on_path[s] = true;
        walk(g, s, &mut on_path, &mut Vec::new(), &in_e, &in_f, &edge_id, &mut out);
    }
    out
}

/// Minimizes `Σ ρ²` subject to `Σ_{e∈γ} ρ_e ≥ 1` for every path `γ` by
/// Hildreth's dual coordinate ascent.
pub fn brute_force_modulus(g: &PlanarGraph, e: &[usize], f: &[usize]) -> f64 {
    let paths = minimal_paths(g, e, f);
    let mut lambda = vec![0.0; paths.len()];
    let mut rho = vec![0.0; g.edge_count()];
    for _ in 0..200_000 {
        let mut moved = 0.0f64;
        for (i, path) in paths.iter().enumerate() {
            let length: f64 = path.iter().map(|&k| rho[k]).sum();
            let next = (lambda[i] + (1.0 - length) / path.len() as f64).max(0.0);
            let delta = next - lambda[i];
            if delta != 0.0 {
                lambda[i] = next;
                for &k in path {
                    rho[k] += delta;
                }
                moved = moved.max(delta.abs());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    rho.iter().map(|r| r * r).sum()
}

pub fn small_instances() -> Vec<(PlanarGraph, Vec<usize>, Vec<usize>)> {
    let mut out = vec![
        (fixtures::path(2), vec![0], vec![1]),
        (fixtures::path(5), vec![0], vec![4]),
        (fixtures::path(7), vec![3], vec![0, 6]),
        (fixtures::triangle(), vec![0], vec![1]),
        (fixtures::cycle(4), vec![0], vec![2]),
        (fixtures::cycle(7), vec![0, 1], vec![4]),
        (fixtures::complete(4), vec![0], vec![3]),
        (fixtures::wheel(4), vec![1], vec![3]),
        (fixtures::wheel(5), vec![0], vec![2, 3]),
        (fixtures::wheel(6), vec![1, 2], vec![4, 5]),
        (fixtures::grid(3, 3), vec![0], vec![8]),
        (fixtures::grid(3, 3), vec![0, 3, 6], vec![2, 5, 8]),
        (fixtures::grid(3, 3), vec![4], vec![0, 2, 6, 8]),
        (fixtures::grid(2, 4), vec![0, 1], vec![6, 7]),
        (fixtures::cube(), vec![0], vec![7]),
        (fixtures::cube(), vec![0, 1], vec![6]),
    ];
    out.retain(|(g, _, _)| g.edge_count() <= 12);
    out
}

/// Grid with random edges removed (keeping it connected) and disjoint
/// random vertex sets `E`, `F` and an extra set, all derived from `bits`.
pub fn random_instance(w: usize, h: usize, bits: u64) -> (PlanarGraph, Vec<usize>, Vec<usize>, Vec<usize>) {
    let g = fixtures::grid(w, h);
    let mut adjacency = g.adjacency();
    let mut state = bits;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 33) as usize
    };
    for (a, b) in g.edges().collect::<Vec<_>>() {
        if next() % 4 != 0 {
            continue;
        }
        let mut trial = adjacency.clone();
        trial[a].retain(|&x| x != b);
        trial[b].retain(|&x| x != a);
        if let Ok(h) = PlanarGraph::from_rotation(trial.clone()) {
            if h.bfs_distances(0).iter().all(|&d| d != u32::MAX) {
                adjacency = trial;
            }
        }
    }
    let g = PlanarGraph::from_rotation(adjacency).unwrap();
    let n = g.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, next() % (i + 1));
    }
    let e_len = 1 + next() % (n / 3).max(1);
    let f_len = 1 + next() % (n / 3).max(1);
    let extra_len = 1 + next() % (n / 4).max(1);
    let e = order[..e_len].to_vec();
    let f = order[e_len..e_len + f_len].to_vec();
    let extra = order[e_len + f_len..(e_len + f_len + extra_len).min(n)].to_vec();
    (g, e, f, extra)
}
