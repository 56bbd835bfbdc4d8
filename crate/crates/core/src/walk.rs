//! Simple random walk statistics: exact heat kernels, Monte-Carlo exit
//! times and displacements, and sub-Gaussian envelope constants.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fit::{fit_power_law, ExponentFit};
use crate::graph::{PlanarGraph, UNREACHED};
use crate::linalg::pcg;

/// Largest `n_max · darts` accepted by [`heat_kernel_exact`].
pub const DEFAULT_BUDGET: u64 = 200_000_000_000;
/// Censored fraction below which a Monte-Carlo estimate is trusted.
pub const CENSOR_LIMIT: f64 = 0.01;
/// Envelope constants are searched in `[1, ENVELOPE_CAP]`.
pub const ENVELOPE_CAP: f64 = 1e6;
/// Probabilities below this are ignored by the envelope search.
pub const TAIL_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_steps: u64,
}

impl WalkConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("at least one trial is required"));
        }
        if self.max_steps == 0 {
            return Err(Error::invalid("max_steps must be positive"));
        }
        Ok(())
    }
}

/// The random stream of one trial: stream `trial` of the ChaCha8 key
/// derived from `seed`, one 64-bit word per step.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform index below `bound` from one 64-bit word.
#[inline]
fn pick(word: u64, bound: usize) -> usize {
    ((word as u128 * bound as u128) >> 64) as usize
}

/// Distribution of the walk at time `n` and `n + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub n: usize,
    pub at_n: Vec<f64>,
    pub at_next: Vec<f64>,
}

/// Paired return probabilities `p_n(x,x) + p_{n+1}(x,x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatKernelCurve {
    pub n_values: Vec<usize>,
    pub values: Vec<f64>,
}

impl HeatKernelCurve {
    /// Smallest `n₀` from which the curve never increases.
    pub fn monotone_from(&self) -> usize {
        let mut start = self.values.len();
        while start > 1 && self.values[start - 2] >= self.values[start - 1] {
            start -= 1;
        }
        self.n_values.get(start.saturating_sub(1)).copied().unwrap_or(0)
    }

    pub fn value_at(&self, n: usize) -> Option<f64> {
        self.n_values.binary_search(&n).ok().map(|i| self.values[i])
    }

    /// Log–log fit of the curve sampled at `points` geometrically spaced
    /// times in `[lo, hi]`. The slope is `-d_s / 2`.
    pub fn fit(&self, lo: usize, hi: usize, points: usize) -> Result<ExponentFit> {
        let samples: Vec<(f64, f64)> = geometric_times(lo, hi, points)
            .into_iter()
            .filter_map(|n| self.value_at(n).map(|v| (n as f64, v)))
            .collect();
        fit_power_law(&samples)
    }
}

/// Distinct integers spaced geometrically from `lo` to `hi` inclusive.
pub fn geometric_times(lo: usize, hi: usize, points: usize) -> Vec<usize> {
    if points < 2 || hi <= lo {
        return vec![lo.max(1)];
    }
    let (a, b) = ((lo.max(1) as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp().round() as usize)
        .collect();
    out.dedup();
    out
}

#[derive(Debug, Clone)]
pub struct HeatKernel {
    pub source: usize,
    /// `p_n(x, x)` for `n = 0..=n_max + 1`.
    pub diagonal: Vec<f64>,
    pub curve: HeatKernelCurve,
    pub checkpoints: Vec<Checkpoint>,
    /// Largest `|Σ_y p_n(x, y) - 1|` seen.
    pub max_mass_error: f64,
}

/// Iterates the transition operator `n_max + 1` times from `x`.
///
/// Full distributions at each time in `checkpoints` (and the step after)
/// are retained.
pub fn heat_kernel_exact(g: &PlanarGraph, x: usize, n_max: usize, checkpoints: &[usize]) -> Result<HeatKernel> {
    heat_kernel_budgeted(g, x, n_max, checkpoints, DEFAULT_BUDGET)
}

pub fn heat_kernel_budgeted(
    g: &PlanarGraph,
    x: usize,
    n_max: usize,
    checkpoints: &[usize],
    budget: u64,
) -> Result<HeatKernel> {
    let nv = g.vertex_count();
    if x >= nv {
        return Err(Error::invalid(format!("vertex {x} out of range")));
    }
    if nv < 2 {
        return Err(Error::invalid("the walk needs at least one edge"));
    }
    if g.bfs_distances(x).contains(&UNREACHED) {
        return Err(Error::invalid("graph must be connected"));
    }
    let work = (n_max as u64 + 1).saturating_mul(g.dart_count() as u64);
    if work > budget {
        return Err(Error::ResourceGuard(format!(
            "{} steps over {} darts exceeds the budget of {budget}",
            n_max + 1,
            g.dart_count()
        )));
    }
    if let Some(&c) = checkpoints.iter().find(|&&c| c > n_max) {
        return Err(Error::invalid(format!("checkpoint {c} beyond n_max {n_max}")));
    }
    let inv_deg: Vec<f64> = (0..nv).map(|v| 1.0 / g.degree(v) as f64).collect();
    let mut p = vec![0.0; nv];
    p[x] = 1.0;
    let mut q = vec![0.0; nv];
    let mut diagonal = Vec::with_capacity(n_max + 2);
    diagonal.push(1.0);
    let mut kept: Vec<Checkpoint> = Vec::new();
    let mut pending: Option<(usize, Vec<f64>)> = None;
    let wanted = |n: usize| checkpoints.contains(&n);
    if wanted(0) {
        pending = Some((0, p.clone()));
    }
    let mut max_mass_error = 0.0f64;
    for n in 1..=n_max + 1 {
        for v in 0..nv {
            q[v] = p[v] * inv_deg[v];
        }
        for (y, slot) in p.iter_mut().enumerate() {
            *slot = g.neighbors(y).iter().map(|&z| q[z]).sum();
        }
        let mass: f64 = p.iter().sum();
        max_mass_error = max_mass_error.max((mass - 1.0).abs());
        diagonal.push(p[x]);
        if let Some((m, at_n)) = pending.take() {
            kept.push(Checkpoint {
                n: m,
                at_n,
                at_next: p.clone(),
            });
        }
        if n <= n_max && wanted(n) {
            pending = Some((n, p.clone()));
        }
    }
    let n_values: Vec<usize> = (1..=n_max).collect();
    let values = n_values.iter().map(|&n| diagonal[n] + diagonal[n + 1]).collect();
    Ok(HeatKernel {
        source: x,
        diagonal,
        curve: HeatKernelCurve { n_values, values },
        checkpoints: kept,
        max_mass_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitStat {
    pub radius: u32,
    pub mean: f64,
    pub std_error: f64,
    /// Trials that exited.
    pub samples: usize,
    pub censored: usize,
    pub trusted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementStat {
    pub horizon: u64,
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkStats {
    pub exits: Vec<ExitStat>,
    pub displacements: Vec<DisplacementStat>,
    /// Fraction of trials that hit `max_steps` before leaving the largest ball.
    pub censored_fraction: f64,
}

impl WalkStats {
    /// `d_w` from trusted exit-time means.
    pub fn exit_exponent(&self) -> Result<ExponentFit> {
        let points: Vec<(f64, f64)> = self
            .exits
            .iter()
            .filter(|e| e.trusted && e.mean > 0.0)
            .map(|e| (e.radius as f64, e.mean))
            .collect();
        fit_power_law(&points)
    }
}

#[derive(Default, Clone, Copy)]
struct Moments {
    count: usize,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.count += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    fn mean_and_error(&self) -> (f64, f64) {
        if self.count == 0 {
            return (f64::NAN, f64::NAN);
        }
        let n = self.count as f64;
        let mean = self.sum / n;
        if self.count < 2 {
            return (mean, f64::NAN);
        }
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (mean, (var / n).sqrt())
    }
}

/// Exit times from `B(x, r)` for each radius and `d(x, Y_n)` for each
/// horizon, averaged over independent trials.
pub fn walk_monte_carlo(
    g: &PlanarGraph,
    x: usize,
    radii: &[u32],
    horizons: &[u64],
    cfg: &WalkConfig,
) -> Result<WalkStats> {
    cfg.validate()?;
    if x >= g.vertex_count() {
        return Err(Error::invalid(format!("vertex {x} out of range")));
    }
    if g.degree(x) == 0 {
        return Err(Error::invalid("start vertex is isolated"));
    }
    if let Some(&h) = horizons.iter().find(|&&h| h > cfg.max_steps) {
        return Err(Error::invalid(format!("horizon {h} exceeds max_steps {}", cfg.max_steps)));
    }
    let dist = g.bfs_distances(x);
    let ecc = dist.iter().copied().filter(|&d| d != UNREACHED).max().unwrap_or(0);
    if let Some(&r) = radii.iter().find(|&&r| r == 0 || r > ecc) {
        return Err(Error::invalid(format!("radius {r} does not fit in the graph (eccentricity {ecc})")));
    }
    let max_radius = radii.iter().copied().max().unwrap_or(0);
    let max_horizon = horizons.iter().copied().max().unwrap_or(0);
    let mut exit_moments = vec![Moments::default(); radii.len()];
    let mut censored_per = vec![0usize; radii.len()];
    let mut disp_moments = vec![Moments::default(); horizons.len()];
    let mut censored_trials = 0;
    let mut exit_time = vec![0u64; radii.len()];
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial as u64);
        let mut v = x;
        let mut far = 0u32;
        exit_time.fill(0);
        let mut t = 0u64;
        let mut next_horizon = 0;
        let mut order: Vec<usize> = (0..horizons.len()).collect();
        order.sort_by_key(|&i| horizons[i]);
        while order.get(next_horizon).is_some_and(|&i| horizons[i] == 0) {
            disp_moments[order[next_horizon]].push(0.0);
            next_horizon += 1;
        }
        while t < cfg.max_steps && (far < max_radius || t < max_horizon) {
            let nbrs = g.neighbors(v);
            v = nbrs[pick(rng.next_u64(), nbrs.len())];
            t += 1;
            let d = dist[v];
            if d > far {
                for (i, &r) in radii.iter().enumerate() {
                    if exit_time[i] == 0 && d >= r {
                        exit_time[i] = t;
                    }
                }
                far = d;
            }
            while order.get(next_horizon).is_some_and(|&i| horizons[i] == t) {
                disp_moments[order[next_horizon]].push(d as f64);
                next_horizon += 1;
            }
        }
        if far < max_radius {
            censored_trials += 1;
        }
        for i in 0..radii.len() {
            if exit_time[i] > 0 {
                exit_moments[i].push(exit_time[i] as f64);
            } else {
                censored_per[i] += 1;
            }
        }
    }
    let trials = cfg.trials as f64;
    let exits = radii
        .iter()
        .enumerate()
        .map(|(i, &radius)| {
            let (mean, std_error) = exit_moments[i].mean_and_error();
            ExitStat {
                radius,
                mean,
                std_error,
                samples: exit_moments[i].count,
                censored: censored_per[i],
                trusted: (censored_per[i] as f64) < CENSOR_LIMIT * trials,
            }
        })
        .collect();
    let displacements = horizons
        .iter()
        .enumerate()
        .map(|(i, &horizon)| {
            let (mean, std_error) = disp_moments[i].mean_and_error();
            DisplacementStat {
                horizon,
                mean,
                std_error,
                samples: disp_moments[i].count,
            }
        })
        .collect();
    Ok(WalkStats {
        exits,
        displacements,
        censored_fraction: censored_trials as f64 / trials,
    })
}

/// Exact `E^y τ_{B(x,r)}` for every `y`, from `(I - P_B) t = 1`.
pub fn expected_exit_times(g: &PlanarGraph, x: usize, r: u32) -> Result<Vec<f64>> {
    if x >= g.vertex_count() {
        return Err(Error::invalid(format!("vertex {x} out of range")));
    }
    let dist = g.bfs_distances(x);
    let ball: Vec<usize> = (0..g.vertex_count()).filter(|&y| dist[y] < r).collect();
    if ball.len() == g.vertex_count() {
        return Err(Error::invalid("the ball is the whole graph; the walk never exits"));
    }
    let mut slot = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in ball.iter().enumerate() {
        slot[v] = i;
    }
    let diag: Vec<f64> = ball.iter().map(|&v| g.degree(v) as f64).collect();
    let apply = |t: &[f64], out: &mut [f64]| {
        for (i, &v) in ball.iter().enumerate() {
            let inside: f64 = g
                .neighbors(v)
                .iter()
                .filter_map(|&w| (slot[w] != usize::MAX).then(|| t[slot[w]]))
                .sum();
            out[i] = diag[i] * t[i] - inside;
        }
    };
    let m = ball.len();
    let solved = pcg(apply, &diag, &diag, 1e-13, 50 * m + 1000);
    if !solved.converged {
        return Err(Error::NonConvergence {
            what: "expected exit time solve",
            iterations: solved.iterations,
            residual: solved.relative_residual,
        });
    }
    let mut out = vec![0.0; g.vertex_count()];
    for (i, &v) in ball.iter().enumerate() {
        out[v] = solved.x[i];
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeReport {
    /// Smallest `C` for the upper bound, `None` if it exceeds the cap.
    pub upper: Option<f64>,
    /// Smallest `C` for the paired lower bound, `None` if it exceeds the cap.
    pub lower: Option<f64>,
    pub upper_samples: usize,
    pub lower_samples: usize,
}

/// Smallest constants for which the sub-Gaussian upper and paired lower
/// bounds hold at every checkpoint and admissible vertex.
///
/// Vertices count when `d(x, y)` is at most `max_distance` (default
/// `4 n_max^{1/d_w}`); the lower bound also needs `n ≥ max(1, d(x, y))`.
pub fn subgaussian_envelope(
    kernel: &HeatKernel,
    distances: &[u32],
    d: f64,
    d_w: f64,
    max_distance: Option<u32>,
) -> Result<EnvelopeReport> {
    if !(d_w > 1.0) || !(d > 0.0) {
        return Err(Error::invalid("need d > 0 and d_w > 1"));
    }
    if kernel.checkpoints.is_empty() {
        return Err(Error::invalid("no checkpoint distributions available"));
    }
    let n_max = kernel.curve.n_values.last().copied().unwrap_or(1);
    let limit = max_distance.unwrap_or_else(|| (4.0 * (n_max as f64).powf(1.0 / d_w)).floor() as u32);
    let beta = 1.0 / (d_w - 1.0);
    // (probability, n, distance^{d_w}) triples.
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for cp in &kernel.checkpoints {
        if cp.n == 0 {
            continue;
        }
        let n = cp.n as f64;
        for (y, &dist) in distances.iter().enumerate() {
            if dist == UNREACHED || dist > limit {
                continue;
            }
            let dw = (dist as f64).powf(d_w);
            let p = cp.at_n[y];
            if p > TAIL_FLOOR {
                upper.push((p * n.powf(d / d_w), n, dw));
            }
            let paired = p + cp.at_next[y];
            if cp.n >= dist.max(1) as usize && paired > TAIL_FLOOR {
                lower.push((paired * n.powf(d / d_w), n, dw));
            }
        }
    }
    // ln of the bound ratio at constant C; both are monotone in C.
    let upper_ok = |c: f64| {
        upper
            .iter()
            .all(|&(scaled, n, dw)| scaled.ln() <= c.ln() - (dw / (c * n)).powf(beta))
    };
    let lower_ok = |c: f64| {
        lower
            .iter()
            .all(|&(scaled, n, dw)| scaled.ln() >= -c.ln() - (c * dw / n).powf(beta))
    };
    Ok(EnvelopeReport {
        upper: smallest_constant(upper_ok),
        lower: smallest_constant(lower_ok),
        upper_samples: upper.len(),
        lower_samples: lower.len(),
    })
}

/// Bisection in `ln C` over `[1, ENVELOPE_CAP]` to relative width `10⁻³`.
fn smallest_constant(ok: impl Fn(f64) -> bool) -> Option<f64> {
    if ok(1.0) {
        return Some(1.0);
    }
    if !ok(ENVELOPE_CAP) {
        return None;
    }
    let (mut lo, mut hi) = (0.0f64, ENVELOPE_CAP.ln());
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if ok(mid.exp()) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi.exp())
}
