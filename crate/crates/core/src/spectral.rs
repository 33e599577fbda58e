//! Asymptotic weight-enumerator spectral shape of protograph GLDPC
//! ensembles, minimum-distance growth rates and free-distance bounds.
//!
//! For a normalized weight `delta`, the spectral shape is
//!
//! ```text
//! r(delta) = (1/n_v) max over per-variable fractions d_j with mean delta of
//!            [ sum_c a_c(d at its slots) - sum_j (deg_j - 1) H(d_j) ]
//! ```
//!
//! with `H` the natural-log binary entropy and `a_c` the codeword-count
//! exponent of constraint node `c`,
//!
//! ```text
//! a_c(d) = inf over x > 0 of [ ln A_c(x) - sum_i d_i ln x_i ],
//! ```
//!
//! where `A_c(x) = sum over codewords of prod x_i^{w_i}` is the
//! multivariate weight enumerator. The inner infimum is convex and is
//! solved by a damped Newton iteration in log coordinates; the outer
//! maximization is non-concave, so it runs projected gradient ascent
//! from multiple starts. Every variable node is its own coordinate:
//! nodes are never grouped across time positions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::protograph::{EnsembleDef, GldpcProtograph};
use crate::scalar::{real, Real};
use crate::{Error, Result};

/// Natural-log binary entropy, continuously extended by 0 at {0, 1}.
pub fn binary_entropy<F: Real>(x: F) -> F {
    if x <= F::zero() || x >= F::one() {
        return F::zero();
    }
    -(F::one() - x) * (F::one() - x).ln() - x * x.ln()
}

/// Random-coding spectral shape `H(delta) - (1 - R) ln 2`.
pub fn random_code_shape<F: Real>(delta: F, rate: F) -> F {
    binary_entropy(delta) - (F::one() - rate) * real::<F>(2.0).ln()
}

/// Optimizer controls for the spectral-shape computation.
#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions<F> {
    /// Multi-start count for the outer ascent.
    pub starts: usize,
    /// Projected-gradient movement target of the outer ascent.
    pub outer_tol: F,
    pub outer_max_iter: usize,
    /// Gradient norm target of the inner Newton solve.
    pub inner_tol: F,
    pub inner_max_iter: usize,
    /// Seed for the random outer starts.
    pub seed: u64,
}

impl<F: Real> Default for SpectralOptions<F> {
    fn default() -> Self {
        SpectralOptions {
            starts: 32,
            outer_tol: real(1e-7),
            outer_max_iter: 1000,
            inner_tol: real(1e-9),
            inner_max_iter: 200,
            seed: 0x5eed,
        }
    }
}

/// Inner solve result: exponent value and the log-coordinate minimizer
/// (the envelope gradient of the exponent is `-u` per slot).
struct InnerSolution<F> {
    value: F,
    u: Vec<F>,
}

/// Codeword-count exponent of one constraint code at slot fractions
/// `delta`, together with the minimizing log coordinates.
///
/// Returns negative infinity when `delta` lies outside the convex hull
/// of the codeword supports (no selection of codewords can meet the
/// prescribed fractions).
pub fn constraint_exponent<F: Real>(
    codewords: &[u32],
    degree: usize,
    delta: &[F],
    opts: &SpectralOptions<F>,
) -> (F, Vec<F>) {
    match inner_minimize(codewords, degree, delta, None, opts) {
        Some(sol) => (sol.value, sol.u),
        None => (F::neg_infinity(), vec![F::zero(); degree]),
    }
}

/// Damped Newton in log coordinates on
/// `g(u) = ln sum_w exp(u . w) - delta . u`.
///
/// Exact-zero and exact-one fractions are eliminated first by filtering
/// the codeword list; `None` means the filtered list is empty
/// (infeasible `delta`).
fn inner_minimize<F: Real>(
    codewords: &[u32],
    degree: usize,
    delta: &[F],
    warm: Option<&[F]>,
    opts: &SpectralOptions<F>,
) -> Option<InnerSolution<F>> {
    debug_assert_eq!(delta.len(), degree);
    let mut pinned_zero = 0u32;
    let mut pinned_one = 0u32;
    let mut free: Vec<usize> = Vec::with_capacity(degree);
    for (i, &d) in delta.iter().enumerate() {
        if d <= F::zero() {
            pinned_zero |= 1 << i;
        } else if d >= F::one() {
            pinned_one |= 1 << i;
        } else {
            free.push(i);
        }
    }
    let words: Vec<u32> = codewords
        .iter()
        .copied()
        .filter(|&w| w & pinned_zero == 0 && w & pinned_one == pinned_one)
        .collect();
    if words.is_empty() {
        return None;
    }
    if free.is_empty() {
        return Some(InnerSolution { value: F::zero(), u: vec![F::zero(); degree] });
    }
    let k = free.len();
    // Compress the surviving words onto the free coordinates.
    let compressed: Vec<u32> = words
        .iter()
        .map(|&w| {
            let mut c = 0u32;
            for (bit, &i) in free.iter().enumerate() {
                if w >> i & 1 == 1 {
                    c |= 1 << bit;
                }
            }
            c
        })
        .collect();
    let target: Vec<F> = free.iter().map(|&i| delta[i]).collect();

    // Independent-coordinate initial guess: logit of the target.
    let logit_init: Vec<F> = target
        .iter()
        .map(|&d| (d / (F::one() - d)).ln())
        .collect();
    let warm_init: Option<Vec<F>> = warm.and_then(|w| {
        let u: Vec<F> = free.iter().map(|&i| w[i]).collect();
        // Near-boundary solutions carry enormous coordinates; their
        // objective under a shifted target is meaningless, so fall back
        // to the logit start instead.
        let cap = real::<F>(60.0);
        if u.iter().any(|&x| x.abs() > cap) {
            None
        } else {
            Some(u)
        }
    });

    let eval = |u: &[F]| -> (F, Vec<F>, Vec<F>) {
        let mut scores: Vec<F> = Vec::with_capacity(compressed.len());
        let mut max_s = F::neg_infinity();
        for &w in &compressed {
            let mut s = F::zero();
            let mut bits = w;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                s += u[b];
            }
            if s > max_s {
                max_s = s;
            }
            scores.push(s);
        }
        let mut z = F::zero();
        for s in &scores {
            z += (*s - max_s).exp();
        }
        let log_a = max_s + z.ln();
        let mut g = log_a;
        for (b, &d) in target.iter().enumerate() {
            g -= d * u[b];
        }
        let weights: Vec<F> = scores.iter().map(|&s| (s - max_s).exp() / z).collect();
        let mut grad = vec![F::zero(); k];
        for (wi, &w) in compressed.iter().enumerate() {
            let p = weights[wi];
            let mut bits = w;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                grad[b] += p;
            }
        }
        for (b, &d) in target.iter().enumerate() {
            grad[b] -= d;
        }
        (g, grad, weights)
    };

    // Start from whichever candidate already sits lower.
    let mut u = logit_init;
    let (mut g, mut grad, mut weights) = eval(&u);
    if let Some(w) = warm_init {
        let (wg, wgrad, wweights) = eval(&w);
        if wg < g {
            u = w;
            g = wg;
            grad = wgrad;
            weights = wweights;
        }
    }
    for _ in 0..opts.inner_max_iter {
        let gnorm = grad.iter().fold(F::zero(), |m, &x| m.max(x.abs()));
        if gnorm < opts.inner_tol {
            break;
        }
        // Hessian = covariance of the word indicators under the softmax.
        let mut mean = vec![F::zero(); k];
        for (wi, &w) in compressed.iter().enumerate() {
            let p = weights[wi];
            let mut bits = w;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                mean[b] += p;
            }
        }
        let mut hess = vec![F::zero(); k * k];
        for (wi, &w) in compressed.iter().enumerate() {
            let p = weights[wi];
            for a in 0..k {
                let xa = (if w >> a & 1 == 1 { F::one() } else { F::zero() }) - mean[a];
                for b in a..k {
                    let xb = (if w >> b & 1 == 1 { F::one() } else { F::zero() }) - mean[b];
                    hess[a * k + b] += p * xa * xb;
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                hess[a * k + b] = hess[b * k + a];
            }
        }
        // Newton step with a ridge fallback.
        let mut step = None;
        let mut ridge = F::zero();
        for _ in 0..6 {
            let mut m = hess.clone();
            for a in 0..k {
                m[a * k + a] += ridge;
            }
            if cholesky(&mut m, k) {
                let rhs: Vec<F> = grad.iter().map(|&x| -x).collect();
                step = Some(chol_solve(&m, k, &rhs));
                break;
            }
            ridge = if ridge == F::zero() { real(1e-10) } else { ridge * real(100.0) };
        }
        let mut dir = match step {
            Some(s) => s,
            None => grad.iter().map(|&x| -x).collect(),
        };
        // Clamp enormous steps (hull-boundary divergence guard).
        let dmax = dir.iter().fold(F::zero(), |m, &x| m.max(x.abs()));
        let cap = real::<F>(30.0);
        if dmax > cap {
            let scale = cap / dmax;
            for d in dir.iter_mut() {
                *d *= scale;
            }
        }
        // Backtracking line search.
        let mut t = F::one();
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<F> = u.iter().zip(&dir).map(|(&a, &b)| a + t * b).collect();
            let (tg, tgrad, tweights) = eval(&trial);
            if tg < g {
                u = trial;
                g = tg;
                grad = tgrad;
                weights = tweights;
                accepted = true;
                break;
            }
            t = t / real(2.0);
        }
        if !accepted {
            break;
        }
    }
    let mut full_u = vec![F::zero(); degree];
    for (b, &i) in free.iter().enumerate() {
        full_u[i] = u[b];
    }
    Some(InnerSolution { value: g, u: full_u })
}

/// In-place Cholesky factorization; false when not positive definite.
fn cholesky<F: Real>(m: &mut [F], k: usize) -> bool {
    for i in 0..k {
        for j in 0..=i {
            let mut sum = m[i * k + j];
            for l in 0..j {
                sum -= m[i * k + l] * m[j * k + l];
            }
            if i == j {
                if sum <= F::zero() {
                    return false;
                }
                m[i * k + j] = sum.sqrt();
            } else {
                m[i * k + j] = sum / m[j * k + j];
            }
        }
    }
    true
}

fn chol_solve<F: Real>(l: &[F], k: usize, rhs: &[F]) -> Vec<F> {
    let mut y = vec![F::zero(); k];
    for i in 0..k {
        let mut s = rhs[i];
        for j in 0..i {
            s -= l[i * k + j] * y[j];
        }
        y[i] = s / l[i * k + i];
    }
    let mut x = vec![F::zero(); k];
    for i in (0..k).rev() {
        let mut s = y[i];
        for j in i + 1..k {
            s -= l[j * k + i] * x[j];
        }
        x[i] = s / l[i * k + i];
    }
    x
}

/// Shared per-protograph data for spectral evaluations.
struct ShapeProblem<'a> {
    proto: &'a GldpcProtograph,
    codewords: Vec<std::sync::Arc<Vec<u32>>>,
    /// (deg_j - 1) per variable.
    excess: Vec<f64>,
}

impl<'a> ShapeProblem<'a> {
    fn new(proto: &'a GldpcProtograph) -> Result<Self> {
        if proto.has_punctured() {
            return Err(Error::InvalidConfig(
                "spectral shape of punctured ensembles is not supported".into(),
            ));
        }
        let codewords = proto.node_codewords()?;
        let excess = (0..proto.n_vars())
            .map(|v| proto.var_degree(v) as f64 - 1.0)
            .collect();
        Ok(ShapeProblem { proto, codewords, excess })
    }

    /// Objective and gradient at variable fractions `d`, warm-starting
    /// the inner solves from `inner_cache`.
    fn eval<F: Real>(
        &self,
        d: &[F],
        opts: &SpectralOptions<F>,
        inner_cache: &mut [Vec<F>],
    ) -> (F, Vec<F>) {
        let mut value = F::zero();
        let mut grad = vec![F::zero(); d.len()];
        for (c, node) in self.proto.constraints().iter().enumerate() {
            let degree = node.degree();
            let local: Vec<F> = node.vars.iter().map(|&v| d[v]).collect();
            let warm = if inner_cache[c].is_empty() {
                None
            } else {
                Some(inner_cache[c].as_slice())
            };
            let sol = inner_minimize(&self.codewords[c], degree, &local, warm, opts)
                .expect("interior fractions are always feasible");
            inner_cache[c] = sol.u.clone();
            value += sol.value;
            for (slot, &v) in node.vars.iter().enumerate() {
                grad[v] -= sol.u[slot];
            }
        }
        for (j, &d_j) in d.iter().enumerate() {
            let ex = real::<F>(self.excess[j]);
            value -= ex * binary_entropy(d_j);
            grad[j] += ex * (d_j / (F::one() - d_j)).ln();
        }
        (value, grad)
    }
}

/// Euclidean projection onto `{ lo <= x_j <= hi, sum x_j = total }`.
fn project_mean<F: Real>(y: &[F], total: F, lo: F, hi: F) -> Vec<F> {
    project_mean_masked(y, None, total, lo, hi)
}

/// Projection onto the mean/box set; coordinates where `frozen` is true
/// keep their exact value and only the rest absorb the mean shift.
fn project_mean_masked<F: Real>(
    y: &[F],
    frozen: Option<&[bool]>,
    total: F,
    lo: F,
    hi: F,
) -> Vec<F> {
    let is_free = |j: usize| frozen.map_or(true, |f| !f[j]);
    let frozen_sum: F = y
        .iter()
        .enumerate()
        .filter(|&(j, _)| !is_free(j))
        .map(|(_, &v)| v)
        .sum();
    let free_total = total - frozen_sum;
    let clamp_sum = |nu: F| -> F {
        let mut s = F::zero();
        for (j, &v) in y.iter().enumerate() {
            if is_free(j) {
                s += (v + nu).max(lo).min(hi);
            }
        }
        s
    };
    let mut nu_lo = lo - y.iter().fold(F::neg_infinity(), |m, &v| m.max(v));
    let mut nu_hi = hi - y.iter().fold(F::infinity(), |m, &v| m.min(v));
    for _ in 0..200 {
        let mid = (nu_lo + nu_hi) / real(2.0);
        if clamp_sum(mid) < free_total {
            nu_lo = mid;
        } else {
            nu_hi = mid;
        }
        if nu_hi - nu_lo < real(1e-15) {
            break;
        }
    }
    let nu = (nu_lo + nu_hi) / real(2.0);
    y.iter()
        .enumerate()
        .map(|(j, &v)| {
            if is_free(j) {
                (v + nu).max(lo).min(hi)
            } else {
                v
            }
        })
        .collect()
}

/// One projected-gradient ascent from a given start; returns the best
/// objective value and its argument.
fn ascend<F: Real>(
    problem: &ShapeProblem<'_>,
    start: Vec<F>,
    mean: F,
    opts: &SpectralOptions<F>,
) -> (F, Vec<F>) {
    let n = start.len();
    let lo = real::<F>(1e-9);
    let hi = F::one() - lo;
    let total = mean * real(n as f64);
    let mut x = project_mean(&start, total, lo, hi);
    let start_point = x.clone();
    let mut inner_cache: Vec<Vec<F>> = vec![Vec::new(); problem.proto.n_constraints()];
    let (mut value, mut grad) = problem.eval(&x, opts, &mut inner_cache);
    // Stagnation window: stop once 20 accepted steps gain almost
    // nothing (guards against zigzag crawls along the constraint set).
    let mut window_base = value;
    let mut window_count = 0usize;
    let bound_eps = lo * real::<F>(4.0);
    for _ in 0..opts.outer_max_iter {
        // Two trial families per iteration: the plain projected
        // gradient, and a frozen-active-set variant that keeps
        // at-lower-bound coordinates pinned. The latter matters when an
        // end constraint code confines its variables to a lower
        // dimensional feasible face: lifting those coordinates unevenly
        // is infeasible and rejects every full-gradient trial, while
        // interior mass transfers remain perfectly good ascent moves.
        let frozen: Vec<bool> = x.iter().map(|&v| v <= bound_eps).collect();
        let mut accepted = false;
        'families: for family in 0..2 {
            let mask = if family == 0 { None } else { Some(frozen.as_slice()) };
            let dir: Vec<F> = grad
                .iter()
                .enumerate()
                .map(|(j, &g)| {
                    if mask.map_or(false, |m| m[j]) {
                        F::zero()
                    } else {
                        g
                    }
                })
                .collect();
            let mut t = real::<F>(0.5);
            for _ in 0..24 {
                let probe: Vec<F> = x.iter().zip(&dir).map(|(&a, &g)| a + t * g).collect();
                let trial = project_mean_masked(&probe, mask, total, lo, hi);
                let moved = trial
                    .iter()
                    .zip(&x)
                    .fold(F::zero(), |m, (&a, &b)| m.max((a - b).abs()));
                if moved < opts.outer_tol / real(10.0) {
                    break;
                }
                let mut cache = inner_cache.clone();
                let (tv, tg) = problem.eval(&trial, opts, &mut cache);
                if tv > value {
                    x = trial;
                    value = tv;
                    grad = tg;
                    inner_cache = cache;
                    accepted = true;
                    break 'families;
                }
                t = t / real(4.0);
            }
        }
        if !accepted {
            break;
        }
        window_count += 1;
        if window_count == 20 {
            if value - window_base < real::<F>(1e-11) * (F::one() + value.abs()) {
                break;
            }
            window_base = value;
            window_count = 0;
        }
    }
    // Honest final value: cold inner solves with a generous budget, so
    // a stale warm cache can never inflate the reported objective. The
    // start is re-scored the same way in case the capped walk wandered.
    let cold_opts = SpectralOptions {
        inner_max_iter: 4 * opts.inner_max_iter,
        ..*opts
    };
    let mut fresh: Vec<Vec<F>> = vec![Vec::new(); problem.proto.n_constraints()];
    let (final_value, _) = problem.eval(&x, &cold_opts, &mut fresh);
    let mut fresh_start: Vec<Vec<F>> = vec![Vec::new(); problem.proto.n_constraints()];
    let (start_value, _) = problem.eval(&start_point, &cold_opts, &mut fresh_start);
    if start_value > final_value {
        (start_value, start_point)
    } else {
        (final_value, x)
    }
}

/// Spectral shape value `r(delta)` with the maximizing variable
/// fractions. `warm` seeds one extra ascent (used when sweeping a
/// grid).
pub fn r_of_delta<F: Real>(
    proto: &GldpcProtograph,
    delta: F,
    opts: &SpectralOptions<F>,
    warm: Option<&[F]>,
) -> Result<(F, Vec<F>)> {
    if delta <= F::zero() || delta >= F::one() {
        return Ok((
            F::zero(),
            vec![delta.max(F::zero()).min(F::one()); proto.n_vars()],
        ));
    }
    let problem = ShapeProblem::new(proto)?;
    let n = proto.n_vars();
    let mut starts: Vec<Vec<F>> = Vec::with_capacity(opts.starts + 2 + n / 2);
    starts.push(vec![delta; n]);
    if let Some(w) = warm {
        starts.push(w.to_vec());
    }
    // Localized bump starts: coupled ensembles put their low-weight
    // codewords on short spans of consecutive positions, which flat or
    // i.i.d. random starts do not reach. Variables are laid out in time
    // order, so sliding windows over a range of widths cover those
    // optima (at the crossing the winning span is several positions
    // wide, so narrow and wide windows are both needed).
    let total = delta.to_f64().unwrap_or(0.0) * n as f64;
    let mut windows: Vec<usize> = [10usize, 7, 5, 3, 2]
        .iter()
        .map(|&k| n.div_ceil(k).max(2))
        .collect();
    windows.dedup();
    for window in windows {
        if window >= n {
            continue;
        }
        let inside = (total / window as f64).min(0.98);
        let mut offset = 0;
        loop {
            let mut start = vec![real::<F>(1e-6); n];
            for j in offset..(offset + window).min(n) {
                start[j] = real::<F>(inside);
            }
            starts.push(start);
            if offset + window >= n {
                break;
            }
            offset += (window / 2).max(1);
        }
    }
    let delta_bits = delta.to_f64().unwrap_or(0.0).to_bits();
    for s in 1..opts.starts {
        let mut rng = ChaCha12Rng::seed_from_u64(
            opts.seed ^ delta_bits.rotate_left(17) ^ (s as u64).wrapping_mul(0x9e3779b97f4a7c15),
        );
        // Exponential weights rescaled to the required mean.
        let raw: Vec<f64> = (0..n).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
        let sum: f64 = raw.iter().sum();
        let scale = delta.to_f64().unwrap_or(0.5) * n as f64 / sum;
        starts.push(
            raw.into_iter()
                .map(|v| real::<F>((v * scale).min(0.999)))
                .collect(),
        );
    }
    let results: Vec<(F, Vec<F>)> = starts
        .into_par_iter()
        .map(|start| ascend(&problem, start, delta, opts))
        .collect();
    let best = results
        .into_iter()
        .max_by(|a, b| a.0.partial_cmp(&b.0).expect("finite objective"))
        .expect("at least one start");
    let n_v = real::<F>(n as f64);
    Ok((best.0 / n_v, best.1))
}

/// Spectral-shape curve with the first positive zero crossing.
#[derive(Debug, Clone)]
pub struct SpectralCurve<F> {
    /// (delta, r(delta)) samples in grid order.
    pub samples: Vec<(F, F)>,
    /// First positive zero crossing, refined by bisection; present only
    /// when the curve is negative on the grid before it.
    pub delta_min: Option<F>,
    /// True when a crossing exists and r < 0 strictly before it.
    pub asymptotically_good: bool,
}

/// Evaluates the spectral shape on a grid and extracts the
/// minimum-distance growth rate.
pub fn spectral_shape<F: Real>(
    proto: &GldpcProtograph,
    grid: &[F],
    opts: &SpectralOptions<F>,
) -> Result<SpectralCurve<F>> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty delta grid".into()));
    }
    let mut samples: Vec<(F, F)> = Vec::with_capacity(grid.len());
    let mut warm: Option<Vec<F>> = None;
    let mut bracket: Option<(F, Vec<F>, F)> = None;
    let mut negative_before = true;
    for &delta in grid {
        let (r, arg) = r_of_delta(proto, delta, opts, warm.as_deref())?;
        if bracket.is_none() && r > F::zero() {
            match samples.last() {
                Some(&(prev_d, prev_r)) if prev_r < F::zero() => {
                    bracket = Some((prev_d, warm.clone().unwrap_or_default(), delta));
                }
                Some(_) | None => {
                    negative_before = false;
                    bracket = Some((F::zero(), Vec::new(), delta));
                }
            }
        }
        samples.push((delta, r));
        warm = Some(arg);
    }
    let delta_min = match bracket {
        Some((lo, warm_lo, hi)) if negative_before => {
            Some(refine_crossing(proto, lo, hi, &warm_lo, opts)?)
        }
        _ => None,
    };
    Ok(SpectralCurve {
        samples,
        delta_min,
        asymptotically_good: delta_min.is_some(),
    })
}

fn refine_crossing<F: Real>(
    proto: &GldpcProtograph,
    mut lo: F,
    mut hi: F,
    warm: &[F],
    opts: &SpectralOptions<F>,
) -> Result<F> {
    if lo >= hi {
        return Ok(lo);
    }
    let mut warm: Option<Vec<F>> = if warm.is_empty() {
        None
    } else {
        Some(warm.to_vec())
    };
    // Fewer random starts inside the bracket: the warm chain tracks the
    // maximizer closely here.
    let refine_opts = SpectralOptions {
        starts: (opts.starts / 4).max(4),
        ..*opts
    };
    for _ in 0..20 {
        if hi - lo < real(2e-4) {
            break;
        }
        let mid = (lo + hi) / real(2.0);
        let (r, arg) = r_of_delta(proto, mid, &refine_opts, warm.as_deref())?;
        if r < F::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        warm = Some(arg);
    }
    Ok((lo + hi) / real(2.0))
}

/// Minimum-distance growth rate: scans upward from small weights until
/// the shape turns positive, then refines the crossing by bisection.
pub fn min_distance_growth_rate<F: Real>(
    proto: &GldpcProtograph,
    opts: &SpectralOptions<F>,
) -> Result<F> {
    let mut warm: Option<Vec<F>> = None;
    let mut prev: Option<(F, F)> = None;
    for i in 1..=30 {
        let delta = real::<F>(i as f64 * 0.02);
        let (r, arg) = r_of_delta(proto, delta, opts, warm.as_deref())?;
        if r > F::zero() {
            let (lo, lo_warm) = match prev {
                Some((d, r_prev)) if r_prev < F::zero() => (d, warm.clone().unwrap_or_default()),
                _ => {
                    return Err(Error::OptimizerFailed(
                        "shape is positive already at the smallest scan weight".into(),
                    ))
                }
            };
            return refine_crossing(proto, lo, delta, &lo_warm, opts);
        }
        prev = Some((delta, r));
        warm = Some(arg);
    }
    Err(Error::OptimizerFailed("no positive zero crossing found".into()))
}

/// Free-distance growth-rate bounds at period T: the terminated
/// ensemble bounds from above, the tail-biting ensemble from below,
/// both scaled by `T/(w+1)`.
#[derive(Debug, Clone, Copy)]
pub struct FreeDistanceBounds<F> {
    pub period: usize,
    pub lower: F,
    pub upper: F,
}

pub fn free_distance_bounds<F: Real>(
    def: &EnsembleDef,
    period: usize,
    opts: &SpectralOptions<F>,
) -> Result<FreeDistanceBounds<F>> {
    let w = def.coupling.memory();
    if period < w.max(1) {
        return Err(Error::BadCouplingLength(format!(
            "period must be at least max(w, 1) = {}",
            w.max(1)
        )));
    }
    let scale = real::<F>(period as f64) / real((w + 1) as f64);
    let terminated = def.terminated(period)?;
    let upper = min_distance_growth_rate(&terminated.protograph, opts)? * scale;
    let tb = def.tailbiting(period)?;
    let lower = min_distance_growth_rate(&tb, opts)? * scale;
    Ok(FreeDistanceBounds { period, lower, upper })
}
