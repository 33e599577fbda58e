//! Exact multi-edge density evolution on the binary erasure channel.
//!
//! Messages are per-edge erasure probabilities on the protograph. The
//! constraint-node update evaluates the exact APP transfer function of
//! each constraint code by enumerating erasure subsets of the incoming
//! edges, weighting each subset by its product probability and testing
//! extrinsic bit recoverability in the code's decodability table. For
//! single parity checks this reduces to the familiar
//! `q = 1 - prod(1 - p)` update.

use std::sync::Arc;

use crate::gf2::{DecodabilityTable, Policy};
use crate::protograph::GldpcProtograph;
use crate::scalar::{real, Real};
use crate::{Error, Result};

/// Convergence controls for the density evolution iteration.
#[derive(Debug, Clone, Copy)]
pub struct DeOptions<F> {
    /// Declare convergence once every edge probability is below this.
    pub tol: F,
    /// Iteration cap; reaching it counts as non-convergence.
    pub max_iter: usize,
    /// Stop early once the slowest edge improves by less than this per
    /// iteration; the iteration is monotone, so a stall certifies a
    /// positive fixed point.
    pub stall_tol: F,
    /// Table policy for the constraint update (the exact BEC transfer
    /// function uses bitwise-MAP recoverability).
    pub policy: Policy,
}

impl<F: Real> Default for DeOptions<F> {
    fn default() -> Self {
        DeOptions {
            tol: real(1e-10),
            max_iter: 100_000,
            stall_tol: real(1e-14),
            policy: Policy::BitwiseMap,
        }
    }
}

/// Per-edge erasure probabilities at one iteration.
#[derive(Debug, Clone)]
pub struct EdgeProbState<F> {
    /// Variable-to-constraint erasure probability per edge.
    pub p: Vec<F>,
    /// Constraint-to-variable erasure probability per edge.
    pub q: Vec<F>,
    /// Channel erasure probability.
    pub epsilon: F,
    /// Iterations performed.
    pub iterations: usize,
}

/// Result of running density evolution at one channel parameter.
#[derive(Debug, Clone)]
pub struct DeOutcome<F> {
    pub converged: bool,
    pub state: EdgeProbState<F>,
}

/// Precomputed per-node context for the constraint update.
struct NodeCtx {
    table: Arc<DecodabilityTable>,
    /// Global edge index of the node's first slot.
    edge_base: usize,
    degree: usize,
}

struct DeEngine<'a, F> {
    proto: &'a GldpcProtograph,
    nodes: Vec<NodeCtx>,
    /// Channel erasure probability per variable (1 for punctured).
    channel: Vec<F>,
}

impl<'a, F: Real> DeEngine<'a, F> {
    fn new(proto: &'a GldpcProtograph, epsilon: F, policy: Policy) -> Result<Self> {
        let tables = proto.node_tables(policy)?;
        let mut nodes = Vec::with_capacity(proto.n_constraints());
        let mut edge_base = 0;
        for (c, node) in proto.constraints().iter().enumerate() {
            nodes.push(NodeCtx {
                table: Arc::clone(&tables[c]),
                edge_base,
                degree: node.degree(),
            });
            edge_base += node.degree();
        }
        let channel = proto
            .punctured()
            .iter()
            .map(|&punct| if punct { F::one() } else { epsilon })
            .collect();
        Ok(DeEngine { proto, nodes, channel })
    }

    /// Constraint-node update: for each slot b of each node,
    /// q_b = sum over erasure subsets S of the other slots of
    /// Pr(S erased) * 1[b not extrinsically recoverable under S + {b}].
    fn check_update(&self, p: &[F], q: &mut [F]) {
        for node in &self.nodes {
            let d = node.degree;
            let probs = &p[node.edge_base..node.edge_base + d];
            let q_out = &mut q[node.edge_base..node.edge_base + d];
            for (b, out) in q_out.iter_mut().enumerate() {
                *out = subset_sum_unrecoverable(probs, &node.table, b);
            }
        }
    }

    /// Erasure probability of each variable after the final iteration,
    /// using all incoming messages (the extrinsic BP erasure profile).
    fn extrinsic(&self, q: &[F]) -> Vec<F> {
        (0..self.proto.n_vars())
            .map(|v| {
                self.proto
                    .var_edges(v)
                    .iter()
                    .fold(F::one(), |acc, &e| acc * q[self.proto.edge_id(e)])
            })
            .collect()
    }
}

/// Sum over erasure subsets of the slots other than `b` of the product
/// weight, restricted to patterns that leave `b` unrecoverable.
///
/// Depth-first enumeration carrying the partial product, so no
/// divisions are needed and zero weights prune whole subtrees.
fn subset_sum_unrecoverable<F: Real>(
    probs: &[F],
    table: &DecodabilityTable,
    b: usize,
) -> F {
    let d = probs.len();
    let others: Vec<usize> = (0..d).filter(|&i| i != b).collect();
    let target_bit = 1u32 << b;
    let mut total = F::zero();
    let mut stack: Vec<(usize, u32, F)> = vec![(0, target_bit, F::one())];
    while let Some((idx, mask, weight)) = stack.pop() {
        if weight == F::zero() {
            continue;
        }
        if idx == others.len() {
            if table.recoverable_bits(mask) & target_bit == 0 {
                total += weight;
            }
            continue;
        }
        let slot = others[idx];
        let p = probs[slot];
        stack.push((idx + 1, mask, weight * (F::one() - p)));
        stack.push((idx + 1, mask | (1 << slot), weight * p));
    }
    total
}

/// Runs density evolution at channel parameter `epsilon`.
///
/// The per-edge probabilities are monotone non-increasing from the
/// second iteration on; the run converges when all of them fall below
/// `opts.tol`.
pub fn de_iterate<F: Real>(
    proto: &GldpcProtograph,
    epsilon: F,
    opts: &DeOptions<F>,
) -> Result<DeOutcome<F>> {
    let engine = DeEngine::new(proto, epsilon, opts.policy)?;
    let ec = proto.edge_count();
    let mut p: Vec<F> = vec![F::zero(); ec];
    for v in 0..proto.n_vars() {
        for &e in proto.var_edges(v) {
            p[proto.edge_id(e)] = engine.channel[v];
        }
    }
    let mut q = vec![F::zero(); ec];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        engine.check_update(&p, &mut q);
        let mut max_p = F::zero();
        let mut max_drop = F::zero();
        for v in 0..proto.n_vars() {
            let edges = proto.var_edges(v);
            let eps = engine.channel[v];
            for (a, &e) in edges.iter().enumerate() {
                let mut prod = eps;
                for (a2, &e2) in edges.iter().enumerate() {
                    if a2 != a {
                        prod = prod * q[proto.edge_id(e2)];
                    }
                }
                let id = proto.edge_id(e);
                let drop = p[id] - prod;
                if drop > max_drop {
                    max_drop = drop;
                }
                p[id] = prod;
                if prod > max_p {
                    max_p = prod;
                }
            }
        }
        iterations += 1;
        if max_p < opts.tol {
            converged = true;
            break;
        }
        if iterations > 1 && max_drop < opts.stall_tol {
            break;
        }
    }
    Ok(DeOutcome {
        converged,
        state: EdgeProbState { p, q, epsilon, iterations },
    })
}

/// The exact constraint-node transfer function of one node, exposed for
/// unit-level checks: incoming probabilities in slot order, output per
/// slot.
pub fn check_update<F: Real>(table: &DecodabilityTable, incoming: &[F]) -> Result<Vec<F>> {
    if incoming.len() != table.len() {
        return Err(Error::DegreeMismatch {
            expected: table.len(),
            got: incoming.len(),
        });
    }
    Ok((0..incoming.len())
        .map(|b| subset_sum_unrecoverable(incoming, table, b))
        .collect())
}

/// BP threshold: bisection on the convergence of `de_iterate`.
pub fn bp_threshold<F: Real>(
    proto: &GldpcProtograph,
    bisect_tol: F,
    opts: &DeOptions<F>,
) -> Result<F> {
    let mut lo = F::zero(); // converges
    let mut hi = F::one();
    if de_iterate(proto, hi, opts)?.converged {
        return Ok(hi);
    }
    while hi - lo > bisect_tol {
        let mid = (lo + hi) / real(2.0);
        if de_iterate(proto, mid, opts)?.converged {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / real(2.0))
}

/// BP EXIT curve samples with the ensemble rate they belong to.
#[derive(Debug, Clone)]
pub struct ExitCurve<F> {
    /// (epsilon, h_BP) samples with strictly increasing epsilon.
    pub samples: Vec<(F, F)>,
    /// Design rate of the ensemble.
    pub rate: F,
}

/// Computes the BP EXIT function on a grid: the mean over transmitted
/// (non-punctured) variable nodes of the product of all incoming
/// constraint-to-variable erasure probabilities at the DE fixed point.
pub fn bp_exit_curve<F: Real>(
    proto: &GldpcProtograph,
    grid: &[F],
    opts: &DeOptions<F>,
) -> Result<ExitCurve<F>> {
    let rate = proto.design_rate()?;
    let rate_f = real::<F>(*rate.numer() as f64) / real(*rate.denom() as f64);
    let mut samples = Vec::with_capacity(grid.len());
    let mut last: Option<F> = None;
    for &eps in grid {
        if eps < F::zero() || eps > F::one() {
            return Err(Error::InvalidConfig("epsilon grid outside [0,1]".into()));
        }
        if let Some(prev) = last {
            if eps <= prev {
                return Err(Error::InvalidConfig(
                    "epsilon grid must be strictly increasing".into(),
                ));
            }
        }
        last = Some(eps);
        let outcome = de_iterate(proto, eps, opts)?;
        let h = if outcome.converged {
            F::zero()
        } else {
            let engine = DeEngine::new(proto, eps, opts.policy)?;
            let extr = engine.extrinsic(&outcome.state.q);
            let mut sum = F::zero();
            let mut count = 0usize;
            for (v, &punct) in proto.punctured().iter().enumerate() {
                if !punct {
                    sum += extr[v];
                    count += 1;
                }
            }
            sum / real(count as f64)
        };
        samples.push((eps, h));
    }
    Ok(ExitCurve { samples, rate: rate_f })
}

/// Area-theorem bound on the MAP threshold: the channel parameter at
/// which the trapezoidal integral of h_BP from there to one equals the
/// design rate.
pub fn map_threshold_bound<F: Real>(curve: &ExitCurve<F>) -> Result<F> {
    let s = &curve.samples;
    if s.len() < 2 {
        return Err(Error::NoRoot("EXIT curve needs at least two samples".into()));
    }
    let half = real::<F>(0.5);
    // Tail integrals from each sample to the last one.
    let mut tail = vec![F::zero(); s.len()];
    for i in (0..s.len() - 1).rev() {
        let (e0, h0) = s[i];
        let (e1, h1) = s[i + 1];
        tail[i] = tail[i + 1] + (e1 - e0) * (h0 + h1) * half;
    }
    let target = curve.rate;
    if tail[0] < target {
        return Err(Error::NoRoot(format!(
            "EXIT area {} below rate {target}; extend the grid downwards",
            tail[0]
        )));
    }
    for i in 0..s.len() - 1 {
        if tail[i] >= target && tail[i + 1] <= target {
            let (e0, h0) = s[i];
            let (e1, h1) = s[i + 1];
            // Solve for the crossing inside the segment with h linear;
            // bisection keeps this robust across the jump at the BP
            // threshold.
            let mut lo = e0;
            let mut hi = e1;
            for _ in 0..60 {
                let mid = (lo + hi) * half;
                let hm = if e1 == e0 {
                    h0
                } else {
                    h0 + (h1 - h0) * (mid - e0) / (e1 - e0)
                };
                let val = tail[i + 1] + (e1 - mid) * (hm + h1) * half;
                if val >= target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok((lo + hi) * half);
        }
    }
    Err(Error::NoRoot("no crossing of the rate area in range".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::ConstraintCode;
    use crate::protograph::{Builtin, GldpcProtograph, IntMatrix};
    use std::sync::Arc;

    fn block27() -> GldpcProtograph {
        Builtin::A7.ensemble().tailbiting(1).unwrap()
    }

    /// All-SPC (d_v, d_c)-regular protograph.
    fn regular_spc(dv: usize, dc: usize) -> GldpcProtograph {
        let base = IntMatrix::ones(dv, dc);
        let code = Arc::new(ConstraintCode::single_parity_check(dc).unwrap());
        let codes = vec![code; dv];
        let maps = vec![(0..dc).collect::<Vec<_>>(); dv];
        GldpcProtograph::from_base(&base, &codes, &maps, vec![false; dc]).unwrap()
    }

    #[test]
    fn spc_check_update_is_the_closed_form() {
        let spc = ConstraintCode::single_parity_check(5).unwrap();
        let table = spc.decodability_table(Policy::BitwiseMap).unwrap();
        let p = [0.3f64, 0.1, 0.7, 0.25, 0.5];
        let q = check_update(&table, &p).unwrap();
        for b in 0..5 {
            let expected = 1.0
                - (0..5)
                    .filter(|&i| i != b)
                    .map(|i| 1.0 - p[i])
                    .product::<f64>();
            assert!((q[b] - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn check_update_edge_cases() {
        let code = crate::gf2::hamming_parity(3).unwrap();
        let table = code.decodability_table(Policy::BitwiseMap).unwrap();
        // No erasures coming in: no output erasures for any code.
        let q = check_update(&table, &[0.0f64; 7]).unwrap();
        assert!(q.iter().all(|&x| x == 0.0));
        // Everything erased: no bit of the Hamming code is determined.
        let q = check_update(&table, &[1.0f64; 7]).unwrap();
        assert!(q.iter().all(|&x| x == 1.0));
        assert!(matches!(
            check_update(&table, &[0.5f64; 3]),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn de_converges_below_and_sticks_above() {
        let proto = block27();
        let opts = DeOptions::default();
        assert!(de_iterate(&proto, 0.70f64, &opts).unwrap().converged);
        assert!(!de_iterate(&proto, 0.80f64, &opts).unwrap().converged);
        // eps = 0: one iteration wipes everything.
        let out = de_iterate(&proto, 0.0f64, &opts).unwrap();
        assert!(out.converged);
        assert_eq!(out.state.iterations, 1);
    }

    #[test]
    fn de_state_is_monotone_in_iteration() {
        let proto = block27();
        let mut prev: Option<Vec<f64>> = None;
        for cap in [2usize, 4, 8, 16, 32] {
            let out = de_iterate(
                &proto,
                0.74,
                &DeOptions {
                    max_iter: cap,
                    ..DeOptions::default()
                },
            )
            .unwrap();
            if let Some(prev) = prev {
                for (new, old) in out.state.p.iter().zip(&prev) {
                    assert!(new <= old, "p must not increase");
                }
            }
            prev = Some(out.state.p);
        }
    }

    #[test]
    fn block_threshold_is_0p756() {
        let proto = block27();
        let t = bp_threshold(&proto, 1e-4f64, &DeOptions::default()).unwrap();
        assert!(
            (t - 0.756).abs() < 1e-3,
            "BP threshold {t} should be 0.756 within 1e-3"
        );
    }

    #[test]
    fn block_threshold_does_not_depend_on_the_second_ordering() {
        // Same ensemble with both constraint nodes in natural order.
        let natural = Builtin::A7.ensemble().block().unwrap();
        let t = bp_threshold(&natural, 1e-4f64, &DeOptions::default()).unwrap();
        assert!((t - 0.756).abs() < 1e-3);
    }

    #[test]
    fn spc_regular_threshold_matches_scalar_recursion() {
        // Independent scalar oracle for the (3,6) ensemble:
        // p <- eps (1 - (1-p)^5)^2 run to a fixed point.
        let scalar_threshold = {
            let converges = |eps: f64| {
                let mut p = eps;
                for _ in 0..100_000 {
                    let next = eps * (1.0 - (1.0 - p).powi(5)).powi(2);
                    if next < 1e-10 {
                        return true;
                    }
                    if p - next < 1e-14 {
                        return false;
                    }
                    p = next;
                }
                false
            };
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            while hi - lo > 1e-6 {
                let mid = 0.5 * (lo + hi);
                if converges(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let proto = regular_spc(3, 6);
        let t = bp_threshold(&proto, 1e-5f64, &DeOptions::default()).unwrap();
        assert!(
            (t - scalar_threshold).abs() < 1e-4,
            "protograph DE {t} vs scalar recursion {scalar_threshold}"
        );
    }

    #[test]
    fn spc_reduction_on_random_inputs() {
        // The generalized check update must reduce exactly to the SPC
        // closed form on a large random sample.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let spc = ConstraintCode::single_parity_check(7).unwrap();
        let table = spc.decodability_table(Policy::BitwiseMap).unwrap();
        for _ in 0..10_000 {
            let p: Vec<f64> = (0..7).map(|_| next()).collect();
            let q = check_update(&table, &p).unwrap();
            for b in 0..7 {
                let expected = 1.0
                    - (0..7)
                        .filter(|&i| i != b)
                        .map(|i| 1.0 - p[i])
                        .product::<f64>();
                assert!((q[b] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exit_curve_shape_and_map_bound() {
        let proto = block27();
        let opts = DeOptions::default();
        let grid: Vec<f64> = (0..=120).map(|i| 0.70 + i as f64 * 0.0025).collect();
        let curve = bp_exit_curve(&proto, &grid, &opts).unwrap();
        // Zero below the BP threshold, one at eps = 1.
        assert_eq!(curve.samples.first().unwrap().1, 0.0);
        let (e_last, h_last) = *curve.samples.last().unwrap();
        assert!((e_last - 1.0).abs() < 1e-9);
        assert!((h_last - 1.0).abs() < 1e-9);
        // Non-decreasing in eps.
        for w in curve.samples.windows(2) {
            assert!(w[1].1 >= w[0].1 - 1e-12);
        }
        // Jump at the BP threshold 0.756.
        let jump = curve
            .samples
            .windows(2)
            .find(|w| w[1].1 - w[0].1 > 0.3)
            .expect("EXIT curve must jump");
        assert!((jump.first().unwrap().0 - 0.756).abs() < 0.01);

        let bound = map_threshold_bound(&curve).unwrap();
        assert!(
            (bound - 0.856).abs() < 2e-3,
            "MAP bound {bound} should be 0.856 within 2e-3"
        );
    }

    #[test]
    fn constant_curve_bound_is_one_minus_rate() {
        let curve = ExitCurve {
            samples: (0..=100)
                .map(|i| (i as f64 / 100.0, 1.0))
                .collect::<Vec<_>>(),
            rate: 1.0 / 7.0,
        };
        let bound = map_threshold_bound(&curve).unwrap();
        assert!((bound - (1.0 - 1.0 / 7.0)).abs() < 1e-9);
    }

    #[test]
    fn weaker_constraints_lower_the_threshold() {
        // Replacing the Hamming constraints by single parity checks of
        // the same degree weakens every recoverability table entry; the
        // threshold must drop.
        let strong = block27();
        let weak = regular_spc(2, 7);
        let t_strong = bp_threshold(&strong, 1e-4f64, &DeOptions::default()).unwrap();
        let t_weak = bp_threshold(&weak, 1e-4f64, &DeOptions::default()).unwrap();
        assert!(t_weak < t_strong);
    }

    #[test]
    fn f32_kernel_agrees_on_the_block_threshold() {
        let proto = block27();
        let opts = DeOptions::<f32> {
            tol: 1e-8,
            ..DeOptions::default()
        };
        let t = bp_threshold(&proto, 1e-3f32, &opts).unwrap();
        assert!((t - 0.756).abs() < 5e-3, "f32 threshold {t}");
    }
}
