//! Generalized peeling decoding of lifted Tanner graphs.
//!
//! After BEC transmission the correctly received variables are removed;
//! the decoder then repeatedly picks a uniformly random decodable
//! constraint node (one whose residual erasure pattern its code can
//! solve in full), removes it together with its attached erased
//! variables, and updates the neighborhood. Decoding succeeds when no
//! erased variables remain and fails when no decodable node is left.
//!
//! Residual patterns are slot bitmasks keyed into the per-node
//! decodability tables; the decodable set is an indexed set with O(1)
//! insertion, deletion and uniform sampling, since the loop runs once
//! per removed constraint node.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::gf2::{DecodabilityTable, Policy};
use crate::lifting::{lift, LiftedGraph};
use crate::protograph::GldpcProtograph;
use crate::{Error, Result};

/// Set with O(1) insert/remove/sample, for the decodable frontier.
#[derive(Debug, Clone)]
struct IndexedSet {
    items: Vec<u32>,
    pos: Vec<u32>,
}

impl IndexedSet {
    fn new(capacity: usize) -> Self {
        IndexedSet { items: Vec::new(), pos: vec![u32::MAX; capacity] }
    }

    #[inline]
    fn len(&self) -> usize {
        self.items.len()
    }

    #[inline]
    fn contains(&self, x: u32) -> bool {
        self.pos[x as usize] != u32::MAX
    }

    #[inline]
    fn insert(&mut self, x: u32) {
        if !self.contains(x) {
            self.pos[x as usize] = self.items.len() as u32;
            self.items.push(x);
        }
    }

    #[inline]
    fn remove(&mut self, x: u32) {
        let p = self.pos[x as usize];
        if p == u32::MAX {
            return;
        }
        let last = *self.items.last().expect("non-empty if pos is set");
        self.items[p as usize] = last;
        self.pos[last as usize] = p;
        self.items.pop();
        self.pos[x as usize] = u32::MAX;
    }

    #[inline]
    fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        self.items[rng.gen_range(0..self.items.len())]
    }
}

/// Decoding outcome of one peeling run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Failure,
}

/// Sampled trajectory of one peeling run.
///
/// Samples store raw counts at iteration checkpoints: the decodable
/// constraint count `a` and the residual variable count `v`; `tau` is
/// the iteration index over `n`.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    /// Normalization length n (number of lifted variable nodes).
    pub n: usize,
    /// (iteration, decodable count, residual variable count).
    pub samples: Vec<(u32, u32, u32)>,
    pub outcome: Outcome,
    pub seed: u64,
}

impl TrajectoryRecord {
    /// Normalized samples (tau, a(tau), v(tau)).
    pub fn normalized(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let n = self.n as f64;
        self.samples
            .iter()
            .map(move |&(l, a, v)| (l as f64 / n, a as f64 / n, v as f64 / n))
    }

    /// Linear interpolation of a(tau) at a given tau, None when the
    /// trajectory ended earlier.
    pub fn a_at(&self, tau: f64) -> Option<f64> {
        let n = self.n as f64;
        let target = tau * n;
        let mut prev: Option<(f64, f64)> = None;
        for &(l, a, _) in &self.samples {
            let (lf, af) = (l as f64, a as f64 / n);
            if lf >= target {
                return Some(match prev {
                    Some((pl, pa)) if lf > pl => {
                        pa + (af - pa) * (target - pl) / (lf - pl)
                    }
                    _ => af,
                });
            }
            prev = Some((lf, af));
        }
        None
    }
}

/// Residual state of the generalized peeling decoder.
pub struct ResidualState<'g, 'p> {
    graph: &'g LiftedGraph<'p>,
    tables: Vec<Arc<DecodabilityTable>>,
    /// Slot mask of still-erased attached variables per check copy.
    mask: Vec<u32>,
    /// Still-erased flag per variable copy.
    erased: Vec<bool>,
    /// Check copies removed from the graph.
    removed: Vec<bool>,
    decodable: IndexedSet,
    remaining: usize,
    steps: usize,
    /// Residual variable count per protograph variable type.
    var_counts: Vec<u32>,
    /// Residual constraint count per (protograph constraint, mask).
    type_counts: Vec<u32>,
    type_offsets: Vec<usize>,
}

impl<'g, 'p> ResidualState<'g, 'p> {
    /// Initializes peeling from an explicit erasure vector.
    pub fn with_erasures(
        graph: &'g LiftedGraph<'p>,
        erased: Vec<bool>,
        policy: Policy,
    ) -> Result<Self> {
        let proto = graph.proto;
        if proto.has_punctured() {
            return Err(Error::PuncturedPeeling);
        }
        if erased.len() != graph.n_vars() {
            return Err(Error::DegreeMismatch {
                expected: graph.n_vars(),
                got: erased.len(),
            });
        }
        let tables = proto.node_tables(policy)?;
        let mut type_offsets = Vec::with_capacity(proto.n_constraints() + 1);
        let mut acc = 0usize;
        for node in proto.constraints() {
            type_offsets.push(acc);
            acc += 1usize << node.degree();
        }
        type_offsets.push(acc);
        let mut type_counts = vec![0u32; acc];
        let mut var_counts = vec![0u32; proto.n_vars()];
        let mut remaining = 0usize;
        for (vc, &e) in erased.iter().enumerate() {
            if e {
                remaining += 1;
                var_counts[graph.var_type(vc)] += 1;
            }
        }
        let m = graph.m;
        let mut mask = vec![0u32; graph.n_checks()];
        let mut decodable = IndexedSet::new(graph.n_checks());
        for x in 0..graph.n_checks() {
            let mut bits = 0u32;
            for (slot, &vc) in graph.check_slots(x).iter().enumerate() {
                if erased[vc as usize] {
                    bits |= 1 << slot;
                }
            }
            mask[x] = bits;
            let t = x / m;
            type_counts[type_offsets[t] + bits as usize] += 1;
            if tables[t].peelable(bits) {
                decodable.insert(x as u32);
            }
        }
        Ok(ResidualState {
            graph,
            tables,
            mask,
            erased,
            removed: vec![false; graph.n_checks()],
            decodable,
            remaining,
            steps: 0,
            var_counts,
            type_counts,
            type_offsets,
        })
    }

    /// Samples channel erasures at probability `eps` and initializes.
    pub fn init<R: Rng>(
        graph: &'g LiftedGraph<'p>,
        eps: f64,
        rng: &mut R,
        policy: Policy,
    ) -> Result<Self> {
        let erased: Vec<bool> = (0..graph.n_vars()).map(|_| rng.gen::<f64>() < eps).collect();
        Self::with_erasures(graph, erased, policy)
    }

    /// Number of currently decodable constraint nodes.
    pub fn decodable_count(&self) -> usize {
        self.decodable.len()
    }

    /// Number of still-erased variable nodes.
    pub fn residual_vars(&self) -> usize {
        self.remaining
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Residual variable count per protograph variable type.
    pub fn var_type_counts(&self) -> &[u32] {
        &self.var_counts
    }

    /// Residual count of constraint copies of protograph node `c` whose
    /// residual pattern equals `mask` (removed copies excluded).
    pub fn constraint_type_count(&self, c: usize, mask: u32) -> u32 {
        self.type_counts[self.type_offsets[c] + mask as usize]
    }

    /// Recomputes every tracked count from the raw residual graph.
    /// Used to audit the incremental bookkeeping.
    pub fn audit(&self) -> bool {
        let m = self.graph.m;
        let mut var_counts = vec![0u32; self.graph.proto.n_vars()];
        let mut remaining = 0usize;
        for (vc, &e) in self.erased.iter().enumerate() {
            if e {
                remaining += 1;
                var_counts[self.graph.var_type(vc)] += 1;
            }
        }
        if remaining != self.remaining || var_counts != self.var_counts {
            return false;
        }
        let mut type_counts = vec![0u32; self.type_counts.len()];
        let mut decodable = 0usize;
        for x in 0..self.graph.n_checks() {
            if self.removed[x] {
                continue;
            }
            let mut bits = 0u32;
            for (slot, &vc) in self.graph.check_slots(x).iter().enumerate() {
                if self.erased[vc as usize] {
                    bits |= 1 << slot;
                }
            }
            if bits != self.mask[x] {
                return false;
            }
            let t = x / m;
            type_counts[self.type_offsets[t] + bits as usize] += 1;
            if self.tables[t].peelable(bits) {
                decodable += 1;
                if !self.decodable.contains(x as u32) {
                    return false;
                }
            }
        }
        decodable == self.decodable.len() && type_counts == self.type_counts
    }

    #[inline]
    fn retype(&mut self, x: usize, old: u32, new: u32) {
        let t = x / self.graph.m;
        let base = self.type_offsets[t];
        self.type_counts[base + old as usize] -= 1;
        self.type_counts[base + new as usize] += 1;
        let was = self.tables[t].peelable(old);
        let is = self.tables[t].peelable(new);
        if was && !is {
            self.decodable.remove(x as u32);
        } else if !was && is {
            self.decodable.insert(x as u32);
        }
    }

    /// Removes one uniformly random decodable constraint node together
    /// with its attached erased variables. Returns the number of
    /// variables removed, or None when no decodable node exists.
    pub fn step<R: Rng>(&mut self, rng: &mut R) -> Option<usize> {
        if self.decodable.len() == 0 {
            return None;
        }
        let x = self.decodable.sample(rng) as usize;
        let t = x / self.graph.m;
        let bits = self.mask[x];
        debug_assert!(self.tables[t].peelable(bits));
        // Collect the distinct attached erased variables (multi-edges
        // list a variable once per slot).
        let slots = self.graph.check_slots(x);
        let mut removed_vars = 0usize;
        let mut b = bits;
        while b != 0 {
            let slot = b.trailing_zeros() as usize;
            b &= b - 1;
            let vc = slots[slot] as usize;
            if !self.erased[vc] {
                continue; // already handled through an earlier slot
            }
            self.erased[vc] = false;
            self.remaining -= 1;
            removed_vars += 1;
            self.var_counts[self.graph.var_type(vc)] -= 1;
            for &(c2, s2) in self.graph.var_slots(vc) {
                let c2 = c2 as usize;
                if c2 == x || self.removed[c2] {
                    continue;
                }
                let old = self.mask[c2];
                let new = old & !(1u32 << s2);
                if new != old {
                    self.mask[c2] = new;
                    self.retype(c2, old, new);
                }
            }
        }
        // Remove the node itself from the graph.
        self.removed[x] = true;
        self.decodable.remove(x as u32);
        let base = self.type_offsets[t];
        self.type_counts[base + bits as usize] -= 1;
        self.mask[x] = 0;
        self.steps += 1;
        Some(removed_vars)
    }

    /// Runs to completion, recording a trajectory at the given stride.
    pub fn run<R: Rng>(&mut self, rng: &mut R, stride: usize, seed: u64) -> TrajectoryRecord {
        let n = self.graph.n_vars();
        let stride = stride.max(1);
        let mut samples = Vec::with_capacity(2 + n / stride.max(1));
        samples.push((0u32, self.decodable.len() as u32, self.remaining as u32));
        while self.remaining > 0 {
            if self.step(rng).is_none() {
                break;
            }
            if self.steps % stride == 0 {
                samples.push((
                    self.steps as u32,
                    self.decodable.len() as u32,
                    self.remaining as u32,
                ));
            }
        }
        if samples.last().map(|&(l, _, _)| l as usize) != Some(self.steps) {
            samples.push((
                self.steps as u32,
                self.decodable.len() as u32,
                self.remaining as u32,
            ));
        }
        let outcome = if self.remaining == 0 {
            Outcome::Success
        } else {
            Outcome::Failure
        };
        TrajectoryRecord { n, samples, outcome, seed }
    }
}

/// Default trajectory stride: about 2000 samples per run.
pub fn default_stride(n: usize) -> usize {
    n.div_ceil(2000).max(1)
}

/// Monte Carlo estimate of the block-error rate under peeling.
#[derive(Debug, Clone)]
pub struct McResult {
    pub trials: usize,
    pub failures: usize,
    /// Point estimate failures/trials.
    pub bler: f64,
    /// 95% Clopper-Pearson interval.
    pub ci_low: f64,
    pub ci_high: f64,
    /// Present when trajectory recording was requested.
    pub trajectories: Vec<TrajectoryRecord>,
}

/// Options for [`monte_carlo`].
#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    pub policy: Policy,
    /// Record (tau, a, v) trajectories.
    pub record_trajectories: bool,
    /// Re-lift a fresh graph per trial (true ensemble averaging); when
    /// false a single lift drawn from stream 0 is reused for all trials.
    pub relift_per_trial: bool,
    /// Trajectory stride override; 0 picks [`default_stride`].
    pub stride: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            policy: Policy::FullMl,
            record_trajectories: false,
            relift_per_trial: true,
            stride: 0,
        }
    }
}

/// Runs `trials` independent peeling decodings at channel parameter
/// `eps`, deterministic in `base_seed` regardless of worker count: the
/// RNG of trial `i` is the ChaCha stream `i + 1` of `base_seed`.
pub fn monte_carlo(
    proto: &GldpcProtograph,
    m: usize,
    eps: f64,
    trials: usize,
    base_seed: u64,
    opts: &McOptions,
) -> Result<McResult> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let stride = if opts.stride == 0 {
        default_stride(proto.n_vars() * m)
    } else {
        opts.stride
    };
    let shared = if opts.relift_per_trial {
        None
    } else {
        let mut rng = ChaCha12Rng::seed_from_u64(base_seed);
        rng.set_stream(0);
        Some(lift(proto, m, &mut rng)?)
    };
    let outcomes: Vec<Result<TrajectoryRecord>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha12Rng::seed_from_u64(base_seed);
            rng.set_stream(trial as u64 + 1);
            let record = match &shared {
                Some(graph) => {
                    let mut state = ResidualState::init(graph, eps, &mut rng, opts.policy)?;
                    state.run(&mut rng, stride, base_seed ^ (trial as u64 + 1))
                }
                None => {
                    let graph = lift(proto, m, &mut rng)?;
                    let mut state = ResidualState::init(&graph, eps, &mut rng, opts.policy)?;
                    state.run(&mut rng, stride, base_seed ^ (trial as u64 + 1))
                }
            };
            Ok(record)
        })
        .collect();
    let mut failures = 0usize;
    let mut trajectories = Vec::new();
    for rec in outcomes {
        let rec = rec?;
        if rec.outcome == Outcome::Failure {
            failures += 1;
        }
        if opts.record_trajectories {
            trajectories.push(rec);
        }
    }
    let (ci_low, ci_high) = clopper_pearson(failures, trials, 0.95);
    Ok(McResult {
        trials,
        failures,
        bler: failures as f64 / trials as f64,
        ci_low,
        ci_high,
        trajectories,
    })
}

/// Exact (Clopper-Pearson) binomial confidence interval.
pub fn clopper_pearson(successes: usize, trials: usize, level: f64) -> (f64, f64) {
    use statrs::distribution::{Beta, ContinuousCDF};
    let alpha = 1.0 - level;
    let k = successes as f64;
    let n = trials as f64;
    let low = if successes == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0)
            .map(|b| b.inverse_cdf(alpha / 2.0))
            .unwrap_or(0.0)
    };
    let high = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k)
            .map(|b| b.inverse_cdf(1.0 - alpha / 2.0))
            .unwrap_or(1.0)
    };
    (low, high)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protograph::{Builtin, GldpcProtograph, IntMatrix};
    use crate::gf2::ConstraintCode;
    use rand::SeedableRng;

    fn block27() -> GldpcProtograph {
        Builtin::A7.ensemble().tailbiting(1).unwrap()
    }

    fn spc_proto(dv: usize, dc: usize) -> GldpcProtograph {
        let base = IntMatrix::ones(dv, dc);
        let code = std::sync::Arc::new(ConstraintCode::single_parity_check(dc).unwrap());
        let codes = vec![code; dv];
        let maps = vec![(0..dc).collect::<Vec<_>>(); dv];
        GldpcProtograph::from_base(&base, &codes, &maps, vec![false; dc]).unwrap()
    }

    #[test]
    fn trivial_erasure_extremes() {
        let proto = block27();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let graph = lift(&proto, 50, &mut rng).unwrap();
        // eps = 0: empty residual, immediate success.
        let mut state =
            ResidualState::init(&graph, 0.0, &mut rng, Policy::FullMl).unwrap();
        assert_eq!(state.residual_vars(), 0);
        let rec = state.run(&mut rng, 10, 0);
        assert_eq!(rec.outcome, Outcome::Success);
        assert_eq!(state.steps(), 0);
        // eps = 1: the residual graph is the full graph.
        let state = ResidualState::init(&graph, 1.0, &mut rng, Policy::FullMl).unwrap();
        assert_eq!(state.residual_vars(), graph.n_vars());
        for c in 0..proto.n_constraints() {
            assert_eq!(state.constraint_type_count(c, (1 << 7) - 1), 50);
        }
    }

    #[test]
    fn single_step_removes_mask_weight_variables() {
        // Plant a residual with exactly one decodable node of weight 3.
        let proto = block27();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let graph = lift(&proto, 1, &mut rng).unwrap();
        // Constraint 0 attaches variables 0..6 in slot order; erase the
        // three on the slots {4,5,6}, which form a decodable pattern.
        let mut erased = vec![false; 7];
        for slot in [4usize, 5, 6] {
            erased[graph.check_slots(0)[slot] as usize] = true;
        }
        let mut state =
            ResidualState::with_erasures(&graph, erased, Policy::FullMl).unwrap();
        assert!(state.decodable_count() >= 1);
        let before = state.residual_vars();
        let removed = state.step(&mut rng).unwrap();
        assert_eq!(removed, 3);
        assert_eq!(state.residual_vars(), before - 3);
        assert_eq!(state.steps(), 1);
    }

    #[test]
    fn init_counts_match_binomial_concentration() {
        // Empirical type fractions at initialization concentrate around
        // eps within three binomial sigmas.
        let proto = block27();
        let m = 4000;
        let eps = 0.69;
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let graph = lift(&proto, m, &mut rng).unwrap();
        let state = ResidualState::init(&graph, eps, &mut rng, Policy::FullMl).unwrap();
        let sigma = (m as f64 * eps * (1.0 - eps)).sqrt();
        for (t, &count) in state.var_type_counts().iter().enumerate() {
            assert!(
                (count as f64 - eps * m as f64).abs() < 3.0 * sigma,
                "type {t}: count {count}"
            );
        }
        // Constraint masks of weight k appear with binomial(7, eps)
        // frequency; spot-check the full mask.
        let p_full = eps.powi(7);
        let sigma_full = (m as f64 * p_full * (1.0 - p_full)).sqrt();
        let count = state.constraint_type_count(0, (1 << 7) - 1) as f64;
        assert!((count - p_full * m as f64).abs() < 4.0 * sigma_full);
    }

    #[test]
    fn incremental_counts_match_full_rescans() {
        let proto = Builtin::A7.ensemble().terminated(5).unwrap().protograph;
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let graph = lift(&proto, 60, &mut rng).unwrap();
        let mut state = ResidualState::init(&graph, 0.68, &mut rng, Policy::FullMl).unwrap();
        let mut checkpoints = 0;
        while state.residual_vars() > 0 && checkpoints < 100 {
            for _ in 0..7 {
                if state.step(&mut rng).is_none() {
                    break;
                }
            }
            assert!(state.audit(), "bookkeeping diverged at step {}", state.steps());
            checkpoints += 1;
        }
    }

    /// Classical peeling oracle for all-SPC graphs: repeatedly resolve
    /// degree-one checks. Completely independent of the GPD machinery.
    fn classical_pd_succeeds(graph: &LiftedGraph<'_>, erased: &[bool]) -> bool {
        let mut erased = erased.to_vec();
        let mut degree: Vec<u32> = (0..graph.n_checks())
            .map(|x| {
                graph
                    .check_slots(x)
                    .iter()
                    .filter(|&&v| erased[v as usize])
                    .count() as u32
            })
            .collect();
        let mut stack: Vec<usize> =
            (0..graph.n_checks()).filter(|&x| degree[x] == 1).collect();
        let mut remaining = erased.iter().filter(|&&e| e).count();
        while let Some(x) = stack.pop() {
            if degree[x] != 1 {
                continue;
            }
            let &v = graph
                .check_slots(x)
                .iter()
                .find(|&&v| erased[v as usize])
                .expect("degree-one check has an erased neighbor");
            erased[v as usize] = false;
            remaining -= 1;
            for &(c2, _) in graph.var_slots(v as usize) {
                degree[c2 as usize] -= 1;
                if degree[c2 as usize] == 1 {
                    stack.push(c2 as usize);
                }
            }
        }
        remaining == 0
    }

    #[test]
    fn gpd_matches_classical_peeling_on_spc_graphs() {
        // On all-SPC graphs the decodable patterns are exactly the
        // weight-one masks, and the stuck residual is unique, so the
        // outcome must agree seed by seed.
        let proto = spc_proto(3, 6);
        for seed in 0..500u64 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let graph = lift(&proto, 30, &mut rng).unwrap();
            let eps = 0.35 + 0.2 * (seed % 10) as f64 / 10.0;
            let erased: Vec<bool> =
                (0..graph.n_vars()).map(|_| rng.gen::<f64>() < eps).collect();
            let oracle = classical_pd_succeeds(&graph, &erased);
            let mut state =
                ResidualState::with_erasures(&graph, erased, Policy::FullMl).unwrap();
            let rec = state.run(&mut rng, 1000, seed);
            assert_eq!(
                rec.outcome == Outcome::Success,
                oracle,
                "divergence at seed {seed}"
            );
        }
    }

    #[test]
    fn far_below_threshold_never_fails() {
        let proto = block27();
        let result = monte_carlo(
            &proto,
            100,
            0.3,
            1000,
            99,
            &McOptions::default(),
        )
        .unwrap();
        assert_eq!(result.failures, 0);
        assert!(result.ci_high < 0.01);
    }

    #[test]
    fn conservation_along_a_run() {
        let proto = block27();
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let graph = lift(&proto, 500, &mut rng).unwrap();
        let mut state = ResidualState::init(&graph, 0.66, &mut rng, Policy::FullMl).unwrap();
        let mut v_prev = state.residual_vars();
        while let Some(removed) = state.step(&mut rng) {
            assert!(removed >= 1);
            assert_eq!(state.residual_vars(), v_prev - removed);
            v_prev = state.residual_vars();
            if v_prev == 0 {
                break;
            }
        }
    }

    #[test]
    fn trajectory_terminal_classification() {
        let proto = block27();
        let opts = McOptions {
            record_trajectories: true,
            ..McOptions::default()
        };
        let result = monte_carlo(&proto, 200, 0.73, 40, 5, &opts).unwrap();
        assert_eq!(result.trajectories.len(), 40);
        for rec in &result.trajectories {
            let &(_, a_end, v_end) = rec.samples.last().unwrap();
            match rec.outcome {
                Outcome::Success => assert_eq!(v_end, 0),
                // A failure ends with no decodable nodes but residual
                // variables left.
                Outcome::Failure => {
                    assert_eq!(a_end, 0);
                    assert!(v_end > 0);
                }
            }
        }
        // Above threshold most runs fail.
        assert!(result.failures > 20);
    }

    #[test]
    fn determinism_across_worker_counts() {
        let proto = block27();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                monte_carlo(&proto, 150, 0.69, 60, 1234, &McOptions::default()).unwrap()
            })
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.failures, b.failures);
        assert_eq!(a.bler, b.bler);
    }

    #[test]
    fn clopper_pearson_basics() {
        let (lo, hi) = clopper_pearson(0, 100, 0.95);
        assert_eq!(lo, 0.0);
        assert!(hi < 0.05);
        let (lo, hi) = clopper_pearson(50, 100, 0.95);
        assert!(lo < 0.5 && 0.5 < hi);
        let (lo, hi) = clopper_pearson(100, 100, 0.95);
        assert!(lo > 0.95);
        assert_eq!(hi, 1.0);
    }
}
