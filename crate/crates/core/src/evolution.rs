//! Deterministic mean evolution of the residual degree distribution
//! under generalized peeling.
//!
//! The state tracks the expected per-n counts of residual variable
//! nodes per protograph variable (`l_hat`) and of residual constraint
//! copies per (protograph constraint, residual pattern) pair (`r_hat`).
//! One decoding step removes a uniformly random decodable constraint
//! node; in the large-n limit the expected one-step change gives a
//! drift field over normalized time `tau` = removals / n:
//!
//! * the removed node's own (node, pattern) mass decays at rate
//!   `r / a_hat`, where `a_hat` is the total decodable mass,
//! * each erased slot of its pattern removes one variable of that
//!   slot's variable type,
//! * each remaining edge of such a variable detaches from a random
//!   compatible constraint, moving mass from patterns containing the
//!   edge's slot to the pattern with the slot cleared, in proportion
//!   to the pattern masses.
//!
//! Integration is a fixed-step fourth-order Runge-Kutta scheme with
//! non-negativity clipping; runs halt when either the decodable mass or
//! the residual variable mass is exhausted.

use std::sync::Arc;

use crate::gf2::{DecodabilityTable, Policy};
use crate::protograph::GldpcProtograph;
use crate::scalar::{real, Real};
use crate::{Error, Result};

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub struct StepControl<F> {
    /// Fixed step; zero picks `clamp(1/(10 (#variable types + #extended
    /// constraint types)), 2e-5, 1e-4)`.
    pub dt: F,
    /// Halt once the decodable mass drops below this (failure branch).
    pub halt_a: F,
    /// Halt once the residual variable mass drops below this (success
    /// branch).
    pub halt_v: F,
    /// Classification guard: a halted run counts as successful when the
    /// residual variable mass is below this, whichever bound tripped.
    pub success_guard: F,
    /// Record every k-th step; zero targets about 2000 samples.
    pub sample_stride: usize,
}

impl<F: Real> Default for StepControl<F> {
    fn default() -> Self {
        StepControl {
            dt: F::zero(),
            halt_a: real(1e-9),
            halt_v: real(1e-9),
            success_guard: real(1e-6),
            sample_stride: 0,
        }
    }
}

/// Expected normalized degree distribution at one time point.
#[derive(Debug, Clone)]
pub struct MeanState<F> {
    /// Expected residual variable count / n, per protograph variable.
    pub l_hat: Vec<F>,
    /// Expected residual constraint count / n, flattened per
    /// (protograph constraint, pattern mask).
    pub r_hat: Vec<F>,
    pub tau: F,
}

impl<F: Real> MeanState<F> {
    pub fn v_hat(&self) -> F {
        self.l_hat.iter().copied().sum()
    }
}

/// Precomputed drift structure for one protograph.
pub struct EvolutionProblem<'a, F> {
    proto: &'a GldpcProtograph,
    tables: Vec<Arc<DecodabilityTable>>,
    /// Per constraint node, offset of its pattern block in `r_hat`.
    offsets: Vec<usize>,
    r_len: usize,
    /// Per constraint node, its peelable pattern masks.
    decodable_masks: Vec<Vec<u32>>,
    /// Removal recipes aligned with `decodable_masks`.
    recipes: Vec<Vec<Recipe>>,
    /// Edge id -> (constraint, slot).
    edge_endpoints: Vec<(u32, u8)>,
    _marker: std::marker::PhantomData<F>,
}

/// Expected effect of removing one constraint copy with a given
/// residual pattern.
#[derive(Debug, Clone)]
struct Recipe {
    /// (variable type, multiplicity): distinct variables removed.
    vars: Vec<(u32, u32)>,
    /// (edge id, multiplicity): edges detached from other constraints.
    detach: Vec<(u32, u32)>,
}

impl<'a, F: Real> EvolutionProblem<'a, F> {
    pub fn new(proto: &'a GldpcProtograph, policy: Policy) -> Result<Self> {
        if proto.has_punctured() {
            return Err(Error::PuncturedPeeling);
        }
        let tables = proto.node_tables(policy)?;
        let mut offsets = Vec::with_capacity(proto.n_constraints());
        let mut r_len = 0usize;
        for node in proto.constraints() {
            offsets.push(r_len);
            r_len += 1usize << node.degree();
        }
        let mut edge_endpoints = Vec::with_capacity(proto.edge_count());
        for (c, node) in proto.constraints().iter().enumerate() {
            for slot in 0..node.degree() {
                edge_endpoints.push((c as u32, slot as u8));
            }
        }
        let mut decodable_masks = Vec::with_capacity(proto.n_constraints());
        let mut recipes = Vec::with_capacity(proto.n_constraints());
        for (c, node) in proto.constraints().iter().enumerate() {
            let degree = node.degree();
            let mut masks = Vec::new();
            let mut node_recipes = Vec::new();
            for mask in 1u32..1 << degree {
                if !tables[c].peelable(mask) {
                    continue;
                }
                masks.push(mask);
                node_recipes.push(build_recipe(proto, c, mask));
            }
            decodable_masks.push(masks);
            recipes.push(node_recipes);
        }
        Ok(EvolutionProblem {
            proto,
            tables,
            offsets,
            r_len,
            decodable_masks,
            recipes,
            edge_endpoints,
            _marker: std::marker::PhantomData,
        })
    }

    pub fn proto(&self) -> &GldpcProtograph {
        self.proto
    }

    /// Initial means after channel erasure at probability `eps`:
    /// variable masses `eps / n_v` per type and binomially split
    /// constraint masses over the residual patterns.
    pub fn init_means(&self, eps: F) -> MeanState<F> {
        let n_v = real::<F>(self.proto.n_vars() as f64);
        let l_hat = vec![eps / n_v; self.proto.n_vars()];
        let mut r_hat = vec![F::zero(); self.r_len];
        let one = F::one();
        for (c, node) in self.proto.constraints().iter().enumerate() {
            let degree = node.degree();
            let base = self.offsets[c];
            for mask in 0u32..1 << degree {
                let k = mask.count_ones() as i32;
                let weight = eps.powi(k) * (one - eps).powi(degree as i32 - k);
                r_hat[base + mask as usize] = weight / n_v;
            }
        }
        MeanState { l_hat, r_hat, tau: F::zero() }
    }

    /// Total decodable mass.
    pub fn a_hat(&self, state: &MeanState<F>) -> F {
        let mut a = F::zero();
        for (c, masks) in self.decodable_masks.iter().enumerate() {
            let base = self.offsets[c];
            for &m in masks {
                a += state.r_hat[base + m as usize];
            }
        }
        a
    }

    /// Drift (time derivatives) at the given state. Errors when the
    /// decodable mass is not positive.
    pub fn drift(&self, state: &MeanState<F>) -> Result<Drift<F>> {
        let a_hat = self.a_hat(state);
        if a_hat <= F::zero() {
            return Err(Error::EvolutionHalted);
        }
        let mut dl = vec![F::zero(); state.l_hat.len()];
        let mut dr = vec![F::zero(); state.r_hat.len()];
        let mut w_edge = vec![F::zero(); self.edge_endpoints.len()];
        let inv_a = F::one() / a_hat;
        for (c, masks) in self.decodable_masks.iter().enumerate() {
            let base = self.offsets[c];
            for (i, &m) in masks.iter().enumerate() {
                let r = state.r_hat[base + m as usize];
                if r <= F::zero() {
                    continue;
                }
                let p = r * inv_a;
                dr[base + m as usize] -= p;
                let recipe = &self.recipes[c][i];
                for &(vt, count) in &recipe.vars {
                    dl[vt as usize] -= p * real(count as f64);
                }
                for &(eid, count) in &recipe.detach {
                    w_edge[eid as usize] += p * real(count as f64);
                }
            }
        }
        // Redistribute detached edges over compatible patterns.
        let tiny = real::<F>(1e-300);
        for (eid, &w) in w_edge.iter().enumerate() {
            if w <= F::zero() {
                continue;
            }
            let (c2, s2) = self.edge_endpoints[eid];
            let c2 = c2 as usize;
            let degree = self.proto.constraints()[c2].degree();
            let base = self.offsets[c2];
            let bit = 1u32 << s2;
            let mut mass = F::zero();
            for m in 0u32..1 << degree {
                if m & bit != 0 {
                    mass += state.r_hat[base + m as usize];
                }
            }
            if mass <= tiny {
                continue;
            }
            let scale = w / mass;
            for m in 0u32..1 << degree {
                if m & bit != 0 {
                    let flow = scale * state.r_hat[base + m as usize];
                    dr[base + m as usize] -= flow;
                    dr[base + (m & !bit) as usize] += flow;
                }
            }
        }
        Ok(Drift { dl, dr, a_hat })
    }

    /// Max deviation between the constraint-side and variable-side
    /// counts of residual edges per edge type; exactly zero in the
    /// continuous dynamics, so the integrated value measures the
    /// integrator error.
    pub fn edge_mass_gap(&self, state: &MeanState<F>) -> F {
        let mut worst = F::zero();
        for (eid, &(c, s)) in self.edge_endpoints.iter().enumerate() {
            let _ = eid;
            let c = c as usize;
            let degree = self.proto.constraints()[c].degree();
            let base = self.offsets[c];
            let bit = 1u32 << s;
            let mut mass = F::zero();
            for m in 0u32..1 << degree {
                if m & bit != 0 {
                    mass += state.r_hat[base + m as usize];
                }
            }
            let v = self.proto.constraints()[c].vars[s as usize];
            worst = worst.max((mass - state.l_hat[v]).abs());
        }
        worst
    }

    fn auto_dt(&self) -> F {
        let extended: f64 = self
            .proto
            .constraints()
            .iter()
            .map(|n| (1u64 << n.degree()) as f64)
            .sum();
        let types = self.proto.n_vars() as f64 + extended;
        real::<F>((1.0 / (10.0 * types)).clamp(2e-5, 1e-4))
    }
}

fn build_recipe(proto: &GldpcProtograph, c: usize, mask: u32) -> Recipe {
    let node = &proto.constraints()[c];
    let mut vars: Vec<(u32, u32)> = Vec::new();
    let mut detach: Vec<(u32, u32)> = Vec::new();
    let mut seen_vars: Vec<usize> = Vec::new();
    let mut bits = mask;
    while bits != 0 {
        let slot = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let v = node.vars[slot];
        if seen_vars.contains(&v) {
            continue;
        }
        seen_vars.push(v);
        match vars.iter_mut().find(|(vt, _)| *vt == v as u32) {
            Some((_, count)) => *count += 1,
            None => vars.push((v as u32, 1)),
        }
        for &e in proto.var_edges(v) {
            if e.constraint == c {
                continue;
            }
            let eid = proto.edge_id(e) as u32;
            match detach.iter_mut().find(|(id, _)| *id == eid) {
                Some((_, count)) => *count += 1,
                None => detach.push((eid, 1)),
            }
        }
    }
    Recipe { vars, detach }
}

/// Drift field value.
#[derive(Debug, Clone)]
pub struct Drift<F> {
    pub dl: Vec<F>,
    pub dr: Vec<F>,
    pub a_hat: F,
}

/// Halt branch of an integrated evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolveOutcome {
    /// Residual variable mass exhausted.
    Success,
    /// Decodable mass exhausted with variables left.
    Failure,
}

/// Integrated mean-evolution curves.
#[derive(Debug, Clone)]
pub struct EvolutionCurves<F> {
    pub tau: Vec<F>,
    pub a_hat: Vec<F>,
    pub v_hat: Vec<F>,
    pub outcome: EvolveOutcome,
    /// Final integrated state.
    pub final_state: MeanState<F>,
}

impl<F: Real> EvolutionCurves<F> {
    /// Interior local minima of the decodable mass, excluding the
    /// terminal decay once the residual graph is nearly gone.
    pub fn critical_points(&self, v_guard: F) -> Vec<CriticalPoint<F>> {
        let mut out = Vec::new();
        for i in 1..self.a_hat.len().saturating_sub(1) {
            if self.v_hat[i] <= v_guard {
                break;
            }
            if self.a_hat[i] <= self.a_hat[i - 1] && self.a_hat[i] < self.a_hat[i + 1] {
                out.push(CriticalPoint {
                    tau: self.tau[i],
                    a_hat: self.a_hat[i],
                    v_hat: self.v_hat[i],
                });
            }
        }
        out
    }

    /// The decodable-mass plateau of a coupled run: minimum over the
    /// central residual window (v_hat between 35% and 65% of its
    /// initial value).
    pub fn plateau(&self) -> Option<CriticalPoint<F>> {
        let v0 = *self.v_hat.first()?;
        let lo = v0 * real::<F>(0.35);
        let hi = v0 * real::<F>(0.65);
        let mut best: Option<CriticalPoint<F>> = None;
        for i in 0..self.tau.len() {
            if self.v_hat[i] < lo || self.v_hat[i] > hi {
                continue;
            }
            if best.as_ref().map_or(true, |b| self.a_hat[i] < b.a_hat) {
                best = Some(CriticalPoint {
                    tau: self.tau[i],
                    a_hat: self.a_hat[i],
                    v_hat: self.v_hat[i],
                });
            }
        }
        best
    }

    /// Global interior minimum of the decodable mass.
    pub fn global_critical(&self, v_guard: F) -> Option<CriticalPoint<F>> {
        let mut best: Option<CriticalPoint<F>> = None;
        for i in 1..self.tau.len() {
            if self.v_hat[i] <= v_guard {
                break;
            }
            if best.as_ref().map_or(true, |b| self.a_hat[i] < b.a_hat) {
                best = Some(CriticalPoint {
                    tau: self.tau[i],
                    a_hat: self.a_hat[i],
                    v_hat: self.v_hat[i],
                });
            }
        }
        best
    }
}

/// One critical point of the expected evolution.
#[derive(Debug, Clone, Copy)]
pub struct CriticalPoint<F> {
    pub tau: F,
    pub a_hat: F,
    pub v_hat: F,
}

/// Integrates the expected evolution from the post-channel means until
/// one of the halt bounds trips.
pub fn evolve<F: Real>(
    problem: &EvolutionProblem<'_, F>,
    eps: F,
    control: &StepControl<F>,
) -> Result<EvolutionCurves<F>> {
    let dt = if control.dt > F::zero() { control.dt } else { problem.auto_dt() };
    let mut state = problem.init_means(eps);
    // Hard bound on removals/n, with margin for clipping slack.
    let tau_bound = real::<F>(1.2)
        * real::<F>(problem.proto.n_constraints() as f64 / problem.proto.n_vars() as f64)
        + real::<F>(0.05);
    let max_steps = (tau_bound / dt).to_f64().unwrap_or(1e7) as usize + 1;
    let stride = if control.sample_stride > 0 {
        control.sample_stride
    } else {
        (max_steps / 2000).max(1)
    };
    let mut tau = Vec::new();
    let mut a_curve = Vec::new();
    let mut v_curve = Vec::new();
    let mut record = |s: &MeanState<F>, a: F| {
        tau.push(s.tau);
        a_curve.push(a);
        v_curve.push(s.v_hat());
    };
    let mut a_now = problem.a_hat(&state);
    record(&state, a_now);
    let mut outcome = None;
    for step in 0..max_steps {
        if state.v_hat() < control.halt_v {
            outcome = Some(EvolveOutcome::Success);
            break;
        }
        if a_now < control.halt_a {
            outcome = Some(if state.v_hat() < control.success_guard {
                EvolveOutcome::Success
            } else {
                EvolveOutcome::Failure
            });
            break;
        }
        let k1 = problem.drift(&state)?;
        let s2 = advanced(&state, &k1, dt * real(0.5));
        let k2 = problem.drift(&s2)?;
        let s3 = advanced(&state, &k2, dt * real(0.5));
        let k3 = problem.drift(&s3)?;
        let s4 = advanced(&state, &k3, dt);
        let k4 = problem.drift(&s4)?;
        let sixth = dt / real(6.0);
        for (i, l) in state.l_hat.iter_mut().enumerate() {
            *l += sixth * (k1.dl[i] + real::<F>(2.0) * (k2.dl[i] + k3.dl[i]) + k4.dl[i]);
            *l = l.max(F::zero());
        }
        for (i, r) in state.r_hat.iter_mut().enumerate() {
            *r += sixth * (k1.dr[i] + real::<F>(2.0) * (k2.dr[i] + k3.dr[i]) + k4.dr[i]);
            *r = r.max(F::zero());
        }
        state.tau += dt;
        a_now = problem.a_hat(&state);
        if (step + 1) % stride == 0 {
            record(&state, a_now);
        }
    }
    let outcome = outcome.unwrap_or(EvolveOutcome::Failure);
    record(&state, a_now);
    Ok(EvolutionCurves {
        tau,
        a_hat: a_curve,
        v_hat: v_curve,
        outcome,
        final_state: state,
    })
}

fn advanced<F: Real>(state: &MeanState<F>, k: &Drift<F>, h: F) -> MeanState<F> {
    let l_hat = state
        .l_hat
        .iter()
        .zip(&k.dl)
        .map(|(&x, &d)| (x + h * d).max(F::zero()))
        .collect();
    let r_hat = state
        .r_hat
        .iter()
        .zip(&k.dr)
        .map(|(&x, &d)| (x + h * d).max(F::zero()))
        .collect();
    MeanState { l_hat, r_hat, tau: state.tau + h }
}

/// GPD threshold: the largest channel parameter for which the expected
/// evolution decodes, located by bisection on the evolve outcome.
pub fn gpd_threshold<F: Real>(
    proto: &GldpcProtograph,
    tol: F,
    policy: Policy,
    control: &StepControl<F>,
) -> Result<F> {
    let problem = EvolutionProblem::new(proto, policy)?;
    let mut lo = F::zero();
    let mut hi = F::one();
    if evolve(&problem, hi, control)?.outcome == EvolveOutcome::Success {
        return Ok(hi);
    }
    while hi - lo > tol {
        let mid = (lo + hi) / real(2.0);
        if evolve(&problem, mid, control)?.outcome == EvolveOutcome::Success {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / real(2.0))
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

    fn spc_proto(dv: usize, dc: usize) -> GldpcProtograph {
        let base = IntMatrix::ones(dv, dc);
        let code = Arc::new(ConstraintCode::single_parity_check(dc).unwrap());
        let codes = vec![code; dv];
        let maps = vec![(0..dc).collect::<Vec<_>>(); dv];
        GldpcProtograph::from_base(&base, &codes, &maps, vec![false; dc]).unwrap()
    }

    #[test]
    fn init_means_match_the_binomial_split() {
        let proto = block27();
        let problem = EvolutionProblem::<f64>::new(&proto, Policy::FullMl).unwrap();
        let eps = 0.69;
        let state = problem.init_means(eps);
        assert!((state.v_hat() - eps).abs() < 1e-12);
        // Total constraint mass = n_c / n_v, preserved by the binomial.
        let total: f64 = state.r_hat.iter().sum();
        assert!((total - 2.0 / 7.0).abs() < 1e-12);
        // eps = 1 puts all constraint mass on the full patterns.
        let state = problem.init_means(1.0);
        let full = (1u32 << 7) - 1;
        for c in 0..2 {
            for m in 0..1u32 << 7 {
                let x = state.r_hat[c * 128 + m as usize];
                if m == full {
                    assert!((x - 1.0 / 7.0).abs() < 1e-12);
                } else {
                    assert_eq!(x, 0.0);
                }
            }
        }
    }

    #[test]
    fn eps_zero_halts_immediately_with_success() {
        let proto = block27();
        let problem = EvolutionProblem::<f64>::new(&proto, Policy::FullMl).unwrap();
        let curves = evolve(&problem, 0.0, &StepControl::default()).unwrap();
        assert_eq!(curves.outcome, EvolveOutcome::Success);
        assert!(curves.v_hat[0] < 1e-12);
    }

    #[test]
    fn variable_mass_decreases_and_drift_books_balance() {
        let proto = block27();
        let problem = EvolutionProblem::<f64>::new(&proto, Policy::FullMl).unwrap();
        let state = problem.init_means(0.69);
        let drift = problem.drift(&state).unwrap();
        // d v_hat / d tau = - expected removed mask weight, which is at
        // least one variable per removal.
        let dv: f64 = drift.dl.iter().sum();
        assert!(dv <= -1.0 + 1e-9, "dv/dtau = {dv}");
        // Exactly one constraint node leaves the graph per step, and
        // redistribution only moves mass between patterns.
        let dr_total: f64 = drift.dr.iter().sum();
        assert!((dr_total + 1.0).abs() < 1e-9, "dr total {dr_total}");
    }

    #[test]
    fn edge_mass_consistency_along_integration() {
        let proto = block27();
        let problem = EvolutionProblem::<f64>::new(&proto, Policy::FullMl).unwrap();
        let state = problem.init_means(0.69);
        assert!(problem.edge_mass_gap(&state) < 1e-12);
        let curves = evolve(&problem, 0.69, &StepControl::default()).unwrap();
        assert!(problem.edge_mass_gap(&curves.final_state) < 1e-6);
    }

    #[test]
    fn block_critical_point_matches_the_reference_geometry() {
        let proto = block27();
        let problem = EvolutionProblem::<f64>::new(&proto, Policy::FullMl).unwrap();
        let curves = evolve(&problem, 0.69, &StepControl::default()).unwrap();
        assert_eq!(curves.outcome, EvolveOutcome::Success);
        let crit = curves.global_critical(1e-3).expect("interior minimum");
        assert!(
            (crit.v_hat - 0.43).abs() < 0.02,
            "critical residual fraction {}",
            crit.v_hat
        );
        // A single interior local minimum.
        let minima = curves.critical_points(1e-3);
        assert_eq!(minima.len(), 1, "minima: {minima:?}");
    }

    #[test]
    fn block_gpd_threshold() {
        let proto = block27();
        let t = gpd_threshold(&proto, 1e-3f64, Policy::FullMl, &StepControl::default())
            .unwrap();
        assert!(
            (t - 0.7025).abs() < 2e-3,
            "block GPD threshold {t} should be 0.7025"
        );
    }

    /// Independent classical mean evolution for (3,6)-regular peeling:
    /// degree counts R_j per n, variable removals of degree 3.
    fn classical_36(eps: f64, dt: f64) -> Vec<(f64, f64, f64)> {
        // R_j for j = 0..=6, normalized by n = number of variables.
        let binom = |n: u32, k: u32| -> f64 {
            (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product()
        };
        let mut r: Vec<f64> = (0..=6u32)
            .map(|j| 0.5 * binom(6, j) * eps.powi(j as i32) * (1.0 - eps).powi(6 - j as i32))
            .collect();
        let mut v = eps;
        let mut tau = 0.0;
        let mut out = vec![(tau, r[1], v)];
        while r[1] > 1e-9 && v > 1e-9 {
            let step = |r: &Vec<f64>| -> Vec<f64> {
                let e: f64 = (1..=6).map(|j| j as f64 * r[j]).sum();
                let mut d = vec![0.0; 7];
                d[1] -= 1.0; // the removed degree-one check
                if e > 1e-300 {
                    for j in 1..=6usize {
                        let out_rate = 2.0 * j as f64 * r[j] / e;
                        d[j] -= out_rate;
                        d[j - 1] += out_rate;
                    }
                }
                d
            };
            // Matching RK4 scheme.
            let k1 = step(&r);
            let mid1: Vec<f64> = r.iter().zip(&k1).map(|(&x, &d)| (x + 0.5 * dt * d).max(0.0)).collect();
            let k2 = step(&mid1);
            let mid2: Vec<f64> = r.iter().zip(&k2).map(|(&x, &d)| (x + 0.5 * dt * d).max(0.0)).collect();
            let k3 = step(&mid2);
            let end: Vec<f64> = r.iter().zip(&k3).map(|(&x, &d)| (x + dt * d).max(0.0)).collect();
            let k4 = step(&end);
            for j in 0..7 {
                r[j] = (r[j] + dt / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j])).max(0.0);
            }
            v -= dt; // one removed variable per peeling step
            tau += dt;
            out.push((tau, r[1], v));
            if tau > 1.0 {
                break;
            }
        }
        out
    }

    #[test]
    fn spc_evolution_matches_the_classical_peeling_oracle() {
        // (3,6)-regular, eps safely below the peeling threshold 0.429.
        let proto = spc_proto(3, 6);
        let problem = EvolutionProblem::<f64>::new(&proto, Policy::FullMl).unwrap();
        let control = StepControl {
            dt: 1e-4,
            ..StepControl::default()
        };
        let eps = 0.40;
        let curves = evolve(&problem, eps, &control).unwrap();
        let oracle = classical_36(eps, 1e-4);
        // Compare a_hat(tau) on the overlap; the classical oracle
        // removes one variable per... (see below) so compare on tau.
        for &(tau, r1, _) in oracle.iter().step_by(50) {
            if tau > 0.8 * curves.tau.last().copied().unwrap_or(0.0) {
                break;
            }
            // Locate the nearest evolve sample.
            let idx = curves
                .tau
                .iter()
                .position(|&t| t >= tau)
                .unwrap_or(curves.tau.len() - 1);
            let mine = curves.a_hat[idx];
            assert!(
                (mine - r1).abs() < 5e-3,
                "tau {tau}: a_hat {mine} vs classical {r1}"
            );
        }
    }

    #[test]
    fn halved_step_agrees() {
        let proto = block27();
        let problem = EvolutionProblem::<f64>::new(&proto, Policy::FullMl).unwrap();
        let coarse = evolve(
            &problem,
            0.69,
            &StepControl { dt: 2e-4, ..StepControl::default() },
        )
        .unwrap();
        let fine = evolve(
            &problem,
            0.69,
            &StepControl { dt: 1e-4, ..StepControl::default() },
        )
        .unwrap();
        let crit_c = coarse.global_critical(1e-3).unwrap();
        let crit_f = fine.global_critical(1e-3).unwrap();
        assert!((crit_c.a_hat - crit_f.a_hat).abs() < 1e-4);
        assert!((crit_c.v_hat - crit_f.v_hat).abs() < 1e-3);
    }

    #[test]
    fn shannon_bound_on_the_threshold() {
        let proto = block27();
        let t = gpd_threshold(&proto, 1e-3f64, Policy::FullMl, &StepControl::default())
            .unwrap();
        let rate = 1.0 / 7.0;
        assert!(t <= 1.0 - rate + 1e-9);
    }
}
