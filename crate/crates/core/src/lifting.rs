//! M-fold graph lifting of a protograph into an explicit Tanner graph.
//!
//! Each protograph edge is replaced by a uniformly random permutation
//! matching the M copies of its constraint node to the M copies of its
//! variable node. Slots that connect the same (constraint, variable)
//! pair resample until their permutations are disjoint, so the lifted
//! graph never contains parallel edges.
//!
//! Adjacency is stored as flat index arrays, constraint-major, which is
//! the layout the peeling decoder iterates over.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::protograph::GldpcProtograph;
use crate::{Error, Result};

/// An M-fold lift of a protograph.
///
/// Node numbering: constraint copy `c * M + m` descends from protograph
/// constraint `c`; variable copy `v * M + m` from protograph variable
/// `v`. The edge at `(constraint copy x, slot s)` attaches the variable
/// copy `check_to_var[x * degree(c) + s]`.
#[derive(Debug, Clone)]
pub struct LiftedGraph<'a> {
    pub proto: &'a GldpcProtograph,
    pub m: usize,
    /// Variable copy attached to each (constraint copy, slot).
    check_to_var: Vec<u32>,
    /// Per constraint copy, offset of its slot block.
    check_offsets: Vec<u32>,
    /// (constraint copy, slot) pairs attached to each variable copy,
    /// flattened; variable degrees mirror the protograph.
    var_to_check: Vec<(u32, u8)>,
    var_offsets: Vec<u32>,
}

impl<'a> LiftedGraph<'a> {
    pub fn n_vars(&self) -> usize {
        self.proto.n_vars() * self.m
    }

    pub fn n_checks(&self) -> usize {
        self.proto.n_constraints() * self.m
    }

    pub fn n_edges(&self) -> usize {
        self.check_to_var.len()
    }

    /// Protograph constraint a constraint copy descends from.
    #[inline]
    pub fn check_type(&self, check_copy: usize) -> usize {
        check_copy / self.m
    }

    /// Protograph variable a variable copy descends from.
    #[inline]
    pub fn var_type(&self, var_copy: usize) -> usize {
        var_copy / self.m
    }

    #[inline]
    pub fn check_degree(&self, check_copy: usize) -> usize {
        (self.check_offsets[check_copy + 1] - self.check_offsets[check_copy]) as usize
    }

    /// Variable copies attached to a constraint copy, slot order.
    #[inline]
    pub fn check_slots(&self, check_copy: usize) -> &[u32] {
        let lo = self.check_offsets[check_copy] as usize;
        let hi = self.check_offsets[check_copy + 1] as usize;
        &self.check_to_var[lo..hi]
    }

    /// (constraint copy, slot) pairs attached to a variable copy.
    #[inline]
    pub fn var_slots(&self, var_copy: usize) -> &[(u32, u8)] {
        let lo = self.var_offsets[var_copy] as usize;
        let hi = self.var_offsets[var_copy + 1] as usize;
        &self.var_to_check[lo..hi]
    }

    /// Girth of the lifted Tanner graph (length of its shortest cycle),
    /// or None for a forest. Bipartite, so always even and at least 4.
    pub fn girth(&self) -> Option<usize> {
        // BFS from every variable copy, tracking the arrival edge.
        let nv = self.n_vars();
        let nc = self.n_checks();
        let mut best: Option<usize> = None;
        let mut dist = vec![u32::MAX; nv + nc];
        let mut from = vec![u32::MAX; nv + nc];
        let mut queue: Vec<u32> = Vec::new();
        for start in 0..nv {
            dist.fill(u32::MAX);
            queue.clear();
            dist[start] = 0;
            from[start] = u32::MAX;
            queue.push(start as u32);
            let mut head = 0;
            'bfs: while head < queue.len() {
                let node = queue[head] as usize;
                head += 1;
                let d = dist[node];
                if let Some(b) = best {
                    if (2 * d + 2) as usize >= b {
                        continue;
                    }
                }
                let neighbors: Vec<u32> = if node < nv {
                    self.var_slots(node)
                        .iter()
                        .map(|&(c, _)| nv as u32 + c)
                        .collect()
                } else {
                    self.check_slots(node - nv).to_vec()
                };
                for n in neighbors {
                    let n = n as usize;
                    // There are no parallel edges, so the single edge
                    // back to the parent is always the tree edge.
                    if n as u32 == from[node] {
                        continue;
                    }
                    if dist[n] == u32::MAX {
                        dist[n] = d + 1;
                        from[n] = node as u32;
                        queue.push(n as u32);
                    } else {
                        let cycle = (d + 1 + dist[n]) as usize;
                        if best.map_or(true, |b| cycle < b) {
                            best = Some(cycle);
                        }
                        if cycle == 4 {
                            break 'bfs;
                        }
                    }
                }
            }
            if best == Some(4) {
                break;
            }
        }
        best
    }

    /// Checks the structural invariants; the report lists violations.
    pub fn verify(&self) -> VerifyReport {
        let mut violations = Vec::new();
        let m = self.m;
        // Degree preservation and copy counts.
        for c in 0..self.proto.n_constraints() {
            let want = self.proto.constraints()[c].degree();
            for copy in 0..m {
                let got = self.check_degree(c * m + copy);
                if got != want {
                    violations.push(format!(
                        "constraint copy {} has degree {got}, protograph wants {want}",
                        c * m + copy
                    ));
                }
            }
        }
        for v in 0..self.proto.n_vars() {
            let want = self.proto.var_degree(v);
            for copy in 0..m {
                let got = self.var_slots(v * m + copy).len();
                if got != want {
                    violations.push(format!(
                        "variable copy {} has degree {got}, protograph wants {want}",
                        v * m + copy
                    ));
                }
            }
        }
        // No parallel edges.
        for x in 0..self.n_checks() {
            let mut seen: Vec<u32> = self.check_slots(x).to_vec();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                violations.push(format!("constraint copy {x} has parallel edges"));
            }
        }
        // Type discipline: every edge connects copies of the protograph
        // endpoints of its slot.
        for c in 0..self.proto.n_constraints() {
            let node = &self.proto.constraints()[c];
            for copy in 0..m {
                let x = c * m + copy;
                for (slot, &vc) in self.check_slots(x).iter().enumerate() {
                    if self.var_type(vc as usize) != node.vars[slot] {
                        violations.push(format!(
                            "edge ({x}, {slot}) lands on variable type {}, protograph wants {}",
                            self.var_type(vc as usize),
                            node.vars[slot]
                        ));
                    }
                }
            }
        }
        // Mutual consistency of the two adjacency views.
        for vc in 0..self.n_vars() {
            for &(x, s) in self.var_slots(vc) {
                if self.check_slots(x as usize)[s as usize] != vc as u32 {
                    violations.push(format!(
                        "variable copy {vc} lists edge ({x}, {s}) that does not point back"
                    ));
                }
            }
        }
        VerifyReport { violations }
    }

    #[cfg(test)]
    pub(crate) fn corrupt_for_tests(&mut self, check_copy: usize) {
        // Duplicate the first edge onto the second slot.
        let lo = self.check_offsets[check_copy] as usize;
        self.check_to_var[lo + 1] = self.check_to_var[lo];
    }
}

/// Outcome of [`LiftedGraph::verify`].
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub violations: Vec<String>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lifts a protograph `m`-fold with uniformly random per-edge
/// permutations drawn from `rng`. Deterministic given the RNG state.
///
/// Multi-edges (several slots of one constraint attached to the same
/// variable) resample until the permutations are disjoint, which needs
/// the multiplicity to be at most `m`.
pub fn lift<'a, R: Rng>(
    proto: &'a GldpcProtograph,
    m: usize,
    rng: &mut R,
) -> Result<LiftedGraph<'a>> {
    if m == 0 {
        return Err(Error::LiftTooSmall { multiplicity: 1, m });
    }
    let n_checks = proto.n_constraints() * m;
    let mut check_offsets = Vec::with_capacity(n_checks + 1);
    let mut total_edges = 0u32;
    for c in 0..proto.n_constraints() {
        let d = proto.constraints()[c].degree() as u32;
        for _ in 0..m {
            check_offsets.push(total_edges);
            total_edges += d;
        }
    }
    check_offsets.push(total_edges);
    let mut check_to_var = vec![0u32; total_edges as usize];

    let mut perm: Vec<u32> = (0..m as u32).collect();
    for (c, node) in proto.constraints().iter().enumerate() {
        // Group slots by target variable so multi-edge disjointness is
        // enforced within each group.
        let degree = node.degree();
        let mut group_perms: Vec<Vec<u32>> = Vec::with_capacity(degree);
        let mut group_of_slot = vec![usize::MAX; degree];
        let mut group_var: Vec<usize> = Vec::new();
        for slot in 0..degree {
            let v = node.vars[slot];
            let group = group_var.iter().position(|&g| g == v).unwrap_or_else(|| {
                group_var.push(v);
                group_perms.push(Vec::new());
                group_var.len() - 1
            });
            group_of_slot[slot] = group;
        }
        for (g, &v) in group_var.iter().enumerate() {
            let multiplicity = group_of_slot.iter().filter(|&&x| x == g).count();
            if multiplicity > m {
                return Err(Error::LiftTooSmall { multiplicity, m });
            }
            let mut chosen: Vec<Vec<u32>> = Vec::with_capacity(multiplicity);
            while chosen.len() < multiplicity {
                perm.shuffle(rng);
                let disjoint = chosen
                    .iter()
                    .all(|prev| (0..m).all(|i| prev[i] != perm[i]));
                if disjoint {
                    chosen.push(perm.clone());
                }
            }
            // Assign the permutations to this group's slots in order.
            let mut k = 0;
            for slot in 0..degree {
                if group_of_slot[slot] == g {
                    for copy in 0..m {
                        let x = c * m + copy;
                        let idx = check_offsets[x] as usize + slot;
                        check_to_var[idx] = (v * m) as u32 + chosen[k][copy];
                    }
                    k += 1;
                }
            }
        }
    }

    // Transpose into the variable view.
    let n_vars = proto.n_vars() * m;
    let mut var_deg = vec![0u32; n_vars];
    for &vc in &check_to_var {
        var_deg[vc as usize] += 1;
    }
    let mut var_offsets = Vec::with_capacity(n_vars + 1);
    let mut acc = 0u32;
    for &d in &var_deg {
        var_offsets.push(acc);
        acc += d;
    }
    var_offsets.push(acc);
    let mut fill = var_offsets.clone();
    let mut var_to_check = vec![(0u32, 0u8); total_edges as usize];
    for x in 0..n_checks {
        let lo = check_offsets[x] as usize;
        let hi = check_offsets[x + 1] as usize;
        for (slot, &vc) in check_to_var[lo..hi].iter().enumerate() {
            let pos = fill[vc as usize] as usize;
            var_to_check[pos] = (x as u32, slot as u8);
            fill[vc as usize] += 1;
        }
    }

    Ok(LiftedGraph {
        proto,
        m,
        check_to_var,
        check_offsets,
        var_to_check,
        var_offsets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protograph::Builtin;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn m1_lift_of_all_ones_base_is_the_protograph() {
        let proto = Builtin::A7.ensemble().tailbiting(1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let g = lift(&proto, 1, &mut rng).unwrap();
        assert_eq!(g.n_vars(), 7);
        assert_eq!(g.n_checks(), 2);
        assert_eq!(g.n_edges(), 14);
        assert!(g.verify().is_clean());
        // Slot s of check c attaches exactly protograph variable.
        for (c, node) in proto.constraints().iter().enumerate() {
            for (slot, &v) in node.vars.iter().enumerate() {
                assert_eq!(g.check_slots(c)[slot] as usize, v);
            }
        }
    }

    #[test]
    fn double_edges_stay_disjoint() {
        let proto = Builtin::B14.ensemble().block().unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let g = lift(&proto, 100, &mut rng).unwrap();
        assert!(g.verify().is_clean());
        // Every variable copy connects to two distinct check copies.
        for vc in 0..g.n_vars() {
            let slots = g.var_slots(vc);
            assert_eq!(slots.len(), 2);
            assert_ne!(slots[0].0, slots[1].0, "variable copy {vc}");
        }
    }

    #[test]
    fn multiplicity_above_m_is_rejected() {
        let proto = Builtin::B14.ensemble().block().unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        assert!(matches!(
            lift(&proto, 1, &mut rng),
            Err(Error::LiftTooSmall { multiplicity: 2, m: 1 })
        ));
    }

    #[test]
    fn edge_count_scales_with_m() {
        let proto = Builtin::A7.ensemble().terminated(5).unwrap().protograph;
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let g = lift(&proto, 16, &mut rng).unwrap();
        assert_eq!(g.n_edges(), 16 * proto.edge_count());
        assert!(g.verify().is_clean());
    }

    #[test]
    fn terminated_lift_dimensions() {
        let proto = Builtin::A7.ensemble().terminated(50).unwrap().protograph;
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let g = lift(&proto, 1000, &mut rng).unwrap();
        assert_eq!(g.n_vars(), 350_000);
        for vc in (0..g.n_vars()).step_by(50_017) {
            assert_eq!(g.var_slots(vc).len(), 2);
        }
    }

    #[test]
    fn seed_determinism() {
        let proto = Builtin::A7.ensemble().terminated(3).unwrap().protograph;
        let g1 = lift(&proto, 64, &mut ChaCha12Rng::seed_from_u64(11)).unwrap();
        let g2 = lift(&proto, 64, &mut ChaCha12Rng::seed_from_u64(11)).unwrap();
        assert_eq!(g1.check_to_var, g2.check_to_var);
        let g3 = lift(&proto, 64, &mut ChaCha12Rng::seed_from_u64(12)).unwrap();
        assert_ne!(g1.check_to_var, g3.check_to_var);
    }

    #[test]
    fn verify_flags_a_planted_parallel_edge() {
        let proto = Builtin::A7.ensemble().tailbiting(2).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let mut g = lift(&proto, 8, &mut rng).unwrap();
        assert!(g.verify().is_clean());
        g.corrupt_for_tests(0);
        let report = g.verify();
        assert!(!report.is_clean());
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("parallel") || v.contains("does not point back")));
    }

    #[test]
    fn marginal_uniformity_over_seeds() {
        // Single-edge protograph cell: over many seeded lifts at M = 8,
        // the (check copy 0, var copy j) matchings are near-uniform.
        let proto = Builtin::A7.ensemble().tailbiting(1).unwrap();
        let m = 8;
        let trials = 4000;
        let mut counts = vec![0u32; m];
        for seed in 0..trials {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let g = lift(&proto, m, &mut rng).unwrap();
            // Slot 0 of check copy 0 lands on a copy of variable 0 for
            // the first constraint row (natural order).
            let target = g.check_slots(0)[0] as usize % m;
            counts[target] += 1;
        }
        let mean = trials as f64 / m as f64;
        let sigma = (mean * (1.0 - 1.0 / m as f64)).sqrt();
        for (j, &c) in counts.iter().enumerate() {
            assert!(
                (c as f64 - mean).abs() < 3.0 * sigma + 1.0,
                "copy {j}: count {c} vs mean {mean} (sigma {sigma})"
            );
        }
    }

    #[test]
    fn braided_protograph_girth_is_eight() {
        // Lifted at M = 1 the braided graph keeps its deterministic
        // array structure.
        let proto = Builtin::C7.ensemble().terminated(20).unwrap().protograph;
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let g = lift(&proto, 1, &mut rng).unwrap();
        assert_eq!(g.girth(), Some(8));
    }
}
