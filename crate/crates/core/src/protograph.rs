//! Base-matrix algebra for GLDPC protographs.
//!
//! A protograph couples integer base matrices with per-row constraint
//! codes and an explicit edge-to-column assignment. Spatial coupling is
//! described by component matrices `B_0..B_w` obtained from an edge
//! spreading of the uncoupled base matrix; termination and tail-biting
//! turn a coupling into concrete (finite) protographs.
//!
//! Slot ordering convention: the edges of a constraint node are listed
//! component-major, `B_w` first down to `B_0` (i.e. oldest source time
//! first), ascending variable column within a component, multi-edges
//! consecutive. Column maps are given in this slot order, so the
//! identity map reproduces the usual drawing in which a node's left
//! (older) edges take the leading parity-matrix columns. For uncoupled
//! protographs the order is simply ascending variable column.

use std::collections::HashMap;
use std::sync::Arc;

use crate::gf2::{ConstraintCode, DecodabilityTable, Policy};
use crate::{Error, Rate, Result};

/// Dense non-negative integer matrix (base and component matrices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::EmptyMatrix);
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::BadComponent);
        }
        let data = rows.iter().flatten().copied().collect();
        IntMatrix::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![1; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row_sum(&self, i: usize) -> u32 {
        (0..self.cols).map(|j| self.get(i, j)).sum()
    }

    pub fn col_sum(&self, j: usize) -> u32 {
        (0..self.rows).map(|i| self.get(i, j)).sum()
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
    }

    fn add(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::BadComponent);
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        IntMatrix::new(self.rows, self.cols, data)
    }
}

/// How a coupled ensemble is closed off in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationMode {
    /// Periodically time-varying unterminated code with period `period`.
    Unterminated { period: usize },
    /// Terminated after `coupling_len` time instants.
    Terminated { coupling_len: usize },
    /// Tail-biting with coupling length `coupling_len`.
    TailBiting { coupling_len: usize },
}

/// Component base matrices `B_0..B_w` plus a termination mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingSpec {
    components: Vec<IntMatrix>,
    mode: TerminationMode,
}

impl CouplingSpec {
    pub fn new(components: Vec<IntMatrix>, mode: TerminationMode) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::BadComponent);
        }
        let (r, c) = (components[0].rows(), components[0].cols());
        if components.iter().any(|m| m.rows() != r || m.cols() != c) {
            return Err(Error::BadComponent);
        }
        let w = components.len() - 1;
        match mode {
            TerminationMode::Unterminated { period } if period == 0 => {
                return Err(Error::BadCouplingLength("period T >= 1".into()))
            }
            TerminationMode::Terminated { coupling_len } if coupling_len == 0 => {
                return Err(Error::BadCouplingLength("L >= 1".into()))
            }
            TerminationMode::TailBiting { coupling_len }
                if coupling_len < w.max(1) =>
            {
                return Err(Error::BadCouplingLength(format!(
                    "lambda >= max(w, 1) = {}",
                    w.max(1)
                )))
            }
            _ => {}
        }
        Ok(CouplingSpec { components, mode })
    }

    /// Syndrome former memory w.
    pub fn memory(&self) -> usize {
        self.components.len() - 1
    }

    pub fn mode(&self) -> TerminationMode {
        self.mode
    }

    pub fn with_mode(&self, mode: TerminationMode) -> Result<Self> {
        CouplingSpec::new(self.components.clone(), mode)
    }

    pub fn components(&self) -> &[IntMatrix] {
        &self.components
    }

    /// Constraint rows per time instant.
    pub fn b_c(&self) -> usize {
        self.components[0].rows()
    }

    /// Variable columns per time instant.
    pub fn b_v(&self) -> usize {
        self.components[0].cols()
    }

    /// Sum of the component matrices (the uncoupled base matrix).
    pub fn summed_base(&self) -> IntMatrix {
        let mut acc = self.components[0].clone();
        for m in &self.components[1..] {
            acc = acc.add(m).expect("uniform component shapes");
        }
        acc
    }
}

/// Validated edge spreading: components must be non-negative (enforced
/// by the `u32` entries) and sum to the uncoupled base matrix.
pub fn edge_spread(
    base: &IntMatrix,
    components: Vec<IntMatrix>,
    mode: TerminationMode,
) -> Result<CouplingSpec> {
    let spec = CouplingSpec::new(components, mode)?;
    if spec.summed_base() != *base {
        return Err(Error::EdgeSpreadMismatch);
    }
    Ok(spec)
}

/// One constraint node of a concrete protograph.
///
/// `code` is already slot-ordered: column `s` of its parity matrix is
/// the column assigned to slot `s`, with shortened-away columns removed.
#[derive(Debug, Clone)]
pub struct ConstraintNode {
    /// Slot-ordered (and possibly shortened) constraint code.
    pub code: Arc<ConstraintCode>,
    /// Variable column attached to each slot.
    pub vars: Vec<usize>,
    /// Row of the uncoupled base matrix this node descends from.
    pub base_row: usize,
    /// Time instant (0 for uncoupled protographs).
    pub time: usize,
    /// Original parity-matrix column per slot, before shortening.
    pub original_columns: Vec<usize>,
    /// Rank lost by shortening relative to the full row code.
    pub rank_deficit: usize,
}

impl ConstraintNode {
    pub fn degree(&self) -> usize {
        self.vars.len()
    }
}

/// Edge endpoint on the variable side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRef {
    pub constraint: usize,
    pub slot: usize,
}

/// A GLDPC protograph: constraint nodes with codes and explicit
/// edge-to-column assignments over a set of variable columns.
#[derive(Debug, Clone)]
pub struct GldpcProtograph {
    n_vars: usize,
    punctured: Vec<bool>,
    constraints: Vec<ConstraintNode>,
    var_edges: Vec<Vec<EdgeRef>>,
    edge_offsets: Vec<usize>,
    edge_count: usize,
}

impl GldpcProtograph {
    /// Builds an uncoupled protograph from a base matrix.
    ///
    /// `codes[i]` is the full-length constraint code of row `i` and
    /// `column_maps[i]` its slot-to-column assignment (ascending
    /// variable-column slot order); row degree must equal the code
    /// length.
    pub fn from_base(
        base: &IntMatrix,
        codes: &[Arc<ConstraintCode>],
        column_maps: &[Vec<usize>],
        punctured: Vec<bool>,
    ) -> Result<Self> {
        if codes.len() != base.rows() || column_maps.len() != base.rows() {
            return Err(Error::InvalidProtograph(format!(
                "expected {} row codes and column maps",
                base.rows()
            )));
        }
        if punctured.len() != base.cols() {
            return Err(Error::InvalidProtograph(
                "puncturing flag count must equal the number of variable columns".into(),
            ));
        }
        let mut nodes = Vec::with_capacity(base.rows());
        for i in 0..base.rows() {
            let degree = base.row_sum(i) as usize;
            if degree != codes[i].len() {
                return Err(Error::InvalidProtograph(format!(
                    "row {i}: degree {degree} != code length {}",
                    codes[i].len()
                )));
            }
            check_column_map(&column_maps[i], codes[i].len(), i)?;
            let mut vars = Vec::with_capacity(degree);
            for j in 0..base.cols() {
                for _ in 0..base.get(i, j) {
                    vars.push(j);
                }
            }
            let code = Arc::new(codes[i].permute_columns(&column_maps[i])?);
            nodes.push(ConstraintNode {
                code,
                vars,
                base_row: i,
                time: 0,
                original_columns: column_maps[i].clone(),
                rank_deficit: 0,
            });
        }
        Self::assemble(base.cols(), punctured, nodes)
    }

    fn assemble(
        n_vars: usize,
        punctured: Vec<bool>,
        constraints: Vec<ConstraintNode>,
    ) -> Result<Self> {
        let mut var_edges: Vec<Vec<EdgeRef>> = vec![Vec::new(); n_vars];
        let mut edge_offsets = Vec::with_capacity(constraints.len() + 1);
        let mut edge_count = 0;
        for (c, node) in constraints.iter().enumerate() {
            edge_offsets.push(edge_count);
            for (slot, &v) in node.vars.iter().enumerate() {
                if v >= n_vars {
                    return Err(Error::IndexOutOfRange { index: v, len: n_vars });
                }
                var_edges[v].push(EdgeRef { constraint: c, slot });
            }
            edge_count += node.vars.len();
        }
        edge_offsets.push(edge_count);
        if var_edges.iter().any(|e| e.is_empty()) {
            return Err(Error::InvalidProtograph(
                "every variable column must have at least one edge".into(),
            ));
        }
        Ok(GldpcProtograph {
            n_vars,
            punctured,
            constraints,
            var_edges,
            edge_offsets,
            edge_count,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[ConstraintNode] {
        &self.constraints
    }

    pub fn punctured(&self) -> &[bool] {
        &self.punctured
    }

    pub fn has_punctured(&self) -> bool {
        self.punctured.iter().any(|&p| p)
    }

    pub fn var_edges(&self, v: usize) -> &[EdgeRef] {
        &self.var_edges[v]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_edges[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Global edge index of a (constraint, slot) pair.
    #[inline]
    pub fn edge_id(&self, e: EdgeRef) -> usize {
        self.edge_offsets[e.constraint] + e.slot
    }

    /// Design rate as an exact rational, accounting for puncturing.
    pub fn design_rate(&self) -> Result<Rate> {
        let checks: i64 = self.constraints.iter().map(|c| c.code.rank() as i64).sum();
        let p = self.punctured.iter().filter(|&&x| x).count() as i64;
        let denom = self.n_vars as i64 - p;
        if denom <= 0 {
            return Err(Error::DegenerateRate);
        }
        Ok(Rate::new(self.n_vars as i64 - checks, denom))
    }

    /// Total rank deficit of shortened constraint nodes.
    pub fn rank_deficit(&self) -> usize {
        self.constraints.iter().map(|c| c.rank_deficit).sum()
    }

    /// Per-node decodability tables, deduplicated across nodes that
    /// share the same slot-ordered code.
    pub fn node_tables(&self, policy: Policy) -> Result<Vec<Arc<DecodabilityTable>>> {
        let mut cache: HashMap<(Vec<u32>, usize), Arc<DecodabilityTable>> = HashMap::new();
        let mut tables = Vec::with_capacity(self.constraints.len());
        for node in &self.constraints {
            let key = (node.code.rows().to_vec(), node.code.len());
            let table = match cache.get(&key) {
                Some(t) => Arc::clone(t),
                None => {
                    let t = Arc::new(node.code.decodability_table(policy)?);
                    cache.insert(key, Arc::clone(&t));
                    t
                }
            };
            tables.push(table);
        }
        Ok(tables)
    }

    /// Per-node codeword lists (slot-ordered supports), deduplicated.
    pub fn node_codewords(&self) -> Result<Vec<Arc<Vec<u32>>>> {
        let mut cache: HashMap<(Vec<u32>, usize), Arc<Vec<u32>>> = HashMap::new();
        let mut out = Vec::with_capacity(self.constraints.len());
        for node in &self.constraints {
            let key = (node.code.rows().to_vec(), node.code.len());
            let words = match cache.get(&key) {
                Some(w) => Arc::clone(w),
                None => {
                    let w = Arc::new(node.code.codewords()?);
                    cache.insert(key, Arc::clone(&w));
                    w
                }
            };
            out.push(words);
        }
        Ok(out)
    }

    /// Type census: per-node type vectors over the edge set plus the
    /// size of the extended (residual-descendant) constraint type set.
    pub fn type_census(&self) -> TypeCensus {
        let ec = self.edge_count;
        let variable_types = (0..self.n_vars)
            .map(|v| {
                let mut bits = vec![false; ec];
                for &e in &self.var_edges[v] {
                    bits[self.edge_id(e)] = true;
                }
                bits
            })
            .collect();
        let constraint_types: Vec<Vec<bool>> = (0..self.constraints.len())
            .map(|c| {
                let mut bits = vec![false; ec];
                for slot in 0..self.constraints[c].degree() {
                    bits[self.edge_offsets[c] + slot] = true;
                }
                bits
            })
            .collect();
        let extended_count = self
            .constraints
            .iter()
            .map(|c| 1u128 << c.degree())
            .sum();
        TypeCensus {
            edge_count: ec,
            variable_types,
            constraint_types,
            extended_count,
        }
    }
}

fn check_column_map(map: &[usize], n: usize, row: usize) -> Result<()> {
    if map.len() != n {
        return Err(Error::InvalidProtograph(format!(
            "row {row}: column map length {} != code length {n}",
            map.len()
        )));
    }
    let mut seen = vec![false; n];
    for &c in map {
        if c >= n || seen[c] {
            return Err(Error::InvalidProtograph(format!(
                "row {row}: column map must be a permutation of 0..{n}"
            )));
        }
        seen[c] = true;
    }
    Ok(())
}

/// Node-type census of a protograph.
///
/// Every node is its own type (types are never merged across time
/// positions), so each type has protograph count one and appears `M`
/// times in an `M`-fold lift.
#[derive(Debug, Clone)]
pub struct TypeCensus {
    pub edge_count: usize,
    pub variable_types: Vec<Vec<bool>>,
    pub constraint_types: Vec<Vec<bool>>,
    /// Σ over constraint types of 2^degree: the number of residual
    /// types that can appear during peeling.
    pub extended_count: u128,
}

/// A terminated coupled protograph with its rate-increase accounting.
#[derive(Debug, Clone)]
pub struct Terminated {
    pub protograph: GldpcProtograph,
    /// Total rank deficit Δ of the shortened end nodes.
    pub delta: usize,
    /// Terminated design rate R_L.
    pub rate: Rate,
}

/// A coupled GLDPC ensemble: coupling spec plus per-row codes, column
/// assignments, and puncturing pattern.
#[derive(Debug, Clone)]
pub struct EnsembleDef {
    pub coupling: CouplingSpec,
    pub codes: Vec<Arc<ConstraintCode>>,
    pub column_maps: Vec<Vec<usize>>,
    pub punctured: Vec<bool>,
}

impl EnsembleDef {
    pub fn new(
        coupling: CouplingSpec,
        codes: Vec<Arc<ConstraintCode>>,
        column_maps: Vec<Vec<usize>>,
        punctured: Vec<bool>,
    ) -> Result<Self> {
        let b_c = coupling.b_c();
        if codes.len() != b_c || column_maps.len() != b_c {
            return Err(Error::InvalidProtograph(format!(
                "expected {b_c} row codes and column maps"
            )));
        }
        if punctured.len() != coupling.b_v() {
            return Err(Error::InvalidProtograph(
                "puncturing flags must match b_v".into(),
            ));
        }
        let base = coupling.summed_base();
        for i in 0..b_c {
            let degree = base.row_sum(i) as usize;
            if degree != codes[i].len() {
                return Err(Error::InvalidProtograph(format!(
                    "row {i}: coupled degree {degree} != code length {}",
                    codes[i].len()
                )));
            }
            check_column_map(&column_maps[i], codes[i].len(), i)?;
        }
        Ok(EnsembleDef { coupling, codes, column_maps, punctured })
    }

    /// Decoding constraint length ν_s = (w+1) M b_v.
    pub fn constraint_length(&self, lifting: usize) -> usize {
        (self.coupling.memory() + 1) * lifting * self.coupling.b_v()
    }

    /// Design rate of the unterminated ensemble.
    pub fn unterminated_rate(&self) -> Result<Rate> {
        let checks: i64 = self.codes.iter().map(|c| c.rank() as i64).sum();
        let p = self.punctured.iter().filter(|&&x| x).count() as i64;
        let denom = self.coupling.b_v() as i64 - p;
        if denom <= 0 {
            return Err(Error::DegenerateRate);
        }
        Ok(Rate::new(self.coupling.b_v() as i64 - checks, denom))
    }

    /// Uncoupled block protograph over the summed base matrix.
    ///
    /// For `w = 1` this equals `tailbiting(1)` up to slot order.
    pub fn block(&self) -> Result<GldpcProtograph> {
        GldpcProtograph::from_base(
            &self.coupling.summed_base(),
            &self.codes,
            &self.column_maps,
            self.punctured.clone(),
        )
    }

    /// Terminated protograph over `L` time instants (Δ computed from
    /// the rank deficits of the shortened end nodes).
    pub fn terminated(&self, coupling_len: usize) -> Result<Terminated> {
        if coupling_len == 0 {
            return Err(Error::BadCouplingLength("L >= 1".into()));
        }
        let l = coupling_len;
        let w = self.coupling.memory();
        let b_c = self.coupling.b_c();
        let b_v = self.coupling.b_v();
        let mut nodes = Vec::with_capacity((l + w) * b_c);
        let mut full_rank_total = 0usize;
        for s in 0..l + w {
            for i in 0..b_c {
                full_rank_total += self.codes[i].rank();
                let mut vars = Vec::new();
                let mut kept = Vec::new();
                let mut pos = 0usize;
                for m in (0..=w).rev() {
                    let comp = &self.coupling.components()[m];
                    let t = s as isize - m as isize;
                    for j in 0..b_v {
                        for _ in 0..comp.get(i, j) {
                            if t >= 0 && (t as usize) < l {
                                vars.push(t as usize * b_v + j);
                                kept.push(self.column_maps[i][pos]);
                            }
                            pos += 1;
                        }
                    }
                }
                debug_assert_eq!(pos, self.codes[i].len());
                if vars.is_empty() {
                    continue;
                }
                let (code, deficit) = self.codes[i].shorten(&kept)?;
                nodes.push(ConstraintNode {
                    code: Arc::new(code),
                    vars,
                    base_row: i,
                    time: s,
                    original_columns: kept,
                    rank_deficit: deficit,
                });
            }
        }
        let punctured: Vec<bool> = (0..l).flat_map(|_| self.punctured.iter().copied()).collect();
        let protograph = GldpcProtograph::assemble(l * b_v, punctured, nodes)?;
        let delta = full_rank_total
            - protograph
                .constraints()
                .iter()
                .map(|n| n.code.rank())
                .sum::<usize>();
        let rate = protograph.design_rate()?;
        Ok(Terminated { protograph, delta, rate })
    }

    /// Tail-biting protograph with coupling length `λ >= max(w, 1)`.
    /// All constraint nodes are full length, so the design rate equals
    /// the block design rate.
    pub fn tailbiting(&self, coupling_len: usize) -> Result<GldpcProtograph> {
        let w = self.coupling.memory();
        if coupling_len < w.max(1) {
            return Err(Error::BadCouplingLength(format!(
                "lambda >= max(w, 1) = {}",
                w.max(1)
            )));
        }
        let lam = coupling_len;
        let b_c = self.coupling.b_c();
        let b_v = self.coupling.b_v();
        let mut nodes = Vec::with_capacity(lam * b_c);
        for s in 0..lam {
            for i in 0..b_c {
                let mut vars = Vec::new();
                let mut pos = 0usize;
                for m in (0..=w).rev() {
                    let comp = &self.coupling.components()[m];
                    let t = (s + lam - m % lam) % lam;
                    for j in 0..b_v {
                        for _ in 0..comp.get(i, j) {
                            vars.push(t * b_v + j);
                            pos += 1;
                        }
                    }
                }
                debug_assert_eq!(pos, self.codes[i].len());
                let code = Arc::new(self.codes[i].permute_columns(&self.column_maps[i])?);
                nodes.push(ConstraintNode {
                    code,
                    vars,
                    base_row: i,
                    time: s,
                    original_columns: self.column_maps[i].clone(),
                    rank_deficit: 0,
                });
            }
        }
        let punctured: Vec<bool> = (0..lam)
            .flat_map(|_| self.punctured.iter().copied())
            .collect();
        GldpcProtograph::assemble(lam * b_v, punctured, nodes)
    }

    /// Builds the protograph selected by the coupling's termination mode.
    pub fn protograph(&self) -> Result<GldpcProtograph> {
        match self.coupling.mode() {
            TerminationMode::Terminated { coupling_len } => {
                Ok(self.terminated(coupling_len)?.protograph)
            }
            TerminationMode::TailBiting { coupling_len } => self.tailbiting(coupling_len),
            TerminationMode::Unterminated { .. } => Err(Error::InvalidConfig(
                "unterminated ensembles have no finite protograph; terminate or tail-bite first"
                    .into(),
            )),
        }
    }
}

/// Built-in ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    A7,
    A15,
    B14,
    B14P,
    C7,
    C15,
}

impl std::str::FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A7" => Ok(Builtin::A7),
            "A15" => Ok(Builtin::A15),
            "B14" => Ok(Builtin::B14),
            "B14P" => Ok(Builtin::B14P),
            "C7" => Ok(Builtin::C7),
            "C15" => Ok(Builtin::C15),
            other => Err(Error::UnknownBuiltin(other.into())),
        }
    }
}

impl Builtin {
    pub const ALL: [Builtin; 6] = [
        Builtin::A7,
        Builtin::A15,
        Builtin::B14,
        Builtin::B14P,
        Builtin::C7,
        Builtin::C15,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::A7 => "A7",
            Builtin::A15 => "A15",
            Builtin::B14 => "B14",
            Builtin::B14P => "B14P",
            Builtin::C7 => "C7",
            Builtin::C15 => "C15",
        }
    }

    /// Constructs the ensemble with identity column maps under the
    /// component-major slot order (see the module docs).
    pub fn ensemble(self) -> EnsembleDef {
        match self {
            Builtin::A7 => hamming_chain_ensemble(3),
            Builtin::A15 => hamming_chain_ensemble(4),
            Builtin::B14 => double_edge_ensemble(false),
            Builtin::B14P => double_edge_ensemble(true),
            Builtin::C7 => braided_ensemble(3),
            Builtin::C15 => braided_ensemble(4),
        }
    }
}

/// The `w = 1` coupled ensembles over a length-`2^r - 1` Hamming code:
/// row one defers its first `k` edges by one time instant, row two its
/// last `k` edges.
fn hamming_chain_ensemble(r: usize) -> EnsembleDef {
    let code = Arc::new(crate::gf2::hamming_parity(r).expect("valid hamming parameter"));
    let n = code.len();
    let k = code.dimension();
    let mut b0 = IntMatrix::zeros(2, n);
    let mut b1 = IntMatrix::zeros(2, n);
    for j in 0..n {
        // Row 0: B_1 carries columns 0..k, B_0 the rest.
        if j < k {
            b1.set(0, j, 1);
        } else {
            b0.set(0, j, 1);
        }
        // Row 1: B_0 carries columns 0..n-k, B_1 the rest.
        if j < n - k {
            b0.set(1, j, 1);
        } else {
            b1.set(1, j, 1);
        }
    }
    let coupling = CouplingSpec::new(
        vec![b0, b1],
        TerminationMode::Terminated { coupling_len: 1 },
    )
    .expect("valid coupling");
    let maps = vec![(0..n).collect::<Vec<_>>(); 2];
    EnsembleDef::new(coupling, vec![Arc::clone(&code), code], maps, vec![false; n])
        .expect("valid builtin")
}

/// The `w = 1`, `b_c = 1` double-edge ensemble over a shortened
/// (14,10) Hamming code (last canonical column removed).
fn double_edge_ensemble(punctured_first: bool) -> EnsembleDef {
    let h15 = crate::gf2::hamming_parity(4).expect("valid hamming parameter");
    let kept: Vec<usize> = (0..14).collect();
    let (code, deficit) = h15.shorten(&kept).expect("valid shortening");
    debug_assert_eq!(deficit, 0);
    let code = Arc::new(code);
    let ones = IntMatrix::ones(1, 7);
    let coupling = CouplingSpec::new(
        vec![ones.clone(), ones],
        TerminationMode::Terminated { coupling_len: 1 },
    )
    .expect("valid coupling");
    let mut punctured = vec![false; 7];
    punctured[0] = punctured_first;
    EnsembleDef::new(coupling, vec![code], vec![(0..14).collect()], punctured)
        .expect("valid builtin")
}

/// Tightly braided ensembles: `n^c = 2w + 1` Hamming constraint codes
/// with the component pattern `B_0 = [1 i 0; 1 0 i]`,
/// `B_m = [0 0 e_m; 0 e_m 0]`.
fn braided_ensemble(r: usize) -> EnsembleDef {
    let code = Arc::new(crate::gf2::hamming_parity(r).expect("valid hamming parameter"));
    let n = code.len();
    let w = (n - 1) / 2;
    let b_v = 2 * w + 1;
    debug_assert_eq!(b_v, n);
    let mut components = Vec::with_capacity(w + 1);
    let mut b0 = IntMatrix::zeros(2, b_v);
    b0.set(0, 0, 1);
    b0.set(1, 0, 1);
    for j in 1..=w {
        b0.set(0, j, 1); // row 0 takes the middle block at time t
        b0.set(1, w + j, 1); // row 1 takes the trailing block at time t
    }
    components.push(b0);
    for m in 1..=w {
        let mut bm = IntMatrix::zeros(2, b_v);
        bm.set(0, w + m, 1);
        bm.set(1, m, 1);
        components.push(bm);
    }
    let coupling = CouplingSpec::new(
        components,
        TerminationMode::Terminated { coupling_len: 1 },
    )
    .expect("valid coupling");
    let maps = vec![(0..n).collect::<Vec<_>>(); 2];
    EnsembleDef::new(coupling, vec![Arc::clone(&code), code], maps, vec![false; n])
        .expect("valid builtin")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::hamming_parity;

    fn a7() -> EnsembleDef {
        Builtin::A7.ensemble()
    }

    #[test]
    fn a7_components_match_the_paper_split() {
        let e = a7();
        let b0 = &e.coupling.components()[0];
        let b1 = &e.coupling.components()[1];
        assert_eq!(b0.row_vecs(), vec![vec![0, 0, 0, 0, 1, 1, 1], vec![1, 1, 1, 0, 0, 0, 0]]);
        assert_eq!(b1.row_vecs(), vec![vec![1, 1, 1, 1, 0, 0, 0], vec![0, 0, 0, 1, 1, 1, 1]]);
        assert_eq!(e.coupling.summed_base(), IntMatrix::ones(2, 7));
        assert_eq!(e.coupling.memory(), 1);
        assert_eq!(e.constraint_length(1), 14);
        assert_eq!(e.unterminated_rate().unwrap(), Rate::new(1, 7));
    }

    #[test]
    fn design_rate_examples() {
        // Uncoupled (2,7) Hamming block ensemble: R = 1/7.
        let block = a7().block().unwrap();
        assert_eq!(block.design_rate().unwrap(), Rate::new(1, 7));

        // B14: R = 3/7; punctured variant: R = 1/2.
        let b14 = Builtin::B14.ensemble();
        assert_eq!(b14.unterminated_rate().unwrap(), Rate::new(3, 7));
        assert_eq!(b14.block().unwrap().design_rate().unwrap(), Rate::new(3, 7));
        let b14p = Builtin::B14P.ensemble();
        assert_eq!(b14p.unterminated_rate().unwrap(), Rate::new(1, 2));
    }

    #[test]
    fn edge_spread_validates_the_sum() {
        let base = IntMatrix::ones(2, 7);
        let e = a7();
        let comps = e.coupling.components().to_vec();
        assert!(edge_spread(&base, comps.clone(), e.coupling.mode()).is_ok());

        let mut broken = comps;
        let extra = broken[0].get(0, 0) + 1;
        broken[0].set(0, 0, extra);
        assert!(matches!(
            edge_spread(&base, broken, e.coupling.mode()),
            Err(Error::EdgeSpreadMismatch)
        ));
    }

    #[test]
    fn bbc_components_sum_to_all_ones() {
        for (builtin, n) in [(Builtin::C7, 7), (Builtin::C15, 15)] {
            let e = builtin.ensemble();
            assert_eq!(e.coupling.summed_base(), IntMatrix::ones(2, n));
            assert_eq!(e.coupling.memory(), (n - 1) / 2);
        }
    }

    #[test]
    fn terminated_dimensions_and_delta() {
        let e = a7();
        for l in [1usize, 2, 7, 20] {
            let t = e.terminated(l).unwrap();
            assert_eq!(t.protograph.n_vars(), 7 * l);
            assert_eq!(t.protograph.n_constraints(), 2 * (l + 1));
            // Variable degrees are unaffected by termination.
            for v in 0..t.protograph.n_vars() {
                assert_eq!(t.protograph.var_degree(v), 2);
            }
        }
    }

    #[test]
    fn terminated_rate_matches_the_closed_form() {
        // R_L = 1 - (6(L+1) - 2) / (7L), i.e. Δ = 2 for ensemble A7.
        let e = a7();
        for l in [1usize, 2, 3, 5, 10, 50, 100] {
            let t = e.terminated(l).unwrap();
            assert_eq!(t.delta, 2, "delta at L = {l}");
            let expected = Rate::new(7 * l as i64 - (6 * (l as i64 + 1) - 2), 7 * l as i64);
            assert_eq!(t.rate, expected, "rate at L = {l}");
        }
        // L -> infinity: R_L -> 1/7 (checked at a large L).
        let t = e.terminated(1_000_000).unwrap();
        let r = *t.rate.numer() as f64 / *t.rate.denom() as f64;
        assert!((r - 1.0 / 7.0).abs() < 1e-5);
    }

    #[test]
    fn a7_end_nodes_are_rate_one_third_shortened_codes() {
        let t = a7().terminated(10).unwrap();
        let ends: Vec<_> = t
            .protograph
            .constraints()
            .iter()
            .filter(|n| n.time == 0)
            .collect();
        assert_eq!(ends.len(), 2);
        for node in ends {
            assert_eq!(node.degree(), 3);
            assert_eq!(node.code.rank(), 2);
            assert_eq!(node.rank_deficit, 1);
            // Kept columns are {5,6,7} in 1-based terms for both rows.
            assert_eq!(node.original_columns, vec![4, 5, 6]);
        }
    }

    #[test]
    fn tailbiting_preserves_degrees_and_rate() {
        let e = a7();
        for lam in [1usize, 2, 4, 8] {
            let tb = e.tailbiting(lam).unwrap();
            assert_eq!(tb.n_vars(), 7 * lam);
            assert_eq!(tb.n_constraints(), 2 * lam);
            assert_eq!(tb.design_rate().unwrap(), Rate::new(1, 7));
            for v in 0..tb.n_vars() {
                assert_eq!(tb.var_degree(v), 2);
            }
            for node in tb.constraints() {
                assert_eq!(node.degree(), 7);
                assert_eq!(node.rank_deficit, 0);
            }
        }
        assert!(matches!(
            Builtin::C7.ensemble().tailbiting(2),
            Err(Error::BadCouplingLength(_))
        ));
    }

    #[test]
    fn w1_lambda1_tailbiting_recovers_the_block_base() {
        let tb = a7().tailbiting(1).unwrap();
        assert_eq!(tb.n_vars(), 7);
        assert_eq!(tb.n_constraints(), 2);
        // Row 0 sees variables 0..3 (deferred) then 4..6; row 1 sees
        // 3..6 then 0..2. Both orderings cover all seven columns.
        assert_eq!(tb.constraints()[0].vars, vec![0, 1, 2, 3, 4, 5, 6]);
        assert_eq!(tb.constraints()[1].vars, vec![3, 4, 5, 6, 0, 1, 2]);
    }

    #[test]
    fn type_census_of_the_block_protograph() {
        let block = a7().tailbiting(1).unwrap();
        let census = block.type_census();
        assert_eq!(census.edge_count, 14);
        assert_eq!(census.constraint_types.len(), 2);
        for t in &census.constraint_types {
            assert_eq!(t.iter().filter(|&&b| b).count(), 7);
        }
        assert_eq!(census.variable_types.len(), 7);
        for t in &census.variable_types {
            assert_eq!(t.iter().filter(|&&b| b).count(), 2);
        }
        assert_eq!(census.extended_count, 256);
        // Each edge belongs to exactly one variable and one constraint type.
        for e in 0..census.edge_count {
            assert_eq!(
                census.variable_types.iter().filter(|t| t[e]).count(),
                1
            );
            assert_eq!(
                census.constraint_types.iter().filter(|t| t[e]).count(),
                1
            );
        }
    }

    #[test]
    fn b14_structure() {
        let e = Builtin::B14.ensemble();
        assert_eq!(e.coupling.b_c(), 1);
        assert_eq!(e.coupling.b_v(), 7);
        assert_eq!(e.codes[0].len(), 14);
        assert_eq!(e.codes[0].rank(), 4);
        let block = e.block().unwrap();
        // Double edges: each variable appears twice on the single node.
        assert_eq!(block.constraints()[0].degree(), 14);
        for v in 0..7 {
            assert_eq!(block.var_degree(v), 2);
        }
    }

    #[test]
    fn c7_time_zero_nodes_are_heavily_shortened() {
        let t = Builtin::C7.ensemble().terminated(20).unwrap();
        // The paper notes the braided ensembles have a larger Δ than the
        // w = 1 chains.
        let a7_delta = a7().terminated(20).unwrap().delta;
        assert!(t.delta > a7_delta, "C7 delta {} vs A7 delta {}", t.delta, a7_delta);
    }

    #[test]
    fn a15_shape() {
        let e = Builtin::A15.ensemble();
        assert_eq!(e.coupling.b_v(), 15);
        assert_eq!(e.codes[0], hamming_parity(4).unwrap().into());
        assert_eq!(e.unterminated_rate().unwrap(), Rate::new(7, 15));
        let t = e.terminated(10).unwrap();
        assert_eq!(t.protograph.n_vars(), 150);
    }

    #[test]
    fn unknown_builtin_name_errors() {
        assert!(matches!(
            "Z9".parse::<Builtin>(),
            Err(Error::UnknownBuiltin(_))
        ));
    }
}
