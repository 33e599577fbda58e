//! Binary linear algebra for constraint codes.
//!
//! Constraint codes are small (n ≤ 24) binary block codes given by a
//! parity-check matrix. Rows and erasure patterns are stored as `u32`
//! bitmasks, bit `j` = column `j`, so the full per-pattern analysis
//! tables are flat arrays indexed by pattern mask.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Hard cap on code length: analysis tables are 2^n entries.
pub const MAX_TABLE_LEN: usize = 24;
/// Hard cap on code dimension for codeword enumeration.
pub const MAX_ENUM_DIM: usize = 16;

/// GF(2) row rank of a bitmask-row matrix.
///
/// The input is not modified; elimination runs on a scratch copy.
pub fn gf2_rank(rows: &[u32]) -> usize {
    let mut scratch: Vec<u32> = rows.to_vec();
    let mut rank = 0;
    for row_idx in 0..scratch.len() {
        let row = scratch[row_idx];
        if row == 0 {
            continue;
        }
        let pivot = row.trailing_zeros();
        for other in scratch.iter_mut().skip(row_idx + 1) {
            if *other >> pivot & 1 == 1 {
                *other ^= row;
            }
        }
        rank += 1;
    }
    rank
}

/// Erasure pattern over the columns of a constraint code.
///
/// Set semantics over column indices `0..n`; stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ErasurePattern(pub u32);

impl ErasurePattern {
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut mask = 0u32;
        for i in indices {
            mask |= 1 << i;
        }
        ErasurePattern(mask)
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 >> index & 1 == 1
    }

    pub fn weight(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..32).filter(move |i| mask >> i & 1 == 1)
    }
}

/// Decoding policy for erasure-pattern tables.
///
/// `FullMl` marks a pattern decodable when the erased columns admit a
/// unique joint solution; `BitwiseMap` when every erased bit is
/// individually recoverable. On the BEC the two coincide pattern by
/// pattern, so the tables are identical; the enum is kept so callers
/// can state which criterion they mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Policy {
    #[default]
    FullMl,
    BitwiseMap,
}

/// A binary linear block code given by its parity-check matrix.
///
/// `rank` is the GF(2) row rank of the matrix and always positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintCode {
    rows: Vec<u32>,
    n: usize,
    rank: usize,
}

impl ConstraintCode {
    /// Builds a code from parity rows (bit `j` = column `j`).
    pub fn new(rows: Vec<u32>, n: usize) -> Result<Self> {
        if rows.is_empty() || n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if n > 32 {
            return Err(Error::CodeTooLarge { n, limit: 32 });
        }
        let col_mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        if rows.iter().any(|&r| r & !col_mask != 0) {
            return Err(Error::IndexOutOfRange { index: n, len: n });
        }
        let rank = gf2_rank(&rows);
        if rank == 0 {
            return Err(Error::InvalidProtograph(
                "parity-check matrix has rank zero".into(),
            ));
        }
        Ok(ConstraintCode { rows, n, rank })
    }

    /// Parses rows given as strings of '0'/'1', leftmost char = column 0.
    pub fn from_bit_strings(rows: &[impl AsRef<str>]) -> Result<Self> {
        let mut parsed = Vec::with_capacity(rows.len());
        let mut n = 0;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if i == 0 {
                n = row.len();
            } else if row.len() != n {
                return Err(Error::SpecFile(format!(
                    "parity row {} has length {}, expected {}",
                    i,
                    row.len(),
                    n
                )));
            }
            let mut mask = 0u32;
            for (j, ch) in row.chars().enumerate() {
                match ch {
                    '1' => mask |= 1 << j,
                    '0' => {}
                    other => {
                        return Err(Error::SpecFile(format!(
                            "parity row {i}: invalid character {other:?} at column {j}"
                        )))
                    }
                }
            }
            parsed.push(mask);
        }
        ConstraintCode::new(parsed, n)
    }

    /// Single parity check of length `n`.
    pub fn single_parity_check(n: usize) -> Result<Self> {
        if n == 0 || n > 32 {
            return Err(Error::CodeTooLarge { n, limit: 32 });
        }
        let mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        ConstraintCode::new(vec![mask], n)
    }

    /// Codeword length n^c.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of linearly independent parity checks m^c.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Code dimension k = n − m.
    pub fn dimension(&self) -> usize {
        self.n - self.rank
    }

    /// Parity rows as bitmasks.
    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    /// Parity rows as '0'/'1' strings (for the ensemble-spec format).
    pub fn bit_strings(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|&r| (0..self.n).map(|j| if r >> j & 1 == 1 { '1' } else { '0' }).collect())
            .collect()
    }

    /// Column `j` of the parity matrix as a bitmask over rows.
    fn column(&self, j: usize) -> u32 {
        let mut v = 0u32;
        for (i, &row) in self.rows.iter().enumerate() {
            if row >> j & 1 == 1 {
                v |= 1 << i;
            }
        }
        v
    }

    /// GF(2) rank of the submatrix on the columns of `pattern`.
    fn column_rank(&self, pattern: u32) -> usize {
        // Eliminate on column vectors (each at most `rows.len()` bits).
        let mut basis: Vec<u32> = Vec::with_capacity(pattern.count_ones() as usize);
        let mut rank = 0;
        let mut bits = pattern;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let mut v = self.column(j);
            for &b in &basis {
                let pivot = b.trailing_zeros();
                if v >> pivot & 1 == 1 {
                    v ^= b;
                }
            }
            if v != 0 {
                basis.push(v);
                rank += 1;
            }
        }
        rank
    }

    /// True iff the erased columns admit a unique joint solution, i.e.
    /// the submatrix on the erased columns has full column rank.
    pub fn erasure_fully_decodable(&self, pattern: ErasurePattern) -> Result<bool> {
        self.check_pattern(pattern)?;
        let w = pattern.weight();
        if w > self.rank {
            return Ok(false);
        }
        Ok(self.column_rank(pattern.0) == w)
    }

    /// Exact bit-MAP erasure criterion: the erased `target` bit is
    /// determined by the non-erased positions iff every kernel vector of
    /// the erased-column submatrix vanishes at `target`, which holds iff
    /// removing the target column drops the rank by one.
    pub fn extrinsic_bit_recoverable(
        &self,
        erased: ErasurePattern,
        target: usize,
    ) -> Result<bool> {
        self.check_pattern(erased)?;
        if !erased.contains(target) {
            return Err(Error::TargetNotErased(target));
        }
        let with = self.column_rank(erased.0);
        let without = self.column_rank(erased.0 & !(1 << target));
        Ok(without == with - 1)
    }

    fn check_pattern(&self, pattern: ErasurePattern) -> Result<()> {
        let col_mask = if self.n == 32 { u32::MAX } else { (1u32 << self.n) - 1 };
        if pattern.0 & !col_mask != 0 {
            return Err(Error::IndexOutOfRange {
                index: 31 - pattern.0.leading_zeros() as usize,
                len: self.n,
            });
        }
        Ok(())
    }

    /// Restriction of the code to `kept` columns (shortening).
    ///
    /// Returns the shortened code and the rank deficit
    /// `original rank − shortened rank`, which feeds the Δ accounting of
    /// terminated ensembles.
    pub fn shorten(&self, kept: &[usize]) -> Result<(ConstraintCode, usize)> {
        if kept.is_empty() {
            return Err(Error::EmptyKeptSet);
        }
        for &j in kept {
            if j >= self.n {
                return Err(Error::IndexOutOfRange { index: j, len: self.n });
            }
        }
        let rows: Vec<u32> = self
            .rows
            .iter()
            .map(|&row| {
                let mut out = 0u32;
                for (new_j, &old_j) in kept.iter().enumerate() {
                    if row >> old_j & 1 == 1 {
                        out |= 1 << new_j;
                    }
                }
                out
            })
            .collect();
        let code = ConstraintCode::new(rows, kept.len())?;
        let deficit = self.rank - code.rank;
        Ok((code, deficit))
    }

    /// Reorders columns: new column `s` is old column `perm[s]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<ConstraintCode> {
        if perm.len() != self.n {
            return Err(Error::DegreeMismatch {
                expected: self.n,
                got: perm.len(),
            });
        }
        self.shorten(perm).map(|(code, _)| code)
    }

    /// All codewords as support bitmasks (the multivariate weight
    /// enumerator in implicit form). Requires dimension ≤ 16.
    pub fn codewords(&self) -> Result<Vec<u32>> {
        let k = self.dimension();
        if k > MAX_ENUM_DIM {
            return Err(Error::DimensionTooLarge { k, limit: MAX_ENUM_DIM });
        }
        let basis = self.kernel_basis();
        debug_assert_eq!(basis.len(), k);
        let mut words = Vec::with_capacity(1 << k);
        for sel in 0u32..(1 << k) {
            let mut w = 0u32;
            let mut bits = sel;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                w ^= basis[i];
            }
            words.push(w);
        }
        Ok(words)
    }

    /// Hamming weight distribution `A_0..A_n` of the code.
    pub fn weight_distribution(&self) -> Result<Vec<usize>> {
        let mut dist = vec![0usize; self.n + 1];
        for w in self.codewords()? {
            dist[w.count_ones() as usize] += 1;
        }
        Ok(dist)
    }

    /// Basis of the null space of the parity matrix.
    fn kernel_basis(&self) -> Vec<u32> {
        // Row-reduce a scratch copy, tracking pivot columns.
        let mut rows: Vec<u32> = self.rows.iter().copied().filter(|&r| r != 0).collect();
        let mut pivots: Vec<usize> = Vec::new();
        let mut done = 0;
        for j in 0..self.n {
            let Some(sel) = (done..rows.len()).find(|&i| rows[i] >> j & 1 == 1) else {
                continue;
            };
            rows.swap(done, sel);
            let pivot_row = rows[done];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != done && *row >> j & 1 == 1 {
                    *row ^= pivot_row;
                }
            }
            pivots.push(j);
            done += 1;
            if done == rows.len() {
                break;
            }
        }
        let mut basis = Vec::new();
        for free in (0..self.n).filter(|j| !pivots.contains(j)) {
            let mut v = 1u32 << free;
            for (r, &pj) in pivots.iter().enumerate() {
                if rows[r] >> free & 1 == 1 {
                    v |= 1 << pj;
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Materializes the full per-pattern analysis table.
    pub fn decodability_table(&self, policy: Policy) -> Result<DecodabilityTable> {
        if self.n > MAX_TABLE_LEN {
            return Err(Error::CodeTooLarge { n: self.n, limit: MAX_TABLE_LEN });
        }
        let size = 1usize << self.n;
        let mut rank = vec![0u8; size];
        for mask in 1..size {
            rank[mask] = self.column_rank(mask as u32) as u8;
        }
        let mut recoverable = vec![0u32; size];
        for mask in 1..size {
            let r = rank[mask];
            let mut bits = mask as u32;
            let mut rec = 0u32;
            while bits != 0 {
                let t = bits.trailing_zeros();
                bits &= bits - 1;
                if rank[mask & !(1usize << t)] == r - 1 {
                    rec |= 1 << t;
                }
            }
            recoverable[mask] = rec;
        }
        let full = match policy {
            Policy::FullMl => (0..size)
                .map(|m| rank[m] as u32 == (m as u32).count_ones())
                .collect(),
            Policy::BitwiseMap => (0..size)
                .map(|m| recoverable[m] == m as u32)
                .collect(),
        };
        Ok(DecodabilityTable {
            n: self.n,
            policy,
            rank,
            recoverable,
            full,
        })
    }
}

/// Flat per-pattern tables for one constraint code: submatrix rank,
/// recoverable-bit sets, and full decodability, indexed by pattern mask.
#[derive(Debug, Clone)]
pub struct DecodabilityTable {
    n: usize,
    policy: Policy,
    rank: Vec<u8>,
    recoverable: Vec<u32>,
    full: Vec<bool>,
}

impl DecodabilityTable {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    /// True iff the whole pattern is decodable (empty pattern included).
    #[inline]
    pub fn fully_decodable(&self, pattern: u32) -> bool {
        self.full[pattern as usize]
    }

    /// Recoverable erased positions under `pattern`.
    #[inline]
    pub fn recoverable_bits(&self, pattern: u32) -> u32 {
        self.recoverable[pattern as usize]
    }

    /// Submatrix rank on the pattern columns.
    #[inline]
    pub fn pattern_rank(&self, pattern: u32) -> u8 {
        self.rank[pattern as usize]
    }

    /// True iff the pattern is non-empty and fully decodable: the
    /// condition for a constraint node to be removable by peeling.
    #[inline]
    pub fn peelable(&self, pattern: u32) -> bool {
        pattern != 0 && self.full[pattern as usize]
    }

    /// Number of non-empty decodable patterns.
    pub fn decodable_count(&self) -> usize {
        (1..self.full.len()).filter(|&m| self.full[m]).count()
    }
}

/// The (7,4) Hamming parity-check matrix used by the built-in
/// ensembles: identity columns first, then the remaining columns in
/// decreasing numeric value (rows read MSB-first).
pub fn hamming_parity(r: usize) -> Result<ConstraintCode> {
    if !(2..=5).contains(&r) {
        return Err(Error::InvalidConfig(format!(
            "hamming parameter r = {r} outside 2..=5"
        )));
    }
    let n = (1usize << r) - 1;
    let mut cols: Vec<u32> = (0..r as u32).rev().map(|i| 1 << i).collect();
    let mut rest: Vec<u32> = (1..=n as u32).filter(|v| v.count_ones() > 1).collect();
    rest.sort_unstable_by(|a, b| b.cmp(a));
    cols.extend(rest);
    let rows: Vec<u32> = (0..r)
        .map(|i| {
            let mut row = 0u32;
            for (j, &c) in cols.iter().enumerate() {
                if c >> (r - 1 - i) & 1 == 1 {
                    row |= 1 << j;
                }
            }
            row
        })
        .collect();
    ConstraintCode::new(rows, n)
}
