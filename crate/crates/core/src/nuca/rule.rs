//! Local defining maps `V^M → V`.

use super::lattice::Point;
use crate::algebra::{Fp, Mat, SymbolMatrix};
use crate::error::{NucaError, Result};

/// Largest number of input patterns a table rule may enumerate.
pub const TABLE_CAP: u128 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleKind {
    /// One `k×k` matrix per memory offset, aligned with `memory`.
    Linear(Vec<Mat>),
    /// Outputs for every input pattern: entry `i` holds the `k` output
    /// components for the pattern with index `i` (see [`pattern_index`]).
    Table(Vec<u32>),
}

/// A local rule reading the sites `g + m` for `m` in `memory` (sorted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalRule {
    field: Fp,
    k: usize,
    memory: Vec<Point>,
    kind: RuleKind,
}

/// Index of a flattened input pattern: first site, first component is the
/// most significant base-`p` digit.
pub fn pattern_index(p: u32, input: &[u32]) -> usize {
    input.iter().fold(0usize, |acc, &v| acc * p as usize + v as usize)
}

/// Inverse of [`pattern_index`] for patterns of length `len`.
pub fn pattern_from_index(p: u32, len: usize, mut idx: usize) -> Vec<u32> {
    let mut v = vec![0u32; len];
    for slot in v.iter_mut().rev() {
        *slot = (idx % p as usize) as u32;
        idx /= p as usize;
    }
    v
}

pub fn table_size(p: u32, len: usize) -> u128 {
    (p as u128).checked_pow(len as u32).unwrap_or(u128::MAX)
}

impl LocalRule {
    pub fn linear(field: Fp, k: usize, memory: Vec<Point>, mats: Vec<Mat>) -> Result<Self> {
        if memory.len() != mats.len() {
            return Err(NucaError::InvalidSpec("one matrix per memory offset required".into()));
        }
        if mats.iter().any(|m| m.rows() != k || m.cols() != k || m.field() != field) {
            return Err(NucaError::InvalidSpec(format!("coefficient matrices must be {k}x{k}")));
        }
        Self::checked(field, k, memory, RuleKind::Linear(mats))
    }

    pub fn table(field: Fp, k: usize, memory: Vec<Point>, outputs: Vec<u32>) -> Result<Self> {
        let size = table_size(field.modulus(), k * memory.len());
        if size > TABLE_CAP {
            return Err(NucaError::TableTooLarge { size, cap: TABLE_CAP });
        }
        if outputs.len() as u128 != size * k as u128 {
            return Err(NucaError::InvalidSpec(format!(
                "table rule must list {size} outputs of length {k}"
            )));
        }
        if outputs.iter().any(|&v| v >= field.modulus()) {
            return Err(NucaError::InvalidSpec("table outputs must be reduced".into()));
        }
        Self::checked(field, k, memory, RuleKind::Table(outputs))
    }

    fn checked(field: Fp, k: usize, memory: Vec<Point>, kind: RuleKind) -> Result<Self> {
        let mut sorted = memory.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != memory.len() {
            return Err(NucaError::InvalidSpec("memory points must be distinct".into()));
        }
        let rule = LocalRule { field, k, memory, kind };
        // canonical: memory sorted
        Ok(rule.pad_to(&sorted).expect("same memory"))
    }

    pub fn zero(field: Fp, k: usize, memory: Vec<Point>) -> Self {
        let mats = vec![Mat::zeros(field, k, k); memory.len()];
        LocalRule { field, k, memory, kind: RuleKind::Linear(mats) }
    }

    /// The rule `x ↦ x(0)`; `memory` must contain the origin.
    pub fn projection(field: Fp, k: usize, memory: Vec<Point>) -> Self {
        let mats = memory
            .iter()
            .map(|m| if m.is_origin() { Mat::identity(field, k) } else { Mat::zeros(field, k, k) })
            .collect();
        LocalRule { field, k, memory, kind: RuleKind::Linear(mats) }
    }

    /// Linear rule with the given symbol, over `memory` (must cover the support).
    pub fn from_symbol(symbol: &SymbolMatrix, memory: Vec<Point>) -> Result<Self> {
        let field = symbol.field();
        let k = symbol.k();
        let coeffs = symbol.coefficients();
        for off in coeffs.keys() {
            if !memory.iter().any(|m| &m.0 == off) {
                return Err(NucaError::InvalidSpec(format!(
                    "symbol offset {:?} outside memory",
                    off
                )));
            }
        }
        let mats = memory
            .iter()
            .map(|m| coeffs.get(&m.0).cloned().unwrap_or_else(|| Mat::zeros(field, k, k)))
            .collect();
        Ok(LocalRule { field, k, memory, kind: RuleKind::Linear(mats) })
    }

    pub fn field(&self) -> Fp {
        self.field
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn memory(&self) -> &[Point] {
        &self.memory
    }
    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }
    pub fn is_linear(&self) -> bool {
        matches!(self.kind, RuleKind::Linear(_))
    }

    /// Coefficient matrix at `offset` (zero if outside memory); linear only.
    pub fn matrix_at(&self, offset: &Point) -> Option<Mat> {
        let RuleKind::Linear(mats) = &self.kind else {
            return None;
        };
        Some(match self.memory.iter().position(|m| m == offset).ok_or(()) {
            Ok(i) => mats[i].clone(),
            Err(_) => Mat::zeros(self.field, self.k, self.k),
        })
    }

    /// Offsets whose coefficient is nonzero (linear) or every memory offset (table).
    pub fn effective_offsets(&self) -> Vec<Point> {
        match &self.kind {
            RuleKind::Linear(mats) => self
                .memory
                .iter()
                .zip(mats)
                .filter(|(_, m)| !m.is_zero())
                .map(|(o, _)| o.clone())
                .collect(),
            RuleKind::Table(_) => self.memory.clone(),
        }
    }

    pub fn symbol(&self, d: usize) -> Option<SymbolMatrix> {
        let RuleKind::Linear(mats) = &self.kind else {
            return None;
        };
        let pairs: Vec<(&[i64], &Mat)> =
            self.memory.iter().map(|m| m.0.as_slice()).zip(mats.iter()).collect();
        Some(SymbolMatrix::from_coefficients(self.field, d, self.k, pairs))
    }

    /// Evaluates on a flattened input over `memory` (`k` values per site).
    pub fn evaluate(&self, input: &[u32]) -> Vec<u32> {
        debug_assert_eq!(input.len(), self.k * self.memory.len());
        match &self.kind {
            RuleKind::Linear(mats) => {
                let f = self.field;
                let mut out = vec![0u32; self.k];
                for (j, m) in mats.iter().enumerate() {
                    let x = &input[j * self.k..(j + 1) * self.k];
                    if x.iter().all(|&v| v == 0) {
                        continue;
                    }
                    for (o, y) in out.iter_mut().zip(m.mul_vec(x)) {
                        *o = f.add(*o, y);
                    }
                }
                out
            }
            RuleKind::Table(t) => {
                let i = pattern_index(self.field.modulus(), input);
                t[i * self.k..(i + 1) * self.k].to_vec()
            }
        }
    }

    /// `k × k|M|` block `[A_{m_1} … A_{m_r}]`; linear only.
    pub fn row_block(&self) -> Option<Mat> {
        let RuleKind::Linear(mats) = &self.kind else {
            return None;
        };
        let k = self.k;
        let mut b = Mat::zeros(self.field, k, k * mats.len());
        for (j, m) in mats.iter().enumerate() {
            for r in 0..k {
                for c in 0..k {
                    b.set(r, j * k + c, m.get(r, c));
                }
            }
        }
        Some(b)
    }

    pub fn is_zero_quiescent(&self) -> bool {
        match &self.kind {
            RuleKind::Linear(_) => true,
            RuleKind::Table(t) => t[..self.k].iter().all(|&v| v == 0),
        }
    }

    /// Same map re-expressed over a memory superset (sorted).
    pub fn pad_to(&self, memory: &[Point]) -> Result<LocalRule> {
        if !self.memory.iter().all(|m| memory.binary_search(m).is_ok()) {
            return Err(NucaError::InvalidSpec("padding target must contain the rule memory".into()));
        }
        let k = self.k;
        let kind = match &self.kind {
            RuleKind::Linear(_) => RuleKind::Linear(
                memory.iter().map(|m| self.matrix_at(m).unwrap()).collect(),
            ),
            RuleKind::Table(_) => {
                let p = self.field.modulus();
                let size = table_size(p, k * memory.len());
                if size > TABLE_CAP {
                    return Err(NucaError::TableTooLarge { size, cap: TABLE_CAP });
                }
                let pos: Vec<usize> = self
                    .memory
                    .iter()
                    .map(|m| memory.binary_search(m).unwrap())
                    .collect();
                let mut out = Vec::with_capacity(size as usize * k);
                let mut sub = vec![0u32; k * self.memory.len()];
                for idx in 0..size as usize {
                    let full = pattern_from_index(p, k * memory.len(), idx);
                    for (j, &pj) in pos.iter().enumerate() {
                        sub[j * k..(j + 1) * k].copy_from_slice(&full[pj * k..(pj + 1) * k]);
                    }
                    out.extend(self.evaluate(&sub));
                }
                RuleKind::Table(out)
            }
        };
        Ok(LocalRule { field: self.field, k, memory: memory.to_vec(), kind })
    }

    /// Table form of this rule over its own memory.
    pub fn to_table(&self) -> Result<LocalRule> {
        if !self.is_linear() {
            return Ok(self.clone());
        }
        let p = self.field.modulus();
        let len = self.k * self.memory.len();
        let size = table_size(p, len);
        if size > TABLE_CAP {
            return Err(NucaError::TableTooLarge { size, cap: TABLE_CAP });
        }
        let mut out = Vec::with_capacity(size as usize * self.k);
        for idx in 0..size as usize {
            out.extend(self.evaluate(&pattern_from_index(p, len, idx)));
        }
        Ok(LocalRule { field: self.field, k: self.k, memory: self.memory.clone(), kind: RuleKind::Table(out) })
    }

    /// Linear form of a table rule that happens to be linear.
    pub fn to_linear_if_possible(&self) -> Option<LocalRule> {
        if self.is_linear() {
            return Some(self.clone());
        }
        let f = self.field;
        let k = self.k;
        let len = k * self.memory.len();
        // read off columns from unit inputs, then verify on every input
        let mut mats = vec![Mat::zeros(f, k, k); self.memory.len()];
        for j in 0..self.memory.len() {
            for c in 0..k {
                let mut e = vec![0u32; len];
                e[j * k + c] = 1;
                for (r, v) in self.evaluate(&e).into_iter().enumerate() {
                    mats[j].set(r, c, v);
                }
            }
        }
        let cand = LocalRule { field: f, k, memory: self.memory.clone(), kind: RuleKind::Linear(mats) };
        let p = f.modulus();
        let size = table_size(p, len) as usize;
        (0..size)
            .all(|i| {
                let x = pattern_from_index(p, len, i);
                cand.evaluate(&x) == self.evaluate(&x)
            })
            .then_some(cand)
    }

    /// Same local map, regardless of memory padding or representation.
    pub fn equivalent(&self, other: &LocalRule) -> bool {
        let mut union: Vec<Point> = self.memory.iter().chain(&other.memory).cloned().collect();
        union.sort();
        union.dedup();
        let (Ok(a), Ok(b)) = (self.pad_to(&union), other.pad_to(&union)) else {
            return false;
        };
        match (&a.kind, &b.kind) {
            (RuleKind::Linear(x), RuleKind::Linear(y)) => x == y,
            _ => match (a.to_table(), b.to_table()) {
                (Ok(x), Ok(y)) => x.kind == y.kind,
                _ => false,
            },
        }
    }

    /// Offsets the rule actually depends on.
    pub fn read_offsets(&self) -> Vec<Point> {
        let RuleKind::Table(t) = &self.kind else {
            return self.effective_offsets();
        };
        let (p, k) = (self.field.modulus() as usize, self.k);
        let len = k * self.memory.len();
        let size = t.len() / k;
        let mut out = vec![];
        for (j, m) in self.memory.iter().enumerate() {
            // does changing site j's components ever change the output?
            let reads = (0..size).any(|idx| {
                (0..k).any(|c| {
                    let pos = len - 1 - (j * k + c);
                    let stride = p.pow(pos as u32);
                    let digit = (idx / stride) % p;
                    digit == 0
                        && (1..p).any(|v| t[idx * k..(idx + 1) * k] != t[(idx + v * stride) * k..(idx + v * stride + 1) * k])
                })
            });
            if reads {
                out.push(m.clone());
            }
        }
        out
    }

    /// Same map over a memory that still covers [`read_offsets`](Self::read_offsets).
    pub fn restrict_memory(&self, memory: &[Point]) -> Result<LocalRule> {
        if !self.read_offsets().iter().all(|m| memory.binary_search(m).is_ok()) {
            return Err(NucaError::InvalidSpec("restriction drops a read offset".into()));
        }
        let kind = match &self.kind {
            RuleKind::Linear(_) => RuleKind::Linear(memory.iter().map(|m| self.matrix_at(m).unwrap()).collect()),
            RuleKind::Table(_) => {
                let (p, k) = (self.field.modulus(), self.k);
                let size = table_size(p, k * memory.len());
                if size > TABLE_CAP {
                    return Err(NucaError::TableTooLarge { size, cap: TABLE_CAP });
                }
                let pos: Vec<Option<usize>> = self.memory.iter().map(|m| memory.binary_search(m).ok()).collect();
                let mut out = Vec::with_capacity(size as usize * k);
                let mut full = vec![0u32; k * self.memory.len()];
                for idx in 0..size as usize {
                    let sub = pattern_from_index(p, k * memory.len(), idx);
                    for (j, pj) in pos.iter().enumerate() {
                        match pj {
                            Some(pj) => full[j * k..(j + 1) * k].copy_from_slice(&sub[pj * k..(pj + 1) * k]),
                            None => full[j * k..(j + 1) * k].fill(0),
                        }
                    }
                    out.extend(self.evaluate(&full));
                }
                RuleKind::Table(out)
            }
        };
        Ok(LocalRule { field: self.field, k: self.k, memory: memory.to_vec(), kind })
    }

    pub fn is_zero_map(&self) -> bool {
        self.equivalent(&LocalRule::zero(self.field, self.k, vec![]))
    }

    /// Rebuilds a linear rule by mapping each `(offset, matrix)` pair.
    pub fn map_matrices(&self, mut f: impl FnMut(&Point, &Mat) -> (Point, Mat)) -> Option<LocalRule> {
        let RuleKind::Linear(mats) = &self.kind else {
            return None;
        };
        let mut pairs: Vec<(Point, Mat)> = self.memory.iter().zip(mats).map(|(o, m)| f(o, m)).collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let (memory, mats) = pairs.into_iter().unzip();
        Some(LocalRule { field: self.field, k: self.k, memory, kind: RuleKind::Linear(mats) })
    }
}
