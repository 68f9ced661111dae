//! NUCA specifications: a constant linear background rule plus perturbed cells.

use super::lattice::{symmetrize, Point};
use super::rule::LocalRule;
use crate::algebra::{Fp, Mat, SymbolMatrix};
use crate::error::{NucaError, Result};
use std::collections::BTreeMap;

/// Largest memory set accepted after normalization or composition.
pub const MEMORY_CAP: usize = 4096;

/// Where copies of a cluster type sit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Placement {
    /// Finitely many anchors.
    Explicit(Vec<Point>),
    /// `g_n = offset + (Σ_i c_i n^i)·direction`, `n ≥ 0`; degree ≥ 2.
    Polynomial { offset: Point, direction: Point, coeffs: Vec<i64> },
    /// `g_n = offset + scale·base^n·direction`, `n ≥ 0`; `base ≥ 2`.
    Exponential { offset: Point, direction: Point, scale: i64, base: i64 },
    /// Infinitely many copies whose gaps grow without bound; positions unknown.
    Promise,
}

impl Placement {
    pub fn is_finite(&self) -> bool {
        matches!(self, Placement::Explicit(_))
    }

    fn validate(&self, d: usize) -> Result<()> {
        let bad = |m: &str| Err(NucaError::InvalidSpec(format!("placement: {m}")));
        match self {
            Placement::Explicit(pts) => {
                if pts.iter().any(|p| p.dim() != d) {
                    return bad("anchor dimension mismatch");
                }
                let mut s = pts.clone();
                s.sort();
                s.dedup();
                if s.len() != pts.len() {
                    return bad("duplicate anchors");
                }
            }
            Placement::Polynomial { offset, direction, coeffs } => {
                if offset.dim() != d || direction.dim() != d || direction.is_origin() {
                    return bad("offset/direction must be d-dimensional, direction nonzero");
                }
                let deg = coeffs.iter().rposition(|&c| c != 0);
                match deg {
                    Some(dg) if dg >= 2 && coeffs[dg] > 0 => {}
                    Some(dg) if dg >= 2 => return bad("leading coefficient must be positive"),
                    _ => return bad("affine or constant generators are not sparse (degree >= 2 required)"),
                }
            }
            Placement::Exponential { offset, direction, scale, base } => {
                if offset.dim() != d || direction.dim() != d || direction.is_origin() {
                    return bad("offset/direction must be d-dimensional, direction nonzero");
                }
                if *base < 2 || *scale == 0 {
                    return bad("exponential generator needs base >= 2 and nonzero scale");
                }
            }
            Placement::Promise => {}
        }
        Ok(())
    }

    /// Scalar multiplier of `direction` for the `n`-th copy.
    fn generator_scalar(&self, n: u64) -> Option<i64> {
        match self {
            Placement::Polynomial { coeffs, .. } => {
                let n = i64::try_from(n).ok()?;
                coeffs
                    .iter()
                    .rev()
                    .try_fold(0i64, |acc, &c| acc.checked_mul(n)?.checked_add(c))
            }
            Placement::Exponential { scale, base, .. } => {
                let e = u32::try_from(n).ok()?;
                base.checked_pow(e)?.checked_mul(*scale)
            }
            _ => None,
        }
    }

    /// Index after which generator magnitudes grow strictly.
    pub(crate) fn monotone_from(&self) -> u64 {
        match self {
            Placement::Polynomial { coeffs, .. } => {
                let dg = coeffs.iter().rposition(|&c| c != 0).unwrap_or(0);
                let lead = coeffs[dg] as f64;
                let bound = coeffs[..dg].iter().map(|&c| (c as f64 / lead).abs()).fold(0.0, f64::max);
                (bound.ceil() as u64 + 2) * 2
            }
            _ => 0,
        }
    }

    /// The `n`-th anchor for generated placements, `None` on overflow.
    pub fn generated_anchor(&self, n: u64) -> Option<Point> {
        let s = self.generator_scalar(n)?;
        let (offset, direction) = match self {
            Placement::Polynomial { offset, direction, .. }
            | Placement::Exponential { offset, direction, .. } => (offset, direction),
            _ => return None,
        };
        let mut v = Vec::with_capacity(offset.dim());
        for (o, dcomp) in offset.0.iter().zip(&direction.0) {
            v.push(o.checked_add(s.checked_mul(*dcomp)?)?);
        }
        Some(Point(v))
    }

    /// Anchors whose `∞`-norm is at most `radius` (exhaustive for generators).
    pub fn anchors_within(&self, radius: i64) -> Vec<Point> {
        match self {
            Placement::Explicit(pts) => pts.iter().filter(|p| p.norm_inf() <= radius).cloned().collect(),
            Placement::Promise => vec![],
            _ => {
                let start = self.monotone_from();
                let mut out = vec![];
                let mut n = 0u64;
                loop {
                    let Some(a) = self.generated_anchor(n) else { break };
                    let mag = self.generator_scalar(n).unwrap().unsigned_abs();
                    if a.norm_inf() <= radius {
                        out.push(a);
                    }
                    let offset_norm = match self {
                        Placement::Polynomial { offset, .. } | Placement::Exponential { offset, .. } => {
                            offset.norm_inf().unsigned_abs()
                        }
                        _ => 0,
                    };
                    if n >= start && mag > radius.unsigned_abs() + offset_norm {
                        break;
                    }
                    n += 1;
                }
                out
            }
        }
    }

    pub fn shifted(&self, g: &Point) -> Placement {
        match self {
            Placement::Explicit(pts) => Placement::Explicit(pts.iter().map(|p| p + g).collect()),
            Placement::Polynomial { offset, direction, coeffs } => Placement::Polynomial {
                offset: offset + g,
                direction: direction.clone(),
                coeffs: coeffs.clone(),
            },
            Placement::Exponential { offset, direction, scale, base } => Placement::Exponential {
                offset: offset + g,
                direction: direction.clone(),
                scale: *scale,
                base: *base,
            },
            Placement::Promise => Placement::Promise,
        }
    }
}

/// A cluster pattern: rules at offsets relative to the cluster anchor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterType {
    pub cells: BTreeMap<Point, LocalRule>,
    pub placement: Placement,
}

impl ClusterType {
    pub fn cell_offsets(&self) -> Vec<Point> {
        self.cells.keys().cloned().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseSpec {
    pub clusters: Vec<ClusterType>,
}

/// A linear NUCA over `Z^d` with alphabet `GF(p)^k` that agrees with a
/// constant linear rule outside a finite set `E` of perturbed cells (plus,
/// in sparse mode, infinitely many well-separated cluster copies).
///
/// Invariants after construction: the shared memory `M` is sorted, contains
/// the origin and satisfies `M = −M`; every rule is padded to `M`; no
/// perturbation equals the base rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NucaSpec {
    field: Fp,
    k: usize,
    d: usize,
    memory: Vec<Point>,
    base: LocalRule,
    perturbations: BTreeMap<Point, LocalRule>,
    sparse: Option<SparseSpec>,
}

impl NucaSpec {
    /// Validates and normalizes.
    pub fn new(
        field: Fp,
        k: usize,
        d: usize,
        memory: Vec<Point>,
        base: LocalRule,
        perturbations: Vec<(Point, LocalRule)>,
        sparse: Option<SparseSpec>,
    ) -> Result<Self> {
        if k == 0 || d == 0 {
            return Err(NucaError::InvalidSpec("k and d must be positive".into()));
        }
        if !base.is_linear() {
            return Err(NucaError::InvalidSpec("base rule must be linear".into()));
        }
        let mut all_rules: Vec<&LocalRule> = vec![&base];
        all_rules.extend(perturbations.iter().map(|(_, r)| r));
        if let Some(sp) = &sparse {
            for c in &sp.clusters {
                all_rules.extend(c.cells.values());
            }
        }
        let mut raw_mem = memory;
        for r in &all_rules {
            if r.field() != field || r.k() != k {
                return Err(NucaError::InvalidSpec("rule field or k differs from spec".into()));
            }
            raw_mem.extend(r.memory().iter().cloned());
        }
        if raw_mem.iter().any(|m| m.dim() != d) {
            return Err(NucaError::InvalidSpec("memory offset dimension differs from d".into()));
        }
        let memory = symmetrize(&raw_mem, d);
        if memory.len() > MEMORY_CAP {
            return Err(NucaError::MemoryCap { size: memory.len(), cap: MEMORY_CAP });
        }
        let base = base.pad_to(&memory)?;
        let mut pert = BTreeMap::new();
        let mut seen = std::collections::BTreeSet::new();
        for (cell, rule) in perturbations {
            if cell.dim() != d {
                return Err(NucaError::InvalidSpec(format!("cell {cell} has wrong dimension")));
            }
            if !seen.insert(cell.clone()) {
                return Err(NucaError::InvalidSpec(format!("duplicate perturbation at {cell}")));
            }
            let rule = Self::normalize_rule(rule, &memory, &cell)?;
            if !rule.equivalent(&base) {
                pert.insert(cell, rule);
            }
        }
        let sparse = match sparse {
            None => None,
            Some(sp) => {
                let mut clusters = vec![];
                for c in sp.clusters {
                    c.placement.validate(d)?;
                    let mut cells = BTreeMap::new();
                    for (off, rule) in c.cells {
                        if off.dim() != d {
                            return Err(NucaError::InvalidSpec("cluster offset dimension".into()));
                        }
                        let rule = Self::normalize_rule(rule, &memory, &off)?;
                        if !rule.equivalent(&base) {
                            cells.insert(off, rule);
                        }
                    }
                    if !cells.is_empty() {
                        clusters.push(ClusterType { cells, placement: c.placement });
                    }
                }
                Some(SparseSpec { clusters })
            }
        };
        Ok(NucaSpec { field, k, d, memory, base, perturbations: pert, sparse })
    }

    fn normalize_rule(rule: LocalRule, memory: &[Point], cell: &Point) -> Result<LocalRule> {
        let rule = rule.pad_to(memory)?;
        if !rule.is_zero_quiescent() {
            return Err(NucaError::NotQuiescent(cell.to_string()));
        }
        // a table that is secretly linear is stored as linear
        Ok(rule.to_linear_if_possible().unwrap_or(rule))
    }

    /// Constant linear CA given by per-offset coefficient matrices.
    pub fn linear_ca(field: Fp, k: usize, d: usize, coeffs: Vec<(Point, Mat)>) -> Result<Self> {
        let (mem, mats): (Vec<Point>, Vec<Mat>) = coeffs.into_iter().unzip();
        let base = LocalRule::linear(field, k, mem, mats)?;
        Self::new(field, k, d, vec![], base, vec![], None)
    }

    pub fn identity(field: Fp, k: usize, d: usize) -> Self {
        Self::linear_ca(field, k, d, vec![(Point::origin(d), Mat::identity(field, k))]).unwrap()
    }

    /// Constant CA from a symbol matrix.
    pub fn from_symbol(symbol: &SymbolMatrix) -> Result<Self> {
        let d = symbol.dims();
        let support: Vec<Point> = symbol.support().into_iter().map(Point).collect();
        let memory = symmetrize(&support, d);
        let base = LocalRule::from_symbol(symbol, memory.clone())?;
        Self::new(symbol.field(), symbol.k(), d, memory, base, vec![], None)
    }

    /// Shrinks the memory to the symmetrized set of offsets actually read.
    pub fn compact(&self) -> Result<Self> {
        let mut read: Vec<Point> = self.base.read_offsets();
        for r in self.perturbations.values() {
            read.extend(r.read_offsets());
        }
        if let Some(sp) = &self.sparse {
            for c in &sp.clusters {
                for r in c.cells.values() {
                    read.extend(r.read_offsets());
                }
            }
        }
        let memory = symmetrize(&read, self.d);
        if memory == self.memory {
            return Ok(self.clone());
        }
        let shrink = |r: &LocalRule| r.restrict_memory(&memory);
        let mut out = self.clone();
        out.base = shrink(&self.base)?;
        for r in out.perturbations.values_mut() {
            *r = shrink(r)?;
        }
        if let Some(sp) = &mut out.sparse {
            for c in &mut sp.clusters {
                for r in c.cells.values_mut() {
                    *r = shrink(r)?;
                }
            }
        }
        out.memory = memory;
        Ok(out)
    }

    /// The same NUCA as a finite-perturbation spec, when every cluster has an
    /// explicit placement.
    pub fn finite_equivalent(&self) -> Result<Option<NucaSpec>> {
        let Some(sp) = &self.sparse else {
            return Ok(Some(self.clone()));
        };
        let mut cells: BTreeMap<Point, LocalRule> = self.perturbations.clone();
        for c in &sp.clusters {
            let Placement::Explicit(anchors) = &c.placement else {
                return Ok(None);
            };
            for a in anchors {
                for (o, r) in &c.cells {
                    let g = a + o;
                    if cells.insert(g.clone(), r.clone()).is_some() {
                        return Err(NucaError::Disjointness(format!("two rules placed at {g}")));
                    }
                }
            }
        }
        Ok(Some(self.with_sparse(None)?.with_perturbations(cells.into_iter().collect())?))
    }

    /// Same spec with extra perturbations (later ones replace earlier cells).
    pub fn with_perturbations(&self, extra: Vec<(Point, LocalRule)>) -> Result<Self> {
        let mut map: BTreeMap<Point, LocalRule> = self.perturbations.clone();
        for (c, r) in extra {
            map.insert(c, r);
        }
        Self::new(
            self.field,
            self.k,
            self.d,
            self.memory.clone(),
            self.base.clone(),
            map.into_iter().collect(),
            self.sparse.clone(),
        )
    }

    pub fn with_sparse(&self, sparse: Option<SparseSpec>) -> Result<Self> {
        Self::new(
            self.field,
            self.k,
            self.d,
            self.memory.clone(),
            self.base.clone(),
            self.perturbations.clone().into_iter().collect(),
            sparse,
        )
    }

    pub fn field(&self) -> Fp {
        self.field
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn memory(&self) -> &[Point] {
        &self.memory
    }
    pub fn base(&self) -> &LocalRule {
        &self.base
    }
    pub fn perturbations(&self) -> &BTreeMap<Point, LocalRule> {
        &self.perturbations
    }
    pub fn sparse(&self) -> Option<&SparseSpec> {
        self.sparse.as_ref()
    }
    pub fn is_sparse(&self) -> bool {
        self.sparse.is_some()
    }

    /// The finite perturbation set `E`.
    pub fn support(&self) -> Vec<Point> {
        self.perturbations.keys().cloned().collect()
    }

    pub fn is_linear(&self) -> bool {
        self.perturbations.values().all(LocalRule::is_linear)
            && self
                .sparse
                .iter()
                .flat_map(|s| &s.clusters)
                .all(|c| c.cells.values().all(LocalRule::is_linear))
    }

    pub fn base_symbol(&self) -> SymbolMatrix {
        self.base.symbol(self.d).expect("base is linear")
    }

    /// Largest `∞`-norm of a memory offset.
    pub fn radius(&self) -> i64 {
        self.memory.iter().map(Point::norm_inf).max().unwrap_or(0)
    }

    /// The rule applied at `g`.
    pub fn local_rule_at(&self, g: &Point) -> Result<&LocalRule> {
        if let Some(r) = self.perturbations.get(g) {
            return Ok(r);
        }
        let Some(sp) = &self.sparse else {
            return Ok(&self.base);
        };
        let mut unresolved = false;
        for c in &sp.clusters {
            if matches!(c.placement, Placement::Promise) {
                unresolved = true;
                continue;
            }
            let reach = c.cells.keys().map(Point::norm_inf).max().unwrap_or(0);
            for a in c.placement.anchors_within(g.norm_inf() + reach) {
                if let Some(r) = c.cells.get(&(g - &a)) {
                    return Ok(r);
                }
            }
        }
        if unresolved {
            return Err(NucaError::PlacementUnresolved(g.to_string()));
        }
        Ok(&self.base)
    }

    /// `(g·s)(h) = s(h − g)`.
    pub fn shift(&self, g: &Point) -> NucaSpec {
        let mut out = self.clone();
        out.perturbations = self.perturbations.iter().map(|(c, r)| (c + g, r.clone())).collect();
        if let Some(sp) = &mut out.sparse {
            for c in &mut sp.clusters {
                c.placement = c.placement.shifted(g);
            }
        }
        out
    }

    /// Same global map (non-sparse specs), independent of memory padding.
    pub fn equivalent(&self, other: &NucaSpec) -> bool {
        if (self.field, self.k, self.d) != (other.field, other.k, other.d)
            || self.sparse.is_some()
            || other.sparse.is_some()
        {
            return false;
        }
        if !self.base.equivalent(&other.base) {
            return false;
        }
        let cells: std::collections::BTreeSet<&Point> =
            self.perturbations.keys().chain(other.perturbations.keys()).collect();
        cells.into_iter().all(|c| {
            let a = self.perturbations.get(c).unwrap_or(&self.base);
            let b = other.perturbations.get(c).unwrap_or(&other.base);
            a.equivalent(b)
        })
    }
}

/// Spec shift, `(g·s)(h) = s(h − g)`.
pub fn shift_spec(spec: &NucaSpec, g: &Point) -> NucaSpec {
    spec.shift(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    #[test]
    fn memory_is_symmetrized_and_padded() {
        let f = gf(2);
        let s = NucaSpec::linear_ca(f, 1, 1, vec![(Point::new([1]), Mat::identity(f, 1))]).unwrap();
        assert_eq!(s.memory(), &[Point::new([-1]), Point::new([0]), Point::new([1])]);
        assert_eq!(s.base().matrix_at(&Point::new([-1])).unwrap(), Mat::zeros(f, 1, 1));
    }

    #[test]
    fn base_equal_perturbation_dropped() {
        let f = gf(3);
        let id = NucaSpec::identity(f, 1, 1);
        let s = id
            .with_perturbations(vec![(Point::new([0]), id.base().clone())])
            .unwrap();
        assert!(s.support().is_empty());
    }

    #[test]
    fn nonprime_rejected() {
        assert_eq!(Fp::new(4), Err(NucaError::NonPrime(4)));
    }

    #[test]
    fn local_rule_lookup_and_shift() {
        let f = gf(2);
        let id = NucaSpec::identity(f, 1, 1);
        let z = LocalRule::zero(f, 1, vec![Point::new([0])]);
        let s = id.with_perturbations(vec![(Point::new([0]), z)]).unwrap();
        assert!(s.local_rule_at(&Point::new([0])).unwrap().is_zero_map());
        assert_eq!(s.local_rule_at(&Point::new([4])).unwrap(), s.base());
        for h in -3..=3 {
            let t = s.shift(&Point::new([h]));
            for g in -4..=4 {
                assert_eq!(
                    t.local_rule_at(&Point::new([h + g])).unwrap(),
                    s.local_rule_at(&Point::new([g])).unwrap()
                );
            }
        }
    }

    #[test]
    fn non_quiescent_table_rejected() {
        let f = gf(2);
        let id = NucaSpec::identity(f, 1, 1);
        let t = LocalRule::table(f, 1, vec![Point::new([0])], vec![1, 1]).unwrap();
        assert!(matches!(
            id.with_perturbations(vec![(Point::new([0]), t)]),
            Err(NucaError::NotQuiescent(_))
        ));
    }

    #[test]
    fn placements() {
        let affine = Placement::Polynomial {
            offset: Point::new([0]),
            direction: Point::new([1]),
            coeffs: vec![0, 5],
        };
        assert!(affine.validate(1).is_err());
        let quad = Placement::Polynomial {
            offset: Point::new([0]),
            direction: Point::new([1]),
            coeffs: vec![0, 0, 10],
        };
        assert!(quad.validate(1).is_ok());
        assert_eq!(
            quad.anchors_within(100),
            vec![Point::new([0]), Point::new([10]), Point::new([40]), Point::new([90])]
        );
        let exp = Placement::Exponential {
            offset: Point::new([0]),
            direction: Point::new([-1]),
            scale: 3,
            base: 2,
        };
        assert_eq!(exp.anchors_within(13).len(), 3);
    }

    #[test]
    fn promise_placement_is_unresolved() {
        let f = gf(2);
        let id = NucaSpec::identity(f, 1, 1);
        let z = LocalRule::zero(f, 1, vec![Point::new([0])]);
        let cluster = ClusterType {
            cells: [(Point::new([0]), z)].into_iter().collect(),
            placement: Placement::Promise,
        };
        let s = id.with_sparse(Some(SparseSpec { clusters: vec![cluster] })).unwrap();
        assert!(matches!(
            s.local_rule_at(&Point::new([7])),
            Err(NucaError::PlacementUnresolved(_))
        ));
    }
}
