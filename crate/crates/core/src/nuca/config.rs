//! Finitely supported configurations over a zero background.

use super::lattice::Point;
use crate::algebra::{Fp, Scalar};
use std::collections::BTreeMap;

/// A configuration `x ∈ V^{Z^d}` that is zero outside a finite support.
/// Only nonzero cell values are stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PatternConfig {
    field: Fp,
    k: usize,
    d: usize,
    cells: BTreeMap<Point, Vec<u32>>,
}

impl PatternConfig {
    pub fn zero(field: Fp, k: usize, d: usize) -> Self {
        PatternConfig { field, k, d, cells: BTreeMap::new() }
    }

    /// `value · δ_at`.
    pub fn delta(field: Fp, k: usize, at: Point, value: Vec<u32>) -> Self {
        let mut c = Self::zero(field, k, at.dim());
        c.set(at, value);
        c
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

    pub fn get(&self, at: &Point) -> Option<&[u32]> {
        self.cells.get(at).map(Vec::as_slice)
    }

    /// Value at `at`, zero vector when outside the support.
    pub fn value(&self, at: &Point) -> Vec<u32> {
        self.cells.get(at).cloned().unwrap_or_else(|| vec![0; self.k])
    }

    pub fn set(&mut self, at: Point, value: Vec<u32>) {
        assert_eq!(value.len(), self.k, "cell value length must equal k");
        assert_eq!(at.dim(), self.d, "cell dimension mismatch");
        let p = self.field.modulus();
        let value: Vec<u32> = value.into_iter().map(|v| v % p).collect();
        if value.iter().all(|&v| v == 0) {
            self.cells.remove(&at);
        } else {
            self.cells.insert(at, value);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = &Point> {
        self.cells.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, &[u32])> {
        self.cells.iter().map(|(p, v)| (p, v.as_slice()))
    }

    pub fn is_zero(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.cells.len()
    }

    /// Translate: `(g·x)(h) = x(h − g)`.
    pub fn shift(&self, g: &Point) -> PatternConfig {
        PatternConfig {
            field: self.field,
            k: self.k,
            d: self.d,
            cells: self.cells.iter().map(|(p, v)| (p + g, v.clone())).collect(),
        }
    }

    pub fn add(&self, o: &PatternConfig) -> PatternConfig {
        let mut r = self.clone();
        let f = self.field;
        for (p, v) in &o.cells {
            let cur = r.value(p);
            r.set(p.clone(), cur.iter().zip(v).map(|(&a, &b)| f.add(a, b)).collect());
        }
        r
    }

    pub fn scale(&self, s: u32) -> PatternConfig {
        let f = self.field;
        let mut r = Self::zero(f, self.k, self.d);
        for (p, v) in &self.cells {
            r.set(p.clone(), v.iter().map(|&a| f.mul(a, s)).collect());
        }
        r
    }

    /// Flattened values over `sites` (`k` per site, site order preserved).
    pub fn restrict(&self, sites: &[Point]) -> Vec<u32> {
        let mut out = Vec::with_capacity(sites.len() * self.k);
        for s in sites {
            match self.cells.get(s) {
                Some(v) => out.extend_from_slice(v),
                None => out.extend(std::iter::repeat_n(0, self.k)),
            }
        }
        out
    }

    /// Configuration supported on `sites` with the given flattened values.
    pub fn from_window(field: Fp, k: usize, d: usize, sites: &[Point], values: &[u32]) -> Self {
        assert_eq!(values.len(), sites.len() * k);
        let mut c = Self::zero(field, k, d);
        for (i, s) in sites.iter().enumerate() {
            c.set(s.clone(), values[i * k..(i + 1) * k].to_vec());
        }
        c
    }
}

/// `⟨x, y⟩ = Σ_g x(g)·y(g)` over the common support.
pub fn pairing(x: &PatternConfig, y: &PatternConfig) -> Scalar {
    let f = x.field;
    assert_eq!((x.field, x.k, x.d), (y.field, y.k, y.d), "pairing operands must share p, k, d");
    let (small, big) = if x.cells.len() <= y.cells.len() { (x, y) } else { (y, x) };
    let mut acc = 0u32;
    for (p, a) in &small.cells {
        if let Some(b) = big.cells.get(p) {
            for (&u, &v) in a.iter().zip(b) {
                acc = f.add(acc, f.mul(u, v));
            }
        }
    }
    Scalar { value: acc, field: f }
}
