//! Sparse d-variate Laurent polynomials over GF(p) and square matrices of
//! them ("symbol matrices"), the algebraic form of a constant linear CA.
//!
//! A linear CA `x ↦ (g ↦ Σ_m A_m x(g+m))` has symbol `Σ_m A_m X^m`;
//! composition of CA is the matrix product of symbols.

use super::field::Fp;
use super::mat::Mat;
use std::collections::BTreeMap;
use std::fmt;

pub type Exponent = Vec<i64>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    field: Fp,
    dims: usize,
    terms: BTreeMap<Exponent, u32>,
}

impl LaurentPoly {
    pub fn zero(field: Fp, dims: usize) -> Self {
        LaurentPoly {
            field,
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: Fp, dims: usize, c: u32) -> Self {
        Self::monomial(field, c, vec![0; dims])
    }

    pub fn one(field: Fp, dims: usize) -> Self {
        Self::constant(field, dims, 1)
    }

    pub fn monomial(field: Fp, c: u32, exp: Exponent) -> Self {
        let mut p = Self::zero(field, exp.len());
        let c = c % field.modulus();
        if c != 0 {
            p.terms.insert(exp, c);
        }
        p
    }

    /// Builds from `(exponent, coefficient)` pairs, reducing and merging.
    pub fn from_terms(field: Fp, dims: usize, terms: impl IntoIterator<Item = (Exponent, i64)>) -> Self {
        let mut p = Self::zero(field, dims);
        for (e, c) in terms {
            assert_eq!(e.len(), dims);
            p.add_term(e, field.reduce(c));
        }
        p
    }

    fn add_term(&mut self, e: Exponent, c: u32) {
        if c == 0 {
            return;
        }
        let f = self.field;
        let sum = f.add(self.terms.get(&e).copied().unwrap_or(0), c);
        if sum == 0 {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, sum);
        }
    }

    pub fn field(&self) -> Fp {
        self.field
    }
    pub fn dims(&self) -> usize {
        self.dims
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, u32)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the zero polynomial and for nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_term(&self) -> u32 {
        self.terms.get(&vec![0; self.dims]).copied().unwrap_or(0)
    }

    pub fn coeff(&self, e: &[i64]) -> u32 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    pub fn add(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut r = self.clone();
        for (e, &c) in &o.terms {
            r.add_term(e.clone(), c);
        }
        r
    }

    pub fn neg(&self) -> LaurentPoly {
        let f = self.field;
        LaurentPoly {
            field: f,
            dims: self.dims,
            terms: self.terms.iter().map(|(e, &c)| (e.clone(), f.neg(c))).collect(),
        }
    }

    pub fn sub(&self, o: &LaurentPoly) -> LaurentPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: u32) -> LaurentPoly {
        let f = self.field;
        let mut r = Self::zero(f, self.dims);
        for (e, &c) in &self.terms {
            r.add_term(e.clone(), f.mul(c, s));
        }
        r
    }

    pub fn mul(&self, o: &LaurentPoly) -> LaurentPoly {
        let f = self.field;
        let mut acc: BTreeMap<Exponent, u32> = BTreeMap::new();
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &o.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let slot = acc.entry(e).or_insert(0);
                *slot = f.add(*slot, f.mul(c1, c2));
            }
        }
        acc.retain(|_, c| *c != 0);
        LaurentPoly {
            field: f,
            dims: self.dims,
            terms: acc,
        }
    }

    pub fn pow(&self, mut e: u64) -> LaurentPoly {
        let mut base = self.clone();
        let mut r = Self::one(self.field, self.dims);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        r
    }

    /// Units of the Laurent ring are exactly the monomials `c·X^a`.
    pub fn unit_parts(&self) -> Option<(u32, Exponent)> {
        if self.terms.len() == 1 {
            let (e, &c) = self.terms.iter().next().unwrap();
            Some((c, e.clone()))
        } else {
            None
        }
    }

    /// Multiplicative inverse when `self` is a unit.
    pub fn unit_inverse(&self) -> Option<LaurentPoly> {
        let (c, a) = self.unit_parts()?;
        let inv = self.field.inv(c)?;
        Some(Self::monomial(self.field, inv, a.iter().map(|x| -x).collect()))
    }
}

/// Returns `(c, a)` when `f = c·X^a` is a unit of the Laurent ring.
pub fn laurent_is_unit(f: &LaurentPoly) -> Option<(u32, Exponent)> {
    f.unit_parts()
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let vars = ["x", "y", "z", "w"];
        let mut first = true;
        for (e, &c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| {
                    let v = vars.get(i).copied().unwrap_or("t");
                    if x == 1 {
                        v.to_string()
                    } else {
                        format!("{v}^{x}")
                    }
                })
                .collect();
            match (c, mono.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{}", mono.join("*"))?,
                _ => write!(f, "{c}*{}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}

/// Square k×k matrix of Laurent polynomials sharing `p` and `d`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymbolMatrix {
    field: Fp,
    dims: usize,
    k: usize,
    entries: Vec<LaurentPoly>,
}

impl SymbolMatrix {
    pub fn zero(field: Fp, dims: usize, k: usize) -> Self {
        SymbolMatrix {
            field,
            dims,
            k,
            entries: vec![LaurentPoly::zero(field, dims); k * k],
        }
    }

    pub fn identity(field: Fp, dims: usize, k: usize) -> Self {
        let mut m = Self::zero(field, dims, k);
        for i in 0..k {
            m.set(i, i, LaurentPoly::one(field, dims));
        }
        m
    }

    pub fn from_entries(field: Fp, dims: usize, k: usize, entries: Vec<LaurentPoly>) -> Self {
        assert_eq!(entries.len(), k * k);
        assert!(entries.iter().all(|e| e.dims == dims && e.field == field));
        SymbolMatrix {
            field,
            dims,
            k,
            entries,
        }
    }

    /// `Σ_m A_m X^m` from per-offset coefficient matrices.
    pub fn from_coefficients<'a>(
        field: Fp,
        dims: usize,
        k: usize,
        coeffs: impl IntoIterator<Item = (&'a [i64], &'a Mat)>,
    ) -> Self {
        let mut m = Self::zero(field, dims, k);
        for (off, a) in coeffs {
            for i in 0..k {
                for j in 0..k {
                    let c = a.get(i, j);
                    if c != 0 {
                        let idx = i * k + j;
                        m.entries[idx].add_term(off.to_vec(), c);
                    }
                }
            }
        }
        m
    }

    /// Inverse of [`Self::from_coefficients`]: offset → k×k matrix, nonzero only.
    pub fn coefficients(&self) -> BTreeMap<Exponent, Mat> {
        let mut out: BTreeMap<Exponent, Mat> = BTreeMap::new();
        for i in 0..self.k {
            for j in 0..self.k {
                for (e, c) in self.get(i, j).terms() {
                    out.entry(e.clone())
                        .or_insert_with(|| Mat::zeros(self.field, self.k, self.k))
                        .set(i, j, c);
                }
            }
        }
        out
    }

    pub fn field(&self) -> Fp {
        self.field
    }
    pub fn dims(&self) -> usize {
        self.dims
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.k + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: LaurentPoly) {
        self.entries[i * self.k + j] = v;
    }
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_zero)
    }
    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.field, self.dims, self.k)
    }

    /// Exponents carrying a nonzero coefficient somewhere in the matrix.
    pub fn support(&self) -> Vec<Exponent> {
        let mut s: Vec<Exponent> = self
            .entries
            .iter()
            .flat_map(|e| e.terms().map(|(x, _)| x.clone()))
            .collect();
        s.sort();
        s.dedup();
        s
    }

    pub fn add(&self, o: &SymbolMatrix) -> SymbolMatrix {
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a.add(b)).collect();
        Self::from_entries(self.field, self.dims, self.k, entries)
    }

    pub fn scale(&self, s: &LaurentPoly) -> SymbolMatrix {
        let entries = self.entries.iter().map(|a| a.mul(s)).collect();
        Self::from_entries(self.field, self.dims, self.k, entries)
    }

    pub fn mul(&self, o: &SymbolMatrix) -> SymbolMatrix {
        assert_eq!(self.k, o.k);
        let k = self.k;
        let mut r = Self::zero(self.field, self.dims, k);
        for i in 0..k {
            for j in 0..k {
                let mut acc = LaurentPoly::zero(self.field, self.dims);
                for l in 0..k {
                    let a = self.get(i, l);
                    let b = o.get(l, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                r.set(i, j, acc);
            }
        }
        r
    }

    pub fn pow(&self, mut e: u64) -> SymbolMatrix {
        let mut base = self.clone();
        let mut r = Self::identity(self.field, self.dims, self.k);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        r
    }

    /// Characteristic polynomial `det(zI − m)` by Berkowitz's division-free
    /// algorithm.
    pub fn char_poly(&self) -> CharPoly {
        let f = self.field;
        let d = self.dims;
        let k = self.k;
        if k == 0 {
            return CharPoly { coeffs: vec![] };
        }
        let zero = LaurentPoly::zero(f, d);
        // vect[i] = coefficient of z^{r+1-i} for the leading (r+1)x(r+1) block.
        let mut vect = vec![LaurentPoly::one(f, d), self.get(0, 0).neg()];
        for r in 1..k {
            // column C = A[0..r][r], row R = A[r][0..r], block S = A[0..r][0..r]
            let mut col: Vec<LaurentPoly> = (0..r).map(|i| self.get(i, r).clone()).collect();
            let mut t = vec![LaurentPoly::one(f, d), self.get(r, r).neg()];
            for step in 0..r {
                let rc = (0..r).fold(zero.clone(), |acc, j| acc.add(&self.get(r, j).mul(&col[j])));
                t.push(rc.neg());
                if step + 1 < r {
                    col = (0..r)
                        .map(|i| (0..r).fold(zero.clone(), |acc, j| acc.add(&self.get(i, j).mul(&col[j]))))
                        .collect();
                }
            }
            // Toeplitz (r+2)x(r+1) times vect
            let mut next = vec![zero.clone(); r + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                for (j, v) in vect.iter().enumerate() {
                    if i >= j && !v.is_zero() && !t[i - j].is_zero() {
                        *slot = slot.add(&t[i - j].mul(v));
                    }
                }
            }
            vect = next;
        }
        // vect[i] multiplies z^{k-i}; coeffs[j] multiplies z^j.
        let coeffs = (0..k).map(|j| vect[k - j].clone()).collect();
        CharPoly { coeffs }
    }

    pub fn det(&self) -> LaurentPoly {
        let cp = self.char_poly();
        if self.k == 0 {
            return LaurentPoly::one(self.field, self.dims);
        }
        let c0 = cp.coeffs[0].clone();
        if self.k % 2 == 1 {
            c0.neg()
        } else {
            c0
        }
    }

    /// Adjugate via Cayley–Hamilton:
    /// `adj(m) = (−1)^{k+1} (m^{k−1} + c_{k−1} m^{k−2} + … + c_1 I)`.
    pub fn adjugate(&self) -> SymbolMatrix {
        let k = self.k;
        let f = self.field;
        let d = self.dims;
        if k == 0 {
            return self.clone();
        }
        let cp = self.char_poly();
        let mut h = Self::zero(f, d, k);
        let mut power = Self::identity(f, d, k);
        for j in 1..=k {
            // term for m^{j-1} has coefficient c_j (c_k = 1)
            let coeff = if j == k {
                LaurentPoly::one(f, d)
            } else {
                cp.coeffs[j].clone()
            };
            h = h.add(&power.scale(&coeff));
            power = power.mul(self);
        }
        if k % 2 == 0 {
            h.scale(&LaurentPoly::constant(f, d, f.neg(1)))
        } else {
            h
        }
    }

    /// `m⁻¹ = adj(m)·det(m)⁻¹` when the determinant is a Laurent unit.
    pub fn inverse(&self) -> Option<SymbolMatrix> {
        let dinv = self.det().unit_inverse()?;
        Some(self.adjugate().scale(&dinv))
    }
}

/// Returns `m⁻¹` iff `det(m)` is a Laurent unit.
pub fn symbol_inverse(m: &SymbolMatrix) -> Option<SymbolMatrix> {
    m.inverse()
}

/// Monic characteristic polynomial `z^k + Σ_{i<k} c_i z^i` with Laurent coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharPoly {
    /// `c_0 … c_{k−1}`; the leading `z^k` coefficient is implicit.
    pub coeffs: Vec<LaurentPoly>,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// True iff the polynomial is `z^k`.
    pub fn is_pure_power(&self) -> bool {
        self.coeffs.iter().all(LaurentPoly::is_zero)
    }

    pub fn all_constant(&self) -> bool {
        self.coeffs.iter().all(LaurentPoly::is_constant)
    }

    /// Largest `j` with `z^j` dividing the polynomial.
    pub fn z_valuation(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.coeffs.len())
    }

    /// `P(m) = m^k + Σ c_i m^i`.
    pub fn evaluate(&self, m: &SymbolMatrix) -> SymbolMatrix {
        let k = self.degree();
        let mut acc = SymbolMatrix::zero(m.field(), m.dims(), m.k());
        let mut power = SymbolMatrix::identity(m.field(), m.dims(), m.k());
        for i in 0..=k {
            let term = if i == k {
                power.clone()
            } else {
                power.scale(&self.coeffs[i])
            };
            acc = acc.add(&term);
            if i < k {
                power = power.mul(m);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    fn lp(p: u64, terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(gf(p), 1, terms.iter().map(|&(e, c)| (vec![e], c)))
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let a = lp(2, &[(0, 1), (1, 1)]);
        let s = a.add(&a);
        assert!(s.is_zero());
        assert_eq!(s.num_terms(), 0);
        let sq = a.mul(&a);
        assert_eq!(sq, lp(2, &[(0, 1), (2, 1)]));
    }

    #[test]
    fn char_poly_examples() {
        let f = gf(2);
        let m = SymbolMatrix::from_entries(f, 1, 1, vec![lp(2, &[(1, 1), (-1, 1)])]);
        let cp = m.char_poly();
        assert_eq!(cp.coeffs, vec![lp(2, &[(1, 1), (-1, 1)])]);

        let strict = SymbolMatrix::from_entries(
            f,
            1,
            2,
            vec![lp(2, &[]), lp(2, &[(1, 1)]), lp(2, &[]), lp(2, &[])],
        );
        assert!(strict.char_poly().is_pure_power());

        // (z-1)(z-x) = z^2 + (1+x) z + x over GF(2)
        let diag = SymbolMatrix::from_entries(
            f,
            1,
            2,
            vec![lp(2, &[(0, 1)]), lp(2, &[]), lp(2, &[]), lp(2, &[(1, 1)])],
        );
        let cp = diag.char_poly();
        assert_eq!(cp.coeffs, vec![lp(2, &[(1, 1)]), lp(2, &[(0, 1), (1, 1)])]);
        assert!(cp.evaluate(&diag).is_zero());
    }

    #[test]
    fn unit_detection() {
        assert_eq!(laurent_is_unit(&lp(2, &[(1, 1)])), Some((1, vec![1])));
        assert_eq!(laurent_is_unit(&lp(2, &[(0, 1), (1, 1)])), None);
        assert_eq!(laurent_is_unit(&lp(3, &[(-1, 2)])), Some((2, vec![-1])));
        assert_eq!(laurent_is_unit(&lp(3, &[])), None);
    }

    #[test]
    fn inverse_examples() {
        let f2 = gf(2);
        let shift = SymbolMatrix::from_entries(f2, 1, 1, vec![lp(2, &[(1, 1)])]);
        assert_eq!(
            symbol_inverse(&shift).unwrap(),
            SymbolMatrix::from_entries(f2, 1, 1, vec![lp(2, &[(-1, 1)])])
        );
        let onepx = SymbolMatrix::from_entries(f2, 1, 1, vec![lp(2, &[(0, 1), (1, 1)])]);
        assert!(symbol_inverse(&onepx).is_none());

        let f3 = gf(3);
        let m = SymbolMatrix::from_entries(
            f3,
            1,
            2,
            vec![lp(3, &[(0, 1)]), lp(3, &[(1, 1)]), lp(3, &[]), lp(3, &[(0, 1)])],
        );
        let inv = symbol_inverse(&m).unwrap();
        let expected = SymbolMatrix::from_entries(
            f3,
            1,
            2,
            vec![lp(3, &[(0, 1)]), lp(3, &[(1, 2)]), lp(3, &[]), lp(3, &[(0, 1)])],
        );
        assert_eq!(inv, expected);
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
    }

    #[test]
    fn three_by_three_det_and_adjugate() {
        let f = gf(3);
        let e = |t: &[(i64, i64)]| lp(3, t);
        let m = SymbolMatrix::from_entries(
            f,
            1,
            3,
            vec![
                e(&[(0, 1), (1, 1)]),
                e(&[(0, 2)]),
                e(&[(-1, 1)]),
                e(&[]),
                e(&[(2, 1)]),
                e(&[(0, 1)]),
                e(&[(0, 1)]),
                e(&[(1, 2)]),
                e(&[(0, 2)]),
            ],
        );
        let adj = m.adjugate();
        let det = m.det();
        let id_det = SymbolMatrix::identity(f, 1, 3).scale(&det);
        assert_eq!(m.mul(&adj), id_det);
        assert_eq!(adj.mul(&m), id_det);
    }
}
