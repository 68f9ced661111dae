//! Dense matrices over GF(p) and canonical subspaces.

use super::bitmat::BitMatrix;
use super::field::Fp;
use crate::error::{NucaError, Result};
use std::fmt;

/// Row-major dense matrix over GF(p).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    field: Fp,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat[p={}]{:?}", self.field.modulus(), self.to_rows())
    }
}

impl Mat {
    pub fn zeros(field: Fp, rows: usize, cols: usize) -> Self {
        Mat {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Fp, n: usize) -> Self {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.modulus();
        }
        m
    }

    /// Builds from integer rows, reducing mod p. Rows must share a length.
    pub fn from_rows(field: Fp, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(NucaError::Dimension("ragged matrix rows".into()));
        }
        let data = rows.iter().flatten().map(|&v| field.reduce(v)).collect();
        Ok(Mat {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_data(field: Fp, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn field(&self) -> Fp {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Mat::identity(self.field, self.rows)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn add(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let f = self.field;
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| f.add(a, b)).collect();
        Mat::from_data(f, self.rows, self.cols, data)
    }

    pub fn scale(&self, s: u32) -> Mat {
        let f = self.field;
        let data = self.data.iter().map(|&a| f.mul(a, s)).collect();
        Mat::from_data(f, self.rows, self.cols, data)
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let f = self.field;
        let p = f.modulus() as u64;
        let mut acc = vec![0u64; self.rows * o.cols];
        for i in 0..self.rows {
            let out = &mut acc[i * o.cols..(i + 1) * o.cols];
            for l in 0..self.cols {
                let a = self.get(i, l) as u64;
                if a == 0 {
                    continue;
                }
                for (dst, &b) in out.iter_mut().zip(o.row(l)) {
                    *dst = (*dst + a * b as u64) % p;
                }
            }
        }
        Mat::from_data(f, self.rows, o.cols, acc.into_iter().map(|v| v as u32).collect())
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.field.modulus() as u64;
        (0..self.rows)
            .map(|r| {
                let s = self
                    .row(r)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p);
                s as u32
            })
            .collect()
    }

    pub fn pow(&self, mut e: u64) -> Mat {
        assert_eq!(self.rows, self.cols);
        let mut base = self.clone();
        let mut r = Mat::identity(self.field, self.rows);
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

    /// Columns `cols` of `self`, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> Mat {
        let mut m = Mat::zeros(self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Mat {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Mat::from_data(self.field, rows.len(), self.cols, data)
    }

    pub fn vstack(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&o.data);
        Mat::from_data(self.field, self.rows + o.rows, self.cols, data)
    }

    /// Reduced row echelon form and pivot columns, without the GF(2) fast path.
    pub fn rref_generic(&self) -> (Mat, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if piv != row {
                for c in 0..m.cols {
                    m.data.swap(piv * m.cols + c, row * m.cols + c);
                }
            }
            let inv = f.inv(m.get(row, col)).unwrap();
            for c in col..m.cols {
                let v = m.get(row, c);
                m.set(row, c, f.mul(v, inv));
            }
            for r in 0..m.rows {
                let factor = m.get(r, col);
                if r == row || factor == 0 {
                    continue;
                }
                for c in col..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn rref_gf2(&self) -> (Mat, Vec<usize>) {
        let mut b = BitMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) != 0 {
                    b.set(r, c, true);
                }
            }
        }
        let pivots = b.rref();
        let mut m = Mat::zeros(self.field, self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if b.get(r, c) {
                    m.set(r, c, 1);
                }
            }
        }
        (m, pivots)
    }

    /// Reduced row echelon form; bit-packed when `p == 2`.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        if self.field.modulus() == 2 {
            self.rref_gf2()
        } else {
            self.rref_generic()
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Right null space `{v : self * v = 0}`.
    pub fn kernel(&self) -> Subspace {
        let f = self.field;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(i, free));
            }
            basis.push(v);
        }
        Subspace::span(f, self.cols, basis)
    }

    /// Column space.
    pub fn image(&self) -> Subspace {
        Subspace::from_row_space(&self.transpose())
    }

    /// Some `x` with `self * x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Mat::zeros(self.field, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = red.get(i, self.cols);
        }
        Some(x)
    }
}

/// A subspace of GF(p)^n held by its canonical RREF basis.
///
/// Two subspaces are equal iff their bases are identical grids.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Mat,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: Fp, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Mat::zeros(field, 0, ambient),
            pivots: vec![],
        }
    }

    pub fn full(field: Fp, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Mat::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Row space of `m`.
    pub fn from_row_space(m: &Mat) -> Self {
        let (r, pivots) = m.rref();
        let basis = r.select_rows(&(0..pivots.len()).collect::<Vec<_>>());
        Subspace {
            ambient: m.cols(),
            basis,
            pivots,
        }
    }

    pub fn span(field: Fp, ambient: usize, vectors: Vec<Vec<u32>>) -> Self {
        let n = vectors.len();
        let data: Vec<u32> = vectors.into_iter().flatten().collect();
        Subspace::from_row_space(&Mat::from_data(field, n, ambient, data))
    }

    pub fn field(&self) -> Fp {
        self.basis.field()
    }
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }
    pub fn basis(&self) -> &Mat {
        &self.basis
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    pub fn basis_vectors(&self) -> Vec<Vec<u32>> {
        self.basis.to_rows()
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &[u32]) -> Result<Option<Vec<u32>>> {
        if v.len() != self.ambient {
            return Err(NucaError::Dimension(format!(
                "vector length {} vs ambient {}",
                v.len(),
                self.ambient
            )));
        }
        let f = self.field();
        let coords: Vec<u32> = self.pivots.iter().map(|&c| v[c]).collect();
        let mut rest = v.to_vec();
        for (i, &a) in coords.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (x, &b) in rest.iter_mut().zip(self.basis.row(i)) {
                *x = f.sub(*x, f.mul(a, b));
            }
        }
        Ok(rest.iter().all(|&x| x == 0).then_some(coords))
    }

    pub fn contains(&self, v: &[u32]) -> Result<bool> {
        Ok(self.coordinates(v)?.is_some())
    }

    pub fn contains_subspace(&self, o: &Subspace) -> bool {
        o.basis_vectors()
            .iter()
            .all(|v| self.contains(v).unwrap_or(false))
    }

    /// Image of the subspace under the projection onto coordinates `cols`.
    pub fn project(&self, cols: &[usize]) -> Subspace {
        Subspace::from_row_space(&self.basis.select_cols(cols))
    }

    pub fn intersect(&self, o: &Subspace) -> Subspace {
        assert_eq!(self.ambient, o.ambient);
        // v in both <=> v satisfies both annihilator systems.
        let a = self.annihilator();
        let b = o.annihilator();
        a.vstack(&b).kernel()
    }

    /// Matrix whose kernel is exactly this subspace.
    pub fn annihilator(&self) -> Mat {
        let k = self.basis.kernel();
        k.basis.clone()
    }

    /// All elements, for small subspaces (`p^dim` vectors).
    pub fn elements(&self) -> Vec<Vec<u32>> {
        let f = self.field();
        let p = f.modulus();
        let mut out = vec![vec![0u32; self.ambient]];
        for b in self.basis_vectors() {
            let mut next = Vec::with_capacity(out.len() * p as usize);
            for v in &out {
                for a in 0..p {
                    next.push(
                        v.iter()
                            .zip(&b)
                            .map(|(&x, &y)| f.add(x, f.mul(a, y)))
                            .collect(),
                    );
                }
            }
            out = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    fn brute_kernel(m: &Mat) -> Vec<Vec<u32>> {
        let p = m.field().modulus();
        let n = m.cols();
        let mut out = vec![];
        for idx in 0..(p as usize).pow(n as u32) {
            let mut v = vec![0u32; n];
            let mut t = idx;
            for x in v.iter_mut() {
                *x = (t % p as usize) as u32;
                t /= p as usize;
            }
            if m.mul_vec(&v).iter().all(|&x| x == 0) {
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn kernel_examples() {
        let f = gf(2);
        let z = Mat::from_rows(f, &[vec![0]]).unwrap();
        assert_eq!(z.kernel(), Subspace::full(f, 1));
        let one = Mat::from_rows(f, &[vec![1]]).unwrap();
        assert_eq!(one.kernel().dim(), 0);
        let m = Mat::from_rows(f, &[vec![1, 1]]).unwrap();
        let k = m.kernel();
        // enumeration: {00, 11}
        let brute = brute_kernel(&m);
        assert_eq!(brute, vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(k, Subspace::span(f, 2, vec![vec![1, 1]]));
        assert_eq!(k.dim(), 1);
        let empty = Mat::zeros(f, 0, 3);
        assert_eq!(empty.kernel(), Subspace::full(f, 3));
    }

    #[test]
    fn image_examples() {
        let f3 = gf(3);
        assert_eq!(Mat::identity(f3, 2).image(), Subspace::full(f3, 2));
        assert_eq!(Mat::zeros(f3, 2, 2).image().dim(), 0);
        let f = gf(2);
        let m = Mat::from_rows(f, &[vec![1, 1], vec![1, 1]]).unwrap();
        // images of the 4 inputs: 00, 11, 11, 00
        assert_eq!(m.image(), Subspace::span(f, 2, vec![vec![1, 1]]));
    }

    #[test]
    fn contains_examples() {
        let f = gf(2);
        assert!(Subspace::full(f, 2).contains(&[1, 0]).unwrap());
        assert!(!Subspace::zero(f, 2).contains(&[0, 1]).unwrap());
        let s = Subspace::span(f, 2, vec![vec![1, 1]]);
        assert!(!s.contains(&[1, 0]).unwrap());
        assert!(s.contains(&[1, 1]).unwrap());
        assert!(matches!(s.contains(&[1]), Err(NucaError::Dimension(_))));
    }

    #[test]
    fn kernel_matches_brute_force_gf3() {
        let f = gf(3);
        let m = Mat::from_rows(f, &[vec![1, 2, 0, 1], vec![2, 1, 0, 2]]).unwrap();
        let brute = brute_kernel(&m);
        let k = m.kernel();
        assert_eq!(brute.len(), 3usize.pow(k.dim() as u32));
        for v in brute {
            assert!(k.contains(&v).unwrap());
        }
    }

    #[test]
    fn solve_and_intersect() {
        let f = gf(3);
        let a = Mat::from_rows(f, &[vec![1, 1], vec![0, 2]]).unwrap();
        let x = a.solve(&[2, 1]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![2, 1]);
        let sing = Mat::from_rows(f, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert!(sing.solve(&[1, 0]).is_none());
        let s1 = Subspace::span(f, 3, vec![vec![1, 0, 0], vec![0, 1, 0]]);
        let s2 = Subspace::span(f, 3, vec![vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(s1.intersect(&s2), Subspace::span(f, 3, vec![vec![0, 1, 0]]));
    }

    #[test]
    fn gf2_fast_path_matches_generic() {
        let f = gf(2);
        let mut state = 0x1234_5678_u64;
        let mut data = vec![];
        for _ in 0..(37 * 90) {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            data.push((state & 1) as u32);
        }
        let m = Mat::from_data(f, 37, 90, data);
        assert_eq!(m.rref(), m.rref_generic());
    }
}
