//! Bit-packed dense matrices over GF(2).
//!
//! Rows are stored as contiguous `u64` words so that row elimination is a
//! word-wise XOR. Used by [`super::mat::Mat::rref`] whenever `p == 2`.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.data.split_at_mut(hi * w);
        head[lo * w..lo * w + w].swap_with_slice(&mut tail[..w]);
    }

    /// `row[dst] ^= row[src]`, starting at word `from_word`.
    fn xor_row(&mut self, dst: usize, src: usize, from_word: usize) {
        let w = self.words;
        let (d, s) = if dst < src {
            let (head, tail) = self.data.split_at_mut(src * w);
            (&mut head[dst * w..dst * w + w], &tail[..w])
        } else {
            let (head, tail) = self.data.split_at_mut(dst * w);
            (&mut tail[..w], &head[src * w..src * w + w])
        };
        for (x, y) in d[from_word..].iter_mut().zip(&s[from_word..]) {
            *x ^= *y;
        }
    }

    /// Reduces to RREF in place and returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(piv) = (row..self.rows).find(|&r| self.get(r, col)) else {
                continue;
            };
            self.swap_rows(row, piv);
            let fw = col / 64;
            for r in 0..self.rows {
                if r != row && self.get(r, col) {
                    self.xor_row(r, row, fw);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rref() {
        // [[1,1,0],[1,1,1],[0,0,1]] -> rank 2, pivots 0 and 2
        let mut m = BitMatrix::zeros(3, 3);
        for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 2)] {
            m.set(r, c, true);
        }
        let piv = m.rref();
        assert_eq!(piv, vec![0, 2]);
        assert!(m.get(0, 1));
        assert!(!m.get(0, 2));
        assert!(!m.get(2, 2));
    }

    #[test]
    fn wide_rows_cross_word_boundary() {
        let mut m = BitMatrix::zeros(2, 130);
        m.set(0, 129, true);
        m.set(1, 129, true);
        m.set(1, 70, true);
        let piv = m.rref();
        assert_eq!(piv, vec![70, 129]);
        assert!(!m.get(0, 129));
    }
}
