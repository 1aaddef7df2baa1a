//! Dense matrices over GF(2), one word-packed bit vector per row.

use std::fmt;

use crate::bits;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = bits::words_for(cols);
        BinaryMatrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from rows of 0/1 values. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Ok(Self::from_fn(rows.len(), cols, |i, j| rows[i][j] & 1 == 1))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        bits::get(self.row(i), j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        bits::set(self.row_mut(i), j, v)
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        bits::flip(self.row_mut(i), j)
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.words..(i + 1) * self.words]
    }

    /// Row `dst` += row `src`.
    #[inline]
    pub fn add_row(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let w = self.words;
        for k in 0..w {
            let s = self.data[src * w + k];
            self.data[dst * w + k] ^= s;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for k in 0..self.words {
                self.data.swap(a * self.words + k, b * self.words + k);
            }
        }
    }

    /// Column `dst` += column `src`.
    pub fn add_col(&mut self, dst: usize, src: usize) {
        for i in 0..self.rows {
            if self.get(i, src) {
                self.flip(i, dst);
            }
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, other: &BinaryMatrix) -> Result<BinaryMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                left: self.cols,
                right: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    bits::xor_into(out.row_mut(i), other.row(k));
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vec(&self, v: &[bool]) -> Result<Vec<bool>> {
        if v.len() != self.cols {
            return Err(Error::Dimension {
                left: self.cols,
                right: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).filter(|&j| v[j] && self.get(i, j)).count() % 2 == 1)
            .collect())
    }

    pub fn add(&self, other: &BinaryMatrix) -> Result<BinaryMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension {
                left: self.rows,
                right: other.rows,
            });
        }
        let mut out = self.clone();
        bits::xor_into(&mut out.data, &other.data);
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| {
            let r = self.row(i);
            let (w, m) = bits::locate(i);
            r.iter()
                .enumerate()
                .all(|(k, &word)| word == if k == w { m } else { 0 })
        })
    }

    pub fn is_zero(&self) -> bool {
        bits::is_zero(&self.data)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_unit_lower_triangular(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| self.get(i, i) && (i + 1..self.cols).all(|j| !self.get(i, j)))
    }

    /// Reduces to reduced row echelon form in place and returns the pivot
    /// column of each nonzero row, in order.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        self.row_reduce_tracking(None)
    }

    /// Row reduction that replays every row operation on `track` as well.
    /// `track` must have the same number of rows.
    pub(crate) fn row_reduce_tracking(&mut self, mut track: Option<&mut BinaryMatrix>) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&i| self.get(i, col)) else {
                continue;
            };
            self.swap_rows(p, next);
            if let Some(t) = track.as_deref_mut() {
                t.swap_rows(p, next);
            }
            for i in 0..self.rows {
                if i != next && self.get(i, col) {
                    self.add_row(i, next);
                    if let Some(t) = track.as_deref_mut() {
                        t.add_row(i, next);
                    }
                }
            }
            pivots.push(col);
            next += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().row_reduce().len()
    }

    pub fn inverse(&self) -> Result<BinaryMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension {
                left: self.rows,
                right: self.cols,
            });
        }
        let mut work = self.clone();
        let mut inv = Self::identity(self.rows);
        let pivots = work.row_reduce_tracking(Some(&mut inv));
        if pivots.len() != self.rows {
            return Err(Error::Singular);
        }
        Ok(inv)
    }

    /// Solves `self · x = b` for one solution `x`, or `None` if inconsistent.
    pub fn solve(&self, b: &[bool]) -> Result<Option<Vec<bool>>> {
        if b.len() != self.rows {
            return Err(Error::Dimension {
                left: self.rows,
                right: b.len(),
            });
        }
        let mut work = self.clone();
        let mut rhs = Self::from_fn(self.rows, 1, |i, _| b[i]);
        let pivots = work.row_reduce_tracking(Some(&mut rhs));
        if (pivots.len()..self.rows).any(|i| rhs.get(i, 0)) {
            return Ok(None);
        }
        let mut x = vec![false; self.cols];
        for (k, &c) in pivots.iter().enumerate() {
            x[c] = rhs.get(k, 0);
        }
        Ok(Some(x))
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{}", self.rows, self.cols)?;
        write!(f, "{self}")
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> BinaryMatrix {
        BinaryMatrix::from_fn(r, c, |_, _| rng.gen())
    }

    #[test]
    fn identity_rank_and_inverse() {
        for n in [1, 5, 64, 65, 130] {
            let id = BinaryMatrix::identity(n);
            assert_eq!(id.rank(), n);
            assert!(id.is_identity());
            assert_eq!(id.inverse().unwrap(), id);
        }
    }

    #[test]
    fn small_self_inverse() {
        let m = BinaryMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(m.inverse().unwrap(), m);
    }

    #[test]
    fn singular_is_rejected() {
        let m = BinaryMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(m.inverse(), Err(Error::Singular));
    }

    #[test]
    fn random_inverses_multiply_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut found = 0;
        while found < 50 {
            let m = random(&mut rng, 8, 8);
            match m.inverse() {
                Ok(inv) => {
                    assert!(m.mul(&inv).unwrap().is_identity());
                    assert!(inv.mul(&m).unwrap().is_identity());
                    found += 1;
                }
                Err(e) => {
                    assert_eq!(e, Error::Singular);
                    assert!(m.rank() < 8);
                }
            }
        }
    }

    #[test]
    fn rank_matches_brute_force_span() {
        // Span size of the rows equals 2^rank.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let m = random(&mut rng, 5, 6);
            let mut span = std::collections::HashSet::new();
            for mask in 0u32..32 {
                let mut acc = 0u64;
                for i in 0..5 {
                    if mask >> i & 1 == 1 {
                        acc ^= m.row(i)[0];
                    }
                }
                span.insert(acc);
            }
            assert_eq!(span.len(), 1 << m.rank());
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = random(&mut rng, 6, 9);
            let x: Vec<bool> = (0..9).map(|_| rng.gen()).collect();
            let b = m.mul_vec(&x).unwrap();
            let y = m.solve(&b).unwrap().unwrap();
            assert_eq!(m.mul_vec(&y).unwrap(), b);
        }
        let m = BinaryMatrix::from_rows(&[vec![1, 0], vec![1, 0]]).unwrap();
        assert_eq!(m.solve(&[true, false]).unwrap(), None);
    }

    #[test]
    fn transpose_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random(&mut rng, 7, 3);
        assert_eq!(m.transpose().transpose(), m);
        let s = m.transpose().mul(&m).unwrap();
        assert!(s.is_symmetric());
    }
}
