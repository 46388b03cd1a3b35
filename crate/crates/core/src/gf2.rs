//! Dense matrices over GF(2) with rows packed into machine words.

use std::fmt;

use thiserror::Error;

const WORD_BITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimensionError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("index {index} out of range for dimension {dim}")]
    OutOfRange { index: usize, dim: usize },
}

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A fixed-length bit vector, used for matrix rows and adjacency rows.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitRow {
    len: usize,
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow { len, words: vec![0; words_for(len)] }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * WORD_BITS + tz)
            })
        })
    }

    /// Keeps only the positions listed in `keep` (ascending), packed to the front.
    pub fn select(&self, keep: &[usize]) -> BitRow {
        let mut out = BitRow::zeros(keep.len());
        for (j, &i) in keep.iter().enumerate() {
            if self.get(i) {
                out.set(j, true);
            }
        }
        out
    }

    /// Inserts a bit at position `at`, shifting later bits up by one.
    pub fn insert(&mut self, at: usize, value: bool) {
        assert!(at <= self.len);
        let mut out = BitRow::zeros(self.len + 1);
        for i in self.iter_ones() {
            out.set(if i < at { i } else { i + 1 }, true);
        }
        out.set(at, value);
        *self = out;
    }

    /// Removes the bit at position `at`, shifting later bits down by one.
    pub fn remove(&mut self, at: usize) {
        assert!(at < self.len);
        let keep: Vec<usize> = (0..self.len).filter(|&i| i != at).collect();
        *self = self.select(&keep);
    }

    /// Appends one bit at the end.
    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(WORD_BITS) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A dense matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<BitRow>,
}

impl Gf2Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Gf2Matrix { n_rows, n_cols, rows: vec![BitRow::zeros(n_cols); n_rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from nested 0/1 rows. All rows must have the same length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), n_cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), n_cols, "ragged row {i}");
            for (j, &b) in r.iter().enumerate() {
                m.set(i, j, b & 1 == 1);
            }
        }
        m
    }

    pub(crate) fn from_bit_rows(n_cols: usize, rows: Vec<BitRow>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == n_cols));
        Gf2Matrix { n_rows: rows.len(), n_cols, rows }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n_rows && j < self.n_cols, "entry ({i},{j}) out of bounds");
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.n_rows && j < self.n_cols, "entry ({i},{j}) out of bounds");
        self.rows[i].set(j, value);
    }

    pub fn toggle(&mut self, i: usize, j: usize) {
        assert!(i < self.n_rows && j < self.n_cols, "entry ({i},{j}) out of bounds");
        self.rows[i].toggle(j);
    }

    pub fn row(&self, i: usize) -> &BitRow {
        &self.rows[i]
    }

    /// Rank by forward elimination with whole-row XORs.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.n_cols {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, pivot);
            let (head, tail) = rows.split_at_mut(rank + 1);
            let pivot_row = &head[rank];
            for r in tail.iter_mut() {
                if r.get(col) {
                    r.xor_assign(pivot_row);
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Number of columns minus rank. Only defined for square matrices here.
    pub fn nullity(&self) -> Result<usize, DimensionError> {
        if !self.is_square() {
            return Err(DimensionError::NotSquare { rows: self.n_rows, cols: self.n_cols });
        }
        Ok(self.n_cols - self.rank())
    }

    /// Removes the listed rows and the same-numbered columns, preserving order.
    pub fn delete_row_col(&self, indices: &[usize]) -> Result<Gf2Matrix, DimensionError> {
        let dim = self.n_rows.max(self.n_cols);
        let mut drop = vec![false; dim];
        for &i in indices {
            if i >= self.n_rows || i >= self.n_cols {
                return Err(DimensionError::OutOfRange { index: i, dim: self.n_rows.min(self.n_cols) });
            }
            drop[i] = true;
        }
        let keep_rows: Vec<usize> = (0..self.n_rows).filter(|&i| !drop[i]).collect();
        let keep_cols: Vec<usize> = (0..self.n_cols).filter(|&i| !drop[i]).collect();
        let rows = keep_rows.iter().map(|&i| self.rows[i].select(&keep_cols)).collect();
        Ok(Gf2Matrix::from_bit_rows(keep_cols.len(), rows))
    }

    /// Block-diagonal sum.
    pub fn block_diag(&self, other: &Gf2Matrix) -> Gf2Matrix {
        let mut m = Gf2Matrix::zeros(self.n_rows + other.n_rows, self.n_cols + other.n_cols);
        for i in 0..self.n_rows {
            for j in self.rows[i].iter_ones() {
                m.set(i, j, true);
            }
        }
        for i in 0..other.n_rows {
            for j in other.rows[i].iter_ones() {
                m.set(self.n_rows + i, self.n_cols + j, true);
            }
        }
        m
    }

    /// Applies the same permutation to rows and columns: entry (i, j) moves to (perm[i], perm[j]).
    pub fn permute_symmetric(&self, perm: &[usize]) -> Gf2Matrix {
        assert!(self.is_square() && perm.len() == self.n_rows);
        let mut m = Gf2Matrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            for j in self.rows[i].iter_ones() {
                m.set(perm[i], perm[j], true);
            }
        }
        m
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Matrix {}x{} [", self.n_rows, self.n_cols)?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{r:?}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Per-entry elimination on a plain `Vec<Vec<bool>>`, kept separate from the packed path.
    fn naive_rank(m: &Gf2Matrix) -> usize {
        let mut a: Vec<Vec<bool>> =
            (0..m.n_rows()).map(|i| (0..m.n_cols()).map(|j| m.get(i, j)).collect()).collect();
        let mut rank = 0;
        for col in 0..m.n_cols() {
            let Some(p) = (rank..a.len()).find(|&r| a[r][col]) else { continue };
            a.swap(rank, p);
            for r in 0..a.len() {
                if r != rank && a[r][col] {
                    let pivot_row = a[rank].clone();
                    for (x, v) in a[r].iter_mut().zip(pivot_row) {
                        *x ^= v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn square(max: usize) -> impl Strategy<Value = Gf2Matrix> {
        (0..=max).prop_flat_map(|n| {
            proptest::collection::vec(proptest::collection::vec(0u8..2, n), n).prop_map(move |rows| {
                if n == 0 {
                    Gf2Matrix::zeros(0, 0)
                } else {
                    Gf2Matrix::from_rows(&rows)
                }
            })
        })
    }

    #[test]
    fn nullity_examples() {
        assert_eq!(Gf2Matrix::zeros(0, 0).nullity(), Ok(0));
        assert_eq!(Gf2Matrix::from_rows(&[[0u8]]).nullity(), Ok(1));
        assert_eq!(Gf2Matrix::from_rows(&[[1u8, 1], [1, 1]]).nullity(), Ok(1));
        assert_eq!(Gf2Matrix::identity(5).nullity(), Ok(0));
    }

    #[test]
    fn nullity_rejects_rectangular() {
        let m = Gf2Matrix::zeros(2, 3);
        assert_eq!(m.nullity(), Err(DimensionError::NotSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn delete_examples() {
        let id = Gf2Matrix::identity(2);
        assert_eq!(id.delete_row_col(&[0]).unwrap(), Gf2Matrix::from_rows(&[[1u8]]));
        let m = Gf2Matrix::from_rows(&[[1u8, 0], [1, 1]]);
        assert_eq!(m.delete_row_col(&[]).unwrap(), m);
        let e = m.delete_row_col(&[0, 1]).unwrap();
        assert_eq!((e.n_rows(), e.n_cols()), (0, 0));
        assert!(matches!(m.delete_row_col(&[2]), Err(DimensionError::OutOfRange { .. })));
    }

    #[test]
    fn wide_rows_cross_word_boundary() {
        let n = 130;
        let mut m = Gf2Matrix::identity(n);
        // make the last row a copy of row 0 plus row 129 → rank drops by one
        for j in 0..n {
            let v = m.get(0, j) ^ m.get(129, j);
            m.set(n - 1, j, v);
        }
        m.set(n - 1, 0, true);
        m.set(n - 1, 129, false);
        assert_eq!(m.rank(), n - 1);
        assert_eq!(m.nullity(), Ok(1));
    }

    proptest! {
        #[test]
        fn packed_rank_matches_naive(m in square(8)) {
            prop_assert_eq!(m.rank(), naive_rank(&m));
            prop_assert_eq!(m.nullity().unwrap() + m.rank(), m.n_cols());
        }

        #[test]
        fn nullity_invariant_under_symmetric_permutation(
            (m, perm) in square(8).prop_flat_map(|m| {
                let n = m.n_rows();
                (Just(m), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            })
        ) {
            prop_assert_eq!(m.permute_symmetric(&perm).nullity(), m.nullity());
        }

        #[test]
        fn nullity_additive_on_block_diagonal(a in square(6), b in square(6)) {
            prop_assert_eq!(
                a.block_diag(&b).nullity().unwrap(),
                a.nullity().unwrap() + b.nullity().unwrap()
            );
        }
    }
}
