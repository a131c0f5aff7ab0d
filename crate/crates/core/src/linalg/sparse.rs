use alloc::vec::Vec;

use crate::{Error, Result};

/// Coordinate-format accumulation buffer for an `n x n` matrix.
///
/// Element contributions may be produced in any order (including by
/// independent workers merged afterwards); [`TripletMatrix::finalize`]
/// canonicalizes duplicates so the compressed result does not depend on
/// insertion order.
#[derive(Debug, Clone, Default)]
pub struct TripletMatrix {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletMatrix {
    pub fn new(n: usize) -> Self {
        TripletMatrix {
            n,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        TripletMatrix {
            n,
            entries: Vec::with_capacity(cap),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        self.entries.push((row, col, value));
    }

    /// Appends the triplets of another buffer of the same dimension.
    pub fn merge(&mut self, other: TripletMatrix) {
        debug_assert_eq!(self.n, other.n);
        self.entries.extend(other.entries);
    }

    pub fn finalize(mut self) -> SparseMatrix {
        // Duplicates are summed in value order, which makes the result
        // independent of the insertion order.
        self.entries.sort_unstable_by(|a, b| {
            (a.0, a.1)
                .cmp(&(b.0, b.1))
                .then_with(|| a.2.total_cmp(&b.2))
        });
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut cols = Vec::with_capacity(self.entries.len());
        let mut vals = Vec::with_capacity(self.entries.len());
        row_ptr.push(0);
        let mut current_row = 0;
        for &(r, c, v) in &self.entries {
            while current_row < r {
                row_ptr.push(cols.len());
                current_row += 1;
            }
            if cols.len() > row_ptr[r] && *cols.last().unwrap() == c {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
            }
        }
        while row_ptr.len() < self.n + 1 {
            row_ptr.push(cols.len());
        }
        SparseMatrix {
            n: self.n,
            row_ptr,
            cols,
            vals,
        }
    }
}

/// Square matrix in compressed row storage with sorted, unique columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n,
            row_ptr: (0..=n).collect(),
            cols: (0..n).collect(),
            vals: alloc::vec![1.0; n],
        }
    }

    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut t = TripletMatrix::with_capacity(n, triplets.len());
        for &(r, c, v) in triplets {
            t.push(r, c, v);
        }
        t.finalize()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Column indices and values of one row.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[range.clone()], &self.vals[range])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((0..self.n)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect())
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = TripletMatrix::with_capacity(self.n, self.nnz());
        for (i, j, v) in self.iter() {
            t.push(j, i, v);
        }
        t.finalize()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
    }

    /// `max |A - A^T|` over all entries.
    pub fn asymmetry(&self) -> f64 {
        self.iter()
            .map(|(i, j, v)| libm::fabs(v - self.get(j, i)))
            .fold(0.0, f64::max)
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self.vals.iter_mut() {
            *v *= factor;
        }
    }

    /// `self * a + other * b`.
    pub fn linear_combination(&self, a: f64, other: &SparseMatrix, b: f64) -> Result<SparseMatrix> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut t = TripletMatrix::with_capacity(self.n, self.nnz() + other.nnz());
        for (i, j, v) in self.iter() {
            t.push(i, j, a * v);
        }
        for (i, j, v) in other.iter() {
            t.push(i, j, b * v);
        }
        Ok(t.finalize())
    }

    /// Replaces every flagged row by the corresponding identity row.
    pub fn replace_rows_with_identity(&self, rows: &[bool]) -> SparseMatrix {
        let mut t = TripletMatrix::with_capacity(self.n, self.nnz());
        for (i, j, v) in self.iter() {
            if !rows[i] {
                t.push(i, j, v);
            }
        }
        for (i, _) in rows.iter().enumerate().filter(|(_, &flag)| flag) {
            t.push(i, i, 1.0);
        }
        t.finalize()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn duplicates_sum_and_columns_sorted() {
        let m = SparseMatrix::from_triplets(3, &[(0, 2, 1.0), (0, 0, 2.0), (0, 2, 3.0), (2, 1, -1.0)]);
        assert_eq!(m.row(0), (&[0usize, 2][..], &[2.0, 4.0][..]));
        assert_eq!(m.row(1).0.len(), 0);
        assert_eq!(m.get(2, 1), -1.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.nnz(), 3);
    }

    #[test]
    fn mul_and_transpose() {
        let m = SparseMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 1, 3.0)]);
        assert_eq!(m.mul_vec(&[1.0, 1.0]).unwrap(), [3.0, 3.0]);
        assert!(m.mul_vec(&[1.0]).is_err());
        let t = m.transpose();
        assert_eq!(t.get(1, 0), 2.0);
        assert_eq!(m.asymmetry(), 2.0);
        let r = m.replace_rows_with_identity(&[true, false]);
        assert_eq!(r.get(0, 0), 1.0);
        assert_eq!(r.get(0, 1), 0.0);
        assert_eq!(r.get(1, 1), 3.0);
    }

    proptest! {
        #[test]
        fn order_independent_finalize(
            (entries, shuffled) in proptest::collection::vec((0usize..6, 0usize..6, -10.0f64..10.0), 1..60)
                .prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle())),
        ) {
            let a = SparseMatrix::from_triplets(6, &entries);
            let b = SparseMatrix::from_triplets(6, &shuffled);
            prop_assert_eq!(a, b);
        }
    }
}
