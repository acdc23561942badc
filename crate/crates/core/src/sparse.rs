//! Compressed sparse row storage.
//!
//! Entries are *structural*: an entry stored with value `0.0` is still an
//! entry. Degree counts in the propagation operator rely on this.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from `(row, col, value)` triplets in any order. Column indices
    /// within each row come out sorted. A repeated coordinate is reported as
    /// `Err((row, col))`.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> std::result::Result<Self, (usize, usize)> {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut prev: Option<(usize, usize)> = None;
        for &(r, c, v) in &triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if prev == Some((r, c)) {
                return Err((r, c));
            }
            prev = Some((r, c));
            indptr[r + 1] += 1;
            indices.push(c);
            values.push(v);
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Number of structural entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn row_nnz(&self, r: usize) -> usize {
        self.indptr[r + 1] - self.indptr[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Option<f64> {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .binary_search(&c)
            .ok()
            .map(|k| self.values[span.start + k])
    }

    /// All entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn transpose(&self) -> CsrMatrix {
        let triplets = self.triplets().map(|(r, c, v)| (c, r, v)).collect();
        CsrMatrix::from_triplets(self.ncols, self.nrows, triplets)
            .expect("transpose of a valid matrix has no duplicates")
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.nrows, self.ncols));
        for (r, c, v) in self.triplets() {
            out[[r, c]] = v;
        }
        out
    }

    /// `self · rhs`.
    pub fn mul_dense(&self, rhs: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if rhs.nrows() != self.ncols {
            return Err(Error::Dimension(format!(
                "sparse {}x{} times dense {}x{}",
                self.nrows,
                self.ncols,
                rhs.nrows(),
                rhs.ncols()
            )));
        }
        let mut out = Array2::zeros((self.nrows, rhs.ncols()));
        for (r, mut out_row) in out.rows_mut().into_iter().enumerate() {
            for (c, v) in self.row(r) {
                out_row.scaled_add(v, &rhs.row(c));
            }
        }
        Ok(out)
    }

    /// `selfᵀ · rhs`, without materializing the transpose.
    pub fn transpose_mul_dense(&self, rhs: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if rhs.nrows() != self.nrows {
            return Err(Error::Dimension(format!(
                "transposed sparse {}x{} times dense {}x{}",
                self.ncols,
                self.nrows,
                rhs.nrows(),
                rhs.ncols()
            )));
        }
        let mut out = Array2::zeros((self.ncols, rhs.ncols()));
        for r in 0..self.nrows {
            let src = rhs.row(r);
            for (c, v) in self.row(r) {
                out.row_mut(c).scaled_add(v, &src);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn sample() -> CsrMatrix {
        CsrMatrix::from_triplets(
            3,
            4,
            vec![(2, 1, 5.0), (0, 3, 2.0), (0, 0, 1.0), (1, 2, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn triplets_are_sorted_and_zero_is_structural() {
        let m = sample();
        assert_eq!(m.nnz(), 4);
        assert_eq!(m.get(1, 2), Some(0.0));
        assert_eq!(m.get(1, 1), None);
        let t: Vec<_> = m.triplets().collect();
        assert_eq!(t, vec![(0, 0, 1.0), (0, 3, 2.0), (1, 2, 0.0), (2, 1, 5.0)]);
    }

    #[test]
    fn duplicate_coordinate_rejected() {
        let err = CsrMatrix::from_triplets(2, 2, vec![(1, 0, 1.0), (1, 0, 2.0)]).unwrap_err();
        assert_eq!(err, (1, 0));
    }

    #[test]
    fn products_match_dense() {
        let m = sample();
        let rhs = array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0], [7.0, 8.0]];
        assert_eq!(m.mul_dense(rhs.view()).unwrap(), m.to_dense().dot(&rhs));
        let rhs_t = array![[1.0], [2.0], [3.0]];
        assert_eq!(
            m.transpose_mul_dense(rhs_t.view()).unwrap(),
            m.to_dense().t().dot(&rhs_t)
        );
        assert_eq!(m.transpose().to_dense(), m.to_dense().t());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let m = sample();
        assert!(m.mul_dense(Array2::zeros((3, 1)).view()).is_err());
        assert!(m.transpose_mul_dense(Array2::zeros((4, 1)).view()).is_err());
    }
}
