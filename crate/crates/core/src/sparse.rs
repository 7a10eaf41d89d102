//! Compressed sparse row storage for the system matrix.
//!
//! Rows are the unit of work for every Kaczmarz kernel, so the matrix only
//! offers what a row-action method needs: row access, a row/vector inner
//! product, the cached squared row norms and row permutation.

use crate::error::MatrixError;

/// An `m x n` real matrix in CSR layout with cached squared row norms.
///
/// Invariants upheld by every constructor:
/// - `row_offsets` is nondecreasing, starts at 0 and ends at `nnz`;
/// - column indices are `< n` and strictly increasing within a row;
/// - every row has a strictly positive squared norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRowMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
    row_norm_sq: Vec<f64>,
}

/// Borrowed view of one matrix row.
#[derive(Debug, Clone, Copy)]
pub struct RowView<'a> {
    pub cols: &'a [usize],
    pub values: &'a [f64],
    pub norm_sq: f64,
}

impl RowView<'_> {
    #[inline]
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.cols.iter().zip(self.values).map(|(&c, &v)| v * x[c]).sum()
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }
}

impl SparseRowMatrix {
    /// Builds a matrix from raw CSR arrays, validating every invariant.
    pub fn from_csr(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, MatrixError> {
        if row_offsets.len() != n_rows + 1 {
            return Err(MatrixError::Shape(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                n_rows + 1
            )));
        }
        if col_indices.len() != values.len() {
            return Err(MatrixError::Shape(format!(
                "{} column indices but {} values",
                col_indices.len(),
                values.len()
            )));
        }
        if row_offsets[0] != 0 || row_offsets[n_rows] != values.len() {
            return Err(MatrixError::Shape("row_offsets must start at 0 and end at nnz".into()));
        }
        let mut row_norm_sq = Vec::with_capacity(n_rows);
        for row in 0..n_rows {
            let (lo, hi) = (row_offsets[row], row_offsets[row + 1]);
            if lo > hi {
                return Err(MatrixError::Shape(format!("row_offsets decreases at row {row}")));
            }
            let cols = &col_indices[lo..hi];
            if let Some(&col) = cols.iter().find(|&&c| c >= n_cols) {
                return Err(MatrixError::ColumnOutOfRange { row, col, n_cols });
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(MatrixError::UnsortedRow(row));
            }
            let vals = &values[lo..hi];
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(MatrixError::NonFinite(row));
            }
            let norm_sq: f64 = vals.iter().map(|v| v * v).sum();
            if !(norm_sq > 0.0) || !norm_sq.is_finite() {
                return Err(MatrixError::ZeroRow(row));
            }
            row_norm_sq.push(norm_sq);
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
            row_norm_sq,
        })
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed
    /// and each row is sorted by column.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, MatrixError> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (row, col, val) in triplets {
            if row >= n_rows {
                return Err(MatrixError::RowOutOfRange { row, n_rows });
            }
            if col >= n_cols {
                return Err(MatrixError::ColumnOutOfRange { row, col, n_cols });
            }
            entries.push((row, col, val));
        }
        // Stable sort keeps duplicate summation order equal to input order.
        entries.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n_rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Self::from_csr(n_rows, n_cols, row_offsets, col_indices, values)
    }

    /// Builds a matrix from dense rows, storing only the nonzero entries.
    pub fn from_dense_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(MatrixError::Shape("dense rows have unequal lengths".into()));
        }
        let triplets = rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(move |(j, &v)| (i, j, v))
        });
        Self::from_triplets(rows.len(), n_cols, triplets)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Cached `‖a_j‖²` for every row.
    pub fn row_norm_sq(&self) -> &[f64] {
        &self.row_norm_sq
    }

    /// Panics if `j >= n_rows`.
    #[inline]
    pub fn row(&self, j: usize) -> RowView<'_> {
        let (lo, hi) = (self.row_offsets[j], self.row_offsets[j + 1]);
        RowView {
            cols: &self.col_indices[lo..hi],
            values: &self.values[lo..hi],
            norm_sq: self.row_norm_sq[j],
        }
    }

    /// Inner product `a_jᵀx`.
    ///
    /// Panics if `j` is out of range or `x.len() != n_cols`.
    pub fn row_dot(&self, j: usize, x: &[f64]) -> f64 {
        assert!(j < self.n_rows, "row {j} out of range for {} rows", self.n_rows);
        assert_eq!(x.len(), self.n_cols, "vector length must equal column count");
        self.row(j).dot(x)
    }

    /// Dense product `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols, "vector length must equal column count");
        (0..self.n_rows).map(|j| self.row(j).dot(x)).collect()
    }

    /// Returns the matrix whose row `i` is row `perm[i]` of `self`.
    ///
    /// Panics unless `perm` is a permutation of `0..n_rows`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n_rows, "permutation length mismatch");
        let mut seen = vec![false; self.n_rows];
        for &p in perm {
            assert!(p < self.n_rows && !seen[p], "not a permutation");
            seen[p] = true;
        }
        let mut row_offsets = Vec::with_capacity(self.n_rows + 1);
        row_offsets.push(0);
        let mut col_indices = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        let mut row_norm_sq = Vec::with_capacity(self.n_rows);
        for &p in perm {
            let row = self.row(p);
            col_indices.extend_from_slice(row.cols);
            values.extend_from_slice(row.values);
            row_offsets.push(values.len());
            row_norm_sq.push(row.norm_sq);
        }
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_offsets,
            col_indices,
            values,
            row_norm_sq,
        }
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |r| {
            let row = self.row(r);
            row.cols.iter().zip(row.values).map(move |(&c, &v)| (r, c, v))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_dot_sums_nonzeros() {
        let a = SparseRowMatrix::from_dense_rows(&[vec![3.0, 4.0]]).unwrap();
        assert_eq!(a.row_dot(0, &[1.0, 1.0]), 7.0);
        assert_eq!(a.row_norm_sq(), &[25.0]);
    }

    #[test]
    fn unit_row_against_unit_vector() {
        let mut row = vec![0.0; 6];
        row[0] = 1.0;
        let a = SparseRowMatrix::from_dense_rows(&[row]).unwrap();
        let mut e0 = vec![0.0; 6];
        e0[0] = 1.0;
        assert_eq!(a.row_dot(0, &e0), 1.0);
        assert_eq!(a.nnz(), 1);
    }

    #[test]
    fn zero_row_is_rejected() {
        let err = SparseRowMatrix::from_dense_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap_err();
        assert!(matches!(err, MatrixError::ZeroRow(1)));
        // explicit zeros do not make a row nonzero
        let err = SparseRowMatrix::from_triplets(1, 2, [(0, 1, 0.0)]).unwrap_err();
        assert!(matches!(err, MatrixError::ZeroRow(0)));
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn row_dot_checks_index() {
        let a = SparseRowMatrix::from_dense_rows(&[vec![1.0]]).unwrap();
        a.row_dot(1, &[1.0]);
    }

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let a = SparseRowMatrix::from_triplets(2, 3, [(0, 2, 1.0), (0, 0, 2.0), (0, 2, 0.5), (1, 1, -1.0)]).unwrap();
        assert_eq!(a.row_offsets(), &[0, 2, 3]);
        assert_eq!(a.col_indices(), &[0, 2, 1]);
        assert_eq!(a.values(), &[2.0, 1.5, -1.0]);
        assert_eq!(a.row_norm_sq(), &[4.0 + 2.25, 1.0]);
    }

    #[test]
    fn csr_validation() {
        assert!(matches!(
            SparseRowMatrix::from_csr(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 1.0]),
            Err(MatrixError::UnsortedRow(0))
        ));
        assert!(matches!(
            SparseRowMatrix::from_csr(1, 2, vec![0, 1], vec![2], vec![1.0]),
            Err(MatrixError::ColumnOutOfRange { .. })
        ));
        assert!(matches!(
            SparseRowMatrix::from_csr(2, 2, vec![0, 2, 1], vec![0, 1], vec![1.0, 1.0]),
            Err(MatrixError::Shape(_))
        ));
        assert!(matches!(
            SparseRowMatrix::from_csr(1, 1, vec![0, 1], vec![0], vec![f64::NAN]),
            Err(MatrixError::NonFinite(0))
        ));
    }

    #[test]
    fn permutation_moves_rows_and_norms() {
        let a = SparseRowMatrix::from_dense_rows(&[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let p = a.permute_rows(&[2, 0, 1]);
        assert_eq!(p.row_norm_sq(), &[25.0, 1.0, 4.0]);
        assert_eq!(p.mul_vec(&[1.0, 1.0]), vec![7.0, 1.0, 2.0]);
    }
}
