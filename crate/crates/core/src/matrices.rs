//! Domain matrix types: the square transform and the column-sparse
//! coefficient matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;

/// A square n-by-n real transform.
///
/// Outputs of the operator-update step are unitary up to roundoff; arbitrary
/// initializations (random, uniform, zero) are carried by plain `DMatrix`
/// values instead, so holding a `TransformMatrix` only promises squareness.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatrix {
    entries: DMatrix<f64>,
}

impl TransformMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "transform must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.nrows() == 0 {
            return Err(Error::InvalidDimension("transform must be at least 1x1".into()));
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: DMatrix::identity(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    /// `||W^T W - Id||_F`; zero for an exactly unitary matrix.
    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.entries)
    }
}

/// An n-by-N coefficient matrix whose columns each carry at most `s` nonzeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCoeffs {
    entries: DMatrix<f64>,
    s: usize,
}

impl SparseCoeffs {
    /// Wraps a matrix after checking the per-column sparsity bound.
    pub fn new(entries: DMatrix<f64>, s: usize) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() == 0 {
            return Err(Error::InvalidDimension(
                "coefficient matrix must be nonempty".into(),
            ));
        }
        if s < 1 || s > n {
            return Err(Error::InvalidSparsity { s, n });
        }
        for (j, col) in entries.column_iter().enumerate() {
            let nnz = col.iter().filter(|&&v| v != 0.0).count();
            if nnz > s {
                return Err(Error::InvalidConfig(format!(
                    "column {j} has {nnz} nonzeros, exceeding the sparsity bound {s}"
                )));
            }
        }
        Ok(Self { entries, s })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    /// Indices of the nonzero entries of column `j`.
    pub fn column_support(&self, j: usize) -> Vec<usize> {
        self.entries
            .column(j)
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Largest nonzero count over all columns.
    pub fn max_column_nnz(&self) -> usize {
        (0..self.n_cols())
            .map(|j| self.column_support(j).len())
            .max()
            .unwrap_or(0)
    }

    /// Rescales every entry by `1 / divisor`, preserving supports.
    pub(crate) fn scaled(&self, divisor: f64) -> Self {
        Self {
            entries: &self.entries / divisor,
            s: self.s,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_square_transform() {
        let m = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(
            TransformMatrix::new(m),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn rejects_oversparse_column() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 2.0, 1.0, 3.0, 0.0]);
        assert!(SparseCoeffs::new(m, 1).is_err());
    }

    #[test]
    fn accepts_column_at_bound() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 2.0, 1.0, 0.0, 0.0]);
        let z = SparseCoeffs::new(m, 2).unwrap();
        assert_eq!(z.column_support(0), vec![0, 1]);
        assert_eq!(z.column_support(1), vec![1]);
        assert_eq!(z.max_column_nnz(), 2);
    }

    #[test]
    fn rejects_out_of_range_sparsity() {
        let m = DMatrix::<f64>::zeros(3, 2);
        assert!(matches!(
            SparseCoeffs::new(m.clone(), 0),
            Err(Error::InvalidSparsity { .. })
        ));
        assert!(matches!(
            SparseCoeffs::new(m, 4),
            Err(Error::InvalidSparsity { .. })
        ));
    }
}
