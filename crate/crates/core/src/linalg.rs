//! Small dense linear-algebra helpers used across the crate.

use nalgebra::DMatrix;

/// Spectral norm (largest singular value) of a dense matrix.
///
/// Computed as the square root of the largest eigenvalue of the smaller Gram
/// matrix, which is much cheaper than a full SVD for wide matrices.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    gram_eigenvalues(m)
        .iter()
        .fold(0.0_f64, |acc, &l| acc.max(l))
        .max(0.0)
        .sqrt()
}

/// All singular values of `m`, via the eigenvalues of the smaller Gram matrix.
///
/// Values are clamped at zero and returned in no particular order.
pub fn gram_singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    gram_eigenvalues(m)
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .collect()
}

fn gram_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let gram = if m.nrows() <= m.ncols() {
        m * m.transpose()
    } else {
        m.transpose() * m
    };
    gram.symmetric_eigen().eigenvalues.as_slice().to_vec()
}

/// Squared Frobenius distance between two equally shaped matrices.
pub fn frobenius_distance_sq(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Frobenius distance between two equally shaped matrices.
pub fn frobenius_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    frobenius_distance_sq(a, b).sqrt()
}

/// Frobenius norm of `m^T m - Id`; zero for a perfectly unitary matrix.
pub fn unitarity_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.ncols();
    let gram = m.transpose() * m;
    frobenius_distance(&gram, &DMatrix::identity(n, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -5.0, 1.0]));
        assert_relative_eq!(spectral_norm(&m), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn spectral_norm_matches_svd_on_wide_matrix() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 0.0, 0.0, 3.0, 4.0]);
        let sv = m.clone().svd(false, false).singular_values;
        let expected = sv.iter().fold(0.0_f64, |a, &s| a.max(s));
        assert_relative_eq!(spectral_norm(&m), expected, epsilon = 1e-12);
    }

    #[test]
    fn empty_matrix_has_zero_norm() {
        let m = DMatrix::<f64>::zeros(3, 0);
        assert_eq!(spectral_norm(&m), 0.0);
    }

    #[test]
    fn defect_of_identity_is_zero() {
        let id = DMatrix::<f64>::identity(4, 4);
        assert!(unitarity_defect(&id) < 1e-15);
    }
}
