//! Ground-truth model synthesis.
//!
//! Builds `(W*, Z*, P)` triples in which `W*` is Haar-distributed unitary,
//! the columns of `Z*` carry exactly `s` Gaussian nonzeros on uniformly
//! random supports, and `P = W*^T Z*` so that `W* P = Z*` holds exactly.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrices::{SparseCoeffs, TransformMatrix};
use crate::seeding::{derive_seed, rng_from_seed};

/// Configuration for [`sample_sparse_coeffs`] and [`synthesize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    /// Signal dimension n.
    pub n: usize,
    /// Sample count N (columns of P and Z*).
    pub n_cols: usize,
    /// Per-column sparsity level.
    pub s: usize,
    /// Master seed; subordinate streams are derived from it.
    pub seed: u64,
    /// Rescale P (and Z*) so the spectral norm of P is exactly one.
    pub normalize: bool,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidDimension("n must be at least 1".into()));
        }
        if self.n_cols == 0 {
            return Err(Error::InvalidDimension("n_cols must be at least 1".into()));
        }
        if self.s < 1 || self.s > self.n {
            return Err(Error::InvalidSparsity {
                s: self.s,
                n: self.n,
            });
        }
        Ok(())
    }
}

/// A synthesized ground-truth model: `W* P = Z*` with unitary `W*` and
/// column-sparse `Z*`.
#[derive(Debug, Clone)]
pub struct GenerativeModel {
    w_star: TransformMatrix,
    z_star: SparseCoeffs,
    p: DMatrix<f64>,
    s: usize,
    normalized: bool,
}

impl GenerativeModel {
    pub fn w_star(&self) -> &TransformMatrix {
        &self.w_star
    }

    pub fn z_star(&self) -> &SparseCoeffs {
        &self.z_star
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn n(&self) -> usize {
        self.w_star.n()
    }

    pub fn n_cols(&self) -> usize {
        self.z_star.n_cols()
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    /// `||W* P - Z*||_F`; near zero by construction.
    pub fn consistency_defect(&self) -> f64 {
        let wp = self.w_star.matrix() * &self.p;
        linalg::frobenius_distance(&wp, self.z_star.matrix())
    }
}

/// Haar-distributed random unitary matrix.
///
/// QR factorization of an i.i.d. standard Gaussian matrix, with the columns
/// of Q flipped so the diagonal of R is positive. Without the sign fix the
/// distribution would depend on the QR routine's sign convention.
pub fn random_unitary(n: usize, seed: u64) -> Result<TransformMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("n must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    TransformMatrix::new(q)
}

/// Samples `Z*`: per column, `s` support indices uniform without replacement
/// and nonzero values i.i.d. Gaussian with mean zero and variance `n / (s N)`.
pub fn sample_sparse_coeffs(cfg: &SamplerConfig) -> Result<SparseCoeffs> {
    cfg.validate()?;
    let (n, n_cols, s) = (cfg.n, cfg.n_cols, cfg.s);
    let sigma = (n as f64 / (s as f64 * n_cols as f64)).sqrt();
    let mut rng = rng_from_seed(cfg.seed);
    let mut z = DMatrix::<f64>::zeros(n, n_cols);
    let mut indices: Vec<usize> = (0..n).collect();
    for j in 0..n_cols {
        // Partial Fisher-Yates: the first s slots end up uniform without
        // replacement.
        for i in 0..s {
            let k = rng.random_range(i..n);
            indices.swap(i, k);
        }
        indices[..s].sort_unstable();
        for &i in &indices[..s] {
            let g: f64 = rng.sample(StandardNormal);
            z[(i, j)] = sigma * g;
        }
    }
    SparseCoeffs::new(z, s)
}

/// Synthesizes a full generative model from `cfg`.
///
/// `W*` and `Z*` use subordinate seeds derived from `cfg.seed`, and
/// `P = W*^T Z*`. With `cfg.normalize` set, both `P` and `Z*` are divided by
/// the spectral norm of `Z*` (equal to that of `P`), which preserves the
/// model identity while making `||P||_2 = 1`.
pub fn synthesize(cfg: &SamplerConfig) -> Result<GenerativeModel> {
    cfg.validate()?;
    let w_star = random_unitary(cfg.n, derive_seed(cfg.seed, "w-star", 0))?;
    let z_cfg = SamplerConfig {
        seed: derive_seed(cfg.seed, "z-star", 0),
        ..*cfg
    };
    let mut z_star = sample_sparse_coeffs(&z_cfg)?;
    let mut p = w_star.matrix().transpose() * z_star.matrix();
    if cfg.normalize {
        let sigma = linalg::spectral_norm(z_star.matrix());
        if sigma == 0.0 {
            return Err(Error::DegenerateModel(0));
        }
        z_star = z_star.scaled(sigma);
        p /= sigma;
    }
    Ok(GenerativeModel {
        w_star,
        z_star,
        p,
        s: cfg.s,
        normalized: cfg.normalize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(n: usize, n_cols: usize, s: usize, seed: u64) -> SamplerConfig {
        SamplerConfig {
            n,
            n_cols,
            s,
            seed,
            normalize: false,
        }
    }

    #[test]
    fn unitary_1x1_is_sign() {
        let q = random_unitary(1, 3).unwrap();
        let v = q.matrix()[(0, 0)];
        assert!(v == 1.0 || v == -1.0, "got {v}");
    }

    #[test]
    fn unitary_has_tiny_defect() {
        for seed in [0, 1, 99] {
            let q = random_unitary(23, seed).unwrap();
            assert!(q.unitarity_defect() <= 1e-10, "defect {}", q.unitarity_defect());
        }
    }

    #[test]
    fn unitary_is_deterministic() {
        let a = random_unitary(8, 42).unwrap();
        let b = random_unitary(8, 42).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(matches!(
            random_unitary(0, 1),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn columns_have_exactly_s_nonzeros() {
        let z = sample_sparse_coeffs(&cfg(50, 200, 5, 7)).unwrap();
        for j in 0..z.n_cols() {
            assert_eq!(z.column_support(j).len(), 5, "column {j}");
        }
    }

    #[test]
    fn full_sparsity_gives_dense_column() {
        let z = sample_sparse_coeffs(&cfg(3, 1, 3, 11)).unwrap();
        assert_eq!(z.column_support(0), vec![0, 1, 2]);
    }

    #[test]
    fn oversparse_request_rejected() {
        assert!(matches!(
            sample_sparse_coeffs(&cfg(3, 4, 4, 0)),
            Err(Error::InvalidSparsity { .. })
        ));
    }

    #[test]
    fn squared_frobenius_mass_matches_mean() {
        // E ||Z*||_F^2 = N * s * n/(sN) = n; Monte Carlo average over 100
        // draws at n = 20 should land within 10%.
        let mut acc = 0.0;
        for trial in 0..100 {
            let z = sample_sparse_coeffs(&cfg(20, 500, 4, 1000 + trial)).unwrap();
            acc += z.matrix().norm_squared();
        }
        let mean = acc / 100.0;
        assert!((mean - 20.0).abs() < 2.0, "mean Frobenius mass {mean}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_sparse_coeffs(&cfg(10, 30, 3, 5)).unwrap();
        let b = sample_sparse_coeffs(&cfg(10, 30, 3, 5)).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn synthesized_model_is_consistent() {
        let m = synthesize(&cfg(12, 40, 3, 9)).unwrap();
        assert!(m.consistency_defect() <= 1e-10);
        assert!(m.w_star().unitarity_defect() <= 1e-10);
        assert_eq!(m.z_star().max_column_nnz(), 3);
    }

    #[test]
    fn normalization_fixes_spectral_norm() {
        let mut c = cfg(10, 60, 2, 13);
        c.normalize = true;
        let m = synthesize(&c).unwrap();
        assert_relative_eq!(linalg::spectral_norm(m.p()), 1.0, epsilon = 1e-8);
        assert!(m.normalized());
        assert!(m.consistency_defect() <= 1e-10);
    }

    #[test]
    fn unnormalized_spectral_norm_is_near_but_not_one() {
        let m = synthesize(&cfg(50, 10000, 5, 21)).unwrap();
        let sigma = linalg::spectral_norm(m.p());
        assert!(sigma > 0.5 && sigma < 1.5, "spectral norm {sigma}");
        assert!((sigma - 1.0).abs() > 1e-9, "spectral norm exactly 1: {sigma}");
    }

    #[test]
    fn synthesis_is_deterministic() {
        let a = synthesize(&cfg(9, 25, 2, 3)).unwrap();
        let b = synthesize(&cfg(9, 25, 2, 3)).unwrap();
        assert_eq!(a.w_star().matrix(), b.w_star().matrix());
        assert_eq!(a.z_star().matrix(), b.z_star().matrix());
        assert_eq!(a.p(), b.p());
    }
}
