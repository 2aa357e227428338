//! Convergence diagnostics: masked spectral norms, the contraction factors
//! for both theorem variants, initialization radius bounds, recursion
//! verification on run traces, and Monte Carlo trials for the large-sample
//! conjecture.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generative::{sample_sparse_coeffs, SamplerConfig};
use crate::learner::RunTrace;
use crate::linalg;
use crate::matrices::SparseCoeffs;
use crate::seeding::derive_seed;

/// Default multiplier on `min_j beta` for the initialization radius.
pub const DEFAULT_EPSILON_MULTIPLIER: f64 = 0.49;

/// Errors below this are treated as numerically stationary: the iterates sit
/// at the floating-point fixed point and contraction ratios are meaningless.
pub const STATIONARITY_FLOOR: f64 = 1e-13;

/// Recursion checks activate once the previous transform error is this
/// small; earlier iterates carry a second-order remainder the clean ratio
/// does not account for.
pub const RECURSION_ACTIVATION: f64 = 1e-2;

/// Contraction factors and radius bounds of a coefficient matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralReport {
    /// Orthonormal-rows contraction factor `max_k ||D_k Z* D~_k||_2`.
    pub q1: f64,
    /// General contraction factor
    /// `kappa^4(Z*) max_k ||D_k Z* Z*^T Z* D~_k||_2`.
    pub q2: f64,
    /// Condition number of `Z*`.
    pub kappa: f64,
    /// Initialization radius `0.49 min_j beta(Z*_j / ||Z*_j||_2)`.
    pub epsilon: f64,
    /// `min_j beta` of the normalized columns.
    pub beta_min: f64,
}

impl SpectralReport {
    pub fn compute(z_star: &SparseCoeffs) -> Result<Self> {
        let q1 = compute_q1(z_star);
        let q2 = compute_q2(z_star)?;
        let kappa = condition_number(z_star.matrix())?;
        let beta_min = min_normalized_magnitude(z_star)?;
        Ok(Self {
            q1,
            q2,
            kappa,
            epsilon: DEFAULT_EPSILON_MULTIPLIER * beta_min,
            beta_min,
        })
    }
}

/// Spectral norm of `z` with row `k` zeroed and the columns restricted to
/// the support of row `k`.
///
/// This equals `||D_k z D~_k||_2` for the diagonal masks built from row `k`
/// of `z` itself; the column restriction avoids materializing an N-by-N
/// mask.
pub fn masked_spectral_norm(z: &DMatrix<f64>, k: usize) -> Result<f64> {
    if k >= z.nrows() {
        return Err(Error::InvalidDimension(format!(
            "row index {k} out of range for {} rows",
            z.nrows()
        )));
    }
    Ok(masked_norm(z, k, &row_support(z, k)))
}

fn row_support(z: &DMatrix<f64>, k: usize) -> Vec<usize> {
    (0..z.ncols()).filter(|&j| z[(k, j)] != 0.0).collect()
}

/// Spectral norm of `values` restricted to `cols` with row `k` zeroed.
fn masked_norm(values: &DMatrix<f64>, k: usize, cols: &[usize]) -> f64 {
    if cols.is_empty() {
        return 0.0;
    }
    let mut sub = DMatrix::<f64>::zeros(values.nrows(), cols.len());
    for (out_j, &j) in cols.iter().enumerate() {
        sub.column_mut(out_j).copy_from(&values.column(j));
    }
    sub.row_mut(k).fill(0.0);
    linalg::spectral_norm(&sub)
}

/// Theorem-1 contraction factor: `max_k ||D_k Z* D~_k||_2`.
pub fn compute_q1(z_star: &SparseCoeffs) -> f64 {
    let z = z_star.matrix();
    (0..z.nrows())
        .map(|k| masked_norm(z, k, &row_support(z, k)))
        .fold(0.0, f64::max)
}

/// Theorem-2 contraction factor:
/// `kappa^4(Z*) max_k ||D_k Z* Z*^T Z* D~_k||_2`.
///
/// The column masks come from the supports of the rows of `Z*` itself, while
/// the masked values are taken from the triple product.
pub fn compute_q2(z_star: &SparseCoeffs) -> Result<f64> {
    let z = z_star.matrix();
    let kappa = condition_number(z)?;
    let triple = (z * z.transpose()) * z;
    let max_masked = (0..z.nrows())
        .map(|k| masked_norm(&triple, k, &row_support(z, k)))
        .fold(0.0, f64::max);
    Ok(kappa.powi(4) * max_masked)
}

/// Condition number (largest over smallest singular value) from the full set
/// of singular values; rank deficiency is an error rather than infinity.
pub fn condition_number(z: &DMatrix<f64>) -> Result<f64> {
    // nalgebra's SVD wants nrows >= ncols for wide inputs; singular values
    // are transpose-invariant.
    let sv = if z.nrows() <= z.ncols() {
        z.transpose()
            .try_svd(false, false, f64::EPSILON, 0)
            .ok_or(Error::NonFinite("singular value decomposition"))?
            .singular_values
    } else {
        z.clone()
            .try_svd(false, false, f64::EPSILON, 0)
            .ok_or(Error::NonFinite("singular value decomposition"))?
            .singular_values
    };
    let sigma_max = sv.iter().fold(0.0_f64, |a, &s| a.max(s));
    let sigma_min = sv.iter().fold(f64::INFINITY, |a, &s| a.min(s));
    let rank_tol = sigma_max * z.nrows().max(z.ncols()) as f64 * f64::EPSILON;
    if sigma_max == 0.0 || sigma_min <= rank_tol {
        return Err(Error::SingularModel);
    }
    Ok(sigma_max / sigma_min)
}

/// Smallest nonzero magnitude over the l2-normalized columns of `z`.
pub fn min_normalized_magnitude(z: &SparseCoeffs) -> Result<f64> {
    let m = z.matrix();
    let mut overall = f64::INFINITY;
    for j in 0..m.ncols() {
        let col = m.column(j);
        let norm = col.norm();
        if norm == 0.0 {
            return Err(Error::DegenerateModel(j));
        }
        let beta = col
            .iter()
            .filter(|&&v| v != 0.0)
            .map(|&v| v.abs() / norm)
            .fold(f64::INFINITY, f64::min);
        overall = overall.min(beta);
    }
    Ok(overall)
}

/// Initialization radius `multiplier * min_j beta(Z*_j / ||Z*_j||_2)`.
///
/// Multipliers below one half keep the support-recovery argument valid.
pub fn epsilon_bound(z_star: &SparseCoeffs, multiplier: f64) -> Result<f64> {
    if !(multiplier > 0.0 && multiplier.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "epsilon multiplier must be positive and finite, got {multiplier}"
        )));
    }
    Ok(multiplier * min_normalized_magnitude(z_star)?)
}

/// Outcome of the two recursion inequalities at one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionCheck {
    pub t: usize,
    /// `||W^{t-1} - W*||_F`.
    pub err_w_prev: f64,
    /// `||Z^t - Z*||_F`.
    pub err_z: f64,
    /// `||W^t - W*||_F`.
    pub err_w: f64,
    /// Empirical ratio `err_z / err_w_prev`; bounded by one in the proof.
    pub z_contraction: f64,
    /// Empirical ratio `err_w / err_z`; bounded by q in the proof.
    pub w_contraction: f64,
    /// Whether this iteration is inside the checked regime.
    pub active: bool,
    pub passed: bool,
}

/// Checks the per-iteration recursion `err_z(t) <= err_w(t-1)` and
/// `err_w(t) <= q2 err_z(t)` against a traced run, with multiplicative
/// `slack` absorbing the second-order remainder.
///
/// Checks are active only for iterations whose previous transform error lies
/// between [`STATIONARITY_FLOOR`] and [`RECURSION_ACTIVATION`]; outside that
/// window the ratios are reported but not enforced.
pub fn verify_recursion(
    trace: &RunTrace,
    report: &SpectralReport,
    slack: f64,
) -> Result<Vec<RecursionCheck>> {
    if !trace.has_ground_truth() {
        return Err(Error::MissingGroundTruth);
    }
    if report.q2 >= 1.0 {
        return Err(Error::NonContractive(report.q2));
    }
    let mut checks = Vec::with_capacity(trace.records.len());
    let mut err_w_prev = trace.initial_err_w.expect("ground truth present");
    for r in &trace.records {
        let err_w = r.err_w.expect("ground truth present");
        let err_z = r.err_z.expect("ground truth present");
        let z_contraction = if err_w_prev > 0.0 { err_z / err_w_prev } else { 0.0 };
        let w_contraction = if err_z > 0.0 { err_w / err_z } else { 0.0 };
        let active = err_w_prev < RECURSION_ACTIVATION
            && err_w_prev > STATIONARITY_FLOOR
            && err_z > STATIONARITY_FLOOR;
        let z_ok = err_z <= err_w_prev * (1.0 + slack);
        let w_ok = err_w <= report.q2 * err_z * (1.0 + slack);
        checks.push(RecursionCheck {
            t: r.t,
            err_w_prev,
            err_z,
            err_w,
            z_contraction,
            w_contraction,
            active,
            passed: !active || (z_ok && w_ok),
        });
        err_w_prev = err_w;
    }
    Ok(checks)
}

/// True iff, column by column, the support of `z_star` is contained in the
/// support of `z`.
pub fn support_superset_check(z: &SparseCoeffs, z_star: &SparseCoeffs) -> Result<bool> {
    let (a, b) = (z.matrix(), z_star.matrix());
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    for j in 0..b.ncols() {
        for i in 0..b.nrows() {
            if b[(i, j)] != 0.0 && a[(i, j)] == 0.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Distribution of the Theorem-2 factor over random models at one `(n, N, s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureResult {
    pub n: usize,
    pub n_cols: usize,
    pub s: usize,
    pub trials: usize,
    /// q2 per trial, in trial order; +infinity marks a rank-deficient draw.
    pub q_values: Vec<f64>,
    pub fraction_below_one: f64,
}

impl ConjectureResult {
    /// Median of the q values (average of the middle pair for even counts).
    pub fn median_q(&self) -> f64 {
        let mut sorted = self.q_values.clone();
        sorted.sort_by(f64::total_cmp);
        let m = sorted.len();
        if m % 2 == 1 {
            sorted[m / 2]
        } else {
            0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
        }
    }

    pub fn max_q(&self) -> f64 {
        self.q_values.iter().fold(0.0_f64, |a, &q| a.max(q))
    }
}

/// Samples `trials` coefficient matrices per column count and computes q2
/// for each.
///
/// Per-trial seeds are derived from `(seed, N, trial)`, so trials are
/// independent and the aggregate is schedule-independent; rank-deficient
/// draws score +infinity.
pub fn monte_carlo_conjecture(
    n: usize,
    s: usize,
    n_cols_list: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<ConjectureResult>> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    for &n_cols in n_cols_list {
        if n_cols < n {
            return Err(Error::InvalidDimension(format!(
                "column count {n_cols} is below the dimension {n}"
            )));
        }
    }
    n_cols_list
        .iter()
        .map(|&n_cols| {
            let per_cols_seed = derive_seed(seed, "conjecture-cols", n_cols as u64);
            let q_values: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let cfg = SamplerConfig {
                        n,
                        n_cols,
                        s,
                        seed: derive_seed(per_cols_seed, "trial", trial as u64),
                        normalize: false,
                    };
                    let z = sample_sparse_coeffs(&cfg)?;
                    match compute_q2(&z) {
                        Ok(q) => Ok(q),
                        Err(Error::SingularModel) => Ok(f64::INFINITY),
                        Err(e) => Err(e),
                    }
                })
                .collect::<Result<_>>()?;
            let below = q_values.iter().filter(|&&q| q < 1.0).count();
            Ok(ConjectureResult {
                n,
                n_cols,
                s,
                trials,
                fraction_below_one: below as f64 / trials as f64,
                q_values,
            })
        })
        .collect()
}
