//! Alternating minimization for the unitary sparsifying operator problem:
//! hard-thresholding sparse coding alternated with an SVD-based orthogonal
//! Procrustes update, with per-iteration tracing.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::analysis;
use crate::error::{Error, Result};
use crate::generative::GenerativeModel;
use crate::linalg;
use crate::matrices::{SparseCoeffs, TransformMatrix};
use crate::seeding::rng_from_seed;

/// Run configuration: sparsity, iteration budget, optional ground truth for
/// error tracing.
#[derive(Debug, Clone, Copy)]
pub struct LearnerConfig<'a> {
    pub s: usize,
    pub max_iters: usize,
    pub trace_against: Option<&'a GenerativeModel>,
}

impl<'a> LearnerConfig<'a> {
    pub fn new(s: usize, max_iters: usize) -> Self {
        Self {
            s,
            max_iters,
            trace_against: None,
        }
    }

    pub fn trace_against(mut self, model: &'a GenerativeModel) -> Self {
        self.trace_against = Some(model);
        self
    }
}

/// One row of a run trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// Iteration index, starting at 1.
    pub t: usize,
    /// `||W^t P - Z^t||_F^2`.
    pub objective: f64,
    /// `||W^t - W*||_F` when ground truth was supplied.
    pub err_w: Option<f64>,
    /// `||Z^t - Z*||_F` when ground truth was supplied.
    pub err_z: Option<f64>,
    /// Set when the operator update saw an exactly zero cross-product and
    /// fell back to the identity.
    pub degenerate: bool,
}

/// Full record of a run: per-iteration rows plus the final iterates.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub records: Vec<IterationRecord>,
    /// `||W^0 - W*||_F` when ground truth was supplied.
    pub initial_err_w: Option<f64>,
    pub final_w: TransformMatrix,
    pub final_z: SparseCoeffs,
}

impl RunTrace {
    /// True when the objective column never rises by more than `slack`.
    pub fn objective_is_monotone(&self, slack: f64) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].objective <= w[0].objective + slack)
    }

    /// First iteration whose objective is at or below `threshold`.
    pub fn iterations_to_objective(&self, threshold: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.objective <= threshold)
            .map(|r| r.t)
    }

    pub fn has_ground_truth(&self) -> bool {
        self.initial_err_w.is_some()
            && self
                .records
                .iter()
                .all(|r| r.err_w.is_some() && r.err_z.is_some())
    }
}

/// Keeps the `s` largest-magnitude entries of `v` and zeros the rest.
///
/// Kept entries are returned bit-exactly; magnitude ties are broken toward
/// the lowest index.
pub fn hard_threshold(v: &[f64], s: usize) -> Result<Vec<f64>> {
    if s < 1 || s > v.len() {
        return Err(Error::InvalidSparsity { s, n: v.len() });
    }
    let mut out = v.to_vec();
    let mut order: Vec<usize> = Vec::new();
    threshold_in_place(&mut out, s, &mut order);
    Ok(out)
}

/// In-place hard threshold of one column; `order` is scratch space.
fn threshold_in_place(col: &mut [f64], s: usize, order: &mut Vec<usize>) {
    let n = col.len();
    order.clear();
    order.extend(0..n);
    order.sort_unstable_by(|&a, &b| col[b].abs().total_cmp(&col[a].abs()).then(a.cmp(&b)));
    for &i in &order[s..] {
        col[i] = 0.0;
    }
}

/// Sparse coding step: column `j` of the result is the hard threshold of
/// `(w p)_j`, the exact minimizer of `||w p - z||_F^2` over column-s-sparse z.
pub fn sparse_code(w: &DMatrix<f64>, p: &DMatrix<f64>, s: usize) -> Result<SparseCoeffs> {
    check_square_conformal(w, p)?;
    if s < 1 || s > p.nrows() {
        return Err(Error::InvalidSparsity { s, n: p.nrows() });
    }
    let mut wp = w * p;
    threshold_columns(&mut wp, s);
    SparseCoeffs::new(wp, s)
}

fn threshold_columns(m: &mut DMatrix<f64>, s: usize) {
    let n = m.nrows();
    let mut order = Vec::with_capacity(n);
    for col in m.as_mut_slice().chunks_exact_mut(n) {
        threshold_in_place(col, s, &mut order);
    }
}

/// Operator update: `W = V U^T` from the full SVD `P Z^T = U S V^T`, the
/// global minimizer of `||W P - Z||_F^2` over unitary `W`.
///
/// Returns the degenerate flag alongside: when `P Z^T` is exactly zero every
/// unitary matrix is a minimizer, and the identity is returned for
/// reproducibility.
pub fn operator_update(p: &DMatrix<f64>, z: &SparseCoeffs) -> Result<(TransformMatrix, bool)> {
    if p.nrows() != z.n() || p.ncols() != z.n_cols() {
        return Err(Error::ShapeMismatch(format!(
            "data is {}x{} but coefficients are {}x{}",
            p.nrows(),
            p.ncols(),
            z.n(),
            z.n_cols()
        )));
    }
    if !p.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("data matrix"));
    }
    if !z.matrix().iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("coefficient matrix"));
    }
    let cross = p * z.matrix().transpose();
    polar_update(cross)
}

fn polar_update(cross: DMatrix<f64>) -> Result<(TransformMatrix, bool)> {
    let n = cross.nrows();
    if cross.iter().all(|&v| v == 0.0) {
        return Ok((TransformMatrix::identity(n), true));
    }
    let svd = cross
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or(Error::NonFinite("operator update SVD"))?;
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let w = (u * v_t).transpose();
    Ok((TransformMatrix::new(w)?, false))
}

/// `||w p - z||_F^2`.
pub fn objective(w: &DMatrix<f64>, z: &SparseCoeffs, p: &DMatrix<f64>) -> Result<f64> {
    check_square_conformal(w, p)?;
    if z.n() != p.nrows() || z.n_cols() != p.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "coefficients are {}x{} but data is {}x{}",
            z.n(),
            z.n_cols(),
            p.nrows(),
            p.ncols()
        )));
    }
    let wp = w * p;
    Ok(linalg::frobenius_distance_sq(&wp, z.matrix()))
}

fn check_square_conformal(w: &DMatrix<f64>, p: &DMatrix<f64>) -> Result<()> {
    if w.nrows() != w.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "transform must be square, got {}x{}",
            w.nrows(),
            w.ncols()
        )));
    }
    if w.ncols() != p.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "transform is {}x{} but data has {} rows",
            w.nrows(),
            w.ncols(),
            p.nrows()
        )));
    }
    Ok(())
}

/// Runs exactly `cfg.max_iters` alternating iterations from `w0`.
///
/// Each iteration sparse-codes against the previous transform, then applies
/// the Procrustes update. The objective `||W^t P - Z^t||_F^2` is recorded
/// after every iteration, along with Frobenius errors against the ground
/// truth when `cfg.trace_against` is set.
pub fn run(p: &DMatrix<f64>, w0: &DMatrix<f64>, cfg: &LearnerConfig) -> Result<RunTrace> {
    check_square_conformal(w0, p)?;
    let n = p.nrows();
    if cfg.s < 1 || cfg.s > n {
        return Err(Error::InvalidSparsity { s: cfg.s, n });
    }
    if cfg.max_iters == 0 {
        return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
    }
    if let Some(model) = cfg.trace_against {
        if model.n() != n || model.n_cols() != p.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "ground truth is {}x{} but data is {}x{}",
                model.n(),
                model.n_cols(),
                n,
                p.ncols()
            )));
        }
    }

    let initial_err_w = cfg
        .trace_against
        .map(|m| linalg::frobenius_distance(w0, m.w_star().matrix()));

    let mut records = Vec::with_capacity(cfg.max_iters);
    // W^{t-1} P, reused as the sparse-coding input of the next iteration.
    let mut wp = w0 * p;
    let mut w = TransformMatrix::identity(n);
    let mut z = DMatrix::<f64>::zeros(n, p.ncols());
    for t in 1..=cfg.max_iters {
        z.copy_from(&wp);
        threshold_columns(&mut z, cfg.s);
        let cross = p * z.transpose();
        let (w_new, degenerate) = polar_update(cross)?;
        w = w_new;
        w.matrix().mul_to(p, &mut wp);
        let obj = linalg::frobenius_distance_sq(&wp, &z);
        let (err_w, err_z) = match cfg.trace_against {
            Some(m) => (
                Some(linalg::frobenius_distance(w.matrix(), m.w_star().matrix())),
                Some(linalg::frobenius_distance(&z, m.z_star().matrix())),
            ),
            None => (None, None),
        };
        records.push(IterationRecord {
            t,
            objective: obj,
            err_w,
            err_z,
            degenerate,
        });
    }
    let final_z = SparseCoeffs::new(z, cfg.s)?;
    Ok(RunTrace {
        records,
        initial_err_w,
        final_w: w,
        final_z,
    })
}

/// Initialization strategies for the transform iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitKind {
    /// Ground truth plus a Gaussian perturbation of Frobenius norm exactly
    /// `epsilon_bound(Z*)`.
    Eps,
    /// I.i.d. standard Gaussian entries.
    Rand,
    /// Identity matrix.
    Id,
    /// Orthonormal DCT-II matrix.
    Dct,
    /// I.i.d. uniform entries on `[0, 1)`.
    Unif,
    /// All zeros.
    Zero,
}

impl InitKind {
    pub const ALL: [InitKind; 6] = [
        InitKind::Eps,
        InitKind::Rand,
        InitKind::Id,
        InitKind::Dct,
        InitKind::Unif,
        InitKind::Zero,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            InitKind::Eps => "eps",
            InitKind::Rand => "rand",
            InitKind::Id => "id",
            InitKind::Dct => "dct",
            InitKind::Unif => "unif",
            InitKind::Zero => "zero",
        }
    }
}

impl fmt::Display for InitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eps" => Ok(InitKind::Eps),
            "rand" => Ok(InitKind::Rand),
            "id" => Ok(InitKind::Id),
            "dct" => Ok(InitKind::Dct),
            "unif" => Ok(InitKind::Unif),
            "zero" => Ok(InitKind::Zero),
            other => Err(Error::UnknownConfig(format!("initializer '{other}'"))),
        }
    }
}

/// Builds an n-by-n initial transform of the requested kind.
///
/// `truth` is required for [`InitKind::Eps`], which returns
/// `W* + eps G / ||G||_F` with `eps = epsilon_bound(Z*)`; the perturbed
/// matrix is intentionally not re-unitarized.
pub fn make_initializer(
    kind: InitKind,
    n: usize,
    truth: Option<&GenerativeModel>,
    seed: u64,
) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::InvalidDimension("n must be at least 1".into()));
    }
    match kind {
        InitKind::Eps => {
            let model = truth.ok_or(Error::GroundTruthRequired("eps"))?;
            if model.n() != n {
                return Err(Error::ShapeMismatch(format!(
                    "requested n = {n} but model has n = {}",
                    model.n()
                )));
            }
            let eps = analysis::epsilon_bound(
                model.z_star(),
                analysis::DEFAULT_EPSILON_MULTIPLIER,
            )?;
            let mut rng = rng_from_seed(seed);
            let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let scale = eps / g.norm();
            Ok(model.w_star().matrix() + g * scale)
        }
        InitKind::Rand => {
            let mut rng = rng_from_seed(seed);
            Ok(DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal)))
        }
        InitKind::Id => Ok(DMatrix::identity(n, n)),
        InitKind::Dct => Ok(dct_matrix(n)),
        InitKind::Unif => {
            let mut rng = rng_from_seed(seed);
            Ok(DMatrix::from_fn(n, n, |_, _| rng.random::<f64>()))
        }
        InitKind::Zero => Ok(DMatrix::zeros(n, n)),
    }
}

/// Orthonormal DCT-II matrix: entry (i, j) is
/// `c_i sqrt(2/n) cos(pi (2j+1) i / (2n))` with `c_0 = 1/sqrt(2)`.
fn dct_matrix(n: usize) -> DMatrix<f64> {
    let nf = n as f64;
    DMatrix::from_fn(n, n, |i, j| {
        let c = if i == 0 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
        c * (2.0 / nf).sqrt()
            * (std::f64::consts::PI * (2.0 * j as f64 + 1.0) * i as f64 / (2.0 * nf)).cos()
    })
}
