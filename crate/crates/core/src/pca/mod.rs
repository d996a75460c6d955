//! Relevant information loss of dimensionality-reducing PCA in the
//! linear-Gaussian model `X = S + N`.
//!
//! The loss of keeping the top `M` principal components is evaluated exactly
//! for Gaussian `S` and `N` from conditional (Schur-complement) covariances in
//! the rotated frame, and independently from log-determinants of the
//! original and projected covariances. The two upper bounds for the
//! spherical-noise and low-rank-signal cases, and the eigenvalue inequalities
//! behind the latter, are exposed for checking. Everything here is in nats.

mod jacobi;

use itertools::Itertools;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use jacobi::{
    check_symmetric, symmetric_eigen, SymmetricEigen, JACOBI_TOLERANCE, SYMMETRY_TOLERANCE,
};

/// Smallest admissible noise eigenvalue.
pub const NOISE_EIGEN_FLOOR: f64 = 1e-12;
/// Most negative admissible signal eigenvalue.
pub const SIGNAL_EIGEN_FLOOR: f64 = -1e-10;
/// Relative threshold for counting signal eigenvalues towards the rank.
pub const RANK_TOLERANCE: f64 = 1e-8;
/// Determinants below this are treated as singular.
pub const DETERMINANT_FLOOR: f64 = 1e-300;
/// Tolerance for the spherical-noise hypothesis.
pub const SPHERICAL_TOLERANCE: f64 = 1e-10;
/// Largest dimension for exhaustive subset search.
pub const MAX_SUBSET_DIM: usize = 20;

/// Signal and noise covariances of `X = S + N` with `S`, `N` independent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelDocument", into = "ModelDocument")]
pub struct LinearGaussianModel {
    signal_cov: DMatrix<f64>,
    noise_cov: DMatrix<f64>,
    obs_cov: DMatrix<f64>,
}

/// JSON layout: row-major nested arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument {
    signal_cov: Vec<Vec<f64>>,
    noise_cov: Vec<Vec<f64>>,
}

impl TryFrom<ModelDocument> for LinearGaussianModel {
    type Error = Error;

    fn try_from(doc: ModelDocument) -> Result<Self> {
        LinearGaussianModel::new(
            matrix_from_rows(&doc.signal_cov)?,
            matrix_from_rows(&doc.noise_cov)?,
        )
    }
}

impl From<LinearGaussianModel> for ModelDocument {
    fn from(m: LinearGaussianModel) -> Self {
        ModelDocument {
            signal_cov: rows_of(&m.signal_cov),
            noise_cov: rows_of(&m.noise_cov),
        }
    }
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Shape("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl LinearGaussianModel {
    pub fn new(signal_cov: DMatrix<f64>, noise_cov: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&signal_cov)?;
        check_symmetric(&noise_cov)?;
        if signal_cov.nrows() != noise_cov.nrows() || signal_cov.nrows() == 0 {
            return Err(Error::Shape(format!(
                "signal covariance is {}x{}, noise covariance {}x{}",
                signal_cov.nrows(),
                signal_cov.ncols(),
                noise_cov.nrows(),
                noise_cov.ncols()
            )));
        }
        let noise_min = *symmetric_eigen(&noise_cov)?
            .values
            .last()
            .expect("nonempty");
        if noise_min <= NOISE_EIGEN_FLOOR {
            return Err(Error::Singular(format!(
                "noise covariance is not full rank (smallest eigenvalue {noise_min:e})"
            )));
        }
        let signal_min = *symmetric_eigen(&signal_cov)?
            .values
            .last()
            .expect("nonempty");
        if signal_min < SIGNAL_EIGEN_FLOOR {
            return Err(Error::InvalidParameter(format!(
                "signal covariance is not positive semidefinite (eigenvalue {signal_min:e})"
            )));
        }
        let obs_cov = &signal_cov + &noise_cov;
        Ok(LinearGaussianModel {
            signal_cov,
            noise_cov,
            obs_cov,
        })
    }

    /// Independent coordinates with the given signal and noise variances.
    pub fn diagonal(signal_var: &[f64], noise_var: &[f64]) -> Result<Self> {
        LinearGaussianModel::new(
            DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(signal_var)),
            DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(noise_var)),
        )
    }

    pub fn dim(&self) -> usize {
        self.obs_cov.nrows()
    }

    pub fn signal_cov(&self) -> &DMatrix<f64> {
        &self.signal_cov
    }

    pub fn noise_cov(&self) -> &DMatrix<f64> {
        &self.noise_cov
    }

    pub fn obs_cov(&self) -> &DMatrix<f64> {
        &self.obs_cov
    }

    /// Numerical rank of the signal covariance.
    pub fn signal_rank(&self) -> Result<usize> {
        let values = symmetric_eigen(&self.signal_cov)?.values;
        let largest = values[0];
        if largest <= 0.0 {
            return Ok(0);
        }
        Ok(values
            .iter()
            .filter(|&&v| v > RANK_TOLERANCE * largest)
            .count())
    }

    /// `μ` if the noise covariance is `μ I`.
    pub fn spherical_noise_variance(&self) -> Option<f64> {
        let n = self.dim();
        let mu = self.noise_cov.trace() / n as f64;
        let spherical = (0..n).all(|i| {
            (0..n).all(|j| {
                let target = if i == j { mu } else { 0.0 };
                (self.noise_cov[(i, j)] - target).abs() <= SPHERICAL_TOLERANCE
            })
        });
        spherical.then_some(mu)
    }

    /// The model seen through an orthogonal change of coordinates `X ↦ Q X`.
    pub fn rotated(&self, q: &DMatrix<f64>) -> Result<LinearGaussianModel> {
        let sym = |m: DMatrix<f64>| (&m + m.transpose()) * 0.5;
        LinearGaussianModel::new(
            sym(q * &self.signal_cov * q.transpose()),
            sym(q * &self.noise_cov * q.transpose()),
        )
    }

    fn check_kept(&self, kept: usize) -> Result<()> {
        if kept == 0 || kept >= self.dim() {
            return Err(Error::InvalidParameter(format!(
                "kept dimension {kept} must satisfy 1 <= M < {}",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// The PCA rotation of an observation covariance with `kept` retained components.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaDecomposition {
    /// Eigenvectors of `C_X` as columns, in [`SymmetricEigen`] order.
    pub rotation: DMatrix<f64>,
    /// Descending eigenvalues of `C_X`.
    pub eigenvalues: Vec<f64>,
    pub kept: usize,
}

impl PcaDecomposition {
    /// `I_M Wᵀ`: the `kept × N` projection.
    pub fn projection(&self) -> DMatrix<f64> {
        self.rotation.columns(0, self.kept).transpose()
    }

    /// `Wᵀ C W`.
    pub fn rotate(&self, cov: &DMatrix<f64>) -> DMatrix<f64> {
        self.rotation.transpose() * cov * &self.rotation
    }
}

pub fn pca_decompose(obs_cov: &DMatrix<f64>, kept: usize) -> Result<PcaDecomposition> {
    let eig = symmetric_eigen(obs_cov)?;
    if kept == 0 || kept >= obs_cov.nrows() {
        return Err(Error::InvalidParameter(format!(
            "kept dimension {kept} must satisfy 1 <= M < {}",
            obs_cov.nrows()
        )));
    }
    Ok(PcaDecomposition {
        rotation: eig.vectors,
        eigenvalues: eig.values,
        kept,
    })
}

/// ln det of a symmetric positive definite matrix.
pub fn log_det_spd(m: &DMatrix<f64>, what: &str) -> Result<f64> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular(format!("{what} is not positive definite")))?;
    let log_det = 2.0
        * chol
            .l_dirty()
            .diagonal()
            .iter()
            .map(|d| d.ln())
            .sum::<f64>();
    if !log_det.is_finite() || log_det < DETERMINANT_FLOOR.ln() {
        return Err(Error::Singular(format!(
            "{what} has determinant below {DETERMINANT_FLOOR:e}"
        )));
    }
    Ok(log_det)
}

/// Covariance of the trailing block given the leading `kept` coordinates.
pub fn schur_complement(cov: &DMatrix<f64>, kept: usize) -> Result<DMatrix<f64>> {
    let n = cov.nrows();
    let c = n - kept;
    let a_mm = cov.view((0, 0), (kept, kept)).into_owned();
    let a_mc = cov.view((0, kept), (kept, c)).into_owned();
    let a_cc = cov.view((kept, kept), (c, c)).into_owned();
    let chol = a_mm
        .cholesky()
        .ok_or_else(|| Error::Singular("kept-block covariance is not positive definite".into()))?;
    let solved = chol.solve(&a_mc);
    let s = a_cc - a_mc.transpose() * solved;
    Ok((&s + s.transpose()) * 0.5)
}

/// Gaussian conditional entropy h(trailing | leading) up to the shared
/// `(N − M)/2 · ln 2πe` term.
fn conditional_log_det(cov: &DMatrix<f64>, kept: usize, what: &str) -> Result<f64> {
    log_det_spd(&schur_complement(cov, kept)?, what)
}

/// I(S;X) − I(S;P X) for a linear map `P` (rows = retained outputs).
pub fn projection_loss(model: &LinearGaussianModel, projection: &DMatrix<f64>) -> Result<f64> {
    if projection.ncols() != model.dim() {
        return Err(Error::Shape(format!(
            "projection has {} columns for dimension {}",
            projection.ncols(),
            model.dim()
        )));
    }
    let px = projection * model.obs_cov() * projection.transpose();
    let pn = projection * model.noise_cov() * projection.transpose();
    let full = log_det_spd(model.obs_cov(), "observation covariance")?
        - log_det_spd(model.noise_cov(), "noise covariance")?;
    let reduced = log_det_spd(&px, "projected observation covariance")?
        - log_det_spd(&pn, "projected noise covariance")?;
    Ok(0.5 * (full - reduced))
}

/// Loss of keeping only the coordinates in `subset`.
pub fn subset_loss(model: &LinearGaussianModel, subset: &[usize]) -> Result<f64> {
    let n = model.dim();
    if subset.iter().any(|&i| i >= n) {
        return Err(Error::InvalidParameter(format!(
            "subset {subset:?} out of range for dimension {n}"
        )));
    }
    let pick = |m: &DMatrix<f64>| {
        DMatrix::from_fn(subset.len(), subset.len(), |i, j| m[(subset[i], subset[j])])
    };
    let full = log_det_spd(model.obs_cov(), "observation covariance")?
        - log_det_spd(model.noise_cov(), "noise covariance")?;
    let reduced = log_det_spd(&pick(model.obs_cov()), "kept observation block")?
        - log_det_spd(&pick(model.noise_cov()), "kept noise block")?;
    Ok(0.5 * (full - reduced))
}

/// Relevant loss (nats) of keeping the top `kept` principal components,
/// assuming Gaussian signal and noise.
///
/// Computed as h(Y_c|Y_M) − h(Ñ_c|Ñ_M) from Schur complements in the PCA
/// frame and verified against [`projection_loss`].
pub fn gaussian_relevant_loss(model: &LinearGaussianModel, kept: usize) -> Result<f64> {
    model.check_kept(kept)?;
    let pca = pca_decompose(model.obs_cov(), kept)?;
    let output = conditional_log_det(
        &pca.rotate(model.obs_cov()),
        kept,
        "output conditional covariance",
    )?;
    let noise = conditional_log_det(
        &pca.rotate(model.noise_cov()),
        kept,
        "noise conditional covariance",
    )?;
    let loss = 0.5 * (output - noise);
    let check = projection_loss(model, &pca.projection())?;
    if (loss - check).abs() > 1e-8 * loss.abs().max(1.0) {
        return Err(Error::CrossCheck(format!(
            "conditional-entropy loss {loss} vs mutual-information loss {check}"
        )));
    }
    Ok(loss)
}

/// ½ Σ_{i>M} ln(λᵢ/μ) for spherical noise `μ I`.
pub fn iid_gaussian_bound(model: &LinearGaussianModel, kept: usize) -> Result<f64> {
    model.check_kept(kept)?;
    let mu = model
        .spherical_noise_variance()
        .ok_or_else(|| Error::Hypothesis("noise covariance is not a scaled identity".into()))?;
    let lambda = symmetric_eigen(model.obs_cov())?.values;
    Ok(0.5 * lambda[kept..].iter().map(|l| (l / mu).ln()).sum::<f64>())
}

/// ½ Σ_{i>M} ln(μ₁/μᵢ) with `μ` the descending noise eigenvalues; needs rank(C_S) ≤ M.
pub fn eigen_bound(model: &LinearGaussianModel, kept: usize) -> Result<f64> {
    model.check_kept(kept)?;
    let rank = model.signal_rank()?;
    if rank > kept {
        return Err(Error::Hypothesis(format!(
            "signal covariance has rank {rank} > kept dimension {kept}"
        )));
    }
    let mu = symmetric_eigen(model.noise_cov())?.values;
    if mu[mu.len() - 1] <= NOISE_EIGEN_FLOOR {
        return Err(Error::Singular("noise covariance is not full rank".into()));
    }
    Ok(0.5 * mu[kept..].iter().map(|m| (mu[0] / m).ln()).sum::<f64>())
}

/// Minimum-loss coordinate subset of size `kept`, ties to the lexicographically first.
pub fn best_coordinate_subset(
    model: &LinearGaussianModel,
    kept: usize,
) -> Result<(Vec<usize>, f64)> {
    model.check_kept(kept)?;
    if model.dim() > MAX_SUBSET_DIM {
        return Err(Error::InvalidParameter(format!(
            "exhaustive subset search limited to dimension {MAX_SUBSET_DIM}, got {}",
            model.dim()
        )));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for subset in (0..model.dim()).combinations(kept) {
        let loss = subset_loss(model, &subset)?;
        let better = match &best {
            None => true,
            Some((_, b)) => loss < b - 1e-12,
        };
        if better {
            best = Some((subset, loss));
        }
    }
    Ok(best.expect("at least one subset"))
}

/// Eigenvalue sets entering the low-rank bound, all descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectra {
    /// λ: observation covariance
    pub observation: Vec<f64>,
    /// μ: noise covariance
    pub noise: Vec<f64>,
    /// ν: signal covariance
    pub signal: Vec<f64>,
    /// μ̃: top-left `kept × kept` block of `Wᵀ C_N W`
    pub kept_noise: Vec<f64>,
}

impl Spectra {
    /// Largest violation of μ_{i+N−M} ≤ μ̃ᵢ ≤ μᵢ (zero when interlacing holds).
    pub fn interlacing_violation(&self) -> f64 {
        let n = self.noise.len();
        let m = self.kept_noise.len();
        (0..m)
            .map(|i| {
                let lower = self.noise[i + n - m] - self.kept_noise[i];
                let upper = self.kept_noise[i] - self.noise[i];
                lower.max(upper).max(0.0)
            })
            .fold(0.0, f64::max)
    }

    /// Largest violation of λᵢ ≤ νᵢ + μ₁.
    pub fn weyl_violation(&self) -> f64 {
        self.observation
            .iter()
            .zip(&self.signal)
            .map(|(l, nu)| (l - nu - self.noise[0]).max(0.0))
            .fold(0.0, f64::max)
    }
}

pub fn spectra(model: &LinearGaussianModel, kept: usize) -> Result<Spectra> {
    model.check_kept(kept)?;
    let pca = pca_decompose(model.obs_cov(), kept)?;
    let rotated_noise = pca.rotate(model.noise_cov());
    let block = rotated_noise.view((0, 0), (kept, kept)).into_owned();
    let block = (&block + block.transpose()) * 0.5;
    Ok(Spectra {
        observation: pca.eigenvalues.clone(),
        noise: symmetric_eigen(model.noise_cov())?.values,
        signal: symmetric_eigen(model.signal_cov())?.values,
        kept_noise: symmetric_eigen(&block)?.values,
    })
}
