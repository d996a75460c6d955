use serde::{Deserialize, Serialize};

use super::entropy::{conditional_divergence_j, MIN_DIVERGENCE_SAMPLES};
use super::samples::{covariance_factor, SampleSet, SourceSpec};
use crate::error::{Error, Result};
use crate::pca::{pca_decompose, LinearGaussianModel};

/// Independent replicates used for the standard error.
pub const REPLICATES: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// `J_noise < J_output` by more than two standard errors.
    Holds,
    /// The difference is within two standard errors.
    Tie,
    /// `J_noise > J_output` by more than two standard errors.
    Violated,
}

/// Outcome of comparing `J(Ñ_c|Ñ_M)` with `J(Y_c|Y_M)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub j_noise: f64,
    pub j_output: f64,
    /// Standard error of `j_noise − j_output` across replicates.
    pub std_error: f64,
    pub verdict: Verdict,
    /// False only for [`Verdict::Violated`].
    pub satisfied: bool,
}

/// Draws `(S, N)` with the model covariances and the given coordinate shapes.
fn draw(
    model: &LinearGaussianModel,
    source: &SourceSpec,
    noise: &SourceSpec,
    n: usize,
    seed: u64,
) -> Result<(SampleSet, SampleSet)> {
    let dim = model.dim();
    let zero = vec![0.0; dim];
    let s = source
        .sample(n, seed.wrapping_mul(2))?
        .affine(&covariance_factor(model.signal_cov())?, &zero)?;
    let nz = noise
        .sample(n, seed.wrapping_mul(2).wrapping_add(1))?
        .affine(&covariance_factor(model.noise_cov())?, &zero)?;
    Ok((s, nz))
}

/// `(J(Ñ_c|Ñ_M), J(Y_c|Y_M))` from one draw.
fn divergences(
    model: &LinearGaussianModel,
    source: &SourceSpec,
    noise: &SourceSpec,
    kept: usize,
    n: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let pca = pca_decompose(model.obs_cov(), kept)?;
    let (s, nz) = draw(model, source, noise, n, seed)?;
    let wt = pca.rotation.transpose();
    let zero = vec![0.0; model.dim()];
    let y = s.add(&nz)?.affine(&wt, &zero)?;
    let rotated_noise = nz.affine(&wt, &zero)?;
    // dropped coordinates first, as the conditioned-on block trails
    let order: Vec<usize> = (kept..model.dim()).chain(0..kept).collect();
    let dropped = model.dim() - kept;
    let j_noise = conditional_divergence_j(&rotated_noise.select(&order)?, dropped)?;
    let j_output = conditional_divergence_j(&y.select(&order)?, dropped)?;
    Ok((j_noise, j_output))
}

/// Tests the Gaussianity ordering `J(Ñ_c|Ñ_M) ≤ J(Y_c|Y_M)` behind the
/// spherical-noise bound, with `S = A Z_S`, `N = B Z_N`, `A Aᵀ = C_S`,
/// `B Bᵀ = C_N` and `Z_S`, `Z_N` drawn from `source` and `noise`.
///
/// The point estimate uses `seed`; the standard error is the spread of the
/// difference over [`REPLICATES`] independent draws seeded `seed + 1, …`.
pub fn thm1_hypothesis_check(
    model: &LinearGaussianModel,
    source: &SourceSpec,
    noise: &SourceSpec,
    kept: usize,
    n: usize,
    seed: u64,
) -> Result<HypothesisCheck> {
    for (what, spec) in [("source", source), ("noise", noise)] {
        if spec.dim != model.dim() {
            return Err(Error::Shape(format!(
                "{what} dimension {} differs from model dimension {}",
                spec.dim,
                model.dim()
            )));
        }
    }
    if n < MIN_DIVERGENCE_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_DIVERGENCE_SAMPLES} samples, got {n}"
        )));
    }
    let (j_noise, j_output) = divergences(model, source, noise, kept, n, seed)?;
    let diffs = (1..=REPLICATES)
        .map(|r| {
            divergences(model, source, noise, kept, n, seed.wrapping_add(r)).map(|(a, b)| a - b)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (diffs.len() as f64 - 1.0);
    let std_error = var.sqrt();
    let gap = j_noise - j_output;
    let verdict = if gap > 2.0 * std_error {
        Verdict::Violated
    } else if gap < -2.0 * std_error {
        Verdict::Holds
    } else {
        Verdict::Tie
    };
    Ok(HypothesisCheck {
        j_noise,
        j_output,
        std_error,
        verdict,
        satisfied: verdict != Verdict::Violated,
    })
}
