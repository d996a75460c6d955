use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::Rng;
use statrs::function::gamma::{digamma, ln_gamma};

use super::kdtree::KdTree;
use super::samples::SampleSet;
use crate::error::{Error, Result};
use crate::pca::{log_det_spd, schur_complement};
use crate::random::seeded;

pub const DEFAULT_NEIGHBORS: usize = 4;
/// Largest admissible fraction of points that repeat an earlier point.
pub const MAX_DUPLICATE_FRACTION: f64 = 0.5;
/// Relative size of the perturbation applied to repeated points.
pub const DUPLICATE_JITTER: f64 = 1e-12;
/// Fewest points accepted by [`conditional_divergence_j`].
pub const MIN_DIVERGENCE_SAMPLES: usize = 1000;

/// ln of the volume of the Euclidean unit ball in `d` dimensions.
pub fn ln_unit_ball_volume(d: usize) -> f64 {
    0.5 * d as f64 * std::f64::consts::PI.ln() - ln_gamma(0.5 * d as f64 + 1.0)
}

/// Differential entropy (nats) of a `d`-dimensional Gaussian with covariance `cov`.
pub fn gaussian_entropy(cov: &DMatrix<f64>) -> Result<f64> {
    let d = cov.nrows() as f64;
    Ok(0.5
        * (d * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln()
            + log_det_spd(cov, "covariance")?))
}

/// Exact repeats after the first occurrence receive a seeded perturbation of
/// relative size [`DUPLICATE_JITTER`].
fn dejitter(samples: &SampleSet) -> Result<Option<Vec<f64>>> {
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut repeats = Vec::new();
    for (i, p) in samples.points().enumerate() {
        // +0.0 and -0.0 are the same point
        let key: Vec<u64> = p.iter().map(|v| (v + 0.0).to_bits()).collect();
        if seen.insert(key, i).is_some() {
            repeats.push(i);
        }
    }
    if repeats.is_empty() {
        return Ok(None);
    }
    if repeats.len() as f64 > MAX_DUPLICATE_FRACTION * samples.len() as f64 {
        return Err(Error::DegenerateSamples(format!(
            "{} of {} points repeat an earlier point",
            repeats.len(),
            samples.len()
        )));
    }
    let mut rng = seeded(samples.seed() ^ 0x6a09_e667_f3bc_c908);
    let mut data = samples.data().to_vec();
    let dim = samples.dim();
    for i in repeats {
        for v in &mut data[i * dim..(i + 1) * dim] {
            *v += DUPLICATE_JITTER * v.abs().max(1.0) * rng.random_range(-1.0..1.0);
        }
    }
    Ok(Some(data))
}

/// Kozachenko–Leonenko k-nearest-neighbor differential entropy estimate (nats):
/// `ψ(n) − ψ(k) + ln V_d + (d/n) Σ ln εᵢ` with `εᵢ` the Euclidean distance
/// from point `i` to its `k`-th neighbor.
pub fn knn_entropy(samples: &SampleSet, k: usize) -> Result<f64> {
    let n = samples.len();
    let d = samples.dim();
    if k == 0 {
        return Err(Error::InvalidParameter(
            "neighbor count must be at least 1".into(),
        ));
    }
    if n <= k + 1 {
        return Err(Error::DegenerateSamples(format!(
            "{n} points are too few for k = {k}"
        )));
    }
    if n < 2 * (d + 1) {
        return Err(Error::DegenerateSamples(format!(
            "{n} points are too few for dimension {d}"
        )));
    }
    let jittered = dejitter(samples)?;
    let data = jittered.as_deref().unwrap_or(samples.data());
    let tree = KdTree::new(d, data);
    let mut log_sum = 0.0;
    for i in 0..n {
        let eps = tree.kth_distance(i, k);
        if eps <= 0.0 {
            return Err(Error::DegenerateSamples(format!(
                "point {i} has {k} coincident neighbors"
            )));
        }
        log_sum += eps.ln();
    }
    Ok(digamma(n as f64) - digamma(k as f64)
        + ln_unit_ball_volume(d)
        + d as f64 * log_sum / n as f64)
}

/// Estimated `J(X|Y) = h(X_G|Y_G) − h(X|Y)` in nats, where `X` is the first
/// `x_dims` coordinates, `Y` the rest, and `(X_G, Y_G)` the Gaussian with the
/// same mean and covariance.
pub fn conditional_divergence_j(samples: &SampleSet, x_dims: usize) -> Result<f64> {
    conditional_divergence_j_with(samples, x_dims, DEFAULT_NEIGHBORS)
}

pub fn conditional_divergence_j_with(samples: &SampleSet, x_dims: usize, k: usize) -> Result<f64> {
    let d = samples.dim();
    if x_dims == 0 || x_dims > d {
        return Err(Error::Shape(format!(
            "{x_dims} leading coordinates out of range for dimension {d}"
        )));
    }
    if samples.len() < MIN_DIVERGENCE_SAMPLES {
        return Err(Error::DegenerateSamples(format!(
            "{} points, need at least {MIN_DIVERGENCE_SAMPLES}",
            samples.len()
        )));
    }
    // reorder so that Y leads and X trails, matching the Schur complement layout
    let order: Vec<usize> = (x_dims..d).chain(0..x_dims).collect();
    let cov = samples.select(&order)?.covariance();
    let y_dims = d - x_dims;
    let gaussian = if y_dims == 0 {
        gaussian_entropy(&cov)?
    } else {
        gaussian_entropy(&schur_complement(&cov, y_dims)?)?
    };
    let joint = knn_entropy(samples, k)?;
    let conditional = if y_dims == 0 {
        joint
    } else {
        joint - knn_entropy(&samples.select(&(x_dims..d).collect::<Vec<_>>())?, k)?
    };
    Ok(gaussian - conditional)
}
