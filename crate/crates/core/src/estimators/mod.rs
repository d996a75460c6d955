//! Sample-based estimators: k-nearest-neighbor differential entropy, the
//! conditional divergence from Gaussianity, a seeded check of the Gaussianity
//! ordering behind the spherical-noise PCA bound, and relevant loss under
//! successively refined partitions of the relevant variable.

mod entropy;
mod hypothesis;
mod kdtree;
mod partition;
mod samples;

pub use entropy::{
    conditional_divergence_j, conditional_divergence_j_with, gaussian_entropy, knn_entropy,
    ln_unit_ball_volume, DEFAULT_NEIGHBORS, DUPLICATE_JITTER, MAX_DUPLICATE_FRACTION,
    MIN_DIVERGENCE_SAMPLES,
};
pub use hypothesis::{thm1_hypothesis_check, HypothesisCheck, Verdict, REPLICATES};
pub use partition::{equal_mass_cells, refined_partition_loss};
pub use samples::{covariance_factor, SampleSet, SourceFamily, SourceSpec};
