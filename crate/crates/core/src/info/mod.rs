//! Exact information measures on finite discrete distributions.
//!
//! All quantities are in bits. The relevant information loss of a
//! deterministic map `Y = g(X)` with respect to `S` is the conditional mutual
//! information `I(X;S|Y)`; the total loss is `H(X|Y)` and the irrelevant loss
//! is `H(X|Y,S)`, so that total = relevant + irrelevant.

mod joint;
mod loss;
mod map;
mod measures;
mod sparse;

pub use joint::{JointDistribution, VariableSpec, MASS_TOLERANCE};
pub use loss::{loss_report, push_map, LossReport, IDENTITY_TOLERANCE};
pub use map::DeterministicMap;
pub use measures::{
    binary_entropy, bits_to_nats, conditional_entropy, conditional_mutual_information, entropy,
    mutual_information, nats_to_bits,
};
pub use sparse::SparseJoint;
