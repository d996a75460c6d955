//! Relevant information loss of deterministic systems.

pub mod channel;
pub mod error;
pub mod estimators;
pub mod ib;
pub mod info;
pub mod pca;
pub mod random;
pub mod selftest;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
