pub mod adapted;
pub mod canonical;
pub mod crystal;
pub mod cartan;
pub mod error;
pub mod freealg;
pub mod highest_weight;
pub mod linalg;
pub mod pbw;
pub mod scalar;
pub mod session;
pub mod suites;

pub use error::{Error, Result};

/// Identifies the conventions results depend on. Persisted results keyed by an
/// older tag must be recomputed.
pub const ENGINE_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "/T''(1)/pairing=normalized/dual=q0-unit/tensor=kashiwara"
);
