//! Maslov-type index iteration for symplectic paths and the common index jump search.
//!
//! The crate is organised bottom-up:
//!
//! - [`numeric`]: exact rationals and rationality-tagged high-precision reals.
//! - [`normal_forms`]: symplectic matrices, basic normal forms, `⋄`, `D_ω`, `ν_ω`.
//! - [`iteration`]: closed-form `i(γ, m)`, `ν(γ, m)`, mean index and splitting numbers.
//! - [`oracle`]: an independent numerical index of sampled paths.
//! - [`jump`]: the torus vector, the `N` search and its verification reports.
//! - [`ellipsoid`]: the non-resonant ellipsoid model and the end-to-end pipeline.

pub mod ellipsoid;
pub mod error;
pub mod iteration;
pub mod jump;
pub mod normal_forms;
pub mod numeric;
pub mod oracle;
pub mod selftest;

pub use error::{Error, Result};

/// Version tag carried by every JSON report.
pub const SCHEMA_VERSION: u32 = 1;
