//! Approximate profile maximum likelihood.
//!
//! The pipeline: a convex relaxation over level-set matrices (dual barrier
//! Newton, then a Frank-Wolfe polish), a row sparsifier, matrix rounding via
//! modular degree subgraphs, and level-set repair that turns the rounded
//! matrix back into a discrete pseudo-distribution. `pseudo` builds entropy
//! and distance-to-uniformity estimators on top.
//!
//! The crate is `no_std` and needs only `alloc`.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod approx;
pub mod distribution;
pub mod error;
pub mod grid;
pub mod level_sets;
pub mod linalg;
pub mod math;
pub mod matrix;
pub mod oracle;
pub mod profile;
pub mod pseudo;
pub mod relaxation;
pub mod rounding;
pub mod sparsify;
pub mod synth;

pub use distribution::{Distribution, PseudoDistribution};
pub use error::{PmlError, Result};
pub use grid::DiscretizationGrid;
pub use matrix::Matrix;
pub use profile::{Profile, PseudoProfile};
