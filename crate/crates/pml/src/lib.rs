//! File formats, the benchmark harness and the `pml` command line on top of
//! `pml-core`.

pub mod bench;
pub mod error;
pub mod io;

pub use error::{Error, Result};
