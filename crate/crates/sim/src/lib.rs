//! Monte-Carlo harness for the `omnicorr` limit theory.
//!
//! Experiments are described by an [`ExperimentConfig`], run by
//! [`experiments::run`], and produce a [`MonteCarloReport`] that can be
//! written with [`emit_report`]. Replicates run in parallel on the current
//! rayon pool; each draws from its own `(seed, replicate)` streams and
//! results are folded in replicate order, so output does not depend on the
//! thread count.

pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod stats;

pub use config::{ExperimentConfig, ExperimentKind, Method, Strategy};
pub use error::SimError;
pub use experiments::run;
pub use report::{emit_report, Check, Format, MonteCarloReport};
