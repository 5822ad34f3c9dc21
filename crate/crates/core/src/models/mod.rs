//! Latent-position distributions and samplers for single and jointly
//! correlated random dot product graphs.

mod correlation;
pub mod io;
mod mixture;
mod sampling;

pub use correlation::CorrelationSpec;
pub use mixture::{sbm_to_mixture, LatentPositions, PointMassMixture};
pub use sampling::{
    empirical_edge_correlation, sample_forward, sample_generator, sample_latent, sample_rdpg, Adjacency,
    GraphCollection,
};
