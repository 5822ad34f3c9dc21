//! Joint spectral embedding of correlated random dot product graphs.
//!
//! Samplers for jointly correlated RDPGs with point-mass latent
//! distributions, generalized omnibus matrices described by a coefficient
//! tensor, exact evaluation of the limiting covariances and induced
//! correlations of their embeddings, and the estimators and downstream
//! procedures used to check them empirically.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*F64` aliases below name the double-precision instantiations.
//!
//! ```
//! use omnicorr::{induced_correlation, CorrelationSpec, OmnibusCoefficients};
//!
//! let c = OmnibusCoefficients::<f64>::classical(3).unwrap();
//! let r = CorrelationSpec::identity(3);
//! let rho = induced_correlation(&c.alpha_weights(), &r, 0, 1).unwrap();
//! assert!((rho.total - 0.75).abs() < 1e-15);
//! ```

pub mod error;
pub mod inference;
pub mod matrix;
pub mod models;
pub mod omnibus;
pub mod rng;
pub mod scalar;
pub mod spectral;
pub mod theory;

pub use error::{Error, InferenceError, ModelError, OmnibusError, SpectralError, TheoryError};
pub use inference::{
    block_distance_matrix, clustering_error, edge_correlation_estimate, estimate_p, gmm_cluster, knn_classify,
    mean_graph_embedding, omnibus_average_embedding, pearson_correlation, procrustes_average_embedding,
    ClusteringResult, ProbabilityEstimate,
};
pub use matrix::{Matrix, SymMatrix};
pub use models::{
    sample_forward, sample_generator, sample_latent, sample_rdpg, sbm_to_mixture, Adjacency, CorrelationSpec,
    GraphCollection, LatentPositions, PointMassMixture,
};
pub use omnibus::{
    build_omnibus, expected_omnibus, omni_embed, AlphaWeights, BlockEmbedding, OmnibusCoefficients, ValidationReport,
};
pub use rng::ReplicateStreams;
pub use scalar::Scalar;
pub use spectral::{ase, cmds, eig_top_by_magnitude, elbow_dimension, procrustes, spectral_norm, Embedding, SpectralPair};
pub use theory::{
    avg_embedding_covariance, correlation_profile, cov_block_difference, cov_pairwise_rho, cov_single_residual,
    effective_sample_size, induced_correlation, sigma_x, CorrelationProfile, InducedCorrelation, LimitCovariance,
};

pub type MatrixF64 = Matrix<f64>;
pub type SymMatrixF64 = SymMatrix<f64>;
pub type EmbeddingF64 = Embedding<f64>;
pub type BlockEmbeddingF64 = BlockEmbedding<f64>;
pub type MixtureF64 = PointMassMixture<f64>;
pub type LatentF64 = LatentPositions<f64>;
pub type CorrelationSpecF64 = CorrelationSpec<f64>;
pub type GraphCollectionF64 = GraphCollection<f64>;
pub type CoefficientsF64 = OmnibusCoefficients<f64>;
pub type AlphaWeightsF64 = AlphaWeights<f64>;
pub type LimitCovarianceF64 = LimitCovariance<f64>;
