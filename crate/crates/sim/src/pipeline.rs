//! Sampling, embedding and alignment steps shared by the experiments.

use omnicorr::inference::average_blocks;
use omnicorr::{
    ase, build_omnibus, mean_graph_embedding, omni_embed, procrustes, procrustes_average_embedding, sample_forward,
    sample_generator, sample_latent, CoefficientsF64, EmbeddingF64, GraphCollectionF64, Matrix, MixtureF64,
    ReplicateStreams, SymMatrixF64,
};

use crate::config::{Method, Sampler, Strategy};
use crate::error::SimError;

/// Latent positions and `m` graphs for one replicate.
pub fn sample_collection(
    mixture: &MixtureF64,
    n: usize,
    sampler: &Sampler,
    streams: &ReplicateStreams,
) -> Result<GraphCollectionF64, SimError> {
    let latent = sample_latent(mixture, n, &mut streams.latent());
    let graphs = match sampler {
        Sampler::Forward(rho) => sample_forward(&latent, rho, streams)?,
        Sampler::Generator(nu) => sample_generator(&latent, nu, streams)?,
    };
    Ok(graphs)
}

fn embedding(m: Matrix<f64>) -> Result<EmbeddingF64, SimError> {
    Ok(EmbeddingF64::new(m)?)
}

/// `e` rotated onto `target` by orthogonal Procrustes.
pub fn align_to(e: &EmbeddingF64, target: &Matrix<f64>) -> Result<Matrix<f64>, SimError> {
    if e.dim() != target.cols() {
        return Err(SimError::config(format!(
            "alignment needs embedding dimension {} to equal the latent dimension {}",
            e.dim(),
            target.cols()
        )));
    }
    let target = embedding(target.clone())?;
    Ok(e.rotate(&procrustes(e, &target)?)?.into_coords())
}

/// Per-graph estimates of `X` in the frame of `x`.
///
/// An omnibus embedding is aligned as a whole: one rotation of the
/// `mn × d` embedding onto `1_m ⊗ X`. Separate embeddings are each aligned
/// to `X`.
pub fn aligned_blocks(
    method: &Method,
    graphs: &[SymMatrixF64],
    x: &Matrix<f64>,
    d: usize,
) -> Result<Vec<Matrix<f64>>, SimError> {
    match method {
        Method::Omnibus(c) => {
            let m = graphs.len();
            let e = omni_embed(&build_omnibus(c, graphs)?, d, m)?;
            let z = Matrix::filled(m, 1, 1.0).kron(x);
            let joint = align_to(e.embedding(), &z)?;
            let n = x.rows();
            Ok((0..m).map(|s| joint.submatrix(s * n, 0, n, d)).collect())
        }
        Method::Separate(_) => graphs.iter().map(|g| align_to(&ase(g, d)?, x)).collect(),
    }
}

/// A single estimate of `X` built from all graphs by `strategy`, in the
/// frame of `x`. `omni-avg` uses `method` when it is an omnibus and the
/// classical omnibus otherwise.
pub fn averaged_embedding(
    strategy: Strategy,
    method: &Method,
    graphs: &[SymMatrixF64],
    x: &Matrix<f64>,
    d: usize,
) -> Result<Matrix<f64>, SimError> {
    let e = match strategy {
        Strategy::OmniAvg => {
            let c = match method {
                Method::Omnibus(c) => c.clone(),
                Method::Separate(m) => CoefficientsF64::classical(*m)?,
            };
            average_blocks(&omni_embed(&build_omnibus(&c, graphs)?, d, graphs.len())?)
        }
        Strategy::MeanGraph => mean_graph_embedding(graphs, d)?,
        Strategy::ProcrustesAvg if graphs.len() == 1 => ase(&graphs[0], d)?,
        Strategy::ProcrustesAvg => procrustes_average_embedding(graphs, d)?,
        Strategy::Single => ase(&graphs[0], d)?,
    };
    align_to(&e, x)
}

/// `√n (a − b)` for row `i`.
pub fn scaled_row_difference(a: &Matrix<f64>, b: &Matrix<f64>, i: usize) -> Vec<f64> {
    let s = (a.rows() as f64).sqrt();
    a.row(i).iter().zip(b.row(i)).map(|(x, y)| s * (x - y)).collect()
}
