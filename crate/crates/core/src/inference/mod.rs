//! Estimators and downstream procedures on embedded graphs: trimmed
//! edge-probability estimates, edge-correlation estimators, multi-graph
//! embedding strategies, clustering and nearest-neighbour classification.

mod cluster;

use crate::error::InferenceError;
use crate::matrix::{Matrix, SymMatrix};
use crate::omnibus::{build_omnibus, omni_embed, BlockEmbedding, OmnibusCoefficients};
use crate::scalar::Scalar;
use crate::spectral::{ase, eig_top_by_magnitude, procrustes, Embedding};

pub use cluster::{clustering_error, gmm_cluster, knn_classify, ClusteringResult};

/// Trimming level used when none is given.
pub const DEFAULT_EPSILON: f64 = 1e-4;

/// Edge-probability estimate with entries trimmed to `[ε, 1−ε]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityEstimate<T> {
    p_hat: SymMatrix<T>,
    epsilon: T,
}

impl<T: Scalar> ProbabilityEstimate<T> {
    pub fn n(&self) -> usize {
        self.p_hat.order()
    }

    pub fn matrix(&self) -> &SymMatrix<T> {
        &self.p_hat
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.p_hat[(i, j)]
    }
}

fn check_epsilon<T: Scalar>(epsilon: T) -> Result<(), InferenceError> {
    if epsilon > T::zero() && epsilon < T::lit(0.5) {
        Ok(())
    } else {
        Err(InferenceError::EpsilonOutOfRange(epsilon.to_f64_lossy()))
    }
}

fn check_same_shape<T: Scalar>(a: &SymMatrix<T>, b: &SymMatrix<T>) -> Result<(), InferenceError> {
    if a.order() != b.order() {
        return Err(InferenceError::ShapeMismatch {
            expected: (a.order(), a.order()),
            found: (b.order(), b.order()),
        });
    }
    Ok(())
}

/// `P̃ = X̂ D̂ X̂ᵀ` from the rank-`d` spectral truncation, where `D̂` holds the
/// eigenvalue signs, then trimmed entrywise to `[ε, 1−ε]`.
pub fn estimate_p<T: Scalar>(a: &SymMatrix<T>, d: usize, epsilon: T) -> Result<ProbabilityEstimate<T>, InferenceError> {
    check_epsilon(epsilon)?;
    let pair = eig_top_by_magnitude(a, d)?;
    let lam: Vec<T> = (0..d).map(|k| pair.eigenvalue(k)).collect();
    let v = &pair.vectors;
    let hi = T::one() - epsilon;
    let p_hat = SymMatrix::from_upper(a.order(), |i, j| {
        let (ri, rj) = (v.row(i), v.row(j));
        let raw: T = (0..d).map(|k| lam[k] * ri[k] * rj[k]).sum();
        if raw <= epsilon {
            epsilon
        } else if raw < hi {
            raw
        } else {
            hi
        }
    })?;
    Ok(ProbabilityEstimate { p_hat, epsilon })
}

/// Plug-in edge correlation: the mean over `i < j` of standardized residual
/// products `(A_ij − P̂_ij)(B_ij − Q̂_ij) / √(P̂(1−P̂) Q̂(1−Q̂))`.
pub fn edge_correlation_estimate<T: Scalar>(
    a: &SymMatrix<T>,
    b: &SymMatrix<T>,
    d: usize,
    epsilon: T,
) -> Result<T, InferenceError> {
    check_same_shape(a, b)?;
    let pa = estimate_p(a, d, epsilon)?;
    let pb = estimate_p(b, d, epsilon)?;
    Ok(plug_in_correlation(a, b, &pa, &pb))
}

/// The plug-in sum with precomputed probability estimates.
pub fn plug_in_correlation<T: Scalar>(
    a: &SymMatrix<T>,
    b: &SymMatrix<T>,
    pa: &ProbabilityEstimate<T>,
    pb: &ProbabilityEstimate<T>,
) -> T {
    let n = a.order();
    let mut total = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let (p, q) = (pa.get(i, j), pb.get(i, j));
            let va = p * (T::one() - p);
            let vb = q * (T::one() - q);
            total = total + (a[(i, j)] - p) * (b[(i, j)] - q) / (va * vb).sqrt();
        }
    }
    total / T::count(n * (n - 1) / 2)
}

/// Pearson correlation of the upper-triangle edge indicators.
pub fn pearson_correlation<T: Scalar>(a: &SymMatrix<T>, b: &SymMatrix<T>) -> Result<T, InferenceError> {
    check_same_shape(a, b)?;
    let n = a.order();
    let pairs = T::count(n * n.saturating_sub(1) / 2);
    let upper = |m: &SymMatrix<T>| -> T { (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|ij| m[ij]).sum() };
    let (mean_a, mean_b) = (upper(a) / pairs, upper(b) / pairs);
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for i in 0..n {
        for j in (i + 1)..n {
            let (x, y) = (a[(i, j)] - mean_a, b[(i, j)] - mean_b);
            sab = sab + x * y;
            saa = saa + x * x;
            sbb = sbb + y * y;
        }
    }
    if saa == T::zero() || sbb == T::zero() {
        return Err(InferenceError::ZeroVariance);
    }
    Ok(sab / (saa * sbb).sqrt())
}

fn check_graphs<T: Scalar>(graphs: &[SymMatrix<T>], min: usize) -> Result<usize, InferenceError> {
    if graphs.len() < min || graphs.is_empty() {
        return Err(InferenceError::TooFewGraphs {
            min: min.max(1),
            found: graphs.len(),
        });
    }
    let n = graphs[0].order();
    for g in graphs {
        check_same_shape(&graphs[0], g)?;
    }
    Ok(n)
}

/// ASE of the mean graph.
pub fn mean_graph_embedding<T: Scalar>(graphs: &[SymMatrix<T>], d: usize) -> Result<Embedding<T>, InferenceError> {
    let n = check_graphs(graphs, 1)?;
    let inv = T::one() / T::count(graphs.len());
    let mean = SymMatrix::from_upper(n, |i, j| graphs.iter().map(|g| g[(i, j)]).sum::<T>() * inv)?;
    Ok(ase(&mean, d)?)
}

/// Embeds each graph separately, aligns every embedding to graph `hub` by
/// orthogonal Procrustes, and averages.
pub fn procrustes_average_embedding_to<T: Scalar>(
    graphs: &[SymMatrix<T>],
    d: usize,
    hub: usize,
) -> Result<Embedding<T>, InferenceError> {
    let n = check_graphs(graphs, 2)?;
    if hub >= graphs.len() {
        return Err(InferenceError::TooFewGraphs {
            min: hub + 1,
            found: graphs.len(),
        });
    }
    let embeddings = graphs.iter().map(|g| ase(g, d)).collect::<Result<Vec<_>, _>>()?;
    let target = &embeddings[hub];
    let mut sum = Matrix::zeros(n, d);
    for (k, e) in embeddings.iter().enumerate() {
        let aligned = if k == hub {
            e.clone()
        } else {
            e.rotate(&procrustes(e, target)?)?
        };
        sum = sum.add(aligned.coords())?;
    }
    Ok(Embedding::new(sum.scale(T::one() / T::count(graphs.len())))?)
}

/// [`procrustes_average_embedding_to`] aligned to the first graph.
pub fn procrustes_average_embedding<T: Scalar>(graphs: &[SymMatrix<T>], d: usize) -> Result<Embedding<T>, InferenceError> {
    procrustes_average_embedding_to(graphs, d, 0)
}

/// Row-wise mean of the blocks of an omnibus embedding.
pub fn average_blocks<T: Scalar>(e: &BlockEmbedding<T>) -> Embedding<T> {
    let (m, n, d) = (e.m(), e.n(), e.dim());
    let inv = T::one() / T::count(m);
    let coords = Matrix::from_fn(n, d, |i, j| (0..m).map(|s| e.block_row(s, i)[j]).sum::<T>() * inv);
    Embedding::new(coords).expect("finite embedding")
}

/// Classical omnibus embedding with its `m` blocks averaged row-wise.
pub fn omnibus_average_embedding<T: Scalar>(graphs: &[SymMatrix<T>], d: usize) -> Result<Embedding<T>, InferenceError> {
    check_graphs(graphs, 2)?;
    let c = OmnibusCoefficients::classical(graphs.len())?;
    let e = omni_embed(&build_omnibus(&c, graphs)?, d, graphs.len())?;
    Ok(average_blocks(&e))
}

/// Frobenius distances between the blocks of an omnibus embedding.
pub fn block_distance_matrix<T: Scalar>(e: &BlockEmbedding<T>) -> SymMatrix<T> {
    let (m, n) = (e.m(), e.n());
    SymMatrix::from_upper(m, |k, l| {
        if k == l {
            return T::zero();
        }
        (0..n)
            .flat_map(|i| e.block_row(k, i).iter().zip(e.block_row(l, i)))
            .map(|(&x, &y)| (x - y) * (x - y))
            .sum::<T>()
            .sqrt()
    })
    .expect("finite distances")
}

#[cfg(test)]
mod tests;
