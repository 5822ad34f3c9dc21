use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::matrix::{Matrix, SymMatrix};
use crate::rng::ReplicateStreams;
use crate::scalar::Scalar;

use super::correlation::CorrelationSpec;
use super::mixture::{LatentPositions, PointMassMixture};

/// Symmetric, hollow, binary adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Adjacency {
    n: usize,
    data: Vec<u8>,
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            data: vec![0; n * n],
        }
    }

    /// Builds from an edge predicate evaluated on `i < j` in row-major order.
    pub fn from_upper(n: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let mut a = Self::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if edge(i, j) {
                    a.data[i * n + j] = 1;
                    a.data[j * n + i] = 1;
                }
            }
        }
        a
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.n + j] != 0
    }

    pub fn edge_count(&self) -> usize {
        self.data.iter().map(|&x| x as usize).sum::<usize>() / 2
    }

    /// Upper-triangle entries `(i < j)` in row-major order.
    pub fn upper_triangle(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |j| self.get(i, j)))
    }

    pub fn to_matrix<T: Scalar>(&self) -> SymMatrix<T> {
        let data = self
            .data
            .iter()
            .map(|&x| if x != 0 { T::one() } else { T::zero() })
            .collect();
        SymMatrix::new(Matrix::from_vec(self.n, self.n, data).expect("square buffer"))
            .expect("adjacency is symmetric")
    }
}

/// `m` graphs on a shared vertex set with the latent positions and
/// correlation structure that generated them.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphCollection<T> {
    pub graphs: Vec<Adjacency>,
    pub latent: LatentPositions<T>,
    pub spec: CorrelationSpec<T>,
    /// Hidden generator graph of the single-generator model.
    pub generator: Option<Adjacency>,
}

impl<T: Scalar> GraphCollection<T> {
    pub fn m(&self) -> usize {
        self.graphs.len()
    }

    pub fn n(&self) -> usize {
        self.latent.n()
    }

    pub fn matrices(&self) -> Vec<SymMatrix<T>> {
        self.graphs.iter().map(|g| g.to_matrix()).collect()
    }
}

/// `n` i.i.d. draws from `F`.
pub fn sample_latent<T: Scalar, R: Rng + ?Sized>(
    mixture: &PointMassMixture<T>,
    n: usize,
    rng: &mut R,
) -> LatentPositions<T> {
    mixture.sample(n, rng)
}

/// Independent `Bern(X_iᵀX_j)` edges for `i < j`.
pub fn sample_rdpg<T: Scalar, R: Rng + ?Sized>(latent: &LatentPositions<T>, rng: &mut R) -> Adjacency {
    Adjacency::from_upper(latent.n(), |i, j| {
        rng.random::<f64>() < latent.probability(i, j).to_f64_lossy()
    })
}

/// Draws each edge of a new graph conditionally on the same edge of `prev`:
/// `Bern(P + ϱ(1−P))` if present, `Bern(P(1−ϱ))` if absent.
fn sample_conditional<T: Scalar, R: Rng + ?Sized>(
    latent: &LatentPositions<T>,
    prev: &Adjacency,
    rho: T,
    rng: &mut R,
) -> Adjacency {
    let rho = rho.to_f64_lossy();
    Adjacency::from_upper(latent.n(), |i, j| {
        let p = latent.probability(i, j).to_f64_lossy();
        let q = if prev.get(i, j) { p + rho * (1.0 - p) } else { p * (1.0 - rho) };
        debug_assert!((0.0..=1.0).contains(&q));
        rng.random::<f64>() < q
    })
}

fn check_params<T: Scalar>(values: &[T]) -> Result<(), ModelError> {
    for (index, &v) in values.iter().enumerate() {
        if !(v >= T::zero() && v <= T::one()) {
            return Err(ModelError::ParameterOutOfRange {
                index,
                value: v.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// Forward-propagation model: `A¹ ∼ RDPG(X)` and each `A^{ℓ+1}` is drawn
/// conditionally on `A^ℓ` with parameter `rho[ℓ]`.
///
/// Graph `k` draws from stream `streams.graph(k)`.
pub fn sample_forward<T: Scalar>(
    latent: &LatentPositions<T>,
    rho: &[T],
    streams: &ReplicateStreams,
) -> Result<GraphCollection<T>, ModelError> {
    check_params(rho)?;
    let spec = CorrelationSpec::forward(rho)?;
    let mut graphs = Vec::with_capacity(rho.len() + 1);
    graphs.push(sample_rdpg(latent, &mut streams.graph(0)));
    for (k, &r) in rho.iter().enumerate() {
        let next = sample_conditional(latent, &graphs[k], r, &mut streams.graph(k + 1));
        graphs.push(next);
    }
    Ok(GraphCollection {
        graphs,
        latent: latent.clone(),
        spec,
        generator: None,
    })
}

/// Single-generator model: a hidden `A⁰ ∼ RDPG(X)` and each `A^ℓ` drawn
/// conditionally on `A⁰` with parameter `nu[ℓ]`.
pub fn sample_generator<T: Scalar>(
    latent: &LatentPositions<T>,
    nu: &[T],
    streams: &ReplicateStreams,
) -> Result<GraphCollection<T>, ModelError> {
    check_params(nu)?;
    let spec = CorrelationSpec::generator(nu)?;
    let a0 = sample_rdpg(latent, &mut streams.generator());
    let graphs = nu
        .iter()
        .enumerate()
        .map(|(k, &v)| sample_conditional(latent, &a0, v, &mut streams.graph(k)))
        .collect();
    Ok(GraphCollection {
        graphs,
        latent: latent.clone(),
        spec,
        generator: Some(a0),
    })
}

/// Correlation of standardized edge residuals `(A−P)/√(P(1−P))` and
/// `(B−P)/√(P(1−P))` over pairs `i < j` with `P_{ij} ∈ (0, 1)`.
///
/// Residuals are centered at the true `P` and the result is normalized by
/// the residuals' own second moments, so `B = A` gives exactly 1.
pub fn empirical_edge_correlation<T: Scalar>(
    a: &Adjacency,
    b: &Adjacency,
    latent: &LatentPositions<T>,
) -> Result<T, ModelError> {
    let n = latent.n();
    for g in [a, b] {
        if g.n() != n {
            return Err(ModelError::VertexCountMismatch {
                expected: n,
                found: g.n(),
            });
        }
    }
    let (mut sab, mut saa, mut sbb) = (0.0f64, 0.0f64, 0.0f64);
    let mut count = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            let p = latent.probability(i, j).to_f64_lossy();
            if p <= 0.0 || p >= 1.0 {
                continue;
            }
            let s = (p * (1.0 - p)).sqrt();
            let za = (a.get(i, j) as u8 as f64 - p) / s;
            let zb = (b.get(i, j) as u8 as f64 - p) / s;
            sab += za * zb;
            saa += za * za;
            sbb += zb * zb;
            count += 1;
        }
    }
    if count == 0 {
        return Err(ModelError::NoInformativeEdges);
    }
    Ok(T::lit(sab / (saa * sbb).sqrt()))
}
