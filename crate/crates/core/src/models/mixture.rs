use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::matrix::{dot, Matrix, SymMatrix};
use crate::scalar::Scalar;
use crate::spectral::{eig_full, eig_top_by_magnitude};

const WEIGHT_TOL: f64 = 1e-12;
const INNER_TOL: f64 = 1e-10;
const RANK_TOL: f64 = 1e-10;

/// Finite point-mass latent distribution `F = Σ_k π_k δ_{ξ_k}` on `ℝ^d`.
///
/// Pairwise inner products of atoms lie in `[0, 1]` and the second moment
/// `Δ = Σ π_k ξ_k ξ_kᵀ` has full rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMassMixture<T> {
    atoms: Matrix<T>,
    weights: Vec<T>,
}

impl<T: Scalar> PointMassMixture<T> {
    /// `atoms` holds one atom per row.
    pub fn new(atoms: Matrix<T>, weights: Vec<T>) -> Result<Self, ModelError> {
        let k = atoms.rows();
        if k == 0 || atoms.cols() == 0 {
            return Err(ModelError::EmptyMixture);
        }
        if weights.len() != k {
            return Err(ModelError::RaggedAtoms);
        }
        let sum: T = weights.iter().copied().sum();
        if weights.iter().any(|&w| !(w >= T::zero())) || (sum - T::one()).abs() > T::lit(WEIGHT_TOL) {
            return Err(ModelError::InvalidWeights {
                sum: sum.to_f64_lossy(),
            });
        }
        let tol = T::lit(INNER_TOL);
        for a in 0..k {
            for b in a..k {
                let v = dot(atoms.row(a), atoms.row(b));
                if !(v >= -tol && v <= T::one() + tol) {
                    return Err(ModelError::InnerProductOutOfRange {
                        a,
                        b,
                        value: v.to_f64_lossy(),
                    });
                }
            }
        }
        let mixture = Self { atoms, weights };
        let (vals, _) = eig_full(&mixture.second_moment())?;
        if vals[0] <= T::lit(RANK_TOL) {
            return Err(ModelError::RankDeficient {
                smallest: vals[0].to_f64_lossy(),
            });
        }
        Ok(mixture)
    }

    pub fn from_rows<R: AsRef<[T]>>(atoms: &[R], weights: &[T]) -> Result<Self, ModelError> {
        let atoms = Matrix::from_rows(atoms).map_err(|_| ModelError::RaggedAtoms)?;
        Self::new(atoms, weights.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.atoms.cols()
    }

    pub fn len(&self) -> usize {
        self.atoms.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.rows() == 0
    }

    pub fn atom(&self, k: usize) -> &[T] {
        self.atoms.row(k)
    }

    pub fn atoms(&self) -> &Matrix<T> {
        &self.atoms
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `Δ = E[X Xᵀ]`.
    pub fn second_moment(&self) -> SymMatrix<T> {
        let d = self.dim();
        SymMatrix::from_upper(d, |i, j| {
            (0..self.len())
                .map(|k| self.weights[k] * self.atoms[(k, i)] * self.atoms[(k, j)])
                .sum()
        })
        .expect("finite atoms")
    }

    /// Gram matrix of atoms, `B_{ab} = ⟨ξ_a, ξ_b⟩`, clamped to `[0, 1]`.
    pub fn atom_gram(&self) -> Matrix<T> {
        let k = self.len();
        Matrix::from_fn(k, k, |a, b| {
            dot(self.atoms.row(a), self.atoms.row(b))
                .max(T::zero())
                .min(T::one())
        })
    }

    /// Draws `n` i.i.d. latent positions.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> LatentPositions<T> {
        let w: Vec<f64> = self.weights.iter().map(|w| w.to_f64_lossy()).collect();
        let dist = WeightedIndex::new(&w).expect("validated weights");
        let labels: Vec<usize> = (0..n).map(|_| dist.sample(rng)).collect();
        LatentPositions::from_labels(self, labels)
    }
}

/// Stochastic-block-model probabilities as a point-mass mixture.
///
/// Atoms are the rows of `U |S|^{1/2}` for the `rank(B)` leading
/// eigenpairs, so `⟨ξ_a, ξ_b⟩ = B_{ab}`.
pub fn sbm_to_mixture<T: Scalar>(b: &SymMatrix<T>, pi: &[T]) -> Result<PointMassMixture<T>, ModelError> {
    let k = b.order();
    for i in 0..k {
        for j in 0..k {
            if !(b[(i, j)] >= T::zero() && b[(i, j)] <= T::one()) {
                return Err(ModelError::BlockOutOfRange);
            }
        }
    }
    let (vals, _) = eig_full(b)?;
    let tol = T::lit(RANK_TOL);
    if vals[0] < -tol {
        return Err(ModelError::NotPsd {
            eigenvalue: vals[0].to_f64_lossy(),
        });
    }
    let rank = vals.iter().filter(|&&v| v > tol).count();
    if rank == 0 {
        return Err(ModelError::RankDeficient { smallest: 0.0 });
    }
    let pair = eig_top_by_magnitude(b, rank)?;
    let atoms = Matrix::from_fn(k, rank, |i, j| pair.vectors[(i, j)] * pair.values[j].sqrt());
    PointMassMixture::new(atoms, pi.to_vec())
}

/// Latent positions of `n` vertices with their mixture labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatentPositions<T> {
    x: Matrix<T>,
    labels: Vec<usize>,
    gram: Matrix<T>,
}

impl<T: Scalar> LatentPositions<T> {
    /// Positions given by explicit atom labels.
    pub fn from_labels(mixture: &PointMassMixture<T>, labels: Vec<usize>) -> Self {
        let d = mixture.dim();
        let x = Matrix::from_fn(labels.len(), d, |i, j| mixture.atoms[(labels[i], j)]);
        Self {
            x,
            labels,
            gram: mixture.atom_gram(),
        }
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn dim(&self) -> usize {
        self.x.cols()
    }

    pub fn x(&self) -> &Matrix<T> {
        &self.x
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Edge probability `⟨X_i, X_j⟩`.
    #[inline]
    pub fn probability(&self, i: usize, j: usize) -> T {
        self.gram[(self.labels[i], self.labels[j])]
    }

    /// `P = X Xᵀ`, diagonal included.
    pub fn probability_matrix(&self) -> SymMatrix<T> {
        SymMatrix::from_upper(self.n(), |i, j| self.probability(i, j)).expect("finite probabilities")
    }
}
