//! Symmetric eigendecomposition, adjacency spectral embedding, Procrustes
//! alignment, classical MDS, and scree-plot dimension selection.

mod elbow;
mod lanczos;
mod mds;
mod svd;
pub(crate) mod tridiag;

use serde::{Deserialize, Serialize};

use crate::error::SpectralError;
use crate::matrix::{dot, Matrix, SymMatrix};
use crate::scalar::Scalar;
use tridiag::{inverse_iteration, ql_implicit, Tridiagonal};

pub use elbow::elbow_dimension;
pub use lanczos::spectral_norm;
pub use mds::cmds;
pub use svd::{procrustes, svd_square, Svd};

/// Sign of a selected eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn of<T: Scalar>(x: T) -> Self {
        if x < T::zero() {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    pub fn to_scalar<T: Scalar>(self) -> T {
        match self {
            Sign::Positive => T::one(),
            Sign::Negative => -T::one(),
        }
    }
}

/// The `d` eigenpairs of largest magnitude.
///
/// `values` holds magnitudes in descending order; `signs` holds the signs of
/// the underlying eigenvalues; `vectors` has orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPair<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
    pub signs: Vec<Sign>,
}

impl<T: Scalar> SpectralPair<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Signed eigenvalue `k`.
    pub fn eigenvalue(&self, k: usize) -> T {
        self.signs[k].to_scalar::<T>() * self.values[k]
    }

    /// `Σ_k sign_k · value_k · v_k v_kᵀ`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.vectors.rows();
        let lam: Vec<T> = (0..self.dim()).map(|k| self.eigenvalue(k)).collect();
        Matrix::from_fn(n, n, |i, j| {
            let (ri, rj) = (self.vectors.row(i), self.vectors.row(j));
            (0..lam.len()).map(|k| lam[k] * ri[k] * rj[k]).sum()
        })
    }
}

/// Row-wise point cloud, e.g. estimated latent positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding<T> {
    coords: Matrix<T>,
}

impl<T: Scalar> Embedding<T> {
    pub fn new(coords: Matrix<T>) -> Result<Self, SpectralError> {
        if !coords.is_finite() {
            return Err(SpectralError::NonFinite);
        }
        Ok(Self { coords })
    }

    pub fn rows(&self) -> usize {
        self.coords.rows()
    }

    pub fn dim(&self) -> usize {
        self.coords.cols()
    }

    pub fn coords(&self) -> &Matrix<T> {
        &self.coords
    }

    pub fn into_coords(self) -> Matrix<T> {
        self.coords
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.coords.row(i)
    }

    /// `self · w` for a `dim × dim` matrix `w`.
    pub fn rotate(&self, w: &Matrix<T>) -> Result<Self, SpectralError> {
        Ok(Self {
            coords: self.coords.matmul(w)?,
        })
    }
}

/// Flips each column so that its largest-magnitude entry is positive. Ties
/// in magnitude resolve to the first such entry.
pub(crate) fn apply_sign_convention<T: Scalar>(v: &mut Matrix<T>) {
    for j in 0..v.cols() {
        let mut best = T::zero();
        let mut pick = T::zero();
        for i in 0..v.rows() {
            let x = v[(i, j)];
            if x.abs() > best {
                best = x.abs();
                pick = x;
            }
        }
        if pick < T::zero() {
            for i in 0..v.rows() {
                v[(i, j)] = -v[(i, j)];
            }
        }
    }
}

/// Indices of the `d` largest-magnitude entries of `ascending`, ordered by
/// magnitude descending; ties keep ascending-value order.
fn select_by_magnitude<T: Scalar>(ascending: &[T], d: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..ascending.len()).collect();
    idx.sort_by(|&a, &b| {
        ascending[b]
            .abs()
            .partial_cmp(&ascending[a].abs())
            .expect("finite eigenvalues")
    });
    idx.truncate(d);
    idx
}

fn sort_ascending<T: Scalar>(v: &mut [T]) {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
}

fn check_dim(order: usize, d: usize) -> Result<(), SpectralError> {
    if d == 0 || d > order {
        return Err(SpectralError::DimensionOutOfRange { d, order });
    }
    Ok(())
}

/// Full eigendecomposition: eigenvalues ascending and eigenvectors as
/// columns, sign convention applied.
pub fn eig_full<T: Scalar>(m: &SymMatrix<T>) -> Result<(Vec<T>, Matrix<T>), SpectralError> {
    let n = m.order();
    if !m.matrix().is_finite() {
        return Err(SpectralError::NonFinite);
    }
    let tri = Tridiagonal::reduce(m.matrix());
    let mut zt = tri.q_transposed();
    let vals = ql_implicit(&tri.diag, &tri.off, Some(&mut zt))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).expect("finite eigenvalues"));
    let values: Vec<T> = order.iter().map(|&k| vals[k]).collect();
    let mut vectors = Matrix::from_fn(n, n, |i, j| zt[(order[j], i)]);
    apply_sign_convention(&mut vectors);
    Ok((values, vectors))
}

/// The `d` eigenpairs of `m` with largest `|λ|`.
///
/// Ties in magnitude are broken by ascending eigenvalue, so `−λ` precedes
/// `+λ`. Columns follow the largest-entry-positive sign convention, which
/// makes the output a deterministic function of the input.
pub fn eig_top_by_magnitude<T: Scalar>(
    m: &SymMatrix<T>,
    d: usize,
) -> Result<SpectralPair<T>, SpectralError> {
    let n = m.order();
    check_dim(n, d)?;
    if !m.matrix().is_finite() {
        return Err(SpectralError::NonFinite);
    }
    let tri = Tridiagonal::reduce(m.matrix());
    let mut all = ql_implicit(&tri.diag, &tri.off, None)?;
    sort_ascending(&mut all);
    let picked = select_by_magnitude(&all, d);

    // Inverse iteration wants the targets in ascending order.
    let mut by_value = picked.clone();
    by_value.sort_unstable();
    let targets: Vec<T> = by_value.iter().map(|&k| all[k]).collect();
    let tri_vecs = inverse_iteration(&tri.diag, &tri.off, &targets);

    let mut vectors = Matrix::zeros(n, d);
    let mut values = Vec::with_capacity(d);
    let mut signs = Vec::with_capacity(d);
    for (col, &k) in picked.iter().enumerate() {
        let pos = by_value.iter().position(|&x| x == k).expect("picked index");
        let mut y = tri_vecs[pos].clone();
        tri.back_transform(&mut y);
        vectors.set_column(col, &y);
        values.push(all[k].abs());
        signs.push(Sign::of(all[k]));
    }

    let scale = all
        .first()
        .map_or(T::zero(), |x| x.abs())
        .max(all.last().map_or(T::zero(), |x| x.abs()));
    if !verify(m, &vectors, &values, &signs, scale) {
        return top_from_full(m, d);
    }
    apply_sign_convention(&mut vectors);
    Ok(SpectralPair {
        values,
        vectors,
        signs,
    })
}

/// Residual and orthonormality check for the fast path.
fn verify<T: Scalar>(
    m: &SymMatrix<T>,
    vectors: &Matrix<T>,
    values: &[T],
    signs: &[Sign],
    scale: T,
) -> bool {
    let d = values.len();
    let tol = T::residual_tolerance() * scale.max(T::min_positive_value());
    let ortho_tol = T::lit(1e-10).max(T::epsilon() * T::lit(1e3));
    let cols: Vec<Vec<T>> = (0..d).map(|k| vectors.column(k)).collect();
    for k in 0..d {
        let lam = signs[k].to_scalar::<T>() * values[k];
        let mv = m.matrix().matvec(&cols[k]);
        let res = mv
            .iter()
            .zip(&cols[k])
            .map(|(&a, &b)| (a - lam * b) * (a - lam * b))
            .sum::<T>()
            .sqrt();
        if !(res <= tol) {
            return false;
        }
        for l in 0..=k {
            let want = if l == k { T::one() } else { T::zero() };
            if !((dot(&cols[k], &cols[l]) - want).abs() <= ortho_tol) {
                return false;
            }
        }
    }
    true
}

fn top_from_full<T: Scalar>(m: &SymMatrix<T>, d: usize) -> Result<SpectralPair<T>, SpectralError> {
    let (vals, vecs) = eig_full(m)?;
    let picked = select_by_magnitude(&vals, d);
    let n = m.order();
    let vectors = Matrix::from_fn(n, d, |i, j| vecs[(i, picked[j])]);
    Ok(SpectralPair {
        values: picked.iter().map(|&k| vals[k].abs()).collect(),
        signs: picked.iter().map(|&k| Sign::of(vals[k])).collect(),
        vectors,
    })
}

/// Adjacency spectral embedding `U |S|^{1/2}` from the top-`d` eigenpairs
/// by magnitude.
pub fn ase<T: Scalar>(a: &SymMatrix<T>, d: usize) -> Result<Embedding<T>, SpectralError> {
    let pair = eig_top_by_magnitude(a, d)?;
    Ok(embedding_from_pair(&pair))
}

pub(crate) fn embedding_from_pair<T: Scalar>(pair: &SpectralPair<T>) -> Embedding<T> {
    let roots: Vec<T> = pair.values.iter().map(|v| v.sqrt()).collect();
    let mut coords = pair.vectors.clone();
    for i in 0..coords.rows() {
        for (x, &r) in coords.row_mut(i).iter_mut().zip(&roots) {
            *x = *x * r;
        }
    }
    Embedding { coords }
}
