use crate::error::SpectralError;
use crate::matrix::{Matrix, SymMatrix};
use crate::scalar::Scalar;

use super::{eig_full, Embedding};

/// Classical multidimensional scaling.
///
/// Double-centers the squared distances, `B = −½ J (D∘D) J`, and embeds with
/// the top-`d` eigenpairs of `B`; negative eigenvalues (non-Euclidean input)
/// contribute zero coordinates.
pub fn cmds<T: Scalar>(dist: &SymMatrix<T>, d: usize) -> Result<Embedding<T>, SpectralError> {
    let n = dist.order();
    if d == 0 || d > n {
        return Err(SpectralError::DimensionOutOfRange { d, order: n });
    }
    for i in 0..n {
        if dist[(i, i)] != T::zero() {
            return Err(SpectralError::NotHollow { index: i });
        }
        for j in 0..n {
            if dist[(i, j)] < T::zero() {
                return Err(SpectralError::NegativeDistance { row: i, col: j });
            }
        }
    }
    let sq = dist.matrix().map(|x| x * x);
    let row_means: Vec<T> = (0..n).map(|i| sq.row(i).iter().copied().sum::<T>() / T::count(n)).collect();
    let grand = row_means.iter().copied().sum::<T>() / T::count(n);
    let half = T::lit(0.5);
    let b = SymMatrix::from_upper(n, |i, j| -half * (sq[(i, j)] - row_means[i] - row_means[j] + grand))?;
    let (vals, vecs) = eig_full(&b)?;
    let coords = Matrix::from_fn(n, d, |i, k| {
        let col = n - 1 - k;
        vecs[(i, col)] * vals[col].max(T::zero()).sqrt()
    });
    Embedding::new(coords)
}
