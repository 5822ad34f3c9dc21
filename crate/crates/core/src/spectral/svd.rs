//! Small dense SVD (one-sided Jacobi) and orthogonal Procrustes.

use crate::error::SpectralError;
use crate::matrix::{dot, norm, Matrix};
use crate::scalar::Scalar;

use super::{apply_sign_convention, Embedding};

/// `M = U diag(s) Vᵀ` with singular values descending.
#[derive(Clone, Debug, PartialEq)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub s: Vec<T>,
    pub v: Matrix<T>,
}

const MAX_SWEEPS: usize = 80;

/// SVD of a square matrix by one-sided Jacobi rotations.
///
/// Left singular vectors of zero singular values are completed to an
/// orthonormal basis by Gram–Schmidt over the standard basis, so `u` is
/// always orthogonal. Paired columns of `u` and `v` are sign-normalized by
/// the largest-entry-positive rule applied to `v`.
pub fn svd_square<T: Scalar>(m: &Matrix<T>) -> Result<Svd<T>, SpectralError> {
    let n = m.rows();
    if m.cols() != n {
        return Err(SpectralError::NotSquare {
            rows: n,
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(SpectralError::NonFinite);
    }
    // Work on columns: store Mᵀ so each column is a contiguous row.
    let mut a = m.transpose();
    let mut vt = Matrix::<T>::identity(n);
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(a.row(p), a.row(p));
                let beta = dot(a.row(q), a.row(q));
                let gamma = dot(a.row(p), a.row(q));
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_rows(&mut a, p, q, c, s);
                rotate_rows(&mut vt, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut s: Vec<T> = (0..n).map(|k| norm(a.row(k))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| s[y].partial_cmp(&s[x]).expect("finite singular values"));
    s = order.iter().map(|&k| s[k]).collect();

    let smax = s.first().copied().unwrap_or(T::zero());
    let cutoff = smax * eps * T::count(n.max(1)) * T::lit(4.0);
    let mut u_cols: Vec<Vec<T>> = Vec::with_capacity(n);
    for (slot, &k) in order.iter().enumerate() {
        if s[slot] > cutoff && s[slot] > T::zero() {
            u_cols.push(a.row(k).iter().map(|&x| x / s[slot]).collect());
        } else {
            s[slot] = if s[slot] > T::zero() { s[slot] } else { T::zero() };
            u_cols.push(Vec::new());
        }
    }
    complete_basis(&mut u_cols, n);

    let mut u = Matrix::zeros(n, n);
    let mut v = Matrix::zeros(n, n);
    for (slot, &k) in order.iter().enumerate() {
        u.set_column(slot, &u_cols[slot]);
        v.set_column(slot, vt.row(k));
    }
    // Normalize signs on v and mirror on u so that U S Vᵀ is unchanged.
    let before = v.clone();
    apply_sign_convention(&mut v);
    for j in 0..n {
        if (0..n).any(|i| v[(i, j)] != before[(i, j)]) {
            for i in 0..n {
                u[(i, j)] = -u[(i, j)];
            }
        }
    }
    Ok(Svd { u, s, v })
}

fn rotate_rows<T: Scalar>(m: &mut Matrix<T>, p: usize, q: usize, c: T, s: T) {
    let cols = m.cols();
    let buf = m.as_mut_slice();
    let (lo, hi) = buf.split_at_mut(q * cols);
    let rp = &mut lo[p * cols..(p + 1) * cols];
    let rq = &mut hi[..cols];
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Fills empty slots with unit vectors orthogonal to all others, drawing
/// candidates from the standard basis in order.
fn complete_basis<T: Scalar>(cols: &mut [Vec<T>], n: usize) {
    let mut candidate = 0;
    for slot in 0..cols.len() {
        if !cols[slot].is_empty() {
            continue;
        }
        while candidate < n {
            let mut e = vec![T::zero(); n];
            e[candidate] = T::one();
            candidate += 1;
            for _ in 0..2 {
                for other in cols.iter().filter(|c| !c.is_empty()) {
                    let proj = dot(&e, other);
                    for (x, &o) in e.iter_mut().zip(other) {
                        *x = *x - proj * o;
                    }
                }
            }
            let len = norm(&e);
            if len > T::lit(0.5) {
                cols[slot] = e.into_iter().map(|x| x / len).collect();
                break;
            }
        }
    }
}

/// Orthogonal `W` minimizing `‖X W − Y‖_F`.
///
/// With `XᵀY = U S Vᵀ`, `W = U Vᵀ`. When `XᵀY` is rank deficient the null
/// directions come from the deterministic basis completion in
/// [`svd_square`].
pub fn procrustes<T: Scalar>(x: &Embedding<T>, y: &Embedding<T>) -> Result<Matrix<T>, SpectralError> {
    if x.coords().shape() != y.coords().shape() {
        return Err(SpectralError::ShapeMismatch {
            expected: x.coords().shape(),
            found: y.coords().shape(),
        });
    }
    if x.dim() == 0 {
        return Err(SpectralError::DimensionOutOfRange { d: 0, order: 0 });
    }
    let cross = x.coords().t_matmul(y.coords())?;
    let svd = svd_square(&cross)?;
    svd.u.matmul(&svd.v.transpose())
}
