//! Householder tridiagonalization, implicit QL, and tridiagonal inverse
//! iteration.
//!
//! The matrix `M = Q T Qᵀ` is reduced with `n − 2` reflectors
//! `H_k = I − β_k v_k v_kᵀ`. Eigenvalues of `T` come from implicit QL without
//! vector accumulation; selected eigenvectors are then recovered by inverse
//! iteration on `T` and mapped back through the reflectors, so a top-`d`
//! decomposition costs one reduction plus `O(n² d)`.

use crate::matrix::Matrix;
use crate::scalar::{copysign, Scalar};
use crate::error::SpectralError;

const MAX_QL_SWEEPS: usize = 60;

struct Reflector<T> {
    /// First index touched by the reflector.
    offset: usize,
    v: Vec<T>,
    beta: T,
}

/// Symmetric tridiagonal form plus the reflectors that produced it.
pub(crate) struct Tridiagonal<T> {
    pub diag: Vec<T>,
    /// `off[i]` couples indices `i` and `i + 1`.
    pub off: Vec<T>,
    reflectors: Vec<Reflector<T>>,
}

impl<T: Scalar> Tridiagonal<T> {
    /// Reduces a symmetric matrix, reading only its lower triangle.
    pub fn reduce(m: &Matrix<T>) -> Self {
        let n = m.rows();
        let mut a = m.as_slice().to_vec();
        let mut diag = vec![T::zero(); n];
        let mut off = vec![T::zero(); n.saturating_sub(1)];
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        let two = T::lit(2.0);
        let half = T::lit(0.5);

        for k in 0..n.saturating_sub(2) {
            let o = k + 1;
            let r = n - o;
            let mut v: Vec<T> = (o..n).map(|i| a[i * n + k]).collect();
            let scale = v.iter().fold(T::zero(), |s, x| s.max(x.abs()));
            diag[k] = a[k * n + k];
            if scale == T::zero() {
                off[k] = T::zero();
                reflectors.push(Reflector {
                    offset: o,
                    v,
                    beta: T::zero(),
                });
                continue;
            }
            let norm = scale * v.iter().map(|&x| (x / scale) * (x / scale)).sum::<T>().sqrt();
            let alpha = -copysign(norm, v[0]);
            v[0] = v[0] - alpha;
            let vtv: T = v.iter().map(|&x| x * x).sum();
            let beta = if vtv > T::zero() { two / vtv } else { T::zero() };
            off[k] = alpha;

            if beta != T::zero() {
                // p = β B v over the lower triangle of the trailing block.
                let mut p = vec![T::zero(); r];
                for ii in 0..r {
                    let row = &a[(o + ii) * n + o..(o + ii) * n + o + ii + 1];
                    let vi = v[ii];
                    let mut s = T::zero();
                    for jj in 0..ii {
                        s = s + row[jj] * v[jj];
                        p[jj] = p[jj] + row[jj] * vi;
                    }
                    p[ii] = p[ii] + s + row[ii] * vi;
                }
                for x in p.iter_mut() {
                    *x = *x * beta;
                }
                let kappa = half * beta * p.iter().zip(&v).map(|(&x, &y)| x * y).sum::<T>();
                let w: Vec<T> = p.iter().zip(&v).map(|(&x, &y)| x - kappa * y).collect();
                for ii in 0..r {
                    let (vi, wi) = (v[ii], w[ii]);
                    let row = &mut a[(o + ii) * n + o..(o + ii) * n + o + ii + 1];
                    for jj in 0..=ii {
                        row[jj] = row[jj] - vi * w[jj] - wi * v[jj];
                    }
                }
            }
            reflectors.push(Reflector { offset: o, v, beta });
        }
        if n >= 2 {
            diag[n - 2] = a[(n - 2) * n + (n - 2)];
            off[n - 2] = a[(n - 1) * n + (n - 2)];
        }
        if n >= 1 {
            diag[n - 1] = a[(n - 1) * n + (n - 1)];
        }
        Self {
            diag,
            off,
            reflectors,
        }
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    /// Maps a vector in tridiagonal coordinates back to the original basis.
    pub fn back_transform(&self, z: &mut [T]) {
        for h in self.reflectors.iter().rev() {
            if h.beta == T::zero() {
                continue;
            }
            let seg = &mut z[h.offset..];
            let s = h.beta * seg.iter().zip(&h.v).map(|(&x, &y)| x * y).sum::<T>();
            for (x, &vi) in seg.iter_mut().zip(&h.v) {
                *x = *x - s * vi;
            }
        }
    }

    /// The orthogonal factor `Q` as an explicit matrix, transposed so that
    /// row `j` holds column `j` of `Q`.
    pub fn q_transposed(&self) -> Matrix<T> {
        let n = self.order();
        // Build Q by applying reflectors last-to-first to the identity.
        let mut q = Matrix::<T>::identity(n);
        for h in self.reflectors.iter().rev() {
            if h.beta == T::zero() {
                continue;
            }
            let o = h.offset;
            let mut vt_q = vec![T::zero(); n];
            for (ii, &vi) in h.v.iter().enumerate() {
                for (acc, &x) in vt_q.iter_mut().zip(q.row(o + ii)) {
                    *acc = *acc + vi * x;
                }
            }
            for (ii, &vi) in h.v.iter().enumerate() {
                let f = h.beta * vi;
                for (x, &y) in q.row_mut(o + ii).iter_mut().zip(&vt_q) {
                    *x = *x - f * y;
                }
            }
        }
        q.transpose()
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL.
///
/// When `zt` is supplied, rotations are applied to its rows so that on exit
/// row `k` is the eigenvector for returned value `k`.
pub(crate) fn ql_implicit<T: Scalar>(
    diag: &[T],
    off: &[T],
    mut zt: Option<&mut Matrix<T>>,
) -> Result<Vec<T>, SpectralError> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(T::zero());
    let eps = T::epsilon();
    let two = T::lit(2.0);
    // Absolute floor so that clusters of (near-)zero eigenvalues still split.
    let norm = (0..n)
        .map(|i| d[i].abs() + e[i].abs() + if i > 0 { e[i - 1].abs() } else { T::zero() })
        .fold(T::zero(), T::max);
    let floor = eps * norm;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(SpectralError::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + copysign(r, g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = zt.as_deref_mut() {
                    let cols = z.cols();
                    let buf = z.as_mut_slice();
                    let (lo, hi) = buf.split_at_mut((i + 1) * cols);
                    let zi = &mut lo[i * cols..];
                    let zi1 = &mut hi[..cols];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let f = *b;
                        *b = s * *a + c * f;
                        *a = c * *a - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(d)
}

/// LU factorization with partial pivoting of `T − shift·I`.
struct ShiftedLu<T> {
    d: Vec<T>,
    du: Vec<T>,
    du2: Vec<T>,
    dl: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Scalar> ShiftedLu<T> {
    fn factor(diag: &[T], off: &[T], shift: T, tiny: T) -> Self {
        let n = diag.len();
        let mut d: Vec<T> = diag.iter().map(|&x| x - shift).collect();
        let mut dl = off.to_vec();
        let mut du = off.to_vec();
        let mut du2 = vec![T::zero(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs().max(dl[i].abs()) < tiny {
                d[i] = tiny;
            }
            if d[i].abs() >= dl[i].abs() {
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] = d[i + 1] - f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let t = du[i];
                du[i] = d[i + 1];
                d[i + 1] = t - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if let Some(last) = d.last_mut() {
            if last.abs() < tiny {
                *last = copysign(tiny, *last);
            }
        }
        Self {
            d,
            du,
            du2,
            dl,
            swapped,
        }
    }

    fn solve(&self, b: &mut [T]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] = b[i + 1] - self.dl[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s = s - self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                s = s - self.du2[i] * b[i + 2];
            }
            b[i] = s / self.d[i];
        }
    }
}

/// Deterministic, well-spread start vector for inverse iteration.
fn start_vector<T: Scalar>(n: usize) -> Vec<T> {
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    (0..n)
        .map(|_| {
            state = state
                .wrapping_mul(6_364_136_223_846_793_005)
                .wrapping_add(1_442_695_040_888_963_407);
            T::lit(0.5 + ((state >> 11) as f64) / ((1u64 << 53) as f64))
        })
        .collect()
}

/// Eigenvectors of the tridiagonal matrix for the given eigenvalues.
///
/// `values` must be sorted ascending. Close eigenvalues are shifted apart
/// and their vectors orthogonalized against each other.
pub(crate) fn inverse_iteration<T: Scalar>(diag: &[T], off: &[T], values: &[T]) -> Vec<Vec<T>> {
    let n = diag.len();
    let norm = (0..n).fold(T::zero(), |acc, i| {
        let mut row = diag[i].abs();
        if i > 0 {
            row = row + off[i - 1].abs();
        }
        if i + 1 < n {
            row = row + off[i].abs();
        }
        acc.max(row)
    });
    let norm = if norm == T::zero() { T::one() } else { norm };
    let group_tol = T::lit(1e-3) * norm;
    let eps3 = T::epsilon() * norm;

    let mut out: Vec<Vec<T>> = Vec::with_capacity(values.len());
    let mut cluster_start = 0;
    let mut prev_shift = T::zero();
    for (j, &lambda) in values.iter().enumerate() {
        let mut shift = lambda;
        if j > 0 && (lambda - values[j - 1]).abs() < group_tol {
            if shift <= prev_shift {
                shift = prev_shift + eps3;
            }
        } else {
            cluster_start = j;
        }
        prev_shift = shift;

        let lu = ShiftedLu::factor(diag, off, shift, eps3);
        let mut x = start_vector::<T>(n);
        for _ in 0..3 {
            lu.solve(&mut x);
            for _ in 0..2 {
                for prev in &out[cluster_start..j] {
                    let s: T = x.iter().zip(prev).map(|(&a, &b)| a * b).sum();
                    for (a, &b) in x.iter_mut().zip(prev) {
                        *a = *a - s * b;
                    }
                }
            }
            let nrm = x.iter().fold(T::zero(), |s, a| s.max(a.abs()));
            if nrm == T::zero() {
                x = start_vector(n);
                continue;
            }
            for a in x.iter_mut() {
                *a = *a / nrm;
            }
        }
        let nrm = x.iter().map(|&a| a * a).sum::<T>().sqrt();
        for a in x.iter_mut() {
            *a = *a / nrm;
        }
        out.push(x);
    }
    out
}
