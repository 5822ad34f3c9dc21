use crate::error::SpectralError;
use crate::matrix::{dot, norm, Matrix, SymMatrix};
use crate::scalar::Scalar;

use super::tridiag::ql_implicit;

/// Spectral norm `max |λ|` of a symmetric matrix by Lanczos with full
/// reorthogonalization.
///
/// Iterates until the extreme Ritz pair has residual below `1e-10` of the
/// current estimate (or the Krylov space is exhausted). The start vector is
/// fixed, so the result is deterministic.
pub fn spectral_norm<T: Scalar>(m: &SymMatrix<T>) -> Result<T, SpectralError> {
    let n = m.order();
    if !m.matrix().is_finite() {
        return Err(SpectralError::NonFinite);
    }
    if n == 0 {
        return Ok(T::zero());
    }
    let tol = T::lit(1e-10).max(T::epsilon() * T::lit(1e3));
    let mut basis: Vec<Vec<T>> = Vec::new();
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();

    let mut q: Vec<T> = (0..n).map(|i| T::one() + T::lit(((i * 7919) % 104_729) as f64 / 104_729.0)).collect();
    let len = norm(&q);
    q.iter_mut().for_each(|x| *x = *x / len);

    let mut estimate = T::zero();
    loop {
        let mut w = m.matrix().matvec(&q);
        let a = dot(&w, &q);
        alphas.push(a);
        basis.push(q);
        for _ in 0..2 {
            for b in &basis {
                let s = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, &y)| *x = *x - s * y);
            }
        }
        let beta = norm(&w);
        let k = alphas.len();
        let check = k == n || k % 8 == 0 || beta == T::zero();
        if check {
            let mut zt = Matrix::<T>::identity(k);
            let vals = ql_implicit(&alphas, &betas, Some(&mut zt))?;
            let (top, mag) = vals
                .iter()
                .enumerate()
                .fold((0, T::zero()), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
            estimate = mag;
            let scale = estimate.max(T::min_positive_value());
            // Residual of the extreme Ritz pair: β_k times the last component
            // of its Ritz vector.
            let residual = (beta * zt[(top, k - 1)]).abs();
            if k == n || residual <= tol * scale {
                return Ok(estimate);
            }
        }
        if beta == T::zero() {
            return Ok(estimate);
        }
        betas.push(beta);
        q = w.into_iter().map(|x| x / beta).collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eig_top_by_magnitude;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_dense_solver_on_noise_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = SymMatrix::<f64>::from_upper(200, |i, j| if i == j { 0.0 } else { rng.random_range(-0.5..0.5) })
            .unwrap();
        let dense = eig_top_by_magnitude(&m, 1).unwrap().values[0];
        let fast = spectral_norm(&m).unwrap();
        assert!((dense - fast).abs() <= 1e-8 * dense, "{dense} vs {fast}");
    }

    #[test]
    fn negative_dominant_eigenvalue() {
        let m = SymMatrix::new(Matrix::<f64>::diagonal(&[1.0, -4.0, 2.0])).unwrap();
        assert!((spectral_norm(&m).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let m = SymMatrix::<f64>::from_upper(5, |_, _| 0.0).unwrap();
        assert_eq!(spectral_norm(&m).unwrap(), 0.0);
    }
}
