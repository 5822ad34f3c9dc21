use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Inherent edge-correlation matrix `R` of a joint graph model.
///
/// Symmetric, unit diagonal, off-diagonal entries in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSpec<T> {
    r: Matrix<T>,
}

fn check_unit<T: Scalar>(values: &[T]) -> Result<(), ModelError> {
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

impl<T: Scalar> CorrelationSpec<T> {
    pub fn new(r: Matrix<T>) -> Result<Self, ModelError> {
        let m = r.rows();
        if r.cols() != m || m == 0 {
            return Err(ModelError::InvalidCorrelation(format!(
                "shape {:?} is not square",
                r.shape()
            )));
        }
        for i in 0..m {
            if r[(i, i)] != T::one() {
                return Err(ModelError::InvalidCorrelation(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..m {
                let v = r[(i, j)];
                if v != r[(j, i)] {
                    return Err(ModelError::InvalidCorrelation(format!("asymmetric at ({i}, {j})")));
                }
                if !(v >= T::zero() && v <= T::one()) {
                    return Err(ModelError::InvalidCorrelation(format!(
                        "entry ({i}, {j}) = {v} outside [0, 1]"
                    )));
                }
            }
        }
        Ok(Self { r })
    }

    /// Independent graphs.
    pub fn identity(m: usize) -> Self {
        Self {
            r: Matrix::identity(m),
        }
    }

    /// Every pair correlated at `rho`.
    pub fn constant(m: usize, rho: T) -> Result<Self, ModelError> {
        check_unit(&[rho])?;
        Ok(Self {
            r: Matrix::from_fn(m, m, |i, j| if i == j { T::one() } else { rho }),
        })
    }

    /// Forward-propagation correlations, `R_{k₁k₂} = ∏_{k₁ ≤ k < k₂} ϱ_k`.
    pub fn forward(rho: &[T]) -> Result<Self, ModelError> {
        check_unit(rho)?;
        let m = rho.len() + 1;
        let mut r = Matrix::identity(m);
        for a in 0..m {
            let mut prod = T::one();
            for b in (a + 1)..m {
                prod = prod * rho[b - 1];
                r[(a, b)] = prod;
                r[(b, a)] = prod;
            }
        }
        Ok(Self { r })
    }

    /// Single-generator correlations, `R = ννᵀ` off the diagonal.
    pub fn generator(nu: &[T]) -> Result<Self, ModelError> {
        check_unit(nu)?;
        let m = nu.len();
        Ok(Self {
            r: Matrix::from_fn(m, m, |i, j| if i == j { T::one() } else { nu[i] * nu[j] }),
        })
    }

    pub fn m(&self) -> usize {
        self.r.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.r[(i, j)]
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn forward_products() {
        let r = CorrelationSpec::forward(&[0.5, 0.5]).unwrap();
        assert_eq!(r.get(0, 2), 0.25);
        assert_eq!(r.get(2, 0), 0.25);
        assert_eq!(CorrelationSpec::forward(&[0.0, 0.0]).unwrap(), CorrelationSpec::identity(3));
    }

    #[test]
    fn long_forward_chain() {
        let r = CorrelationSpec::forward(&vec![0.8; 199]).unwrap();
        assert!((r.get(0, 99) - 0.8f64.powi(99)).abs() < 1e-15 * 0.8f64.powi(99) * 100.0);
    }

    #[test]
    fn generator_products() {
        assert!((CorrelationSpec::<f64>::generator(&[0.8, 0.8]).unwrap().get(0, 1) - 0.64).abs() < 1e-15);
        assert!((CorrelationSpec::<f64>::generator(&[0.3, 0.3]).unwrap().get(0, 1) - 0.09).abs() < 1e-15);
        assert_eq!(CorrelationSpec::generator(&[0.0; 4]).unwrap(), CorrelationSpec::identity(4));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(CorrelationSpec::forward(&[1.1]).is_err());
        assert!(CorrelationSpec::generator(&[-0.1, 0.2]).is_err());
        let bad = Matrix::from_rows(&[[1.0, -0.2], [-0.2, 1.0]]).unwrap();
        assert!(CorrelationSpec::new(bad).is_err());
    }

    proptest! {
        #[test]
        fn constructions_are_valid(nu in proptest::collection::vec(0.0f64..=1.0, 1..12)) {
            let g = CorrelationSpec::generator(&nu).unwrap();
            prop_assert!(CorrelationSpec::new(g.matrix().clone()).is_ok());
            let f = CorrelationSpec::forward(&nu).unwrap();
            prop_assert!(CorrelationSpec::new(f.matrix().clone()).is_ok());
        }
    }
}
