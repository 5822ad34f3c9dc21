use rand::Rng;

use crate::error::OmnibusError;
use crate::scalar::Scalar;

use super::OmnibusCoefficients;

fn require_graphs(m: usize, min: usize) -> Result<(), OmnibusError> {
    if m < min {
        Err(OmnibusError::TooFewGraphs { min, found: m })
    } else {
        Ok(())
    }
}

fn check_positive<T: Scalar>(w: &[T]) -> Result<(), OmnibusError> {
    for (index, &v) in w.iter().enumerate() {
        if !(v > T::zero() && v.is_finite()) {
            return Err(OmnibusError::NonPositiveWeight {
                index,
                value: v.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// Coefficients for blocks given as a two-graph mixture: `pair(k, ℓ)` for
/// `k < ℓ` returns `(weight on A^k, weight on A^ℓ)`; diagonal blocks are `A^k`.
fn from_pairs<T: Scalar>(m: usize, pair: impl Fn(usize, usize) -> (T, T)) -> OmnibusCoefficients<T> {
    OmnibusCoefficients::from_fn(m, |q, k, l| {
        if k == l {
            return if q == k { T::one() } else { T::zero() };
        }
        let (lo, hi) = (k.min(l), k.max(l));
        let (a, b) = pair(lo, hi);
        if q == lo {
            a
        } else if q == hi {
            b
        } else {
            T::zero()
        }
    })
}

impl<T: Scalar> OmnibusCoefficients<T> {
    /// The trivial tensor for a single graph.
    pub fn single() -> Self {
        Self::from_fn(1, |_, _, _| T::one())
    }

    /// Off-diagonal block `(k, ℓ)` is `(A^k + A^ℓ) / 2`.
    pub fn classical(m: usize) -> Result<Self, OmnibusError> {
        require_graphs(m, 2)?;
        let half = T::lit(0.5);
        from_pairs(m, |_, _| (half, half)).validated()
    }

    /// Every off-diagonal block is the mean graph `Ā`.
    pub fn total_average(m: usize) -> Result<Self, OmnibusError> {
        require_graphs(m, 2)?;
        let inv = T::one() / T::count(m);
        Self::from_fn(m, |q, k, l| {
            if k == l {
                if q == k {
                    T::one()
                } else {
                    T::zero()
                }
            } else {
                inv
            }
        })
        .validated()
    }

    /// Off-diagonal block `(k, ℓ)` is `(w_k A^k + w_ℓ A^ℓ) / (w_k + w_ℓ)`.
    pub fn weighted_pairwise(w: &[T]) -> Result<Self, OmnibusError> {
        require_graphs(w.len(), 2)?;
        check_positive(w)?;
        from_pairs(w.len(), |a, b| {
            let s = w[a] + w[b];
            (w[a] / s, w[b] / s)
        })
        .validated()
    }

    /// Off-diagonal block `(k, ℓ)` with `k < ℓ` is
    /// `(A^k + w_ℓ A^ℓ) / (w_ℓ + 1)`; `w` must be positive and strictly
    /// increasing.
    pub fn dampened(w: &[T]) -> Result<Self, OmnibusError> {
        require_graphs(w.len(), 2)?;
        check_positive(w)?;
        if let Some(i) = (1..w.len()).find(|&i| !(w[i] > w[i - 1])) {
            return Err(OmnibusError::NotIncreasing(i));
        }
        from_pairs(w.len(), |_, b| {
            let s = w[b] + T::one();
            (T::one() / s, w[b] / s)
        })
        .validated()
    }

    /// Off-diagonal block `(k, ℓ)` with `k < ℓ` is `((ℓ−1) A^k + A^ℓ) / ℓ`
    /// in 1-based indexing.
    pub fn forward(m: usize) -> Result<Self, OmnibusError> {
        require_graphs(m, 2)?;
        from_pairs(m, |_, b| {
            let i = T::count(b + 1);
            ((i - T::one()) / i, T::one() / i)
        })
        .validated()
    }

    /// Consecutive pairs `(1, 2), (3, 4), …` (1-based) are averaged; every
    /// other off-diagonal block is the earlier graph. Needs an even `m`.
    pub fn pair_preserving(m: usize) -> Result<Self, OmnibusError> {
        require_graphs(m, 2)?;
        if m % 2 != 0 {
            return Err(OmnibusError::OddGraphCount(m));
        }
        let half = T::lit(0.5);
        from_pairs(m, |a, b| {
            if a % 2 == 0 && b == a + 1 {
                (half, half)
            } else {
                (T::one(), T::zero())
            }
        })
        .validated()
    }
}

/// A random valid coefficient tensor: random convex weights on every block,
/// shrunk toward the classical construction until dominance holds.
pub fn random_valid<T: Scalar, R: Rng + ?Sized>(m: usize, rng: &mut R) -> OmnibusCoefficients<T> {
    if m == 1 {
        return OmnibusCoefficients::single();
    }
    let mut raw = vec![0.0f64; m * m * m];
    for k in 0..m {
        for l in k..m {
            let draws: Vec<f64> = (0..m)
                .map(|_| {
                    let u: f64 = rng.random();
                    if rng.random::<f64>() < 0.3 {
                        0.0
                    } else {
                        u * u
                    }
                })
                .collect();
            let total: f64 = draws.iter().sum();
            for q in 0..m {
                let v = if total > 0.0 {
                    draws[q] / total
                } else {
                    (q == k) as u8 as f64
                };
                raw[(q * m + k) * m + l] = v;
                raw[(q * m + l) * m + k] = v;
            }
        }
    }
    let classical = OmnibusCoefficients::<f64>::classical(m).expect("m >= 2");
    for step in 0..=20 {
        let t = step as f64 / 20.0;
        let mixed = OmnibusCoefficients::from_fn(m, |q, k, l| {
            T::lit((1.0 - t) * raw[(q * m + k) * m + l] + t * classical.get(q, k, l))
        });
        if mixed.validate().is_valid() {
            return mixed;
        }
    }
    unreachable!("the classical tensor is valid")
}
