//! Limiting covariances and correlations of omnibus embeddings.
//!
//! All expectations over the latent distribution are finite sums over the
//! atoms of a [`PointMassMixture`]. Graph indices are 0-based.

mod closed_forms;

use crate::error::{ModelError, TheoryError};
use crate::matrix::{dot, spd_inverse, Matrix, SymMatrix};
use crate::models::{CorrelationSpec, PointMassMixture};
use crate::omnibus::AlphaWeights;
use crate::scalar::Scalar;

pub use closed_forms::{dampened_correlation_closed_form, weighted_correlation_closed_form};

const INNER_TOL: f64 = 1e-10;
const FORM_TOL: f64 = 1e-12;

/// A limiting covariance `coefficient · Σ(x)`.
///
/// When the coefficient comes from an omnibus construction its split into a
/// method-induced part (from the weights alone) and a model-inherent part
/// (from the edge correlations) is kept.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitCovariance<T> {
    base: SymMatrix<T>,
    coefficient: T,
    split: Option<(T, T)>,
    matrix: SymMatrix<T>,
}

impl<T: Scalar> LimitCovariance<T> {
    fn scaled(base: &SymMatrix<T>, coefficient: T, split: Option<(T, T)>) -> Self {
        let matrix = SymMatrix::from_upper(base.order(), |i, j| coefficient * base[(i, j)]).expect("finite covariance");
        Self {
            base: base.clone(),
            coefficient,
            split,
            matrix,
        }
    }

    pub fn d(&self) -> usize {
        self.base.order()
    }

    pub fn matrix(&self) -> &SymMatrix<T> {
        &self.matrix
    }

    /// `Σ(x)`.
    pub fn base(&self) -> &SymMatrix<T> {
        &self.base
    }

    pub fn coefficient(&self) -> T {
        self.coefficient
    }

    pub fn method_part(&self) -> Option<T> {
        self.split.map(|s| s.0)
    }

    pub fn model_part(&self) -> Option<T> {
        self.split.map(|s| s.1)
    }
}

/// Limiting correlation between two embedded graphs, `total = method + model`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InducedCorrelation<T> {
    pub total: T,
    pub method: T,
    pub model: T,
}

/// Induced correlations between every pair of embedded graphs.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationProfile<T> {
    pub rho: Matrix<T>,
    pub method_part: Matrix<T>,
    pub model_part: Matrix<T>,
}

impl<T: Scalar> CorrelationProfile<T> {
    pub fn m(&self) -> usize {
        self.rho.rows()
    }
}

/// `Δ = E[X Xᵀ]`.
pub fn delta<T: Scalar>(f: &PointMassMixture<T>) -> SymMatrix<T> {
    f.second_moment()
}

/// `Σ(x) = Δ⁻¹ E[(xᵀX − (xᵀX)²) X Xᵀ] Δ⁻¹`.
pub fn sigma_x<T: Scalar>(f: &PointMassMixture<T>, x: &[T]) -> Result<LimitCovariance<T>, TheoryError> {
    let d = f.dim();
    if x.len() != d {
        return Err(TheoryError::DimensionMismatch {
            expected: d,
            found: x.len(),
        });
    }
    let mut middle = Matrix::zeros(d, d);
    for k in 0..f.len() {
        let atom = f.atom(k);
        let p = dot(x, atom);
        if !(p >= -T::lit(INNER_TOL) && p <= T::one() + T::lit(INNER_TOL)) {
            return Err(TheoryError::InnerProductOutOfRange {
                atom: k,
                value: p.to_f64_lossy(),
            });
        }
        let p = p.max(T::zero()).min(T::one());
        let w = f.weights()[k] * (p - p * p);
        for i in 0..d {
            for j in 0..d {
                middle[(i, j)] = middle[(i, j)] + w * atom[i] * atom[j];
            }
        }
    }
    let inv = spd_inverse(delta(f).matrix()).ok_or(ModelError::RankDeficient { smallest: 0.0 })?;
    let base = inv
        .matmul(&middle)
        .and_then(|t| t.matmul(&inv))
        .and_then(|t| SymMatrix::symmetrize(&t))
        .map_err(ModelError::from)?;
    Ok(LimitCovariance::scaled(&base, T::one(), None))
}

fn check_unit<T: Scalar>(rho: T) -> Result<(), TheoryError> {
    if rho >= T::zero() && rho <= T::one() {
        Ok(())
    } else {
        Err(TheoryError::CorrelationOutOfRange(rho.to_f64_lossy()))
    }
}

/// Separately embedded graphs with edge correlation `ρ`: `Σ̃(x, ρ) = 2(1−ρ) Σ(x)`.
pub fn cov_pairwise_rho<T: Scalar>(
    f: &PointMassMixture<T>,
    x: &[T],
    rho: T,
) -> Result<LimitCovariance<T>, TheoryError> {
    check_unit(rho)?;
    let sigma = sigma_x(f, x)?;
    Ok(LimitCovariance::scaled(&sigma.base, T::lit(2.0) * (T::one() - rho), None))
}

fn check_index(index: usize, m: usize) -> Result<(), TheoryError> {
    if index < m {
        Ok(())
    } else {
        Err(TheoryError::IndexOutOfRange { index, m })
    }
}

fn check_shapes<T: Scalar>(alpha: &AlphaWeights<T>, r: &CorrelationSpec<T>) -> Result<usize, TheoryError> {
    let m = alpha.m();
    if m == 0 {
        return Err(TheoryError::NoGraphs(0));
    }
    if r.m() != m {
        return Err(TheoryError::DimensionMismatch {
            expected: m,
            found: r.m(),
        });
    }
    Ok(m)
}

/// Method and model parts of the single-residual coefficient:
/// `Σ_q α(s,q)² / m²` and `2 Σ_{q<ℓ} α(s,q) α(s,ℓ) ρ_{qℓ} / m²`.
pub fn single_residual_coefficients<T: Scalar>(
    alpha: &AlphaWeights<T>,
    r: &CorrelationSpec<T>,
    s: usize,
) -> Result<(T, T), TheoryError> {
    let m = check_shapes(alpha, r)?;
    check_index(s, m)?;
    let a = alpha.row(s);
    let m2 = T::count(m * m);
    let method: T = a.iter().map(|&v| v * v).sum();
    let mut model = T::zero();
    for q in 0..m {
        for l in (q + 1)..m {
            model = model + a[q] * a[l] * r.get(q, l);
        }
    }
    Ok((method / m2, T::lit(2.0) * model / m2))
}

/// Covariance of the residual of block `s` around the true latent position.
pub fn cov_single_residual<T: Scalar>(
    alpha: &AlphaWeights<T>,
    r: &CorrelationSpec<T>,
    f: &PointMassMixture<T>,
    x: &[T],
    s: usize,
) -> Result<LimitCovariance<T>, TheoryError> {
    let (method, model) = single_residual_coefficients(alpha, r, s)?;
    let sigma = sigma_x(f, x)?;
    Ok(LimitCovariance::scaled(&sigma.base, method + model, Some((method, model))))
}

fn row_difference<T: Scalar>(
    alpha: &AlphaWeights<T>,
    r: &CorrelationSpec<T>,
    s1: usize,
    s2: usize,
) -> Result<Vec<T>, TheoryError> {
    let m = check_shapes(alpha, r)?;
    check_index(s1, m)?;
    check_index(s2, m)?;
    if s1 == s2 {
        return Err(TheoryError::SameIndex);
    }
    Ok(alpha.row(s1).iter().zip(alpha.row(s2)).map(|(&a, &b)| a - b).collect())
}

/// The two expressions for the block-difference coefficient:
/// `(Σ_q Δ_q² + 2 Σ_{q<ℓ} Δ_q Δ_ℓ ρ_{qℓ}) / m²` and
/// `2 Σ_{q<ℓ} Δ_q Δ_ℓ (ρ_{qℓ} − 1) / m²`, with `Δ_q = α(s₁,q) − α(s₂,q)`.
/// They coincide whenever the rows of `α` have equal sums.
pub fn block_difference_forms<T: Scalar>(
    alpha: &AlphaWeights<T>,
    r: &CorrelationSpec<T>,
    s1: usize,
    s2: usize,
) -> Result<(T, T), TheoryError> {
    let diff = row_difference(alpha, r, s1, s2)?;
    let m = diff.len();
    let m2 = T::count(m * m);
    let squares: T = diff.iter().map(|&v| v * v).sum();
    let mut cross = T::zero();
    let mut cross_shifted = T::zero();
    for q in 0..m {
        if diff[q] == T::zero() {
            continue;
        }
        for l in (q + 1)..m {
            let prod = diff[q] * diff[l];
            cross = cross + prod * r.get(q, l);
            cross_shifted = cross_shifted + prod * (r.get(q, l) - T::one());
        }
    }
    let two = T::lit(2.0);
    Ok(((squares + two * cross) / m2, two * cross_shifted / m2))
}

/// Covariance of the difference between blocks `s₁` and `s₂` of the same
/// vertex.
pub fn cov_block_difference<T: Scalar>(
    alpha: &AlphaWeights<T>,
    r: &CorrelationSpec<T>,
    f: &PointMassMixture<T>,
    x: &[T],
    s1: usize,
    s2: usize,
) -> Result<LimitCovariance<T>, TheoryError> {
    let (direct, shifted) = block_difference_forms(alpha, r, s1, s2)?;
    let sums: Vec<T> = [s1, s2].iter().map(|&s| alpha.row(s).iter().copied().sum()).collect();
    if (sums[0] - sums[1]).abs() <= T::lit(FORM_TOL) * sums[0].abs().max(T::one()) {
        debug_assert!(
            (direct - shifted).abs() <= T::lit(FORM_TOL) * direct.abs().max(T::one()) * T::count(alpha.m()),
            "block-difference forms disagree: {direct} vs {shifted}"
        );
    }
    let c = induced_correlation(alpha, r, s1, s2)?;
    let two = T::lit(2.0);
    let sigma = sigma_x(f, x)?;
    Ok(LimitCovariance::scaled(
        &sigma.base,
        direct,
        Some((two * (T::one() - c.method), -two * c.model)),
    ))
}

/// `ρ(s₁,s₂) = 1 − Σ_q Δ_q²/(2m²) − Σ_{q<ℓ} Δ_q Δ_ℓ ρ_{qℓ}/m²`, split into
/// the method part `1 − Σ_q Δ_q²/(2m²)` and the model part.
pub fn induced_correlation<T: Scalar>(
    alpha: &AlphaWeights<T>,
    r: &CorrelationSpec<T>,
    s1: usize,
    s2: usize,
) -> Result<InducedCorrelation<T>, TheoryError> {
    let diff = row_difference(alpha, r, s1, s2)?;
    let m = diff.len();
    let m2 = T::count(m * m);
    let squares: T = diff.iter().map(|&v| v * v).sum();
    let mut cross = T::zero();
    for q in 0..m {
        if diff[q] == T::zero() {
            continue;
        }
        for l in (q + 1)..m {
            cross = cross + diff[q] * diff[l] * r.get(q, l);
        }
    }
    let method = T::one() - squares / (T::lit(2.0) * m2);
    let model = -cross / m2;
    Ok(InducedCorrelation {
        total: method + model,
        method,
        model,
    })
}

/// [`induced_correlation`] over all pairs; the diagonal is `1 = 1 + 0`.
pub fn correlation_profile<T: Scalar>(
    alpha: &AlphaWeights<T>,
    r: &CorrelationSpec<T>,
) -> Result<CorrelationProfile<T>, TheoryError> {
    let m = check_shapes(alpha, r)?;
    let mut rho = Matrix::identity(m);
    let mut method_part = Matrix::identity(m);
    let mut model_part = Matrix::zeros(m, m);
    for s1 in 0..m {
        for s2 in (s1 + 1)..m {
            let c = induced_correlation(alpha, r, s1, s2)?;
            for (a, b) in [(s1, s2), (s2, s1)] {
                rho[(a, b)] = c.total;
                method_part[(a, b)] = c.method;
                model_part[(a, b)] = c.model;
            }
        }
    }
    Ok(CorrelationProfile {
        rho,
        method_part,
        model_part,
    })
}

/// Covariance of an embedding averaged over `m` graphs with pairwise edge
/// correlation `ρ`: `((1−ρ)/m + ρ) Σ(x)`.
pub fn avg_embedding_covariance<T: Scalar>(
    f: &PointMassMixture<T>,
    x: &[T],
    m: usize,
    rho: T,
) -> Result<LimitCovariance<T>, TheoryError> {
    check_unit(rho)?;
    if m == 0 {
        return Err(TheoryError::NoGraphs(0));
    }
    let sigma = sigma_x(f, x)?;
    let coefficient = (T::one() - rho) / T::count(m) + rho;
    Ok(LimitCovariance::scaled(&sigma.base, coefficient, None))
}

/// `m_eff = m / (1 + ρ(m−1))`.
pub fn effective_sample_size<T: Scalar>(m: usize, rho: T) -> Result<T, TheoryError> {
    check_unit(rho)?;
    if m == 0 {
        return Err(TheoryError::NoGraphs(0));
    }
    let mf = T::count(m);
    Ok(mf / (T::one() + rho * (mf - T::one())))
}
