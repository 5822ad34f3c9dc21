use crate::error::TheoryError;
use crate::models::CorrelationSpec;
use crate::scalar::Scalar;

/// Method and model correlations for the dampened omnibus matrix with
/// `w_ℓ = ℓ`, written out term by term for `s₁ < s₂`.
///
/// Indices are 0-based; the sums follow the 1-based expansion internally.
pub fn dampened_correlation_closed_form<T: Scalar>(
    r: &CorrelationSpec<T>,
    s1: usize,
    s2: usize,
) -> Result<(T, T), TheoryError> {
    let m = r.m();
    for s in [s1, s2] {
        if s >= m {
            return Err(TheoryError::IndexOutOfRange { index: s, m });
        }
    }
    if s1 == s2 {
        return Err(TheoryError::SameIndex);
    }
    if s1 > s2 {
        return Err(TheoryError::Pattern(format!("expected s1 < s2, got {s1} > {s2}")));
    }
    let (s1, s2) = (s1 + 1, s2 + 1);
    let c = |v: usize| T::count(v);
    let rho = |q: usize, l: usize| r.get(q - 1, l - 1);
    let (s1f, s2f) = (c(s1), c(s2));
    let one = T::one();

    let a = (s2f - s1f) / ((s1f + one) * (s2f + one));
    let d1 = (s1f * s1f + one) / (s1f + one) + ((s1 + 1)..=m).filter(|&l| l != s2).map(|l| one / (c(l) + one)).sum::<T>();
    let d2 = (s2f * s2f - s2f + one) / (s2f + one) + ((s2 + 1)..=m).map(|h| one / (c(h) + one)).sum::<T>();
    let b = |l: usize| c(l) / (c(l) + one) - one / (s2f + one);

    let bracket_me = (s1f - one) * (s2f - s1f) * (s2f - s1f) / ((s1f + one).powi(2) * (s2f + one).powi(2))
        + d1 * d1
        + ((s1 + 1)..s2).map(|l| b(l) * b(l)).sum::<T>()
        + d2 * d2;
    let m2 = c(m * m);
    let rho_me = one - bracket_me / (T::lit(2.0) * m2);

    let mut mo = T::zero();
    for l in 1..s1 {
        for q in 1..l {
            mo = mo + (s2f - s1f) * (s1f - s2f) / ((s1f + one).powi(2) * (s2f + one).powi(2)) * rho(q, l);
        }
    }
    for q in 1..s1 {
        mo = mo - a * d1 * rho(q, s1);
    }
    for l in (s1 + 1)..s2 {
        for q in 1..s1 {
            mo = mo + a * (-b(l)) * rho(q, l);
        }
        mo = mo + d1 * (-b(l)) * rho(s1, l);
        for q in (s1 + 1)..l {
            mo = mo + b(q) * (-b(l)) * rho(q, l);
        }
    }
    for q in 1..s1 {
        mo = mo + a * d2 * rho(q, s2);
    }
    mo = mo + d1 * d2 * rho(s1, s2);
    for q in (s1 + 1)..s2 {
        mo = mo + b(q) * d2 * rho(q, s2);
    }
    Ok((rho_me, mo / m2))
}

/// Induced correlation for weighted pairwise blocks when `w_{s₁} = w_{s₂} = w`
/// and every other weight is 1:
/// `1 − ((m−1)w + 1)² / (m²(1+w)²) · (1 − ρ_{s₁s₂})`.
pub fn weighted_correlation_closed_form<T: Scalar>(
    weights: &[T],
    r: &CorrelationSpec<T>,
    s1: usize,
    s2: usize,
) -> Result<T, TheoryError> {
    let m = weights.len();
    if r.m() != m {
        return Err(TheoryError::DimensionMismatch {
            expected: m,
            found: r.m(),
        });
    }
    for s in [s1, s2] {
        if s >= m {
            return Err(TheoryError::IndexOutOfRange { index: s, m });
        }
    }
    if s1 == s2 {
        return Err(TheoryError::SameIndex);
    }
    let w = weights[s1];
    if weights[s2] != w {
        return Err(TheoryError::Pattern(format!("w[{s1}] = {w} differs from w[{s2}] = {}", weights[s2])));
    }
    if let Some(k) = (0..m).find(|&k| k != s1 && k != s2 && weights[k] != T::one()) {
        return Err(TheoryError::Pattern(format!("w[{k}] = {} but the remaining weights must be 1", weights[k])));
    }
    let (mf, one) = (T::count(m), T::one());
    let num = (mf - one) * w + one;
    Ok(one - num * num / (mf * mf * (one + w) * (one + w)) * (one - r.get(s1, s2)))
}
