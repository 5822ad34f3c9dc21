use crate::error::SpectralError;
use crate::scalar::Scalar;

/// Scree-plot elbow by two-group profile likelihood.
///
/// Each split `q ∈ 1..p` puts the first `q` values in one Gaussian group and
/// the rest in another, with separate means and one shared variance. The
/// profile likelihood is monotone decreasing in the pooled within-group sum
/// of squares, so the split minimizing it wins; a zero sum counts as
/// infinite likelihood. Ties go to the smaller `q`, which is returned as the
/// selected dimension.
pub fn elbow_dimension<T: Scalar>(values: &[T]) -> Result<usize, SpectralError> {
    let p = values.len();
    if p < 2 {
        return Err(SpectralError::TooFewValues(p));
    }
    for (i, w) in values.windows(2).enumerate() {
        if !w[0].is_finite() || !w[1].is_finite() || w[1] > w[0] {
            return Err(SpectralError::NotDescending(i + 1));
        }
    }
    let ss = |part: &[T]| {
        let mean = part.iter().copied().sum::<T>() / T::count(part.len());
        part.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>()
    };
    let mut best_q = 1;
    let mut best_ss = T::infinity();
    for q in 1..p {
        let pooled = ss(&values[..q]) + ss(&values[q..]);
        if pooled < best_ss {
            best_ss = pooled;
            best_q = q;
        }
        if pooled == T::zero() {
            break;
        }
    }
    Ok(best_q)
}
