//! Small statistical helpers for Monte-Carlo aggregation.

use omnicorr::matrix::cholesky;
use omnicorr::Matrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// Running first and second moments of `d`-vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments {
    count: usize,
    sum: Vec<f64>,
    outer: Matrix<f64>,
}

impl Moments {
    pub fn new(d: usize) -> Self {
        Self {
            count: 0,
            sum: vec![0.0; d],
            outer: Matrix::zeros(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.sum.len()
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn push(&mut self, v: &[f64]) {
        debug_assert_eq!(v.len(), self.dim());
        self.count += 1;
        for (a, &x) in v.iter().enumerate() {
            self.sum[a] += x;
            for (b, &y) in v.iter().enumerate() {
                self.outer[(a, b)] += x * y;
            }
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        for (s, o) in self.sum.iter_mut().zip(&other.sum) {
            *s += o;
        }
        self.outer = self.outer.add(&other.outer).expect("same dimension");
    }

    pub fn mean(&self) -> Vec<f64> {
        let c = self.count.max(1) as f64;
        self.sum.iter().map(|s| s / c).collect()
    }

    /// Uncentered second moment `E[vvᵀ]`.
    pub fn second_moment(&self) -> Matrix<f64> {
        self.outer.scale(1.0 / self.count.max(1) as f64)
    }

    /// Unbiased sample covariance.
    pub fn covariance(&self) -> Matrix<f64> {
        let d = self.dim();
        let n = self.count as f64;
        if self.count < 2 {
            return Matrix::zeros(d, d);
        }
        let mean = self.mean();
        Matrix::from_fn(d, d, |a, b| (self.outer[(a, b)] - n * mean[a] * mean[b]) / (n - 1.0))
    }
}

/// Mean and standard error of the mean.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Entrywise standard errors of `E[vvᵀ]` from per-replicate second moments.
pub fn entry_stderr(per_replicate: &[Matrix<f64>]) -> Matrix<f64> {
    let (r, c) = per_replicate[0].shape();
    Matrix::from_fn(r, c, |a, b| {
        let v: Vec<f64> = per_replicate.iter().map(|m| m[(a, b)]).collect();
        mean_stderr(&v).1
    })
}

/// `‖Ĉ − C‖_F / ‖C‖_F`.
pub fn relative_frobenius(empirical: &Matrix<f64>, theoretical: &Matrix<f64>) -> f64 {
    empirical.sub(theoretical).expect("same shape").frobenius_norm() / theoretical.frobenius_norm()
}

pub fn trace(m: &Matrix<f64>) -> f64 {
    (0..m.rows()).map(|i| m[(i, i)]).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Energy distance `2E‖X−Y‖ − E‖X−X'‖ − E‖Y−Y'‖` between two samples,
/// with U-statistics for the within-sample terms. Zero iff the laws agree.
pub fn energy_distance(x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
    fn within(s: &[Vec<f64>]) -> f64 {
        let n = s.len();
        if n < 2 {
            return 0.0;
        }
        let mut total = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                total += dist(&s[i], &s[j]);
            }
        }
        total / (n * (n - 1) / 2) as f64
    }
    let cross = x.iter().flat_map(|a| y.iter().map(move |b| dist(a, b))).sum::<f64>() / (x.len() * y.len()) as f64;
    2.0 * cross - within(x) - within(y)
}

/// `count` draws from `N(0, cov)`; `None` unless `cov` is positive definite.
pub fn gaussian_sample<R: Rng + ?Sized>(cov: &Matrix<f64>, count: usize, rng: &mut R) -> Option<Vec<Vec<f64>>> {
    let d = cov.rows();
    let l = cholesky(cov)?;
    let draws = (0..count)
        .map(|_| {
            let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            l.matvec(&z)
        })
        .collect();
    Some(draws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn moments_match_two_pass_formulas() {
        let pts = [[1.0, 2.0], [3.0, -1.0], [0.5, 0.5], [2.0, 4.0]];
        let mut m = Moments::new(2);
        let mut half = Moments::new(2);
        for p in &pts[..2] {
            m.push(p);
        }
        for p in &pts[2..] {
            half.push(p);
        }
        m.merge(&half);
        let mean = [6.5 / 4.0, 5.5 / 4.0];
        let cov = m.covariance();
        for a in 0..2 {
            for b in 0..2 {
                let want = pts.iter().map(|p| (p[a] - mean[a]) * (p[b] - mean[b])).sum::<f64>() / 3.0;
                assert!((cov[(a, b)] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_sample_has_requested_covariance() {
        let cov = Matrix::from_rows(&[[2.0, 0.6], [0.6, 1.0]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut m = Moments::new(2);
        for v in gaussian_sample(&cov, 200_000, &mut rng).unwrap() {
            m.push(&v);
        }
        assert!(relative_frobenius(&m.covariance(), &cov) < 0.02);
    }

    #[test]
    fn energy_distance_separates_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let id = Matrix::identity(2);
        let a = gaussian_sample(&id, 300, &mut rng).unwrap();
        let b = gaussian_sample(&id, 300, &mut rng).unwrap();
        let c = gaussian_sample(&id.scale(4.0), 300, &mut rng).unwrap();
        let same = energy_distance(&a, &b);
        let different = energy_distance(&a, &c);
        assert!(same.abs() < 0.05, "{same}");
        assert!(different > 0.2, "{different}");
    }

    #[test]
    fn stderr_of_constant_is_zero() {
        assert_eq!(mean_stderr(&[2.0, 2.0, 2.0]), (2.0, 0.0));
    }
}
