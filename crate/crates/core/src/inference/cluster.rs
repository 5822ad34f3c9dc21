use itertools::Itertools;
use rand::Rng;

use crate::error::InferenceError;
use crate::matrix::{cholesky, Matrix};
use crate::scalar::Scalar;
use crate::spectral::Embedding;

const MAX_ITER: usize = 500;
const REL_TOL: f64 = 1e-10;
const DET_FLOOR: f64 = 1e-9;
const RIDGE: f64 = 1e-6;
const EMPTY_MASS: f64 = 1e-8;
const PERMUTATION_LIMIT: usize = 6;

/// Fitted Gaussian mixture with MAP assignments. Labels are 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringResult<T> {
    pub assignments: Vec<usize>,
    pub weights: Vec<T>,
    pub means: Vec<Vec<T>>,
    pub covariances: Vec<Matrix<T>>,
    pub log_likelihood: T,
    /// Restart that produced this fit.
    pub restart: usize,
    pub error_vs_truth: Option<f64>,
}

impl<T: Scalar> ClusteringResult<T> {
    pub fn k(&self) -> usize {
        self.means.len()
    }

    /// Records and returns the misassignment rate against `truth`.
    pub fn score(&mut self, truth: &[usize]) -> Result<f64, InferenceError> {
        let e = clustering_error(&self.assignments, truth)?;
        self.error_vs_truth = Some(e);
        Ok(e)
    }
}

struct Fit {
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    covs: Vec<Matrix<f64>>,
    resp: Vec<Vec<f64>>,
    ll: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn kmeans_pp<R: Rng + ?Sized>(x: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut centers = vec![x[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = x.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if u < w {
                    chosen = i;
                    break;
                }
                u -= w;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = x[pick].clone();
        for (p, d) in x.iter().zip(d2.iter_mut()) {
            *d = d.min(sq_dist(p, &c));
        }
        centers.push(c);
    }
    centers
}

fn weighted_moments(x: &[Vec<f64>], w: impl Fn(usize) -> f64) -> (f64, Vec<f64>, Matrix<f64>) {
    let d = x[0].len();
    let mass: f64 = (0..x.len()).map(&w).sum();
    let mut mean = vec![0.0; d];
    for (i, p) in x.iter().enumerate() {
        for (m, v) in mean.iter_mut().zip(p) {
            *m += w(i) * v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= mass);
    let mut cov = Matrix::zeros(d, d);
    for (i, p) in x.iter().enumerate() {
        let wi = w(i);
        for a in 0..d {
            for b in 0..=a {
                cov[(a, b)] += wi * (p[a] - mean[a]) * (p[b] - mean[b]);
            }
        }
    }
    for a in 0..d {
        for b in 0..=a {
            cov[(a, b)] /= mass;
            cov[(b, a)] = cov[(a, b)];
        }
    }
    (mass, mean, cov)
}

/// Cholesky factor of `cov`, ridged when the determinant falls below the floor.
fn regularized_factor(cov: &mut Matrix<f64>) -> Matrix<f64> {
    let d = cov.rows();
    let det = cholesky(cov).map_or(0.0, |l| (0..d).map(|i| l[(i, i)] * l[(i, i)]).product());
    if det < DET_FLOOR {
        for i in 0..d {
            cov[(i, i)] += RIDGE;
        }
    }
    loop {
        if let Some(l) = cholesky(cov) {
            return l;
        }
        for i in 0..d {
            cov[(i, i)] += RIDGE;
        }
    }
}

fn log_density(p: &[f64], mean: &[f64], l: &Matrix<f64>) -> f64 {
    let d = p.len();
    let mut z = vec![0.0; d];
    let mut log_det = 0.0;
    for i in 0..d {
        let s: f64 = (0..i).map(|k| l[(i, k)] * z[k]).sum();
        z[i] = (p[i] - mean[i] - s) / l[(i, i)];
        log_det += 2.0 * l[(i, i)].ln();
    }
    let maha: f64 = z.iter().map(|v| v * v).sum();
    -0.5 * (d as f64 * (2.0 * std::f64::consts::PI).ln() + log_det + maha)
}

fn m_step(x: &[Vec<f64>], resp: &[Vec<f64>], k: usize, global: &(f64, Vec<f64>, Matrix<f64>)) -> (Vec<f64>, Vec<Vec<f64>>, Vec<Matrix<f64>>) {
    let n = x.len() as f64;
    let mut weights = Vec::with_capacity(k);
    let mut means = Vec::with_capacity(k);
    let mut covs = Vec::with_capacity(k);
    for c in 0..k {
        let mass: f64 = resp.iter().map(|r| r[c]).sum();
        if mass < EMPTY_MASS {
            weights.push(EMPTY_MASS);
            means.push(global.1.clone());
            covs.push(global.2.clone());
        } else {
            let (mass, mean, cov) = weighted_moments(x, |i| resp[i][c]);
            weights.push(mass / n);
            means.push(mean);
            covs.push(cov);
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    (weights, means, covs)
}

fn fit_once<R: Rng + ?Sized>(x: &[Vec<f64>], k: usize, rng: &mut R) -> Fit {
    let global = weighted_moments(x, |_| 1.0);
    let centers = kmeans_pp(x, k, rng);
    let mut resp: Vec<Vec<f64>> = x
        .iter()
        .map(|p| {
            let nearest = (0..k)
                .min_by(|&a, &b| sq_dist(p, &centers[a]).total_cmp(&sq_dist(p, &centers[b])))
                .expect("k >= 1");
            (0..k).map(|c| (c == nearest) as u8 as f64).collect()
        })
        .collect();
    let mut prev = f64::NEG_INFINITY;
    let mut fit = None;
    for _ in 0..MAX_ITER {
        let (weights, means, mut covs) = m_step(x, &resp, k, &global);
        let factors: Vec<Matrix<f64>> = covs.iter_mut().map(regularized_factor).collect();
        let mut ll = 0.0;
        for (p, r) in x.iter().zip(resp.iter_mut()) {
            let logs: Vec<f64> = (0..k).map(|c| weights[c].ln() + log_density(p, &means[c], &factors[c])).collect();
            let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = logs.iter().map(|v| (v - top).exp()).sum();
            let lse = top + sum.ln();
            ll += lse;
            for (rc, v) in r.iter_mut().zip(&logs) {
                *rc = (v - lse).exp();
            }
        }
        let done = ll - prev <= REL_TOL * (1.0 + ll.abs());
        prev = ll;
        fit = Some((weights, means, covs, ll));
        if done {
            break;
        }
    }
    let (weights, means, covs, ll) = fit.expect("at least one iteration");
    Fit {
        weights,
        means,
        covs,
        resp,
        ll,
    }
}

/// Full-covariance Gaussian mixture fitted by EM from `restarts` k-means++
/// initializations; the fit with the highest log-likelihood wins, ties going
/// to the earlier restart.
pub fn gmm_cluster<T: Scalar, R: Rng + ?Sized>(
    points: &Embedding<T>,
    k: usize,
    restarts: usize,
    rng: &mut R,
) -> Result<ClusteringResult<T>, InferenceError> {
    let n = points.rows();
    if k == 0 || k > n {
        return Err(InferenceError::BadClusterCount { k, rows: n });
    }
    let x: Vec<Vec<f64>> = (0..n)
        .map(|i| points.row(i).iter().map(|v| v.to_f64_lossy()).collect())
        .collect();
    let mut best: Option<(usize, Fit)> = None;
    for restart in 0..restarts.max(1) {
        let fit = fit_once(&x, k, rng);
        if best.as_ref().is_none_or(|(_, b)| fit.ll > b.ll) {
            best = Some((restart, fit));
        }
    }
    let (restart, fit) = best.expect("at least one restart");
    let assignments = fit
        .resp
        .iter()
        .map(|r| (0..k).fold(0, |arg, c| if r[c] > r[arg] { c } else { arg }))
        .collect();
    Ok(ClusteringResult {
        assignments,
        weights: fit.weights.into_iter().map(T::lit).collect(),
        means: fit.means.into_iter().map(|m| m.into_iter().map(T::lit).collect()).collect(),
        covariances: fit.covs.iter().map(Matrix::cast).collect(),
        log_likelihood: T::lit(fit.ll),
        restart,
        error_vs_truth: None,
    })
}

/// Smallest misassignment fraction over all matchings of predicted labels to
/// true labels.
pub fn clustering_error(predicted: &[usize], truth: &[usize]) -> Result<f64, InferenceError> {
    if predicted.len() != truth.len() {
        return Err(InferenceError::LabelLength {
            expected: predicted.len(),
            found: truth.len(),
        });
    }
    let n = predicted.len();
    if n == 0 {
        return Ok(0.0);
    }
    let k = predicted.iter().chain(truth).max().map_or(1, |&v| v + 1);
    let mut counts = vec![vec![0i64; k]; k];
    for (&p, &t) in predicted.iter().zip(truth) {
        counts[p][t] += 1;
    }
    let matched = if k <= PERMUTATION_LIMIT {
        (0..k)
            .permutations(k)
            .map(|perm| perm.iter().enumerate().map(|(p, &t)| counts[p][t]).sum::<i64>())
            .max()
            .unwrap_or(0)
    } else {
        let weights = pathfinding::matrix::Matrix::from_rows(counts).expect("square counts");
        pathfinding::kuhn_munkres::kuhn_munkres(&weights).0
    };
    Ok(1.0 - matched as f64 / n as f64)
}

/// 1-nearest-neighbour labels for the rows of `test`; ties go to the
/// earlier training row.
pub fn knn_classify<T: Scalar>(
    train: &Embedding<T>,
    labels: &[usize],
    test: &Embedding<T>,
) -> Result<Vec<usize>, InferenceError> {
    if train.rows() == 0 {
        return Err(InferenceError::EmptyTraining);
    }
    if labels.len() != train.rows() {
        return Err(InferenceError::LabelLength {
            expected: train.rows(),
            found: labels.len(),
        });
    }
    if train.dim() != test.dim() {
        return Err(InferenceError::ShapeMismatch {
            expected: (train.rows(), train.dim()),
            found: (test.rows(), test.dim()),
        });
    }
    Ok((0..test.rows())
        .map(|i| {
            let q = test.row(i);
            let mut best = (T::infinity(), 0);
            for j in 0..train.rows() {
                let dist: T = q.iter().zip(train.row(j)).map(|(&a, &b)| (a - b) * (a - b)).sum();
                if dist < best.0 {
                    best = (dist, j);
                }
            }
            labels[best.1]
        })
        .collect())
}
