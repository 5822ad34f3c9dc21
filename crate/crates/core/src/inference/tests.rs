use super::*;
use crate::models::{sample_forward, sample_latent, sample_rdpg, sbm_to_mixture, LatentPositions, PointMassMixture};
use crate::rng::ReplicateStreams;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn block_mixture(b: [[f64; 2]; 2]) -> PointMassMixture<f64> {
    sbm_to_mixture(&SymMatrix::new(Matrix::from_rows(&b).unwrap()).unwrap(), &[0.5, 0.5]).unwrap()
}

fn fex() -> PointMassMixture<f64> {
    block_mixture([[0.7, 0.3], [0.3, 0.5]])
}

fn p_eps(eps: f64) -> PointMassMixture<f64> {
    block_mixture([[0.5, 0.5], [0.5, 0.5 + eps]])
}

fn latent(f: &PointMassMixture<f64>, n: usize, seed: u64) -> LatentPositions<f64> {
    sample_latent(f, n, &mut ReplicateStreams::new(seed, 0).latent())
}

fn correlated_pair(f: &PointMassMixture<f64>, n: usize, rho: f64, seed: u64, rep: u64) -> (LatentPositions<f64>, Vec<SymMatrix<f64>>) {
    let streams = ReplicateStreams::new(seed, rep);
    let x = sample_latent(f, n, &mut streams.latent());
    let g = sample_forward(&x, &[rho], &streams).unwrap();
    (x, g.matrices())
}

fn frobenius(a: &Matrix<f64>) -> f64 {
    a.frobenius_norm()
}

#[test]
fn exact_probability_recovery() {
    let x = latent(&fex(), 60, 1);
    let p = x.probability_matrix();
    let est = estimate_p(&p, 2, 1e-4).unwrap();
    assert!(est.matrix().matrix().sub(p.matrix()).unwrap().max_abs() < 1e-8);
}

#[test]
fn negative_eigenvalue_keeps_sign() {
    let a = SymMatrix::<f64>::new(Matrix::from_rows(&[[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]).unwrap()).unwrap();
    let pair = eig_top_by_magnitude(&a, 2).unwrap();
    assert!(pair.eigenvalue(0) * pair.eigenvalue(1) < 0.0);
    let est = estimate_p(&a, 2, 0.01).unwrap();
    // The rank-2 truncation reproduces A exactly, so trimming maps 0 → ε and 1 → 1−ε.
    assert!((est.get(0, 1) - 0.99).abs() < 1e-12);
    assert!((est.get(0, 2) - 0.01).abs() < 1e-12);
}

#[test]
fn epsilon_range() {
    let a = SymMatrix::<f64>::identity(3);
    assert!(matches!(estimate_p(&a, 1, 0.0), Err(InferenceError::EpsilonOutOfRange(_))));
    assert!(matches!(estimate_p(&a, 1, 0.5), Err(InferenceError::EpsilonOutOfRange(_))));
}

#[test]
fn probability_estimates_are_accurate() {
    let f = fex();
    for rep in 0..50 {
        let x = latent(&f, 500, 100 + rep);
        let a = sample_rdpg(&x, &mut ReplicateStreams::new(100 + rep, 0).graph(0)).to_matrix::<f64>();
        let p = x.probability_matrix();
        let est = estimate_p(&a, 2, DEFAULT_EPSILON).unwrap();
        let rel = frobenius(&est.matrix().matrix().sub(p.matrix()).unwrap()) / frobenius(p.matrix());
        assert!(rel < 0.2, "rep {rep}: {rel}");
    }
}

#[test]
fn plug_in_correlation_behaviour() {
    let f = fex();
    let (_, g) = correlated_pair(&f, 500, 0.0, 7, 0);
    let same = edge_correlation_estimate(&g[0], &g[0], 2, DEFAULT_EPSILON).unwrap();
    assert!((same - 1.0).abs() < 0.05, "{same}");

    let (_, g) = correlated_pair(&f, 1000, 0.0, 8, 0);
    let ab = edge_correlation_estimate(&g[0], &g[1], 2, DEFAULT_EPSILON).unwrap();
    let ba = edge_correlation_estimate(&g[1], &g[0], 2, DEFAULT_EPSILON).unwrap();
    assert_eq!(ab, ba);
    assert!(ab.abs() < 0.02, "{ab}");

    let reps = 10;
    let mean: f64 = (0..reps)
        .map(|r| {
            let (_, g) = correlated_pair(&f, 1000, 0.75, 9, r);
            edge_correlation_estimate(&g[0], &g[1], 2, DEFAULT_EPSILON).unwrap()
        })
        .sum::<f64>()
        / reps as f64;
    assert!((mean - 0.75).abs() < 0.03, "{mean}");
}

#[test]
fn pearson_examples() {
    let a = SymMatrix::<f64>::from_upper(6, |i, j| if i != j && (i * j) % 3 == 1 { 1.0 } else { 0.0 }).unwrap();
    assert!((pearson_correlation(&a, &a).unwrap() - 1.0).abs() < 1e-15);
    let comp = SymMatrix::from_upper(6, |i, j| if i == j { 0.0 } else { 1.0 - a[(i, j)] }).unwrap();
    assert!((pearson_correlation(&a, &comp).unwrap() + 1.0).abs() < 1e-15);
    let empty = SymMatrix::from_upper(6, |_, _| 0.0).unwrap();
    assert!(matches!(pearson_correlation(&a, &empty), Err(InferenceError::ZeroVariance)));
    assert_eq!(pearson_correlation(&a, &comp).unwrap(), pearson_correlation(&comp, &a).unwrap());
}

#[test]
fn pearson_recovers_homogeneous_correlation() {
    let f = PointMassMixture::from_rows(&[[0.6]], &[1.0]).unwrap();
    let (_, g) = correlated_pair(&f, 600, 0.4, 3, 0);
    let r = pearson_correlation(&g[0], &g[1]).unwrap();
    assert!((r - 0.4).abs() < 0.02, "{r}");
}

#[test]
fn mean_graph_special_cases() {
    let (_, g) = correlated_pair(&fex(), 80, 0.3, 2, 0);
    let single = ase(&g[0], 2).unwrap();
    assert_eq!(mean_graph_embedding(&g[..1], 2).unwrap(), single);
    let dup = vec![g[0].clone(), g[0].clone(), g[0].clone()];
    let e = mean_graph_embedding(&dup, 2).unwrap();
    assert!(e.coords().sub(single.coords()).unwrap().max_abs() < 1e-12);
}

#[test]
fn identical_graphs_average_to_single_embedding() {
    let (_, g) = correlated_pair(&fex(), 80, 0.3, 5, 0);
    let single = ase(&g[0], 2).unwrap();
    let dup = vec![g[0].clone(), g[0].clone()];
    let pa = procrustes_average_embedding(&dup, 2).unwrap();
    assert!(pa.coords().sub(single.coords()).unwrap().max_abs() < 1e-10);
    let oa = omnibus_average_embedding(&dup, 2).expect("omnibus average");
    let c = OmnibusCoefficients::classical(2).unwrap();
    let e = omni_embed(&build_omnibus(&c, &dup).unwrap(), 2, 2).unwrap();
    assert!(oa.coords().sub(e.block(0).coords()).unwrap().max_abs() < 1e-10);
}

fn latent_error(est: &Embedding<f64>, x: &LatentPositions<f64>) -> f64 {
    let truth = Embedding::new(x.x().clone()).unwrap();
    let w = procrustes(est, &truth).unwrap();
    frobenius(&est.rotate(&w).unwrap().coords().sub(x.x()).unwrap())
}

#[test]
fn averaging_two_graphs_beats_one() {
    let f = fex();
    let wins = (0..100)
        .filter(|&rep| {
            let (x, g) = correlated_pair(&f, 300, 0.0, 40, rep);
            latent_error(&mean_graph_embedding(&g, 2).unwrap(), &x) < latent_error(&ase(&g[0], 2).unwrap(), &x)
        })
        .count();
    assert!(wins >= 90, "{wins}");
}

#[test]
fn distance_matrix_properties() {
    let (_, g) = correlated_pair(&fex(), 50, 0.5, 6, 0);
    let three = vec![g[0].clone(), g[1].clone(), g[0].clone()];
    let c = OmnibusCoefficients::classical(3).unwrap();
    let e = omni_embed(&build_omnibus(&c, &three).unwrap(), 2, 3).unwrap();
    let d = block_distance_matrix(&e);
    for k in 0..3 {
        assert_eq!(d[(k, k)], 0.0);
        for l in 0..3 {
            for h in 0..3 {
                assert!(d[(k, l)] <= d[(k, h)] + d[(h, l)] + 1e-12);
            }
        }
    }
    let diff = e.block(0).coords().sub(e.block(1).coords()).unwrap().frobenius_norm();
    assert!((d[(0, 1)] - diff).abs() < 1e-12);
    let same = vec![g[0].clone(), g[0].clone()];
    let c = OmnibusCoefficients::classical(2).unwrap();
    let e = omni_embed(&build_omnibus(&c, &same).unwrap(), 2, 2).unwrap();
    assert!(block_distance_matrix(&e).matrix().max_abs() < 1e-10);
}

fn blobs(n: usize, rng: &mut ChaCha8Rng) -> (Embedding<f64>, Vec<usize>) {
    let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let coords = Matrix::from_fn(n, 2, |i, j| {
        let centre = if labels[i] == 0 { [0.0, 0.0] } else { [5.0, 5.0] };
        centre[j] + 0.3 * (rng.random::<f64>() - 0.5)
    });
    (Embedding::new(coords).unwrap(), labels)
}

#[test]
fn separated_blobs_cluster_perfectly() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (pts, truth) = blobs(60, &mut rng);
    let mut fit = gmm_cluster(&pts, 2, 10, &mut rng).unwrap();
    assert_eq!(fit.score(&truth).unwrap(), 0.0);
    assert_eq!(fit.error_vs_truth, Some(0.0));
}

#[test]
fn single_cluster_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (pts, _) = blobs(30, &mut rng);
    let truth: Vec<usize> = (0..30).map(|i| usize::from(i % 3 == 0)).collect();
    let mut fit = gmm_cluster(&pts, 1, 3, &mut rng).unwrap();
    assert!(fit.assignments.iter().all(|&a| a == 0));
    assert!((fit.score(&truth).unwrap() - 10.0 / 30.0).abs() < 1e-15);
    assert!(matches!(gmm_cluster(&pts, 31, 1, &mut rng), Err(InferenceError::BadClusterCount { .. })));
}

#[test]
fn sbm_embedding_clusters_well() {
    let f = p_eps(0.2);
    let good = (0..100)
        .filter(|&rep| {
            let streams = ReplicateStreams::new(60, rep);
            let x = sample_latent(&f, 300, &mut streams.latent());
            let a = sample_rdpg(&x, &mut streams.graph(0)).to_matrix::<f64>();
            let mut fit = gmm_cluster(&ase(&a, 2).unwrap(), 2, 10, &mut streams.auxiliary(0)).unwrap();
            fit.score(x.labels()).unwrap() < 0.05
        })
        .count();
    assert!(good >= 90, "{good}");
}

#[test]
fn hungarian_matches_permutation_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let truth: Vec<usize> = (0..80).map(|_| rng.random_range(0..8)).collect();
        let pred: Vec<usize> = truth
            .iter()
            .map(|&t| if rng.random::<f64>() < 0.6 { (t * 3 + 1) % 8 } else { rng.random_range(0..8) })
            .collect();
        let fast = clustering_error(&pred, &truth).unwrap();
        let mut best = 0usize;
        for perm in (0..8).permutations(8) {
            let hits = pred.iter().zip(&truth).filter(|&(&p, &t)| perm[p] == t).count();
            best = best.max(hits);
        }
        assert!((fast - (1.0 - best as f64 / 80.0)).abs() < 1e-15);
    }
}

use itertools::Itertools;

#[test]
fn nearest_neighbour_rules() {
    let train = Embedding::new(Matrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0]]).unwrap()).unwrap();
    let test = Embedding::new(Matrix::from_rows(&[[1.0, 0.0], [0.5, 0.0], [0.9, 0.1]]).unwrap()).unwrap();
    assert_eq!(knn_classify(&train, &[7, 3, 5], &test).unwrap(), vec![3, 7, 3]);
    let one = Embedding::new(Matrix::from_rows(&[[2.0, 2.0]]).unwrap()).unwrap();
    assert_eq!(knn_classify(&one, &[4], &test).unwrap(), vec![4, 4, 4]);
    let empty = Embedding::new(Matrix::<f64>::zeros(0, 2)).unwrap();
    assert!(matches!(knn_classify(&empty, &[], &test), Err(InferenceError::EmptyTraining)));
}

proptest! {
    #[test]
    fn trimmed_entries_stay_inside(seed in any::<u64>(), eps in 1e-4f64..0.4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = SymMatrix::from_upper(20, |i, j| if i != j && rng.random::<f64>() < 0.3 { 1.0 } else { 0.0 }).unwrap();
        let est = estimate_p(&a, 3, eps).unwrap();
        prop_assert!(est.matrix().matrix().as_slice().iter().all(|&v| v >= eps && v <= 1.0 - eps));
    }

    #[test]
    fn error_ignores_truth_relabeling(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let truth: Vec<usize> = (0..40).map(|_| rng.random_range(0..3)).collect();
        let pred: Vec<usize> = (0..40).map(|_| rng.random_range(0..3)).collect();
        let relabel = [2, 0, 1];
        let permuted: Vec<usize> = truth.iter().map(|&t| relabel[t]).collect();
        prop_assert_eq!(clustering_error(&pred, &truth).unwrap(), clustering_error(&pred, &permuted).unwrap());
    }
}
