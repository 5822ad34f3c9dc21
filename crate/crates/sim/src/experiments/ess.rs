//! Averaged-embedding sweeps: residual covariance factors and clustering
//! error as inherent correlation grows.

use omnicorr::{gmm_cluster, sigma_x, EmbeddingF64, Matrix, MixtureF64, ReplicateStreams};

use super::{replicates, verdict};
use crate::config::{p_eps_mixture, sampler_for, ExperimentConfig, Family, Method, Sampler, Strategy};
use crate::error::SimError;
use crate::pipeline::{averaged_embedding, sample_collection, scaled_row_difference};
use crate::report::{Cell, Check, MonteCarloReport};
use crate::stats::{entry_stderr, mean_stderr, relative_frobenius, trace, Moments};

pub const COLUMNS: [&str; 14] = [
    "n",
    "rho",
    "eps",
    "strategy",
    "atom",
    "factor_theory",
    "m_eff",
    "factor_empirical",
    "factor_stderr",
    "cov_rel_error",
    "error_mean",
    "error_stderr",
    "tolerance",
    "pass",
];

/// One grid point.
struct Cell3 {
    n: usize,
    rho: Option<f64>,
    eps: Option<f64>,
    mixture: MixtureF64,
    sampler: Sampler,
}

/// Residual weight vector `β` of the averaged estimate: its residual is
/// `Σ_q β_q (A^q − P)`-driven, so its covariance is `βᵀRβ · Σ(x)`.
fn residual_weights(strategy: Strategy, method: &Method) -> Vec<f64> {
    let m = match method {
        Method::Omnibus(c) => c.m(),
        Method::Separate(m) => *m,
    };
    match (strategy, method) {
        (Strategy::OmniAvg, Method::Omnibus(c)) => {
            let alpha = c.alpha_weights();
            let scale = 1.0 / (m * m) as f64;
            (0..m).map(|q| (0..m).map(|s| alpha.get(s, q)).sum::<f64>() * scale).collect()
        }
        (Strategy::Single, _) => (0..m).map(|q| if q == 0 { 1.0 } else { 0.0 }).collect(),
        _ => vec![1.0 / m as f64; m],
    }
}

fn grid(cfg: &ExperimentConfig) -> Result<Vec<Cell3>, SimError> {
    let e = &cfg.experiment;
    let m = cfg.model.m;
    let ns = e.n_grid.clone().unwrap_or_else(|| vec![cfg.model.n]);
    let rhos: Vec<Option<f64>> = e.rho_grid.as_ref().map_or(vec![None], |g| g.iter().copied().map(Some).collect());
    let epss: Vec<Option<f64>> = e.eps_grid.as_ref().map_or(vec![None], |g| g.iter().copied().map(Some).collect());
    let mut cells = Vec::new();
    for &n in &ns {
        for &eps in &epss {
            for &rho in &rhos {
                let mixture = match eps {
                    Some(eps) => p_eps_mixture(eps)?,
                    None => cfg.mixture()?,
                };
                let sampler = match rho {
                    Some(rho) => sampler_for(Family::Constant, &[rho], m)?,
                    None => cfg.sampler()?,
                };
                cells.push(Cell3 {
                    n,
                    rho,
                    eps,
                    mixture,
                    sampler,
                });
            }
        }
    }
    Ok(cells)
}

/// Per strategy: monitored-atom moments and the clustering error.
type ReplicateOutput = Vec<(Vec<Moments>, Option<f64>)>;

fn run_sweep(cfg: &ExperimentConfig, default_strategies: &[Strategy]) -> Result<MonteCarloReport, SimError> {
    let e = &cfg.experiment;
    let m = cfg.model.m;
    let method = cfg.method()?;
    let strategies = e.strategies.clone().unwrap_or_else(|| default_strategies.to_vec());
    if !(e.factor || e.cluster) {
        return Err(SimError::config("enable `factor`, `cluster`, or both"));
    }
    let mut report = MonteCarloReport::new(cfg, &COLUMNS);
    let cells = grid(cfg)?;
    // (n, eps, strategy) -> (rho, mean error, stderr) for the degradation checks.
    let mut errors: Vec<((usize, Option<f64>, Strategy), Option<f64>, f64, f64)> = Vec::new();

    for (ci, cell) in cells.iter().enumerate() {
        let r = cell.sampler.correlation(m)?;
        let d = cfg.experiment.d.unwrap_or(cell.mixture.dim());
        let k = cell.mixture.len();
        let first = (ci * e.n_mc) as u64;
        let outputs: Vec<ReplicateOutput> = replicates(first, e.n_mc, |rep| {
            let streams = ReplicateStreams::new(e.seed, rep);
            let g = sample_collection(&cell.mixture, cell.n, &cell.sampler, &streams)?;
            let graphs = g.matrices();
            let x = g.latent.x();
            let labels = g.latent.labels();
            strategies
                .iter()
                .enumerate()
                .map(|(si, &s)| {
                    let est = averaged_embedding(s, &method, &graphs, x, d)?;
                    let moments = if e.factor {
                        e.atoms
                            .iter()
                            .map(|&atom| {
                                let mut mom = Moments::new(d);
                                for i in (0..cell.n).filter(|&i| labels[i] == atom) {
                                    mom.push(&scaled_row_difference(&est, x, i));
                                }
                                mom
                            })
                            .collect()
                    } else {
                        Vec::new()
                    };
                    let error = if e.cluster {
                        let fit = gmm_cluster(&EmbeddingF64::new(est)?, k, e.restarts, &mut streams.auxiliary(si as u64))?;
                        Some(omnicorr::clustering_error(&fit.assignments, labels)?)
                    } else {
                        None
                    };
                    Ok((moments, error))
                })
                .collect()
        })?;

        for (si, &s) in strategies.iter().enumerate() {
            let beta = residual_weights(s, &method);
            let factor: f64 = (0..m)
                .flat_map(|q| (0..m).map(move |l| (q, l)))
                .map(|(q, l)| beta[q] * beta[l] * r.get(q, l))
                .sum();
            let errs: Vec<f64> = outputs.iter().filter_map(|o| o[si].1).collect();
            let (err_mean, err_se) = if e.cluster { mean_stderr(&errs) } else { (f64::NAN, f64::NAN) };
            if e.cluster {
                errors.push(((cell.n, cell.eps, s), cell.rho, err_mean, err_se));
            }
            let row = |atom: Cell, emp: Option<f64>, emp_se: Option<f64>, rel: Option<f64>, check: Option<&Check>| {
                vec![
                    cell.n.into(),
                    cell.rho.into(),
                    cell.eps.into(),
                    s.to_string().into(),
                    atom,
                    factor.into(),
                    (1.0 / factor).into(),
                    emp.into(),
                    emp_se.into(),
                    rel.into(),
                    e.cluster.then_some(err_mean).into(),
                    e.cluster.then_some(err_se).into(),
                    check.map(|c| c.tolerance).into(),
                    verdict(check).into(),
                ]
            };
            if !e.factor {
                report.push_row(row(Cell::Empty, None, None, None, None));
                continue;
            }
            for (ai, &atom) in e.atoms.iter().enumerate() {
                let sigma = sigma_x(&cell.mixture, cell.mixture.atom(atom))?;
                let base: Matrix<f64> = sigma.base().matrix().clone();
                let mut pooled = Moments::new(d);
                let mut per_rep = Vec::new();
                for o in &outputs {
                    let mom = &o[si].0[ai];
                    pooled.merge(mom);
                    if mom.count() > 0 {
                        per_rep.push(mom.second_moment());
                    }
                }
                if pooled.count() < 2 {
                    return Err(SimError::config(format!("atom {atom} has too few rows")));
                }
                let c_hat = pooled.covariance();
                let target = base.scale(factor);
                let rel = relative_frobenius(&c_hat, &target);
                let rel_se = entry_stderr(&per_rep).frobenius_norm() / target.frobenius_norm();
                let tr = trace(&base);
                let traces: Vec<f64> = per_rep.iter().map(trace).collect();
                let emp = trace(&c_hat) / tr;
                let emp_se = mean_stderr(&traces).1 / tr;
                let check = e.check_covariance.then(|| {
                    let rho = cell.rho.map_or(String::new(), |r| format!(" rho {r}"));
                    Check::at_most(
                        format!("{s} n {}{rho} atom {atom} averaged covariance relative error", cell.n),
                        rel,
                        Some(rel_se),
                        e.tolerance,
                    )
                });
                report.push_row(row(atom.into(), Some(emp), Some(emp_se), Some(rel), check.as_ref()));
                report.checks.extend(check);
            }
        }
    }

    if e.degradation && e.cluster {
        let mut keys: Vec<(usize, Option<f64>, Strategy)> = Vec::new();
        for (key, ..) in &errors {
            if !keys.contains(key) {
                keys.push(*key);
            }
        }
        for key in keys {
            let series: Vec<_> = errors.iter().filter(|(k, ..)| *k == key).collect();
            let lo = series.iter().min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite rho"));
            let hi = series.iter().max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite rho"));
            let (Some(lo), Some(hi)) = (lo, hi) else { continue };
            if lo.1 == hi.1 {
                continue;
            }
            let diff = hi.2 - lo.2;
            let se = (lo.3 * lo.3 + hi.3 * hi.3).sqrt();
            let eps = key.1.map_or(String::new(), |v| format!(" eps {v}"));
            let mut check = Check::at_least(
                format!("{} n {}{eps} error increase from rho {:?} to {:?}", key.2, key.0, lo.1.unwrap_or(f64::NAN), hi.1.unwrap_or(f64::NAN)),
                diff,
                Some(se),
                e.significance * se,
            );
            check.theoretical = 0.0;
            check.rule = format!("increase > {} stderr", e.significance);
            check.passed = diff > e.significance * se;
            report.checks.push(check);
        }
    }
    Ok(report)
}

/// Residual covariance factors (and optionally clustering error) of
/// averaged embeddings over the configured grids.
pub fn run_ess_sweep(cfg: &ExperimentConfig) -> Result<MonteCarloReport, SimError> {
    run_sweep(cfg, &[Strategy::OmniAvg, Strategy::MeanGraph, Strategy::ProcrustesAvg])
}

/// Clustering error of averaged embeddings, with the single-graph
/// embedding as a baseline.
pub fn run_cluster_sweep(cfg: &ExperimentConfig) -> Result<MonteCarloReport, SimError> {
    run_sweep(
        cfg,
        &[Strategy::OmniAvg, Strategy::MeanGraph, Strategy::ProcrustesAvg, Strategy::Single],
    )
}
