//! Empirical covariances of aligned embeddings against the limit theory.

use omnicorr::theory::sigma_x;
use omnicorr::{cov_block_difference, cov_single_residual, induced_correlation, Matrix, ReplicateStreams};

use super::{replicates, verdict};
use crate::config::ExperimentConfig;
use crate::error::SimError;
use crate::pipeline::{aligned_blocks, sample_collection, scaled_row_difference};
use crate::report::{Cell, Check, MonteCarloReport};
use crate::stats::{energy_distance, entry_stderr, gaussian_sample, mean_stderr, relative_frobenius, trace, Moments};

pub const COLUMNS: [&str; 11] = [
    "target",
    "s1",
    "s2",
    "atom",
    "rows",
    "statistic",
    "empirical",
    "theoretical",
    "stderr",
    "tolerance",
    "pass",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    Difference(usize, usize),
    Residual(usize),
}

impl Target {
    fn label(&self) -> String {
        match *self {
            Self::Difference(a, b) => format!("difference({a},{b})"),
            Self::Residual(s) => format!("residual({s})"),
        }
    }
}

/// Per replicate, per target, per monitored atom: row moments and the first
/// monitored row.
type ReplicateOutput = Vec<Vec<(Moments, Option<Vec<f64>>)>>;

/// Scalar magnitude used for relative errors; falls back to an absolute
/// error when the predicted covariance vanishes.
fn covariance_error(empirical: &Matrix<f64>, theoretical: &Matrix<f64>) -> f64 {
    if theoretical.frobenius_norm() > 0.0 {
        relative_frobenius(empirical, theoretical)
    } else {
        empirical.frobenius_norm()
    }
}

pub fn run_clt_check(cfg: &ExperimentConfig) -> Result<MonteCarloReport, SimError> {
    let e = &cfg.experiment;
    let mixture = cfg.mixture()?;
    let (n, m) = (cfg.model.n, cfg.model.m);
    let d = cfg.dimension(&mixture);
    let sampler = cfg.sampler()?;
    let method = cfg.method()?;
    let r = cfg.correlation()?;
    let alpha = method.alpha();

    let pairs = e.pairs.clone().unwrap_or(if m >= 2 { vec![(0, 1)] } else { Vec::new() });
    let targets: Vec<Target> = pairs
        .iter()
        .map(|&(a, b)| Target::Difference(a, b))
        .chain(e.blocks.iter().map(|&s| Target::Residual(s)))
        .collect();
    let atoms = &e.atoms;

    let outputs: Vec<ReplicateOutput> = replicates(0, e.n_mc, |rep| {
        let streams = ReplicateStreams::new(e.seed, rep);
        let g = sample_collection(&mixture, n, &sampler, &streams)?;
        let x = g.latent.x();
        let blocks = aligned_blocks(&method, &g.matrices(), x, d)?;
        let labels = g.latent.labels();
        Ok(targets
            .iter()
            .map(|t| {
                atoms
                    .iter()
                    .map(|&atom| {
                        let mut mom = Moments::new(d);
                        let mut first = None;
                        for i in (0..n).filter(|&i| labels[i] == atom) {
                            let v = match *t {
                                Target::Difference(a, b) => scaled_row_difference(&blocks[a], &blocks[b], i),
                                Target::Residual(s) => scaled_row_difference(&blocks[s], x, i),
                            };
                            mom.push(&v);
                            first.get_or_insert(v);
                        }
                        (mom, first)
                    })
                    .collect()
            })
            .collect())
    })?;

    let mut report = MonteCarloReport::new(cfg, &COLUMNS);
    let mut gauss_rng = ReplicateStreams::new(e.seed, u64::MAX).auxiliary(0);
    for (ti, t) in targets.iter().enumerate() {
        for (ai, &atom) in atoms.iter().enumerate() {
            let xi = mixture.atom(atom);
            let (s1, s2) = match *t {
                Target::Difference(a, b) => (a, Some(b)),
                Target::Residual(s) => (s, None),
            };
            let theory = match *t {
                Target::Difference(a, b) => cov_block_difference(&alpha, &r, &mixture, xi, a, b)?,
                Target::Residual(s) => cov_single_residual(&alpha, &r, &mixture, xi, s)?,
            };
            let c_theory = theory.matrix().matrix().clone();

            let mut pooled = Moments::new(d);
            let mut per_rep = Vec::with_capacity(outputs.len());
            let mut samples = Vec::new();
            for out in &outputs {
                let (mom, first) = &out[ti][ai];
                pooled.merge(mom);
                if mom.count() > 0 {
                    per_rep.push(mom.second_moment());
                }
                if let Some(v) = first {
                    if samples.len() < e.energy_samples {
                        samples.push(v.clone());
                    }
                }
            }
            if pooled.count() < 2 {
                return Err(SimError::config(format!("atom {atom} has too few rows to estimate a covariance")));
            }
            let c_hat = pooled.covariance();
            let se = entry_stderr(&per_rep);
            let base = |stat: String, emp: f64, theo: f64, stderr: Option<f64>, check: Option<&Check>| -> Vec<Cell> {
                vec![
                    t.label().into(),
                    s1.into(),
                    s2.into(),
                    atom.into(),
                    pooled.count().into(),
                    stat.into(),
                    emp.into(),
                    theo.into(),
                    stderr.into(),
                    check.map(|c| c.tolerance).into(),
                    verdict(check).into(),
                ]
            };
            let name = format!("{} atom {atom}", t.label());
            for a in 0..d {
                for b in a..d {
                    report.push_row(base(
                        format!("cov[{a},{b}]"),
                        c_hat[(a, b)],
                        c_theory[(a, b)],
                        Some(se[(a, b)]),
                        None,
                    ));
                }
            }

            let err = covariance_error(&c_hat, &c_theory);
            let err_se = se.frobenius_norm() / c_theory.frobenius_norm().max(f64::MIN_POSITIVE);
            let check = e
                .check_covariance
                .then(|| Check::at_most(format!("{name} covariance relative error"), err, Some(err_se), e.tolerance));
            report.push_row(base("frobenius_rel_error".into(), err, 0.0, Some(err_se), check.as_ref()));
            report.checks.extend(check);

            if let Target::Difference(a, b) = *t {
                let trace_sigma = trace(sigma_x(&mixture, xi)?.base().matrix());
                let traces: Vec<f64> = per_rep.iter().map(trace).collect();
                let (_, trace_se) = mean_stderr(&traces);
                let rho_hat = 1.0 - trace(&c_hat) / (2.0 * trace_sigma);
                let rho_se = trace_se / (2.0 * trace_sigma);
                let rho = induced_correlation(&alpha, &r, a, b)?.total;
                let mut checks = Vec::new();
                if let Some((lo, hi)) = e.rho_interval {
                    checks.push(Check::within(format!("{name} rho_hat interval"), rho_hat, Some(rho_se), lo, hi));
                }
                if let Some(tol) = e.rho_tolerance {
                    checks.push(Check::abs(format!("{name} rho_hat"), rho_hat, rho, Some(rho_se), tol));
                }
                let worst = checks.iter().find(|c| !c.passed).or(checks.first());
                report.push_row(base("rho_hat".into(), rho_hat, rho, Some(rho_se), worst));
                report.checks.extend(checks);
            }

            let draws = (!samples.is_empty())
                .then(|| gaussian_sample(&c_theory, 2 * samples.len(), &mut gauss_rng))
                .flatten();
            if let Some(draws) = draws {
                let (reference, null) = draws.split_at(samples.len());
                report.push_row(base(
                    "energy_distance".into(),
                    energy_distance(&samples, reference),
                    energy_distance(null, reference),
                    None,
                    None,
                ));
            }
        }
    }
    Ok(report)
}
