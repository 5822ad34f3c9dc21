//! Spectral-norm concentration of the omnibus matrix.

use omnicorr::{build_omnibus, spectral_norm, Matrix, ReplicateStreams, SymMatrix};

use super::replicates;
use crate::config::{ExperimentConfig, Method};
use crate::error::SimError;
use crate::pipeline::sample_collection;
use crate::report::{Check, MonteCarloReport};

pub const COLUMNS: [&str; 4] = ["replicate", "norm", "bound", "holds"];

/// `4m √((n−1) log(mn))`.
pub fn bernstein_bound(n: usize, m: usize) -> f64 {
    4.0 * m as f64 * ((n as f64 - 1.0) * ((m * n) as f64).ln()).sqrt()
}

/// Frequency with which `‖𝔐 − J_m ⊗ P‖₂` stays below [`bernstein_bound`].
pub fn run_bernstein_check(cfg: &ExperimentConfig) -> Result<MonteCarloReport, SimError> {
    let e = &cfg.experiment;
    let (n, m) = (cfg.model.n, cfg.model.m);
    let mixture = cfg.mixture()?;
    let sampler = cfg.sampler()?;
    let Method::Omnibus(c) = cfg.method()? else {
        return Err(SimError::config("bernstein-check needs an omnibus construction"));
    };
    let bound = bernstein_bound(n, m);
    let norms = replicates(0, e.n_mc, |rep| {
        let g = sample_collection(&mixture, n, &sampler, &ReplicateStreams::new(e.seed, rep))?;
        let omni = build_omnibus(&c, &g.matrices())?;
        let p = g.latent.probability_matrix();
        let expected = Matrix::filled(m, m, 1.0).kron(p.matrix());
        let diff = SymMatrix::new(omni.matrix().sub(&expected)?)?;
        Ok(spectral_norm(&diff)?)
    })?;

    let mut report = MonteCarloReport::new(cfg, &COLUMNS);
    let mut holds = 0usize;
    for (rep, &norm) in norms.iter().enumerate() {
        let ok = norm <= bound;
        holds += ok as usize;
        report.push_row(vec![rep.into(), norm.into(), bound.into(), ok.into()]);
    }
    let fraction = holds as f64 / norms.len() as f64;
    report.checks.push(Check::at_least(
        format!("bound holds (n {n}, m {m})"),
        fraction,
        None,
        e.min_fraction,
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_formula() {
        let b = bernstein_bound(300, 3);
        assert!((b - 12.0 * (299.0 * 900f64.ln()).sqrt()).abs() < 1e-12);
        assert!((bernstein_bound(10, 1) - 4.0 * (9.0 * 10f64.ln()).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_graph_bound_holds() {
        let cfg = ExperimentConfig::from_toml(
            r#"
[model]
atoms = [[0.6], [0.3]]
weights = [0.5, 0.5]
n = 80
m = 1
family = "independent"

[omnibus]
kind = "single"

[experiment]
kind = "bernstein-check"
n_mc = 5
"#,
        )
        .unwrap();
        let report = run_bernstein_check(&cfg).unwrap();
        assert_eq!(report.rows.len(), 5);
        assert!(report.all_passed());
    }
}
