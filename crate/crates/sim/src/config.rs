//! Experiment configuration.
//!
//! A config is a TOML document with three tables:
//!
//! ```toml
//! [model]
//! block = [[0.7, 0.3], [0.3, 0.5]]   # or `atoms = [[..], ..]`
//! weights = [0.5, 0.5]
//! n = 300
//! m = 2
//! family = "independent"             # forward | generator | constant | independent
//! parameters = []
//!
//! [omnibus]
//! kind = "classical"
//!
//! [experiment]
//! kind = "clt-check"
//! n_mc = 500
//! seed = 1
//! ```
//!
//! Every field of `[experiment]` other than `kind` has a default; see
//! [`ExperimentSection`].

use std::fmt;
use std::path::Path;

use omnicorr::{
    sbm_to_mixture, AlphaWeightsF64, CoefficientsF64, CorrelationSpecF64, Matrix, MixtureF64, SymMatrix,
};
use serde::{Deserialize, Serialize};

use crate::error::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CltCheck,
    CorrSweep,
    EssSweep,
    TableOnegen,
    ClusterSweep,
    BernsteinCheck,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::CltCheck => "clt-check",
            Self::CorrSweep => "corr-sweep",
            Self::EssSweep => "ess-sweep",
            Self::TableOnegen => "table-onegen",
            Self::ClusterSweep => "cluster-sweep",
            Self::BernsteinCheck => "bernstein-check",
        };
        f.write_str(s)
    }
}

/// How the inherent edge correlation is generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Forward propagation; `parameters` holds `ϱ` (length `m−1`, or one value repeated).
    Forward,
    /// Single generator; `parameters` holds `ν` (length `m`, or one value repeated).
    Generator,
    /// Every pair correlated at `parameters[0]`: forward for `m = 2`,
    /// a generator with `ν = √ρ` otherwise.
    Constant,
    /// Independent graphs.
    Independent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Latent atoms, one per row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<Vec<f64>>>,
    /// Block probability matrix; converted to atoms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<Vec<Vec<f64>>>,
    /// Mixture weights (block sizes `π` when `block` is given).
    pub weights: Vec<f64>,
    pub n: usize,
    pub m: usize,
    pub family: Family,
    #[serde(default)]
    pub parameters: Vec<f64>,
}

/// Named weight rules for omnibus constructions that take a weight vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    /// `"linear"` (`w_ℓ = ℓ`) or `"ones"`.
    Rule(String),
    List(Vec<f64>),
    /// Runs of `(value, count)`.
    Runs(Vec<(f64, usize)>),
}

impl WeightSpec {
    pub fn expand(&self, m: usize) -> Result<Vec<f64>, SimError> {
        let w = match self {
            Self::Rule(r) if r == "linear" => (1..=m).map(|l| l as f64).collect(),
            Self::Rule(r) if r == "ones" => vec![1.0; m],
            Self::Rule(r) => return Err(SimError::config(format!("unknown weight rule {r:?}"))),
            Self::List(v) => v.clone(),
            Self::Runs(runs) => runs.iter().flat_map(|&(v, c)| std::iter::repeat_n(v, c)).collect(),
        };
        if w.len() != m {
            return Err(SimError::config(format!("{} omnibus weights for m = {m}", w.len())));
        }
        Ok(w)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmnibusKind {
    #[default]
    Classical,
    Single,
    TotalAverage,
    WeightedPairwise,
    Dampened,
    Forward,
    PairPreserving,
    /// No omnibus: each graph is embedded on its own.
    Separate,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmnibusConfig {
    #[serde(default)]
    pub kind: OmnibusKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightSpec>,
}

/// Joint embedding strategies compared by the averaging sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Blocks of the configured omnibus embedding, averaged.
    OmniAvg,
    /// ASE of the mean adjacency matrix.
    MeanGraph,
    /// Separate ASEs aligned to the first and averaged.
    ProcrustesAvg,
    /// ASE of the first graph alone.
    Single,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::OmniAvg => "omni-avg",
            Self::MeanGraph => "mean-graph",
            Self::ProcrustesAvg => "procrustes-avg",
            Self::Single => "single",
        };
        f.write_str(s)
    }
}

fn default_n_mc() -> usize {
    100
}

fn default_tolerance() -> f64 {
    0.15
}

fn default_atoms() -> Vec<usize> {
    vec![0]
}

fn default_restarts() -> usize {
    10
}

fn default_min_fraction() -> f64 {
    0.99
}

fn default_significance() -> f64 {
    3.0
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: ExperimentKind,
    /// Embedding dimension; defaults to the latent dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default = "default_n_mc")]
    pub n_mc: usize,
    #[serde(default)]
    pub seed: u64,
    /// Relative Frobenius tolerance for covariance comparisons.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Latent atoms whose rows are monitored.
    #[serde(default = "default_atoms")]
    pub atoms: Vec<usize>,
    /// Block pairs `(s₁, s₂)` whose differences are monitored (0-based).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(usize, usize)>>,
    /// Blocks whose residuals around `X` are monitored.
    #[serde(default)]
    pub blocks: Vec<usize>,
    /// corr-sweep: every pair `(s₁, s₂ > s₁)` for these `s₁`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchors: Option<Vec<usize>>,
    /// Asserted interval for the trace estimator `ρ̂`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_interval: Option<(f64, f64)>,
    /// Asserted absolute tolerance of `ρ̂` around the theoretical correlation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_tolerance: Option<f64>,
    /// Whether covariance comparisons are asserted at `tolerance`.
    #[serde(default = "default_true")]
    pub check_covariance: bool,
    /// corr-sweep: tabulate the theory without simulating.
    #[serde(default)]
    pub theory_only: bool,
    /// corr-sweep: assert that the configured omnibus tracks `R` more
    /// closely than the classical one.
    #[serde(default)]
    pub compare_classical: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
    /// Constant inherent correlations swept by ess/cluster sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_grid: Option<Vec<f64>>,
    /// `ε` values; each replaces the mixture with the block model
    /// `[[½, ½], [½, ½+ε]]`, `π = (½, ½)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategies: Option<Vec<Strategy>>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    /// ess/cluster sweeps: estimate the averaged residual covariance.
    #[serde(default)]
    pub factor: bool,
    /// ess/cluster sweeps: cluster the averaged embeddings.
    #[serde(default)]
    pub cluster: bool,
    /// Assert that clustering error grows from the smallest to the largest
    /// `ρ` by more than `significance` standard errors.
    #[serde(default)]
    pub degradation: bool,
    #[serde(default = "default_significance")]
    pub significance: f64,
    /// bernstein-check: required fraction of replicates satisfying the bound.
    #[serde(default = "default_min_fraction")]
    pub min_fraction: f64,
    /// Number of replicates kept for the normality diagnostic (0 disables it).
    #[serde(default)]
    pub energy_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub omnibus: OmnibusConfig,
    pub experiment: ExperimentSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        let cfg: Self = toml::from_str(text).map_err(|e| SimError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every referenced parameter by building the objects it names.
    pub fn validate(&self) -> Result<(), SimError> {
        let e = &self.experiment;
        if e.n_mc == 0 {
            return Err(SimError::config("n_mc must be at least 1"));
        }
        if self.model.m == 0 {
            return Err(SimError::config("m must be at least 1"));
        }
        if self.model.n < 2 {
            return Err(SimError::config("n must be at least 2"));
        }
        if !(e.tolerance.is_finite() && e.tolerance > 0.0) {
            return Err(SimError::config("tolerance must be positive"));
        }
        let mixture = self.mixture()?;
        let d = self.dimension(&mixture);
        if d == 0 || d > self.model.n {
            return Err(SimError::config(format!("embedding dimension {d} out of range")));
        }
        for &a in &e.atoms {
            if a >= mixture.len() {
                return Err(SimError::config(format!("atom {a} out of range")));
            }
        }
        let m = self.model.m;
        for &(s1, s2) in e.pairs.iter().flatten() {
            if s1 >= m || s2 >= m || s1 == s2 {
                return Err(SimError::config(format!("bad block pair ({s1}, {s2})")));
            }
        }
        for &s in e.blocks.iter().chain(e.anchors.iter().flatten()) {
            if s >= m {
                return Err(SimError::config(format!("block {s} out of range")));
            }
        }
        for &r in e.rho_grid.iter().flatten() {
            if !(0.0..=1.0).contains(&r) {
                return Err(SimError::config(format!("rho {r} outside [0, 1]")));
            }
        }
        for &eps in e.eps_grid.iter().flatten() {
            p_eps_mixture(eps)?;
        }
        if !(0.0..=1.0).contains(&e.min_fraction) {
            return Err(SimError::config("min_fraction outside [0, 1]"));
        }
        self.correlation()?;
        self.method()?;
        Ok(())
    }

    pub fn mixture(&self) -> Result<MixtureF64, SimError> {
        let w = &self.model.weights;
        match (&self.model.atoms, &self.model.block) {
            (Some(atoms), None) => Ok(MixtureF64::from_rows(atoms, w)?),
            (None, Some(block)) => {
                let b = SymMatrix::new(Matrix::from_rows(block)?)?;
                Ok(sbm_to_mixture(&b, w)?)
            }
            _ => Err(SimError::config("[model] needs exactly one of `atoms` or `block`")),
        }
    }

    pub fn dimension(&self, mixture: &MixtureF64) -> usize {
        self.experiment.d.unwrap_or(mixture.dim())
    }

    /// Per-graph sampler parameters for the configured family.
    pub fn sampler(&self) -> Result<Sampler, SimError> {
        sampler_for(self.model.family, &self.model.parameters, self.model.m)
    }

    pub fn correlation(&self) -> Result<CorrelationSpecF64, SimError> {
        self.sampler()?.correlation(self.model.m)
    }

    pub fn method(&self) -> Result<Method, SimError> {
        method_for(&self.omnibus, self.model.m)
    }
}

/// Concrete sampler: which conditional model and its parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub enum Sampler {
    Forward(Vec<f64>),
    Generator(Vec<f64>),
}

impl Sampler {
    pub fn correlation(&self, m: usize) -> Result<CorrelationSpecF64, SimError> {
        let spec = match self {
            Self::Forward(rho) if m == 1 => {
                debug_assert!(rho.is_empty());
                CorrelationSpecF64::identity(1)
            }
            Self::Forward(rho) => CorrelationSpecF64::forward(rho)?,
            Self::Generator(nu) => CorrelationSpecF64::generator(nu)?,
        };
        Ok(spec)
    }
}

fn repeat_to(values: &[f64], len: usize, what: &str) -> Result<Vec<f64>, SimError> {
    match values.len() {
        1 => Ok(vec![values[0]; len]),
        l if l == len => Ok(values.to_vec()),
        l => Err(SimError::config(format!("{what}: expected 1 or {len} parameters, found {l}"))),
    }
}

pub fn sampler_for(family: Family, parameters: &[f64], m: usize) -> Result<Sampler, SimError> {
    let s = match family {
        Family::Independent => Sampler::Forward(vec![0.0; m - 1]),
        Family::Forward if m == 1 => Sampler::Forward(Vec::new()),
        Family::Forward => Sampler::Forward(repeat_to(parameters, m - 1, "forward")?),
        Family::Generator => Sampler::Generator(repeat_to(parameters, m, "generator")?),
        Family::Constant => {
            let &[rho] = parameters else {
                return Err(SimError::config("constant family takes exactly one parameter"));
            };
            if !(0.0..=1.0).contains(&rho) {
                return Err(SimError::config(format!("rho {rho} outside [0, 1]")));
            }
            match m {
                1 => Sampler::Forward(Vec::new()),
                2 => Sampler::Forward(vec![rho]),
                _ => Sampler::Generator(vec![rho.sqrt(); m]),
            }
        }
    };
    Ok(s)
}

/// Joint embedding method: an omnibus construction or separate ASEs.
#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    Omnibus(CoefficientsF64),
    Separate(usize),
}

impl Method {
    /// Cumulative weights; separate embedding acts as `α = m·I`.
    pub fn alpha(&self) -> AlphaWeightsF64 {
        match self {
            Self::Omnibus(c) => c.alpha_weights(),
            Self::Separate(m) => {
                AlphaWeightsF64::from_matrix(Matrix::from_fn(*m, *m, |i, j| if i == j { *m as f64 } else { 0.0 }))
            }
        }
    }
}

pub fn method_for(cfg: &OmnibusConfig, m: usize) -> Result<Method, SimError> {
    let weights = || -> Result<Vec<f64>, SimError> {
        cfg.weights
            .as_ref()
            .ok_or_else(|| SimError::config("this omnibus kind needs `weights`"))?
            .expand(m)
    };
    let c = match cfg.kind {
        OmnibusKind::Separate => return Ok(Method::Separate(m)),
        OmnibusKind::Single if m == 1 => CoefficientsF64::single(),
        OmnibusKind::Single => return Err(SimError::config("single omnibus needs m = 1")),
        OmnibusKind::Classical => CoefficientsF64::classical(m)?,
        OmnibusKind::TotalAverage => CoefficientsF64::total_average(m)?,
        OmnibusKind::WeightedPairwise => CoefficientsF64::weighted_pairwise(&weights()?)?,
        OmnibusKind::Dampened => CoefficientsF64::dampened(&weights()?)?,
        OmnibusKind::Forward => CoefficientsF64::forward(m)?,
        OmnibusKind::PairPreserving => CoefficientsF64::pair_preserving(m)?,
    };
    Ok(Method::Omnibus(c))
}

/// Two-block model `[[½, ½], [½, ½+ε]]` with equal block sizes.
pub fn p_eps_mixture(eps: f64) -> Result<MixtureF64, SimError> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(SimError::config(format!("eps {eps} outside (0, 0.5]")));
    }
    let b = SymMatrix::new(Matrix::from_rows(&[[0.5, 0.5], [0.5, 0.5 + eps]])?)?;
    Ok(sbm_to_mixture(&b, &[0.5, 0.5])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[model]
block = [[0.7, 0.3], [0.3, 0.5]]
weights = [0.5, 0.5]
n = 50
m = 3
family = "forward"
parameters = [0.5]

[experiment]
kind = "clt-check"
"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = ExperimentConfig::from_toml(BASE).unwrap();
        assert_eq!(cfg.omnibus.kind, OmnibusKind::Classical);
        assert_eq!(cfg.experiment.n_mc, 100);
        assert_eq!(cfg.experiment.atoms, vec![0]);
        let r = cfg.correlation().unwrap();
        assert!((r.get(0, 2) - 0.25).abs() < 1e-15);
        assert_eq!(cfg.dimension(&cfg.mixture().unwrap()), 2);
    }

    #[test]
    fn echo_round_trips() {
        let cfg = ExperimentConfig::from_toml(BASE).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        for (from, to) in [
            ("kind = \"clt-check\"", "kind = \"clt-check\"\nn_mc = 0"),
            ("parameters = [0.5]", "parameters = [0.5, 0.5, 0.5]"),
            ("parameters = [0.5]", "parameters = [1.5]"),
            ("kind = \"clt-check\"", "kind = \"clt-check\"\npairs = [[0, 3]]"),
            ("kind = \"clt-check\"", "kind = \"clt-check\"\nbogus = 1"),
            ("weights = [0.5, 0.5]", "weights = [0.5, 0.6]"),
        ] {
            let text = BASE.replace(from, to);
            assert!(ExperimentConfig::from_toml(&text).is_err(), "{to}");
        }
        let text = format!("{BASE}\n[omnibus]\nkind = \"dampened\"\n");
        assert!(ExperimentConfig::from_toml(&text).is_err());
        let text = format!("{BASE}\n[omnibus]\nkind = \"dampened\"\nweights = \"linear\"\n");
        assert!(ExperimentConfig::from_toml(&text).is_ok());
    }

    #[test]
    fn weight_specs_expand() {
        assert_eq!(WeightSpec::Rule("linear".into()).expand(3).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(
            WeightSpec::Runs(vec![(1.0, 2), (10.0, 1)]).expand(3).unwrap(),
            vec![1.0, 1.0, 10.0]
        );
        assert!(WeightSpec::List(vec![1.0]).expand(2).is_err());
    }

    #[test]
    fn constant_family_matches_requested_correlation() {
        for m in [2, 3, 5] {
            let r = sampler_for(Family::Constant, &[0.36], m).unwrap().correlation(m).unwrap();
            for i in 0..m {
                for j in 0..m {
                    let want = if i == j { 1.0 } else { 0.36 };
                    assert!((r.get(i, j) - want).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn separate_alpha_reproduces_pairwise_coefficient() {
        let alpha = Method::Separate(3).alpha();
        assert_eq!(alpha.get(1, 1), 3.0);
        assert_eq!(alpha.get(1, 2), 0.0);
    }
}
