//! Generalized omnibus matrices.
//!
//! A coefficient tensor `c[q][k][ℓ]` gives the weight of graph `q` in block
//! `(k, ℓ)`; every named construction compiles to one, and assembly,
//! validation and the limit theory consume only the tensor. Graph and block
//! indices are 0-based.

mod constructions;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::OmnibusError;
use crate::matrix::{Matrix, SymMatrix};
use crate::scalar::Scalar;
use crate::spectral::{ase, Embedding};

pub use constructions::random_valid;

const CONVEXITY_TOL: f64 = 1e-12;
const DOMINANCE_TOL: f64 = 1e-12;

/// Coefficient tensor of a generalized omnibus matrix, flattened row-major
/// over `[q][k][ℓ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct OmnibusCoefficients<T> {
    m: usize,
    c: Vec<T>,
}

/// One failed validity condition.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Negative { q: usize, k: usize, l: usize, value: f64 },
    NotConvex { k: usize, l: usize, sum: f64 },
    Asymmetric { q: usize, k: usize, l: usize },
    NotDominant { k: usize, q: usize, diagonal: f64, other: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Negative { q, k, l, value } => {
                write!(f, "weight of graph {q} in block ({k}, {l}) is negative ({value})")
            }
            Violation::NotConvex { k, l, sum } => write!(f, "block ({k}, {l}) weights sum to {sum}, not 1"),
            Violation::Asymmetric { q, k, l } => {
                write!(f, "weight of graph {q} differs between blocks ({k}, {l}) and ({l}, {k})")
            }
            Violation::NotDominant { k, q, diagonal, other } => write!(
                f,
                "row {k} is not dominant: alpha({k},{k}) = {diagonal} <= alpha({k},{q}) = {other}"
            ),
        }
    }
}

/// Outcome of [`OmnibusCoefficients::validate`]. Violations are listed in
/// check order: nonnegativity, convexity, symmetry, dominance.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.first() {
            None => write!(f, "valid"),
            Some(v) if self.violations.len() == 1 => write!(f, "{v}"),
            Some(v) => write!(f, "{v} (and {} more)", self.violations.len() - 1),
        }
    }
}

/// Cumulative weights `α(s, q) = Σ_ℓ c[q][s][ℓ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaWeights<T> {
    alpha: Matrix<T>,
}

impl<T: Scalar> AlphaWeights<T> {
    pub fn m(&self) -> usize {
        self.alpha.rows()
    }

    pub fn get(&self, s: usize, q: usize) -> T {
        self.alpha[(s, q)]
    }

    pub fn row(&self, s: usize) -> &[T] {
        self.alpha.row(s)
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.alpha
    }

    /// Builds directly from an `m × m` table, e.g. a closed form.
    pub fn from_matrix(alpha: Matrix<T>) -> Self {
        Self { alpha }
    }
}

#[derive(Serialize, Deserialize)]
struct CoefficientsFile {
    m: usize,
    c: Vec<f64>,
}

impl<T: Scalar> OmnibusCoefficients<T> {
    /// Wraps a flattened `[q][k][ℓ]` tensor. Only the shape is checked; use
    /// [`validate`](Self::validate) for the validity conditions.
    pub fn from_flat(m: usize, c: Vec<T>) -> Result<Self, OmnibusError> {
        if m == 0 {
            return Err(OmnibusError::TooFewGraphs { min: 1, found: 0 });
        }
        if c.len() != m * m * m {
            return Err(OmnibusError::BadShape {
                expected: m * m * m,
                found: c.len(),
            });
        }
        Ok(Self { m, c })
    }

    /// Builds from a rule giving `c[q][k][ℓ]`.
    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut c = Vec::with_capacity(m * m * m);
        for q in 0..m {
            for k in 0..m {
                for l in 0..m {
                    c.push(f(q, k, l));
                }
            }
        }
        Self { m, c }
    }

    pub(crate) fn validated(self) -> Result<Self, OmnibusError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(self)
        } else {
            Err(OmnibusError::Invalid(report.to_string()))
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, q: usize, k: usize, l: usize) -> T {
        self.c[(q * self.m + k) * self.m + l]
    }

    pub fn as_flat(&self) -> &[T] {
        &self.c
    }

    /// Checks nonnegativity, per-block convexity (to `1e-12`), block
    /// symmetry, and strict row dominance `α(k,k) > α(k,q) + 1e-12`.
    pub fn validate(&self) -> ValidationReport {
        let m = self.m;
        let mut violations = Vec::new();
        for q in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let v = self.get(q, k, l);
                    if !(v >= T::zero()) {
                        violations.push(Violation::Negative {
                            q,
                            k,
                            l,
                            value: v.to_f64_lossy(),
                        });
                    }
                }
            }
        }
        for k in 0..m {
            for l in 0..m {
                let sum: T = (0..m).map(|q| self.get(q, k, l)).sum();
                if !((sum - T::one()).abs() <= T::lit(CONVEXITY_TOL)) {
                    violations.push(Violation::NotConvex {
                        k,
                        l,
                        sum: sum.to_f64_lossy(),
                    });
                }
            }
        }
        for q in 0..m {
            for k in 0..m {
                for l in (k + 1)..m {
                    if self.get(q, k, l) != self.get(q, l, k) {
                        violations.push(Violation::Asymmetric { q, k, l });
                    }
                }
            }
        }
        let alpha = self.alpha_weights();
        for k in 0..m {
            let diag = alpha.get(k, k);
            for q in (0..m).filter(|&q| q != k) {
                let other = alpha.get(k, q);
                if !(diag > other + T::lit(DOMINANCE_TOL)) {
                    violations.push(Violation::NotDominant {
                        k,
                        q,
                        diagonal: diag.to_f64_lossy(),
                        other: other.to_f64_lossy(),
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    pub fn alpha_weights(&self) -> AlphaWeights<T> {
        let m = self.m;
        AlphaWeights {
            alpha: Matrix::from_fn(m, m, |s, q| (0..m).map(|l| self.get(q, s, l)).sum()),
        }
    }

    pub fn to_toml(&self) -> String {
        let file = CoefficientsFile {
            m: self.m,
            c: self.c.iter().map(|x| x.to_f64_lossy()).collect(),
        };
        toml::to_string(&file).expect("coefficients serialize")
    }

    pub fn from_toml(text: &str) -> Result<Self, OmnibusError> {
        let file: CoefficientsFile = toml::from_str(text).map_err(|e| OmnibusError::Invalid(e.to_string()))?;
        Self::from_flat(file.m, file.c.into_iter().map(T::lit).collect())
    }
}

/// Assembles the `mn × mn` omnibus matrix with block `(k, ℓ)` equal to
/// `Σ_q c[q][k][ℓ] A^{(q)}`.
pub fn build_omnibus<T: Scalar>(
    c: &OmnibusCoefficients<T>,
    graphs: &[SymMatrix<T>],
) -> Result<SymMatrix<T>, OmnibusError> {
    let m = c.m();
    if graphs.len() != m {
        return Err(OmnibusError::GraphCountMismatch {
            coeffs: m,
            graphs: graphs.len(),
        });
    }
    let n = graphs[0].order();
    if let Some(g) = graphs.iter().find(|g| g.order() != n) {
        return Err(OmnibusError::Invalid(format!(
            "graphs have orders {n} and {}",
            g.order()
        )));
    }
    let big = m * n;
    let mut out = Matrix::zeros(big, big);
    for k in 0..m {
        for l in k..m {
            for (q, g) in graphs.iter().enumerate() {
                let w = c.get(q, k, l);
                if w == T::zero() {
                    continue;
                }
                for i in 0..n {
                    let src = g.matrix().row(i);
                    let dst = &mut out.row_mut(k * n + i)[l * n..(l + 1) * n];
                    for (d, &s) in dst.iter_mut().zip(src) {
                        *d = *d + w * s;
                    }
                }
            }
            if l != k {
                for i in 0..n {
                    for j in 0..n {
                        out[(l * n + j, k * n + i)] = out[(k * n + i, l * n + j)];
                    }
                }
            }
        }
    }
    Ok(SymMatrix::new(out)?)
}

/// The omnibus matrix with every graph replaced by `P`; equals `J_m ⊗ P`
/// for valid coefficients.
pub fn expected_omnibus<T: Scalar>(
    c: &OmnibusCoefficients<T>,
    p: &SymMatrix<T>,
) -> Result<SymMatrix<T>, OmnibusError> {
    let report = c.validate();
    if !report.is_valid() {
        return Err(OmnibusError::Invalid(report.to_string()));
    }
    let copies = vec![p.clone(); c.m()];
    build_omnibus(c, &copies)
}

/// Omnibus embedding partitioned into `m` blocks of `n` rows each.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockEmbedding<T> {
    m: usize,
    n: usize,
    embedding: Embedding<T>,
}

impl<T: Scalar> BlockEmbedding<T> {
    pub fn new(embedding: Embedding<T>, m: usize) -> Result<Self, OmnibusError> {
        let rows = embedding.rows();
        if m == 0 || rows % m != 0 {
            return Err(OmnibusError::IndivisibleOrder { order: rows, m });
        }
        Ok(Self {
            m,
            n: rows / m,
            embedding,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.embedding.dim()
    }

    pub fn embedding(&self) -> &Embedding<T> {
        &self.embedding
    }

    /// Row `i` of block `s`.
    pub fn block_row(&self, s: usize, i: usize) -> &[T] {
        self.embedding.row(s * self.n + i)
    }

    /// Block `s` as an `n × d` embedding.
    pub fn block(&self, s: usize) -> Embedding<T> {
        let d = self.dim();
        Embedding::new(Matrix::from_fn(self.n, d, |i, j| self.block_row(s, i)[j])).expect("finite block")
    }

    /// Applies the same `d × d` transform to every block.
    pub fn rotate(&self, w: &Matrix<T>) -> Result<Self, OmnibusError> {
        Ok(Self {
            m: self.m,
            n: self.n,
            embedding: self.embedding.rotate(w)?,
        })
    }
}

/// Adjacency spectral embedding of an omnibus matrix, split into blocks.
pub fn omni_embed<T: Scalar>(
    omnibus: &SymMatrix<T>,
    d: usize,
    m: usize,
) -> Result<BlockEmbedding<T>, OmnibusError> {
    let order = omnibus.order();
    if m == 0 || order % m != 0 {
        return Err(OmnibusError::IndivisibleOrder { order, m });
    }
    BlockEmbedding::new(ase(omnibus, d)?, m)
}
