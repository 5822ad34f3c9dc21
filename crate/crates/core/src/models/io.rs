//! Plain-text graph collections.
//!
//! ```text
//! <n> <m>
//! <upper triangle of graph 1: n(n−1)/2 characters '0'/'1', row-major over i < j>
//! ...
//! <upper triangle of graph m>
//! ```
//!
//! A TOML sidecar ([`GraphMetadata`]) records how the graphs were generated.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

use super::sampling::Adjacency;

pub fn write_graphs<W: Write>(mut out: W, graphs: &[Adjacency]) -> std::io::Result<()> {
    let n = graphs.first().map_or(0, Adjacency::n);
    writeln!(out, "{} {}", n, graphs.len())?;
    for g in graphs {
        let line: String = g.upper_triangle().map(|e| if e { '1' } else { '0' }).collect();
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_graphs<R: BufRead>(input: R) -> Result<Vec<Adjacency>, ModelError> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| ModelError::Format("missing header".into()))?
        .map_err(|e| ModelError::Format(e.to_string()))?;
    let mut parts = header.split_whitespace().map(str::parse::<usize>);
    let (n, m) = match (parts.next(), parts.next(), parts.next()) {
        (Some(Ok(n)), Some(Ok(m)), None) => (n, m),
        _ => return Err(ModelError::Format(format!("bad header {header:?}"))),
    };
    let width = n * n.saturating_sub(1) / 2;
    let mut graphs = Vec::with_capacity(m);
    for k in 0..m {
        let line = lines
            .next()
            .ok_or_else(|| ModelError::Format(format!("missing graph {}", k + 1)))?
            .map_err(|e| ModelError::Format(e.to_string()))?;
        let bits = line.trim_end().as_bytes();
        if bits.len() != width {
            return Err(ModelError::Format(format!(
                "graph {} has {} entries, expected {width}",
                k + 1,
                bits.len()
            )));
        }
        if let Some(bad) = bits.iter().position(|&c| c != b'0' && c != b'1') {
            return Err(ModelError::Format(format!("graph {} has invalid character at {bad}", k + 1)));
        }
        let mut cursor = bits.iter();
        graphs.push(Adjacency::from_upper(n, |_, _| *cursor.next().expect("length checked") == b'1'));
    }
    Ok(graphs)
}

/// Provenance of a sampled collection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphMetadata {
    pub seed: u64,
    pub replicate: u64,
    pub n: usize,
    pub m: usize,
    /// `forward`, `generator`, or `independent`.
    pub family: String,
    /// `ϱ` for the forward model, `ν` for the generator model.
    pub parameters: Vec<f64>,
    pub atoms: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl GraphMetadata {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("metadata serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, ModelError> {
        toml::from_str(text).map_err(|e| ModelError::Format(e.to_string()))
    }
}
