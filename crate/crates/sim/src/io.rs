//! The `sample` and `embed` commands: graph collections on disk.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use omnicorr::models::io::{read_graphs, write_graphs, GraphMetadata};
use omnicorr::{ase, build_omnibus, omni_embed, Embedding, ReplicateStreams, SymMatrixF64};

use crate::config::{ExperimentConfig, Family, Method, Sampler};
use crate::error::SimError;
use crate::pipeline::sample_collection;
use crate::report::Cell;

/// Path of the metadata sidecar written next to a graph file.
pub fn metadata_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.toml");
    path.with_file_name(name)
}

/// Samples replicate 0 of the configured model and writes the graphs to
/// `out` with a metadata sidecar.
pub fn sample_to_file(cfg: &ExperimentConfig, out: &Path) -> Result<GraphMetadata, SimError> {
    let mixture = cfg.mixture()?;
    let sampler = cfg.sampler()?;
    let seed = cfg.experiment.seed;
    let g = sample_collection(&mixture, cfg.model.n, &sampler, &ReplicateStreams::new(seed, 0))?;
    let file = File::create(out).map_err(|e| SimError::io(out, e))?;
    let mut w = BufWriter::new(file);
    write_graphs(&mut w, &g.graphs).and_then(|_| w.flush()).map_err(|e| SimError::io(out, e))?;
    let (family, parameters) = match (cfg.model.family, sampler) {
        (Family::Independent, _) => ("independent", Vec::new()),
        (_, Sampler::Forward(rho)) => ("forward", rho),
        (_, Sampler::Generator(nu)) => ("generator", nu),
    };
    let meta = GraphMetadata {
        seed,
        replicate: 0,
        n: cfg.model.n,
        m: cfg.model.m,
        family: family.to_owned(),
        parameters,
        atoms: (0..mixture.len()).map(|k| mixture.atom(k).to_vec()).collect(),
        weights: mixture.weights().to_vec(),
    };
    let meta_path = metadata_path(out);
    std::fs::write(&meta_path, meta.to_toml()).map_err(|e| SimError::io(&meta_path, e))?;
    Ok(meta)
}

pub fn read_graph_file(path: &Path) -> Result<Vec<SymMatrixF64>, SimError> {
    let file = File::open(path).map_err(|e| SimError::io(path, e))?;
    let graphs = read_graphs(BufReader::new(file))?;
    Ok(graphs.iter().map(|g| g.to_matrix()).collect())
}

/// Per-graph embeddings: the blocks of the omnibus embedding, or separate
/// ASEs. Not aligned to anything.
pub fn embed_graphs(method: &Method, graphs: &[SymMatrixF64], d: usize) -> Result<Vec<Embedding<f64>>, SimError> {
    match method {
        Method::Omnibus(c) => {
            if c.m() != graphs.len() {
                return Err(SimError::config(format!(
                    "omnibus built for {} graphs, file has {}",
                    c.m(),
                    graphs.len()
                )));
            }
            let e = omni_embed(&build_omnibus(c, graphs)?, d, graphs.len())?;
            Ok((0..graphs.len()).map(|s| e.block(s)).collect())
        }
        Method::Separate(_) => graphs.iter().map(|g| Ok(ase(g, d)?)).collect(),
    }
}

/// CSV with columns `graph, vertex, x0, …`.
pub fn embeddings_csv(blocks: &[Embedding<f64>]) -> Result<String, SimError> {
    let d = blocks.first().map_or(0, Embedding::dim);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["graph".to_owned(), "vertex".to_owned()];
    header.extend((0..d).map(|k| format!("x{k}")));
    w.write_record(&header)?;
    for (s, b) in blocks.iter().enumerate() {
        for i in 0..b.rows() {
            let mut rec = vec![s.to_string(), i.to_string()];
            rec.extend(b.row(i).iter().map(|&v| Cell::Float(v).to_string()));
            w.write_record(&rec)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| SimError::config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 csv"))
}
