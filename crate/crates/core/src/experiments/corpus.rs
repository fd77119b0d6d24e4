//! Seeded corpora of initial data and their digests.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::data::{make_initial_data, DataKind, DataParams};
use crate::error::{Error, Result};
use crate::io::encode_snapshot;
use crate::spectral::{Grid, SpectralField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub count: usize,
    pub dim: usize,
    pub size: usize,
    /// Field `i` uses `data` with seed `data.seed + i`.
    pub data: DataParams,
}

impl CorpusSpec {
    pub fn new(count: usize, dim: usize, size: usize, kind: DataKind, seed: u64) -> Self {
        Self { count, dim, size, data: DataParams::new(kind, seed) }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.size)
    }

    /// Same content on another grid size.
    pub fn on_size(&self, size: usize) -> Self {
        Self { size, ..self.clone() }
    }

    pub fn generate(&self) -> Result<Vec<SpectralField>> {
        let grid = self.grid()?;
        (0..self.count)
            .map(|i| {
                let params = DataParams { seed: self.data.seed.wrapping_add(i as u64), ..self.data.clone() };
                make_initial_data(grid, &params)
            })
            .collect()
    }
}

/// Hex SHA-256 over the JSON of each spec followed by the BSNF1 bytes of its fields.
pub fn corpus_digest(specs: &[CorpusSpec], fields: &[Vec<SpectralField>]) -> Result<String> {
    let mut hasher = Sha256::new();
    for (spec, set) in specs.iter().zip(fields) {
        hasher.update(serde_json::to_vec(spec)?);
        for f in set {
            hasher.update(encode_snapshot(f));
        }
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Generates every spec on a common grid and rejects empty or zero members.
pub fn generate_all(specs: &[CorpusSpec]) -> Result<(Grid, Vec<Vec<SpectralField>>)> {
    let first = specs.first().ok_or_else(|| Error::DegenerateCorpus("no corpus specs".into()))?;
    let grid = first.grid()?;
    let mut sets = Vec::with_capacity(specs.len());
    for spec in specs {
        if spec.grid()? != grid {
            return Err(Error::GridMismatch);
        }
        let set = spec.generate()?;
        if let Some(i) = set.iter().position(|f| f.max_coeff() == 0.0) {
            return Err(Error::DegenerateCorpus(format!("field {i} of the {} corpus is zero", spec.data.kind)));
        }
        sets.push(set);
    }
    if sets.iter().all(|s| s.is_empty()) {
        return Err(Error::DegenerateCorpus("corpus is empty".into()));
    }
    Ok((grid, sets))
}
