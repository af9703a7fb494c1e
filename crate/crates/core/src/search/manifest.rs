use serde::{Deserialize, Serialize};

use super::{feasibility_search, SearchConfig, SearchResult};
use crate::linalg::ComplexMatrix;
use crate::partition::{Partition, PartitionedMatrix};
use crate::random::{random_matrix, rng};
use crate::Result;

/// An experiment: one partition shape, a list of seeds and a search budget.
/// Each seed draws a matrix with entries uniform on the unit disk and runs
/// the search with that seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Manifest {
    pub name: String,
    pub partition: Partition,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub search: SearchConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ManifestLine {
    pub experiment: String,
    pub seed: u64,
    pub matrix: ComplexMatrix,
    pub result: SearchResult,
}

pub fn run_manifest_with(m: &Manifest, mut on_line: impl FnMut(&ManifestLine)) -> Result<Vec<ManifestLine>> {
    let (d, dp) = (m.partition.host_rows(), m.partition.host_cols());
    let mut lines = Vec::with_capacity(m.seeds.len());
    for &seed in &m.seeds {
        let matrix = random_matrix(&mut rng(seed), d, dp);
        let pm = PartitionedMatrix::new(matrix, m.partition.clone())?;
        let cfg = SearchConfig {
            seed,
            ..m.search.clone()
        };
        let line = ManifestLine {
            experiment: m.name.clone(),
            seed,
            result: feasibility_search(&pm, &cfg)?,
            matrix: pm.matrix().clone(),
        };
        on_line(&line);
        lines.push(line);
    }
    Ok(lines)
}

pub fn run_manifest(m: &Manifest) -> Result<Vec<ManifestLine>> {
    run_manifest_with(m, |_| {})
}
