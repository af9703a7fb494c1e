//! Browser bindings: decompose a partitioned matrix, sweep the singular value
//! inequality, and run the witness search. Inputs and outputs are JSON
//! strings in the same formats as the CLI files.

use blockpythag::inequalities::check_cor_sing_sweep;
use blockpythag::pythagoras::decompose_auto;
use blockpythag::random::{random_matrix, rng};
use blockpythag::search::{feasibility_search, SearchConfig};
use blockpythag::{io, ComplexMatrix, Partition, PartitionedMatrix};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn partitioned(matrix: &str, partition: &str, seed: u64) -> Result<PartitionedMatrix, String> {
    let p: Partition = io::from_json(partition).map_err(|e| format!("partition: {e}"))?;
    let m: ComplexMatrix = if matrix.trim().is_empty() {
        random_matrix(&mut rng(seed), p.host_rows(), p.host_cols())
    } else {
        io::from_json(matrix).map_err(|e| format!("matrix: {e}"))?
    };
    PartitionedMatrix::new(m, p).map_err(|e| e.to_string())
}

fn pretty<T: Serialize>(v: &T) -> Result<String, String> {
    io::to_json_pretty(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DecomposeView<'a> {
    matrix: &'a ComplexMatrix,
    certificate: blockpythag::pythagoras::DecompositionCertificate,
}

/// Certificate for `matrix` (empty: random from `seed`) on `partition`.
pub fn decompose_text(matrix: &str, partition: &str, seed: u64) -> Result<String, String> {
    let pm = partitioned(matrix, partition, seed)?;
    let certificate = decompose_auto(&pm).map_err(|e| e.to_string())?;
    pretty(&DecomposeView {
        matrix: pm.matrix(),
        certificate,
    })
}

pub fn sweep_text(matrix: &str, partition: &str, seed: u64, max_entry: usize) -> Result<String, String> {
    let pm = partitioned(matrix, partition, seed)?;
    pretty(&check_cor_sing_sweep(&pm, max_entry).map_err(|e| e.to_string())?)
}

pub fn search_text(matrix: &str, partition: &str, seed: u64, restarts: usize) -> Result<String, String> {
    let pm = partitioned(matrix, partition, seed)?;
    let cfg = SearchConfig {
        seed,
        restarts: restarts.max(1),
        ..SearchConfig::default()
    };
    let mut res = feasibility_search(&pm, &cfg).map_err(|e| e.to_string())?;
    // the page shows the summary; the point is large
    res.point.clear();
    pretty(&res)
}

#[wasm_bindgen]
pub fn decompose(matrix: &str, partition: &str, seed: u32) -> Result<String, JsValue> {
    decompose_text(matrix, partition, seed.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sweep(matrix: &str, partition: &str, seed: u32, max_entry: u32) -> Result<String, JsValue> {
    sweep_text(matrix, partition, seed.into(), max_entry as usize).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn search(matrix: &str, partition: &str, seed: u32, restarts: u32) -> Result<String, JsValue> {
    search_text(matrix, partition, seed.into(), restarts as usize).map_err(|e| JsValue::from_str(&e))
}
