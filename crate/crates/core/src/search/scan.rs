use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::inequalities::SingularProfile;
use crate::linalg::{ComplexMatrix, JacobiOrder};
use crate::partition::{Partition, PartitionedMatrix};
use crate::random::{random_matrix, rng_stream};
use crate::{tol, Result};

/// Absolute margin below which a scan flags a counterexample candidate.
pub const CANDIDATE_THRESHOLD: f64 = -1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct ScanConfig {
    pub trials: usize,
    pub seed: u64,
    pub max_entry: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 0,
            max_entry: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CounterexampleCandidate {
    pub trial: usize,
    pub matrix: ComplexMatrix,
    pub multi_index: Vec<usize>,
    pub raw_margin: f64,
    /// Raw margins after a JSON round trip, one per Jacobi sweep order.
    pub reproduced: Vec<f64>,
    pub confirmed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanReport {
    pub partition: Partition,
    pub compatible: bool,
    pub trials: usize,
    pub seed: u64,
    pub max_entry: usize,
    /// Smallest relative margin over all trials and multi-indices.
    pub min_margin: f64,
    pub worst_trial: usize,
    pub worst_multi_index: Vec<usize>,
    pub worst_matrix: ComplexMatrix,
    /// Per-trial minimum relative margins.
    pub margins: Vec<f64>,
    pub candidates: Vec<CounterexampleCandidate>,
}

fn worst(prof: &SingularProfile, max_entry: usize) -> (f64, Vec<usize>) {
    prof.cor_sing_minima(max_entry)
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap_or((0.0, Vec::new()))
}

fn confirm(pm: &PartitionedMatrix, max_entry: usize) -> Result<(Vec<f64>, bool)> {
    let text = serde_json::to_string(pm.matrix()).map_err(|e| crate::Error::Schema(e.to_string()))?;
    let m: ComplexMatrix = serde_json::from_str(&text).map_err(|e| crate::Error::Schema(e.to_string()))?;
    let again = PartitionedMatrix::new(m, pm.partition().clone())?;
    let mut margins = Vec::new();
    let mut confirmed = true;
    for order in [JacobiOrder::RowMajor, JacobiOrder::ColumnMajor] {
        let prof = SingularProfile::with_order(&again, order)?;
        let (raw, _) = worst(&prof, max_entry);
        confirmed &= raw < CANDIDATE_THRESHOLD && raw / prof.scale() < -2.0 * tol::INEQUALITY;
        margins.push(raw);
    }
    Ok((margins, confirmed))
}

/// Random matrices on the partition shape checked against the singular value
/// inequality for all multi-indices with entries at most `max_entry`. The
/// inequality holds whenever the Pythagorean decomposition exists, so a
/// violation on an incompatible shape is evidence against it.
pub fn necessary_condition_scan(partition: &Partition, cfg: &ScanConfig) -> Result<ScanReport> {
    let (d, dp) = (partition.host_rows(), partition.host_cols());
    let mut margins = Vec::with_capacity(cfg.trials);
    let mut candidates = Vec::new();
    let mut best: Option<(f64, usize, Vec<usize>, ComplexMatrix)> = None;
    for trial in 0..cfg.trials {
        let m = random_matrix(&mut rng_stream(cfg.seed, trial as u64), d, dp);
        let pm = PartitionedMatrix::new(m, partition.clone())?;
        let prof = SingularProfile::new(&pm)?;
        let (raw, idx) = worst(&prof, cfg.max_entry);
        let rel = raw / prof.scale();
        margins.push(rel);
        if raw < CANDIDATE_THRESHOLD {
            let (reproduced, confirmed) = confirm(&pm, cfg.max_entry)?;
            candidates.push(CounterexampleCandidate {
                trial,
                matrix: pm.matrix().clone(),
                multi_index: idx.clone(),
                raw_margin: raw,
                reproduced,
                confirmed,
            });
        }
        if best.as_ref().map_or(true, |b| rel < b.0) {
            best = Some((rel, trial, idx, pm.matrix().clone()));
        }
    }
    let (min_margin, worst_trial, worst_multi_index, worst_matrix) =
        best.unwrap_or((f64::INFINITY, 0, Vec::new(), ComplexMatrix::zeros(d, dp)));
    Ok(ScanReport {
        partition: partition.clone(),
        compatible: partition.compatibility().is_compatible(),
        trials: cfg.trials,
        seed: cfg.seed,
        max_entry: cfg.max_entry,
        min_margin,
        worst_trial,
        worst_multi_index,
        worst_matrix,
        margins,
        candidates,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdversarialResult {
    pub seed: u64,
    pub steps: usize,
    pub accepted: usize,
    pub start_margin: f64,
    pub final_margin: f64,
    pub multi_index: Vec<usize>,
    pub matrix: ComplexMatrix,
}

/// Seeded random-perturbation descent on the smallest relative margin over
/// the entries of the matrix, from `start`. Only improving moves are kept;
/// the perturbation size shrinks after a run of rejections.
pub fn adversarial_descent(pm: &PartitionedMatrix, max_entry: usize, steps: usize, seed: u64) -> Result<AdversarialResult> {
    let margin_of = |m: &ComplexMatrix| -> Result<(f64, Vec<usize>)> {
        let pm = PartitionedMatrix::new(m.clone(), pm.partition().clone())?;
        let prof = SingularProfile::new(&pm)?;
        let (raw, idx) = worst(&prof, max_entry);
        Ok((raw / prof.scale(), idx))
    };
    let mut r = rng_stream(seed, u64::MAX);
    let mut current = pm.matrix().clone();
    let (start_margin, mut idx) = margin_of(&current)?;
    let mut margin = start_margin;
    let mut size = 0.1 * (current.frobenius() / (current.rows() * current.cols()) as f64).sqrt().max(1e-3);
    let mut rejected = 0;
    let mut accepted = 0;
    let (d, dp) = current.shape();
    for _ in 0..steps {
        let kick = random_matrix(&mut r, d, dp).scale(size * r.gen::<f64>());
        let cand = &current + &kick;
        let (m, i) = margin_of(&cand)?;
        if m < margin {
            current = cand;
            margin = m;
            idx = i;
            accepted += 1;
            rejected = 0;
        } else {
            rejected += 1;
            if rejected >= 20 {
                size *= 0.7;
                rejected = 0;
            }
        }
    }
    Ok(AdversarialResult {
        seed,
        steps,
        accepted,
        start_margin,
        final_margin: margin,
        multi_index: idx,
        matrix: current,
    })
}
