//! Singular value, Schatten norm and hyperplane compression inequalities,
//! evaluated as reports with relative margins.

mod hyperplane;
mod report;

pub use hyperplane::{
    check_compression_drop, check_interlacing, compress_hyperplane, householder_basis, Compression,
    HyperplaneSpec,
};
pub use report::{InequalityReport, Margin};

use serde_json::json;

use crate::linalg::{singular_values, singular_values_with, ComplexMatrix, JacobiOrder, SingularValues};
use crate::partition::PartitionedMatrix;
use crate::{tol, Error, Result};

/// Singular values of the host and of every block.
#[derive(Clone, Debug)]
pub struct SingularProfile {
    pub host: SingularValues,
    pub blocks: Vec<SingularValues>,
    /// `min(d, d')`.
    pub rank_bound: usize,
}

impl SingularProfile {
    pub fn new(pm: &PartitionedMatrix) -> Result<Self> {
        Self::with_order(pm, JacobiOrder::default())
    }

    pub fn with_order(pm: &PartitionedMatrix, order: JacobiOrder) -> Result<Self> {
        let (d, dp) = pm.matrix().shape();
        Ok(Self {
            host: singular_values_with(pm.matrix(), order)?,
            blocks: pm
                .blocks()
                .iter()
                .map(|b| singular_values_with(b, order))
                .collect::<Result<_>>()?,
            rank_bound: d.min(dp),
        })
    }

    /// Smallest unscaled margin over multi-indices with entries at most
    /// `max_entry`, one per attainable total, with a minimising index.
    pub fn cor_sing_minima(&self, max_entry: usize) -> Vec<(f64, Vec<usize>)> {
        let max_total = (self.rank_bound.max(1) - 1).min(max_entry * self.blocks.len());
        min_block_sums(self, max_entry, max_total)
            .into_iter()
            .enumerate()
            .filter_map(|(s, e)| e.map(|(v, idx)| (v - self.host.get(s).powi(2), idx)))
            .collect()
    }

    /// `1 + ||A||_2^2`.
    pub fn scale(&self) -> f64 {
        1.0 + self.host.get(0).powi(2)
    }

    /// `sum_k mu^2_{j_k+1}(A_k) - mu^2_{|J|+1}(A)`, not yet scaled.
    pub fn cor_sing_raw(&self, j: &[usize]) -> f64 {
        let rhs: f64 = j.iter().zip(&self.blocks).map(|(&jk, s)| s.get(jk).powi(2)).sum();
        rhs - self.host.get(j.iter().sum()).powi(2)
    }
}

fn payload(pm: &PartitionedMatrix) -> serde_json::Value {
    json!({ "matrix": pm.matrix(), "partition": pm.partition() })
}

/// `mu^2_{j_1+...+j_r+1}(A) <= sum_k mu^2_{j_k+1}(A_k)` for one multi-index.
pub fn check_cor_sing(pm: &PartitionedMatrix, j: &[usize]) -> Result<InequalityReport> {
    if j.len() != pm.len() {
        return Err(Error::Argument(format!(
            "multi-index has {} entries for {} blocks",
            j.len(),
            pm.len()
        )));
    }
    let prof = SingularProfile::new(pm)?;
    let scale = prof.scale();
    let mut rep = InequalityReport::new("cor-sing", pm.partition().compatibility().is_compatible(), scale, tol::INEQUALITY)
        .param("J", json!(j));
    rep.push(format!("J={j:?}"), prof.cor_sing_raw(j));
    Ok(rep.finish(|| payload(pm)))
}

/// Minimum of `sum_k mu^2_{j_k+1}(A_k)` over multi-indices with entries at
/// most `max_entry` and total `s`, for every `s`, with a minimiser.
fn min_block_sums(prof: &SingularProfile, max_entry: usize, max_total: usize) -> Vec<Option<(f64, Vec<usize>)>> {
    let mut best: Vec<Option<(f64, Vec<usize>)>> = vec![None; max_total + 1];
    best[0] = Some((0.0, Vec::new()));
    for s in &prof.blocks {
        let mut next: Vec<Option<(f64, Vec<usize>)>> = vec![None; max_total + 1];
        for (t, cur) in best.iter().enumerate() {
            let Some((v, idx)) = cur else { continue };
            for jk in 0..=max_entry.min(max_total - t) {
                let cand = v + s.get(jk).powi(2);
                let slot = &mut next[t + jk];
                if slot.as_ref().map_or(true, |(w, _)| cand < *w) {
                    let mut idx = idx.clone();
                    idx.push(jk);
                    *slot = Some((cand, idx));
                }
            }
        }
        best = next;
    }
    best
}

/// The singular value inequality for every multi-index with entries in
/// `0..=max_entry`.
///
/// For each total `s = |J|` only the smallest right-hand side matters; it
/// is found by a min-plus recursion over the blocks, so the sweep is exact
/// without enumerating `(max_entry + 1)^r` indices. Totals past the rank
/// bound `min(d, d')` have `mu_{s+1}(A) = 0` and are skipped.
pub fn check_cor_sing_sweep(pm: &PartitionedMatrix, max_entry: usize) -> Result<InequalityReport> {
    let prof = SingularProfile::new(pm)?;
    let mut rep = InequalityReport::new("cor-sing-sweep", pm.partition().compatibility().is_compatible(), prof.scale(), tol::INEQUALITY)
        .param("maxEntry", json!(max_entry));
    for (raw, idx) in prof.cor_sing_minima(max_entry) {
        rep.push(format!("J={idx:?}"), raw);
    }
    Ok(rep.finish(|| payload(pm)))
}

/// `mu^2_j(A) - mu^2_j(A_k) <= sum_{l != k} mu^2_1(A_l)`, `j >= 1`.
pub fn check_cor_var(pm: &PartitionedMatrix, k: usize, j: usize) -> Result<InequalityReport> {
    if k >= pm.len() || j == 0 {
        return Err(Error::Argument(format!("need block index < {} and j >= 1, got k={k}, j={j}", pm.len())));
    }
    let prof = SingularProfile::new(pm)?;
    let mut idx = vec![0; pm.len()];
    idx[k] = j - 1;
    let mut rep = InequalityReport::new("cor-var", pm.partition().compatibility().is_compatible(), prof.scale(), tol::INEQUALITY)
        .param("k", json!(k))
        .param("j", json!(j));
    rep.push(format!("k={k},j={j}"), prof.cor_sing_raw(&idx));
    Ok(rep.finish(|| payload(pm)))
}

/// `(sum_j mu_j^q)^{1/q}` from precomputed singular values; `q = inf` gives
/// the spectral norm.
pub fn schatten_from(s: &SingularValues, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::Argument(format!("Schatten exponent must be positive, got {q}")));
    }
    let top = s.get(0);
    if top == 0.0 {
        return Ok(0.0);
    }
    if q.is_infinite() {
        return Ok(top);
    }
    // scaled by mu_1 to keep large q from overflowing
    let sum: f64 = s.as_slice().iter().map(|&x| (x / top).powf(q)).sum();
    Ok(top * sum.powf(1.0 / q))
}

/// Schatten `q`-norm (a quasi-norm for `q < 1`).
pub fn schatten_norm(m: &ComplexMatrix, q: f64) -> Result<f64> {
    schatten_from(&singular_values(m)?, q)
}

/// `r^{2/q-1} sum ||A_k||_q^2 <= ||A||_q^2 <= sum ||A_k||_q^2` for `q >= 2`,
/// both reversed for `0 < q < 2`. Margins: `lower`, then `upper`.
pub fn check_bhatia_kittaneh(pm: &PartitionedMatrix, q: f64) -> Result<InequalityReport> {
    let prof = SingularProfile::new(pm)?;
    let r = pm.len() as f64;
    let host = schatten_from(&prof.host, q)?.powi(2);
    let sum: f64 = prof
        .blocks
        .iter()
        .map(|s| schatten_from(s, q).map(|x| x * x))
        .sum::<Result<f64>>()?;
    let factor = if q.is_infinite() { 1.0 / r } else { r.powf(2.0 / q - 1.0) };
    let scale = prof.scale().max(1.0 + host.max(sum).max(factor * sum));
    let mut rep = InequalityReport::new("bhatia-kittaneh", pm.partition().compatibility().is_compatible(), scale, tol::INEQUALITY)
        .param("q", json!(q))
        .param("orientation", json!(if q >= 2.0 { "q>=2" } else { "q<2" }));
    if q >= 2.0 {
        rep.push("lower", host - factor * sum);
        rep.push("upper", sum - host);
    } else {
        rep.push("lower", factor * sum - host);
        rep.push("upper", host - sum);
    }
    Ok(rep.finish(|| payload(pm)))
}

/// `{Tr |A|^{2p}}^{1/p} <= sum_k {Tr |A_k|^{2p}}^{1/p}`, `p >= 1`, stated for
/// three blocks (any three-block tiling is compatible).
pub fn check_trace_triangle(pm: &PartitionedMatrix, p: f64) -> Result<InequalityReport> {
    if !(p >= 1.0) {
        return Err(Error::Hypothesis(format!("trace triangle inequality needs p >= 1, got {p}")));
    }
    let prof = SingularProfile::new(pm)?;
    let tr = |s: &SingularValues| -> f64 { s.as_slice().iter().map(|x| x.powf(2.0 * p)).sum::<f64>().powf(1.0 / p) };
    let host = tr(&prof.host);
    let sum: f64 = prof.blocks.iter().map(tr).sum();
    let scale = prof.scale().max(1.0 + host.max(sum));
    let hypothesis = pm.len() == 3 || pm.partition().compatibility().is_compatible();
    let mut rep = InequalityReport::new("trace-triangle", hypothesis, scale, tol::INEQUALITY).param("p", json!(p));
    rep.push("upper", sum - host);
    Ok(rep.finish(|| payload(pm)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{grid, three_block, ThreeBlockLayout};
    use crate::random::{random_compatible, random_matrix, rng};
    use rand::Rng;

    #[test]
    fn schatten_examples() {
        let d = ComplexMatrix::from_real_diag(&[3.0, 4.0]);
        assert!((schatten_norm(&d, 1.0).unwrap() - 7.0).abs() < 1e-14);
        assert!((schatten_norm(&d, 2.0).unwrap() - 5.0).abs() < 1e-14);
        assert!((schatten_norm(&d, f64::INFINITY).unwrap() - 4.0).abs() < 1e-14);
        assert!((schatten_norm(&d, 400.0).unwrap() - 4.0).abs() < 1e-3);
        assert!(schatten_norm(&d, 0.0).is_err());
        let rank1 = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        for q in [0.5, 1.0, 3.0] {
            assert!((schatten_norm(&rank1, q).unwrap() - 5.0).abs() < 1e-12);
        }
        let mut r = rng(1);
        let a = random_matrix(&mut r, 4, 6);
        assert!((schatten_norm(&a, 2.0).unwrap() - a.frobenius()).abs() < 1e-13);
    }

    #[test]
    fn zero_multi_index_and_fourth_singular_value() {
        let mut r = rng(2);
        let p = three_block(ThreeBlockLayout::TopSplit, 5, 5, (2, 3)).unwrap();
        let pm = PartitionedMatrix::new(random_matrix(&mut r, 5, 5), p).unwrap();
        assert!(check_cor_sing(&pm, &[0, 0, 0]).unwrap().pass);
        let rep = check_cor_sing(&pm, &[2, 1, 0]).unwrap();
        assert!(rep.pass && rep.hypothesis);
        assert!(check_cor_sing(&pm, &[1, 1]).is_err());
    }

    #[test]
    fn sweep_agrees_with_brute_force() {
        let mut r = rng(3);
        for _ in 0..20 {
            let (d, dp) = (r.gen_range(2..6), r.gen_range(2..6));
            let p = random_compatible(&mut r, d, dp, false);
            if p.len() > 5 {
                continue;
            }
            let pm = PartitionedMatrix::new(random_matrix(&mut r, d, dp), p).unwrap();
            let sweep = check_cor_sing_sweep(&pm, 3).unwrap();
            let prof = SingularProfile::new(&pm).unwrap();
            let mut brute = f64::INFINITY;
            let n = pm.len();
            for code in 0..4usize.pow(n as u32) {
                let j: Vec<usize> = (0..n).map(|k| (code / 4usize.pow(k as u32)) % 4).collect();
                brute = brute.min(prof.cor_sing_raw(&j) / prof.scale());
            }
            assert!((sweep.min_margin.min(0.0) - brute.min(0.0)).abs() < 1e-13);
            assert!(sweep.pass);
        }
    }

    #[test]
    fn cor_var_single_block() {
        let mut r = rng(4);
        let pm = PartitionedMatrix::new(random_matrix(&mut r, 3, 3), grid(&[3], &[3]).unwrap()).unwrap();
        let rep = check_cor_var(&pm, 0, 1).unwrap();
        assert!(rep.margins[0].value.abs() < 1e-14);
    }

    #[test]
    fn bhatia_kittaneh_q2_is_trace_identity() {
        let mut r = rng(5);
        let pm = PartitionedMatrix::new(random_matrix(&mut r, 4, 4), grid(&[2, 2], &[1, 3]).unwrap()).unwrap();
        let rep = check_bhatia_kittaneh(&pm, 2.0).unwrap();
        assert!(rep.margins[1].value.abs() < 1e-12);
        for q in [0.5, 1.0, 3.0, 4.0] {
            assert!(check_bhatia_kittaneh(&pm, q).unwrap().pass, "q={q}");
        }
    }

    #[test]
    fn bhatia_kittaneh_lower_bound_tight_on_replicated_blocks() {
        // [[1, 1], [1, 1]] in four 1x1 blocks: ||A||_q^2 = 4 for all q and
        // sum ||A_k||_q^2 = 4, so the large-q lower bound 4^{2/q-1} * 4 -> 1 is
        // far from tight, while at q = 2 both bounds meet.
        let pm = PartitionedMatrix::new(ComplexMatrix::from_real(2, 2, &[1.0; 4]).unwrap(), grid(&[1, 1], &[1, 1]).unwrap()).unwrap();
        let rep = check_bhatia_kittaneh(&pm, 2.0).unwrap();
        assert!(rep.margins.iter().all(|m| m.value.abs() < 1e-14));
        let rep = check_bhatia_kittaneh(&pm, f64::INFINITY).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn trace_triangle_p1_equality() {
        let mut r = rng(6);
        let p = three_block(ThreeBlockLayout::Rows, 4, 3, (1, 2)).unwrap();
        let pm = PartitionedMatrix::new(random_matrix(&mut r, 4, 3), p).unwrap();
        let rep = check_trace_triangle(&pm, 1.0).unwrap();
        assert!(rep.margins[0].value.abs() < 1e-13);
        assert!(check_trace_triangle(&pm, 2.0).unwrap().pass);
        assert!(check_trace_triangle(&pm, 0.5).is_err());
    }
}
