//! Isometry certificates for `|A|^2 = sum_k U_k |A_k|^2 U_k*`.
//!
//! The engine is [`multi_block_diag_split`]: with `T = M^{1/2}` split into
//! column groups `T_i`, `M = T T* = sum_i T_i T_i*` and `T_i* T_i = M_ii`, so
//! the polar factor `U_i` of `T_i` gives `M = sum_i U_i M_ii U_i*`. Applied to
//! `|A|^2` arranged by block columns (or to each `R_l* R_l` for block rows) it
//! yields the decomposition for compatible partitions.

mod average;
mod four;

pub use average::{
    direct_sum_average, majorization_average, schur_horn_rotation, AverageCertificate,
    MajorizationCertificate,
};
pub use four::decompose4;

use serde::{Deserialize, Serialize};

use crate::linalg::{polar_isometry, sqrt_psd, ComplexMatrix};
use crate::partition::{FourBlockCase, PartitionedMatrix};
use crate::{tol, Error, Result};

/// Isometries `U_k` (`d' x m_k`, one per block in partition order) with the
/// verified residual of `|A|^2 = sum_k U_k |A_k|^2 U_k*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecompositionCertificate {
    /// How the isometries were assembled, e.g. `column`, `row`, or
    /// `peel-full-height:A/column`.
    pub route: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<FourBlockCase>,
    pub block_names: Vec<String>,
    pub isometries: Vec<ComplexMatrix>,
    /// `||A*A - sum_k U_k |A_k|^2 U_k*||_F`.
    pub residual: f64,
    /// `||U_k* U_k - I||_F` per block.
    pub isometry_defects: Vec<f64>,
    /// Steps taken, including every column permutation used.
    pub trail: Vec<String>,
}

impl DecompositionCertificate {
    /// `sum_k U_k |A_k|^2 U_k*`.
    pub fn reassemble(&self, pm: &PartitionedMatrix) -> Result<ComplexMatrix> {
        let dp = pm.matrix().cols();
        if self.isometries.len() != pm.len() {
            return Err(Error::Dimension(format!(
                "certificate has {} isometries for {} blocks",
                self.isometries.len(),
                pm.len()
            )));
        }
        let mut sum = ComplexMatrix::zeros(dp, dp);
        for (k, u) in self.isometries.iter().enumerate() {
            let b = pm.block(k);
            if u.shape() != (dp, b.cols()) {
                return Err(Error::Dimension(format!(
                    "isometry {k} is {}x{}, expected {dp}x{}",
                    u.rows(),
                    u.cols(),
                    b.cols()
                )));
            }
            sum = &sum + &ComplexMatrix::congruence(u, &b.gram());
        }
        Ok(sum)
    }

    /// Recomputes residual and defects from scratch and checks them against
    /// the certificate tolerances.
    pub fn verify(&self, pm: &PartitionedMatrix) -> Result<(f64, Vec<f64>)> {
        let residual = (&pm.abs_sq() - &self.reassemble(pm)?).frobenius();
        let defects: Vec<f64> = self.isometries.iter().map(ComplexMatrix::isometry_defect).collect();
        check_bounds(pm, residual, &defects)?;
        Ok((residual, defects))
    }
}

pub(crate) fn residual_bound(pm: &PartitionedMatrix) -> f64 {
    tol::DECOMPOSITION * (1.0 + pm.matrix().frobenius_sq())
}

fn check_bounds(pm: &PartitionedMatrix, residual: f64, defects: &[f64]) -> Result<()> {
    let allowed = residual_bound(pm);
    if !(residual <= allowed) {
        return Err(Error::Postcondition {
            what: "decomposition residual",
            residual,
            allowed,
        });
    }
    let allowed = tol::unitary(pm.matrix().cols());
    if let Some(&worst) = defects.iter().find(|&&x| !(x <= allowed)) {
        return Err(Error::Postcondition {
            what: "isometry defect",
            residual: worst,
            allowed,
        });
    }
    Ok(())
}

/// `M = U_1 A U_1* + U_2 B U_2*` with `A`, `B` the diagonal blocks of `M`
/// split after row/column `n`.
pub fn two_block_split(m: &ComplexMatrix, n: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if n == 0 || n >= m.rows() {
        return Err(Error::Argument(format!("split point {n} must lie strictly inside 0..{}", m.rows())));
    }
    let mut u = multi_block_diag_split(m, &[n, m.rows() - n])?;
    let u2 = u.pop().expect("two parts");
    let u1 = u.pop().expect("two parts");
    Ok((u1, u2))
}

/// Isometries `U_i` (`size x n_i`) with `M = sum_i U_i M_ii U_i*`, where
/// `M_ii` are the consecutive diagonal blocks of sizes `sizes`.
pub fn multi_block_diag_split(m: &ComplexMatrix, sizes: &[usize]) -> Result<Vec<ComplexMatrix>> {
    if !m.is_square() || sizes.iter().sum::<usize>() != m.rows() || sizes.contains(&0) {
        return Err(Error::Argument(format!(
            "block sizes {sizes:?} do not split a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let t = sqrt_psd(m)?;
    let mut out = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for &s in sizes {
        out.push(polar_isometry(&t.col_range(start, start + s))?);
        start += s;
    }

    let mut start = 0;
    let mut sum = ComplexMatrix::zeros(m.rows(), m.rows());
    for (u, &s) in out.iter().zip(sizes) {
        let idx: Vec<usize> = (start..start + s).collect();
        sum = &sum + &ComplexMatrix::congruence(u, &m.select(&idx, &idx));
        start += s;
    }
    let residual = (m - &sum).frobenius();
    let allowed = tol::DECOMPOSITION * (1.0 + m.frobenius());
    if !(residual <= allowed) {
        return Err(Error::Postcondition {
            what: "diagonal block split",
            residual,
            allowed,
        });
    }
    Ok(out)
}

/// `P U` where `P` sends coordinate `p` to `order[p]`.
pub(crate) fn scatter_rows(u: &ComplexMatrix, order: &[usize]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(u.rows(), u.cols());
    for (p, &dst) in order.iter().enumerate() {
        for j in 0..u.cols() {
            out[(dst, j)] = u[(p, j)];
        }
    }
    out
}

/// Raw isometries for a compatible partition, before verification.
pub(crate) struct Assembly {
    pub isometries: Vec<ComplexMatrix>,
    pub route: String,
    pub trail: Vec<String>,
}

pub(crate) fn assemble_compatible(pm: &PartitionedMatrix) -> Result<Assembly> {
    let report = pm.partition().compatibility();
    if report.column_compatible {
        column_branch(pm, &report.column_groups)
    } else if report.row_compatible {
        row_branch(pm, &report.row_groups)
    } else {
        Err(Error::Incompatible)
    }
}

fn column_branch(pm: &PartitionedMatrix, groups: &[crate::partition::BlockGroup]) -> Result<Assembly> {
    let order: Vec<usize> = groups.iter().flat_map(|g| g.indices.iter().copied()).collect();
    let widths: Vec<usize> = groups.iter().map(|g| g.indices.len()).collect();
    let permuted = pm.abs_sq().select(&order, &order);
    let split = multi_block_diag_split(&permuted, &widths)?;
    let mut isometries = vec![ComplexMatrix::zeros(0, 0); pm.len()];
    for (g, u) in groups.iter().zip(split) {
        let u = scatter_rows(&u, &order);
        for &k in &g.blocks {
            isometries[k] = u.clone();
        }
    }
    Ok(Assembly {
        isometries,
        route: "column".into(),
        trail: vec![format!("column groups {:?}, column order {order:?}", groups.iter().map(|g| &g.blocks).collect::<Vec<_>>())],
    })
}

fn row_branch(pm: &PartitionedMatrix, groups: &[crate::partition::BlockGroup]) -> Result<Assembly> {
    let a = pm.matrix();
    let mut isometries = vec![ComplexMatrix::zeros(0, 0); pm.len()];
    let mut trail = Vec::new();
    for g in groups {
        let all_cols: Vec<usize> = (0..a.cols()).collect();
        let rl = a.select(&g.indices, &all_cols);
        let order: Vec<usize> = g
            .blocks
            .iter()
            .flat_map(|&k| pm.partition().block(k).cols.iter().copied())
            .collect();
        let widths: Vec<usize> = g.blocks.iter().map(|&k| pm.partition().block(k).m()).collect();
        let split = multi_block_diag_split(&rl.gram().select(&order, &order), &widths)?;
        for (&k, u) in g.blocks.iter().zip(split) {
            isometries[k] = scatter_rows(&u, &order);
        }
        trail.push(format!("row group {:?}, column order {order:?}", g.blocks));
    }
    Ok(Assembly {
        isometries,
        route: "row".into(),
        trail,
    })
}

pub(crate) fn certify(pm: &PartitionedMatrix, a: Assembly, case: Option<FourBlockCase>) -> Result<DecompositionCertificate> {
    let mut cert = DecompositionCertificate {
        route: a.route,
        case,
        block_names: pm.partition().blocks().iter().map(|b| b.name.clone()).collect(),
        isometries: a.isometries,
        residual: 0.0,
        isometry_defects: Vec::new(),
        trail: a.trail,
    };
    let (residual, defects) = cert.verify(pm)?;
    cert.residual = residual;
    cert.isometry_defects = defects;
    Ok(cert)
}

/// Certificate for a row or column compatible partition. Column compatible
/// partitions take the column route even when also row compatible; all
/// blocks of one block column then share the same isometry.
pub fn decompose(pm: &PartitionedMatrix) -> Result<DecompositionCertificate> {
    let a = assemble_compatible(pm)?;
    certify(pm, a, None)
}

/// [`decompose`] for compatible partitions, [`decompose4`] for the remaining
/// four-block tilings, [`Error::Incompatible`] otherwise.
pub fn decompose_auto(pm: &PartitionedMatrix) -> Result<DecompositionCertificate> {
    if pm.partition().compatibility().is_compatible() {
        decompose(pm)
    } else if pm.len() == 4 {
        decompose4(pm)
    } else {
        Err(Error::Incompatible)
    }
}
