//! Unitary-orbit averages: the direct sum of the `|A_k|^2` as an average of
//! `r` isometric copies of `|A|^2`, and a majorized matrix as an average of
//! `n` unitary conjugates.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::DecompositionCertificate;
use crate::linalg::{abs_value, herm_eig, polar_isometry, ComplexMatrix, C64};
use crate::partition::PartitionedMatrix;
use crate::{tol, Error, Result};

/// `(+)_k |A_k|^2 = weight * sum_j V_j |A|^2 V_j*` with `V_j` of size `m x d'`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AverageCertificate {
    pub route: String,
    pub isometries: Vec<ComplexMatrix>,
    pub weight: f64,
    pub residual: f64,
    pub isometry_defects: Vec<f64>,
}

/// `A = (1/n) sum_i U_i B U_i*` with exactly `n` unitaries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MajorizationCertificate {
    pub route: String,
    pub unitaries: Vec<ComplexMatrix>,
    pub residual: f64,
    pub unitary_defects: Vec<f64>,
}

/// `Z = (+)_k w^k I_{m_k}` with `w = exp(2 pi i / r)`, as its diagonal.
fn root_of_unity_diag(sizes: &[usize], power: usize) -> Vec<C64> {
    let r = sizes.len().max(1);
    sizes
        .iter()
        .enumerate()
        .flat_map(|(k, &m)| {
            let w = C64::from_polar(1.0, TAU * ((k * power) % r) as f64 / r as f64);
            std::iter::repeat(w).take(m)
        })
        .collect()
}

fn scale_rows(u: &ComplexMatrix, diag: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(u.rows(), u.cols(), |i, j| diag[i] * u[(i, j)])
}

/// Builds `V_j` from a decomposition certificate.
///
/// With `X = [U_1|A_1| ... U_r|A_r|]`, `X X* = |A|^2` and the diagonal blocks
/// of `X* X` are the `|A_k|^2`. The polar factor `V` of `X*` gives
/// `X* X = V |A|^2 V*`, and averaging over conjugation by the powers of `Z`
/// keeps exactly the diagonal blocks; so `V_j = Z^j V`.
pub fn direct_sum_average(pm: &PartitionedMatrix, cert: &DecompositionCertificate) -> Result<AverageCertificate> {
    cert.verify(pm)?;
    let r = pm.len();
    let dp = pm.matrix().cols();
    let sizes: Vec<usize> = pm.partition().blocks().iter().map(|b| b.m()).collect();
    let m: usize = sizes.iter().sum();
    assert!(m >= dp, "a tiling has at least d' block columns in total");

    let blocks = pm.blocks();
    let mut parts = Vec::with_capacity(r);
    for (u, b) in cert.isometries.iter().zip(&blocks) {
        parts.push(u * &abs_value(b)?);
    }
    let x = ComplexMatrix::hstack(&parts.iter().collect::<Vec<_>>())?;
    let v = polar_isometry(&x.adjoint())?;

    let isometries: Vec<ComplexMatrix> = (0..r).map(|j| scale_rows(&v, &root_of_unity_diag(&sizes, j))).collect();
    let target = ComplexMatrix::direct_sum(&blocks.iter().map(|b| b.gram()).collect::<Vec<_>>().iter().collect::<Vec<_>>());
    let abs_sq = pm.abs_sq();
    let weight = 1.0 / r as f64;
    let mut avg = ComplexMatrix::zeros(m, m);
    for vj in &isometries {
        avg = &avg + &ComplexMatrix::congruence(vj, &abs_sq);
    }
    let residual = (&target - &avg.scale(weight)).frobenius();
    let allowed = tol::DECOMPOSITION * (1.0 + pm.matrix().frobenius_sq());
    if !(residual <= allowed) {
        return Err(Error::Postcondition {
            what: "direct-sum average",
            residual,
            allowed,
        });
    }
    let isometry_defects: Vec<f64> = isometries.iter().map(ComplexMatrix::isometry_defect).collect();
    let allowed = tol::unitary(m);
    if let Some(&worst) = isometry_defects.iter().find(|&&x| !(x <= allowed)) {
        return Err(Error::Postcondition {
            what: "average isometry defect",
            residual: worst,
            allowed,
        });
    }
    Ok(AverageCertificate {
        route: "polar-pinching".into(),
        isometries,
        weight,
        residual,
        isometry_defects,
    })
}

/// Real orthogonal `O` (as rows) with `diag(O diag(b) O^T) = a`, for `a`
/// sorted nonincreasing and majorized by `b`.
///
/// One rotation per step: pick `j` with `b_j >= a_1 >= b_{j+1}` (b sorted),
/// rotate in the `(j, j+1)` plane so the new first diagonal entry is `a_1`;
/// the complementary diagonal is `b` with `b_j, b_{j+1}` replaced by
/// `b_j + b_{j+1} - a_1`, which majorizes `(a_2, ..., a_n)`. Recurse on it.
/// The result uses `n - 1` rotations.
pub fn schur_horn_rotation(a: &[f64], b: &[f64]) -> Vec<Vec<f64>> {
    let n = a.len();
    assert_eq!(n, b.len());
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![vec![1.0]];
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&i, &j| b[j].partial_cmp(&b[i]).unwrap());
    let bs: Vec<f64> = perm.iter().map(|&i| b[i]).collect();
    let target = a[0];
    let j = (0..n - 1)
        .find(|&j| bs[j] >= target && target >= bs[j + 1])
        .unwrap_or(if target > bs[0] { 0 } else { n - 2 });
    let gap = bs[j] - bs[j + 1];
    let c2 = if gap > 0.0 {
        ((target - bs[j + 1]) / gap).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let (c, s) = (c2.sqrt(), (1.0 - c2).sqrt());

    // basis vectors in sorted coordinates
    let unit = |k: usize| {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        e
    };
    let mut first = vec![0.0; n];
    first[j] = c;
    first[j + 1] = s;
    let mut other = vec![0.0; n];
    other[j] = -s;
    other[j + 1] = c;
    let x = s * s * bs[j] + c * c * bs[j + 1];

    let mut rest_basis = Vec::with_capacity(n - 1);
    let mut rest_diag = Vec::with_capacity(n - 1);
    for k in 0..n {
        if k == j {
            rest_basis.push(other.clone());
            rest_diag.push(x);
        } else if k != j + 1 {
            rest_basis.push(unit(k));
            rest_diag.push(bs[k]);
        }
    }
    let inner = schur_horn_rotation(&a[1..], &rest_diag);

    let mut rows_sorted = vec![first];
    for row in &inner {
        let mut v = vec![0.0; n];
        for (coef, basis) in row.iter().zip(&rest_basis) {
            for (vi, bi) in v.iter_mut().zip(basis) {
                *vi += coef * bi;
            }
        }
        rows_sorted.push(v);
    }
    // back to the original order of b
    rows_sorted
        .into_iter()
        .map(|row| {
            let mut out = vec![0.0; n];
            for (t, &orig) in perm.iter().enumerate() {
                out[orig] = row[t];
            }
            out
        })
        .collect()
}

/// Checks `a < b` (both sorted nonincreasing) with absolute slack `tol`.
fn check_majorization(a: &[f64], b: &[f64], tol: f64) -> Result<()> {
    let (mut sa, mut sb) = (0.0, 0.0);
    for k in 0..a.len() {
        sa += a[k];
        sb += b[k];
        if sa > sb + tol {
            return Err(Error::MajorizationViolated { index: k + 1, lhs: sa, rhs: sb });
        }
    }
    if (sa - sb).abs() > tol {
        return Err(Error::MajorizationViolated {
            index: a.len(),
            lhs: sa,
            rhs: sb,
        });
    }
    Ok(())
}

/// `A = (1/n) sum_i U_i B U_i*` for Hermitian `A` majorized by `B`.
///
/// `A = W D W*`; a Schur-Horn rotation `V` gives `diag(V B V*) = D`; the
/// diagonal part is the average of the conjugates by `F^i`,
/// `F = diag(1, w, ..., w^{n-1})`; so `U_i = W F^i V`.
pub fn majorization_average(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<MajorizationCertificate> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::Dimension(format!(
            "majorization needs equal square shapes, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let n = a.rows();
    let ea = herm_eig(a)?;
    let eb = herm_eig(b)?;
    let scale = 1.0 + b.frobenius();
    check_majorization(&ea.values, &eb.values, tol::DECOMPOSITION * scale)?;

    let o = schur_horn_rotation(&ea.values, &eb.values);
    let o = ComplexMatrix::from_fn(n, n, |i, j| C64::new(o[i][j], 0.0));
    let v = &o * &eb.vectors.adjoint();
    let unitaries: Vec<ComplexMatrix> = (0..n)
        .map(|i| {
            let f: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, TAU * ((i * k) % n) as f64 / n as f64)).collect();
            &ea.vectors * &scale_rows(&v, &f)
        })
        .collect();

    let mut avg = ComplexMatrix::zeros(n, n);
    for u in &unitaries {
        avg = &avg + &ComplexMatrix::congruence(u, b);
    }
    let residual = (a - &avg.scale(1.0 / n.max(1) as f64)).frobenius();
    let allowed = tol::DECOMPOSITION * scale;
    if !(residual <= allowed) {
        return Err(Error::Postcondition {
            what: "majorization average",
            residual,
            allowed,
        });
    }
    let unitary_defects: Vec<f64> = unitaries.iter().map(ComplexMatrix::isometry_defect).collect();
    Ok(MajorizationCertificate {
        route: "schur-horn-pinching".into(),
        unitaries,
        residual,
        unitary_defects,
    })
}
