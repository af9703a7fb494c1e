//! Singular value decomposition built on the Hermitian eigensolver, plus the
//! polar factor and absolute value `|A| = (A* A)^{1/2}`.

use serde::{Deserialize, Serialize};

use super::eig::{herm_eig_with, JacobiOrder};
use super::matrix::{dot, norm, ComplexMatrix, C64, ONE, ZERO};
use super::sqrt_psd;
use crate::{Error, Result};

/// Economy SVD `A = left diag(singulars) right*`, `k = min(rows, cols)`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub left: ComplexMatrix,
    pub singulars: SingularValues,
    pub right: ComplexMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut ls = self.left.clone();
        for j in 0..ls.cols() {
            let s = self.singulars.get(j);
            for i in 0..ls.rows() {
                ls[(i, j)] *= s;
            }
        }
        &ls * &self.right.adjoint()
    }
}

/// Nonincreasing singular values, extended by zeros past the stored length.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SingularValues(Vec<f64>);

impl SingularValues {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Self(values)
    }

    /// Zero-based access; indices past the end read as 0.
    pub fn get(&self, i: usize) -> f64 {
        self.0.get(i).copied().unwrap_or(0.0)
    }

    /// One-based access `mu_j`, `mu_j = 0` for `j > len`.
    pub fn mu(&self, j: usize) -> f64 {
        assert!(j >= 1, "singular values are indexed from 1");
        self.get(j - 1)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    svd_with(a, JacobiOrder::RowMajor)
}

/// SVD from the eigendecomposition of `A* A`.
///
/// Right vectors are the eigenvectors; each singular value is `||A v_j||`
/// rather than the square root of the eigenvalue, which keeps small singular
/// values accurate to roughly machine precision times `||A||`. Left vectors
/// `A v_j / s_j` are re-orthonormalised, and any left vector that cannot be
/// recovered (zero or clustered-at-zero singular value) is replaced by the
/// first canonical basis vectors, in index order, that are independent of
/// the ones already accepted.
pub fn svd_with(a: &ComplexMatrix, order: JacobiOrder) -> Result<SvdResult> {
    let (m, n) = a.shape();
    let k = m.min(n);
    let eig = herm_eig_with(&a.gram(), order)?;
    let right_full = eig.vectors;

    let mut values = Vec::with_capacity(k);
    let mut candidates: Vec<Option<Vec<C64>>> = Vec::with_capacity(k);
    let scale = a.frobenius();
    let rank_tol = 1e-13 * scale.max(f64::MIN_POSITIVE);
    for j in 0..k {
        let v = right_full.col(j);
        let av: Vec<C64> = (0..m)
            .map(|i| (0..n).map(|c| a[(i, c)] * v[c]).sum())
            .collect();
        let s = norm(&av);
        values.push(s);
        if s > rank_tol {
            candidates.push(Some(av.iter().map(|z| z / s).collect()));
        } else {
            candidates.push(None);
        }
    }
    let left = orthonormal_with_completion(m, candidates);
    let right = right_full.col_range(0, k);

    // Recomputed norms can break the nonincreasing order by rounding.
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap());
    Ok(SvdResult {
        left: ComplexMatrix::from_fn(m, k, |i, j| left[(i, idx[j])]),
        singulars: SingularValues(idx.iter().map(|&i| values[i]).collect()),
        right: ComplexMatrix::from_fn(n, k, |i, j| right[(i, idx[j])]),
    })
}

/// Orthonormalises the given candidate columns (modified Gram-Schmidt, two
/// passes) and fills `None` slots, or candidates that collapse, with
/// canonical basis vectors taken in index order.
pub(crate) fn orthonormal_with_completion(dim: usize, candidates: Vec<Option<Vec<C64>>>) -> ComplexMatrix {
    let k = candidates.len();
    let mut accepted: Vec<Option<Vec<C64>>> = vec![None; k];
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for (slot, cand) in candidates.into_iter().enumerate() {
        if let Some(v) = cand {
            if let Some(u) = project_out(&basis, v, 0.5) {
                basis.push(u.clone());
                accepted[slot] = Some(u);
            }
        }
    }
    let mut next_canonical = 0;
    for slot in accepted.iter_mut() {
        if slot.is_some() {
            continue;
        }
        while next_canonical < dim {
            let mut e = vec![ZERO; dim];
            e[next_canonical] = ONE;
            next_canonical += 1;
            if let Some(u) = project_out(&basis, e, 1e-3) {
                basis.push(u.clone());
                *slot = Some(u);
                break;
            }
        }
    }
    let mut out = ComplexMatrix::zeros(dim, k);
    for (j, col) in accepted.into_iter().enumerate() {
        out.set_col(j, &col.expect("orthonormal completion ran out of canonical vectors"));
    }
    out
}

/// Removes the components of `v` along `basis` twice, then normalises.
/// Returns `None` if less than `keep` of the original norm survives.
fn project_out(basis: &[Vec<C64>], mut v: Vec<C64>, keep: f64) -> Option<Vec<C64>> {
    let original = norm(&v);
    if original == 0.0 {
        return None;
    }
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, &v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
    let remaining = norm(&v);
    if remaining < keep * original {
        return None;
    }
    Some(v.into_iter().map(|z| z / remaining).collect())
}

pub fn singular_values(a: &ComplexMatrix) -> Result<SingularValues> {
    Ok(svd(a)?.singulars)
}

pub fn singular_values_with(a: &ComplexMatrix, order: JacobiOrder) -> Result<SingularValues> {
    Ok(svd_with(a, order)?.singulars)
}

/// `|A| = (A* A)^{1/2}`, a `cols x cols` PSD matrix.
pub fn abs_value(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    sqrt_psd(&a.gram())
}

/// Isometry `W` (`rows x cols`) with `A = W |A|`.
///
/// Built as `left right*` from the SVD; when `A` is rank deficient the
/// missing left columns come from the deterministic canonical completion, so
/// `A = 0` gives the first `cols` canonical basis vectors.
pub fn polar_isometry(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() < a.cols() {
        return Err(Error::Dimension(format!(
            "polar isometry needs rows >= cols, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let s = svd(a)?;
    Ok(&s.left * &s.right.adjoint())
}
