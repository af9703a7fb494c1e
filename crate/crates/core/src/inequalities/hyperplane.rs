//! Compressions onto hyperplanes `S = h^perp`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::InequalityReport;
use crate::linalg::{dot, norm, singular_values, ComplexMatrix, SingularValues, C64, ONE, ZERO};
use crate::{tol, Error, Result};

/// The scalars attached to `(A, h)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HyperplaneSpec {
    pub h: Vec<C64>,
    pub ah_sq: f64,
    pub adj_h_sq: f64,
    pub inner_abs: f64,
    pub beta_normal: f64,
    pub beta_min: f64,
    pub beta_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Compression {
    /// `Q* A Q`, size `d - 1`.
    pub matrix: ComplexMatrix,
    /// Orthonormal basis of `h^perp`, `d x (d - 1)`.
    pub basis: ComplexMatrix,
    pub spec: HyperplaneSpec,
}

fn check_unit(h: &[C64]) -> Result<()> {
    let n = norm(h);
    if !n.is_finite() || (n - 1.0).abs() > tol::UNIT_VECTOR {
        return Err(Error::Domain(format!("h must be a unit vector, |h| = {n:.17}")));
    }
    Ok(())
}

/// First `d - 1` columns of the Householder reflector taking `h` (after
/// rotating its last entry onto the nonnegative axis) to `e_d`.
pub fn householder_basis(h: &[C64]) -> Result<ComplexMatrix> {
    check_unit(h)?;
    let d = h.len();
    if d < 2 {
        return Err(Error::Dimension(format!("hyperplane needs d >= 2, got {d}")));
    }
    let last = h[d - 1];
    let phase = if last.norm() > 0.0 { last / last.norm() } else { ONE };
    let hp: Vec<C64> = h.iter().map(|z| z * phase.conj()).collect();
    let head_sq: f64 = hp[..d - 1].iter().map(|z| z.norm_sqr()).sum();
    let mut w: Vec<C64> = hp.clone();
    // hp_last - 1 without cancellation
    w[d - 1] = C64::new(-head_sq / (1.0 + hp[d - 1].re), 0.0);
    let w_sq: f64 = head_sq + w[d - 1].norm_sqr();
    Ok(ComplexMatrix::from_fn(d, d - 1, |i, j| {
        let id = if i == j { ONE } else { ZERO };
        if w_sq == 0.0 {
            id
        } else {
            id - w[i] * w[j].conj() * (2.0 / w_sq)
        }
    }))
}

/// Compression of square `A` onto `h^perp` in the Householder basis.
pub fn compress_hyperplane(a: &ComplexMatrix, h: &[C64]) -> Result<Compression> {
    if !a.is_square() || a.rows() != h.len() {
        return Err(Error::Dimension(format!(
            "need square A matching h, got {:?} and {}",
            a.shape(),
            h.len()
        )));
    }
    let q = householder_basis(h)?;
    let matrix = &(&q.adjoint() * a) * &q;
    let hv = ComplexMatrix::column(h);
    let ah = (a * &hv).col(0);
    let adj_h = (&a.adjoint() * &hv).col(0);
    let ah_sq = norm(&ah).powi(2);
    let adj_h_sq = norm(&adj_h).powi(2);
    let inner_abs = dot(h, &ah).norm();
    let i2 = inner_abs * inner_abs;
    let spec = HyperplaneSpec {
        h: h.to_vec(),
        ah_sq,
        adj_h_sq,
        inner_abs,
        beta_normal: ah_sq - i2,
        beta_min: ah_sq.min(adj_h_sq) - i2,
        beta_sum: ah_sq + adj_h_sq - i2,
    };
    Ok(Compression { matrix, basis: q, spec })
}

fn profile(a: &ComplexMatrix, h: &[C64]) -> Result<(Compression, SingularValues, SingularValues, f64)> {
    let c = compress_hyperplane(a, h)?;
    let sa = singular_values(a)?;
    let ss = singular_values(&c.matrix)?;
    let scale = 1.0 + sa.get(0).powi(2);
    Ok((c, sa, ss, scale))
}

fn payload(a: &ComplexMatrix, h: &[C64]) -> serde_json::Value {
    json!({ "matrix": a, "h": h })
}

/// `mu_j^2(A) >= mu_j^2(A_S) >= mu_{j+1}^2(A) - beta` for `j = 1..d-1`.
///
/// `normal = true` uses `beta_normal` and is only a theorem for normal `A`;
/// otherwise `beta_min`. Margin labels are `upper:j` and `lower:j`.
pub fn check_interlacing(a: &ComplexMatrix, h: &[C64], normal: bool) -> Result<InequalityReport> {
    let (c, sa, ss, scale) = profile(a, h)?;
    let beta = if normal { c.spec.beta_normal } else { c.spec.beta_min };
    let hypothesis = !normal || {
        let lhs = a * &a.adjoint();
        let rhs = &a.adjoint() * a;
        (&lhs - &rhs).max_abs() <= tol::HERMITIAN * scale
    };
    let mut rep = InequalityReport::new(if normal { "interlacing-normal" } else { "interlacing" }, hypothesis, scale, tol::INEQUALITY)
        .param("beta", json!(beta));
    let d = a.rows();
    for j in 1..d {
        rep.push(format!("upper:{j}"), sa.mu(j).powi(2) - ss.mu(j).powi(2));
        rep.push(format!("lower:{j}"), ss.mu(j).powi(2) - sa.mu(j + 1).powi(2) + beta);
    }
    Ok(rep.finish(|| payload(a, h)))
}

/// `mu_j^2(A) - mu_j^2(A_S) <= beta_sum` for `j = 1..d-1`.
pub fn check_compression_drop(a: &ComplexMatrix, h: &[C64]) -> Result<InequalityReport> {
    let (c, sa, ss, scale) = profile(a, h)?;
    let beta = c.spec.beta_sum;
    let mut rep = InequalityReport::new("compression-drop", true, scale, tol::INEQUALITY).param("beta", json!(beta));
    for j in 1..a.rows() {
        rep.push(format!("j={j}"), beta - (sa.mu(j).powi(2) - ss.mu(j).powi(2)));
    }
    Ok(rep.finish(|| payload(a, h)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_matrix, random_unit_vector, random_unitary, rng};
    use rand::Rng;

    fn e(d: usize, k: usize) -> Vec<C64> {
        (0..d).map(|i| if i == k { ONE } else { ZERO }).collect()
    }

    #[test]
    fn last_canonical_vector_gives_leading_submatrix() {
        let mut r = rng(1);
        let a = random_matrix(&mut r, 4, 4);
        let c = compress_hyperplane(&a, &e(4, 3)).unwrap();
        let lead = a.select(&[0, 1, 2], &[0, 1, 2]);
        assert!((&c.matrix - &lead).max_abs() < 1e-15);
    }

    #[test]
    fn identity_compresses_to_identity() {
        let mut r = rng(2);
        let h = random_unit_vector(&mut r, 5);
        let c = compress_hyperplane(&ComplexMatrix::identity(5), &h).unwrap();
        assert!((&c.matrix - &ComplexMatrix::identity(4)).max_abs() < 1e-14);
        for b in [c.spec.beta_min, c.spec.beta_normal] {
            assert!(b.abs() < 1e-14);
        }
        assert!((c.spec.beta_sum - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_by_two_reflection() {
        let v = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = [C64::new(s, 0.0), C64::new(s, 0.0)];
        let c = compress_hyperplane(&v, &h).unwrap();
        assert!(c.matrix[(0, 0)].norm() < 1e-15);
        assert!(c.spec.inner_abs < 1e-15);
    }

    #[test]
    fn basis_is_orthonormal_and_orthogonal_to_h() {
        let mut r = rng(3);
        for d in 2..8 {
            let h = random_unit_vector(&mut r, d);
            let q = householder_basis(&h).unwrap();
            assert!(q.isometry_defect() < 1e-14);
            let qh = &q.adjoint() * &ComplexMatrix::column(&h);
            assert!(qh.max_abs() < 1e-14);
        }
        assert!(householder_basis(&[C64::new(0.5, 0.0), ZERO]).is_err());
    }

    #[test]
    fn unitary_sharpness() {
        let mut r = rng(4);
        for _ in 0..20 {
            let d = r.gen_range(3..9);
            let v = random_unitary(&mut r, d);
            let h = random_unit_vector(&mut r, d);
            let c = compress_hyperplane(&v, &h).unwrap();
            let s = singular_values(&c.matrix).unwrap();
            for j in 1..d - 1 {
                assert!((s.mu(j) - 1.0).abs() < 1e-10);
            }
            assert!((s.mu(d - 1) - c.spec.inner_abs).abs() < 1e-10);
            assert!(check_interlacing(&v, &h, false).unwrap().pass);
        }
    }

    #[test]
    fn hermitian_eigenvector_removes_its_eigenvalue() {
        let mut r = rng(5);
        let a = random_hermitian(&mut r, 5);
        let eig = crate::linalg::herm_eig(&a).unwrap();
        let k = 2;
        let h = eig.vectors.col(k);
        let c = compress_hyperplane(&a, &h).unwrap();
        let mut got = crate::linalg::eigenvalues(&c.matrix).unwrap();
        let mut want: Vec<f64> = eig.values.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &v)| v).collect();
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
        assert!(c.spec.beta_normal.abs() < 1e-12);
    }

    #[test]
    fn random_pairs_pass() {
        let mut r = rng(6);
        for _ in 0..50 {
            let d = r.gen_range(2..7);
            let a = random_matrix(&mut r, d, d);
            let h = random_unit_vector(&mut r, d);
            let c = compress_hyperplane(&a, &h).unwrap();
            assert!(c.spec.beta_min <= c.spec.beta_normal + 1e-15);
            assert!(c.spec.beta_normal <= c.spec.beta_sum + 1e-15);
            assert!(c.spec.beta_min >= -1e-12);
            assert!(check_interlacing(&a, &h, false).unwrap().pass);
            assert!(check_compression_drop(&a, &h).unwrap().pass);
        }
    }

    #[test]
    fn rank_one_aligned_drop() {
        // A = h h*: A_S = 0, so the drop at j = 1 is 1 and beta_sum = 1.
        let mut r = rng(7);
        let h = random_unit_vector(&mut r, 4);
        let hv = ComplexMatrix::column(&h);
        let a = &hv * &hv.adjoint();
        let rep = check_compression_drop(&a, &h).unwrap();
        assert!(rep.margins[0].raw.abs() < 1e-13);
    }
}
