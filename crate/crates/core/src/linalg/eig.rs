//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64};
use crate::{tol, Error, Result};

/// Pair order used inside one Jacobi sweep.
///
/// Both orders converge to the same spectrum; the alternative order gives an
/// independent numerical path for double-checking delicate claims.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JacobiOrder {
    /// `(0,1), (0,2), ..., (1,2), ...`
    #[default]
    RowMajor,
    /// `(0,1), (0,2), (1,2), (0,3), ...`
    ColumnMajor,
}

/// Eigenvalues sorted nonincreasing with unitary eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `Q f(Λ) Q*`.
    pub fn rebuild_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let q = &self.vectors;
        let n = self.dim();
        let mapped: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = C64::new(0.0, 0.0);
                for (k, &lam) in mapped.iter().enumerate() {
                    if lam != 0.0 {
                        s += q[(i, k)] * q[(j, k)].conj() * lam;
                    }
                }
                out[(i, j)] = s;
                out[(j, i)] = s.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.rebuild_with(|x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix with the default sweep order.
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermitianEig> {
    herm_eig_with(h, JacobiOrder::RowMajor)
}

/// Eigendecomposition with an explicit sweep order.
///
/// The input is symmetrised after the Hermitian check. Output is
/// deterministic: eigenvalues nonincreasing (ties keep Jacobi order), and in
/// every eigenvector the entry of largest modulus (lowest index on ties) is
/// made real positive.
pub fn herm_eig_with(h: &ComplexMatrix, order: JacobiOrder) -> Result<HermitianEig> {
    if !h.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let n = h.rows();
    let norm = h.frobenius();
    let defect = h.hermitian_defect();
    let allowed = tol::HERMITIAN * norm;
    if defect > allowed && defect > f64::MIN_POSITIVE {
        return Err(Error::NotHermitian { defect, allowed });
    }
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = f64::EPSILON * norm / (n.max(1) as f64);

    let pairs: Vec<(usize, usize)> = match order {
        JacobiOrder::RowMajor => (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .collect(),
        JacobiOrder::ColumnMajor => (1..n).flat_map(|q| (0..q).map(move |p| (p, q))).collect(),
    };

    let mut converged = false;
    for _ in 0..tol::MAX_SWEEPS {
        let mut rotated = false;
        for &(p, q) in &pairs {
            if a[(p, q)].norm() > threshold {
                rotate(&mut a, &mut v, p, q);
                rotated = true;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        let off = off_diagonal(&a);
        return Err(Error::NoConvergence {
            sweeps: tol::MAX_SWEEPS,
            off,
        });
    }

    let mut idx: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their index order
    idx.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap());
    let values: Vec<f64> = idx.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in idx.iter().enumerate() {
        let mut col = v.col(src);
        fix_phase(&mut col);
        vectors.set_col(dst, &col);
    }
    Ok(HermitianEig { values, vectors })
}

/// Eigenvalues only.
pub fn eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(herm_eig(h)?.values)
}

/// Multiplies `col` by a unit scalar so its largest-modulus entry is real positive.
pub(crate) fn fix_phase(col: &mut [C64]) {
    let mut best = 0;
    let mut best_mod = -1.0;
    for (i, z) in col.iter().enumerate() {
        let m = z.norm();
        if m > best_mod {
            best = i;
            best_mod = m;
        }
    }
    if best_mod > 0.0 {
        let phase = col[best].conj() / best_mod;
        for z in col.iter_mut() {
            *z *= phase;
        }
        col[best] = C64::new(col[best].norm(), 0.0);
    }
}

fn off_diagonal(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[(p, q)]` by `a <- G* a G`, accumulating `v <- v G`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.rows();
    let c = a[(p, q)];
    let mag = c.norm();
    let phase = c / mag; // e^{i phi}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    let conj_phase = phase.conj();

    // G restricted to (p, q): [[cs, sn], [-sn e^{-i phi}, cs e^{-i phi}]]
    let g_pp = C64::new(cs, 0.0);
    let g_pq = C64::new(sn, 0.0);
    let g_qp = conj_phase * (-sn);
    let g_qq = conj_phase * cs;

    for k in 0..n {
        let hp = a[(k, p)];
        let hq = a[(k, q)];
        a[(k, p)] = hp * g_pp + hq * g_qp;
        a[(k, q)] = hp * g_pq + hq * g_qq;
        let vp = v[(k, p)];
        let vq = v[(k, q)];
        v[(k, p)] = vp * g_pp + vq * g_qp;
        v[(k, q)] = vp * g_pq + vq * g_qq;
    }
    for k in 0..n {
        let xp = a[(p, k)];
        let xq = a[(q, k)];
        a[(p, k)] = g_pp.conj() * xp + g_qp.conj() * xq;
        a[(q, k)] = g_pq.conj() * xp + g_qq.conj() * xq;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(app - t * mag, 0.0);
    a[(q, q)] = C64::new(aqq + t * mag, 0.0);
}
