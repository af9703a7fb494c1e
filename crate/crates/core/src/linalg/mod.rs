//! Deterministic dense complex linear algebra.

mod eig;
mod matrix;
mod svd;

pub use eig::{eigenvalues, herm_eig, herm_eig_with, HermitianEig, JacobiOrder};
pub use matrix::{ComplexMatrix, MatrixFile, C64};
pub use svd::{
    abs_value, polar_isometry, singular_values, singular_values_with, svd, svd_with,
    SingularValues, SvdResult,
};

pub(crate) use matrix::{dot, norm, ONE, ZERO};
pub(crate) use svd::orthonormal_with_completion;

use serde::{Deserialize, Serialize};

use crate::scalar_fn::ScalarFunction;
use crate::{tol, Error, Result};

/// Largest singular value.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?.get(0))
}

fn clamp_psd(eig: &HermitianEig) -> Result<Vec<f64>> {
    let scale = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = tol::PSD * scale;
    let lowest = eig.min();
    if lowest < -threshold {
        return Err(Error::Indefinite {
            eigenvalue: lowest,
            threshold: -threshold,
        });
    }
    let floor = tol::RANK * scale;
    Ok(eig.values.iter().map(|&v| if v <= floor { 0.0 } else { v }).collect())
}

/// `g` applied to the PSD-clamped spectrum of `h`.
pub(crate) fn map_psd(h: &ComplexMatrix, g: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    let values = clamp_psd(&eig)?;
    let mapped = HermitianEig {
        values: values.into_iter().map(g).collect(),
        vectors: eig.vectors,
    };
    Ok(mapped.reconstruct())
}

/// Principal square root of a PSD matrix; eigenvalues in
/// `[-1e-10 ||H||_2, 0)` are clamped to zero, anything lower is an error.
pub fn sqrt_psd(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    let values = clamp_psd(&eig)?;
    let clamped = HermitianEig {
        values: values.iter().map(|v| v.sqrt()).collect(),
        vectors: eig.vectors,
    };
    Ok(clamped.reconstruct())
}

/// `f(H)` through the spectral decomposition.
///
/// Functions whose domain starts at 0 see PSD-clamped eigenvalues, so tiny
/// negative rounding noise in a PSD input is not a domain violation.
pub fn apply_fn(h: &ComplexMatrix, f: &ScalarFunction) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    apply_fn_eig(&eig, f)
}

pub(crate) fn apply_fn_eig(eig: &HermitianEig, f: &ScalarFunction) -> Result<ComplexMatrix> {
    let (lo, _) = f.domain();
    let values = if lo >= 0.0 {
        clamp_psd(eig)?
    } else {
        eig.values.clone()
    };
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !values.is_empty() {
        f.check_domain(min, max)?;
    }
    let mapped = HermitianEig {
        values: values.iter().map(|&v| f.eval(v)).collect(),
        vectors: eig.vectors.clone(),
    };
    Ok(mapped.reconstruct())
}

/// `f(sqrt H)` for PSD `H`; e.g. `psi(|A|)` computed from `|A|^2`.
pub fn apply_fn_sqrt(h: &ComplexMatrix, f: &ScalarFunction) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    let values = clamp_psd(&eig)?;
    let max = values.first().copied().unwrap_or(0.0).sqrt();
    f.check_domain(0.0, max)?;
    let mapped = HermitianEig {
        values: values.iter().map(|&v| f.eval_sqrt(v)).collect(),
        vectors: eig.vectors,
    };
    Ok(mapped.reconstruct())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoewnerCheck {
    /// `lambda_min(X - Y)`.
    pub margin: f64,
    pub holds: bool,
}

/// `X >= Y` in the Loewner order, up to `tol`.
pub fn loewner_geq(x: &ComplexMatrix, y: &ComplexMatrix, tol: f64) -> Result<LoewnerCheck> {
    if x.shape() != y.shape() {
        return Err(Error::Dimension(format!(
            "Loewner comparison of {:?} and {:?}",
            x.shape(),
            y.shape()
        )));
    }
    let diff = (x - y).hermitian_part();
    let margin = herm_eig(&diff)?.min();
    Ok(LoewnerCheck {
        margin,
        holds: margin >= -tol,
    })
}

#[derive(Clone, Debug)]
pub struct Dominance {
    /// Unitary `U` with `P <= U Q U*`.
    pub unitary: ComplexMatrix,
    /// `min_j lambda_j(Q) - lambda_j(P)`, the smallest eigenvalue of `U Q U* - P`.
    pub margin: f64,
}

/// Given `lambda_j(P) <= lambda_j(Q)` for every `j`, returns the unitary that
/// sends the `j`-th eigenvector of `Q` to the `j`-th eigenvector of `P`.
///
/// Then `U Q U*` commutes with `P` and `U Q U* - P` has eigenvalues
/// `lambda_j(Q) - lambda_j(P)`. `tol` is an absolute slack on each index.
pub fn dominance_conjugation(p: &ComplexMatrix, q: &ComplexMatrix, tol: f64) -> Result<Dominance> {
    if p.shape() != q.shape() || !p.is_square() {
        return Err(Error::Dimension(format!(
            "dominance conjugation of {:?} and {:?}",
            p.shape(),
            q.shape()
        )));
    }
    let ep = herm_eig(p)?;
    let eq = herm_eig(q)?;
    let mut margin = f64::INFINITY;
    for (j, (lp, lq)) in ep.values.iter().zip(&eq.values).enumerate() {
        if *lp > lq + tol {
            return Err(Error::DominanceViolated {
                index: j,
                lhs: *lp,
                rhs: *lq,
            });
        }
        margin = margin.min(lq - lp);
    }
    if ep.dim() == 0 {
        margin = 0.0;
    }
    Ok(Dominance {
        unitary: &ep.vectors * &eq.vectors.adjoint(),
        margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_matrix, random_psd, random_unitary, rng};

    #[test]
    fn sqrt_examples() {
        let r = sqrt_psd(&ComplexMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!((&r - &ComplexMatrix::from_real_diag(&[2.0, 3.0])).frobenius() < 1e-15);
        let m = ComplexMatrix::from_real(2, 2, &[2.0; 4]).unwrap();
        let r = sqrt_psd(&m).unwrap();
        assert!((&r - &ComplexMatrix::from_real(2, 2, &[1.0; 4]).unwrap()).frobenius() < 1e-14);
        assert_eq!(sqrt_psd(&ComplexMatrix::zeros(2, 2)).unwrap(), ComplexMatrix::zeros(2, 2));
        let indefinite = ComplexMatrix::from_real_diag(&[1.0, -1e-3]);
        assert!(matches!(sqrt_psd(&indefinite), Err(Error::Indefinite { .. })));
        let noisy = ComplexMatrix::from_real_diag(&[1.0, -1e-14]);
        assert!(sqrt_psd(&noisy).is_ok());
    }

    #[test]
    fn apply_fn_examples() {
        let mut r = rng(2);
        let h = random_hermitian(&mut r, 5);
        let id = apply_fn(&h, &ScalarFunction::Affine { a: 0.0, b: 1.0 }).unwrap();
        assert!((&id - &h).frobenius() < 1e-13);
        let d = apply_fn(&ComplexMatrix::from_real_diag(&[4.0, 1.0]), &ScalarFunction::power(0.5)).unwrap();
        assert!((&d - &ComplexMatrix::from_real_diag(&[2.0, 1.0])).frobenius() < 1e-15);
        assert!(matches!(
            apply_fn(&ComplexMatrix::from_real_diag(&[1.0, -1.0]), &ScalarFunction::power(0.5)),
            Err(Error::Indefinite { .. })
        ));
    }

    #[test]
    fn apply_fn_is_unitarily_equivariant() {
        let mut r = rng(9);
        let f = ScalarFunction::power(1.5);
        for _ in 0..20 {
            let h = random_psd(&mut r, 6);
            let u = random_unitary(&mut r, 6);
            let lhs = apply_fn(&ComplexMatrix::congruence(&u, &h), &f).unwrap();
            let rhs = ComplexMatrix::congruence(&u, &apply_fn(&h, &f).unwrap());
            assert!((&lhs - &rhs).frobenius() < 1e-11 * (1.0 + rhs.frobenius()));
        }
    }

    #[test]
    fn loewner_examples() {
        let x = ComplexMatrix::from_real_diag(&[2.0, 2.0]);
        let c = loewner_geq(&x, &x, 0.0).unwrap();
        assert!(c.holds && c.margin == 0.0);
        let c = loewner_geq(&x, &ComplexMatrix::from_real_diag(&[1.0, 3.0]), 1e-12).unwrap();
        assert!(!c.holds && (c.margin + 1.0).abs() < 1e-15);
        assert!(loewner_geq(&x, &ComplexMatrix::zeros(3, 3), 0.0).is_err());
    }

    #[test]
    fn dominance_examples() {
        let mut r = rng(4);
        let q = random_psd(&mut r, 4);
        let d = dominance_conjugation(&ComplexMatrix::zeros(4, 4), &q, 0.0).unwrap();
        assert!((d.margin - herm_eig(&q).unwrap().min()).abs() < 1e-14);

        // P = diag(1, 0) against a rotated diag(2, 0).
        let u = random_unitary(&mut r, 2);
        let q = ComplexMatrix::congruence(&u, &ComplexMatrix::from_real_diag(&[2.0, 0.0]));
        let p = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let d = dominance_conjugation(&p, &q, 1e-14).unwrap();
        assert!(d.margin.abs() < 1e-14);
        let lifted = ComplexMatrix::congruence(&d.unitary, &q);
        assert!(loewner_geq(&lifted, &p, 1e-14).unwrap().holds);

        assert!(matches!(
            dominance_conjugation(&ComplexMatrix::from_real_diag(&[3.0, 0.0]), &ComplexMatrix::from_real_diag(&[2.0, 2.0]), 0.0),
            Err(Error::DominanceViolated { index: 0, .. })
        ));
    }

    #[test]
    fn fan_hoffman_dominance_always_succeeds() {
        let mut r = rng(12);
        for _ in 0..50 {
            let a = random_matrix(&mut r, 5, 5);
            let w = random_unitary(&mut r, 5);
            let re = (&w.adjoint() * &a).hermitian_part();
            let d = dominance_conjugation(&re, &abs_value(&a).unwrap(), 1e-12).unwrap();
            assert!(d.unitary.isometry_defect() < 1e-12);
            let lifted = ComplexMatrix::congruence(&d.unitary, &abs_value(&a).unwrap());
            assert!(loewner_geq(&lifted, &re, 1e-11).unwrap().holds);
        }
    }
}
