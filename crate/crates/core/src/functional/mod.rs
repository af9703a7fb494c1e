//! Functional-calculus inequalities with explicit witnesses.
//!
//! Every operation returns a [`FunctionalCertificate`]: the witness
//! isometries and the smallest eigenvalue of the asserted Loewner
//! difference, recomputed from the inputs.

mod corollaries;
mod split;

pub use corollaries::{
    cor_column_bound, cor_four2, cor_row_bound, power_average, schatten_power_traces, sharp_constant_check,
    sharp_constant_check_scaled,
};
pub use split::{two_term_convex_split, SplitOptions, SplitStrategy, TwoTermSplit};

use serde::{Deserialize, Serialize};

use crate::linalg::{
    abs_value, apply_fn_sqrt, dominance_conjugation, herm_eig, map_psd, polar_isometry, sqrt_psd, ComplexMatrix,
};
use crate::partition::PartitionedMatrix;
use crate::pythagoras::decompose_auto;
use crate::scalar_fn::{Monotone, ScalarFunction};
use crate::{tol, Error, Result};

/// Orientation of `constant * lhs  ?  sum_k W_k term_k W_k^*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Geq,
    Leq,
}

impl Direction {
    pub fn symbol(self) -> &'static str {
        match self {
            Direction::Geq => ">=",
            Direction::Leq => "<=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    Verified,
    LimitCase,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub strategy: String,
    pub iterations: usize,
    pub restarts: usize,
}

impl SearchTrace {
    fn direct() -> Self {
        Self {
            strategy: "direct".into(),
            iterations: 0,
            restarts: 0,
        }
    }
}

/// Singular `|A|` with `phi(0) > 0`: the certificate is for the chord
/// function and the original statement is only checked numerically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LimitCase {
    pub r: f64,
    pub direct_margin: f64,
    pub direct_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FunctionalCertificate {
    pub name: String,
    pub route: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<ScalarFunction>,
    pub direction: Direction,
    pub constant: f64,
    pub block_names: Vec<String>,
    pub witnesses: Vec<ComplexMatrix>,
    pub witness_defects: Vec<f64>,
    /// Smallest eigenvalue of the asserted nonnegative difference, divided by `scale`.
    pub loewner_margin: f64,
    pub scale: f64,
    pub status: CertificateStatus,
    pub search_trace: SearchTrace,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_case: Option<LimitCase>,
}

impl FunctionalCertificate {
    /// `sum_k W_k term_k W_k^*`.
    pub fn witness_sum(&self, terms: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        witness_sum(&self.witnesses, terms)
    }
}

fn witness_sum(witnesses: &[ComplexMatrix], terms: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let n = witnesses.first().map_or(0, |w| w.rows());
    let mut acc = ComplexMatrix::zeros(n, n);
    for (w, t) in witnesses.iter().zip(terms) {
        if w.cols() != t.rows() || w.rows() != n {
            return Err(Error::Dimension(format!("witness {:?} against term {:?}", w.shape(), t.shape())));
        }
        acc = &acc + &ComplexMatrix::congruence(w, t);
    }
    Ok(acc)
}

fn spectral_radius(h: &ComplexMatrix) -> Result<f64> {
    let e = herm_eig(h)?;
    Ok(e.max().abs().max(e.min().abs()))
}

/// `1 + max(||lhs||, sum ||term_k||)`.
fn margin_scale(lhs: &ComplexMatrix, terms: &[ComplexMatrix]) -> Result<f64> {
    let mut sum = 0.0;
    for t in terms {
        sum += spectral_radius(t)?;
    }
    Ok(1.0 + spectral_radius(lhs)?.max(sum))
}

/// Signed margin of `constant * lhs  dir  sum W_k term_k W_k^*`.
fn loewner_margin(
    lhs: &ComplexMatrix,
    constant: f64,
    dir: Direction,
    witnesses: &[ComplexMatrix],
    terms: &[ComplexMatrix],
) -> Result<(f64, f64)> {
    let rhs = witness_sum(witnesses, terms)?;
    let scaled = lhs.scale(constant);
    let diff = match dir {
        Direction::Geq => &scaled - &rhs,
        Direction::Leq => &rhs - &scaled,
    };
    let scale = margin_scale(&scaled, terms)?;
    Ok((herm_eig(&diff.hermitian_part())?.min() / scale, scale))
}

pub(crate) struct Statement<'a> {
    pub name: &'a str,
    pub route: String,
    pub function: Option<ScalarFunction>,
    pub direction: Direction,
    pub constant: f64,
    pub block_names: Vec<String>,
    pub lhs: ComplexMatrix,
    pub terms: Vec<ComplexMatrix>,
    pub search_trace: SearchTrace,
}

/// Recomputes the margin and witness defects; errors if either is out of tolerance.
pub(crate) fn certify(st: Statement<'_>, witnesses: Vec<ComplexMatrix>) -> Result<FunctionalCertificate> {
    let (margin, scale) = loewner_margin(&st.lhs, st.constant, st.direction, &witnesses, &st.terms)?;
    if margin < -tol::FUNCTIONAL {
        return Err(Error::Postcondition {
            what: "functional Loewner margin",
            residual: -margin,
            allowed: tol::FUNCTIONAL,
        });
    }
    let witness_defects: Vec<f64> = witnesses.iter().map(ComplexMatrix::isometry_defect).collect();
    for (w, &d) in witnesses.iter().zip(&witness_defects) {
        if d > tol::unitary(w.rows()) {
            return Err(Error::Postcondition {
                what: "witness isometry defect",
                residual: d,
                allowed: tol::unitary(w.rows()),
            });
        }
    }
    Ok(FunctionalCertificate {
        name: st.name.to_string(),
        route: st.route,
        function: st.function,
        direction: st.direction,
        constant: st.constant,
        block_names: st.block_names,
        witnesses,
        witness_defects,
        loewner_margin: margin,
        scale,
        status: CertificateStatus::Verified,
        search_trace: st.search_trace,
        limit_case: None,
    })
}

fn block_names(pm: &PartitionedMatrix) -> Vec<String> {
    pm.partition().blocks().iter().map(|b| b.name.clone()).collect()
}

/// Embeds `m` as the leading block of an `n x n` zero matrix.
fn pad(m: &ComplexMatrix, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i < m.rows() && j < m.cols() {
            m[(i, j)]
        } else {
            crate::linalg::C64::new(0.0, 0.0)
        }
    })
}

/// Witnesses for `g(sum F_k F_k^*)  dir  sum W_k g(F_k^* F_k) W_k^*`, where `g`
/// is monotone, convex for `Geq` and concave for `Leq`, with `g(0) = 0`.
///
/// With `X = [F_1 ... F_r]` and `H = X^* X`, the polar factor `Q` of `X^*`
/// gives `g(X X^*) = Q^* g(H) Q`. Writing `Z = g(H)^{1/2}` and `Z_k` for its
/// `k`-th block column, `g(H) = sum Z_k Z_k^*` and `Z_k^* Z_k` is the `k`-th
/// diagonal block of `g(H)`, which eigenvalue-dominates `g(F_k^* F_k)` (or is
/// dominated by it). Each comparison is realised by a unitary.
pub(crate) fn jensen_split(
    factors: &[ComplexMatrix],
    g: &dyn Fn(f64) -> f64,
    dir: Direction,
) -> Result<Vec<ComplexMatrix>> {
    let n = factors.first().map_or(0, |f| f.rows());
    let refs: Vec<&ComplexMatrix> = factors.iter().collect();
    let x = ComplexMatrix::hstack(&refs)?;
    if x.cols() < n {
        return Err(Error::Dimension(format!("factors have {} columns in total, need at least {n}", x.cols())));
    }
    let q = polar_isometry(&x.adjoint())?;
    let h = x.gram();
    let gh = map_psd(&h, g)?;
    let z = sqrt_psd(&gh)?;
    let slack = tol::FUNCTIONAL * (1.0 + spectral_radius(&gh)?);
    let mut out = Vec::with_capacity(factors.len());
    let mut start = 0;
    for f in factors {
        let m = f.cols();
        let zk = z.col_range(start, start + m);
        start += m;
        let pk = polar_isometry(&zk)?;
        let ck = zk.gram();
        let dk = map_psd(&f.gram(), g)?;
        let witness = match dir {
            Direction::Geq => {
                // V^* D V <= C
                let v = dominance_conjugation(&dk, &ck, slack)?.unitary.adjoint();
                polar_isometry(&(&(&q.adjoint() * &pk) * &v))?
            }
            Direction::Leq => {
                // C <= V D V^*, then F D F^* <= W D W^* for the contraction F
                let v = dominance_conjugation(&ck, &dk, slack)?.unitary;
                let fk = &(&q.adjoint() * &pk) * &v;
                let fdf = ComplexMatrix::congruence(&fk, &dk);
                let u = dominance_conjugation(&fdf, &pad(&dk, n), slack)?.unitary;
                u.col_range(0, m)
            }
        };
        out.push(witness);
    }
    Ok(out)
}

fn require_hypothesis(pm: &PartitionedMatrix) -> Result<()> {
    if pm.partition().compatibility().is_compatible() || pm.len() == 4 {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!(
            "needs a row or column compatible partition or four blocks, got {} incompatible blocks",
            pm.len()
        )))
    }
}

/// `F_k = U_k |A_k|`, so that `sum F_k F_k^* = |A|^2` and `F_k^* F_k = |A_k|^2`.
fn pythagorean_factors(pm: &PartitionedMatrix) -> Result<(Vec<ComplexMatrix>, String)> {
    let cert = decompose_auto(pm)?;
    let factors = cert
        .isometries
        .iter()
        .zip(pm.blocks())
        .map(|(u, a)| Ok(u * &abs_value(&a)?))
        .collect::<Result<Vec<_>>>()?;
    Ok((factors, cert.route))
}

fn block_terms(pm: &PartitionedMatrix, f: &ScalarFunction) -> Result<Vec<ComplexMatrix>> {
    pm.blocks().iter().map(|a| apply_fn_sqrt(&a.gram(), f)).collect()
}

fn check_increasing(f: &ScalarFunction) -> Result<()> {
    f.validate()?;
    match f.monotone() {
        Monotone::Increasing | Monotone::Constant => Ok(()),
        m => Err(Error::Hypothesis(format!("{f} must be nondecreasing, declared {m:?}"))),
    }
}

/// `|A| <= sum_k U_k |A_k| U_k^*` for any tiling.
///
/// With the polar decomposition `A = W |A|`, `|A| = sum Re(W^* A~_k)` over
/// the zero-padded blocks, and `lambda_j(Re Z) <= mu_j(Z) <= mu_j(A_k)`.
pub fn thompson_sum(pm: &PartitionedMatrix) -> Result<FunctionalCertificate> {
    let (d, dp) = pm.matrix().shape();
    // wide hosts get zero rows so the polar factor is an isometry
    let work = if d >= dp { pm.clone() } else { pm.pad_to_square() };
    let t = work.matrix();
    let w = polar_isometry(t)?;
    let abs = pm.abs_sq();
    let lhs = sqrt_psd(&abs)?;
    let slack = tol::FUNCTIONAL * (1.0 + spectral_radius(&lhs)?);
    let mut witnesses = Vec::with_capacity(pm.len());
    let mut terms = Vec::with_capacity(pm.len());
    for k in 0..pm.len() {
        let padded = work.padded_block(k);
        let re = (&w.adjoint() * &padded).hermitian_part();
        let abs_k = abs_value(&padded)?;
        let u = dominance_conjugation(&re, &abs_k, slack)?.unitary;
        let cols = &pm.partition().block(k).cols;
        let rows: Vec<usize> = (0..dp).collect();
        witnesses.push(u.select(&rows, cols));
        terms.push(abs_value(&pm.block(k))?);
    }
    certify(
        Statement {
            name: "thompson-sum",
            route: "polar-real-part".into(),
            function: Some(ScalarFunction::identity()),
            direction: Direction::Leq,
            constant: 1.0,
            block_names: block_names(pm),
            lhs,
            terms,
            search_trace: SearchTrace::direct(),
        },
        witnesses,
    )
}

/// `psi(|A|) >= sum_k V_k psi(|A_k|) V_k^*` for nondecreasing `psi` with
/// `psi(0) = 0` and `t -> psi(sqrt t)` convex.
pub fn th_convex(pm: &PartitionedMatrix, psi: &ScalarFunction) -> Result<FunctionalCertificate> {
    check_increasing(psi)?;
    if !psi.sqrt_shape().is_convex() {
        return Err(Error::Hypothesis(format!("{psi}: psi(sqrt t) must be convex")));
    }
    if psi.at_zero().abs() > 0.0 {
        return Err(Error::Hypothesis(format!("{psi}: psi(0) must be 0")));
    }
    require_hypothesis(pm)?;
    let abs = pm.abs_sq();
    psi.verify_on(0.0, spectral_radius(&abs)?.sqrt())?;
    let (factors, route) = pythagorean_factors(pm)?;
    let witnesses = jensen_split(&factors, &|s| psi.eval_sqrt(s), Direction::Geq)?;
    certify(
        Statement {
            name: "th-convex",
            route: format!("jensen-split/{route}"),
            function: Some(psi.clone()),
            direction: Direction::Geq,
            constant: 1.0,
            block_names: block_names(pm),
            lhs: apply_fn_sqrt(&abs, psi)?,
            terms: block_terms(pm, psi)?,
            search_trace: SearchTrace::direct(),
        },
        witnesses,
    )
}

/// `phi(|A|) <= sum_k U_k phi(|A_k|) U_k^*` for nonnegative `phi` with
/// `t -> phi(sqrt t)` concave.
///
/// When `phi(0) > 0` the certificate goes through the chord function equal
/// to `phi` above `r = lambda_min(|A|)`. If `|A|` is singular, `r` is the
/// smallest positive eigenvalue, the certificate is for the chord function
/// and the statement for `phi` is only checked numerically
/// ([`CertificateStatus::LimitCase`]).
pub fn cor_concave(pm: &PartitionedMatrix, phi: &ScalarFunction) -> Result<FunctionalCertificate> {
    check_increasing(phi)?;
    if !phi.sqrt_shape().is_concave() {
        return Err(Error::Hypothesis(format!("{phi}: phi(sqrt t) must be concave")));
    }
    if phi.at_zero() < 0.0 {
        return Err(Error::Hypothesis(format!("{phi}: phi must be nonnegative")));
    }
    require_hypothesis(pm)?;
    let abs = pm.abs_sq();
    let top = spectral_radius(&abs)?;
    phi.verify_on(0.0, top.sqrt())?;
    let (factors, route) = pythagorean_factors(pm)?;
    let lhs_phi = apply_fn_sqrt(&abs, phi)?;
    let terms_phi = block_terms(pm, phi)?;

    if phi.at_zero() == 0.0 {
        let witnesses = jensen_split(&factors, &|s| phi.eval_sqrt(s), Direction::Leq)?;
        return certify(
            Statement {
                name: "cor-concave",
                route: format!("jensen-split/{route}"),
                function: Some(phi.clone()),
                direction: Direction::Leq,
                constant: 1.0,
                block_names: block_names(pm),
                lhs: lhs_phi,
                terms: terms_phi,
                search_trace: SearchTrace::direct(),
            },
            witnesses,
        );
    }

    let eig = herm_eig(&abs)?;
    let threshold = tol::PSD * (1.0 + top);
    let smallest = eig.min();
    let singular = smallest <= threshold;
    let r = if singular {
        eig.values.iter().copied().filter(|&v| v > threshold).fold(f64::INFINITY, f64::min)
    } else {
        smallest
    };
    let r = if r.is_finite() { r.sqrt() } else { 1.0 };
    let hat = ScalarFunction::chord(phi.clone(), r);
    let witnesses = jensen_split(&factors, &|s| hat.eval_sqrt(s), Direction::Leq)?;
    if singular {
        let mut cert = certify(
            Statement {
                name: "cor-concave",
                route: format!("chord-limit/{route}"),
                function: Some(hat.clone()),
                direction: Direction::Leq,
                constant: 1.0,
                block_names: block_names(pm),
                lhs: apply_fn_sqrt(&abs, &hat)?,
                terms: block_terms(pm, &hat)?,
                search_trace: SearchTrace::direct(),
            },
            witnesses,
        )?;
        let (direct_margin, _) = loewner_margin(&lhs_phi, 1.0, Direction::Leq, &cert.witnesses, &terms_phi)?;
        cert.status = CertificateStatus::LimitCase;
        cert.limit_case = Some(LimitCase {
            r,
            direct_margin,
            direct_holds: direct_margin >= -tol::FUNCTIONAL,
        });
        return Ok(cert);
    }
    // phi(|A|) = chord(|A|) and chord <= phi pointwise, so the witnesses carry over
    certify(
        Statement {
            name: "cor-concave",
            route: format!("chord/{route}"),
            function: Some(phi.clone()),
            direction: Direction::Leq,
            constant: 1.0,
            block_names: block_names(pm),
            lhs: lhs_phi,
            terms: terms_phi,
            search_trace: SearchTrace::direct(),
        },
        witnesses,
    )
}
