use serde_json::json;

use super::{block_names, certify, cor_concave, th_convex, Direction, FunctionalCertificate, SearchTrace, Statement};
use crate::inequalities::InequalityReport;
use crate::linalg::{abs_value, apply_fn_sqrt, dominance_conjugation, herm_eig, map_psd, singular_values, ComplexMatrix};
use crate::partition::{grid, PartitionedMatrix};
use crate::pythagoras::decompose_auto;
use crate::scalar_fn::ScalarFunction;
use crate::{tol, Error, Result};

/// `r^{1-p/2} |A|^p <= sum_k W_k |A_k|^p W_k^*` for `p >= 2`, reversed for
/// `0 < p < 2`, on any partition with a Pythagorean decomposition.
///
/// From `|A|^2 = sum M_k`, a single unitary `L` compares `f(|A|^2 / r)` with
/// the average of the `f(M_k)` for `f(t) = t^{p/2}`; the witnesses are `L U_k`.
pub fn power_average(pm: &PartitionedMatrix, p: f64) -> Result<FunctionalCertificate> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::Argument(format!("exponent must be positive, got {p}")));
    }
    let cert = decompose_auto(pm)?;
    let r = pm.len() as f64;
    let f = |t: f64| t.powf(p / 2.0);
    let abs = pm.abs_sq();
    let n = abs.rows();
    let x = map_psd(&abs.scale(1.0 / r), f)?;
    let mut y = ComplexMatrix::zeros(n, n);
    for (u, a) in cert.isometries.iter().zip(pm.blocks()) {
        let mk = ComplexMatrix::congruence(u, &a.gram());
        y = &y + &map_psd(&mk, f)?.scale(1.0 / r);
    }
    let slack = tol::FUNCTIONAL * (1.0 + herm_eig(&x)?.max().abs());
    let convex = p >= 2.0;
    let dom = if convex {
        dominance_conjugation(&x, &y, slack)
    } else {
        dominance_conjugation(&y, &x, slack)
    };
    let lambda = match dom {
        Ok(d) if convex => d.unitary,
        Ok(d) => d.unitary.adjoint(),
        Err(Error::DominanceViolated { lhs, rhs, .. }) => {
            return Err(Error::SearchFailure {
                iterations: 0,
                restarts: 0,
                best_margin: rhs - lhs,
            })
        }
        Err(e) => return Err(e),
    };
    let witnesses: Vec<ComplexMatrix> = cert.isometries.iter().map(|u| &lambda * u).collect();
    let power = ScalarFunction::power(p);
    let terms = pm
        .blocks()
        .iter()
        .map(|a| apply_fn_sqrt(&a.gram(), &power))
        .collect::<Result<Vec<_>>>()?;
    certify(
        Statement {
            name: "power-average",
            route: format!("single-unitary/{}", cert.route),
            function: Some(power.clone()),
            direction: if convex { Direction::Leq } else { Direction::Geq },
            constant: r.powf(1.0 - p / 2.0),
            block_names: block_names(pm),
            lhs: apply_fn_sqrt(&abs, &power)?,
            terms,
            search_trace: SearchTrace::direct(),
        },
        witnesses,
    )
}

/// [`power_average`] for four blocks: `2^{2-p} |A|^p` against the sum.
pub fn cor_four2(pm: &PartitionedMatrix, p: f64) -> Result<FunctionalCertificate> {
    if pm.len() != 4 {
        return Err(Error::Hypothesis(format!("needs four blocks, got {}", pm.len())));
    }
    let mut cert = power_average(pm, p)?;
    cert.name = "cor-four2".into();
    Ok(cert)
}

/// `sqrt(r) |A| = sum_k |A_k|` for the all-ones `r x r` matrix split into
/// rows, so no constant below `sqrt(r)` works in the Thompson-type bound.
pub fn sharp_constant_check(r: usize) -> Result<InequalityReport> {
    sharp_constant_check_scaled(r, 1.0)
}

/// [`sharp_constant_check`] on `c` times the all-ones matrix.
pub fn sharp_constant_check_scaled(r: usize, c: f64) -> Result<InequalityReport> {
    if r == 0 || !c.is_finite() {
        return Err(Error::Argument(format!("need r >= 1 and finite scale, got r={r}, c={c}")));
    }
    let m = ComplexMatrix::from_real(r, r, &vec![c; r * r])?;
    let pm = PartitionedMatrix::new(m, grid(&vec![1; r], &[r])?)?;
    let constant = (r as f64).sqrt();
    let lhs = abs_value(pm.matrix())?.scale(constant);
    let mut rhs = ComplexMatrix::zeros(r, r);
    let mut block_trace = 0.0;
    for a in pm.blocks() {
        let abs = abs_value(&a)?;
        block_trace += abs.trace().re;
        rhs = &rhs + &abs;
    }
    let diff = (&lhs - &rhs).hermitian_part();
    let eig = herm_eig(&diff)?;
    let host_trace = lhs.trace().re / constant;
    let mut rep = InequalityReport::new("sharp-constant", true, 1.0 + herm_eig(&lhs)?.max(), 1e-12)
        .param("r", json!(r))
        .param("constant", json!(constant))
        .param("traceRatio", json!(if host_trace > 0.0 { block_trace / host_trace } else { constant }))
        .param("residual", json!(diff.frobenius()));
    rep.push("geq", eig.min());
    rep.push("leq", -eig.max());
    Ok(rep.finish(|| json!({ "matrix": pm.matrix() })))
}

/// `|A|^q <= sum_k c_k^q E_k` with `c_k` the column norms and `E_k = u_k u_k^*`
/// rank-one projections given by the witness columns; `0 < q <= 2`.
pub fn cor_column_bound(a: &ComplexMatrix, q: f64) -> Result<FunctionalCertificate> {
    if !(q > 0.0 && q <= 2.0) {
        return Err(Error::Hypothesis(format!("column bound needs 0 < q <= 2, got {q}")));
    }
    let pm = PartitionedMatrix::new(a.clone(), grid(&[a.rows()], &vec![1; a.cols()])?)?;
    let mut cert = cor_concave(&pm, &ScalarFunction::power(q))?;
    cert.name = "cor-column-bound".into();
    Ok(cert)
}

/// `|A|^p >= sum_k r_k^p E_k` with `r_k` the row norms; `p >= 2`.
pub fn cor_row_bound(a: &ComplexMatrix, p: f64) -> Result<FunctionalCertificate> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::Hypothesis(format!("row bound needs p >= 2, got {p}")));
    }
    let pm = PartitionedMatrix::new(a.clone(), grid(&vec![1; a.rows()], &[a.cols()])?)?;
    let mut cert = th_convex(&pm, &ScalarFunction::power(p))?;
    cert.name = "cor-row-bound".into();
    Ok(cert)
}

/// `{Tr |A|^{qs}}^{1/s}` against `sum_k {Tr |A_k|^{qs}}^{1/s}`: at most for
/// `s >= 1, 0 < q <= 2` (margin `upper`), at least for `0 < s <= 1, q >= 2`
/// (margin `lower`).
pub fn schatten_power_traces(pm: &PartitionedMatrix, q: f64, s: f64) -> Result<InequalityReport> {
    if !(q > 0.0 && s > 0.0 && q.is_finite() && s.is_finite()) {
        return Err(Error::Argument(format!("need positive finite q and s, got q={q}, s={s}")));
    }
    let upper = s >= 1.0 && q <= 2.0;
    let lower = s <= 1.0 && q >= 2.0;
    if !upper && !lower {
        return Err(Error::Hypothesis(format!(
            "no trace inequality for q={q}, s={s}: need (s >= 1, q <= 2) or (s <= 1, q >= 2)"
        )));
    }
    let tr = |m: &ComplexMatrix| -> Result<f64> {
        let sv = singular_values(m)?;
        let t: f64 = sv.as_slice().iter().filter(|&&x| x > 0.0).map(|x| x.powf(q * s)).sum();
        Ok(t.powf(1.0 / s))
    };
    let host = tr(pm.matrix())?;
    let sum = pm.blocks().iter().map(tr).sum::<Result<f64>>()?;
    let scale = 1.0 + host.max(sum);
    let mut rep = InequalityReport::new(
        "schatten-power-traces",
        pm.partition().compatibility().is_compatible(),
        scale,
        tol::INEQUALITY,
    )
    .param("q", json!(q))
    .param("s", json!(s));
    if upper {
        rep.push("upper", sum - host);
    }
    if lower {
        rep.push("lower", host - sum);
    }
    Ok(rep.finish(|| json!({ "matrix": pm.matrix(), "partition": pm.partition() })))
}
