//! Riemannian feasibility search for `|A|^2 = sum U_k |A_k|^2 U_k^*` on
//! arbitrary tilings, and scans of the singular value inequality it would
//! imply. Results are numerical evidence only: a large residual means
//! "not found within budget", never "infeasible".

mod manifest;
mod scan;

pub use manifest::{run_manifest, run_manifest_with, Manifest, ManifestLine};
pub use scan::{adversarial_descent, necessary_condition_scan, AdversarialResult, CounterexampleCandidate, ScanConfig, ScanReport};

use serde::{Deserialize, Serialize};

use crate::linalg::{map_psd, ComplexMatrix};
use crate::partition::PartitionedMatrix;
use crate::pythagoras::decompose_auto;
use crate::random::{random_isometry, rng_stream};
use crate::{Error, Result};

/// Descent direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    /// Negative Riemannian gradient with Barzilai-Borwein trial steps.
    Gradient,
    /// `-J^* (J J^* + mu I)^{-1} R` with `mu` proportional to `||R||_F`,
    /// tried at unit step first.
    LevenbergMarquardt,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct SearchConfig {
    pub method: SearchMethod,
    /// Iterations per restart.
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// First trial step, divided by `4 ||M||_F max_k ||G_k||_2`.
    pub step: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub backtrack: f64,
    pub max_backtracks: usize,
    /// Stop once the residual is at most `tol * (1 + ||A||_F^2)`.
    pub tol: f64,
    /// Start restart 0 from the constructive certificate when one exists.
    pub warm_start: bool,
    /// Re-apply the polar retraction every this many iterations.
    pub reorthonormalize: usize,
    pub record_trace: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            method: SearchMethod::LevenbergMarquardt,
            iterations: 500,
            restarts: 8,
            seed: 0,
            step: 1.0,
            armijo: 1e-4,
            backtrack: 0.5,
            max_backtracks: 60,
            tol: 1e-10,
            warm_start: false,
            reorthonormalize: 100,
            record_trace: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchResult {
    /// `|| |A|^2 - sum U_k |A_k|^2 U_k^* ||_F` at the returned point.
    pub best_residual: f64,
    pub relative_residual: f64,
    pub converged: bool,
    pub status: String,
    pub seed: u64,
    pub restarts: usize,
    pub best_restart: usize,
    /// Iterations of the returned restart.
    pub iterations: usize,
    pub total_iterations: usize,
    pub point: Vec<ComplexMatrix>,
    pub isometry_defects: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective_trace: Option<Vec<f64>>,
}

/// `|A|^2` and the block Gram matrices `|A_k|^2`.
#[derive(Clone, Debug)]
pub struct Objective {
    target: ComplexMatrix,
    grams: Vec<ComplexMatrix>,
}

fn inner(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.as_slice().iter().zip(y.as_slice()).map(|(p, q)| (p.conj() * q).re).sum::<f64>())
        .sum()
}

impl Objective {
    pub fn new(pm: &PartitionedMatrix) -> Self {
        Self {
            target: pm.abs_sq(),
            grams: pm.blocks().iter().map(ComplexMatrix::gram).collect(),
        }
    }

    fn residual_matrix(&self, point: &[ComplexMatrix]) -> ComplexMatrix {
        let mut r = -&self.target;
        for (u, g) in point.iter().zip(&self.grams) {
            r = &r + &ComplexMatrix::congruence(u, g);
        }
        r
    }

    /// `|| sum U_k G_k U_k^* - M ||_F^2`.
    pub fn value(&self, point: &[ComplexMatrix]) -> f64 {
        self.residual_matrix(point).frobenius_sq()
    }

    /// `4 R U_k G_k` for the real inner product `Re tr(X^* Y)`.
    pub fn euclidean_gradient(&self, point: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
        let r = self.residual_matrix(point);
        point.iter().zip(&self.grams).map(|(u, g)| (&(&r * u) * g).scale(4.0)).collect()
    }

    /// `J xi = sum xi_k G_k U_k^* + U_k G_k xi_k^*`, the derivative of the residual.
    fn jacobian(&self, point: &[ComplexMatrix], xi: &[ComplexMatrix]) -> ComplexMatrix {
        let n = self.target.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for ((u, g), x) in point.iter().zip(&self.grams).zip(xi) {
            let t = &(x * g) * &u.adjoint();
            out = &(&out + &t) + &t.adjoint();
        }
        out
    }

    /// Adjoint of [`Self::jacobian`] onto the tangent spaces.
    fn jacobian_adjoint(&self, point: &[ComplexMatrix], h: &ComplexMatrix) -> Vec<ComplexMatrix> {
        point
            .iter()
            .zip(&self.grams)
            .map(|(u, g)| project(u, &(&(h * u) * g).scale(2.0)))
            .collect()
    }

    /// Regularised Gauss-Newton direction.
    fn lm_direction(&self, point: &[ComplexMatrix], mu: f64) -> Result<Vec<ComplexMatrix>> {
        let r = self.residual_matrix(point);
        let n = r.rows();
        let basis = hermitian_basis(n);
        let dim = basis.len();
        let images: Vec<Vec<f64>> = basis
            .iter()
            .map(|b| hermitian_coords(&self.jacobian(point, &self.jacobian_adjoint(point, b))))
            .collect();
        let a = ComplexMatrix::from_fn(dim, dim, |i, j| {
            let v = 0.5 * (images[j][i] + images[i][j]);
            crate::linalg::C64::new(v + if i == j { mu } else { 0.0 }, 0.0)
        });
        let eig = crate::linalg::herm_eig(&a)?;
        let rhs = hermitian_coords(&r);
        // y = -(A + mu)^{-1} r
        let mut y = vec![0.0; dim];
        for (k, &lam) in eig.values.iter().enumerate() {
            if lam <= 0.0 {
                continue;
            }
            let v = eig.vectors.col(k);
            let c: f64 = v.iter().zip(&rhs).map(|(z, x)| z.re * x).sum::<f64>() / lam;
            for (yi, z) in y.iter_mut().zip(&v) {
                *yi -= c * z.re;
            }
        }
        let mut h = ComplexMatrix::zeros(n, n);
        for (b, c) in basis.iter().zip(&y) {
            h = &h + &b.scale(*c);
        }
        Ok(self.jacobian_adjoint(point, &h))
    }

    /// Euclidean gradient projected to the tangent spaces `{X : U^* X + X^* U = 0}`.
    pub fn riemannian_gradient(&self, point: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
        self.euclidean_gradient(point)
            .into_iter()
            .zip(point)
            .map(|(e, u)| project(u, &e))
            .collect()
    }
}

/// Orthonormal basis of the Hermitian `n x n` matrices for `Re tr(X^* Y)`.
fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    use crate::linalg::C64;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(ComplexMatrix::from_fn(n, n, |a, b| C64::new(if a == i && b == i { 1.0 } else { 0.0 }, 0.0)));
        for j in i + 1..n {
            out.push(ComplexMatrix::from_fn(n, n, |a, b| {
                if (a, b) == (i, j) || (a, b) == (j, i) {
                    C64::new(s, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }));
            out.push(ComplexMatrix::from_fn(n, n, |a, b| {
                if (a, b) == (i, j) {
                    C64::new(0.0, s)
                } else if (a, b) == (j, i) {
                    C64::new(0.0, -s)
                } else {
                    C64::new(0.0, 0.0)
                }
            }));
        }
    }
    out
}

fn hermitian_coords(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.rows();
    let s = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(h[(i, i)].re);
        for j in i + 1..n {
            let z = 0.5 * (h[(i, j)] + h[(j, i)].conj());
            out.push(s * z.re);
            out.push(s * z.im);
        }
    }
    out
}

fn project(u: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let sym = (&u.adjoint() * x).hermitian_part();
    x - &(u * &sym)
}

/// Closest isometry, `V (V^* V)^{-1/2}`.
pub fn retract(v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let inv_sqrt = map_psd(&v.gram(), |x| if x > 0.0 { 1.0 / x.sqrt() } else { 0.0 })?;
    Ok(v * &inv_sqrt)
}

/// Directional derivative of the objective along `dir` from the analytic
/// gradient and from central differences with step `h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GradientCheck {
    pub analytic: f64,
    pub numeric: f64,
    pub relative_error: f64,
}

pub fn gradient_check(pm: &PartitionedMatrix, point: &[ComplexMatrix], dir: &[ComplexMatrix], h: f64) -> GradientCheck {
    let obj = Objective::new(pm);
    let analytic = inner(&obj.euclidean_gradient(point), dir);
    let shifted = |s: f64| -> Vec<ComplexMatrix> { point.iter().zip(dir).map(|(u, d)| u + &d.scale(s)).collect() };
    let numeric = (obj.value(&shifted(h)) - obj.value(&shifted(-h))) / (2.0 * h);
    let denom = analytic.abs().max(numeric.abs()).max(f64::MIN_POSITIVE);
    GradientCheck {
        analytic,
        numeric,
        relative_error: (analytic - numeric).abs() / denom,
    }
}

/// Random isometries `d' x m_k`, one per block.
pub fn random_point<R: rand::Rng + ?Sized>(pm: &PartitionedMatrix, r: &mut R) -> Vec<ComplexMatrix> {
    let dp = pm.matrix().cols();
    pm.partition().blocks().iter().map(|b| random_isometry(r, dp, b.m())).collect()
}

struct Outcome {
    value: f64,
    iterations: usize,
    point: Vec<ComplexMatrix>,
    trace: Vec<f64>,
}

fn descend(obj: &Objective, mut point: Vec<ComplexMatrix>, cfg: &SearchConfig, target_sq: f64) -> Result<Outcome> {
    let mut value = obj.value(&point);
    let mut trace = if cfg.record_trace { vec![value] } else { Vec::new() };
    let mut grad = obj.riemannian_gradient(&point);
    let gmax = obj.grams.iter().map(|g| g.frobenius()).fold(0.0, f64::max);
    let mut t = cfg.step / (4.0 * (1.0 + obj.target.frobenius()) * (gmax + f64::MIN_POSITIVE));
    let mut iterations = 0;
    let mut damping = 1.0;
    while iterations < cfg.iterations && value > target_sq {
        let gsq = inner(&grad, &grad);
        if gsq <= f64::MIN_POSITIVE {
            break;
        }
        let mut dir: Vec<ComplexMatrix> = grad.iter().map(|g| -g).collect();
        if cfg.method == SearchMethod::LevenbergMarquardt {
            let mu = damping * value.sqrt() * (1.0 + gmax);
            let lm = obj.lm_direction(&point, mu)?;
            // keep it only if it is a descent direction
            if inner(&lm, &grad) < 0.0 {
                dir = lm;
                t = 1.0;
            }
        }
        let slope = inner(&grad, &dir);
        let mut accepted = None;
        let mut trial = t;
        for _ in 0..cfg.max_backtracks {
            let cand = point
                .iter()
                .zip(&dir)
                .map(|(u, g)| retract(&(u + &g.scale(trial))))
                .collect::<Result<Vec<_>>>()?;
            let v = obj.value(&cand);
            if v <= value + cfg.armijo * trial * slope {
                accepted = Some((cand, v));
                break;
            }
            trial *= cfg.backtrack;
        }
        let Some((mut cand, v)) = accepted else { break };
        iterations += 1;
        damping = if trial == 1.0 { (damping * 0.25).max(1e-8) } else { (damping * 4.0).min(1e8) };
        if cfg.reorthonormalize > 0 && iterations % cfg.reorthonormalize == 0 {
            cand = cand.iter().map(retract).collect::<Result<Vec<_>>>()?;
        }
        let new_grad = obj.riemannian_gradient(&cand);
        // Barzilai-Borwein guess for the next trial step
        let s: Vec<ComplexMatrix> = cand.iter().zip(&point).map(|(a, b)| a - b).collect();
        let y: Vec<ComplexMatrix> = new_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = inner(&s, &y).abs();
        t = if sy > 0.0 { (inner(&s, &s) / sy).clamp(1e-12, 1e12) } else { trial / cfg.backtrack };
        point = cand;
        grad = new_grad;
        value = v;
        if cfg.record_trace {
            trace.push(value);
        }
    }
    Ok(Outcome {
        value,
        iterations,
        point,
        trace,
    })
}

const RESTART_BATCH: usize = 4;

/// Descent on the product of Stiefel manifolds with polar retraction,
/// Armijo backtracking and seeded restarts. Restarts run in batches of four
/// and stop after the first batch holding a converged one. Restart `k` draws
/// from stream `k` of `config.seed`, so the result does not depend on the
/// thread count; the first converged restart (by index) wins, otherwise the
/// smallest residual.
pub fn feasibility_search(pm: &PartitionedMatrix, cfg: &SearchConfig) -> Result<SearchResult> {
    if cfg.restarts == 0 {
        return Err(Error::Argument("search needs at least one restart".into()));
    }
    let obj = Objective::new(pm);
    let scale = 1.0 + pm.matrix().frobenius_sq();
    let target = cfg.tol * scale;
    let warm = if cfg.warm_start {
        decompose_auto(pm).ok().map(|c| c.isometries)
    } else {
        None
    };
    let run = |k: usize| -> Result<Outcome> {
        let start = match (&warm, k) {
            (Some(w), 0) => w.clone(),
            _ => random_point(pm, &mut rng_stream(cfg.seed, k as u64)),
        };
        descend(&obj, start, cfg, target * target)
    };
    // Fixed-size batches keep the output independent of the thread count.
    let mut outcomes: Vec<Outcome> = Vec::with_capacity(cfg.restarts);
    for start in (0..cfg.restarts).step_by(RESTART_BATCH) {
        let batch = start..(start + RESTART_BATCH).min(cfg.restarts);
        #[cfg(feature = "parallel")]
        let done: Vec<Outcome> = {
            use rayon::prelude::*;
            batch.into_par_iter().map(run).collect::<Result<_>>()?
        };
        #[cfg(not(feature = "parallel"))]
        let done: Vec<Outcome> = batch.map(run).collect::<Result<_>>()?;
        outcomes.extend(done);
        if outcomes.iter().any(|o| o.value.sqrt() <= target) {
            break;
        }
    }

    let total_iterations = outcomes.iter().map(|o| o.iterations).sum();
    let best_restart = outcomes
        .iter()
        .position(|o| o.value.sqrt() <= target)
        .unwrap_or_else(|| {
            (0..outcomes.len())
                .min_by(|&a, &b| outcomes[a].value.total_cmp(&outcomes[b].value))
                .unwrap_or(0)
        });
    let best = outcomes.into_iter().nth(best_restart).expect("at least one restart");
    let residual = best.value.sqrt();
    let converged = residual <= target;
    Ok(SearchResult {
        best_residual: residual,
        relative_residual: residual / scale,
        converged,
        status: if converged { "found" } else { "not found within budget" }.into(),
        seed: cfg.seed,
        restarts: cfg.restarts,
        best_restart,
        iterations: best.iterations,
        total_iterations,
        isometry_defects: best.point.iter().map(ComplexMatrix::isometry_defect).collect(),
        point: best.point,
        objective_trace: cfg.record_trace.then_some(best.trace),
    })
}
