//! `g(A + B) >= U g(A) U^* + V g(B) V^*` for monotone convex `g` with `g(0) <= 0`.

use serde::{Deserialize, Serialize};

use super::{jensen_split, Direction, SearchTrace};
use crate::linalg::{apply_fn, dominance_conjugation, herm_eig, loewner_geq, sqrt_psd, ComplexMatrix};
use crate::random::{random_unitary, rng};
use crate::scalar_fn::{Monotone, ScalarFunction};
use crate::{tol, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitStrategy {
    /// Constructive route through the block Gram matrix of `[A^{1/2}, B^{1/2}]`.
    Direct,
    /// Alternating dominance matching with seeded random restarts.
    Search,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitOptions {
    pub strategy: SplitStrategy,
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self {
            strategy: SplitStrategy::Direct,
            iterations: 200,
            restarts: 50,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TwoTermSplit {
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    /// `lambda_min(g(A+B) - U g(A) U^* - V g(B) V^*)`, relative to `1 + ||g(A+B)||`.
    pub margin: f64,
    pub trace: SearchTrace,
}

pub fn two_term_convex_split(
    g: &ScalarFunction,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    opts: &SplitOptions,
) -> Result<TwoTermSplit> {
    g.validate()?;
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::Dimension(format!("two-term split of {:?} and {:?}", a.shape(), b.shape())));
    }
    if !matches!(g.monotone(), Monotone::Increasing | Monotone::Constant) {
        return Err(Error::Hypothesis(format!("{g} must be nondecreasing")));
    }
    let g0 = g.at_zero();
    if g0 > 0.0 {
        return Err(Error::Hypothesis(format!("{g} must satisfy g(0) <= 0")));
    }
    let sum = a + b;
    let top = herm_eig(&sum)?.max().max(0.0);
    if !g.direct_shape_on(0.0, top).is_convex() {
        return Err(Error::Hypothesis(format!("{g} is not convex on [0, {top:.6e}]")));
    }
    let ga = apply_fn(a, g)?;
    let gb = apply_fn(b, g)?;
    let gs = apply_fn(&sum, g)?;
    let scale = 1.0 + herm_eig(&gs)?.max().abs().max(herm_eig(&gs)?.min().abs());
    let check = |u: &ComplexMatrix, v: &ComplexMatrix| -> Result<f64> {
        let rhs = &ComplexMatrix::congruence(u, &ga) + &ComplexMatrix::congruence(v, &gb);
        Ok(loewner_geq(&gs, &rhs, 0.0)?.margin / scale)
    };
    match opts.strategy {
        SplitStrategy::Direct => {
            // g - g(0) vanishes at 0; the constant -g(0) >= 0 only helps
            let factors = [sqrt_psd(a)?, sqrt_psd(b)?];
            let w = jensen_split(&factors, &|t| g.eval(t) - g0, Direction::Geq)?;
            let (u, v) = (w[0].clone(), w[1].clone());
            let margin = check(&u, &v)?;
            if margin < -tol::FUNCTIONAL {
                return Err(Error::Postcondition {
                    what: "two-term convex split",
                    residual: -margin,
                    allowed: tol::FUNCTIONAL,
                });
            }
            Ok(TwoTermSplit {
                u,
                v,
                margin,
                trace: SearchTrace {
                    strategy: "direct".into(),
                    iterations: 0,
                    restarts: 0,
                },
            })
        }
        SplitStrategy::Search => search(&ga, &gb, &gs, a, b, &sum, opts, check),
    }
}

/// Unitary sending the `j`-th eigenvector of `from` to that of `to`.
fn eigvec_match(to: &ComplexMatrix, from: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(&herm_eig(to)?.vectors * &herm_eig(from)?.vectors.adjoint())
}

#[allow(clippy::too_many_arguments)]
fn search(
    ga: &ComplexMatrix,
    gb: &ComplexMatrix,
    gs: &ComplexMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    sum: &ComplexMatrix,
    opts: &SplitOptions,
    check: impl Fn(&ComplexMatrix, &ComplexMatrix) -> Result<f64>,
) -> Result<TwoTermSplit> {
    let n = a.rows();
    let mut r = rng(opts.seed);
    let mut best = f64::NEG_INFINITY;
    let mut iterations = 0;
    for restart in 0..opts.restarts {
        let (mut u, mut v) = if restart == 0 {
            (eigvec_match(sum, a)?, eigvec_match(sum, b)?)
        } else {
            (random_unitary(&mut r, n), random_unitary(&mut r, n))
        };
        for _ in 0..opts.iterations {
            iterations += 1;
            let margin = check(&u, &v)?;
            best = best.max(margin);
            if margin >= -tol::FUNCTIONAL {
                return Ok(TwoTermSplit {
                    u,
                    v,
                    margin,
                    trace: SearchTrace {
                        strategy: "search".into(),
                        iterations,
                        restarts: restart,
                    },
                });
            }
            let rest = gs - &ComplexMatrix::congruence(&v, gb);
            if let Ok(dom) = dominance_conjugation(ga, &rest, 0.0) {
                u = dom.unitary.adjoint();
                continue;
            }
            let rest = gs - &ComplexMatrix::congruence(&u, ga);
            match dominance_conjugation(gb, &rest, 0.0) {
                Ok(dom) => v = dom.unitary.adjoint(),
                Err(_) => break,
            }
        }
    }
    Err(Error::SearchFailure {
        iterations,
        restarts: opts.restarts,
        best_margin: best,
    })
}
