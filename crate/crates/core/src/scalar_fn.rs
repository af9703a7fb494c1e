//! Scalar functions applied through the functional calculus.
//!
//! The inequalities of the functional module are stated in terms of
//! `g(t) = f(sqrt t)`: convexity or concavity of `g`, monotonicity of `f`
//! and the value `f(0)`. Each family records these properties analytically
//! and [`ScalarFunction::verify_on`] spot-checks them on a grid.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ScalarFunction {
    /// `t^p` on `[0, inf)`, with `0^p = 0`.
    Power { p: f64 },
    /// `a + b t`.
    Affine { a: f64, b: f64 },
    /// `base(t)` for `t >= r`; below `r`, `base(r) t^2 / r^2`, i.e. the chord
    /// of `s -> base(sqrt s)` from the origin to `(r^2, base(r))`.
    Chord { base: Box<ScalarFunction>, r: f64 },
    /// Piecewise-linear interpolation of monotone samples; domain `[xs[0], xs[n-1]]`.
    Tabulated { xs: Vec<f64>, ys: Vec<f64> },
    /// `-base(t)`.
    Negated { base: Box<ScalarFunction> },
}

/// Shape of `s -> f(sqrt s)` on `[0, inf)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SqrtShape {
    Linear,
    Convex,
    Concave,
    Neither,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotone {
    Constant,
    Increasing,
    Decreasing,
    Neither,
}

impl SqrtShape {
    pub fn is_convex(self) -> bool {
        matches!(self, SqrtShape::Linear | SqrtShape::Convex)
    }

    pub fn is_concave(self) -> bool {
        matches!(self, SqrtShape::Linear | SqrtShape::Concave)
    }

    fn negate(self) -> Self {
        match self {
            SqrtShape::Convex => SqrtShape::Concave,
            SqrtShape::Concave => SqrtShape::Convex,
            s => s,
        }
    }
}

impl ScalarFunction {
    pub fn power(p: f64) -> Self {
        ScalarFunction::Power { p }
    }

    pub fn affine(a: f64, b: f64) -> Self {
        ScalarFunction::Affine { a, b }
    }

    pub fn chord(base: ScalarFunction, r: f64) -> Self {
        ScalarFunction::Chord {
            base: Box::new(base),
            r,
        }
    }

    pub fn negated(self) -> Self {
        match self {
            ScalarFunction::Negated { base } => *base,
            f => ScalarFunction::Negated { base: Box::new(f) },
        }
    }

    pub fn identity() -> Self {
        ScalarFunction::Power { p: 1.0 }
    }

    /// Checks parameters that make the family well defined.
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| {
            Err(Error::FunctionSpec {
                spec: self.to_string(),
                reason: reason.to_string(),
            })
        };
        match self {
            ScalarFunction::Power { p } if !(p.is_finite() && *p > 0.0) => {
                bad("exponent must be a positive finite number")
            }
            ScalarFunction::Affine { a, b } if !(a.is_finite() && b.is_finite()) => {
                bad("coefficients must be finite")
            }
            ScalarFunction::Chord { base, r } => {
                if !(r.is_finite() && *r > 0.0) {
                    return bad("chord knot r must be positive");
                }
                base.validate()
            }
            ScalarFunction::Tabulated { xs, ys } => {
                if xs.len() < 2 || xs.len() != ys.len() {
                    return bad("table needs at least two (x, y) samples of equal length");
                }
                if xs.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("table abscissae must be strictly increasing");
                }
                if xs[0] < 0.0 || xs.iter().chain(ys).any(|v| !v.is_finite()) {
                    return bad("table values must be finite with nonnegative abscissae");
                }
                Ok(())
            }
            ScalarFunction::Negated { base } => base.validate(),
            _ => Ok(()),
        }
    }

    /// Interval on which the function is defined.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            ScalarFunction::Tabulated { xs, .. } => (xs[0], xs[xs.len() - 1]),
            ScalarFunction::Negated { base } => base.domain(),
            ScalarFunction::Affine { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            _ => (0.0, f64::INFINITY),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ScalarFunction::Power { p } => {
                if t <= 0.0 {
                    0.0
                } else {
                    t.powf(*p)
                }
            }
            ScalarFunction::Affine { a, b } => a + b * t,
            ScalarFunction::Chord { base, r } => {
                if t >= *r {
                    base.eval(t)
                } else {
                    base.eval(*r) * (t / r) * (t / r)
                }
            }
            ScalarFunction::Tabulated { xs, ys } => {
                let i = xs.partition_point(|&x| x <= t).clamp(1, xs.len() - 1);
                let (x0, x1, y0, y1) = (xs[i - 1], xs[i], ys[i - 1], ys[i]);
                y0 + (y1 - y0) * (t - x0) / (x1 - x0)
            }
            ScalarFunction::Negated { base } => -base.eval(t),
        }
    }

    /// `s -> f(sqrt s)`, with negative `s` clamped to 0.
    pub fn eval_sqrt(&self, s: f64) -> f64 {
        self.eval(s.max(0.0).sqrt())
    }

    pub fn at_zero(&self) -> f64 {
        self.eval(0.0)
    }

    /// Declared shape of `s -> f(sqrt s)`.
    pub fn sqrt_shape(&self) -> SqrtShape {
        match self {
            ScalarFunction::Power { p } => {
                if *p == 2.0 {
                    SqrtShape::Linear
                } else if *p > 2.0 {
                    SqrtShape::Convex
                } else {
                    SqrtShape::Concave
                }
            }
            ScalarFunction::Affine { b, .. } => {
                if *b == 0.0 {
                    SqrtShape::Linear
                } else if *b > 0.0 {
                    SqrtShape::Concave
                } else {
                    SqrtShape::Convex
                }
            }
            ScalarFunction::Chord { base, .. } => {
                // The chord from the origin stays below a concave g only if g(0) >= 0.
                match base.sqrt_shape() {
                    SqrtShape::Concave | SqrtShape::Linear if base.at_zero() >= 0.0 => {
                        SqrtShape::Concave
                    }
                    _ => SqrtShape::Neither,
                }
            }
            ScalarFunction::Tabulated { .. } => {
                let (lo, hi) = self.domain();
                self.sampled_shape(lo, hi)
            }
            ScalarFunction::Negated { base } => base.sqrt_shape().negate(),
        }
    }

    pub fn monotone(&self) -> Monotone {
        match self {
            ScalarFunction::Power { .. } => Monotone::Increasing,
            ScalarFunction::Affine { b, .. } => match b.partial_cmp(&0.0) {
                Some(std::cmp::Ordering::Greater) => Monotone::Increasing,
                Some(std::cmp::Ordering::Less) => Monotone::Decreasing,
                _ => Monotone::Constant,
            },
            ScalarFunction::Chord { base, .. } => match base.monotone() {
                Monotone::Increasing | Monotone::Constant => Monotone::Increasing,
                m => m,
            },
            ScalarFunction::Tabulated { ys, .. } => {
                if ys.windows(2).all(|w| w[1] == w[0]) {
                    Monotone::Constant
                } else if ys.windows(2).all(|w| w[1] >= w[0]) {
                    Monotone::Increasing
                } else if ys.windows(2).all(|w| w[1] <= w[0]) {
                    Monotone::Decreasing
                } else {
                    Monotone::Neither
                }
            }
            ScalarFunction::Negated { base } => match base.monotone() {
                Monotone::Increasing => Monotone::Decreasing,
                Monotone::Decreasing => Monotone::Increasing,
                m => m,
            },
        }
    }

    fn sampled_shape(&self, lo: f64, hi: f64) -> SqrtShape {
        sampled_second_differences(|s| self.eval_sqrt(s), lo * lo, hi * hi)
    }

    /// Sampled shape of `t -> f(t)` itself on `[lo, hi]`.
    pub fn direct_shape_on(&self, lo: f64, hi: f64) -> SqrtShape {
        sampled_second_differences(|t| self.eval(t), lo, hi)
    }

    /// Spot-checks the declared shape and monotonicity on `[lo, hi]` with
    /// second and first differences. Returns a description of the first
    /// mismatch.
    pub fn verify_on(&self, lo: f64, hi: f64) -> Result<()> {
        let declared = self.sqrt_shape();
        let sampled = self.sampled_shape(lo, hi);
        let consistent = match declared {
            SqrtShape::Linear => sampled == SqrtShape::Linear,
            SqrtShape::Convex => sampled.is_convex(),
            SqrtShape::Concave => sampled.is_concave(),
            SqrtShape::Neither => true,
        };
        if !consistent {
            return Err(Error::Domain(format!(
                "{self}: declared {declared:?} shape of f(sqrt t) but sampled {sampled:?} on [{lo}, {hi}]"
            )));
        }
        let n = 64;
        let vals: Vec<f64> = (0..=n)
            .map(|i| self.eval(lo + (hi - lo) * i as f64 / n as f64))
            .collect();
        let slack = 1e-12 * (1.0 + vals.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        let ok = match self.monotone() {
            Monotone::Increasing => vals.windows(2).all(|w| w[1] >= w[0] - slack),
            Monotone::Decreasing => vals.windows(2).all(|w| w[1] <= w[0] + slack),
            Monotone::Constant => vals.windows(2).all(|w| (w[1] - w[0]).abs() <= slack),
            Monotone::Neither => true,
        };
        if !ok {
            return Err(Error::Domain(format!(
                "{self}: declared {:?} but samples on [{lo}, {hi}] disagree",
                self.monotone()
            )));
        }
        Ok(())
    }

    pub fn check_domain(&self, lo: f64, hi: f64) -> Result<()> {
        let (a, b) = self.domain();
        let slack = 1e-12 * (1.0 + hi.abs());
        if lo < a - slack || hi > b + slack {
            return Err(Error::Domain(format!(
                "spectrum [{lo:.6e}, {hi:.6e}] leaves the domain [{a}, {b}] of {self}"
            )));
        }
        Ok(())
    }
}

fn sampled_second_differences(g: impl Fn(f64) -> f64, s0: f64, s1: f64) -> SqrtShape {
    if !(s1 > s0) {
        return SqrtShape::Linear;
    }
    let n = 64;
    let g: Vec<f64> = (0..=n).map(|i| g(s0 + (s1 - s0) * i as f64 / n as f64)).collect();
    let scale = 1.0 + g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let slack = 1e-9 * scale;
    let second: Vec<f64> = g.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect();
    let convex = second.iter().all(|&d| d >= -slack);
    let concave = second.iter().all(|&d| d <= slack);
    match (convex, concave) {
        (true, true) => SqrtShape::Linear,
        (true, false) => SqrtShape::Convex,
        (false, true) => SqrtShape::Concave,
        (false, false) => SqrtShape::Neither,
    }
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFunction::Power { p } => write!(f, "pow:p={p}"),
            ScalarFunction::Affine { a, b } => write!(f, "affine:a={a},b={b}"),
            ScalarFunction::Chord { base, r } => write!(f, "chord:base={base},r={r}"),
            ScalarFunction::Tabulated { xs, .. } => write!(f, "table[{} samples]", xs.len()),
            ScalarFunction::Negated { base } => write!(f, "neg:{base}"),
        }
    }
}

/// Parses `pow:p=3` (or `pow:q=1`), `affine:a=1,b=1`,
/// `chord:base=<spec>,r=0.5` and `neg:<spec>`.
impl FromStr for ScalarFunction {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let err = |reason: &str| Error::FunctionSpec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let (family, rest) = spec.split_once(':').ok_or_else(|| err("missing `family:`"))?;
        let number = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| err(&format!("`{s}` is not a number")))
        };
        let parsed = match family.trim() {
            "pow" => {
                let (key, value) = rest.split_once('=').ok_or_else(|| err("expected p=<x>"))?;
                if !matches!(key.trim(), "p" | "q") || value.contains(',') {
                    return Err(err("pow takes exactly one parameter p (or q)"));
                }
                ScalarFunction::Power { p: number(value)? }
            }
            "affine" => {
                let mut a = None;
                let mut b = None;
                for part in rest.split(',') {
                    match part.split_once('=') {
                        Some(("a", v)) if a.is_none() => a = Some(number(v)?),
                        Some(("b", v)) if b.is_none() => b = Some(number(v)?),
                        _ => return Err(err("affine takes a=<x>,b=<y>")),
                    }
                }
                ScalarFunction::Affine {
                    a: a.ok_or_else(|| err("missing a"))?,
                    b: b.ok_or_else(|| err("missing b"))?,
                }
            }
            "chord" => {
                let body = rest
                    .strip_prefix("base=")
                    .ok_or_else(|| err("chord needs base=<spec>,r=<x>"))?;
                let (base, r) = body
                    .rsplit_once(",r=")
                    .ok_or_else(|| err("chord needs a trailing ,r=<x>"))?;
                ScalarFunction::chord(base.parse()?, number(r)?)
            }
            "neg" => rest.parse::<ScalarFunction>()?.negated(),
            other => return Err(err(&format!("unknown family `{other}`"))),
        };
        parsed.validate()?;
        Ok(parsed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_closed_grammar() {
        assert_eq!("pow:p=3".parse::<ScalarFunction>().unwrap(), ScalarFunction::power(3.0));
        assert_eq!("pow:q=1".parse::<ScalarFunction>().unwrap(), ScalarFunction::power(1.0));
        assert_eq!(
            "affine:a=1,b=1".parse::<ScalarFunction>().unwrap(),
            ScalarFunction::affine(1.0, 1.0)
        );
        assert_eq!(
            "chord:base=pow:q=1,r=0.5".parse::<ScalarFunction>().unwrap(),
            ScalarFunction::chord(ScalarFunction::power(1.0), 0.5)
        );
        for bad in ["pow", "pow:p=-1", "exp:a=1", "affine:a=1", "chord:base=pow:p=1", "pow:p=1,q=2"] {
            assert!(bad.parse::<ScalarFunction>().is_err(), "{bad} should be rejected");
        }
    }

    #[test]
    fn display_round_trips() {
        for spec in ["pow:p=2.5", "affine:a=1,b=0.5", "chord:base=affine:a=1,b=1,r=0.25"] {
            let f: ScalarFunction = spec.parse().unwrap();
            assert_eq!(f.to_string().parse::<ScalarFunction>().unwrap(), f);
        }
    }

    #[test]
    fn power_shapes() {
        assert_eq!(ScalarFunction::power(3.0).sqrt_shape(), SqrtShape::Convex);
        assert_eq!(ScalarFunction::power(2.0).sqrt_shape(), SqrtShape::Linear);
        assert_eq!(ScalarFunction::power(0.5).sqrt_shape(), SqrtShape::Concave);
        assert_eq!(ScalarFunction::power(0.5).eval(0.0), 0.0);
        for p in [0.5, 1.0, 2.0, 2.5, 4.0] {
            ScalarFunction::power(p).verify_on(0.0, 3.0).unwrap();
        }
    }

    #[test]
    fn chord_is_below_base_and_vanishes_at_zero() {
        let base = ScalarFunction::affine(1.0, 1.0);
        let chord = ScalarFunction::chord(base.clone(), 0.7);
        assert_eq!(chord.at_zero(), 0.0);
        assert_eq!(chord.sqrt_shape(), SqrtShape::Concave);
        for i in 0..=100 {
            let t = i as f64 * 0.03;
            assert!(chord.eval(t) <= base.eval(t) + 1e-15);
        }
        assert_eq!(chord.eval(0.7), base.eval(0.7));
        chord.verify_on(0.0, 3.0).unwrap();
    }

    #[test]
    fn tabulated_shape_is_sampled() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x * x).collect();
        let f = ScalarFunction::Tabulated { xs, ys };
        f.validate().unwrap();
        assert_eq!(f.monotone(), Monotone::Increasing);
        assert!(f.check_domain(0.0, 5.0).is_err());
        assert!((f.eval(1.25) - (1.0 + 0.5 * (3.375 - 1.0))).abs() < 1e-12);
    }
}
