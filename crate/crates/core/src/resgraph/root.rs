use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute residual tolerance of the graph solver, in frequency units.
pub const TOL_ABS: f64 = 1e-12;
/// Relative part of the tolerance, scaled by `slope * bracket width`.
pub const TOL_REL: f64 = 4.0 * f64::EPSILON;

const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub x: f64,
    /// `|f(x) - target|`.
    pub residual: f64,
    pub iterations: usize,
    /// Tolerance the residual was held to.
    pub tolerance: f64,
}

/// Solves `f(x) = target` for increasing `f` on `[lo, hi]` by bisection with
/// safeguarded secant steps. `slope` is a lower bound on `f'` used to scale the
/// relative tolerance.
pub fn solve_increasing(
    f: impl Fn(f64) -> f64,
    target: f64,
    lo: f64,
    hi: f64,
    slope: f64,
    on_bracket_failure: impl FnOnce(f64, f64) -> Error,
) -> Result<Root> {
    let tolerance = TOL_ABS + TOL_REL * slope * (hi - lo);
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a) - target, f(b) - target);
    if fa > fb {
        return Err(Error::ModelAssumption(format!(
            "slow frequency decreases across [{lo}, {hi}] ({} > {})",
            fa + target,
            fb + target
        )));
    }
    for (x, fx) in [(a, fa), (b, fb)] {
        if fx.abs() <= tolerance {
            return Ok(Root {
                x,
                residual: fx.abs(),
                iterations: 0,
                tolerance,
            });
        }
    }
    if fa > 0.0 || fb < 0.0 {
        return Err(on_bracket_failure(lo, hi));
    }
    let mut best = if -fa < fb { (a, fa) } else { (b, fb) };
    for it in 1..=MAX_ITER {
        let secant = a - fa * (b - a) / (fb - fa);
        let mid = 0.5 * (a + b);
        // fall back to bisection when the secant leaves the inner 90% of the bracket
        let margin = 0.05 * (b - a);
        let x = if secant.is_finite() && secant > a + margin && secant < b - margin {
            secant
        } else if it % 3 == 0 || !secant.is_finite() {
            mid
        } else {
            secant.clamp(a + margin, b - margin)
        };
        let fx = f(x) - target;
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx.abs() <= tolerance {
            return Ok(Root {
                x,
                residual: fx.abs(),
                iterations: it,
                tolerance,
            });
        }
        if fx < 0.0 {
            if fx < fa {
                return Err(monotonicity(a, x, fa, fx, target));
            }
            a = x;
            fa = fx;
        } else {
            if fx > fb {
                return Err(monotonicity(x, b, fx, fb, target));
            }
            b = x;
            fb = fx;
        }
        if b - a <= 2.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(Root {
        x: best.0,
        residual: best.1.abs(),
        iterations: MAX_ITER,
        tolerance,
    })
}

fn monotonicity(x0: f64, x1: f64, f0: f64, f1: f64, target: f64) -> Error {
    Error::ModelAssumption(format!(
        "slow frequency not increasing: f({x0}) = {} and f({x1}) = {}",
        f0 + target,
        f1 + target
    ))
}
