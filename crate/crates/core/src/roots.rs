//! Safeguarded Newton iteration for monotone increasing functions.
//!
//! The bracket may be open on either side; an open side is closed by stepping
//! outward with a stride that doubles on every expansion. Newton steps that
//! leave the current bracket, or that shrink more slowly than bisection would,
//! are replaced by bisection; while a side is open, steps toward it are capped
//! at the current stride.

use crate::error::{Error, Result};

pub(crate) struct Monotone {
    /// Known point with negative value, or `-∞`.
    pub lo: f64,
    /// Known point with positive value, or `+∞`.
    pub hi: f64,
    pub start: f64,
    /// First outward stride used while a side is still open.
    pub stride: f64,
    /// Stop once `|g(x)| ≤ value_tol`.
    pub value_tol: f64,
    pub max_iter: usize,
}

/// Finds the root of the increasing map `g`, whose evaluation returns
/// `(g(x), g'(x))`. `step_tol(x)` is the step length below which the iterate
/// counts as converged.
pub(crate) fn solve_increasing<G, S>(
    context: &'static str,
    setup: Monotone,
    mut g: G,
    step_tol: S,
) -> Result<f64>
where
    G: FnMut(f64) -> Result<(f64, f64)>,
    S: Fn(f64) -> f64,
{
    let Monotone {
        mut lo,
        mut hi,
        start,
        mut stride,
        value_tol,
        max_iter,
    } = setup;
    let mut x = start;
    // the last two step lengths, for the bisection fallback
    let mut step = f64::INFINITY;
    let mut step_before = f64::INFINITY;
    for _ in 0..max_iter {
        let (val, der) = g(x)?;
        if !val.is_finite() {
            return Err(Error::no_convergence(context, format!("non-finite value at {x}")));
        }
        if val.abs() <= value_tol {
            return Ok(x);
        }
        if val < 0.0 {
            lo = x;
        } else {
            hi = x;
        }

        let closed = lo.is_finite() && hi.is_finite();
        let newton = x - val / der;
        let newton_ok = der > 0.0
            && newton.is_finite()
            && newton > lo
            && newton < hi
            && (!closed || (2.0 * val).abs() <= (step_before * der).abs());
        let next = if newton_ok {
            if closed || (newton - x).abs() <= stride {
                newton
            } else {
                stride *= 2.0;
                x + (newton - x).signum() * stride * 0.5
            }
        } else if closed {
            0.5 * (lo + hi)
        } else if hi.is_finite() {
            stride *= 2.0;
            hi - stride
        } else {
            stride *= 2.0;
            lo + stride
        };

        let tol = step_tol(next);
        if (next - x).abs() <= tol || (hi - lo) <= tol {
            return Ok(next);
        }
        step_before = step;
        step = (next - x).abs();
        x = next;
    }
    Err(Error::no_convergence(
        context,
        format!("{max_iter} iterations, bracket [{lo}, {hi}]"),
    ))
}
