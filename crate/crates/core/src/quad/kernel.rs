//! Integrals of the form `∫₀^∞ h(t) · K(x − t, y) dt` where `K` is one of the
//! Poisson-type kernels built from `D = (x − t)² + y²`.
//!
//! For `x > 0` the kernels peak at `t = x` with width `y`. The domain is split
//! into a core `|t − x| ≤ 8y`, integrated after the substitution
//! `t = x + y·tan θ` (which turns the Lorentzian into a bounded integrand), and
//! a symmetric and a one-sided outer region with break points graded
//! geometrically away from the peak. Mirror-image points are folded together
//! so the odd kernels cancel analytically rather than numerically.

use super::adaptive::{integrate, AdaptiveOptions, QuadValue};
use super::QuadratureSettings;
use crate::error::{Error, Result};

/// Kernel factors at one node, already multiplied by the change-of-variables
/// Jacobian of whatever parametrisation produced the node.
#[derive(Debug, Clone, Copy)]
pub struct Factors {
    /// `1 / D`
    pub inv: f64,
    /// `y² / D²`
    pub inv_sq: f64,
    /// `(x − t) / D`
    pub re: f64,
    /// `y (x − t) / D²`
    pub re_sq: f64,
}

impl Factors {
    /// Plain factors at offset `s = t − x`.
    #[inline]
    fn plain(s: f64, y: f64) -> Self {
        let d = s * s + y * y;
        let inv = 1.0 / d;
        let yd = y * inv;
        Factors {
            inv,
            inv_sq: yd * yd,
            re: -s * inv,
            re_sq: -s * yd * inv,
        }
    }

    /// Factors at `t = x + y·tan θ`, including `dt/dθ = y / cos²θ`.
    #[inline]
    fn angular(theta: f64, y: f64) -> Self {
        let (sin, cos) = theta.sin_cos();
        Factors {
            inv: 1.0 / y,
            inv_sq: cos * cos / y,
            re: -sin / cos,
            re_sq: -sin * cos / y,
        }
    }
}

const GRADING: f64 = 4.0;
const CORE_WIDTHS: f64 = 8.0;

fn graded(from: f64, to: f64, start: f64) -> Vec<f64> {
    let mut breaks = vec![from];
    let mut b = start;
    while b < to {
        if b > from * (1.0 + 1e-12) {
            breaks.push(b);
        }
        b *= GRADING;
    }
    if to > *breaks.last().unwrap() {
        breaks.push(to);
    }
    breaks
}

fn add<const N: usize>(a: [f64; N], b: [f64; N]) -> [f64; N] {
    let mut out = a;
    for i in 0..N {
        out[i] += b[i];
    }
    out
}

/// Sum of the two mirror-image contributions, remembering the size of the
/// terms so the integrator does not chase roundoff in a cancelled sum.
#[derive(Clone, Copy)]
struct Folded<const N: usize> {
    sum: [f64; N],
    mag: [f64; N],
}

impl<const N: usize> Folded<N> {
    fn of(a: [f64; N], b: [f64; N]) -> Self {
        let mut mag = [0.0; N];
        for i in 0..N {
            mag[i] = a[i].abs() + b[i].abs();
        }
        Folded { sum: add(a, b), mag }
    }
}

impl<const N: usize> QuadValue for Folded<N> {
    const DIM: usize = N;
    fn zero() -> Self {
        Folded {
            sum: [0.0; N],
            mag: [0.0; N],
        }
    }
    fn get(&self, i: usize) -> f64 {
        self.sum[i]
    }
    fn set(&mut self, i: usize, v: f64) {
        self.sum[i] = v;
    }
    fn magnitude(&self, i: usize) -> f64 {
        self.mag[i]
    }
    fn axpy(self, k: f64, other: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            out.sum[i] += k * other.sum[i];
            out.mag[i] += k.abs() * other.mag[i];
        }
        out
    }
}

/// Sum of integral and error estimate over the pieces of one kernel integral.
#[derive(Debug, Clone, Copy)]
pub struct KernelIntegral<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
    pub panels: usize,
}

impl<const N: usize> KernelIntegral<N> {
    fn new() -> Self {
        KernelIntegral {
            value: [0.0; N],
            error: [0.0; N],
            panels: 0,
        }
    }

    fn absorb(&mut self, value: [f64; N], error: [f64; N], panels: usize) {
        self.value = add(self.value, value);
        self.error = add(self.error, error);
        self.panels += panels;
    }
}

/// Truncation point for a kernel centred at `x`.
pub fn truncation(settings: &QuadratureSettings, x: f64) -> f64 {
    settings.tail_cut.max(x + 40.0)
}

/// Integrates `h(t, factors)` over `t ∈ (0, T]` for the pole `x + i y`.
///
/// `y` may be zero only when `x < 0`. `abs_tol` is the absolute target for
/// the whole integral; the relative target and budget come from `settings`.
pub fn kernel_integral<const N: usize, H>(
    x: f64,
    y: f64,
    settings: &QuadratureSettings,
    abs_tol: f64,
    h: H,
) -> Result<KernelIntegral<N>>
where
    H: Fn(f64, &Factors) -> [f64; N],
{
    if !(x.is_finite() && y.is_finite() && y >= 0.0) {
        return Err(Error::invalid(format!("bad kernel pole {x} + {y}i")));
    }
    if x >= 0.0 && y == 0.0 {
        return Err(Error::DomainViolation(format!(
            "kernel pole {x} lies on the integration path [0, ∞)"
        )));
    }
    let t_max = truncation(settings, x);
    let mut out = KernelIntegral::new();

    if x <= 0.0 {
        let scale = x.hypot(y);
        let opts = AdaptiveOptions {
            abs_tol,
            rel_tol: settings.rel_tol,
            max_subdiv: settings.max_subdiv,
        };
        let breaks = graded(0.0, t_max, scale);
        let r = integrate(|t: f64| h(t, &Factors::plain(t - x, y)), &breaks, opts)?;
        out.absorb(r.value, r.error, r.panels);
    } else {
        let opts = AdaptiveOptions {
            abs_tol: abs_tol / 3.0,
            rel_tol: settings.rel_tol,
            max_subdiv: settings.max_subdiv,
        };
        let left = x;
        let right = t_max - x;
        let sym = left.min(right);
        let core = (CORE_WIDTHS * y).min(sym);

        let theta_max = (core / y).atan();
        let r = integrate(
            |theta: f64| {
                let dt = y * theta.tan();
                Folded::of(
                    h(x + dt, &Factors::angular(theta, y)),
                    h(x - dt, &Factors::angular(-theta, y)),
                )
            },
            &[0.0, theta_max],
            opts,
        )?;
        out.absorb(r.value.sum, r.error.sum, r.panels);

        if sym > core {
            let breaks = graded(core, sym, core * GRADING);
            let r = integrate(
                |s: f64| Folded::of(h(x + s, &Factors::plain(s, y)), h(x - s, &Factors::plain(-s, y))),
                &breaks,
                opts,
            )?;
            out.absorb(r.value.sum, r.error.sum, r.panels);
        }

        let (far, sign) = if right > sym { (right, 1.0) } else { (left, -1.0) };
        if far > sym {
            let breaks = graded(sym, far, sym.max(y) * GRADING);
            let r = integrate(
                |s: f64| h(x + sign * s, &Factors::plain(sign * s, y)),
                &breaks,
                opts,
            )?;
            out.absorb(r.value, r.error, r.panels);
        }
    }

    // e^{-t} decay beyond T: the remainder is bounded by the integrand at T.
    let tail = h(t_max, &Factors::plain(t_max - x, y));
    for (e, t) in out.error.iter_mut().zip(tail) {
        *e += t.abs();
    }
    Ok(out)
}
