//! Exponential-weight quadrature.
//!
//! Every integral in the library has the shape `∫₀^∞ g(t)·t^r·e^{-t} dt`,
//! possibly against a Poisson-type kernel that is sharply peaked at `t = x`
//! when the pole `x + iy` approaches the positive half-line. This module owns
//! the truncation policy, the adaptive rule and the exponential integral used
//! to cross-check the negative-axis values.

pub mod adaptive;
pub mod kernel;

use std::cell::Cell;

use crate::error::{Error, Result};
use adaptive::{integrate, AdaptiveOptions};

/// Euler–Mascheroni constant.
pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

/// Error targets and truncation policy shared by all kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdiv: usize,
    /// Base truncation point `T`; peaked kernels use `max(T, x + 40)`.
    pub tail_cut: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdiv: 2000,
            tail_cut: 50.0,
        }
    }
}

impl QuadratureSettings {
    /// Uniform tolerance override, as used by the tolerance-sensitivity checks.
    pub fn with_tolerance(tol: f64) -> Self {
        QuadratureSettings {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::invalid("quadrature tolerances must be positive"));
        }
        if self.max_subdiv < 8 {
            return Err(Error::invalid("max_subdiv must be at least 8"));
        }
        // (T+1)e^{-T} < abs_tol/2 for a unit-bounded g
        if !(self.tail_cut > 0.0) || (self.tail_cut + 1.0) * (-self.tail_cut).exp() >= 0.5 * self.abs_tol {
            return Err(Error::invalid(format!(
                "tail_cut {} does not certify the remainder below abs_tol/2",
                self.tail_cut
            )));
        }
        Ok(())
    }

    pub(crate) fn options(&self) -> AdaptiveOptions {
        AdaptiveOptions {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_subdiv: self.max_subdiv,
        }
    }
}

/// A scalar integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub err_estimate: f64,
    pub subdivisions_used: usize,
}

/// `Γ(n, T) = ∫_T^∞ t^{n-1} e^{-t} dt` for integer `n ≥ 0`.
pub fn upper_incomplete_gamma(n: u32, t: f64) -> f64 {
    if n == 0 {
        return scaled_exp_integral(t) * (-t).exp();
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut fact = 1.0;
    for k in 1..n {
        term *= t / k as f64;
        sum += term;
        fact *= k as f64;
    }
    fact * (-t).exp() * sum
}

/// `∫₀^∞ g(t) t^r e^{-t} dt`.
///
/// The integrand is truncated at `settings.tail_cut`; the reported error adds
/// `sup|g|·Γ(r+1, T)` with the supremum taken over the evaluated nodes.
pub fn integrate_exp_kernel<G>(g: G, r: i32, settings: &QuadratureSettings) -> Result<IntegralResult>
where
    G: Fn(f64) -> f64,
{
    if r < 0 {
        return Err(Error::invalid(format!("power r = {r} must be non-negative")));
    }
    settings.validate()?;
    let t_max = settings.tail_cut;
    let g_sup = Cell::new(0.0_f64);
    let mut breaks = vec![0.0];
    let mut b = 0.5;
    while b < t_max {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(t_max);
    let res = integrate(
        |t: f64| {
            let gv = g(t);
            g_sup.set(g_sup.get().max(gv.abs()));
            gv * t.powi(r) * (-t).exp()
        },
        &breaks,
        settings.options(),
    )?;
    let tail = g_sup.get() * upper_incomplete_gamma(r as u32 + 1, t_max);
    Ok(IntegralResult {
        value: res.value,
        err_estimate: res.error + tail,
        subdivisions_used: res.panels,
    })
}

/// `e^x E₁(x)` for `x > 0`: power series up to 1, continued fraction beyond.
pub fn scaled_exp_integral(x: f64) -> f64 {
    assert!(x > 0.0, "exponential integral needs x > 0, got {x}");
    if x <= 1.0 {
        x.exp() * exp_integral_series(x, x.ln())
    } else {
        exp_integral_fraction(x)
    }
}

/// `E₁(x) = −γ − ln x − Σ_{k≥1} (−x)^k / (k·k!)`, with `ln x` supplied so
/// the caller can work with arguments below the f64 range.
fn exp_integral_series(x: f64, ln_x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        term *= -x / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - ln_x - sum
}

/// `e^x E₁(x)` by the even continued fraction, evaluated with Lentz's method.
fn exp_integral_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Closed form `F(−c) = (1 + c)e^c E₁(c) − 1` together with its derivative
/// with respect to `ln c`, parametrised by `u = ln c` so that `c` may lie
/// below the smallest representable double.
pub(crate) fn negative_axis_closed_form_log(u: f64) -> (f64, f64) {
    let c = u.exp();
    let ee1 = if c <= 1.0 {
        c.exp() * exp_integral_series(c, u)
    } else {
        exp_integral_fraction(c)
    };
    let value = (1.0 + c) * ee1 - 1.0;
    // d/dc[(1+c)e^c E₁(c)] = (2+c)e^c E₁(c) − (1+c)/c, times dc/du = c
    let slope = c * (2.0 + c) * ee1 - (1.0 + c);
    (value, slope)
}

/// `F(x + iy) = ∫₀^∞ t e^{-t} / ((x − t)² + y²) dt` for `y > 0`.
pub fn poisson_integral(x: f64, y: f64, settings: &QuadratureSettings) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::invalid(format!("poisson_integral needs y > 0, got {y}")));
    }
    let r = kernel::kernel_integral(x, y, settings, settings.abs_tol, |t, k| [t * (-t).exp() * k.inv])?;
    Ok(r.value[0])
}

/// `F(−c)` for `c > 0`, evaluated both by quadrature and by the closed form
/// through `E₁`. Returns the closed-form value once both routes agree.
pub fn poisson_integral_negative_axis(c: f64, settings: &QuadratureSettings) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("negative-axis offset must be positive, got {c}")));
    }
    let closed = negative_axis_closed_form_log(c.ln()).0;
    let quad = kernel::kernel_integral(-c, 0.0, settings, settings.abs_tol, |t, k| [t * (-t).exp() * k.inv])?;
    let tolerance = 10.0 * settings.abs_tol.max(settings.rel_tol * closed.abs());
    if (quad.value[0] - closed).abs() > tolerance {
        return Err(Error::CrossCheckFailure {
            context: "F(-c) closed form vs quadrature",
            lhs: closed,
            rhs: quad.value[0],
            tolerance,
        });
    }
    Ok(closed)
}
