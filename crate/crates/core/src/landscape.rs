//! The implicit curve `y = v(x)` on which the subordination function
//! `H(z) = z + α + α∫ t e^{-t}/(z − t) dt` takes real values, and the real
//! trace `P(x) = H(x + i v(x))` of `H` along it.
//!
//! Everything here is parametrised by an [`AlphaContext`], which pins down the
//! critical point `−c` of `H` on the negative axis, the support edge `s = H(−c)`
//! and the second and third derivatives of `H` there.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::adaptive::{integrate, AdaptiveOptions};
use crate::quad::kernel::{kernel_integral, KernelIntegral};
use crate::quad::{negative_axis_closed_form_log, poisson_integral_negative_axis, QuadratureSettings, EULER_GAMMA};
use crate::roots::{solve_increasing, Monotone};

/// Below this `c` the edge constants overflow and only the bulk is evaluated.
const EDGE_RESOLUTION: f64 = 1e-140;
/// Heights below this are returned from the large-`x` asymptote directly.
const UNDERFLOW_HEIGHT: f64 = 1e-280;
/// Absolute target for internal kernel integrals: tolerance is relative only.
const RELATIVE_ONLY: f64 = 1e-300;

#[inline]
fn weight(t: f64) -> f64 {
    t * (-t).exp()
}

/// Validated parameter bundle for one free Gamma law.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaContext {
    alpha: f64,
    c_alpha: f64,
    ln_c_alpha: f64,
    s_alpha: f64,
    gamma_alpha: f64,
    curvature: f64,
    third: f64,
    quad: QuadratureSettings,
    root_tol: f64,
    // F(−c) − 1/α as left by the root solve
    closure_residual: f64,
    edge_resolved: bool,
}

/// One sample of the curve: parameter, height, density weight and real trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub v: f64,
    pub q: f64,
    pub p: f64,
}

/// Curve sample including the slope of the real trace.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CurveEval {
    pub v: f64,
    pub p: f64,
    pub dp: f64,
    pub q: f64,
}

impl AlphaContext {
    /// Context with the default quadrature settings and `root_tol = 1e-10`.
    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_settings(alpha, QuadratureSettings::default(), 1e-10)
    }

    pub fn with_settings(alpha: f64, quad: QuadratureSettings, root_tol: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must be positive and finite, got {alpha}")));
        }
        if !(root_tol > 0.0 && root_tol < 1.0) {
            return Err(Error::invalid(format!("root_tol must lie in (0, 1), got {root_tol}")));
        }
        quad.validate()?;
        let target = 1.0 / alpha;
        if !target.is_finite() {
            return Err(Error::invalid(format!("alpha {alpha} is too small to represent 1/alpha")));
        }

        // F(−c) is strictly decreasing in c; solve in u = ln c.
        let u_max = 1e30_f64.ln();
        if negative_axis_closed_form_log(u_max).0 > target {
            return Err(Error::no_convergence(
                "critical point",
                format!("root for alpha = {alpha} lies beyond c = 1e30"),
            ));
        }
        let start = if alpha >= 1.0 {
            0.5 * alpha.ln()
        } else {
            -target - EULER_GAMMA - 1.0
        };
        let ln_c = solve_increasing(
            "critical point",
            Monotone {
                lo: f64::NEG_INFINITY,
                hi: u_max,
                start: start.min(u_max - 1.0),
                stride: 1.0,
                value_tol: 0.0,
                max_iter: 400,
            },
            |u| {
                let (value, slope) = negative_axis_closed_form_log(u);
                Ok((target - value, -slope))
            },
            |u| 1e-15 * u.abs().max(1.0),
        )?;
        let c = ln_c.exp();
        let closure_residual = negative_axis_closed_form_log(ln_c).0 - target;
        let s = c * (alpha - c) / (1.0 + c);
        let edge_resolved = c > EDGE_RESOLUTION;

        let mut ctx = AlphaContext {
            alpha,
            c_alpha: c,
            ln_c_alpha: ln_c,
            s_alpha: s,
            gamma_alpha: 0.0,
            curvature: f64::NEG_INFINITY,
            third: f64::NEG_INFINITY,
            quad,
            root_tol,
            closure_residual,
            edge_resolved,
        };

        if edge_resolved {
            poisson_integral_negative_axis(c, &quad)?;
            // 1 − s/c², with s/c² expanded to avoid the product underflowing
            ctx.curvature = 1.0 - (alpha - c) / (c * (1.0 + c));
            ctx.third = -6.0 * alpha * ctx.edge_power_integral(4)?;
            ctx.gamma_alpha = 6.0 * ctx.curvature / ctx.third;
            if !(s > 0.0 && ctx.curvature < 0.0 && ctx.gamma_alpha > 0.0) {
                return Err(Error::DegenerateSlope {
                    context: "edge constants",
                    value: ctx.gamma_alpha,
                });
            }
        } else {
            // H'''/H'' = (1 − c − 2/H'')/c → γ ≈ 6c as c → 0
            ctx.gamma_alpha = 6.0 * c / (1.0 - c);
        }
        Ok(ctx)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `c`: the critical point of the subordination function sits at `−c`.
    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }

    /// `ln c`, finite even when `c` underflows.
    pub fn ln_c_alpha(&self) -> f64 {
        self.ln_c_alpha
    }

    /// Left end of the support.
    pub fn s_alpha(&self) -> f64 {
        self.s_alpha
    }

    /// `6 H''(−c) / H'''(−c)`, the square-root edge constant of the curve.
    pub fn gamma_alpha(&self) -> f64 {
        self.gamma_alpha
    }

    /// `H''(−c) = 1 − s/c²`.
    pub fn curvature_at_edge(&self) -> f64 {
        self.curvature
    }

    /// `H'''(−c)`, from quadrature.
    pub fn third_derivative_at_edge(&self) -> f64 {
        self.third
    }

    pub fn quad(&self) -> &QuadratureSettings {
        &self.quad
    }

    pub fn root_tol(&self) -> f64 {
        self.root_tol
    }

    /// False when `c` is too small for the edge constants to be represented
    /// (roughly `alpha < 0.007`); the bulk of the law is still available.
    pub fn edge_resolved(&self) -> bool {
        self.edge_resolved
    }

    /// Limit of `(P(x) − s)/(x + c)` as `x ↓ −c`.
    pub fn edge_slope(&self) -> f64 {
        -0.5 * self.gamma_alpha * self.curvature
    }

    fn alpha_slope_denominator(&self) -> Result<f64> {
        let c = self.c_alpha;
        let denom = self.alpha - 2.0 * c - c * c;
        if denom <= 0.0 {
            return Err(Error::DegenerateSlope {
                context: "alpha - 2c - c^2",
                value: denom,
            });
        }
        Ok(denom)
    }

    /// `dc/dα = c(1 + c) / (α(α − 2c − c²))`.
    pub fn c_alpha_derivative(&self) -> Result<f64> {
        let c = self.c_alpha;
        Ok(c * (1.0 + c) / (self.alpha * self.alpha_slope_denominator()?))
    }

    /// `ds/dα = c(α + 1) / (α(1 + c))`.
    pub fn s_alpha_derivative(&self) -> Result<f64> {
        self.alpha_slope_denominator()?;
        let c = self.c_alpha;
        Ok(c * (self.alpha + 1.0) / (self.alpha * (1.0 + c)))
    }

    /// `H''(−c)` from `−2α ∫ t e^{-t}/(c + t)³ dt`, independent of the
    /// closed form stored in the context.
    pub fn curvature_by_quadrature(&self) -> Result<f64> {
        Ok(-2.0 * self.alpha * self.edge_power_integral(3)?)
    }

    /// `∫ t e^{-t}/(c + t)^k dt`, as `c^{2−k} ∫ u e^{-cu}/(1 + u)^k du` so that
    /// no intermediate power of `c + t` leaves the double range.
    fn edge_power_integral(&self, k: i32) -> Result<f64> {
        let c = self.c_alpha;
        let u_max = self.quad.tail_cut / c;
        let mut breaks = vec![0.0];
        let mut b = 1.0;
        while b < u_max {
            breaks.push(b);
            b *= 4.0;
        }
        breaks.push(u_max);
        let opts = AdaptiveOptions {
            abs_tol: RELATIVE_ONLY,
            rel_tol: self.quad.rel_tol,
            max_subdiv: self.quad.max_subdiv,
        };
        let r = integrate(|u: f64| u * (-c * u).exp() / (1.0 + u).powi(k), &breaks, opts)?;
        Ok(c.powi(2 - k) * r.value)
    }

    fn kernel<const N: usize, H>(&self, x: f64, y: f64, h: H) -> Result<KernelIntegral<N>>
    where
        H: Fn(f64, &crate::quad::kernel::Factors) -> [f64; N],
    {
        kernel_integral(x, y, &self.quad, RELATIVE_ONLY, h)
    }

    fn below_edge(&self, x: f64) -> bool {
        x <= -self.c_alpha || (!self.edge_resolved && x <= 0.0)
    }

    /// Height `v(x)` of the curve: zero up to `−c`, then the unique `v > 0`
    /// with `F(x + iv) = 1/α`.
    #[doc(alias = "v_alpha")]
    pub fn boundary_height(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::invalid(format!("curve parameter must be finite, got {x}")));
        }
        if self.below_edge(x) {
            return Ok(0.0);
        }
        let alpha = self.alpha;
        if x > 0.0 {
            let asymptote = alpha * PI * x * (-x).exp();
            if asymptote < UNDERFLOW_HEIGHT {
                return Ok(asymptote);
            }
        }

        let c = self.c_alpha;
        let y_max = alpha.sqrt();
        let guess = if x >= 3.0 {
            alpha * PI * x * (-x).exp()
        } else if self.edge_resolved && x + c < 0.1 {
            (self.gamma_alpha * (x + c)).sqrt()
        } else {
            0.3 * y_max.min(1.0)
        };
        let guess = guess.clamp(1e-300, 0.999 * y_max);
        let edge_form = x <= 0.0 && self.edge_resolved;

        let u = solve_increasing(
            "curve height",
            Monotone {
                lo: f64::NEG_INFINITY,
                hi: y_max.ln(),
                start: guess.ln(),
                stride: 1.0,
                value_tol: 0.0,
                max_iter: 200,
            },
            |u| {
                let y = u.exp();
                if edge_form {
                    // F(x+iy) − F(−c) = (c+x)·A − y²·B keeps the residual free
                    // of cancellation when x is close to −c.
                    let r = self.kernel(x, y, |t, k| {
                        let w = weight(t) * k.inv / ((c + t) * (c + t));
                        [w * (2.0 * t + c - x), w, weight(t) * k.inv_sq]
                    })?;
                    let [a, b, k2] = r.value;
                    let residual = (c + x) * a - y * y * b + self.closure_residual;
                    Ok((-residual, 2.0 * k2))
                } else {
                    let r = self.kernel(x, y, |t, k| [weight(t) * k.inv, weight(t) * k.inv_sq])?;
                    let [f, k2] = r.value;
                    Ok((1.0 / alpha - f, 2.0 * k2))
                }
            },
            |_| self.root_tol,
        )?;
        Ok(u.exp())
    }

    /// Slope `v'(x)` from the implicit-function formula, for `x > −c`.
    #[doc(alias = "v_alpha_prime")]
    pub fn boundary_slope(&self, x: f64) -> Result<f64> {
        if self.below_edge(x) {
            return Err(Error::invalid(format!("boundary slope needs x > -c, got {x}")));
        }
        let v = self.boundary_height(x)?;
        let r = self.kernel(x, v, |t, k| [weight(t) * k.inv_sq, weight(t) * k.re_sq])?;
        let [k2, l] = r.value;
        Ok(-l / k2)
    }

    /// Real trace `P(x) = H(x + i v(x))`.
    #[doc(alias = "P_alpha")]
    pub fn boundary_image(&self, x: f64) -> Result<f64> {
        Ok(self.evaluate(x)?.p)
    }

    /// `P'(x)` for `x ≠ −c`: `H'(x)` left of the edge and
    /// `|H'(z)|² / Re H'(z)` at `z = x + i v(x)` right of it.
    #[doc(alias = "P_alpha_prime")]
    pub fn boundary_image_slope(&self, x: f64) -> Result<f64> {
        if x == -self.c_alpha {
            return Err(Error::invalid("the real trace has a corner at x = -c"));
        }
        let dp = self.evaluate(x)?.dp;
        if !(dp > 0.0) && !self.below_edge(x) {
            return Err(Error::DegenerateSlope {
                context: "P'(x)",
                value: dp,
            });
        }
        Ok(dp)
    }

    /// `Q(x) = v / (x² + v²)`, equal to `π` times the density at `P(x)`.
    #[doc(alias = "Q_alpha")]
    pub fn boundary_weight(&self, x: f64) -> Result<f64> {
        let v = self.boundary_height(x)?;
        Ok(if v == 0.0 { 0.0 } else { v / (x * x + v * v) })
    }

    pub fn curve_point(&self, x: f64) -> Result<CurvePoint> {
        let e = self.evaluate(x)?;
        Ok(CurvePoint {
            x,
            v: e.v,
            q: e.q,
            p: e.p,
        })
    }

    /// Lower and upper arctan bounds on `v(x)` for `0 < eps < min(x, 1)`,
    /// evaluated at the computed height.
    pub fn height_brackets(&self, x: f64, eps: f64) -> Result<(f64, f64)> {
        if !(eps > 0.0 && eps < x && eps < 1.0) {
            return Err(Error::invalid(format!("need 0 < eps < min(x, 1), got eps = {eps}, x = {x}")));
        }
        let v = self.boundary_height(x)?;
        let angle = (eps / v).atan();
        let lower = 2.0 * self.alpha * (x - eps) * (-x - eps).exp() * angle;
        let upper = 2.0 * self.alpha * (x + eps) * (-x + eps).exp() * angle / (1.0 - eps);
        Ok((lower, upper))
    }

    /// Height, trace, trace slope and weight at one parameter value.
    pub(crate) fn evaluate(&self, x: f64) -> Result<CurveEval> {
        let alpha = self.alpha;
        let c = self.c_alpha;
        if x == -c {
            return Ok(CurveEval {
                v: 0.0,
                p: self.s_alpha,
                dp: self.edge_slope(),
                q: 0.0,
            });
        }
        if self.below_edge(x) {
            let (p, dp) = if self.edge_resolved {
                let r = self.kernel(x, 0.0, |t, k| {
                    [
                        weight(t) * k.re,
                        weight(t) * k.inv * (2.0 * t + c - x) / ((c + t) * (c + t)),
                    ]
                })?;
                let [re, a] = r.value;
                (x + alpha + alpha * re, -alpha * self.closure_residual - alpha * (c + x) * a)
            } else if x < 0.0 {
                let r = self.kernel(x, 0.0, |t, k| [weight(t) * k.re, weight(t) * k.inv])?;
                let [re, f] = r.value;
                (x + alpha + alpha * re, 1.0 - alpha * f)
            } else {
                (self.s_alpha, self.edge_slope().max(0.0))
            };
            return Ok(CurveEval { v: 0.0, p, dp, q: 0.0 });
        }

        let v = self.boundary_height(x)?;
        let r = self.kernel(x, v, |t, k| {
            let w = weight(t);
            [t * w * k.inv, w * k.inv_sq, w * k.re_sq]
        })?;
        let [second, k2, l] = r.value;
        // On the curve αF = 1, so Re H' = 2α·K₂ and Im H' = 2α·L.
        let dp = 2.0 * alpha * (k2 * k2 + l * l) / k2;
        Ok(CurveEval {
            v,
            p: 2.0 * x + alpha - alpha * second,
            dp,
            q: v / (x * x + v * v),
        })
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // reference values keep every oracle digit
mod tests {
    use super::*;

    fn ctx(alpha: f64) -> AlphaContext {
        AlphaContext::new(alpha).unwrap()
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(matches!(AlphaContext::new(0.0), Err(Error::InvalidInput(_))));
        assert!(matches!(AlphaContext::new(-1.0), Err(Error::InvalidInput(_))));
        assert!(AlphaContext::new(f64::NAN).is_err());
    }

    #[test]
    fn critical_point_increases_with_alpha() {
        let cs: Vec<f64> = [0.5, 1.0, 2.0, 10.0].iter().map(|&a| ctx(a).c_alpha()).collect();
        assert!(cs.windows(2).all(|w| w[0] < w[1]), "{cs:?}");
    }

    #[test]
    fn critical_point_vanishes_for_small_alpha() {
        let tiny = ctx(1e-6);
        assert!(tiny.c_alpha() < 1e-3);
        assert!(!tiny.edge_resolved());
        assert!((tiny.ln_c_alpha() + 1e6 + EULER_GAMMA + 1.0).abs() < 1e-6);
    }

    #[test]
    fn edge_matches_reference() {
        // 40-digit reference values
        for (alpha, c, s) in [
            (0.5, 0.035_504_052_794_355_772, 0.015_926_049_335_925_278),
            (1.0, 0.139_688_633_491_660_42, 0.105_446_097_849_296_8),
            (2.0, 0.368_509_866_440_305_33, 0.439_324_718_045_782_78),
            (10.0, 1.745_412_390_210_798_6, 5.247_903_572_366_540_6),
        ] {
            let k = ctx(alpha);
            assert!((k.c_alpha() / c - 1.0).abs() < 1e-13, "alpha {alpha}");
            assert!((k.s_alpha() / s - 1.0).abs() < 1e-13, "alpha {alpha}");
        }
    }

    #[test]
    fn support_edge_closed_form() {
        for alpha in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let k = ctx(alpha);
            let c = k.c_alpha();
            assert!((k.s_alpha() - c * (alpha - c) / (1.0 + c)).abs() <= k.root_tol());
            assert!(k.s_alpha() > c * c && alpha > c && k.gamma_alpha() > 0.0);
        }
    }

    #[test]
    fn curvature_two_ways() {
        for alpha in [0.5, 1.0, 2.0, 10.0] {
            let k = ctx(alpha);
            let quad = k.curvature_by_quadrature().unwrap();
            let rel = (quad - k.curvature_at_edge()).abs() / quad.abs();
            assert!(rel < 1e-8, "alpha {alpha}: {rel}");
        }
    }

    #[test]
    fn third_derivative_matches_differentiated_ode() {
        // H''' = 2H/z³ − 2H'/z² + (1/z − 1)H'' at z = −c where H' = 0, H = s
        for alpha in [0.5, 1.0, 2.0, 10.0] {
            let k = ctx(alpha);
            let c = k.c_alpha();
            let ode = -2.0 * k.s_alpha() / c.powi(3) - (1.0 + c) / c * k.curvature_at_edge();
            let rel = (ode - k.third_derivative_at_edge()).abs() / ode.abs();
            assert!(rel < 1e-8, "alpha {alpha}: {rel}");
        }
    }

    #[test]
    fn height_vanishes_left_of_edge() {
        let k = ctx(1.0);
        assert_eq!(k.boundary_height(-k.c_alpha() - 1.0).unwrap(), 0.0);
        assert_eq!(k.boundary_height(-k.c_alpha()).unwrap(), 0.0);
        assert_eq!(k.boundary_weight(-k.c_alpha() - 0.5).unwrap(), 0.0);
    }

    #[test]
    fn height_square_root_edge() {
        let k = ctx(1.0);
        let delta = 1e-8;
        let v = k.boundary_height(-k.c_alpha() + delta).unwrap();
        let ratio = v / (k.gamma_alpha() * delta).sqrt();
        assert!((0.99..=1.01).contains(&ratio), "{ratio}");
    }

    #[test]
    fn height_exponential_tail() {
        let k = ctx(1.0);
        let x = 40.0;
        let v = k.boundary_height(x).unwrap();
        let ratio = v / (PI * x * (-x).exp());
        assert!((0.9..=1.1).contains(&ratio), "{ratio}");
    }

    #[test]
    fn height_solves_defining_equation() {
        let k = ctx(2.0);
        for x in [-k.c_alpha() + 1e-3, -0.3, 0.0, 0.3, 1.0, 4.0, 12.0, 30.0] {
            let v = k.boundary_height(x).unwrap();
            let f = crate::quad::poisson_integral(x, v, k.quad()).unwrap();
            assert!((f - 0.5).abs() < 1e-9, "x = {x}: F = {f}");
            assert!(v > 0.0 && v <= 2f64.sqrt());
        }
    }

    #[test]
    fn slope_matches_central_difference() {
        let k = ctx(1.0);
        let (x, h) = (1.0, 1e-6);
        let fd = (k.boundary_height(x + h).unwrap() - k.boundary_height(x - h).unwrap()) / (2.0 * h);
        let exact = k.boundary_slope(x).unwrap();
        assert!(((fd - exact) / exact).abs() < 1e-5, "{fd} vs {exact}");
    }

    #[test]
    fn slope_sign_near_edge_and_in_tail() {
        let k = ctx(1.0);
        assert!(k.boundary_slope(-k.c_alpha() + 1e-6).unwrap() > 0.0);
        assert!(k.boundary_slope(40.0).unwrap() < 0.0);
        assert!(k.boundary_slope(-k.c_alpha() - 1.0).is_err());
    }

    #[test]
    fn trace_starts_at_support_edge() {
        for alpha in [0.5, 1.0, 2.0, 10.0] {
            let k = ctx(alpha);
            let p = k.boundary_image(-k.c_alpha()).unwrap();
            assert_eq!(p, k.s_alpha());
            let left = k.boundary_image(-k.c_alpha() - 1e-9).unwrap();
            let right = k.boundary_image(-k.c_alpha() + 1e-9).unwrap();
            assert!((left - right).abs() <= 1e-6, "alpha {alpha}");
            assert!(k.boundary_height(-k.c_alpha() + 1e-9).unwrap() <= 1e-4);
        }
    }

    #[test]
    fn trace_approaches_shifted_identity() {
        let k = ctx(1.0);
        // P(x) = x + α + α/x + 2α/x² + O(x⁻³)
        for x in [20.0, 40.0] {
            let expansion = x + 1.0 + 1.0 / x + 2.0 / (x * x);
            assert!((k.boundary_image(x).unwrap() - expansion).abs() < 10.0 / x.powi(3));
        }
    }

    #[test]
    fn trace_slope_limits() {
        let k = ctx(1.0);
        let c = k.c_alpha();
        assert!(k.boundary_image_slope(-c - 1e-6).unwrap() < 1e-2);
        let edge = k.boundary_image_slope(-c + 1e-8).unwrap();
        assert!((edge / k.edge_slope() - 1.0).abs() < 0.01, "{edge} vs {}", k.edge_slope());
        assert!(k.boundary_image_slope(-c).is_err());
    }

    #[test]
    fn trace_slope_matches_central_difference() {
        let k = ctx(1.0);
        let h = 1e-6;
        for x in [-2.0, 1.0] {
            let fd = (k.boundary_image(x + h).unwrap() - k.boundary_image(x - h).unwrap()) / (2.0 * h);
            let exact = k.boundary_image_slope(x).unwrap();
            assert!(((fd - exact) / exact).abs() < 1e-5, "x = {x}: {fd} vs {exact}");
        }
    }

    #[test]
    fn weight_in_tail_and_positivity() {
        let k = ctx(1.0);
        let x = 40.0;
        let q = k.boundary_weight(x).unwrap();
        let approx = PI * (-x).exp() / x;
        assert!((q / approx - 1.0).abs() < 0.1);
        for x in [-k.c_alpha() + 1e-6, 0.0, 0.5, 3.0] {
            assert!(k.boundary_weight(x).unwrap() > 0.0);
        }
    }

    #[test]
    fn alpha_derivatives_match_finite_differences() {
        let h = 1e-5;
        for alpha in [0.5, 1.0, 2.0, 10.0] {
            let k = ctx(alpha);
            let (lo, hi) = (ctx(alpha - h), ctx(alpha + h));
            let dc = (hi.c_alpha() - lo.c_alpha()) / (2.0 * h);
            let ds = (hi.s_alpha() - lo.s_alpha()) / (2.0 * h);
            assert!((dc / k.c_alpha_derivative().unwrap() - 1.0).abs() < 1e-4);
            assert!((ds / k.s_alpha_derivative().unwrap() - 1.0).abs() < 1e-4);
        }
        for alpha in [0.1, 0.5, 1.0, 2.0, 10.0] {
            assert!(ctx(alpha).s_alpha_derivative().unwrap() > 0.0);
        }
    }

    #[test]
    fn edge_constants_just_above_resolution() {
        // c from 1e-137 to 1e-90: (c + t)⁴ alone would underflow; the edge
        // integrals tend to ∫ u/(1 + u)^k du, which is 1/6 for k = 4
        for alpha in [0.0032, 0.004, 0.005] {
            let k = ctx(alpha);
            assert!(k.edge_resolved() && k.gamma_alpha() > 0.0);
            let c = k.c_alpha();
            assert!((k.third_derivative_at_edge() * c * c / -alpha - 1.0).abs() < 1e-8);
            let curvature = k.curvature_by_quadrature().unwrap();
            assert!((curvature / k.curvature_at_edge() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn arctan_brackets() {
        let k = ctx(1.0);
        let (lower, _) = k.height_brackets(10.0, 0.5).unwrap();
        assert!(lower <= k.boundary_height(10.0).unwrap());
        let (_, upper) = k.height_brackets(30.0, 0.5).unwrap();
        assert!(k.boundary_height(30.0).unwrap() <= upper);
        assert!(matches!(k.height_brackets(0.5, 0.5), Err(Error::InvalidInput(_))));
        assert!(k.height_brackets(3.0, 1.0).is_err());
    }
}
