//! Complex transforms: the Cauchy transform of the exponential law, the
//! subordination function `H`, the Voiculescu transform, and the Cauchy
//! transform of the free Gamma law rebuilt from its density. The identity
//! `G_ν(H(z)) = 1/z` ties them together.

use num_complex::Complex64;

use crate::density::{integrate_in_curve, invert_boundary_image};
use crate::error::{Error, Result};
use crate::landscape::AlphaContext;
use crate::quad::adaptive::AdaptiveOptions;
use crate::quad::kernel::kernel_integral;
use crate::quad::QuadratureSettings;
use crate::ComplexValue;

/// Minimum distance from the cut `[0, ∞)` for arguments with `Re z ≥ 0`.
const CUT_MARGIN: f64 = 1e-14;
/// Distance beyond the support edge at which the density integral stops.
const DENSITY_SPAN: f64 = 80.0;

fn check_off_cut(z: ComplexValue) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid(format!("non-finite argument {z}")));
    }
    if z.re >= 0.0 && z.im.abs() < CUT_MARGIN {
        return Err(Error::DomainViolation(format!("{z} lies on the cut [0, inf)")));
    }
    Ok(())
}

fn check_upper(z: ComplexValue) -> Result<()> {
    if !(z.im > 0.0 && z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::DomainViolation(format!("{z} is not in the upper half-plane")));
    }
    Ok(())
}

/// `∫ w(t)/(z − t) dt` for `z` off the cut, by the real kernels applied to
/// the real and imaginary parts of `1/(z − t)`.
fn weighted_cauchy<W>(z: ComplexValue, settings: &QuadratureSettings, w: W) -> Result<ComplexValue>
where
    W: Fn(f64) -> f64,
{
    check_off_cut(z)?;
    let y = z.im.abs();
    let r = kernel_integral(z.re, y, settings, settings.abs_tol, |t, k| {
        let wt = w(t);
        [wt * k.re, wt * k.inv]
    })?;
    let value = Complex64::new(r.value[0], -y * r.value[1]);
    Ok(if z.im < 0.0 { value.conj() } else { value })
}

/// Cauchy transform `∫ e^{-t}/(z − t) dt` of the unit exponential law.
#[doc(alias = "G_mu1")]
pub fn cauchy_transform_exp(z: ComplexValue, settings: &QuadratureSettings) -> Result<ComplexValue> {
    weighted_cauchy(z, settings, |t| (-t).exp())
}

/// `H(z) = z + α + α∫ t e^{-t}/(z − t) dt`.
#[doc(alias = "H_alpha_at")]
pub fn subordinator(ctx: &AlphaContext, z: ComplexValue) -> Result<ComplexValue> {
    let a = ctx.alpha();
    let integral = weighted_cauchy(z, ctx.quad(), |t| t * (-t).exp())?;
    Ok(z + a + a * integral)
}

/// `H'(z) = 1 − α∫ t e^{-t}/(z − t)² dt`.
pub fn subordinator_derivative(ctx: &AlphaContext, z: ComplexValue) -> Result<ComplexValue> {
    check_off_cut(z)?;
    let settings = ctx.quad();
    let y = z.im.abs();
    // 1/(z−t)² = ((x−t)² − y²)/D² − 2iy(x−t)/D²
    let r = kernel_integral(z.re, y, settings, settings.abs_tol, |t, k| {
        let w = t * (-t).exp();
        [w * (k.inv - 2.0 * k.inv_sq), w * k.re_sq]
    })?;
    let integral = Complex64::new(r.value[0], -2.0 * r.value[1]);
    let integral = if z.im < 0.0 { integral.conj() } else { integral };
    Ok(1.0 - ctx.alpha() * integral)
}

/// `φ(z) = α + α∫ t e^{-t}/(z − t) dt`, so that `H(z) = z + φ(z)`.
pub fn voiculescu_transform(ctx: &AlphaContext, z: ComplexValue) -> Result<ComplexValue> {
    check_upper(z)?;
    let a = ctx.alpha();
    Ok(a + a * weighted_cauchy(z, ctx.quad(), |t| t * (-t).exp())?)
}

/// `∫ f(ξ)/(w − ξ) dξ` over `[s, s + 80]` for `w` in the upper half-plane.
#[doc(alias = "G_nu_from_density")]
pub fn cauchy_transform_from_density(ctx: &AlphaContext, w: ComplexValue) -> Result<ComplexValue> {
    check_upper(w)?;
    let s = ctx.s_alpha();
    let upper = s + DENSITY_SPAN;
    let focus = if w.re < upper {
        let x0 = invert_boundary_image(ctx, w.re.max(s))?;
        let slope = if w.re > s {
            ctx.boundary_image_slope(x0)?
        } else {
            ctx.edge_slope()
        };
        let slope = if slope.is_finite() && slope > 0.0 { slope } else { 1.0 };
        Some((x0, w.im / slope))
    } else {
        None
    };
    let opts = AdaptiveOptions {
        abs_tol: 1e-13 / w.norm().max(1.0),
        rel_tol: ctx.quad().rel_tol,
        max_subdiv: 4 * ctx.quad().max_subdiv,
    };
    let r = integrate_in_curve(ctx, upper, focus, opts, |xi| {
        let d = w.re - xi;
        let den = d * d + w.im * w.im;
        [d / den, -w.im / den]
    })?;
    Ok(Complex64::new(r.value[0], r.value[1]))
}

/// Largest `|z·G_ν(H(z)) − 1|` over the samples, each of which must lie
/// strictly above the curve.
pub fn verify_subordination(ctx: &AlphaContext, samples: &[ComplexValue]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &z in samples {
        let height = ctx.boundary_height(z.re)?;
        if !(z.im > height) {
            return Err(Error::DomainViolation(format!(
                "{z} is not above the curve (height {height})"
            )));
        }
        let w = subordinator(ctx, z)?;
        let g = cauchy_transform_from_density(ctx, w)?;
        worst = worst.max((z * g - 1.0).norm());
    }
    Ok(worst)
}
