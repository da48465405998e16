//! The density `f(ξ) = Q(P⁻¹(ξ))/π` on the support `[s, ∞)`, its mode, its
//! square-root edge and exponential tail, and integrals against it.

use std::cell::RefCell;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::landscape::AlphaContext;
use crate::quad::adaptive::{integrate, Adaptive, AdaptiveOptions, QuadValue};
use crate::roots::{solve_increasing, Monotone};

/// Below this distance from the edge, relative to `min(1, s)`, the
/// square-root law replaces inversion.
const EDGE_SHORTCUT: f64 = 1e-10;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Sampling pattern for [`density_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Uniform,
    /// Geometric in the distance to the support edge.
    LogEdge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    pub alpha: f64,
    pub xi: Vec<f64>,
    pub f: Vec<f64>,
    pub grid_kind: GridKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeReport {
    /// Location of the maximum of the density.
    pub omega: f64,
    pub f_at_mode: f64,
    /// Curve parameter mapped to `omega`.
    pub x_at_mode: f64,
    /// Final width of the golden-section bracket in the curve parameter.
    pub bracket_width: f64,
}

/// Solves `P(x) = xi` on either branch of the real trace.
#[doc(alias = "invert_P")]
pub fn invert_boundary_image(ctx: &AlphaContext, xi: f64) -> Result<f64> {
    if !xi.is_finite() {
        return Err(Error::invalid(format!("xi must be finite, got {xi}")));
    }
    let s = ctx.s_alpha();
    let c = ctx.c_alpha();
    let edge = -c;
    if xi == s {
        return Ok(edge);
    }
    let above = xi > s;
    let (lo, hi) = if above { (edge, f64::INFINITY) } else { (f64::NEG_INFINITY, edge) };

    let mut start = xi - ctx.alpha();
    if ctx.edge_resolved() && (start <= edge) == above {
        // the shifted-identity guess landed on the wrong branch
        start = edge + (xi - s) / ctx.edge_slope();
    }
    if above && start <= edge {
        start = edge + (xi - s).min(1.0);
    }
    if !above && start >= edge {
        start = edge - (s - xi).max(f64::MIN_POSITIVE);
    }

    let tol = ctx.root_tol() * xi.abs().max(1.0);
    solve_increasing(
        "trace inversion",
        Monotone {
            lo,
            hi,
            start,
            stride: 1.0,
            value_tol: tol,
            max_iter: 200,
        },
        |x| {
            let e = ctx.evaluate(x)?;
            Ok((e.p - xi, e.dp))
        },
        |x| 1e-15 * x.abs().max(1.0),
    )
}

/// Density of the free Gamma law at `xi`.
#[doc(alias = "f_alpha")]
pub fn density(ctx: &AlphaContext, xi: f64) -> Result<f64> {
    if !xi.is_finite() {
        return Err(Error::invalid(format!("xi must be finite, got {xi}")));
    }
    let s = ctx.s_alpha();
    if xi <= s {
        return Ok(0.0);
    }
    if ctx.edge_resolved() && xi - s < EDGE_SHORTCUT * s.min(1.0) {
        return Ok(edge_coefficient(ctx)? * (xi - s).sqrt());
    }
    let x = invert_boundary_image(ctx, xi)?;
    Ok(ctx.boundary_weight(x)? / PI)
}

/// `K` in `f(s + δ) ~ K √δ`.
pub fn edge_coefficient(ctx: &AlphaContext) -> Result<f64> {
    let c = ctx.c_alpha();
    // s − c² without cancellation
    let gap = c * (ctx.alpha() - 2.0 * c - c * c) / (1.0 + c);
    if !ctx.edge_resolved() || gap <= 0.0 {
        return Err(Error::DegenerateSlope {
            context: "s - c^2",
            value: gap,
        });
    }
    Ok(2f64.sqrt() / (PI * c * gap.sqrt()))
}

/// `f(ξ) ξ e^ξ / (α e^α)`, which tends to one in the tail.
pub fn tail_ratio(ctx: &AlphaContext, xi: f64) -> Result<f64> {
    let alpha = ctx.alpha();
    Ok(density(ctx, xi)? * xi / alpha * (xi - alpha).exp())
}

/// `f(s + δ) / (K √δ)`, which tends to one at the edge.
pub fn edge_ratio(ctx: &AlphaContext, delta: f64) -> Result<f64> {
    Ok(density(ctx, ctx.s_alpha() + delta)? / (edge_coefficient(ctx)? * delta.sqrt()))
}

/// Maximises `Q` over the curve parameter; `P` is increasing, so this is
/// also the maximiser of the density.
pub fn find_mode(ctx: &AlphaContext) -> Result<ModeReport> {
    require_resolved_edge(ctx, "mode search")?;
    let c = ctx.c_alpha();
    let edge = -c;
    let span = 3.0 * c + 10.0;
    let q = |x: f64| ctx.boundary_weight(x);

    // coarse scan, geometric in the distance to the edge; for small alpha the
    // mode sits within a few multiples of c of the edge
    let n: usize = 400;
    let first = (1e-9 * span).min(1e-3 * c);
    let ratio = (span / first).powf(1.0 / (n - 1) as f64);
    let xs: Vec<f64> = (0..n).map(|k| edge + first * ratio.powi(k as i32)).collect();
    let qs = xs.iter().map(|&x| q(x)).collect::<Result<Vec<f64>>>()?;
    let best = qs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    if best == n - 1 {
        return Err(Error::no_convergence("mode search", "maximum at the end of the scan"));
    }
    let mut a = if best == 0 { edge } else { xs[best - 1] };
    let mut b = xs[best + 1];

    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut q1 = q(x1)?;
    let mut q2 = q(x2)?;
    let width_tol = 1e-8 * (b - a);
    let mut iterations = 0;
    while b - a > width_tol {
        iterations += 1;
        if iterations > 200 {
            return Err(Error::no_convergence("mode search", format!("bracket [{a}, {b}]")));
        }
        if q1 < q2 {
            a = x1;
            x1 = x2;
            q1 = q2;
            x2 = a + GOLDEN * (b - a);
            q2 = q(x2)?;
        } else {
            b = x2;
            x2 = x1;
            q2 = q1;
            x1 = b - GOLDEN * (b - a);
            q1 = q(x1)?;
        }
    }
    let x_at_mode = 0.5 * (a + b);
    let point = ctx.curve_point(x_at_mode)?;
    // the trace carries absolute roundoff of order eps·α; a mode closer than
    // that to the edge cannot be located in ξ
    let resolution = 1e4 * f64::EPSILON * (ctx.alpha() + x_at_mode.abs());
    if point.p - ctx.s_alpha() < resolution {
        return Err(Error::no_convergence(
            "mode search",
            format!("mode lies within {resolution:e} of the support edge"),
        ));
    }
    Ok(ModeReport {
        omega: point.p,
        f_at_mode: point.q / PI,
        x_at_mode,
        bracket_width: b - a,
    })
}

fn grid(ctx: &AlphaContext, xi_min: f64, xi_max: f64, n: usize, kind: GridKind) -> Result<Vec<f64>> {
    match kind {
        GridKind::Uniform => {
            let step = (xi_max - xi_min) / (n - 1) as f64;
            Ok((0..n)
                .map(|i| if i == n - 1 { xi_max } else { xi_min + step * i as f64 })
                .collect())
        }
        GridKind::LogEdge => {
            let s = ctx.s_alpha();
            let top = xi_max - s;
            if top <= 0.0 {
                return Err(Error::invalid("log-edge grid needs xi_max above the support edge"));
            }
            let mut out = Vec::with_capacity(n);
            let (bottom, count) = if xi_min > s {
                (xi_min - s, n)
            } else {
                out.push(xi_min);
                (top * 1e-10, n - 1)
            };
            if count == 1 {
                out.push(xi_max);
            } else {
                let ratio = (top / bottom).powf(1.0 / (count - 1) as f64);
                for k in 0..count {
                    out.push(if k == count - 1 { xi_max } else { s + bottom * ratio.powi(k as i32) });
                }
            }
            Ok(out)
        }
    }
}

/// Density sampled on a grid; points are evaluated in parallel.
pub fn density_table(
    ctx: &AlphaContext,
    xi_min: f64,
    xi_max: f64,
    n: usize,
    grid_kind: GridKind,
) -> Result<DensityTable> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 points, got {n}")));
    }
    if !(xi_min.is_finite() && xi_max.is_finite() && xi_min < xi_max) {
        return Err(Error::invalid(format!("need xi_min < xi_max, got [{xi_min}, {xi_max}]")));
    }
    let xi = grid(ctx, xi_min, xi_max, n, grid_kind)?;
    let f = xi.par_iter().map(|&x| density(ctx, x)).collect::<Result<Vec<f64>>>()?;
    Ok(DensityTable {
        alpha: ctx.alpha(),
        xi,
        f,
        grid_kind,
    })
}

/// Triples `(x, f(x)/α, e^{-x}/x)`: as `α → 0` the middle entry approaches
/// the last.
pub fn small_alpha_profile(alpha: f64, xs: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    if !(alpha > 0.0 && alpha <= 0.01) {
        return Err(Error::invalid(format!("small-alpha profile needs 0 < alpha <= 0.01, got {alpha}")));
    }
    if let Some(bad) = xs.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::invalid(format!("profile points must be positive, got {bad}")));
    }
    let ctx = AlphaContext::new(alpha)?;
    xs.iter()
        .map(|&x| Ok((x, density(&ctx, x)? / alpha, (-x).exp() / x)))
        .collect()
}

/// When `c` underflows, a fixed share of the mass sits below `1e-300`,
/// between the edge and the smallest representable positive number.
fn require_resolved_edge(ctx: &AlphaContext, context: &'static str) -> Result<()> {
    if ctx.edge_resolved() {
        Ok(())
    } else {
        Err(Error::no_convergence(
            context,
            format!(
                "the support edge (ln c = {:.1}) is below double-precision range",
                ctx.ln_c_alpha()
            ),
        ))
    }
}

/// `∫ g(ξ) f(ξ) dξ` over `[s, upper]`, computed in the curve parameter
/// `x = −c + u²` where `dξ = P'(x)·2u du` and `f = Q/π`; the integrand then
/// vanishes linearly at the edge instead of having a square-root cusp.
///
/// `focus` adds break points graded around the parameter `x₀` with initial
/// spacing `dx` (in `x`), for integrands peaked near `ξ = P(x₀)`.
pub(crate) fn integrate_in_curve<const N: usize, G>(
    ctx: &AlphaContext,
    upper: f64,
    focus: Option<(f64, f64)>,
    opts: AdaptiveOptions,
    g: G,
) -> Result<Adaptive<[f64; N]>>
where
    G: Fn(f64) -> [f64; N],
{
    require_resolved_edge(ctx, "density integral")?;
    let c = ctx.c_alpha();
    let x_top = invert_boundary_image(ctx, upper)?;
    let u_top = (x_top + c).sqrt();

    // graded from well inside the edge layer of width ~c
    let mut breaks = vec![0.0, u_top];
    let mut d = (1e-3 * c).min(1e-3);
    while d < x_top + c {
        breaks.push(d.sqrt());
        d *= 4.0;
    }
    if let Some((x0, dx)) = focus {
        let u0 = (x0 + c).max(0.0).sqrt();
        let du = if u0 > 0.0 { dx / (2.0 * u0) } else { dx.sqrt() };
        let mut step = du;
        while step < u_top {
            breaks.push(u0 + step);
            breaks.push(u0 - step);
            step *= 4.0;
        }
        breaks.push(u0);
    }
    breaks.retain(|&u| (0.0..=u_top).contains(&u));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1e-300));

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let result = integrate(
        |u: f64| {
            let x = -c + u * u;
            match ctx.evaluate(x) {
                Ok(e) => {
                    let w = e.q / PI * e.dp * 2.0 * u;
                    let mut out = g(e.p);
                    for v in out.iter_mut() {
                        *v *= w;
                    }
                    out
                }
                Err(err) => {
                    failure.borrow_mut().get_or_insert(err);
                    [f64::NAN; N]
                }
            }
        },
        &breaks,
        opts,
    );
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let r = result?;
    for i in 0..N {
        if !r.value.get(i).is_finite() {
            return Err(Error::no_convergence("density integral", "non-finite result"));
        }
    }
    Ok(r)
}
