//! Free cumulants `r_p = α (p−1)!`, the moments they generate, and moments
//! computed directly from the density.

use crate::density::integrate_in_curve;
use crate::error::{Error, Result};
use crate::landscape::AlphaContext;
use crate::quad::adaptive::AdaptiveOptions;
use crate::quad::upper_incomplete_gamma;

/// Highest order supported by [`moments_from_density`].
pub const MAX_DENSITY_ORDER: usize = 10;

/// Moments of the density together with its total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMoments {
    pub mass: f64,
    /// `m_1 ..= m_p`.
    pub moments: Vec<f64>,
    /// Truncation point of the integrals.
    pub upper_limit: f64,
}

/// `[α·0!, α·1!, …, α·(p_max−1)!]`.
pub fn free_cumulants(alpha: f64, p_max: usize) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must be positive and finite, got {alpha}")));
    }
    if p_max == 0 {
        return Err(Error::invalid("p_max must be at least 1"));
    }
    let mut out = Vec::with_capacity(p_max);
    let mut factorial = 1.0;
    for p in 1..=p_max {
        out.push(alpha * factorial);
        factorial *= p as f64;
    }
    Ok(out)
}

/// Moments `m_1..m_{p_max}` from free cumulants `r_1..`:
/// `m_p = Σ_k (1/k)·C(p, k−1)·[z^p] (Σ_q r_q z^q)^k`.
pub fn moments_from_cumulants(r: &[f64], p_max: usize) -> Result<Vec<f64>> {
    if p_max == 0 || r.len() < p_max {
        return Err(Error::invalid(format!(
            "need p_max >= 1 cumulants, got {} for p_max = {p_max}",
            r.len()
        )));
    }
    // series[q] is the coefficient of z^q; index 0 stays zero
    let mut base = vec![0.0; p_max + 1];
    base[1..].copy_from_slice(&r[..p_max]);
    let mut power = base.clone();
    let mut moments = vec![0.0; p_max];
    for k in 1..=p_max {
        if k > 1 {
            let mut next = vec![0.0; p_max + 1];
            for (i, &a) in power.iter().enumerate().skip(k - 1) {
                for (j, &b) in base.iter().enumerate().skip(1) {
                    if i + j > p_max {
                        break;
                    }
                    next[i + j] += a * b;
                }
            }
            power = next;
        }
        for p in k..=p_max {
            moments[p - 1] += binomial(p, k - 1) / k as f64 * power[p];
        }
    }
    Ok(moments)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Cut-off `T` with `2αe^α·Γ(p, T) < 1e-13·α(p−1)!`; since `m_p ≥ r_p`,
/// the discarded tail of `m_p` is then a negligible fraction of it.
fn moment_cutoff(ctx: &AlphaContext, p_max: usize) -> f64 {
    let alpha = ctx.alpha();
    let p = p_max.max(1) as u32;
    let bound = 1e-13 * alpha * (1..p).map(f64::from).product::<f64>();
    let mut t = ctx.s_alpha() + 40.0;
    while 2.0 * alpha * alpha.exp() * upper_incomplete_gamma(p, t) >= bound {
        t += 10.0;
    }
    t
}

/// `∫ ξ^p f(ξ) dξ` for `p = 0..=p_max`, integrated along the curve.
pub fn moments_from_density(ctx: &AlphaContext, p_max: usize) -> Result<DensityMoments> {
    if p_max > MAX_DENSITY_ORDER {
        return Err(Error::invalid(format!(
            "density moments are limited to order {MAX_DENSITY_ORDER}, got {p_max}"
        )));
    }
    let upper = moment_cutoff(ctx, p_max);
    let opts = AdaptiveOptions {
        abs_tol: 1e-300,
        rel_tol: ctx.quad().rel_tol.max(1e-12),
        max_subdiv: ctx.quad().max_subdiv,
    };
    let r = integrate_in_curve::<{ MAX_DENSITY_ORDER + 1 }, _>(ctx, upper, None, opts, |xi| {
        let mut powers = [1.0; MAX_DENSITY_ORDER + 1];
        for k in 1..=p_max {
            powers[k] = powers[k - 1] * xi;
        }
        powers
    })?;
    Ok(DensityMoments {
        mass: r.value[0],
        moments: r.value[1..=p_max].to_vec(),
        upper_limit: upper,
    })
}

/// `m_p(α)/α` for `p = 1..=p_max`, which tends to `(p−1)!` as `α → 0`.
pub fn small_alpha_moment_limit(alpha: f64, p_max: usize) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha <= 0.01) {
        return Err(Error::invalid(format!("small-alpha limit needs 0 < alpha <= 0.01, got {alpha}")));
    }
    let m = moments_from_cumulants(&free_cumulants(alpha, p_max)?, p_max)?;
    Ok(m.into_iter().map(|v| v / alpha).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulant_examples() {
        assert_eq!(free_cumulants(1.0, 4).unwrap(), vec![1.0, 1.0, 2.0, 6.0]);
        assert_eq!(free_cumulants(2.0, 1).unwrap(), vec![2.0]);
        assert_eq!(free_cumulants(0.5, 5).unwrap()[4], 12.0);
        assert!(free_cumulants(1.0, 0).is_err());
        assert!(free_cumulants(0.0, 3).is_err());
    }

    #[test]
    fn low_moments_are_polynomials_in_alpha() {
        for alpha in [0.3, 1.0, 2.5] {
            let m = moments_from_cumulants(&free_cumulants(alpha, 3).unwrap(), 3).unwrap();
            assert!((m[0] - alpha).abs() < 1e-14);
            assert!((m[1] - (alpha + alpha * alpha)).abs() < 1e-13);
            let m3 = 2.0 * alpha + 3.0 * alpha * alpha + alpha.powi(3);
            assert!((m[2] - m3).abs() < 1e-12 * m3);
        }
    }

    #[test]
    fn unit_alpha_moments() {
        let m = moments_from_cumulants(&free_cumulants(1.0, 3).unwrap(), 3).unwrap();
        assert_eq!(m, vec![1.0, 2.0, 6.0]);
    }

    #[test]
    fn rejects_short_cumulant_list() {
        assert!(moments_from_cumulants(&[1.0, 1.0], 3).is_err());
    }

    #[test]
    fn density_moments_match_recursion() {
        let ctx = AlphaContext::new(1.0).unwrap();
        let d = moments_from_density(&ctx, 6).unwrap();
        assert!((d.mass - 1.0).abs() < 1e-8, "{}", d.mass);
        let exact = moments_from_cumulants(&free_cumulants(1.0, 6).unwrap(), 6).unwrap();
        for (p, (a, b)) in d.moments.iter().zip(&exact).enumerate() {
            assert!(((a - b) / b).abs() < 1e-7, "order {}: {a} vs {b}", p + 1);
        }
        assert!(moments_from_density(&ctx, 11).is_err());
    }

    #[test]
    fn small_alpha_ratios() {
        let r = small_alpha_moment_limit(1e-4, 3).unwrap();
        assert_eq!(r[0], 1.0);
        assert!((1.99..=2.01).contains(&r[2]));
        assert!(small_alpha_moment_limit(0.1, 3).is_err());
    }
}
