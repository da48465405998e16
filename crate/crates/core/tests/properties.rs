use freegamma::landscape::AlphaContext;
use freegamma::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn ctx(alpha: f64) -> AlphaContext {
    AlphaContext::new(alpha).unwrap()
}

fn alpha_strategy() -> impl Strategy<Value = f64> {
    (-2.4f64..2.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn edge_inequalities(alpha in alpha_strategy()) {
        let k = ctx(alpha);
        let c = k.c_alpha();
        prop_assert!(alpha > c);
        prop_assert!(k.s_alpha() > c * c);
        prop_assert!(k.gamma_alpha() > 0.0);
        prop_assert!(k.curvature_at_edge() < 0.0);
        prop_assert!(k.s_alpha_derivative().unwrap() > 0.0);
        prop_assert!(k.c_alpha_derivative().unwrap() > 0.0);
    }

    #[test]
    fn height_solves_defining_equation(alpha in 0.3f64..12.0, t in 0.0f64..1.0) {
        let k = ctx(alpha);
        let x = -k.c_alpha() + 1e-6 + t * 30.0;
        let v = k.boundary_height(x).unwrap();
        prop_assert!(v > 0.0 && v <= alpha.sqrt());
        let f = poisson_integral(x, v, k.quad()).unwrap();
        prop_assert!((f - 1.0 / alpha).abs() <= 10.0 * k.root_tol() / alpha.min(1.0), "{}", f - 1.0 / alpha);
    }

    #[test]
    fn trace_is_increasing(alpha in 0.3f64..12.0, a in -6.0f64..25.0, gap in 1e-3f64..5.0) {
        let k = ctx(alpha);
        let (x1, x2) = (a, a + gap);
        prop_assert!(k.boundary_image(x1).unwrap() < k.boundary_image(x2).unwrap());
        if x1 != -k.c_alpha() {
            prop_assert!(k.boundary_image_slope(x1).unwrap() > 0.0);
        }
    }

    #[test]
    fn seam_is_continuous(alpha in 0.3f64..12.0) {
        let k = ctx(alpha);
        let c = k.c_alpha();
        prop_assert!(k.boundary_height(-c + 1e-9).unwrap() <= 1e-4);
        prop_assert_eq!(k.boundary_height(-c - 1e-9).unwrap(), 0.0);
        let jump = (k.boundary_image(-c + 1e-9).unwrap() - k.boundary_image(-c - 1e-9).unwrap()).abs();
        prop_assert!(jump <= 1e-6, "{}", jump);
    }

    #[test]
    fn inversion_round_trip(alpha in 0.3f64..12.0, x in -5.0f64..25.0) {
        let k = ctx(alpha);
        let xi = k.boundary_image(x).unwrap();
        let back = invert_boundary_image(&k, xi).unwrap();
        prop_assert!((back - x).abs() < 1e-8, "{} vs {}", back, x);
    }

    #[test]
    fn density_is_supported_on_the_half_line(alpha in 0.3f64..12.0, offset in -5.0f64..30.0) {
        let k = ctx(alpha);
        let xi = k.s_alpha() + offset;
        let f = density(&k, xi).unwrap();
        prop_assert!(f >= 0.0);
        prop_assert_eq!(f == 0.0, xi <= k.s_alpha());
    }

    #[test]
    fn trace_is_real_on_curve(alpha in 0.3f64..12.0, t in 0.0f64..1.0) {
        let k = ctx(alpha);
        let x = -k.c_alpha() + 1e-4 + t * 15.0;
        let v = k.boundary_height(x).unwrap();
        let h = subordinator(&k, Complex64::new(x, v)).unwrap();
        prop_assert!(h.im.abs() < 1e-8, "{}", h.im);
    }

    #[test]
    fn subordinator_ode(alpha in 0.3f64..12.0, re in -5.0f64..-0.01, im in -5.0f64..5.0) {
        let k = ctx(alpha);
        let z = Complex64::new(re, im);
        let h = subordinator(&k, z).unwrap();
        let dh = subordinator_derivative(&k, z).unwrap();
        let residual = (dh - (alpha + z + (1.0 / z - 1.0) * h)).norm();
        prop_assert!(residual < 1e-6, "{}", residual);
    }

    #[test]
    fn exponential_transform_symmetry(re in -5.0f64..5.0, im in 1e-6f64..5.0) {
        let q = QuadratureSettings::default();
        let z = Complex64::new(re, im);
        let g = cauchy_transform_exp(z, &q).unwrap();
        let gc = cauchy_transform_exp(z.conj(), &q).unwrap();
        prop_assert!((g.conj() - gc).norm() <= 1e-14 * g.norm());
        prop_assert!(g.im < 0.0);
    }

    #[test]
    fn moment_polynomials(alpha in 1e-3f64..20.0) {
        let m = moments_from_cumulants(&free_cumulants(alpha, 4).unwrap(), 4).unwrap();
        let a = alpha;
        let expect = [
            a,
            a + a * a,
            2.0 * a + 3.0 * a * a + a.powi(3),
            // r4 + 4 r1 r3 + 2 r2² + 6 r1² r2 + r1⁴
            6.0 * a + 10.0 * a * a + 6.0 * a.powi(3) + a.powi(4),
        ];
        for (got, want) in m.iter().zip(expect) {
            prop_assert!(((got - want) / want).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn density_transform_is_herglotz(alpha in 0.5f64..4.0, re in -2.0f64..10.0, im in 1e-3f64..3.0) {
        let k = ctx(alpha);
        let g = cauchy_transform_from_density(&k, Complex64::new(re, im)).unwrap();
        prop_assert!(g.im < 0.0);
    }
}

#[test]
fn small_alpha_ratios_approach_limit() {
    let ratio = |alpha: f64| {
        let rows = small_alpha_profile(alpha, &[1.0]).unwrap();
        (rows[0].1 / rows[0].2 - 1.0).abs()
    };
    let errs: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&a| ratio(a)).collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    for alpha in [1e-3, 1e-4] {
        let r = small_alpha_profile(alpha, &[5.0]).unwrap();
        assert!((r[0].1 / r[0].2 - 1.0).abs() < 0.02);
    }
    let limits: Vec<Vec<f64>> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&a| small_alpha_moment_limit(a, 4).unwrap())
        .collect();
    for (a, (b, c)) in limits[0].iter().zip(limits[1].iter().zip(&limits[2])).skip(1) {
        assert!(a > b && b > c);
    }
}

#[test]
fn mode_is_unique_at_half_height() {
    let k = ctx(1.0);
    let mode = find_mode(&k).unwrap();
    let level = mode.f_at_mode / 2.0;
    let s = k.s_alpha();
    let t = density_table(&k, s, s + 20.0, 2000, GridKind::Uniform).unwrap();
    let crossings = t
        .f
        .windows(2)
        .filter(|w| (w[0] - level).signum() != (w[1] - level).signum())
        .count();
    assert_eq!(crossings, 2);
}

#[test]
fn table_mass_by_trapezoid() {
    let k = ctx(1.0);
    let s = k.s_alpha();
    let t = density_table(&k, s, s + 60.0, 20_000, GridKind::Uniform).unwrap();
    let mass: f64 = t
        .xi
        .windows(2)
        .zip(t.f.windows(2))
        .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
        .sum();
    assert!((mass - 1.0).abs() < 1e-3, "{mass}");
}

#[test]
fn variance_equals_second_cumulant() {
    for alpha in [0.5, 2.0] {
        let d = moments_from_density(&ctx(alpha), 2).unwrap();
        let variance = d.moments[1] - d.moments[0] * d.moments[0];
        assert!(((variance - alpha) / alpha).abs() < 1e-4);
    }
}
