use hypkit::classify::FamilyParams;
use hypkit::gjms::{
    apply_p1, apply_pk, apply_pk_ordered, bound_bracket, covariance_residual, euclid_pullback_pk,
    green_bound_check, green_convolve_radial, green_double_inversion_residual, green_kernel, green_symmetry_residual,
    pk_constant, radial_laplace_beltrami, weight_identity_defect, ConvolveOptions, FactorOrder, GreenKernel,
    GreenParams, OperatorStencil,
};
use hypkit::kelvin::KelvinSphere;
use hypkit::profile::{half_shifted_grid, uniform_grid};
use hypkit::{Dd, Dimensions, Error, Float, RadialProfile, Real};
use proptest::prelude::*;

fn dims(n: usize, k: usize) -> Dimensions {
    Dimensions::new(n, k).unwrap()
}

fn max_rel(a: &RadialProfile<Dd>, b: &RadialProfile<Dd>) -> f64 {
    assert_eq!(a.grid(), b.grid());
    let scale = a.max_abs().to64();
    a.values().iter().zip(b.values()).map(|(x, y)| (*x - *y).to64().abs() / scale).fold(0.0, f64::max)
}

#[test]
fn laplacian_kills_constants() {
    let u = RadialProfile::from_fn(uniform_grid(0.3, 3.0, 200), |_| 2.0f64).unwrap();
    let l = radial_laplace_beltrami(&u, dims(5, 1)).unwrap();
    assert!(l.values().iter().all(|v| v.abs() < 1e-9));
}

#[test]
fn laplacian_of_cosh_converges_at_fourth_order() {
    let d = dims(5, 1);
    let err = |count: usize| {
        let u = RadialProfile::from_fn(uniform_grid(Dd::c(0.5), Dd::c(3.0), count), |r: Dd| r.cosh()).unwrap();
        let l = radial_laplace_beltrami(&u, d).unwrap();
        l.grid().iter().zip(l.values()).map(|(&r, &v)| (v - Dd::c(5.0) * r.cosh()).to64().abs()).fold(0.0, f64::max)
    };
    let (e1, e2) = (err(101), err(201));
    let ratio = e1 / e2;
    assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
}

#[test]
fn mirrored_grid_keeps_all_nodes() {
    let u = RadialProfile::from_fn(half_shifted_grid(0.01f64, 100), |r| (r * r).cos()).unwrap().with_even(true);
    let l = radial_laplace_beltrami(&u, dims(5, 1)).unwrap();
    assert_eq!(l.len(), 98);
    assert!(l.is_even());
    let v = RadialProfile::from_fn(uniform_grid(0.5f64, 1.5, 100), |r| r).unwrap();
    assert_eq!(radial_laplace_beltrami(&v, dims(5, 1)).unwrap().len(), 96);
}

#[test]
fn p1_is_first_pk() {
    let d = dims(6, 1);
    let fp = FamilyParams::new(1.0, -0.3, d).unwrap();
    let u = fp.profile(Dd::c(0.01), Dd::c(2.0)).unwrap();
    let a = apply_p1(&u, d).unwrap();
    let b = apply_pk(&u, d).unwrap();
    assert_eq!(a.values(), b.values());
}

#[test]
fn constants_give_product_of_shifts() {
    for (n, k) in [(5, 1), (5, 2), (6, 2), (7, 3), (9, 4)] {
        let d = dims(n, k);
        let u = RadialProfile::from_fn(uniform_grid(Dd::c(0.5), Dd::c(2.0), 100), |_| Dd::c(1.0)).unwrap();
        let p = apply_pk(&u, d).unwrap();
        let want = pk_constant::<Dd>(d);
        assert_eq!(p.len(), 100 - 4 * k);
        for v in p.values() {
            assert!(((*v - want) / want).to64().abs() < 1e-20, "({n},{k})");
        }
    }
    assert_eq!(pk_constant::<f64>(dims(6, 2)), -6.0 * -4.0);
}

#[test]
fn factor_order_does_not_matter() {
    for (n, k) in [(6, 2), (7, 3)] {
        let d = dims(n, k);
        let fp = FamilyParams::new(1.0, -0.7, d).unwrap();
        let u = fp.profile(Dd::c(0.005), Dd::c(2.5)).unwrap();
        let a = apply_pk_ordered(&u, d, FactorOrder::Ascending).unwrap();
        let b = apply_pk_ordered(&u, d, FactorOrder::Descending).unwrap();
        assert!(max_rel(&a, &b) < 1e-9);
    }
}

#[test]
fn operator_is_linear() {
    let d = dims(7, 3);
    let grid = uniform_grid(Dd::c(0.4), Dd::c(3.0), 300);
    let f = RadialProfile::from_fn(grid.clone(), |r: Dd| (-r).exp()).unwrap();
    let g = RadialProfile::from_fn(grid.clone(), |r: Dd| r.sin()).unwrap();
    let fg = RadialProfile::from_fn(grid, |r: Dd| Dd::c(2.0) * (-r).exp() - Dd::c(3.0) * r.sin()).unwrap();
    let (pf, pg, pfg) = (apply_pk(&f, d).unwrap(), apply_pk(&g, d).unwrap(), apply_pk(&fg, d).unwrap());
    let combo = pf.map_values_indexed(|i, _, v| Dd::c(2.0) * v - Dd::c(3.0) * pg.values()[i]).unwrap();
    assert!(max_rel(&pfg, &combo) < 1e-20);
}

#[test]
fn coarse_grids_are_rejected() {
    let d = dims(7, 3);
    let u = RadialProfile::from_fn(uniform_grid(0.5f64, 1.0, 16), |r| r).unwrap();
    assert!(matches!(apply_pk(&u, d), Err(Error::GridTooCoarse { count: 16, needed: 17 })));
    assert!(OperatorStencil::new(0.5f64, 1.0, 16, d).is_err());
    let st = OperatorStencil::new(0.5f64, 1.0, 17, d).unwrap();
    assert!((st.spacing() - 0.5 / 16.0).abs() < 1e-15);
    assert_eq!(st.grid().len(), 17);
}

#[test]
fn hyperbolic_and_euclidean_routes_agree() {
    for (n, k) in [(5, 1), (6, 2), (7, 3)] {
        let d = dims(n, k);
        let fp = FamilyParams::new(1.0, -0.9, d).unwrap();
        let hr = 0.0025;
        let hyp = apply_pk(&fp.profile(Dd::c(hr), Dd::c(2.5)).unwrap(), d).unwrap();
        let euc = euclid_pullback_pk(&fp.profile_euclid(Dd::c(hr / 2.0), Dd::c(0.9)).unwrap(), d).unwrap();
        let scale = hyp.max_abs().to64();
        for (&r, &v) in hyp.grid().iter().zip(hyp.values()) {
            let w = euc.eval((r * Dd::c(0.5)).tanh()).unwrap();
            assert!((v - w).to64().abs() <= 1e-5 * scale, "({n},{k}) r={r}");
        }
    }
}

#[test]
fn euclidean_route_respects_boundary() {
    let d = dims(5, 1);
    let u = RadialProfile::from_fn(half_shifted_grid(0.001f64, 1000), |_| 1.0).unwrap().with_even(true);
    assert!(matches!(euclid_pullback_pk(&u, d), Err(Error::Domain(_))));
}

#[test]
fn conformal_weight_identity() {
    for i in 0..1000 {
        let s = 0.99 * i as f64 / 1000.0;
        assert!(weight_identity_defect(s) < 1e-12, "s={s}");
    }
}

const PAIRS: [(usize, usize); 4] = [(5, 1), (5, 2), (6, 2), (7, 3)];

#[test]
fn kernels_positive_and_decreasing() {
    for (n, k) in PAIRS {
        let p = GreenParams::new(dims(n, k));
        for kind in GreenKernel::ALL {
            let mut prev = f64::INFINITY;
            for i in 0..600 {
                let rho = 1e-3 * (3e4f64).powf(i as f64 / 599.0);
                let g = green_kernel(kind, rho, &p).unwrap();
                assert!(g > 0.0 && g < prev, "{} ({n},{k}) ρ={rho}", kind.name());
                prev = g;
            }
        }
    }
}

#[test]
fn kernels_reject_the_pole() {
    let p = GreenParams::new(dims(5, 1));
    assert!(matches!(green_kernel(GreenKernel::Printed, 0.0, &p), Err(Error::Domain(_))));
}

#[test]
fn pole_matches_riesz_normalisation() {
    for (n, k) in PAIRS {
        let p = GreenParams::new(dims(n, k));
        let want = 1.0 / p.riesz_gamma::<f64>();
        for kind in GreenKernel::ALL {
            let rho = 1e-4f64;
            let got = green_kernel(kind, rho, &p).unwrap() * rho.powi((n - 2 * k) as i32);
            assert!((got / want - 1.0).abs() < 1e-3, "{} ({n},{k})", kind.name());
        }
    }
}

#[test]
fn harmonic_kernel_equals_bracket_for_k1() {
    for n in [3, 5, 8] {
        let d = dims(n, 1);
        let p = GreenParams::new(d);
        for i in 1..100 {
            let rho = 0.1 * i as f64;
            let g = green_kernel(GreenKernel::Harmonic, rho, &p).unwrap();
            let b = bound_bracket(rho, d) / p.riesz_gamma::<f64>();
            assert!((g / b - 1.0).abs() < 1e-10, "n={n} ρ={rho}");
        }
    }
}

#[test]
fn log_derivative_tends_to_rate() {
    for (n, k) in PAIRS {
        let p = GreenParams::new(dims(n, k));
        for kind in GreenKernel::ALL {
            let (a, b) = (39.5, 40.5);
            let slope = -(green_kernel(kind, b, &p).unwrap().ln() - green_kernel(kind, a, &p).unwrap().ln());
            let rate = kind.far_field_rate(p.dims);
            assert!((slope / rate - 1.0).abs() < 1e-6, "{} ({n},{k}) {slope}", kind.name());
        }
    }
}

#[test]
fn printed_kernel_is_not_annihilated_away_from_the_pole() {
    let d = dims(6, 2);
    let p = GreenParams::new(d);
    let grid = uniform_grid(Dd::c(1.0), Dd::c(4.0), 601);
    let residual = |kind| {
        let g = RadialProfile::from_fn(grid.clone(), |r: Dd| green_kernel(kind, r, &p).unwrap()).unwrap();
        let pg = apply_pk(&g, d).unwrap();
        let scale = pk_constant::<f64>(d).abs() * g.max_abs().to64();
        pg.values().iter().map(|v| v.to64().abs()).fold(0.0, f64::max) / scale
    };
    assert!(residual(GreenKernel::Harmonic) < 1e-6);
    assert!(residual(GreenKernel::Riesz) < 1e-6);
    assert!(residual(GreenKernel::Printed) > 1e-2);
}

#[test]
fn bound_shape() {
    for (n, k) in PAIRS {
        let p = GreenParams::new(dims(n, k));
        for kind in [GreenKernel::Printed, GreenKernel::Harmonic] {
            let rep = green_bound_check(kind, &p, 1e-3, 30.0, 400).unwrap();
            assert!(rep.shape_holds(), "{} ({n},{k}) {rep:?}", kind.name());
            assert!((rep.gamma_min / rep.gamma_riesz - 1.0).abs() < 1e-3);
        }
        let rep = green_bound_check(GreenKernel::Riesz, &p, 1e-3, 30.0, 400).unwrap();
        assert!(!rep.shape_holds());
    }
}

fn bump(h: f64, r_max: f64) -> RadialProfile<f64> {
    let count = (r_max / h) as usize;
    RadialProfile::from_fn(half_shifted_grid(h, count), |r| (-(r * r)).exp()).unwrap().with_even(true)
}

#[test]
fn convolution_of_zero_and_linearity() {
    let p = GreenParams::new(dims(5, 1));
    let opts = ConvolveOptions { order: 24, ..Default::default() };
    let radii = [0.0, 0.5, 1.5, 2.5];
    let zero = RadialProfile::from_fn(half_shifted_grid(0.05f64, 100), |_| 0.0).unwrap().with_even(true);
    let c = green_convolve_radial(&zero, &radii, &p, &opts).unwrap();
    assert!(c.profile.values().iter().all(|&v| v == 0.0));
    let f = bump(0.02, 6.0);
    let g = f.map_values(|r, v| v * (1.0 + r)).unwrap();
    let fg = f.map_values(|r, v| 2.0 * v - 0.5 * v * (1.0 + r)).unwrap();
    let (cf, cg, cfg) = (
        green_convolve_radial(&f, &radii, &p, &opts).unwrap(),
        green_convolve_radial(&g, &radii, &p, &opts).unwrap(),
        green_convolve_radial(&fg, &radii, &p, &opts).unwrap(),
    );
    for i in 0..radii.len() {
        let want = 2.0 * cf.profile.values()[i] - 0.5 * cg.profile.values()[i];
        assert!((cfg.profile.values()[i] - want).abs() < 1e-10 * want.abs());
        assert!(cf.profile.values()[i] > 0.0);
    }
    assert!(cf.tail_ratio < 1e-6);
}

#[test]
fn convolution_rejects_bad_radii() {
    let p = GreenParams::new(dims(5, 1));
    assert!(green_convolve_radial(&bump(0.05, 3.0), &[-1.0], &p, &ConvolveOptions::default()).is_err());
}

#[test]
fn covariance_of_family() {
    let d = dims(5, 1);
    let fp = FamilyParams::new(1.0, -0.5, d).unwrap();
    let s = KelvinSphere::new(Dd::c(1.0), d).unwrap();
    let u = fp.profile(Dd::c(0.0025), Dd::c(12.0)).unwrap();
    let lo = s.lambda_sharp() + Dd::c(0.3);
    let res = covariance_residual(&s, &u, d, uniform_grid(lo, lo + Dd::c(2.0), 801)).unwrap();
    assert!(res.to64() <= 1e-4, "{res}");
}

#[test]
fn covariance_of_constant() {
    let d = dims(6, 2);
    let s = KelvinSphere::new(Dd::c(0.8), d).unwrap();
    let u = RadialProfile::from_fn(half_shifted_grid(Dd::c(0.0025), 6000), |_| Dd::c(1.0)).unwrap().with_even(true);
    let lo = s.lambda_sharp() + Dd::c(0.5);
    let res = covariance_residual(&s, &u, d, uniform_grid(lo, lo + Dd::c(1.5), 601)).unwrap();
    assert!(res.to64() <= 1e-6, "{res}");
}

#[test]
fn riesz_kernel_is_inversion_symmetric() {
    for (n, k) in PAIRS {
        let p = GreenParams::new(dims(n, k));
        let s = KelvinSphere::new(1.0, p.dims).unwrap();
        let ls = s.lambda_sharp();
        for i in 0..50 {
            let x = ls + 0.1 + 0.13 * i as f64;
            let y = (ls + 0.05 + 0.07 * i as f64, 0.06 * i as f64);
            let a = green_symmetry_residual(&s, x, y, &p, GreenKernel::Riesz).unwrap();
            let b = green_double_inversion_residual(&s, x, y, &p, GreenKernel::Riesz).unwrap();
            assert!(a < 1e-11 && b < 1e-11, "({n},{k}) {a} {b}");
        }
    }
}

#[test]
fn symmetry_is_trivial_on_the_diagonal() {
    let p = GreenParams::new(dims(5, 1));
    let s = KelvinSphere::new(1.0, p.dims).unwrap();
    for kind in GreenKernel::ALL {
        let x = s.lambda_sharp() + 0.7;
        assert!(green_symmetry_residual(&s, x, (x, 0.0), &p, kind).unwrap() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kernel_is_positive(rho in 1e-3f64..40.0, pick in 0usize..4) {
        let (n, k) = PAIRS[pick];
        let p = GreenParams::new(dims(n, k));
        for kind in GreenKernel::ALL {
            let g = green_kernel(kind, rho, &p).unwrap();
            prop_assert!(g > 0.0 && g.is_finite());
        }
    }

    #[test]
    fn bracket_is_below_riesz(rho in 1e-3f64..40.0, pick in 0usize..4) {
        let (n, k) = PAIRS[pick];
        let d = dims(n, k);
        let riesz = (2.0 * (rho / 2.0).sinh()).powi(-((n - 2 * k) as i32));
        let b = bound_bracket(rho, d);
        prop_assert!(b > 0.0 && b <= riesz);
    }
}
