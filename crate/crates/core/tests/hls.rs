use hypkit::hgeom::volume_ball_n;
use hypkit::hls::{
    hls_check, hls_constant, hls_constant_direct, hls_lhs, lp_norm, test_family, HlsParams, HlsQuadrature,
};
use hypkit::profile::uniform_grid;
use hypkit::RadialProfile;

/// `C_{3,1}` from mpmath at 30 digits.
const C31: f64 = 2.294_010_703_541_599;

#[test]
fn constant_oracle() {
    let h = HlsParams::new(3, 1.0).unwrap();
    assert!((hls_constant(&h) / C31 - 1.0).abs() < 1e-10);
    assert!((h.p - 1.2).abs() < 1e-15);
}

#[test]
fn constant_small_lam_limit() {
    for n in [3, 5, 8] {
        let h = HlsParams::new(n, 1e-9).unwrap();
        assert!((hls_constant(&h) - 1.0).abs() < 1e-7);
    }
}

#[test]
fn constant_log_and_direct_agree() {
    for (n, lam) in [(3, 1.0), (5, 2.0), (4, 0.5), (7, 6.5)] {
        let h = HlsParams::new(n, lam).unwrap();
        assert!((hls_constant(&h) / hls_constant_direct(&h) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn rejects_bad_exponent() {
    assert!(HlsParams::new(3, 0.0).is_err());
    assert!(HlsParams::new(3, 3.0).is_err());
}

#[test]
fn norm_basics() {
    let grid = uniform_grid(0.0, 3.0, 300);
    let zero = RadialProfile::from_fn(grid.clone(), |_| 0.0).unwrap();
    assert_eq!(lp_norm(&zero, 1.5, 3).unwrap(), 0.0);
    let f = RadialProfile::analytic(grid.clone(), |r: f64| (-2.0 * r).exp()).unwrap();
    let f2 = RadialProfile::analytic(grid, |r: f64| 2.0 * (-2.0 * r).exp()).unwrap();
    let (a, b) = (lp_norm(&f, 1.3, 4).unwrap(), lp_norm(&f2, 1.3, 4).unwrap());
    assert!((b / a - 2.0).abs() < 1e-12);
    assert!(lp_norm(&f, 0.5, 4).is_err());
}

#[test]
fn norm_of_indicator_is_volume() {
    for (n, r) in [(3, 1.0), (5, 2.5)] {
        let one = RadialProfile::analytic(uniform_grid(0.0, r, 100), |_| 1.0f64).unwrap();
        let p = 1.4;
        let want = volume_ball_n::<f64>(r, n).unwrap().powf(1.0 / p);
        assert!((lp_norm(&one, p, n).unwrap() / want - 1.0).abs() < 1e-12);
    }
}

#[test]
fn lhs_of_zero() {
    let h = HlsParams::new(3, 1.0).unwrap();
    let zero = RadialProfile::from_fn(uniform_grid(0.0, 2.0, 50), |_| 0.0).unwrap();
    assert_eq!(hls_lhs(&zero, &zero, &h, &HlsQuadrature::default()).unwrap(), 0.0);
}

#[test]
fn lhs_is_symmetric() {
    let h = HlsParams::new(3, 1.0).unwrap();
    let fam = test_family(&h).unwrap();
    let q = HlsQuadrature::default();
    for (a, b) in [(1, 6), (3, 8), (0, 9)] {
        let (f, g) = (&fam[a].profile, &fam[b].profile);
        let x = hls_lhs(f, g, &h, &q).unwrap();
        let y = hls_lhs(g, f, &h, &q).unwrap();
        assert!((x / y - 1.0).abs() < 1e-10, "{} {}: {x} {y}", fam[a].id, fam[b].id);
    }
}

#[test]
fn inequality_holds_on_family() {
    for (n, lam) in [(3, 1.0), (5, 2.0)] {
        let h = HlsParams::new(n, lam).unwrap();
        let fam = test_family(&h).unwrap();
        assert_eq!(fam.len(), 10);
        let rows = hls_check(&h, &fam, &HlsQuadrature::default()).unwrap();
        for r in &rows {
            assert!(r.ratio > 0.0 && r.ratio < 1.0, "{r:?}");
        }
        let max = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        eprintln!("(n, lam) = ({n}, {lam}): max ratio {max:.6}");
    }
}

#[test]
fn quadrature_doubling_is_stable() {
    let h = HlsParams::new(5, 2.0).unwrap();
    let fam = test_family(&h).unwrap();
    let q = HlsQuadrature::default();
    for t in [&fam[0], &fam[7]] {
        let a = hls_lhs(&t.profile, &t.profile, &h, &q).unwrap();
        let b = hls_lhs(&t.profile, &t.profile, &h, &q.doubled()).unwrap();
        assert!((a / b - 1.0).abs() <= 1e-5, "{}: {a} {b}", t.id);
    }
}
