//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Lines go straight to stdout so they show up without `--nocapture`; the
//! test fails at the end if any criterion is red.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use hypkit::classify::{infer_power, residual_q, FamilyParams, ResidualOptions};
use hypkit::gjms::{
    apply_pk, euclid_pullback_pk, green_bound_check, green_convolve_radial, green_kernel, green_symmetry_residual,
    ConvolveOptions, GreenKernel, GreenParams,
};
use hypkit::hls::{hls_check, hls_constant, hls_lhs, test_family, HlsParams, HlsQuadrature};
use hypkit::kelvin::KelvinSphere;
use hypkit::msphere::{critical_lambda, w_at, w_lambda, CriticalLambda, SphereScan, DEFAULT_CAP};
use hypkit::profile::{uniform_grid, RadialProfile};
use hypkit::shoot::{
    classify_laplacian, entire_laplacian_at_origin, scan_laplacian, separatrix_bisect, single_crossover,
    SeparatrixOptions, TrajectoryOutcome,
};
use hypkit::{Dd, Dimensions, Float, Real};

/// `C_{3,1}` from the Γ-formula at 50 digits (mpmath).
const C31_MPMATH: f64 = 2.294_010_703_541_599;

fn dims(n: usize, k: usize) -> Dimensions {
    Dimensions::new(n, k).unwrap()
}

struct Ledger {
    failed: Vec<String>,
}

impl Ledger {
    fn record(&mut self, id: u32, name: &str, budget_s: Option<f64>, f: impl FnOnce() -> (bool, String)) {
        let t = Instant::now();
        let (ok, detail) = f();
        let secs = t.elapsed().as_secs_f64();
        let in_time = budget_s.is_none_or(|b| secs < b);
        let pass = ok && in_time;
        let budget = match budget_s {
            Some(b) => format!(" (budget {b} s)"),
            None => String::new(),
        };
        let line = format!(
            "{} [{id}] {name}: {detail}; {secs:.2} s{budget}{}\n",
            if pass { "PASS" } else { "FAIL" },
            if in_time { "" } else { " OVER BUDGET" }
        );
        let mut out = std::io::stdout().lock();
        out.write_all(line.as_bytes()).unwrap();
        out.flush().unwrap();
        if !pass {
            self.failed.push(format!("[{id}] {name}"));
        }
    }
}

fn kelvin_suite() -> (bool, String) {
    let d = dims(6, 2);
    let (mut fixed, mut inv, mut ode, mut jac, mut at_one) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for lam in [0.3, 1.0, 3.0] {
        let s = KelvinSphere::new(lam, d).unwrap();
        fixed = fixed.max((s.phi(lam).unwrap() - lam).abs());
        at_one = at_one.max((s.jacobian(lam).unwrap() - 1.0).abs());
        let ls = s.lambda_sharp();
        for i in 0..1000 {
            let r = ls + 0.1 + 5.9 * i as f64 / 999.0;
            inv = inv.max((s.phi(s.phi(r).unwrap()).unwrap() - r).abs());
            ode = ode.max(s.ode_residual(r).unwrap().abs());
            let (a, b) = (s.jacobian(r).unwrap(), s.jacobian_alt(r).unwrap());
            jac = jac.max((a / b - 1.0).abs());
        }
    }
    let ok = fixed <= 1e-14 && inv <= 1e-12 && ode <= 1e-7 && jac <= 1e-12 && at_one <= 1e-12;
    (
        ok,
        format!("|φ(λ)−λ| {fixed:.1e}, involution {inv:.1e}, ODE {ode:.1e}, Jacobian forms {jac:.1e}, |J(λ)−1| {at_one:.1e}"),
    )
}

/// Max error of `P_k u` against `c·u^p` on `r ≤ 2`, relative to the largest value there.
fn operator_error(fp: &FamilyParams, h: f64) -> f64 {
    let u = fp.profile(Dd::c(h), Dd::c(2.5)).unwrap();
    let pu = apply_pk(&u, fp.dims).unwrap();
    let (c, p) = (fp.exact_constant(), fp.p());
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for (&r, &v) in pu.grid().iter().zip(pu.values()) {
        if r.to64() > 2.0 {
            continue;
        }
        let want = c * fp.eval(r.to64()).powf(p);
        err = err.max((v.to64() - want).abs());
        scale = scale.max(want.abs());
    }
    err / scale
}

fn operator_suite() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, k) in [(5, 1), (6, 2), (7, 3)] {
        let d = dims(n, k);
        let fp = FamilyParams::new(1.0, -0.9, d).unwrap();
        let hr = 0.0025;
        let hyp = apply_pk(&fp.profile(Dd::c(hr), Dd::c(2.5)).unwrap(), d).unwrap();
        let euc = euclid_pullback_pk(&fp.profile_euclid(Dd::c(hr / 2.0), Dd::c(0.9)).unwrap(), d).unwrap();
        let scale = hyp.max_abs().to64();
        let mut gap = 0.0f64;
        for (&r, &v) in hyp.grid().iter().zip(hyp.values()) {
            let w = euc.eval((r * Dd::c(0.5)).tanh()).unwrap();
            gap = gap.max((v - w).to64().abs() / scale);
        }
        let order = (operator_error(&fp, 0.02) / operator_error(&fp, 0.01)).log2();
        ok &= gap <= 1e-5 && (3.5..=4.5).contains(&order);
        parts.push(format!("({n},{k}) routes {gap:.1e} order {order:.2}"));
    }
    (ok, parts.join(", "))
}

fn green_suite() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, k) in [(5, 1), (5, 2), (6, 2), (7, 3)] {
        let d = dims(n, k);
        let p = GreenParams::new(d);
        let kind = GreenKernel::Printed;
        let vals: Vec<f64> = (0..1000)
            .map(|i| green_kernel(kind, 1e-3 * (30.0f64 / 1e-3).powf(i as f64 / 999.0), &p).unwrap())
            .collect();
        let monotone = vals.iter().all(|&g| g > 0.0) && vals.windows(2).all(|w| w[1] < w[0]);
        let rate = -green_kernel(kind, 40.0, &p).unwrap().ln() / 40.0;
        let rate_err = (rate / (n - k) as f64 - 1.0).abs();
        let shape = green_bound_check(kind, &p, 1e-3, 30.0, 1000).unwrap().shape_holds();
        let s = KelvinSphere::new(1.0, d).unwrap();
        let ls = s.lambda_sharp();
        let mut sym = 0.0f64;
        for i in 0..10 {
            for j in 0..10 {
                for l in 0..10 {
                    let x = ls + 0.1 + 0.25 * i as f64;
                    let y = (ls + 0.05 + 0.25 * j as f64, (l as f64 + 0.5) * PI / 10.0);
                    sym = sym.max(green_symmetry_residual(&s, x, y, &p, kind).unwrap());
                }
            }
        }
        ok &= monotone && rate_err <= 0.01 && shape && sym <= 1e-9;
        parts.push(format!(
            "({n},{k}) {} rate {rate:.4} ({:.1}%) bound {} symmetry {sym:.1e}",
            if monotone { "pos/decr" } else { "NOT pos/decr" },
            100.0 * rate_err,
            if shape { "ok" } else { "broken" }
        ));
    }
    (ok, format!("printed kernel: {}", parts.join(", ")))
}

fn classification_suite() -> (bool, String) {
    let opts = ResidualOptions::default();
    let mut worst_const = 0.0f64;
    let mut zero_ok = true;
    let mut worst_p = 0.0f64;
    for (n, k) in [(5, 1), (6, 2), (7, 3)] {
        let d = dims(n, k);
        for beta in [-0.9, -0.5, 0.5, 2.0] {
            let q = residual_q(&FamilyParams::new(1.0, beta, d).unwrap(), &opts).unwrap();
            worst_const = worst_const.max(q.constancy);
        }
        let z = residual_q(&FamilyParams::new(1.0, 0.0, d).unwrap(), &opts).unwrap();
        zero_ok &= z.c_hat.abs() <= 1e-6 * z.scale;
        let fp = FamilyParams::new(1.0, -0.5, d).unwrap();
        worst_p = worst_p.max((infer_power(&fp, &opts).unwrap().p_hat - fp.p()).abs());
    }
    let d = dims(5, 1);
    let mu = 3.0f64;
    let a = residual_q(&FamilyParams::new(1.0, -0.5, d).unwrap(), &opts).unwrap();
    let b = residual_q(&FamilyParams::new(mu, -0.5, d).unwrap(), &opts).unwrap();
    let scaling = (b.c_hat / (a.c_hat * mu.powf(1.0 - d.critical_exponent::<f64>())) - 1.0).abs();
    let ok = worst_const <= 1e-5 && zero_ok && worst_p <= 1e-3 && scaling <= 1e-6;
    (
        ok,
        format!(
            "constancy {worst_const:.1e}, β = 0 {}, |p̂ − p| {worst_p:.1e}, μ-scaling {scaling:.1e}",
            if zero_ok { "annihilated" } else { "NOT annihilated" }
        ),
    )
}

fn shooting_suite() -> (bool, String) {
    let d = dims(6, 2);
    let opts = SeparatrixOptions::default();
    let scan_opts = SeparatrixOptions { r_max: 30.0, ..Default::default() };
    let bs: Vec<f64> = (0..41).map(|i| -1.5 + 0.05 * i as f64).collect();
    let outs = scan_laplacian(d, 1.0, &bs, &scan_opts).unwrap();
    let single = matches!(single_crossover(&outs, &bs), Ok(Some(_)));
    let a = separatrix_bisect(d, 1.0, (-1.0, 0.0), 60, &opts).unwrap();
    let b = separatrix_bisect(d, 2.0, (-8.0, 0.0), 60, &opts).unwrap();
    let ratio = (b.beta / a.beta / 8.0 - 1.0).abs();
    let oracle = entire_laplacian_at_origin(d, 1.0);
    let rel = (a.beta / oracle - 1.0).abs();
    let sides = bs.iter().zip(&outs).all(|(&x, o)| {
        if x > a.beta {
            matches!(o, TrajectoryOutcome::BlowUp { .. })
        } else {
            matches!(o, TrajectoryOutcome::HitsZero { .. })
        }
    });
    let near = [1e-3, 1e-2].iter().all(|&e| {
        matches!(classify_laplacian(d, 1.0, a.beta + e, &opts).unwrap(), TrajectoryOutcome::BlowUp { .. })
            && matches!(classify_laplacian(d, 1.0, a.beta - e, &opts).unwrap(), TrajectoryOutcome::HitsZero { .. })
    });
    let ok = single && ratio <= 1e-4 && rel <= 1e-6 && sides && near;
    (
        ok,
        format!(
            "single crossover {single}, β̂₁ {:.10} vs oracle {oracle:.10} ({rel:.1e}), β̂₁(2)/β̂₁(1)/8 − 1 = {ratio:.1e}, sides {}",
            a.beta,
            if sides && near { "consistent" } else { "INCONSISTENT" }
        ),
    )
}

fn integral_equation_suite() -> (bool, String) {
    let d = dims(5, 1);
    let fp = FamilyParams::new(1.0, -0.5, d).unwrap();
    let u = fp.profile::<f64>(0.01, 40.0).unwrap();
    let (c, p) = (fp.exact_constant(), fp.p());
    let rhs = u.map_values(|_, v| c * v.powf(p)).unwrap();
    let radii = [0.5, 1.0, 2.0, 4.0];
    let conv = green_convolve_radial(&rhs, &radii, &GreenParams::new(d), &ConvolveOptions::default()).unwrap();
    let mut worst = 0.0f64;
    for (&r, &g) in conv.profile.grid().iter().zip(conv.profile.values()) {
        worst = worst.max((g / fp.eval(r) - 1.0).abs());
    }
    (worst <= 1e-3, format!("(5,1) β = −0.5, order 48, printed kernel: max |G⋆(c u^p)/u − 1| = {worst:.3}"))
}

fn hls_suite() -> (bool, String) {
    let h31 = HlsParams::new(3, 1.0).unwrap();
    let c_err = (hls_constant(&h31) - C31_MPMATH).abs();
    let q = HlsQuadrature::default();
    let mut max_ratio = 0.0f64;
    for h in [h31, HlsParams::new(5, 2.0).unwrap()] {
        let rows = hls_check(&h, &test_family(&h).unwrap(), &q).unwrap();
        max_ratio = rows.iter().map(|r| r.ratio).fold(max_ratio, f64::max);
    }
    let h52 = HlsParams::new(5, 2.0).unwrap();
    let fam = test_family(&h52).unwrap();
    let mut doubling = 0.0f64;
    for t in [&fam[0], &fam[7]] {
        let a = hls_lhs(&t.profile, &t.profile, &h52, &q).unwrap();
        let b = hls_lhs(&t.profile, &t.profile, &h52, &q.doubled()).unwrap();
        doubling = doubling.max((a / b - 1.0).abs());
    }
    let ok = c_err <= 1e-10 && max_ratio < 1.0 && doubling <= 1e-5;
    (ok, format!("|C₃,₁ − mpmath| {c_err:.1e}, max ratio {max_ratio:.6} over (3,1),(5,2), doubling {doubling:.1e}"))
}

fn msphere_suite() -> (bool, String) {
    let d = dims(5, 1);
    let u = FamilyParams::new(1.0, -0.8, d).unwrap().profile::<f64>(0.01, 45.0).unwrap();
    let norm = u.max_abs();
    let mut ok = true;
    let mut parts = Vec::new();
    for off in [0.0, 0.5] {
        let scan = SphereScan::standard(off, DEFAULT_CAP).unwrap();
        match critical_lambda(&u, &scan, d) {
            Ok((CriticalLambda::Finite { lambda0, width, .. }, _)) => {
                let w = w_lambda(&u, &scan, lambda0, d).unwrap().max_abs_w / norm;
                ok &= w <= 1e-5 && width <= 1e-6;
                parts.push(format!("d={off}: λ₀ {lambda0:.7} width {width:.1e} max|w| {w:.1e}"));
            }
            other => {
                ok = false;
                parts.push(format!("d={off}: {other:?}"));
            }
        }
    }
    let flat = RadialProfile::analytic(uniform_grid(0.0, 45.0, 200), |_r: f64| 2.0).unwrap().with_even(true);
    let capped = [0.0, 0.5].iter().all(|&off| {
        let scan = SphereScan::standard(off, DEFAULT_CAP).unwrap();
        matches!(critical_lambda(&flat, &scan, d), Ok((CriticalLambda::ExceedsCap { .. }, _)))
    });
    ok &= capped;
    let (mut pin, mut anti) = (0.0f64, 0.0f64);
    let g = (d.n - 2 * d.k) as f64 / (2.0 * d.n as f64);
    for lam in [0.4, 1.0, 2.5] {
        let s = KelvinSphere::new(lam, d).unwrap();
        for th in [0.0, 0.9, 2.2] {
            pin = pin.max(w_at(&u, &s, 0.5, lam, th).unwrap().abs());
        }
        for i in 1..=20 {
            let r = lam + 0.1 * i as f64;
            let pr = s.phi(r).unwrap();
            let jw = s.jacobian(pr).unwrap().abs().powf(g);
            anti = anti.max((w_at(&u, &s, 0.0, pr, 0.0).unwrap() + jw * w_at(&u, &s, 0.0, r, 0.0).unwrap()).abs());
        }
    }
    ok &= pin <= 1e-10 && anti <= 1e-9;
    parts.push(format!("constant capped {capped}, pinning {pin:.1e}, anti-symmetry {anti:.1e}"));
    (ok, parts.join(", "))
}

fn run_cli(bin: &Path, args: &[&str], out: &Path) -> bool {
    Command::new(bin)
        .args(args)
        .arg("--out")
        .arg(out)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn determinism_suite() -> (bool, String) {
    let bin = Path::new(env!("CARGO_BIN_EXE_hypkit"));
    let tmp = tempfile::tempdir().unwrap();
    let commands: [(&str, &[&str]); 7] = [
        ("kelvin", &["kelvin", "--n", "6", "--k", "2", "--lambda", "1", "--rmax", "10"]),
        ("shoot", &["shoot", "--n", "6", "--k", "2", "--alpha", "1", "--beta", "0.6"]),
        ("separatrix", &["separatrix", "--n", "6", "--k", "2", "--alpha", "1", "--bracket", " -10,0", "--iters", "50"]),
        ("verify-family", &["verify-family", "--n", "5", "--k", "1", "--alpha", "1", "--beta", "-0.5"]),
        ("green", &["green", "--n", "5", "--k", "1"]),
        ("hls", &["hls", "--n", "3", "--lam", "1"]),
        ("msphere", &["msphere", "--n", "5", "--k", "1", "--beta", "-0.8", "--offset", "0.5"]),
    ];
    let mut ok = true;
    let mut files = 0;
    let mut bad = Vec::new();
    for (name, args) in commands {
        let (a, b) = (tmp.path().join(format!("{name}-a")), tmp.path().join(format!("{name}-b")));
        if !(run_cli(bin, args, &a) && run_cli(bin, args, &b)) {
            ok = false;
            bad.push(format!("{name} exited with failure"));
            continue;
        }
        let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for f in names {
            files += 1;
            let (x, y) = (std::fs::read(a.join(&f)).unwrap(), std::fs::read(b.join(&f)).ok());
            if y.as_deref() != Some(x.as_slice()) {
                ok = false;
                bad.push(format!("{name}/{}", f.to_string_lossy()));
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("7 commands, {files} files byte-identical across reruns")
    } else {
        format!("differences: {}", bad.join(", "))
    };
    (ok, detail)
}

#[test]
fn acceptance() {
    std::io::stdout().lock().write_all(b"\n").unwrap();
    let mut l = Ledger { failed: Vec::new() };
    l.record(1, "Kelvin suite", Some(1.0), kelvin_suite);
    l.record(2, "Operator suite", Some(30.0), operator_suite);
    l.record(3, "Green suite", Some(60.0), green_suite);
    l.record(4, "Classification suite", Some(60.0), classification_suite);
    l.record(5, "Shooting suite", Some(120.0), shooting_suite);
    l.record(6, "Integral-equation suite", Some(120.0), integral_equation_suite);
    l.record(7, "HLS suite", Some(120.0), hls_suite);
    l.record(8, "Moving-sphere suite", Some(120.0), msphere_suite);
    l.record(9, "Determinism", None, determinism_suite);
    assert!(l.failed.is_empty(), "red criteria: {}", l.failed.join(", "));
}
