//! One driver per subcommand.

use std::f64::consts::PI;

use serde::Serialize;

use hypkit::classify::{infer_power, residual_q, FamilyParams, ResidualOptions};
use hypkit::gjms::{bound_bracket, green_bound_check, green_kernel, green_symmetry_residual, GreenKernel, GreenParams};
use hypkit::hls::{hls_check, hls_constant, test_family, HlsParams, HlsQuadrature};
use hypkit::kelvin::KelvinSphere;
use hypkit::msphere::{
    asymptotic_charge, critical_lambda, family_critical_tanh2, w_lambda, CriticalLambda, SphereScan,
};
use hypkit::shoot::{
    entire_laplacian_at_origin, ivp_integrate, separatrix_bisect, ShootParams, SeparatrixOptions, Trajectory,
};
use hypkit::{Dd, Dimensions, Float, Real};

use crate::run::{num, Run};
use crate::{decimal, CliError, FamilyArgs, GreenArgs, HlsArgs, KelvinArgs, MsphereArgs, SeparatrixArgs, ShootArgs};

/// Rows tabulated by `kelvin` besides `r = λ`, from `λ♯ + KELVIN_GAP` to `--rmax`.
const KELVIN_ROWS: usize = 1000;
/// Rows start this far outside the limit sphere, where `φ′` blows up.
const KELVIN_GAP: f64 = 0.1;
/// Distance at which the far-field rate is read off.
const FAR_FIELD_RHO: f64 = 40.0;

fn dims(n: usize, k: usize) -> Result<Dimensions, CliError> {
    Ok(Dimensions::new(n, k)?)
}

fn flag(cond: bool, msg: impl Into<String>) -> Result<(), CliError> {
    if cond { Ok(()) } else { Err(CliError::Flags(msg.into())) }
}

fn decimal_list(s: &str) -> Result<Vec<f64>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| decimal(p).map_err(CliError::Flags)).collect()
}

#[derive(Serialize)]
struct KelvinSummary {
    lambda: f64,
    lambda_sharp: f64,
    rows: usize,
    phi_at_lambda: f64,
    jacobian_at_lambda: f64,
    max_involution_error: f64,
    max_jacobian_gap: f64,
    max_ode_residual: f64,
}

/// Computed in double-double, so the involution column stays at roundoff
/// level out to large radii.
pub fn kelvin(a: &KelvinArgs, run: &mut Run) -> Result<(), CliError> {
    let d = dims(a.n, a.k)?;
    let s = KelvinSphere::<Dd>::new(Dd::c(a.lambda), d)?;
    let ls = s.lambda_sharp();
    let start = ls + Dd::c(KELVIN_GAP);
    flag(a.rmax > start.to64() && a.rmax > a.lambda, format!("--rmax must exceed lambda and {}", start.to64()))?;
    let step = (Dd::c(a.rmax) - start) / Dd::of_usize(KELVIN_ROWS - 1);
    let mut radii: Vec<Dd> = (0..KELVIN_ROWS).map(|i| start + step * Dd::of_usize(i)).collect();
    let at = radii.partition_point(|&r| r < Dd::c(a.lambda));
    radii.insert(at, Dd::c(a.lambda));
    let mut rows = Vec::with_capacity(radii.len());
    let (mut inv, mut gap, mut ode) = (0.0f64, 0.0f64, 0.0f64);
    for &r in &radii {
        let phi = s.phi(r)?;
        let j = s.jacobian(r)?;
        let j_alt = s.jacobian_alt(r)?;
        let res = s.ode_residual(r)?.to64().abs();
        let inv_err = (s.phi(phi)? - r).abs().to64();
        inv = inv.max(inv_err);
        gap = gap.max(((j - j_alt) / j).abs().to64());
        ode = ode.max(res);
        rows.push(vec![num(r.to64()), num(phi.to64()), num(j.to64()), num(j_alt.to64()), num(res), num(inv_err)]);
    }
    let header: Vec<String> =
        ["r", "phi", "jacobian", "jacobian_alt", "ode_residual", "involution_error"].map(String::from).to_vec();
    run.write_csv("kelvin.csv", &header, &rows)?;
    let lam = Dd::c(a.lambda);
    run.write_json(
        "kelvin.json",
        &KelvinSummary {
            lambda: a.lambda,
            lambda_sharp: ls.to64(),
            rows: rows.len(),
            phi_at_lambda: s.phi(lam)?.to64(),
            jacobian_at_lambda: s.jacobian(lam)?.to64(),
            max_involution_error: inv,
            max_jacobian_gap: gap,
            max_ode_residual: ode,
        },
    )
}

#[derive(Serialize)]
struct ShootSummary {
    outcome: &'static str,
    radius: f64,
    steps: usize,
}

pub fn shoot(a: &ShootArgs, run: &mut Run) -> Result<(), CliError> {
    let d = dims(a.n, a.k)?;
    let p = ShootParams::new(d, a.alpha, decimal_list(&a.beta)?, a.rmax, a.tol, 1e8)?;
    let (traj, out) = ivp_integrate(&p)?;
    let rows: Vec<Vec<String>> = traj
        .r
        .iter()
        .zip(&traj.states)
        .map(|(&r, st)| std::iter::once(num(r)).chain(st.iter().map(|&x| num(x))).collect())
        .collect();
    run.write_csv("shoot.csv", &Trajectory::header(d.k), &rows)?;
    run.write_json("shoot.json", &ShootSummary { outcome: out.name(), radius: out.radius(), steps: traj.len() })
}

#[derive(Serialize)]
struct SeparatrixSummary {
    beta1_hat: f64,
    width: f64,
    lo: f64,
    hi: f64,
    iterations: usize,
    resolved_by_horizon: bool,
    entire_laplacian: f64,
    relative_error: f64,
}

pub fn separatrix(a: &SeparatrixArgs, run: &mut Run) -> Result<(), CliError> {
    let d = dims(a.n, a.k)?;
    let b = decimal_list(&a.bracket)?;
    flag(b.len() == 2, "--bracket takes two values `lo,hi`")?;
    flag(a.rmax > 0.0 && a.tol > 0.0, "--rmax and --tol must be positive")?;
    let opts = SeparatrixOptions { r_max: a.rmax, tol: a.tol, ..SeparatrixOptions::default() };
    let sep = separatrix_bisect(d, a.alpha, (b[0], b[1]), a.iters, &opts)?;
    let oracle = entire_laplacian_at_origin(d, a.alpha);
    run.write_json(
        "separatrix.json",
        &SeparatrixSummary {
            beta1_hat: sep.beta,
            width: sep.width,
            lo: sep.lo,
            hi: sep.hi,
            iterations: sep.iterations,
            resolved_by_horizon: sep.resolved_by_horizon,
            entire_laplacian: oracle,
            relative_error: ((sep.beta - oracle) / oracle).abs(),
        },
    )
}

#[derive(Serialize)]
struct FamilySummary {
    c_hat: f64,
    c_exact: f64,
    constancy: f64,
    route_agreement: f64,
    q_hat: f64,
    q_exact: f64,
    p_hat: Option<f64>,
    p_exact: f64,
    zero_case: bool,
    scale: f64,
    points: usize,
}

pub fn verify_family(a: &FamilyArgs, run: &mut Run) -> Result<(), CliError> {
    let d = dims(a.n, a.k)?;
    let fp = FamilyParams::new(a.alpha, a.beta, d)?;
    let opts = ResidualOptions::default();
    let r = residual_q(&fp, &opts)?;
    let p_hat = if r.is_zero_case() { None } else { Some(infer_power(&fp, &opts)?.p_hat) };
    run.write_json(
        "verify_family.json",
        &FamilySummary {
            c_hat: r.c_hat,
            c_exact: r.c_exact,
            constancy: r.constancy,
            route_agreement: r.route_agreement,
            q_hat: r.q_hat,
            q_exact: fp.exact_q(),
            p_hat,
            p_exact: fp.p(),
            zero_case: r.is_zero_case(),
            scale: r.scale,
            points: r.points,
        },
    )
}

#[derive(Serialize)]
struct GreenSummary {
    kernel: &'static str,
    positive: bool,
    decreasing: bool,
    far_field_rho: f64,
    far_field_rate: f64,
    expected_rate: f64,
    rate_relative_error: f64,
    gamma: f64,
    gamma_at_one: f64,
    holds_at_calibration: bool,
    shape_holds: bool,
    symmetry_pairs: usize,
    symmetry_max: f64,
}

/// Symmetry pairs about a sphere of radius 1: ten radii for `x`, ten radii
/// and ten angles for `y`, all outside the limit sphere.
pub fn symmetry_pairs(lambda_sharp: f64) -> Vec<(f64, (f64, f64))> {
    let mut out = Vec::with_capacity(1000);
    for i in 0..10 {
        for j in 0..10 {
            for l in 0..10 {
                let x = lambda_sharp + 0.1 + 0.25 * i as f64;
                let ry = lambda_sharp + 0.05 + 0.25 * j as f64;
                out.push((x, (ry, (l as f64 + 0.5) * PI / 10.0)));
            }
        }
    }
    out
}

pub fn green(a: &GreenArgs, run: &mut Run) -> Result<(), CliError> {
    let d = dims(a.n, a.k)?;
    let kind = GreenKernel::ALL
        .into_iter()
        .find(|g| g.name() == a.kernel)
        .ok_or_else(|| CliError::Flags(format!("unknown kernel `{}`", a.kernel)))?;
    flag(a.rmax > 1e-3, "--rmax must exceed 1e-3")?;
    let p = GreenParams::new(d);
    let (lo, count) = (1e-3f64, 1000usize);
    let mut rows = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    for i in 0..count {
        let rho = lo * (a.rmax / lo).powf(i as f64 / (count - 1) as f64);
        let g = green_kernel(kind, rho, &p)?;
        let b = bound_bracket(rho, d);
        values.push(g);
        rows.push(vec![num(rho), num(g), num(b), num(b / g)]);
    }
    let header: Vec<String> = ["rho", "green", "bracket", "bracket_over_green"].map(String::from).to_vec();
    run.write_csv("green.csv", &header, &rows)?;
    let rate = -green_kernel(kind, FAR_FIELD_RHO, &p)?.ln() / FAR_FIELD_RHO;
    let expected = (d.n - d.k) as f64;
    let bound = green_bound_check(kind, &p, lo, a.rmax, count)?;
    let s = KelvinSphere::<f64>::new(1.0, d)?;
    let pairs = symmetry_pairs(s.lambda_sharp());
    let mut sym = 0.0f64;
    for &(x, y) in &pairs {
        sym = sym.max(green_symmetry_residual(&s, x, y, &p, kind)?);
    }
    run.write_json(
        "green.json",
        &GreenSummary {
            kernel: kind.name(),
            positive: values.iter().all(|&g| g > 0.0),
            decreasing: values.windows(2).all(|w| w[1] < w[0]),
            far_field_rho: FAR_FIELD_RHO,
            far_field_rate: rate,
            expected_rate: expected,
            rate_relative_error: (rate / expected - 1.0).abs(),
            gamma: bound.gamma,
            gamma_at_one: bound.gamma_at_one,
            holds_at_calibration: bound.holds_at_calibration,
            shape_holds: bound.shape_holds(),
            symmetry_pairs: pairs.len(),
            symmetry_max: sym,
        },
    )
}

#[derive(Serialize)]
struct HlsSummary {
    n: usize,
    lam: f64,
    p: f64,
    #[serde(rename = "C")]
    c: f64,
    max_ratio: f64,
    profiles: usize,
}

pub fn hls(a: &HlsArgs, run: &mut Run) -> Result<(), CliError> {
    let h = HlsParams::new(a.n, a.lambda)?;
    let family = test_family(&h)?;
    let rows = hls_check(&h, &family, &HlsQuadrature::default())?;
    let cells: Vec<Vec<String>> =
        rows.iter().map(|r| vec![r.id.clone(), num(r.lam), num(r.lhs), num(r.rhs), num(r.ratio)]).collect();
    let header: Vec<String> = ["id", "lam", "lhs", "rhs", "ratio"].map(String::from).to_vec();
    run.write_csv("hls.csv", &header, &cells)?;
    let max_ratio = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    run.write_json(
        "hls.json",
        &HlsSummary { n: h.n, lam: h.lam, p: h.p, c: hls_constant(&h), max_ratio, profiles: rows.len() },
    )
}

#[derive(Serialize)]
struct MsphereSummary {
    verdict: &'static str,
    lambda0: Option<f64>,
    width: Option<f64>,
    bisections: Option<usize>,
    cap: f64,
    closed_form_lambda0: Option<f64>,
    max_abs_w_at_lambda0: Option<f64>,
    charge: f64,
    charge_spread: f64,
    charge_slope: f64,
    charge_converged: bool,
}

pub fn msphere(a: &MsphereArgs, run: &mut Run) -> Result<(), CliError> {
    let d = dims(a.n, a.k)?;
    flag(a.offset >= 0.0, "--offset must be nonnegative")?;
    flag(a.rmax >= 0.02, "--rmax must be at least 0.02")?;
    flag(a.tol > 0.0, "--tol must be positive")?;
    let fp = FamilyParams::new(a.alpha, a.beta, d)?;
    let reach = (a.offset + a.rmax + 7.0).max(36.0);
    let u = fp.profile::<f64>(0.01, reach)?;
    let mut scan = SphereScan::standard(a.offset, a.rmax)?;
    scan.tol_rel = a.tol;
    let (verdict, rows) = critical_lambda(&u, &scan, d)?;
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![num(r.lambda), num(r.max_w), num(r.sigma_measure), (if r.good { "good" } else { "bad" }).into()])
        .collect();
    let header: Vec<String> = ["lambda", "max_w", "measure_of_sigma_minus", "verdict"].map(String::from).to_vec();
    run.write_csv("msphere.csv", &header, &cells)?;
    let t2 = family_critical_tanh2(a.beta, a.offset);
    let closed = (t2 > 0.0 && t2 < 1.0).then(|| 2.0 * t2.sqrt().atanh());
    let charge = asymptotic_charge(&u, d)?;
    let norm = u.max_abs();
    let (name, lambda0, width, bisections) = match verdict {
        CriticalLambda::Finite { lambda0, width, iterations, .. } => ("finite", Some(lambda0), Some(width), Some(iterations)),
        CriticalLambda::ExceedsCap { .. } => ("exceeds_cap", None, None, None),
    };
    let max_abs_w_at_lambda0 = match lambda0 {
        Some(l) => Some(w_lambda(&u, &scan, l, d)?.max_abs_w / norm),
        None => None,
    };
    run.write_json(
        "msphere.json",
        &MsphereSummary {
            verdict: name,
            lambda0,
            width,
            bisections,
            cap: scan.cap(),
            closed_form_lambda0: closed,
            max_abs_w_at_lambda0,
            charge: charge.value,
            charge_spread: charge.spread,
            charge_slope: charge.slope,
            charge_converged: charge.converged,
        },
    )
}
