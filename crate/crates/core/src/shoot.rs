//! Radial shooting for `(−Δ)^k u = u^{(n+2k)/(n−2k)}` on `R^n`, the explicit
//! bubbles, and the weighted problem that is the ball model of
//! `P_k u = u^q` on `H^n`.
//!
//! The state is `v_m = (−Δ)^m u` and `w_m = v_m′` for `m = 0..k−1`, so that
//! `v_m″ + (n−1)/r·v_m′ = −v_{m+1}` with `v_k = g(r)·u^p`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gjms::euclid_polylaplacian;
use crate::hgeom::Dimensions;
use crate::profile::{half_shifted_grid, RadialProfile};
use crate::rk::{dp5_step, integrate, Control, StepControl};
use crate::scalar::{Dd, Real};
use crate::specfun::log_gamma;
use num_traits::Float;

/// Default starting radius for the Taylor seed.
pub const SEED_RADIUS: f64 = 1e-4;
/// Distance from the unit sphere at which ball-model integration stops.
pub const BALL_MARGIN: f64 = 1e-3;

/// Initial data `u(0) = α`, `(−Δ)^m u(0) = β_m` for `m = 1..k−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShootParams {
    pub dims: Dimensions,
    pub alpha: f64,
    pub betas: Vec<f64>,
    pub r_max: f64,
    pub tol: f64,
    pub blow_cap: f64,
}

impl ShootParams {
    pub fn new(dims: Dimensions, alpha: f64, betas: Vec<f64>, r_max: f64, tol: f64, blow_cap: f64) -> Result<Self> {
        if betas.len() != dims.k - 1 {
            return Err(Error::InvalidParams(format!("need {} betas for k = {}, got {}", dims.k - 1, dims.k, betas.len())));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParams(format!("alpha must be positive, got {alpha}")));
        }
        if betas.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParams("betas must be finite".into()));
        }
        if !(r_max > SEED_RADIUS) || !r_max.is_finite() {
            return Err(Error::InvalidParams(format!("r_max must exceed {SEED_RADIUS}, got {r_max}")));
        }
        if !(tol > 0.0 && tol <= 1e-6) {
            return Err(Error::InvalidParams(format!("tol must lie in (0, 1e-6], got {tol}")));
        }
        if !(blow_cap >= 1e6) {
            return Err(Error::InvalidParams(format!("blow_cap must be at least 1e6, got {blow_cap}")));
        }
        Ok(Self { dims, alpha, betas, r_max, tol, blow_cap })
    }

    /// `r_max = 10`, `tol = 1e−10`, `blow_cap = 1e8`.
    pub fn with_defaults(dims: Dimensions, alpha: f64, betas: Vec<f64>) -> Result<Self> {
        Self::new(dims, alpha, betas, 10.0, 1e-10, 1e8)
    }
}

/// How a trajectory ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryOutcome {
    BlowUp { r_star: f64 },
    HitsZero { r_zero: f64 },
    GlobalPositive { r_horizon: f64 },
}

impl TrajectoryOutcome {
    pub fn name(&self) -> &'static str {
        match self {
            TrajectoryOutcome::BlowUp { .. } => "blow_up",
            TrajectoryOutcome::HitsZero { .. } => "hits_zero",
            TrajectoryOutcome::GlobalPositive { .. } => "global_positive",
        }
    }

    pub fn radius(&self) -> f64 {
        match *self {
            TrajectoryOutcome::BlowUp { r_star } => r_star,
            TrajectoryOutcome::HitsZero { r_zero } => r_zero,
            TrajectoryOutcome::GlobalPositive { r_horizon } => r_horizon,
        }
    }
}

/// Accepted steps of an integration; `states[i]` is `[v_0, w_0, …, v_{k−1}, w_{k−1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub r: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    /// `r, u, du, v1, w1, …`.
    pub fn header(k: usize) -> Vec<String> {
        let mut h = vec!["r".to_string(), "u".to_string(), "du".to_string()];
        for m in 1..k {
            h.push(format!("v{m}"));
            h.push(format!("w{m}"));
        }
        h
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// State at a node, if `r` is one.
    pub fn at(&self, r: f64) -> Option<&[f64]> {
        self.r.iter().position(|&x| x == r).map(|i| self.states[i].as_slice())
    }
}

/// Starting radius and radii the integrator must land on.
#[derive(Debug, Clone, PartialEq)]
pub struct IvpOptions {
    pub r0: f64,
    pub stops: Vec<f64>,
}

impl Default for IvpOptions {
    fn default() -> Self {
        Self { r0: SEED_RADIUS, stops: Vec::new() }
    }
}

/// `∏_{j=lo}^{hi} 2j(2j + n − 2)`.
fn lap_product(n: usize, lo: usize, hi: usize) -> f64 {
    (lo..=hi).map(|j| (2 * j * (2 * j + n - 2)) as f64).product()
}

/// Even Taylor coefficients `c_0, c_2, …, c_{2k+2}` of `u`.
fn taylor_coefficients(p: &ShootParams, g0: f64, g2: f64, q: f64) -> Vec<f64> {
    let (n, k) = (p.dims.n, p.dims.k);
    let sign = |m: usize| if m % 2 == 0 { 1.0 } else { -1.0 };
    let mut c = vec![p.alpha];
    for (i, b) in p.betas.iter().enumerate() {
        let m = i + 1;
        c.push(sign(m) * b / lap_product(n, 1, m));
    }
    let a = p.alpha;
    c.push(sign(k) * g0 * a.powf(q) / lap_product(n, 1, k));
    let c2 = c[1];
    let top = g0 * q * a.powf(q - 1.0) * c2 + g2 * a.powf(q);
    c.push(sign(k) * top / lap_product(n, 2, k + 1));
    c
}

/// `[v_m(r), w_m(r)]` from the Taylor polynomial.
fn taylor_state(c: &[f64], n: usize, k: usize, r: f64) -> Vec<f64> {
    let mut y = Vec::with_capacity(2 * k);
    for m in 0..k {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let (mut v, mut w) = (0.0, 0.0);
        for (i, &ci) in c.iter().enumerate().skip(m) {
            let coef = ci * if m == 0 { 1.0 } else { lap_product(n, i - m + 1, i) };
            let e = 2 * (i - m);
            v += coef * r.powi(e as i32);
            if e > 0 {
                w += coef * e as f64 * r.powi(e as i32 - 1);
            }
        }
        y.push(sign * v);
        y.push(sign * w);
    }
    y
}

/// Radially integrates `(−Δ)^k u = g(r)·u^q` with `g(r) ≈ g0 + g2 r²` near 0.
fn shoot_weighted<G: Fn(f64) -> f64 + Sync>(
    p: &ShootParams,
    q: f64,
    g: G,
    g2: f64,
    horizon: f64,
    opts: &IvpOptions,
) -> Result<(Trajectory, TrajectoryOutcome)> {
    let (n, k) = (p.dims.n, p.dims.k);
    let nm1 = (n - 1) as f64;
    let rhs = |r: f64, y: &[f64], d: &mut [f64]| {
        for m in 0..k {
            let next = if m + 1 < k { y[2 * m + 2] } else { g(r) * y[0].max(0.0).powf(q) };
            d[2 * m] = y[2 * m + 1];
            d[2 * m + 1] = -nm1 / r * y[2 * m + 1] - next;
        }
    };
    let c = taylor_coefficients(p, g(0.0), g2, q);
    let y0 = taylor_state(&c, n, k, opts.r0);
    let mut traj = Trajectory { r: vec![opts.r0], states: vec![y0.clone()] };
    let mut outcome = None;
    let ctl = StepControl::with_tol(p.tol);
    let mut stops: Vec<f64> = opts.stops.iter().copied().filter(|&s| s > opts.r0 && s < horizon).collect();
    stops.sort_by(f64::total_cmp);
    integrate(&rhs, opts.r0, y0, horizon, &stops, &ctl, |t0, y_prev, t1, y1| {
        if y1[0] <= 0.0 {
            let (rz, yz) = locate_zero(&rhs, t0, y_prev, t1 - t0);
            traj.r.push(rz);
            traj.states.push(yz);
            outcome = Some(TrajectoryOutcome::HitsZero { r_zero: rz });
            return Control::Stop;
        }
        traj.r.push(t1);
        traj.states.push(y1.to_vec());
        if y1[0] > p.blow_cap && y1[1] > 0.0 {
            outcome = Some(TrajectoryOutcome::BlowUp { r_star: t1 });
            return Control::Stop;
        }
        Control::Continue
    })?;
    let outcome = outcome.unwrap_or(TrajectoryOutcome::GlobalPositive { r_horizon: horizon });
    Ok((traj, outcome))
}

/// Bisects the step length from `(t0, y0)` until `u` vanishes.
fn locate_zero<F: Fn(f64, &[f64], &mut [f64])>(f: &F, t0: f64, y0: &[f64], h: f64) -> (f64, Vec<f64>) {
    let (mut lo, mut hi) = (0.0, h);
    let mut best = dp5_step(f, t0, y0, hi).0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let y = dp5_step(f, t0, y0, mid).0;
        if y[0] > 0.0 {
            lo = mid;
        } else {
            hi = mid;
            best = y;
        }
    }
    (t0 + hi, best)
}

pub fn ivp_integrate(p: &ShootParams) -> Result<(Trajectory, TrajectoryOutcome)> {
    ivp_integrate_with(p, &IvpOptions::default())
}

pub fn ivp_integrate_with(p: &ShootParams, opts: &IvpOptions) -> Result<(Trajectory, TrajectoryOutcome)> {
    shoot_weighted(p, p.dims.critical_exponent(), |_| 1.0, 0.0, p.r_max, opts)
}

/// Exponent `e = q(n/2−k) − (n/2+k)` of the ball weight `((1−s²)/2)^e`.
pub fn hyperbolic_weight_exponent(dims: Dimensions, q: f64) -> f64 {
    let (n, k) = (dims.n as f64, dims.k as f64);
    q * (n / 2.0 - k) - (n / 2.0 + k)
}

/// `((1 − s²)/2)^e`.
pub fn hyperbolic_weight(dims: Dimensions, q: f64, s: f64) -> f64 {
    let e = hyperbolic_weight_exponent(dims, q);
    if e == 0.0 {
        return 1.0;
    }
    ((1.0 - s) * (1.0 + s) / 2.0).powf(e)
}

/// Shoots `(−Δ)^k U = ((1−s²)/2)^e U^q` on `s ∈ [s₀, min(r_max, 1 − δ)]`.
/// `U` is the Euclidean pullback `(2/(1−s²))^{n/2−k} u` of a radial solution
/// of `P_k u = u^q`; at the critical `q` the weight is 1.
pub fn hyperbolic_shoot(p: &ShootParams, q: f64) -> Result<(Trajectory, TrajectoryOutcome)> {
    let crit = p.dims.critical_exponent::<f64>();
    if !(q > 1.0 && q <= crit) {
        return Err(Error::InvalidParams(format!("exponent must lie in (1, {crit}], got {q}")));
    }
    let e = hyperbolic_weight_exponent(p.dims, q);
    let g0 = hyperbolic_weight(p.dims, q, 0.0);
    let horizon = p.r_max.min(1.0 - BALL_MARGIN);
    let dims = p.dims;
    shoot_weighted(p, q, move |s| hyperbolic_weight(dims, q, s), -e * g0, horizon, &IvpOptions::default())
}

/// Integration settings shared by separatrix searches and scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparatrixOptions {
    pub r_max: f64,
    pub tol: f64,
    pub blow_cap: f64,
    /// How many times the horizon is doubled while a trajectory stays positive.
    pub doublings: usize,
}

impl Default for SeparatrixOptions {
    fn default() -> Self {
        Self { r_max: 40.0, tol: 1e-11, blow_cap: 1e8, doublings: 6 }
    }
}

/// Outcome for `k = 2` data `u(0) = α`, `Δu(0) = b`. A trajectory still
/// positive at `r_max` is rerun with the horizon doubled, up to
/// `opts.doublings` times.
pub fn classify_laplacian(dims: Dimensions, alpha: f64, b: f64, opts: &SeparatrixOptions) -> Result<TrajectoryOutcome> {
    if dims.k != 2 {
        return Err(Error::InvalidParams(format!("single-parameter shooting needs k = 2, got k = {}", dims.k)));
    }
    let mut r_max = opts.r_max;
    for _ in 0..=opts.doublings {
        let p = ShootParams::new(dims, alpha, vec![-b], r_max, opts.tol, opts.blow_cap)?;
        let out = ivp_integrate(&p)?.1;
        if !matches!(out, TrajectoryOutcome::GlobalPositive { .. }) {
            return Ok(out);
        }
        r_max *= 2.0;
    }
    Ok(TrajectoryOutcome::GlobalPositive { r_horizon: r_max / 2.0 })
}

/// Result of [`separatrix_bisect`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separatrix {
    /// Midpoint of the final bracket, as a value of `Δu(0)`, or the midpoint
    /// that stayed positive up to the horizon.
    pub beta: f64,
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
    pub iterations: usize,
    /// Set when a midpoint stayed positive up to the horizon; `lo` and `hi`
    /// are then the last bracket that still separated the outcomes.
    pub resolved_by_horizon: bool,
}

/// Bisects in `b = Δu(0)` between a `HitsZero` lower end and a `BlowUp`
/// upper end for `k = 2`.
pub fn separatrix_bisect(
    dims: Dimensions,
    alpha: f64,
    bracket: (f64, f64),
    iters: usize,
    opts: &SeparatrixOptions,
) -> Result<Separatrix> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(Error::InvalidParams(format!("bracket must satisfy lo < hi, got ({lo}, {hi})")));
    }
    let (olo, ohi) = (classify_laplacian(dims, alpha, lo, opts)?, classify_laplacian(dims, alpha, hi, opts)?);
    match (olo, ohi) {
        (TrajectoryOutcome::HitsZero { .. }, TrajectoryOutcome::BlowUp { .. }) => {}
        (a, b) if a.name() == b.name() => return Err(Error::InvalidBracket(a.name().into())),
        (a, b) => {
            return Err(Error::InvalidBracket(format!("{} at lo and {} at hi", a.name(), b.name())));
        }
    }
    let mut done = 0;
    let mut horizon = None;
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        done += 1;
        match classify_laplacian(dims, alpha, mid, opts)? {
            TrajectoryOutcome::HitsZero { .. } => lo = mid,
            TrajectoryOutcome::BlowUp { .. } => hi = mid,
            TrajectoryOutcome::GlobalPositive { .. } => {
                horizon = Some(mid);
                break;
            }
        }
    }
    let beta = horizon.unwrap_or(0.5 * (lo + hi));
    Ok(Separatrix { beta, lo, hi, width: hi - lo, iterations: done, resolved_by_horizon: horizon.is_some() })
}

/// Outcomes on a grid of `Δu(0)` values, in parallel.
pub fn scan_laplacian(dims: Dimensions, alpha: f64, bs: &[f64], opts: &SeparatrixOptions) -> Result<Vec<TrajectoryOutcome>> {
    bs.par_iter().map(|&b| classify_laplacian(dims, alpha, b, opts)).collect()
}

/// Index of the first `BlowUp` in a scan that reads `HitsZero…HitsZero
/// [GlobalPositive…] BlowUp…BlowUp`. Any interleaving is an error.
pub fn single_crossover(outcomes: &[TrajectoryOutcome], bs: &[f64]) -> Result<Option<usize>> {
    let rank = |o: &TrajectoryOutcome| match o {
        TrajectoryOutcome::HitsZero { .. } => 0,
        TrajectoryOutcome::GlobalPositive { .. } => 1,
        TrajectoryOutcome::BlowUp { .. } => 2,
    };
    for (i, w) in outcomes.windows(2).enumerate() {
        if rank(&w[1]) < rank(&w[0]) {
            return Err(Error::NonMonotone(bs[i + 1]));
        }
    }
    Ok(outcomes.iter().position(|o| rank(o) == 2))
}

/// `Γ(n/2 + k)/Γ(n/2 − k)`, the constant in `(−Δ)^k U = c_U U^p`.
pub fn bubble_constant(dims: Dimensions) -> f64 {
    let (n, k) = (dims.n as f64, dims.k as f64);
    (log_gamma(n / 2.0 + k).expect("positive") - log_gamma(n / 2.0 - k).expect("positive")).exp()
}

/// `Δu(0)` of the entire solution with `u(0) = α` and unit constant:
/// `−n m α^{(m+2)/m} / (2 c_U^{2/(m(p−1))})`, `m = (n−2k)/2`.
pub fn entire_laplacian_at_origin(dims: Dimensions, alpha: f64) -> f64 {
    let m = (dims.n - 2 * dims.k) as f64 / 2.0;
    let p = dims.critical_exponent::<f64>();
    let kappa = bubble_constant(dims).powf(1.0 / (p - 1.0));
    -(dims.n as f64) * m / (2.0 * kappa.powf(2.0 / m)) * alpha.powf((m + 2.0) / m)
}

/// `U(r) = (2a/(a² + r²))^{(n−2k)/2}`.
pub fn bubble_u<T: Real>(dims: Dimensions, a: T, r: T) -> T {
    let m = dims.half_gap::<T>();
    (T::of(2.0) * a / (a * a + r * r)).powf(m)
}

/// `V(r) = (2a/(a² − r²))^{(n−2k)/2}` for `r < a`; the exponent reads
/// `(n−4)/2` at `k = 2`.
pub fn bubble_v<T: Real>(dims: Dimensions, a: T, r: T) -> Result<T> {
    if !(r < a) {
        return Err(Error::Domain(format!("V is singular for r >= a (r = {r}, a = {a})")));
    }
    let m = dims.half_gap::<T>();
    Ok((T::of(2.0) * a / ((a - r) * (a + r))).powf(m))
}

/// Ratio-constancy check of `(−Δ)^k B / B^p` for a bubble `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleResidual {
    /// The constant, read off at one interior node.
    pub c: f64,
    /// `max |(−Δ)^k B − c B^p| / max c B^p`.
    pub residual: f64,
    /// Largest relative departure of the pointwise ratio from `c`.
    pub constancy: f64,
    /// Set for `V` with `k ≠ 2`.
    pub exploratory: bool,
}

fn bubble_residual(dims: Dimensions, u: RadialProfile<Dd>, exploratory: bool) -> Result<BubbleResidual> {
    let l = euclid_polylaplacian(&u, dims)?;
    let p = dims.critical_exponent::<Dd>();
    let ratios: Vec<Dd> = l.grid().iter().zip(l.values()).map(|(&r, &v)| v / u.eval(r).unwrap().powf(p)).collect();
    let c = ratios[ratios.len() / 2];
    let mut num = Dd::c(0.0);
    let mut den = Dd::c(0.0);
    let mut constancy = 0.0f64;
    for ((&r, &v), &q) in l.grid().iter().zip(l.values()).zip(&ratios) {
        let rhs = c * u.eval(r)?.powf(p);
        num = num.max((v - rhs).abs());
        den = den.max(rhs.abs());
        constancy = constancy.max((q / c - Dd::c(1.0)).to64().abs());
    }
    Ok(BubbleResidual { c: c.to64(), residual: (num / den).to64(), constancy, exploratory })
}

/// Checks `U` on `[0, 4a]`.
pub fn residual_u(dims: Dimensions, a: f64) -> Result<BubbleResidual> {
    if !(a > 0.0) {
        return Err(Error::InvalidParams(format!("a must be positive, got {a}")));
    }
    let ad = Dd::c(a);
    let h = ad / Dd::c(800.0);
    let u = RadialProfile::analytic(half_shifted_grid(h, 3200), move |r| bubble_u(dims, ad, r))?.with_even(true);
    bubble_residual(dims, u, false)
}

/// Checks `V` on `[0, 0.9a)`.
pub fn residual_v(dims: Dimensions, a: f64) -> Result<BubbleResidual> {
    if !(a > 0.0) {
        return Err(Error::InvalidParams(format!("a must be positive, got {a}")));
    }
    let ad = Dd::c(a);
    let h = ad / Dd::c(4000.0);
    let u = RadialProfile::analytic(half_shifted_grid(h, 3600), move |r| bubble_v(dims, ad, r).unwrap_or(Dd::nan()))?
        .with_even(true);
    bubble_residual(dims, u, dims.k != 2)
}
