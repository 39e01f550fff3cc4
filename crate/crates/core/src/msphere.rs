//! Moving spheres: the difference `w_λ = u_λ − u` between a radial profile
//! and its Kelvin image across a sphere about `P`, the critical radius
//! `λ₀`, and the asymptotic charge `lim sinh^{n−2k}(r/2) u(r)`.
//!
//! `u` is radial about `O`, and `P` sits at geodesic distance `d` from `O`.
//! Points are given in geodesic polar coordinates `(r, θ)` about `P`, with
//! `θ` measured from the ray toward `O`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hgeom::{law_of_cosines, unit_sphere_area, Dimensions};
use crate::kelvin::KelvinSphere;
use crate::profile::RadialProfile;
use crate::quadrature::GaussLegendre;
use crate::scalar::ln_sinh;

/// Largest radius scanned before [`CriticalLambda::ExceedsCap`].
pub const DEFAULT_CAP: f64 = 20.0;

/// Sampling of the exterior `B_λ(P)^c` and the candidate radii.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereScan {
    pub center_offset: f64,
    /// Increasing candidate radii.
    pub lambdas: Vec<f64>,
    /// Sample radii are `λ + offset`; an offset of 0 puts nodes on the sphere.
    pub radial_offsets: Vec<f64>,
    /// Gauss–Legendre order of the `θ` nodes on `[0, π]`; 1 node when `d = 0`.
    pub theta_order: usize,
    /// Sign threshold relative to the largest `|u|` or `|u_λ|` on the grid.
    pub tol_rel: f64,
    /// Stop bisection once the bracket is this narrow.
    pub width_goal: f64,
}

impl SphereScan {
    pub fn new(center_offset: f64, lambdas: Vec<f64>, radial_offsets: Vec<f64>) -> Result<Self> {
        if !(center_offset >= 0.0) || !center_offset.is_finite() {
            return Err(Error::InvalidParams(format!("center offset must be >= 0, got {center_offset}")));
        }
        if lambdas.is_empty() || lambdas.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidParams("radii must be positive and finite".into()));
        }
        if lambdas.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParams("radii must increase".into()));
        }
        if radial_offsets.is_empty() || radial_offsets.iter().any(|&o| !(o >= 0.0)) {
            return Err(Error::InvalidParams("radial offsets must be nonnegative".into()));
        }
        Ok(Self { center_offset, lambdas, radial_offsets, theta_order: 32, tol_rel: 1e-9, width_goal: 1e-7 })
    }

    /// Radii `0.02, 0.04, …, cap` and offsets `6(i/64)²`, `i = 0..=64`.
    pub fn standard(center_offset: f64, cap: f64) -> Result<Self> {
        let count = (cap / 0.02).round() as usize;
        let lambdas = (1..=count).map(|i| 0.02 * i as f64).collect();
        let offsets = (0..=64).map(|i| 6.0 * (i as f64 / 64.0).powi(2)).collect();
        Self::new(center_offset, lambdas, offsets)
    }

    pub fn cap(&self) -> f64 {
        *self.lambdas.last().expect("nonempty")
    }

    fn thetas(&self) -> (Vec<f64>, Vec<f64>) {
        if self.center_offset == 0.0 {
            return (vec![0.0], vec![std::f64::consts::PI]);
        }
        let gl = GaussLegendre::<f64>::new(self.theta_order);
        gl.mapped(0.0, std::f64::consts::PI).unzip()
    }
}

/// `w_λ` at the point `(r, θ)` about `P`:
/// `|J(r)|^{(n−2k)/(2n)}·u(ρ(x^λ, O)) − u(ρ(x, O))`.
pub fn w_at(u: &RadialProfile<f64>, s: &KelvinSphere<f64>, d: f64, r: f64, theta: f64) -> Result<f64> {
    let (image, far) = w_parts(u, s, d, r, theta)?;
    Ok(image - far)
}

/// `(u_λ(x), u(x))`.
fn w_parts(u: &RadialProfile<f64>, s: &KelvinSphere<f64>, d: f64, r: f64, theta: f64) -> Result<(f64, f64)> {
    let near = u.eval(law_of_cosines(d, s.phi(r)?, theta)?)?;
    let far = u.eval(law_of_cosines(d, r, theta)?)?;
    Ok((s.weight(r)? * near, far))
}

/// Samples of `w_λ` on the exterior grid, row-major in `(r, θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WField {
    pub lambda: f64,
    pub radii: Vec<f64>,
    pub thetas: Vec<f64>,
    pub w: Vec<f64>,
    /// `w > tol_sign`, node by node.
    pub mask: Vec<bool>,
    pub tol_sign: f64,
    pub max_w: f64,
    pub max_abs_w: f64,
    /// Volume of the sampled part of `Σ_λ⁻` (trapezoid in `r`, Gauss in `θ`).
    pub sigma_measure: f64,
}

pub fn w_lambda(u: &RadialProfile<f64>, scan: &SphereScan, lambda: f64, dims: Dimensions) -> Result<WField> {
    let s = KelvinSphere::new(lambda, dims)?;
    let d = scan.center_offset;
    let radii: Vec<f64> = scan.radial_offsets.iter().map(|o| lambda + o).collect();
    let (thetas, tw) = scan.thetas();
    let mut w = Vec::with_capacity(radii.len() * thetas.len());
    let mut scale = 0.0f64;
    for &r in &radii {
        for &th in &thetas {
            let (image, far) = w_parts(u, &s, d, r, th)?;
            scale = scale.max(image.abs()).max(far.abs());
            w.push(image - far);
        }
    }
    let tol_sign = scan.tol_rel * scale;
    let mask: Vec<bool> = w.iter().map(|&x| x > tol_sign).collect();
    let n = dims.n as i32;
    let sphere = if n >= 2 { unit_sphere_area::<f64>(dims.n - 1) } else { 1.0 };
    let mut sigma_measure = 0.0;
    for (i, &r) in radii.iter().enumerate() {
        let lo = if i > 0 { radii[i - 1] } else { r };
        let hi = if i + 1 < radii.len() { radii[i + 1] } else { r };
        let dr = 0.5 * (hi - lo);
        for (j, &th) in thetas.iter().enumerate() {
            if mask[i * thetas.len() + j] {
                let ang = if d == 0.0 { unit_sphere_area::<f64>(dims.n) / sphere } else { tw[j] * th.sin().powi(n - 2) };
                sigma_measure += sphere * ang * r.sinh().powi(n - 1) * dr;
            }
        }
    }
    let max_w = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_abs_w = w.iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok(WField { lambda, radii, thetas, w, mask, tol_sign, max_w, max_abs_w, sigma_measure })
}

/// One row of a scan over `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub lambda: f64,
    pub max_w: f64,
    pub sigma_measure: f64,
    /// `w_λ ≤ tol_sign` everywhere on the grid.
    pub good: bool,
}

pub fn scan_rows(u: &RadialProfile<f64>, scan: &SphereScan, dims: Dimensions) -> Result<Vec<ScanRow>> {
    scan.lambdas
        .par_iter()
        .map(|&l| {
            let f = w_lambda(u, scan, l, dims)?;
            Ok(ScanRow { lambda: l, max_w: f.max_w, sigma_measure: f.sigma_measure, good: f.max_w <= f.tol_sign })
        })
        .collect()
}

/// Verdict of [`critical_lambda`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalLambda {
    Finite { lambda0: f64, lo: f64, hi: f64, width: f64, iterations: usize },
    ExceedsCap { cap: f64 },
}

/// Largest `λ` with `w_λ ≤ tol_sign` on the grid, refined by bisection
/// between the last good and first bad candidate.
pub fn critical_lambda(u: &RadialProfile<f64>, scan: &SphereScan, dims: Dimensions) -> Result<(CriticalLambda, Vec<ScanRow>)> {
    let rows = scan_rows(u, scan, dims)?;
    let Some(first_bad) = rows.iter().position(|r| !r.good) else {
        return Ok((CriticalLambda::ExceedsCap { cap: scan.cap() }, rows));
    };
    if let Some(late) = rows[first_bad..].iter().find(|r| r.good) {
        return Err(Error::NonMonotone(late.lambda));
    }
    if first_bad == 0 {
        return Err(Error::InvalidParams(format!(
            "the smallest candidate radius {} already has w > 0",
            rows[0].lambda
        )));
    }
    let (mut lo, mut hi) = (rows[first_bad - 1].lambda, rows[first_bad].lambda);
    let mut iterations = 0;
    while hi - lo > scan.width_goal {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = w_lambda(u, scan, mid, dims)?;
        if f.max_w <= f.tol_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok((CriticalLambda::Finite { lambda0: lo, lo, hi, width: hi - lo, iterations }, rows))
}

/// `tanh²(λ₀/2)` at which the family `α/(cosh²(r/2) + β)^m`, `β ∈ (−1, −½)`,
/// is its own Kelvin image about a centre at distance `d`:
/// `(1 + β(1−t_d²)) / (t_d² − β(1−t_d²))` with `t_d = tanh(d/2)`.
pub fn family_critical_tanh2(beta: f64, d: f64) -> f64 {
    let o2 = (d / 2.0).tanh().powi(2);
    let q = 1.0 - o2;
    (1.0 + beta * q) / (o2 - beta * q)
}

/// Extrapolated `lim sinh^{n−2k}(r/2) u(r)` with a convergence diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeEstimate {
    pub value: f64,
    /// Gap between the two last Aitken estimates, relative to `value`.
    pub spread: f64,
    /// `d ln(sinh^{n−2k}(r/2) u)/dr` at the end of the grid.
    pub slope: f64,
    pub converged: bool,
}

/// Aitken Δ² extrapolation (Richardson for geometrically decaying errors)
/// over unit-spaced samples in the last ten units of the grid.
pub fn asymptotic_charge(u: &RadialProfile<f64>, dims: Dimensions) -> Result<ChargeEstimate> {
    let big = u.last();
    if big < 30.0 {
        return Err(Error::Domain(format!("the grid must reach r >= 30, it ends at {big}")));
    }
    let g = (dims.n - 2 * dims.k) as f64;
    let q: Vec<f64> = (0..=10)
        .map(|j| {
            let r = big - 10.0 + j as f64;
            Ok((g * ln_sinh(r / 2.0)).exp() * u.eval(r)?)
        })
        .collect::<Result<_>>()?;
    let aitken = |a: f64, b: f64, c: f64| {
        let den = (c - b) - (b - a);
        if den == 0.0 { c } else { c - (c - b) * (c - b) / den }
    };
    let a1 = aitken(q[8], q[9], q[10]);
    let a2 = aitken(q[7], q[8], q[9]);
    let spread = (a1 - a2).abs() / a1.abs();
    let slope = if q[9] > 0.0 && q[10] > 0.0 { (q[10] / q[9]).ln() } else { f64::NAN };
    let converged = a1.is_finite() && a1 > 0.0 && spread <= 1e-4 && slope.abs() <= 1e-3;
    Ok(ChargeEstimate { value: a1, spread, slope, converged })
}
