//! Hardy–Littlewood–Sobolev inequality on `H^n` with kernel
//! `(2 sinh(ρ/2))^{−lam}`: sharp constant and a quadrature check.

use crate::error::{Error, Result};
use rayon::prelude::*;

use crate::hgeom::unit_sphere_area;
use crate::profile::{uniform_grid, RadialProfile};
use crate::quadrature::{graded_breaks, uniform_breaks, GaussLegendre};
use crate::scalar::{ln_sinh, Real};
use crate::specfun::log_gamma;

/// Dimension `n` and kernel exponent `lam ∈ (0, n)`; `p = 2n/(2n − lam)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlsParams {
    pub n: usize,
    pub lam: f64,
    pub p: f64,
}

impl HlsParams {
    pub fn new(n: usize, lam: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("need n >= 2, got {n}")));
        }
        if !(lam > 0.0 && lam < n as f64) {
            return Err(Error::InvalidParams(format!("need 0 < lam < n, got lam = {lam}")));
        }
        let nf = n as f64;
        Ok(Self { n, lam, p: 2.0 * nf / (2.0 * nf - lam) })
    }

    /// `(2 sinh(ρ/2))^{−lam}`.
    pub fn kernel<T: Real>(&self, rho: T) -> T {
        (-T::of(self.lam) * (T::LN_2() + ln_sinh(rho * T::of(0.5)))).exp()
    }
}

/// `ln C_{n,lam}` with `C = π^{lam/2} Γ(n/2 − lam/2)/Γ(n − lam/2) · (Γ(n/2)/Γ(n))^{−1 + lam/n}`.
pub fn ln_hls_constant<T: Real>(h: &HlsParams) -> T {
    let n = T::of_usize(h.n);
    let lam = T::of(h.lam);
    let two = T::of(2.0);
    let lg = |x: T| log_gamma(x).expect("positive argument");
    lam / two * T::PI().ln() + lg(n / two - lam / two) - lg(n - lam / two)
        + (lam / n - T::one()) * (lg(n / two) - lg(n))
}

pub fn hls_constant(h: &HlsParams) -> f64 {
    ln_hls_constant::<f64>(h).exp()
}

/// The formula evaluated term by term with `Γ` itself.
pub fn hls_constant_direct(h: &HlsParams) -> f64 {
    let (n, lam) = (h.n as f64, h.lam);
    let g = |x: f64| log_gamma(x).expect("positive argument").exp();
    std::f64::consts::PI.powf(lam / 2.0) * g(n / 2.0 - lam / 2.0) / g(n - lam / 2.0)
        * (g(n / 2.0) / g(n)).powf(-1.0 + lam / n)
}

/// `(|S^{n−1}| ∫ |f|^p sinh^{n−1}(r) dr)^{1/p}` over the grid of `f`.
pub fn lp_norm(f: &RadialProfile<f64>, p: f64, n: usize) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParams(format!("need p >= 1, got {p}")));
    }
    let gl = GaussLegendre::<f64>::new(32);
    let breaks = uniform_breaks(f.domain_start(), f.last(), 0.25);
    let mut err = None;
    let s = gl.integrate_panels(&breaks, |r| match f.eval(r) {
        Ok(v) => v.abs().powf(p) * r.sinh().powi(n as i32 - 1),
        Err(e) => {
            err = Some(e);
            0.0
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok((unit_sphere_area::<f64>(n) * s).powf(1.0 / p))
}

/// Quadrature orders for [`hls_lhs`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlsQuadrature {
    /// Per-panel Gauss–Legendre order in `r` and `r′`.
    pub radial: usize,
    /// Per-panel order in `θ`.
    pub angular: usize,
    /// Geometric levels refining `r′` toward `r` and `θ` toward 0.
    pub levels: usize,
}

impl Default for HlsQuadrature {
    fn default() -> Self {
        Self { radial: 16, angular: 16, levels: 10 }
    }
}

impl HlsQuadrature {
    pub fn doubled(&self) -> Self {
        Self { radial: 2 * self.radial, angular: 2 * self.angular, levels: self.levels }
    }
}

/// `∬ f(x) g(y) (2 sinh(ρ(x,y)/2))^{−lam} dV_x dV_y` for radial `f`, `g`, as
/// `|S^{n−1}| |S^{n−2}| ∫∫∫ f(r) g(r′) K(ρ) sinh^{n−1}r sinh^{n−1}r′ sin^{n−2}θ dθ dr′ dr`
/// with `ρ` from the law of cosines. Panels in `r′` are graded toward `r`,
/// and panels in `θ` toward 0 when `r′` is close to `r`.
pub fn hls_lhs(f: &RadialProfile<f64>, g: &RadialProfile<f64>, h: &HlsParams, quad: &HlsQuadrature) -> Result<f64> {
    let n = h.n;
    let glr = GaussLegendre::<f64>::new(quad.radial);
    let glt = GaussLegendre::<f64>::new(quad.angular);
    let outer: Vec<(f64, f64)> =
        uniform_breaks(0.0, f.last(), 0.5).windows(2).flat_map(|w| glr.mapped(w[0], w[1]).collect::<Vec<_>>()).collect();
    let rg = g.last();
    let tables: Vec<AngularTable> = (0..=quad.levels).map(|d| AngularTable::new(d, n, &glt)).collect();
    let sum: f64 = outer
        .par_iter()
        .map(|&(r, wr)| -> Result<f64> {
            let fr = f.eval(r)?;
            if fr == 0.0 {
                return Ok(0.0);
            }
            let mut breaks = uniform_breaks(0.0, rg, 0.5);
            if r < rg {
                let below = graded_breaks(r, -r.min(0.5), quad.levels, 0.5);
                let above = graded_breaks(r, (rg - r).min(0.5), quad.levels, 0.5);
                breaks.extend(below);
                breaks.extend(above);
                breaks.sort_by(f64::total_cmp);
                breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
            }
            let mut inner = 0.0;
            for w in breaks.windows(2) {
                for (rp, wp) in glr.mapped(w[0], w[1]) {
                    let gv = g.eval(rp)?;
                    if gv == 0.0 {
                        continue;
                    }
                    let a = angular_average(r, rp, h, &tables);
                    inner += wp * gv * rp.sinh().powi(n as i32 - 1) * a;
                }
            }
            Ok(wr * fr * r.sinh().powi(n as i32 - 1) * inner)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum();
    Ok(unit_sphere_area::<f64>(n) * unit_sphere_area::<f64>(n - 1) * sum)
}

/// Nodes `sin²(θ/2)` and weights `w·sin^{n−2}θ` on `[0, π]` graded `depth`
/// times toward 0.
struct AngularTable {
    half_sin2: Vec<f64>,
    weight: Vec<f64>,
}

impl AngularTable {
    fn new(depth: usize, n: usize, gl: &GaussLegendre<f64>) -> Self {
        let breaks = graded_breaks(0.0, std::f64::consts::PI, depth, 0.5);
        let (mut half_sin2, mut weight) = (Vec::new(), Vec::new());
        for w in breaks.windows(2) {
            for (th, wt) in gl.mapped(w[0], w[1]) {
                half_sin2.push((th / 2.0).sin().powi(2));
                weight.push(wt * th.sin().powi(n as i32 - 2));
            }
        }
        Self { half_sin2, weight }
    }
}

/// `∫_0^π K(ρ(r, r′, θ)) sin^{n−2}θ dθ`, using
/// `4 sinh²(ρ/2) = 4 sinh²((r−r′)/2) + 4 sinh r sinh r′ sin²(θ/2)`.
fn angular_average(r: f64, rp: f64, h: &HlsParams, tables: &[AngularTable]) -> f64 {
    let gap = (r - rp).abs();
    let levels = tables.len() - 1;
    let depth = if gap == 0.0 {
        levels
    } else {
        ((std::f64::consts::PI * (r * rp).sqrt() / gap).log2().ceil().max(0.0) as usize).min(levels)
    };
    let t = &tables[depth];
    let a = 4.0 * ((r - rp) / 2.0).sinh().powi(2);
    let b = 4.0 * r.sinh() * rp.sinh();
    let e = -h.lam / 2.0;
    t.half_sin2
        .iter()
        .zip(&t.weight)
        .map(|(&s2, &w)| {
            let q = a + b * s2;
            if q > 0.0 { w * q.powf(e) } else { 0.0 }
        })
        .sum()
}

/// One member of the deterministic test family.
#[derive(Debug, Clone)]
pub struct TestProfile {
    pub id: String,
    pub profile: RadialProfile<f64>,
}

/// Five exponentials `e^{−a r}` and five bumps `(1 − (r/R)²)³` on `[0, R]`.
///
/// The exponential rates exceed `n − 1`, so each member lies in `L^p`; they
/// are cut off at `min(18/(a − (n−1)), 12)`.
pub fn test_family(h: &HlsParams) -> Result<Vec<TestProfile>> {
    let nm1 = h.n as f64 - 1.0;
    let a_min = nm1 / h.p;
    let mut out = Vec::new();
    for (i, step) in [0.6, 1.0, 1.6, 2.5, 4.0].iter().enumerate() {
        let a = (a_min + step).max(nm1 + step);
        let r_max = (18.0 / (a - nm1)).min(12.0);
        let grid = uniform_grid(0.0, r_max, 400);
        let prof = RadialProfile::analytic(grid, move |r: f64| (-a * r).exp())?;
        out.push(TestProfile { id: format!("exp{}_a{a:.3}", i + 1), profile: prof });
    }
    for (i, big) in [0.5, 1.0, 2.0, 3.0, 4.5].iter().enumerate() {
        let big = *big;
        let grid = uniform_grid(0.0, big, 400);
        let prof = RadialProfile::analytic(grid, move |r: f64| {
            let t = 1.0 - (r / big).powi(2);
            if t > 0.0 { t.powi(3) } else { 0.0 }
        })?;
        out.push(TestProfile { id: format!("bump{}_R{big}", i + 1), profile: prof });
    }
    Ok(out)
}

/// One row of the inequality check.
#[derive(Debug, Clone, PartialEq)]
pub struct HlsRow {
    pub id: String,
    pub lam: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// `hls_lhs(f, f)` against `C·‖f‖_p²` for each profile.
pub fn hls_check(h: &HlsParams, family: &[TestProfile], quad: &HlsQuadrature) -> Result<Vec<HlsRow>> {
    let c = hls_constant(h);
    family
        .iter()
        .map(|t| {
            let lhs = hls_lhs(&t.profile, &t.profile, h, quad)?;
            let norm = lp_norm(&t.profile, h.p, h.n)?;
            let rhs = c * norm * norm;
            Ok(HlsRow { id: t.id.clone(), lam: h.lam, lhs, rhs, ratio: lhs / rhs })
        })
        .collect()
}
