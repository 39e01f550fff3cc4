use rayon::prelude::*;

use super::green::{green_kernel, GreenKernel, GreenParams};
use super::apply_pk;
use crate::error::{Error, Result};
use crate::hgeom::{law_of_cosines, unit_sphere_area, Dimensions};
use crate::kelvin::{kelvin_transform_onto, KelvinSphere};
use crate::profile::RadialProfile;
use crate::quadrature::{graded_breaks, uniform_breaks, GaussLegendre};

/// Quadrature layout for [`green_convolve_radial`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvolveOptions {
    pub kernel: GreenKernel,
    /// Gauss–Legendre order per panel, in both radius and angle.
    pub order: usize,
    /// Geometric levels refining `[0, 1]` toward the pole.
    pub levels: usize,
    pub ratio: f64,
}

impl Default for ConvolveOptions {
    fn default() -> Self {
        Self { kernel: GreenKernel::Printed, order: 48, levels: 12, ratio: 0.5 }
    }
}

/// Result of a Green-kernel convolution.
#[derive(Debug, Clone)]
pub struct Convolution {
    pub profile: RadialProfile<f64>,
    /// Estimated share of each value coming from beyond the grid of `h`,
    /// maximised over the output radii.
    pub tail_ratio: f64,
}

/// `(G ⋆ h)(r) = ∫ G(ρ(x, y)) h(|y|) dV_y` for `|x| = r`.
///
/// The integral is taken in geodesic polar coordinates `(t, θ)` about `x`,
/// with `dV = ω_{n−2} sinh^{n−1}(t) sin^{n−2}(θ) dt dθ` and `|y|` from the
/// law of cosines. `h` is taken as zero beyond its grid; the angular range
/// is cut where `|y|` leaves it.
pub fn green_convolve_radial(
    h: &RadialProfile<f64>,
    radii: &[f64],
    p: &GreenParams,
    opts: &ConvolveOptions,
) -> Result<Convolution> {
    let kernel = |rho: f64| green_kernel(opts.kernel, rho, p);
    let quad = KernelQuadrature { order: opts.order, levels: opts.levels, ratio: opts.ratio };
    kernel_convolve_radial(h, radii, p.dims.n, &kernel, opts.kernel.far_field_rate(p.dims), &quad)
}

/// Panel layout for [`kernel_convolve_radial`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuadrature {
    pub order: usize,
    pub levels: usize,
    pub ratio: f64,
}

impl Default for KernelQuadrature {
    fn default() -> Self {
        Self { order: 48, levels: 12, ratio: 0.5 }
    }
}

/// `(K ⋆ h)(r)` on `H^n` for a radial kernel `K(ρ)` decaying like `e^{−rate·ρ}`.
pub fn kernel_convolve_radial<K>(
    h: &RadialProfile<f64>,
    radii: &[f64],
    n: usize,
    kernel: &K,
    rate: f64,
    quad: &KernelQuadrature,
) -> Result<Convolution>
where
    K: Fn(f64) -> Result<f64> + Sync,
{
    if radii.iter().any(|&r| !(r >= 0.0) || !r.is_finite()) {
        return Err(Error::Domain("output radii must be finite and nonnegative".into()));
    }
    let gl = GaussLegendre::<f64>::new(quad.order);
    let omega = unit_sphere_area::<f64>(n - 1);
    let outputs = radii
        .par_iter()
        .map(|&r| {
            let v = convolve_at(h, r, n, kernel, quad, &gl)?;
            Ok((omega * v, omega * tail_estimate(h, r, n, kernel, rate)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = outputs.iter().map(|o| o.0).collect();
    let tail_ratio = outputs.iter().map(|&(v, t)| if t == 0.0 { 0.0 } else { t / v.abs() }).fold(0.0, f64::max);
    Ok(Convolution { profile: RadialProfile::new(radii.to_vec(), values)?, tail_ratio })
}

fn convolve_at<K: Fn(f64) -> Result<f64>>(
    h: &RadialProfile<f64>,
    r: f64,
    n: usize,
    kernel: &K,
    quad: &KernelQuadrature,
    gl: &GaussLegendre<f64>,
) -> Result<f64> {
    let big_r = h.last();
    let t_max = r + big_r;
    let mut breaks = graded_breaks(0.0, t_max.min(1.0), quad.levels, quad.ratio);
    if t_max > 1.0 {
        breaks.extend(uniform_breaks(1.0, t_max, 1.0).into_iter().skip(1));
    }
    for extra in [r, (big_r - r).abs()] {
        if extra > 0.0 && extra < t_max && !breaks.iter().any(|&b| (b - extra).abs() < 1e-12) {
            breaks.push(extra);
        }
    }
    breaks.sort_by(f64::total_cmp);
    let (cr, sr) = (r.cosh(), r.sinh());
    let cbig = big_r.cosh();
    let mut total = 0.0;
    for w in breaks.windows(2) {
        for (t, wt) in gl.mapped(w[0], w[1]) {
            let theta_max = if r == 0.0 || t <= big_r - r {
                std::f64::consts::PI
            } else {
                ((cr * t.cosh() - cbig) / (sr * t.sinh())).clamp(-1.0, 1.0).acos()
            };
            let mut inner = 0.0;
            if r == 0.0 {
                let s = gl.integrate(0.0, theta_max, |th| th.sin().powi(n as i32 - 2));
                inner = s * h.eval(t.min(big_r))?;
            } else if theta_max > 0.0 {
                for (th, wth) in gl.mapped(0.0, theta_max) {
                    let y = law_of_cosines(r, t, th)?.min(big_r);
                    inner += wth * h.eval(y)? * th.sin().powi(n as i32 - 2);
                }
            }
            if inner != 0.0 {
                total += wt * kernel(t)? * t.sinh().powi(n as i32 - 1) * inner;
            }
        }
    }
    Ok(total)
}

/// `h(R)·K(R − r)·|S^{n−1}| sinh^{n−1}(R) / (a + q − (n−1))`, with `a` the
/// decay rate of `h` at its last nodes and `q` the kernel's far-field rate.
fn tail_estimate<K: Fn(f64) -> Result<f64>>(h: &RadialProfile<f64>, r: f64, n: usize, kernel: &K, rate: f64) -> Result<f64> {
    let m = h.len();
    let (r1, r0) = (h.grid()[m - 1], h.grid()[m - 2]);
    let (v1, v0) = (h.values()[m - 1], h.values()[m - 2]);
    if v1 == 0.0 {
        return Ok(0.0);
    }
    let a = if v0.abs() > v1.abs() { (v0.abs() / v1.abs()).ln() / (r1 - r0) } else { 0.0 };
    let denom = a + rate - (n as f64 - 1.0);
    if denom <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let g = kernel((r1 - r).max(1e-3))?;
    let area = unit_sphere_area::<f64>(n) / unit_sphere_area::<f64>(n - 1);
    Ok(v1.abs() * g * area * r1.sinh().powi(n as i32 - 1) / denom)
}

/// `max |P_k(u_λ) − |J|^{(n+2k)/(2n)}·(P_k u)∘φ_λ| / max |rhs|` on `grid`,
/// a uniform grid outside the limit sphere.
pub fn covariance_residual<T: crate::scalar::Real>(
    s: &KelvinSphere<T>,
    u: &RadialProfile<T>,
    dims: Dimensions,
    grid: Vec<T>,
) -> Result<T> {
    let ul = kelvin_transform_onto(s, u, grid)?;
    let lhs = apply_pk(&ul, dims)?;
    let pku = apply_pk(u, dims)?;
    let mut diff = T::zero();
    let mut scale = T::zero();
    for (&r, &l) in lhs.grid().iter().zip(lhs.values()) {
        let rhs = s.operator_weight(r)? * pku.eval(s.phi(r)?)?;
        diff = diff.max((l - rhs).abs());
        scale = scale.max(rhs.abs());
    }
    Ok(diff / scale)
}

/// Relative gap between `|J(y)|^{(n−2k)/(2n)} G(x, y^λ)` and
/// `|J(x)|^{(n−2k)/(2n)} G(x^λ, y)`.
///
/// `x` lies at radius `x` on the polar axis about the sphere centre; `y` is
/// given by its radius and angle from that axis.
pub fn green_symmetry_residual(
    s: &KelvinSphere<f64>,
    x: f64,
    y_polar: (f64, f64),
    p: &GreenParams,
    kind: GreenKernel,
) -> Result<f64> {
    let (ry, th) = y_polar;
    let left = s.weight(ry)? * green_kernel(kind, law_of_cosines(x, s.phi(ry)?, th)?, p)?;
    let right = s.weight(x)? * green_kernel(kind, law_of_cosines(s.phi(x)?, ry, th)?, p)?;
    Ok((left - right).abs() / left.abs().max(right.abs()))
}

/// Relative gap between `|J(x)|^{(n−2k)/(2n)}|J(y)|^{(n−2k)/(2n)} G(x^λ, y^λ)`
/// and `G(x, y)`.
pub fn green_double_inversion_residual(
    s: &KelvinSphere<f64>,
    x: f64,
    y_polar: (f64, f64),
    p: &GreenParams,
    kind: GreenKernel,
) -> Result<f64> {
    let (ry, th) = y_polar;
    let left = s.weight(x)? * s.weight(ry)? * green_kernel(kind, law_of_cosines(s.phi(x)?, s.phi(ry)?, th)?, p)?;
    let right = green_kernel(kind, law_of_cosines(x, ry, th)?, p)?;
    Ok((left - right).abs() / left.abs().max(right.abs()))
}
