//! GJMS operators on radial profiles, the Green's function of `P_k` and the
//! conformal-covariance checks.
//!
//! Radial operators use fourth-order central differences on uniform grids.
//! Each second-order factor consumes two nodes at each end of the grid,
//! except at the left end of an even profile sampled on a half-shifted grid
//! `r_i = (i + ½)h`, where mirrored ghost values `u_{−1} = u_0`,
//! `u_{−2} = u_1` keep every node.

mod convolve;
mod green;

pub use convolve::{
    covariance_residual, green_convolve_radial, green_double_inversion_residual, green_symmetry_residual, kernel_convolve_radial,
    Convolution, ConvolveOptions, KernelQuadrature,
};
pub use green::{bound_bracket, green_bound_check, green_kernel, green_pk, BoundReport, GreenKernel, GreenParams};

use crate::error::{Error, Result};
use crate::hgeom::Dimensions;
use crate::profile::RadialProfile;
use crate::scalar::Real;

/// Accuracy order of the difference stencils.
pub const STENCIL_ORDER: usize = 4;

/// Uniform radial grid on which `P_k` can be applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorStencil<T> {
    pub r_min: T,
    pub r_max: T,
    pub count: usize,
}

impl<T: Real> OperatorStencil<T> {
    pub fn new(r_min: T, r_max: T, count: usize, dims: Dimensions) -> Result<Self> {
        let needed = min_points(dims);
        if count < needed {
            return Err(Error::GridTooCoarse { count, needed });
        }
        if !(r_min > T::zero()) || !(r_max > r_min) {
            return Err(Error::InvalidParams(format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]")));
        }
        Ok(Self { r_min, r_max, count })
    }

    pub fn spacing(&self) -> T {
        (self.r_max - self.r_min) / T::of_usize(self.count - 1)
    }

    pub fn grid(&self) -> Vec<T> {
        crate::profile::uniform_grid(self.r_min, self.r_max, self.count)
    }
}

/// Smallest grid accepted for operators of order `2k`.
pub fn min_points(dims: Dimensions) -> usize {
    4 * dims.k + 5
}

/// Order in which the shifted factors `P_1 + j(j−1)` are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FactorOrder {
    #[default]
    Ascending,
    Descending,
}

/// `u″ + c(r)·u′` with fourth-order stencils.
fn second_order<T: Real, C: Fn(T) -> T>(u: &RadialProfile<T>, coef: C) -> Result<RadialProfile<T>> {
    let h = u.spacing().ok_or(Error::NonUniformGrid)?;
    let mirrored = u.is_even() && u.is_half_shifted();
    let vals = u.values();
    let n = vals.len();
    let mut ext = Vec::with_capacity(n + 4);
    let offset = if mirrored {
        ext.push(vals[1]);
        ext.push(vals[0]);
        2
    } else {
        0
    };
    ext.extend_from_slice(vals);
    let (lo, hi) = if mirrored { (0, n - 2) } else { (2, n - 2) };
    if hi < lo + 4 {
        return Err(Error::GridTooCoarse { count: n, needed: lo + 6 });
    }
    let twelve_h = T::of(12.0) * h;
    let twelve_h2 = twelve_h * h;
    let mut grid = Vec::with_capacity(hi - lo);
    let mut out = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let j = i + offset;
        let (m2, m1, c0, p1, p2) = (ext[j - 2], ext[j - 1], ext[j], ext[j + 1], ext[j + 2]);
        let d1 = (m2 - p2 + T::of(8.0) * (p1 - m1)) / twelve_h;
        let d2 = (T::of(16.0) * (p1 + m1) - (p2 + m2) - T::of(30.0) * c0) / twelve_h2;
        let r = u.grid()[i];
        grid.push(r);
        out.push(d2 + coef(r) * d1);
    }
    Ok(RadialProfile::new(grid, out)?.with_even(mirrored))
}

fn check_size<T: Real>(u: &RadialProfile<T>, dims: Dimensions) -> Result<()> {
    let needed = min_points(dims);
    if u.len() < needed {
        return Err(Error::GridTooCoarse { count: u.len(), needed });
    }
    Ok(())
}

/// Radial Laplace–Beltrami operator `Δ_H u = u″ + (n−1) coth(r) u′`.
pub fn radial_laplace_beltrami<T: Real>(u: &RadialProfile<T>, dims: Dimensions) -> Result<RadialProfile<T>> {
    check_size(u, dims)?;
    let c = T::of_usize(dims.n - 1);
    second_order(u, |r| c / r.tanh())
}

/// `P_1 + shift`, with `P_1 = −Δ_H − n(n−2)/4`.
fn shifted_p1<T: Real>(u: &RadialProfile<T>, dims: Dimensions, shift: T) -> Result<RadialProfile<T>> {
    let c = T::of_usize(dims.n - 1);
    let lap = second_order(u, |r| c / r.tanh())?;
    let m = shift - T::of((dims.n * (dims.n - 2)) as f64 / 4.0);
    let offset = u.grid().partition_point(|&r| r < lap.first());
    let vals = u.values();
    lap.map_values_indexed(|i, _, v| -v + m * vals[i + offset])
}

/// Conformal Laplacian `P_1 = −Δ_H − n(n−2)/4`.
pub fn apply_p1<T: Real>(u: &RadialProfile<T>, dims: Dimensions) -> Result<RadialProfile<T>> {
    check_size(u, dims)?;
    shifted_p1(u, dims, T::zero())
}

/// `P_k = P_1(P_1 + 2)⋯(P_1 + k(k−1))`.
pub fn apply_pk<T: Real>(u: &RadialProfile<T>, dims: Dimensions) -> Result<RadialProfile<T>> {
    apply_pk_ordered(u, dims, FactorOrder::Ascending)
}

pub fn apply_pk_ordered<T: Real>(u: &RadialProfile<T>, dims: Dimensions, order: FactorOrder) -> Result<RadialProfile<T>> {
    check_size(u, dims)?;
    let mut shifts: Vec<usize> = (1..=dims.k).map(|j| j * (j - 1)).collect();
    if order == FactorOrder::Descending {
        shifts.reverse();
    }
    let mut v = u.clone();
    for s in shifts {
        v = shifted_p1(&v, dims, T::of_usize(s))?;
    }
    Ok(v)
}

/// `∏_{j=1}^k (−n(n−2)/4 + j(j−1))`, the action of `P_k` on constants.
pub fn pk_constant<T: Real>(dims: Dimensions) -> T {
    let base = T::of((dims.n * (dims.n - 2)) as f64 / 4.0);
    (1..=dims.k).map(|j| T::of_usize(j * (j - 1)) - base).fold(T::one(), |a, b| a * b)
}

/// Euclidean radius of the ball point at geodesic radius `r`.
pub fn ball_radius<T: Real>(r: T) -> T {
    (r * T::of(0.5)).tanh()
}

/// Geodesic radius of the ball point at Euclidean radius `s`.
pub fn geodesic_radius<T: Real>(s: T) -> T {
    T::of(2.0) * s.atanh()
}

/// Conformal factor `2/(1 − s²)`.
pub fn conformal_factor<T: Real>(s: T) -> T {
    T::of(2.0) / ((T::one() - s) * (T::one() + s))
}

/// `|cosh²(r/2)·(1 − s²) − 1|` along `r = log((1+s)/(1−s))`.
pub fn weight_identity_defect<T: Real>(s: T) -> T {
    let c = (geodesic_radius(s) * T::of(0.5)).cosh();
    (c * c * (T::one() - s * s) - T::one()).abs()
}

/// Euclidean radial polylaplacian `(−Δ)^k u`, `Δ = ∂²_s + (n−1)/s ∂_s`.
pub fn euclid_polylaplacian<T: Real>(u: &RadialProfile<T>, dims: Dimensions) -> Result<RadialProfile<T>> {
    check_size(u, dims)?;
    let c = T::of_usize(dims.n - 1);
    let mut v = u.clone();
    for _ in 0..dims.k {
        v = second_order(&v, |s| c / s)?.map_values(|_, x| -x)?;
    }
    Ok(v)
}

/// Closest approach to the unit sphere accepted by [`euclid_pullback_pk`].
pub const BOUNDARY_MARGIN: f64 = 1e-3;

/// `P_k u = (2/(1−s²))^{−(n/2+k)} (−Δ)^k ((2/(1−s²))^{n/2−k} u)` for a profile
/// given on Euclidean radius `s`.
pub fn euclid_pullback_pk<T: Real>(u: &RadialProfile<T>, dims: Dimensions) -> Result<RadialProfile<T>> {
    check_size(u, dims)?;
    if u.last() > T::one() - T::of(BOUNDARY_MARGIN) {
        return Err(Error::Domain(format!(
            "Euclidean radius {} is within {BOUNDARY_MARGIN} of the boundary",
            u.last()
        )));
    }
    if !(u.first() >= T::zero()) {
        return Err(Error::Domain("Euclidean radii must be nonnegative".into()));
    }
    let lo = T::of(dims.n as f64 / 2.0 - dims.k as f64);
    let hi = T::of(dims.n as f64 / 2.0 + dims.k as f64);
    let v = euclid_polylaplacian(&u.map_values(|s, x| conformal_factor(s).powf(lo) * x)?, dims)?;
    v.map_values(|s, x| x / conformal_factor(s).powf(hi))
}
