//! Poincaré ball and hyperboloid models of hyperbolic space.

use crate::error::{Error, Result};
use crate::quadrature::{uniform_breaks, GaussLegendre};
use crate::scalar::Real;
use crate::specfun::log_gamma;

/// Dimension `n` and operator order parameter `k`, with `n > 2k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dimensions {
    pub n: usize,
    pub k: usize,
}

impl Dimensions {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 3 || k < 1 || n <= 2 * k {
            return Err(Error::InvalidParams(format!("need n >= 3, k >= 1, n > 2k; got n = {n}, k = {k}")));
        }
        Ok(Self { n, k })
    }

    /// `(n - 2k)/2`, the decay exponent of the solution family.
    pub fn half_gap<T: Real>(&self) -> T {
        T::of((self.n - 2 * self.k) as f64 / 2.0)
    }

    /// Critical exponent `(n + 2k)/(n - 2k)`.
    pub fn critical_exponent<T: Real>(&self) -> T {
        T::of((self.n + 2 * self.k) as f64) / T::of((self.n - 2 * self.k) as f64)
    }
}

const BOUNDARY_GAP: f64 = 1e-12;

/// Point of the open unit ball, kept at least `1e-12` from the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint<T> {
    coords: Vec<T>,
}

impl<T: Real> BallPoint<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        let norm = euclid_norm(&coords);
        if !(norm < T::one() - T::of(BOUNDARY_GAP)) {
            return Err(Error::Domain(format!("ball point with norm {norm} is not inside the unit ball")));
        }
        Ok(Self { coords })
    }

    pub fn origin(n: usize) -> Self {
        Self { coords: vec![T::zero(); n] }
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> T {
        euclid_norm(&self.coords)
    }

    fn is_origin(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

/// Point `(x0, xs)` of the upper sheet `-x0² + |xs|² = -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidPoint<T> {
    pub x0: T,
    pub xs: Vec<T>,
}

impl<T: Real> HyperboloidPoint<T> {
    pub fn new(x0: T, xs: Vec<T>) -> Result<Self> {
        let p = Self { x0, xs };
        let defect = (p.minkowski(&p) + T::one()).abs();
        if !(x0 > T::zero()) || defect > T::of(1e-12) * x0 * x0 {
            return Err(Error::Domain(format!("not on the hyperboloid (x0 = {x0}, defect = {defect})")));
        }
        Ok(p)
    }

    pub fn vertex(n: usize) -> Self {
        Self { x0: T::one(), xs: vec![T::zero(); n] }
    }

    /// Minkowski form `-x0 y0 + Σ xi yi`.
    pub fn minkowski(&self, other: &Self) -> T {
        let s: T = self.xs.iter().zip(&other.xs).map(|(&a, &b)| a * b).sum();
        s - self.x0 * other.x0
    }

    /// Defect of the hyperboloid constraint, `|g(x, x) + 1|`.
    pub fn constraint_defect(&self) -> T {
        (self.minkowski(self) + T::one()).abs()
    }
}

fn euclid_norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|&c| c * c).sum::<T>().sqrt()
}

/// `log((1+s)/(1-s))`, the distance from the origin to a point of norm `s`.
pub fn origin_distance<T: Real>(s: T) -> T {
    ((T::one() + s) / (T::one() - s)).ln()
}

/// Geodesic distance in the ball.
pub fn ball_distance<T: Real>(x: &BallPoint<T>, y: &BallPoint<T>) -> Result<T> {
    if x.dim() != y.dim() {
        return Err(Error::InvalidParams("points of different dimension".into()));
    }
    let rho = if y.is_origin() {
        origin_distance(x.norm())
    } else if x.is_origin() {
        origin_distance(y.norm())
    } else {
        let diff: T = x.coords.iter().zip(&y.coords).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt();
        let (sx, sy) = (x.norm(), y.norm());
        let den = ((T::one() - sx) * (T::one() + sx) * (T::one() - sy) * (T::one() + sy)).sqrt();
        T::of(2.0) * (diff / den).asinh()
    };
    if !rho.is_finite() {
        return Err(Error::Domain("distance is not finite".into()));
    }
    Ok(rho)
}

/// Distance to the origin of the point at polar position `(r, θ)` about a
/// center at distance `d` from the origin; `θ = 0` points toward the origin.
pub fn law_of_cosines<T: Real>(d: T, r: T, theta: T) -> Result<T> {
    let slack = T::of(1e-12);
    if d < T::zero() || r < T::zero() || theta < -slack || theta > T::PI() + slack {
        return Err(Error::Domain(format!("law_of_cosines needs d, r >= 0 and θ in [0, π]; got ({d}, {r}, {theta})")));
    }
    let half = T::of(0.5);
    let a = ((d - r) * half).sinh();
    let b = (theta * half).sin();
    let s2 = a * a + d.sinh() * r.sinh() * b * b;
    Ok(T::of(2.0) * s2.sqrt().asinh())
}

/// Hyperbolic rotation in the `(x0, x1)` plane.
pub fn boost<T: Real>(t: T, p: &HyperboloidPoint<T>) -> HyperboloidPoint<T> {
    let (c, s) = (t.cosh(), t.sinh());
    let mut xs = p.xs.clone();
    let x1 = xs.first().copied().unwrap_or_else(T::zero);
    let x0 = c * p.x0 + s * x1;
    if let Some(first) = xs.first_mut() {
        *first = s * p.x0 + c * x1;
    }
    HyperboloidPoint { x0, xs }
}

/// The reflection `x1 ↦ -x1`.
pub fn reflect<T: Real>(p: &HyperboloidPoint<T>) -> HyperboloidPoint<T> {
    let mut q = p.clone();
    if let Some(first) = q.xs.first_mut() {
        *first = -*first;
    }
    q
}

/// Reflection across the leaf `U_t`: `A_t ∘ I ∘ A_{-t}`.
pub fn reflect_foliation<T: Real>(t: T, p: &HyperboloidPoint<T>) -> HyperboloidPoint<T> {
    boost(t, &reflect(&boost(-t, p)))
}

pub fn ball_to_hyperboloid<T: Real>(x: &BallPoint<T>) -> Result<HyperboloidPoint<T>> {
    let s = x.norm();
    let den = (T::one() - s) * (T::one() + s);
    if !(den > T::zero()) {
        return Err(Error::Domain("point on the ideal boundary".into()));
    }
    let x0 = (T::one() + s * s) / den;
    let xs = x.coords.iter().map(|&c| T::of(2.0) * c / den).collect();
    Ok(HyperboloidPoint { x0, xs })
}

pub fn hyperboloid_to_ball<T: Real>(p: &HyperboloidPoint<T>) -> Result<BallPoint<T>> {
    let den = T::one() + p.x0;
    BallPoint::new(p.xs.iter().map(|&c| c / den).collect())
}

/// `arccosh(-g(X, Y))`.
pub fn hyperboloid_distance<T: Real>(x: &HyperboloidPoint<T>, y: &HyperboloidPoint<T>) -> T {
    (-x.minkowski(y)).max(T::one()).acosh()
}

/// Area `2π^{n/2}/Γ(n/2)` of the unit sphere in `R^n`.
pub fn unit_sphere_area<T: Real>(n: usize) -> T {
    let h = T::of(n as f64 / 2.0);
    let lg = log_gamma(h).expect("positive argument");
    T::of(2.0) * (h * T::PI().ln() - lg).exp()
}

/// Volume of a geodesic ball of radius `r` in `H^n`.
pub fn volume_ball<T: Real>(r: T, dims: Dimensions) -> Result<T> {
    volume_ball_n(r, dims.n)
}

/// Volume of a geodesic ball of radius `r` in `H^n` for any `n >= 2`.
///
/// Gauss–Legendre of order 64 on panels short enough that the exponential
/// growth of `sinh^{n-1}` stays resolved.
pub fn volume_ball_n<T: Real>(r: T, n: usize) -> Result<T> {
    if n < 2 {
        return Err(Error::InvalidParams("volume needs n >= 2".into()));
    }
    if r < T::zero() || !r.is_finite() {
        return Err(Error::Domain(format!("radius {r} must be finite and nonnegative")));
    }
    if r.is_zero() {
        return Ok(T::zero());
    }
    let gl = GaussLegendre::<T>::new(64);
    let max_len = T::of(16.0 / (n - 1) as f64).min(T::one());
    let breaks = uniform_breaks(T::zero(), r, max_len);
    let e = (n - 1) as i32;
    let v = gl.integrate_panels(&breaks, |t| t.sinh().powi(e));
    Ok(unit_sphere_area::<T>(n) * v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_distance_of_half() {
        let x = BallPoint::new(vec![0.5, 0.0, 0.0]).unwrap();
        let o = BallPoint::origin(3);
        let d = ball_distance(&x, &o).unwrap();
        assert!((d - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_boundary_points() {
        assert!(BallPoint::new(vec![1.0 - 1e-13, 0.0]).is_err());
        assert!(BallPoint::new(vec![0.6, 0.8]).is_err());
    }

    #[test]
    fn collinear_law_of_cosines() {
        let pi = core::f64::consts::PI;
        assert!((law_of_cosines(2.0f64, 0.5, 0.0).unwrap() - 1.5).abs() < 1e-14);
        assert!((law_of_cosines(2.0f64, 0.5, pi).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn two_dimensional_volume() {
        let r = 3.0f64;
        let v = volume_ball_n(r, 2).unwrap();
        let want = 2.0 * core::f64::consts::PI * (r.cosh() - 1.0);
        assert!((v / want - 1.0).abs() < 1e-13);
    }
}
