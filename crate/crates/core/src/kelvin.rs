//! Hyperbolic Kelvin transform across a geodesic sphere.
//!
//! The inversion of radius `λ` maps geodesic radius `r` to `φ_λ(r)` with
//! `tanh(φ/2)·tanh(r/2) = tanh²(λ/2)`. It is defined outside the limit
//! sphere of radius `λ♯ = 2 artanh(tanh²(λ/2)) = ln cosh λ`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hgeom::Dimensions;
use crate::profile::{Interp, RadialProfile};
use crate::scalar::{ln_sinh, Real};

/// Inversion sphere of radius `lambda` centred at the profile origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KelvinSphere<T> {
    lambda: T,
    lambda_sharp: T,
    dims: Dimensions,
}

impl<T: Real> KelvinSphere<T> {
    pub fn new(lambda: T, dims: Dimensions) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidParams(format!("inversion radius must be positive, got {lambda}")));
        }
        let s = (lambda * T::of(0.5)).sinh();
        let lambda_sharp = (T::of(2.0) * s * s).ln_1p();
        if !lambda_sharp.is_finite() || !(lambda_sharp < lambda) {
            return Err(Error::Domain(format!("inversion radius {lambda} is too large to resolve the limit sphere")));
        }
        Ok(Self { lambda, lambda_sharp, dims })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// Radius of the limit sphere.
    pub fn lambda_sharp(&self) -> T {
        self.lambda_sharp
    }

    pub fn dims(&self) -> Dimensions {
        self.dims
    }

    fn check(&self, r: T) -> Result<()> {
        if !(r > self.lambda_sharp) || !r.is_finite() {
            return Err(Error::Domain(format!(
                "radius {r} is not outside the limit sphere (λ♯ = {})",
                self.lambda_sharp
            )));
        }
        Ok(())
    }

    /// Image radius `φ_λ(r)`.
    pub fn phi(&self, r: T) -> Result<T> {
        self.check(r)?;
        let ls = self.lambda_sharp;
        Ok(ls + ln_one_minus_exp_neg(r + ls) - ln_one_minus_exp_neg(r - ls))
    }

    /// `φ′(r) = −sinh φ / sinh r`.
    pub fn phi_derivative(&self, r: T) -> Result<T> {
        Ok(-self.phi(r)?.sinh() / r.sinh())
    }

    /// Central-difference residual of `φ′ + sinh φ / sinh r`, step `1e−6·max(1, r)`.
    pub fn ode_residual(&self, r: T) -> Result<T> {
        self.ode_residual_with_step(r, T::of(1e-6) * r.max(T::one()))
    }

    pub fn ode_residual_with_step(&self, r: T, h: T) -> Result<T> {
        let d = (self.phi(r + h)? - self.phi(r - h)?) / (h + h);
        Ok(d + self.phi(r)?.sinh() / r.sinh())
    }

    /// `ln |J|^{1/n} = ln [sinh λ♯ / (2 sinh((r+λ♯)/2) sinh((r−λ♯)/2))]`.
    pub fn ln_jacobian_root(&self, r: T) -> Result<T> {
        self.check(r)?;
        let ls = self.lambda_sharp;
        let half = T::of(0.5);
        Ok(ln_sinh(ls) - T::LN_2() - ln_sinh((r + ls) * half) - ln_sinh((r - ls) * half))
    }

    /// `|J|`, in the closed form `[tanh²(λ/2) csch²(r/2) / (1 − tanh⁴(λ/2) coth²(r/2))]^n`
    /// rearranged to avoid cancellation.
    pub fn jacobian(&self, r: T) -> Result<T> {
        Ok((T::of_usize(self.dims.n) * self.ln_jacobian_root(r)?).exp())
    }

    /// `|J| = (tanh(λ/2) cosh(φ/2) / sinh(r/2))^{2n}`.
    pub fn jacobian_alt(&self, r: T) -> Result<T> {
        let half = T::of(0.5);
        let b = (self.lambda * half).tanh() * (self.phi(r)? * half).cosh() / (r * half).sinh();
        Ok(b.powi(2 * self.dims.n as i32))
    }

    /// `|J|^{(n−2k)/(2n)}`, the weight of the transform.
    pub fn weight(&self, r: T) -> Result<T> {
        Ok((self.dims.half_gap::<T>() * self.ln_jacobian_root(r)?).exp())
    }

    /// `|J|^{(n+2k)/(2n)}`, the weight on the operator side.
    pub fn operator_weight(&self, r: T) -> Result<T> {
        let e = T::of((self.dims.n + 2 * self.dims.k) as f64 / 2.0);
        Ok((e * self.ln_jacobian_root(r)?).exp())
    }
}

/// `ln(1 − e^{−x})` for `x > 0`.
fn ln_one_minus_exp_neg<T: Real>(x: T) -> T {
    if x <= T::LN_2() { (-(-x).exp_m1()).ln() } else { (-(-x).exp()).ln_1p() }
}

/// `u_λ(r) = |J(r)|^{(n−2k)/(2n)} u(φ_λ(r))` on the images of `u`'s nodes.
///
/// Node `r_i > λ♯` of `u` yields the output node `φ_λ(r_i)`, so no
/// interpolation is involved. Exact profiles stay exact.
pub fn kelvin_transform<T: Real>(s: &KelvinSphere<T>, u: &RadialProfile<T>) -> Result<RadialProfile<T>> {
    let mut grid = Vec::new();
    let mut values = Vec::new();
    for (&r, &v) in u.grid().iter().zip(u.values()).rev() {
        if r <= s.lambda_sharp {
            break;
        }
        let y = s.phi(r)?;
        if !y.is_finite() {
            continue;
        }
        if let Some(&last) = grid.last() {
            if y <= last {
                continue;
            }
        }
        grid.push(y);
        values.push(s.weight(y)? * v);
    }
    let out = RadialProfile::new(grid, values)?;
    Ok(match u.interp() {
        Interp::Exact(f) => with_exact(out, *s, f.clone()),
        Interp::Cubic => out,
    })
}

/// `u_λ` sampled on `grid`, interpolating `u` where needed.
pub fn kelvin_transform_onto<T: Real>(
    s: &KelvinSphere<T>,
    u: &RadialProfile<T>,
    grid: Vec<T>,
) -> Result<RadialProfile<T>> {
    let values = grid
        .iter()
        .map(|&r| Ok(s.weight(r)? * u.eval(s.phi(r)?)?))
        .collect::<Result<Vec<_>>>()?;
    let out = RadialProfile::new(grid, values)?;
    Ok(match u.interp() {
        Interp::Exact(f) => with_exact(out, *s, f.clone()),
        Interp::Cubic => out,
    })
}

fn with_exact<T: Real>(p: RadialProfile<T>, s: KelvinSphere<T>, f: Arc<dyn Fn(T) -> T + Send + Sync>) -> RadialProfile<T> {
    let g = move |r: T| match (s.weight(r), s.phi(r)) {
        (Ok(w), Ok(y)) => w * f(y),
        _ => T::nan(),
    };
    RadialProfile::analytic(p.grid().to_vec(), g).unwrap_or(p)
}
