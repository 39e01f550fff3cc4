use crate::error::{Error, Result};
use crate::hgeom::Dimensions;
use crate::scalar::{ln_sinh, Real};
use crate::specfun::{gauss_2f1, log_gamma, HypergeometricArgs};

/// Parameters of the fundamental solution of `P_k` on `H^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreenParams {
    pub dims: Dimensions,
}

impl GreenParams {
    pub fn new(dims: Dimensions) -> Self {
        Self { dims }
    }

    /// `4^k π^{n/2} Γ(k) / Γ(n/2 − k)`, the normalisation of the Riesz kernel
    /// `(2 sinh(ρ/2))^{−(n−2k)}`.
    pub fn riesz_gamma<T: Real>(&self) -> T {
        let (n, k) = (self.dims.n as f64, self.dims.k as f64);
        let lg = log_gamma(T::of(k)).expect("k >= 1") - log_gamma(T::of(n / 2.0 - k)).expect("n > 2k");
        (T::of(k) * T::of(4.0).ln() + T::of(n / 2.0) * T::PI().ln() + lg).exp()
    }

    fn ln_prefactor<T: Real>(&self) -> T {
        let (n, k) = (self.dims.n as f64, self.dims.k as f64);
        let lg = |x: f64| log_gamma(T::of(x)).expect("positive argument");
        lg(n / 2.0) - T::of(n) * T::LN_2() - T::of(n / 2.0) * T::PI().ln() - lg(k) - lg(k + 1.0)
    }
}

/// Radial kernels available for Green-function experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GreenKernel {
    /// `Γ(n/2)/(2^n π^{n/2} Γ(k)Γ(k+1)) · cosh^{−n}(ρ/2) sinh^{−(n−2k)}(ρ/2) · F(k−(n−2)/2, k; k+1; cosh^{−2}(ρ/2))`.
    #[default]
    Printed,
    /// The same expression with `cosh^{−2k}(ρ/2)` in place of `cosh^{−n}(ρ/2)`.
    /// Annihilated by `P_k` away from the pole; for `k = 1` it equals
    /// `[(2 sinh(ρ/2))^{2−n} − (2 cosh(ρ/2))^{2−n}]` over the Riesz normalisation.
    Harmonic,
    /// `(2 sinh(ρ/2))^{−(n−2k)}` over `4^k π^{n/2} Γ(k)/Γ(n/2 − k)`, the
    /// conformal image of the Euclidean Riesz kernel.
    Riesz,
}

impl GreenKernel {
    pub const ALL: [GreenKernel; 3] = [GreenKernel::Printed, GreenKernel::Harmonic, GreenKernel::Riesz];

    pub fn name(self) -> &'static str {
        match self {
            GreenKernel::Printed => "printed",
            GreenKernel::Harmonic => "harmonic",
            GreenKernel::Riesz => "riesz",
        }
    }

    /// Exponential decay rate of the kernel as `ρ → ∞`.
    pub fn far_field_rate(self, dims: Dimensions) -> f64 {
        let (n, k) = (dims.n as f64, dims.k as f64);
        match self {
            GreenKernel::Printed => n - k,
            GreenKernel::Harmonic => n / 2.0,
            GreenKernel::Riesz => n / 2.0 - k,
        }
    }
}

fn ln_cosh<T: Real>(x: T) -> T {
    let x = x.abs();
    x + (-(x + x)).exp().ln_1p() - T::LN_2()
}

/// Printed fundamental solution `P_k^{-1}(ρ)`.
pub fn green_pk<T: Real>(rho: T, p: &GreenParams) -> Result<T> {
    green_kernel(GreenKernel::Printed, rho, p)
}

pub fn green_kernel<T: Real>(kind: GreenKernel, rho: T, p: &GreenParams) -> Result<T> {
    if !(rho > T::zero()) {
        return Err(Error::Domain(format!("Green's function is singular at ρ = {rho}")));
    }
    let (n, k) = (p.dims.n as f64, p.dims.k as f64);
    let half = rho * T::of(0.5);
    let ls = ln_sinh(half);
    let gap = T::of(n - 2.0 * k);
    if kind == GreenKernel::Riesz {
        return Ok((-gap * (T::LN_2() + ls)).exp() / p.riesz_gamma::<T>());
    }
    let lc = ln_cosh(half);
    let cosh_power = match kind {
        GreenKernel::Printed => T::of(n),
        _ => T::of(2.0 * k),
    };
    let z = (-(lc + lc)).exp();
    let f = gauss_2f1(&HypergeometricArgs::new(T::of(k - (n - 2.0) / 2.0), T::of(k), T::of(k + 1.0), z)?)?;
    Ok((p.ln_prefactor::<T>() - cosh_power * lc - gap * ls).exp() * f)
}

/// `(2 sinh(ρ/2))^{−(n−2k)} − (2 cosh(ρ/2))^{−(n−2k)}`, evaluated as
/// `(2 sinh(ρ/2))^{−(n−2k)}·(1 − tanh^{n−2k}(ρ/2))`.
pub fn bound_bracket<T: Real>(rho: T, dims: Dimensions) -> T {
    let half = rho * T::of(0.5);
    let gap = T::of((dims.n - 2 * dims.k) as f64);
    let a = (-gap * (T::LN_2() + ln_sinh(half))).exp();
    let e = (-(half + half)).exp();
    let ln_tanh = (-e).ln_1p() - e.ln_1p();
    -a * (gap * ln_tanh).exp_m1()
}

/// Outcome of the shape check `G ≤ B/γ` with `B` the bracket of
/// [`bound_bracket`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// `B(1)/G(1)`: the scale that makes the bound an equality at `ρ = 1`.
    pub gamma_at_one: f64,
    /// `min B/G` over the grid, and where it is attained.
    pub gamma_min: f64,
    pub rho_at_min: f64,
    /// `min B/G` on a grid five times denser.
    pub gamma_min_refined: f64,
    /// Largest scale compatible with equality-or-less at `ρ = 1` and with
    /// the bound on the whole grid: `min(gamma_at_one, gamma_min)`.
    pub gamma: f64,
    /// Whether the bound already holds with `gamma_at_one`.
    pub holds_at_calibration: bool,
    /// `lim_{ρ→0} G·ρ^{n−2k}` estimated at the smallest grid radius.
    pub small_rho_limit: f64,
    /// The Riesz normalisation, for comparison.
    pub gamma_riesz: f64,
    /// `B/G` does not fall by more than 1% beyond either end of the grid
    /// (checked at `ρ_min/10` and `2ρ_max`).
    pub edges_stable: bool,
}

impl BoundReport {
    /// The shape check: a single positive scale bounds `G` everywhere, and
    /// refining the grid does not push the infimum toward zero.
    pub fn shape_holds(&self) -> bool {
        self.gamma > 0.0
            && self.gamma.is_finite()
            && self.small_rho_limit.is_finite()
            && self.gamma_min_refined >= self.gamma_min * (1.0 - 1e-6)
            && self.edges_stable
    }
}

/// Calibrates `γ` and checks the bound on `ρ_i = ρ_min·(ρ_max/ρ_min)^{i/(count−1)}`.
pub fn green_bound_check(
    kind: GreenKernel,
    p: &GreenParams,
    rho_min: f64,
    rho_max: f64,
    count: usize,
) -> Result<BoundReport> {
    let scan = |count: usize| -> Result<(f64, f64)> {
        let mut best = (f64::INFINITY, f64::NAN);
        for i in 0..count {
            let rho = rho_min * (rho_max / rho_min).powf(i as f64 / (count - 1) as f64);
            let ratio = bound_bracket(rho, p.dims) / green_kernel(kind, rho, p)?;
            if ratio < best.0 {
                best = (ratio, rho);
            }
        }
        Ok(best)
    };
    let gamma_at_one = bound_bracket(1.0, p.dims) / green_kernel(kind, 1.0, p)?;
    let (gamma_min, rho_at_min) = scan(count)?;
    let (gamma_min_refined, _) = scan(5 * count)?;
    let gap = (p.dims.n - 2 * p.dims.k) as i32;
    let ratio = |rho: f64| -> Result<f64> { Ok(bound_bracket(rho, p.dims) / green_kernel(kind, rho, p)?) };
    let tol = 0.99;
    let edges_stable = ratio(rho_min / 10.0)? >= tol * ratio(rho_min)? && ratio(2.0 * rho_max)? >= tol * ratio(rho_max)?;
    Ok(BoundReport {
        gamma_at_one,
        gamma_min,
        rho_at_min,
        gamma_min_refined,
        gamma: gamma_at_one.min(gamma_min),
        holds_at_calibration: gamma_min >= gamma_at_one * (1.0 - 1e-12),
        small_rho_limit: green_kernel(kind, rho_min, p)? * rho_min.powi(gap),
        gamma_riesz: p.riesz_gamma(),
        edges_stable,
    })
}
