//! The solution family `u = α/(cosh²(r/2) + β)^{(n−2k)/2}` and checks that
//! it solves `P_k u = c·u^{(n+2k)/(n−2k)}`.

use crate::error::{Error, Result};
use crate::gjms::{apply_pk, ball_radius, euclid_pullback_pk, pk_constant};
use crate::hgeom::Dimensions;
use crate::profile::{half_shifted_grid, RadialProfile};
use crate::scalar::{Dd, Real};
use crate::specfun::log_gamma;
use num_traits::Float;

/// Parameters `(α, β)` of the family, with `α > 0`, `β > −1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub alpha: f64,
    pub beta: f64,
    pub dims: Dimensions,
}

impl FamilyParams {
    pub fn new(alpha: f64, beta: f64, dims: Dimensions) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParams(format!("alpha must be positive, got {alpha}")));
        }
        if !(beta > -1.0) || !beta.is_finite() {
            return Err(Error::InvalidParams(format!("beta must exceed -1, got {beta}")));
        }
        Ok(Self { alpha, beta, dims })
    }

    /// `(n−2k)/2`.
    pub fn m(&self) -> f64 {
        (self.dims.n - 2 * self.dims.k) as f64 / 2.0
    }

    /// `(n+2k)/(n−2k)`.
    pub fn p(&self) -> f64 {
        self.dims.critical_exponent()
    }

    /// `u(r)`, using `cosh²(r/2) + β = sinh²(r/2) + 1 + β`.
    pub fn eval<T: Real>(&self, r: T) -> T {
        let s = (r * T::of(0.5)).sinh();
        let d = s * s + T::of(1.0 + self.beta);
        T::of(self.alpha) * (-T::of(self.m()) * d.ln()).exp()
    }

    /// `u` as a function of the Euclidean radius `s = tanh(r/2)`:
    /// `α(1 − s²)^m / (1 + β(1 − s²))^m`.
    pub fn eval_euclid<T: Real>(&self, s: T) -> T {
        let q = (T::one() - s) * (T::one() + s);
        let m = T::of(self.m());
        T::of(self.alpha) * (m * (q.ln() - (T::one() + T::of(self.beta) * q).ln())).exp()
    }

    /// `sinh^{n−2k}(r/2)·u(r)`, which tends to `α`.
    pub fn charge_at<T: Real>(&self, r: T) -> T {
        (r * T::of(0.5)).sinh().powi((self.dims.n - 2 * self.dims.k) as i32) * self.eval(r)
    }

    /// Even profile on `r_i = (i + ½)h`, `r_i ≤ r_max`, keeping the closed form
    /// for evaluation between nodes.
    pub fn profile<T: Real>(&self, h: T, r_max: T) -> Result<RadialProfile<T>> {
        let count = (r_max / h).to64().floor() as usize;
        let fp = *self;
        Ok(RadialProfile::analytic(half_shifted_grid(h, count), move |r| fp.eval(r))?.with_even(true))
    }

    /// Even profile on Euclidean radii `s_i = (i + ½)h ≤ s_max`.
    pub fn profile_euclid<T: Real>(&self, h: T, s_max: T) -> Result<RadialProfile<T>> {
        let count = (s_max / h).to64().floor() as usize;
        let fp = *self;
        Ok(RadialProfile::analytic(half_shifted_grid(h, count), move |s| fp.eval_euclid(s))?.with_even(true))
    }

    /// Closed-form constant `c` with `P_k u = c·u^p`:
    /// `2^{2k} Γ((n+2k)/2)/Γ((n−2k)/2) · (−β(1+β))^k · (α 2^m)^{1−p}`.
    pub fn exact_constant(&self) -> f64 {
        let (n, k) = (self.dims.n as f64, self.dims.k as f64);
        let lc0 = 2.0 * k * std::f64::consts::LN_2 + log_gamma((n + 2.0 * k) / 2.0).expect("positive")
            - log_gamma((n - 2.0 * k) / 2.0).expect("positive");
        let base = -self.beta * (1.0 + self.beta);
        lc0.exp() * base.powi(self.dims.k as i32) * (self.alpha * 2f64.powf(self.m())).powf(1.0 - self.p())
    }

    /// `Q = 2c/(n − 2k)` for the closed-form constant.
    pub fn exact_q(&self) -> f64 {
        self.exact_constant() / self.m()
    }
}

/// Admissible nonlinearities `f` in `P_k u = f(u)`.
#[derive(Debug, Clone, PartialEq)]
pub enum NonlinearitySpec {
    PurePower { c: f64, p: f64 },
    /// Piecewise-linear `f` through `(t_i, f_i)`, nondecreasing with `f(0) = 0`.
    Tabulated { t: Vec<f64>, f: Vec<f64> },
}

impl NonlinearitySpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            NonlinearitySpec::PurePower { c, p } => {
                if !c.is_finite() || !(*p > 1.0) {
                    return Err(Error::InvalidParams(format!("pure power needs finite c and p > 1, got ({c}, {p})")));
                }
            }
            NonlinearitySpec::Tabulated { t, f } => {
                if t.len() != f.len() || t.len() < 2 {
                    return Err(Error::InvalidParams("table needs matching arrays of length >= 2".into()));
                }
                if t[0] != 0.0 || f[0] != 0.0 {
                    return Err(Error::InvalidParams("table must start at f(0) = 0".into()));
                }
                if t.windows(2).any(|w| !(w[1] > w[0])) || f.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::InvalidParams("table must be increasing in t and nondecreasing in f".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            NonlinearitySpec::PurePower { c, p } => Ok(c * t.max(0.0).powf(*p)),
            NonlinearitySpec::Tabulated { t: ts, f } => {
                if t < 0.0 || t > ts[ts.len() - 1] {
                    return Err(Error::Coverage { r: t, lo: 0.0, hi: ts[ts.len() - 1] });
                }
                let i = ts.partition_point(|&x| x <= t).clamp(1, ts.len() - 1);
                let w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
                Ok(f[i - 1] + w * (f[i] - f[i - 1]))
            }
        }
    }
}

/// Grid used by [`residual_q`] and [`infer_power`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualOptions {
    /// Geodesic spacing; the Euclidean grid uses half of it.
    pub h: f64,
    pub r_max: f64,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self { h: 0.0025, r_max: 2.5 }
    }
}

/// Outcome of [`residual_q`].
#[derive(Debug, Clone, PartialEq)]
pub struct QResidual {
    /// Mean of `P_k u / u^p` over both routes.
    pub c_hat: f64,
    /// `2 c_hat/(n − 2k)`.
    pub q_hat: f64,
    /// Largest relative deviation of the pointwise ratio from `c_hat`. When
    /// `c_hat` vanishes to `1e−6·scale` this is `max |P_k u/u^p| / scale`.
    pub constancy: f64,
    pub c_hat_hyperbolic: f64,
    pub c_hat_euclid: f64,
    /// Largest relative gap between the two routes on the common region.
    pub route_agreement: f64,
    /// `|P_k 1|·max u^{1−p}`: the size of `P_k u/u^p` for generic data.
    pub scale: f64,
    pub c_exact: f64,
    pub points: usize,
}

impl QResidual {
    pub fn is_zero_case(&self) -> bool {
        self.c_hat.abs() <= 1e-6 * self.scale
    }
}

struct Routes {
    hyp: RadialProfile<Dd>,
    euc: RadialProfile<Dd>,
    p: Dd,
}

fn routes(fp: &FamilyParams, opts: &ResidualOptions) -> Result<Routes> {
    let d = fp.dims;
    let u = fp.profile(Dd::c(opts.h), Dd::c(opts.r_max))?;
    let hyp = apply_pk(&u, d)?;
    let hs = opts.h / 2.0;
    let s_max = ((opts.r_max / 2.0).tanh() + (2 * d.k + 3) as f64 * hs).min(1.0 - 2e-3);
    let ue = fp.profile_euclid(Dd::c(hs), Dd::c(s_max))?;
    let euc = euclid_pullback_pk(&ue, d)?;
    Ok(Routes { hyp, euc, p: Dd::c(fp.p()) })
}

/// Forms `P_k u / u^p` by both discretisations of `P_k` and measures how
/// constant it is.
pub fn residual_q(fp: &FamilyParams, opts: &ResidualOptions) -> Result<QResidual> {
    let Routes { hyp, euc, p } = routes(fp, opts)?;
    let ratio_h: Vec<Dd> = hyp.grid().iter().zip(hyp.values()).map(|(&r, &v)| v / fp.eval(r).powf(p)).collect();
    let ratio_e: Vec<Dd> = euc.grid().iter().zip(euc.values()).map(|(&s, &v)| v / fp.eval_euclid(s).powf(p)).collect();
    let mean = |v: &[Dd]| (v.iter().copied().sum::<Dd>() / Dd::of_usize(v.len())).to64();
    let (ch, ce) = (mean(&ratio_h), mean(&ratio_e));
    let all: Vec<Dd> = ratio_h.iter().chain(&ratio_e).copied().collect();
    let c_hat = mean(&all);
    let u_max = fp.eval(0.0f64);
    let scale = pk_constant::<f64>(fp.dims).abs() * u_max.powf(1.0 - fp.p());
    let zero = c_hat.abs() <= 1e-6 * scale;
    let constancy = if zero {
        all.iter().map(|x| x.to64().abs()).fold(0.0, f64::max) / scale
    } else {
        all.iter().map(|x| (x.to64() / c_hat - 1.0).abs()).fold(0.0, f64::max)
    };
    let mut agree = 0.0f64;
    let mut hmax = 0.0f64;
    for (&r, &v) in hyp.grid().iter().zip(hyp.values()) {
        hmax = hmax.max(v.to64().abs());
        let s = ball_radius(r);
        if s <= euc.last() {
            let w = euc.eval(s)?;
            let denom = if zero { scale * u_max.powf(fp.p()) } else { v.to64().abs() };
            agree = agree.max((v - w).to64().abs() / denom);
        }
    }
    Ok(QResidual {
        c_hat,
        q_hat: c_hat / fp.m(),
        constancy,
        c_hat_hyperbolic: ch,
        c_hat_euclid: ce,
        route_agreement: agree,
        scale,
        c_exact: fp.exact_constant(),
        points: all.len(),
    })
}

/// Least-squares fit of `ln |P_k u|` against `ln u`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerFit {
    pub p_hat: f64,
    pub c_hat: f64,
    /// Sign of `P_k u` on the fit window.
    pub sign: i8,
    pub points: usize,
}

pub fn infer_power(fp: &FamilyParams, opts: &ResidualOptions) -> Result<PowerFit> {
    if fp.beta == 0.0 {
        return Err(Error::InvalidParams("beta = 0 gives P_k u = 0; there is no power to fit".into()));
    }
    let u = fp.profile(Dd::c(opts.h), Dd::c(opts.r_max))?;
    let pk = apply_pk(&u, fp.dims)?;
    let vals: Vec<f64> = pk.values().iter().map(|v| v.to64()).collect();
    let pos = vals.iter().filter(|&&v| v > 0.0).count();
    if pos != 0 && pos != vals.len() {
        return Err(Error::SignMixing);
    }
    let sign = if pos == 0 { -1 } else { 1 };
    let xs: Vec<f64> = pk.grid().iter().map(|&r| fp.eval(r).ln().to64()).collect();
    let ys: Vec<f64> = vals.iter().map(|v| v.abs().ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    Ok(PowerFit { p_hat: slope, c_hat: f64::from(sign) * intercept.exp(), sign, points: xs.len() })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `Q̃ = P_k u / (((n−2k)/2)·u^{(n+2k)/(n−2k)})`.
pub fn qtilde_profile<T: Real>(u: &RadialProfile<T>, dims: Dimensions) -> Result<RadialProfile<T>> {
    if let Some(v) = u.values().iter().find(|&&v| !(v.to64() >= 1e-300)) {
        return Err(Error::Domain(format!("profile value {v} is below 1e-300")));
    }
    let pk = apply_pk(u, dims)?;
    let m = dims.half_gap::<T>();
    let p = dims.critical_exponent::<T>();
    let offset = u.grid().partition_point(|&r| r < pk.first());
    let vals = u.values();
    pk.map_values_indexed(|i, _, v| v / (m * vals[i + offset].powf(p)))
}

/// `max/min − 1` of a profile of one sign.
pub fn nonconstancy<T: Real>(q: &RadialProfile<T>) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in q.values() {
        let x = v.to64();
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if lo < 0.0 && hi > 0.0 {
        return f64::INFINITY;
    }
    let (a, b) = (lo.abs().min(hi.abs()), lo.abs().max(hi.abs()));
    b / a - 1.0
}
