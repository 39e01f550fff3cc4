//! Log-gamma, digamma and the Gauss hypergeometric function on [0, 1].

use crate::error::{Error, Result};
use crate::scalar::Real;

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

fn nonpositive_integer<T: Real>(x: T) -> bool {
    x <= T::zero() && x == x.round()
}

/// `ln|Γ(x)|`; negative arguments go through the reflection formula.
pub fn log_gamma<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma of {x}")));
    }
    if nonpositive_integer(x) {
        return Err(Error::Pole(x.to64()));
    }
    if x < T::of(0.5) {
        let s = (T::PI() * x).sin().abs();
        return Ok((T::PI() / s).ln() - log_gamma(T::one() - x)?);
    }
    let x = x - T::one();
    let mut acc = T::of(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::of(c) / (x + T::of_usize(i));
    }
    let t = x + T::of(LANCZOS_G + 0.5);
    let half_ln_2pi = T::of(0.918_938_533_204_672_8);
    Ok(half_ln_2pi + (x + T::of(0.5)) * t.ln() - t + acc.ln())
}

/// Sign of `Γ(x)` for `x` away from the poles.
fn gamma_sign<T: Real>(x: T) -> T {
    if x > T::zero() {
        return T::one();
    }
    let k = (-x).ceil().to64() as i64;
    if k % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// `Γ(x)`, evaluated through [`log_gamma`].
pub fn gamma<T: Real>(x: T) -> Result<T> {
    Ok(gamma_sign(x) * log_gamma(x)?.exp())
}

/// `Π Γ(num_i) / Π Γ(den_j)` accumulated in log space; a pole in the
/// denominator yields zero.
pub fn gamma_ratio<T: Real>(num: &[T], den: &[T]) -> Result<T> {
    if den.iter().any(|&x| nonpositive_integer(x)) {
        return Ok(T::zero());
    }
    let mut log = T::zero();
    let mut sign = T::one();
    for &x in num {
        log = log + log_gamma(x)?;
        sign = sign * gamma_sign(x);
    }
    for &x in den {
        log = log - log_gamma(x)?;
        sign = sign * gamma_sign(x);
    }
    Ok(sign * log.exp())
}

/// Digamma `ψ(x) = Γ'(x)/Γ(x)`.
pub fn digamma<T: Real>(x: T) -> Result<T> {
    if nonpositive_integer(x) {
        return Err(Error::Pole(x.to64()));
    }
    if x < T::zero() {
        return Ok(digamma(T::one() - x)? - T::PI() / (T::PI() * x).tan());
    }
    let mut x = x;
    let mut acc = T::zero();
    while x < T::of(8.0) {
        acc = acc - x.recip();
        x = x + T::one();
    }
    let inv2 = (x * x).recip();
    // Bernoulli tail B_{2j}/(2j x^{2j}), j = 1..7
    let coeffs = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
        1.0 / 12.0,
    ];
    let mut tail = T::zero();
    let mut pow = inv2;
    for &c in &coeffs {
        tail = tail + T::of(c) * pow;
        pow = pow * inv2;
    }
    Ok(acc + x.ln() - T::of(0.5) / x - tail)
}

/// Arguments of `₂F₁(a, b; c; z)` restricted to `z ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeometricArgs<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub z: T,
}

impl<T: Real> HypergeometricArgs<T> {
    pub fn new(a: T, b: T, c: T, z: T) -> Result<Self> {
        if nonpositive_integer(c) {
            return Err(Error::Pole(c.to64()));
        }
        if !(z >= T::zero() && z <= T::one()) {
            return Err(Error::Domain(format!("2F1 argument z = {z} outside [0, 1]")));
        }
        let s = c - a - b;
        if z == T::one() && !(s > T::zero()) && !terminates(a, b) {
            return Err(Error::Divergence(s.to64()));
        }
        Ok(Self { a, b, c, z })
    }
}

fn terminates<T: Real>(a: T, b: T) -> bool {
    nonpositive_integer(a) || nonpositive_integer(b)
}

const MAX_TERMS: usize = 100_000;
const DIRECT_LIMIT: f64 = 0.95;

/// Kahan-compensated partial sum of `Σ (a)_j (b)_j / ((c)_j j!) z^j`.
fn direct_series<T: Real>(a: T, b: T, c: T, z: T, max_terms: usize, stop: bool) -> T {
    let mut sum = T::one();
    let mut comp = T::zero();
    let mut term = T::one();
    let rel = T::of(1e-17);
    for j in 0..max_terms.saturating_sub(1) {
        let jf = T::of_usize(j);
        term = term * (a + jf) * (b + jf) / ((c + jf) * (jf + T::one())) * z;
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.is_zero() || (stop && term.abs() < rel * sum.abs()) {
            break;
        }
    }
    sum
}

/// The first `terms` terms of the power series, without early stopping.
pub fn gauss_2f1_partial<T: Real>(args: &HypergeometricArgs<T>, terms: usize) -> T {
    direct_series(args.a, args.b, args.c, args.z, terms, false)
}

/// `₂F₁(a, b; c; z)` for `z ∈ [0, 1]`.
///
/// Direct power series up to `z = 0.95`; beyond, the `1 - z` connection
/// formulas (with their logarithmic forms when `c - a - b` is an integer)
/// and Gauss summation at `z = 1`. Polynomial cases are summed directly.
///
/// The contiguous relation
/// `c(1-z)F(a,b;c;z) - cF(a-1,b;c;z) + (c-b)zF(a,b;c+1;z) = 0`
/// holds to round-off and serves as a self-check.
pub fn gauss_2f1<T: Real>(args: &HypergeometricArgs<T>) -> Result<T> {
    let HypergeometricArgs { a, b, c, z } = *args;
    if z.is_zero() {
        return Ok(T::one());
    }
    if terminates(a, b) || z <= T::of(DIRECT_LIMIT) {
        return Ok(direct_series(a, b, c, z, MAX_TERMS, true));
    }
    let s = c - a - b;
    if z == T::one() {
        return gamma_ratio(&[c, s], &[c - a, c - b]);
    }
    let w = T::one() - z;
    if s < T::zero() {
        let inner = HypergeometricArgs { a: c - a, b: c - b, c, z };
        return Ok(w.powf(s) * gauss_2f1(&inner)?);
    }
    let m = s.round();
    if (s - m).abs() < T::of(1e-12) {
        return integer_gap(a, b, m.to64() as usize, z);
    }
    let first = gamma_ratio(&[c, s], &[c - a, c - b])? * direct_series(a, b, T::one() - s, w, MAX_TERMS, true);
    let second = gamma_ratio(&[c, -s], &[a, b])? * w.powf(s) * direct_series(c - a, c - b, s + T::one(), w, MAX_TERMS, true);
    Ok(first + second)
}

/// Logarithmic connection formulas for `c = a + b + m`, `m ≥ 0` an integer.
fn integer_gap<T: Real>(a: T, b: T, m: usize, z: T) -> Result<T> {
    let w = T::one() - z;
    let lw = w.ln();
    let mf = T::of_usize(m);
    let c = a + b + mf;
    let mut finite = T::zero();
    if m > 0 {
        let pre = gamma_ratio(&[mf, c], &[a + mf, b + mf])?;
        let mut term = T::one();
        let mut acc = T::one();
        for j in 0..m - 1 {
            let jf = T::of_usize(j);
            term = term * (a + jf) * (b + jf) / ((jf + T::one()) * (T::one() - mf + jf)) * w;
            acc = acc + term;
        }
        finite = pre * acc;
    }
    let pre = gamma_ratio(&[c], &[a, b])?;
    if pre.is_zero() {
        return Ok(finite);
    }
    let mut fact_m = T::one();
    for j in 1..=m {
        fact_m = fact_m * T::of_usize(j);
    }
    let mut coef = fact_m.recip();
    let mut psi_n1 = digamma(T::one())?;
    let mut psi_nm1 = digamma(mf + T::one())?;
    let mut psi_a = digamma(a + mf)?;
    let mut psi_b = digamma(b + mf)?;
    let mut sum = T::zero();
    let mut comp = T::zero();
    let rel = T::of(1e-17);
    for j in 0..MAX_TERMS {
        let bracket = lw - psi_n1 - psi_nm1 + psi_a + psi_b;
        let term = coef * bracket;
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if j > 2 && term.abs() < rel * sum.abs() {
            break;
        }
        let jf = T::of_usize(j);
        coef = coef * (a + mf + jf) * (b + mf + jf) / ((jf + T::one()) * (jf + mf + T::one())) * w;
        psi_n1 = psi_n1 + (jf + T::one()).recip();
        psi_nm1 = psi_nm1 + (jf + mf + T::one()).recip();
        psi_a = psi_a + (a + mf + jf).recip();
        psi_b = psi_b + (b + mf + jf).recip();
    }
    let sign = if m % 2 == 0 { T::one() } else { -T::one() };
    let tail = sign * w.powi(m as i32) * pre * sum;
    Ok(finite - tail)
}
