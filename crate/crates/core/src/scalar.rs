//! Scalar abstraction and the double-double type [`Dd`].

use core::cmp::Ordering;
use core::fmt;
use core::iter::{Product, Sum};
use core::num::FpCategory;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};
use core::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};
use qd::Quad;

/// Real scalar accepted by every generic routine in the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + Sum + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }

    /// Converts a count or index.
    #[inline]
    fn of_usize(i: usize) -> Self {
        Self::of(i as f64)
    }

    /// Nearest `f64`.
    #[inline]
    fn to64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

/// `ln sinh x` for `x > 0`, without overflow for large `x`.
pub fn ln_sinh<T: Real>(x: T) -> T {
    x + (-(-(x + x)).exp_m1()).ln() - T::LN_2()
}

impl Real for f32 {}
impl Real for f64 {}
impl Real for Dd {}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Unevaluated sum of two `f64` with roughly 106 significant bits.
///
/// Arithmetic, `sqrt`, `exp` and `ln` come from [`qd::Quad`]; the remaining
/// elementary functions are built on top of them and carry close to full
/// double-double accuracy on moderate arguments.
#[derive(Copy, Clone, PartialEq, PartialOrd)]
pub struct Dd(Quad);

impl Dd {
    pub const ZERO: Dd = Dd(Quad(0.0, 0.0));
    pub const ONE: Dd = Dd(Quad(1.0, 0.0));
    pub const EPSILON: Dd = Dd(Quad(f64::EPSILON * f64::EPSILON, 0.0));

    /// Builds a value from a leading part and a trailing correction.
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (h, l) = two_sum(hi, lo);
        Dd(Quad(h, l))
    }

    pub const fn c(x: f64) -> Dd {
        Dd(Quad(x, 0.0))
    }

    pub fn hi(self) -> f64 {
        self.0 .0
    }

    pub fn lo(self) -> f64 {
        self.0 .1
    }

    fn from_pair((h, l): (f64, f64)) -> Dd {
        Dd(Quad(h, l))
    }

    fn series_tol(self) -> f64 {
        1e-34 * self.hi().abs().max(1e-300)
    }

    fn exp_m1_series(self) -> Dd {
        let mut term = self;
        let mut sum = self;
        let mut k = 1.0;
        let tol = self.series_tol();
        while term.hi().abs() > tol {
            k += 1.0;
            term = term * self / Dd::c(k);
            sum += term;
            if k > 80.0 {
                break;
            }
        }
        sum
    }

    fn sinh_series(self) -> Dd {
        let x2 = self * self;
        let mut term = self;
        let mut sum = self;
        let mut k = 1.0;
        let tol = self.series_tol();
        while term.hi().abs() > tol {
            term = term * x2 / Dd::c((k + 1.0) * (k + 2.0));
            k += 2.0;
            sum += term;
            if k > 80.0 {
                break;
            }
        }
        sum
    }

    fn ln_1p_series(self) -> Dd {
        // ln(1+x) = 2 atanh(x/(2+x))
        let t = self / (Dd::c(2.0) + self);
        let t2 = t * t;
        let mut pow = t;
        let mut sum = t;
        let mut k = 1.0;
        let tol = t.series_tol();
        loop {
            pow *= t2;
            k += 2.0;
            let term = pow / Dd::c(k);
            sum += term;
            if term.hi().abs() <= tol || k > 200.0 {
                break;
            }
        }
        sum * Dd::c(2.0)
    }

    fn sin_cos_reduced(r: Dd) -> (Dd, Dd) {
        let r2 = r * r;
        let tol = 1e-34;
        let mut s = r;
        let mut term = r;
        let mut k = 1.0;
        while term.hi().abs() > tol * r.hi().abs().max(1e-300) && k < 60.0 {
            term = -term * r2 / Dd::c((k + 1.0) * (k + 2.0));
            k += 2.0;
            s += term;
        }
        let mut c = Dd::ONE;
        let mut term = Dd::ONE;
        let mut k = 0.0;
        while term.hi().abs() > tol && k < 60.0 {
            term = -term * r2 / Dd::c((k + 1.0) * (k + 2.0));
            k += 2.0;
            c += term;
        }
        (s, c)
    }

    fn parse_decimal(s: &str) -> Option<Dd> {
        let s = s.trim();
        let (neg, body) = match s.as_bytes().first()? {
            b'-' => (true, &s[1..]),
            b'+' => (false, &s[1..]),
            _ => (false, s),
        };
        let lower = body.to_ascii_lowercase();
        match lower.as_str() {
            "inf" | "infinity" => return Some(if neg { Dd::neg_infinity() } else { Dd::infinity() }),
            "nan" => return Some(Dd::nan()),
            _ => {}
        }
        let (mant, exp) = match lower.find('e') {
            Some(i) => (&lower[..i], lower[i + 1..].parse::<i32>().ok()?),
            None => (lower.as_str(), 0),
        };
        let mut value = Dd::ZERO;
        let mut scale = exp;
        let mut seen_dot = false;
        let mut digits = 0;
        for ch in mant.chars() {
            match ch {
                '.' if !seen_dot => seen_dot = true,
                '0'..='9' => {
                    value = value * Dd::c(10.0) + Dd::c((ch as u8 - b'0') as f64);
                    digits += 1;
                    if seen_dot {
                        scale -= 1;
                    }
                }
                _ => return None,
            }
        }
        if digits == 0 {
            return None;
        }
        let ten = Dd::c(10.0);
        let value = if scale >= 0 { value * ten.powi(scale) } else { value / ten.powi(-scale) };
        Some(if neg { -value } else { value })
    }
}

impl Default for Dd {
    fn default() -> Dd {
        Dd::ZERO
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e}, {:e})", self.hi(), self.lo())
    }
}

/// Formats the leading `f64` part; precision flags are honoured.
impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.hi(), f)
    }
}

impl fmt::LowerExp for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerExp::fmt(&self.hi(), f)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd(Quad(x, 0.0))
    }
}

impl From<Dd> for f64 {
    fn from(x: Dd) -> f64 {
        x.hi() + x.lo()
    }
}

impl FromStr for Dd {
    type Err = num_traits::ParseFloatError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dd::parse_decimal(s).ok_or(num_traits::ParseFloatError { kind: num_traits::FloatErrorKind::Invalid })
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(Quad(-self.hi(), -self.lo()))
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        Dd(self.0.add_accurate(rhs.0))
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        Dd(self.0.sub_accurate(rhs.0))
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        Dd(self.0 * rhs.0)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        Dd(self.0 / rhs.0)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, rhs: Dd) -> Dd {
        self - (self / rhs).trunc() * rhs
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Dd {
            fn $m(&mut self, rhs: Dd) {
                *self = *self $op rhs;
            }
        }
    };
}

assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);
assign_op!(RemAssign, rem_assign, %);

impl Sum for Dd {
    fn sum<I: Iterator<Item = Dd>>(iter: I) -> Dd {
        iter.fold(Dd::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a Dd> for Dd {
    fn sum<I: Iterator<Item = &'a Dd>>(iter: I) -> Dd {
        iter.fold(Dd::ZERO, |a, b| a + *b)
    }
}

impl Product for Dd {
    fn product<I: Iterator<Item = Dd>>(iter: I) -> Dd {
        iter.fold(Dd::ONE, |a, b| a * b)
    }
}

impl Zero for Dd {
    fn zero() -> Dd {
        Dd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi() == 0.0
    }
}

impl One for Dd {
    fn one() -> Dd {
        Dd::ONE
    }
}

impl Num for Dd {
    type FromStrRadixErr = num_traits::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            return Err(num_traits::ParseFloatError { kind: num_traits::FloatErrorKind::Invalid });
        }
        s.parse()
    }
}

impl ToPrimitive for Dd {
    fn to_i64(&self) -> Option<i64> {
        let t = self.trunc();
        if !t.is_finite() || t.hi().abs() >= 9.2e18 {
            return None;
        }
        Some(t.hi() as i64 + t.lo() as i64)
    }
    fn to_u64(&self) -> Option<u64> {
        let t = self.trunc();
        if !t.is_finite() || t.hi() < 0.0 || t.hi() >= 1.8e19 {
            return None;
        }
        Some((t.hi() as i128 + t.lo() as i128) as u64)
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi() + self.lo())
    }
}

impl FromPrimitive for Dd {
    fn from_i64(n: i64) -> Option<Dd> {
        let hi = n as f64;
        let lo = (n - hi as i64) as f64;
        Some(Dd::new(hi, lo))
    }
    fn from_u64(n: u64) -> Option<Dd> {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(Dd::new(hi, lo))
    }
    fn from_f64(x: f64) -> Option<Dd> {
        Some(Dd::c(x))
    }
}

impl NumCast for Dd {
    fn from<T: ToPrimitive>(n: T) -> Option<Dd> {
        n.to_f64().map(Dd::c)
    }
}

macro_rules! dd_consts {
    ($($name:ident => ($h:expr, $l:expr),)*) => {
        impl FloatConst for Dd {
            $(fn $name() -> Dd { Dd(Quad($h, $l)) })*
        }
    };
}

dd_consts! {
    E => (2.718281828459045, 1.4456468917292502e-16),
    FRAC_1_PI => (0.3183098861837907, -1.9678676675182486e-17),
    FRAC_1_SQRT_2 => (0.7071067811865476, -4.833646656726457e-17),
    FRAC_2_PI => (0.6366197723675814, -3.935735335036497e-17),
    FRAC_2_SQRT_PI => (1.1283791670955126, 1.533545961316588e-17),
    FRAC_PI_2 => (1.5707963267948966, 6.123233995736766e-17),
    FRAC_PI_3 => (1.0471975511965979, -1.072081766451091e-16),
    FRAC_PI_4 => (0.7853981633974483, 3.061616997868383e-17),
    FRAC_PI_6 => (0.5235987755982989, -5.360408832255455e-17),
    FRAC_PI_8 => (0.39269908169872414, 1.5308084989341915e-17),
    LN_10 => (2.302585092994046, -2.1707562233822494e-16),
    LN_2 => (0.6931471805599453, 2.3190468138462996e-17),
    LOG10_E => (0.4342944819032518, 1.098319650216765e-17),
    LOG2_E => (1.4426950408889634, 2.0355273740931033e-17),
    PI => (3.141592653589793, 1.2246467991473532e-16),
    SQRT_2 => (1.4142135623730951, -9.667293313452913e-17),
    TAU => (6.283185307179586, 2.4492935982947064e-16),
    LOG10_2 => (0.3010299956639812, -2.8037281277851704e-18),
    LOG2_10 => (3.321928094887362, 1.661617516973592e-16),
}

impl Float for Dd {
    fn nan() -> Dd {
        Dd(Quad(f64::NAN, f64::NAN))
    }
    fn infinity() -> Dd {
        Dd(Quad(f64::INFINITY, 0.0))
    }
    fn neg_infinity() -> Dd {
        Dd(Quad(f64::NEG_INFINITY, 0.0))
    }
    fn neg_zero() -> Dd {
        Dd(Quad(-0.0, 0.0))
    }
    fn min_value() -> Dd {
        -Dd::max_value()
    }
    fn min_positive_value() -> Dd {
        Dd(Quad(f64::MIN_POSITIVE, 0.0))
    }
    fn max_value() -> Dd {
        Dd(Quad::MAX)
    }
    fn epsilon() -> Dd {
        Dd::EPSILON
    }
    fn is_nan(self) -> bool {
        self.hi().is_nan()
    }
    fn is_infinite(self) -> bool {
        self.hi().is_infinite()
    }
    fn is_finite(self) -> bool {
        self.hi().is_finite()
    }
    fn is_normal(self) -> bool {
        self.hi().is_normal()
    }
    fn classify(self) -> FpCategory {
        self.hi().classify()
    }
    fn floor(self) -> Dd {
        let h = self.hi().floor();
        if h != self.hi() {
            Dd(Quad(h, 0.0))
        } else {
            Dd::from_pair(quick_two_sum(h, self.lo().floor()))
        }
    }
    fn ceil(self) -> Dd {
        -(-self).floor()
    }
    fn round(self) -> Dd {
        let half = Dd::c(0.5);
        if self.is_sign_negative() {
            -(half - self).floor()
        } else {
            (self + half).floor()
        }
    }
    fn trunc(self) -> Dd {
        if self.is_sign_negative() {
            self.ceil()
        } else {
            self.floor()
        }
    }
    fn fract(self) -> Dd {
        self - self.trunc()
    }
    fn abs(self) -> Dd {
        if self.is_sign_negative() {
            -self
        } else {
            self
        }
    }
    fn signum(self) -> Dd {
        if self.is_nan() {
            Dd::nan()
        } else if self.is_sign_negative() {
            -Dd::ONE
        } else {
            Dd::ONE
        }
    }
    fn is_sign_positive(self) -> bool {
        !self.is_sign_negative()
    }
    fn is_sign_negative(self) -> bool {
        self.hi() < 0.0 || (self.hi() == 0.0 && self.hi().is_sign_negative())
    }
    fn mul_add(self, a: Dd, b: Dd) -> Dd {
        self * a + b
    }
    fn recip(self) -> Dd {
        Dd::ONE / self
    }
    fn powi(self, n: i32) -> Dd {
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }
    fn powf(self, y: Dd) -> Dd {
        if y.is_zero() {
            return Dd::ONE;
        }
        let yi = y.trunc();
        let integral = yi == y && y.hi().abs() <= 1024.0;
        if self.is_zero() {
            return if y.hi() > 0.0 { Dd::ZERO } else { Dd::infinity() };
        }
        if integral {
            return self.powi(yi.hi() as i32);
        }
        if self.hi() < 0.0 {
            return Dd::nan();
        }
        (y * self.ln()).exp()
    }
    fn sqrt(self) -> Dd {
        if self.hi() < 0.0 {
            return Dd::nan();
        }
        if self.is_infinite() {
            return self;
        }
        Dd(self.0.sqrt())
    }
    fn exp(self) -> Dd {
        if self.is_nan() {
            return self;
        }
        Dd(self.0.exp())
    }
    fn exp2(self) -> Dd {
        (self * Dd::LN_2()).exp()
    }
    fn ln(self) -> Dd {
        if self.is_nan() || self.hi() < 0.0 {
            return Dd::nan();
        }
        if self.is_infinite() {
            return self;
        }
        Dd(self.0.ln())
    }
    fn log(self, base: Dd) -> Dd {
        self.ln() / base.ln()
    }
    fn log2(self) -> Dd {
        self.ln() * Dd::LOG2_E()
    }
    fn log10(self) -> Dd {
        self.ln() * Dd::LOG10_E()
    }
    fn max(self, other: Dd) -> Dd {
        if self.is_nan() || other > self {
            other
        } else {
            self
        }
    }
    fn min(self, other: Dd) -> Dd {
        if self.is_nan() || other < self {
            other
        } else {
            self
        }
    }
    fn abs_sub(self, other: Dd) -> Dd {
        if self > other {
            self - other
        } else {
            Dd::ZERO
        }
    }
    fn cbrt(self) -> Dd {
        if self.is_zero() || !self.is_finite() {
            return self;
        }
        let a = self.abs();
        let mut y = Dd::c(a.hi().cbrt());
        for _ in 0..2 {
            y = y - (y * y * y - a) / (Dd::c(3.0) * y * y);
        }
        if self.hi() < 0.0 {
            -y
        } else {
            y
        }
    }
    fn hypot(self, other: Dd) -> Dd {
        let (a, b) = (self.abs(), other.abs());
        let m = a.max(b);
        if m.is_zero() {
            return Dd::ZERO;
        }
        let (x, y) = (a / m, b / m);
        m * (x * x + y * y).sqrt()
    }
    fn sin(self) -> Dd {
        self.sin_cos().0
    }
    fn cos(self) -> Dd {
        self.sin_cos().1
    }
    fn tan(self) -> Dd {
        let (s, c) = self.sin_cos();
        s / c
    }
    fn asin(self) -> Dd {
        let c = ((Dd::ONE - self) * (Dd::ONE + self)).sqrt();
        self.atan2(c)
    }
    fn acos(self) -> Dd {
        let s = ((Dd::ONE - self) * (Dd::ONE + self)).sqrt();
        s.atan2(self)
    }
    fn atan(self) -> Dd {
        if self.is_nan() {
            return self;
        }
        if self.hi().abs() > 1e30 {
            let h = Dd::FRAC_PI_2();
            return if self.hi() > 0.0 { h - self.recip() } else { -h - self.recip() };
        }
        let mut y = Dd::c(self.hi().atan());
        for _ in 0..2 {
            let (s, c) = y.sin_cos();
            y = y - (s - self * c) * c;
        }
        y
    }
    fn atan2(self, other: Dd) -> Dd {
        let (y, x) = (self, other);
        if x.is_zero() {
            return if y.is_zero() {
                Dd::ZERO
            } else if y.hi() > 0.0 {
                Dd::FRAC_PI_2()
            } else {
                -Dd::FRAC_PI_2()
            };
        }
        let base = (y / x).atan();
        if x.hi() > 0.0 {
            base
        } else if y.is_sign_negative() {
            base - Dd::PI()
        } else {
            base + Dd::PI()
        }
    }
    fn sin_cos(self) -> (Dd, Dd) {
        if !self.is_finite() {
            return (Dd::nan(), Dd::nan());
        }
        let q = (self / Dd::FRAC_PI_2()).round();
        let r = self - q * Dd::FRAC_PI_2();
        let (s, c) = Dd::sin_cos_reduced(r);
        match (q.hi().rem_euclid(4.0)) as i64 {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
    fn exp_m1(self) -> Dd {
        if self.hi().abs() < 0.5 {
            self.exp_m1_series()
        } else {
            self.exp() - Dd::ONE
        }
    }
    fn ln_1p(self) -> Dd {
        if self.hi().abs() < 0.25 {
            self.ln_1p_series()
        } else {
            (Dd::ONE + self).ln()
        }
    }
    fn sinh(self) -> Dd {
        if self.hi().abs() < 0.5 {
            self.sinh_series()
        } else {
            let e = self.exp();
            (e - e.recip()) * Dd::c(0.5)
        }
    }
    fn cosh(self) -> Dd {
        let e = self.abs().exp();
        (e + e.recip()) * Dd::c(0.5)
    }
    fn tanh(self) -> Dd {
        let a = self.abs();
        let t = if a.hi() > 40.0 {
            Dd::ONE
        } else {
            let m = (a * Dd::c(2.0)).exp_m1();
            m / (m + Dd::c(2.0))
        };
        if self.is_sign_negative() {
            -t
        } else {
            t
        }
    }
    fn asinh(self) -> Dd {
        let a = self.abs();
        let r = if a.hi() > 1e150 {
            a.ln() + Dd::LN_2()
        } else {
            let a2 = a * a;
            (a + a2 / (Dd::ONE + (Dd::ONE + a2).sqrt())).ln_1p()
        };
        if self.is_sign_negative() {
            -r
        } else {
            r
        }
    }
    fn acosh(self) -> Dd {
        if self.hi() < 1.0 {
            return Dd::nan();
        }
        let t = self - Dd::ONE;
        (t + (t * (t + Dd::c(2.0))).sqrt()).ln_1p()
    }
    fn atanh(self) -> Dd {
        let two_x = self * Dd::c(2.0);
        (two_x / (Dd::ONE - self)).ln_1p() * Dd::c(0.5)
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        self.hi().integer_decode()
    }
}

impl Dd {
    /// Total order consistent with `PartialOrd` for non-NaN values.
    pub fn total_cmp(&self, other: &Dd) -> Ordering {
        self.hi().total_cmp(&other.hi()).then(self.lo().total_cmp(&other.lo()))
    }
}
