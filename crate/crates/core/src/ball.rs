//! Center/radius interval arithmetic on `f64` with outward rounding.
//!
//! Every operation computes its center in round-to-nearest and then adds a
//! bound on the rounding error to the radius, rounded upward with
//! `next_up`. No rounding-mode register is touched, so balls are plain
//! values that can be shared freely between threads.
//!
//! Overflow never truncates: any operation whose bound does not fit in a
//! finite `f64` returns [`Ball::WHOLE`], the declared whole-line value
//! (center 0, radius +inf). Arithmetic on `WHOLE` stays `WHOLE`, and every
//! comparison a proof relies on fails against it.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};

/// Relative size of one unit in the last place for normal doubles.
const EPS: f64 = f64::EPSILON; // 2^-52
/// Smallest positive subnormal.
const ETA: f64 = f64::from_bits(1); // 2^-1074

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BallError {
    NonFinite,
    NegativeRadius,
    DivisionByZero,
    NegativeSqrt,
    OutOfDomain,
}

impl fmt::Display for BallError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BallError::NonFinite => "non-finite ball component",
            BallError::NegativeRadius => "negative radius",
            BallError::DivisionByZero => "divisor ball contains zero",
            BallError::NegativeSqrt => "square root of a ball with negative points",
            BallError::OutOfDomain => "argument outside the admissible domain",
        };
        f.write_str(s)
    }
}

#[inline]
pub(crate) fn up(x: f64) -> f64 {
    x.next_up()
}

#[inline]
fn down(x: f64) -> f64 {
    x.next_down()
}

/// Upper bound on the round-to-nearest error committed when producing `c`.
#[inline]
fn rnd_err(c: f64) -> f64 {
    up(c.abs() * EPS) + ETA
}

/// Knuth's two-sum: `a + b = s + e` exactly when `s` is finite.
#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = 134217729.0 * a; // 2^27 + 1
    let hi = t - (t - a);
    (hi, a - hi)
}

/// Bound on `|a*b - c|` where `c = fl(a*b)`; zero when the product is exact.
#[inline]
fn prod_err(a: f64, b: f64, c: f64) -> f64 {
    let ac = c.abs();
    if c == 0.0 {
        return if a == 0.0 || b == 0.0 { 0.0 } else { ETA };
    }
    let (aa, ba) = (a.abs(), b.abs());
    if !(ac < 1e290 && ac > 1e-260 && aa < 1e150 && ba < 1e150 && aa > 1e-150 && ba > 1e-150) {
        return rnd_err(c);
    }
    // Dekker's product, exact in this exponent range.
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - c) + ah * bl + al * bh) + al * bl;
    e.abs()
}

/// `a + b` rounded upward (both assumed `>= 0`).
#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if e == 0.0 && s.is_finite() {
        s
    } else {
        up(s)
    }
}

/// `a * b` rounded upward (both assumed `>= 0`).
#[inline]
pub fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else if a == 1.0 {
        b
    } else if b == 1.0 {
        a
    } else {
        up(a * b)
    }
}

/// `a / b` rounded upward (`a >= 0`, `b > 0`).
#[inline]
pub fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        up(a / b)
    }
}

/// `a / b` rounded downward (`a >= 0`, `b > 0`).
#[inline]
pub fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        down(a / b).max(0.0)
    }
}

/// A nonnegative upper bound. `+inf` is allowed and means "no bound".
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Radius(f64);

impl Radius {
    pub const ZERO: Radius = Radius(0.0);
    pub const ONE: Radius = Radius(1.0);
    pub const INFINITY: Radius = Radius(f64::INFINITY);

    /// Panics on negative or NaN input; those are programming errors.
    pub fn new(v: f64) -> Radius {
        assert!(v >= 0.0, "radius must be nonnegative, got {v}");
        Radius(v)
    }

    pub fn try_new(v: f64) -> Result<Radius, BallError> {
        if v.is_nan() {
            Err(BallError::NonFinite)
        } else if v < 0.0 {
            Err(BallError::NegativeRadius)
        } else {
            Ok(Radius(v))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn max(self, o: Radius) -> Radius {
        Radius(self.0.max(o.0))
    }

    /// Upper bound on `self / o`.
    pub fn div_up(self, o: Radius) -> Radius {
        if o.0 == 0.0 {
            if self.0 == 0.0 {
                Radius::ZERO
            } else {
                Radius::INFINITY
            }
        } else {
            Radius(div_up(self.0, o.0))
        }
    }

    /// Upper bound on `self^k`.
    pub fn powi_up(self, k: u32) -> Radius {
        let mut acc = Radius::ONE;
        let mut base = self;
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Upper bound on `self^(1/2^k)`, for the spectral radius estimate.
    pub fn root_pow2_up(self, k: u32) -> Radius {
        let mut x = self.0;
        for _ in 0..k {
            x = up(libm::sqrt(x));
        }
        Radius(x)
    }

    pub fn as_ball(self) -> Ball {
        if self.0.is_finite() {
            Ball { c: self.0, r: 0.0 }
        } else {
            Ball::WHOLE
        }
    }
}

impl Add for Radius {
    type Output = Radius;
    #[inline]
    fn add(self, o: Radius) -> Radius {
        Radius(add_up(self.0, o.0))
    }
}

impl AddAssign for Radius {
    #[inline]
    fn add_assign(&mut self, o: Radius) {
        *self = *self + o;
    }
}

impl Mul for Radius {
    type Output = Radius;
    #[inline]
    fn mul(self, o: Radius) -> Radius {
        Radius(mul_up(self.0, o.0))
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.0)
    }
}

/// The set `{x : |x - c| <= r}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    c: f64,
    r: f64,
}

impl Default for Ball {
    fn default() -> Self {
        Ball::ZERO
    }
}

impl Ball {
    pub const ZERO: Ball = Ball { c: 0.0, r: 0.0 };
    pub const ONE: Ball = Ball { c: 1.0, r: 0.0 };
    /// Declared failure value for overflow: the whole real line.
    pub const WHOLE: Ball = Ball { c: 0.0, r: f64::INFINITY };

    pub fn new(c: f64, r: f64) -> Result<Ball, BallError> {
        if !c.is_finite() || !r.is_finite() {
            return Err(BallError::NonFinite);
        }
        if r < 0.0 {
            return Err(BallError::NegativeRadius);
        }
        Ok(Ball { c, r })
    }

    /// Exact point ball. Non-finite input yields [`Ball::WHOLE`].
    pub fn exact(c: f64) -> Ball {
        if c.is_finite() {
            Ball { c, r: 0.0 }
        } else {
            Ball::WHOLE
        }
    }

    pub fn from_i64(v: i64) -> Ball {
        let c = v as f64;
        if c as i128 == v as i128 {
            Ball { c, r: 0.0 }
        } else {
            Ball { c, r: rnd_err(c) }
        }
    }

    /// Smallest ball containing `[lo, hi]`; `lo <= hi` required.
    pub fn from_endpoints(lo: f64, hi: f64) -> Ball {
        if !(lo.is_finite() && hi.is_finite()) {
            return Ball::WHOLE;
        }
        debug_assert!(lo <= hi);
        let c = 0.5 * lo + 0.5 * hi;
        let r = up((c - lo).max(hi - c)).max(0.0);
        // c - lo and hi - c are exact or rounded; next_up covers both.
        Ball::checked(c, if lo == hi { 0.0 } else { r })
    }

    #[inline]
    fn checked(c: f64, r: f64) -> Ball {
        if c.is_finite() && r.is_finite() {
            Ball { c, r }
        } else {
            Ball::WHOLE
        }
    }

    #[inline]
    pub fn center(self) -> f64 {
        self.c
    }

    #[inline]
    pub fn radius(self) -> f64 {
        self.r
    }

    pub fn is_whole(self) -> bool {
        !self.r.is_finite()
    }

    pub fn is_exact(self) -> bool {
        self.r == 0.0
    }

    /// Lower endpoint, rounded down.
    pub fn lo(self) -> f64 {
        if self.r == 0.0 {
            self.c
        } else {
            down(self.c - self.r)
        }
    }

    /// Upper endpoint, rounded up.
    pub fn hi(self) -> f64 {
        if self.r == 0.0 {
            self.c
        } else {
            up(self.c + self.r)
        }
    }

    /// Bound on `max |x|` over the ball.
    pub fn upper_abs(self) -> Radius {
        Radius(add_up(self.c.abs(), self.r))
    }

    /// Bound on `min |x|` over the ball, zero if the ball straddles zero.
    pub fn lower_abs(self) -> f64 {
        if self.r == 0.0 {
            return self.c.abs();
        }
        let v = down(self.c.abs() - self.r);
        if v > 0.0 {
            v
        } else {
            0.0
        }
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo() <= x && x <= self.hi()
    }

    pub fn contains_zero(self) -> bool {
        self.c.abs() <= self.r
    }

    /// True if every point of `self` lies in `o`.
    pub fn subset_of(self, o: Ball) -> bool {
        o.lo() <= self.lo() && self.hi() <= o.hi()
    }

    /// Certified `self > x` for every point.
    pub fn gt(self, x: f64) -> bool {
        self.lo() > x
    }

    /// Certified `self < x` for every point.
    pub fn lt(self, x: f64) -> bool {
        self.hi() < x
    }

    /// Compares two balls when they are disjoint.
    pub fn certified_cmp(self, o: Ball) -> Option<Ordering> {
        if self.hi() < o.lo() {
            Some(Ordering::Less)
        } else if self.lo() > o.hi() {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// Ball enlarged by `e`.
    pub fn widen(self, e: Radius) -> Ball {
        Ball::checked(self.c, add_up(self.r, e.0))
    }

    /// Smallest ball containing both.
    pub fn hull(self, o: Ball) -> Ball {
        if self.is_whole() || o.is_whole() {
            return Ball::WHOLE;
        }
        Ball::from_endpoints(self.lo().min(o.lo()), self.hi().max(o.hi()))
    }

    /// Zero-centered ball `[-e, e]`.
    pub fn pm(e: Radius) -> Ball {
        Ball::checked(0.0, e.0)
    }

    /// `self * f` for an exact float factor.
    pub fn scale(self, f: f64) -> Ball {
        self * Ball::exact(f)
    }

    /// Exact halving (barring underflow, which the error term covers).
    pub fn half(self) -> Ball {
        let c = 0.5 * self.c;
        let exact = 2.0 * c == self.c;
        let r = if self.r == 0.0 { 0.0 } else { up(0.5 * self.r) };
        Ball::checked(c, if exact { r } else { add_up(r, ETA) })
    }

    pub fn sqr(self) -> Ball {
        let c = self.c * self.c;
        let ac = self.c.abs();
        let r = add_up(
            add_up(mul_up(2.0, mul_up(ac, self.r)), mul_up(self.r, self.r)),
            rnd_err(c),
        );
        Ball::checked(c, r)
    }

    /// Multiplicative inverse; fails if the ball contains zero.
    pub fn recip(self) -> Result<Ball, BallError> {
        Ball::ONE.div(self)
    }

    pub fn div(self, b: Ball) -> Result<Ball, BallError> {
        if self.is_whole() || b.is_whole() {
            return if b.is_whole() {
                Err(BallError::DivisionByZero)
            } else {
                Ok(Ball::WHOLE)
            };
        }
        let den = b.lower_abs();
        if den <= 0.0 {
            return Err(BallError::DivisionByZero);
        }
        let c = self.c / b.c;
        if !c.is_finite() {
            return Ok(Ball::WHOLE);
        }
        // x/y - c = (x - c*y)/y and x - c*y is bounded through the exact
        // remainder a.c - c*b.c (exact via fma for a correctly rounded quotient).
        let rem = libm::fma(-c, b.c, self.c).abs();
        let num = add_up(add_up(rem, self.r), mul_up(c.abs(), b.r));
        let mut r = div_up(num, den);
        if c != 0.0 && c.abs() < f64::MIN_POSITIVE {
            r = add_up(r, ETA);
        }
        Ok(Ball::checked(c, r))
    }

    pub fn sqrt(self) -> Result<Ball, BallError> {
        if self.is_whole() {
            return Ok(Ball::WHOLE);
        }
        let lo = self.lo();
        let hi = self.hi();
        if hi < 0.0 {
            return Err(BallError::NegativeSqrt);
        }
        if lo < 0.0 {
            return Err(BallError::NegativeSqrt);
        }
        if hi == 0.0 {
            return Ok(Ball::ZERO);
        }
        let slo = if lo == 0.0 { 0.0 } else { down(libm::sqrt(lo)).max(0.0) };
        let shi = up(libm::sqrt(hi));
        if self.r == 0.0 {
            let s = libm::sqrt(self.c);
            if libm::fma(s, s, -self.c) == 0.0 {
                return Ok(Ball::exact(s));
            }
        }
        Ok(Ball::from_endpoints(slo, shi))
    }

    /// Enclosure of `sqrt(p/q)` with radius at most one ulp of the center.
    pub fn sqrt_of_rational(p: &BigUint, q: &BigUint) -> Ball {
        assert!(!q.is_zero(), "sqrt_of_rational: zero denominator");
        if p.is_zero() {
            return Ball::ZERO;
        }
        // s = isqrt(floor(p 4^k / q)) has ~64 significant bits, and
        // sqrt(p/q) lies in [s, s+1] * 2^-k.
        let pb = p.bits() as i64;
        let qb = q.bits() as i64;
        let mut k = (130 - (pb - qb)) / 2;
        if k < 0 {
            k = 0;
        }
        let t = (p << (2 * k) as usize) / q;
        let s = t.sqrt();
        let lo = biguint_scaled_down(&s, -k);
        let hi = biguint_scaled_up(&(s + 1u32), -k);
        Ball::from_endpoints(lo, hi)
    }

    /// Enclosure of `sqrt(p/q)` for machine integers.
    pub fn sqrt_of_rational_u64(p: u64, q: u64) -> Ball {
        Ball::sqrt_of_rational(&BigUint::from(p), &BigUint::from(q))
    }

    /// Tight enclosure of the rational `n/d`.
    pub fn from_ratio(n: &BigInt, d: &BigUint) -> Ball {
        assert!(!d.is_zero(), "from_ratio: zero denominator");
        if n.is_zero() {
            return Ball::ZERO;
        }
        let mag = n.magnitude();
        let k = 70 - (mag.bits() as i64 - d.bits() as i64);
        let (scaled, rem_nonzero) = if k >= 0 {
            let num = mag << k as usize;
            let q = &num / d;
            let nz = &q * d != num;
            (q, nz)
        } else {
            let den = d << (-k) as usize;
            let q = mag / &den;
            let nz = &q * &den != *mag;
            (q, nz)
        };
        let lo = biguint_scaled_down(&scaled, -k);
        let hi = if rem_nonzero {
            biguint_scaled_up(&(scaled + 1u32), -k)
        } else {
            biguint_scaled_up(&scaled, -k)
        };
        let b = Ball::from_endpoints(lo, hi);
        if n.sign() == Sign::Minus {
            -b
        } else {
            b
        }
    }

    pub fn from_ratio_i64(n: i64, d: u64) -> Ball {
        Ball::from_ratio(&BigInt::from(n), &BigUint::from(d))
    }

    /// Enclosure of pi.
    pub fn pi() -> Ball {
        // f64 pi is within 1.23e-16 of pi.
        Ball { c: core::f64::consts::PI, r: 1.3e-16 }
    }

    /// `cos` and `sin` of every point in the ball.
    pub fn cos_sin(self) -> (Ball, Ball) {
        if self.is_whole() || self.r >= 4.0 {
            let u = Ball { c: 0.0, r: 1.0 };
            return (u, u);
        }
        // Reduce by an integer multiple of 2 pi, then sum Taylor series
        // with the Lagrange remainder.
        let two_pi = Ball::pi() * Ball::exact(2.0);
        let k = libm::round(self.c / (2.0 * core::f64::consts::PI));
        let y = self - Ball::exact(k) * two_pi;
        let ya = y.upper_abs().value();
        let y2 = y.sqr();
        let mut cos = Ball::ZERO;
        let mut sin = Ball::ZERO;
        let mut term_c = Ball::ONE; // y^{2i}/(2i)!
        let mut term_s = y; // y^{2i+1}/(2i+1)!
        let n_terms = 24u32;
        for i in 0..n_terms {
            if i % 2 == 0 {
                cos += term_c;
                sin += term_s;
            } else {
                cos -= term_c;
                sin -= term_s;
            }
            let a = (2 * i + 1) as f64;
            let b = (2 * i + 2) as f64;
            let c3 = (2 * i + 3) as f64;
            term_c = (term_c * y2).div(Ball::exact(a * b)).unwrap_or(Ball::WHOLE);
            term_s = (term_s * y2).div(Ball::exact(b * c3)).unwrap_or(Ball::WHOLE);
        }
        // Remainders are bounded by |y|^{2n}/(2n)! and |y|^{2n+1}/(2n+1)!.
        let mut rc = 1.0f64;
        for j in 1..=(2 * n_terms) {
            rc = div_up(mul_up(rc, ya), j as f64);
        }
        let rs = div_up(mul_up(rc, ya), (2 * n_terms + 1) as f64);
        let unit = Ball { c: 0.0, r: 1.0 };
        (
            cos.widen(Radius(rc)).intersect(unit),
            sin.widen(Radius(rs)).intersect(unit),
        )
    }

    /// Intersection of two overlapping balls (the first if disjoint).
    pub fn intersect(self, o: Ball) -> Ball {
        if self.is_whole() {
            return o;
        }
        if o.is_whole() {
            return self;
        }
        let lo = self.lo().max(o.lo());
        let hi = self.hi().min(o.hi());
        if lo > hi || (lo == self.lo() && hi == self.hi()) {
            self
        } else {
            Ball::from_endpoints(lo, hi)
        }
    }

    /// Writes bit-exact `center radius` as hex floats.
    pub fn to_text(self) -> alloc::string::String {
        alloc::format!("{} {}", hexf(self.c), hexf(self.r))
    }

    /// Parses `center radius`; each field is a hex float or a decimal.
    pub fn parse_text(s: &str) -> Result<Ball, BallError> {
        let mut it = s.split_whitespace();
        let c = it.next().and_then(parse_f64).ok_or(BallError::NonFinite)?;
        let r = it.next().and_then(parse_f64).ok_or(BallError::NonFinite)?;
        if it.next().is_some() {
            return Err(BallError::NonFinite);
        }
        Ball::new(c, r)
    }
}

/// Hex-float rendering that round-trips every finite double.
pub fn hexf(x: f64) -> alloc::string::String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0x0p+0".into() } else { "0x0p+0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        alloc::format!("{sign}0x0.{frac:013x}p-1022")
    } else {
        alloc::format!("{sign}0x1.{frac:013x}p{:+}", exp - 1023)
    }
}

/// Parses a hex float written by [`hexf`] or a decimal literal.
pub fn parse_f64(s: &str) -> Option<f64> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let v = if let Some(h) = body.strip_prefix("0x") {
        let (mant, exp) = h.split_once('p')?;
        let exp: i32 = exp.parse().ok()?;
        let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
        if fp.len() > 13 || ip.len() != 1 {
            return None;
        }
        let ipv = u64::from_str_radix(ip, 16).ok()?;
        let mut fpv = if fp.is_empty() { 0 } else { u64::from_str_radix(fp, 16).ok()? };
        fpv <<= 4 * (13 - fp.len());
        match (ipv, exp) {
            (0, _) if fpv == 0 => 0.0,
            (0, -1022) => f64::from_bits(fpv),
            (1, e) if (-1022..=1023).contains(&e) => {
                f64::from_bits((((e + 1023) as u64) << 52) | fpv)
            }
            _ => return None,
        }
    } else {
        body.parse::<f64>().ok()?
    };
    if !v.is_finite() {
        return None;
    }
    Some(if neg { -v } else { v })
}

/// Largest double `<= x * 2^e`.
fn biguint_scaled_down(x: &BigUint, e: i64) -> f64 {
    scaled_bound(x, e, false)
}

/// Smallest double `>= x * 2^e`.
fn biguint_scaled_up(x: &BigUint, e: i64) -> f64 {
    scaled_bound(x, e, true)
}

fn scaled_bound(x: &BigUint, e: i64, round_up: bool) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits() as i64;
    let (mant, shift, inexact) = if bits > 53 {
        let sh = (bits - 53) as usize;
        let m = x >> sh;
        let inexact = (&m << sh) != *x;
        (m.to_u64().unwrap_or(0), sh as i64, inexact)
    } else {
        (x.to_u64().unwrap_or(0), 0, false)
    };
    let mut m = mant;
    if inexact && round_up {
        m += 1;
    }
    let total = e + shift;
    let v = libm::scalbn(m as f64, total.clamp(-2000, 2000) as i32);
    // scalbn is exact unless the result leaves the normal range.
    let exact_range = v.is_finite() && (v == 0.0 || v.abs() >= f64::MIN_POSITIVE);
    if exact_range && v != 0.0 {
        v
    } else if round_up {
        if v.is_finite() {
            up(v)
        } else {
            f64::INFINITY
        }
    } else if v.is_finite() {
        down(v).max(0.0)
    } else {
        f64::MAX
    }
}

impl Neg for Ball {
    type Output = Ball;
    #[inline]
    fn neg(self) -> Ball {
        Ball { c: -self.c, r: self.r }
    }
}

impl Add for Ball {
    type Output = Ball;
    #[inline]
    fn add(self, o: Ball) -> Ball {
        let (c, e) = two_sum(self.c, o.c);
        let r = add_up(add_up(self.r, o.r), e.abs());
        Ball::checked(c, r)
    }
}

impl Sub for Ball {
    type Output = Ball;
    #[inline]
    fn sub(self, o: Ball) -> Ball {
        self + (-o)
    }
}

impl Mul for Ball {
    type Output = Ball;
    #[inline]
    fn mul(self, o: Ball) -> Ball {
        let c = self.c * o.c;
        let mut r = prod_err(self.c, o.c, c);
        if self.r != 0.0 || o.r != 0.0 {
            r = add_up(
                r,
                add_up(
                    add_up(mul_up(self.c.abs(), o.r), mul_up(o.c.abs(), self.r)),
                    mul_up(self.r, o.r),
                ),
            );
        }
        Ball::checked(c, r)
    }
}

impl AddAssign for Ball {
    #[inline]
    fn add_assign(&mut self, o: Ball) {
        *self = *self + o;
    }
}

impl SubAssign for Ball {
    #[inline]
    fn sub_assign(&mut self, o: Ball) {
        *self = *self - o;
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} ± {:e}", self.c, self.r)
    }
}

/// The binary operations covered by [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn arith(op: Op, a: Ball, b: Ball) -> Result<Ball, BallError> {
    match op {
        Op::Add => Ok(a + b),
        Op::Sub => Ok(a - b),
        Op::Mul => Ok(a * b),
        Op::Div => a.div(b),
    }
}
