//! Zernike radial polynomials `R^m_{m+2j}(r) = r^m P_j^{(0,m)}(2r² - 1)`
//! through the Jacobi three-term recurrence, over any scalar type with
//! exact small-integer arithmetic.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ball::Ball;

/// Scalars the recurrence can run on.
pub trait RadialScalar: Clone {
    fn from_int(v: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Division by a nonzero integer.
    fn div_int(&self, d: i64) -> Self;
    /// Hook to intersect with `[-1, 1]`, where every radial value lies.
    fn clamp_unit(self) -> Self {
        self
    }
}

impl RadialScalar for f64 {
    fn from_int(v: i64) -> f64 {
        v as f64
    }
    fn add(&self, o: &f64) -> f64 {
        self + o
    }
    fn sub(&self, o: &f64) -> f64 {
        self - o
    }
    fn mul(&self, o: &f64) -> f64 {
        self * o
    }
    fn div_int(&self, d: i64) -> f64 {
        self / d as f64
    }
}

impl RadialScalar for Ball {
    fn from_int(v: i64) -> Ball {
        Ball::from_i64(v)
    }
    fn add(&self, o: &Ball) -> Ball {
        *self + *o
    }
    fn sub(&self, o: &Ball) -> Ball {
        *self - *o
    }
    fn mul(&self, o: &Ball) -> Ball {
        *self * *o
    }
    fn div_int(&self, d: i64) -> Ball {
        self.div(Ball::from_i64(d)).expect("nonzero integer divisor")
    }
    fn clamp_unit(self) -> Ball {
        self.intersect(Ball::from_endpoints(-1.0, 1.0))
    }
}

impl RadialScalar for BigRational {
    fn from_int(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, o: &BigRational) -> BigRational {
        self + o
    }
    fn sub(&self, o: &BigRational) -> BigRational {
        self - o
    }
    fn mul(&self, o: &BigRational) -> BigRational {
        self * o
    }
    fn div_int(&self, d: i64) -> BigRational {
        self / BigRational::from_integer(BigInt::from(d))
    }
}

/// Values `R^m_{m+2j}(r)` for `j = 0..=jmax`.
///
/// Only valid for `0 <= r <= 1` when used with [`Ball`], since the result is
/// intersected with `[-1, 1]`.
pub fn radial_values<T: RadialScalar>(m: usize, jmax: usize, r: &T) -> Vec<T> {
    let r2 = r.mul(r);
    let x = r2.add(&r2).sub(&T::from_int(1));
    let mut rm = T::from_int(1);
    for _ in 0..m {
        rm = rm.mul(r);
    }
    let p = jacobi_0m(m as i64, jmax, &x);
    p.into_iter().map(|v| rm.mul(&v).clamp_unit()).collect()
}

/// `P_j^{(0,m)}(x)` for `j = 0..=jmax`.
fn jacobi_0m<T: RadialScalar>(m: i64, jmax: usize, x: &T) -> Vec<T> {
    let one = T::from_int(1);
    let mut out = vec![one.clone()];
    if jmax == 0 {
        return out;
    }
    // P_1 = 1 + (m+2)(x-1)/2
    let p1 = one.add(&x.sub(&one).mul(&T::from_int(m + 2)).div_int(2));
    out.push(p1);
    for n in 2..=jmax as i64 {
        let s = 2 * n + m;
        let a = T::from_int(s - 1);
        let lin = x.mul(&T::from_int(s * (s - 2))).sub(&T::from_int(m * m));
        let t1 = a.mul(&lin).mul(&out[(n - 1) as usize]);
        let t2 = out[(n - 2) as usize].mul(&T::from_int(2 * (n - 1) * (n + m - 1) * s));
        let pn = t1.sub(&t2).div_int(2 * n * (n + m) * (s - 2));
        out.push(pn);
    }
    out
}

/// Coefficients `a_l` with `r^{2k} = Σ_{l=0}^{k} a_l R^0_{2l}(r)`.
pub fn even_power_expansion(k: usize) -> Vec<BigRational> {
    let fact = |n: usize| -> BigUint { (1..=n as u64).fold(BigUint::one(), |a, b| a * b) };
    let kf = fact(k);
    (0..=k)
        .map(|l| {
            let num = BigUint::from(2 * l as u64 + 1) * &kf * &kf;
            let den = fact(k + l + 1) * fact(k - l);
            BigRational::new(BigInt::from(num), BigInt::from(den))
        })
        .collect()
}

/// Exact value `R^m_{m+2j}(r)` at rational `r`, by the explicit finite sum.
pub fn radial_exact(m: usize, j: usize, r: &BigRational) -> BigRational {
    let n = m + 2 * j;
    let fact = |n: usize| -> BigInt { (1..=n as u64).fold(BigInt::one(), |a, b| a * b) };
    let mut acc = BigRational::zero();
    for k in 0..=j {
        let c = fact(n - k) / (fact(k) * fact(m + j - k) * fact(j - k));
        let mut p = BigRational::one();
        for _ in 0..(n - 2 * k) {
            p *= r;
        }
        let term = BigRational::from_integer(c) * p;
        if k % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}
