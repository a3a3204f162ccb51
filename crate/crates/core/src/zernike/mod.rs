//! Enclosures of functions on the unit disk as Zernike series.
//!
//! A function of even parity is written as
//! `u = Σ_m Σ_j C_{m,j} R^m_{m+2j}(r) cos(mθ) + errors`, odd parity uses
//! `sin(mθ)`. The norm is `‖u‖_ρ = Σ |C_{m,j}| ρ^{m+2j}`. Besides the
//! coefficient balls an enclosure carries two kinds of error bounds:
//!
//! * radial tails `(m, j)`: functions of angular index exactly `m` whose
//!   series only uses degrees `n >= m + 2j`;
//! * band errors `b`: functions whose series only uses angular indices
//!   `m' >= b`.
//!
//! Coefficients are stored for `m <= size` and degree `m + 2j <= degree`.

mod laplace;
mod product;
pub mod radial;

pub use product::ProductPlan;

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::ball::{add_up, div_up, mul_up, Ball, BallError, Radius};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Parity of a pointwise product.
    pub fn times(self, o: Parity) -> Parity {
        if self == o {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }

    /// Smallest angular index carrying modes of this parity.
    pub fn min_m(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZernikeError {
    ParityMismatch,
    SpaceMismatch,
    /// The product plan does not cover the requested degree.
    PlanTooSmall { required: usize, available: usize },
    Ball(BallError),
    BadIndex,
    Format(alloc::string::String),
}

impl From<BallError> for ZernikeError {
    fn from(e: BallError) -> Self {
        ZernikeError::Ball(e)
    }
}

impl fmt::Display for ZernikeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZernikeError::ParityMismatch => f.write_str("operands have different parity"),
            ZernikeError::SpaceMismatch => f.write_str("operands differ in rho, size or degree"),
            ZernikeError::PlanTooSmall { required, available } => write!(
                f,
                "product plan serves degree {available}, operation needs max_n >= {required}"
            ),
            ZernikeError::Ball(e) => write!(f, "{e}"),
            ZernikeError::BadIndex => f.write_str("mode index out of range"),
            ZernikeError::Format(s) => write!(f, "{s}"),
        }
    }
}

/// The weight `ρ = p/q >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rho {
    pub p: u64,
    pub q: u64,
}

impl Rho {
    pub fn new(p: u64, q: u64) -> Option<Rho> {
        if q == 0 || p < q {
            None
        } else {
            Some(Rho { p, q })
        }
    }

    pub fn ball(self) -> Ball {
        Ball::from_ratio_i64(self.p as i64, self.q)
    }
}

impl fmt::Display for Rho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Shape shared by all enclosures taking part in one computation.
#[derive(Debug)]
pub struct Space {
    size: usize,
    degree: usize,
    rho: Rho,
    offsets: Vec<usize>,
    pw: Vec<Ball>,
    pw_up: Vec<f64>,
    pw_lo: Vec<f64>,
    lap: Vec<(Ball, Ball, Ball)>,
}

impl PartialEq for Space {
    fn eq(&self, o: &Space) -> bool {
        self.size == o.size && self.degree == o.degree && self.rho == o.rho
    }
}

impl Space {
    /// Coefficients up to degree `size` for angular indices `0..=size`.
    pub fn new(size: usize, rho: Rho) -> Arc<Space> {
        Space::with_degree(size, size, rho)
    }

    pub fn with_degree(size: usize, degree: usize, rho: Rho) -> Arc<Space> {
        let mut offsets = Vec::with_capacity(size + 2);
        let mut acc = 0;
        for m in 0..=size {
            offsets.push(acc);
            if m <= degree {
                acc += (degree - m) / 2 + 1;
            }
        }
        offsets.push(acc);
        let top = 4 * size.max(degree) + 8;
        let r = rho.ball();
        let mut pw = Vec::with_capacity(top + 1);
        let mut cur = Ball::ONE;
        for _ in 0..=top {
            pw.push(cur);
            cur = cur * r;
        }
        let pw_up = pw.iter().map(|b| b.hi()).collect();
        let pw_lo = pw.iter().map(|b| b.lo()).collect();
        let mut lap = Vec::with_capacity(acc);
        for m in 0..=size {
            for j in 0..offsets[m + 1] - offsets[m] {
                lap.push(laplace::coefficients(m, m + 2 * j));
            }
        }
        Arc::new(Space { size, degree, rho, offsets, pw, pw_up, pw_lo, lap })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rho(&self) -> Rho {
        self.rho
    }

    /// Number of stored coefficients at angular index `m`.
    pub fn n_coeffs(&self, m: usize) -> usize {
        self.offsets[m + 1] - self.offsets[m]
    }

    /// Number of tail slots per radial: positions `0..=D+1`.
    pub fn n_tails(&self) -> usize {
        self.degree + 2
    }

    pub fn n_bands(&self) -> usize {
        2 * self.size + 1
    }

    /// Total number of coefficient modes over all angular indices.
    pub fn n_modes(&self) -> usize {
        self.offsets[self.size + 1]
    }

    #[inline]
    pub fn mode_index(&self, m: usize, j: usize) -> usize {
        debug_assert!(j < self.n_coeffs(m));
        self.offsets[m] + j
    }

    /// Coefficients of `(-Δ)^{-1}` on the mode with index `idx`.
    pub(crate) fn lap_coefficients(&self, idx: usize) -> (Ball, Ball, Ball) {
        self.lap[idx]
    }

    /// Index of the first mode of angular index `m`.
    #[inline]
    pub fn mode_index_base(&self, m: usize) -> usize {
        self.offsets[m]
    }

    /// Non-rigorous `(-Δ)^{-1}` on dense coefficients (see [`Space::mode_index`]).
    pub fn inv_neg_lap_f64(&self, v: &[f64]) -> Vec<f64> {
        laplace::inv_neg_lap_f64(self, v)
    }

    /// Non-rigorous inverse of [`Space::inv_neg_lap_f64`] on its range.
    pub fn neg_lap_f64(&self, v: &[f64]) -> Vec<f64> {
        laplace::neg_lap_f64(self, v)
    }

    /// Inverse of [`Space::mode_index`].
    pub fn mode_of(&self, idx: usize) -> (usize, usize) {
        let m = match self.offsets.binary_search(&idx) {
            Ok(mut k) => {
                while self.offsets[k + 1] == idx {
                    k += 1;
                }
                k
            }
            Err(k) => k - 1,
        };
        (m, idx - self.offsets[m])
    }

    /// All coefficient modes `(m, j)` of a parity with degree below `n_max`.
    pub fn modes_below(&self, parity: Parity, n_max: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for m in parity.min_m()..=self.size {
            for j in 0..self.n_coeffs(m) {
                if m + 2 * j < n_max {
                    out.push((m, j));
                }
            }
        }
        out
    }

    /// Enclosure of `ρ^n`.
    pub fn pow(&self, n: usize) -> Ball {
        self.pw[n]
    }

    /// Upper bound on `ρ^n`.
    #[inline]
    pub fn pow_up(&self, n: usize) -> f64 {
        self.pw_up[n]
    }

    /// Lower bound on `ρ^n`.
    #[inline]
    pub fn pow_lo(&self, n: usize) -> f64 {
        self.pw_lo[n]
    }

    /// Slot for an error of exact angular index `m` and degrees `>= deg`,
    /// or for angular indices `>= m` if `exact` is false.
    pub(crate) fn place(&self, m: usize, deg: usize, exact: bool) -> ErrSlot {
        if exact && m <= self.size {
            let j = if deg > m { (deg - m).div_ceil(2) } else { 0 };
            ErrSlot::Tail(m, j.min(self.degree + 1))
        } else {
            ErrSlot::Band(m.min(2 * self.size))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ErrSlot {
    Tail(usize, usize),
    Band(usize),
}

/// Label of a single slot of an enclosure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeRef {
    Coefficient { m: usize, j: usize },
    RadialTail { m: usize, j: usize },
    BandError { m: usize },
}

/// Enclosure of a function of one angular index: coefficients and tails.
#[derive(Clone, Debug, PartialEq)]
pub struct Radial {
    pub m: usize,
    pub coeffs: Vec<Ball>,
    pub tails: Vec<Radius>,
}

/// Enclosure of a set of functions of fixed parity on the disk.
#[derive(Clone, Debug)]
pub struct Zernike {
    space: Arc<Space>,
    parity: Parity,
    radials: Vec<Radial>,
    band_errors: Vec<Radius>,
}

impl PartialEq for Zernike {
    fn eq(&self, o: &Zernike) -> bool {
        *self.space == *o.space
            && self.parity == o.parity
            && self.radials == o.radials
            && self.band_errors == o.band_errors
    }
}

impl Zernike {
    pub fn zero(space: &Arc<Space>, parity: Parity) -> Zernike {
        let radials = (0..=space.size)
            .map(|m| Radial {
                m,
                coeffs: vec![Ball::ZERO; space.n_coeffs(m)],
                tails: vec![Radius::ZERO; space.n_tails()],
            })
            .collect();
        Zernike {
            space: space.clone(),
            parity,
            radials,
            band_errors: vec![Radius::ZERO; space.n_bands()],
        }
    }

    /// Exact single mode `c · R^m_{m+2j} cos(mθ)` (or `sin`).
    pub fn mode(space: &Arc<Space>, parity: Parity, m: usize, j: usize, c: Ball) -> Zernike {
        let mut z = Zernike::zero(space, parity);
        z.set_coeff(m, j, c);
        z
    }

    /// Exact polynomial from centers indexed by [`Space::mode_index`].
    pub fn from_centers(space: &Arc<Space>, parity: Parity, centers: &[f64]) -> Zernike {
        let mut z = Zernike::zero(space, parity);
        for (idx, &c) in centers.iter().enumerate() {
            if c != 0.0 {
                let (m, j) = space.mode_of(idx);
                if m >= parity.min_m() {
                    z.radials[m].coeffs[j] = Ball::exact(c);
                }
            }
        }
        z
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn rho(&self) -> Rho {
        self.space.rho
    }

    pub fn radials(&self) -> &[Radial] {
        &self.radials
    }

    pub fn band_errors(&self) -> &[Radius] {
        &self.band_errors
    }

    pub fn coeff(&self, m: usize, j: usize) -> Ball {
        self.radials
            .get(m)
            .and_then(|r| r.coeffs.get(j))
            .copied()
            .unwrap_or(Ball::ZERO)
    }

    /// Panics if `(m, j)` is not a stored mode or carries no modes of the parity.
    pub fn set_coeff(&mut self, m: usize, j: usize, c: Ball) {
        assert!(m >= self.parity.min_m(), "odd parity has no m = 0 modes");
        self.radials[m].coeffs[j] = c;
    }

    pub fn tail(&self, m: usize, j: usize) -> Radius {
        self.radials[m].tails[j]
    }

    pub fn band(&self, m: usize) -> Radius {
        self.band_errors[m]
    }

    pub fn add_tail(&mut self, m: usize, j: usize, r: Radius) {
        let t = &mut self.radials[m].tails[j];
        *t = *t + r;
    }

    pub fn add_band(&mut self, m: usize, r: Radius) {
        let b = &mut self.band_errors[m];
        *b = *b + r;
    }

    /// Adds an error slot by label; coefficient labels widen the ball.
    pub fn add_error(&mut self, at: ModeRef, r: Radius) {
        match at {
            ModeRef::Coefficient { m, j } => {
                let c = self.radials[m].coeffs[j];
                self.radials[m].coeffs[j] = c.widen(r);
            }
            ModeRef::RadialTail { m, j } => self.add_tail(m, j, r),
            ModeRef::BandError { m } => self.add_band(m, r),
        }
    }

    /// Centers of all coefficient slots in [`Space::mode_index`] order.
    pub fn centers(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.space.n_modes());
        for r in &self.radials {
            out.extend(r.coeffs.iter().map(|b| b.center()));
        }
        out
    }

    /// Iterates over nonzero coefficient slots as `(m, j, ball)`.
    pub fn nonzero_coeffs(&self) -> impl Iterator<Item = (usize, usize, Ball)> + '_ {
        self.radials.iter().flat_map(|r| {
            r.coeffs
                .iter()
                .enumerate()
                .filter(|(_, b)| **b != Ball::ZERO)
                .map(move |(j, b)| (r.m, j, *b))
        })
    }

    /// Sum of all error radii.
    pub fn error_norm(&self) -> Radius {
        let mut acc = Radius::ZERO;
        for r in &self.radials {
            for &t in &r.tails {
                acc += t;
            }
        }
        for &b in &self.band_errors {
            acc += b;
        }
        acc
    }

    pub fn has_errors(&self) -> bool {
        self.error_norm().value() != 0.0
    }

    /// Upper bound on `‖x‖_ρ` over all members `x`.
    pub fn norm_upper(&self) -> Radius {
        let mut acc = 0.0f64;
        for r in &self.radials {
            for (j, c) in r.coeffs.iter().enumerate() {
                if *c != Ball::ZERO {
                    acc = add_up(acc, mul_up(c.upper_abs().value(), self.space.pow_up(r.m + 2 * j)));
                }
            }
        }
        Radius::new(acc) + self.error_norm()
    }

    /// Same parity and space, or an error.
    pub fn compatible(&self, o: &Zernike) -> Result<(), ZernikeError> {
        if *self.space != *o.space {
            return Err(ZernikeError::SpaceMismatch);
        }
        if self.parity != o.parity {
            return Err(ZernikeError::ParityMismatch);
        }
        Ok(())
    }

    /// Enclosure of `α x + β y` for members `x`, `y` and scalars in the balls.
    pub fn linear_combine(alpha: Ball, u: &Zernike, beta: Ball, v: &Zernike) -> Result<Zernike, ZernikeError> {
        u.compatible(v)?;
        let mut out = Zernike::zero(&u.space, u.parity);
        let (ea, eb) = (alpha.upper_abs(), beta.upper_abs());
        for m in 0..=u.space.size {
            let (ru, rv, ro) = (&u.radials[m], &v.radials[m], &mut out.radials[m]);
            for j in 0..ro.coeffs.len() {
                ro.coeffs[j] = match (ru.coeffs[j] == Ball::ZERO, rv.coeffs[j] == Ball::ZERO) {
                    (true, true) => Ball::ZERO,
                    (false, true) => alpha * ru.coeffs[j],
                    (true, false) => beta * rv.coeffs[j],
                    (false, false) => alpha * ru.coeffs[j] + beta * rv.coeffs[j],
                };
            }
            for j in 0..ro.tails.len() {
                ro.tails[j] = ea * ru.tails[j] + eb * rv.tails[j];
            }
        }
        for b in 0..out.band_errors.len() {
            out.band_errors[b] = ea * u.band_errors[b] + eb * v.band_errors[b];
        }
        Ok(out)
    }

    pub fn add(&self, o: &Zernike) -> Result<Zernike, ZernikeError> {
        Zernike::linear_combine(Ball::ONE, self, Ball::ONE, o)
    }

    pub fn sub(&self, o: &Zernike) -> Result<Zernike, ZernikeError> {
        Zernike::linear_combine(Ball::ONE, self, -Ball::ONE, o)
    }

    pub fn scale(&self, a: Ball) -> Zernike {
        let zero = Zernike::zero(&self.space, self.parity);
        Zernike::linear_combine(a, self, Ball::ZERO, &zero).expect("same space")
    }

    /// Moves every coefficient of degree `>= n` into its radial tail.
    /// Every member of `self` remains a member of the result.
    pub fn truncate(&self, n: usize) -> Zernike {
        let mut out = self.clone();
        for m in 0..=self.space.size {
            for j in 0..out.radials[m].coeffs.len() {
                let deg = m + 2 * j;
                let c = out.radials[m].coeffs[j];
                if deg >= n && c != Ball::ZERO {
                    let w = Radius::new(mul_up(c.upper_abs().value(), self.space.pow_up(deg)));
                    out.radials[m].coeffs[j] = Ball::ZERO;
                    out.add_tail(m, j, w);
                }
            }
        }
        out
    }

    /// Widens the enclosure by a band-0 error, covering every function
    /// within `r` of a member.
    pub fn widen(&self, r: Radius) -> Zernike {
        let mut out = self.clone();
        out.add_band(0, r);
        out
    }

    /// Discards all error slots and coefficient radii (the midpoint polynomial).
    pub fn midpoint(&self) -> Zernike {
        let mut out = Zernike::zero(&self.space, self.parity);
        for (m, j, c) in self.nonzero_coeffs() {
            out.radials[m].coeffs[j] = Ball::exact(c.center());
        }
        out
    }

    /// True iff every nonzero slot sits at an angular index that is an odd
    /// multiple of `n` and no band error is present. Band errors cover
    /// all larger angular indices, so they can never be confined.
    pub fn sn_support_check(&self, n: usize) -> bool {
        assert!(n > 0);
        assert_eq!(self.parity, Parity::Even, "the S_n support test applies to even enclosures");
        let admissible = |m: usize| m % (2 * n) == n;
        for r in &self.radials {
            if admissible(r.m) {
                continue;
            }
            if r.coeffs.iter().any(|c| *c != Ball::ZERO) || r.tails.iter().any(|t| t.value() != 0.0) {
                return false;
            }
        }
        self.band_errors.iter().all(|b| b.value() == 0.0)
    }

    /// Ball containing `x(r, θ)` for every member and point in the balls.
    pub fn eval_point(&self, r: Ball, theta: Ball) -> Result<Ball, ZernikeError> {
        if r.lo() < 0.0 || r.hi() > 1.0 {
            return Err(ZernikeError::Ball(BallError::OutOfDomain));
        }
        let mut acc = Ball::ZERO;
        for rad in &self.radials {
            if rad.coeffs.iter().all(|c| *c == Ball::ZERO) {
                continue;
            }
            let m = rad.m;
            let vals = radial::radial_values(m, rad.coeffs.len().saturating_sub(1), &r);
            let mut s = Ball::ZERO;
            for (c, v) in rad.coeffs.iter().zip(vals.iter()) {
                if *c != Ball::ZERO {
                    s += *c * *v;
                }
            }
            let (cm, sm) = (theta * Ball::exact(m as f64)).cos_sin();
            let ang = match self.parity {
                Parity::Even => cm,
                Parity::Odd => sm,
            };
            acc += s * ang;
        }
        Ok(acc.widen(self.error_norm()))
    }

    /// Nonzero error slots as labels with radii.
    pub fn error_slots(&self) -> Vec<(ModeRef, Radius)> {
        let mut out = Vec::new();
        for r in &self.radials {
            for (j, &t) in r.tails.iter().enumerate() {
                if t.value() != 0.0 {
                    out.push((ModeRef::RadialTail { m: r.m, j }, t));
                }
            }
        }
        for (m, &b) in self.band_errors.iter().enumerate() {
            if b.value() != 0.0 {
                out.push((ModeRef::BandError { m }, b));
            }
        }
        out
    }

    /// Ball containing the `(m, j)` coefficient of every member, including
    /// the share any error slot may place there.
    pub fn coefficient_hull(&self, m: usize, j: usize) -> Ball {
        let mut e = Radius::ZERO;
        for &t in self.radials[m].tails.iter().take(j + 1) {
            e += t;
        }
        for &b in &self.band_errors[..=m.min(self.band_errors.len() - 1)] {
            e += b;
        }
        let n = m + 2 * j;
        self.coeff(m, j).widen(Radius::new(div_up(e.value(), self.space.pow_lo(n))))
    }

    /// Largest coefficient radius, for diagnostics.
    pub fn max_coeff_radius(&self) -> f64 {
        self.nonzero_coeffs().map(|(_, _, c)| c.radius()).fold(0.0, f64::max)
    }

    /// Applies `(-Δ)^{-1}` with zero boundary values.
    pub fn inv_neg_lap(&self) -> Zernike {
        laplace::inv_neg_lap(self)
    }

    /// Enclosure of the pointwise product.
    pub fn multiply(&self, v: &Zernike, plan: &ProductPlan) -> Result<Zernike, ZernikeError> {
        product::multiply(self, v, plan)
    }

    pub(crate) fn radials_mut(&mut self) -> &mut [Radial] {
        &mut self.radials
    }
}

impl fmt::Display for Zernike {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Zernike({} parity, size {}, degree {}, rho {}, norm <= {})",
            self.parity.name(),
            self.space.size,
            self.space.degree,
            self.space.rho,
            self.norm_upper()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp() -> Arc<Space> {
        Space::new(8, Rho::new(65, 64).unwrap())
    }

    #[test]
    fn norm_examples() {
        let s = Space::new(8, Rho::new(3, 2).unwrap());
        let u = Zernike::mode(&s, Parity::Even, 0, 1, Ball::ONE);
        assert!(u.norm_upper().value() >= 2.25 && u.norm_upper().value() < 2.25 + 1e-14);
        let s = sp();
        let v = Zernike::mode(&s, Parity::Even, 1, 0, Ball::exact(2.0));
        assert!(v.norm_upper().value() >= 2.0 * 65.0 / 64.0);
        let mut w = Zernike::zero(&s, Parity::Even);
        w.add_band(3, Radius::new(0.25));
        assert!(w.norm_upper().value() >= 0.25);
    }

    #[test]
    fn combine_identities() {
        let s = sp();
        let mut u = Zernike::mode(&s, Parity::Even, 2, 1, Ball::new(0.3, 1e-9).unwrap());
        u.add_tail(1, 3, Radius::new(1e-6));
        let z = Zernike::zero(&s, Parity::Even);
        assert_eq!(Zernike::linear_combine(Ball::ONE, &u, Ball::ZERO, &z).unwrap(), u);
        let d = u.sub(&u).unwrap();
        assert!(d.coeff(2, 1).contains_zero());
        let o = Zernike::zero(&s, Parity::Odd);
        assert_eq!(u.add(&o), Err(ZernikeError::ParityMismatch));
    }

    #[test]
    fn truncate_examples() {
        let s = sp();
        let u = Zernike::mode(&s, Parity::Even, 0, 1, Ball::ONE);
        assert_eq!(u.truncate(100), u);
        let t = u.truncate(2);
        assert_eq!(t.coeff(0, 1), Ball::ZERO);
        assert!(t.tail(0, 1).value() >= s.pow(2).center());
        assert!(u.truncate(0).norm_upper() >= u.norm_upper());
    }

    #[test]
    fn mode_index_round_trip() {
        let s = Space::with_degree(9, 6, Rho::new(1, 1).unwrap());
        for idx in 0..s.n_modes() {
            let (m, j) = s.mode_of(idx);
            assert_eq!(s.mode_index(m, j), idx);
        }
        assert_eq!(s.n_coeffs(7), 0);
    }

    #[test]
    fn support_check() {
        let s = sp();
        let mut u = Zernike::mode(&s, Parity::Even, 1, 0, Ball::ONE);
        u.set_coeff(3, 1, Ball::ONE);
        assert!(u.sn_support_check(1));
        u.set_coeff(2, 0, Ball::exact(0.1));
        assert!(!u.sn_support_check(1));
        assert!(Zernike::zero(&s, Parity::Even).sn_support_check(5));
    }

    #[test]
    fn eval_examples() {
        let s = sp();
        let u = Zernike::mode(&s, Parity::Even, 0, 1, Ball::ONE);
        assert!(u.eval_point(Ball::exact(0.5), Ball::ZERO).unwrap().contains(-0.5));
        for (m, j) in [(0, 0), (3, 2), (4, 1), (1, 3)] {
            let v = Zernike::mode(&s, Parity::Even, m, j, Ball::ONE);
            assert!(v.eval_point(Ball::ONE, Ball::ZERO).unwrap().contains(1.0));
        }
        let z = Zernike::mode(&s, Parity::Even, 1, 0, Ball::ONE);
        assert!(z.eval_point(Ball::exact(0.3), Ball::ZERO).unwrap().contains(0.3));
        assert!(z.eval_point(Ball::exact(1.5), Ball::ZERO).is_err());
    }
}
