//! The fixed-point map `G(u) = (-Δ)^{-1}(w u³)` and its derivative
//! `DG(u)h = (-Δ)^{-1}(3 w u² h)`, for radial polynomial weights `w`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::ball::Ball;
use crate::zernike::radial::{even_power_expansion, radial_values};
use crate::zernike::{Parity, ProductPlan, Space, Zernike, ZernikeError};

#[derive(Clone, Debug, PartialEq)]
pub enum GmapError {
    OddExponent(usize),
    ExponentTooLarge { alpha: usize, max: usize },
    NotRadial,
    OddInput,
    Zernike(ZernikeError),
}

impl From<ZernikeError> for GmapError {
    fn from(e: ZernikeError) -> Self {
        GmapError::Zernike(e)
    }
}

impl fmt::Display for GmapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GmapError::OddExponent(a) => write!(f, "weight exponent {a} is odd"),
            GmapError::ExponentTooLarge { alpha, max } => {
                write!(f, "weight exponent {alpha} exceeds the stored degree {max}")
            }
            GmapError::NotRadial => f.write_str("weight has slots outside angular index 0"),
            GmapError::OddInput => f.write_str("G acts on even enclosures only"),
            GmapError::Zernike(e) => write!(f, "{e}"),
        }
    }
}

/// A radial weight: an even enclosure with nonzero slots only at `m = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    w: Zernike,
}

impl Weight {
    pub fn new(w: Zernike) -> Result<Weight, GmapError> {
        if w.parity() != Parity::Even {
            return Err(GmapError::NotRadial);
        }
        let off_axis = w.radials()[1..]
            .iter()
            .any(|r| r.coeffs.iter().any(|c| *c != Ball::ZERO) || r.tails.iter().any(|t| t.value() != 0.0));
        if off_axis || w.band_errors().iter().any(|b| b.value() != 0.0) {
            return Err(GmapError::NotRadial);
        }
        Ok(Weight { w })
    }

    /// `w = r^α` for even `α` not above the stored degree.
    pub fn radial_power(alpha: usize, space: &Arc<Space>) -> Result<Weight, GmapError> {
        if alpha % 2 == 1 {
            return Err(GmapError::OddExponent(alpha));
        }
        if alpha > space.degree() {
            return Err(GmapError::ExponentTooLarge { alpha, max: space.degree() });
        }
        let mut w = Zernike::zero(space, Parity::Even);
        for (l, a) in even_power_expansion(alpha / 2).iter().enumerate() {
            w.set_coeff(0, l, Ball::from_ratio(a.numer(), a.denom().magnitude()));
        }
        Ok(Weight { w })
    }

    /// The constant weight `1`.
    pub fn one(space: &Arc<Space>) -> Weight {
        Weight { w: Zernike::mode(space, Parity::Even, 0, 0, Ball::ONE) }
    }

    pub fn zernike(&self) -> &Zernike {
        &self.w
    }

    pub fn space(&self) -> &Arc<Space> {
        self.w.space()
    }

    /// Numerical check of `w >= 0` at `n + 1` equispaced radii (not a proof).
    pub fn looks_nonnegative(&self, n: usize) -> bool {
        let r0 = &self.w.radials()[0];
        (0..=n).all(|k| {
            let r = k as f64 / n.max(1) as f64;
            let vals = radial_values(0, r0.coeffs.len().saturating_sub(1), &r);
            let s: f64 = r0.coeffs.iter().zip(vals.iter()).map(|(c, v)| c.center() * v).sum();
            s >= -1e-12
        })
    }
}

fn check_even(u: &Zernike) -> Result<(), GmapError> {
    if u.parity() != Parity::Even {
        return Err(GmapError::OddInput);
    }
    Ok(())
}

/// Enclosure of `(-Δ)^{-1}(w x³)` for all members `x` of `u`.
pub fn g_apply(w: &Weight, u: &Zernike, plan: &ProductPlan) -> Result<Zernike, GmapError> {
    check_even(u)?;
    let u2 = u.multiply(u, plan)?;
    let u3 = u2.multiply(u, plan)?;
    Ok(w.w.multiply(&u3, plan)?.inv_neg_lap())
}

/// Enclosure of `(-Δ)^{-1}(3 w x² y)` for all `x` in `u`, `y` in `h`.
pub fn dg_apply(w: &Weight, u: &Zernike, h: &Zernike, plan: &ProductPlan) -> Result<Zernike, GmapError> {
    check_even(u)?;
    let u2 = u.multiply(u, plan)?;
    dg_apply_squared(w, &u2, h, plan)
}

/// [`dg_apply`] with `u²` supplied by the caller.
pub fn dg_apply_squared(w: &Weight, u2: &Zernike, h: &Zernike, plan: &ProductPlan) -> Result<Zernike, GmapError> {
    let q = potential(w, u2, plan)?;
    Ok(q.multiply(h, plan)?.inv_neg_lap())
}

/// Enclosure of the multiplier `3 w x²`, given `u2` enclosing `x²`.
pub fn potential(w: &Weight, u2: &Zernike, plan: &ProductPlan) -> Result<Zernike, GmapError> {
    Ok(w.w.multiply(u2, plan)?.scale(Ball::exact(3.0)))
}

/// Non-rigorous `G` on dense even coefficient vectors.
pub fn g_f64(plan: &ProductPlan, sp: &Space, w: &[f64], u: &[f64]) -> Vec<f64> {
    let e = Parity::Even;
    let u2 = plan.multiply_f64(e, u, e, u);
    let u3 = plan.multiply_f64(e, &u2, e, u);
    sp.inv_neg_lap_f64(&plan.multiply_f64(e, w, e, &u3))
}

/// Non-rigorous multiplier `3 w u²`.
pub fn potential_f64(plan: &ProductPlan, w: &[f64], u: &[f64]) -> Vec<f64> {
    let e = Parity::Even;
    let u2 = plan.multiply_f64(e, u, e, u);
    let mut q = plan.multiply_f64(e, w, e, &u2);
    q.iter_mut().for_each(|x| *x *= 3.0);
    q
}

/// Non-rigorous `DG(u)h = (-Δ)^{-1}(q h)` for a precomputed multiplier `q`.
pub fn dg_f64(plan: &ProductPlan, sp: &Space, q: &[f64], ph: Parity, h: &[f64]) -> Vec<f64> {
    sp.inv_neg_lap_f64(&plan.multiply_f64(Parity::Even, q, ph, h))
}
