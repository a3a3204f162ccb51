//! Pointwise products of Zernike enclosures.
//!
//! The radial product `R^{m1}_{n1} R^{m2}_{n2}` (with `m1 >= m2 >= 0`) is
//! expanded twice: in the family of angular index `m1 + m2` and in the
//! family of angular index `m1 - m2`. A [`ProductPlan`] stores the
//! expansion coefficients as doubles for every pair of stored modes,
//! together with bounds on the part of each expansion beyond the stored
//! degree range.

use alloc::vec;
use alloc::vec::Vec;

use crate::ball::{add_up, mul_up, two_sum, up, Ball, Radius};
use crate::regge::{normal_form, CgTable, ReggeMatrix};

use super::{ErrSlot, Parity, Space, Zernike, ZernikeError};

const U: f64 = f64::EPSILON / 2.0;

/// Precomputed product coefficients for a fixed `(size, degree)`.
#[derive(Clone, Debug)]
pub struct ProductPlan {
    size: usize,
    degree: usize,
    offsets: Vec<usize>,
    mode_m: Vec<usize>,
    start: Vec<u32>,
    leftover: Vec<[f64; 2]>,
    terms: Vec<f64>,
    c_rel: f64,
}

/// Degree range `(lo, count)` of the stored part of a family.
#[inline]
fn family(degree: usize, m3: usize, n1: usize, n2: usize) -> (usize, usize) {
    let lo = n1.abs_diff(n2).max(m3);
    if m3 > degree {
        return (lo, 0);
    }
    let top = m3 + 2 * ((degree - m3) / 2);
    let hi = (n1 + n2).min(top);
    if hi < lo {
        (lo, 0)
    } else {
        (lo, (hi - lo) / 2 + 1)
    }
}

impl ProductPlan {
    /// Builds the plan for `Space`s of the given size and degree.
    pub fn build(table: &CgTable, size: usize, degree: usize) -> Result<ProductPlan, ZernikeError> {
        if (table.max_n() as usize) < degree {
            return Err(ZernikeError::PlanTooSmall { required: degree, available: table.max_n() as usize });
        }
        let mut offsets = Vec::with_capacity(size + 2);
        let mut mode_m = Vec::new();
        let mut acc = 0;
        for m in 0..=size {
            offsets.push(acc);
            if m <= degree {
                let c = (degree - m) / 2 + 1;
                acc += c;
                mode_m.extend(core::iter::repeat_n(m, c));
            }
        }
        offsets.push(acc);
        let nm = acc;

        let balls: Vec<Ball> = table
            .values()
            .iter()
            .map(|v| Ball::from_ratio(&v.num.clone().into(), &v.den))
            .collect();
        let indexer = table.indexer();
        let lookup = |n1: usize, m1: i64, n2: usize, m2: i64, n3: usize| -> Ball {
            let r = ReggeMatrix::from_cg(n1 as i64, m1, n2 as i64, m2, n3 as i64).expect("admissible query");
            let (c, _) = normal_form(&r).expect("valid symbol");
            let pos = indexer
                .index(&c)
                .ok()
                .and_then(|k| table.position(k))
                .expect("table covers every query up to its max_n");
            balls[pos] * Ball::from_i64(n3 as i64 + 1)
        };

        let mut start = vec![0u32; nm * nm];
        let mut leftover = vec![[0.0f64; 2]; nm * nm];
        let mut terms = Vec::new();
        let mut c_rel = 0.0f64;
        for i1 in 0..nm {
            let m1 = mode_m[i1];
            let n1 = m1 + 2 * (i1 - offsets[m1]);
            for i2 in 0..offsets[m1 + 1] {
                let m2 = mode_m[i2];
                let n2 = m2 + 2 * (i2 - offsets[m2]);
                let pid = i1 * nm + i2;
                start[pid] = u32::try_from(terms.len()).expect("plan exceeds 2^32 terms");
                let fams: &[(usize, i64, usize)] = if m2 == 0 {
                    &[(m1 + m2, m2 as i64, 0)]
                } else {
                    &[(m1 + m2, m2 as i64, 0), (m1 - m2, -(m2 as i64), 1)]
                };
                for &(m3, m2s, slot) in fams {
                    if m3 > size {
                        continue;
                    }
                    let (lo, cnt) = family(degree, m3, n1, n2);
                    let mut sum = Ball::ZERO;
                    for k in 0..cnt {
                        let c = lookup(n1, m1 as i64, n2, m2s, lo + 2 * k);
                        sum += c;
                        if c.center() != 0.0 {
                            c_rel = c_rel.max(c.radius() / c.center().abs());
                        }
                        terms.push(c.center());
                    }
                    let stored_hi = if cnt == 0 { 0 } else { lo + 2 * (cnt - 1) };
                    if cnt == 0 || stored_hi < n1 + n2 {
                        leftover[pid][slot] = (Ball::ONE - sum).hi().clamp(0.0, 1.0);
                    }
                }
            }
        }
        c_rel = up(c_rel);
        assert!(c_rel < 1e-10);
        Ok(ProductPlan { size, degree, offsets, mode_m, start, leftover, terms, c_rel })
    }

    /// Plan matching a space's shape.
    pub fn for_space(table: &CgTable, space: &Space) -> Result<ProductPlan, ZernikeError> {
        ProductPlan::build(table, space.size(), space.degree())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of stored expansion coefficients.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Bound on the relative error of the stored coefficients.
    pub fn coefficient_rel_error(&self) -> f64 {
        self.c_rel
    }

    fn check(&self, sp: &Space) -> Result<(), ZernikeError> {
        if sp.size() != self.size || sp.degree() != self.degree {
            return Err(ZernikeError::PlanTooSmall { required: sp.degree().max(sp.size()), available: self.degree });
        }
        Ok(())
    }

    fn n_modes(&self) -> usize {
        self.mode_m.len()
    }

    #[inline]
    fn mode(&self, i: usize) -> (usize, usize) {
        let m = self.mode_m[i];
        (m, m + 2 * (i - self.offsets[m]))
    }

    /// Visits the stored expansion of `V_u * V_v` for two coefficient
    /// modes: calls `f(weight * C, out_index)` for every stored term and
    /// `g(weight_abs * leftover, m3, overflow_degree)` for unstored parts.
    #[inline]
    fn visit_pair(
        &self,
        pu: Parity,
        iu: usize,
        pv: Parity,
        iv: usize,
        mut f: impl FnMut(f64, usize),
        mut g: impl FnMut(f64, usize, usize),
    ) {
        let mu = self.mode_m[iu];
        let mv = self.mode_m[iv];
        let (ws, wd) = weights(pu, mu, pv, mv);
        let (i1, i2) = if mu >= mv { (iu, iv) } else { (iv, iu) };
        let (m1, n1) = self.mode(i1);
        let (m2, n2) = self.mode(i2);
        let pid = i1 * self.n_modes() + i2;
        let mut st = self.start[pid] as usize;
        let fams = [(m1 + m2, ws, 0usize), (m1 - m2, wd, 1usize)];
        let nf = if m2 == 0 { 1 } else { 2 };
        for &(m3, w, slot) in &fams[..nf] {
            if m3 > self.size {
                if w != 0.0 {
                    g(w.abs(), m3, m3.max(n1.abs_diff(n2)));
                }
                continue;
            }
            let (lo, cnt) = family(self.degree, m3, n1, n2);
            if w != 0.0 {
                let base = self.offsets[m3] + (lo - m3) / 2;
                for (k, &c) in self.terms[st..st + cnt].iter().enumerate() {
                    f(w * c, base + k);
                }
                let l = self.leftover[pid][slot];
                if l > 0.0 {
                    let first_unstored = if m3 <= self.degree { m3 + 2 * ((self.degree - m3) / 2 + 1) } else { m3 };
                    g(mul_up(w.abs(), l), m3, lo.max(first_unstored));
                }
            }
            st += cnt;
        }
    }
}

/// Angular weights `(sum, difference)` of the product of a mode of
/// angular index `mu` (parity `pu`) with one of index `mv` (parity `pv`).
#[inline]
fn weights(pu: Parity, mu: usize, pv: Parity, mv: usize) -> (f64, f64) {
    let sgn = |a: usize, b: usize| match a.cmp(&b) {
        core::cmp::Ordering::Greater => 0.5,
        core::cmp::Ordering::Less => -0.5,
        core::cmp::Ordering::Equal => 0.0,
    };
    match (pu, pv) {
        (Parity::Even, Parity::Even) => {
            if mu == 0 || mv == 0 {
                (1.0, 0.0)
            } else {
                (0.5, 0.5)
            }
        }
        (Parity::Odd, Parity::Odd) => (-0.5, 0.5),
        (Parity::Even, Parity::Odd) => {
            if mu == 0 {
                (1.0, 0.0)
            } else {
                (0.5, sgn(mv, mu))
            }
        }
        (Parity::Odd, Parity::Even) => {
            if mv == 0 {
                (1.0, 0.0)
            } else {
                (0.5, sgn(mu, mv))
            }
        }
    }
}

/// One slot of an operand, seen as a set of functions.
#[derive(Clone, Copy)]
struct Item {
    m: usize,
    exact: bool,
    deg_lo: usize,
    deg_hi: usize,
    mag: f64,
    coef: bool,
}

fn items(u: &Zernike) -> Vec<Item> {
    let sp = u.space();
    let mut out = Vec::new();
    for r in u.radials() {
        for (j, c) in r.coeffs.iter().enumerate() {
            if *c != Ball::ZERO {
                let n = r.m + 2 * j;
                let mag = mul_up(c.upper_abs().value(), sp.pow_up(n));
                out.push(Item { m: r.m, exact: true, deg_lo: n, deg_hi: n, mag, coef: true });
            }
        }
        for (j, t) in r.tails.iter().enumerate() {
            if t.value() != 0.0 {
                let n = r.m + 2 * j;
                out.push(Item { m: r.m, exact: true, deg_lo: n, deg_hi: usize::MAX, mag: t.value(), coef: false });
            }
        }
    }
    for (b, e) in u.band_errors().iter().enumerate() {
        if e.value() != 0.0 {
            out.push(Item { m: b, exact: false, deg_lo: b, deg_hi: usize::MAX, mag: e.value(), coef: false });
        }
    }
    out
}

/// Accumulates error radii before they are written into an enclosure.
struct ErrAcc {
    tails: Vec<f64>,
    bands: Vec<f64>,
    width: usize,
}

impl ErrAcc {
    fn new(sp: &Space) -> ErrAcc {
        ErrAcc { tails: vec![0.0; (sp.size() + 1) * sp.n_tails()], bands: vec![0.0; sp.n_bands()], width: sp.n_tails() }
    }

    #[inline]
    fn add(&mut self, slot: ErrSlot, v: f64) {
        match slot {
            ErrSlot::Tail(m, j) => {
                let t = &mut self.tails[m * self.width + j];
                *t = add_up(*t, v);
            }
            ErrSlot::Band(b) => self.bands[b] = add_up(self.bands[b], v),
        }
    }

    fn flush(self, z: &mut Zernike) {
        for (k, &v) in self.tails.iter().enumerate() {
            if v != 0.0 {
                z.add_tail(k / self.width, k % self.width, Radius::new(v));
            }
        }
        for (b, &v) in self.bands.iter().enumerate() {
            if v != 0.0 {
                z.add_band(b, Radius::new(v));
            }
        }
    }
}

/// Places the product of two slots when at least one is an error slot.
fn place_error(sp: &Space, acc: &mut ErrAcc, x: &Item, px: Parity, y: &Item, py: Parity, out: Parity) {
    let mag = mul_up(x.mag, y.mag);
    if mag == 0.0 {
        return;
    }
    let tri = x.deg_lo.saturating_sub(y.deg_hi).max(y.deg_lo.saturating_sub(x.deg_hi));
    let trivial_x = px == Parity::Even && x.exact && x.m == 0;
    let trivial_y = py == Parity::Even && y.exact && y.m == 0;
    if trivial_x || trivial_y {
        let (ang, exact) = if trivial_x { (y.m, y.exact) } else { (x.m, x.exact) };
        acc.add(sp.place(ang, ang.max(tri), exact), mag);
        return;
    }
    let half = mul_up(mag, 0.5);
    let s_ang = x.m + y.m;
    acc.add(sp.place(s_ang, s_ang.max(tri), x.exact && y.exact), half);
    let (d_ang, d_exact) = match (x.exact, y.exact) {
        (true, true) => (x.m.abs_diff(y.m), true),
        (true, false) => (y.m.saturating_sub(x.m), false),
        (false, true) => (x.m.saturating_sub(y.m), false),
        (false, false) => (0, false),
    };
    if d_exact && d_ang == 0 && out == Parity::Odd {
        return;
    }
    acc.add(sp.place(d_ang, d_ang.max(tri), d_exact), half);
}

pub(super) fn multiply(u: &Zernike, v: &Zernike, plan: &ProductPlan) -> Result<Zernike, ZernikeError> {
    if **u.space() != **v.space() {
        return Err(ZernikeError::SpaceMismatch);
    }
    let sp = u.space().clone();
    plan.check(&sp)?;
    let (pu, pv) = (u.parity(), v.parity());
    let pout = pu.times(pv);
    let nm = plan.n_modes();
    let mut s = vec![0.0f64; nm];
    let mut comp = vec![0.0f64; nm];
    let mut abs = vec![0.0f64; nm];
    let mut rad = vec![0.0f64; nm];
    let mut errs = ErrAcc::new(&sp);

    let coefs = |z: &Zernike| -> Vec<(usize, Ball, f64)> {
        z.nonzero_coeffs()
            .map(|(m, j, c)| (sp.mode_index(m, j), c, c.upper_abs().value()))
            .collect()
    };
    let cu = coefs(u);
    let cv = coefs(v);
    for &(iu, a, aa) in &cu {
        let (ca, ra) = (a.center(), a.radius());
        let nu = plan.mode(iu).1;
        for &(iv, b, bb) in &cv {
            let (cb, rb) = (b.center(), b.radius());
            let t = ca * cb;
            let rp = if ra == 0.0 && rb == 0.0 { 0.0 } else { ca.abs() * rb + ra * cb.abs() + ra * rb };
            let nv = plan.mode(iv).1;
            let scale = mul_up(mul_up(aa, bb), sp.pow_up(nu + nv));
            plan.visit_pair(
                pu,
                iu,
                pv,
                iv,
                |hc, k| {
                    let p = hc * t;
                    let (ns, e) = two_sum(s[k], p);
                    s[k] = ns;
                    comp[k] += e;
                    abs[k] += p.abs();
                    if rp != 0.0 {
                        rad[k] += hc.abs() * rp;
                    }
                },
                |wl, m3, deg| {
                    errs.add(sp.place(m3, deg, true), mul_up(wl, scale));
                },
            );
        }
    }

    let iu: Vec<Item> = items(u);
    let iv: Vec<Item> = items(v);
    for x in &iu {
        for y in &iv {
            if x.coef && y.coef {
                continue;
            }
            place_error(&sp, &mut errs, x, pu, y, pv, pout);
        }
    }

    let mut out = Zernike::zero(&sp, pout);
    let slack = 1.0 + 1.0 / (1u64 << 20) as f64;
    let rel = (4.0 * U + plan.c_rel) * slack;
    for k in 0..nm {
        if abs[k] == 0.0 && rad[k] == 0.0 {
            continue;
        }
        let (m, j) = sp.mode_of(k);
        if pout == Parity::Odd && m == 0 {
            continue;
        }
        let (c, e) = two_sum(s[k], comp[k]);
        let r = add_up(
            add_up(add_up(e.abs(), up(comp[k].abs() * U)), mul_up(abs[k], rel)),
            add_up(mul_up(rad[k], slack), 1e-300),
        );
        out.radials_mut()[m].coeffs[j] = Ball::new(c, r).unwrap_or(Ball::WHOLE);
    }
    errs.flush(&mut out);
    Ok(out)
}

impl ProductPlan {
    /// Non-rigorous product of two dense coefficient vectors indexed by
    /// [`Space::mode_index`]; unstored parts of the expansion are dropped.
    pub fn multiply_f64(&self, pu: Parity, u: &[f64], pv: Parity, v: &[f64]) -> Vec<f64> {
        let nm = self.n_modes();
        let mut out = vec![0.0; nm];
        let nzu: Vec<(usize, f64)> = u.iter().copied().enumerate().filter(|x| x.1 != 0.0).collect();
        let nzv: Vec<(usize, f64)> = v.iter().copied().enumerate().filter(|x| x.1 != 0.0).collect();
        for &(iu, a) in &nzu {
            for &(iv, b) in &nzv {
                let t = a * b;
                self.visit_pair(pu, iu, pv, iv, |hc, k| out[k] += hc * t, |_, _, _| {});
            }
        }
        if pu.times(pv) == Parity::Odd {
            for o in out.iter_mut().take(self.offsets[1]) {
                *o = 0.0;
            }
        }
        out
    }
}
