//! Operator enclosures over mode partitions, spectral-radius bounds and
//! certified eigenvalue counts for `DG(u)` on a parity subspace.
//!
//! `DG(u)` is self-adjoint in the `H¹_0` inner product. An eigenvector
//! `v` is stored through its preimage `g = -Δv`, which turns every `H¹_0`
//! pairing into an `L²` pairing: `⟨h, v⟩_{H¹} = ⟨h, g⟩_{L²}`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;

use crate::ball::{add_up, div_up, mul_up, Ball, BallError, Radius};
use crate::gmap::{potential, GmapError, Weight};
use crate::linalg::mul_mr;
use crate::zernike::{ModeRef, Parity, ProductPlan, Space, Zernike, ZernikeError};

#[derive(Clone, Debug, PartialEq)]
pub enum SpectralError {
    Gmap(GmapError),
    Ball(BallError),
    /// `N_part` exceeds the stored degree plus one.
    PartitionTooLarge { n_part: usize, max: usize },
    /// Squaring overflowed the floating range.
    Overflow,
    ParityMismatch,
    /// An `H¹` self-pairing of an eigenvector could not be bounded away from 0.
    DegenerateVector(usize),
}

impl From<GmapError> for SpectralError {
    fn from(e: GmapError) -> Self {
        SpectralError::Gmap(e)
    }
}

impl From<ZernikeError> for SpectralError {
    fn from(e: ZernikeError) -> Self {
        SpectralError::Gmap(GmapError::Zernike(e))
    }
}

impl From<BallError> for SpectralError {
    fn from(e: BallError) -> Self {
        SpectralError::Ball(e)
    }
}

impl fmt::Display for SpectralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralError::Gmap(e) => write!(f, "{e}"),
            SpectralError::Ball(e) => write!(f, "{e}"),
            SpectralError::PartitionTooLarge { n_part, max } => {
                write!(f, "partition degree {n_part} exceeds {max}")
            }
            SpectralError::Overflow => f.write_str("matrix squaring overflowed"),
            SpectralError::ParityMismatch => f.write_str("eigen data and partition have different parity"),
            SpectralError::DegenerateVector(j) => write!(f, "eigenvector {j} has no certified positive H1 norm"),
        }
    }
}

/// Band errors meeting at most this many groups are charged to each of
/// them instead of the loose part.
const BAND_LOCAL_MAX: usize = 160;

/// One element of a [`ModePartition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    /// The single mode `R^m_{m+2j}`.
    Coefficient { m: usize, j: usize },
    /// Angular index `m`, degrees `>= m + 2j`.
    Tail { m: usize, j: usize },
    /// All angular indices `>= m`.
    Band { m: usize },
}

/// Decomposition of a parity subspace into single modes of degree below
/// `n_part` and residual groups covering everything else.
#[derive(Clone, Debug)]
pub struct ModePartition {
    space: Arc<Space>,
    parity: Parity,
    n_part: usize,
    groups: Vec<Group>,
    scale: Vec<f64>,
    coef_group: Vec<Option<usize>>,
    tail_group: Vec<Option<usize>>,
    band_group: usize,
    /// Number of groups meeting angular indices `>= b`, for `b <= size`.
    above: Vec<usize>,
}

/// Partition with one group per mode `(m, j)` of the parity with
/// `m + 2j < n_part`, one tail group per angular index `m <= size`, and
/// one band group for angular indices above `size`.
pub fn build_partition(space: &Arc<Space>, n_part: usize, parity: Parity) -> Result<ModePartition, SpectralError> {
    let max = space.degree() + 1;
    if n_part > max {
        return Err(SpectralError::PartitionTooLarge { n_part, max });
    }
    let s = space.size();
    let mut groups = Vec::new();
    let mut scale = Vec::new();
    let mut coef_group = vec![None; space.n_modes()];
    for (m, j) in space.modes_below(parity, n_part) {
        coef_group[space.mode_index(m, j)] = Some(groups.len());
        groups.push(Group::Coefficient { m, j });
        scale.push(div_up(1.0, space.pow_lo(m + 2 * j)));
    }
    let mut tail_group = vec![None; s + 1];
    for (m, slot) in tail_group.iter_mut().enumerate().skip(parity.min_m()) {
        let j0 = if n_part > m { (n_part - m).div_ceil(2) } else { 0 };
        *slot = Some(groups.len());
        groups.push(Group::Tail { m, j: j0.min(space.degree() + 1) });
        scale.push(1.0);
    }
    let band_group = groups.len();
    groups.push(Group::Band { m: (s + 1).min(2 * s) });
    scale.push(1.0);
    let above = (0..=s)
        .map(|b| {
            groups
                .iter()
                .filter(|g| match **g {
                    Group::Coefficient { m, .. } | Group::Tail { m, .. } | Group::Band { m } => m >= b,
                })
                .count()
                .max(1)
        })
        .collect();
    Ok(ModePartition { space: space.clone(), parity, n_part, groups, scale, coef_group, tail_group, band_group, above })
}

impl ModePartition {
    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn n_part(&self) -> usize {
        self.n_part
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    /// Enclosure whose members include the unit ball of group `g` up to
    /// the factor [`ModePartition::unit_scale`].
    pub fn unit(&self, g: usize) -> Zernike {
        let mut z = Zernike::zero(&self.space, self.parity);
        match self.groups[g] {
            Group::Coefficient { m, j } => z.set_coeff(m, j, Ball::ONE),
            Group::Tail { m, j } => z.add_tail(m, j, Radius::ONE),
            Group::Band { m } => z.add_band(m, Radius::ONE),
        }
        z
    }

    /// Upper bound on the norm of a unit vector of group `g` divided by
    /// the norm of [`ModePartition::unit`].
    pub fn unit_scale(&self, g: usize) -> f64 {
        self.scale[g]
    }

    /// Components of all members in the normalized basis. Returns the
    /// midpoints and radii per group (a signed ball for single modes, a
    /// centered norm bound for residual groups) and a loose norm bound for
    /// the error slots that straddle several groups.
    pub fn extract(&self, z: &Zernike) -> (Vec<f64>, Vec<f64>, f64) {
        let sp = &self.space;
        let s = sp.size();
        let n = self.groups.len();
        let mut mid = vec![0.0; n];
        let mut rad = vec![0.0; n];
        let mut loose = 0.0;
        for (m, j, c) in z.nonzero_coeffs() {
            let deg = m + 2 * j;
            match self.coef_group[sp.mode_index(m, j)] {
                Some(g) => {
                    let b = c * sp.pow(deg);
                    mid[g] = b.center();
                    rad[g] = add_up(rad[g], b.radius());
                }
                None => {
                    let g = self.tail_group[m].unwrap_or(self.band_group);
                    rad[g] = add_up(rad[g], mul_up(c.upper_abs().value(), sp.pow_up(deg)));
                }
            }
        }
        for (b, &r) in z.band_errors().iter().enumerate() {
            let r = r.value();
            if r == 0.0 {
                continue;
            }
            if b > s {
                rad[self.band_group] = add_up(rad[self.band_group], r);
            } else if self.above[b] <= BAND_LOCAL_MAX {
                for (g, grp) in self.groups.iter().enumerate() {
                    let (Group::Coefficient { m, .. } | Group::Tail { m, .. } | Group::Band { m }) = *grp;
                    if m >= b {
                        rad[g] = add_up(rad[g], r);
                    }
                }
            } else {
                loose = add_up(loose, r);
            }
        }
        for m in self.parity.min_m()..=s {
            let Some(g) = self.tail_group[m] else { continue };
            let Group::Tail { j: j0, .. } = self.groups[g] else { unreachable!() };
            for (j, t) in z.radials()[m].tails.iter().enumerate() {
                let t = t.value();
                if t == 0.0 {
                    continue;
                }
                rad[g] = add_up(rad[g], t);
                for jj in j..j0 {
                    if let Some(c) = self.coef_group[sp.mode_index(m, jj)] {
                        rad[c] = add_up(rad[c], t);
                    }
                }
            }
        }
        (mid, rad, loose)
    }

    /// True for groups spanning more than one mode.
    pub fn is_residual(&self, g: usize) -> bool {
        !matches!(self.groups[g], Group::Coefficient { .. })
    }
}

/// Enclosure `L_c + L_e` of a linear map in the normalized partition
/// basis. `L_c` is a ball matrix: entry `(i, j)` encloses the matrix
/// element for two single-mode groups, otherwise it has midpoint 0 and
/// its radius bounds the norm of the block `Z_j → Z_i`. `L_e` maps group
/// `j` into the whole space with norm at most `loose[j]`.
#[derive(Clone, Debug)]
pub struct OperatorEnclosure {
    pub partition: ModePartition,
    pub mid: DMatrix<f64>,
    pub rad: DMatrix<f64>,
    pub loose: Vec<f64>,
}

impl OperatorEnclosure {
    pub fn entry(&self, i: usize, j: usize) -> Ball {
        Ball::new(self.mid[(i, j)], self.rad[(i, j)]).unwrap_or(Ball::WHOLE)
    }
}

/// Encloses a linear map column by column: `apply` must return an
/// enclosure of the images of all members of its argument.
pub fn enclose_operator<E>(
    mut apply: impl FnMut(&Zernike) -> Result<Zernike, E>,
    partition: &ModePartition,
) -> Result<OperatorEnclosure, E> {
    let n = partition.len();
    let mut mid = DMatrix::zeros(n, n);
    let mut rad = DMatrix::zeros(n, n);
    let mut loose = vec![0.0; n];
    for g in 0..n {
        let img = apply(&partition.unit(g))?;
        let sc = partition.unit_scale(g);
        let (cm, cr, cl) = partition.extract(&img);
        loose[g] = mul_up(cl, sc);
        for i in 0..n {
            if partition.is_residual(g) {
                rad[(i, g)] = mul_up(add_up(cr[i], cm[i].abs()), sc);
            } else {
                // sc is an upper bound of 1/ρ^n; the lower one differs by ulps.
                let b = Ball::new(cm[i], cr[i]).unwrap_or(Ball::WHOLE) * Ball::from_endpoints(sc.next_down().next_down(), sc);
                mid[(i, g)] = b.center();
                rad[(i, g)] = b.radius();
            }
        }
    }
    Ok(OperatorEnclosure { partition: partition.clone(), mid, rad, loose })
}

fn col_sums(mid: &DMatrix<f64>, rad: &DMatrix<f64>) -> Vec<f64> {
    mid.column_iter()
        .zip(rad.column_iter())
        .map(|(cm, cr)| cm.iter().zip(cr.iter()).fold(0.0, |acc, (&m, &r)| add_up(acc, add_up(m.abs(), r))))
        .collect()
}

fn max_col_sum(mid: &DMatrix<f64>, rad: &DMatrix<f64>) -> f64 {
    col_sums(mid, rad).into_iter().fold(0.0, f64::max)
}

/// Bound on the operator norm of every member: the largest column sum
/// of entry magnitudes plus the loose part.
pub fn op_norm(l: &OperatorEnclosure) -> Radius {
    let cs = col_sums(&l.mid, &l.rad);
    Radius::new(cs.iter().zip(&l.loose).fold(0.0, |acc, (&c, &e)| acc.max(add_up(c, e))))
}

/// Norm bounds `N_b >= ‖A^{2^b}‖` for `b = 0..=k` and `ν >= N_k^{2^-k}`,
/// by repeated squaring with power-of-two rescaling.
fn squaring_chain(mid: &DMatrix<f64>, rad: &DMatrix<f64>, k: u32) -> Result<(Vec<f64>, f64), SpectralError> {
    let (mut a, mut r) = (mid.clone(), rad.clone());
    // A^{2^b} ∈ 2^{scale} (a ± r)
    let mut scale: i64 = 0;
    let mut norms = Vec::with_capacity(k as usize + 1);
    let to_bound = |s: f64, scale: i64| -> f64 {
        if scale < -1000 {
            f64::MIN_POSITIVE
        } else if scale > 1000 {
            f64::INFINITY
        } else {
            mul_up(s, libm::exp2(scale as f64)).max(f64::MIN_POSITIVE)
        }
    };
    for b in 0..=k {
        let s = max_col_sum(&a, &r);
        if !s.is_finite() {
            return Err(SpectralError::Overflow);
        }
        if s == 0.0 {
            norms.resize(k as usize + 1, 0.0);
            return Ok((norms, 0.0));
        }
        norms.push(to_bound(s, scale));
        if b == k {
            let root = Radius::new(s).root_pow2_up(k).value();
            let e = libm::exp2(scale as f64 / libm::exp2(k as f64));
            return Ok((norms, mul_up(mul_up(root, e), 1.0 + 4.0 * f64::EPSILON)));
        }
        let e = libm::floor(libm::log2(s)) as i32;
        let f = libm::exp2(-e as f64);
        a.iter_mut().zip(r.iter_mut()).for_each(|(x, y)| {
            let sx = *x * f;
            let sy = *y * f;
            // Scaling by a power of two is exact unless it lands below the
            // normal range.
            if sx.abs() < f64::MIN_POSITIVE && *x != 0.0 {
                *y = add_up(sy, f64::MIN_POSITIVE);
            } else {
                *y = if sy < f64::MIN_POSITIVE && *y != 0.0 { f64::MIN_POSITIVE } else { sy };
            }
            *x = sx;
        });
        scale = 2 * (scale + e as i64);
        let (na, nr) = mul_mr(&a, Some(&r), &a, Some(&r));
        a = na;
        r = nr;
    }
    unreachable!()
}

/// Upper bound `‖A^{2^k}‖^{2^{-k}}` on the spectral radius of every
/// member of the ball matrix `mid ± rad`.
pub fn spectral_radius_of(mid: &DMatrix<f64>, rad: &DMatrix<f64>, k: u32) -> Result<Radius, SpectralError> {
    Ok(Radius::new(squaring_chain(mid, rad, k)?.1))
}

/// Number of explicit terms of the loose-mass series.
const DIRECT_TERMS: usize = 24;

/// Upper bound on the spectral radius of every member of `l`.
///
/// With `a_t >= ‖L_c^t‖` and `g_i >= ‖L_e L_c^i‖`, the power series of
/// `(L_c + L_e)^p` is dominated by `A(z) / (1 - Σ g_i z^{i+1})`, so any
/// `t > ν` with `Σ g_i t^{-(i+1)} < 1` bounds the spectral radius. The
/// `g_i` come from explicit products for small `i` and from `a_i` after.
pub fn spectral_radius_bound(l: &OperatorEnclosure, k: u32) -> Result<Radius, SpectralError> {
    let (norms, nu) = squaring_chain(&l.mid, &l.rad, k)?;
    let r_max = l.loose.iter().fold(0.0, |a: f64, &b| a.max(b));
    if r_max == 0.0 {
        return Ok(Radius::new(nu));
    }
    let trivial = op_norm(l).value();
    let p = 1usize << k;
    // a_t from the binary digits of t.
    let a: Vec<f64> = (0..p)
        .map(|t| (0..=k as usize).filter(|b| t >> b & 1 == 1).fold(1.0, |acc, b| mul_up(acc, norms[b])))
        .collect();
    let n = l.partition.len();
    let rows: Vec<usize> = (0..n)
        .filter(|&i| l.loose[i] > 0.0 && (l.partition.is_residual(i) || l.loose[i] >= r_max * 1e-6))
        .collect();
    let rest = (0..n).filter(|i| !rows.contains(i)).fold(0.0, |acc: f64, i| acc.max(l.loose[i]));
    let direct = DIRECT_TERMS.min(p);
    let mut g = Vec::with_capacity(direct);
    let mut ym: DMatrix<f64> = DMatrix::from_fn(rows.len(), n, |r, c| if rows[r] == c { 1.0 } else { 0.0 });
    let mut yr = DMatrix::zeros(rows.len(), n);
    for i in 0..direct {
        let mut best = 0.0f64;
        for c in 0..n {
            let mut acc = 0.0;
            for (ri, &row) in rows.iter().enumerate() {
                acc = add_up(acc, mul_up(l.loose[row], add_up(ym[(ri, c)].abs(), yr[(ri, c)])));
            }
            best = best.max(acc);
        }
        g.push(add_up(best, mul_up(rest, a[i])));
        let (nm, nr) = mul_mr(&ym, Some(&yr), &l.mid, Some(&l.rad));
        ym = nm;
        yr = nr;
    }
    let nk = norms[k as usize];
    // Upper bound of Σ g_i t^{-(i+1)}, or None when a tail diverges.
    let series = |t: f64| -> Option<f64> {
        let z = div_up(1.0, t);
        let mut zp = z;
        let mut head = 0.0;
        let mut mid_part = 0.0;
        let mut full = 0.0;
        for i in 0..p {
            let term = mul_up(a[i], zp);
            full = add_up(full, term);
            if i < direct {
                head = add_up(head, mul_up(g[i], zp));
            } else {
                // ‖L_e L_c^i‖ <= g_s a_{i-s} for the last explicit s.
                let via = mul_up(mul_up(g[direct - 1], a[i + 1 - direct]), zp);
                mid_part = add_up(mid_part, via.min(mul_up(r_max, term)));
            }
            zp = mul_up(zp, z);
        }
        // zp = z^{p+1}
        let x = mul_up(nk, div_up(zp, z.next_down()));
        if !(x < 1.0) {
            return None;
        }
        let geo = div_up(x, (1.0 - x).next_down());
        Some(add_up(add_up(head, mid_part), mul_up(r_max, mul_up(full, geo))))
    };
    let ok = |t: f64| t > nu && series(t).is_some_and(|s| s < 1.0);
    let mut hi = trivial.max(nu);
    if !ok(hi) {
        return Ok(Radius::new(trivial));
    }
    let mut lo = nu;
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        if ok(m) {
            hi = m;
        } else {
            lo = m;
        }
    }
    Ok(Radius::new(hi.min(trivial)))
}

/// Enclosure of `⟨V^m_n, V^m_n⟩_{L²} = π/(n+1)`, halved for `m > 0`.
pub fn l2_mode_weight(m: usize, n: usize) -> Ball {
    let b = Ball::pi() * Ball::from_ratio_i64(1, n as u64 + 1);
    if m == 0 {
        b
    } else {
        b.half()
    }
}

fn l2_weight_up(m: usize, n: usize) -> f64 {
    l2_mode_weight(m, n).hi()
}

/// Largest `|c_k| w_k / ρ^{n_k}` over the modes of every error slot of `a`,
/// weighted by the slot radius: bounds the pairing of the slot with `b`.
fn slot_pairing_bound(a: &Zernike, b: &Zernike) -> f64 {
    let sp = a.space();
    let s = sp.size();
    let mut per_m_suffix: Vec<Vec<f64>> = Vec::with_capacity(s + 1);
    let mut per_m_max = vec![0.0f64; s + 1];
    for m in 0..=s {
        let nc = sp.n_coeffs(m);
        let mut v = vec![0.0f64; nc + 1];
        for j in (0..nc).rev() {
            let n = m + 2 * j;
            let c = b.coeff(m, j);
            let x = if c == Ball::ZERO {
                0.0
            } else {
                div_up(mul_up(c.upper_abs().value(), l2_weight_up(m, n)), sp.pow_lo(n))
            };
            v[j] = v[j + 1].max(x);
        }
        per_m_max[m] = v[0];
        per_m_suffix.push(v);
    }
    let mut band_suffix = vec![0.0f64; s + 2];
    for m in (0..=s).rev() {
        band_suffix[m] = band_suffix[m + 1].max(per_m_max[m]);
    }
    let mut acc = 0.0;
    for (slot, r) in a.error_slots() {
        let sup = match slot {
            ModeRef::RadialTail { m, j } => per_m_suffix[m][j.min(sp.n_coeffs(m))],
            ModeRef::BandError { m } => band_suffix[m.min(s + 1)],
            ModeRef::Coefficient { .. } => unreachable!(),
        };
        acc = add_up(acc, mul_up(r.value(), sup));
    }
    acc
}

/// Enclosure of `⟨x, y⟩_{L²}` for all members `x` of `a`, `y` of `b`.
pub fn l2_pairing(a: &Zernike, b: &Zernike) -> Ball {
    if a.parity() != b.parity() {
        return Ball::ZERO;
    }
    let mut acc = Ball::ZERO;
    for (m, j, c) in a.nonzero_coeffs() {
        let d = b.coeff(m, j);
        if d != Ball::ZERO {
            acc += c * d * l2_mode_weight(m, m + 2 * j);
        }
    }
    let ea = a.error_norm().value();
    let eb = b.error_norm().value();
    let mut err = add_up(slot_pairing_bound(a, b), slot_pairing_bound(b, a));
    if ea != 0.0 && eb != 0.0 {
        err = add_up(err, mul_up(mul_up(ea, eb), Ball::pi().hi()));
    }
    acc.widen(Radius::new(err))
}

/// Enclosure of the `H¹₀` Rayleigh quotient `⟨u, DG(u)u⟩ / ⟨u, u⟩` at a
/// fixed point `u = G(u)`, with both pairings taken against the preimage
/// `w u³` of `u`. The numerator multiplies `(3 w u²) u`, the denominator
/// `w (u² u)`; at a true fixed point the quotient is 3.
pub fn rayleigh_quotient(w: &Weight, u: &Zernike, plan: &ProductPlan) -> Result<Ball, SpectralError> {
    if u.parity() != Parity::Even {
        return Err(GmapError::OddInput.into());
    }
    let u2 = u.multiply(u, plan)?;
    let num = l2_pairing(&potential(w, &u2, plan)?.multiply(u, plan)?, u);
    let den = l2_pairing(&w.zernike().multiply(&u2.multiply(u, plan)?, plan)?, u);
    Ok(num.div(den)?)
}

/// Approximate eigenpairs of one parity, stored through their preimages.
#[derive(Clone, Debug)]
pub struct EigenData {
    pub parity: Parity,
    pub values: Vec<Ball>,
    pub preimages: Vec<Zernike>,
    pub vectors: Vec<Zernike>,
}

impl EigenData {
    /// Derives `v_j = (-Δ)^{-1} g_j` from the preimages.
    pub fn new(parity: Parity, values: Vec<Ball>, preimages: Vec<Zernike>) -> Result<EigenData, SpectralError> {
        if preimages.iter().any(|g| g.parity() != parity) || values.len() != preimages.len() {
            return Err(SpectralError::ParityMismatch);
        }
        let vectors = preimages.iter().map(|g| g.inv_neg_lap()).collect();
        Ok(EigenData { parity, values, preimages, vectors })
    }

    /// From floating values and dense preimage coefficients.
    pub fn from_f64(space: &Arc<Space>, parity: Parity, pairs: &[(f64, Vec<f64>)]) -> EigenData {
        let values = pairs.iter().map(|(l, _)| Ball::exact(*l)).collect();
        let pre = pairs.iter().map(|(_, g)| Zernike::from_centers(space, parity, g)).collect();
        EigenData::new(parity, values, pre).expect("consistent parity")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sub-collection of the given entries.
    pub fn select(&self, idx: &[usize]) -> EigenData {
        EigenData {
            parity: self.parity,
            values: idx.iter().map(|&i| self.values[i]).collect(),
            preimages: idx.iter().map(|&i| self.preimages[i].clone()).collect(),
            vectors: idx.iter().map(|&i| self.vectors[i].clone()).collect(),
        }
    }

    /// Entries whose value center exceeds `a`.
    pub fn above(&self, a: f64) -> EigenData {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| self.values[i].center() > a).collect();
        self.select(&idx)
    }
}

/// Outcome of [`at_most_n`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountCheck {
    pub holds: bool,
    pub n: usize,
    pub theta: f64,
    /// Bound on the spectral radius of `DG(u) - K`.
    pub bound: Radius,
}

/// Outcome of [`at_least_m`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerCheck {
    pub holds: bool,
    pub inconclusive: bool,
    pub m: usize,
    pub a: f64,
    /// Lower bound `min_j (A_jj - Σ_{i≠j} |A_ij|)` after orthonormalization.
    pub gershgorin: f64,
    /// Distance of the Gram matrix from the identity (row-sum norm).
    pub eta: f64,
}

fn multiplier(w: &Weight, u: &Zernike, plan: &ProductPlan) -> Result<Zernike, SpectralError> {
    let u2 = u.multiply(u, plan)?;
    Ok(potential(w, &u2, plan)?)
}

/// Certifies that `DG(u)` has at most `eig.len()` eigenvalues in
/// `[θ, ∞)` on the parity subspace of `eig`, for every `u` in `u_encl`.
pub fn at_most_n(
    w: &Weight,
    u_encl: &Zernike,
    eig: &EigenData,
    theta: f64,
    plan: &ProductPlan,
    partition: &ModePartition,
    k: u32,
) -> Result<CountCheck, SpectralError> {
    if eig.parity != partition.parity() {
        return Err(SpectralError::ParityMismatch);
    }
    let q = multiplier(w, u_encl, plan)?;
    // K h = Σ_j λ_j ⟨h, g_j⟩ / ⟨v_j, g_j⟩ v_j
    let mut factors = Vec::with_capacity(eig.len());
    for j in 0..eig.len() {
        let nrm = l2_pairing(&eig.vectors[j], &eig.preimages[j]);
        if !(nrm.lo() > 0.0) {
            return Err(SpectralError::DegenerateVector(j));
        }
        factors.push(eig.values[j].div(nrm)?);
    }
    let apply = |z: &Zernike| -> Result<Zernike, SpectralError> {
        let mut img = q.multiply(z, plan)?.inv_neg_lap();
        for j in 0..eig.len() {
            let c = factors[j] * l2_pairing(z, &eig.preimages[j]);
            if c != Ball::ZERO {
                img = Zernike::linear_combine(Ball::ONE, &img, -c, &eig.vectors[j])?;
            }
        }
        Ok(img)
    };
    let l = enclose_operator(apply, partition)?;
    let bound = spectral_radius_bound(&l, k)?;
    Ok(CountCheck { holds: bound.value() < theta, n: eig.len(), theta, bound })
}

/// Certifies at least `eig.len()` eigenvalues of `DG(u)` in `(a, ∞)` via
/// the Gershgorin condition on the `H¹`-orthonormalized vectors.
pub fn at_least_m(w: &Weight, u_encl: &Zernike, eig: &EigenData, a: f64, plan: &ProductPlan) -> Result<LowerCheck, SpectralError> {
    let m = eig.len();
    let mut out = LowerCheck { holds: false, inconclusive: false, m, a, gershgorin: f64::NAN, eta: f64::NAN };
    if m == 0 {
        out.holds = true;
        return Ok(out);
    }
    let q = multiplier(w, u_encl, plan)?;
    let qv: Vec<Zernike> = eig.vectors.iter().map(|v| q.multiply(v, plan)).collect::<Result<_, _>>()?;
    let mut gram = vec![vec![Ball::ZERO; m]; m];
    let mut amat = vec![vec![Ball::ZERO; m]; m];
    for i in 0..m {
        for j in 0..m {
            gram[i][j] = l2_pairing(&eig.vectors[i], &eig.preimages[j]);
            amat[i][j] = l2_pairing(&eig.vectors[i], &qv[j]);
        }
    }
    let gmid = DMatrix::from_fn(m, m, |i, j| 0.5 * (gram[i][j].center() + gram[j][i].center()));
    let Some(chol) = gmid.cholesky() else {
        out.inconclusive = true;
        return Ok(out);
    };
    let Some(linv) = chol.l().try_inverse() else {
        out.inconclusive = true;
        return Ok(out);
    };
    // T = L^{-T}; new vectors are Σ_i T_ij v_i.
    let t = linv.transpose();
    let congruence = |x: &Vec<Vec<Ball>>| -> Vec<Vec<Ball>> {
        let mut r = vec![vec![Ball::ZERO; m]; m];
        for p in 0..m {
            for s in 0..m {
                let mut acc = Ball::ZERO;
                for i in 0..m {
                    for j in 0..m {
                        acc += Ball::exact(t[(i, p)]) * x[i][j] * Ball::exact(t[(j, s)]);
                    }
                }
                r[p][s] = acc;
            }
        }
        r
    };
    let g2 = congruence(&gram);
    let a2 = congruence(&amat);
    let mut eta = 0.0f64;
    for (i, row) in g2.iter().enumerate() {
        let mut s = 0.0;
        for (j, x) in row.iter().enumerate() {
            let d = if i == j { *x - Ball::ONE } else { *x };
            s = add_up(s, d.upper_abs().value());
        }
        eta = eta.max(s);
    }
    out.eta = eta;
    if !(eta < 1.0) {
        out.inconclusive = true;
        return Ok(out);
    }
    let mut gersh = f64::INFINITY;
    for j in 0..m {
        let mut off = 0.0;
        for (i, row) in a2.iter().enumerate() {
            if i != j {
                off = add_up(off, row[j].upper_abs().value());
            }
        }
        gersh = gersh.min((a2[j][j] - Ball::exact(off)).lo());
    }
    out.gershgorin = gersh;
    out.holds = gersh > mul_up(a, add_up(1.0, eta));
    Ok(out)
}

/// Interval for the number of eigenvalues above 1 on one parity.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityCount {
    pub lower: usize,
    pub upper: Option<usize>,
    pub at_most: CountCheck,
    pub at_least: Option<LowerCheck>,
    /// Known eigenvalues used, as text.
    pub known: String,
}

/// Thresholds and numerical parameters for [`morse_index`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MorseOptions {
    pub theta: f64,
    pub a: f64,
    pub n_part: usize,
    pub squarings: u32,
}

/// Certified interval for the Morse index.
#[derive(Clone, Debug, PartialEq)]
pub struct MorseCertificate {
    pub even: ParityCount,
    pub odd: ParityCount,
    pub options: MorseOptions,
    pub nonzero: bool,
    pub nonradial: bool,
}

impl MorseCertificate {
    pub fn lower(&self) -> usize {
        self.even.lower + self.odd.lower
    }

    pub fn upper(&self) -> Option<usize> {
        Some(self.even.upper? + self.odd.upper?)
    }

    /// The index, when the bounds meet.
    pub fn exact(&self) -> Option<usize> {
        self.upper().filter(|&u| u == self.lower())
    }
}

impl fmt::Display for MorseCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.exact(), self.upper()) {
            (Some(i), _) => write!(f, "morse index = {i}"),
            (None, Some(u)) => write!(f, "morse index in [{}, {u}]", self.lower()),
            (None, None) => write!(f, "morse index >= {}", self.lower()),
        }
    }
}

fn some_coefficient_nonzero(u: &Zernike, min_m: usize) -> bool {
    let sp = u.space();
    (min_m..=sp.size()).any(|m| (0..sp.n_coeffs(m)).any(|j| !u.coefficient_hull(m, j).contains_zero()))
}

/// Certified bounds on the number of eigenvalues of `DG(u)` above 1 for
/// every fixed point `u` of `G` inside `u_encl`. Uses the eigenvalue 3
/// (eigenvector `u`) and, for non-radial `u`, the eigenvalue 1 with the
/// odd eigenvector `∂_θ u`.
pub fn morse_index(
    w: &Weight,
    u_encl: &Zernike,
    eig_even: &EigenData,
    eig_odd: &EigenData,
    opts: MorseOptions,
    plan: &ProductPlan,
) -> Result<MorseCertificate, SpectralError> {
    if eig_even.parity != Parity::Even || eig_odd.parity != Parity::Odd {
        return Err(SpectralError::ParityMismatch);
    }
    let sp = u_encl.space();
    let nonzero = some_coefficient_nonzero(u_encl, 0);
    let nonradial = some_coefficient_nonzero(u_encl, 1);

    let pe = build_partition(sp, opts.n_part, Parity::Even)?;
    let am = at_most_n(w, u_encl, eig_even, opts.theta, plan, &pe, opts.squarings)?;
    let sel = eig_even.above(opts.a);
    let al = if sel.is_empty() { None } else { Some(at_least_m(w, u_encl, &sel, opts.a, plan)?) };
    let mut lower = usize::from(nonzero);
    if let Some(c) = al.filter(|c| c.holds) {
        let distinct = if opts.a >= 3.0 && nonzero { 1 } else { 0 };
        lower = lower.max(c.m + distinct);
    }
    let even = ParityCount {
        lower,
        upper: am.holds.then_some(am.n),
        at_most: am,
        at_least: al,
        known: String::from(if nonzero { "eigenvalue 3 (u)" } else { "none" }),
    };

    let po = build_partition(sp, opts.n_part, Parity::Odd)?;
    let am = at_most_n(w, u_encl, eig_odd, opts.theta, plan, &po, opts.squarings)?;
    let sel = eig_odd.above(opts.a);
    let al = if sel.is_empty() { None } else { Some(at_least_m(w, u_encl, &sel, opts.a, plan)?) };
    let lower = al.filter(|c| c.holds).map_or(0, |c| c.m);
    let rot = usize::from(nonradial && opts.theta <= 1.0);
    let odd = ParityCount {
        lower,
        upper: am.holds.then(|| am.n.saturating_sub(rot)),
        at_most: am,
        at_least: al,
        known: String::from(if nonradial { "eigenvalue 1 (rotation), not counted" } else { "none" }),
    };
    Ok(MorseCertificate { even, odd, options: opts, nonzero, nonradial })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::regge::CgTable;
    use crate::zernike::Rho;

    fn sp() -> Arc<Space> {
        Space::new(6, Rho::new(65, 64).unwrap())
    }

    #[test]
    fn partition_counts() {
        let s = sp();
        let p = build_partition(&s, 0, Parity::Even).unwrap();
        assert!(p.groups().iter().all(|g| !matches!(g, Group::Coefficient { .. })));
        let p = build_partition(&s, 2, Parity::Even).unwrap();
        let coef: Vec<_> = p.groups().iter().filter(|g| matches!(g, Group::Coefficient { .. })).collect();
        assert_eq!(coef.len(), s.modes_below(Parity::Even, 2).len());
        assert!(build_partition(&s, 8, Parity::Even).is_err());
    }

    #[test]
    fn squaring_examples() {
        let z = DMatrix::zeros(2, 2);
        let nil = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(spectral_radius_of(&nil, &z, 1).unwrap().value() < 1e-100);
        let d = DMatrix::from_diagonal_element(3, 3, 0.5);
        for k in 0..6 {
            let r = spectral_radius_of(&d, &DMatrix::zeros(3, 3), k).unwrap().value();
            assert!((0.5..0.5 + 1e-12).contains(&r));
        }
    }

    #[test]
    fn identity_enclosure() {
        let s = sp();
        let p = build_partition(&s, 4, Parity::Even).unwrap();
        let l = enclose_operator(|z: &Zernike| Ok::<_, ()>(z.clone()), &p).unwrap();
        for i in 0..p.len() {
            for j in 0..p.len() {
                let e = l.entry(i, j);
                if i == j {
                    assert!(e.contains(1.0) || p.is_residual(i));
                    assert!(e.upper_abs().value() < 1.0 + 1e-12);
                } else {
                    assert_eq!(e, Ball::ZERO);
                }
            }
        }
        assert!(op_norm(&l).value() < 1.0 + 1e-12);
    }

    #[test]
    fn zero_weight_has_no_eigenvalues() {
        let s = sp();
        let plan = ProductPlan::for_space(&CgTable::build(6).unwrap(), &s).unwrap();
        let mut z = Zernike::zero(&s, Parity::Even);
        z.set_coeff(0, 0, Ball::ZERO);
        let w = Weight::new(z).unwrap();
        let u = Zernike::mode(&s, Parity::Even, 1, 1, Ball::ONE);
        let eig = EigenData::new(Parity::Even, Vec::new(), Vec::new()).unwrap();
        let p = build_partition(&s, 6, Parity::Even).unwrap();
        let c = at_most_n(&w, &u, &eig, 0.5, &plan, &p, 4).unwrap();
        assert!(c.holds && c.bound.value() == 0.0);
    }

    #[test]
    fn mode_weight_matches_quadrature() {
        // ∫ (R^0_2)² r dr dθ = 2π ∫ (2r² - 1)² r dr = π/3
        let b = l2_mode_weight(0, 2);
        assert!(b.contains(core::f64::consts::PI / 3.0));
    }
}
