//! Contraction certificate for the Newton-like map
//! `N(h) = G(ū + A h) - ū + M h`, `A = I - M`, on the even subspace.
//!
//! If `ε >= ‖N(0)‖`, `K >= sup ‖DN(h)‖` over `‖h‖ <= δ` and `ε + Kδ < δ`,
//! then `N` has a unique fixed point `h*` with `‖h*‖ <= δ`. When `I - M`
//! is invertible, `u* = ū + A h*` is a fixed point of `G` with
//! `‖u* - ū‖ <= ‖A‖δ`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;

use crate::ball::{add_up, div_up, mul_up, two_sum, Ball, Radius};
use crate::gmap::{g_apply, potential, GmapError, Weight};
use crate::linalg::mul_mr;
use crate::spectral::{build_partition, Group, SpectralError};
use crate::zernike::{ModeRef, Parity, ProductPlan, Space, Zernike, ZernikeError};

#[derive(Clone, Debug, PartialEq)]
pub enum ProveError {
    Gmap(GmapError),
    Spectral(SpectralError),
    /// An inequality of the protocol failed; `detail` lists the balls.
    CheckFailed { check: &'static str, detail: String },
    OddInput,
}

impl From<GmapError> for ProveError {
    fn from(e: GmapError) -> Self {
        ProveError::Gmap(e)
    }
}

impl From<ZernikeError> for ProveError {
    fn from(e: ZernikeError) -> Self {
        ProveError::Gmap(GmapError::Zernike(e))
    }
}

impl From<SpectralError> for ProveError {
    fn from(e: SpectralError) -> Self {
        ProveError::Spectral(e)
    }
}

impl fmt::Display for ProveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProveError::Gmap(e) => write!(f, "{e}"),
            ProveError::Spectral(e) => write!(f, "{e}"),
            ProveError::CheckFailed { check, detail } => write!(f, "check `{check}` failed: {detail}"),
            ProveError::OddInput => f.write_str("the certificate works on even enclosures"),
        }
    }
}

/// `M`, acting on the even modes of degree `< n_trunc` and as zero elsewhere.
#[derive(Clone, Debug)]
pub struct NewtonOperator {
    space: Arc<Space>,
    n_trunc: usize,
    modes: Vec<usize>,
    pub matrix: DMatrix<Ball>,
}

impl NewtonOperator {
    /// Even mode indices of degree `< n_trunc`, in the row/column order of `M`.
    pub fn modes_for(space: &Space, n_trunc: usize) -> Vec<usize> {
        space
            .modes_below(Parity::Even, n_trunc)
            .into_iter()
            .map(|(m, j)| space.mode_index(m, j))
            .collect()
    }

    pub fn zero(space: &Arc<Space>, n_trunc: usize) -> NewtonOperator {
        let modes = NewtonOperator::modes_for(space, n_trunc);
        let n = modes.len();
        NewtonOperator { space: space.clone(), n_trunc, modes, matrix: DMatrix::from_element(n, n, Ball::ZERO) }
    }

    /// Promotes a floating matrix over [`NewtonOperator::modes_for`] to exact balls.
    pub fn from_f64(space: &Arc<Space>, n_trunc: usize, m: &DMatrix<f64>) -> NewtonOperator {
        let modes = NewtonOperator::modes_for(space, n_trunc);
        assert_eq!(m.shape(), (modes.len(), modes.len()), "matrix does not match the truncation");
        NewtonOperator { space: space.clone(), n_trunc, modes, matrix: m.map(Ball::exact) }
    }

    /// `None` when the matrix does not match [`NewtonOperator::modes_for`].
    pub fn from_balls(space: &Arc<Space>, n_trunc: usize, matrix: DMatrix<Ball>) -> Option<NewtonOperator> {
        let modes = NewtonOperator::modes_for(space, n_trunc);
        (matrix.shape() == (modes.len(), modes.len())).then(|| NewtonOperator { space: space.clone(), n_trunc, modes, matrix })
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    fn degree_of(&self, k: usize) -> usize {
        let (m, j) = self.space.mode_of(self.modes[k]);
        m + 2 * j
    }

    fn mid_rad(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        (self.matrix.map(|b| b.center()), self.matrix.map(|b| b.radius()))
    }

    /// Norm of column `k` as a map from the unit vector of its mode.
    fn column_norms(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|c| {
                let mut s = 0.0;
                for r in 0..self.dim() {
                    let x = self.matrix[(r, c)];
                    if x != Ball::ZERO {
                        s = add_up(s, mul_up(x.upper_abs().value(), self.space.pow_up(self.degree_of(r))));
                    }
                }
                div_up(s, self.space.pow_lo(self.degree_of(c)))
            })
            .collect()
    }

    /// Upper bound on the operator norm of `M` on the `ρ`-weighted space.
    pub fn norm_upper(&self) -> Radius {
        Radius::new(self.column_norms().into_iter().fold(0.0, f64::max))
    }

    /// Enclosure of `M h` for all members `h`.
    pub fn apply(&self, h: &Zernike) -> Result<Zernike, ProveError> {
        if h.parity() != Parity::Even {
            return Err(ProveError::OddInput);
        }
        let sp = &self.space;
        let mut out = Zernike::zero(sp, Parity::Even);
        let hv: Vec<Ball> = self.modes.iter().map(|&k| {
            let (m, j) = sp.mode_of(k);
            h.coeff(m, j)
        }).collect();
        for r in 0..self.dim() {
            let mut acc = Ball::ZERO;
            for (c, x) in hv.iter().enumerate() {
                if *x != Ball::ZERO && self.matrix[(r, c)] != Ball::ZERO {
                    acc += self.matrix[(r, c)] * *x;
                }
            }
            if acc != Ball::ZERO {
                let (m, j) = sp.mode_of(self.modes[r]);
                out.set_coeff(m, j, acc);
            }
        }
        // An error slot may hold any mode of M's range it overlaps.
        let norms = self.column_norms();
        let mut err = 0.0;
        for (slot, rad) in h.error_slots() {
            let mut worst = 0.0f64;
            for (c, &k) in self.modes.iter().enumerate() {
                let (m, j) = sp.mode_of(k);
                let inside = match slot {
                    ModeRef::RadialTail { m: mt, j: jt } => m == mt && j >= jt,
                    ModeRef::BandError { m: mb } => m >= mb,
                    ModeRef::Coefficient { .. } => false,
                };
                if inside {
                    worst = worst.max(norms[c]);
                }
            }
            err = add_up(err, mul_up(rad.value(), worst));
        }
        if err != 0.0 {
            out.add_band(0, Radius::new(err));
        }
        Ok(out)
    }

    /// True iff no entry couples a mode with angular index an odd
    /// multiple of `n` to one that is not.
    pub fn is_block_diagonal_for(&self, n: usize) -> bool {
        let inside: Vec<bool> = self.modes.iter().map(|&k| self.space.mode_of(k).0 % (2 * n) == n).collect();
        (0..self.dim()).all(|r| (0..self.dim()).all(|c| inside[r] == inside[c] || self.matrix[(r, c)] == Ball::ZERO))
    }

    /// Copy with the couplings across the `S_n` blocks set to zero.
    pub fn block_diagonal_part(&self, n: usize) -> NewtonOperator {
        let inside: Vec<bool> = self.modes.iter().map(|&k| self.space.mode_of(k).0 % (2 * n) == n).collect();
        let mut out = self.clone();
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                if inside[r] != inside[c] {
                    out.matrix[(r, c)] = Ball::ZERO;
                }
            }
        }
        out
    }
}

/// Enclosure of `N(y) = G(ū + A y) - ū + M y` for all members `y` of `h`.
pub fn n_map(w: &Weight, ubar: &Zernike, m: &NewtonOperator, h: &Zernike, plan: &ProductPlan) -> Result<Zernike, ProveError> {
    if ubar.parity() != Parity::Even || h.parity() != Parity::Even {
        return Err(ProveError::OddInput);
    }
    let mh = m.apply(h)?;
    let ah = h.sub(&mh)?;
    let y = ubar.add(&ah)?;
    Ok(g_apply(w, &y, plan)?.sub(ubar)?.add(&mh)?)
}

/// `‖N(0)‖ = ‖G(ū) - ū‖`, bounded above.
pub fn epsilon_bound(w: &Weight, ubar: &Zernike, m: &NewtonOperator, plan: &ProductPlan) -> Result<Radius, ProveError> {
    let z = Zernike::zero(ubar.space(), Parity::Even);
    Ok(n_map(w, ubar, m, &z, plan)?.norm_upper())
}

/// Bound on `‖DN(h)‖` over `‖h‖ <= delta_cap`, with
/// `DN(h) k = DG(ū + A h)(A k) + M k`.
pub fn dn_norm_bound(
    w: &Weight,
    ubar: &Zernike,
    m: &NewtonOperator,
    delta_cap: Radius,
    plan: &ProductPlan,
) -> Result<Radius, ProveError> {
    let cols = dn_column_bounds(w, ubar, m, delta_cap, plan)?;
    Ok(Radius::new(cols.into_iter().fold(0.0, f64::max)))
}

/// Per-column bounds of [`dn_norm_bound`] over the partition with one
/// column per even mode of degree `<= D` and residual columns beyond.
pub fn dn_column_bounds(
    w: &Weight,
    ubar: &Zernike,
    m: &NewtonOperator,
    delta_cap: Radius,
    plan: &ProductPlan,
) -> Result<Vec<f64>, ProveError> {
    if ubar.parity() != Parity::Even {
        return Err(ProveError::OddInput);
    }
    let sp = ubar.space().clone();
    let a_norm = Radius::ONE + m.norm_upper();
    let v = ubar.widen(a_norm * delta_cap);
    let u2 = v.multiply(&v, plan)?;
    let q = potential(w, &u2, plan)?;
    let dg = |z: &Zernike| -> Result<Zernike, ProveError> { Ok(q.multiply(z, plan)?.inv_neg_lap()) };

    let part = build_partition(&sp, sp.degree() + 1, Parity::Even)?;
    let mut out = Vec::with_capacity(part.len());

    // Images I_i = DG(v) e_i of all coefficient modes, as dense midpoints,
    // radii and error norms.
    let nm = sp.n_modes();
    let coef_groups: Vec<(usize, usize, usize)> = part
        .groups()
        .iter()
        .enumerate()
        .filter_map(|(g, grp)| match *grp {
            Group::Coefficient { m, j } => Some((g, m, j)),
            _ => None,
        })
        .collect();
    let mut col_of_mode = vec![usize::MAX; nm];
    for (c, &k) in m.modes().iter().enumerate() {
        col_of_mode[k] = c;
    }
    let dim = m.dim();
    let mut xm = DMatrix::zeros(nm, dim);
    let mut xr = DMatrix::zeros(nm, dim);
    let mut xe = DMatrix::zeros(1, dim);
    let mut bounds = vec![0.0; part.len()];
    for &(g, mm, j) in &coef_groups {
        let img = dg(&part.unit(g))?;
        let k = sp.mode_index(mm, j);
        let c = col_of_mode[k];
        if c == usize::MAX {
            bounds[g] = mul_up(img.norm_upper().value(), part.unit_scale(g));
            continue;
        }
        for (mi, ji, b) in img.nonzero_coeffs() {
            let r = sp.mode_index(mi, ji);
            xm[(r, c)] = b.center();
            xr[(r, c)] = b.radius();
        }
        xe[(0, c)] = img.error_norm().value();
    }

    if dim > 0 {
        // Columns of DG(v)(I - M) + M over M's range.
        let (mm_, mr_) = m.mid_rad();
        let mut am = -&mm_;
        let mut ar = mr_.clone();
        for d in 0..dim {
            let (s, e) = two_sum(1.0, am[(d, d)]);
            am[(d, d)] = s;
            ar[(d, d)] = add_up(ar[(d, d)], e.abs());
        }
        let (cm, cr) = mul_mr(&xm, Some(&xr), &am, Some(&ar));
        let abs_a = am.abs() + &ar;
        let ce = crate::linalg::mul_nonneg_up(&xe, &abs_a);
        for (c, &k) in m.modes().iter().enumerate() {
            let mut s = ce[(0, c)];
            for r in 0..nm {
                let mut mid = cm[(r, c)];
                let mut rad = cr[(r, c)];
                let rr = col_of_mode[r];
                if rr != usize::MAX {
                    let x = m.matrix[(rr, c)];
                    let (t, e) = two_sum(mid, x.center());
                    mid = t;
                    rad = add_up(add_up(rad, e.abs()), x.radius());
                }
                if mid != 0.0 || rad != 0.0 {
                    let (mi, ji) = sp.mode_of(r);
                    s = add_up(s, mul_up(add_up(mid.abs(), rad), sp.pow_up(mi + 2 * ji)));
                }
            }
            let (mi, ji) = sp.mode_of(k);
            let g = coef_groups.iter().find(|x| x.1 == mi && x.2 == ji).expect("mode in partition").0;
            bounds[g] = mul_up(s, part.unit_scale(g));
        }
    }

    for (g, grp) in part.groups().iter().enumerate() {
        if !matches!(grp, Group::Coefficient { .. }) {
            bounds[g] = dg(&part.unit(g))?.norm_upper().value();
        }
    }
    out.extend(bounds);
    Ok(out)
}

/// `d(K) = (1 + 2^-8) ε / (1 - K)`, rounded up.
pub fn d_of_k(eps: Radius, k: f64) -> Radius {
    let num = mul_up(eps.value(), 1.0 + 1.0 / 256.0);
    Radius::new(div_up(num, (1.0 - k).next_down()))
}

/// Smallest `ε` used by [`contr_fix`]; an exact zero residual is replaced
/// by this value so that `δ > 0`.
pub const EPSILON_FLOOR: f64 = 1e-300;

/// Certified Newton-Kantorovich data for one approximate solution.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofCertificate {
    pub epsilon: Radius,
    pub k: Radius,
    pub delta: Radius,
    pub delta_cap: Radius,
    pub a_norm: Radius,
    pub a_norm_delta: Radius,
    pub m_no_eigen_one: bool,
    pub parity: Parity,
}

impl ProofCertificate {
    /// `‖A‖δ / ‖ū‖`, rounded up.
    pub fn relative_radius(&self, ubar: &Zernike) -> f64 {
        let lo: f64 = ubar.nonzero_coeffs().fold(0.0, |acc, (m, j, c)| {
            acc + c.lower_abs() * ubar.space().pow_lo(m + 2 * j)
        });
        div_up(self.a_norm_delta.value(), lo * (1.0 - 1e-12))
    }

    /// Enclosure of the true solution: `ū` widened by `‖A‖δ`.
    pub fn solution(&self, ubar: &Zernike) -> Zernike {
        ubar.widen(self.a_norm_delta)
    }
}

impl fmt::Display for ProofCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "epsilon <= {}, K <= {}, delta = {}, |A| delta <= {}",
            self.epsilon, self.k, self.delta, self.a_norm_delta
        )
    }
}

/// Runs the certificate: `ε`, then `K` on the ball of radius `d(3/4)`,
/// then `δ = d(K)`, `ε + Kδ < δ` and the invertibility of `I - M`.
pub fn contr_fix(w: &Weight, ubar: &Zernike, m: &NewtonOperator, plan: &ProductPlan) -> Result<ProofCertificate, ProveError> {
    let eps = epsilon_bound(w, ubar, m, plan)?;
    contr_fix_with_epsilon(w, ubar, m, plan, eps)
}

/// [`contr_fix`] with a caller-supplied `ε` (any upper bound of `‖N(0)‖`).
pub fn contr_fix_with_epsilon(
    w: &Weight,
    ubar: &Zernike,
    m: &NewtonOperator,
    plan: &ProductPlan,
    eps: Radius,
) -> Result<ProofCertificate, ProveError> {
    let eps = eps.max(Radius::new(EPSILON_FLOOR));
    if !eps.is_finite() {
        return Err(ProveError::CheckFailed { check: "epsilon finite", detail: format!("epsilon = {eps}") });
    }
    let cap = d_of_k(eps, 0.75);
    let k = dn_norm_bound(w, ubar, m, cap, plan)?;
    contr_fix_with_bounds(m, eps, k, cap)
}

/// The final inequalities for given `ε` and `K` (valid on the ball of radius `cap`).
pub fn contr_fix_with_bounds(m: &NewtonOperator, eps: Radius, k: Radius, cap: Radius) -> Result<ProofCertificate, ProveError> {
    if !(k.value() <= 0.75) {
        return Err(ProveError::CheckFailed { check: "K <= 3/4", detail: format!("K = {k}, epsilon = {eps}") });
    }
    let delta = d_of_k(eps, k.value());
    if !(delta.value() <= cap.value()) {
        return Err(ProveError::CheckFailed { check: "d(K) <= d(3/4)", detail: format!("delta = {delta}, cap = {cap}") });
    }
    let lhs = Ball::exact(eps.value()) + Ball::exact(k.value()) * Ball::exact(delta.value());
    if !(lhs.hi() < delta.value()) {
        return Err(ProveError::CheckFailed {
            check: "epsilon + K delta < delta",
            detail: format!("lhs = [{:e}, {:e}], delta = {delta}", lhs.lo(), lhs.hi()),
        });
    }
    if !check_i_minus_m_invertible(m) {
        return Err(ProveError::CheckFailed { check: "I - M invertible", detail: String::from("Neumann residual >= 1") });
    }
    let a_norm = Radius::ONE + m.norm_upper();
    Ok(ProofCertificate {
        epsilon: eps,
        k,
        delta,
        delta_cap: cap,
        a_norm,
        a_norm_delta: a_norm * delta,
        m_no_eigen_one: true,
        parity: Parity::Even,
    })
}

/// Largest accepted row-sum norm of the floating inverse `B`. Since
/// `‖B‖ >= 1/|μ|` for every eigenvalue `μ` of the midpoint of `I - M`, this
/// refuses any `M` whose midpoint has an eigenvalue within about `1e-11` of 1.
pub const MAX_INVERSE_NORM: f64 = 1e11;

/// Certifies that `I - M` is invertible: with `B` a floating inverse of
/// the midpoint, `‖I - B(I - M)‖ < 1` in the weighted column-sum norm and
/// `‖B‖ <= MAX_INVERSE_NORM`.
pub fn check_i_minus_m_invertible(m: &NewtonOperator) -> bool {
    neumann_residual(m).is_some_and(|r| r < 1.0)
}

/// Upper bound on `‖I - B(I - M)‖`, or `None` if no acceptable inverse
/// was found.
pub fn neumann_residual(m: &NewtonOperator) -> Option<f64> {
    let n = m.dim();
    if n == 0 {
        return Some(0.0);
    }
    let (mm, mr) = m.mid_rad();
    let mut am = -&mm;
    let mut ar = mr;
    for d in 0..n {
        let (s, e) = two_sum(1.0, am[(d, d)]);
        am[(d, d)] = s;
        ar[(d, d)] = add_up(ar[(d, d)], e.abs());
    }
    let b = am.clone().try_inverse()?;
    if b.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let b_norm = b.row_iter().map(|row| row.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    if b_norm > MAX_INVERSE_NORM {
        return None;
    }
    let (cm, cr) = mul_mr(&b, None, &am, Some(&ar));
    let sp = m.space();
    let deg: Vec<usize> = (0..n).map(|k| m.degree_of(k)).collect();
    let mut worst = 0.0f64;
    for c in 0..n {
        let mut s = 0.0;
        for r in 0..n {
            let target = if r == c { 1.0 } else { 0.0 };
            let (d, e) = two_sum(target, -cm[(r, c)]);
            let v = add_up(add_up(d.abs(), e.abs()), cr[(r, c)]);
            if v != 0.0 {
                s = add_up(s, mul_up(v, sp.pow_up(deg[r])));
            }
        }
        worst = worst.max(div_up(s, sp.pow_lo(deg[c])));
    }
    Some(worst)
}

/// Outcome of a symmetry check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymmetryKind {
    /// No rotation other than the identity maps the solution to itself.
    NoNontrivialRotation,
    /// The solution satisfies `u(r, θ) = -u(r, θ + π/n)`.
    InvariantUnder(usize),
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryVerdict {
    pub kind: SymmetryKind,
    pub witness: String,
}

/// Squares the solution enclosure and looks for an angular-index-1
/// coefficient that excludes zero. A function whose square has such a
/// coefficient is not invariant under any nontrivial rotation.
pub fn min_symm_check(u_star: &Zernike, plan: &ProductPlan) -> Result<SymmetryVerdict, ProveError> {
    let sq = u_star.multiply(u_star, plan)?;
    let sp = sq.space();
    if sp.size() >= 1 {
        for j in 0..sp.n_coeffs(1) {
            let c = sq.coefficient_hull(1, j);
            if !c.contains_zero() {
                return Ok(SymmetryVerdict {
                    kind: SymmetryKind::NoNontrivialRotation,
                    witness: format!("coefficient (m=1, n={}) of u^2 in [{:e}, {:e}]", 1 + 2 * j, c.lo(), c.hi()),
                });
            }
        }
    }
    Ok(SymmetryVerdict { kind: SymmetryKind::Inconclusive, witness: String::from("every m = 1 coefficient of u^2 contains 0") })
}

/// `ū` supported on odd multiples of `n` and `M` block diagonal for that
/// split (sufficient for `M` to commute with `S_n`): the certified
/// solution is then `S_n`-invariant.
pub fn has_symm_check(ubar: &Zernike, m: &NewtonOperator, n: usize) -> SymmetryVerdict {
    if n == 0 || ubar.parity() != Parity::Even {
        return SymmetryVerdict { kind: SymmetryKind::Inconclusive, witness: String::from("needs n >= 1 and even parity") };
    }
    if !ubar.sn_support_check(n) {
        return SymmetryVerdict {
            kind: SymmetryKind::Inconclusive,
            witness: format!("approximate solution has modes outside the odd multiples of {n}"),
        };
    }
    if !m.is_block_diagonal_for(n) {
        return SymmetryVerdict {
            kind: SymmetryKind::Inconclusive,
            witness: format!("M couples odd multiples of {n} to other angular indices (block test is only sufficient)"),
        };
    }
    SymmetryVerdict {
        kind: SymmetryKind::InvariantUnder(n),
        witness: format!("support on angular indices = {n} mod {}; M block diagonal", 2 * n),
    }
}
