//! Floating-point Galerkin numerics producing approximate solutions,
//! Newton operators and eigenpairs. Nothing here is rigorous: outputs
//! only enter the certified computations as exactly representable data.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::gmap::{dg_f64, g_f64, potential_f64, Weight};
use crate::prove::NewtonOperator;
use crate::zernike::radial::radial_values;
use crate::zernike::{Parity, ProductPlan, Space, Zernike};

#[derive(Clone, Debug, PartialEq)]
pub enum ApproxError {
    NoConvergence { iterations: usize, residual: f64 },
    Singular,
    BadSeed(&'static str),
}

impl fmt::Display for ApproxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApproxError::NoConvergence { iterations, residual } => {
                write!(f, "no convergence after {iterations} iterations (relative residual {residual:e})")
            }
            ApproxError::Singular => f.write_str("I - DG is numerically singular; try another truncation"),
            ApproxError::BadSeed(s) => write!(f, "invalid seed: {s}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SeedKind {
    RadialBump,
    OffcenterBump,
    /// Off-center bump summed over the powers of `S_n`.
    Symmetrized(usize),
}

/// Initial guess `A exp(-|x - c|²/w²)(1 - r²)` with `c = (center, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeedSpec {
    pub kind: SeedKind,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl SeedSpec {
    pub fn radial(amplitude: f64, width: f64) -> SeedSpec {
        SeedSpec { kind: SeedKind::RadialBump, amplitude, center: 0.0, width }
    }

    pub fn offcenter(amplitude: f64, center: f64, width: f64) -> SeedSpec {
        SeedSpec { kind: SeedKind::OffcenterBump, amplitude, center, width }
    }

    pub fn symmetrized(n: usize, amplitude: f64, center: f64, width: f64) -> SeedSpec {
        SeedSpec { kind: SeedKind::Symmetrized(n), amplitude, center, width }
    }

    fn bump(&self, r: f64, th: f64, c: f64) -> f64 {
        let (x, y) = (r * libm::cos(th) - c, r * libm::sin(th));
        self.amplitude * libm::exp(-(x * x + y * y) / (self.width * self.width)) * (1.0 - r * r)
    }

    pub fn eval(&self, r: f64, th: f64) -> f64 {
        match self.kind {
            SeedKind::RadialBump => self.bump(r, th, 0.0),
            SeedKind::OffcenterBump => self.bump(r, th, self.center),
            SeedKind::Symmetrized(n) => (0..2 * n)
                .map(|k| {
                    let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                    s * self.bump(r, th + k as f64 * PI / n as f64, self.center)
                })
                .sum(),
        }
    }

    /// Angular indices kept by the seed's symmetry: odd multiples of `n`.
    pub fn symmetry(&self) -> Option<usize> {
        match self.kind {
            SeedKind::Symmetrized(n) => Some(n),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), ApproxError> {
        if !(self.width > 0.0) || !self.amplitude.is_finite() || !(0.0..1.0).contains(&self.center) {
            return Err(ApproxError::BadSeed("need width > 0 and 0 <= center < 1"));
        }
        if self.kind == SeedKind::Symmetrized(0) {
            return Err(ApproxError::BadSeed("symmetrized(n) needs n >= 1"));
        }
        Ok(())
    }
}

/// Coefficients of one parity over [`Space::mode_index`].
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    pub parity: Parity,
    pub coeffs: Vec<f64>,
}

impl DenseState {
    /// Exact enclosure of the floating coefficients.
    pub fn to_zernike(&self, space: &Arc<Space>) -> Zernike {
        Zernike::from_centers(space, self.parity, &self.coeffs)
    }
}

/// Result of [`Galerkin::find_fix`].
#[derive(Clone, Debug)]
pub struct FixPoint {
    pub state: DenseState,
    pub residual: f64,
    pub iterations: usize,
}

/// Approximate eigenpair with `vector = (-Δ)^{-1} preimage`.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: DenseState,
    pub preimage: DenseState,
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Squared `L²` norm of `R^m_n cos(mθ)` on the disk.
pub fn l2_weight(m: usize, n: usize) -> f64 {
    let base = PI / (n as f64 + 1.0);
    if m == 0 {
        base
    } else {
        0.5 * base
    }
}

/// Truncated Galerkin setting: weight, space, plan and truncation degree.
pub struct Galerkin<'a> {
    sp: Arc<Space>,
    plan: &'a ProductPlan,
    w: Vec<f64>,
    n_trunc: usize,
    l2: Vec<f64>,
    deg: Vec<usize>,
}

impl<'a> Galerkin<'a> {
    /// Modes of degree `< n_trunc` take part (`n_trunc = degree + 1` keeps all).
    pub fn new(weight: &Weight, plan: &'a ProductPlan, n_trunc: usize) -> Galerkin<'a> {
        let sp = weight.space().clone();
        let mut l2 = Vec::with_capacity(sp.n_modes());
        let mut deg = Vec::with_capacity(sp.n_modes());
        for k in 0..sp.n_modes() {
            let (m, j) = sp.mode_of(k);
            l2.push(l2_weight(m, m + 2 * j));
            deg.push(m + 2 * j);
        }
        Galerkin { w: weight.zernike().centers(), sp, plan, n_trunc, l2, deg }
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.sp
    }

    /// Mode indices of a parity below the truncation degree, restricted to
    /// odd multiples of `sym` when given.
    pub fn active(&self, parity: Parity, sym: Option<usize>) -> Vec<usize> {
        (0..self.sp.n_modes())
            .filter(|&k| {
                let (m, _) = self.sp.mode_of(k);
                m >= parity.min_m() && self.deg[k] < self.n_trunc && sym.is_none_or(|n| m % (2 * n) == n)
            })
            .collect()
    }

    fn restrict(&self, v: &mut [f64], active: &[usize]) {
        let mut keep = vec![false; v.len()];
        for &k in active {
            keep[k] = true;
        }
        for (x, k) in v.iter_mut().zip(keep) {
            if !k {
                *x = 0.0;
            }
        }
    }

    /// `L²` projection of a function onto the active modes.
    pub fn project(&self, f: impl Fn(f64, f64) -> f64, parity: Parity, active: &[usize]) -> Vec<f64> {
        let s = self.sp.size();
        let nr = self.sp.degree() + 8;
        let nt = 4 * s + 8;
        let (xr, wr) = gauss_legendre(nr);
        let mut out = vec![0.0; self.sp.n_modes()];
        // Angular Fourier coefficients at each radius.
        let mut fm = vec![vec![0.0; s + 1]; nr];
        for (i, &r) in xr.iter().enumerate() {
            for t in 0..nt {
                let th = 2.0 * PI * t as f64 / nt as f64;
                let val = f(r, th);
                for (m, slot) in fm[i].iter_mut().enumerate() {
                    let b = match parity {
                        Parity::Even => libm::cos(m as f64 * th),
                        Parity::Odd => libm::sin(m as f64 * th),
                    };
                    *slot += val * b * 2.0 * PI / nt as f64;
                }
            }
        }
        for (i, &r) in xr.iter().enumerate() {
            for m in parity.min_m()..=s {
                let nc = self.sp.n_coeffs(m);
                if nc == 0 {
                    continue;
                }
                let vals = radial_values(m, nc - 1, &r);
                for (j, v) in vals.iter().enumerate() {
                    let k = self.sp.mode_index(m, j);
                    out[k] += wr[i] * r * fm[i][m] * v / self.l2[k];
                }
            }
        }
        self.restrict(&mut out, active);
        out
    }

    /// Truncated `G(u)`.
    pub fn g(&self, u: &[f64], active: &[usize]) -> Vec<f64> {
        let mut v = g_f64(self.plan, &self.sp, &self.w, u);
        self.restrict(&mut v, active);
        v
    }

    /// Weighted norm `Σ |c| ρ^n`.
    pub fn norm(&self, v: &[f64]) -> f64 {
        v.iter().zip(self.deg.iter()).map(|(c, &n)| c.abs() * self.sp.pow(n).center()).sum()
    }

    fn l2_dot(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).zip(self.l2.iter()).map(|((x, y), w)| x * y * w).sum()
    }

    /// Relative residual `‖G(u) - u‖ / ‖u‖` (zero for `u = 0`).
    pub fn residual(&self, u: &[f64], active: &[usize]) -> f64 {
        let g = self.g(u, active);
        let d: Vec<f64> = g.iter().zip(u).map(|(a, b)| a - b).collect();
        let nu = self.norm(u);
        if nu == 0.0 {
            self.norm(&d)
        } else {
            self.norm(&d) / nu
        }
    }

    /// Matrix of the truncated `DG(u)` on `active` (a parity-`parity` list).
    pub fn dg_matrix(&self, u: &[f64], parity: Parity, active: &[usize]) -> DMatrix<f64> {
        let q = potential_f64(self.plan, &self.w, u);
        let n = active.len();
        let mut a = DMatrix::zeros(n, n);
        let mut e = vec![0.0; self.sp.n_modes()];
        for (col, &k) in active.iter().enumerate() {
            e[k] = 1.0;
            let img = dg_f64(self.plan, &self.sp, &q, parity, &e);
            e[k] = 0.0;
            for (row, &i) in active.iter().enumerate() {
                a[(row, col)] = img[i];
            }
        }
        a
    }

    fn newton(&self, u: &mut Vec<f64>, active: &[usize], tol: f64, max_iter: usize) -> Result<(f64, usize), ApproxError> {
        let mut res = self.residual(u, active);
        for it in 0..max_iter {
            if res <= tol {
                return Ok((res, it));
            }
            let n = active.len();
            let dg = self.dg_matrix(u, Parity::Even, active);
            let g = self.g(u, active);
            let rhs = DVector::from_iterator(n, active.iter().map(|&k| g[k] - u[k]));
            let sys = DMatrix::identity(n, n) - dg;
            let step = sys.lu().solve(&rhs).ok_or(ApproxError::Singular)?;
            let mut t = 1.0;
            loop {
                let mut trial = u.clone();
                for (s, &k) in step.iter().zip(active) {
                    trial[k] += t * s;
                }
                let r = self.residual(&trial, active);
                if r < res || t < 1e-3 {
                    *u = trial;
                    res = r;
                    break;
                }
                t *= 0.5;
            }
        }
        if res <= tol {
            Ok((res, max_iter))
        } else {
            Err(ApproxError::NoConvergence { iterations: max_iter, residual: res })
        }
    }

    /// Approximate fixed point of `G` from a seed: Petviashvili iteration
    /// followed by damped Newton. A symmetrized seed keeps the iteration in
    /// the matching invariant subspace.
    pub fn find_fix(&self, seed: &SeedSpec, tol: f64) -> Result<FixPoint, ApproxError> {
        seed.validate()?;
        let active = self.active(Parity::Even, seed.symmetry());
        let mut u = self.project(|r, t| seed.eval(r, t), Parity::Even, &active);
        if self.norm(&u) == 0.0 {
            return Ok(FixPoint { state: DenseState { parity: Parity::Even, coeffs: u }, residual: 0.0, iterations: 0 });
        }
        let mut iters = 0;
        for _ in 0..400 {
            iters += 1;
            let g = self.g(&u, &active);
            let den = self.l2_dot(&u, &g);
            if !(den > 0.0) {
                break;
            }
            let s = self.l2_dot(&u, &u) / den;
            let f = s * libm::sqrt(s);
            let next: Vec<f64> = g.iter().map(|x| f * x).collect();
            let change = self.norm(&next.iter().zip(&u).map(|(a, b)| a - b).collect::<Vec<_>>()) / self.norm(&next);
            u = next;
            if change < 1e-9 {
                break;
            }
        }
        let (residual, it) = self.newton(&mut u, &active, tol, 30)?;
        Ok(FixPoint { state: DenseState { parity: Parity::Even, coeffs: u }, residual, iterations: iters + it })
    }

    /// Newton polish of a given state.
    pub fn refine(&self, u: &DenseState, tol: f64) -> Result<FixPoint, ApproxError> {
        let active = self.active(Parity::Even, None);
        let mut v = u.coeffs.clone();
        let (residual, iterations) = self.newton(&mut v, &active, tol, 30)?;
        Ok(FixPoint { state: DenseState { parity: Parity::Even, coeffs: v }, residual, iterations })
    }

    /// `M = I - (I - DG(u))^{-1}` on all even modes below the truncation,
    /// promoted to exact balls.
    pub fn build_newton_operator(&self, u: &DenseState) -> Result<NewtonOperator, ApproxError> {
        let modes = self.active(Parity::Even, None);
        debug_assert_eq!(modes, NewtonOperator::modes_for(&self.sp, self.n_trunc));
        let n = modes.len();
        let dg = self.dg_matrix(&u.coeffs, Parity::Even, &modes);
        let inv = (DMatrix::identity(n, n) - dg).try_inverse().ok_or(ApproxError::Singular)?;
        Ok(NewtonOperator::from_f64(&self.sp, self.n_trunc, &(DMatrix::identity(n, n) - inv)))
    }

    /// Top `count` eigenpairs of the truncated `DG(u)` on a parity
    /// subspace, by subspace iteration in the `H¹_0` pairing.
    pub fn find_eigen(&self, u: &DenseState, parity: Parity, count: usize) -> Result<Vec<EigenPair>, ApproxError> {
        let active = self.active(parity, None);
        let n = active.len();
        let k = (count + 6).min(n);
        if count == 0 || n == 0 {
            return Ok(Vec::new());
        }
        let a = self.dg_matrix(&u.coeffs, parity, &active);
        let dense = |col: &[f64]| -> Vec<f64> {
            let mut v = vec![0.0; self.sp.n_modes()];
            for (x, &i) in col.iter().zip(&active) {
                v[i] = *x;
            }
            v
        };
        let h1 = |x: &[f64], y: &[f64]| -> f64 {
            let g = self.sp.neg_lap_f64(&dense(x));
            let yd = dense(y);
            self.l2_dot(&g, &yd)
        };
        // Deterministic start block.
        let mut x = DMatrix::from_fn(n, k, |i, j| libm::sin((i * (j + 3) + 7 * j + 1) as f64));
        let mut values = vec![0.0; k];
        let mut prev = vec![f64::INFINITY; k];
        for it in 0..500 {
            let y = &a * &x;
            // H¹ Gram-Schmidt on the columns of y.
            let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
            for c in 0..k {
                let mut v: Vec<f64> = y.column(c).iter().copied().collect();
                for _ in 0..2 {
                    for b in &q {
                        let p = h1(b, &v);
                        v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= p * bi);
                    }
                }
                let nrm = libm::sqrt(h1(&v, &v).max(0.0));
                if nrm > 0.0 {
                    v.iter_mut().for_each(|x| *x /= nrm);
                }
                q.push(v);
            }
            let qm = DMatrix::from_fn(n, k, |i, j| q[j][i]);
            let aq = &a * &qm;
            let mut h = DMatrix::zeros(k, k);
            for i in 0..k {
                let ai: Vec<f64> = aq.column(i).iter().copied().collect();
                for j in 0..k {
                    h[(j, i)] = h1(&q[j], &ai);
                }
            }
            let hs = (&h + h.transpose()) * 0.5;
            let eig = SymmetricEigen::new(hs);
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
            let rot = DMatrix::from_fn(k, k, |i, j| eig.eigenvectors[(i, order[j])]);
            x = &qm * rot;
            for (j, &o) in order.iter().enumerate() {
                values[j] = eig.eigenvalues[o];
            }
            let delta = (0..count).map(|j| (values[j] - prev[j]).abs()).fold(0.0, f64::max);
            prev.clone_from(&values);
            if it > 5 && delta < 1e-13 {
                break;
            }
        }
        let mut out = Vec::with_capacity(count);
        for j in 0..count {
            let v = dense(&x.column(j).iter().copied().collect::<Vec<_>>());
            let g = self.sp.neg_lap_f64(&v);
            let v = self.sp.inv_neg_lap_f64(&g);
            out.push(EigenPair {
                value: values[j],
                vector: DenseState { parity, coeffs: v },
                preimage: DenseState { parity, coeffs: g },
            });
        }
        Ok(out)
    }
}
