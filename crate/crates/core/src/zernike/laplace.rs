use crate::ball::{add_up, div_up, mul_up, Ball, Radius};

use super::{Parity, Space, Zernike};

/// Exact-rational coefficients of `(-Δ)^{-1} V^m_n` on degrees
/// `n+2`, `n`, `n-2`. For `n = m` the last one is unused.
pub(super) fn coefficients(m: usize, n: usize) -> (Ball, Ball, Ball) {
    let n = n as i64;
    let c2 = Ball::from_ratio_i64(1, (4 * (n + 2) * (n + 1)) as u64);
    if n == m as i64 {
        return (c2, -c2, Ball::ZERO);
    }
    let c1 = Ball::from_ratio_i64(-1, (2 * n * (n + 2)) as u64);
    let c0 = Ball::from_ratio_i64(1, (4 * n * (n + 1)) as u64);
    (c2, c1, c0)
}

fn coefficients_f64(m: usize, n: usize) -> (f64, f64, f64) {
    let x = n as f64;
    let c2 = 1.0 / (4.0 * (x + 2.0) * (x + 1.0));
    if n == m {
        (c2, -c2, 0.0)
    } else {
        (c2, -1.0 / (2.0 * x * (x + 2.0)), 1.0 / (4.0 * x * (x + 1.0)))
    }
}

/// Upper bound on `‖(-Δ)^{-1} f‖_ρ / ‖f‖_ρ` for `f` built from modes of
/// degree `>= n_low`; `with_constant` adds the mode `V^0_0`.
fn tail_factor(sp: &Space, n_low: usize, with_constant: bool) -> f64 {
    let (r_up, r_lo) = (sp.pow_up(1), sp.pow_lo(1));
    let rr = add_up(r_up, div_up(1.0, r_lo));
    let mut f = 0.0f64;
    if with_constant {
        f = div_up(add_up(1.0, sp.pow_up(2)), 8.0);
    }
    let n = n_low.max(1) as f64;
    let den = (4.0 * n * (n + 2.0)).next_down();
    f.max(div_up(mul_up(rr, rr), den))
}

pub(super) fn inv_neg_lap(u: &Zernike) -> Zernike {
    let sp = u.space().clone();
    let mut out = Zernike::zero(&sp, u.parity());
    for (m, j, c) in u.nonzero_coeffs() {
        let n = m + 2 * j;
        let (c2, c1, c0) = sp.lap_coefficients(sp.mode_index(m, j));
        let top = -(c * c2);
        if j + 1 < sp.n_coeffs(m) {
            out.radials[m].coeffs[j + 1] += top;
        } else {
            let w = Radius::new(mul_up(top.upper_abs().value(), sp.pow_up(n + 2)));
            out.add_tail(m, j + 1, w);
        }
        out.radials[m].coeffs[j] -= c * c1;
        if j > 0 {
            out.radials[m].coeffs[j - 1] -= c * c0;
        }
    }
    for m in 0..=sp.size() {
        for (j, t) in u.radials()[m].tails.iter().enumerate() {
            if t.value() == 0.0 {
                continue;
            }
            let n_low = m + 2 * j;
            let f = tail_factor(&sp, n_low, n_low == 0);
            out.add_tail(m, j.saturating_sub(1), Radius::new(mul_up(t.value(), f)));
        }
    }
    for (b, e) in u.band_errors().iter().enumerate() {
        if e.value() == 0.0 {
            continue;
        }
        let f = if b == 0 && u.parity() == Parity::Even {
            tail_factor(&sp, 1, true)
        } else {
            tail_factor(&sp, b, false)
        };
        out.add_band(b, Radius::new(mul_up(e.value(), f)));
    }
    out
}

/// Non-rigorous `(-Δ)^{-1}` on a dense coefficient vector; parts beyond
/// the stored degree are dropped.
pub(super) fn inv_neg_lap_f64(sp: &Space, v: &[f64]) -> alloc::vec::Vec<f64> {
    let mut out = alloc::vec![0.0; v.len()];
    for m in 0..=sp.size() {
        let nc = sp.n_coeffs(m);
        let base = sp.mode_index_base(m);
        for j in 0..nc {
            let c = v[base + j];
            if c == 0.0 {
                continue;
            }
            let n = m + 2 * j;
            let (c2, c1, c0) = coefficients_f64(m, n);
            if j + 1 < nc {
                out[base + j + 1] -= c * c2;
            }
            out[base + j] -= c * c1;
            if j > 0 {
                out[base + j - 1] -= c * c0;
            }
        }
    }
    out
}

/// Non-rigorous `-Δ` on a dense coefficient vector whose members vanish on
/// the boundary: the `g` with `inv_neg_lap_f64(g) = v` obtained by back
/// substitution from the top degree. Components of `v` not of that form
/// are discarded.
pub(super) fn neg_lap_f64(sp: &Space, v: &[f64]) -> alloc::vec::Vec<f64> {
    let mut g = alloc::vec![0.0; v.len()];
    for m in 0..=sp.size() {
        let nc = sp.n_coeffs(m);
        let base = sp.mode_index_base(m);
        if nc < 2 {
            continue;
        }
        // v_{j+1} = -c2(j) g_j - c1(j+1) g_{j+1} - c0(j+2) g_{j+2}
        for j in (0..nc - 1).rev() {
            let mut rhs = v[base + j + 1];
            if j + 1 < nc - 1 {
                let (_, c1, _) = coefficients_f64(m, m + 2 * (j + 1));
                rhs += c1 * g[base + j + 1];
            }
            if j + 2 < nc - 1 {
                let (_, _, c0) = coefficients_f64(m, m + 2 * (j + 2));
                rhs += c0 * g[base + j + 2];
            }
            let (c2, _, _) = coefficients_f64(m, m + 2 * j);
            g[base + j] = -rhs / c2;
        }
    }
    g
}
