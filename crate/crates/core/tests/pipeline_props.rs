use std::sync::{Arc, OnceLock};

use diskcert_core::approx::{Galerkin, SeedSpec};
use diskcert_core::ball::{Ball, Radius};
use diskcert_core::gmap::{dg_apply, dg_f64, g_apply, g_f64, potential_f64, Weight};
use diskcert_core::prove::{check_i_minus_m_invertible, contr_fix, contr_fix_with_bounds, contr_fix_with_epsilon, d_of_k, epsilon_bound, NewtonOperator};
use diskcert_core::regge::CgTable;
use diskcert_core::spectral::{l2_pairing, rayleigh_quotient};
use diskcert_core::zernike::{Parity, ProductPlan, Rho, Space, Zernike};
use nalgebra::DMatrix;
use proptest::prelude::*;

struct Case {
    sp: Arc<Space>,
    plan: ProductPlan,
    w: Weight,
}

fn case(size: usize) -> Case {
    let sp = Space::new(size, Rho::new(65, 64).unwrap());
    let plan = ProductPlan::for_space(&CgTable::build(size as u32).unwrap(), &sp).unwrap();
    let w = Weight::radial_power(2, &sp).unwrap();
    Case { sp, plan, w }
}

fn small() -> &'static Case {
    static C: OnceLock<Case> = OnceLock::new();
    C.get_or_init(|| case(12))
}

/// The certified ground state at Size 40 with its float data.
struct Solved {
    c: Case,
    ubar: Vec<f64>,
    u_star: Zernike,
}

fn solved() -> &'static Solved {
    static S: OnceLock<Solved> = OnceLock::new();
    S.get_or_init(|| {
        let c = case(40);
        let gal = Galerkin::new(&c.w, &c.plan, 41);
        let fix = gal.find_fix(&SeedSpec::offcenter(10.0, 0.5, 0.4), 1e-13).unwrap();
        let m = gal.build_newton_operator(&fix.state).unwrap();
        let z = fix.state.to_zernike(&c.sp);
        let cert = contr_fix(&c.w, &z, &m, &c.plan).expect("Size 40 ground state certifies");
        Solved { u_star: cert.solution(&z), ubar: fix.state.coeffs, c }
    })
}

fn norm(sp: &Space, v: &[f64]) -> f64 {
    v.iter().enumerate().map(|(k, c)| {
        let (m, j) = sp.mode_of(k);
        c.abs() * sp.pow(m + 2 * j).center()
    }).sum()
}

fn random_even(sp: &Arc<Space>, seed: &[i32], parity: Parity) -> Zernike {
    let mut z = Zernike::zero(sp, parity);
    for (i, &s) in seed.iter().enumerate() {
        let k = (i * 7 + s.unsigned_abs() as usize) % sp.n_modes();
        let (m, j) = sp.mode_of(k);
        if m >= parity.min_m() {
            z.set_coeff(m, j, Ball::new(s as f64 / 32.0, 1e-12).unwrap());
        }
    }
    z
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dg_preserves_parity(a in proptest::collection::vec(-64i32..64, 1..8), b in proptest::collection::vec(-64i32..64, 1..8), odd in any::<bool>()) {
        let c = small();
        let u = random_even(&c.sp, &a, Parity::Even);
        let ph = if odd { Parity::Odd } else { Parity::Even };
        let h = random_even(&c.sp, &b, ph);
        prop_assert_eq!(dg_apply(&c.w, &u, &h, &c.plan).unwrap().parity(), ph);
    }

    #[test]
    fn radial_data_stays_radial(a in proptest::collection::vec(-64i32..64, 1..6)) {
        let c = small();
        let mut u = Zernike::zero(&c.sp, Parity::Even);
        for (j, &s) in a.iter().enumerate() {
            u.set_coeff(0, j % c.sp.n_coeffs(0), Ball::exact(s as f64 / 64.0));
        }
        let g = g_apply(&c.w, &u, &c.plan).unwrap();
        for (m, _, x) in g.nonzero_coeffs() {
            prop_assert!(m == 0, "coefficient at m = {m}: {x}");
        }
        for m in 1..=c.sp.size() {
            for j in 0..=c.sp.n_coeffs(m) {
                prop_assert_eq!(g.tail(m, j).value(), 0.0);
            }
            prop_assert_eq!(g.band(m).value(), 0.0);
        }
    }

    #[test]
    fn contr_fix_is_monotone(e in -30.0f64..0.0, k in 0.0f64..0.9, fe in 1.0f64..1e3, fk in 1.0f64..2.0) {
        let c = small();
        let m = NewtonOperator::zero(&c.sp, 13);
        let eps = Radius::new(10f64.powf(e));
        let cap = d_of_k(eps, 0.75);
        let base = contr_fix_with_bounds(&m, eps, Radius::new(k), cap);
        let eps2 = Radius::new(eps.value() * fe);
        let worse = contr_fix_with_bounds(&m, eps2, Radius::new(k * fk), d_of_k(eps2, 0.75));
        prop_assert!(base.is_ok() || worse.is_err());
        prop_assert!(base.is_ok() || contr_fix_with_bounds(&m, eps, Radius::new(k * fk), cap).is_err());
    }
}

#[test]
fn inflated_epsilon_never_helps() {
    let c = small();
    let gal = Galerkin::new(&c.w, &c.plan, 13);
    let fix = gal.find_fix(&SeedSpec::offcenter(10.0, 0.5, 0.4), 1e-13).unwrap();
    let m = gal.build_newton_operator(&fix.state).unwrap();
    let z = fix.state.to_zernike(&c.sp);
    let eps = epsilon_bound(&c.w, &z, &m, &c.plan).unwrap();
    let mut failed = false;
    for f in [1.0, 10.0, 1e2, 1e4, 1e8, 1e12] {
        let ok = contr_fix_with_epsilon(&c.w, &z, &m, &c.plan, Radius::new(eps.value() * f)).is_ok();
        assert!(!(failed && ok), "inflating epsilon by {f} turned a failure into a success");
        failed |= !ok;
    }
    assert!(failed, "a huge epsilon must fail");
}

#[test]
fn d_is_increasing_and_dominates() {
    let eps = Radius::new(3.7e-9);
    let mut prev = 0.0;
    for i in 0..100 {
        let k = 0.75 * i as f64 / 99.0;
        let d = d_of_k(eps, k).value();
        assert!(d > prev);
        let plain = Ball::exact(eps.value()).div(Ball::ONE - Ball::exact(k)).unwrap();
        assert!(d > plain.hi(), "d({k}) = {d} vs {}", plain.hi());
        prev = d;
    }
}

#[test]
fn near_unit_eigenvalue_blocks_invertibility() {
    let c = small();
    let n = NewtonOperator::modes_for(&c.sp, 13).len();
    for (trial, gap) in [0.0, 1e-13, -1e-13, 5e-13, -1e-12, 1e-12].into_iter().enumerate() {
        let x = DMatrix::from_fn(n, n, |i, j| ((i * 31 + j * 17 + trial * 5) as f64 * 0.37).sin());
        let q = x.qr().q();
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            d[(i, i)] = if i == 0 { 1.0 + gap } else { 0.3 * (i as f64 / n as f64) - 0.5 };
        }
        let m = &q * d * q.transpose();
        let op = NewtonOperator::from_f64(&c.sp, 13, &m);
        assert!(!check_i_minus_m_invertible(&op), "gap {gap:e} certified as invertible");
    }
    let op = NewtonOperator::from_f64(&c.sp, 13, &DMatrix::from_diagonal_element(n, n, 0.5));
    assert!(check_i_minus_m_invertible(&op));
}

#[test]
fn eigenrelations_hold_at_the_fixed_point() {
    let s = solved();
    let (sp, plan) = (&s.c.sp, &s.c.plan);
    let w = s.c.w.zernike().centers();
    let q = potential_f64(plan, &w, &s.ubar);
    let du = dg_f64(plan, sp, &q, Parity::Even, &s.ubar);
    let res: Vec<f64> = du.iter().zip(&s.ubar).map(|(a, b)| a - 3.0 * b).collect();
    let rel = norm(sp, &res) / norm(sp, &s.ubar);
    assert!(rel < 1e-6, "DG(u)u - 3u relative residual {rel:e}");

    // ∂_θ of Σ c R cos(mθ) is Σ -m c R sin(mθ).
    let mut dt = vec![0.0; sp.n_modes()];
    for (k, c) in s.ubar.iter().enumerate() {
        let (m, _) = sp.mode_of(k);
        dt[k] = -(m as f64) * c;
    }
    let img = dg_f64(plan, sp, &q, Parity::Odd, &dt);
    let res: Vec<f64> = img.iter().zip(&dt).map(|(a, b)| a - b).collect();
    let rel = norm(sp, &res) / norm(sp, &dt);
    assert!(rel < 1e-6, "DG(u)∂u - ∂u relative residual {rel:e}");
}

#[test]
fn rayleigh_quotient_encloses_three() {
    let s = solved();
    let q = rayleigh_quotient(&s.c.w, &s.u_star, &s.c.plan).unwrap();
    assert!(q.contains(3.0), "{q}");
    assert!(q.radius() < 5e-2, "{q}");
}

#[test]
fn epsilon_tracks_the_untruncated_residual() {
    // Size 12 data evaluated in a space that holds G(ū) without truncation.
    let c = small();
    let big = case(3 * 12 + 4);
    let gal = Galerkin::new(&c.w, &c.plan, 13);
    let fix = gal.find_fix(&SeedSpec::offcenter(10.0, 0.5, 0.4), 1e-13).unwrap();
    let m = gal.build_newton_operator(&fix.state).unwrap();
    let eps = epsilon_bound(&c.w, &fix.state.to_zernike(&c.sp), &m, &c.plan).unwrap().value();
    let mut u = vec![0.0; big.sp.n_modes()];
    for (k, x) in fix.state.coeffs.iter().enumerate() {
        let (mm, j) = c.sp.mode_of(k);
        u[big.sp.mode_index(mm, j)] = *x;
    }
    let g = g_f64(&big.plan, &big.sp, &big.w.zernike().centers(), &u);
    let d: Vec<f64> = g.iter().zip(&u).map(|(a, b)| a - b).collect();
    let r = norm(&big.sp, &d);
    assert!(eps >= r * (1.0 - 1e-9), "epsilon {eps:e} below the residual {r:e}");
    assert!(eps <= 100.0 * r, "epsilon {eps:e} far above the residual {r:e}");
}

#[test]
fn residual_by_finite_differences() {
    let s = solved();
    let u = s.u_star.midpoint();
    let wz = s.c.w.zernike();
    let eval = |z: &Zernike, x: f64, y: f64| -> f64 {
        let r = x.hypot(y);
        z.eval_point(Ball::exact(r), Ball::exact(y.atan2(x))).unwrap().center()
    };
    let h = 1e-3;
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for i in 0..50 {
        for j in 0..50 {
            let x = -0.9 + 1.8 * i as f64 / 49.0;
            let y = -0.9 + 1.8 * j as f64 / 49.0;
            if x.hypot(y) > 0.9 {
                continue;
            }
            let c = eval(&u, x, y);
            let lap = (eval(&u, x + h, y) + eval(&u, x - h, y) + eval(&u, x, y + h) + eval(&u, x, y - h) - 4.0 * c) / (h * h);
            let rhs = eval(wz, x, y) * c * c * c;
            worst = worst.max((-lap - rhs).abs());
            scale = scale.max(rhs.abs());
        }
    }
    assert!(worst / scale < 1e-4, "finite-difference residual {:e}", worst / scale);
}

#[test]
fn symmetrized_seeds_stay_in_their_subspace() {
    let c = small();
    let gal = Galerkin::new(&c.w, &c.plan, 13);
    for n in 1..=3 {
        let fix = gal.find_fix(&SeedSpec::symmetrized(n, 10.0, 0.5, 0.4), 1e-13).unwrap();
        let top = fix.state.coeffs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        assert!(top > 0.0);
        for (k, x) in fix.state.coeffs.iter().enumerate() {
            let (m, _) = c.sp.mode_of(k);
            if m % n != 0 || (m / n) % 2 == 0 {
                assert!(x.abs() <= 1e-15 * top, "n = {n}: mode m = {m} carries {x:e}");
            }
        }
    }
}

#[test]
fn float_eigenvalues_match_rayleigh_pairings() {
    let s = solved();
    let (sp, plan) = (&s.c.sp, &s.c.plan);
    let gal = Galerkin::new(&s.c.w, plan, 41);
    let state = diskcert_core::approx::DenseState { parity: Parity::Even, coeffs: s.ubar.clone() };
    let ubar = state.to_zernike(sp);
    let q = diskcert_core::gmap::potential(&s.c.w, &ubar.multiply(&ubar, plan).unwrap(), plan).unwrap();
    for parity in [Parity::Even, Parity::Odd] {
        for pair in gal.find_eigen(&state, parity, 2).unwrap() {
            let v = pair.vector.to_zernike(sp);
            let g = pair.preimage.to_zernike(sp);
            // ⟨DG v, v⟩_{H¹} = ⟨q v, v⟩_{L²} and ⟨v, v⟩_{H¹} = ⟨g, v⟩_{L²}.
            let num = l2_pairing(&q.multiply(&v, plan).unwrap(), &v);
            let den = l2_pairing(&g, &v);
            let rq = num.div(den).unwrap().center();
            assert!((rq - pair.value).abs() <= 1e-8 * pair.value.abs().max(1.0), "{parity:?}: {rq} vs {}", pair.value);
        }
    }
}

#[test]
fn preimage_pairings_are_symmetric() {
    // ⟨(-Δ)⁻¹a, b⟩ = ⟨a, (-Δ)⁻¹b⟩, which makes the H¹ pairing through
    // preimages, and with it the rank-n correction, self-adjoint.
    let c = small();
    for seed in 0..20i32 {
        let a = random_even(&c.sp, &[seed, 3 * seed - 7, 11, -seed], Parity::Even);
        let b = random_even(&c.sp, &[5 - seed, 2 * seed + 1, -13], Parity::Even);
        let wv = c.w.zernike().multiply(&a, &c.plan).unwrap();
        let x = l2_pairing(&wv.inv_neg_lap(), &b);
        let y = l2_pairing(&wv, &b.inv_neg_lap());
        assert!(x.lo() <= y.hi() && y.lo() <= x.hi(), "{x} vs {y}");
    }
}
