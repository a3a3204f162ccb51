use std::sync::{Arc, OnceLock};

use diskcert_core::ball::Ball;
use diskcert_core::regge::CgTable;
use diskcert_core::spectral::{build_partition, enclose_operator, op_norm, spectral_radius_bound, spectral_radius_of, Group};
use diskcert_core::zernike::{Parity, ProductPlan, Rho, Space, Zernike};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

const SIZE: usize = 10;

fn setup() -> &'static (Arc<Space>, ProductPlan) {
    static S: OnceLock<(Arc<Space>, ProductPlan)> = OnceLock::new();
    S.get_or_init(|| {
        let sp = Space::new(SIZE, Rho::new(33, 32).unwrap());
        let plan = ProductPlan::for_space(&CgTable::build(SIZE as u32).unwrap(), &sp).unwrap();
        (sp, plan)
    })
}

fn symmetric_nonnegative(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    proptest::collection::vec(0u32..1000, n * n).prop_map(move |v| {
        let a = DMatrix::from_fn(n, n, |i, j| v[i * n + j] as f64 / 1000.0);
        (&a + a.transpose()) * 0.5
    })
}

fn dominant(a: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(a.clone()).eigenvalues.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn six_squarings_reach_five_percent(a in symmetric_nonnegative(20)) {
        let lam = dominant(&a);
        prop_assume!(lam > 1e-6);
        let b = spectral_radius_of(&a, &DMatrix::zeros(20, 20), 6).unwrap().value();
        prop_assert!(b >= lam * (1.0 - 1e-12), "{b} below {lam}");
        prop_assert!(b <= 1.05 * lam, "{b} vs {lam}");
    }

    #[test]
    fn squaring_bounds_are_monotone(a in symmetric_nonnegative(12)) {
        let z = DMatrix::zeros(12, 12);
        let bounds: Vec<f64> = (0..=6).map(|k| spectral_radius_of(&a, &z, k).unwrap().value()).collect();
        for w in bounds.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12), "{bounds:?}");
        }
    }

    #[test]
    fn radii_only_increase_the_bound(a in symmetric_nonnegative(10), e in 1u32..30) {
        let z = DMatrix::zeros(10, 10);
        let r = DMatrix::from_element(10, 10, 2f64.powi(-(e as i32)));
        let sharp = spectral_radius_of(&a, &z, 5).unwrap().value();
        let wide = spectral_radius_of(&a, &r, 5).unwrap().value();
        prop_assert!(wide >= sharp);
        let shifted = &a + &r;
        prop_assert!(wide >= dominant(&shifted) * (1.0 - 1e-12));
    }
}

/// `v ↦ (-Δ)^{-1}(f v)` for a fixed even polynomial `f`.
fn apply_with(f: &Zernike) -> impl FnMut(&Zernike) -> Result<Zernike, diskcert_core::zernike::ZernikeError> + '_ {
    let (_, plan) = setup();
    move |v| Ok(f.multiply(v, plan)?.inv_neg_lap())
}

fn weight() -> impl Strategy<Value = Zernike> {
    proptest::collection::vec((0usize..=4, 0usize..=2, -64i64..=64), 1..6).prop_map(|cs| {
        let (sp, _) = setup();
        let mut f = Zernike::zero(sp, Parity::Even);
        for (m, j, c) in cs {
            f.set_coeff(m, j, Ball::exact(c as f64 / 16.0));
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn images_respect_column_bounds(f in weight(), par in prop_oneof![Just(Parity::Even), Just(Parity::Odd)], coeffs in proptest::collection::vec(-100i64..=100, 40)) {
        let (sp, _) = setup();
        let part = build_partition(sp, 6, par).unwrap();
        let l = enclose_operator(apply_with(&f), &part).unwrap();
        let norm = op_norm(&l).value();
        // Unit vectors of single-mode groups.
        let mut apply = apply_with(&f);
        for (g, grp) in part.groups().iter().enumerate() {
            if let Group::Coefficient { m, j } = *grp {
                let n = m + 2 * j;
                let e = Zernike::mode(sp, par, m, j, Ball::exact(1.0 / sp.pow_lo(n)));
                let img = apply(&e).unwrap().midpoint().norm_upper().value();
                let col: f64 = (0..part.len()).map(|i| l.entry(i, g).upper_abs().value()).sum::<f64>() + l.loose[g];
                prop_assert!(img <= col * (1.0 + 1e-9) + 1e-15, "group {g}: {img} > {col}");
            }
        }
        // Random combinations of single modes.
        let mut h = Zernike::zero(sp, par);
        for ((m, j), c) in sp.modes_below(par, 6).into_iter().zip(&coeffs) {
            h.set_coeff(m, j, Ball::exact(*c as f64 / 8.0));
        }
        let hn = h.norm_upper().value();
        prop_assume!(hn > 0.0);
        let img = apply(&h).unwrap().midpoint().norm_upper().value();
        prop_assert!(img <= norm * hn * (1.0 + 1e-9), "{img} > {norm} * {hn}");
        let nu = spectral_radius_bound(&l, 4).unwrap().value();
        prop_assert!(nu <= norm * (1.0 + 1e-12));
    }
}
