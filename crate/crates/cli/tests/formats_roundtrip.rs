use std::path::Path;
use std::sync::{Arc, OnceLock};

use diskcert::config::{format_seed, parse_seed, RunConfig, WeightSpec};
use diskcert::formats::{read_cg_cache, read_eigen_manifest, read_newton, read_zernike, write_cg_cache, write_eigen_manifest, write_newton, write_zernike};
use diskcert_core::ball::{Ball, Radius};
use diskcert_core::prove::NewtonOperator;
use diskcert_core::regge::CgTable;
use diskcert_core::zernike::{Parity, Rho, Space, Zernike};
use nalgebra::DMatrix;
use proptest::prelude::*;

const SIZE: usize = 8;

fn space() -> &'static Arc<Space> {
    static S: OnceLock<Arc<Space>> = OnceLock::new();
    S.get_or_init(|| Space::new(SIZE, Rho::new(65, 64).unwrap()))
}

fn any_ball() -> impl Strategy<Value = Ball> {
    (any::<f64>().prop_filter("finite", |x| x.is_finite()), prop_oneof![Just(0.0), 0.0..1e-3f64, Just(f64::MIN_POSITIVE)])
        .prop_map(|(c, r)| Ball::new(c, r).unwrap())
}

fn parity() -> impl Strategy<Value = Parity> {
    prop_oneof![Just(Parity::Even), Just(Parity::Odd)]
}

fn zernike() -> impl Strategy<Value = Zernike> {
    (
        parity(),
        proptest::collection::vec((0usize..=SIZE, 0usize..=SIZE / 2, any_ball()), 0..20),
        proptest::collection::vec((0usize..=SIZE, 0usize..=SIZE, 1e-20..1.0f64), 0..4),
        proptest::collection::vec((0usize..2 * SIZE, 1e-20..1.0f64), 0..3),
    )
        .prop_map(|(par, cs, tails, bands)| {
            let sp = space();
            let mut z = Zernike::zero(sp, par);
            for (m, j, b) in cs {
                let m = m.max(par.min_m());
                if j < sp.n_coeffs(m) {
                    z.set_coeff(m, j, b);
                }
            }
            for (m, j, r) in tails {
                let m = m.max(par.min_m());
                z.add_tail(m, j.min(z.radials()[m].tails.len() - 1), Radius::new(r));
            }
            for (b, r) in bands {
                let b = b.min(z.band_errors().len() - 1);
                z.add_band(b, Radius::new(r));
            }
            z
        })
}

fn same(a: &Zernike, b: &Zernike) -> bool {
    a.parity() == b.parity()
        && a.radials().iter().zip(b.radials()).all(|(x, y)| x.m == y.m && x.coeffs == y.coeffs && x.tails == y.tails)
        && a.band_errors() == b.band_errors()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn zernike_files_round_trip(z in zernike()) {
        let text = write_zernike(&z);
        let back = read_zernike(&text, Some(space())).unwrap();
        prop_assert!(same(&z, &back));
        let free = read_zernike(&text, None).unwrap();
        prop_assert!(same(&z, &free));
    }

    #[test]
    fn truncated_zernike_files_never_panic(z in zernike(), cut in 0usize..400) {
        let text = write_zernike(&z);
        let cut = cut.min(text.len());
        if let Ok(back) = read_zernike(&text[..cut], Some(space())) {
            prop_assert_eq!(back.parity(), z.parity());
        }
    }

    #[test]
    fn newton_files_round_trip(entries in proptest::collection::vec(any_ball(), 25)) {
        let sp = space();
        let n_trunc = 9;
        let dim = NewtonOperator::modes_for(sp, n_trunc).len();
        let mat = DMatrix::from_fn(dim, dim, |i, j| if (i + j) % 3 == 0 { entries[(i * dim + j) % entries.len()] } else { Ball::ZERO });
        let m = NewtonOperator::from_balls(sp, n_trunc, mat.clone()).unwrap();
        let back = read_newton(&write_newton(&m), sp).unwrap();
        prop_assert_eq!(back.n_trunc(), n_trunc);
        prop_assert_eq!(back.matrix, mat);
    }

    #[test]
    fn eigen_manifests_round_trip(par in parity(), vals in proptest::collection::vec(any_ball(), 0..6)) {
        let files: Vec<String> = (0..vals.len()).map(|k| format!("g_{k}.zer")).collect();
        let (p, pairs) = read_eigen_manifest(&write_eigen_manifest(par, &vals, &files)).unwrap();
        prop_assert_eq!(p, par);
        prop_assert_eq!(pairs, vals.into_iter().zip(files).collect::<Vec<_>>());
    }

    #[test]
    fn configurations_round_trip(
        size in 1usize..=160,
        p in 2u64..1000,
        theta in 0.01..1.0f64,
        a in 1.0..10.0f64,
        squarings in 0u32..=20,
        alpha in 0usize..8,
        seed in prop_oneof![Just("radial"), Just("offcenter"), Just("sym1"), Just("sym3")],
        amp in 0.5..20.0f64,
        symmetry in 0usize..4,
        counts in (0usize..4, 0usize..4),
        with_paths in any::<bool>(),
    ) {
        let base = Path::new("/base/dir");
        let mut cfg = RunConfig::default();
        cfg.size = size;
        cfg.rho = Rho::new(p, p - 1).unwrap();
        cfg.n_trunc = size + 1;
        cfg.n_part = size;
        cfg.theta = theta;
        cfg.a = a;
        cfg.squarings = squarings;
        cfg.weight = WeightSpec::RadialPower(alpha);
        cfg.seed = parse_seed(&format!("{seed}:amp={amp}")).unwrap();
        cfg.symmetry = (symmetry > 0).then_some(symmetry);
        (cfg.eigen_even_count, cfg.eigen_odd_count) = counts;
        if with_paths {
            cfg.ubar = Some(base.join("ubar.zer"));
            cfg.newton = Some(base.join("sub/newton.txt"));
            cfg.cg_cache = Some("/elsewhere/cg.bin".into());
        }
        let text = cfg.to_text(base);
        let mut back = RunConfig::default();
        back.parse_into(&text, base).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert!(back.validate().is_ok());
        prop_assert_eq!(parse_seed(&format_seed(&cfg.seed)).unwrap(), cfg.seed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn table_caches_round_trip(max_n in 0u32..=10, cut in any::<proptest::sample::Index>()) {
        let t = CgTable::build(max_n).unwrap();
        let bytes = write_cg_cache(&t);
        let back = read_cg_cache(&bytes).unwrap();
        prop_assert_eq!(back.max_n(), t.max_n());
        prop_assert_eq!(back.keys(), t.keys());
        prop_assert_eq!(back.values(), t.values());
        // Any strict prefix is rejected.
        let cut = cut.index(bytes.len());
        prop_assert!(read_cg_cache(&bytes[..cut]).is_err());
    }
}

#[test]
fn malformed_records_are_rejected() {
    let sp = space();
    for bad in [
        "",
        "zernike v2 parity=even rho=65/64 size=8\n",
        "zernike v1 parity=even rho=65/64 size=9\n",
        "zernike v1 parity=sideways rho=65/64 size=8\n",
        "zernike v1 parity=odd rho=65/64 size=8\nc 0 0 0x1p0 0x0p0\n",
        "zernike v1 parity=even rho=65/64 size=8\nc 3 4 0x1p0 0x0p0\n",
        "zernike v1 parity=even rho=65/64 size=8\nc 0 0 nonsense 0x0p0\n",
        "zernike v1 parity=even rho=65/64 size=8\nq 0 0\n",
    ] {
        assert!(read_zernike(bad, Some(sp)).is_err(), "accepted {bad:?}");
    }
    assert!(read_eigen_manifest("eigen v1 parity=even count=2\nv 0 0x1p0 0x0p0 g.zer\n").is_err());
    assert!(read_newton("newton v1 rho=65/64 size=8 n_trunc=9 dim=25\nx 30 0 0x1p0 0x0p0\n", sp).is_err());
}
