//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria 6 to 11 drive the `diskcert` subcommands at Size 70 and take
//! roughly a quarter of an hour on one core. Pass criterion numbers as
//! arguments (`cargo test --test acceptance -- 1 4 12`) to run a subset.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use diskcert::certificate::Record;
use diskcert::commands::{self, EXIT_OK};
use diskcert::config::{parse_seed, RunConfig};
use diskcert::formats;
use diskcert_core::ball::{Ball, Radius};
use diskcert_core::regge::{index, value_squared, CanonicalRegge, CgTable, ExactSquare, ReggeIndexer, ReggeMatrix};
use diskcert_core::spectral::rayleigh_quotient;
use diskcert_core::zernike::radial::radial_values;
use diskcert_core::zernike::{Parity, ProductPlan, Rho, Space, Zernike};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn square_ratio(v: &ExactSquare) -> BigRational {
    BigRational::new(BigInt::from(v.num.clone()), BigInt::from(v.den.clone()))
}

fn fact(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, b| a * b)
}

/// Coefficients of `R^m_n` in powers of `r`, from the explicit factorial sum.
fn radial_poly(m: usize, n: usize) -> Vec<BigRational> {
    let mut p = vec![BigRational::zero(); n + 1];
    let (m, n) = (m as i64, n as i64);
    for s in 0..=(n - m) / 2 {
        let num = fact(n - s);
        let den = fact(s) * fact((n + m) / 2 - s) * fact((n - m) / 2 - s);
        let c = BigRational::new(num, den);
        p[(n - 2 * s) as usize] = if s % 2 == 0 { c } else { -c };
    }
    p
}

fn poly_eval(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn criterion_1() -> Outcome {
    let table = CgTable::build(60).map_err(|e| e.to_string())?;
    let one = BigRational::one();
    let mut sums = 0u64;
    for n1 in 0..=30i64 {
        for n2 in 0..=30i64 {
            for m1 in (-n1..=n1).step_by(2) {
                for m2 in (-n2..=n2).step_by(2) {
                    let mut acc = BigRational::zero();
                    for n3 in ((n1 - n2).abs()..=n1 + n2).step_by(2) {
                        let v = table.cg_squared(n1, m1, n2, m2, n3).map_err(|e| e.to_string())?;
                        acc += square_ratio(&v);
                    }
                    if acc != one {
                        return Err(format!("sum for ({n1}, {m1}, {n2}, {m2}) is {acc}"));
                    }
                    sums += 1;
                }
            }
        }
    }
    Ok(format!("{sums} unitarity sums equal 1 exactly"))
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];

fn perm_odd(p: [usize; 3]) -> bool {
    PERMS.iter().position(|q| *q == p).unwrap() >= 3
}

fn criterion_2() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    for _ in 0..10_000 {
        // Nonnegative combinations of permutation matrices have equal line sums.
        let mut a = [[0i64; 3]; 3];
        for p in PERMS {
            let w = rng.gen_range(0..=8);
            for (i, &j) in p.iter().enumerate() {
                a[i][j] += w;
            }
        }
        let r = ReggeMatrix(a);
        let j = r.magic_sum().ok_or("generated matrix is not magic")?;
        let v = value_squared(&r);
        let base = (v.sign, square_ratio(&v));
        for tr in [false, true] {
            let rt = if tr { r.transpose() } else { r };
            for rp in PERMS {
                for cp in PERMS {
                    let w = value_squared(&rt.permuted(rp, cp));
                    let flip = (perm_odd(rp) != perm_odd(cp)) && j % 2 == 1;
                    let want_sign = if flip { -base.0 } else { base.0 };
                    let got = square_ratio(&w);
                    if got != base.1 || (!got.is_zero() && w.sign != want_sign) {
                        return Err(format!("{a:?} under rows {rp:?} cols {cp:?} transpose {tr}"));
                    }
                }
            }
        }
    }
    Ok("10000 random symbols invariant under 72 operations".into())
}

fn criterion_3() -> Outcome {
    let lmax = 12u32;
    let indexer = ReggeIndexer::new(lmax);
    let mut seen = BTreeSet::new();
    let mut last = 0u64;
    for l in 0..=lmax {
        for s in 0..=lmax {
            for t in 0..=lmax {
                for x in 0..=lmax {
                    for b in 0..=lmax {
                        let c = CanonicalRegge { l, s, t, x, b };
                        if !c.satisfies_invariants() {
                            continue;
                        }
                        let i = indexer.index(&c).map_err(|e| e.to_string())?;
                        if index(&c).map_err(|e| e.to_string())? != i {
                            return Err(format!("{c:?}: table-free rank differs"));
                        }
                        if i <= last {
                            return Err(format!("{c:?}: rank {i} not increasing"));
                        }
                        last = i;
                        seen.insert(i);
                    }
                }
            }
        }
    }
    let n = seen.len() as u64;
    if n != ReggeIndexer::count(lmax) || seen.first() != Some(&1) || seen.last() != Some(&n) {
        return Err(format!("{n} tuples do not map onto 1..{n}"));
    }
    Ok(format!("{n} canonical tuples ranked 1..{n} without collisions"))
}

/// Exact `-Δ` of `Σ_n a_n R^m_n(r) trig(mθ)`, as a polynomial in `r`.
fn neg_laplacian(m: usize, poly: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); poly.len()];
    for (k, c) in poly.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let f = (k * k) as i64 - (m * m) as i64;
        if f != 0 {
            out[k - 2] -= c * BigRational::from_integer(f.into());
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    let sp = Space::new(24, Rho::new(65, 64).unwrap());
    for trial in 0..200 {
        let parity = if trial % 2 == 0 { Parity::Even } else { Parity::Odd };
        let deg = rng.gen_range(1..=20usize);
        let mut p = Zernike::zero(&sp, parity);
        // Exact dyadic coefficients, so the input enclosure is a point.
        let mut coeffs = Vec::new();
        for m in parity.min_m()..=deg {
            for n in (m..=deg).step_by(2) {
                if rng.gen_bool(0.4) {
                    let a = rng.gen_range(-64i64..=64) as f64 / 16.0;
                    p.set_coeff(m, (n - m) / 2, Ball::exact(a));
                    coeffs.push((m, n, a));
                }
            }
        }
        let q = p.inv_neg_lap();
        for m in parity.min_m()..=deg {
            let mine: Vec<_> = coeffs.iter().filter(|c| c.0 == m).collect();
            // Candidate representative: three-term combination per mode.
            let mut rep = vec![BigRational::zero(); deg + 3];
            for &&(_, n, a) in &mine {
                let a = rat_f64(a);
                let ni = n as i64;
                let c2 = rat(1, 4 * (ni + 2) * (ni + 1));
                let (c1, c0) = if n == m { (-c2.clone(), BigRational::zero()) } else { (rat(-1, 2 * ni * (ni + 2)), rat(1, 4 * ni * (ni + 1))) };
                rep[n + 2] -= &a * c2;
                rep[n] -= &a * c1;
                if n >= m + 2 {
                    rep[n - 2] -= &a * c0;
                }
            }
            let boundary: BigRational = rep.iter().fold(BigRational::zero(), |s, c| s + c);
            if !boundary.is_zero() {
                return Err(format!("trial {trial}, m = {m}: boundary value {boundary}"));
            }
            let mut rep_poly = vec![BigRational::zero(); deg + 3];
            let mut p_poly = vec![BigRational::zero(); deg + 3];
            for (n, c) in rep.iter().enumerate() {
                if !c.is_zero() {
                    for (k, v) in radial_poly(m, n).iter().enumerate() {
                        rep_poly[k] += c * v;
                    }
                }
            }
            for &&(_, n, a) in &mine {
                for (k, v) in radial_poly(m, n).iter().enumerate() {
                    p_poly[k] += rat_f64(a) * v;
                }
            }
            if neg_laplacian(m, &rep_poly) != p_poly {
                return Err(format!("trial {trial}, m = {m}: -Δ of the representative differs"));
            }
            for (n, c) in rep.iter().enumerate() {
                if n < m || (n - m) % 2 == 1 {
                    continue;
                }
                let b = q.coeff(m, (n - m) / 2);
                if !(rat_f64(b.lo()) <= *c && *c <= rat_f64(b.hi())) {
                    return Err(format!("trial {trial}: enclosure of ({m}, {n}) misses {c}"));
                }
            }
        }
        if q.has_errors() {
            return Err(format!("trial {trial}: unexpected truncation error"));
        }
    }
    Ok("200 random polynomials: -Δ(rep) = p, zero boundary, enclosures contain rep".into())
}

struct SamplePoint {
    r: f64,
    theta: Ball,
    /// `R^m_{m+2j}(r) cos(mθ)` and `... sin(mθ)` as exact rationals.
    even: Vec<Vec<BigRational>>,
    odd: Vec<Vec<BigRational>>,
}

fn sample_points(size: usize) -> Vec<SamplePoint> {
    let triples = [(3i64, 4i64, 5i64), (5, 12, 13), (8, 15, 17), (7, 24, 25), (20, 21, 29)];
    let mut angles = Vec::new();
    for (a, b, c) in triples {
        angles.push((rat(a, c), rat(b, c)));
        angles.push((rat(-b, c), rat(a, c)));
    }
    let mut pts = Vec::new();
    for k in 0..10 {
        let r = if k == 9 { 1.0 } else { (2 * k + 1) as f64 / 18.0 };
        let r = (r * 64.0).round() / 64.0;
        let rq = rat_f64(r);
        for (c, s) in &angles {
            let th = s.to_f64_lossy().atan2(c.to_f64_lossy());
            let theta = Ball::new(th, 1e-14).unwrap();
            let (mut cm, mut sm) = (BigRational::one(), BigRational::zero());
            let (mut even, mut odd) = (Vec::new(), Vec::new());
            for m in 0..=size {
                let jmax = (size - m) / 2;
                let vals: Vec<BigRational> = (0..=jmax).map(|j| poly_eval(&radial_poly(m, m + 2 * j), &rq)).collect();
                even.push(vals.iter().map(|v| v * &cm).collect());
                odd.push(vals.iter().map(|v| v * &sm).collect());
                let (nc, ns) = (&cm * c - &sm * s, &sm * c + &cm * s);
                cm = nc;
                sm = ns;
            }
            pts.push(SamplePoint { r, theta, even, odd });
        }
    }
    pts
}

trait LossyF64 {
    fn to_f64_lossy(&self) -> f64;
}

impl LossyF64 for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

fn random_enclosure(rng: &mut StdRng, sp: &Arc<Space>, parity: Parity) -> Zernike {
    let mut z = Zernike::zero(sp, parity);
    for m in parity.min_m()..=sp.size() {
        for j in 0..sp.n_coeffs(m) {
            if rng.gen_bool(0.3) {
                let c = rng.gen_range(-1024i64..=1024) as f64 / 512.0;
                let r = if rng.gen_bool(0.5) { rng.gen_range(0.0..1e-6) } else { 0.0 };
                z.set_coeff(m, j, Ball::new(c, r).unwrap());
            }
        }
        if rng.gen_bool(0.1) {
            let j = rng.gen_range(0..=sp.n_coeffs(m));
            z.add_tail(m, j, Radius::new(rng.gen_range(0.0..1e-4)));
        }
    }
    if rng.gen_bool(0.1) {
        let b = rng.gen_range(0..sp.n_bands());
        z.add_band(b, Radius::new(rng.gen_range(0.0..1e-4)));
    }
    z
}

fn exact_value(z: &Zernike, pt: &SamplePoint) -> BigRational {
    let basis = if z.parity() == Parity::Even { &pt.even } else { &pt.odd };
    let mut acc = BigRational::zero();
    for (m, j, c) in z.nonzero_coeffs() {
        acc += rat_f64(c.center()) * &basis[m][j];
    }
    acc
}

fn criterion_5() -> Outcome {
    let size = 8;
    let sp = Space::new(size, Rho::new(65, 64).unwrap());
    let table = CgTable::build(size as u32).map_err(|e| e.to_string())?;
    let plan = ProductPlan::for_space(&table, &sp).map_err(|e| e.to_string())?;
    let pts = sample_points(size);
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let pu = if rng.gen_bool(0.5) { Parity::Even } else { Parity::Odd };
        let pv = if rng.gen_bool(0.5) { Parity::Even } else { Parity::Odd };
        let u = random_enclosure(&mut rng, &sp, pu);
        let v = random_enclosure(&mut rng, &sp, pv);
        let uv = u.multiply(&v, &plan).map_err(|e| e.to_string())?;
        let nu = u.norm_upper().value() * v.norm_upper().value();
        let nuv = uv.norm_upper().value();
        if nuv > nu * (1.0 + 1e-10) {
            return Err(format!("trial {trial}: ‖uv‖ = {nuv:e} exceeds ‖u‖‖v‖ = {nu:e}"));
        }
        if nu > 0.0 {
            worst = worst.max(nuv / nu);
        }
        for pt in &pts {
            let exact = exact_value(&u, pt) * exact_value(&v, pt);
            let b = uv.eval_point(Ball::exact(pt.r), pt.theta).map_err(|e| e.to_string())?;
            if !(rat_f64(b.lo()) <= exact && exact <= rat_f64(b.hi())) {
                return Err(format!("trial {trial}: product enclosure {b} misses {} at r = {}", exact.to_f64_lossy(), pt.r));
            }
        }
    }
    Ok(format!("1000 pairs x 100 points contained; max ‖uv‖/(‖u‖‖v‖) = {worst:.6}"))
}

fn criterion_12() -> Outcome {
    let points = [rat(0, 1), rat(1, 3), rat(1, 2), rat(5, 7), rat(9, 10), rat(1, 1)];
    let mut count = 0;
    for r in &points {
        for m in 0..=10usize {
            let jmax = (10 - m) / 2;
            let vals = radial_values::<BigRational>(m, jmax, r);
            for (j, v) in vals.iter().enumerate() {
                let want = poly_eval(&radial_poly(m, m + 2 * j), r);
                if *v != want {
                    return Err(format!("R^{m}_{}({r}) = {v}, expected {want}", m + 2 * j));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} recurrence values equal the factorial expansion"))
}

/// Runs `find` then `prove` (and optionally `morse`) in `dir`.
struct Bundle {
    dir: PathBuf,
    cfg: RunConfig,
    prove_code: u8,
    prove_lines: Vec<String>,
    morse: Option<Result<(u8, Vec<String>), String>>,
    seconds: f64,
}

impl Bundle {
    fn run(dir: &Path, base: RunConfig, morse: bool) -> Result<Bundle, String> {
        let t = Instant::now();
        commands::cmd_find(&base, dir).map_err(|e| format!("find: {e}"))?;
        let cfg_path = dir.join("run.cfg");
        let mut cfg = RunConfig::default();
        cfg.parse_into(&std::fs::read_to_string(&cfg_path).map_err(|e| e.to_string())?, dir).map_err(|e| e.0)?;
        let p = commands::cmd_prove(&cfg).map_err(|e| format!("prove: {e}"))?;
        let m = (morse && p.code == EXIT_OK).then(|| commands::cmd_morse(&cfg).map(|o| (o.code, o.lines)).map_err(|e| e.to_string()));
        Ok(Bundle { dir: dir.to_path_buf(), cfg, prove_code: p.code, prove_lines: p.lines, morse: m, seconds: t.elapsed().as_secs_f64() })
    }

    fn certificate(&self) -> Result<Record, String> {
        Record::parse(&std::fs::read_to_string(self.dir.join("certificate.txt")).map_err(|e| e.to_string())?)
    }

    fn existence(&self) -> Outcome {
        if self.prove_code != EXIT_OK {
            return Err(format!("prove exited {}: {}", self.prove_code, self.prove_lines.join("; ")));
        }
        let rec = self.certificate()?;
        for c in ["epsilon finite", "K <= 3/4", "d(K) <= d(3/4)", "epsilon + K delta < delta", "I - M invertible"] {
            if rec.get("checks", c) != Some("pass") {
                return Err(format!("check `{c}` not passed"));
            }
        }
        let delta = rec.get_f64("bounds", "delta").ok_or("no delta")?;
        let rel = rec.get_f64("bounds", "relative_radius").ok_or("no relative radius")?;
        let eps = rec.get_f64("bounds", "epsilon").ok_or("no epsilon")?;
        let k = rec.get_f64("bounds", "K").ok_or("no K")?;
        if !(delta > 0.0) {
            return Err(format!("delta = {delta:e}"));
        }
        if !(rel <= 2f64.powi(-20)) {
            return Err(format!("relative radius {rel:e} > 2^-20"));
        }
        Ok(format!("eps = {eps:.3e}, K = {k:.3e}, delta = {delta:.3e}, relative radius {rel:.3e} ({:.0} s)", self.seconds))
    }

    fn morse_result(&self) -> Result<(u8, Record), String> {
        let (code, _) = self.morse.clone().ok_or("morse not run")??;
        Ok((code, self.certificate()?))
    }
}

fn with_cache(cfg: &mut RunConfig, cache: &Path) {
    cfg.cg_cache = Some(cache.to_path_buf());
}

fn criterion_7(b: &Bundle) -> Outcome {
    let rec = b.certificate()?;
    match rec.get("symmetry", "rotation") {
        Some("no_nontrivial_rotation") => Ok(rec.get("symmetry", "rotation_witness").unwrap_or("").to_string()),
        other => Err(format!("rotation verdict {other:?}")),
    }
}

fn criterion_8(b: &Bundle) -> Outcome {
    let (code, rec) = b.morse_result()?;
    let result = rec.get("morse", "result").unwrap_or("");
    let even = rec.get("morse", "even.at_most_n").unwrap_or("");
    let odd = rec.get("morse", "odd.at_most_n").unwrap_or("");
    let ok = code == EXIT_OK
        && result == "morse index = 1"
        && even.starts_with("n = 1,")
        && even.ends_with("pass")
        && odd.starts_with("n = 1,")
        && odd.ends_with("pass")
        && rec.get("morse", "even.count") == Some("[1, 1]");
    let line = format!("{result}; even: {even}; odd: {odd}");
    if ok {
        Ok(line)
    } else {
        Err(format!("exit {code}: {line}"))
    }
}

fn criterion_9(b: &Bundle) -> Outcome {
    b.existence()?;
    let rec = b.certificate()?;
    if rec.get("symmetry", "S1") != Some("invariant_under(1)") {
        return Err(format!("S1 verdict {:?}", rec.get("symmetry", "S1")));
    }
    let (code, rec) = b.morse_result()?;
    let result = rec.get("morse", "result").unwrap_or("").to_string();
    let even = rec.get("morse", "even.at_most_n").unwrap_or("");
    let lower = rec.get("morse", "even.at_least_m").unwrap_or("");
    if code == EXIT_OK && result == "morse index = 2" {
        Ok(format!("S1-invariant, {result}; even at_most: {even}; even at_least: {lower} ({:.0} s)", b.seconds))
    } else if code == EXIT_OK {
        Err(format!("wrong index: {result}"))
    } else {
        Err(format!("interval verdict only: {result}"))
    }
}

fn criterion_10(b: &Bundle) -> Outcome {
    let rec = b.certificate()?;
    let and = rec.get_f64("bounds", "A_norm_delta").ok_or("no A_norm_delta")?;
    let s = commands::setup(&b.cfg).map_err(|e| e.to_string())?;
    let ubar_path = b.cfg.ubar.as_ref().ok_or("no ubar")?;
    let ubar = formats::read_zernike(&std::fs::read_to_string(ubar_path).map_err(|e| e.to_string())?, Some(&s.space))
        .map_err(|e| e.to_string())?;
    let u_star = ubar.widen(Radius::new(and));
    let q = rayleigh_quotient(&s.weight, &u_star, &s.plan).map_err(|e| e.to_string())?;
    let width = q.hi() - q.lo();
    let odd = commands::read_eigen(b.cfg.eigen_odd.as_ref().ok_or("no eigen_odd")?, &s.space).map_err(|e| e.to_string())?;
    let top = odd.values.first().ok_or("no odd eigenvalue")?.center();
    let line = format!("Rayleigh quotient {q} (width {width:.2e}); odd top eigenvalue {top}");
    if q.contains(3.0) && width <= 1e-3 && (top - 1.0).abs() <= 1e-6 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn main() -> ExitCode {
    let wanted: BTreeSet<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |c: u32| wanted.is_empty() || wanted.contains(&c);
    let mut failed = Vec::new();
    let mut report = |c: u32, name: &str, t: Instant, o: Outcome| {
        let secs = t.elapsed().as_secs_f64();
        match o {
            Ok(msg) => println!("PASS {c:>2} {name}: {msg} [{secs:.1} s]"),
            Err(msg) => {
                println!("FAIL {c:>2} {name}: {msg} [{secs:.1} s]");
                failed.push(c);
            }
        }
    };
    let quick: [(u32, &str, fn() -> Outcome); 6] = [
        (1, "CG exactness", criterion_1),
        (2, "Regge symmetries", criterion_2),
        (3, "index bijectivity", criterion_3),
        (4, "inverse Laplacian identity", criterion_4),
        (5, "Banach algebra containment", criterion_5),
        (12, "radial recurrence oracle", criterion_12),
    ];
    for (c, name, f) in quick {
        if want(c) {
            let t = Instant::now();
            report(c, name, t, f());
        }
    }

    let tmp = tempfile::tempdir().expect("temporary directory");
    let cache = tmp.path().join("cg70.bin");
    if [6, 7, 8, 10].iter().any(|&c| want(c)) {
        let t = Instant::now();
        let mut cfg = RunConfig::default();
        with_cache(&mut cfg, &cache);
        match Bundle::run(&tmp.path().join("alpha2"), cfg, want(8)) {
            Ok(b) => {
                let cases: [(u32, &str, fn(&Bundle) -> Outcome); 4] = [
                    (6, "existence, alpha = 2", Bundle::existence),
                    (7, "asymmetry, alpha = 2", criterion_7),
                    (8, "Morse index 1, alpha = 2", criterion_8),
                    (10, "eigenrelation consistency", criterion_10),
                ];
                for (c, name, f) in cases {
                    if want(c) {
                        report(c, name, t, f(&b));
                    }
                }
            }
            Err(e) => {
                for c in [6, 7, 8, 10].into_iter().filter(|&c| want(c)) {
                    report(c, "alpha = 2 bundle", t, Err(e.clone()));
                }
            }
        }
    }
    if want(9) {
        let t = Instant::now();
        let mut cfg = RunConfig::default();
        with_cache(&mut cfg, &cache);
        cfg.seed = parse_seed("sym1:amp=10,center=0.5,width=0.4").unwrap();
        cfg.eigen_even_count = 2;
        cfg.squarings = 12;
        let o = Bundle::run(&tmp.path().join("sym1"), cfg, true).and_then(|b| criterion_9(&b));
        report(9, "symmetric solution, index 2", t, o);
    }
    if want(11) {
        let t = Instant::now();
        let mut lines = Vec::new();
        let mut err = None;
        // Steeper weights concentrate the solution and need more modes.
        for (alpha, size) in [(4, 70), (6, 90)] {
            let mut cfg = RunConfig::default();
            cfg.size = size;
            cfg.n_trunc = size + 1;
            cfg.n_part = size;
            with_cache(&mut cfg, &tmp.path().join(format!("cg{size}.bin")));
            cfg.weight = diskcert::config::WeightSpec::RadialPower(alpha);
            match Bundle::run(&tmp.path().join(format!("alpha{alpha}")), cfg, false).and_then(|b| b.existence()) {
                Ok(l) => lines.push(format!("alpha = {alpha}, size {size}: {l}")),
                Err(e) => err = Some(format!("alpha = {alpha}, size {size}: {e}")),
            }
        }
        report(11, "existence, alpha = 4 and 6", t, err.map_or_else(|| Ok(lines.join("; ")), Err));
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
