//! Subcommand implementations. Each returns an [`Outcome`] carrying the
//! exit status and the lines to print.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use diskcert_core::approx::{Galerkin, SeedKind};
use diskcert_core::ball::Ball;
use diskcert_core::gmap::Weight;
use diskcert_core::prove::{contr_fix, has_symm_check, min_symm_check, NewtonOperator, ProveError, SymmetryKind};
use diskcert_core::regge::{approx_f64, normal_form, CgTable, ReggeMatrix};
use diskcert_core::spectral::{morse_index, EigenData, MorseCertificate, MorseOptions};
use diskcert_core::zernike::{Parity, ProductPlan, Space, Zernike};
use sha2::{Digest, Sha256};

use crate::certificate::Record;
use crate::config::{RunConfig, WeightSpec};
use crate::formats::{self, FormatError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug)]
pub struct Outcome {
    pub code: u8,
    pub lines: Vec<String>,
}

impl Outcome {
    fn new(code: u8) -> Outcome {
        Outcome { code, lines: Vec::new() }
    }

    fn say(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }
}

/// Error carrying its exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> CliError {
        CliError { code: EXIT_USAGE, msg: msg.into() }
    }

    pub fn fail(msg: impl Into<String>) -> CliError {
        CliError { code: EXIT_FAIL, msg: msg.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.msg)
    }
}

impl std::error::Error for CliError {}

fn read_text(p: &Path) -> Result<String, CliError> {
    fs::read_to_string(p).map_err(|e| CliError::fail(format!("cannot read {}: {e}", p.display())))
}

fn write_file(p: &Path, data: impl AsRef<[u8]>) -> Result<(), CliError> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::fail(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(p, data).map_err(|e| CliError::fail(format!("cannot write {}: {e}", p.display())))
}

fn parse_err(p: &Path, e: FormatError) -> CliError {
    CliError::fail(format!("{}: {e}", p.display()))
}

pub fn sha256_file(p: &Path) -> Result<String, CliError> {
    let bytes = fs::read(p).map_err(|e| CliError::fail(format!("cannot read {}: {e}", p.display())))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

fn required<'a>(p: &'a Option<PathBuf>, key: &str) -> Result<&'a PathBuf, CliError> {
    p.as_ref().ok_or_else(|| CliError::usage(format!("configuration lacks `{key}`")))
}

/// Loads the table from the cache when it is large enough, else builds it
/// (and writes the cache when a path is configured).
pub fn load_table(max_n: u32, cache: Option<&Path>) -> Result<CgTable, CliError> {
    if let Some(p) = cache.filter(|p| p.exists()) {
        let bytes = fs::read(p).map_err(|e| CliError::fail(format!("cannot read {}: {e}", p.display())))?;
        let t = formats::read_cg_cache(&bytes).map_err(|e| parse_err(p, e))?;
        if t.max_n() >= max_n {
            return Ok(t);
        }
    }
    let t = CgTable::build(max_n).map_err(|e| CliError::fail(format!("table construction failed: {e}")))?;
    if let Some(p) = cache {
        write_file(p, formats::write_cg_cache(&t))?;
    }
    Ok(t)
}

/// Space, product plan and weight of a configuration.
pub struct Setup {
    pub space: Arc<Space>,
    pub plan: ProductPlan,
    pub weight: Weight,
}

pub fn setup(cfg: &RunConfig) -> Result<Setup, CliError> {
    cfg.validate().map_err(|e| CliError::usage(e.0))?;
    let space = Space::new(cfg.size, cfg.rho);
    let table = load_table(space.degree() as u32, cfg.cg_cache.as_deref())?;
    let plan = ProductPlan::for_space(&table, &space).map_err(|e| CliError::fail(e.to_string()))?;
    let weight = match &cfg.weight {
        WeightSpec::RadialPower(a) => Weight::radial_power(*a, &space).map_err(|e| CliError::usage(e.to_string()))?,
        WeightSpec::File(p) => {
            let z = formats::read_zernike(&read_text(p)?, Some(&space)).map_err(|e| parse_err(p, e))?;
            Weight::new(z).map_err(|e| CliError::usage(e.to_string()))?
        }
    };
    Ok(Setup { space, plan, weight })
}

fn symmetry_of(cfg: &RunConfig) -> Option<usize> {
    cfg.symmetry.or(match cfg.seed.kind {
        SeedKind::Symmetrized(n) => Some(n),
        _ => None,
    })
}

fn write_eigen(dir: &Path, stem: &str, eig: &EigenData) -> Result<PathBuf, CliError> {
    let mut files = Vec::new();
    for (k, g) in eig.preimages.iter().enumerate() {
        let name = format!("{stem}_{k}.zer");
        write_file(&dir.join(&name), formats::write_zernike(g))?;
        files.push(name);
    }
    let manifest = dir.join(format!("{stem}.txt"));
    write_file(&manifest, formats::write_eigen_manifest(eig.parity, &eig.values, &files))?;
    Ok(manifest)
}

/// Reads a manifest and its preimage files (relative to the manifest).
pub fn read_eigen(p: &Path, space: &Arc<Space>) -> Result<EigenData, CliError> {
    let (parity, entries) = formats::read_eigen_manifest(&read_text(p)?).map_err(|e| parse_err(p, e))?;
    let dir = p.parent().unwrap_or(Path::new("."));
    let mut texts = Vec::new();
    for (_, f) in &entries {
        texts.push(read_text(&dir.join(f))?);
    }
    let values = entries.iter().map(|(v, _)| *v).collect();
    formats::eigen_from_parts(parity, values, &texts, space).map_err(|e| parse_err(p, e))
}

/// Computes `ū`, `M` and eigen data, writes them to `out` together with a
/// configuration `run.cfg` that refers to them.
pub fn cmd_find(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let s = setup(cfg)?;
    let gal = Galerkin::new(&s.weight, &s.plan, cfg.n_trunc);
    let fix = gal.find_fix(&cfg.seed, cfg.tol).map_err(|e| CliError::fail(format!("find_fix: {e}")))?;
    let mut m = gal.build_newton_operator(&fix.state).map_err(|e| CliError::fail(format!("Newton operator: {e}")))?;
    let sym = symmetry_of(cfg);
    if let Some(n) = sym {
        m = m.block_diagonal_part(n);
    }
    let ubar = fix.state.to_zernike(&s.space);
    let mut res = Outcome::new(EXIT_OK);
    res.say(format!("fixed point: relative residual {:e} after {} iterations", fix.residual, fix.iterations));

    let mut run = cfg.clone();
    run.symmetry = sym;
    run.ubar = Some(out.join("ubar.zer"));
    run.newton = Some(out.join("newton.txt"));
    write_file(run.ubar.as_ref().unwrap(), formats::write_zernike(&ubar))?;
    write_file(run.newton.as_ref().unwrap(), formats::write_newton(&m))?;
    for (parity, count, stem) in [(Parity::Even, cfg.eigen_even_count, "eigen_even"), (Parity::Odd, cfg.eigen_odd_count, "eigen_odd")] {
        if count == 0 {
            continue;
        }
        let pairs = gal.find_eigen(&fix.state, parity, count).map_err(|e| CliError::fail(format!("find_eigen: {e}")))?;
        let vals: Vec<String> = pairs.iter().map(|p| format!("{:.12}", p.value)).collect();
        res.say(format!("{} eigenvalues: {}", parity.name(), vals.join(" ")));
        let data: Vec<(f64, Vec<f64>)> = pairs.iter().map(|p| (p.value, p.preimage.coeffs.clone())).collect();
        let eig = EigenData::from_f64(&s.space, parity, &data);
        let manifest = write_eigen(out, stem, &eig)?;
        match parity {
            Parity::Even => run.eigen_even = Some(manifest),
            Parity::Odd => run.eigen_odd = Some(manifest),
        }
    }
    run.certificate = Some(out.join("certificate.txt"));
    let cfg_path = out.join("run.cfg");
    write_file(&cfg_path, run.to_text(out))?;
    res.say(format!("wrote {}", cfg_path.display()));
    Ok(res)
}

fn config_section(rec: &mut Record, cfg: &RunConfig) {
    rec.put("config", "size", cfg.size.to_string());
    rec.put("config", "rho", cfg.rho.to_string());
    rec.put("config", "precision_bits", cfg.precision_bits.to_string());
    rec.put("config", "n_trunc", cfg.n_trunc.to_string());
    match &cfg.weight {
        WeightSpec::RadialPower(a) => rec.put("config", "weight", format!("r^{a}")),
        WeightSpec::File(_) => rec.put("config", "weight", "file"),
    }
    rec.put("config", "symmetry", cfg.symmetry.map_or("none".to_string(), |n| n.to_string()));
}

fn default_certificate_path(cfg: &RunConfig) -> PathBuf {
    cfg.certificate.clone().unwrap_or_else(|| {
        let dir = cfg.ubar.as_ref().and_then(|p| p.parent()).unwrap_or(Path::new("."));
        dir.join("certificate.txt")
    })
}

/// Existence certificate for the configured `ū` and `M`.
pub fn cmd_prove(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ubar_p = required(&cfg.ubar, "ubar")?;
    let m_p = required(&cfg.newton, "newton")?;
    let s = setup(cfg)?;
    let ubar = formats::read_zernike(&read_text(ubar_p)?, Some(&s.space)).map_err(|e| parse_err(ubar_p, e))?;
    if ubar.parity() != Parity::Even {
        return Err(CliError::usage("the approximate solution must have even parity"));
    }
    let m = formats::read_newton(&read_text(m_p)?, &s.space).map_err(|e| parse_err(m_p, e))?;

    let mut rec = Record::default();
    config_section(&mut rec, cfg);
    rec.put("inputs", "ubar", sha256_file(ubar_p)?);
    rec.put("inputs", "newton", sha256_file(m_p)?);
    if let WeightSpec::File(p) = &cfg.weight {
        rec.put("inputs", "weight", sha256_file(p)?);
    }

    let mut res = Outcome::new(EXIT_OK);
    let checks = ["epsilon finite", "K <= 3/4", "d(K) <= d(3/4)", "epsilon + K delta < delta", "I - M invertible"];
    match contr_fix(&s.weight, &ubar, &m, &s.plan) {
        Ok(cert) => {
            for c in checks {
                rec.put("checks", c, "pass");
            }
            rec.put_f64("bounds", "epsilon", cert.epsilon.value());
            rec.put_f64("bounds", "K", cert.k.value());
            rec.put_f64("bounds", "delta", cert.delta.value());
            rec.put_f64("bounds", "delta_cap", cert.delta_cap.value());
            rec.put_f64("bounds", "A_norm", cert.a_norm.value());
            rec.put_f64("bounds", "A_norm_delta", cert.a_norm_delta.value());
            rec.put_f64("bounds", "relative_radius", cert.relative_radius(&ubar));
            rec.put("verdict", "existence", "certified");
            res.say(format!("existence certified: {cert}"));
            res.say(format!("relative radius {:e}", cert.relative_radius(&ubar)));

            let u_star = cert.solution(&ubar);
            match min_symm_check(&u_star, &s.plan) {
                Ok(v) => {
                    let kind = match v.kind {
                        SymmetryKind::NoNontrivialRotation => "no_nontrivial_rotation".to_string(),
                        SymmetryKind::InvariantUnder(n) => format!("invariant_under({n})"),
                        SymmetryKind::Inconclusive => "inconclusive".to_string(),
                    };
                    res.say(format!("rotation check: {kind} ({})", v.witness));
                    rec.put("symmetry", "rotation", kind);
                    rec.put("symmetry", "rotation_witness", v.witness);
                }
                Err(e) => rec.put("symmetry", "rotation", format!("error: {e}")),
            }
            if let Some(n) = cfg.symmetry {
                let v = has_symm_check(&ubar, &m, n);
                let kind = match v.kind {
                    SymmetryKind::InvariantUnder(k) => format!("invariant_under({k})"),
                    _ => "inconclusive".to_string(),
                };
                res.say(format!("S{n} check: {kind} ({})", v.witness));
                rec.put("symmetry", &format!("S{n}"), kind);
                rec.put("symmetry", &format!("S{n}_witness"), v.witness);
            }
        }
        Err(ProveError::CheckFailed { check, detail }) => {
            let mut reached = true;
            for c in checks {
                if c == check {
                    rec.put("checks", c, format!("FAIL ({detail})"));
                    reached = false;
                } else {
                    rec.put("checks", c, if reached { "pass" } else { "not reached" });
                }
            }
            rec.put("verdict", "existence", "not certified");
            res.code = EXIT_FAIL;
            res.say(format!("not certified: check `{check}` failed: {detail}"));
        }
        Err(e) => return Err(CliError::fail(format!("contr_fix: {e}"))),
    }
    let out = default_certificate_path(cfg);
    write_file(&out, rec.to_text())?;
    res.say(format!("wrote {}", out.display()));
    Ok(res)
}

fn morse_section(rec: &mut Record, mc: &MorseCertificate) {
    let o = &mc.options;
    rec.put("morse", "theta", o.theta.to_string());
    rec.put("morse", "a", o.a.to_string());
    rec.put("morse", "n_part", o.n_part.to_string());
    rec.put("morse", "squarings", o.squarings.to_string());
    for (name, pc) in [("even", &mc.even), ("odd", &mc.odd)] {
        let am = &pc.at_most;
        rec.put(
            "morse",
            &format!("{name}.at_most_n"),
            format!("n = {}, bound = {:e}, {}", am.n, am.bound.value(), if am.holds { "pass" } else { "FAIL" }),
        );
        if let Some(al) = &pc.at_least {
            let verdict = if al.holds {
                "pass"
            } else if al.inconclusive {
                "inconclusive"
            } else {
                "not established"
            };
            rec.put(
                "morse",
                &format!("{name}.at_least_m"),
                format!("m = {}, a = {}, gershgorin = {:e}, eta = {:e}, {verdict}", al.m, al.a, al.gershgorin, al.eta),
            );
        }
        rec.put("morse", &format!("{name}.known"), pc.known.clone());
        let up = pc.upper.map_or("unbounded".to_string(), |u| u.to_string());
        rec.put("morse", &format!("{name}.count"), format!("[{}, {up}]", pc.lower));
    }
    rec.put("morse", "result", mc.to_string());
}

/// Morse index bounds for the solution of a prior existence certificate.
pub fn cmd_morse(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ubar_p = required(&cfg.ubar, "ubar")?;
    let ee_p = required(&cfg.eigen_even, "eigen_even")?;
    let eo_p = required(&cfg.eigen_odd, "eigen_odd")?;
    let cert_p = default_certificate_path(cfg);
    if !cert_p.exists() {
        return Err(CliError::usage(format!("no existence certificate at {}; run `prove` first", cert_p.display())));
    }
    let mut rec = Record::parse(&read_text(&cert_p)?).map_err(|e| CliError::fail(format!("{}: {e}", cert_p.display())))?;
    if rec.get("verdict", "existence") != Some("certified") {
        return Err(CliError::fail("the certificate does not certify existence"));
    }
    if rec.get("inputs", "ubar") != Some(sha256_file(ubar_p)?.as_str()) {
        return Err(CliError::fail("the approximate solution differs from the certified one (digest mismatch)"));
    }
    let and = rec.get_f64("bounds", "A_norm_delta").ok_or_else(|| CliError::fail("certificate lacks A_norm_delta"))?;
    let s = setup(cfg)?;
    let ubar = formats::read_zernike(&read_text(ubar_p)?, Some(&s.space)).map_err(|e| parse_err(ubar_p, e))?;
    let u_star = ubar.widen(diskcert_core::ball::Radius::try_new(and).map_err(|e| CliError::fail(e.to_string()))?);
    let ee = read_eigen(ee_p, &s.space)?;
    let eo = read_eigen(eo_p, &s.space)?;
    rec.put("inputs", "eigen_even", sha256_file(ee_p)?);
    rec.put("inputs", "eigen_odd", sha256_file(eo_p)?);
    let opts = MorseOptions { theta: cfg.theta, a: cfg.a, n_part: cfg.n_part, squarings: cfg.squarings };
    let mc = morse_index(&s.weight, &u_star, &ee, &eo, opts, &s.plan).map_err(|e| CliError::fail(format!("morse: {e}")))?;
    morse_section(&mut rec, &mc);
    write_file(&cert_p, rec.to_text())?;
    let mut res = Outcome::new(if mc.exact().is_some() { EXIT_OK } else { EXIT_INCONCLUSIVE });
    match mc.exact() {
        Some(i) => res.say(i.to_string()),
        None => res.say(mc.to_string()),
    }
    Ok(res)
}

/// Samples `u(x, y)` on a polar grid: `nr` radii in `[0, 1]` and `ntheta`
/// angles in `[0, 2π)`.
pub fn render(u: &Zernike, nr: usize, ntheta: usize) -> Result<String, CliError> {
    if nr < 2 || ntheta < 1 {
        return Err(CliError::usage("render needs nr >= 2 and ntheta >= 1"));
    }
    let mut out = String::from("x y u\n");
    for i in 0..nr {
        let r = i as f64 / (nr - 1) as f64;
        for k in 0..ntheta {
            let th = 2.0 * std::f64::consts::PI * k as f64 / ntheta as f64;
            let v = u.eval_point(Ball::exact(r), Ball::exact(th)).map_err(|e| CliError::fail(e.to_string()))?;
            out.push_str(&format!("{:.17e} {:.17e} {:.17e}\n", r * th.cos(), r * th.sin(), v.center()));
        }
    }
    Ok(out)
}

pub fn cmd_render(solution: &Path, nr: usize, ntheta: usize, out: Option<&Path>) -> Result<Outcome, CliError> {
    let u = formats::read_zernike(&read_text(solution)?, None).map_err(|e| parse_err(solution, e))?;
    let data = render(&u.midpoint(), nr, ntheta)?;
    let mut res = Outcome::new(EXIT_OK);
    match out {
        Some(p) => {
            write_file(p, data)?;
            res.say(format!("wrote {}", p.display()));
        }
        None => res.lines.extend(data.lines().map(String::from)),
    }
    Ok(res)
}

/// Prints one squared Clebsch-Gordan value with its Regge data.
pub fn cmd_cg_dump(q: [i64; 5], max_n: Option<u32>, cache: Option<&Path>) -> Result<Outcome, CliError> {
    let [n1, m1, n2, m2, n3] = q;
    let need = [n1, n2, n3].into_iter().max().unwrap_or(0).max(0) as u32;
    let t = load_table(max_n.unwrap_or(need).max(need), cache)?;
    let v = t.cg_squared(n1, m1, n2, m2, n3).map_err(|e| CliError::usage(e.to_string()))?;
    let mut res = Outcome::new(EXIT_OK);
    res.say(format!("cg_squared({n1}, {m1}, {n2}, {m2}, {n3}) = {v}"));
    res.say(format!("approx {:.17e}", f64::from(v.sign) * approx_f64(&v)));
    if let Some(r) = ReggeMatrix::from_cg(n1, m1, n2, m2, n3) {
        res.say(format!("regge {:?}", r.0));
        if let Ok((c, parity)) = normal_form(&r) {
            res.say(format!("canonical {c:?} permutation parity {parity}"));
            if let Ok(i) = t.indexer().index(&c) {
                res.say(format!("index {i}"));
            }
        }
    }
    res.say(format!("table max_n {}, {} entries", t.max_n(), t.len()));
    Ok(res)
}

/// Quick internal consistency checks at small size.
pub fn cmd_selftest() -> Result<Outcome, CliError> {
    let mut res = Outcome::new(EXIT_OK);
    let mut check = |name: &str, ok: bool| {
        res.lines.push(format!("{} {name}", if ok { "ok  " } else { "FAIL" }));
        if !ok {
            res.code = EXIT_FAIL;
        }
    };
    let table = CgTable::build(8).map_err(|e| CliError::fail(e.to_string()))?;
    let cache_ok = formats::read_cg_cache(&formats::write_cg_cache(&table)).map(|t| t.values() == table.values()).unwrap_or(false);
    check("table cache round trip", cache_ok);
    let mut unit = true;
    for n1 in 0..=4i64 {
        for n2 in 0..=4i64 {
            for m1 in (-n1..=n1).step_by(2) {
                for m2 in (-n2..=n2).step_by(2) {
                    let mut acc = num_rational_sum::Sum::default();
                    for n3 in 0..=(n1 + n2) {
                        if let Ok(v) = table.cg_squared(n1, m1, n2, m2, n3) {
                            acc.add(&v);
                        }
                    }
                    unit &= acc.is_one();
                }
            }
        }
    }
    check("Clebsch-Gordan sum rule, degrees <= 4", unit);

    let sp = Space::new(8, diskcert_core::zernike::Rho::new(65, 64).unwrap());
    let plan = ProductPlan::for_space(&table, &sp).map_err(|e| CliError::fail(e.to_string()))?;
    let w = Weight::radial_power(2, &sp).map_err(|e| CliError::fail(e.to_string()))?;
    let zero = Zernike::zero(&sp, Parity::Even);
    let m0 = NewtonOperator::zero(&sp, 9);
    check("zero solution certified", contr_fix(&w, &zero, &m0, &plan).is_ok());
    let text = formats::write_zernike(&Zernike::mode(&sp, Parity::Odd, 3, 1, Ball::from_ratio_i64(1, 3)));
    check("Zernike file round trip", formats::read_zernike(&text, Some(&sp)).map(|z| formats::write_zernike(&z) == text).unwrap_or(false));
    Ok(res)
}

mod num_rational_sum {
    use diskcert_core::regge::ExactSquare;
    use num_bigint::{BigInt, BigUint};

    /// Exact sum of the squares `num/den` as a fraction.
    #[derive(Default)]
    pub struct Sum {
        num: BigInt,
        den: Option<BigUint>,
    }

    impl Sum {
        pub fn add(&mut self, v: &ExactSquare) {
            let n = BigInt::from(v.num.clone());
            match &self.den {
                None => {
                    self.num = n;
                    self.den = Some(v.den.clone());
                }
                Some(d) => {
                    self.num = &self.num * BigInt::from(v.den.clone()) + n * BigInt::from(d.clone());
                    self.den = Some(d * &v.den);
                }
            }
        }

        pub fn is_one(&self) -> bool {
            self.den.as_ref().is_some_and(|d| self.num == BigInt::from(d.clone()))
        }
    }
}
