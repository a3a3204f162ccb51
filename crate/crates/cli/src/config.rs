//! Flat `key=value` run configuration.
//!
//! Relative paths are resolved against the directory of the file they were
//! read from; overrides given on the command line are resolved against the
//! working directory.

use std::path::{Path, PathBuf};

use diskcert_core::approx::{SeedKind, SeedSpec};
use diskcert_core::zernike::Rho;

use crate::formats::parse_rho;

#[derive(Clone, Debug, PartialEq)]
pub enum WeightSpec {
    /// `w = r^α`.
    RadialPower(usize),
    /// Zernike file.
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub size: usize,
    pub rho: Rho,
    pub precision_bits: u32,
    pub n_trunc: usize,
    pub n_part: usize,
    pub theta: f64,
    pub a: f64,
    pub squarings: u32,
    pub weight: WeightSpec,
    pub seed: SeedSpec,
    pub tol: f64,
    /// Sₙ symmetry to impose on `M` and to certify.
    pub symmetry: Option<usize>,
    pub eigen_even_count: usize,
    pub eigen_odd_count: usize,
    pub ubar: Option<PathBuf>,
    pub newton: Option<PathBuf>,
    pub eigen_even: Option<PathBuf>,
    pub eigen_odd: Option<PathBuf>,
    pub certificate: Option<PathBuf>,
    pub cg_cache: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            size: 70,
            rho: Rho::new(65, 64).unwrap(),
            precision_bits: 53,
            n_trunc: 71,
            n_part: 70,
            theta: 0.981,
            a: 3.0,
            squarings: 8,
            weight: WeightSpec::RadialPower(2),
            seed: SeedSpec::offcenter(10.0, 0.5, 0.4),
            tol: 1e-13,
            symmetry: None,
            eigen_even_count: 1,
            eigen_odd_count: 1,
            ubar: None,
            newton: None,
            eigen_even: None,
            eigen_odd: None,
            certificate: None,
            cg_cache: None,
        }
    }
}

/// Parses the `--seed` grammar: `radial`, `offcenter` or `sym<n>`, optionally
/// followed by `:` and comma-separated `amp=`, `center=`, `width=` settings.
///
/// ```
/// use diskcert::config::parse_seed;
/// let s = parse_seed("sym2:amp=8,width=0.3").unwrap();
/// assert_eq!(s.symmetry(), Some(2));
/// ```
pub fn parse_seed(s: &str) -> Result<SeedSpec, ConfigError> {
    let (kind, params) = s.split_once(':').unwrap_or((s, ""));
    let mut seed = match kind.trim() {
        "radial" => SeedSpec::radial(10.0, 0.4),
        "offcenter" => SeedSpec::offcenter(10.0, 0.5, 0.4),
        k => match k.strip_prefix("sym").map(str::parse::<usize>) {
            Some(Ok(n)) if n >= 1 => SeedSpec::symmetrized(n, 10.0, 0.5, 0.4),
            _ => return Err(ConfigError(format!("unknown seed kind `{k}` (radial, offcenter, sym<n>)"))),
        },
    };
    for kv in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| ConfigError(format!("seed parameter `{kv}` lacks `=`")))?;
        let v: f64 = v.trim().parse().map_err(|_| ConfigError(format!("seed parameter `{kv}` is not a number")))?;
        match k.trim() {
            "amp" => seed.amplitude = v,
            "center" => seed.center = v,
            "width" => seed.width = v,
            other => return Err(ConfigError(format!("unknown seed parameter `{other}`"))),
        }
    }
    seed.validate().map_err(|e| ConfigError(e.to_string()))?;
    Ok(seed)
}

pub fn format_seed(s: &SeedSpec) -> String {
    let kind = match s.kind {
        SeedKind::RadialBump => "radial".to_string(),
        SeedKind::OffcenterBump => "offcenter".to_string(),
        SeedKind::Symmetrized(n) => format!("sym{n}"),
    };
    format!("{kind}:amp={},center={},width={}", s.amplitude, s.center, s.width)
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError(format!("bad value `{v}` for `{key}`")))
}

impl RunConfig {
    /// Applies one `key=value` setting; relative paths join `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<(), ConfigError> {
        let v = value.trim();
        let path = || if v.is_empty() { None } else { Some(base.join(v)) };
        match key.trim() {
            "size" => {
                self.size = parse(key, v)?;
            }
            "rho" => self.rho = parse_rho(v).ok_or_else(|| ConfigError(format!("rho must be p/q with p >= q > 0, got `{v}`")))?,
            "precision_bits" => self.precision_bits = parse(key, v)?,
            "n_trunc" => self.n_trunc = parse(key, v)?,
            "n_part" => self.n_part = parse(key, v)?,
            "theta" => self.theta = parse(key, v)?,
            "a" => self.a = parse(key, v)?,
            "squarings" => self.squarings = parse(key, v)?,
            "alpha" => self.weight = WeightSpec::RadialPower(parse(key, v)?),
            "weight" => self.weight = WeightSpec::File(base.join(v)),
            "seed" => self.seed = parse_seed(v)?,
            "tol" => self.tol = parse(key, v)?,
            "symmetry" => {
                let n: usize = parse(key, v)?;
                self.symmetry = (n > 0).then_some(n);
            }
            "eigen_even_count" => self.eigen_even_count = parse(key, v)?,
            "eigen_odd_count" => self.eigen_odd_count = parse(key, v)?,
            "ubar" => self.ubar = path(),
            "newton" => self.newton = path(),
            "eigen_even" => self.eigen_even = path(),
            "eigen_odd" => self.eigen_odd = path(),
            "certificate" => self.certificate = path(),
            "cg_cache" => self.cg_cache = path(),
            other => return Err(ConfigError(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Reads `key=value` lines; `#` starts a comment.
    pub fn parse_into(&mut self, text: &str, base: &Path) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError(format!("line {}: expected key=value", i + 1)))?;
            self.set(k, v, base).map_err(|e| ConfigError(format!("line {}: {}", i + 1, e.0)))?;
        }
        Ok(())
    }

    /// Checks the invariants shared by all subcommands.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.rho.p <= self.rho.q {
            return Err(ConfigError("rho must exceed 1".into()));
        }
        if self.size == 0 || self.size > MAX_SIZE {
            return Err(ConfigError(format!("size must lie in 1..={MAX_SIZE}")));
        }
        if self.precision_bits != 53 {
            return Err(ConfigError(format!("only precision_bits = 53 (double) is supported, got {}", self.precision_bits)));
        }
        if self.n_trunc == 0 || self.n_trunc > self.size + 1 {
            return Err(ConfigError(format!("n_trunc must lie in 1..={}", self.size + 1)));
        }
        if self.n_part > self.size + 1 {
            return Err(ConfigError(format!("n_part must be at most {}", self.size + 1)));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(ConfigError("theta must lie in (0, 1]".into()));
        }
        if !(self.a >= 1.0) || !self.a.is_finite() {
            return Err(ConfigError("a must be a finite number >= 1".into()));
        }
        if self.squarings > 20 {
            return Err(ConfigError("squarings must be at most 20".into()));
        }
        if !(self.tol > 0.0) {
            return Err(ConfigError("tol must be positive".into()));
        }
        Ok(())
    }

    /// Serializes the settings, with paths relative to `base` when possible.
    pub fn to_text(&self, base: &Path) -> String {
        let rel = |p: &Path| p.strip_prefix(base).unwrap_or(p).display().to_string();
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        kv("size", self.size.to_string());
        kv("rho", self.rho.to_string());
        kv("precision_bits", self.precision_bits.to_string());
        kv("n_trunc", self.n_trunc.to_string());
        kv("n_part", self.n_part.to_string());
        kv("theta", self.theta.to_string());
        kv("a", self.a.to_string());
        kv("squarings", self.squarings.to_string());
        match &self.weight {
            WeightSpec::RadialPower(al) => kv("alpha", al.to_string()),
            WeightSpec::File(p) => kv("weight", rel(p)),
        }
        kv("seed", format_seed(&self.seed));
        kv("tol", self.tol.to_string());
        kv("symmetry", self.symmetry.unwrap_or(0).to_string());
        kv("eigen_even_count", self.eigen_even_count.to_string());
        kv("eigen_odd_count", self.eigen_odd_count.to_string());
        for (k, p) in [
            ("ubar", &self.ubar),
            ("newton", &self.newton),
            ("eigen_even", &self.eigen_even),
            ("eigen_odd", &self.eigen_odd),
            ("certificate", &self.certificate),
            ("cg_cache", &self.cg_cache),
        ] {
            if let Some(p) = p {
                kv(k, rel(p));
            }
        }
        out
    }
}

/// Largest accepted `size`; the table and product plan grow like `size^4`.
pub const MAX_SIZE: usize = 160;
