//! Text and binary file formats shared by the subcommands.
//!
//! Zernike enclosures are stored line by line:
//!
//! ```text
//! zernike v1 parity=even rho=65/64 size=70
//! c <m> <j> <center> <radius>
//! t <m> <j> <radius>
//! e <m> <radius>
//! ```
//!
//! Omitted slots are zero. Numbers are written as hex floats so that a
//! write followed by a read reproduces every bit; decimal input is accepted.

use std::fmt::{self, Write as _};
use std::sync::Arc;

use diskcert_core::ball::{hexf, parse_f64, Ball, Radius};
use diskcert_core::prove::NewtonOperator;
use diskcert_core::regge::{CgTable, ExactSquare};
use diskcert_core::spectral::EigenData;
use diskcert_core::zernike::{Parity, Rho, Space, Zernike};
use nalgebra::DMatrix;
use num_bigint::BigUint;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

impl FormatError {
    fn new(line: usize, msg: impl Into<String>) -> FormatError {
        FormatError { line, msg: msg.into() }
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.msg)
        } else {
            write!(f, "line {}: {}", self.line, self.msg)
        }
    }
}

impl std::error::Error for FormatError {}

pub fn parse_parity(s: &str) -> Option<Parity> {
    match s {
        "even" => Some(Parity::Even),
        "odd" => Some(Parity::Odd),
        _ => None,
    }
}

pub fn parse_rho(s: &str) -> Option<Rho> {
    let (p, q) = s.split_once('/')?;
    Rho::new(p.trim().parse().ok()?, q.trim().parse().ok()?)
}

/// `key=value` fields of a header line after its leading words.
fn header_fields<'a>(line: &'a str, lead: &[&str], lineno: usize) -> Result<Vec<(&'a str, &'a str)>, FormatError> {
    let mut it = line.split_whitespace();
    for w in lead {
        if it.next() != Some(*w) {
            return Err(FormatError::new(lineno, format!("expected header starting with `{}`", lead.join(" "))));
        }
    }
    it.map(|kv| kv.split_once('=').ok_or_else(|| FormatError::new(lineno, format!("malformed header field `{kv}`"))))
        .collect()
}

fn field<'a>(fields: &[(&'a str, &'a str)], key: &str, lineno: usize) -> Result<&'a str, FormatError> {
    fields
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| FormatError::new(lineno, format!("header lacks `{key}`")))
}

fn num<T: std::str::FromStr>(s: Option<&str>, lineno: usize, what: &str) -> Result<T, FormatError> {
    s.and_then(|x| x.parse().ok()).ok_or_else(|| FormatError::new(lineno, format!("bad {what}")))
}

fn float(s: Option<&str>, lineno: usize) -> Result<f64, FormatError> {
    s.and_then(parse_f64).ok_or_else(|| FormatError::new(lineno, "bad number"))
}

fn radius(s: Option<&str>, lineno: usize) -> Result<Radius, FormatError> {
    Radius::try_new(float(s, lineno)?).map_err(|e| FormatError::new(lineno, e.to_string()))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn write_zernike(z: &Zernike) -> String {
    let sp = z.space();
    let mut out = format!("zernike v1 parity={} rho={} size={}\n", z.parity().name(), sp.rho(), sp.size());
    for (m, j, c) in z.nonzero_coeffs() {
        let _ = writeln!(out, "c {m} {j} {}", c.to_text());
    }
    for r in z.radials() {
        for (j, t) in r.tails.iter().enumerate() {
            if t.value() != 0.0 {
                let _ = writeln!(out, "t {} {j} {}", r.m, hexf(t.value()));
            }
        }
    }
    for (b, e) in z.band_errors().iter().enumerate() {
        if e.value() != 0.0 {
            let _ = writeln!(out, "e {b} {}", hexf(e.value()));
        }
    }
    out
}

/// Reads a Zernike file. With `space` given, the header must agree with
/// it and the result shares it.
pub fn read_zernike(text: &str, space: Option<&Arc<Space>>) -> Result<Zernike, FormatError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| FormatError::new(0, "empty Zernike file"))?;
    let f = header_fields(header, &["zernike", "v1"], hl)?;
    let parity = parse_parity(field(&f, "parity", hl)?).ok_or_else(|| FormatError::new(hl, "bad parity"))?;
    let rho = parse_rho(field(&f, "rho", hl)?).ok_or_else(|| FormatError::new(hl, "bad rho"))?;
    let size: usize = num(Some(field(&f, "size", hl)?), hl, "size")?;
    let sp = match space {
        Some(s) if s.size() == size && s.rho() == rho => s.clone(),
        Some(s) => {
            return Err(FormatError::new(
                hl,
                format!("file has size {size}, rho {rho}; expected size {}, rho {}", s.size(), s.rho()),
            ))
        }
        None => Space::new(size, rho),
    };
    let mut z = Zernike::zero(&sp, parity);
    for (ln, line) in lines {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("c") => {
                let m: usize = num(it.next(), ln, "m")?;
                let j: usize = num(it.next(), ln, "j")?;
                if m > sp.size() || j >= sp.n_coeffs(m) || m < parity.min_m() {
                    return Err(FormatError::new(ln, format!("mode ({m}, {j}) outside the space")));
                }
                let c = float(it.next(), ln)?;
                let r = float(it.next(), ln)?;
                let b = Ball::new(c, r).map_err(|e| FormatError::new(ln, e.to_string()))?;
                z.set_coeff(m, j, b);
            }
            Some("t") => {
                let m: usize = num(it.next(), ln, "m")?;
                let j: usize = num(it.next(), ln, "j")?;
                if m > sp.size() || j >= sp.n_tails() {
                    return Err(FormatError::new(ln, format!("tail ({m}, {j}) outside the space")));
                }
                z.add_tail(m, j, radius(it.next(), ln)?);
            }
            Some("e") => {
                let b: usize = num(it.next(), ln, "band")?;
                if b >= sp.n_bands() {
                    return Err(FormatError::new(ln, format!("band {b} outside the space")));
                }
                z.add_band(b, radius(it.next(), ln)?);
            }
            _ => return Err(FormatError::new(ln, format!("unknown record `{line}`"))),
        }
        if it.next().is_some() {
            return Err(FormatError::new(ln, "trailing fields"));
        }
    }
    Ok(z)
}

/// Newton operator file: header `newton v1 rho=<p>/<q> size=<S> n_trunc=<N> dim=<d>`
/// followed by `x <row> <col> <center> <radius>` for the nonzero entries.
pub fn write_newton(m: &NewtonOperator) -> String {
    let sp = m.space();
    let mut out = format!("newton v1 rho={} size={} n_trunc={} dim={}\n", sp.rho(), sp.size(), m.n_trunc(), m.dim());
    for c in 0..m.dim() {
        for r in 0..m.dim() {
            let b = m.matrix[(r, c)];
            if b != Ball::ZERO {
                let _ = writeln!(out, "x {r} {c} {}", b.to_text());
            }
        }
    }
    out
}

pub fn read_newton(text: &str, space: &Arc<Space>) -> Result<NewtonOperator, FormatError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| FormatError::new(0, "empty Newton operator file"))?;
    let f = header_fields(header, &["newton", "v1"], hl)?;
    let rho = parse_rho(field(&f, "rho", hl)?).ok_or_else(|| FormatError::new(hl, "bad rho"))?;
    let size: usize = num(Some(field(&f, "size", hl)?), hl, "size")?;
    let n_trunc: usize = num(Some(field(&f, "n_trunc", hl)?), hl, "n_trunc")?;
    let dim: usize = num(Some(field(&f, "dim", hl)?), hl, "dim")?;
    if size != space.size() || rho != space.rho() {
        return Err(FormatError::new(hl, "Newton operator was built for a different space"));
    }
    let mut mat = DMatrix::from_element(dim, dim, Ball::ZERO);
    for (ln, line) in lines {
        let mut it = line.split_whitespace();
        if it.next() != Some("x") {
            return Err(FormatError::new(ln, format!("unknown record `{line}`")));
        }
        let r: usize = num(it.next(), ln, "row")?;
        let c: usize = num(it.next(), ln, "column")?;
        if r >= dim || c >= dim {
            return Err(FormatError::new(ln, "entry outside the matrix"));
        }
        let b = Ball::new(float(it.next(), ln)?, float(it.next(), ln)?).map_err(|e| FormatError::new(ln, e.to_string()))?;
        if it.next().is_some() {
            return Err(FormatError::new(ln, "trailing fields"));
        }
        mat[(r, c)] = b;
    }
    NewtonOperator::from_balls(space, n_trunc, mat)
        .ok_or_else(|| FormatError::new(hl, format!("dim {dim} does not match n_trunc {n_trunc}")))
}

/// Eigen data manifest: header `eigen v1 parity=<p> count=<n>` and one line
/// `v <k> <center> <radius> <file>` per pair; `file` holds the preimage
/// `g_k` in the Zernike format, relative to the manifest's directory.
pub fn write_eigen_manifest(parity: Parity, values: &[Ball], files: &[String]) -> String {
    let mut out = format!("eigen v1 parity={} count={}\n", parity.name(), values.len());
    for (k, (v, f)) in values.iter().zip(files).enumerate() {
        let _ = writeln!(out, "v {k} {} {f}", v.to_text());
    }
    out
}

/// Parsed manifest: parity and `(value, preimage file)` pairs.
pub fn read_eigen_manifest(text: &str) -> Result<(Parity, Vec<(Ball, String)>), FormatError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| FormatError::new(0, "empty eigen manifest"))?;
    let f = header_fields(header, &["eigen", "v1"], hl)?;
    let parity = parse_parity(field(&f, "parity", hl)?).ok_or_else(|| FormatError::new(hl, "bad parity"))?;
    let count: usize = num(Some(field(&f, "count", hl)?), hl, "count")?;
    let mut out = Vec::with_capacity(count);
    for (ln, line) in lines {
        let mut it = line.split_whitespace();
        if it.next() != Some("v") {
            return Err(FormatError::new(ln, format!("unknown record `{line}`")));
        }
        let k: usize = num(it.next(), ln, "index")?;
        if k != out.len() {
            return Err(FormatError::new(ln, format!("expected pair {}, found {k}", out.len())));
        }
        let v = Ball::new(float(it.next(), ln)?, float(it.next(), ln)?).map_err(|e| FormatError::new(ln, e.to_string()))?;
        let file = it.next().ok_or_else(|| FormatError::new(ln, "missing preimage file"))?;
        out.push((v, file.to_string()));
    }
    if out.len() != count {
        return Err(FormatError::new(0, format!("manifest announces {count} pairs, lists {}", out.len())));
    }
    Ok((parity, out))
}

/// Assembles [`EigenData`] from manifest entries and preimage texts.
pub fn eigen_from_parts(parity: Parity, values: Vec<Ball>, preimages: &[String], space: &Arc<Space>) -> Result<EigenData, FormatError> {
    let g = preimages.iter().map(|t| read_zernike(t, Some(space))).collect::<Result<Vec<_>, _>>()?;
    if g.iter().any(|z| z.parity() != parity) {
        return Err(FormatError::new(0, "preimage parity differs from the manifest"));
    }
    EigenData::new(parity, values, g).map_err(|e| FormatError::new(0, e.to_string()))
}

const CG_MAGIC: &[u8; 8] = b"DCERTCG\0";
const CG_VERSION: u32 = 1;

fn put_bytes(out: &mut Vec<u8>, b: &[u8]) {
    out.extend_from_slice(&(b.len() as u32).to_be_bytes());
    out.extend_from_slice(b);
}

/// Binary table cache: magic, version and `max_n`, the entry count, then
/// per entry the canonical index, a sign byte, and the numerator and
/// denominator as length-prefixed big-endian byte strings.
pub fn write_cg_cache(t: &CgTable) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(CG_MAGIC);
    out.extend_from_slice(&CG_VERSION.to_be_bytes());
    out.extend_from_slice(&t.max_n().to_be_bytes());
    out.extend_from_slice(&(t.len() as u64).to_be_bytes());
    for (k, v) in t.keys().iter().zip(t.values()) {
        out.extend_from_slice(&k.to_be_bytes());
        out.push(v.sign as u8);
        put_bytes(&mut out, &v.num.to_bytes_be());
        put_bytes(&mut out, &v.den.to_bytes_be());
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| FormatError::new(0, format!("truncated table cache at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn big(&mut self) -> Result<BigUint, FormatError> {
        let n = self.u32()? as usize;
        Ok(BigUint::from_bytes_be(self.take(n)?))
    }
}

pub fn read_cg_cache(buf: &[u8]) -> Result<CgTable, FormatError> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(CG_MAGIC.len())? != CG_MAGIC {
        return Err(FormatError::new(0, "not a table cache"));
    }
    let version = r.u32()?;
    if version != CG_VERSION {
        return Err(FormatError::new(0, format!("unsupported table cache version {version}")));
    }
    let max_n = r.u32()?;
    let count = r.u64()? as usize;
    let mut keys = Vec::with_capacity(count.min(1 << 24));
    let mut values = Vec::with_capacity(count.min(1 << 24));
    for _ in 0..count {
        keys.push(r.u64()?);
        let sign = r.take(1)?[0] as i8;
        if sign != 1 && sign != -1 {
            return Err(FormatError::new(0, "bad sign byte in table cache"));
        }
        let num = r.big()?;
        let den = r.big()?;
        values.push(ExactSquare { sign, num, den });
    }
    if r.pos != buf.len() {
        return Err(FormatError::new(0, "trailing bytes in table cache"));
    }
    CgTable::from_parts(max_n, keys, values).map_err(|e| FormatError::new(0, e.to_string()))
}
