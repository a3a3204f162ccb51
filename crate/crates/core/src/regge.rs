//! Exact squared Clebsch-Gordan coefficients through Regge symbols.
//!
//! A Regge symbol is a 3x3 matrix of nonnegative integers whose rows and
//! columns all sum to the same `J`. The 72 row/column permutations and
//! the transpose leave its absolute value unchanged; odd permutations
//! multiply it by `(-1)^J`. Each orbit has a canonical representative
//!
//! ```text
//!     [ S        L        X+B-T ]
//!     [ X        B        S+L-T ]
//!     [ L+B-T    S+X-T    T     ]
//! ```
//!
//! with `L >= X >= T >= B >= S >= 0` and `2T <= L+S`, and canonical tuples
//! are ranked lexicographically by `(L, S, T, X, B)`. [`CgTable`] stores
//! exact squared values keyed by that rank.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Index;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReggeError {
    Invalid([[i64; 3]; 3]),
    NotCanonical { l: u32, s: u32, t: u32, x: u32, b: u32 },
    /// A query needs a larger table than the one built.
    TableTooSmall { required: u32, available: u32 },
    /// A query that the table was not built for.
    Missing { n1: i64, m1: i64, n2: i64, m2: i64, n3: i64 },
    /// Allocation of a table with this many entries would be refused.
    Resource { entries: u64 },
    Format(&'static str),
}

impl fmt::Display for ReggeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReggeError::Invalid(m) => write!(f, "invalid Regge matrix {m:?}"),
            ReggeError::NotCanonical { l, s, t, x, b } => {
                write!(f, "({l},{s},{t},{x},{b}) violates the canonical ordering")
            }
            ReggeError::TableTooSmall { required, available } => write!(
                f,
                "Clebsch-Gordan table built for max_n = {available}, query needs max_n >= {required}"
            ),
            ReggeError::Missing { n1, m1, n2, m2, n3 } => {
                write!(f, "no table entry for ({n1},{m1},{n2},{m2},{n3})")
            }
            ReggeError::Resource { entries } => {
                write!(f, "table with {entries} entries exceeds the resource limit")
            }
            ReggeError::Format(s) => write!(f, "table format error: {s}"),
        }
    }
}

/// A 3x3 integer matrix, possibly invalid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ReggeMatrix(pub [[i64; 3]; 3]);

impl Index<(usize, usize)> for ReggeMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.0[i][j]
    }
}

impl ReggeMatrix {
    /// Common row/column sum if the matrix is a valid Regge symbol.
    pub fn magic_sum(&self) -> Option<i64> {
        let m = &self.0;
        let j = m[0][0] + m[0][1] + m[0][2];
        for i in 0..3 {
            if m[i].iter().any(|&v| v < 0) {
                return None;
            }
            if m[i][0] + m[i][1] + m[i][2] != j || m[0][i] + m[1][i] + m[2][i] != j {
                return None;
            }
        }
        Some(j)
    }

    pub fn is_valid(&self) -> bool {
        self.magic_sum().is_some()
    }

    pub fn transpose(&self) -> ReggeMatrix {
        let m = &self.0;
        let mut t = [[0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = m[j][i];
            }
        }
        ReggeMatrix(t)
    }

    /// Applies row permutation `rp` and column permutation `cp`:
    /// the result has entry `(i, j) = self(rp[i], cp[j])`.
    pub fn permuted(&self, rp: [usize; 3], cp: [usize; 3]) -> ReggeMatrix {
        let mut t = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                t[i][j] = self.0[rp[i]][cp[j]];
            }
        }
        ReggeMatrix(t)
    }

    /// The symbol for the coupling of `(n1/2, m1/2)` and `(n2/2, m2/2)` to
    /// `(n3/2, (m1+m2)/2)`, or `None` if some entry is not an integer.
    pub fn from_cg(n1: i64, m1: i64, n2: i64, m2: i64, n3: i64) -> Option<ReggeMatrix> {
        let m3 = m1 + m2;
        let e = [
            [n2 + n3 - n1, n3 + n1 - n2, n1 + n2 - n3],
            [n1 - m1, n2 - m2, n3 + m3],
            [n1 + m1, n2 + m2, n3 - m3],
        ];
        let mut out = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                if e[i][j].rem_euclid(2) != 0 {
                    return None;
                }
                out[i][j] = e[i][j] / 2;
            }
        }
        Some(ReggeMatrix(out))
    }
}

/// Parity of a permutation of three elements.
fn perm_parity(p: [usize; 3]) -> u8 {
    let mut inv = 0;
    for i in 0..3 {
        for j in i + 1..3 {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2
}

/// Canonical tuple `(L, S, T, X, B)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalRegge {
    pub l: u32,
    pub s: u32,
    pub t: u32,
    pub x: u32,
    pub b: u32,
}

impl CanonicalRegge {
    pub fn satisfies_invariants(&self) -> bool {
        let &CanonicalRegge { l, s, t, x, b } = self;
        l >= x && x >= t && t >= b && b >= s && 2 * t <= l + s
    }

    pub fn expand(&self) -> ReggeMatrix {
        let (l, s, t, x, b) =
            (self.l as i64, self.s as i64, self.t as i64, self.x as i64, self.b as i64);
        ReggeMatrix([
            [s, l, x + b - t],
            [x, b, s + l - t],
            [l + b - t, s + x - t, t],
        ])
    }

    fn key(&self) -> (u32, u32, u32, u32, u32) {
        (self.l, self.s, self.t, self.x, self.b)
    }
}

/// Canonical representative of the symmetry orbit of `r`, and whether an
/// odd permutation maps `r` onto it. The symbol of `r` equals the symbol
/// of the canonical matrix times `(-1)^(J * exponent)`.
pub fn normal_form(r: &ReggeMatrix) -> Result<(CanonicalRegge, u8), ReggeError> {
    if !r.is_valid() {
        return Err(ReggeError::Invalid(r.0));
    }
    let mut max = i64::MIN;
    let mut min = i64::MAX;
    for row in &r.0 {
        for &v in row {
            max = max.max(v);
            min = min.min(v);
        }
    }
    let mut best: Option<(CanonicalRegge, u8)> = None;
    for tr in [false, true] {
        let m = if tr { r.transpose() } else { *r };
        for i in 0..3 {
            for cmax in 0..3 {
                if m.0[i][cmax] != max {
                    continue;
                }
                for cmin in 0..3 {
                    if cmin == cmax || m.0[i][cmin] != min {
                        continue;
                    }
                    let c3 = 3 - cmax - cmin;
                    let cp = [cmin, cmax, c3];
                    let (r1, r2) = match i {
                        0 => (1, 2),
                        1 => (0, 2),
                        _ => (0, 1),
                    };
                    for rp in [[i, r1, r2], [i, r2, r1]] {
                        let p = m.permuted(rp, cp);
                        let (s, l, x, b, t) = (p.0[0][0], p.0[0][1], p.0[1][0], p.0[1][1], p.0[2][2]);
                        let c = CanonicalRegge {
                            l: l as u32,
                            s: s as u32,
                            t: t as u32,
                            x: x as u32,
                            b: b as u32,
                        };
                        if !c.satisfies_invariants() {
                            continue;
                        }
                        let e = (perm_parity(rp) + perm_parity(cp)) % 2;
                        match &best {
                            Some((bc, be)) if (bc.key(), *be) <= (c.key(), e) => {}
                            _ => best = Some((c, e)),
                        }
                    }
                }
            }
        }
    }
    best.ok_or(ReggeError::Invalid(r.0))
}

/// Signed exact square: the symbol is `sign * sqrt(num / den)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactSquare {
    pub sign: i8,
    pub num: BigUint,
    pub den: BigUint,
}

impl ExactSquare {
    pub fn zero() -> ExactSquare {
        ExactSquare { sign: 1, num: BigUint::zero(), den: BigUint::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The squared value multiplied by a positive integer, in lowest terms.
    pub fn times(&self, k: u64) -> ExactSquare {
        let k = BigUint::from(k);
        let g = k.gcd(&self.den);
        ExactSquare {
            sign: self.sign,
            num: &self.num * (&k / &g),
            den: &self.den / g,
        }
    }

    pub fn flip_sign_if(mut self, odd: bool) -> ExactSquare {
        if odd && !self.is_zero() {
            self.sign = -self.sign;
        }
        self
    }
}

impl fmt::Display for ExactSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign < 0 { "-" } else { "+" };
        write!(f, "{s}sqrt({}/{})", self.num, self.den)
    }
}

/// Small prime sieve.
fn primes_upto(n: usize) -> Vec<u32> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| sieve[k]).map(|k| k as u32).collect()
}

/// Exponent of `p` in `n!` (Legendre).
fn legendre(n: i64, p: u32) -> i64 {
    let p = p as i64;
    let mut e = 0;
    let mut q = n / p;
    while q > 0 {
        e += q;
        q /= p;
    }
    e
}

/// Exact signed squared value of the Regge symbol; invalid input gives 0.
pub fn value_squared(r: &ReggeMatrix) -> ExactSquare {
    let Some(j) = r.magic_sum() else {
        return ExactSquare::zero();
    };
    let e = |i: usize, k: usize| r.0[i][k];
    let a = e(0, 1) - e(1, 0); // R12 - R21
    let bq = e(0, 0) - e(2, 1); // R11 - R32
    let kmin = 0.max(-a).max(-bq);
    let kmax = e(0, 2).min(e(1, 0)).min(e(2, 1));
    if kmin > kmax {
        return ExactSquare::zero();
    }
    let primes = primes_upto((j + 1) as usize);
    let q_args = |k: i64| [k, a + k, bq + k, e(0, 2) - k, e(1, 0) - k, e(2, 1) - k];

    // Exponents of the LCM of all Q_k, and of Q_kmin.
    let mut lcm = vec![0i64; primes.len()];
    let mut first = vec![0i64; primes.len()];
    for k in kmin..=kmax {
        let args = q_args(k);
        for (pi, &p) in primes.iter().enumerate() {
            let ex: i64 = args.iter().map(|&n| legendre(n, p)).sum();
            if k == kmin {
                first[pi] = ex;
            }
            lcm[pi] = lcm[pi].max(ex);
        }
    }
    // T_k = LCM / Q_k, stepped by the exact ratio Q_k / Q_{k+1}.
    let mut t = BigUint::one();
    for (pi, &p) in primes.iter().enumerate() {
        let d = lcm[pi] - first[pi];
        if d > 0 {
            t *= BigUint::from(p).pow(d as u32);
        }
    }
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    for k in kmin..=kmax {
        if k % 2 == 0 {
            pos += &t;
        } else {
            neg += &t;
        }
        if k < kmax {
            let up = ((e(0, 2) - k) * (e(1, 0) - k)) as u64 * (e(2, 1) - k) as u64;
            let dn = ((k + 1) * (a + k + 1)) as u64 * (bq + k + 1) as u64;
            t *= up;
            t /= dn;
        }
    }
    let (mut s, s_sign) = if pos >= neg { (pos - neg, 1i8) } else { (neg - pos, -1i8) };
    if s.is_zero() {
        return ExactSquare::zero();
    }
    // Total exponent of each prime in prod R_ij! / ((J+1)! LCM^2).
    let mut ex = vec![0i64; primes.len()];
    for (pi, &p) in primes.iter().enumerate() {
        let mut v: i64 = 0;
        for row in &r.0 {
            for &n in row {
                v += legendre(n, p);
            }
        }
        ex[pi] = v - legendre(j + 1, p) - 2 * lcm[pi];
    }
    for (pi, &p) in primes.iter().enumerate() {
        while ex[pi] < 0 {
            let (q, rem) = s.div_rem(&BigUint::from(p));
            if !rem.is_zero() {
                break;
            }
            s = q;
            ex[pi] += 2;
        }
    }
    let mut num = &s * &s;
    let mut den = BigUint::one();
    for (pi, &p) in primes.iter().enumerate() {
        if ex[pi] > 0 {
            num *= BigUint::from(p).pow(ex[pi] as u32);
        } else if ex[pi] < 0 {
            den *= BigUint::from(p).pow((-ex[pi]) as u32);
        }
    }
    let phase_odd = (e(0, 1) - e(2, 2)).rem_euclid(2) == 1;
    let sign = if phase_odd { -s_sign } else { s_sign };
    ExactSquare { sign, num, den }
}

/// Selection rules for the product `V^{m1}_{n1} V^{m2}_{n2} -> V^{m1+m2}_{n3}`.
pub fn cg_admissible(n1: i64, m1: i64, n2: i64, m2: i64, n3: i64) -> bool {
    let m3 = m1 + m2;
    let ok = |n: i64, m: i64| n >= m.abs() && (n - m).rem_euclid(2) == 0;
    ok(n1, m1) && ok(n2, m2) && ok(n3, m3) && n3 <= n1 + n2 && n3 >= (n1 - n2).abs()
}

/// Squared Clebsch-Gordan coefficient `C^{m1,m2,m1+m2}_{n1,n2,n3}` with the
/// sign of the coefficient itself. Inadmissible queries give 0.
pub fn cg_squared(n1: i64, m1: i64, n2: i64, m2: i64, n3: i64) -> ExactSquare {
    if !cg_admissible(n1, m1, n2, m2, n3) {
        return ExactSquare::zero();
    }
    let r = ReggeMatrix::from_cg(n1, m1, n2, m2, n3).expect("admissible queries are integral");
    let v = value_squared(&r);
    let phase_odd = ((n1 - n2 + m1 + m2) / 2).rem_euclid(2) == 1;
    v.times((n3 + 1) as u64).flip_sign_if(phase_odd)
}

/// Number of canonical tuples with given `(l, s, t)`.
#[inline]
fn block(l: u64, s: u64, t: u64) -> u64 {
    (l - t + 1) * (t - s + 1)
}

/// Largest admissible `t` for given `(l, s)`.
#[inline]
fn t_max(l: u32, s: u32) -> u32 {
    (l + s) / 2
}

/// Rank of canonical tuples in the lexicographic enumeration, served by a
/// dense cube of prefix counts over `(L, S, T)`.
#[derive(Clone, Debug)]
pub struct ReggeIndexer {
    lmax: u32,
    aux: Vec<u64>,
}

impl ReggeIndexer {
    pub fn new(lmax: u32) -> ReggeIndexer {
        let d = (lmax + 1) as usize;
        let mut aux = vec![0u64; d * d * d];
        let mut acc = 0u64;
        for l in 0..=lmax {
            for s in 0..=l {
                for t in s..=t_max(l, s) {
                    aux[(l as usize * d + s as usize) * d + t as usize] = acc;
                    acc += block(l as u64, s as u64, t as u64);
                }
            }
        }
        ReggeIndexer { lmax, aux }
    }

    pub fn lmax(&self) -> u32 {
        self.lmax
    }

    /// Number of canonical tuples with `L <= lmax`.
    pub fn count(lmax: u32) -> u64 {
        let mut acc = 0u64;
        for l in 0..=lmax {
            for s in 0..=l {
                for t in s..=t_max(l, s) {
                    acc += block(l as u64, s as u64, t as u64);
                }
            }
        }
        acc
    }

    /// Five-fold prefix count for `(L, S, T)`.
    pub fn aux(&self, l: u32, s: u32, t: u32) -> u64 {
        let d = (self.lmax + 1) as usize;
        self.aux[(l as usize * d + s as usize) * d + t as usize]
    }

    /// One-based rank of `c`.
    pub fn index(&self, c: &CanonicalRegge) -> Result<u64, ReggeError> {
        if !c.satisfies_invariants() {
            return Err(ReggeError::NotCanonical { l: c.l, s: c.s, t: c.t, x: c.x, b: c.b });
        }
        if c.l > self.lmax {
            return Err(ReggeError::TableTooSmall { required: c.l, available: self.lmax });
        }
        let within = (c.x - c.t) as u64 * (c.t - c.s + 1) as u64 + (c.b - c.s + 1) as u64;
        Ok(self.aux(c.l, c.s, c.t) + within)
    }
}

/// One-based rank of a canonical tuple, without a precomputed cube.
pub fn index(c: &CanonicalRegge) -> Result<u64, ReggeError> {
    if !c.satisfies_invariants() {
        return Err(ReggeError::NotCanonical { l: c.l, s: c.s, t: c.t, x: c.x, b: c.b });
    }
    let mut acc = if c.l == 0 { 0 } else { ReggeIndexer::count(c.l - 1) };
    for s in 0..c.s {
        for t in s..=t_max(c.l, s) {
            acc += block(c.l as u64, s as u64, t as u64);
        }
    }
    for t in c.s..c.t {
        acc += block(c.l as u64, c.s as u64, t as u64);
    }
    Ok(acc + (c.x - c.t) as u64 * (c.t - c.s + 1) as u64 + (c.b - c.s + 1) as u64)
}

/// Exact squared Regge values for every canonical class reachable from a
/// product of Zernike modes with all degrees `n1, n2, n3 <= max_n`.
#[derive(Clone, Debug)]
pub struct CgTable {
    max_n: u32,
    indexer: ReggeIndexer,
    /// Sorted canonical indices.
    keys: Vec<u64>,
    values: Vec<ExactSquare>,
}

/// Upper limit on stored entries before a build is refused.
pub const MAX_TABLE_ENTRIES: u64 = 200_000_000;

/// Visits every admissible `(n1, m1, n2, m2, n3)` with `m1, m2 >= 0` or
/// `m2 < 0`, degrees bounded by `max_n`, `m1 >= 0` (the sign flip of all
/// three momenta is a Regge symmetry).
fn for_each_query(max_n: u32, mut f: impl FnMut(i64, i64, i64, i64, i64)) {
    let n = max_n as i64;
    for n1 in 0..=n {
        for m1 in (0..=n1).rev().step_by(2) {
            for n2 in 0..=n1 {
                for m2 in (-n2..=n2).step_by(2) {
                    let m3 = m1 + m2;
                    let lo = (n1 - n2).max(m3.abs());
                    let hi = (n1 + n2).min(n);
                    let mut n3 = lo + (lo - m3).rem_euclid(2);
                    while n3 <= hi {
                        f(n1, m1, n2, m2, n3);
                        n3 += 2;
                    }
                }
            }
        }
    }
}

impl CgTable {
    /// Builds the table for all queries with `n1, n2, n3 <= max_n`.
    pub fn build(max_n: u32) -> Result<CgTable, ReggeError> {
        let lmax = (3 * max_n).div_ceil(2);
        let indexer = ReggeIndexer::new(lmax);
        let mut set = BTreeSet::new();
        for_each_query(max_n, |n1, m1, n2, m2, n3| {
            let r = ReggeMatrix::from_cg(n1, m1, n2, m2, n3).expect("admissible");
            let (c, _) = normal_form(&r).expect("valid");
            set.insert(c);
        });
        let entries = set.len() as u64;
        if entries > MAX_TABLE_ENTRIES {
            return Err(ReggeError::Resource { entries });
        }
        let mut keys = Vec::with_capacity(set.len());
        let mut values = Vec::with_capacity(set.len());
        for c in set {
            keys.push(indexer.index(&c)?);
            values.push(value_squared(&c.expand()));
        }
        Ok(CgTable { max_n, indexer, keys, values })
    }

    /// Reassembles a table from stored parts; keys must be sorted.
    pub fn from_parts(max_n: u32, keys: Vec<u64>, values: Vec<ExactSquare>) -> Result<CgTable, ReggeError> {
        if keys.len() != values.len() || keys.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ReggeError::Format("keys must be strictly increasing"));
        }
        let indexer = ReggeIndexer::new((3 * max_n).div_ceil(2));
        Ok(CgTable { max_n, indexer, keys, values })
    }

    pub fn max_n(&self) -> u32 {
        self.max_n
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn values(&self) -> &[ExactSquare] {
        &self.values
    }

    pub fn indexer(&self) -> &ReggeIndexer {
        &self.indexer
    }

    /// Position of a canonical index among the stored keys.
    pub fn position(&self, idx: u64) -> Option<usize> {
        self.keys.binary_search(&idx).ok()
    }

    /// Signed squared Regge value for any matrix in the table's range.
    pub fn get_regge(&self, r: &ReggeMatrix) -> Result<ExactSquare, ReggeError> {
        let j = r.magic_sum().ok_or(ReggeError::Invalid(r.0))?;
        let (c, e) = normal_form(r)?;
        let idx = self.indexer.index(&c)?;
        let pos = self.position(idx).ok_or(ReggeError::Invalid(r.0))?;
        Ok(self.values[pos].clone().flip_sign_if(e == 1 && j % 2 == 1))
    }

    /// Table-backed [`cg_squared`].
    pub fn cg_squared(&self, n1: i64, m1: i64, n2: i64, m2: i64, n3: i64) -> Result<ExactSquare, ReggeError> {
        if !cg_admissible(n1, m1, n2, m2, n3) {
            return Ok(ExactSquare::zero());
        }
        let need = n1.max(n2).max(n3) as u32;
        if need > self.max_n {
            return Err(ReggeError::TableTooSmall { required: need, available: self.max_n });
        }
        let r = ReggeMatrix::from_cg(n1, m1, n2, m2, n3).expect("admissible");
        let v = self
            .get_regge(&r)
            .map_err(|_| ReggeError::Missing { n1, m1, n2, m2, n3 })?;
        let phase_odd = ((n1 - n2 + m1 + m2) / 2).rem_euclid(2) == 1;
        Ok(v.times((n3 + 1) as u64).flip_sign_if(phase_odd))
    }
}

/// Converts a squared value to the signed rational `sign * num / den`
/// as numerator and denominator.
pub fn signed_ratio(v: &ExactSquare) -> (BigInt, BigUint) {
    let s = if v.sign < 0 { Sign::Minus } else { Sign::Plus };
    (BigInt::from_biguint(s, v.num.clone()), v.den.clone())
}

/// Float approximation of the squared value (non-rigorous, for diagnostics).
pub fn approx_f64(v: &ExactSquare) -> f64 {
    let n = v.num.to_f64().unwrap_or(f64::INFINITY);
    let d = v.den.to_f64().unwrap_or(f64::INFINITY);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        let shift = v.den.bits().max(v.num.bits()).saturating_sub(900) as usize;
        (&v.num >> shift).to_f64().unwrap_or(0.0) / (&v.den >> shift).to_f64().unwrap_or(1.0)
    }
}
