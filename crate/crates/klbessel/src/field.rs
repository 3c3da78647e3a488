//! Exact arithmetic, trace/norm and enumeration for `F_{p^s}`.
//!
//! Elements are stored as packed indices `sum c_i p^i` into table-backed
//! fields: multiplication runs through discrete-log tables, addition through
//! split digit tables (digitwise mod-p addition has no carries, so the low
//! and high halves of the index add independently). Fields are immutable and
//! cheaply cloneable; construction is deterministic for fixed `(p, s)`.

use crate::{Error, Result};
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

/// Construction cap: table building is O(q s^2) and enumeration-based sums
/// are O(q^k), so desk-scale fields only.
pub const MAX_Q: u64 = 1 << 20;

/// Serializable field descriptor. `modulus` lists the monic irreducible as
/// `[c_0, ..., c_{s-1}, 1]`; degree-1 fields use the degenerate modulus `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldDesc {
    pub p: u64,
    pub s: u32,
    pub modulus: Vec<u64>,
}

struct FieldData {
    desc: FieldDesc,
    q: u64,
    /// index of a fixed primitive element (least primitive index)
    generator: u32,
    /// exp[k] = index of g^k, k in [0, q-1)
    exp: Vec<u32>,
    /// log[idx] for idx != 0; log[0] is unused
    log: Vec<u32>,
    /// split addition tables: idx = lo + hi * p^t
    lo_mod: u32,
    hi_mod: u32,
    lo_add: Vec<u32>,
    hi_add: Vec<u32>,
    neg: Vec<u32>,
    /// absolute trace to F_p, as a digit in [0, p)
    trace: Vec<u8>,
}

/// A finite field `F_{p^s}` with precomputed tables. Cloning is cheap.
#[derive(Clone)]
pub struct Field(Arc<FieldData>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.desc == other.0.desc
    }
}
impl Eq for Field {}

/// An element of a [`Field`], stored as its packed index.
#[derive(Clone)]
pub struct FqElem {
    field: Field,
    idx: u32,
}

// ---------------------------------------------------------------------------
// polynomial helpers over F_p (dense, little-endian coefficients)

fn poly_trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.iter().map(|&c| c % p).collect();
    let dm = m.len() - 1;
    assert_eq!(m[dm], 1, "modulus must be monic");
    let mut deg = r.len();
    while deg > dm {
        let lead = r[deg - 1];
        if lead != 0 {
            let shift = deg - 1 - dm;
            for i in 0..=dm {
                let t = (m[i] % p) * lead % p;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
        }
        r.pop();
        deg -= 1;
    }
    if r.is_empty() {
        r.push(0);
    }
    poly_trim(&mut r);
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_pow_p_mod(a: &[u64], e: u64, m: &[u64], p: u64) -> Vec<u64> {
    // a^e mod m by square-and-multiply
    let mut base = a.to_vec();
    let mut acc = vec![1u64];
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, m, p);
        }
        base = poly_mulmod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        // make b monic for poly_rem
        let lead = *b.last().unwrap();
        let inv = mod_inverse(lead, p);
        let bm: Vec<u64> = b.iter().map(|&c| (c * inv) % p).collect();
        let r = poly_rem(&a, &bm, p);
        a = b;
        b = r;
    }
    a
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a != 0 mod p
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Irreducibility over F_p via gcd(x^{p^k} - x, m) = 1 for 1 <= k < s and
/// x^{p^s} = x mod m.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let s = (m.len() - 1) as u32;
    if s == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let mut xp = x.clone();
    for k in 1..=s {
        xp = poly_pow_p_mod(&xp, p, m, p);
        if k < s {
            // x^{p^k} - x
            let mut diff = xp.clone();
            if diff.len() < 2 {
                diff.resize(2, 0);
            }
            diff[1] = (diff[1] + p - 1) % p;
            poly_trim(&mut diff);
            if diff.len() == 1 && diff[0] == 0 {
                return false; // x^{p^k} = x already: factor of degree dividing k
            }
            let g = poly_gcd(m, &diff, p);
            if g.len() > 1 {
                return false;
            }
        } else {
            let mut diff = xp.clone();
            if diff.len() < 2 {
                diff.resize(2, 0);
            }
            diff[1] = (diff[1] + p - 1) % p;
            poly_trim(&mut diff);
            if !(diff.len() == 1 && diff[0] == 0) {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------

impl Field {
    /// Build `F_{p^s}` with the deterministic modulus: the lexicographically
    /// least (by packed constant-first coefficient value) monic irreducible.
    pub fn new(p: u64, s: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if s < 1 {
            return Err(Error::InvalidParameter("extension degree must be >= 1".into()));
        }
        let q = checked_pow(p, s)?;
        if s == 1 {
            // degenerate modulus x, so all code paths are uniform
            return Self::build(FieldDesc { p, s, modulus: vec![0, 1] }, q);
        }
        // search packed lower-coefficient values in increasing order
        let mut c = 0u64;
        loop {
            if c >= q {
                unreachable!("an irreducible of every degree exists");
            }
            let mut m = unpack(c, p, s as usize);
            m.push(1);
            if is_irreducible(&m, p) {
                return Self::build(FieldDesc { p, s, modulus: m }, q);
            }
            c += 1;
        }
    }

    /// Build with a caller-supplied monic irreducible modulus.
    pub fn with_modulus(p: u64, s: u32, modulus: Vec<u64>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let q = checked_pow(p, s)?;
        if modulus.len() != s as usize + 1 || *modulus.last().unwrap() != 1 {
            return Err(Error::BadModulusDegree {
                expected: s,
                got: modulus.len().saturating_sub(1) as u32,
            });
        }
        let modulus: Vec<u64> = modulus.iter().map(|&c| c % p).collect();
        let mut m = modulus.clone();
        m[s as usize] = 1;
        if s > 1 && !is_irreducible(&m, p) {
            return Err(Error::ReducibleModulus(p));
        }
        Self::build(FieldDesc { p, s, modulus: m }, q)
    }

    fn build(desc: FieldDesc, q: u64) -> Result<Field> {
        let p = desc.p;
        let s = desc.s as usize;

        // split addition tables: digitwise mod-p addition, no carries
        let t = (s + 1) / 2;
        let lo_mod = checked_pow(p, t as u32)? as u32;
        let hi_mod = ((q / lo_mod as u64) as u32).max(1);
        let lo_add = build_add_table(lo_mod, p);
        let hi_add = build_add_table(hi_mod, p);

        let neg: Vec<u32> = (0..q as u32).map(|i| digit_neg(i, p, q as u32)).collect();

        // discrete log tables: multiply through coefficient space
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![0u32; q as usize];
        let generator = find_generator(&desc, q)?;
        let gen_poly = unpack(generator as u64, p, s);
        let mut cur = vec![1u64];
        for (k, e) in exp.iter_mut().enumerate() {
            let idx = pack(&cur, p) as u32;
            *e = idx;
            log[idx as usize] = k as u32;
            cur = poly_mulmod(&cur, &gen_poly, &desc.modulus, p);
        }
        debug_assert_eq!(pack(&cur, p), 1, "generator order must be q-1");

        // absolute trace to F_p: x + x^p + ... + x^{p^{s-1}}, via log tables
        let qm1 = q - 1;
        let mut trace = vec![0u8; q as usize];
        for idx in 1..q as u32 {
            let mut acc = 0u32;
            let mut x = idx;
            for _ in 0..s {
                acc = {
                    // digitwise add of constant digits only matters at the end,
                    // so accumulate full field adds
                    let (al, ah) = (acc % lo_mod, acc / lo_mod);
                    let (bl, bh) = (x % lo_mod, x / lo_mod);
                    lo_add[(al * lo_mod + bl) as usize]
                        + lo_mod * hi_add[(ah * hi_mod + bh) as usize]
                };
                // frobenius x -> x^p via logs
                x = exp[((log[x as usize] as u64 * p) % qm1) as usize];
            }
            debug_assert!((acc as u64) < p, "trace must land in the prime field");
            trace[idx as usize] = acc as u8;
        }

        Ok(Field(Arc::new(FieldData {
            desc,
            q,
            generator,
            exp,
            log,
            lo_mod,
            hi_mod,
            lo_add,
            hi_add,
            neg,
            trace,
        })))
    }

    pub fn p(&self) -> u64 {
        self.0.desc.p
    }
    pub fn s(&self) -> u32 {
        self.0.desc.s
    }
    pub fn q(&self) -> u64 {
        self.0.q
    }
    pub fn desc(&self) -> &FieldDesc {
        &self.0.desc
    }
    pub fn generator(&self) -> FqElem {
        self.elem(self.0.generator)
    }

    pub fn elem(&self, idx: u32) -> FqElem {
        debug_assert!((idx as u64) < self.q());
        FqElem { field: self.clone(), idx }
    }

    /// Element from base-p coefficients (low degree first).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> FqElem {
        let p = self.p();
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * p + (c % p);
        }
        self.elem(idx as u32)
    }

    /// The image of an integer under Z -> F_p -> F_q.
    pub fn from_int(&self, n: i64) -> FqElem {
        let p = self.p() as i64;
        let r = ((n % p) + p) % p;
        self.elem(r as u32)
    }

    pub fn zero(&self) -> FqElem {
        self.elem(0)
    }
    pub fn one(&self) -> FqElem {
        self.elem(1)
    }

    /// All q elements, index order.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        (0..self.q() as u32).map(move |i| self.elem(i))
    }

    /// The q-1 nonzero elements, each exactly once, in index order.
    pub fn units(&self) -> impl Iterator<Item = FqElem> + '_ {
        (1..self.q() as u32).map(move |i| self.elem(i))
    }

    // -- index-level ops (hot paths) ---------------------------------------

    #[inline]
    pub fn add_idx(&self, a: u32, b: u32) -> u32 {
        let d = &self.0;
        let (al, ah) = (a % d.lo_mod, a / d.lo_mod);
        let (bl, bh) = (b % d.lo_mod, b / d.lo_mod);
        d.lo_add[(al * d.lo_mod + bl) as usize] + d.lo_mod * d.hi_add[(ah * d.hi_mod + bh) as usize]
    }

    #[inline]
    pub fn neg_idx(&self, a: u32) -> u32 {
        self.0.neg[a as usize]
    }

    #[inline]
    pub fn sub_idx(&self, a: u32, b: u32) -> u32 {
        self.add_idx(a, self.neg_idx(b))
    }

    #[inline]
    pub fn mul_idx(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let d = &self.0;
        let qm1 = (d.q - 1) as u64;
        let k = (d.log[a as usize] as u64 + d.log[b as usize] as u64) % qm1;
        d.exp[k as usize]
    }

    #[inline]
    pub fn inv_idx(&self, a: u32) -> u32 {
        assert!(a != 0, "inverting zero");
        let d = &self.0;
        let qm1 = (d.q - 1) as u64;
        let k = (qm1 - d.log[a as usize] as u64) % qm1;
        d.exp[k as usize]
    }

    #[inline]
    pub fn pow_idx(&self, a: u32, e: u64) -> u32 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let d = &self.0;
        let qm1 = (d.q - 1) as u64;
        let k = (d.log[a as usize] as u64 % qm1) as u128 * (e % qm1) as u128 % qm1 as u128;
        d.exp[k as usize]
    }

    #[inline]
    pub fn trace_idx(&self, a: u32) -> u8 {
        self.0.trace[a as usize]
    }

    #[inline]
    pub fn log_idx(&self, a: u32) -> u32 {
        assert!(a != 0);
        self.0.log[a as usize]
    }

    #[inline]
    pub fn exp_idx(&self, k: u64) -> u32 {
        self.0.exp[(k % (self.q() - 1)) as usize]
    }

    /// The prime subfield as a standalone field.
    pub fn prime_field(&self) -> Field {
        if self.s() == 1 {
            self.clone()
        } else {
            Field::new(self.p(), 1).expect("prime field")
        }
    }
}

fn checked_pow(p: u64, s: u32) -> Result<u64> {
    let mut q = 1u64;
    for _ in 0..s {
        q = q.checked_mul(p).ok_or(Error::FieldTooLarge(u64::MAX))?;
        if q > MAX_Q {
            return Err(Error::FieldTooLarge(q));
        }
    }
    Ok(q)
}

fn unpack(mut idx: u64, p: u64, s: usize) -> Vec<u64> {
    let mut out = vec![0u64; s];
    for o in out.iter_mut() {
        *o = idx % p;
        idx /= p;
    }
    out
}

fn pack(coeffs: &[u64], p: u64) -> u64 {
    let mut idx = 0u64;
    for &c in coeffs.iter().rev() {
        idx = idx * p + (c % p);
    }
    idx
}

fn build_add_table(size: u32, p: u64) -> Vec<u32> {
    let mut t = vec![0u32; (size as usize) * (size as usize)];
    for a in 0..size {
        for b in 0..size {
            t[(a * size + b) as usize] = digit_add(a, b, p);
        }
    }
    t
}

fn digit_add(a: u32, b: u32, p: u64) -> u32 {
    let (mut a, mut b) = (a as u64, b as u64);
    let mut out = 0u64;
    let mut mult = 1u64;
    while a > 0 || b > 0 {
        out += ((a % p + b % p) % p) * mult;
        a /= p;
        b /= p;
        mult *= p;
    }
    out as u32
}

fn digit_neg(a: u32, p: u64, _q: u32) -> u32 {
    let mut a = a as u64;
    let mut out = 0u64;
    let mut mult = 1u64;
    while a > 0 {
        let d = a % p;
        out += (if d == 0 { 0 } else { p - d }) * mult;
        a /= p;
        mult *= p;
    }
    out as u32
}

fn find_generator(desc: &FieldDesc, q: u64) -> Result<u32> {
    let fac = prime_factors(q - 1);
    let p = desc.p;
    let s = desc.s as usize;
    'cand: for idx in 2..q {
        let a = unpack(idx, p, s);
        for &f in &fac {
            let e = (q - 1) / f;
            let pw = poly_pow_p_mod(&a, e, &desc.modulus, p);
            if pack(&pw, p) == 1 {
                continue 'cand;
            }
        }
        return Ok(idx as u32);
    }
    // q = 2 has generator 1
    Ok(1)
}

// ---------------------------------------------------------------------------

impl FqElem {
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn idx(&self) -> u32 {
        self.idx
    }
    pub fn is_zero(&self) -> bool {
        self.idx == 0
    }

    /// Base-p coefficients in the polynomial basis, low degree first.
    pub fn coeffs(&self) -> Vec<u64> {
        unpack(self.idx as u64, self.field.p(), self.field.s() as usize)
    }

    pub fn add(&self, other: &FqElem) -> FqElem {
        assert!(self.field == other.field, "mixed fields");
        self.field.elem(self.field.add_idx(self.idx, other.idx))
    }
    pub fn sub(&self, other: &FqElem) -> FqElem {
        assert!(self.field == other.field, "mixed fields");
        self.field.elem(self.field.sub_idx(self.idx, other.idx))
    }
    pub fn mul(&self, other: &FqElem) -> FqElem {
        assert!(self.field == other.field, "mixed fields");
        self.field.elem(self.field.mul_idx(self.idx, other.idx))
    }
    pub fn neg(&self) -> FqElem {
        self.field.elem(self.field.neg_idx(self.idx))
    }
    pub fn inv(&self) -> Result<FqElem> {
        if self.idx == 0 {
            return Err(Error::NonUnit);
        }
        Ok(self.field.elem(self.field.inv_idx(self.idx)))
    }
    pub fn pow(&self, e: u64) -> FqElem {
        self.field.elem(self.field.pow_idx(self.idx, e))
    }
    pub fn frobenius(&self) -> FqElem {
        self.pow(self.field.p())
    }

    /// Absolute trace `x + x^p + ... + x^{p^{s-1}}` as an element of the
    /// prime field.
    pub fn trace(&self) -> FqElem {
        let pf = self.field.prime_field();
        pf.elem(self.field.trace_idx(self.idx) as u32)
    }

    /// Trace as the canonical integer representative in `[0, p)`.
    pub fn trace_digit(&self) -> u64 {
        self.field.trace_idx(self.idx) as u64
    }

    /// Norm (product of all conjugates) as an element of the prime field.
    pub fn norm(&self) -> FqElem {
        let pf = self.field.prime_field();
        pf.elem(self.norm_digit() as u32)
    }

    pub fn norm_digit(&self) -> u64 {
        if self.idx == 0 {
            return 0;
        }
        let q = self.field.q();
        let p = self.field.p();
        let e = (q - 1) / (p - 1);
        let n = self.field.pow_idx(self.idx, e);
        debug_assert!((n as u64) < p, "norm must land in the prime field");
        n as u64
    }

    /// Norm to the subfield of degree `t` (which must divide s); the result
    /// is returned inside the ambient field and is fixed by Frob^t.
    pub fn norm_to_degree(&self, t: u32) -> Result<FqElem> {
        let s = self.field.s();
        if t == 0 || s % t != 0 {
            return Err(Error::NotASubfield { sub: t, amb: s });
        }
        if self.idx == 0 {
            return Ok(self.field.zero());
        }
        let q = self.field.q();
        let pt = self.field.p().pow(t);
        let e = (q - 1) / (pt - 1);
        let n = self.field.pow_idx(self.idx, e);
        Ok(self.field.elem(n))
    }

    /// Canonical integer representative for prime-field elements; feeds the
    /// Teichmuller lift.
    pub fn teichmuller_digit(&self) -> u64 {
        assert_eq!(self.field.s(), 1, "teichmuller_digit needs a prime field");
        self.idx as u64
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FqElem({} in F_{})", self.idx, self.field.q())
    }
}

impl PartialEq for FqElem {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.idx == other.idx
    }
}
impl Eq for FqElem {}

/// Explicit embedding of one field into another (y maps to the least root of
/// the subfield modulus). Not canonical across towers; see crate docs.
pub struct Embedding {
    map: Vec<u32>,
    sub: Field,
    ext: Field,
}

impl Embedding {
    pub fn new(sub: &Field, ext: &Field) -> Result<Embedding> {
        if sub.p() != ext.p() {
            return Err(Error::MixedFields);
        }
        if ext.s() % sub.s() != 0 {
            return Err(Error::NotASubfield { sub: sub.s(), amb: ext.s() });
        }
        // least root of the subfield modulus in ext
        let p = sub.p();
        let modulus = &sub.desc().modulus;
        let mut root: Option<u32> = None;
        'search: for cand in 0..ext.q() as u32 {
            // Horner evaluation of modulus at cand
            let mut acc = 0u32;
            for &c in modulus.iter().rev() {
                acc = ext.mul_idx(acc, cand);
                acc = ext.add_idx(acc, (c % p) as u32);
            }
            if acc == 0 {
                root = Some(cand);
                break 'search;
            }
        }
        let beta = root.ok_or(Error::NoEmbedding)?;
        // powers of beta
        let s = sub.s() as usize;
        let mut pows = vec![1u32; s];
        for i in 1..s {
            pows[i] = ext.mul_idx(pows[i - 1], beta);
        }
        let mut map = vec![0u32; sub.q() as usize];
        for (idx, m) in map.iter_mut().enumerate() {
            let coeffs = unpack(idx as u64, p, s);
            let mut acc = 0u32;
            for (i, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    // c * beta^i with c in the prime field
                    let term = ext.mul_idx((c % p) as u32, pows[i]);
                    acc = ext.add_idx(acc, term);
                }
            }
            *m = acc;
        }
        Ok(Embedding { map, sub: sub.clone(), ext: ext.clone() })
    }

    pub fn map(&self, x: &FqElem) -> FqElem {
        assert!(x.field() == &self.sub, "element not in the subfield");
        self.ext.elem(self.map[x.idx() as usize])
    }

    pub fn map_idx(&self, idx: u32) -> u32 {
        self.map[idx as usize]
    }

    pub fn sub(&self) -> &Field {
        &self.sub
    }
    pub fn ext(&self) -> &Field {
        &self.ext
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_moduli() {
        let f2 = Field::new(2, 1).unwrap();
        assert_eq!(f2.desc().modulus, vec![0, 1]);
        let f4 = Field::new(2, 2).unwrap();
        // unique irreducible quadratic over F_2
        assert_eq!(f4.desc().modulus, vec![1, 1, 1]);
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(f3.q(), 3);
        // x^2 + 1 is irreducible over F_3 and least in packed order
        let f9 = Field::new(3, 2).unwrap();
        assert_eq!(f9.desc().modulus, vec![1, 0, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Field::new(4, 1), Err(Error::NotPrime(4))));
        assert!(matches!(Field::new(15, 2), Err(Error::NotPrime(15))));
        // x^2 + 1 = (x+1)^2 over F_2
        assert!(matches!(
            Field::with_modulus(2, 2, vec![1, 0, 1]),
            Err(Error::ReducibleModulus(2))
        ));
        assert!(Field::new(2, 21).is_err()); // over the cap
    }

    #[test]
    fn f4_trace_norm() {
        let f4 = Field::new(2, 2).unwrap();
        let g = f4.from_coeffs(&[0, 1]); // root of x^2+x+1
        assert_eq!(f4.one().trace_digit(), 0); // 1 + 1 = 0 in char 2
        assert_eq!(g.trace_digit(), 1); // g + g^2 = g + g + 1 = 1
        assert_eq!(g.norm_digit(), 1); // g * g^2 = g^3 = 1
        assert_eq!(f4.one().norm_digit(), 1);
        assert_eq!(f4.zero().norm_digit(), 0);
    }

    #[test]
    fn f3_trace_identity() {
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(f3.elem(2).trace_digit(), 2);
        assert_eq!(f3.elem(2).teichmuller_digit(), 2);
    }

    #[test]
    fn units_enumeration() {
        for (p, s) in [(2u64, 1u32), (2, 2), (3, 2)] {
            let f = Field::new(p, s).unwrap();
            let units: Vec<_> = f.units().collect();
            assert_eq!(units.len(), (f.q() - 1) as usize);
            for u in &units {
                assert_eq!(u.pow(f.q() - 1).idx(), 1);
            }
        }
    }

    #[test]
    fn frobenius_is_field_automorphism() {
        for (p, s) in [(2u64, 3u32), (3, 2), (5, 2), (7, 1)] {
            let f = Field::new(p, s).unwrap();
            for a in f.elements() {
                assert_eq!(a.pow(f.q()), a, "x^q = x");
                for b in f.elements().step_by(3) {
                    assert_eq!(a.add(&b).frobenius(), a.frobenius().add(&b.frobenius()));
                    assert_eq!(a.mul(&b).frobenius(), a.frobenius().mul(&b.frobenius()));
                }
            }
        }
    }

    #[test]
    fn trace_norm_fibers() {
        // trace surjects with fibers q/p; norm surjects onto F_p^* with
        // fibers (q-1)/(p-1); exhaustive for q <= 64
        for (p, s) in [(2u64, 2u32), (2, 4), (2, 6), (3, 2), (3, 3), (5, 2), (7, 2)] {
            let f = Field::new(p, s).unwrap();
            if f.q() > 64 {
                continue;
            }
            let mut tr_counts = vec![0u64; p as usize];
            let mut nm_counts = vec![0u64; p as usize];
            for a in f.elements() {
                tr_counts[a.trace_digit() as usize] += 1;
            }
            for a in f.units() {
                nm_counts[a.norm_digit() as usize] += 1;
            }
            for &c in &tr_counts {
                assert_eq!(c, f.q() / p);
            }
            assert_eq!(nm_counts[0], 0);
            for &c in &nm_counts[1..] {
                assert_eq!(c, (f.q() - 1) / (p - 1));
            }
        }
    }

    #[test]
    fn trace_is_linear() {
        let f = Field::new(3, 3).unwrap();
        for a in f.elements().step_by(2) {
            for b in f.elements().step_by(5) {
                let lhs = a.add(&b).trace_digit();
                let rhs = (a.trace_digit() + b.trace_digit()) % 3;
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn norm_is_multiplicative() {
        let f = Field::new(2, 4).unwrap();
        for a in f.units().step_by(2) {
            for b in f.units().step_by(3) {
                assert_eq!(
                    a.mul(&b).norm_digit(),
                    a.norm_digit() * b.norm_digit() % 2
                );
            }
        }
    }

    #[test]
    fn embedding_is_a_ring_hom() {
        let f4 = Field::new(2, 2).unwrap();
        let f16 = Field::new(2, 4).unwrap();
        let e = Embedding::new(&f4, &f16).unwrap();
        for a in f4.elements() {
            for b in f4.elements() {
                assert_eq!(e.map(&a.add(&b)), e.map(&a).add(&e.map(&b)));
                assert_eq!(e.map(&a.mul(&b)), e.map(&a).mul(&e.map(&b)));
            }
        }
        assert_eq!(e.map(&f4.one()).idx(), 1);
    }

    #[test]
    fn f9_units_satisfy_x8() {
        let f9 = Field::new(3, 2).unwrap();
        let units: Vec<_> = f9.units().collect();
        assert_eq!(units.len(), 8);
        for u in units {
            assert_eq!(u.pow(8), f9.one());
        }
    }

    #[test]
    fn desc_serialization() {
        let f4 = Field::new(2, 2).unwrap();
        let js = serde_json::to_value(f4.desc()).unwrap();
        assert_eq!(js["p"], 2);
        assert_eq!(js["s"], 2);
        assert_eq!(js["modulus"], serde_json::json!([1, 1, 1]));
    }
}
