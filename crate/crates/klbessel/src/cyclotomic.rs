//! Exact arithmetic in `Z[zeta_m]` for prime m, so character sums carry no
//! floating-point error. Values are kept in the power basis
//! `1, zeta, ..., zeta^{m-2}` with the relation `1 + zeta + ... + zeta^{m-1} = 0`.
//!
//! [`ScaledCyc`] additionally tracks a `(-sqrt(q))^{-k}` denominator so that
//! weight-normalized sums can be compared exactly after clearing q-powers.

use crate::field::is_prime;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::Serialize;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An element of `Z[zeta_m]`, m prime, in reduced canonical form.
#[derive(Clone, PartialEq, Eq)]
pub struct CycInt {
    m: u64,
    /// length m-1, coefficients of 1, zeta, ..., zeta^{m-2}
    coeffs: Vec<BigInt>,
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycInt(m={}, {:?})", self.m, self.coeffs)
    }
}

impl CycInt {
    pub fn zero(m: u64) -> CycInt {
        assert!(is_prime(m), "root-of-unity order must be prime");
        CycInt { m, coeffs: vec![BigInt::zero(); (m - 1) as usize] }
    }

    pub fn one(m: u64) -> CycInt {
        Self::from_int(m, 1)
    }

    pub fn from_int(m: u64, n: i64) -> CycInt {
        let mut z = Self::zero(m);
        z.coeffs[0] = BigInt::from(n);
        z
    }

    pub fn from_bigint(m: u64, n: BigInt) -> CycInt {
        let mut z = Self::zero(m);
        z.coeffs[0] = n;
        z
    }

    /// `zeta_m^k`, reduced.
    pub fn zeta_pow(m: u64, k: u64) -> CycInt {
        let k = (k % m) as usize;
        let mut z = Self::zero(m);
        if k == (m - 1) as usize {
            for c in z.coeffs.iter_mut() {
                *c = BigInt::from(-1);
            }
        } else {
            z.coeffs[k] = BigInt::one();
        }
        z
    }

    /// Reduce a full-length exponent vector (coefficients of zeta^0..zeta^{m-1}).
    pub fn from_exponent_counts(m: u64, counts: &[BigInt]) -> CycInt {
        assert_eq!(counts.len(), m as usize);
        let top = counts[(m - 1) as usize].clone();
        let mut z = Self::zero(m);
        for i in 0..(m - 1) as usize {
            z.coeffs[i] = &counts[i] - &top;
        }
        z
    }

    /// Same, from machine-integer counts (hot enumeration paths).
    pub fn from_counts_i64(m: u64, counts: &[i64]) -> CycInt {
        assert_eq!(counts.len(), m as usize);
        let top = counts[(m - 1) as usize];
        let mut z = Self::zero(m);
        for i in 0..(m - 1) as usize {
            z.coeffs[i] = BigInt::from(counts[i] - top);
        }
        z
    }

    pub fn order(&self) -> u64 {
        self.m
    }
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Rational integers are exactly the elements supported on the basis
    /// vector 1.
    pub fn as_int(&self) -> Option<BigInt> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn checked_add(&self, other: &CycInt) -> Result<CycInt> {
        if self.m != other.m {
            return Err(Error::MixedOrders(self.m, other.m));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycInt { m: self.m, coeffs })
    }

    pub fn checked_sub(&self, other: &CycInt) -> Result<CycInt> {
        if self.m != other.m {
            return Err(Error::MixedOrders(self.m, other.m));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycInt { m: self.m, coeffs })
    }

    pub fn checked_mul(&self, other: &CycInt) -> Result<CycInt> {
        if self.m != other.m {
            return Err(Error::MixedOrders(self.m, other.m));
        }
        let m = self.m as usize;
        let mut full = vec![BigInt::zero(); m];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let k = (i + j) % m;
                full[k] += a * b;
            }
        }
        Ok(CycInt::from_exponent_counts(self.m, &full))
    }

    pub fn mul_int(&self, n: &BigInt) -> CycInt {
        CycInt { m: self.m, coeffs: self.coeffs.iter().map(|c| c * n).collect() }
    }

    pub fn mul_i64(&self, n: i64) -> CycInt {
        self.mul_int(&BigInt::from(n))
    }

    /// Exact division by a rational integer; `None` if not exactly divisible.
    pub fn div_exact_int(&self, n: &BigInt) -> Option<CycInt> {
        assert!(!n.is_zero());
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = num_integer::Integer::div_rem(c, n);
            if !r.is_zero() {
                return None;
            }
            coeffs.push(q);
        }
        Some(CycInt { m: self.m, coeffs })
    }

    pub fn pow(&self, e: u32) -> CycInt {
        let mut acc = CycInt::one(self.m);
        for _ in 0..e {
            acc = acc.checked_mul(self).unwrap();
        }
        acc
    }

    /// Galois action `zeta -> zeta^c` for `gcd(c, m) = 1`.
    pub fn galois(&self, c: u64) -> Result<CycInt> {
        if c % self.m == 0 {
            return Err(Error::InvalidParameter("galois exponent must be coprime to m".into()));
        }
        let m = self.m as usize;
        let mut full = vec![BigInt::zero(); m];
        for (i, a) in self.coeffs.iter().enumerate() {
            let k = ((i as u64 * c) % self.m) as usize;
            full[k] += a;
        }
        Ok(CycInt::from_exponent_counts(self.m, &full))
    }

    /// Complex conjugation `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> CycInt {
        if self.m == 2 {
            return self.clone();
        }
        self.galois(self.m - 1).unwrap()
    }

    /// Field norm: product over all conjugates; always a rational integer.
    pub fn norm(&self) -> BigInt {
        let mut acc = self.clone();
        for c in 2..self.m {
            acc = acc.checked_mul(&self.galois(c).unwrap()).unwrap();
        }
        acc.as_int().expect("norm must be a rational integer")
    }

    /// Evaluate at `zeta -> exp(2 pi i j / m)`, `gcd(j, m) = 1`.
    pub fn complex_embed(&self, j: u64) -> Result<Complex64> {
        if j % self.m == 0 {
            return Err(Error::InvalidParameter("embedding index must be coprime to m".into()));
        }
        let m = self.m as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            let theta = 2.0 * std::f64::consts::PI * (i as u64 * j % self.m) as f64 / m;
            let cf = bigint_to_f64(c);
            acc += Complex64::new(theta.cos(), theta.sin()) * cf;
        }
        Ok(acc)
    }

    /// Exact division by `(1 - zeta)`; `None` if not divisible. Uses
    /// `(1 - zeta)^{-1} = G(zeta)/p` with `G(x) = sum_{j<p-1} (p-1-j) x^j`.
    pub fn div_one_minus_zeta(&self) -> Option<CycInt> {
        let p = self.m;
        let g = {
            let mut g = CycInt::zero(p);
            for j in 0..(p - 1) as usize {
                g.coeffs[j] = BigInt::from(p - 1 - j as u64);
            }
            g
        };
        let prod = self.checked_mul(&g).unwrap();
        prod.div_exact_int(&BigInt::from(p))
    }

    /// Number of exact divisions by `(1 - zeta_p)`; `None` for the zero
    /// element (infinite valuation).
    pub fn lambda_count(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let mut count = 0u64;
        let mut cur = self.clone();
        while let Some(next) = cur.div_one_minus_zeta() {
            count += 1;
            cur = next;
        }
        Some(count)
    }

    /// The lambda-adic valuation normalized by `v(p) = 1`, i.e.
    /// `lambda_count / (p - 1)`.
    pub fn lambda_valuation(&self) -> Valuation {
        match self.lambda_count() {
            None => Valuation::Infinite,
            Some(c) => Valuation::Finite(Rational64::new(c as i64, (self.m - 1) as i64)),
        }
    }
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    num_traits::ToPrimitive::to_f64(n).unwrap_or(f64::INFINITY)
}

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        self.checked_add(rhs).expect("mixed cyclotomic orders")
    }
}
impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        self.checked_sub(rhs).expect("mixed cyclotomic orders")
    }
}
impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        self.checked_mul(rhs).expect("mixed cyclotomic orders")
    }
}
impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        CycInt { m: self.m, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Serialize for CycInt {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("CycInt", 2)?;
        st.serialize_field("m", &self.m)?;
        let coeffs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

/// Valuation value: a rational or +infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(Rational64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<Rational64> {
        match self {
            Valuation::Finite(r) => Some(r),
            Valuation::Infinite => None,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => std::cmp::Ordering::Equal,
            (Valuation::Infinite, _) => std::cmp::Ordering::Greater,
            (_, Valuation::Infinite) => std::cmp::Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        })
    }
}

/// `num * (-sqrt(q))^{-k}`, the exact home of weight-normalized sums.
/// Canonical form strips a factor q from `num` against k -= 2 whenever
/// possible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledCyc {
    num: CycInt,
    k: u32,
    q: u64,
}

impl ScaledCyc {
    pub fn new(num: CycInt, k: u32, q: u64) -> ScaledCyc {
        let mut v = ScaledCyc { num, k, q };
        v.canonicalize();
        v
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.k = 0;
            return;
        }
        let q = BigInt::from(self.q);
        while self.k >= 2 {
            match self.num.div_exact_int(&q) {
                Some(next) => {
                    self.num = next;
                    self.k -= 2;
                }
                None => break,
            }
        }
    }

    pub fn num(&self) -> &CycInt {
        &self.num
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn mul(&self, other: &ScaledCyc) -> Result<ScaledCyc> {
        if self.q != other.q {
            return Err(Error::MixedScales(self.q, other.q));
        }
        Ok(ScaledCyc::new(self.num.checked_mul(&other.num)?, self.k + other.k, self.q))
    }

    pub fn mul_cyc(&self, other: &CycInt) -> Result<ScaledCyc> {
        Ok(ScaledCyc::new(self.num.checked_mul(other)?, self.k, self.q))
    }

    /// Add; both parities must match (same-parity values can always be
    /// brought to a common k by multiplying by q).
    pub fn add(&self, other: &ScaledCyc) -> Result<ScaledCyc> {
        if self.q != other.q {
            return Err(Error::MixedScales(self.q, other.q));
        }
        if self.num.is_zero() {
            return Ok(other.clone());
        }
        if other.num.is_zero() {
            return Ok(self.clone());
        }
        if self.k % 2 != other.k % 2 {
            return Err(Error::InvalidParameter(
                "cannot add scaled values of different sqrt(q)-parity".into(),
            ));
        }
        let (lo, hi) = if self.k <= other.k { (self, other) } else { (other, self) };
        let shift = BigInt::from(hi.q).pow((hi.k - lo.k) / 2);
        let lifted = lo.num.mul_int(&shift);
        Ok(ScaledCyc::new(lifted.checked_add(&hi.num)?, hi.k, hi.q))
    }

    /// Embedded complex value `embed_j(num) / (-sqrt(q))^k`.
    pub fn complex_embed(&self, j: u64) -> Result<Complex64> {
        let num = self.num.complex_embed(j)?;
        let denom = (-(self.q as f64).sqrt()).powi(self.k as i32);
        Ok(num / denom)
    }
}

impl Serialize for ScaledCyc {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("ScaledCyc", 4)?;
        st.serialize_field("m", &self.num.order())?;
        let coeffs: Vec<String> = self.num.coeffs().iter().map(|c| c.to_string()).collect();
        st.serialize_field("coeffs", &coeffs)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("q", &self.q)?;
        st.end()
    }
}

/// Which route [`scaled_equal`] took, with the evidence it used.
#[derive(Debug, Clone, Serialize)]
pub enum EqualityPath {
    /// k-parities matched: exact integer comparison after clearing q powers.
    ExactSameParity,
    /// Parities differed: exact equality of squares plus a sign check at the
    /// principal complex embedding (relative tolerance 1e-6).
    SquaredWithSign { squares_equal: bool, lhs: f64, rhs: f64, rel_err: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct EqualityCertificate {
    pub equal: bool,
    pub path: EqualityPath,
}

/// Compare two scaled values exactly. Same k-parity compares integers after
/// clearing q powers; mixed parity verifies squared equality exactly and the
/// sign numerically.
pub fn scaled_equal(a: &ScaledCyc, b: &ScaledCyc) -> Result<EqualityCertificate> {
    if a.q != b.q {
        return Err(Error::MixedScales(a.q, b.q));
    }
    if a.num.is_zero() || b.num.is_zero() {
        return Ok(EqualityCertificate {
            equal: a.num.is_zero() && b.num.is_zero(),
            path: EqualityPath::ExactSameParity,
        });
    }
    if a.k % 2 == b.k % 2 {
        let (lo, hi) = if a.k <= b.k { (a, b) } else { (b, a) };
        let shift = BigInt::from(a.q).pow((hi.k - lo.k) / 2);
        let lifted = lo.num.mul_int(&shift);
        Ok(EqualityCertificate {
            equal: lifted == hi.num,
            path: EqualityPath::ExactSameParity,
        })
    } else {
        // a = A (-sqrt q)^{-j}, b = B (-sqrt q)^{-l}: equality of squares is
        // checked exactly in Z[zeta] after clearing q powers
        let a2 = ScaledCyc::new(a.num.checked_mul(&a.num)?, 2 * a.k, a.q);
        let b2 = ScaledCyc::new(b.num.checked_mul(&b.num)?, 2 * b.k, b.q);
        let sq = scaled_equal(&a2, &b2)?;
        let squares_equal = sq.equal;
        let lhs = a.complex_embed(1)?;
        let rhs = b.complex_embed(1)?;
        let scale = lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
        let rel_err = (lhs - rhs).norm() / scale;
        Ok(EqualityCertificate {
            equal: squares_equal && rel_err < 1e-6,
            path: EqualityPath::SquaredWithSign {
                squares_equal,
                lhs: lhs.re,
                rhs: rhs.re,
                rel_err,
            },
        })
    }
}
