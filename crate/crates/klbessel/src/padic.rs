//! Truncated exact arithmetic in `Z_p[pi]/(pi^{p-1} + p)` modulo `pi^M`,
//! with canonical base-p digits of pi. Home of the Teichmuller lift and of
//! the embedding `Z[zeta_p] -> Z_p[pi]` pinned by `zeta = 1 + pi mod pi^2`.
//!
//! Precision is global per configuration: every operation is exact mod
//! `pi^M`, nothing tracks per-element loss (the solver works in exact
//! rationals and reduces here at the end).

use crate::cyclotomic::CycInt;
use crate::qpi::{qpi_to_digits, QPi};
use crate::{Error, Result};
use num_bigint::BigInt;
use serde::Serialize;
use std::fmt;

/// Ring configuration: prime p and pi-adic precision M (`pi^M = 0`).
/// Ramification index is p-1, so `M = (p-1) * t` holds t p-adic digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PadicCfg {
    pub p: u64,
    pub prec: usize,
}

impl PadicCfg {
    pub fn new(p: u64, prec: usize) -> PadicCfg {
        assert!(prec >= 1);
        PadicCfg { p, prec }
    }
}

/// Element in canonical digit form: `sum d_i pi^i`, `0 <= d_i < p`.
#[derive(Clone, PartialEq, Eq)]
pub struct PadicNum {
    cfg: PadicCfg,
    digits: Vec<i64>,
}

impl fmt::Debug for PadicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PadicNum{:?}", self.digits)
    }
}

impl Serialize for PadicNum {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        // little-endian digit list in pi
        self.digits.serialize(ser)
    }
}

impl PadicNum {
    pub fn zero(cfg: PadicCfg) -> PadicNum {
        PadicNum { cfg, digits: vec![0; cfg.prec] }
    }

    pub fn one(cfg: PadicCfg) -> PadicNum {
        PadicNum::from_i64(cfg, 1)
    }

    pub fn from_i64(cfg: PadicCfg, n: i64) -> PadicNum {
        let mut c = vec![0i64; cfg.prec];
        c[0] = n;
        PadicNum::normalize(cfg, c)
    }

    pub fn from_bigint(cfg: PadicCfg, n: &BigInt) -> PadicNum {
        let q = QPi::from_rational(cfg.p, num_rational::BigRational::from_integer(n.clone()));
        PadicNum::from_qpi(cfg, &q).expect("integers are always p-integral")
    }

    /// Reduce an exact element; fails on negative-valuation coefficients.
    pub fn from_qpi(cfg: PadicCfg, x: &QPi) -> Result<PadicNum> {
        assert_eq!(x.p(), cfg.p);
        Ok(PadicNum { cfg, digits: qpi_to_digits(x, cfg.prec)? })
    }

    /// Canonicalize an arbitrary (small) integer coefficient vector using
    /// `p = -pi^{p-1}`: carries move up by p-1 slots with a sign flip.
    fn normalize(cfg: PadicCfg, mut c: Vec<i64>) -> PadicNum {
        let p = cfg.p as i64;
        let e = (cfg.p - 1) as usize;
        c.resize(cfg.prec + e + 1, 0);
        for i in 0..cfg.prec {
            let d = c[i].rem_euclid(p);
            let t = (c[i] - d) / p;
            c[i] = d;
            c[i + e] -= t;
        }
        c.truncate(cfg.prec);
        PadicNum { cfg, digits: c }
    }

    pub fn cfg(&self) -> PadicCfg {
        self.cfg
    }
    pub fn digits(&self) -> &[i64] {
        &self.digits
    }
    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// pi-adic valuation (index of lowest nonzero digit); None if 0 mod pi^M.
    pub fn val(&self) -> Option<usize> {
        self.digits.iter().position(|&d| d != 0)
    }

    pub fn is_unit(&self) -> bool {
        self.digits[0] != 0
    }

    pub fn add(&self, other: &PadicNum) -> PadicNum {
        assert_eq!(self.cfg, other.cfg);
        let c = self.digits.iter().zip(&other.digits).map(|(a, b)| a + b).collect();
        PadicNum::normalize(self.cfg, c)
    }

    pub fn sub(&self, other: &PadicNum) -> PadicNum {
        assert_eq!(self.cfg, other.cfg);
        let c = self.digits.iter().zip(&other.digits).map(|(a, b)| a - b).collect();
        PadicNum::normalize(self.cfg, c)
    }

    pub fn neg(&self) -> PadicNum {
        let c = self.digits.iter().map(|&a| -a).collect();
        PadicNum::normalize(self.cfg, c)
    }

    pub fn mul(&self, other: &PadicNum) -> PadicNum {
        assert_eq!(self.cfg, other.cfg);
        let m = self.cfg.prec;
        // carries only move digits up, so positions >= M never feed back
        let mut conv = vec![0i64; m];
        for (i, &a) in self.digits.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.digits.iter().enumerate() {
                if i + j < m {
                    conv[i + j] += a * b;
                }
            }
        }
        PadicNum::normalize(self.cfg, conv)
    }

    pub fn mul_i64(&self, n: i64) -> PadicNum {
        let c = self.digits.iter().map(|&a| a * n).collect();
        PadicNum::normalize(self.cfg, c)
    }

    /// Multiply by `pi^e` (shift digits up; top digits fall off).
    pub fn mul_pi_pow(&self, e: usize) -> PadicNum {
        let mut c = vec![0i64; self.cfg.prec];
        for i in 0..self.cfg.prec.saturating_sub(e) {
            c[i + e] = self.digits[i];
        }
        PadicNum { cfg: self.cfg, digits: c }
    }

    /// Unit inverse by Newton iteration `x <- x (2 - a x)`.
    pub fn inv(&self) -> Result<PadicNum> {
        if !self.is_unit() {
            return Err(Error::NonUnit);
        }
        let p = self.cfg.p as i64;
        // inverse of the leading digit mod p
        let d0 = self.digits[0];
        let seed = (1..p).find(|&x| (x * d0) % p == 1).expect("prime modulus");
        let mut x = PadicNum::from_i64(self.cfg, seed);
        let two = PadicNum::from_i64(self.cfg, 2);
        // quadratic convergence in pi-precision
        let iters = (self.cfg.prec as f64).log2().ceil() as usize + 2;
        for _ in 0..iters {
            let t = two.sub(&self.mul(&x));
            x = x.mul(&t);
        }
        debug_assert_eq!(self.mul(&x), PadicNum::one(self.cfg));
        Ok(x)
    }

    pub fn pow(&self, e: u64) -> PadicNum {
        let mut acc = PadicNum::one(self.cfg);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Truncate to a smaller precision.
    pub fn truncate(&self, prec: usize) -> PadicNum {
        assert!(prec <= self.cfg.prec);
        PadicNum {
            cfg: PadicCfg { p: self.cfg.p, prec },
            digits: self.digits[..prec].to_vec(),
        }
    }

    /// Equality mod `pi^k`.
    pub fn congruent(&self, other: &PadicNum, k: usize) -> bool {
        assert_eq!(self.cfg.p, other.cfg.p);
        let k = k.min(self.cfg.prec).min(other.cfg.prec);
        self.digits[..k] == other.digits[..k]
    }
}

/// Teichmuller lift of a prime-field digit: the unique (p-1)-th root of
/// unity (or 0) congruent to it mod pi, by iterating `x -> x^p`.
pub fn teichmuller(a: u64, cfg: PadicCfg) -> PadicNum {
    let a = a % cfg.p;
    if a == 0 {
        return PadicNum::zero(cfg);
    }
    let mut x = PadicNum::from_i64(cfg, a as i64);
    loop {
        let next = x.pow(cfg.p);
        if next == x {
            return x;
        }
        x = next;
    }
}

/// The p-th root of unity `zeta = 1 + pi mod pi^2` (Hensel digits of the
/// p-th cyclotomic polynomial), plus the ring map from `Z[zeta_p]`.
pub struct ZetaEmbed {
    cfg: PadicCfg,
    zeta: PadicNum,
    /// zeta^0 .. zeta^{p-2}
    powers: Vec<PadicNum>,
}

fn cyclotomic_value(x: &PadicNum) -> PadicNum {
    // Phi_p(x) = 1 + x + ... + x^{p-1}
    let p = x.cfg().p;
    let mut acc = PadicNum::one(x.cfg());
    let mut pw = PadicNum::one(x.cfg());
    for _ in 1..p {
        pw = pw.mul(x);
        acc = acc.add(&pw);
    }
    acc
}

impl ZetaEmbed {
    pub fn new(cfg: PadicCfg) -> Result<ZetaEmbed> {
        if cfg.prec < 2 {
            return Err(Error::PrecisionExhausted(
                "zeta embedding needs at least 2 digits".into(),
            ));
        }
        let p = cfg.p;
        // Lift digit by digit at padded precision: near the top of the
        // target window the digit test needs p-1 digits of headroom to keep
        // the candidate unique.
        let pad = PadicCfg::new(p, cfg.prec + p as usize);
        let mut zeta = PadicNum::from_i64(pad, 1).add(&PadicNum::from_i64(pad, 1).mul_pi_pow(1));
        if p > 2 {
            for k in 2..cfg.prec {
                let mut found = None;
                for d in 0..p as i64 {
                    let cand = zeta.add(&PadicNum::from_i64(pad, d).mul_pi_pow(k));
                    let residual = cyclotomic_value(&cand);
                    let ok = residual.val().map_or(true, |v| v >= k + p as usize - 1);
                    if ok {
                        assert!(found.is_none(), "digit lift must be unique");
                        found = Some(cand);
                    }
                }
                zeta = found.expect("cyclotomic root lifts");
            }
        }
        let zeta = zeta.truncate(cfg.prec);
        assert!(cyclotomic_value(&zeta).is_zero(), "Phi_p(zeta) = 0 mod pi^M");
        let mut powers = Vec::with_capacity((p - 1) as usize);
        let mut acc = PadicNum::one(cfg);
        for _ in 0..(p - 1) {
            powers.push(acc.clone());
            acc = acc.mul(&zeta);
        }
        Ok(ZetaEmbed { cfg, zeta, powers })
    }

    pub fn zeta(&self) -> &PadicNum {
        &self.zeta
    }

    pub fn cfg(&self) -> PadicCfg {
        self.cfg
    }

    /// Ring map: evaluate the power-basis expansion at this zeta.
    pub fn embed(&self, c: &CycInt) -> PadicNum {
        assert_eq!(c.order(), self.cfg.p, "order must equal p");
        let mut acc = PadicNum::zero(self.cfg);
        for (i, coeff) in c.coeffs().iter().enumerate() {
            if num_traits::Zero::is_zero(coeff) {
                continue;
            }
            let scalar = PadicNum::from_bigint(self.cfg, coeff);
            acc = acc.add(&scalar.mul(&self.powers[i]));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn p2_is_plain_2adic() {
        // p = 2, pi = -2: pi * pi = 4 = 0 mod pi^2
        let cfg = PadicCfg::new(2, 2);
        let pi = PadicNum::from_i64(cfg, 1).mul_pi_pow(1);
        assert!(pi.mul(&pi).is_zero());
        // and with more precision: (-2)^2 = 4 has digit at pi^2
        let cfg = PadicCfg::new(2, 6);
        let pi = PadicNum::from_i64(cfg, 1).mul_pi_pow(1);
        let four = PadicNum::from_i64(cfg, 4);
        assert_eq!(pi.mul(&pi), four);
    }

    #[test]
    fn p2_matches_plain_integer_oracle() {
        // base (-2) digit expansions agree with integer arithmetic mod 2^M
        let cfg = PadicCfg::new(2, 16);
        let modulus = BigInt::from(1i64 << 16);
        let to_int = |x: &PadicNum| -> BigInt {
            let mut acc = BigInt::from(0);
            let mut pw = BigInt::from(1);
            for &d in x.digits() {
                acc += d * &pw;
                pw *= -2;
            }
            num_integer::Integer::mod_floor(&acc, &modulus)
        };
        for a in [-37i64, 5, 123, -1] {
            for b in [11i64, -8, 99] {
                let pa = PadicNum::from_i64(cfg, a);
                let pb = PadicNum::from_i64(cfg, b);
                let sum = to_int(&pa.add(&pb));
                let prod = to_int(&pa.mul(&pb));
                let exp_sum = num_integer::Integer::mod_floor(&BigInt::from(a + b), &modulus);
                let exp_prod = num_integer::Integer::mod_floor(&BigInt::from(a * b), &modulus);
                assert_eq!(sum, exp_sum);
                assert_eq!(prod, exp_prod);
            }
        }
    }

    #[test]
    fn p3_pi_squared_is_minus_three() {
        let cfg = PadicCfg::new(3, 4);
        let pi = PadicNum::from_i64(cfg, 1).mul_pi_pow(1);
        let lhs = pi.mul(&pi);
        let rhs = PadicNum::from_i64(cfg, -3);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn unit_inverse_roundtrip() {
        let cfg = PadicCfg::new(3, 10);
        let x = PadicNum::from_i64(cfg, 1).add(&PadicNum::from_i64(cfg, 1).mul_pi_pow(1));
        let xi = x.inv().unwrap();
        assert_eq!(x.mul(&xi), PadicNum::one(cfg));
        // non-units are rejected
        let pi = PadicNum::from_i64(cfg, 1).mul_pi_pow(1);
        assert!(matches!(pi.inv(), Err(Error::NonUnit)));
    }

    #[test]
    fn teichmuller_values() {
        let cfg = PadicCfg::new(3, 8);
        assert_eq!(teichmuller(1, cfg), PadicNum::one(cfg));
        assert_eq!(teichmuller(0, cfg), PadicNum::zero(cfg));
        // p = 3: teichmuller(2) = -1
        assert_eq!(teichmuller(2, cfg), PadicNum::from_i64(cfg, -1));
        // p = 5: teichmuller(2)^4 = 1 at M = 20
        let cfg5 = PadicCfg::new(5, 20);
        let t2 = teichmuller(2, cfg5);
        assert_eq!(t2.pow(4), PadicNum::one(cfg5));
        assert_eq!(t2.digits()[0], 2);
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        let cfg = PadicCfg::new(5, 12);
        for a in 1..5u64 {
            for b in 1..5u64 {
                let lhs = teichmuller(a, cfg).mul(&teichmuller(b, cfg));
                let rhs = teichmuller(a * b % 5, cfg);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn zeta_embedding_basics() {
        for p in [2u64, 3, 5] {
            let cfg = PadicCfg::new(p, 12);
            let ze = ZetaEmbed::new(cfg).unwrap();
            // embed(1) = 1
            assert_eq!(ze.embed(&CycInt::one(p)), PadicNum::one(cfg));
            // the defining relation holds: sum of all zeta powers is 0
            let mut acc = CycInt::zero(p);
            for i in 0..p {
                acc = acc.checked_add(&CycInt::zeta_pow(p, i)).unwrap();
            }
            assert!(ze.embed(&acc).is_zero());
            // seed: zeta = 1 + pi mod pi^2
            let z = ze.embed(&CycInt::zeta_pow(p, 1));
            assert_eq!(z.digits()[0], 1);
            if p > 2 {
                assert_eq!(z.digits()[1], 1);
            }
        }
    }

    #[test]
    fn zeta_root_residual() {
        // Phi_3(zeta) = 0 mod pi^12
        let cfg = PadicCfg::new(3, 12);
        let ze = ZetaEmbed::new(cfg).unwrap();
        let z = ze.embed(&CycInt::zeta_pow(3, 1));
        assert!(cyclotomic_value(&z).is_zero());
    }

    #[test]
    fn zeta_embedding_is_ring_hom() {
        let cfg = PadicCfg::new(3, 14);
        let ze = ZetaEmbed::new(cfg).unwrap();
        let a = CycInt::zeta_pow(3, 1).mul_i64(4);
        let b = CycInt::zeta_pow(3, 2).mul_i64(-7);
        let lhs = ze.embed(&a.checked_mul(&b).unwrap());
        let rhs = ze.embed(&a).mul(&ze.embed(&b));
        assert_eq!(lhs, rhs);
        let lhs = ze.embed(&a.checked_add(&b).unwrap());
        let rhs = ze.embed(&a).add(&ze.embed(&b));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn min_precision_rejected() {
        assert!(ZetaEmbed::new(PadicCfg::new(3, 1)).is_err());
    }
}
