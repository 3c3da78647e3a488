//! Exact arithmetic in `Q[pi]/(pi^{p-1} + p)` with rational coefficients.
//! The Frobenius solver and ODE series work here first (no truncation, no
//! precision tracking) and reduce to pi-adic digits afterwards.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An element `c_0 + c_1 pi + ... + c_{p-2} pi^{p-2}` with `pi^{p-1} = -p`.
#[derive(Clone, PartialEq, Eq)]
pub struct QPi {
    p: u64,
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for QPi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QPi(p={}, {:?})", self.p, self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>())
    }
}

impl QPi {
    pub fn zero(p: u64) -> QPi {
        QPi { p, coeffs: vec![BigRational::zero(); (p - 1) as usize] }
    }

    pub fn one(p: u64) -> QPi {
        QPi::from_rational(p, BigRational::one())
    }

    pub fn from_rational(p: u64, r: BigRational) -> QPi {
        let mut z = QPi::zero(p);
        z.coeffs[0] = r;
        z
    }

    pub fn from_int(p: u64, n: i64) -> QPi {
        QPi::from_rational(p, BigRational::from_integer(BigInt::from(n)))
    }

    /// `pi^e`, reduced: `pi^e = (-p)^{e div (p-1)} pi^{e mod (p-1)}`.
    pub fn pi_pow(p: u64, e: u64) -> QPi {
        let q = e / (p - 1);
        let r = (e % (p - 1)) as usize;
        let mut scale = BigRational::one();
        let minus_p = BigRational::from_integer(BigInt::from(-(p as i64)));
        for _ in 0..q {
            scale *= &minus_p;
        }
        let mut z = QPi::zero(p);
        z.coeffs[r] = scale;
        z
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn checked_mul(&self, other: &QPi) -> QPi {
        assert_eq!(self.p, other.p, "mixed primes");
        let d = (self.p - 1) as usize;
        let mut full = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    full[i + j] += a * b;
                }
            }
        }
        // pi^{d + t} = -p pi^t
        let minus_p = BigRational::from_integer(BigInt::from(-(self.p as i64)));
        let mut z = QPi::zero(self.p);
        for (i, c) in full.into_iter().enumerate() {
            if i < d {
                z.coeffs[i] += c;
            } else {
                z.coeffs[i - d] += c * &minus_p;
            }
        }
        z
    }

    pub fn mul_rational(&self, r: &BigRational) -> QPi {
        QPi { p: self.p, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn mul_i64(&self, n: i64) -> QPi {
        self.mul_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Division by a nonzero integer (always exact over Q).
    pub fn div_i64(&self, n: i64) -> QPi {
        assert!(n != 0);
        let inv = BigRational::new(BigInt::one(), BigInt::from(n));
        self.mul_rational(&inv)
    }

    /// Field inverse in `Q[pi]/(pi^{p-1} + p)` (the polynomial is
    /// irreducible over Q, so nonzero elements invert). Solved as a
    /// (p-1) x (p-1) rational linear system against the multiplication
    /// matrix.
    pub fn inv(&self) -> QPi {
        assert!(!self.is_zero(), "inverting zero");
        let d = (self.p - 1) as usize;
        if d == 1 {
            return QPi::from_rational(self.p, self.coeffs[0].recip());
        }
        // columns: self * pi^j expressed in the basis
        let mut cols = Vec::with_capacity(d);
        let mut cur = self.clone();
        for _ in 0..d {
            cols.push(cur.coeffs.clone());
            cur = cur.checked_mul(&QPi::pi_pow(self.p, 1));
        }
        // solve sum_j x_j * cols[j] = e_0 by Gaussian elimination
        let mut aug: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..d).map(|j| cols[j][i].clone()).collect();
                row.push(if i == 0 { BigRational::one() } else { BigRational::zero() });
                row
            })
            .collect();
        for col in 0..d {
            let piv = (col..d).find(|&r| !aug[r][col].is_zero()).expect("invertible");
            aug.swap(col, piv);
            let inv = aug[col][col].recip();
            for j in col..=d {
                aug[col][j] = &aug[col][j] * &inv;
            }
            for r in 0..d {
                if r != col && !aug[r][col].is_zero() {
                    let f = aug[r][col].clone();
                    for j in col..=d {
                        aug[r][j] = &aug[r][j] - &(&f * &aug[col][j]);
                    }
                }
            }
        }
        let coeffs = (0..d).map(|i| aug[i][d].clone()).collect();
        QPi { p: self.p, coeffs }
    }

    /// pi-adic valuation: `min_i (i + (p-1) v_p(c_i))`; None for zero. The
    /// basis terms have distinct valuations mod (p-1), so no cancellation.
    pub fn val_pi(&self) -> Option<i64> {
        let mut best: Option<i64> = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = (self.p as i64 - 1) * rational_vp(c, self.p) + i as i64;
            best = Some(best.map_or(v, |b: i64| b.min(v)));
        }
        best
    }
}

/// `v_p` of a nonzero rational (can be negative).
pub fn rational_vp(r: &BigRational, p: u64) -> i64 {
    assert!(!r.is_zero());
    bigint_vp(r.numer(), p) - bigint_vp(r.denom(), p)
}

pub fn bigint_vp(n: &BigInt, p: u64) -> i64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0i64;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

impl Add for &QPi {
    type Output = QPi;
    fn add(self, rhs: &QPi) -> QPi {
        assert_eq!(self.p, rhs.p);
        QPi {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}
impl Sub for &QPi {
    type Output = QPi;
    fn sub(self, rhs: &QPi) -> QPi {
        assert_eq!(self.p, rhs.p);
        QPi {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}
impl Mul for &QPi {
    type Output = QPi;
    fn mul(self, rhs: &QPi) -> QPi {
        self.checked_mul(rhs)
    }
}
impl Neg for &QPi {
    type Output = QPi;
    fn neg(self) -> QPi {
        QPi { p: self.p, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

/// Reduce to pi-adic digits mod `pi^prec`. Every coefficient must be
/// p-integral (negative valuation aborts: the element is not in Z_p[pi]).
pub fn qpi_to_digits(x: &QPi, prec: usize) -> Result<Vec<i64>> {
    let p = x.p;
    let pb = BigInt::from(p);
    let mut carriers = vec![BigInt::zero(); prec + (p as usize - 1)];
    for (i, c) in x.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if rational_vp(c, p) < 0 {
            return Err(Error::NonIntegralCoefficient(i));
        }
        // residue of c mod p^J with the denominator inverted mod p^J
        let j = (prec + p as usize) as u32;
        let modulus = pb.pow(j);
        let num = num_integer::Integer::mod_floor(c.numer(), &modulus);
        let den = num_integer::Integer::mod_floor(c.denom(), &modulus);
        let dinv = modinv(&den, &modulus);
        let res = num_integer::Integer::mod_floor(&(num * dinv), &modulus);
        carriers[i] += res;
    }
    // normalize: digit in [0, p), carry t moves to slot i + (p-1) as -t
    let mut digits = vec![0i64; prec];
    for i in 0..carriers.len() {
        let c = carriers[i].clone();
        let d = num_integer::Integer::mod_floor(&c, &pb);
        let t = (&c - &d) / &pb;
        if i < prec {
            digits[i] = digit_to_i64(&d);
        }
        let up = i + (p as usize - 1);
        if up < carriers.len() {
            carriers[up] -= t;
        }
    }
    Ok(digits)
}

fn digit_to_i64(d: &BigInt) -> i64 {
    num_traits::ToPrimitive::to_i64(d).expect("digit fits")
}

/// Modular inverse for p-coprime values, via extended gcd.
fn modinv(a: &BigInt, m: &BigInt) -> BigInt {
    let e = num_integer::Integer::extended_gcd(a, m);
    assert!(e.gcd.is_one(), "inverse of a non-unit");
    num_integer::Integer::mod_floor(&e.x, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_power_reduction() {
        // p = 3: pi^2 = -3
        let x = QPi::pi_pow(3, 2);
        assert_eq!(x.coeffs()[0], BigRational::from_integer(BigInt::from(-3)));
        assert!(x.coeffs()[1].is_zero());
        // p = 2: pi = -2, pi^3 = -8
        let y = QPi::pi_pow(2, 3);
        assert_eq!(y.coeffs()[0], BigRational::from_integer(BigInt::from(-8)));
    }

    #[test]
    fn mul_respects_relation() {
        // (pi)(pi) = pi^2 for p = 5 stays in the basis
        let pi = QPi::pi_pow(5, 1);
        let pi2 = pi.checked_mul(&pi);
        assert_eq!(pi2, QPi::pi_pow(5, 2));
        // pi^4 = -5
        let pi4 = pi2.checked_mul(&pi2);
        assert_eq!(pi4.coeffs()[0], BigRational::from_integer(BigInt::from(-5)));
    }

    #[test]
    fn valuations() {
        assert_eq!(QPi::from_int(3, 3).val_pi(), Some(2));
        assert_eq!(QPi::pi_pow(3, 1).val_pi(), Some(1));
        assert_eq!(QPi::from_int(3, 1).div_i64(3).val_pi(), Some(-2));
        assert_eq!(QPi::zero(3).val_pi(), None);
    }

    #[test]
    fn digits_of_minus_one_p3() {
        // -1 = 2 + pi^2 exactly (pi^2 = -3)
        let m1 = QPi::from_int(3, -1);
        let d = qpi_to_digits(&m1, 5).unwrap();
        assert_eq!(d, vec![2, 0, 1, 0, 0]);
    }

    #[test]
    fn digits_reject_denominators() {
        let x = QPi::from_int(3, 1).div_i64(3);
        assert!(matches!(qpi_to_digits(&x, 4), Err(Error::NonIntegralCoefficient(0))));
    }

    #[test]
    fn digits_of_unit_fraction() {
        // 1/2 in Z_3: 2 * (1/2) = 1 mod 3^J
        let x = QPi::from_int(3, 1).div_i64(2);
        let d = qpi_to_digits(&x, 6).unwrap();
        let two = QPi::from_int(3, 2);
        let prod = two.checked_mul(&x);
        assert_eq!(qpi_to_digits(&prod, 6).unwrap(), vec![1, 0, 0, 0, 0, 0]);
        // reconstruct: digits are a valid expansion (spot value check)
        assert_eq!(d.len(), 6);
    }
}
