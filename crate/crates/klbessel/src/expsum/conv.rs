//! Multiplicative convolution in the discrete-log domain.
//!
//! A function `F_q^x -> Z[zeta_p]` whose values are single signed powers of
//! zeta (like `psi` or `psi * rho`) is a [`SignedMono`]; general values are
//! count vectors per zeta-power ([`LogVec`]). Since additive characters split
//! products of sums into convolutions (`S_k = psi^(*k)` over `prod z_i = w`),
//! every extension-field power sum here reduces to a handful of O(q^2)
//! convolution passes shared by all evaluation points.

use super::{AdditiveChar, QuadChar};
use crate::cyclotomic::CycInt;
use crate::field::{Field, FqElem};
use crate::{Error, Result};
use rayon::prelude::*;

/// `l -> sign * zeta^{shift}` attached to g^l.
pub struct SignedMono {
    pub shifts: Vec<u8>,
    pub signs: Vec<i8>,
}

/// `l -> sum_t data[l*p + t] zeta^t` attached to g^l.
pub struct LogVec {
    pub p: usize,
    pub n: usize,
    pub data: Vec<i64>,
}

impl SignedMono {
    /// The additive character as a log-domain function.
    pub fn psi(field: &Field, psi: &AdditiveChar) -> SignedMono {
        let n = (field.q() - 1) as usize;
        let mut shifts = vec![0u8; n];
        let mut signs = vec![1i8; n];
        for (l, sh) in shifts.iter_mut().enumerate() {
            *sh = psi.digit_idx(field.exp_idx(l as u64));
        }
        signs.iter_mut().for_each(|s| *s = 1);
        SignedMono { shifts, signs }
    }

    /// `v -> psi(-v) rho(v)`, the rank-one hypergeometric factor.
    pub fn psi_neg_rho(field: &Field, psi: &AdditiveChar, rho: &QuadChar) -> SignedMono {
        let n = (field.q() - 1) as usize;
        let mut shifts = vec![0u8; n];
        let mut signs = vec![1i8; n];
        for l in 0..n {
            let x = field.exp_idx(l as u64);
            shifts[l] = psi.digit_idx(field.neg_idx(x));
            signs[l] = rho.sign_idx(x) as i8;
        }
        SignedMono { shifts, signs }
    }

    pub fn to_logvec(&self, p: usize) -> LogVec {
        let n = self.shifts.len();
        let mut data = vec![0i64; n * p];
        for l in 0..n {
            data[l * p + self.shifts[l] as usize] += self.signs[l] as i64;
        }
        LogVec { p, n, data }
    }
}

impl LogVec {
    pub fn zero(p: usize, n: usize) -> LogVec {
        LogVec { p, n, data: vec![0; n * p] }
    }

    #[inline]
    pub fn row(&self, l: usize) -> &[i64] {
        &self.data[l * self.p..(l + 1) * self.p]
    }

    /// Collapse `sum_l row(l)` after an optional per-row monomial twist; used
    /// to evaluate `sum_w V[w] psi(a/w)`-style sums at a point.
    pub fn cyc_at(&self, l: usize) -> CycInt {
        CycInt::from_counts_i64(self.p as u64, self.row(l))
    }

    /// Pointwise square of each row as an element of Z[Z/p].
    pub fn pointwise_square(&self) -> LogVec {
        let p = self.p;
        let mut out = LogVec::zero(p, self.n);
        for l in 0..self.n {
            let row = self.row(l);
            let dst = &mut out.data[l * p..(l + 1) * p];
            for i in 0..p {
                if row[i] == 0 {
                    continue;
                }
                for j in 0..p {
                    dst[(i + j) % p] += row[i] * row[j];
                }
            }
        }
        out
    }

    /// Subtract a constant (zeta^0 coefficient) from every row.
    pub fn sub_const(&mut self, c: i64) {
        for l in 0..self.n {
            self.data[l * self.p] -= c;
        }
    }
}

/// Convolution of two signed monomial functions: O(n^2). The wrap index is
/// tracked by a decrementing counter so the hot loop has no division.
pub fn conv_mono_mono(a: &SignedMono, b: &SignedMono, p: usize) -> LogVec {
    let n = a.shifts.len();
    assert_eq!(n, b.shifts.len());
    let mut out = LogVec::zero(p, n);
    out.data
        .par_chunks_mut(p)
        .enumerate()
        .for_each(|(l, dst)| {
            let mut k = l;
            for j in 0..n {
                let t = a.shifts[j] as usize + b.shifts[k] as usize;
                let t = if t >= p { t - p } else { t };
                dst[t] += (a.signs[j] * b.signs[k]) as i64;
                k = if k == 0 { n - 1 } else { k - 1 };
            }
        });
    out
}

/// Convolution of a signed monomial with a general vector: O(n^2 p).
pub fn conv_mono_gen(a: &SignedMono, v: &LogVec) -> LogVec {
    let n = a.shifts.len();
    assert_eq!(n, v.n);
    let p = v.p;
    let mut out = LogVec::zero(p, n);
    out.data
        .par_chunks_mut(p)
        .enumerate()
        .for_each(|(l, dst)| {
            let mut k = l;
            for j in 0..n {
                let t = a.shifts[j] as usize;
                let sg = a.signs[j] as i64;
                let row = v.row(k);
                for (c, &rc) in row.iter().enumerate() {
                    let tc = if c + t >= p { c + t - p } else { c + t };
                    dst[tc] += sg * rc;
                }
                k = if k == 0 { n - 1 } else { k - 1 };
            }
        });
    out
}

/// `psi^(*k)` for k >= 1; entry at w is `S_k(w) = sum over prod z_i = w of
/// psi(sum z_i)` (the k-variable Kloosterman numerator as a function of w).
pub fn psi_conv_power(field: &Field, psi: &AdditiveChar, k: u32) -> LogVec {
    let p = field.p() as usize;
    let mono = SignedMono::psi(field, psi);
    if k == 1 {
        return mono.to_logvec(p);
    }
    let mut acc = conv_mono_mono(&mono, &mono, p);
    for _ in 2..k {
        acc = conv_mono_gen(&mono, &acc);
    }
    acc
}

/// `S_n(a)` assembled from `psi^(*(n-1))`: `sum_w C[w] psi(a/w)`.
pub fn kloosterman_from_conv(
    field: &Field,
    n: u32,
    a: &FqElem,
    psi: &AdditiveChar,
) -> Result<CycInt> {
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    let p = field.p() as usize;
    if n == 1 {
        let mut counts = vec![0i64; p];
        counts[psi.digit_idx(a.idx()) as usize] += 1;
        return Ok(CycInt::from_counts_i64(p as u64, &counts));
    }
    let c = psi_conv_power(field, psi, n - 1);
    let qm1 = c.n;
    let la = field.log_idx(a.idx()) as usize;
    let mut counts = vec![0i64; p];
    for w in 0..qm1 {
        // psi(a / g^w)
        let t = psi.digit_idx(field.exp_idx(((la + qm1 - w) % qm1) as u64)) as usize;
        let row = c.row(w);
        for cidx in 0..p {
            counts[(cidx + t) % p] += row[cidx];
        }
    }
    Ok(CycInt::from_counts_i64(p as u64, &counts))
}

/// Hypergeometric sum via convolution: `H(a) = sum_v C_n[a v] D_m[v]` where
/// `C_n = psi^(*n)` and `D_m = (psi(-.) rho(.))^(*m)`. Quadratic rho on the
/// extension equals rho_base composed with the norm, which is how the sum is
/// defined.
pub fn hyp_from_conv(
    field: &Field,
    n: u32,
    mchars: u32,
    a: &FqElem,
    psi: &AdditiveChar,
) -> Result<CycInt> {
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    if mchars == 0 {
        return kloosterman_from_conv(field, n, a, psi);
    }
    let p = field.p() as usize;
    let cn = psi_conv_power(field, psi, n);
    let rho = QuadChar::new(field)?;
    let dmono = SignedMono::psi_neg_rho(field, psi, &rho);
    let qm1 = cn.n;
    let la = field.log_idx(a.idx()) as usize;
    if mchars == 1 {
        let mut counts = vec![0i64; p];
        for v in 0..qm1 {
            let av = (la + v) % qm1;
            let t = dmono.shifts[v] as usize;
            let sg = dmono.signs[v] as i64;
            let row = cn.row(av);
            for cidx in 0..p {
                counts[(cidx + t) % p] += sg * row[cidx];
            }
        }
        return Ok(CycInt::from_counts_i64(p as u64, &counts));
    }
    // m >= 2: build D_m by repeated monomial convolution
    let mut dm = conv_mono_mono(&dmono, &dmono, p);
    for _ in 2..mchars {
        dm = conv_mono_gen(&dmono, &dm);
    }
    let mut counts = vec![0i64; p];
    for v in 0..qm1 {
        let av = (la + v) % qm1;
        let crow = cn.row(av);
        let drow = dm.row(v);
        for i in 0..p {
            if crow[i] == 0 {
                continue;
            }
            for j in 0..p {
                counts[(i + j) % p] += crow[i] * drow[j];
            }
        }
    }
    Ok(CycInt::from_counts_i64(p as u64, &counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::{hyp_sum, kloosterman_raw};

    #[test]
    fn conv_matches_direct_kloosterman() {
        for (p, s) in [(2u64, 2u32), (3, 1), (5, 1), (3, 2)] {
            let f = Field::new(p, s).unwrap();
            let psi = AdditiveChar::new(&f);
            for n in 2..=4u32 {
                for a in f.units() {
                    let direct = kloosterman_raw(&f, n, &a, &psi).unwrap();
                    let viaconv = kloosterman_from_conv(&f, n, &a, &psi).unwrap();
                    assert_eq!(direct, viaconv, "p={p} s={s} n={n}");
                }
            }
        }
    }

    #[test]
    fn conv_matches_direct_hyp() {
        for p in [3u64, 5] {
            let f = Field::new(p, 1).unwrap();
            let psi = AdditiveChar::new(&f);
            for a in f.units() {
                let direct = hyp_sum(&f, 3, 1, &a, &psi).unwrap();
                let viaconv = hyp_from_conv(&f, 3, 1, &a, &psi).unwrap();
                assert_eq!(direct, viaconv, "p={p}");
            }
        }
    }
}
