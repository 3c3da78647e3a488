//! Exponential sums over finite fields, exactly in `Z[zeta_p]`.
//!
//! Small instances are enumerated directly; power sums over extension fields
//! go through multiplicative convolution in the discrete-log domain (see
//! [`conv`]), which turns the O(q^{n-1}) per-point cost into a shared
//! O(q^2) pass. Both routes coexist on purpose and cross-check each other.

pub mod conv;
pub mod identities;
pub mod so;
pub mod toric;

use crate::cyclotomic::{CycInt, ScaledCyc};
use crate::field::{Embedding, Field, FqElem};
use crate::{Error, Result};
use num_bigint::BigInt;

/// Additive character `psi_b(x) = zeta_p^{Tr(b x)}` with the trace lifted to
/// `[0, p)`. The base character (b = 1) satisfies `psi(x+y) = psi(x)psi(y)`
/// and pins zeta_p as the image of 1.
#[derive(Clone)]
pub struct AdditiveChar {
    field: Field,
    b: FqElem,
}

impl AdditiveChar {
    pub fn new(field: &Field) -> AdditiveChar {
        AdditiveChar { field: field.clone(), b: field.one() }
    }

    /// `psi_b` for a nonzero scaling parameter b.
    pub fn with_scale(field: &Field, b: FqElem) -> Result<AdditiveChar> {
        if b.is_zero() {
            return Err(Error::ZeroParameter);
        }
        Ok(AdditiveChar { field: field.clone(), b })
    }

    /// The inverse character `psi^{-1} = psi_{-1}`.
    pub fn inverse(&self) -> AdditiveChar {
        AdditiveChar { field: self.field.clone(), b: self.b.neg() }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn scale(&self) -> &FqElem {
        &self.b
    }

    #[inline]
    pub(crate) fn digit_idx(&self, x: u32) -> u8 {
        self.field.trace_idx(self.field.mul_idx(self.b.idx(), x))
    }

    pub fn eval(&self, x: &FqElem) -> CycInt {
        assert!(x.field() == &self.field, "mixed fields");
        CycInt::zeta_pow(self.field.p(), self.digit_idx(x.idx()) as u64)
    }

    /// Transport along a subfield embedding: the scale maps with it, so the
    /// result computes `psi(Tr(b~ x))` on the extension.
    pub fn lift(&self, emb: &Embedding) -> AdditiveChar {
        AdditiveChar { field: emb.ext().clone(), b: emb.map(&self.b) }
    }
}

/// The quadratic character of `F_q^x` (q odd): -1 exactly on non-squares.
#[derive(Clone)]
pub struct QuadChar {
    field: Field,
}

impl QuadChar {
    pub fn new(field: &Field) -> Result<QuadChar> {
        if field.p() == 2 {
            return Err(Error::EvenCharacteristic);
        }
        Ok(QuadChar { field: field.clone() })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub(crate) fn sign_idx(&self, x: u32) -> i64 {
        debug_assert!(x != 0);
        if self.field.log_idx(x) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// +1 on nonzero squares, -1 on non-squares, 0 at 0.
    pub fn eval(&self, x: &FqElem) -> i64 {
        assert!(x.field() == &self.field, "mixed fields");
        if x.is_zero() {
            0
        } else {
            self.sign_idx(x.idx())
        }
    }
}

/// Counts per zeta-power; the workhorse accumulator of every enumerator.
#[derive(Clone, Debug)]
pub(crate) struct PsiCounts {
    pub counts: Vec<i64>,
}

impl PsiCounts {
    pub fn new(p: u64) -> PsiCounts {
        PsiCounts { counts: vec![0; p as usize] }
    }
    #[inline]
    pub fn bump(&mut self, digit: u8) {
        self.counts[digit as usize] += 1;
    }
    #[inline]
    pub fn bump_signed(&mut self, digit: u8, sign: i64) {
        self.counts[digit as usize] += sign;
    }
    pub fn into_cyc(self, p: u64) -> CycInt {
        CycInt::from_counts_i64(p, &self.counts)
    }
}

/// Raw n-variable Kloosterman sum
/// `S_n(a) = sum over z_i in F_q^x of psi(z_1 + ... + z_{n-1} + a / (z_1...z_{n-1}))`,
/// exact in `Z[zeta_p]`. Cost O(q^{n-1}). The weight-normalized value is
/// `S_n(a) * (-sqrt q)^{-(n-1)}`.
pub fn kloosterman_raw(field: &Field, n: u32, a: &FqElem, psi: &AdditiveChar) -> Result<CycInt> {
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    if n < 1 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    assert!(a.field() == field && psi.field() == field, "mixed fields");
    let p = field.p();
    let mut counts = PsiCounts::new(p);
    // odometer over (n-1) unit variables with incremental sum and product
    let vars = (n - 1) as usize;
    if vars == 0 {
        counts.bump(psi.digit_idx(a.idx()));
        return Ok(counts.into_cyc(p));
    }
    let q = field.q() as u32;
    let mut z = vec![1u32; vars];
    loop {
        let mut sum = 0u32;
        let mut prod = 1u32;
        for &zi in &z {
            sum = field.add_idx(sum, zi);
            prod = field.mul_idx(prod, zi);
        }
        let arg = field.add_idx(sum, field.mul_idx(a.idx(), field.inv_idx(prod)));
        counts.bump(psi.digit_idx(arg));
        // advance odometer
        let mut i = 0;
        loop {
            if i == vars {
                return Ok(counts.into_cyc(p));
            }
            z[i] += 1;
            if z[i] < q {
                break;
            }
            z[i] = 1;
            i += 1;
        }
    }
}

/// `S_n(a)` packaged with its `(-sqrt q)^{n-1}` normalization.
pub fn kloosterman_scaled(
    field: &Field,
    n: u32,
    a: &FqElem,
    psi: &AdditiveChar,
) -> Result<ScaledCyc> {
    let s = kloosterman_raw(field, n, a, psi)?;
    Ok(ScaledCyc::new(s, n - 1, field.q()))
}

/// Gauss sum `G(psi, rho) = sum over x != 0 of psi(x) rho(x)`, q odd.
pub fn gauss_sum(psi: &AdditiveChar, rho: &QuadChar) -> Result<CycInt> {
    if psi.field() != rho.field() {
        return Err(Error::MixedFields);
    }
    let field = psi.field();
    if field.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let p = field.p();
    let mut counts = PsiCounts::new(p);
    for x in 1..field.q() as u32 {
        counts.bump_signed(psi.digit_idx(x), rho.sign_idx(x));
    }
    Ok(counts.into_cyc(p))
}

/// Hypergeometric sum with n trivial and m quadratic characters:
/// sum over `(x_1..x_n, y_1..y_m)` in `(F_q^x)^{n+m}` with
/// `prod x_i = a prod y_j` of `psi(sum x_i - sum y_j) prod rho(y_j)`.
/// Cost O(q^{n+m-1}).
pub fn hyp_sum(field: &Field, n: u32, m: u32, a: &FqElem, psi: &AdditiveChar) -> Result<CycInt> {
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    if m >= n {
        return Err(Error::InvalidParameter("need m < n".into()));
    }
    let rho = if m > 0 { Some(QuadChar::new(field)?) } else { None };
    let p = field.p();
    let q = field.q() as u32;
    let mut counts = PsiCounts::new(p);
    // free variables: x_1..x_{n-1} and y_1..y_m; x_n is forced
    let vars = (n - 1 + m) as usize;
    let mut v = vec![1u32; vars];
    loop {
        let mut xsum = 0u32;
        let mut xprod = 1u32;
        for &xi in &v[..(n - 1) as usize] {
            xsum = field.add_idx(xsum, xi);
            xprod = field.mul_idx(xprod, xi);
        }
        let mut ysum = 0u32;
        let mut yprod = 1u32;
        let mut sign = 1i64;
        for &yj in &v[(n - 1) as usize..] {
            ysum = field.add_idx(ysum, yj);
            yprod = field.mul_idx(yprod, yj);
            sign *= rho.as_ref().map_or(1, |r| r.sign_idx(yj));
        }
        let xn = field.mul_idx(field.mul_idx(a.idx(), yprod), field.inv_idx(xprod));
        let arg = field.sub_idx(field.add_idx(xsum, xn), ysum);
        counts.bump_signed(psi.digit_idx(arg), sign);
        let mut i = 0;
        loop {
            if i == vars {
                return Ok(counts.into_cyc(p));
            }
            v[i] += 1;
            if v[i] < q {
                break;
            }
            v[i] = 1;
            i += 1;
        }
    }
}

/// Independent slow route for [`hyp_sum`]: swaps the forced variable to y_m
/// (enumerates all x freely, forces `y_m = prod x / (a prod y_{<m})`).
/// Test oracle only; kept distinct from the main enumerator on purpose.
pub fn hyp_sum_swapped(
    field: &Field,
    n: u32,
    m: u32,
    a: &FqElem,
    psi: &AdditiveChar,
) -> Result<CycInt> {
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    if m < 1 || m >= n {
        return Err(Error::InvalidParameter("need 1 <= m < n".into()));
    }
    let rho = QuadChar::new(field)?;
    let p = field.p();
    let q = field.q() as u32;
    let mut counts = PsiCounts::new(p);
    let vars = (n + m - 1) as usize; // x_1..x_n, y_1..y_{m-1}
    let mut v = vec![1u32; vars];
    loop {
        let mut xsum = 0u32;
        let mut xprod = 1u32;
        for &xi in &v[..n as usize] {
            xsum = field.add_idx(xsum, xi);
            xprod = field.mul_idx(xprod, xi);
        }
        let mut ysum = 0u32;
        let mut yprod = 1u32;
        let mut sign = 1i64;
        for &yj in &v[n as usize..] {
            ysum = field.add_idx(ysum, yj);
            yprod = field.mul_idx(yprod, yj);
            sign *= rho.sign_idx(yj);
        }
        let ym = field.mul_idx(xprod, field.inv_idx(field.mul_idx(a.idx(), yprod)));
        debug_assert!(ym != 0);
        ysum = field.add_idx(ysum, ym);
        sign *= rho.sign_idx(ym);
        let arg = field.sub_idx(xsum, ysum);
        counts.bump_signed(psi.digit_idx(arg), sign);
        let mut i = 0;
        loop {
            if i == vars {
                return Ok(counts.into_cyc(p));
            }
            v[i] += 1;
            if v[i] < q {
                break;
            }
            v[i] = 1;
            i += 1;
        }
    }
}

/// Extension field of relative degree m over `base`, with its embedding.
pub fn extension_field(base: &Field, m: u32) -> Result<(Field, Embedding)> {
    let ext = Field::new(base.p(), base.s() * m)?;
    let emb = Embedding::new(base, &ext)?;
    Ok((ext, emb))
}

/// Power sums `t_k = (-1)^{n-1} S_n(a over F_{q^k})` for k = 1..=depth; these
/// are the power sums of the (unnormalized) Frobenius eigenvalues.
pub fn kloosterman_power_sums(
    base: &Field,
    n: u32,
    a: &FqElem,
    psi: &AdditiveChar,
    depth: u32,
) -> Result<Vec<CycInt>> {
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    let sign = if n % 2 == 0 { -1 } else { 1 };
    let mut out = Vec::with_capacity(depth as usize);
    for k in 1..=depth {
        let s = kloosterman_ext(base, n, a, psi, k)?;
        out.push(s.mul_i64(sign));
    }
    Ok(out)
}

/// Power sums at every a of the base field at once, sharing the convolution
/// vectors over each extension.
pub fn kloosterman_power_sums_all(
    base: &Field,
    n: u32,
    psi: &AdditiveChar,
    depth: u32,
) -> Result<Vec<(u32, Vec<CycInt>)>> {
    let sign = if n % 2 == 0 { -1i64 } else { 1 };
    let p = base.p() as usize;
    let units: Vec<u32> = (1..base.q() as u32).collect();
    let mut out: Vec<(u32, Vec<CycInt>)> =
        units.iter().map(|&u| (u, Vec::with_capacity(depth as usize))).collect();
    for k in 1..=depth {
        let (ext, emb) = extension_field(base, k)?;
        let psi_ext = psi.lift(&emb);
        if ext.q() <= 64 || n == 1 {
            for (u, sums) in out.iter_mut() {
                let a_ext = emb.map(&base.elem(*u));
                sums.push(kloosterman_raw(&ext, n, &a_ext, &psi_ext)?.mul_i64(sign));
            }
            continue;
        }
        let c = conv::psi_conv_power(&ext, &psi_ext, n - 1);
        let qm1 = c.n;
        for (u, sums) in out.iter_mut() {
            let a_ext = emb.map(&base.elem(*u));
            let la = ext.log_idx(a_ext.idx()) as usize;
            let mut counts = vec![0i64; p];
            for w in 0..qm1 {
                let t = psi_ext.digit_idx(ext.exp_idx(((la + qm1 - w) % qm1) as u64)) as usize;
                let row = c.row(w);
                for (cidx, &rc) in row.iter().enumerate() {
                    counts[(cidx + t) % p] += rc;
                }
            }
            sums.push(CycInt::from_counts_i64(p as u64, &counts).mul_i64(sign));
        }
    }
    Ok(out)
}

/// `S_n(a)` over the degree-m extension, via log-domain convolution.
pub fn kloosterman_ext(
    base: &Field,
    n: u32,
    a: &FqElem,
    psi: &AdditiveChar,
    m: u32,
) -> Result<CycInt> {
    if m == 1 && base.q() <= 64 {
        return kloosterman_raw(base, n, a, psi);
    }
    let (ext, emb) = extension_field(base, m)?;
    let psi_ext = psi.lift(&emb);
    let a_ext = emb.map(a);
    conv::kloosterman_from_conv(&ext, n, &a_ext, &psi_ext)
}

/// Power sums `t_k = (-1)^{n+m-1} H(n, rho^m)(a over F_{q^k})` of the
/// hypergeometric family (m quadratic characters).
pub fn hyp_power_sums(
    base: &Field,
    n: u32,
    mchars: u32,
    a: &FqElem,
    psi: &AdditiveChar,
    depth: u32,
) -> Result<Vec<CycInt>> {
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    let sign = if (n + mchars) % 2 == 0 { -1 } else { 1 };
    let mut out = Vec::with_capacity(depth as usize);
    for k in 1..=depth {
        let (ext, emb) = extension_field(base, k)?;
        let psi_ext = psi.lift(&emb);
        let a_ext = emb.map(a);
        let h = conv::hyp_from_conv(&ext, n, mchars, &a_ext, &psi_ext)?;
        out.push(h.mul_i64(sign));
    }
    Ok(out)
}

/// Maximum of `|(-1/sqrt q)^{n-1} S_n(a)|` over all complex embeddings;
/// the Weil bound says this never exceeds n.
pub fn weil_bound_excess(field: &Field, n: u32, a: &FqElem, psi: &AdditiveChar) -> Result<f64> {
    let s = kloosterman_scaled(field, n, a, psi)?;
    let p = field.p();
    let mut max = 0f64;
    for j in 1..p {
        let v = s.complex_embed(j)?;
        max = max.max(v.norm());
    }
    Ok(max)
}

/// One-line helper: q^{n-1} as a BigInt.
pub(crate) fn q_pow(q: u64, e: u32) -> BigInt {
    BigInt::from(q).pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn psi(field: &Field) -> AdditiveChar {
        AdditiveChar::new(field)
    }

    #[test]
    fn s1_is_psi_of_trace() {
        let f = Field::new(3, 1).unwrap();
        let ch = psi(&f);
        for a in f.units() {
            let s = kloosterman_raw(&f, 1, &a, &ch).unwrap();
            assert_eq!(s, ch.eval(&a));
        }
    }

    #[test]
    fn s2_at_q2_is_one() {
        let f = Field::new(2, 1).unwrap();
        let ch = psi(&f);
        let s = kloosterman_raw(&f, 2, &f.one(), &ch).unwrap();
        assert_eq!(s.as_int().unwrap(), BigInt::from(1));
    }

    #[test]
    fn s2_at_q3() {
        // S_2(1) over F_3 = zeta + zeta^2 = -1
        let f = Field::new(3, 1).unwrap();
        let ch = psi(&f);
        let s = kloosterman_raw(&f, 2, &f.one(), &ch).unwrap();
        assert_eq!(s.as_int().unwrap(), BigInt::from(-1));
    }

    #[test]
    fn zero_parameter_rejected() {
        let f = Field::new(3, 1).unwrap();
        let ch = psi(&f);
        assert!(matches!(
            kloosterman_raw(&f, 2, &f.zero(), &ch),
            Err(Error::ZeroParameter)
        ));
    }

    #[test]
    fn orthogonality() {
        // sum of psi over units is -1
        for (p, s) in [(2u64, 2u32), (3, 1), (5, 1)] {
            let f = Field::new(p, s).unwrap();
            let ch = psi(&f);
            let mut counts = PsiCounts::new(p);
            for x in f.units() {
                counts.bump(ch.digit_idx(x.idx()));
            }
            assert_eq!(counts.into_cyc(p).as_int().unwrap(), BigInt::from(-1));
        }
    }

    #[test]
    fn gauss_sum_q3_norm() {
        let f = Field::new(3, 1).unwrap();
        let g = gauss_sum(&psi(&f), &QuadChar::new(&f).unwrap()).unwrap();
        let prod = &g * &g.conj();
        assert_eq!(prod.as_int().unwrap(), BigInt::from(3));
    }

    #[test]
    fn gauss_sum_q5_square() {
        // q = 5 = 1 mod 4: G^2 = rho(-1) * 5 = 5
        let f = Field::new(5, 1).unwrap();
        let g = gauss_sum(&psi(&f), &QuadChar::new(&f).unwrap()).unwrap();
        assert_eq!((&g * &g).as_int().unwrap(), BigInt::from(5));
    }

    #[test]
    fn gauss_sum_even_q_rejected() {
        let f = Field::new(2, 2).unwrap();
        assert!(QuadChar::new(&f).is_err());
    }

    #[test]
    fn gauss_sum_embeds_to_sqrt_q() {
        // |embed_j(G)|^2 = q at every embedding, p = 5
        let f = Field::new(5, 1).unwrap();
        let g = gauss_sum(&psi(&f), &QuadChar::new(&f).unwrap()).unwrap();
        for j in 1..5u64 {
            let v = g.complex_embed(j).unwrap();
            assert!((v.norm_sqr() - 5.0).abs() < 1e-9, "j={j}");
        }
    }

    #[test]
    fn hyp_m0_is_kloosterman() {
        let f = Field::new(3, 1).unwrap();
        let ch = psi(&f);
        for a in f.units() {
            let h = hyp_sum(&f, 3, 0, &a, &ch).unwrap();
            let s = kloosterman_raw(&f, 3, &a, &ch).unwrap();
            assert_eq!(h, s);
        }
    }

    #[test]
    fn hyp_enumerators_agree() {
        // two independent loop orders, q = 3 and q = 5
        for p in [3u64, 5] {
            let f = Field::new(p, 1).unwrap();
            let ch = psi(&f);
            for a in f.units() {
                let h1 = hyp_sum(&f, 3, 1, &a, &ch).unwrap();
                let h2 = hyp_sum_swapped(&f, 3, 1, &a, &ch).unwrap();
                assert_eq!(h1, h2, "p={p}");
            }
        }
    }

    #[test]
    fn so3_identity_by_hand_q3() {
        // (S_2(1)^2 - 3) * G(psi^{-1}, rho^{-1}) = H(3, rho)(4*1), worked out
        // by hand: lhs = -2(zeta^2 - zeta), H = 2 zeta - 2 zeta^2
        let f = Field::new(3, 1).unwrap();
        let ch = psi(&f);
        let rho = QuadChar::new(&f).unwrap();
        let s2 = kloosterman_raw(&f, 2, &f.one(), &ch).unwrap();
        let lhs_factor = &(&s2 * &s2) - &CycInt::from_int(3, 3);
        let g = gauss_sum(&ch.inverse(), &rho).unwrap();
        let lhs = &lhs_factor * &g;
        let four_a = f.from_int(4);
        let h = hyp_sum(&f, 3, 1, &four_a, &ch).unwrap();
        assert_eq!(lhs, h);
        let mut expect = CycInt::zero(3);
        expect = &expect + &CycInt::zeta_pow(3, 1).mul_i64(2);
        expect = &expect - &CycInt::zeta_pow(3, 2).mul_i64(2);
        assert_eq!(h, expect);
    }

    #[test]
    fn galois_equivariance() {
        // sigma_c(S_n(a; psi)) = S_n(a; psi_c), exhaustive small cases
        for p in [3u64, 5] {
            let f = Field::new(p, 1).unwrap();
            let base = psi(&f);
            for n in 2..=3u32 {
                for a in f.units() {
                    let s = kloosterman_raw(&f, n, &a, &base).unwrap();
                    for c in 2..p {
                        let twisted = AdditiveChar::with_scale(&f, f.elem(c as u32)).unwrap();
                        let lhs = s.galois(c).unwrap();
                        let rhs = kloosterman_raw(&f, n, &a, &twisted).unwrap();
                        assert_eq!(lhs, rhs, "p={p} n={n} c={c}");
                    }
                }
            }
        }
    }

    #[test]
    fn psi_rescale_on_plain_kloosterman() {
        // S_n(a; psi_b) = S_n(b^n a; psi)
        let f = Field::new(5, 1).unwrap();
        let base = psi(&f);
        for n in 2..=3u32 {
            for b in f.units() {
                let tw = AdditiveChar::with_scale(&f, b.clone()).unwrap();
                for a in f.units() {
                    let lhs = kloosterman_raw(&f, n, &a, &tw).unwrap();
                    let ba = a.mul(&b.pow(n as u64));
                    let rhs = kloosterman_raw(&f, n, &ba, &base).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn weil_bound_small() {
        for (p, s) in [(2u64, 2u32), (3, 1), (5, 1)] {
            let f = Field::new(p, s).unwrap();
            let ch = psi(&f);
            for n in 1..=3u32 {
                for a in f.units() {
                    let excess = weil_bound_excess(&f, n, &a, &ch).unwrap();
                    assert!(excess <= n as f64 + 1e-9, "p={p} n={n} got {excess}");
                }
            }
        }
    }
}
