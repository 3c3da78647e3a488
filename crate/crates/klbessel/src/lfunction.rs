//! Characteristic polynomials and L-polynomials from power sums, exactly in
//! `Z[zeta_p]`, plus lambda-adic Newton polygons and the table-driven Hodge
//! slopes with their ordinarity comparison.

use crate::cyclotomic::{CycInt, Valuation};
use crate::field::Field;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::Rational64;
use serde::Serialize;

/// Power sums `t_1..t_D` of an eigenvalue multiset, over the base size q.
#[derive(Debug, Clone)]
pub struct PowerSumSeq {
    pub values: Vec<CycInt>,
    pub q: u64,
}

impl PowerSumSeq {
    pub fn new(values: Vec<CycInt>, q: u64) -> PowerSumSeq {
        PowerSumSeq { values, q }
    }
}

/// Monic characteristic polynomial (coefficients `c_0..c_r`, `c_r = 1`) whose
/// root power sums are the given `t_m`, via Newton's identities:
/// `k e_k = sum_{i=1}^{k} (-1)^{i-1} t_i e_{k-i}`. Every division by an
/// integer must be exact in `Z[zeta_p]`; failure signals a wrong degree.
pub fn charpoly_from_power_sums(ts: &PowerSumSeq, r: usize) -> Result<Vec<CycInt>> {
    if ts.values.len() < r {
        return Err(Error::NotEnoughPowerSums { need: r, have: ts.values.len() });
    }
    let m = ts.values.first().map(|v| v.order()).unwrap_or(2);
    let mut e = vec![CycInt::one(m)];
    for k in 1..=r {
        let mut acc = CycInt::zero(m);
        for i in 1..=k {
            let term = ts.values[i - 1].checked_mul(&e[k - i])?;
            acc = if i % 2 == 1 { acc.checked_add(&term)? } else { acc.checked_sub(&term)? };
        }
        let ek = acc
            .div_exact_int(&BigInt::from(k as i64))
            .ok_or_else(|| Error::InexactDivision(format!("e_{k} by {k}")))?;
        e.push(ek);
    }
    // P(X) = sum_k (-1)^k e_k X^{r-k}: coefficients c_{r-k} = (-1)^k e_k
    let mut coeffs = vec![CycInt::zero(m); r + 1];
    for (k, ek) in e.into_iter().enumerate() {
        coeffs[r - k] = if k % 2 == 0 { ek } else { -&ek };
    }
    Ok(coeffs)
}

/// Power sums back from a monic characteristic polynomial (the inverse
/// Newton identities), for roundtrip checks and tail prediction:
/// `t_k = e_1 t_{k-1} - e_2 t_{k-2} + ... + (-1)^{k-1} k e_k`.
pub fn power_sums_from_charpoly(coeffs: &[CycInt], depth: usize) -> Result<Vec<CycInt>> {
    let r = coeffs.len() - 1;
    let m = coeffs[0].order();
    // e_k = (-1)^k c_{r-k}
    let e: Vec<CycInt> = (0..=r)
        .map(|k| {
            let c = &coeffs[r - k];
            if k % 2 == 0 {
                c.clone()
            } else {
                -c
            }
        })
        .collect();
    let mut ts: Vec<CycInt> = Vec::with_capacity(depth);
    for k in 1..=depth {
        let mut acc = CycInt::zero(m);
        for i in 1..k.min(r + 1) {
            let term = e[i].checked_mul(&ts[k - 1 - i])?;
            acc = if i % 2 == 1 { acc.checked_add(&term)? } else { acc.checked_sub(&term)? };
        }
        if k <= r {
            let last = e[k].mul_i64(k as i64);
            acc = if k % 2 == 1 { acc.checked_add(&last)? } else { acc.checked_sub(&last)? };
        }
        ts.push(acc);
    }
    Ok(ts)
}

/// L-polynomial `L(T) = exp(sum_m t_m T^m / m)` truncated at the expected
/// degree, via the exact recursion `k L_k = sum_{j=1}^{k} t_j L_{k-j}`.
/// Divisions must be exact; if power sums beyond the degree are supplied,
/// the corresponding coefficients must vanish.
pub fn lpoly_from_sums(ts: &PowerSumSeq, degree: usize) -> Result<Vec<CycInt>> {
    if ts.values.len() < degree {
        return Err(Error::NotEnoughPowerSums { need: degree, have: ts.values.len() });
    }
    let m = ts.values.first().map(|v| v.order()).unwrap_or(2);
    let mut l = vec![CycInt::one(m)];
    for k in 1..=ts.values.len() {
        let mut acc = CycInt::zero(m);
        for j in 1..=k {
            if k - j >= l.len() {
                // beyond-degree coefficients are zero (verified below)
                continue;
            }
            acc = acc.checked_add(&ts.values[j - 1].checked_mul(&l[k - j])?)?;
        }
        let lk = acc
            .div_exact_int(&BigInt::from(k as i64))
            .ok_or_else(|| Error::InexactDivision(format!("L_{k} by {k}")))?;
        if k > degree {
            if !lk.is_zero() {
                return Err(Error::DegreeMismatch { degree, index: k });
            }
        } else {
            l.push(lk);
        }
    }
    Ok(l)
}

/// Lower convex hull of `(i, v_i)` with slope multiset extraction.
#[derive(Debug, Clone, Serialize)]
pub struct NewtonPolygon {
    /// input points, None marking infinite valuation (zero coefficient)
    pub points: Vec<(usize, Option<Rational64>)>,
    /// hull vertices
    pub hull: Vec<(usize, Rational64)>,
    /// weakly increasing, one slope per unit of horizontal length
    pub slopes: Vec<Rational64>,
}

/// Hull of finite-valuation points; zero coefficients never lie on the lower
/// hull of a polynomial with nonzero ends.
fn lower_hull(points: &[(usize, Option<Rational64>)]) -> Vec<(usize, Rational64)> {
    let finite: Vec<(usize, Rational64)> =
        points.iter().filter_map(|&(i, v)| v.map(|v| (i, v))).collect();
    assert!(!finite.is_empty());
    let mut hull: Vec<(usize, Rational64)> = Vec::new();
    for &(x, y) in &finite {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop (x2, y2) if it lies on or above segment (x1,y1)-(x,y)
            let lhs = (y2 - y1) * Rational64::from_integer((x - x1) as i64);
            let rhs = (y - y1) * Rational64::from_integer((x2 - x1) as i64);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    hull
}

impl NewtonPolygon {
    /// Build from valuation data `(i, v(c_i))`.
    pub fn from_valuations(points: Vec<(usize, Option<Rational64>)>) -> NewtonPolygon {
        let hull = lower_hull(&points);
        let mut slopes = Vec::new();
        for w in hull.windows(2) {
            let (x1, y1) = w[0];
            let (x2, y2) = w[1];
            let slope = (y2 - y1) / Rational64::from_integer((x2 - x1) as i64);
            for _ in x1..x2 {
                slopes.push(slope);
            }
        }
        NewtonPolygon { points, hull, slopes }
    }

    /// Sum of slopes equals total rise of the hull.
    pub fn total_rise(&self) -> Rational64 {
        self.slopes.iter().sum()
    }
}

/// Valuations of the coefficients of a polynomial over `Z[zeta_p]`, in the
/// `v(q) = 1` normalization (lambda-division count over `(p-1) s`).
pub fn coeff_valuations(coeffs: &[CycInt], s: u32) -> Vec<(usize, Option<Rational64>)> {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let v = match c.lambda_valuation() {
                Valuation::Infinite => None,
                Valuation::Finite(vp) => Some(vp / Rational64::from_integer(s as i64)),
            };
            (i, v)
        })
        .collect()
}

/// Newton polygon of a monic characteristic polynomial `P(X) = prod (X - alpha)`:
/// the returned slopes are the root valuations `v(alpha)` with `v(q) = 1`.
pub fn newton_polygon_charpoly(coeffs: &[CycInt], s: u32) -> Result<NewtonPolygon> {
    if coeffs.iter().all(|c| c.is_zero()) {
        return Err(Error::InvalidParameter("zero polynomial".into()));
    }
    let pts = coeff_valuations(coeffs, s);
    let np = NewtonPolygon::from_valuations(pts);
    // hull slopes of sum c_i X^i are -v(root); negate and sort ascending
    let mut slopes: Vec<Rational64> = np.slopes.iter().map(|s| -s).collect();
    slopes.sort();
    Ok(NewtonPolygon { points: np.points, hull: np.hull, slopes })
}

/// Newton polygon of an L-polynomial `L(T) = prod (1 - gamma T)`: the
/// returned slopes are the inverse-root valuations `v(gamma)`, `v(q) = 1`.
pub fn newton_polygon_lpoly(coeffs: &[CycInt], s: u32) -> Result<NewtonPolygon> {
    if coeffs.iter().all(|c| c.is_zero()) {
        return Err(Error::InvalidParameter("zero polynomial".into()));
    }
    let pts = coeff_valuations(coeffs, s);
    let np = NewtonPolygon::from_valuations(pts);
    let mut slopes = np.slopes.clone();
    slopes.sort();
    Ok(NewtonPolygon { points: np.points, hull: np.hull, slopes })
}

/// Families with table-driven Hodge slopes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HodgeFamily {
    /// toric family: slopes {0, 1/d, 2/d, ..., 2n + (d-1)/d}
    Fd { n: u32, d: u32 },
    /// odd hypergeometric family: slopes {1/2, 3/2, ..., 2n + 1/2}
    Hyp { n: u32 },
}

/// The explicit Hodge slope multiset of a preset family.
pub fn hodge_polygon_preset(family: HodgeFamily) -> Vec<Rational64> {
    match family {
        HodgeFamily::Fd { n, d } => {
            let deg = (d * (2 * n + 1)) as i64;
            (0..deg).map(|k| Rational64::new(k, d as i64)).collect()
        }
        HodgeFamily::Hyp { n } => {
            (0..=(2 * n) as i64).map(|k| Rational64::new(2 * k + 1, 2)).collect()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrdinarityReport {
    pub family: String,
    pub p: u64,
    pub q: u64,
    pub newton: Vec<Rational64>,
    pub hodge: Vec<Rational64>,
    pub ordinary: bool,
}

/// Compare the Newton slopes of the toric family's L-polynomial with its
/// Hodge slopes. Needs `d | p - 1` and power sums to degree d(2n+1).
pub fn ordinarity_check_fd(
    base: &Field,
    n: u32,
    d: u32,
    ts: &PowerSumSeq,
) -> Result<OrdinarityReport> {
    if d == 0 || (base.p() - 1) % d as u64 != 0 {
        return Err(Error::InvalidParameter("need d | p - 1".into()));
    }
    let degree = (d * (2 * n + 1)) as usize;
    let l = lpoly_from_sums(ts, degree)?;
    let np = newton_polygon_lpoly(&l, base.s())?;
    let hodge = hodge_polygon_preset(HodgeFamily::Fd { n, d });
    let ordinary = np.slopes == hodge;
    Ok(OrdinarityReport {
        family: format!("f_d(n={n}, d={d})"),
        p: base.p(),
        q: base.q(),
        newton: np.slopes,
        hodge,
        ordinary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::CycInt;

    fn q3_poly(vals: &[i64]) -> Vec<CycInt> {
        vals.iter().map(|&v| CycInt::from_int(3, v)).collect()
    }

    #[test]
    fn charpoly_single_eigenvalue() {
        // t_m = c^m reconstructs (X - c)
        let c = CycInt::zeta_pow(5, 1);
        let ts = PowerSumSeq::new(vec![c.clone()], 5);
        let poly = charpoly_from_power_sums(&ts, 1).unwrap();
        assert_eq!(poly.len(), 2);
        assert_eq!(poly[1], CycInt::one(5));
        assert_eq!(poly[0], -&c);
    }

    #[test]
    fn charpoly_two_eigenvalues_exact_division() {
        // alpha = 2, beta = 3: t = (5, 13); e_2 = (25 - 13)/2 = 6
        let ts = PowerSumSeq::new(
            vec![CycInt::from_int(3, 5), CycInt::from_int(3, 13)],
            3,
        );
        let poly = charpoly_from_power_sums(&ts, 2).unwrap();
        assert_eq!(poly[0].as_int().unwrap(), num_bigint::BigInt::from(6));
        assert_eq!(poly[1].as_int().unwrap(), num_bigint::BigInt::from(-5));
    }

    #[test]
    fn charpoly_roundtrip_and_tail_prediction() {
        // power sums of {1, 2, 6}: reconstruct and predict t_4
        let pow = |k: u32| 1i64 + 2i64.pow(k) + 6i64.pow(k);
        let ts = PowerSumSeq::new(
            (1..=3).map(|k| CycInt::from_int(3, pow(k))).collect(),
            3,
        );
        let poly = charpoly_from_power_sums(&ts, 3).unwrap();
        let back = power_sums_from_charpoly(&poly, 4).unwrap();
        for k in 1..=3usize {
            assert_eq!(back[k - 1], ts.values[k - 1]);
        }
        assert_eq!(back[3].as_int().unwrap(), num_bigint::BigInt::from(pow(4)));
    }

    #[test]
    fn inexact_division_flags_wrong_degree() {
        // t_1 = 1, t_2 = 2: e_2 = (1 - 2)/2 not integral
        let ts = PowerSumSeq::new(
            vec![CycInt::from_int(3, 1), CycInt::from_int(3, 2)],
            3,
        );
        assert!(matches!(
            charpoly_from_power_sums(&ts, 2),
            Err(Error::InexactDivision(_))
        ));
    }

    #[test]
    fn lpoly_toy_rank_one() {
        // S_m = -1: L(T) = exp(-sum T^m/m) = 1 - T
        let ts = PowerSumSeq::new(vec![CycInt::from_int(3, -1); 4], 3);
        let l = lpoly_from_sums(&ts, 1).unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(l[1].as_int().unwrap(), num_bigint::BigInt::from(-1));
    }

    #[test]
    fn lpoly_degree_mismatch_detected() {
        // S_m = -2^m would need degree 1 with gamma = 2; degree 0 must fail
        let ts = PowerSumSeq::new(
            (1..=2).map(|k| CycInt::from_int(3, -(2i64.pow(k)))).collect(),
            3,
        );
        assert!(matches!(
            lpoly_from_sums(&ts, 0),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn newton_polygon_x_minus_1_x_minus_q() {
        // (X-1)(X-q) = q - (1+q)X + X^2 over Z[zeta_3], q = 3: slopes {0, 1}
        let poly = q3_poly(&[3, -4, 1]);
        let np = newton_polygon_charpoly(&poly, 1).unwrap();
        assert_eq!(
            np.slopes,
            vec![Rational64::from_integer(0), Rational64::from_integer(1)]
        );
        assert_eq!(np.total_rise(), Rational64::from_integer(1));
    }

    #[test]
    fn newton_polygon_unit_multiple_invariant() {
        // multiplying by a unit (zeta power) leaves the polygon unchanged
        let poly = q3_poly(&[9, 3, 1]);
        let np1 = newton_polygon_charpoly(&poly, 1).unwrap();
        let z = CycInt::zeta_pow(3, 1);
        let twisted: Vec<CycInt> = poly.iter().map(|c| c.checked_mul(&z).unwrap()).collect();
        let np2 = newton_polygon_charpoly(&twisted, 1).unwrap();
        assert_eq!(np1.slopes, np2.slopes);
    }

    #[test]
    fn newton_polygon_skips_zero_coefficients() {
        // X^2 - q^2 (middle coefficient zero): slopes {1, 1}
        let poly = q3_poly(&[-9, 0, 1]);
        let np = newton_polygon_charpoly(&poly, 1).unwrap();
        assert_eq!(np.slopes, vec![Rational64::from_integer(1); 2]);
    }

    #[test]
    fn hodge_presets() {
        assert_eq!(
            hodge_polygon_preset(HodgeFamily::Fd { n: 1, d: 1 }),
            vec![
                Rational64::from_integer(0),
                Rational64::from_integer(1),
                Rational64::from_integer(2)
            ]
        );
        assert_eq!(
            hodge_polygon_preset(HodgeFamily::Fd { n: 1, d: 2 }),
            [0i64, 1, 2, 3, 4, 5]
                .iter()
                .map(|&k| Rational64::new(k, 2))
                .collect::<Vec<_>>()
        );
        assert_eq!(
            hodge_polygon_preset(HodgeFamily::Hyp { n: 1 }),
            [1i64, 3, 5].iter().map(|&k| Rational64::new(k, 2)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn slope_sum_is_constant_coefficient_valuation() {
        let poly = q3_poly(&[27, 3, -5, 1]);
        let np = newton_polygon_charpoly(&poly, 1).unwrap();
        let total: Rational64 = np.slopes.iter().sum();
        assert_eq!(total, Rational64::from_integer(3));
    }
}
