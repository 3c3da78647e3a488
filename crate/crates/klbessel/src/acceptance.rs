//! The acceptance suite: every numerical claim the library is contracted to
//! reproduce, one callable check per criterion, each returning a pass/fail
//! report with its runtime. `run_all` executes them in order; the `quick`
//! profile trims the largest grids, `full` runs everything at the stated
//! sizes.

use crate::cyclotomic::{scaled_equal, CycInt, ScaledCyc, Valuation};
use crate::dwork::{
    check_conditions, congruence_theorem_check, ratio_integrality, unit_root_crosscheck,
    unit_root_truncations, CoeffFamily,
};
use crate::expsum::identities::{verify_identity, IdentityName, IdentityParams};
use crate::expsum::so::{so2n1_cyc, so2n_quadric_sum, so2n_toric_cyc, so2n_toric_sum};
use crate::expsum::toric::{toric_sum_sm, LaurentPoly};
use crate::expsum::{
    gauss_sum, hyp_power_sums, kloosterman_raw, weil_bound_excess, AdditiveChar, QuadChar,
};
use crate::field::Field;
use crate::frobenius::{
    connection_preset, residual_is_zero, slope_sets_all_points, solve_frobenius,
    trace_check_series, PresetLabel,
};
use crate::lfunction::{
    hodge_polygon_preset, lpoly_from_sums, newton_polygon_lpoly, HodgeFamily, PowerSumSeq,
};
use crate::padic::{PadicCfg, PadicNum};
use crate::report::{CriterionReport, SummaryReport};
use crate::Result;
use num_bigint::BigInt;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Quick,
    Full,
}

fn report(id: u32, name: &str, started: Instant, outcome: Result<(bool, String)>) -> CriterionReport {
    let (pass, detail) = match outcome {
        Ok((pass, detail)) => (pass, detail),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionReport {
        id,
        name: name.to_string(),
        pass,
        runtime_ms: started.elapsed().as_millis(),
        detail,
    }
}

/// 1. Carlitz identity: `S_3(a) = S_2(a)^2 - q` exactly in Z for q in
/// {2, 4, 8, 16}.
pub fn criterion_1(_profile: Profile) -> CriterionReport {
    let t0 = Instant::now();
    let out = (|| {
        let rep = verify_identity(
            IdentityName::Carlitz,
            &IdentityParams { p: 2, s_max: 4, n_min: 2, n_max: 3 },
        )?;
        Ok((rep.pass, format!("{} points, all exact in Z", rep.rows.len())))
    })();
    report(1, "carlitz identity over F_{2^s}, s <= 4", t0, out)
}

/// 2. Rank-3 comparison, both branches: p = 2 at q in {2,4,8}; p in {3,5}
/// at q = p; exact in Z[zeta_p] after cross-multiplying.
pub fn criterion_2(_profile: Profile) -> CriterionReport {
    let t0 = Instant::now();
    let out = (|| {
        let mut total = 0usize;
        let mut pass = true;
        for (p, s_max) in [(2u64, 3u32), (3, 1), (5, 1)] {
            let rep = verify_identity(
                IdentityName::So3,
                &IdentityParams { p, s_max, n_min: 1, n_max: 1 },
            )?;
            total += rep.rows.len();
            pass &= rep.pass;
        }
        Ok((pass, format!("{total} points across p = 2, 3, 5")))
    })();
    report(2, "rank-3 comparison (both characteristics)", t0, out)
}

/// 3. Quadric sum equals toric sum for n = 3, q in {2, 3}; and
/// `q Kl_SO4(a) = S_2(a)^2` for q <= 4, with the open-quadric point count
/// cross-checked against a brute-force counter.
pub fn criterion_3(_profile: Profile) -> CriterionReport {
    let t0 = Instant::now();
    let out = (|| {
        let mut pass = true;
        let mut points = 0usize;
        for (p, s) in [(2u64, 1u32), (3, 1)] {
            let f = Field::new(p, s)?;
            let psi = AdditiveChar::new(&f);
            for a in f.units() {
                let quad = so2n_quadric_sum(&f, 3, &a, &psi)?;
                let tor = so2n_toric_sum(&f, 3, &a, &psi)?;
                pass &= scaled_equal(&quad.value, &tor)?.equal;
                points += 1;
            }
            let expected = crate::expsum::so::quadric_point_count(&f, 3)?;
            let got = so2n_quadric_sum(&f, 3, &f.one(), &psi)?.points;
            pass &= expected == got;
        }
        for (p, s) in [(2u64, 1u32), (3, 1), (2, 2)] {
            let f = Field::new(p, s)?;
            let psi = AdditiveChar::new(&f);
            for a in f.units() {
                let quad = so2n_quadric_sum(&f, 2, &a, &psi)?;
                let s2 = kloosterman_raw(&f, 2, &a, &psi)?;
                let rhs = ScaledCyc::new(s2.checked_mul(&s2)?, 2, f.q());
                pass &= scaled_equal(&quad.value, &rhs)?.equal;
                points += 1;
            }
        }
        Ok((pass, format!("{points} points, quadric enumeration exact")))
    })();
    report(3, "quadric vs toric and the rank-4 product", t0, out)
}

/// 4. Chain identity `q^n Kl_SO(2n+2) - q^n = q^n Kl_SO(2n+1)` and the
/// convolution closed forms at n = 2, q in {2, 3, 4}, exact after clearing
/// q-powers.
pub fn criterion_4(_profile: Profile) -> CriterionReport {
    let t0 = Instant::now();
    let out = (|| {
        let mut pass = true;
        let mut points = 0usize;
        for (p, s) in [(2u64, 1u32), (3, 1), (2, 2)] {
            let f = Field::new(p, s)?;
            let psi = AdditiveChar::new(&f);
            let qn = BigInt::from(f.q()).pow(2);
            for a in f.units() {
                let so6 = so2n_toric_cyc(&f, 3, &a, &psi)?;
                let lhs = so6.checked_sub(&CycInt::from_bigint(f.p(), qn.clone()))?;
                let conv = so2n1_cyc(&f, 2, &a, &psi)?;
                pass &= lhs == conv;
                // closed form: p = 2 vs S_5; p = 3 vs the hypergeometric at 4a
                if p == 2 {
                    let rhs = kloosterman_raw(&f, 5, &a, &psi)?;
                    pass &= conv == rhs;
                } else {
                    let rho = QuadChar::new(&f)?;
                    let g = gauss_sum(&psi.inverse(), &rho)?;
                    let four_a = a.mul(&f.from_int(4));
                    let rhs = crate::expsum::hyp_sum(&f, 5, 1, &four_a, &psi)?;
                    pass &= conv.checked_mul(&g)? == rhs;
                }
                points += 1;
            }
        }
        Ok((pass, format!("{points} points, chain + convolution exact")))
    })();
    report(4, "odd-even chain and convolution closed forms", t0, out)
}

/// 5. Trace identity of the solved Frobenius series mod pi^16 at every
/// degree-1 point: gl(n), n in {2,3} and so(2n+1), n in {1,2}, p in {2,3},
/// M = 24. Truncation degrees are chosen per prime so the tail bound and the
/// normalizer fit certify pi^16.
pub fn criterion_5(profile: Profile) -> CriterionReport {
    let t0 = Instant::now();
    let out = (|| {
        let mut pass = true;
        let mut lines = Vec::new();
        let jobs: Vec<(PresetLabel, u32, u64, usize)> = match profile {
            Profile::Quick => vec![
                (PresetLabel::Gln, 2, 2, 128),
                (PresetLabel::Gln, 2, 3, 76),
                (PresetLabel::So2n1, 1, 2, 128),
                (PresetLabel::So2n1, 1, 3, 96),
            ],
            Profile::Full => vec![
                (PresetLabel::Gln, 2, 2, 128),
                (PresetLabel::Gln, 3, 2, 128),
                (PresetLabel::Gln, 2, 3, 76),
                (PresetLabel::Gln, 3, 3, 76),
                (PresetLabel::So2n1, 1, 2, 128),
                (PresetLabel::So2n1, 2, 2, 160),
                (PresetLabel::So2n1, 1, 3, 96),
                (PresetLabel::So2n1, 2, 3, 96),
            ],
        };
        for (label, n, p, deg) in jobs {
            let cfg = PadicCfg::new(p, 24);
            let spec = connection_preset(label, n)?;
            let fs = solve_frobenius(&spec, p, cfg, deg)?;
            let rows = trace_check_series(&fs, 16)?;
            let ok = rows.iter().all(|r| r.pass);
            pass &= ok;
            lines.push(format!(
                "{:?}(n={n}) p={p}: {}",
                label,
                if ok { "ok" } else { "FAIL" }
            ));
        }
        Ok((pass, lines.join("; ")))
    })();
    report(5, "Frobenius trace identity mod pi^16", t0, out)
}

/// 6. Newton-polygon slopes at every point: {0, 1, ..., r-1} for the
/// n-variable family (n <= 4) and the odd orthogonal family (n <= 2) over
/// every q <= 9.
pub fn criterion_6(profile: Profile) -> CriterionReport {
    let t0 = Instant::now();
    let out = (|| {
        let mut pass = true;
        let mut points = 0usize;
        let fields: Vec<(u64, u32)> = match profile {
            Profile::Quick => vec![(2, 1), (3, 1), (2, 2)],
            Profile::Full => vec![(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)],
        };
        for &(p, s) in &fields {
            let f = Field::new(p, s)?;
            let psi = AdditiveChar::new(&f);
            let n_max = if profile == Profile::Quick { 3 } else { 4 };
            for n in 1..=n_max {
                let expect: Vec<Rational64> =
                    (0..n as i64).map(Rational64::from_integer).collect();
                for (_, slopes) in slope_sets_all_points(PresetLabel::Gln, n, &f, &psi)? {
                    pass &= slopes == expect;
                    points += 1;
                }
            }
            let so_max = if profile == Profile::Quick { 1 } else { 2 };
            for n in 1..=so_max {
                let r = 2 * n + 1;
                let expect: Vec<Rational64> =
                    (0..r as i64).map(Rational64::from_integer).collect();
                for (_, slopes) in slope_sets_all_points(PresetLabel::So2n1, n, &f, &psi)? {
                    pass &= slopes == expect;
                    points += 1;
                }
            }
        }
        Ok((pass, format!("{points} slope multisets, all {{0..r-1}}")))
    })();
    report(6, "everywhere-ordinary Newton polygons", t0, out)
}

/// 7. Toric L-functions: degree d(2n+1), all divisions exact, and NP = HP
/// for (d, n, p) = (1, 1, 3) and (2, 1, 3) (the latter needs power sums to
/// m = 6). Hypergeometric slope set {1/2, 3/2, 5/2} at every a in F_3^x.
pub fn criterion_7(profile: Profile) -> CriterionReport {
    let t0 = Instant::now();
    let out = (|| {
        let f3 = Field::new(3, 1)?;
        let psi = AdditiveChar::new(&f3);
        let a = f3.one();
        let mut pass = true;
        let mut lines = Vec::new();
        // d = 1: degree 3, one extra sum to pin the degree
        {
            let f = LaurentPoly::fd_family(&f3, 1, 1, &a)?;
            let sums: Vec<CycInt> =
                (1..=4).map(|m| toric_sum_sm(&f, m, &psi)).collect::<Result<_>>()?;
            let ts = PowerSumSeq::new(sums, 3);
            let l = lpoly_from_sums(&ts, 3)?;
            let np = newton_polygon_lpoly(&l, 1)?;
            let hp = hodge_polygon_preset(HodgeFamily::Fd { n: 1, d: 1 });
            let ok = np.slopes == hp;
            pass &= ok;
            lines.push(format!("f_1: degree 3, NP=HP {}", if ok { "ok" } else { "FAIL" }));
        }
        // d = 2: degree 6, sums to m = 6 (full profile only)
        if profile == Profile::Full {
            let f = LaurentPoly::fd_family(&f3, 1, 2, &a)?;
            let sums: Vec<CycInt> =
                (1..=6).map(|m| toric_sum_sm(&f, m, &psi)).collect::<Result<_>>()?;
            let ts = PowerSumSeq::new(sums, 3);
            let l = lpoly_from_sums(&ts, 6)?;
            let np = newton_polygon_lpoly(&l, 1)?;
            let hp = hodge_polygon_preset(HodgeFamily::Fd { n: 1, d: 2 });
            let ok = np.slopes == hp;
            pass &= ok;
            lines.push(format!("f_2: degree 6, NP=HP {}", if ok { "ok" } else { "FAIL" }));
        } else {
            lines.push("f_2 skipped (quick profile)".to_string());
        }
        // hypergeometric slopes at every a
        {
            let hp = hodge_polygon_preset(HodgeFamily::Hyp { n: 1 });
            for a in f3.units() {
                let ts = PowerSumSeq::new(hyp_power_sums(&f3, 3, 1, &a, &psi, 3)?, 3);
                let poly = crate::lfunction::charpoly_from_power_sums(&ts, 3)?;
                let np = crate::lfunction::newton_polygon_charpoly(&poly, 1)?;
                pass &= np.slopes == hp;
            }
            lines.push("hyp slopes {1/2,3/2,5/2} at all a".to_string());
        }
        Ok((pass, lines.join("; ")))
    })();
    report(7, "toric L-functions and hypergeometric slopes", t0, out)
}

/// 8. Dwork congruences at p = 2: conditions with the sign pattern
/// u(1,1,m) = (-1)^m for the Bessel family and untwisted (c) for the
/// orthogonal family, r <= 256, s <= 7; the product congruence for s <= 5;
/// ratio integrality to degree 128.
pub fn criterion_8(profile: Profile) -> CriterionReport {
    let t0 = Instant::now();
    let out = (|| {
        let rmax = if profile == Profile::Full { 256 } else { 64 };
        let smax = if profile == Profile::Full { 7 } else { 4 };
        let mut pass = true;
        let mut lines = Vec::new();
        let f_rep = check_conditions(&[CoeffFamily::BesselF { n: 1 }], 2, rmax, smax)?;
        pass &= f_rep.pass() && f_rep.c_variant[0] == "c'" && f_rep.u_pattern_kind[0] == "(-1)^m";
        lines.push(format!(
            "bessel family: (a,b,c',d,e) {} with u(1,1,m) = {}",
            if f_rep.pass() { "pass" } else { "FAIL" },
            f_rep.u_pattern_kind[0]
        ));
        let g_rep = check_conditions(&[CoeffFamily::SoG { n: 1 }], 2, rmax, smax)?;
        pass &= g_rep.pass() && g_rep.c_variant[0] == "c";
        lines.push(format!(
            "orthogonal family: (a,b,c,d,e) {}",
            if g_rep.pass() { "pass" } else { "FAIL" }
        ));
        let mixed = check_conditions(
            &[CoeffFamily::BesselF { n: 1 }, CoeffFamily::SoG { n: 1 }],
            2,
            rmax,
            smax,
        )?;
        pass &= mixed.pass()
            && mixed.u_pattern_kind[0] == "all +1"
            && mixed.u_pattern_kind[1] == "(-1)^m";
        let thm = congruence_theorem_check(&[CoeffFamily::BesselF { n: 1 }], 2, 3, 5, true, rmax)?;
        let thm_ok = thm.iter().all(|r| r.pass);
        pass &= thm_ok;
        lines.push(format!(
            "product congruence (s <= 5): {} cells {}",
            thm.len(),
            if thm_ok { "pass" } else { "FAIL" }
        ));
        let deg = if profile == Profile::Full { 128 } else { 48 };
        for n in [1u32, 2] {
            let rep = ratio_integrality(n, deg);
            pass &= rep.all_integral;
            lines.push(format!(
                "F/G integral to degree {deg} (n={n}): {}",
                if rep.all_integral { "pass" } else { "FAIL" }
            ));
        }
        Ok((pass, lines.join("; ")))
    })();
    report(8, "Dwork congruences, sign pattern, ratio integrality", t0, out)
}

/// 9. Unit-root crosscheck at p = 2, a = 1: the slope-0 eigenvalue of the
/// solved Frobenius equals the Dwork limit mod 2^5, for both rank-3 bundles.
pub fn criterion_9(_profile: Profile) -> CriterionReport {
    let t0 = Instant::now();
    let out = (|| {
        let mut pass = true;
        let mut lines = Vec::new();
        for (label, n, fam, deg, delta, smax) in [
            (PresetLabel::Gln, 3u32, CoeffFamily::BesselF { n: 1 }, 128usize, 1u32, 6u32),
            (PresetLabel::So2n1, 1, CoeffFamily::SoG { n: 1 }, 128, 0, 5),
        ] {
            let spec = connection_preset(label, n)?;
            let cfg = PadicCfg::new(2, 24);
            let fs = solve_frobenius(&spec, 2, cfg, deg)?;
            let ur = unit_root_truncations(fam, 2, smax, delta, 160)?;
            let rep = unit_root_crosscheck(&fs, &ur, 1)?;
            pass &= rep.pass && rep.precision_bits >= 5;
            lines.push(format!(
                "{}: {} = {} mod 2^{} {}",
                rep.family,
                rep.unit_root,
                rep.dwork_value,
                rep.precision_bits,
                if rep.pass { "ok" } else { "FAIL" }
            ));
        }
        Ok((pass, lines.join("; ")))
    })();
    report(9, "unit root equals the Dwork limit (mod 2^5)", t0, out)
}

/// 10. Property suites: the archimedean bound at every embedding for
/// n <= 4, q <= 16; 10^4 randomized ring/valuation invariants in the
/// cyclotomic and pi-adic rings; the solver residual.
pub fn criterion_10(profile: Profile) -> CriterionReport {
    let t0 = Instant::now();
    let out = (|| {
        let mut pass = true;
        let mut lines = Vec::new();
        // archimedean bound
        let fields: Vec<(u64, u32)> = match profile {
            Profile::Quick => vec![(2, 1), (3, 1), (2, 2), (5, 1)],
            Profile::Full => {
                vec![(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4)]
            }
        };
        let mut bound_points = 0usize;
        for &(p, s) in &fields {
            let f = Field::new(p, s)?;
            let psi = AdditiveChar::new(&f);
            for n in 1..=4u32 {
                for a in f.units() {
                    let excess = weil_bound_excess(&f, n, &a, &psi)?;
                    pass &= excess <= n as f64 + 1e-9;
                    bound_points += 1;
                }
            }
        }
        lines.push(format!("archimedean bound at {bound_points} points"));
        // randomized cyclotomic invariants
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0x6b6c6265);
        let iters = if profile == Profile::Full { 10_000 } else { 2_000 };
        let rand_cyc = |rng: &mut rand_chacha::ChaCha12Rng, m: u64| {
            let mut c = CycInt::zero(m);
            let coeffs: Vec<i64> =
                (0..m - 1).map(|_| rng.gen_range(-50i64..50)).collect();
            for (i, v) in coeffs.iter().enumerate() {
                c = c.checked_add(&CycInt::zeta_pow(m, i as u64).mul_i64(*v)).unwrap();
            }
            c
        };
        for _ in 0..iters {
            let m = *[2u64, 3, 5].iter().nth(rng.gen_range(0..3)).unwrap();
            let a = rand_cyc(&mut rng, m);
            let b = rand_cyc(&mut rng, m);
            let c = rand_cyc(&mut rng, m);
            // ring axioms
            let lhs = a.checked_mul(&b.checked_add(&c)?)?;
            let rhs = a.checked_mul(&b)?.checked_add(&a.checked_mul(&c)?)?;
            pass &= lhs == rhs;
            // valuation additivity
            if !a.is_zero() && !b.is_zero() {
                let (Valuation::Finite(va), Valuation::Finite(vb)) =
                    (a.lambda_valuation(), b.lambda_valuation())
                else {
                    unreachable!()
                };
                let vab = a.checked_mul(&b)?.lambda_valuation();
                pass &= vab == Valuation::Finite(va + vb);
            }
        }
        lines.push(format!("{iters} randomized cyclotomic triples"));
        // randomized pi-adic ring axioms
        for _ in 0..iters {
            let p = *[2u64, 3, 5].iter().nth(rng.gen_range(0..3)).unwrap();
            let cfg = PadicCfg::new(p, 12);
            let a = PadicNum::from_i64(cfg, rng.gen_range(-10_000i64..10_000));
            let b = PadicNum::from_i64(cfg, rng.gen_range(-10_000i64..10_000));
            let c = PadicNum::from_i64(cfg, rng.gen_range(-10_000i64..10_000));
            pass &= a.mul(&b.add(&c)) == a.mul(&b).add(&a.mul(&c));
            pass &= a.mul(&b) == b.mul(&a);
            if a.is_unit() {
                pass &= a.mul(&a.inv().unwrap()) == PadicNum::one(cfg);
            }
        }
        lines.push(format!("{iters} randomized pi-adic triples"));
        // solver residual as stated
        let spec = connection_preset(PresetLabel::Gln, 2)?;
        let fs = solve_frobenius(&spec, 3, PadicCfg::new(3, 16), 48)?;
        pass &= residual_is_zero(&fs);
        lines.push("solver residual = 0 mod (pi^M, x^D)".to_string());
        Ok((pass, lines.join("; ")))
    })();
    report(10, "property suites (bounds, ring axioms, residual)", t0, out)
}

pub fn run_all(profile: Profile) -> SummaryReport {
    let criteria = vec![
        criterion_1(profile),
        criterion_2(profile),
        criterion_3(profile),
        criterion_4(profile),
        criterion_5(profile),
        criterion_6(profile),
        criterion_7(profile),
        criterion_8(profile),
        criterion_9(profile),
        criterion_10(profile),
    ];
    SummaryReport {
        invocation: std::env::args().collect::<Vec<_>>().join(" "),
        version: crate::report::VERSION.to_string(),
        profile: format!("{profile:?}").to_lowercase(),
        pass: criteria.iter().all(|c| c.pass),
        criteria,
    }
}
