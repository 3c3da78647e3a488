//! Property tests for the exact arithmetic layers.

use klbessel::cyclotomic::CycInt;
use klbessel::field::Field;
use klbessel::padic::{PadicCfg, PadicNum};
use proptest::prelude::*;

fn cyc(m: u64, coeffs: &[i64]) -> CycInt {
    let mut c = CycInt::zero(m);
    for (i, &v) in coeffs.iter().enumerate() {
        c = c
            .checked_add(&CycInt::zeta_pow(m, i as u64).mul_i64(v))
            .unwrap();
    }
    c
}

proptest! {
    #[test]
    fn cyclotomic_ring_axioms(
        m in prop::sample::select(vec![2u64, 3, 5, 7]),
        a in prop::collection::vec(-100i64..100, 6),
        b in prop::collection::vec(-100i64..100, 6),
        c in prop::collection::vec(-100i64..100, 6),
    ) {
        let a = cyc(m, &a[..(m - 1) as usize]);
        let b = cyc(m, &b[..(m - 1) as usize]);
        let c = cyc(m, &c[..(m - 1) as usize]);
        prop_assert_eq!(a.checked_mul(&b).unwrap(), b.checked_mul(&a).unwrap());
        let lhs = a.checked_mul(&b.checked_add(&c).unwrap()).unwrap();
        let rhs = a.checked_mul(&b).unwrap().checked_add(&a.checked_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn galois_action_is_a_ring_map(
        a in prop::collection::vec(-50i64..50, 4),
        b in prop::collection::vec(-50i64..50, 4),
        g in prop::sample::select(vec![1u64, 2, 3, 4]),
    ) {
        let m = 5u64;
        let a = cyc(m, &a);
        let b = cyc(m, &b);
        let lhs = a.checked_mul(&b).unwrap().galois(g).unwrap();
        let rhs = a.galois(g).unwrap().checked_mul(&b.galois(g).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn padic_mul_matches_integer_arithmetic(
        p in prop::sample::select(vec![2u64, 3, 5]),
        a in -100_000i64..100_000,
        b in -100_000i64..100_000,
    ) {
        let cfg = PadicCfg::new(p, 14);
        let lhs = PadicNum::from_i64(cfg, a).mul(&PadicNum::from_i64(cfg, b));
        let rhs = PadicNum::from_i64(cfg, a.saturating_mul(b));
        if let Some(ab) = a.checked_mul(b) {
            prop_assert_eq!(lhs, PadicNum::from_i64(cfg, ab));
        } else {
            let _ = rhs;
        }
    }

    #[test]
    fn field_arithmetic_is_a_field(
        p in prop::sample::select(vec![2u64, 3, 5]),
        s in 1u32..3,
        x in 0u32..100,
        y in 0u32..100,
    ) {
        let f = Field::new(p, s).unwrap();
        let q = f.q() as u32;
        let a = f.elem(x % q);
        let b = f.elem(y % q);
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).sub(&b), a.clone());
        if !a.is_zero() {
            prop_assert_eq!(a.mul(&a.inv().unwrap()), f.one());
        }
    }
}
