//! Orthogonal-family sums three ways: the superpotential enumeration over
//! the open quadric, the simplified toric form with its constant term, and
//! the odd-family convolution; plus the chain identity tying even to odd.
//!
//! Run with: cargo run --release --example so_families

use klbessel::cyclotomic::scaled_equal;
use klbessel::expsum::so::{
    quadric_point_count, so2n1_cyc, so2n_quadric_sum, so2n_toric_cyc, so2n_toric_sum,
};
use klbessel::expsum::AdditiveChar;
use klbessel::field::Field;
use num_bigint::BigInt;

fn main() -> Result<(), klbessel::Error> {
    for p in [2u64, 3] {
        let f = Field::new(p, 1)?;
        let psi = AdditiveChar::new(&f);
        println!("F_{p}:");
        // even family, n = 3: quadric vs toric
        let count = quadric_point_count(&f, 3)?;
        for a in f.units() {
            let quad = so2n_quadric_sum(&f, 3, &a, &psi)?;
            let tor = so2n_toric_sum(&f, 3, &a, &psi)?;
            let eq = scaled_equal(&quad.value, &tor)?;
            println!(
                "  a={:?}: quadric ({} points) = toric: {}",
                a.coeffs(),
                quad.points,
                eq.equal
            );
            assert!(eq.equal);
            assert_eq!(quad.points, count);
        }
        // chain: q^2 Kl_SO6(a) - q^2 = q^2 Kl_SO5(a)
        let q2 = BigInt::from(f.q()).pow(2);
        for a in f.units() {
            let so6 = so2n_toric_cyc(&f, 3, &a, &psi)?;
            let lhs = so6.checked_sub(&klbessel::cyclotomic::CycInt::from_bigint(p, q2.clone()))?;
            let so5 = so2n1_cyc(&f, 2, &a, &psi)?;
            println!("  chain at a={:?}: {}", a.coeffs(), lhs == so5);
            assert_eq!(lhs, so5);
        }
    }
    Ok(())
}
