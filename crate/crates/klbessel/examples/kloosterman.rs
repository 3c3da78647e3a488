//! n-variable Kloosterman sums, exactly in Z[zeta_p], with the archimedean
//! bound checked at every complex embedding.
//!
//! Run with: cargo run --release --example kloosterman

use klbessel::cyclotomic::ScaledCyc;
use klbessel::expsum::{kloosterman_raw, weil_bound_excess, AdditiveChar};
use klbessel::field::Field;

fn main() -> Result<(), klbessel::Error> {
    for (p, s) in [(3u64, 1u32), (2, 2), (5, 1)] {
        let field = Field::new(p, s)?;
        let psi = AdditiveChar::new(&field);
        println!("F_{} (modulus {:?})", field.q(), field.desc().modulus);
        for n in 2..=3u32 {
            for a in field.units() {
                let raw = kloosterman_raw(&field, n, &a, &psi)?;
                let norm = ScaledCyc::new(raw.clone(), n - 1, field.q());
                let excess = weil_bound_excess(&field, n, &a, &psi)?;
                println!(
                    "  S_{n}({:?}) = {}   |normalized| <= {:.4} (bound {n})",
                    a.coeffs(),
                    serde_json::to_string(&norm).unwrap(),
                    excess
                );
                assert!(excess <= n as f64 + 1e-9);
            }
        }
    }
    println!("\nall points satisfy the archimedean bound");
    Ok(())
}
