//! Frobenius Newton polygons from extension-field power sums: the slope
//! multiset at every point equals {0, 1, ..., r-1} for the classical
//! families (everywhere ordinary), and {1/2, 3/2, 5/2} for the odd
//! hypergeometric family at p = 3.
//!
//! Run with: cargo run --release --example newton_polygons

use klbessel::expsum::{hyp_power_sums, AdditiveChar};
use klbessel::field::Field;
use klbessel::frobenius::{slope_set_at_point, PresetLabel};
use klbessel::lfunction::{charpoly_from_power_sums, newton_polygon_charpoly, PowerSumSeq};

fn main() -> Result<(), klbessel::Error> {
    for (p, s) in [(2u64, 1u32), (3, 1), (2, 2)] {
        let f = Field::new(p, s)?;
        let psi = AdditiveChar::new(&f);
        for n in 2..=3u32 {
            for a in f.units() {
                let slopes = slope_set_at_point(PresetLabel::Gln, n, &f, &a, &psi)?;
                println!("q={} Kl_{n} at a={:?}: slopes {:?}", f.q(), a.coeffs(), slopes);
            }
        }
        for a in f.units() {
            let slopes = slope_set_at_point(PresetLabel::So2n1, 1, &f, &a, &psi)?;
            println!("q={} SO_3 at a={:?}: slopes {:?}", f.q(), a.coeffs(), slopes);
        }
    }

    // the hypergeometric family has half-integer slopes
    let f3 = Field::new(3, 1)?;
    let psi = AdditiveChar::new(&f3);
    for a in f3.units() {
        let ts = hyp_power_sums(&f3, 3, 1, &a, &psi, 3)?;
        let poly = charpoly_from_power_sums(&PowerSumSeq::new(ts, 3), 3)?;
        let np = newton_polygon_charpoly(&poly, 1)?;
        println!("hyp(3, rho) at a={:?}: slopes {:?}", a.coeffs(), np.slopes);
    }
    Ok(())
}
