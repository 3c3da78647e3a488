//! Dwork's unit-root function: truncation tower, differential relation, and
//! the crosscheck that the slope-0 eigenvalue of the solved Frobenius at
//! a = 1 equals the limit value f(1) 2-adically.
//!
//! Run with: cargo run --release --example unit_root

use klbessel::dwork::{unit_root_crosscheck, unit_root_truncations, CoeffFamily};
use klbessel::frobenius::{connection_preset, solve_frobenius, PresetLabel};
use klbessel::padic::PadicCfg;

fn main() -> Result<(), klbessel::Error> {
    for (label, n, fam, delta, smax) in [
        (PresetLabel::Gln, 3u32, CoeffFamily::BesselF { n: 1 }, 1u32, 6u32),
        (PresetLabel::So2n1, 1, CoeffFamily::SoG { n: 1 }, 0, 5),
    ] {
        let ur = unit_root_truncations(fam, 2, smax, delta, 160)?;
        println!("{}:", fam.label());
        println!("  truncations cohere: {}", ur.coherence_ok());
        println!("  differential relation f'/f + 2x eta(x^2) = eta: {}", ur.differential_relation_ok());
        let (t, f1) = ur.eval_best(1);
        println!("  f(1) = {} mod 2^{}", f1, t);

        let spec = connection_preset(label, n)?;
        let fs = solve_frobenius(&spec, 2, PadicCfg::new(2, 24), 128)?;
        let rep = unit_root_crosscheck(&fs, &ur, 1)?;
        println!(
            "  unit root of charpoly(phi(1~)) = {} mod 2^{} -> match: {}",
            rep.unit_root, rep.precision_bits, rep.pass
        );
        assert!(rep.pass);
    }
    Ok(())
}
