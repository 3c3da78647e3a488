//! Dwork's congruence conditions for the two rank-3 coefficient families at
//! p = 2, including the sign-twisted (c') and its solved u-pattern, plus the
//! product-congruence theorem verified directly on truncated polynomials.
//!
//! Run with: cargo run --release --example dwork_congruences

use klbessel::dwork::{check_conditions, congruence_theorem_check, CoeffFamily};

fn main() -> Result<(), klbessel::Error> {
    let fam_f = CoeffFamily::BesselF { n: 1 };
    let fam_g = CoeffFamily::SoG { n: 1 };

    let rep = check_conditions(&[fam_f], 2, 256, 7)?;
    println!(
        "{}: (a) {} (b) {} ({}) {} (d) {} (e) {}   u-pattern: {}",
        rep.labels[0], rep.pass_a, rep.pass_b, rep.c_variant[0], rep.pass_c, rep.pass_d,
        rep.pass_e, rep.u_pattern_kind[0]
    );
    println!("  solved signs u(1,1,m): {:?}", &rep.u_pattern[0][..8.min(rep.u_pattern[0].len())]);
    assert!(rep.pass() && rep.u_pattern_kind[0] == "(-1)^m");

    let rep = check_conditions(&[fam_g], 2, 256, 7)?;
    println!(
        "{}: (a) {} (b) {} ({}) {} (d) {} (e) {}",
        rep.labels[0], rep.pass_a, rep.pass_b, rep.c_variant[0], rep.pass_c, rep.pass_d, rep.pass_e
    );
    assert!(rep.pass() && rep.c_variant[0] == "c");

    let mixed = check_conditions(&[fam_f, fam_g], 2, 256, 7)?;
    println!(
        "alternating pair: u-patterns {} / {}",
        mixed.u_pattern_kind[0], mixed.u_pattern_kind[1]
    );

    let rows = congruence_theorem_check(&[fam_f], 2, 3, 5, true, 256)?;
    for row in &rows {
        println!("product congruence m={} s={}: margin {} -> {}", row.m, row.s, row.margin, row.pass);
        assert!(row.pass);
    }
    Ok(())
}
