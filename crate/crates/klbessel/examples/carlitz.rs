//! The rank-3 comparison in both characteristics: over F_{2^s} it is the
//! Carlitz identity `S_3(a) = S_2(a)^2 - q` exactly in Z; for odd p the
//! right-hand side is the hypergeometric sum at 4a, cross-multiplied by the
//! Gauss sum so everything stays in Z[zeta_p].
//!
//! Run with: cargo run --release --example carlitz

use klbessel::expsum::identities::{verify_identity, IdentityName, IdentityParams};

fn main() -> Result<(), klbessel::Error> {
    let carlitz = verify_identity(
        IdentityName::Carlitz,
        &IdentityParams { p: 2, s_max: 4, n_min: 2, n_max: 3 },
    )?;
    println!("carlitz over q = 2, 4, 8, 16: {} points, pass = {}", carlitz.rows.len(), carlitz.pass);
    for row in carlitz.rows.iter().take(4) {
        println!(
            "  q=2^{} a={:?}: S_3 = {}",
            row.s,
            row.a,
            serde_json::to_string(&row.lhs).unwrap()
        );
    }

    for p in [2u64, 3, 5] {
        let rep = verify_identity(
            IdentityName::So3,
            &IdentityParams { p, s_max: if p == 2 { 3 } else { 1 }, n_min: 1, n_max: 1 },
        )?;
        println!("rank-3 comparison at p = {p}: {} points, pass = {}", rep.rows.len(), rep.pass);
        assert!(rep.pass);
    }
    Ok(())
}
