//! L-polynomials of the toric family from honestly enumerated power sums:
//! exact reconstruction, the stated degree, and Newton = Hodge.
//!
//! Run with: cargo run --release --example lfunctions

use klbessel::expsum::toric::{toric_sum_sm, LaurentPoly};
use klbessel::expsum::AdditiveChar;
use klbessel::field::Field;
use klbessel::lfunction::{
    hodge_polygon_preset, lpoly_from_sums, newton_polygon_lpoly, HodgeFamily, PowerSumSeq,
};

fn main() -> Result<(), klbessel::Error> {
    let f3 = Field::new(3, 1)?;
    let psi = AdditiveChar::new(&f3);
    let a = f3.one();
    for d in [1u32, 2] {
        let fam = LaurentPoly::fd_family(&f3, 1, d, &a)?;
        let degree = (d * 3) as usize;
        println!("toric family d = {d}: expected degree {degree}");
        let sums: Vec<_> = (1..=degree as u32)
            .map(|m| {
                let s = toric_sum_sm(&fam, m, &psi)?;
                println!("  S_{m} = {}", serde_json::to_string(&s).unwrap());
                Ok(s)
            })
            .collect::<Result<_, klbessel::Error>>()?;
        let l = lpoly_from_sums(&PowerSumSeq::new(sums, 3), degree)?;
        let np = newton_polygon_lpoly(&l, 1)?;
        let hp = hodge_polygon_preset(HodgeFamily::Fd { n: 1, d });
        println!("  Newton slopes: {:?}", np.slopes.iter().map(|s| s.to_string()).collect::<Vec<_>>());
        println!("  Hodge slopes:  {:?}", hp.iter().map(|s| s.to_string()).collect::<Vec<_>>());
        println!("  ordinary: {}", np.slopes == hp);
        assert_eq!(np.slopes, hp);
    }
    Ok(())
}
