//! Solve the Frobenius structure of a Bessel connection as a matrix power
//! series and verify its trace against the exponential sums at every
//! degree-1 point.
//!
//! Run with: cargo run --release --example frobenius_structure

use klbessel::frobenius::{
    connection_preset, residual_is_zero, solve_frobenius, trace_check_series, PresetLabel,
};
use klbessel::padic::PadicCfg;

fn main() -> Result<(), klbessel::Error> {
    let p = 3u64;
    let spec = connection_preset(PresetLabel::Gln, 2)?;
    let cfg = PadicCfg::new(p, 24);
    let fs = solve_frobenius(&spec, p, cfg, 76)?;

    println!("rank {} connection, h = {}, p = {p}", spec.r, spec.h);
    let phi0 = fs.phi0();
    println!("phi(0) digits:");
    for i in 0..spec.r {
        let row: Vec<_> = (0..spec.r).map(|j| format!("{:?}", phi0.at(i, j).digits())).collect();
        println!("  {}", row.join("  "));
    }
    println!("residual of the defining equation is zero: {}", residual_is_zero(&fs));
    println!(
        "valuation growth: slope {:.3}, normalizer precision pi^{}, tail bound pi^{}",
        fs.growth_slope,
        fs.normalizer_precision,
        fs.tail_precision()
    );

    let rows = trace_check_series(&fs, 16)?;
    for row in rows {
        println!(
            "a = {}: Tr phi(a~) == -S_2(a) mod pi^{}: {}",
            row.a, row.precision, row.pass
        );
        assert!(row.pass);
    }
    Ok(())
}
