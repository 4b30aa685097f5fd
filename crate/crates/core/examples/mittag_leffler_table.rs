//! E_{α,β}(z) along a few rays, showing which regime the evaluator picked.
//!
//!     cargo run --example mittag_leffler_table -- 0.6 1.0

use fracdisp::special::{mittag_leffler_with_regime, MlParams};
use num_complex::Complex64;
use std::f64::consts::PI;

fn main() -> fracdisp::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let alpha = args.first().copied().unwrap_or(0.6);
    let beta = args.get(1).copied().unwrap_or(1.0);
    let p = MlParams::new(alpha, beta)?;

    println!("E_{{{alpha},{beta}}}(z), z = r e^(i phi)");
    println!("{:>8} {:>6} {:>24} {:>24}  regime", "phi/pi", "r", "Re E", "Im E");
    for phi in [-0.5, 0.0, 0.5, 1.0] {
        for r in [0.5, 2.0, 8.0, 20.0, 60.0] {
            let z = Complex64::from_polar(r, phi * PI);
            match mittag_leffler_with_regime(&p, z) {
                Ok((v, regime)) => {
                    println!("{phi:>8} {r:>6} {:>24.16e} {:>24.16e}  {}", v.re, v.im, regime.label())
                }
                // e^{z^{1/α}} outgrows f64 on the positive axis
                Err(e) => println!("{phi:>8} {r:>6} {e}"),
            }
        }
    }
    Ok(())
}
