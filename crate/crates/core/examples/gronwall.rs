//! The majorant series from the fractional Grönwall inequality. At β = 1
//! it reduces to a Mittag-Leffler function of order γ.

use fracdisp::special::{gronwall_series, GronwallParams};

fn main() -> fracdisp::Result<()> {
    for (beta, gamma, b) in [(0.6, 0.8, 1.0), (1.0, 0.5, 2.0), (0.4, 1.0, 0.5)] {
        let g = GronwallParams::new(beta, gamma, b)?;
        print!("beta={beta} gamma={gamma} b={b}:");
        for t in [0.1, 1.0, 10.0] {
            let v = gronwall_series(&g, t)?;
            print!("  E({t}) = {:.6e} [{} terms]", v.value, v.terms);
        }
        println!();
    }
    Ok(())
}
