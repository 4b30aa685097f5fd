//! Hölder-type bounds for S_t₂ - S_t₁ and P_t₂ - P_t₁: the implied constant
//! should stay bounded over many (t₁, t₂) pairs and the difference should
//! vanish to first order as t₁ → t₂.

use fracdisp::estimates::{default_pairs, holder_regression, EstimateOptions};
use fracdisp::evolution::{FracParams, Propagator};

fn main() -> fracdisp::Result<()> {
    let fp = FracParams::new(0.6, 1.0, 1, 1.0)?;
    let pairs = default_pairs(10.0, 1000.0, 20);
    let opts = EstimateOptions::default();
    for which in [Propagator::S, Propagator::P] {
        let rep = holder_regression(&fp, which, 0.0, 2.0, 2.0, &pairs, &opts)?;
        println!("{} L2->L2: {}", which.name(), rep.verdict);
        for n in &rep.notes {
            println!("  {n}");
        }
    }
    Ok(())
}
