//! Pointwise decay of the frequency-localised kernels K[a], K[b] and of the
//! power-law kernel with |ξ|^δ on the high-frequency band.

use fracdisp::estimates::{kernel_delta, kernel_diagnostic, KernelOptions, KernelSymbol};
use fracdisp::evolution::FracParams;

fn main() -> fracdisp::Result<()> {
    let fp = FracParams::new(0.6, 1.0, 1, 1.0)?;
    let xs: Vec<f64> = (0..=400).map(|i| i as f64 * 0.25).collect();
    let opts = KernelOptions::default();
    for sym in [KernelSymbol::A, KernelSymbol::B] {
        let rep = kernel_diagnostic(&fp, sym, 0.0, &xs, 1.0, &opts)?;
        println!("K[{}]: envelope slope {:.3} ({})", sym.name(), rep.fitted_exponent, rep.verdict);
        for n in &rep.notes {
            println!("  {n}");
        }
    }
    let rep = kernel_delta(-1.5, &xs, 1.0, &opts)?;
    println!("K_delta(-1.5): envelope slope {:.3} ({})", rep.fitted_exponent, rep.verdict);
    Ok(())
}
