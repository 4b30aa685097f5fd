//! Which well-posedness results cover a given (α, β, p, s, q, r, γ), with the
//! failing inequalities spelled out.

use fracdisp::evolution::FracParams;
use fracdisp::solver::{applicability_report, NonlinearitySpec};

fn main() -> fracdisp::Result<()> {
    let fp = FracParams::new(0.6, 1.0, 1, 1.0)?;
    for (p, q, gamma) in [(3.0, 2.0, 0.2), (3.0, 1.0, 0.2), (2.0, 2.0, 0.2)] {
        let spec = NonlinearitySpec::new(p, -1.0)?;
        let rep = applicability_report(&fp, &spec, 0.0, q, 2.0, gamma);
        println!("p = {p}, q = {q}, gamma = {gamma}:\n{rep}");
    }
    Ok(())
}
