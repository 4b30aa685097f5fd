//! Fit the time decay of ‖S_t‖ and ‖P_t‖ between Lebesgue spaces over a
//! dilation family of Gaussian probes. The (P, 2, 2) case is fast; pass
//! `all` to run the slower L^1 → L^∞ jobs as well.

use fracdisp::estimates::{decay_regression, log_grid, EstimateOptions};
use fracdisp::evolution::{FracParams, Propagator};

fn main() -> fracdisp::Result<()> {
    let fp = FracParams::new(0.6, 1.0, 1, 1.0)?;
    let ts = log_grid(10.0, 1000.0, 7);
    let opts = EstimateOptions::default();
    let inf = f64::INFINITY;
    let mut jobs = vec![(Propagator::P, 0.0, 2.0, 2.0), (Propagator::S, 0.5, 2.0, 2.0)];
    if std::env::args().any(|a| a == "all") {
        jobs.push((Propagator::S, 0.0, 1.0, inf));
        jobs.push((Propagator::P, 0.0, 1.0, 1.0));
    }
    for (which, theta, q, r) in jobs {
        let rep = decay_regression(&fp, which, theta, q, r, &ts, &opts)?;
        println!(
            "{} theta={theta} {q}->{r}: predicted {:.4}, fitted {:.4}, {}",
            which.name(),
            rep.predicted_exponent,
            rep.fitted_exponent,
            rep.verdict
        );
    }
    Ok(())
}
