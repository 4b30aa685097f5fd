//! Fourier multipliers on a periodic grid: fractional Laplacian of a Gaussian,
//! the 2/3 dealiasing filter, and L^p / H^{s,r} norms.

use fracdisp::spectral::{
    apply_multiplier, dealias, frac_laplacian_symbol, lp_norm, sobolev_norm, transform, Field, SpectralGrid,
};
use num_complex::Complex64;

fn main() -> fracdisp::Result<()> {
    let grid = SpectralGrid::new(1, 40.0, 512)?;
    let u = Field::from_fn(grid, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0));

    for p in [1.0, 2.0, 4.0, f64::INFINITY] {
        println!("||u||_{p} = {:.12}", lp_norm(&u, p)?);
    }
    for (s, r) in [(0.0, 2.0), (1.0, 2.0), (0.5, 4.0)] {
        println!("||u||_H({s},{r}) = {:.12}", sobolev_norm(&u, s, r)?);
    }

    // (-Δ)^β u via its symbol |ξ|^{2β}; for β = 1 this is -u''.
    let lap = apply_multiplier(&u, frac_laplacian_symbol(1.0))?;
    let x = grid.axis();
    let err = x
        .iter()
        .zip(&lap.values)
        .map(|(&x, v)| (v.re - (2.0 - 4.0 * x * x) * (-x * x).exp()).abs())
        .fold(0.0, f64::max);
    println!("max |(-Δ)u - (-u'')| = {err:.2e}");

    // a kink has slowly decaying Fourier coefficients
    let kink = Field::from_fn(grid, |x| Complex64::new((-2.0 * x[0].abs()).exp(), 0.0));
    let mut uh = transform(&kink)?;
    let before = uh.l2_sum();
    dealias(&mut uh)?;
    println!("relative energy removed by the 2/3 filter: {:.2e}", (before - uh.l2_sum()) / before);
    Ok(())
}
