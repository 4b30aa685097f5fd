//! The Mainardi function as a probability density whose Laplace transform is
//! a Mittag-Leffler function: ∫M_α = 1, ∫θ^δ M_α = Γ(δ+1)/Γ(αδ+1), and
//! ∫M_α(θ)e^{-zθ}dθ = E_{α,1}(-z).

use fracdisp::quadrature::QuadConfig;
use fracdisp::special::{
    gamma_real, mainardi, mainardi_laplace, mainardi_laplace_weighted, mainardi_moment_quadrature, mittag_leffler,
    MlParams,
};
use num_complex::Complex64;

fn main() -> fracdisp::Result<()> {
    let alpha = 0.6;
    let quad = QuadConfig::default();

    println!("M_{alpha}(theta):");
    for theta in [0.0, 0.5, 1.0, 2.0, 4.0] {
        println!("  {theta:>4}  {:.12e}", mainardi(alpha, theta)?);
    }

    for delta in [0.0, 1.0, 2.5] {
        let exact = gamma_real(delta + 1.0)? / gamma_real(alpha * delta + 1.0)?;
        let q = mainardi_moment_quadrature(alpha, delta, &quad)?;
        println!("moment {delta}: quadrature {q:.15e}  closed form {exact:.15e}");
    }

    let e1 = MlParams::new(alpha, 1.0)?;
    let ea = MlParams::new(alpha, alpha)?;
    for z in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 3.0), Complex64::new(2.0, -5.0)] {
        let gap1 = (mainardi_laplace(alpha, z, &quad)? - mittag_leffler(&e1, -z)?).norm();
        let gapa = (mainardi_laplace_weighted(alpha, z, &quad)? - mittag_leffler(&ea, -z)?).norm();
        println!("z = {z}: |Laplace - E_(a,1)| = {gap1:.2e}, |weighted Laplace - E_(a,a)| = {gapa:.2e}");
    }
    Ok(())
}
