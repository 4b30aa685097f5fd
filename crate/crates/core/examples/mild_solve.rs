//! Picard iteration for the mild formulation with a cubic defocusing term,
//! followed by the mass and energy monitors.

use fracdisp::estimates::{energy_monitor, mass_monitor};
use fracdisp::evolution::FracParams;
use fracdisp::solver::{mild_solve_with, NonlinearitySpec, SolveOptions, TimeMesh};
use fracdisp::spectral::{Field, SpectralGrid};
use num_complex::Complex64;

fn main() -> fracdisp::Result<()> {
    let fp = FracParams::new(0.6, 1.0, 1, 1.0)?;
    let spec = NonlinearitySpec::new(3.0, -1.0)?;
    let grid = SpectralGrid::new(1, 80.0, 1024)?;
    let u0 = Field::from_fn(grid, |x| Complex64::new(0.3 * (-0.5 * x[0] * x[0]).exp(), 0.0));
    let mesh = TimeMesh::graded_for(&fp, 2.0, 32)?;

    let hist = mild_solve_with(&fp, &spec, &u0, &mesh, &SolveOptions::default())?;
    println!("{} after {} sweeps, residual {:.2e}", hist.status.label(), hist.iterate_index, hist.residual);
    let mass = mass_monitor(&hist)?;
    let energy = energy_monitor(&hist, &fp, &spec)?;
    for (k, t) in mass.t.iter().enumerate().step_by(8) {
        println!("t = {t:.4}: mass ratio {:.8}, energy ratio {:.8}", mass.ratio[k], energy.ratio[k]);
    }
    println!("mass {} / energy {}", mass.verdict, energy.verdict);
    Ok(())
}
