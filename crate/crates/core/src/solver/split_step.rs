//! Strang split-step propagator for the classical equation
//! i u_t = (-Δ)^β u - μ|u|^{p-1}u, used as an independent reference.

use num_complex::Complex64;

use super::NonlinearitySpec;
use crate::error::{Error, Result};
use crate::spectral::{inverse, transform, Field, Space};

/// Advance `u0` to time `t_final` with steps of at most `dt`.
pub fn split_step_classical(beta: f64, spec: &NonlinearitySpec, u0: &Field, t_final: f64, dt: f64) -> Result<Field> {
    u0.expect(Space::Physical)?;
    if !(dt > 0.0 && t_final >= 0.0) {
        return Err(Error::InvalidParameter(format!("need dt > 0 and T >= 0 (dt = {dt}, T = {t_final})")));
    }
    let steps = (t_final / dt).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    let classes = u0.grid.radial_classes();
    let half: Vec<Complex64> = classes
        .xi
        .iter()
        .map(|&xi| Complex64::from_polar(1.0, -0.5 * h * xi.powf(2.0 * beta)))
        .collect();
    let mut uh = transform(u0)?;
    for _ in 0..steps {
        for (v, &c) in uh.values.iter_mut().zip(&classes.class) {
            *v *= half[c];
        }
        let mut u = inverse(&uh)?;
        // u_t = iμ|u|^{p-1}u keeps |u| fixed, so this step is exact
        for v in &mut u.values {
            let m = v.norm();
            if m > 0.0 {
                *v *= Complex64::from_polar(1.0, spec.mu * m.powf(spec.p - 1.0) * h);
            }
        }
        uh = transform(&u)?;
        for (v, &c) in uh.values.iter_mut().zip(&classes.class) {
            *v *= half[c];
        }
    }
    inverse(&uh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{lp_norm, SpectralGrid};

    #[test]
    fn conserves_mass_and_matches_linear_flow() {
        let g = SpectralGrid::new(1, 40.0, 128).unwrap();
        let u0 = Field::from_fn(g, |x| Complex64::new(0.5 * (-0.5 * x[0] * x[0]).exp(), 0.0));
        let spec = NonlinearitySpec::new(3.0, -1.0).unwrap();
        let u = split_step_classical(1.0, &spec, &u0, 1.0, 1e-3).unwrap();
        let m0 = lp_norm(&u0, 2.0).unwrap();
        assert!((lp_norm(&u, 2.0).unwrap() / m0 - 1.0).abs() < 1e-12);
        let lin = NonlinearitySpec::new(3.0, 0.0).unwrap();
        let u = split_step_classical(1.0, &lin, &u0, 1.0, 0.5).unwrap();
        let exact = crate::evolution::apply_S(&crate::evolution::FracParams::classical(1.0, 1, 1.0).unwrap(), 1.0, &u0).unwrap();
        assert!(u.sub(&exact).unwrap().l2_sum() < 1e-12);
    }
}
