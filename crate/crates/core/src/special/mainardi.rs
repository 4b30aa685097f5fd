//! Mainardi function M_ν(x) = Σ (-x)^k / (k! Γ(1 - ν - νk)) and the integrals
//! that tie it to the Mittag-Leffler family.

use num_complex::Complex64;

use super::gamma::gamma_real;
use super::series::{self, SeriesKind};
use crate::error::{Error, Result};
use crate::quadrature::{graded_breaks, refine_until, uniform_breaks, QuadConfig, Rule};

/// Largest x for which `mainardi` has been validated to 1e-10 relative.
pub const MAINARDI_VALIDATED_X: f64 = 20.0;

const SERIES_TOL: f64 = 1e-14;

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidParameter(format!("nu = {nu} must lie in (0, 1)")));
    }
    Ok(())
}

pub fn mainardi(nu: f64, x: f64) -> Result<f64> {
    check_nu(nu)?;
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("Mainardi function needs x >= 0, got {x}")));
    }
    let (v, _) = series::eval(SeriesKind::mainardi(nu), Complex64::new(x, 0.0), SERIES_TOL)?;
    Ok(v.re)
}

/// Same as [`mainardi`] but also says whether `x` is inside the validated range.
pub fn mainardi_checked(nu: f64, x: f64) -> Result<(f64, bool)> {
    Ok((mainardi(nu, x)?, x <= MAINARDI_VALIDATED_X))
}

/// ∫_0^∞ θ^δ M_ν(θ) dθ = Γ(δ + 1) / Γ(νδ + 1).
pub fn mainardi_moment(nu: f64, delta: f64) -> Result<f64> {
    if !(delta > -1.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must exceed -1")));
    }
    if !(0.0..1.0).contains(&nu) {
        return Err(Error::InvalidParameter(format!("nu = {nu} must lie in [0, 1)")));
    }
    Ok(gamma_real(delta + 1.0)? / gamma_real(nu * delta + 1.0)?)
}

/// Stretched-exponential majorant M_ν(θ) <= C exp(-c θ^κ), κ = 1/(1-ν), fitted
/// on the numerically computed tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MainardiTail {
    pub ln_c: f64,
    pub c: f64,
    pub kappa: f64,
    /// the larger of the two fit abscissae; the bound is used beyond it
    pub fit_end: f64,
}

impl MainardiTail {
    pub fn fit(nu: f64) -> Result<Self> {
        check_nu(nu)?;
        let kappa = 1.0 / (1.0 - nu);
        let ln0 = mainardi(nu, 0.0)?.ln();
        let mut theta = 0.5;
        let mut first: Option<(f64, f64)> = None;
        loop {
            let m = mainardi(nu, theta)?;
            let lm = if m > 0.0 { m.ln() } else { f64::NEG_INFINITY };
            match first {
                None if lm < ln0 - 15.0 => first = Some((theta, lm)),
                Some((t1, l1)) if lm < ln0 - 30.0 => {
                    let c = (l1 - lm) / (theta.powf(kappa) - t1.powf(kappa));
                    // one unit of slack covers the algebraic prefactor of the true tail
                    let ln_c = lm + c * theta.powf(kappa) + 1.0;
                    return Ok(MainardiTail { ln_c, c, kappa, fit_end: theta });
                }
                _ => {}
            }
            theta *= 1.1;
            if theta > 1e4 {
                return Err(Error::Quadrature("Mainardi tail fit did not find decay".into()));
            }
        }
    }

    pub fn ln_bound(&self, theta: f64) -> f64 {
        self.ln_c - self.c * theta.powf(self.kappa)
    }

    /// Θ beyond which ∫_Θ^∞ θ^w C e^{-cθ^κ} dθ < `tol`.
    pub fn cutoff(&self, weight_power: f64, tol: f64) -> f64 {
        let mut theta = self.fit_end;
        loop {
            // log-slope of the integrand; the tail is bounded by f(Θ) / rate
            let rate = self.c * self.kappa * theta.powf(self.kappa - 1.0) - weight_power / theta;
            if rate > 0.0 {
                let ln_f = self.ln_bound(theta) + weight_power * theta.ln();
                if ln_f - rate.ln() < tol.ln() {
                    return theta;
                }
            }
            theta *= 1.05;
        }
    }
}

/// Nodes on [0, Θ] with the Mainardi density folded into the weights.
struct WeightedNodes {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn mainardi_rule(nu: f64, rule: &Rule) -> Result<WeightedNodes> {
    let mut weights = Vec::with_capacity(rule.len());
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        weights.push(w * mainardi(nu, x)?);
    }
    Ok(WeightedNodes {
        nodes: rule.nodes.clone(),
        weights,
    })
}

/// ∫_0^Θ θ^δ M_ν(θ) dθ by panel doubling, Θ chosen from the fitted tail.
pub fn mainardi_moment_quadrature(nu: f64, delta: f64, quad: &QuadConfig) -> Result<f64> {
    check_nu(nu)?;
    if !(delta > -1.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must exceed -1")));
    }
    let tail = MainardiTail::fit(nu)?;
    let theta_max = tail.cutoff(delta.max(0.0), quad.tol / 10.0);
    let smooth = delta >= 0.0 && delta.fract() == 0.0;
    let (v, _) = refine_until(
        quad,
        |n| {
            if smooth {
                uniform_breaks(0.0, theta_max, n)
            } else {
                graded_breaks(0.0, theta_max, n, 40)
            }
        },
        |rule| {
            let wn = mainardi_rule(nu, rule)?;
            Ok(wn
                .nodes
                .iter()
                .zip(&wn.weights)
                .map(|(&x, &w)| w * x.powf(delta))
                .sum::<f64>())
        },
        |a, b| (a - b).abs(),
    )?;
    Ok(v)
}

fn laplace_impl(alpha: f64, z: Complex64, quad: &QuadConfig, weighted: bool) -> Result<Complex64> {
    check_nu(alpha)?;
    // M_α decays faster than any exponential, so Re z = 0 is still absolutely convergent
    if !(z.re >= 0.0) {
        return Err(Error::Domain(format!("Laplace integral needs Re z >= 0, got {z}")));
    }
    let tail = MainardiTail::fit(alpha)?;
    let w_pow = if weighted { 1.0 } else { 0.0 };
    let theta_max = tail.cutoff(w_pow, quad.tol / 10.0);
    // resolve the oscillation of e^{-i Im z θ}
    let min_panels = ((z.im.abs() * theta_max) / 4.0).ceil() as usize;
    let cfg = QuadConfig {
        initial_panels: quad.initial_panels.max(min_panels),
        ..*quad
    };
    let (v, _) = refine_until(
        &cfg,
        |n| uniform_breaks(0.0, theta_max, n),
        |rule| {
            let wn = mainardi_rule(alpha, rule)?;
            Ok(wn
                .nodes
                .iter()
                .zip(&wn.weights)
                .map(|(&x, &w)| {
                    let f = if weighted { alpha * x * w } else { w };
                    (-z * x).exp() * f
                })
                .sum::<Complex64>())
        },
        |a, b| (a - b).norm(),
    )?;
    Ok(v)
}

/// ∫_0^∞ M_α(θ) e^{-zθ} dθ, which equals E_{α,1}(-z).
pub fn mainardi_laplace(alpha: f64, z: Complex64, quad: &QuadConfig) -> Result<Complex64> {
    laplace_impl(alpha, z, quad, false)
}

/// ∫_0^∞ αθ M_α(θ) e^{-zθ} dθ, which equals E_{α,α}(-z).
pub fn mainardi_laplace_weighted(alpha: f64, z: Complex64, quad: &QuadConfig) -> Result<Complex64> {
    laplace_impl(alpha, z, quad, true)
}
