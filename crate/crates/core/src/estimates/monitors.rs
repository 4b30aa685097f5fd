use num_complex::Complex64;
use rayon::prelude::*;

use super::Verdict;
use crate::error::Result;
use crate::evolution::FracParams;
use crate::solver::{NonlinearitySpec, SolutionHistory};
use crate::spectral::{apply_multiplier, lp_norm, riesz_symbol, Field};

/// A per-node ratio series against the value at t = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct MonitorSeries {
    pub t: Vec<f64>,
    pub ratio: Vec<f64>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl MonitorSeries {
    pub fn max_ratio(&self) -> f64 {
        self.ratio.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// max_k |ratio_k - 1|
    pub fn max_deviation(&self) -> f64 {
        self.ratio.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max)
    }
}

pub const MASS_SLACK: f64 = 5e-4;
pub const ENERGY_CONSERVATION_TOL: f64 = 1e-6;

/// ‖u(t_k)‖₂ / ‖u₀‖₂; passes iff every ratio is at most 1 + 5e-4.
pub fn mass_monitor(history: &SolutionHistory) -> Result<MonitorSeries> {
    let norms = history
        .fields
        .par_iter()
        .map(|u| lp_norm(u, 2.0))
        .collect::<Result<Vec<_>>>()?;
    let m0 = norms[0];
    let ratio: Vec<f64> = norms.iter().map(|m| if m0 > 0.0 { m / m0 } else { 1.0 }).collect();
    let ok = ratio.iter().all(|r| *r <= 1.0 + MASS_SLACK);
    Ok(MonitorSeries {
        t: history.mesh.nodes().to_vec(),
        ratio,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        notes: Vec::new(),
    })
}

/// I(u) = ‖(-Δ)^{β/2}u‖₂² + ∫G(u) on the grid.
pub fn energy(fp: &FracParams, spec: &NonlinearitySpec, u: &Field) -> Result<f64> {
    let grad = lp_norm(&apply_multiplier(u, riesz_symbol(fp.beta))?, 2.0)?;
    let pot: f64 = u.values.iter().map(|&z: &Complex64| spec.energy_density(z)).sum::<f64>() * u.grid.cell_volume();
    Ok(grad * grad + pot)
}

/// I(u(t_k)) / I(u₀). A hard verdict (conservation to 1e-6) applies only in
/// the classical case; for α < 1 the series is reported. A focusing
/// nonlinearity has no nonnegative G, so the series carries a warning.
pub fn energy_monitor(history: &SolutionHistory, fp: &FracParams, spec: &NonlinearitySpec) -> Result<MonitorSeries> {
    let vals = history
        .fields
        .par_iter()
        .map(|u| energy(fp, spec, u))
        .collect::<Result<Vec<_>>>()?;
    let i0 = vals[0];
    let ratio: Vec<f64> = vals.iter().map(|v| if i0 > 0.0 { v / i0 } else { 1.0 }).collect();
    let mut notes = Vec::new();
    let verdict = if !spec.is_defocusing() {
        notes.push(format!(
            "warning: focusing nonlinearity (mu = {}), no nonnegative energy density; series only",
            spec.mu
        ));
        Verdict::Report
    } else if fp.is_classical() {
        let dev = ratio.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
        if dev <= ENERGY_CONSERVATION_TOL {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    } else {
        Verdict::Report
    };
    Ok(MonitorSeries {
        t: history.mesh.nodes().to_vec(),
        ratio,
        verdict,
        notes,
    })
}
