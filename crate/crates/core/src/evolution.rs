//! The evolution operators S_t and P_t as Fourier multipliers, their
//! low/high-frequency decomposition, the Mainardi-integral oracle and a
//! torus-free 1-D quadrature evaluator.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, refine_until, uniform_breaks, QuadConfig, Rule};
use crate::special::{gamma_real, mainardi, mittag_leffler, MainardiTail, MlParams};
use crate::spectral::{
    cutoff_symbol, inverse, multiply_by_table, transform, try_symbol_table, CutoffSpec, Field, Space,
};

/// Equation parameters: Caputo order α, Laplacian power β, dimension n and
/// cutoff scale M.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FracParams {
    pub alpha: f64,
    pub beta: f64,
    pub dim: usize,
    pub m: f64,
    classical: bool,
}

impl FracParams {
    pub fn new(alpha: f64, beta: f64, dim: usize, m: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {alpha} must lie in (0, 1); use FracParams::classical for alpha = 1"
            )));
        }
        Self::checked(alpha, beta, dim, m, false)
    }

    /// α = 1, where S_t is the unitary group e^{-it(-Δ)^β}. The decomposition
    /// and the Mainardi oracle are unavailable in this mode.
    pub fn classical(beta: f64, dim: usize, m: f64) -> Result<Self> {
        Self::checked(1.0, beta, dim, m, true)
    }

    fn checked(alpha: f64, beta: f64, dim: usize, m: f64, classical: bool) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidParameter(format!("dimension {dim} must be 1 or 2")));
        }
        if !(beta > dim as f64 / 2.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta = {beta} must exceed n/2 = {}", dim as f64 / 2.0)));
        }
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter(format!("cutoff scale M = {m} must be positive")));
        }
        Ok(FracParams {
            alpha,
            beta,
            dim,
            m,
            classical,
        })
    }

    pub fn is_classical(&self) -> bool {
        self.classical
    }

    /// σ = α / (2β).
    pub fn sigma(&self) -> f64 {
        self.alpha / (2.0 * self.beta)
    }

    pub fn cutoff(&self) -> CutoffSpec {
        CutoffSpec {
            m: self.m,
            sigma: self.sigma(),
        }
    }

    fn require_fractional(&self, what: &str) -> Result<()> {
        if self.classical {
            return Err(Error::InvalidParameter(format!("{what} is not defined in classical mode (alpha = 1)")));
        }
        Ok(())
    }
}

/// Which evolution operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Propagator {
    S,
    P,
}

impl Propagator {
    pub fn name(self) -> &'static str {
        match self {
            Propagator::S => "S",
            Propagator::P => "P",
        }
    }
}

/// a_t(ξ) = E_{α,1}(-i|ξ|^{2β} t^α).
pub fn symbol_a(fp: &FracParams, t: f64, xi_mag: f64) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("S_t needs t >= 0, got {t}")));
    }
    if t == 0.0 || xi_mag == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let x = xi_mag.abs().powf(2.0 * fp.beta) * t.powf(fp.alpha);
    if fp.classical {
        return Ok(Complex64::from_polar(1.0, -x));
    }
    mittag_leffler(&MlParams::new(fp.alpha, 1.0)?, Complex64::new(0.0, -x))
}

/// b_t(ξ) = t^{α-1} E_{α,α}(-i|ξ|^{2β} t^α).
pub fn symbol_b(fp: &FracParams, t: f64, xi_mag: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("P_t needs t > 0, got {t}")));
    }
    let x = xi_mag.abs().powf(2.0 * fp.beta) * t.powf(fp.alpha);
    if fp.classical {
        return Ok(Complex64::from_polar(1.0, -x));
    }
    let e = mittag_leffler(&MlParams::new(fp.alpha, fp.alpha)?, Complex64::new(0.0, -x))?;
    Ok(e * t.powf(fp.alpha - 1.0))
}

/// Symbol of S_t or P_t at |ξ|.
pub fn symbol(fp: &FracParams, which: Propagator, t: f64, xi: f64) -> Result<Complex64> {
    match which {
        Propagator::S => symbol_a(fp, t, xi),
        Propagator::P => symbol_b(fp, t, xi),
    }
}

fn check_dim(fp: &FracParams, f: &Field) -> Result<()> {
    if f.grid.dim() != fp.dim {
        return Err(Error::GridMismatch(format!(
            "field is {}-dimensional, parameters say n = {}",
            f.grid.dim(),
            fp.dim
        )));
    }
    Ok(())
}

fn apply_radial(f: &Field, m: impl Fn(f64) -> Result<Complex64> + Sync) -> Result<Field> {
    let mut fh = transform(f)?;
    let classes = f.grid.radial_classes();
    let table = try_symbol_table(&classes, m)?;
    multiply_by_table(&mut fh, &classes, &table)?;
    inverse(&fh)
}

/// Apply the multiplier of S_t or P_t to a physical-space field.
pub fn apply_evolution(fp: &FracParams, which: Propagator, t: f64, f: &Field) -> Result<Field> {
    check_dim(fp, f)?;
    if which == Propagator::S && t == 0.0 {
        f.expect(Space::Physical)?;
        return Ok(f.clone());
    }
    apply_radial(f, |xi| symbol(fp, which, t, xi))
}

#[allow(non_snake_case)]
pub fn apply_S(fp: &FracParams, t: f64, f: &Field) -> Result<Field> {
    apply_evolution(fp, Propagator::S, t, f)
}

#[allow(non_snake_case)]
pub fn apply_P(fp: &FracParams, t: f64, f: &Field) -> Result<Field> {
    apply_evolution(fp, Propagator::P, t, f)
}

/// S_t f split into S_t χ_t(D) f, the explicit leading high-frequency term
/// -(i/Γ(1-α)) t^{-α} |∇|^{-2β} χ_t^c(D) f, and the remainder.
#[derive(Clone, Debug)]
pub struct SplitParts {
    pub low: Field,
    pub mid: Field,
    pub high_remainder: Field,
}

impl SplitParts {
    pub fn sum(&self) -> Result<Field> {
        let mut s = self.low.clone();
        s.axpy(Complex64::new(1.0, 0.0), &self.mid)?;
        s.axpy(Complex64::new(1.0, 0.0), &self.high_remainder)?;
        Ok(s)
    }
}

#[allow(non_snake_case)]
pub fn apply_S_split(fp: &FracParams, t: f64, f: &Field) -> Result<SplitParts> {
    fp.require_fractional("the low/high decomposition")?;
    check_dim(fp, f)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("decomposition needs t > 0, got {t}")));
    }
    let chi = cutoff_symbol(fp.cutoff(), t, false);
    let chi_c = cutoff_symbol(fp.cutoff(), t, true);
    let lead = Complex64::new(0.0, -t.powf(-fp.alpha) / gamma_real(1.0 - fp.alpha)?);

    let fh = transform(f)?;
    let classes = f.grid.radial_classes();
    let a = try_symbol_table(&classes, |xi| symbol_a(fp, t, xi))?;
    let mut low_t = Vec::with_capacity(a.len());
    let mut mid_t = Vec::with_capacity(a.len());
    let mut high_t = Vec::with_capacity(a.len());
    for (&xi, &ai) in classes.xi.iter().zip(&a) {
        let w = chi_c(xi);
        // χ^c vanishes near ξ = 0, so |ξ|^{-2β} χ^c is set to exactly 0 there
        let m = if w == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            lead * (w * xi.powf(-2.0 * fp.beta))
        };
        low_t.push(ai * chi(xi));
        mid_t.push(m);
        high_t.push(ai * w - m);
    }
    let part = |table: &[Complex64]| -> Result<Field> {
        let mut g = fh.clone();
        multiply_by_table(&mut g, &classes, table)?;
        inverse(&g)
    };
    Ok(SplitParts {
        low: part(&low_t)?,
        mid: part(&mid_t)?,
        high_remainder: part(&high_t)?,
    })
}

/// M_α tabulated at Gauss-Legendre nodes on uniform panels of [0, θ_max] and
/// evaluated by barycentric interpolation inside each panel.
struct MainardiTable {
    width: f64,
    nodes: Vec<f64>,
    bary: Vec<f64>,
    values: Vec<f64>,
}

impl MainardiTable {
    const ORDER: usize = 20;

    fn build(alpha: f64, theta_max: f64, panels: usize) -> Result<Self> {
        let (nodes, w) = gauss_legendre(Self::ORDER);
        let bary = nodes
            .iter()
            .zip(&w)
            .enumerate()
            .map(|(j, (&x, &w))| if j % 2 == 0 { 1.0 } else { -1.0 } * ((1.0 - x * x) * w).sqrt())
            .collect();
        let width = theta_max / panels as f64;
        let pts: Vec<f64> = (0..panels)
            .flat_map(|k| nodes.iter().map(move |&x| width * (k as f64 + 0.5 * (x + 1.0))))
            .collect();
        let values = pts.par_iter().map(|&th| mainardi(alpha, th)).collect::<Result<_>>()?;
        Ok(MainardiTable { width, nodes, bary, values })
    }

    fn panels(&self) -> usize {
        self.values.len() / Self::ORDER
    }

    fn eval(&self, theta: f64) -> f64 {
        let k = ((theta / self.width) as usize).min(self.panels() - 1);
        let s = 2.0 * (theta / self.width - k as f64) - 1.0;
        let v = &self.values[k * Self::ORDER..(k + 1) * Self::ORDER];
        let (mut num, mut den) = (0.0, 0.0);
        for ((&x, &b), &f) in self.nodes.iter().zip(&self.bary).zip(v) {
            let d = s - x;
            if d == 0.0 {
                return f;
            }
            num += b * f / d;
            den += b / d;
        }
        num / den
    }

    /// Double the panels until the coarser table reproduces the finer one's
    /// node values to `tol` (absolute; M_α is O(1)).
    fn converged(alpha: f64, theta_max: f64, tol: f64) -> Result<Self> {
        let mut coarse = Self::build(alpha, theta_max, 16)?;
        for _ in 0..8 {
            let fine = Self::build(alpha, theta_max, 2 * coarse.panels())?;
            let w = fine.width;
            let err = (0..fine.values.len())
                .map(|i| {
                    let th = w * ((i / Self::ORDER) as f64 + 0.5 * (fine.nodes[i % Self::ORDER] + 1.0));
                    (coarse.eval(th) - fine.values[i]).abs()
                })
                .fold(0.0, f64::max);
            if err < tol {
                return Ok(fine);
            }
            coarse = fine;
        }
        Err(Error::Quadrature(format!("Mainardi table for alpha = {alpha} did not settle")))
    }
}

/// ∫_0^∞ w(θ) M_α(θ) e^{-iθx} dθ for every x in `xs`, with w = 1 or αθ.
/// One θ-rule is shared by all x; panels double until the largest change is
/// below `quad.tol`. M_α comes from an interpolation table, so the fine
/// oscillatory rules cost no extra Mainardi evaluations.
pub fn mainardi_symbols(alpha: f64, xs: &[f64], weighted: bool, quad: &QuadConfig) -> Result<Vec<Complex64>> {
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    let tail = MainardiTail::fit(alpha)?;
    let theta_max = tail.cutoff(if weighted { 1.0 } else { 0.0 }, quad.tol / 10.0);
    let table = MainardiTable::converged(alpha, theta_max, quad.tol / 100.0)?;
    let xmax = xs.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let cfg = QuadConfig {
        initial_panels: quad.initial_panels.max((xmax * theta_max / 4.0).ceil() as usize),
        ..*quad
    };
    let (v, _) = refine_until(
        &cfg,
        |n| uniform_breaks(0.0, theta_max, n),
        |rule: &Rule| {
            let dens: Vec<f64> = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&th, &w)| {
                    let m = table.eval(th);
                    if weighted {
                        w * m * alpha * th
                    } else {
                        w * m
                    }
                })
                .collect();
            Ok(xs
                .par_iter()
                .map(|&x| {
                    rule.nodes
                        .iter()
                        .zip(&dens)
                        .map(|(&th, &d)| Complex64::from_polar(d, -th * x))
                        .sum::<Complex64>()
                })
                .collect::<Vec<_>>())
        },
        |a, b| a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max),
    )?;
    Ok(v)
}

fn apply_mainardi(fp: &FracParams, which: Propagator, t: f64, f: &Field, quad: &QuadConfig) -> Result<Field> {
    fp.require_fractional("the Mainardi representation")?;
    check_dim(fp, f)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("Mainardi oracle needs t > 0, got {t}")));
    }
    let mut fh = transform(f)?;
    let classes = f.grid.radial_classes();
    // FFT round-off leaves every mode near 1e-16 of the peak; keeping those
    // would force θ-panels fine enough for the largest |ξ| on the grid
    let mut peak = vec![0.0f64; classes.xi.len()];
    for (v, &c) in fh.values.iter().zip(&classes.class) {
        peak[c] = peak[c].max(v.norm());
    }
    let top = peak.iter().fold(0.0f64, |a, &b| a.max(b));
    let used: Vec<usize> = (0..peak.len()).filter(|&c| peak[c] > 1e-14 * top).collect();
    let xs: Vec<f64> = used
        .iter()
        .map(|&c| classes.xi[c].powf(2.0 * fp.beta) * t.powf(fp.alpha))
        .collect();
    let vals = mainardi_symbols(fp.alpha, &xs, which == Propagator::P, quad)?;
    let scale = match which {
        Propagator::S => 1.0,
        Propagator::P => t.powf(fp.alpha - 1.0),
    };
    let mut table = vec![Complex64::new(0.0, 0.0); peak.len()];
    for (&c, v) in used.iter().zip(vals) {
        table[c] = v * scale;
    }
    for (v, &c) in fh.values.iter_mut().zip(&classes.class) {
        *v *= table[c];
    }
    inverse(&fh)
}

/// S_t through ∫ M_α(θ) e^{-iθ t^α (-Δ)^β} dθ; an oracle independent of the
/// Mittag-Leffler evaluator.
#[allow(non_snake_case)]
pub fn apply_S_mainardi(fp: &FracParams, t: f64, f: &Field, quad: &QuadConfig) -> Result<Field> {
    apply_mainardi(fp, Propagator::S, t, f, quad)
}

/// P_t through t^{α-1} ∫ αθ M_α(θ) e^{-iθ t^α (-Δ)^β} dθ.
#[allow(non_snake_case)]
pub fn apply_P_mainardi(fp: &FracParams, t: f64, f: &Field, quad: &QuadConfig) -> Result<Field> {
    apply_mainardi(fp, Propagator::P, t, f, quad)
}

/// Continuum Fourier transform of initial data, û(ξ) = ∫ u(x) e^{-ixξ} dx.
pub trait Spectrum: Sync {
    fn eval(&self, xi: f64) -> Complex64;
    /// Radius beyond which |û| stays below `rel` times its peak; `None` when no
    /// tail bound is known.
    fn support_radius(&self, rel: f64) -> Option<f64>;
}

/// u(x) = A exp(-x²/(2w²)), û(ξ) = A w √(2π) exp(-w²ξ²/2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianSpectrum {
    pub amplitude: f64,
    pub width: f64,
}

impl GaussianSpectrum {
    pub fn new(amplitude: f64, width: f64) -> Self {
        GaussianSpectrum { amplitude, width }
    }

    pub fn physical(&self, x: f64) -> f64 {
        self.amplitude * (-0.5 * (x / self.width).powi(2)).exp()
    }

    /// ‖u‖_{L^p(ℝ)} in closed form.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.amplitude.abs();
        }
        self.amplitude.abs() * (self.width * (2.0 * PI / p).sqrt()).powf(1.0 / p)
    }
}

impl Spectrum for GaussianSpectrum {
    fn eval(&self, xi: f64) -> Complex64 {
        let w = self.width;
        Complex64::new(self.amplitude * w * (2.0 * PI).sqrt() * (-0.5 * (w * xi).powi(2)).exp(), 0.0)
    }

    fn support_radius(&self, rel: f64) -> Option<f64> {
        Some((-2.0 * rel.ln()).max(0.0).sqrt() / self.width)
    }
}

/// Spectrum given by a closure and vanishing for |ξ| > `radius`.
pub struct CompactSpectrum<F> {
    pub f: F,
    pub radius: f64,
}

impl<F: Fn(f64) -> Complex64 + Sync> Spectrum for CompactSpectrum<F> {
    fn eval(&self, xi: f64) -> Complex64 {
        if xi.abs() > self.radius {
            Complex64::new(0.0, 0.0)
        } else {
            (self.f)(xi)
        }
    }

    fn support_radius(&self, _rel: f64) -> Option<f64> {
        Some(self.radius)
    }
}

/// Settings for [`continuum_eval_1d_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuumConfig {
    /// extra Riesz factor |ξ|^θ
    pub riesz_power: f64,
    /// relative change between refinements that ends the doubling
    pub tol: f64,
    pub order: usize,
    pub max_doublings: usize,
}

impl Default for ContinuumConfig {
    fn default() -> Self {
        ContinuumConfig {
            riesz_power: 0.0,
            tol: 1e-10,
            order: 20,
            max_doublings: 6,
        }
    }
}

/// u(t, x) = (1/2π) ∫ m_t(ξ) û(ξ) e^{ixξ} dξ on ℝ, with m_t = a_t or b_t.
pub fn continuum_eval_1d(
    fp: &FracParams,
    t: f64,
    x_points: &[f64],
    spectrum: &dyn Spectrum,
    which: Propagator,
) -> Result<Vec<Complex64>> {
    continuum_eval_1d_with(fp, t, x_points, spectrum, which, &ContinuumConfig::default())
}

/// Breaks on [0, Ξ]: geometric grading below the feature scale `ell`, then
/// panels no wider than `h`.
fn continuum_breaks(xi_max: f64, ell: f64, h: f64) -> Vec<f64> {
    let ell = ell.min(xi_max);
    let mut b = vec![0.0];
    for l in (1..=24).rev() {
        b.push(ell * 0.5f64.powi(l));
    }
    b.push(ell);
    let n = ((xi_max - ell) / h).ceil() as usize;
    for i in 1..=n {
        b.push(ell + (xi_max - ell) * i as f64 / n as f64);
    }
    b
}

fn bisect(b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * b.len());
    for w in b.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*b.last().unwrap());
    out
}

/// Quadrature nodes on [0, Ξ] with the multiplier and weight folded in:
/// returns (ξ_j, w_j m(ξ_j) û(ξ_j), w_j m(ξ_j) û(-ξ_j)).
fn continuum_rule(
    spectrum: &dyn Spectrum,
    order: usize,
    breaks: &[f64],
    m: &(dyn Fn(f64) -> Result<Complex64> + Sync),
) -> Result<(Vec<f64>, Vec<Complex64>, Vec<Complex64>)> {
    let rule = Rule::composite(breaks, order);
    let folded: Vec<(Complex64, Complex64)> = rule
        .nodes
        .par_iter()
        .zip(&rule.weights)
        .map(|(&xi, &w)| {
            let m = m(xi)? * w;
            Ok((m * spectrum.eval(xi), m * spectrum.eval(-xi)))
        })
        .collect::<Result<_>>()?;
    let (plus, minus) = folded.into_iter().unzip();
    Ok((rule.nodes, plus, minus))
}

fn riesz_weighted(
    fp: &FracParams,
    which: Propagator,
    t: f64,
    theta: f64,
) -> impl Fn(f64) -> Result<Complex64> + Sync + '_ {
    move |xi| {
        let m = symbol(fp, which, t, xi)?;
        Ok(if theta != 0.0 { m * xi.powf(theta) } else { m })
    }
}

fn feature_scale(fp: &FracParams, t: f64) -> f64 {
    if t > 0.0 {
        t.powf(-fp.sigma()).min(1.0)
    } else {
        1.0
    }
}

pub fn continuum_eval_1d_with(
    fp: &FracParams,
    t: f64,
    x_points: &[f64],
    spectrum: &dyn Spectrum,
    which: Propagator,
    cfg: &ContinuumConfig,
) -> Result<Vec<Complex64>> {
    if fp.dim != 1 {
        return Err(Error::InvalidParameter("the continuum evaluator is one-dimensional".into()));
    }
    let m = riesz_weighted(fp, which, t, cfg.riesz_power);
    continuum_eval_generic(spectrum, x_points, cfg, feature_scale(fp, t), &m)
        .map_err(|e| match e {
            Error::Quadrature(msg) => Error::Quadrature(format!("{msg} at t = {t}")),
            e => e,
        })
}

/// (1/2π) ∫ m(|ξ|) û(ξ) e^{ixξ} dξ for an arbitrary radial multiplier whose
/// finest feature in ξ has size about `feature_scale`. `cfg.riesz_power` is
/// ignored here; fold it into `m`.
pub fn continuum_eval_generic(
    spectrum: &dyn Spectrum,
    x_points: &[f64],
    cfg: &ContinuumConfig,
    feature_scale: f64,
    m: &(dyn Fn(f64) -> Result<Complex64> + Sync),
) -> Result<Vec<Complex64>> {
    let xi_max = spectrum
        .support_radius(1e-3 * cfg.tol)
        .filter(|r| r.is_finite() && *r > 0.0)
        .ok_or_else(|| Error::Quadrature("spectrum has no usable tail bound".into()))?;
    let xmax = x_points.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let ell = feature_scale.min(1.0);
    let h = ell.min(8.0 / xmax.max(1e-300)).min(xi_max / 4.0);
    let mut breaks = continuum_breaks(xi_max, ell, h);

    let eval = |breaks: &[f64]| -> Result<Vec<Complex64>> {
        let (nodes, plus, minus) = continuum_rule(spectrum, cfg.order, breaks, m)?;
        Ok(x_points
            .par_iter()
            .map(|&x| {
                let mut s = Complex64::new(0.0, 0.0);
                for ((&xi, p), m) in nodes.iter().zip(&plus).zip(&minus) {
                    let e = Complex64::from_polar(1.0, x * xi);
                    s += p * e + m * e.conj();
                }
                s / (2.0 * PI)
            })
            .collect())
    };
    let mut prev = eval(&breaks)?;
    for _ in 0..cfg.max_doublings {
        breaks = bisect(&breaks);
        let next = eval(&breaks)?;
        let scale = next.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        let diff = next.iter().zip(&prev).fold(0.0f64, |a, (p, q)| a.max((p - q).norm()));
        if diff <= cfg.tol * scale || scale == 0.0 {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!("continuum quadrature did not settle to {:e}", cfg.tol)))
}

/// ‖m_t(D) |∇|^θ u‖_{L²(ℝ)} by Plancherel, (1/2π ∫ |m_t û|² dξ)^{1/2}.
pub fn continuum_l2_norm(
    fp: &FracParams,
    t: f64,
    spectrum: &dyn Spectrum,
    which: Propagator,
    cfg: &ContinuumConfig,
) -> Result<f64> {
    continuum_l2_generic(spectrum, cfg, feature_scale(fp, t), riesz_weighted(fp, which, t, cfg.riesz_power))
}

/// (1/2π ∫ |m(|ξ|) û(ξ)|² dξ)^{1/2} for an arbitrary radial multiplier.
pub fn continuum_l2_generic(
    spectrum: &dyn Spectrum,
    cfg: &ContinuumConfig,
    feature_scale: f64,
    m: impl Fn(f64) -> Result<Complex64> + Sync,
) -> Result<f64> {
    let xi_max = spectrum
        .support_radius(1e-3 * cfg.tol)
        .filter(|r| r.is_finite() && *r > 0.0)
        .ok_or_else(|| Error::Quadrature("spectrum has no usable tail bound".into()))?;
    let ell = feature_scale.min(1.0);
    let mut breaks = continuum_breaks(xi_max, ell, ell.min(xi_max / 4.0));
    let eval = |b: &[f64]| -> Result<f64> {
        let rule = Rule::composite(b, cfg.order);
        let s: Vec<f64> = rule
            .nodes
            .par_iter()
            .zip(&rule.weights)
            .map(|(&xi, &w)| {
                let mv = m(xi)?;
                Ok(w * ((mv * spectrum.eval(xi)).norm_sqr() + (mv * spectrum.eval(-xi)).norm_sqr()))
            })
            .collect::<Result<_>>()?;
        Ok((s.iter().sum::<f64>() / (2.0 * PI)).sqrt())
    };
    let mut prev = eval(&breaks)?;
    for _ in 0..cfg.max_doublings {
        breaks = bisect(&breaks);
        let next = eval(&breaks)?;
        if (next - prev).abs() <= cfg.tol * next.abs() || next == 0.0 {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature("L2 quadrature did not settle".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma_real;
    use crate::spectral::{lp_norm, SpectralGrid};

    fn gauss_field(g: SpectralGrid) -> Field {
        Field::from_fn(g, |x| Complex64::new((-0.5 * x[0] * x[0]).exp(), 0.0))
    }

    #[test]
    fn parameter_checks() {
        assert!(FracParams::new(1.0, 1.0, 1, 1.0).is_err());
        assert!(FracParams::new(0.5, 0.5, 1, 1.0).is_err());
        assert!(FracParams::new(0.5, 1.0, 2, 1.0).is_err());
        let fp = FracParams::new(0.6, 1.0, 1, 1.0).unwrap();
        assert!((fp.sigma() - 0.3).abs() < 1e-15);
        assert!(FracParams::classical(1.0, 1, 1.0).unwrap().is_classical());
    }

    #[test]
    fn symbol_values() {
        let fp = FracParams::new(0.5, 1.0, 1, 1.0).unwrap();
        assert_eq!(symbol_a(&fp, 0.0, 3.0).unwrap(), Complex64::new(1.0, 0.0));
        let b0 = symbol_b(&fp, 2.0, 0.0).unwrap();
        assert!((b0.re - 2f64.powf(-0.5) / gamma_real(0.5).unwrap()).abs() < 1e-14);
        assert!(symbol_b(&fp, 0.0, 1.0).is_err());
        // t^α |ξ|^{2β} = 100: one-term asymptotic -i/(100 Γ(1/2))
        let a = symbol_a(&fp, 1.0, 10.0).unwrap();
        let lead = Complex64::new(0.0, -0.01 / PI.sqrt());
        assert!((a - lead).norm() / a.norm() < 1e-2);
        let fp = FracParams::new(0.6, 1.0, 1, 1.0).unwrap();
        let b = symbol_b(&fp, 1.0, 10.0).unwrap();
        let lead = 1.0 / gamma_real(-0.6).unwrap() * 1e-4;
        assert!((b.re - lead).abs() / b.norm() < 5e-2, "{b} vs {lead}");
        let cl = FracParams::classical(1.0, 1, 1.0).unwrap();
        let a = symbol_a(&cl, 0.5, 2.0).unwrap();
        assert!((a - Complex64::from_polar(1.0, -2.0)).norm() < 1e-15);
    }

    #[test]
    fn classical_group_is_unitary() {
        let g = SpectralGrid::new(1, 40.0, 256).unwrap();
        let f = gauss_field(g);
        let cl = FracParams::classical(1.0, 1, 1.0).unwrap();
        let u = apply_S(&cl, 0.7, &f).unwrap();
        let r = lp_norm(&u, 2.0).unwrap() / lp_norm(&f, 2.0).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert_eq!(apply_S(&cl, 0.0, &f).unwrap(), f);
    }

    #[test]
    fn fractional_s_contracts_mass() {
        let g = SpectralGrid::new(1, 40.0, 256).unwrap();
        let f = Field::from_fn(g, |x| Complex64::new(x[0] * (-0.5 * x[0] * x[0]).exp(), 0.0));
        let fp = FracParams::new(0.6, 1.0, 1, 1.0).unwrap();
        let u = apply_S(&fp, 1.0, &f).unwrap();
        assert!(lp_norm(&u, 2.0).unwrap() < lp_norm(&f, 2.0).unwrap());
    }

    #[test]
    fn split_sums_to_whole() {
        let g = SpectralGrid::new(1, 40.0, 256).unwrap();
        let f = gauss_field(g);
        let fp = FracParams::new(0.6, 1.0, 1, 1.0).unwrap();
        let parts = apply_S_split(&fp, 2.0, &f).unwrap();
        let whole = apply_S(&fp, 2.0, &f).unwrap();
        let d = parts.sum().unwrap().sub(&whole).unwrap().l2_sum();
        assert!(d < 1e-10 * whole.l2_sum());
        // band-limited data below M t^{-σ}: the mid term vanishes
        let mut lh = transform(&Field::from_fn(g, |x| Complex64::new((2.0 * PI * x[0] / 40.0).cos(), 0.0))).unwrap();
        for (i, v) in lh.values.iter_mut().enumerate() {
            if g.wavenumber(i).abs() > 1 {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        let low = inverse(&lh).unwrap();
        let parts = apply_S_split(&fp, 2.0, &low).unwrap();
        assert!(parts.mid.l2_sum() < 1e-14 * low.l2_sum());
        let cl = FracParams::classical(1.0, 1, 1.0).unwrap();
        assert!(apply_S_split(&cl, 1.0, &f).is_err());
    }

    #[test]
    fn mainardi_oracle_agrees() {
        let g = SpectralGrid::new(1, 40.0, 128).unwrap();
        let f = gauss_field(g);
        let fp = FracParams::new(0.5, 1.0, 1, 1.0).unwrap();
        let q = QuadConfig::default();
        let a = apply_S(&fp, 1.0, &f).unwrap();
        let b = apply_S_mainardi(&fp, 1.0, &f, &q).unwrap();
        assert!(b.sub(&a).unwrap().l2_sum() / f.l2_sum() < 1e-5);
        let a = apply_P(&fp, 1.0, &f).unwrap();
        let b = apply_P_mainardi(&fp, 1.0, &f, &q).unwrap();
        assert!(b.sub(&a).unwrap().l2_sum() / f.l2_sum() < 1e-5);
        let z = Field::zeros(g, Space::Physical);
        assert_eq!(apply_S_mainardi(&fp, 1.0, &z, &q).unwrap().l2_sum(), 0.0);
    }

    #[test]
    fn continuum_free_schrodinger_gaussian() {
        // i u_t = -u_xx, u0 = e^{-x²/2}: u = (1+2it)^{-1/2} exp(-x²/(2(1+2it)))
        let cl = FracParams::classical(1.0, 1, 1.0).unwrap();
        let xs: Vec<f64> = (0..21).map(|i| -5.0 + 0.5 * i as f64).collect();
        let t = 0.8;
        let u = continuum_eval_1d(&cl, t, &xs, &GaussianSpectrum::new(1.0, 1.0), Propagator::S).unwrap();
        let d = Complex64::new(1.0, 2.0 * t);
        for (x, v) in xs.iter().zip(&u) {
            let want = (-x * x / (2.0 * d)).exp() / d.sqrt();
            assert!((v - want).norm() < 1e-8, "x={x}: {v} vs {want}");
        }
    }

    #[test]
    fn continuum_small_time_and_linearity() {
        let fp = FracParams::new(0.6, 1.0, 1, 1.0).unwrap();
        let gs = GaussianSpectrum::new(1.0, 1.0);
        let xs = [0.0, 0.7, -1.3];
        let u = continuum_eval_1d(&fp, 1e-12, &xs, &gs, Propagator::S).unwrap();
        for (x, v) in xs.iter().zip(&u) {
            assert!((v.re - gs.physical(*x)).abs() < 1e-6 && v.im.abs() < 1e-6);
        }
        let g3 = GaussianSpectrum::new(3.0, 1.0);
        let u1 = continuum_eval_1d(&fp, 2.0, &xs, &gs, Propagator::P).unwrap();
        let u3 = continuum_eval_1d(&fp, 2.0, &xs, &g3, Propagator::P).unwrap();
        for (a, b) in u1.iter().zip(&u3) {
            assert!((a * 3.0 - b).norm() < 1e-12);
        }
        let l2 = continuum_l2_norm(&fp, 1e-12, &gs, Propagator::S, &ContinuumConfig::default()).unwrap();
        assert!((l2 - gs.lp_norm(2.0)).abs() < 1e-8);
    }
}
