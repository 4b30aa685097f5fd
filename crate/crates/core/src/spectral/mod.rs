//! Periodic-box discretisation of ℝ or ℝ² with unitary discrete Fourier
//! transforms, Fourier multipliers and Riemann-sum norms.

mod cutoff;
mod io;

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};

pub use cutoff::{chi1, chi1_complement, cutoff_symbol, CutoffSpec};
pub use io::{read_snapshot, write_csv, write_snapshot};

/// Isotropic box [-L/2, L/2)^dim with `points` samples per axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralGrid {
    dim: usize,
    box_length: f64,
    points: usize,
}

impl SpectralGrid {
    pub fn new(dim: usize, box_length: f64, points: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidParameter(format!("dimension {dim} must be 1 or 2")));
        }
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(Error::InvalidParameter(format!("box length {box_length} must be positive")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "points per axis {points} must be a power of two >= 8"
            )));
        }
        Ok(SpectralGrid {
            dim,
            box_length,
            points,
        })
    }

    /// n = 1, L = 80, 2^12 points.
    pub fn default_1d() -> Self {
        SpectralGrid {
            dim: 1,
            box_length: 80.0,
            points: 4096,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Total number of samples, points^dim.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.box_length / self.points as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    /// Sample positions along one axis.
    pub fn axis(&self) -> Vec<f64> {
        let h = self.dx();
        (0..self.points).map(|j| -0.5 * self.box_length + j as f64 * h).collect()
    }

    /// Signed integer wavenumber of FFT index `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.points as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Lattice frequencies 2πk/L along one axis, in FFT order.
    pub fn freqs(&self) -> Vec<f64> {
        let d = 2.0 * PI / self.box_length;
        (0..self.points).map(|i| d * self.wavenumber(i) as f64).collect()
    }

    /// Largest |k| per axis; the Nyquist mode is -N/2.
    pub fn max_wavenumber(&self) -> i64 {
        self.points as i64 / 2
    }

    /// Squared integer wavenumber |k|² of flat index `idx`.
    pub fn wavenumber_sq(&self, idx: usize) -> u64 {
        let n = self.points;
        let mut s = 0u64;
        let mut rest = idx;
        for _ in 0..self.dim {
            let k = self.wavenumber(rest % n);
            s += (k * k) as u64;
            rest /= n;
        }
        s
    }

    /// Radial classes: distinct |ξ| values and the class of every flat index.
    /// Radial symbols are evaluated once per class.
    pub fn radial_classes(&self) -> RadialClasses {
        let mut index_of: HashMap<u64, usize> = HashMap::new();
        let mut keys = Vec::new();
        let mut class = Vec::with_capacity(self.len());
        for idx in 0..self.len() {
            let k2 = self.wavenumber_sq(idx);
            let c = *index_of.entry(k2).or_insert_with(|| {
                keys.push(k2);
                keys.len() - 1
            });
            class.push(c);
        }
        let d = 2.0 * PI / self.box_length;
        let xi = keys.iter().map(|&k2| d * (k2 as f64).sqrt()).collect();
        RadialClasses { xi, class }
    }

    /// Flat index of the point nearest to the origin, x = 0.
    pub fn origin_index(&self) -> usize {
        let c = self.points / 2;
        (0..self.dim).fold(0, |acc, _| acc * self.points + c)
    }

    fn check_same(&self, other: &SpectralGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// Distinct frequency magnitudes of a grid.
#[derive(Clone, Debug)]
pub struct RadialClasses {
    pub xi: Vec<f64>,
    pub class: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    Physical,
    Frequency,
}

impl Space {
    pub fn name(self) -> &'static str {
        match self {
            Space::Physical => "physical",
            Space::Frequency => "frequency",
        }
    }
}

/// Complex samples on a grid, tagged with the space they live in.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub grid: SpectralGrid,
    pub values: Vec<Complex64>,
    pub space: Space,
}

impl Field {
    pub fn zeros(grid: SpectralGrid, space: Space) -> Self {
        Field {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            space,
        }
    }

    pub fn from_values(grid: SpectralGrid, values: Vec<Complex64>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Field { grid, values, space })
    }

    /// Sample `f` at the grid points; `f` receives one coordinate per axis.
    pub fn from_fn(grid: SpectralGrid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let axis = grid.axis();
        let n = grid.points;
        let mut x = vec![0.0; grid.dim];
        let values = (0..grid.len())
            .map(|idx| {
                let mut rest = idx;
                for slot in x.iter_mut().rev() {
                    *slot = axis[rest % n];
                    rest /= n;
                }
                f(&x)
            })
            .collect();
        Field {
            grid,
            values,
            space: Space::Physical,
        }
    }

    /// Field whose continuum Fourier transform at the lattice frequencies is
    /// `spectrum(|ξ|)`; the inverse of [`continuum_spectrum`].
    pub fn from_continuum_spectrum(grid: SpectralGrid, spectrum: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let freqs = grid.freqs();
        let n = grid.points;
        let scale = 1.0 / (grid.cell_volume() * (grid.len() as f64).sqrt());
        let mut xi = vec![0.0; grid.dim];
        let values = (0..grid.len())
            .map(|idx| {
                let mut rest = idx;
                let mut sign = 1.0;
                for slot in xi.iter_mut().rev() {
                    let i = rest % n;
                    *slot = freqs[i];
                    if grid.wavenumber(i) % 2 != 0 {
                        sign = -sign;
                    }
                    rest /= n;
                }
                spectrum(&xi) * (sign * scale)
            })
            .collect();
        inverse(&Field {
            grid,
            values,
            space: Space::Frequency,
        })
    }

    pub(crate) fn expect(&self, space: Space) -> Result<()> {
        if self.space != space {
            return Err(Error::SpaceMismatch {
                expected: space.name(),
                found: self.space.name(),
            });
        }
        Ok(())
    }

    /// Discrete l² norm of the raw samples (no cell weight).
    pub fn l2_sum(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    pub fn axpy(&mut self, a: Complex64, other: &Field) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        if self.space != other.space {
            return Err(Error::SpaceMismatch {
                expected: self.space.name(),
                found: other.space.name(),
            });
        }
        for (v, w) in self.values.iter_mut().zip(&other.values) {
            *v += a * w;
        }
        Ok(())
    }

    /// Difference `self - other` as a new field.
    pub fn sub(&self, other: &Field) -> Result<Field> {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other)?;
        Ok(out)
    }
}

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|p| {
        p.borrow_mut()
            .entry((n, forward))
            .or_insert_with(|| {
                let dir = if forward {
                    FftDirection::Forward
                } else {
                    FftDirection::Inverse
                };
                FftPlanner::new().plan_fft(n, dir)
            })
            .clone()
    })
}

fn fft_in_place(grid: &SpectralGrid, data: &mut [Complex64], forward: bool) {
    let n = grid.points;
    let fft = plan(n, forward);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // rows are contiguous
    for row in data.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    if grid.dim == 2 {
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                col[r] = data[r * n + c];
            }
            fft.process_with_scratch(&mut col, &mut scratch);
            for r in 0..n {
                data[r * n + c] = col[r];
            }
        }
    }
    let s = 1.0 / (grid.len() as f64).sqrt();
    for v in data.iter_mut() {
        *v *= s;
    }
}

/// Unitary forward transform of a physical-space field.
pub fn transform(f: &Field) -> Result<Field> {
    f.expect(Space::Physical)?;
    let mut out = f.clone();
    fft_in_place(&f.grid, &mut out.values, true);
    out.space = Space::Frequency;
    Ok(out)
}

/// Unitary inverse transform of a frequency-space field.
pub fn inverse(f: &Field) -> Result<Field> {
    f.expect(Space::Frequency)?;
    let mut out = f.clone();
    fft_in_place(&f.grid, &mut out.values, false);
    out.space = Space::Physical;
    Ok(out)
}

/// Continuum Fourier transform ∫ f(x) e^{-ixξ} dx sampled at the lattice
/// frequencies, from a physical-space field.
pub fn continuum_spectrum(f: &Field) -> Result<Vec<Complex64>> {
    let fh = transform(f)?;
    let g = f.grid;
    let scale = g.cell_volume() * (g.len() as f64).sqrt();
    let n = g.points;
    Ok(fh
        .values
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            // e^{-iξ x0} with x0 = -L/2 is (-1)^k per axis
            let mut rest = idx;
            let mut sign = 1.0;
            for _ in 0..g.dim {
                if g.wavenumber(rest % n) % 2 != 0 {
                    sign = -sign;
                }
                rest /= n;
            }
            v * (sign * scale)
        })
        .collect())
}

/// Values of a radial symbol on every radial class.
pub fn symbol_table(classes: &RadialClasses, m: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
    classes.xi.iter().map(|&xi| m(xi)).collect()
}

/// Fallible symbol table, evaluated in parallel; for expensive symbols.
pub fn try_symbol_table(
    classes: &RadialClasses,
    m: impl Fn(f64) -> Result<Complex64> + Sync,
) -> Result<Vec<Complex64>> {
    use rayon::prelude::*;
    classes.xi.par_iter().map(|&xi| m(xi)).collect()
}

/// Multiply a frequency-space field by per-class symbol values. A non-finite
/// value is an error only where the coefficient is nonzero.
pub fn multiply_by_table(fh: &mut Field, classes: &RadialClasses, table: &[Complex64]) -> Result<()> {
    fh.expect(Space::Frequency)?;
    for (v, &c) in fh.values.iter_mut().zip(&classes.class) {
        let m = table[c];
        if *v == Complex64::new(0.0, 0.0) {
            continue;
        }
        if !(m.re.is_finite() && m.im.is_finite()) {
            return Err(Error::NonFiniteSymbol {
                xi: classes.xi[c],
                value: format!("{m}"),
            });
        }
        *v *= m;
    }
    Ok(())
}

/// Apply the radial Fourier multiplier `m(|ξ|)` and return a physical-space
/// field. The input may be in either space.
pub fn apply_multiplier(f: &Field, m: impl Fn(f64) -> Complex64) -> Result<Field> {
    let mut fh = match f.space {
        Space::Physical => transform(f)?,
        Space::Frequency => f.clone(),
    };
    let classes = f.grid.radial_classes();
    let table = symbol_table(&classes, m);
    multiply_by_table(&mut fh, &classes, &table)?;
    inverse(&fh)
}

/// Bessel potential symbol ⟨ξ⟩^s = (1 + |ξ|²)^{s/2}.
pub fn bessel_symbol(s: f64) -> impl Fn(f64) -> Complex64 {
    move |xi| Complex64::new((1.0 + xi * xi).powf(0.5 * s), 0.0)
}

/// Riesz potential symbol |ξ|^s. For s < 0 this is infinite at ξ = 0, which
/// `apply_multiplier` rejects unless the zero mode of the data vanishes.
pub fn riesz_symbol(s: f64) -> impl Fn(f64) -> Complex64 {
    move |xi| {
        if s == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(xi.powf(s), 0.0)
        }
    }
}

/// |ξ|^s χ_t^c(ξ), defined as exactly zero wherever the complement cutoff
/// vanishes, including ξ = 0.
pub fn riesz_high_symbol(s: f64, c: CutoffSpec, t: f64) -> impl Fn(f64) -> Complex64 {
    let chi_c = cutoff_symbol(c, t, true);
    move |xi| {
        let w = chi_c(xi);
        if w == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(w * xi.powf(s), 0.0)
        }
    }
}

/// Fractional Laplacian symbol |ξ|^{2β}.
pub fn frac_laplacian_symbol(beta: f64) -> impl Fn(f64) -> Complex64 {
    move |xi| Complex64::new(xi.powf(2.0 * beta), 0.0)
}

/// Riemann-sum L^p norm with cell weight dx^dim; p = ∞ gives the max.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    f.expect(Space::Physical)?;
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("L^p exponent {p} must be >= 1")));
    }
    if p.is_infinite() {
        return Ok(f.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let w = f.grid.cell_volume();
    let s: f64 = if p == 2.0 {
        f.values.iter().map(|v| v.norm_sqr()).sum()
    } else {
        f.values.iter().map(|v| v.norm().powf(p)).sum()
    };
    Ok((s * w).powf(1.0 / p))
}

/// ‖⟨∇⟩^s f‖_{L^r}.
pub fn sobolev_norm(f: &Field, s: f64, r: f64) -> Result<f64> {
    if s == 0.0 {
        return lp_norm(f, r);
    }
    lp_norm(&apply_multiplier(f, bessel_symbol(s))?, r)
}

/// Keep only modes with |k| <= N/3 on every axis (two-thirds rule).
pub fn dealias(fh: &mut Field) -> Result<()> {
    fh.expect(Space::Frequency)?;
    let g = fh.grid;
    let n = g.points;
    let kmax = (n / 3) as i64;
    for (idx, v) in fh.values.iter_mut().enumerate() {
        let mut rest = idx;
        for _ in 0..g.dim {
            if g.wavenumber(rest % n).abs() > kmax {
                *v = Complex64::new(0.0, 0.0);
                break;
            }
            rest /= n;
        }
    }
    Ok(())
}
