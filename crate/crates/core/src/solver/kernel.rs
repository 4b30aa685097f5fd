//! Product-integration weights for the memory integral
//! 𝓜v(t_k) = ∫_0^{t_k} P_{t_k-τ} v(τ) dτ.
//!
//! v is interpolated linearly on each panel and the kernel
//! K(s) = s^{α-1} E_{α,α}(λ s^α), λ = -i|ξ|^{2β}, is integrated exactly through
//!
//! ```text
//! W1(s) = ∫_0^s K = s^α E_{α,α+1}(λ s^α)
//! W2(s) = ∫_0^s K(u)(s-u) du = s^{α+1} E_{α,α+2}(λ s^α)
//! ```

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::TimeMesh;
use crate::error::{Error, Result};
use crate::evolution::FracParams;
use crate::special::{mittag_leffler, MlParams};
use crate::spectral::RadialClasses;

/// φ_k(z) = Σ z^n/(n+k)!, i.e. E_{1,1+k}(z), for k = 1, 2.
fn phi(k: u32, z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if z.norm() < 0.5 {
        let mut term = one;
        for j in 1..=k {
            term /= j as f64;
        }
        let mut s = term;
        for n in 1..30 {
            term *= z / (n + k) as f64;
            s += term;
        }
        return s;
    }
    let e = z.exp();
    match k {
        1 => (e - one) / z,
        _ => (e - one - z) / (z * z),
    }
}

/// (W1(s), W2(s)) at one frequency magnitude.
fn w_pair(fp: &FracParams, s: f64, xi: f64) -> Result<(Complex64, Complex64)> {
    let a = fp.alpha;
    let lam_mag = xi.powf(2.0 * fp.beta);
    if fp.is_classical() {
        let z = Complex64::new(0.0, -lam_mag * s);
        return Ok((phi(1, z) * s, phi(2, z) * (s * s)));
    }
    let sa = s.powf(a);
    let z = Complex64::new(0.0, -lam_mag * sa);
    let e1 = mittag_leffler(&MlParams::new(a, a + 1.0)?, z)?;
    let e2 = mittag_leffler(&MlParams::new(a, a + 2.0)?, z)?;
    Ok((e1 * sa, e2 * (sa * s)))
}

/// Weights w_{k,i}(ξ) with 𝓜v̂(t_k, ξ) = Σ_{i<=k} w_{k,i}(ξ) v̂(t_i, ξ), stored
/// per radial class.
#[derive(Clone, Debug)]
pub struct DuhamelKernel {
    /// rows[k][i][class]; rows[0] is empty
    rows: Vec<Vec<Vec<Complex64>>>,
}

impl DuhamelKernel {
    /// Build the rows listed in `which` (all other rows stay empty).
    pub fn build(fp: &FracParams, mesh: &TimeMesh, classes: &RadialClasses, which: &[usize]) -> Result<Self> {
        let t = mesh.nodes();
        let jn = t.len() - 1;
        if let Some(&k) = which.iter().find(|&&k| k > jn) {
            return Err(Error::MissingHistory(k));
        }
        // distinct positive lags s = t_k - t_j
        let mut index: HashMap<u64, usize> = HashMap::new();
        let mut lags = Vec::new();
        for &k in which {
            for j in 0..k {
                let s = t[k] - t[j];
                index.entry(s.to_bits()).or_insert_with(|| {
                    lags.push(s);
                    lags.len() - 1
                });
            }
        }
        let nc = classes.xi.len();
        let table: Vec<Vec<(Complex64, Complex64)>> = lags
            .par_iter()
            .map(|&s| classes.xi.iter().map(|&xi| w_pair(fp, s, xi)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let zero = Complex64::new(0.0, 0.0);
        let w_at = |s: f64, c: usize| -> (Complex64, Complex64) {
            if s == 0.0 {
                (zero, zero)
            } else {
                table[index[&s.to_bits()]][c]
            }
        };

        let mut rows = vec![Vec::new(); jn + 1];
        let built: Vec<(usize, Vec<Vec<Complex64>>)> = which
            .par_iter()
            .map(|&k| {
                let mut row = vec![vec![zero; nc]; k + 1];
                for j in 0..k {
                    let sa = t[k] - t[j];
                    let sb = t[k] - t[j + 1];
                    let h = t[j + 1] - t[j];
                    for c in 0..nc {
                        let (w1a, w2a) = w_at(sa, c);
                        let (w1b, w2b) = w_at(sb, c);
                        let a0 = w1a - w1b;
                        let a1 = (w1a * sa - w2a) - (w1b * sb - w2b);
                        row[j][c] += (a1 - a0 * sb) / h;
                        row[j + 1][c] += (a0 * sa - a1) / h;
                    }
                }
                (k, row)
            })
            .collect();
        for (k, row) in built {
            rows[k] = row;
        }
        Ok(DuhamelKernel { rows })
    }

    pub fn full(fp: &FracParams, mesh: &TimeMesh, classes: &RadialClasses) -> Result<Self> {
        let which: Vec<usize> = (1..mesh.nodes().len()).collect();
        Self::build(fp, mesh, classes, &which)
    }

    /// Σ_i w_{k,i} v̂_i on raw frequency coefficients.
    pub fn apply_row(&self, k: usize, classes: &RadialClasses, v_hat: &[Vec<Complex64>]) -> Result<Vec<Complex64>> {
        let n = classes.class.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        if k == 0 {
            return Ok(out);
        }
        let row = &self.rows[k];
        if row.is_empty() {
            return Err(Error::MissingHistory(k));
        }
        if v_hat.len() <= k {
            return Err(Error::MissingHistory(v_hat.len()));
        }
        for (i, w) in row.iter().enumerate() {
            for ((o, v), &c) in out.iter_mut().zip(&v_hat[i]).zip(&classes.class) {
                *o += w[c] * v;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma_real;

    #[test]
    fn phi_functions() {
        for z in [Complex64::new(0.1, -0.3), Complex64::new(0.0, -5.0), Complex64::new(0.0, -0.49)] {
            let p1 = mittag_leffler(&MlParams::new(1.0, 2.0).unwrap(), z).unwrap();
            let p2 = mittag_leffler(&MlParams::new(1.0, 3.0).unwrap(), z).unwrap();
            assert!((phi(1, z) - p1).norm() < 1e-14);
            assert!((phi(2, z) - p2).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_frequency_weights_integrate_exactly() {
        let fp = FracParams::new(0.4, 1.0, 1, 1.0).unwrap();
        let mesh = TimeMesh::new(2.0, 16, 2.5).unwrap();
        let classes = RadialClasses {
            xi: vec![0.0],
            class: vec![0],
        };
        let k = DuhamelKernel::full(&fp, &mesh, &classes).unwrap();
        let ones = vec![vec![Complex64::new(1.0, 0.0)]; 17];
        let got = k.apply_row(16, &classes, &ones).unwrap()[0];
        let want = 2f64.powf(0.4) / gamma_real(1.4).unwrap();
        assert!((got.re - want).abs() < 1e-13 && got.im.abs() < 1e-15);
        // v(τ) = τ is reproduced exactly by linear interpolation
        let lin: Vec<_> = mesh.nodes().iter().map(|&t| vec![Complex64::new(t, 0.0)]).collect();
        let got = k.apply_row(16, &classes, &lin).unwrap()[0];
        let want = 2f64.powf(1.4) / gamma_real(2.4).unwrap();
        assert!((got.re - want).abs() < 1e-12);
        assert!(matches!(
            DuhamelKernel::build(&fp, &mesh, &classes, &[17]),
            Err(Error::MissingHistory(17))
        ));
    }
}
