//! Composite Gauss-Legendre rules and panel-doubling integration.

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Flattened nodes and weights of a composite rule.
#[derive(Clone, Debug, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn composite(breaks: &[f64], order: usize) -> Rule {
        let (x, w) = gauss_legendre(order);
        let mut rule = Rule::default();
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let h = 0.5 * (b - a);
            let c = 0.5 * (a + b);
            for (xi, wi) in x.iter().zip(&w) {
                rule.nodes.push(c + h * xi);
                rule.weights.push(h * wi);
            }
        }
        rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `n` equal panels on [a, b].
pub fn uniform_breaks(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// `n` equal panels on [a, b] whose first panel is further split geometrically
/// (ratio 1/4, `levels` times) to resolve an endpoint singularity at `a`.
pub fn graded_breaks(a: f64, b: f64, n: usize, levels: usize) -> Vec<f64> {
    let h = (b - a) / n as f64;
    let mut out = vec![a];
    for l in (1..=levels).rev() {
        out.push(a + h * 0.25f64.powi(l as i32));
    }
    for i in 1..=n {
        out.push(a + h * i as f64);
    }
    out
}

/// Settings for panel-doubling quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    /// stop when two successive refinements differ by less than this
    pub tol: f64,
    /// Gauss-Legendre points per panel
    pub order: usize,
    pub initial_panels: usize,
    pub max_doublings: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            tol: 1e-10,
            order: 20,
            initial_panels: 8,
            max_doublings: 10,
        }
    }
}

/// Evaluate `eval` on rules with `initial_panels * 2^j` panels until two
/// successive results are within `cfg.tol` in the metric `dist`.
pub fn refine_until<T>(
    cfg: &QuadConfig,
    mut make_breaks: impl FnMut(usize) -> Vec<f64>,
    mut eval: impl FnMut(&Rule) -> Result<T>,
    dist: impl Fn(&T, &T) -> f64,
) -> Result<(T, usize)> {
    let mut panels = cfg.initial_panels.max(1);
    let mut prev = eval(&Rule::composite(&make_breaks(panels), cfg.order))?;
    for _ in 0..cfg.max_doublings {
        panels *= 2;
        let next = eval(&Rule::composite(&make_breaks(panels), cfg.order))?;
        if dist(&prev, &next) < cfg.tol {
            return Ok((next, panels));
        }
        prev = next;
    }
    Err(Error::Quadrature(format!(
        "no agreement to {:e} after {} panels",
        cfg.tol, panels
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        for n in [1, 2, 5, 16, 31] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn composite_oscillatory() {
        let rule = Rule::composite(&uniform_breaks(0.0, 10.0, 40), 16);
        let got = rule.integrate(|x| (30.0 * x).cos());
        assert!((got - (300.0f64).sin() / 30.0).abs() < 1e-13);
    }

    #[test]
    fn graded_handles_endpoint_singularity() {
        let cfg = QuadConfig::default();
        let (v, _) = refine_until(
            &cfg,
            |n| graded_breaks(0.0, 1.0, n, 30),
            |r| Ok(r.integrate(|x| x.powf(-0.5))),
            |a, b| (a - b).abs(),
        )
        .unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }
}
