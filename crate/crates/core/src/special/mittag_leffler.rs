//! Two-parameter Mittag-Leffler function E_{α,β}(z) = Σ z^k / Γ(αk + β).
//!
//! Regimes: the power series (with automatic precision escalation) inside
//! `series_radius` and in the growth sector |arg z| <= απ/2; outside that
//! radius the asymptotic expansion
//!
//! ```text
//! E_{α,β}(z) ~ [1/α z^{(1-β)/α} exp(z^{1/α})] - Σ_{k>=1} z^{-k} / Γ(β - αk)
//! ```
//!
//! is used when its truncation error can be certified below `tol`, otherwise the
//! series takes over again. The bracketed exponential term is present only for
//! |arg z| < απ.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{ln_gamma_abs, recip_gamma};
use super::series::{self, recip_gamma_affine, SeriesKind, SeriesPrecision};
use crate::error::{Error, Result};

const MAX_ASYMPTOTIC_TERMS: usize = 400;
const SERIES_PEAK_LIMIT: f64 = 30.0;

/// Parameters of one Mittag-Leffler evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MlParams {
    pub alpha: f64,
    pub beta: f64,
    /// |z| beyond which the asymptotic expansion is tried
    pub series_radius: f64,
    /// minimum number of algebraic terms in the asymptotic regime
    pub asymptotic_terms: usize,
    /// relative error target
    pub tol: f64,
}

impl MlParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = MlParams {
            alpha,
            beta,
            series_radius: 8.0,
            asymptotic_terms: 6,
            tol: 1e-14,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        self.tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_series_radius(mut self, r: f64) -> Result<Self> {
        self.series_radius = r;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} must lie in (0, 2]",
                self.alpha
            )));
        }
        if !self.beta.is_finite() {
            return Err(Error::InvalidParameter("beta must be finite".into()));
        }
        if !(self.series_radius > 0.0) {
            return Err(Error::InvalidParameter("series_radius must be positive".into()));
        }
        if self.asymptotic_terms < 1 {
            return Err(Error::InvalidParameter("asymptotic_terms must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        Ok(())
    }
}

/// How a value was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Series(SeriesPrecision),
    Asymptotic { terms: usize },
}

impl Regime {
    pub fn label(&self) -> String {
        match self {
            Regime::Series(SeriesPrecision::Double) => "series".into(),
            Regime::Series(SeriesPrecision::DoubleDouble) => "series-dd".into(),
            Regime::Series(SeriesPrecision::Extended { bits }) => format!("series-mp{bits}"),
            Regime::Asymptotic { terms } => format!("asymptotic{terms}"),
        }
    }
}

pub fn mittag_leffler(p: &MlParams, z: Complex64) -> Result<Complex64> {
    mittag_leffler_with_regime(p, z).map(|(v, _)| v)
}

pub fn mittag_leffler_with_regime(p: &MlParams, z: Complex64) -> Result<(Complex64, Regime)> {
    p.validate()?;
    if z.norm() == 0.0 {
        return Ok((
            Complex64::new(recip_gamma(p.beta), 0.0),
            Regime::Series(SeriesPrecision::Double),
        ));
    }
    // the series terms peak near exp(|z|^{1/α}); once that is beyond what
    // double-double absorbs, a certified expansion is worth trying even inside
    // the series radius
    let costly = z.norm().powf(1.0 / p.alpha) > SERIES_PEAK_LIMIT;
    if (z.norm() > p.series_radius || costly) && !in_growth_sector(p.alpha, z) {
        if let Some((v, terms)) = asymptotic_certified(p, z) {
            return Ok((v, Regime::Asymptotic { terms }));
        }
    }
    let (v, prec) = mittag_leffler_series(p, z)?;
    Ok((v, Regime::Series(prec)))
}

/// The power series alone, at whatever precision `p.tol` requires.
pub fn mittag_leffler_series(p: &MlParams, z: Complex64) -> Result<(Complex64, SeriesPrecision)> {
    p.validate()?;
    series::eval(SeriesKind::mittag_leffler(p.alpha, p.beta), z, p.tol)
}

/// The algebraic part of the asymptotic expansion, `-Σ_{k=1..terms} z^{-k} / Γ(β - αk)`.
pub fn mittag_leffler_asymptotic(p: &MlParams, z: Complex64, terms: usize) -> Result<Complex64> {
    p.validate()?;
    if z.norm() == 0.0 || in_growth_sector(p.alpha, z) {
        return Err(Error::Domain(format!(
            "asymptotic expansion needs |arg z| > {:.4} (alpha pi / 2), got arg z = {:.4}",
            p.alpha * PI / 2.0,
            z.arg()
        )));
    }
    let w = z.inv();
    with_asymptotic_coeffs(p.alpha, p.beta, terms, |c| {
        let mut pw = w;
        let mut s = Complex64::new(0.0, 0.0);
        for &ck in c.iter().skip(1) {
            s -= pw * ck;
            pw *= w;
        }
        Ok(s)
    })
}

/// The exponential term (1/α) z^{(1-β)/α} exp(z^{1/α}), zero outside |arg z| < απ.
pub fn mittag_leffler_exponential_term(alpha: f64, beta: f64, z: Complex64) -> Complex64 {
    if z.norm() == 0.0 || z.arg().abs() >= (alpha * PI).min(PI) {
        return Complex64::new(0.0, 0.0);
    }
    let lz = z.ln();
    ((1.0 - beta) / alpha * lz + (lz / alpha).exp()).exp() / alpha
}

fn in_growth_sector(alpha: f64, z: Complex64) -> bool {
    z.arg().abs() <= alpha * PI / 2.0
}

/// Smooth upper bound on ln |1/Γ(x)|.
fn ln_recip_gamma_envelope(x: f64) -> f64 {
    if x >= 0.5 {
        -ln_gamma_abs(x)
    } else {
        ln_gamma_abs(1.0 - x) - PI.ln()
    }
}

/// Asymptotic value with enough algebraic terms to push the next-term envelope
/// below `tol` relative; `None` when optimal truncation is reached first.
fn asymptotic_certified(p: &MlParams, z: Complex64) -> Option<(Complex64, usize)> {
    let w = z.inv();
    let lw = -z.norm().ln();
    let envelope = |k: usize| k as f64 * lw + ln_recip_gamma_envelope(p.beta - p.alpha * k as f64);
    let expo = mittag_leffler_exponential_term(p.alpha, p.beta, z);
    if !expo.norm().is_finite() {
        return None;
    }
    with_asymptotic_coeffs(p.alpha, p.beta, MAX_ASYMPTOTIC_TERMS, |c| {
        let mut s = expo;
        let mut pw = w;
        let mut prev_env = f64::INFINITY;
        for k in 1..MAX_ASYMPTOTIC_TERMS {
            s -= pw * c[k];
            pw *= w;
            if k < p.asymptotic_terms {
                continue;
            }
            let next = envelope(k + 1);
            let mag = s.norm();
            if mag > 0.0 && next <= p.tol.ln() + mag.ln() - 1.0 {
                return Some((s, k));
            }
            if next > prev_env {
                return None;
            }
            prev_env = next;
        }
        None
    })
}

thread_local! {
    static ASYMPTOTIC: RefCell<HashMap<(u64, u64), Vec<f64>>> = RefCell::new(HashMap::new());
}

/// Coefficients 1/Γ(β - αk), k = 0..n (index 0 unused).
fn with_asymptotic_coeffs<R>(alpha: f64, beta: f64, n: usize, f: impl FnOnce(&[f64]) -> R) -> R {
    ASYMPTOTIC.with(|cell| {
        let mut map = cell.borrow_mut();
        let list = map.entry((alpha.to_bits(), beta.to_bits())).or_default();
        while list.len() <= n {
            let k = list.len() as i64;
            list.push(recip_gamma_affine(-alpha, k, beta));
        }
        f(&list[..=n])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ml(alpha: f64, beta: f64, z: Complex64) -> Complex64 {
        mittag_leffler(&MlParams::new(alpha, beta).unwrap(), z).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn reduces_to_exponential_and_cosine() {
        assert!((ml(1.0, 1.0, c(1.0, 0.0)).re - std::f64::consts::E).abs() < 1e-15);
        assert!((ml(2.0, 1.0, c(-1.0, 0.0)).re - 1f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn erfc_identity_at_minus_one() {
        // E_{1/2,1}(-1) = e erfc(1)
        let v = ml(0.5, 1.0, c(-1.0, 0.0));
        assert!((v.re - 0.427_583_576_155_807).abs() < 1e-14);
    }

    #[test]
    fn value_at_zero_is_reciprocal_gamma() {
        for &(a, b) in &[(0.3, 0.3), (0.6, 1.0), (0.9, 2.5), (1.5, -0.5)] {
            assert_eq!(ml(a, b, c(0.0, 0.0)).re, recip_gamma(b));
        }
    }

    #[test]
    fn imaginary_ray_against_high_precision_oracle() {
        // reference values from a 400-digit series summation
        let cases = [
            (0.6, 1.0, 10.0, c(-0.001_756_636_712_418_675_2, -0.045_256_520_094_081_859)),
            (0.6, 0.6, 10.0, c(-0.002_736_242_998_279_347_3, 0.000_215_590_848_435_625_21)),
            (0.8, 1.0, 20.0, c(-0.000_673_329_906_164_230_26, -0.010_844_367_658_952_215)),
            (0.4, 1.0, 5.0, c(0.009_170_997_096_470_529_7, -0.135_670_634_968_909_3)),
            (0.95, 1.0, 30.0, c(-0.019_762_676_332_322_331, 0.049_000_827_622_978_098)),
            (0.6, 1.6, 10.0, c(0.004_525_652_009_408_187_2, -0.100_175_663_671_241_87)),
            (0.3, 1.0, 8.0, c(0.007_085_381_250_557_779_1, -0.096_083_942_896_539_143)),
            (0.3, 0.3, 8.0, c(-0.003_586_448_891_409_970_3, -0.000_534_444_365_939_223_92)),
        ];
        for (a, b, x, expect) in cases {
            let v = ml(a, b, c(0.0, -x));
            assert!(rel(v, expect) < 1e-12, "E_({a},{b})(-{x}i) = {v}, want {expect}");
        }
    }

    #[test]
    fn asymptotic_leading_term() {
        let p = MlParams::new(0.5, 1.0).unwrap();
        let z = c(0.0, -50.0);
        let one = mittag_leffler_asymptotic(&p, z, 1).unwrap();
        assert!(rel(one, c(0.0, -1.0 / (50.0 * PI.sqrt()))) < 1e-14);
        let full = mittag_leffler(&p, z).unwrap();
        assert!(rel(one, full) < 1e-2);
        assert!(rel(mittag_leffler_asymptotic(&p, z, 6).unwrap(), full) < 1e-6);
        // first coefficient of E_{1/2,1/2} sits on a pole of Γ
        let p = MlParams::new(0.5, 0.5).unwrap();
        assert_eq!(mittag_leffler_asymptotic(&p, z, 1).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn asymptotic_rejects_growth_sector() {
        let p = MlParams::new(0.6, 1.0).unwrap();
        assert!(matches!(
            mittag_leffler_asymptotic(&p, c(20.0, 1.0), 3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn two_terms_far_out() {
        let p = MlParams::new(0.6, 1.0).unwrap();
        for &x in &[1e3, 1e5] {
            let z = c(0.0, -x);
            let two = mittag_leffler_asymptotic(&p, z, 2).unwrap();
            let full = mittag_leffler(&p, z).unwrap();
            let bound = if x < 1e4 { 1e-6 } else { 1e-8 };
            assert!(rel(two, full) < bound, "|z| = {x}: {}", rel(two, full));
        }
    }

    #[test]
    fn regimes_agree_across_the_seam() {
        for &alpha in &[0.3, 0.5, 0.6, 0.8, 0.95] {
            for &beta in &[1.0, alpha] {
                let p = MlParams::new(alpha, beta).unwrap();
                let mut x = 8.0f64;
                // the series oracle is out of reach once |z|^{1/alpha} is huge
                while x <= 32.0 && x.powf(1.0 / alpha) < 1000.0 {
                    let z = c(0.0, -x);
                    let (v, _) = mittag_leffler_with_regime(&p, z).unwrap();
                    let (s, _) = mittag_leffler_series(&p, z).unwrap();
                    assert!(rel(v, s) <= 10.0 * p.tol, "alpha={alpha} beta={beta} x={x}");
                    x *= 1.25;
                }
            }
        }
    }

    #[test]
    fn growth_sector_uses_series() {
        let p = MlParams::new(2.0, 1.0).unwrap();
        let (v, r) = mittag_leffler_with_regime(&p, c(-25.0, 0.0)).unwrap();
        assert!(matches!(r, Regime::Series(_)));
        assert!((v.re - 5f64.cos()).abs() < 1e-13);
    }
}
