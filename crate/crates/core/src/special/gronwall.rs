//! The majorant series 𝔼_{β,γ}(t) = Σ c_m t^{mν}, c_0 = 1,
//! c_{m+1} / c_m = Γ(mν + γ) / Γ(mν + γ + β), ν = β + γ - 1.

use super::gamma::ln_gamma_abs;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GronwallParams {
    pub beta: f64,
    pub gamma: f64,
    pub b: f64,
}

impl GronwallParams {
    pub fn new(beta: f64, gamma: f64, b: f64) -> Result<Self> {
        if !(beta > 0.0 && gamma > 0.0 && beta + gamma > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need beta > 0, gamma > 0, beta + gamma > 1 (got {beta}, {gamma})"
            )));
        }
        if !(b >= 0.0) {
            return Err(Error::InvalidParameter(format!("b = {b} must be >= 0")));
        }
        Ok(GronwallParams { beta, gamma, b })
    }

    pub fn nu(&self) -> f64 {
        self.beta + self.gamma - 1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GronwallValue {
    pub value: f64,
    /// the partial sums left the f64 range; `value` is +inf
    pub overflow: bool,
    pub terms: usize,
}

/// 𝔼_{β,γ}((b Γ(β))^{1/ν} t).
pub fn gronwall_series(g: &GronwallParams, t: f64) -> Result<GronwallValue> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t = {t} must be >= 0")));
    }
    let nu = g.nu();
    let scale = (g.b * super::gamma::gamma_real(g.beta)?).powf(1.0 / nu);
    let tau = scale * t;
    if tau == 0.0 {
        return Ok(GronwallValue { value: 1.0, overflow: false, terms: 1 });
    }
    let ln_x = nu * tau.ln();
    let mut ln_c = 0.0;
    let mut sum = 1.0f64;
    let mut m = 0usize;
    loop {
        let mf = m as f64;
        ln_c += ln_gamma_abs(mf * nu + g.gamma) - ln_gamma_abs(mf * nu + g.gamma + g.beta);
        m += 1;
        let ln_term = ln_c + m as f64 * ln_x;
        if ln_term > 709.0 || !sum.is_finite() {
            return Ok(GronwallValue { value: f64::INFINITY, overflow: true, terms: m });
        }
        let term = ln_term.exp();
        sum += term;
        // coefficients decay super-geometrically, so once terms fall they keep falling
        if term < 1e-14 * sum && m > 2 {
            let next = ln_term + ln_gamma_abs(mf * nu + nu + g.gamma)
                - ln_gamma_abs(mf * nu + nu + g.gamma + g.beta)
                + ln_x;
            if next < ln_term {
                break;
            }
        }
    }
    Ok(GronwallValue { value: sum, overflow: false, terms: m + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_case() {
        let g = GronwallParams::new(1.0, 1.0, 1.0).unwrap();
        let v = gronwall_series(&g, 1.0).unwrap();
        assert!((v.value - std::f64::consts::E).abs() < 1e-13);
        assert_eq!(gronwall_series(&g, 0.0).unwrap().value, 1.0);
    }

    #[test]
    fn fractional_case_matches_direct_sum() {
        // 500-term direct summation at 50 digits
        let g = GronwallParams::new(0.6, 0.8, 1.0).unwrap();
        let v = gronwall_series(&g, 2.0).unwrap();
        assert!((v.value / 133.735_587_631_727_57 - 1.0).abs() < 1e-12, "{}", v.value);
    }

    #[test]
    fn monotone_and_at_least_one() {
        let g = GronwallParams::new(0.7, 0.5, 2.0).unwrap();
        let mut prev = 1.0;
        for i in 0..50 {
            let v = gronwall_series(&g, 0.2 * i as f64).unwrap().value;
            assert!(v >= prev && v >= 1.0);
            prev = v;
        }
    }

    #[test]
    fn overflow_flag() {
        let g = GronwallParams::new(1.0, 1.0, 1.0).unwrap();
        let v = gronwall_series(&g, 1e4).unwrap();
        assert!(v.overflow && v.value.is_infinite());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(GronwallParams::new(0.3, 0.5, 1.0).is_err());
        assert!(GronwallParams::new(1.0, 1.0, -1.0).is_err());
    }
}
