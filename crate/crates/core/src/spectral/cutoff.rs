//! Smooth frequency cutoffs χ_t(ξ) = χ₁(t^σ |ξ| / M).

use crate::error::{Error, Result};

/// Cutoff scale M > 0 and exponent σ = α / (2β).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffSpec {
    pub m: f64,
    pub sigma: f64,
}

impl CutoffSpec {
    pub fn new(m: f64, sigma: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter(format!("cutoff scale M = {m} must be positive")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("cutoff exponent {sigma} must be positive")));
        }
        Ok(CutoffSpec { m, sigma })
    }

    /// The frequency |ξ| at which χ_t stops being 1, i.e. M t^{-σ}.
    pub fn inner_radius(&self, t: f64) -> f64 {
        self.m * t.powf(-self.sigma)
    }
}

fn phi(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / (x * x)).exp()
    } else {
        0.0
    }
}

/// Smooth step: 1 on [0, 1], 0 on [2, ∞), C^∞ in between.
pub fn chi1(r: f64) -> f64 {
    if r <= 1.0 {
        return 1.0;
    }
    if r >= 2.0 {
        return 0.0;
    }
    let a = phi(2.0 - r);
    let b = phi(r - 1.0);
    a / (a + b)
}

/// 1 - χ₁, with exact plateaus.
pub fn chi1_complement(r: f64) -> f64 {
    if r <= 1.0 {
        return 0.0;
    }
    if r >= 2.0 {
        return 1.0;
    }
    let a = phi(2.0 - r);
    let b = phi(r - 1.0);
    b / (a + b)
}

/// ξ ↦ χ_t(ξ), or χ_t^c(ξ) when `complement` is set.
pub fn cutoff_symbol(c: CutoffSpec, t: f64, complement: bool) -> impl Fn(f64) -> f64 {
    let scale = t.powf(c.sigma) / c.m;
    move |xi| {
        let r = scale * xi.abs();
        if complement {
            chi1_complement(r)
        } else {
            chi1(r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateaus_are_exact() {
        for i in 0..=100 {
            let r = i as f64 / 100.0;
            assert_eq!(chi1(r), 1.0);
            assert_eq!(chi1_complement(r), 0.0);
            assert_eq!(chi1(2.0 + r), 0.0);
            assert_eq!(chi1_complement(2.0 + r), 1.0);
        }
    }

    #[test]
    fn partition_of_unity_and_monotone() {
        let mut prev = 1.0;
        for i in 0..=1000 {
            let r = 1.0 + i as f64 / 1000.0;
            let v = chi1(r);
            assert!((v + chi1_complement(r) - 1.0).abs() < 1e-15);
            assert!(v <= prev + 1e-16);
            prev = v;
        }
        assert!((chi1(1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn scaling_in_time() {
        let c = CutoffSpec::new(2.0, 0.5).unwrap();
        let chi = cutoff_symbol(c, 4.0, false);
        // t^σ = 2, so |ξ| <= 1 is the plateau and |ξ| >= 2 is zero
        assert_eq!(chi(1.0), 1.0);
        assert_eq!(chi(-2.0), 0.0);
        assert!(chi(1.5) > 0.0 && chi(1.5) < 1.0);
        assert_eq!(c.inner_radius(4.0), 1.0);
        assert!(CutoffSpec::new(0.0, 1.0).is_err());
    }
}
