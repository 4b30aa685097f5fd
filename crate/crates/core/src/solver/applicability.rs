//! Hypothesis checks for the local, global and energy-class well-posedness
//! results, one verdict per result with the failing clauses named.

use std::fmt;

use super::NonlinearitySpec;
use crate::evolution::FracParams;

/// Exponents of the solution class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassExponents {
    pub s: f64,
    pub q: f64,
    pub r: f64,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremVerdict {
    pub id: &'static str,
    pub summary: &'static str,
    pub failing: Vec<String>,
}

impl TheoremVerdict {
    pub fn admissible(&self) -> bool {
        self.failing.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApplicabilityReport {
    pub exponents: ClassExponents,
    pub theorems: Vec<TheoremVerdict>,
}

impl ApplicabilityReport {
    pub fn get(&self, id: &str) -> Option<&TheoremVerdict> {
        self.theorems.iter().find(|t| t.id == id)
    }

    pub fn any_admissible(&self) -> bool {
        self.theorems.iter().any(|t| t.admissible())
    }
}

impl fmt::Display for ApplicabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.exponents;
        writeln!(f, "class exponents: s = {}, q = {}, r = {}, gamma = {}", e.s, e.q, e.r, e.gamma)?;
        for t in &self.theorems {
            if t.admissible() {
                writeln!(f, "{}  admissible  ({})", t.id, t.summary)?;
            } else {
                writeln!(f, "{}  rejected    ({})", t.id, t.summary)?;
                for c in &t.failing {
                    writeln!(f, "      fails: {c}")?;
                }
            }
        }
        Ok(())
    }
}

struct Clauses(Vec<String>);

impl Clauses {
    fn check(&mut self, ok: bool, text: impl FnOnce() -> String) {
        if !ok {
            self.0.push(text());
        }
    }
}

fn recip(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        1.0 / x
    }
}

/// Evaluate every hypothesis inequality for the given equation, nonlinearity
/// and class exponents.
pub fn applicability_report(
    fp: &FracParams,
    spec: &NonlinearitySpec,
    s: f64,
    q: f64,
    r: f64,
    gamma: f64,
) -> ApplicabilityReport {
    let (a, b, p) = (fp.alpha, fp.beta, spec.p);
    let n = fp.dim as f64;
    let sig = fp.sigma();
    let snq = sig * n * recip(q);
    let snr = sig * n * recip(r);

    let common = |c: &mut Clauses| {
        c.check(a > 0.0 && a < 1.0, || format!("0 < alpha < 1 (alpha = {a})"));
        c.check(b > n / 2.0, || format!("beta > n/2 (beta = {b}, n = {n})"));
        c.check(s >= 0.0, || format!("s >= 0 (s = {s})"));
    };
    let r_range = |c: &mut Clauses| {
        c.check(r >= 1.0, || format!("1 <= r <= inf (r = {r})"));
    };
    let q_range = |c: &mut Clauses| {
        c.check(q >= 1.0, || format!("1 <= q <= inf (q = {q})"));
    };
    let p_finite = |c: &mut Clauses| {
        c.check(p >= 2.0 && p.is_finite(), || format!("2 <= p < inf (p = {p})"));
    };
    let p_large = |c: &mut Clauses| {
        let lo = (1.0 / (1.0 - a)).max(2.0);
        c.check(p > lo && p.is_finite(), || {
            format!("max(1/(1-alpha), 2) < p < inf (p = {p}, bound = {lo:.6})")
        });
    };
    let energy_p = |c: &mut Clauses| {
        if b < n {
            let cap = 2.0 * n / (n - b);
            c.check(p >= 2.0 && p <= cap, || format!("2 <= p <= 2n/(n-beta) = {cap:.6} (p = {p})"));
        } else {
            p_finite(c);
        }
    };
    let hyps = |c: &mut Clauses| {
        c.check(p >= 1.0, || format!("F is C^1 with |F'(z)| <~ |z|^(p-1) (p = {p})"));
        c.check(spec.mu <= 0.0, || {
            format!("a nonnegative energy density G exists (defocusing, mu = {} > 0)", spec.mu)
        });
    };

    let mut theorems = Vec::new();

    let mut c = Clauses(Vec::new());
    common(&mut c);
    p_finite(&mut c);
    q_range(&mut c);
    r_range(&mut c);
    let top = a / (p - 1.0);
    c.check(snq < top, || format!("sigma n/q < alpha/(p-1) ({snq:.6} vs {top:.6})"));
    c.check(gamma > snq && gamma < top, || {
        format!("gamma in (sigma n/q, alpha/(p-1)) = ({snq:.6}, {top:.6}) (gamma = {gamma})")
    });
    theorems.push(TheoremVerdict {
        id: "T1.1",
        summary: "local existence with L^q data and t^gamma-weighted L^inf control",
        failing: c.0,
    });

    let mut c = Clauses(Vec::new());
    common(&mut c);
    p_finite(&mut c);
    r_range(&mut c);
    c.check(s < 2.0 * b / a, || format!("s < 2 beta/alpha (s = {s}, bound = {:.6})", 2.0 * b / a));
    let top2 = (a / (p - 1.0)).min((1.0 - sig * s) / (p - 1.0)).min(1.0 / p);
    c.check(snr < top2, || {
        format!("sigma n/r < min(alpha/(p-1), (1 - sigma s)/(p-1), 1/p) ({snr:.6} vs {top2:.6})")
    });
    c.check(gamma > snr && gamma < top2, || {
        format!("gamma in (sigma n/r, {top2:.6}) (gamma = {gamma}, lower = {snr:.6})")
    });
    theorems.push(TheoremVerdict {
        id: "T1.2",
        summary: "local existence in H^{s,r}",
        failing: c.0,
    });

    let mut c = Clauses(Vec::new());
    common(&mut c);
    p_large(&mut c);
    r_range(&mut c);
    theorems.push(TheoremVerdict {
        id: "T1.3",
        summary: "global existence for small data",
        failing: c.0,
    });

    let mut c = Clauses(Vec::new());
    common(&mut c);
    p_large(&mut c);
    let cap = 2.0 * b / a - 2.0 * b;
    c.check(s < cap, || format!("s < 2 beta/alpha - 2 beta (s = {s}, bound = {cap:.6})"));
    theorems.push(TheoremVerdict {
        id: "T1.4",
        summary: "global existence for small data in H^{s,r}",
        failing: c.0,
    });

    let mut c = Clauses(Vec::new());
    common(&mut c);
    q_range(&mut c);
    energy_p(&mut c);
    hyps(&mut c);
    c.check(snq < top, || format!("sigma n/q < alpha/(p-1) ({snq:.6} vs {top:.6})"));
    c.check(gamma > snq && gamma < top, || {
        format!("gamma in (sigma n/q, alpha/(p-1)) = ({snq:.6}, {top:.6}) (gamma = {gamma})")
    });
    theorems.push(TheoremVerdict {
        id: "T1.5",
        summary: "global existence in the energy class",
        failing: c.0,
    });

    let mut c = Clauses(Vec::new());
    common(&mut c);
    r_range(&mut c);
    energy_p(&mut c);
    hyps(&mut c);
    c.check(s < 2.0 * b, || format!("s < 2 beta (s = {s})"));
    let top6 = ((a - sig * s) / (p - 1.0)).min(1.0 / p);
    c.check(snr < top6, || {
        format!("sigma n/r < min((alpha - sigma s)/(p-1), 1/p) ({snr:.6} vs {top6:.6})")
    });
    c.check(gamma > snr && gamma < top6, || {
        format!("gamma in (sigma n/r, {top6:.6}) (gamma = {gamma}, lower = {snr:.6})")
    });
    theorems.push(TheoremVerdict {
        id: "T1.6",
        summary: "global existence in the energy class with H^{s,r} control",
        failing: c.0,
    });

    ApplicabilityReport {
        exponents: ClassExponents { s, q, r, gamma },
        theorems,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn borderline_q_fails_strict_inequality() {
        let fp = FracParams::new(0.6, 1.0, 1, 1.0).unwrap();
        let spec = NonlinearitySpec::new(3.0, -1.0).unwrap();
        let rep = applicability_report(&fp, &spec, 0.0, 1.0, 2.0, 0.2);
        let t = rep.get("T1.1").unwrap();
        assert!(!t.admissible());
        assert!(t.failing.iter().any(|c| c.starts_with("sigma n/q < alpha/(p-1)")));
        let rep = applicability_report(&fp, &spec, 0.0, 2.0, 2.0, 0.2);
        assert!(rep.get("T1.1").unwrap().admissible());
        let rep = applicability_report(&fp, &spec, 0.0, 2.0, 2.0, 0.1);
        assert!(!rep.get("T1.1").unwrap().admissible());
    }

    #[test]
    fn small_data_global_needs_large_p() {
        let fp = FracParams::new(0.4, 1.0, 1, 1.0).unwrap();
        let spec = NonlinearitySpec::new(2.0, -1.0).unwrap();
        let rep = applicability_report(&fp, &spec, 0.0, 2.0, 2.0, 0.2);
        assert!(!rep.get("T1.3").unwrap().admissible());
        let spec = NonlinearitySpec::new(2.5, -1.0).unwrap();
        let rep = applicability_report(&fp, &spec, 0.0, 2.0, 2.0, 0.2);
        assert!(rep.get("T1.3").unwrap().admissible());
        assert!(format!("{rep}").contains("T1.3  admissible"));
    }

    #[test]
    fn focusing_fails_energy_results() {
        let fp = FracParams::new(0.6, 1.0, 1, 1.0).unwrap();
        let spec = NonlinearitySpec::new(3.0, 1.0).unwrap();
        let rep = applicability_report(&fp, &spec, 0.0, 2.0, 2.0, 0.2);
        assert!(!rep.get("T1.5").unwrap().admissible());
    }
}
