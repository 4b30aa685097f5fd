//! Power series Σ c_k z^k with exact-rounded coefficients and a working
//! precision chosen from the size of the largest term.
//!
//! Three accumulators are tried in order: plain `f64`, double-double and
//! MPFR floats. Each is accepted only when its rounding floor
//! `max_k |c_k z^k| · 2^-bits` is below the requested relative tolerance of the
//! computed sum. Coefficients are produced by MPFR once per series and cached
//! per thread.

use std::cell::RefCell;
use std::collections::HashMap;

use num_complex::Complex64;
use rug::Float;

use super::gamma::ln_gamma_abs;
use crate::error::{Error, Result};

/// Precision (bits) used to derive the double-double coefficients.
const DD_SOURCE_BITS: u32 = 192;
/// Hard limit on the MPFR working precision.
pub(crate) const MAX_BITS: u32 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum SeriesKind {
    /// c_k = 1 / Γ(αk + β)
    MittagLeffler { alpha: u64, beta: u64 },
    /// c_k = (-1)^k / (k! Γ(1 - ν - νk)), evaluated at z = x
    Mainardi { nu: u64 },
}

impl SeriesKind {
    pub(crate) fn mittag_leffler(alpha: f64, beta: f64) -> Self {
        SeriesKind::MittagLeffler {
            alpha: alpha.to_bits(),
            beta: beta.to_bits(),
        }
    }

    pub(crate) fn mainardi(nu: f64) -> Self {
        SeriesKind::Mainardi { nu: nu.to_bits() }
    }

    /// Smooth upper bound on ln |c_k|. Near the poles of Γ the factor
    /// |sin(πx)| of the reflection formula is replaced by one.
    fn ln_coeff_bound(&self, k: usize) -> f64 {
        match *self {
            SeriesKind::MittagLeffler { alpha, beta } => {
                let x = f64::from_bits(alpha) * k as f64 + f64::from_bits(beta);
                ln_recip_gamma_bound(x)
            }
            SeriesKind::Mainardi { nu } => {
                let nu = f64::from_bits(nu);
                let x = 1.0 - nu - nu * k as f64;
                -ln_gamma_abs(k as f64 + 1.0) + ln_recip_gamma_bound(x)
            }
        }
    }

    fn coeff_big(&self, k: usize, prec: u32) -> Float {
        // enough headroom for exact αk + β with k < 2^32
        let arg_prec = prec.max(160);
        match *self {
            SeriesKind::MittagLeffler { alpha, beta } => {
                let mut x = Float::with_val(arg_prec, f64::from_bits(alpha));
                x *= k as u32;
                x += f64::from_bits(beta);
                recip_gamma_big(x, prec)
            }
            SeriesKind::Mainardi { nu } => {
                let nu = f64::from_bits(nu);
                let mut x = Float::with_val(arg_prec, -nu);
                x *= k as u32 + 1;
                x += 1.0;
                let mut r = recip_gamma_big(x, prec);
                let fact = Float::with_val(prec, Float::factorial(k as u32));
                r /= &fact;
                if k % 2 == 1 {
                    r = -r;
                }
                r
            }
        }
    }
}

fn ln_recip_gamma_bound(x: f64) -> f64 {
    if x >= 0.5 {
        -ln_gamma_abs(x)
    } else {
        ln_gamma_abs(1.0 - x) - std::f64::consts::PI.ln()
    }
}

/// 1/Γ(a k + b) correctly rounded, with a k + b formed exactly.
pub(crate) fn recip_gamma_affine(a: f64, k: i64, b: f64) -> f64 {
    let mut x = Float::with_val(256, a);
    x *= k;
    x += b;
    recip_gamma_big(x, 96).to_f64()
}

fn recip_gamma_big(x: Float, prec: u32) -> Float {
    if x.is_zero() || (x.is_sign_negative() && x.is_integer()) {
        return Float::with_val(prec, 0);
    }
    let g = Float::with_val(prec, x.gamma_ref());
    g.recip()
}

/// Double-double number `hi + lo` with |lo| <= ulp(hi)/2.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    /// Mantissa in [0.5, 1) and binary exponent, so that tiny coefficients
    /// survive until they are rescaled.
    fn from_big_split(x: &Float) -> (Dd, i32) {
        match x.get_exp() {
            Some(e) => {
                let m = Float::with_val(x.prec(), x >> e);
                (Dd::from_big(&m), e)
            }
            None => (Dd::default(), 0),
        }
    }

    fn from_big(x: &Float) -> Dd {
        let hi = x.to_f64();
        if !hi.is_finite() || hi == 0.0 {
            return Dd { hi, lo: 0.0 };
        }
        let rest = Float::with_val(x.prec(), x - hi);
        Dd {
            hi,
            lo: rest.to_f64(),
        }
    }

    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn ldexp(self, e: i32) -> Dd {
        Dd {
            hi: ldexp(self.hi, e),
            lo: ldexp(self.lo, e),
        }
    }
}

fn ldexp(x: f64, e: i32) -> f64 {
    // two steps keep each factor a normal power of two
    let h = e / 2;
    x * 2f64.powi(h) * 2f64.powi(e - h)
}

#[derive(Default)]
struct CoeffCache {
    dd: Vec<(Dd, i32)>,
    big: HashMap<u32, Vec<Float>>,
}

thread_local! {
    static CACHE: RefCell<HashMap<SeriesKind, CoeffCache>> = RefCell::new(HashMap::new());
}

/// Coefficients c_k 2^{k r} in double-double. Scaling by a power of two keeps
/// the products exact while preventing 1/Γ from underflowing.
fn with_dd_coeffs<R>(kind: SeriesKind, n: usize, r: i32, f: impl FnOnce(&[Dd]) -> R) -> R {
    let scaled: Vec<Dd> = CACHE.with(|cell| {
        let mut map = cell.borrow_mut();
        let entry = map.entry(kind).or_default();
        while entry.dd.len() < n {
            let k = entry.dd.len();
            let c = kind.coeff_big(k, DD_SOURCE_BITS);
            entry.dd.push(Dd::from_big_split(&c));
        }
        entry.dd[..n]
            .iter()
            .enumerate()
            .map(|(k, &(m, e))| m.ldexp((e as i64 + k as i64 * r as i64).clamp(-2000, 2000) as i32))
            .collect()
    });
    f(&scaled)
}

/// Exponent r with 2^r <= |z| < 2^{r+1}; `z / 2^r` is exact.
fn scale_exponent(zabs: f64) -> i32 {
    zabs.log2().floor() as i32
}

fn with_big_coeffs<R>(kind: SeriesKind, n: usize, prec: u32, f: impl FnOnce(&[Float]) -> R) -> R {
    CACHE.with(|cell| {
        let mut map = cell.borrow_mut();
        let entry = map.entry(kind).or_default();
        let list = entry.big.entry(prec).or_default();
        while list.len() < n {
            let k = list.len();
            list.push(kind.coeff_big(k, prec));
        }
        f(&list[..n])
    })
}

/// Magnitude profile of the terms |c_k z^k| in natural-log units.
#[derive(Clone, Debug)]
pub(crate) struct TermProfile {
    /// ln max_k |c_k z^k|
    pub ln_max: f64,
    k_peak: usize,
    /// ln |c_k z^k| for k = 0.. up to the point where terms are negligible at
    /// the highest precision considered
    ln_terms: Vec<f64>,
    drop_bits: u32,
}

impl TermProfile {
    pub(crate) fn scan(kind: SeriesKind, zabs: f64, max_drop_bits: u32) -> TermProfile {
        let lz = zabs.ln();
        let mut ln_terms = Vec::new();
        let mut ln_max = f64::NEG_INFINITY;
        let mut k_peak = 0;
        let drop = max_drop_bits as f64 * std::f64::consts::LN_2 + 30.0;
        let mut k = 0usize;
        loop {
            let lt = k as f64 * lz + kind.ln_coeff_bound(k);
            ln_terms.push(lt);
            if lt > ln_max {
                ln_max = lt;
                k_peak = k;
            }
            // past the peak the log-terms are concave, so the first one below the
            // floor ends the series
            if k > k_peak + 2 && lt < ln_max - drop {
                break;
            }
            k += 1;
            if k > 4_000_000 {
                break;
            }
        }
        TermProfile {
            ln_max,
            k_peak,
            ln_terms,
            drop_bits: max_drop_bits,
        }
    }

    /// Number of terms needed so the tail lies below the rounding floor of a
    /// `bits`-bit accumulator.
    fn terms_for(&self, bits: u32) -> usize {
        let floor = self.ln_max - bits as f64 * std::f64::consts::LN_2 - 8.0;
        let mut n = self.ln_terms.len();
        for (k, &lt) in self.ln_terms.iter().enumerate().skip(self.k_peak + 1) {
            if lt < floor {
                n = k + 1;
                break;
            }
        }
        n
    }

    /// ln of the estimated absolute rounding error of a `bits`-bit sum.
    fn ln_error(&self, bits: u32, n: usize) -> f64 {
        self.ln_max + ((n as f64).sqrt() * 4.0 + 4.0).ln() - bits as f64 * std::f64::consts::LN_2
    }
}

/// Which accumulator produced a series value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesPrecision {
    Double,
    DoubleDouble,
    Extended { bits: u32 },
}

fn accepted(ln_err: f64, value: Complex64, tol: f64) -> bool {
    let mag = value.norm();
    mag.is_finite() && mag > 0.0 && ln_err <= tol.ln() + mag.ln()
}

fn horner_f64(coeffs: &[Dd], z: Complex64) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        s = s * z + c.hi;
    }
    s
}

fn horner_dd(coeffs: &[Dd], z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let mut sr = Dd::default();
    let mut si = Dd::default();
    if y == 0.0 {
        for c in coeffs.iter().rev() {
            sr = sr.mul_f64(x).add(*c);
        }
        return Complex64::new(sr.to_f64(), 0.0);
    }
    for c in coeffs.iter().rev() {
        let nr = sr.mul_f64(x).add(si.mul_f64(y).neg()).add(*c);
        let ni = sr.mul_f64(y).add(si.mul_f64(x));
        sr = nr;
        si = ni;
    }
    Complex64::new(sr.to_f64(), si.to_f64())
}

fn horner_big(coeffs: &[Float], z: Complex64, prec: u32) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let mut sr = Float::with_val(prec, 0);
    if y == 0.0 {
        for c in coeffs.iter().rev() {
            sr *= x;
            sr += c;
        }
        return Complex64::new(sr.to_f64(), 0.0);
    }
    let mut si = Float::with_val(prec, 0);
    for c in coeffs.iter().rev() {
        let mut nr = Float::with_val(prec, &sr * x);
        nr -= Float::with_val(prec, &si * y);
        nr += c;
        let mut ni = Float::with_val(prec, &sr * y);
        ni += Float::with_val(prec, &si * x);
        sr = nr;
        si = ni;
    }
    Complex64::new(sr.to_f64(), si.to_f64())
}

/// Evaluate the series at `z` to relative tolerance `tol`, escalating the
/// working precision as needed.
pub(crate) fn eval(kind: SeriesKind, z: Complex64, tol: f64) -> Result<(Complex64, SeriesPrecision)> {
    let zabs = z.norm();
    if zabs == 0.0 {
        return with_dd_coeffs(kind, 1, 0, |c| Ok((Complex64::new(c[0].to_f64(), 0.0), SeriesPrecision::Double)));
    }
    let profile = TermProfile::scan(kind, zabs, 120);
    eval_with_profile(kind, z, tol, profile)
}

/// Power-of-two scale for the f64 and double-double paths, or `None` when the
/// scaled coefficients term_k / w^k would leave the normal range.
fn dd_scaling(profile: &TermProfile, z: Complex64) -> Option<i32> {
    if profile.ln_max >= 700.0 {
        return None;
    }
    let r = scale_exponent(z.norm());
    let lw = (z.norm() * ldexp(1.0, -r)).ln();
    let n = profile.terms_for(106).min(profile.ln_terms.len());
    profile.ln_terms[..n]
        .iter()
        .enumerate()
        .all(|(k, &lt)| lt - k as f64 * lw > -650.0)
        .then_some(r)
}

fn eval_with_profile(
    kind: SeriesKind,
    z: Complex64,
    tol: f64,
    mut profile: TermProfile,
) -> Result<(Complex64, SeriesPrecision)> {
    if let Some(r) = dd_scaling(&profile, z) {
        let w = z * ldexp(1.0, -r);
        let n = profile.terms_for(53);
        let v = with_dd_coeffs(kind, n, r, |c| horner_f64(c, w));
        if accepted(profile.ln_error(53, n), v, tol) {
            return Ok((v, SeriesPrecision::Double));
        }
        let n = profile.terms_for(106);
        let v = with_dd_coeffs(kind, n, r, |c| horner_dd(c, w));
        if accepted(profile.ln_error(104, n), v, tol) {
            return Ok((v, SeriesPrecision::DoubleDouble));
        }
    }

    // extended precision; the first guess assumes the result is O(1)
    let mut guess_ln = 0.0f64;
    loop {
        let need = (profile.ln_max - guess_ln - tol.ln()) / std::f64::consts::LN_2 + 40.0;
        let bits = ((need.max(128.0) as u32).div_ceil(64)) * 64;
        if bits > MAX_BITS {
            return Err(Error::PrecisionCap {
                what: "power series",
                bits: MAX_BITS,
            });
        }
        if bits + 16 > profile.drop_bits {
            profile = TermProfile::scan(kind, z.norm(), bits + 64);
        }
        let n = profile.terms_for(bits);
        let v = with_big_coeffs(kind, n, bits, |c| horner_big(c, z, bits));
        if !v.norm().is_finite() {
            return Err(Error::Domain("series value not representable as f64".into()));
        }
        if accepted(profile.ln_error(bits - 8, n), v, tol) {
            return Ok((v, SeriesPrecision::Extended { bits }));
        }
        let mag = v.norm();
        let new_guess = if mag > 0.0 && mag.is_finite() {
            mag.ln() - 10.0
        } else {
            guess_ln - 64.0
        };
        guess_ln = new_guess.min(guess_ln - 32.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_series_all_paths() {
        let kind = SeriesKind::mittag_leffler(1.0, 1.0);
        for &(re, im) in &[(0.3, 0.1), (2.0, -1.0), (-7.0, 0.0), (0.0, -9.5)] {
            let z = Complex64::new(re, im);
            let (v, _) = eval(kind, z, 1e-15).unwrap();
            let e = z.exp();
            assert!((v - e).norm() <= 1e-14 * e.norm().max(1.0), "{z}: {v} vs {e}");
        }
    }

    #[test]
    fn precision_escalates_with_cancellation() {
        let kind = SeriesKind::mittag_leffler(1.0, 1.0);
        let (_, p) = eval(kind, Complex64::new(0.5, 0.0), 1e-14).unwrap();
        assert_eq!(p, SeriesPrecision::Double);
        // e^{-40}: cancellation of e^{80}
        let (v, p) = eval(kind, Complex64::new(-40.0, 0.0), 1e-14).unwrap();
        assert!(matches!(p, SeriesPrecision::Extended { .. }));
        assert!((v.re / (-40.0f64).exp() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn double_double_arithmetic() {
        let a = Dd { hi: 1.0, lo: 1e-20 };
        let b = a.mul_f64(3.0).add(Dd { hi: -3.0, lo: 0.0 });
        assert!((b.to_f64() - 3e-20).abs() < 1e-34);
    }

    #[test]
    fn mainardi_half_closed_form() {
        let kind = SeriesKind::mainardi(0.5);
        for &x in &[0.0, 1.0, 3.0, 8.0] {
            let (v, _) = eval(kind, Complex64::new(x, 0.0), 1e-14).unwrap();
            let expect = (-x * x / 4.0f64).exp() / std::f64::consts::PI.sqrt();
            assert!((v.re / expect - 1.0).abs() < 1e-12, "x={x}");
        }
    }
}
