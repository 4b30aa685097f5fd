use num_complex::Complex64;
use proptest::prelude::*;

use fracdisp::evolution::{apply_S, FracParams};
use fracdisp::solver::NonlinearitySpec;
use fracdisp::spectral::{apply_multiplier, bessel_symbol, chi1, chi1_complement, inverse, transform, Field, SpectralGrid};

fn grid() -> SpectralGrid {
    SpectralGrid::new(1, 40.0, 256).unwrap()
}

/// A smooth, well-resolved field: sum of shifted Gaussians with complex weights.
fn field(bumps: &[(f64, f64, f64, f64)]) -> Field {
    Field::from_fn(grid(), |x| {
        bumps
            .iter()
            .map(|&(c, w, re, im)| Complex64::new(re, im) * (-((x[0] - c) / w).powi(2)).exp())
            .sum()
    })
}

fn bumps() -> impl Strategy<Value = Vec<(f64, f64, f64, f64)>> {
    prop::collection::vec((-8.0..8.0f64, 0.7..3.0f64, -1.0..1.0f64, -1.0..1.0f64), 1..4)
}

fn l2(f: &Field) -> f64 {
    f.l2_sum().sqrt()
}

fn max_gap(a: &Field, b: &Field) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval_and_round_trip(b in bumps()) {
        let u = field(&b);
        let uh = transform(&u).unwrap();
        prop_assert!((l2(&uh) - l2(&u)).abs() <= 1e-12 * l2(&u).max(1e-300));
        let back = inverse(&uh).unwrap();
        prop_assert!(max_gap(&back, &u) <= 1e-12);
    }

    #[test]
    fn multipliers_compose(b in bumps(), s1 in -2.0..2.0f64, s2 in -2.0..2.0f64) {
        let u = field(&b);
        let two_steps = apply_multiplier(&apply_multiplier(&u, bessel_symbol(s1)).unwrap(), bessel_symbol(s2)).unwrap();
        let one_step = apply_multiplier(&u, bessel_symbol(s1 + s2)).unwrap();
        prop_assert!(max_gap(&two_steps, &one_step) <= 1e-9 * (1.0 + l2(&one_step)));
    }

    #[test]
    fn radial_evolution_keeps_even_data_even(w in 0.7..3.0f64, a in -1.0..1.0f64, alpha in 0.3..0.95f64, t in 0.05..5.0f64) {
        // centred data on a symmetric grid: u(x_j) = u(-x_j) pairs j with N - j
        let u = field(&[(0.0, w, a, 0.5)]);
        let fp = FracParams::new(alpha, 1.0, 1, 1.0).unwrap();
        let v = apply_S(&fp, t, &u).unwrap();
        let n = v.values.len();
        let asym = (1..n).map(|j| (v.values[j] - v.values[n - j]).norm()).fold(0.0, f64::max);
        prop_assert!(asym <= 1e-12 * (1.0 + l2(&v)));
    }

    #[test]
    fn classical_evolution_is_unitary(b in bumps(), beta in 0.6..2.0f64, t in 0.0..10.0f64) {
        let u = field(&b);
        let fp = FracParams::classical(beta, 1, 1.0).unwrap();
        let v = apply_S(&fp, t, &u).unwrap();
        prop_assert!((l2(&v) - l2(&u)).abs() <= 1e-11 * l2(&u));
    }

    #[test]
    fn cutoff_partition_of_unity(r in 0.0..4.0f64) {
        let (a, b) = (chi1(r), chi1_complement(r));
        prop_assert!((a + b - 1.0).abs() <= 1e-15);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(chi1(r + 1e-3) <= a);
    }

    #[test]
    fn nonlinearity_is_locally_lipschitz(
        p in 1.0..5.0f64, mu in -2.0..2.0f64,
        ur in -2.0..2.0f64, ui in -2.0..2.0f64, vr in -2.0..2.0f64, vi in -2.0..2.0f64,
    ) {
        let spec = NonlinearitySpec::new(p, mu).unwrap();
        let (u, v) = (Complex64::new(ur, ui), Complex64::new(vr, vi));
        let bound = p * mu.abs() * u.norm().max(v.norm()).powf(p - 1.0) * (u - v).norm();
        prop_assert!((spec.eval(u) - spec.eval(v)).norm() <= bound * (1.0 + 1e-12) + 1e-15);
    }
}
