//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Everything runs serially; expect a few minutes.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;

use fracdisp::estimates::{
    decay_regression, default_pairs, energy_monitor, holder_regression, kernel_diagnostic, log_grid, mass_monitor,
    EstimateOptions, KernelOptions, KernelSymbol, Verdict,
};
use fracdisp::evolution::{apply_S, apply_S_mainardi, FracParams, Propagator};
use fracdisp::quadrature::QuadConfig;
use fracdisp::solver::{
    applicability_report, mild_solve_with, split_step_classical, NonlinearitySpec, SolveOptions, SolveStatus, TimeMesh,
};
use fracdisp::special::{
    gamma_real, mainardi, mainardi_laplace, mainardi_moment_quadrature, mittag_leffler, mittag_leffler_asymptotic,
    mittag_leffler_exponential_term, mittag_leffler_series, MlParams,
};
use fracdisp::spectral::{lp_norm, Field, SpectralGrid};
use fracdisp::Result;

type Check = Result<(bool, String)>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn gaussian(grid: SpectralGrid, amp: f64, width: f64) -> Field {
    Field::from_fn(grid, |x| c(amp * (-0.5 * (x[0] / width).powi(2)).exp(), 0.0))
}

fn rel_l2(a: &Field, b: &Field) -> Result<f64> {
    Ok(lp_norm(&a.sub(b)?, 2.0)? / lp_norm(b, 2.0)?)
}

fn closed_forms() -> Check {
    let e1 = MlParams::new(1.0, 1.0)?;
    let mut worst_exp = 0.0f64;
    for i in -10..=10 {
        for j in -10..=10 {
            let z = c(i as f64, j as f64);
            if z.norm() <= 10.0 {
                worst_exp = worst_exp.max(rel(mittag_leffler(&e1, z)?, z.exp()));
            }
        }
    }
    let e2 = MlParams::new(2.0, 1.0)?;
    let mut worst_cos = 0.0f64;
    for k in 0..=100 {
        let x = 0.05 * k as f64;
        let v = mittag_leffler(&e2, c(-x * x, 0.0))?;
        // relative to max(|cos x|, 1e-3) so the zero of cos at π/2 stays meaningful
        worst_cos = worst_cos.max((v - c(x.cos(), 0.0)).norm() / x.cos().abs().max(1e-3));
    }
    let mut worst_m = 0.0f64;
    for k in 0..=100 {
        let x = 0.1 * k as f64;
        let exact = (-x * x / 4.0).exp() / PI.sqrt();
        worst_m = worst_m.max((mainardi(0.5, x)? - exact).abs() / exact);
    }
    Ok((
        worst_exp <= 1e-12 && worst_cos <= 1e-12 && worst_m <= 1e-10,
        format!("E_11 vs exp {worst_exp:.1e}, E_21 vs cos {worst_cos:.1e}, M_1/2 {worst_m:.1e}"),
    ))
}

fn mainardi_moments() -> Check {
    let quad = QuadConfig::default();
    let mut worst = 0.0f64;
    for nu in [0.3, 0.5, 0.7] {
        for delta in [0.0, 1.0, 2.0] {
            let exact = gamma_real(delta + 1.0)? / gamma_real(nu * delta + 1.0)?;
            worst = worst.max((mainardi_moment_quadrature(nu, delta, &quad)? - exact).abs());
        }
    }
    Ok((worst <= 1e-8, format!("max gap {worst:.1e}")))
}

fn laplace_identity() -> Check {
    let quad = QuadConfig::default();
    let mut worst = 0.0f64;
    for alpha in [0.4, 0.6, 0.8] {
        let p = MlParams::new(alpha, 1.0)?;
        for z in [c(1.0, 0.0), c(2.0, 0.0), c(1.0, 1.0)] {
            worst = worst.max((mainardi_laplace(alpha, z, &quad)? - mittag_leffler(&p, -z)?).norm());
        }
    }
    Ok((worst <= 1e-6, format!("max gap {worst:.1e}")))
}

fn asymptotic_seam() -> Check {
    // α = 0.4 is left out: the reference series at |z| = 32 needs thousands of
    // MPFR bits and minutes per point
    let mut worst = (0.0f64, 0.0, 0.0, 0.0);
    for alpha in [0.6, 0.8] {
        for beta in [1.0, alpha] {
            let p = MlParams::new(alpha, beta)?;
            for k in 0..=24 {
                let z = c(0.0, -(8.0 + k as f64));
                let (series, _) = mittag_leffler_series(&p, z)?;
                let asym = mittag_leffler_asymptotic(&p, z, 6)? + mittag_leffler_exponential_term(alpha, beta, z);
                let g = rel(asym, series);
                if g > worst.0 {
                    worst = (g, alpha, beta, z.norm());
                }
            }
        }
    }
    let (g, a, b, r) = worst;
    Ok((g <= 1e-6, format!("max relative gap {g:.1e} at alpha={a}, beta={b}, |z|={r}")))
}

fn decay_exponents() -> Check {
    let fp = FracParams::new(0.6, 1.0, 1, 1.0)?;
    let ts = log_grid(10.0, 1000.0, 7);
    let opts = EstimateOptions::default();
    let inf = f64::INFINITY;
    let jobs = [
        (Propagator::S, 1.0, inf, -0.30, 0.03),
        (Propagator::P, 1.0, 1.0, -0.40, 0.04),
        (Propagator::P, 2.0, 2.0, -0.40, 0.04),
        (Propagator::S, 2.0, inf, -0.15, 0.03),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (which, q, r, want, tol) in jobs {
        let rep = decay_regression(&fp, which, 0.0, q, r, &ts, &opts)?;
        let hit = (rep.fitted_exponent - want).abs() <= tol;
        ok &= hit;
        detail.push(format!("{}({q},{r}) {:.4}", which.name(), rep.fitted_exponent));
    }
    Ok((ok, detail.join(", ")))
}

fn holder_stability() -> Check {
    let fp = FracParams::new(0.6, 1.0, 1, 1.0)?;
    let pairs = default_pairs(10.0, 1000.0, 20);
    let opts = EstimateOptions::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for which in [Propagator::S, Propagator::P] {
        let rep = holder_regression(&fp, which, 0.0, 2.0, 2.0, &pairs, &opts)?;
        ok &= rep.verdict == Verdict::Pass && rep.series.len() == 20;
        detail.push(format!("{}: {}", which.name(), rep.notes.join(", ")));
    }
    Ok((ok, detail.join("; ")))
}

fn oracle_equivalence() -> Check {
    let grid = SpectralGrid::new(1, 80.0, 1024)?;
    let f = gaussian(grid, 1.0, 1.0);
    let quad = QuadConfig::default();
    let mut worst = 0.0f64;
    for alpha in [0.4, 0.6, 0.8] {
        let fp = FracParams::new(alpha, 1.0, 1, 1.0)?;
        for t in [0.1, 1.0, 10.0] {
            worst = worst.max(rel_l2(&apply_S(&fp, t, &f)?, &apply_S_mainardi(&fp, t, &f, &quad)?)?);
        }
    }
    Ok((worst <= 1e-5, format!("max relative L2 gap {worst:.1e}")))
}

fn classical_reduction() -> Check {
    let fp = FracParams::classical(1.0, 1, 1.0)?;
    let spec = NonlinearitySpec::new(3.0, -1.0)?;
    let grid = SpectralGrid::new(1, 80.0, 1024)?;
    let u0 = gaussian(grid, 0.1, 1.0);
    let mesh = TimeMesh::new(1.0, 256, 1.0)?;
    let hist = mild_solve_with(&fp, &spec, &u0, &mesh, &SolveOptions { tol: 1e-13, ..SolveOptions::default() })?;
    let oracle = split_step_classical(1.0, &spec, &u0, 1.0, 1e-4)?;
    let gap = rel_l2(hist.final_field(), &oracle)?;
    let mass = mass_monitor(&hist)?.max_deviation();
    Ok((
        hist.status == SolveStatus::Converged && gap <= 1e-5 && mass <= 1e-8,
        format!("L2 gap to split-step {gap:.1e}, mass drift {mass:.1e}"),
    ))
}

fn a_priori() -> Check {
    let spec = NonlinearitySpec::new(3.0, -1.0)?;
    let grid = SpectralGrid::new(1, 80.0, 4096)?;
    let u0 = gaussian(grid, 0.3, 1.0);
    let mut ok = true;
    let mut detail = Vec::new();
    for alpha in [0.5, 0.8] {
        let fp = FracParams::new(alpha, 1.0, 1, 1.0)?;
        let mesh = TimeMesh::graded_for(&fp, 5.0, 64)?;
        let hist = mild_solve_with(&fp, &spec, &u0, &mesh, &SolveOptions::default())?;
        let mass = mass_monitor(&hist)?;
        let energy = energy_monitor(&hist, &fp, &spec)?;
        ok &= hist.status == SolveStatus::Converged
            && mass.verdict == Verdict::Pass
            && energy.max_ratio() <= 1.05;
        detail.push(format!(
            "alpha={alpha}: mass max {:.6}, energy max {:.6}",
            mass.max_ratio(),
            energy.max_ratio()
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn contraction() -> Check {
    let fp = FracParams::new(0.6, 1.0, 1, 1.0)?;
    let spec = NonlinearitySpec::new(3.0, -1.0)?;
    let grid = SpectralGrid::new(1, 80.0, 1024)?;
    let u0 = gaussian(grid, 0.3, 1.0);
    let opts = SolveOptions { tol: 1e-13, ..SolveOptions::default() };
    let mut finals = Vec::new();
    let mut worst_ratio = 0.0f64;
    for j in [32, 64, 128] {
        let mesh = TimeMesh::graded_for(&fp, 1.0, j)?;
        let hist = mild_solve_with(&fp, &spec, &u0, &mesh, &opts)?;
        // ratios from iterate 3 on, ignoring sweeps already at round-off
        for w in hist.residual_trace.windows(2).skip(1) {
            if w[1] > 1e-12 {
                worst_ratio = worst_ratio.max(w[1] / w[0]);
            }
        }
        finals.push(hist.final_field().clone());
    }
    let d1 = lp_norm(&finals[0].sub(&finals[1])?, 2.0)?;
    let d2 = lp_norm(&finals[1].sub(&finals[2])?, 2.0)?;
    let order = (d1 / d2).log2();
    Ok((
        worst_ratio < 0.9 && order >= 0.9,
        format!("max successive residual ratio {worst_ratio:.3}, self-convergence order {order:.2}"),
    ))
}

fn kernel_bound() -> Check {
    let fp = FracParams::new(0.6, 1.0, 1, 1.0)?;
    let xs: Vec<f64> = (0..=400).map(|i| i as f64 * 0.25).collect();
    let rep = kernel_diagnostic(&fp, KernelSymbol::A, 0.0, &xs, 1.0, &KernelOptions::default())?;
    Ok((
        rep.verdict == Verdict::Pass && rep.residual_rms < 0.1,
        format!("last change under doubling M {:.3}; {}", rep.residual_rms, rep.notes.join(", ")),
    ))
}

fn applicability_examples() -> Check {
    let fp = FracParams::new(0.6, 1.0, 1, 1.0)?;
    let cubic = NonlinearitySpec::new(3.0, -1.0)?;
    let a = applicability_report(&fp, &cubic, 0.0, 1.0, 2.0, 0.2);
    let b = applicability_report(&fp, &cubic, 0.0, 2.0, 2.0, 0.2);
    let fp4 = FracParams::new(0.4, 1.0, 1, 1.0)?;
    let c = applicability_report(&fp4, &NonlinearitySpec::new(2.0, -1.0)?, 0.0, 2.0, 2.0, 0.2);
    let t11a = a.get("T1.1").map(|v| v.admissible());
    let t11b = b.get("T1.1").map(|v| v.admissible());
    let t13c = c.get("T1.3").map(|v| v.admissible());
    Ok((
        t11a == Some(false) && t11b == Some(true) && t13c == Some(false),
        format!("T1.1 at q=1: {t11a:?}, T1.1 at q=2: {t11b:?}, T1.3 at alpha=0.4 p=2: {t13c:?}"),
    ))
}

fn main() {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 12] = [
        ("special-function closed forms", closed_forms),
        ("Mainardi moments", mainardi_moments),
        ("Laplace identity", laplace_identity),
        ("asymptotic seam, 6 terms", asymptotic_seam),
        ("decay exponents", decay_exponents),
        ("Hölder stability", holder_stability),
        ("Mainardi oracle equivalence", oracle_equivalence),
        ("classical reduction", classical_reduction),
        ("fractional a priori bounds", a_priori),
        ("contraction and self-convergence", contraction),
        ("kernel pointwise bound", kernel_bound),
        ("applicability gate", applicability_examples),
    ];
    let only: Vec<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        println!("{} {n:>2} {name}: {detail} [{secs:.1}s]", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
