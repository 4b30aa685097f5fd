use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{EstimateJob, RunConfig};
use super::{relative_to, Command, Outcome, EXIT_FAILED, EXIT_GATE, EXIT_OK};
use crate::error::{Error, Result};
use crate::estimates::energy as energy_value;
use crate::estimates::{
    check_ranges, decay_regression, default_pairs, energy_monitor, holder_regression, kernel_delta,
    kernel_diagnostic, log_grid, mass_monitor, write_report_csv, write_series_csv, EstimateOptions, EstimateReport,
    KernelOptions, ProbeFamily, Verdict, REPORT_HEADER,
};
use crate::quadrature::QuadConfig;
use crate::solver::{applicability_report, blowup_monitor_with, mild_solve_with, SolveOptions, SolveStatus};
use crate::special::{mainardi_laplace, mainardi_laplace_weighted, mittag_leffler_with_regime, MlParams};
use crate::spectral::{lp_norm, sobolev_norm, write_csv, write_snapshot};

pub(super) fn dispatch(cmd: Command, cfg: &RunConfig, dir: &Path) -> Result<Outcome> {
    match cmd {
        Command::MlfTable => mlf_table(cfg, dir),
        Command::VerifyDecay => verify_estimates(cfg, dir, false),
        Command::VerifyHolder => verify_estimates(cfg, dir, true),
        Command::VerifyKernel => verify_kernel(cfg, dir),
        Command::Solve => solve(cfg, dir),
        Command::Report => report(cfg, dir),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(p) = path.parent() {
        std::fs::create_dir_all(p)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Describe how to draw a CSV series, next to the CSV itself.
fn write_plot_sidecar(csv: &Path, title: &str, x: &str, y: &[&str], log_x: bool, log_y: bool) -> Result<()> {
    let mut t = toml::Table::new();
    let file = csv.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    t.insert("data".into(), file.into());
    t.insert("title".into(), title.into());
    t.insert("x".into(), x.into());
    t.insert("y".into(), toml::Value::Array(y.iter().map(|s| (*s).into()).collect()));
    t.insert("x_scale".into(), if log_x { "log" } else { "linear" }.into());
    t.insert("y_scale".into(), if log_y { "log" } else { "linear" }.into());
    t.insert("kind".into(), "line".into());
    let text = toml::to_string(&t).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(csv.with_extension("plot.toml"), text)?;
    Ok(())
}

fn mlf_table(cfg: &RunConfig, dir: &Path) -> Result<Outcome> {
    let e = &cfg.experiment;
    let alpha = e.ml_alpha.unwrap_or(cfg.equation.alpha);
    let beta = e.ml_beta.unwrap_or(1.0);
    let mut p = MlParams::new(alpha, beta).map_err(|err| Error::Config(format!("[experiment] {err}")))?;
    if let Some(t) = e.tol {
        p = p.with_tol(t)?;
    }
    let radii: Vec<f64> = if e.r_count == 1 {
        vec![e.r_min]
    } else {
        (0..e.r_count)
            .map(|i| e.r_min + (e.r_max - e.r_min) * i as f64 / (e.r_count - 1) as f64)
            .collect()
    };
    let zs: Vec<Complex64> = e
        .rays
        .iter()
        .flat_map(|&phi| radii.iter().map(move |&r| Complex64::from_polar(r, phi * std::f64::consts::PI)))
        .collect();
    // E_{α,1}(w) and E_{α,α}(w) have Mainardi-Laplace forms for Re w <= 0
    let laplace_kind = if alpha < 1.0 && beta == 1.0 {
        Some(false)
    } else if alpha < 1.0 && beta == alpha {
        Some(true)
    } else {
        None
    };
    let quad = QuadConfig::default();
    let rows: Vec<(Complex64, Complex64, String, Option<Complex64>)> = zs
        .par_iter()
        .map(|&z| {
            let (v, regime) = mittag_leffler_with_regime(&p, z)?;
            let lap = match laplace_kind {
                Some(weighted) if z.re <= 1e-12 * z.norm() && z.norm() <= e.laplace_max => {
                    // rays at ±π/2 carry a rounding-level real part
                    let w = Complex64::new((-z.re).max(0.0), -z.im);
                    Some(if weighted {
                        mainardi_laplace_weighted(alpha, w, &quad)?
                    } else {
                        mainardi_laplace(alpha, w, &quad)?
                    })
                }
                _ => None,
            };
            Ok((z, v, regime.label(), lap))
        })
        .collect::<Result<_>>()?;

    let path = dir.join("mlf_table.csv");
    let mut w = create(&path)?;
    writeln!(w, "re_z,im_z,re_E,im_E,regime,re_laplace,im_laplace,laplace_gap")?;
    let mut worst = 0.0f64;
    for (z, v, regime, lap) in &rows {
        match lap {
            Some(l) => {
                let gap = (v - l).norm() / v.norm().max(1e-300);
                worst = worst.max(gap);
                writeln!(
                    w,
                    "{:.15e},{:.15e},{:.15e},{:.15e},{regime},{:.15e},{:.15e},{gap:.3e}",
                    z.re, z.im, v.re, v.im, l.re, l.im
                )?;
            }
            None => writeln!(w, "{:.15e},{:.15e},{:.15e},{:.15e},{regime},,,", z.re, z.im, v.re, v.im)?,
        }
    }
    w.flush()?;
    write_plot_sidecar(&path, "Mittag-Leffler values", "re_z", &["re_E", "im_E"], false, false)?;
    let checked = rows.iter().filter(|r| r.3.is_some()).count();
    let ok = worst <= 1e-6;
    Ok(Outcome {
        exit_code: if ok { EXIT_OK } else { EXIT_FAILED },
        status: if ok { "pass".into() } else { "fail".into() },
        run_dir: dir.to_path_buf(),
        summary: vec![
            format!("E_{{{alpha},{beta}}}: {} values, {checked} Laplace cross-checks", rows.len()),
            format!("largest relative Laplace gap {worst:.3e} (limit 1e-6)"),
        ],
    })
}

fn estimate_options(cfg: &RunConfig) -> EstimateOptions {
    let e = &cfg.experiment;
    EstimateOptions {
        family: ProbeFamily::log_spaced(e.width_min, e.width_max, e.width_count),
        tolerance: e.tol,
        wide_theta: e.wide_theta,
        ..EstimateOptions::default()
    }
}

fn fmt_q(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

fn series_name(r: &EstimateReport, i: usize) -> String {
    if r.q.is_nan() {
        format!("{:02}_{}_s{}", i, r.estimate_id, r.theta)
    } else {
        format!("{:02}_{}_theta{}_q{}_r{}", i, r.estimate_id, r.theta, fmt_q(r.q), fmt_q(r.r))
    }
}

fn finish_reports(dir: &Path, reports: &[EstimateReport], x_name: &str, y_name: &str, log_x: bool) -> Result<Outcome> {
    write_report_csv(&dir.join("report.csv"), reports)?;
    let mut summary = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        let path = dir.join("series").join(format!("{}.csv", series_name(r, i)));
        if let Some(p) = path.parent() {
            std::fs::create_dir_all(p)?;
        }
        write_series_csv(&path, r, x_name, y_name)?;
        write_plot_sidecar(&path, &r.estimate_id, x_name, &[y_name], log_x, true)?;
        let params = if r.q.is_nan() {
            format!("s={:<5}", r.theta)
        } else {
            format!("theta={:<4} q={:<4} r={:<4}", r.theta, fmt_q(r.q), fmt_q(r.r))
        };
        let mut line = format!(
            "{:<14} {params} predicted {:>9.5} fitted {:>9.5} {}",
            r.estimate_id, r.predicted_exponent, r.fitted_exponent, r.verdict
        );
        for n in &r.notes {
            let _ = write!(line, "; {n}");
        }
        summary.push(line);
    }
    let failed = reports.iter().filter(|r| r.verdict.is_fail()).count();
    Ok(Outcome {
        exit_code: if failed == 0 { EXIT_OK } else { EXIT_FAILED },
        status: if failed == 0 { "pass".into() } else { format!("{failed} failed") },
        run_dir: dir.to_path_buf(),
        summary,
    })
}

fn verify_estimates(cfg: &RunConfig, dir: &Path, holder: bool) -> Result<Outcome> {
    let fp = cfg.frac_params()?;
    let e = &cfg.experiment;
    let opts = estimate_options(cfg);
    let jobs: &[EstimateJob] = if holder { &e.holder_jobs } else { &e.decay_jobs };
    // reject the whole matrix before spending time on any job
    for j in jobs {
        check_ranges(&fp, j.theta, j.q, j.r, opts.wide_theta)?;
    }
    let reports: Vec<EstimateReport> = jobs
        .par_iter()
        .map(|j| {
            let which = j.propagator()?;
            if holder {
                let pairs = default_pairs(e.t_min, e.t_max, e.pair_count);
                holder_regression(&fp, which, j.theta, j.q, j.r, &pairs, &opts)
            } else {
                let ts = log_grid(e.t_min, e.t_max, e.t_count);
                decay_regression(&fp, which, j.theta, j.q, j.r, &ts, &opts)
            }
        })
        .collect::<Result<_>>()?;
    if holder {
        finish_reports(dir, &reports, "ratio", "constant", true)
    } else {
        finish_reports(dir, &reports, "t", "norm", true)
    }
}

fn verify_kernel(cfg: &RunConfig, dir: &Path) -> Result<Outcome> {
    let fp = cfg.frac_params()?;
    let e = &cfg.experiment;
    let n = (e.x_max / e.x_step).round() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 * e.x_step).collect();
    let mut opts = KernelOptions::default();
    if let Some(t) = e.tol {
        opts.stability = t;
    }
    let m = cfg.equation.m;
    let reports: Vec<EstimateReport> = e
        .kernel_jobs
        .par_iter()
        .map(|j| match j.symbol()? {
            Some(sym) => kernel_diagnostic(&fp, sym, j.s, &xs, m, &opts),
            None => kernel_delta(j.s, &xs, m, &opts),
        })
        .collect::<Result<_>>()?;
    finish_reports(dir, &reports, "x", "abs_kernel", false)
}

fn solve(cfg: &RunConfig, dir: &Path) -> Result<Outcome> {
    let fp = cfg.frac_params()?;
    let spec = cfg.nonlinearity()?;
    let mesh = cfg.mesh()?;
    let u0 = cfg.initial_field()?;
    let e = &cfg.experiment;
    let mut summary = Vec::new();

    let mut app_text = String::new();
    let gate_open = if fp.is_classical() {
        app_text.push_str("classical equation (alpha = 1): the fractional well-posedness results do not apply; gate skipped\n");
        true
    } else {
        let rep = applicability_report(&fp, &spec, e.s, e.q, e.r, e.gamma);
        app_text.push_str(&rep.to_string());
        rep.any_admissible()
    };
    if e.force && !gate_open {
        app_text.push_str("forced: no result applies, running anyway\n");
    }
    std::fs::write(dir.join("applicability.txt"), &app_text)?;
    print!("{app_text}");
    if !gate_open && !e.force {
        return Ok(Outcome {
            exit_code: EXIT_GATE,
            status: "rejected".into(),
            run_dir: dir.to_path_buf(),
            summary: vec!["no well-posedness result admits this configuration; use --force to run anyway".into()],
        });
    }

    let opts = SolveOptions {
        tol: cfg.solver.tol,
        max_iter: cfg.solver.max_iter,
        dealias: cfg.solver.dealias,
        ..SolveOptions::default()
    };
    let hist = mild_solve_with(&fp, &spec, &u0, &mesh, &opts)?;
    let mass = mass_monitor(&hist)?;
    let energy = energy_monitor(&hist, &fp, &spec)?;
    let blow = blowup_monitor_with(&hist, e.s, e.r, e.gamma, e.blowup_threshold)?;
    let l2: Vec<f64> = hist.fields.par_iter().map(|u| lp_norm(u, 2.0)).collect::<Result<_>>()?;
    let hsr: Vec<f64> = hist.fields.par_iter().map(|u| sobolev_norm(u, e.s, e.r)).collect::<Result<_>>()?;

    let nodes = dir.join("nodes.csv");
    let mut w = create(&nodes)?;
    let energies: Vec<f64> = hist.fields.par_iter().map(|u| energy_value(&fp, &spec, u)).collect::<Result<_>>()?;
    writeln!(w, "k,t,l2,mass_ratio,hsr,tgamma_linf,energy,energy_ratio,residual")?;
    for k in 0..hist.fields.len() {
        writeln!(
            w,
            "{k},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.3e}",
            blow.t[k],
            l2[k],
            mass.ratio[k],
            hsr[k],
            blow.weighted_sup[k],
            energies[k],
            energy.ratio[k],
            hist.node_residuals[k]
        )?;
    }
    w.flush()?;
    write_plot_sidecar(&nodes, "monitors", "t", &["mass_ratio", "energy_ratio", "hsr", "tgamma_linf"], false, false)?;

    let res = dir.join("residuals.csv");
    let mut w = create(&res)?;
    writeln!(w, "sweep,residual")?;
    for (i, r) in hist.residual_trace.iter().enumerate() {
        writeln!(w, "{},{r:.15e}", i + 1)?;
    }
    w.flush()?;
    write_plot_sidecar(&res, "Picard residuals", "sweep", &["residual"], false, true)?;

    let last = hist.fields.len() - 1;
    let every = e.snapshot_every.max(1);
    for (k, u) in hist.fields.iter().enumerate() {
        if k % every == 0 || k == last {
            let mut f = create(&dir.join("snapshots").join(format!("u_{k:05}.bin")))?;
            write_snapshot(u, &mut f)?;
            f.flush()?;
        }
    }
    let mut f = create(&dir.join("final.csv"))?;
    write_csv(hist.final_field(), &mut f)?;
    f.flush()?;

    let status = if blow.flagged { "blowup_flag" } else { hist.status.label() }.to_string();
    let converged = hist.status == SolveStatus::Converged;
    let failed = !converged || blow.flagged || mass.verdict.is_fail() || energy.verdict.is_fail();
    summary.push(format!(
        "Picard sweeps {} residual {:.3e} ({})",
        hist.iterate_index,
        hist.residual,
        hist.status.label()
    ));
    summary.push(format!("mass ratio max {:.8} ({})", mass.max_ratio(), mass.verdict));
    summary.push(format!("energy ratio max {:.8} ({})", energy.max_ratio(), energy.verdict));
    summary.extend(energy.notes.iter().cloned());
    if let Some(r) = &blow.reason {
        summary.push(format!("blow-up monitor: {r}"));
    }
    Ok(Outcome {
        exit_code: if failed { EXIT_FAILED } else { EXIT_OK },
        status,
        run_dir: dir.to_path_buf(),
        summary,
    })
}

fn read_manifest(dir: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(dir.join("manifest.toml"))?;
    text.parse::<toml::Table>().map_err(|e| Error::Config(format!("{}: {e}", dir.display())))
}

fn report(cfg: &RunConfig, dir: &Path) -> Result<Outcome> {
    let mut runs: Vec<PathBuf> = cfg.experiment.runs.clone();
    if runs.is_empty() {
        let root = dir.parent().map(Path::to_path_buf).unwrap_or_else(super::output_root);
        if let Ok(rd) = std::fs::read_dir(&root) {
            for ent in rd.flatten() {
                let p = ent.path();
                if p != dir && p.join("manifest.toml").is_file() {
                    runs.push(p);
                }
            }
        }
    }
    runs.sort();

    let base = dir.parent().unwrap_or(dir).to_path_buf();
    let mut summary_csv = String::from("run,command,status,exit_code,jobs,failed_jobs\n");
    let mut estimates = String::from(REPORT_HEADER);
    estimates.push('\n');
    let mut summary = Vec::new();
    let mut bad = 0;
    for run in &runs {
        let m = read_manifest(run)?;
        let r = m.get("run").and_then(|v| v.as_table()).cloned().unwrap_or_default();
        let command = r.get("command").and_then(|v| v.as_str()).unwrap_or("?").to_string();
        let status = r.get("status").and_then(|v| v.as_str()).unwrap_or("?").to_string();
        let code = r.get("exit_code").and_then(|v| v.as_integer()).unwrap_or(-1);
        let (mut jobs, mut failed) = (0, 0);
        if let Ok(text) = std::fs::read_to_string(run.join("report.csv")) {
            for line in text.lines().skip(1).filter(|l| !l.is_empty()) {
                jobs += 1;
                if line.ends_with(Verdict::Fail.label()) {
                    failed += 1;
                }
                estimates.push_str(line);
                estimates.push('\n');
            }
        }
        if code != 0 {
            bad += 1;
        }
        let name = relative_to(run, &base);
        let _ = writeln!(summary_csv, "{name},{command},{status},{code},{jobs},{failed}");
        summary.push(format!("{name:<24} {command:<14} {status:<14} exit {code}"));
    }
    std::fs::write(dir.join("summary.csv"), summary_csv)?;
    std::fs::write(dir.join("estimates.csv"), estimates)?;
    Ok(Outcome {
        exit_code: if bad == 0 { EXIT_OK } else { EXIT_FAILED },
        status: format!("{} runs, {bad} not clean", runs.len()),
        run_dir: dir.to_path_buf(),
        summary,
    })
}

/// manifest.toml: the resolved configuration plus a [run] table with the
/// command, outcome, versions and timings. Loading it as a configuration
/// ignores [run].
pub(super) fn write_manifest(
    dir: &Path,
    cmd: Command,
    cfg: &RunConfig,
    outcome: &Outcome,
    threads: usize,
    seconds: f64,
) -> Result<()> {
    let mut t: toml::Table = toml::from_str(&cfg.to_toml()?).map_err(|e| Error::Config(e.to_string()))?;
    let mut run = toml::Table::new();
    run.insert("command".into(), cmd.name().into());
    run.insert("status".into(), outcome.status.clone().into());
    run.insert("exit_code".into(), (outcome.exit_code as i64).into());
    run.insert("force".into(), cfg.experiment.force.into());
    run.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    run.insert("threads".into(), (threads as i64).into());
    run.insert("wall_seconds".into(), seconds.into());
    run.insert(
        "rerun".into(),
        format!("fracdisp {} --config manifest.toml --out <dir>", cmd.name()).into(),
    );
    t.insert("run".into(), toml::Value::Table(run));
    let text = toml::to_string(&t).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(dir.join("manifest.toml"), text)?;
    Ok(())
}
