//! Run configuration: a TOML file with one table per block. Every block and
//! key is optional; missing values take the defaults below. A written
//! manifest is itself a valid configuration.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{FracParams, Propagator};
use crate::estimates::KernelSymbol;
use crate::solver::{NonlinearitySpec, TimeMesh};
use crate::spectral::{read_snapshot, Field, SpectralGrid, Space};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub equation: EquationBlock,
    #[serde(default)]
    pub nonlinearity: NonlinearityBlock,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub mesh: MeshBlock,
    #[serde(default)]
    pub initial: InitialBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub experiment: ExperimentBlock,
    #[serde(default)]
    pub output: OutputBlock,
    /// Written into manifests; ignored on load.
    #[serde(default, skip_serializing)]
    pub run: Option<toml::Table>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EquationBlock {
    /// α = 1 selects the classical equation
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: f64,
}

impl Default for EquationBlock {
    fn default() -> Self {
        EquationBlock {
            alpha: 0.6,
            beta: 1.0,
            n: 1,
            m: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonlinearityBlock {
    pub p: f64,
    pub mu: f64,
}

impl Default for NonlinearityBlock {
    fn default() -> Self {
        NonlinearityBlock { p: 3.0, mu: -1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    pub box_length: f64,
    pub points: usize,
}

impl Default for GridBlock {
    fn default() -> Self {
        GridBlock {
            box_length: 80.0,
            points: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshBlock {
    #[serde(rename = "T")]
    pub t_final: f64,
    #[serde(rename = "J")]
    pub steps: usize,
    /// default 1/α
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<f64>,
}

impl Default for MeshBlock {
    fn default() -> Self {
        MeshBlock {
            t_final: 5.0,
            steps: 64,
            grading: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialBlock {
    Gaussian { width: f64, amplitude: f64 },
    Bump { radius: f64, amplitude: f64 },
    File { path: PathBuf },
}

impl Default for InitialBlock {
    fn default() -> Self {
        InitialBlock::Gaussian {
            width: 1.0,
            amplitude: 0.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub tol: f64,
    pub max_iter: usize,
    pub dealias: bool,
}

impl Default for SolverBlock {
    fn default() -> Self {
        SolverBlock {
            tol: 1e-10,
            max_iter: 200,
            dealias: true,
        }
    }
}

/// One decay or Hölder job.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateJob {
    /// "S" or "P"
    pub which: String,
    #[serde(default)]
    pub theta: f64,
    pub q: f64,
    pub r: f64,
}

impl EstimateJob {
    pub fn new(which: &str, theta: f64, q: f64, r: f64) -> Self {
        EstimateJob {
            which: which.into(),
            theta,
            q,
            r,
        }
    }

    pub fn propagator(&self) -> Result<Propagator> {
        match self.which.as_str() {
            "S" | "s" => Ok(Propagator::S),
            "P" | "p" => Ok(Propagator::P),
            w => Err(Error::Config(format!("job operator must be S or P, got {w:?}"))),
        }
    }
}

/// One kernel job: K^s[a], K^s[b] or K_δ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelJob {
    /// "a", "b" or "delta"
    pub kind: String,
    /// θ + δ for a/b, δ for delta
    pub s: f64,
}

impl KernelJob {
    pub fn symbol(&self) -> Result<Option<KernelSymbol>> {
        match self.kind.as_str() {
            "a" => Ok(Some(KernelSymbol::A)),
            "b" => Ok(Some(KernelSymbol::B)),
            "delta" => Ok(None),
            k => Err(Error::Config(format!("kernel kind must be a, b or delta, got {k:?}"))),
        }
    }
}

/// Subcommand-specific keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentBlock {
    // mlf-table
    /// Mittag-Leffler parameters; default (equation alpha, 1)
    pub ml_alpha: Option<f64>,
    pub ml_beta: Option<f64>,
    /// ray angles arg z in units of π
    pub rays: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub r_count: usize,
    /// Laplace-identity column for |z| <= laplace_max
    pub laplace_max: f64,

    /// --tol: series tolerance (mlf-table) or verdict tolerance (verify-*)
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// --force: run a solve that no well-posedness result covers
    pub force: bool,

    // verify-decay / verify-holder
    pub decay_jobs: Vec<EstimateJob>,
    pub holder_jobs: Vec<EstimateJob>,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
    pub pair_count: usize,
    pub width_min: f64,
    pub width_max: f64,
    pub width_count: usize,
    pub wide_theta: bool,

    // verify-kernel
    pub kernel_jobs: Vec<KernelJob>,
    pub x_max: f64,
    pub x_step: f64,

    // solve
    pub s: f64,
    pub q: f64,
    pub r: f64,
    pub gamma: f64,
    pub snapshot_every: usize,
    pub blowup_threshold: f64,

    // report
    /// run directories to aggregate; default: every run under the output root
    pub runs: Vec<PathBuf>,
}

impl Default for ExperimentBlock {
    fn default() -> Self {
        let inf = f64::INFINITY;
        ExperimentBlock {
            ml_alpha: None,
            ml_beta: None,
            rays: vec![-0.5, 0.0, 1.0],
            r_min: 0.0,
            r_max: 32.0,
            r_count: 33,
            laplace_max: 10.0,
            tol: None,
            force: false,
            decay_jobs: vec![
                EstimateJob::new("S", 0.0, 1.0, inf),
                EstimateJob::new("P", 0.0, 1.0, 1.0),
                EstimateJob::new("P", 0.0, 2.0, 2.0),
                EstimateJob::new("S", 0.0, 2.0, inf),
                EstimateJob::new("S", 0.0, 2.0, 2.0),
                EstimateJob::new("S", 0.5, 2.0, 2.0),
            ],
            holder_jobs: vec![
                EstimateJob::new("S", 0.0, 2.0, 2.0),
                EstimateJob::new("P", 0.0, 2.0, 2.0),
                EstimateJob::new("S", 0.0, 1.0, inf),
            ],
            t_min: 10.0,
            t_max: 1000.0,
            t_count: 7,
            pair_count: 20,
            width_min: 0.05,
            width_max: 50.0,
            width_count: 13,
            wide_theta: false,
            kernel_jobs: vec![
                KernelJob { kind: "a".into(), s: 0.0 },
                KernelJob { kind: "b".into(), s: 0.0 },
                KernelJob { kind: "delta".into(), s: -1.5 },
            ],
            x_max: 100.0,
            x_step: 0.25,
            s: 0.0,
            q: 2.0,
            r: 2.0,
            gamma: 0.2,
            snapshot_every: 16,
            blowup_threshold: 1e3,
            runs: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite (got {v})")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        // relative data paths are relative to the config file
        if let InitialBlock::File { path: p } = &mut cfg.initial {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Check every numeric field against the module preconditions.
    pub fn validate(&self) -> Result<()> {
        self.frac_params()?;
        self.nonlinearity()?;
        self.grid()?;
        self.mesh()?;
        match &self.initial {
            InitialBlock::Gaussian { width, amplitude } => {
                positive("initial.width", *width)?;
                if !amplitude.is_finite() {
                    return Err(Error::Config("initial.amplitude must be finite".into()));
                }
            }
            InitialBlock::Bump { radius, amplitude } => {
                positive("initial.radius", *radius)?;
                if !amplitude.is_finite() {
                    return Err(Error::Config("initial.amplitude must be finite".into()));
                }
            }
            InitialBlock::File { .. } => {}
        }
        positive("solver.tol", self.solver.tol)?;
        if self.solver.max_iter == 0 {
            return Err(Error::Config("solver.max_iter must be at least 1".into()));
        }
        let e = &self.experiment;
        if e.r_count == 0 || !(e.r_min >= 0.0 && e.r_max >= e.r_min) {
            return Err(Error::Config("need 0 <= r_min <= r_max and r_count >= 1".into()));
        }
        if let Some(t) = e.tol {
            positive("experiment.tol", t)?;
        }
        positive("experiment.t_min", e.t_min)?;
        if !(e.t_max > e.t_min) || e.t_count < 2 {
            return Err(Error::Config("need t_max > t_min and t_count >= 2".into()));
        }
        positive("experiment.width_min", e.width_min)?;
        if !(e.width_max >= e.width_min) || e.width_count == 0 {
            return Err(Error::Config("need width_max >= width_min and width_count >= 1".into()));
        }
        positive("experiment.x_step", e.x_step)?;
        if !(e.x_max >= 0.0) {
            return Err(Error::Config("experiment.x_max must be >= 0".into()));
        }
        positive("experiment.blowup_threshold", e.blowup_threshold)?;
        for j in e.decay_jobs.iter().chain(&e.holder_jobs) {
            j.propagator()?;
        }
        for j in &e.kernel_jobs {
            j.symbol()?;
        }
        Ok(())
    }

    pub fn frac_params(&self) -> Result<FracParams> {
        let q = &self.equation;
        if q.alpha == 1.0 {
            FracParams::classical(q.beta, q.n, q.m)
        } else {
            FracParams::new(q.alpha, q.beta, q.n, q.m)
        }
        .map_err(|e| Error::Config(format!("[equation] {e}")))
    }

    pub fn nonlinearity(&self) -> Result<NonlinearitySpec> {
        NonlinearitySpec::new(self.nonlinearity.p, self.nonlinearity.mu)
            .map_err(|e| Error::Config(format!("[nonlinearity] {e}")))
    }

    pub fn grid(&self) -> Result<SpectralGrid> {
        SpectralGrid::new(self.equation.n, self.grid.box_length, self.grid.points)
            .map_err(|e| Error::Config(format!("[grid] {e}")))
    }

    pub fn mesh(&self) -> Result<TimeMesh> {
        let fp = self.frac_params()?;
        let m = &self.mesh;
        match m.grading {
            Some(g) => TimeMesh::new(m.t_final, m.steps, g),
            None => TimeMesh::graded_for(&fp, m.t_final, m.steps),
        }
        .map_err(|e| Error::Config(format!("[mesh] {e}")))
    }

    pub fn initial_field(&self) -> Result<Field> {
        let g = self.grid()?;
        match &self.initial {
            InitialBlock::Gaussian { width, amplitude } => {
                let (w, a) = (*width, *amplitude);
                Ok(Field::from_fn(g, |x| {
                    let r2: f64 = x.iter().map(|v| v * v).sum();
                    Complex64::new(a * (-0.5 * r2 / (w * w)).exp(), 0.0)
                }))
            }
            InitialBlock::Bump { radius, amplitude } => {
                let (rad, a) = (*radius, *amplitude);
                Ok(Field::from_fn(g, |x| {
                    let r2: f64 = x.iter().map(|v| v * v).sum::<f64>() / (rad * rad);
                    if r2 < 1.0 {
                        Complex64::new(a * (1.0 - 1.0 / (1.0 - r2)).exp(), 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }))
            }
            InitialBlock::File { path } => {
                let f = std::fs::File::open(path)
                    .map_err(|e| Error::Config(format!("cannot open initial data {}: {e}", path.display())))?;
                let u = read_snapshot(std::io::BufReader::new(f))?;
                if u.grid != g {
                    return Err(Error::Config(format!(
                        "initial data {} lives on a different grid than [grid]",
                        path.display()
                    )));
                }
                if u.space == Space::Frequency {
                    return crate::spectral::inverse(&u);
                }
                Ok(u)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_config_and_validation() {
        let cfg = RunConfig::from_toml("[equation]\nalpha = 0.8\nbeta = 1.0\nn = 1\nM = 1.0\n[mesh]\nT = 1\nJ = 8\n").unwrap();
        assert_eq!(cfg.equation.alpha, 0.8);
        assert_eq!(cfg.grid, GridBlock::default());
        let e = RunConfig::from_toml("[grid]\nbox_length = 10\npoints = 100\n").unwrap_err();
        assert!(e.to_string().contains("[grid]"), "{e}");
        assert!(RunConfig::from_toml("[equation]\nalpha = 0.5\nbogus = 1\n").is_err());
        let cfg = RunConfig::from_toml("[initial]\nprofile = \"bump\"\nradius = 2.0\namplitude = 1.0\n").unwrap();
        assert!(matches!(cfg.initial, InitialBlock::Bump { .. }));
        let cfg = RunConfig::from_toml("[experiment]\ndecay_jobs = [{ which = \"S\", q = 1, r = inf }]\n").unwrap();
        assert!(cfg.experiment.decay_jobs[0].r.is_infinite());
    }
}
