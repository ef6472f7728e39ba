//! The phase-unwrapping testbed: dataset generation, experiment
//! configuration, artifact output, and run comparison.
//!
//! A ground-truth surface (a scaled `peaks` bump landscape) is observed
//! through `K(u) = (cos u, sin u)` plus Gaussian noise; the solver then
//! recovers the phase from a zero start, stopping when the data fit reaches
//! the expected noise level.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridPair};
use crate::objective::{Objective, PhaseUnwrapObjective};
use crate::potential::{DctL1Potential, Potential, QuadraticPotential, SobolevPotential};
use crate::solver::{
    diagnostics_report, run, DiagnosticsReport, SolverResult, StepMode, StepPolicy, StoppingRule,
};
use crate::transforms::{DctPlan, NeumannLaplacian};

/// SplitMix64: the 64-bit PRNG behind all noise in this crate, pinned so
/// that other implementations can reproduce datasets from a seed alone.
///
/// State update `s += 0x9E3779B97F4A7C15`; output mixes the new state with
/// two xor-shift-multiply rounds (`0xBF58476D1CE4E5B9`, `0x94D049BB133111EB`)
/// and a final `z ^ (z >> 31)`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform double in (0, 1]: the top 53 bits of the next output, plus
    /// one, scaled by 2^-53. Never returns 0, so it is safe under `ln`.
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Standard Gaussian sampler: Box-Muller in the trigonometric variant.
///
/// Each pair of uniforms `(u1, u2)` yields `r cos(theta)` then
/// `r sin(theta)` with `r = sqrt(-2 ln u1)`, `theta = 2 pi u2`; the second
/// sample is cached and returned on the next call.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    rng: SplitMix64,
    spare: Option<f64>,
}

impl GaussianSampler {
    pub fn new(seed: u64) -> Self {
        GaussianSampler {
            rng: SplitMix64::new(seed),
            spare: None,
        }
    }

    pub fn next(&mut self) -> f64 {
        if let Some(s) = self.spare.take() {
            return s;
        }
        let u1 = self.rng.next_uniform();
        let u2 = self.rng.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// Additive Gaussian noise of standard deviation `sigma`, reproducible
/// bit-for-bit from the seed.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::param("sigma", format!("must be >= 0, got {sigma}")));
        }
        Ok(NoiseModel { sigma, seed })
    }

    /// Two independent noise fields, drawn row-major from a single sampler
    /// stream: the first field completely, then the second.
    pub fn sample_pair(&self, rows: usize, cols: usize) -> GridPair {
        let mut sampler = GaussianSampler::new(self.seed);
        let mut field = || {
            let values: Vec<f64> = (0..rows * cols).map(|_| self.sigma * sampler.next()).collect();
            Grid::new(rows, cols, values).expect("finite noise")
        };
        let n1 = field();
        let n2 = field();
        GridPair::new(n1, n2).expect("same shape")
    }
}

/// The classic MATLAB bump landscape at a point:
/// `3(1-x)^2 e^{-x^2-(y+1)^2} - 10(x/5 - x^3 - y^5) e^{-x^2-y^2}
///  - (1/3) e^{-(x+1)^2 - y^2}`.
pub fn peaks_value(x: f64, y: f64) -> f64 {
    3.0 * (1.0 - x).powi(2) * (-x * x - (y + 1.0).powi(2)).exp()
        - 10.0 * (x / 5.0 - x.powi(3) - y.powi(5)) * (-x * x - y * y).exp()
        - (1.0 / 3.0) * (-(x + 1.0).powi(2) - y * y).exp()
}

/// Samples `scale * peaks` on a uniform grid over [-3, 3]^2; the row index
/// walks the y axis, the column index the x axis.
pub fn peaks(rows: usize, cols: usize, scale: f64) -> Result<Grid> {
    if rows < 2 || cols < 2 {
        return Err(Error::param(
            "rows/cols",
            format!("peaks needs at least a 2x2 grid, got {rows}x{cols}"),
        ));
    }
    if !scale.is_finite() {
        return Err(Error::param("peaks_scale", "must be finite"));
    }
    let coord = |idx: usize, n: usize| -3.0 + 6.0 * idx as f64 / (n - 1) as f64;
    Ok(Grid::from_fn(rows, cols, |i, j| {
        scale * peaks_value(coord(j, cols), coord(i, rows))
    }))
}

/// Discrepancy stopping level `sigma^2 * m / 2`, where `m = 2*rows*cols`
/// counts every scalar residual entry (noise hits both data channels).
pub fn discrepancy_threshold(sigma: f64, rows: usize, cols: usize) -> f64 {
    sigma * sigma * (2 * rows * cols) as f64 / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    /// quadratic potential: plain gradient descent
    Gd,
    /// quadratic plus Sobolev smoothing
    Sobolev,
    /// quadratic plus (Huberised) l1 in the cosine basis
    DctL1,
}

impl PotentialKind {
    pub fn default_alpha(self) -> Option<f64> {
        match self {
            PotentialKind::Gd => None,
            PotentialKind::Sobolev => Some(1000.0),
            PotentialKind::DctL1 => Some(50.0),
        }
    }
}

impl std::fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PotentialKind::Gd => write!(f, "gd"),
            PotentialKind::Sobolev => write!(f, "sobolev"),
            PotentialKind::DctL1 => write!(f, "dct_l1"),
        }
    }
}

impl std::str::FromStr for PotentialKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gd" => Ok(PotentialKind::Gd),
            "sobolev" => Ok(PotentialKind::Sobolev),
            "dct_l1" => Ok(PotentialKind::DctL1),
            other => Err(Error::parse(
                "potential",
                format!("expected `gd`, `sobolev`, or `dct_l1`, got `{other}`"),
            )),
        }
    }
}

/// Complete description of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub rows: usize,
    pub cols: usize,
    pub peaks_scale: f64,
    pub sigma: f64,
    pub seed: u64,
    pub potential: PotentialKind,
    /// regularisation weight; `None` picks the potential's default
    /// (1000 for sobolev, 50 for dct_l1, unused for gd)
    pub alpha: Option<f64>,
    /// Huber radius for dct_l1 (0 disables smoothing)
    pub mu: f64,
    pub tau: f64,
    /// decrease coefficient; `None` derives `max(1e-6, 1/tau - L/2)`
    pub rho: Option<f64>,
    pub max_iters: usize,
    pub mode: StepMode,
    /// optional extra stopping rule on `||grad E||`, useful for noise-free
    /// runs where the discrepancy level is zero
    pub gradient_tol: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            rows: 64,
            cols: 64,
            peaks_scale: 1.0,
            sigma: 0.15,
            seed: 42,
            potential: PotentialKind::Gd,
            alpha: None,
            mu: 0.01,
            tau: 1.5,
            rho: None,
            max_iters: 100_000,
            mode: StepMode::Fixed,
            gradient_tol: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rows < 2 || self.cols < 2 {
            return Err(Error::param(
                "rows/cols",
                format!("need at least 2x2, got {}x{}", self.rows, self.cols),
            ));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::param("sigma", "must be >= 0 and finite"));
        }
        if !self.peaks_scale.is_finite() {
            return Err(Error::param("peaks_scale", "must be finite"));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::param("tau", "must be > 0"));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::param("mu", "must be >= 0"));
        }
        if let Some(alpha) = self.alpha {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::param("alpha", "must be > 0"));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "must be >= 1"));
        }
        Ok(())
    }

    pub fn resolved_alpha(&self) -> Option<f64> {
        match self.potential {
            PotentialKind::Gd => None,
            kind => self.alpha.or(kind.default_alpha()),
        }
    }

    pub fn build_potential(&self) -> Result<Box<dyn Potential>> {
        match self.potential {
            PotentialKind::Gd => Ok(Box::new(QuadraticPotential)),
            PotentialKind::Sobolev => {
                let alpha = self.resolved_alpha().expect("sobolev always has alpha");
                Ok(Box::new(SobolevPotential::new(
                    alpha,
                    NeumannLaplacian::new(self.rows, self.cols),
                )?))
            }
            PotentialKind::DctL1 => {
                let alpha = self.resolved_alpha().expect("dct_l1 always has alpha");
                Ok(Box::new(DctL1Potential::new(
                    alpha,
                    self.mu,
                    DctPlan::new(self.rows, self.cols),
                )?))
            }
        }
    }

    pub fn step_policy(&self) -> StepPolicy {
        let mut policy = match self.mode {
            StepMode::Fixed => StepPolicy::fixed(self.tau),
            StepMode::Backtracking => StepPolicy::backtracking(self.tau),
        };
        policy.rho = self.rho;
        policy
    }

    pub fn stopping_rule(&self) -> StoppingRule {
        let mut stop = StoppingRule::max_iters(self.max_iters)
            .with_discrepancy(discrepancy_threshold(self.sigma, self.rows, self.cols));
        stop.gradient_tol = self.gradient_tol;
        stop
    }
}

/// Ground truth and noisy two-channel observations for a config.
pub fn make_dataset(cfg: &ExperimentConfig) -> Result<(Grid, GridPair)> {
    cfg.validate()?;
    let truth = peaks(cfg.rows, cfg.cols, cfg.peaks_scale)?;
    let noise = NoiseModel::new(cfg.sigma, cfg.seed)?.sample_pair(cfg.rows, cfg.cols);
    let f1 = truth.map(f64::cos).add(noise.first())?;
    let f2 = truth.map(f64::sin).add(noise.second())?;
    Ok((truth, GridPair::new(f1, f2)?))
}

/// In-memory results of a completed experiment.
pub struct ExperimentOutcome {
    pub truth: Grid,
    pub data: GridPair,
    pub result: SolverResult,
    pub report: DiagnosticsReport,
    pub threshold: f64,
}

/// Runs the full experiment in memory: dataset, solve from zero, report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let (truth, data) = make_dataset(cfg)?;
    let obj = PhaseUnwrapObjective::new(data.clone());
    let potential = cfg.build_potential()?;
    let u0 = Grid::zeros(cfg.rows, cfg.cols);
    let result = run(
        &obj,
        potential.as_ref(),
        &u0,
        &cfg.step_policy(),
        &cfg.stopping_rule(),
    )?;
    let report = diagnostics_report(&result, potential.as_ref(), obj.surrogate_l());
    Ok(ExperimentOutcome {
        truth,
        data,
        result,
        report,
        threshold: discrepancy_threshold(cfg.sigma, cfg.rows, cfg.cols),
    })
}

fn config_header(cfg: &ExperimentConfig, threshold: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "config: {}", cfg.potential);
    let _ = writeln!(out, "rows: {}", cfg.rows);
    let _ = writeln!(out, "cols: {}", cfg.cols);
    let _ = writeln!(out, "peaks_scale: {}", cfg.peaks_scale);
    let _ = writeln!(out, "sigma: {}", cfg.sigma);
    let _ = writeln!(out, "seed: {}", cfg.seed);
    match cfg.resolved_alpha() {
        Some(alpha) => {
            let _ = writeln!(out, "alpha: {alpha}");
        }
        None => {
            let _ = writeln!(out, "alpha: -");
        }
    }
    let _ = writeln!(out, "mu: {}", cfg.mu);
    let _ = writeln!(out, "tau: {}", cfg.tau);
    let _ = writeln!(out, "mode: {}", cfg.mode);
    let _ = writeln!(out, "max_iters: {}", cfg.max_iters);
    let _ = writeln!(out, "discrepancy_threshold: {threshold}");
    out
}

/// 8-bit ASCII PGM rendering with linear min-max scaling; the scaling
/// parameters go to a `.meta` sidecar so values can be mapped back.
pub fn write_pgm(grid: &Grid, path: &Path) -> Result<()> {
    let (min, max) = (grid.min(), grid.max());
    let span = max - min;
    let mut out = String::new();
    let _ = writeln!(out, "P2");
    let _ = writeln!(out, "{} {}", grid.cols(), grid.rows());
    let _ = writeln!(out, "255");
    for i in 0..grid.rows() {
        for j in 0..grid.cols() {
            let level = if span > 0.0 {
                ((grid.get(i, j) - min) / span * 255.0).round() as u8
            } else {
                0
            };
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{level}");
        }
        out.push('\n');
    }
    fs::write(path, out)?;

    let mut meta = String::new();
    let _ = writeln!(meta, "rows: {}", grid.rows());
    let _ = writeln!(meta, "cols: {}", grid.cols());
    let _ = writeln!(meta, "min: {min}");
    let _ = writeln!(meta, "max: {max}");
    let meta_path = path.with_extension("pgm.meta");
    fs::write(meta_path, meta)?;
    Ok(())
}

/// Runs the experiment and writes every artifact into `out_dir`:
/// `truth.csv`, `f1.csv`, `f2.csv`, `recon.csv`, `trace.csv`, `report.txt`,
/// `truth.pgm(.meta)`, `recon.pgm(.meta)`.
pub fn run_experiment_to_dir(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentOutcome> {
    let outcome = run_experiment(cfg)?;
    fs::create_dir_all(out_dir)?;
    outcome.truth.write_csv(&out_dir.join("truth.csv"))?;
    outcome.data.first().write_csv(&out_dir.join("f1.csv"))?;
    outcome.data.second().write_csv(&out_dir.join("f2.csv"))?;
    outcome.result.u_final.write_csv(&out_dir.join("recon.csv"))?;
    outcome.result.trace.write_csv(&out_dir.join("trace.csv"))?;
    let report_text = format!(
        "{}---\n{}",
        config_header(cfg, outcome.threshold),
        outcome.report
    );
    fs::write(out_dir.join("report.txt"), report_text)?;
    write_pgm(&outcome.truth, &out_dir.join("truth.pgm"))?;
    write_pgm(&outcome.result.u_final, &out_dir.join("recon.pgm"))?;
    Ok(outcome)
}

/// Writes only the dataset artifacts (`truth.csv`, `f1.csv`, `f2.csv`,
/// `truth.pgm(.meta)`) into `out_dir`.
pub fn generate_to_dir(cfg: &ExperimentConfig, out_dir: &Path) -> Result<()> {
    let (truth, data) = make_dataset(cfg)?;
    fs::create_dir_all(out_dir)?;
    truth.write_csv(&out_dir.join("truth.csv"))?;
    data.first().write_csv(&out_dir.join("f1.csv"))?;
    data.second().write_csv(&out_dir.join("f2.csv"))?;
    write_pgm(&truth, &out_dir.join("truth.pgm"))?;
    Ok(())
}

fn read_artifact(dir: &Path, name: &str) -> Result<Grid> {
    Grid::read_csv(&dir.join(name))
}

/// One row of the comparison table, computed from a run directory's
/// artifacts alone.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub config: String,
    pub iterations: usize,
    pub final_e: f64,
    pub rel_error: f64,
    pub wrapped_residual: f64,
}

pub fn summarise_run(dir: &Path) -> Result<RunSummary> {
    let truth = read_artifact(dir, "truth.csv")?;
    let recon = read_artifact(dir, "recon.csv")?;
    let f1 = read_artifact(dir, "f1.csv")?;
    let f2 = read_artifact(dir, "f2.csv")?;

    let report_path = dir.join("report.txt");
    let report = fs::read_to_string(&report_path)
        .map_err(|_| Error::MissingArtifact(report_path.display().to_string()))?;
    let config = report
        .lines()
        .find_map(|l| l.strip_prefix("config: "))
        .ok_or_else(|| Error::parse("report.txt", "missing `config:` line"))?
        .to_string();

    let trace_path = dir.join("trace.csv");
    let trace = fs::read_to_string(&trace_path)
        .map_err(|_| Error::MissingArtifact(trace_path.display().to_string()))?;
    let iterations = trace.lines().skip(1).filter(|l| !l.trim().is_empty()).count();

    let obj = PhaseUnwrapObjective::new(GridPair::new(f1, f2)?);
    let final_e = obj.value(&recon)?;
    let rel_error = recon.sub(&truth)?.norm() / truth.norm();
    let wrapped_residual = {
        let dc = recon.map(f64::cos).sub(&truth.map(f64::cos))?;
        let ds = recon.map(f64::sin).sub(&truth.map(f64::sin))?;
        (dc.norm_sq() + ds.norm_sq()).sqrt()
    };
    Ok(RunSummary {
        config,
        iterations,
        final_e,
        rel_error,
        wrapped_residual,
    })
}

/// Aggregates completed run directories into a CSV table.
pub fn compare(dirs: &[impl AsRef<Path>]) -> Result<String> {
    if dirs.is_empty() {
        return Err(Error::param("runs", "need at least one run directory"));
    }
    let mut out = String::from("config,iterations,final_E,rel_error,wrapped_residual\n");
    for dir in dirs {
        let s = summarise_run(dir.as_ref())?;
        let _ = writeln!(
            out,
            "{},{},{:.10e},{:.10e},{:.10e}",
            s.config, s.iterations, s.final_e, s.rel_error, s.wrapped_residual
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_matches_reference_vectors() {
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 16294208416658607535);
        assert_eq!(r.next_u64(), 7960286522194355700);
        assert_eq!(r.next_u64(), 487617019471545679);
        let mut r = SplitMix64::new(1234567);
        assert_eq!(r.next_u64(), 6457827717110365317);
        assert_eq!(r.next_u64(), 3203168211198807973);
        assert_eq!(r.next_u64(), 9817491932198370423);
    }

    #[test]
    fn uniforms_live_in_half_open_unit_interval() {
        let mut r = SplitMix64::new(42);
        assert!((r.next_uniform() - 0.7415648787718234).abs() <= 1e-15);
        for _ in 0..10_000 {
            let u = r.next_uniform();
            assert!(u > 0.0 && u <= 1.0);
        }
    }

    #[test]
    fn gaussian_sampler_matches_reference_sequence() {
        let mut g = GaussianSampler::new(42);
        let expected = [
            0.41471975043153003,
            0.652681222151943,
            -0.8918862136277573,
            1.3268335628141055,
        ];
        for e in expected {
            let s = g.next();
            assert!((s - e).abs() <= 1e-13 * (1.0 + e.abs()), "{s} vs {e}");
        }
    }

    #[test]
    fn noise_fields_have_the_right_moments() {
        let noise = NoiseModel::new(0.15, 7).unwrap().sample_pair(256, 256);
        for field in [noise.first(), noise.second()] {
            let n = field.len() as f64;
            let mean: f64 = field.values().iter().sum::<f64>() / n;
            let var: f64 = field.values().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            assert!(mean.abs() < 0.005, "mean {mean}");
            assert!((var - 0.0225).abs() <= 0.05 * 0.0225, "variance {var}");
        }
    }

    #[test]
    fn noise_is_deterministic_per_seed() {
        let a = NoiseModel::new(0.15, 42).unwrap().sample_pair(16, 16);
        let b = NoiseModel::new(0.15, 42).unwrap().sample_pair(16, 16);
        assert_eq!(a, b);
        let c = NoiseModel::new(0.15, 43).unwrap().sample_pair(16, 16);
        assert_ne!(a, c);
    }

    #[test]
    fn peaks_centre_value() {
        // odd sizes place a sample exactly at the origin
        let g = peaks(65, 65, 1.0).unwrap();
        let expected = (8.0 / 3.0) / std::f64::consts::E;
        assert!((g.get(32, 32) - expected).abs() <= 1e-12);
        assert!((peaks_value(0.0, 0.0) - expected).abs() <= 1e-15);
    }

    #[test]
    fn peaks_scaling_is_linear() {
        let zero = peaks(8, 8, 0.0).unwrap();
        assert_eq!(zero.norm_sq(), 0.0);
        let one = peaks(8, 8, 1.0).unwrap();
        let two = peaks(8, 8, 2.0).unwrap();
        assert_eq!(one.scale(2.0), two);
    }

    #[test]
    fn peaks_is_not_square_symmetric() {
        // x runs along columns, y along rows; the surface is asymmetric
        let g = peaks(5, 9, 1.0).unwrap();
        assert_eq!(g.shape(), (5, 9));
        let gt = peaks(9, 5, 1.0).unwrap();
        assert!((g.get(0, 4) - gt.get(4, 0)).abs() > 1e-6 || g.get(0, 4) != 0.0);
    }

    #[test]
    fn peaks_rejects_degenerate_grids() {
        assert!(peaks(1, 8, 1.0).is_err());
        assert!(peaks(8, 1, 1.0).is_err());
    }

    #[test]
    fn threshold_arithmetic() {
        let t = discrepancy_threshold(0.15, 64, 64);
        assert!((t - 92.16).abs() <= 1e-10, "{t}");
        assert_eq!(discrepancy_threshold(0.0, 64, 64), 0.0);
        let double_rows = discrepancy_threshold(0.15, 128, 64);
        assert!((double_rows - 2.0 * t).abs() <= 1e-9);
    }

    #[test]
    fn noise_free_dataset_fits_exactly() {
        let cfg = ExperimentConfig {
            rows: 16,
            cols: 16,
            sigma: 0.0,
            ..ExperimentConfig::default()
        };
        let (truth, data) = make_dataset(&cfg).unwrap();
        let obj = PhaseUnwrapObjective::new(data);
        assert!(obj.value(&truth).unwrap() <= 1e-20);
    }

    #[test]
    fn dataset_energy_concentrates_near_threshold() {
        let cfg = ExperimentConfig::default(); // 64x64, sigma 0.15, seed 42
        let (truth, data) = make_dataset(&cfg).unwrap();
        let obj = PhaseUnwrapObjective::new(data);
        let e_truth = obj.value(&truth).unwrap();
        let threshold = discrepancy_threshold(cfg.sigma, cfg.rows, cfg.cols);
        assert!(e_truth <= threshold * 1.1, "E(truth) = {e_truth}");
        assert!(e_truth >= threshold * 0.8, "E(truth) = {e_truth}");
    }

    #[test]
    fn dataset_is_deterministic() {
        let cfg = ExperimentConfig {
            rows: 24,
            cols: 18,
            ..ExperimentConfig::default()
        };
        let (t1, d1) = make_dataset(&cfg).unwrap();
        let (t2, d2) = make_dataset(&cfg).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(d1, d2);
    }

    #[test]
    fn config_validation_rejects_nonsense() {
        let bad = ExperimentConfig {
            sigma: -0.1,
            ..ExperimentConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig {
            alpha: Some(0.0),
            ..ExperimentConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig {
            rows: 1,
            ..ExperimentConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn default_alphas_resolve_per_potential() {
        let mut cfg = ExperimentConfig::default();
        assert_eq!(cfg.resolved_alpha(), None);
        cfg.potential = PotentialKind::Sobolev;
        assert_eq!(cfg.resolved_alpha(), Some(1000.0));
        cfg.potential = PotentialKind::DctL1;
        assert_eq!(cfg.resolved_alpha(), Some(50.0));
        cfg.alpha = Some(7.5);
        assert_eq!(cfg.resolved_alpha(), Some(7.5));
    }

    #[test]
    fn pgm_rendering_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::new(1, 3, vec![0.0, 0.5, 1.0]).unwrap();
        let path = dir.path().join("img.pgm");
        write_pgm(&g, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "P2");
        assert_eq!(lines[1], "3 1");
        assert_eq!(lines[2], "255");
        assert_eq!(lines[3], "0 128 255");
        let meta = fs::read_to_string(dir.path().join("img.pgm.meta")).unwrap();
        assert!(meta.contains("rows: 1"));
        assert!(meta.contains("cols: 3"));
        assert!(meta.contains("min: 0"));
        assert!(meta.contains("max: 1"));
    }

    #[test]
    fn flat_grid_renders_without_dividing_by_zero() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::constant(2, 2, 4.0);
        write_pgm(&g, &dir.path().join("flat.pgm")).unwrap();
        let text = fs::read_to_string(dir.path().join("flat.pgm")).unwrap();
        assert!(text.ends_with("0 0\n0 0\n"));
    }

    #[test]
    fn small_experiment_round_trip_and_compare() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("gd-run");
        let cfg = ExperimentConfig {
            rows: 16,
            cols: 16,
            max_iters: 500,
            ..ExperimentConfig::default()
        };
        let outcome = run_experiment_to_dir(&cfg, &out).unwrap();
        assert_eq!(
            outcome.result.stop_reason,
            crate::solver::StopReason::Discrepancy
        );
        for name in [
            "truth.csv",
            "f1.csv",
            "f2.csv",
            "recon.csv",
            "trace.csv",
            "report.txt",
            "truth.pgm",
            "truth.pgm.meta",
            "recon.pgm",
            "recon.pgm.meta",
        ] {
            assert!(out.join(name).exists(), "{name} missing");
        }
        let recon = Grid::read_csv(&out.join("recon.csv")).unwrap();
        assert_eq!(recon, outcome.result.u_final);

        let table = compare(&[&out]).unwrap();
        let mut lines = table.lines();
        assert_eq!(
            lines.next().unwrap(),
            "config,iterations,final_E,rel_error,wrapped_residual"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("gd,"));
        assert_eq!(lines.next(), None);

        let summary = summarise_run(&out).unwrap();
        assert_eq!(summary.iterations, outcome.result.iterations);
        assert!(summary.final_e <= outcome.threshold);
    }

    #[test]
    fn compare_requires_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            compare(&[dir.path()]),
            Err(Error::MissingArtifact(_))
        ));
        let empty: [&Path; 0] = [];
        assert!(compare(&empty).is_err());
    }

    #[test]
    fn generate_writes_dataset_only() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("data");
        let cfg = ExperimentConfig {
            rows: 8,
            cols: 8,
            ..ExperimentConfig::default()
        };
        generate_to_dir(&cfg, &out).unwrap();
        assert!(out.join("truth.csv").exists());
        assert!(out.join("f1.csv").exists());
        assert!(out.join("f2.csv").exists());
        assert!(out.join("truth.pgm").exists());
        assert!(!out.join("recon.csv").exists());
    }
}
