//! Command-line front end: argument model, run configuration echo and the
//! five subcommands.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use adiabatic_search::experiments::{
    linear_comparison_trace, optimality_check_with, scaling_sweep_with, with_jobs, SearchOptions,
    DEFAULT_EPS_DIST, MIN_SWEEP_SIZES, OPTIMALITY_MAX_SIZE,
};
use adiabatic_search::output::{
    schedule_rows, spectrum_rows, sweep_rows, trajectory_rows, write_csv, LinePlot, Series,
    SCHEDULE_HEADER, SPECTRUM_HEADER, SWEEP_HEADER, TRAJECTORY_HEADER,
};
use adiabatic_search::{
    evolve, evolve_reduced, global_adiabatic_time, schedule_trace, spectrum_trace,
    IntegratorConfig, OptimalityReport, ScalingReport, Schedule, ScheduleFamily,
    SearchHamiltonian,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] adiabatic_search::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("json encoding failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Local,
    Linear,
}

impl From<FamilyArg> for ScheduleFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Local => ScheduleFamily::LocalAdiabatic,
            FamilyArg::Linear => ScheduleFamily::Linear,
        }
    }
}

fn power_of_two(raw: &str) -> std::result::Result<usize, String> {
    let n: usize = raw.parse().map_err(|_| format!("`{raw}` is not an integer"))?;
    if n >= 2 && n.is_power_of_two() {
        Ok(n)
    } else {
        Err(format!("N must be a power of two >= 2, got {n}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "adsearch", version, about = "Quantum search by local adiabatic evolution")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CommonArgs {
    /// Output directory, created if missing.
    #[arg(long, global = true, env = "ADSEARCH_OUT", default_value = ".")]
    pub out: PathBuf,
    /// Output formats; repeat the flag or separate with commas.
    #[arg(
        long,
        global = true,
        env = "ADSEARCH_FORMAT",
        value_delimiter = ',',
        default_value = "csv,json"
    )]
    pub format: Vec<Format>,
    /// Worker threads for parallel runs (all cores when omitted).
    #[arg(long, global = true, env = "ADSEARCH_JOBS")]
    pub jobs: Option<usize>,
    /// Seed for choosing the marked item at random (index 0 when omitted).
    #[arg(long, global = true, env = "ADSEARCH_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Instantaneous spectrum of H(s).
    Spectrum(SpectrumArgs),
    /// Local adiabatic schedule s(t).
    Schedule(ScheduleArgs),
    /// Evolve the uniform superposition under a schedule.
    Evolve(EvolveArgs),
    /// Minimal time per size and a power-law fit.
    Sweep(SweepArgs),
    /// Check the lower bound on the running time.
    Optimality(OptimalityArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IntegratorArgs {
    /// Fixed RK4 step.
    #[arg(long, env = "ADSEARCH_STEP", default_value_t = 0.01)]
    pub step: f64,
    /// Use the adaptive integrator with this local error tolerance.
    #[arg(long, env = "ADSEARCH_TOLERANCE")]
    pub tolerance: Option<f64>,
}

impl IntegratorArgs {
    fn config(&self) -> Result<IntegratorConfig> {
        let cfg = match self.tolerance {
            Some(tol) => IntegratorConfig::adaptive(tol),
            None => IntegratorConfig::fixed(self.step),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, env = "ADSEARCH_N", default_value = "64", value_parser = power_of_two)]
    pub n: usize,
    #[arg(long, env = "ADSEARCH_SAMPLES", default_value_t = 201)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScheduleArgs {
    #[arg(long, env = "ADSEARCH_N", default_value = "64", value_parser = power_of_two)]
    pub n: usize,
    #[arg(long, env = "ADSEARCH_EPS", default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, env = "ADSEARCH_SAMPLES", default_value_t = 201)]
    pub samples: usize,
    /// Also emit the straight line s = t/T over the same duration.
    #[arg(long, env = "ADSEARCH_WITH_LINEAR")]
    pub with_linear: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvolveArgs {
    #[arg(long, env = "ADSEARCH_N", default_value = "64", value_parser = power_of_two)]
    pub n: usize,
    #[arg(long, env = "ADSEARCH_SCHEDULE", value_enum, default_value_t = FamilyArg::Local)]
    pub schedule: FamilyArg,
    /// Adiabaticity parameter. Sets the duration when --time is absent.
    #[arg(long, env = "ADSEARCH_EPS", default_value_t = 0.1)]
    pub eps: f64,
    /// Total time; stretches the chosen schedule shape to this duration.
    #[arg(long, env = "ADSEARCH_TIME")]
    pub time: Option<f64>,
    #[arg(long, env = "ADSEARCH_SAMPLES", default_value_t = 101)]
    pub samples: usize,
    /// Largest N run in the full space; larger sizes use the 2-D reduction.
    #[arg(long, env = "ADSEARCH_FULL_MAX_N", default_value_t = 4096)]
    pub full_max_n: usize,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(
        long,
        env = "ADSEARCH_SIZES",
        value_delimiter = ',',
        default_value = "16,32,64,128,256,512",
        value_parser = power_of_two
    )]
    pub sizes: Vec<usize>,
    #[arg(long, env = "ADSEARCH_FAMILY", value_enum, default_value_t = FamilyArg::Local)]
    pub family: FamilyArg,
    #[arg(long, env = "ADSEARCH_TARGET", default_value_t = 0.9)]
    pub target: f64,
    /// Relative width of the bisection bracket on T.
    #[arg(long, env = "ADSEARCH_SEARCH_TOL", default_value_t = 1e-4)]
    pub search_tol: f64,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OptimalityArgs {
    #[arg(long, env = "ADSEARCH_N", default_value = "8", value_parser = power_of_two)]
    pub n: usize,
    #[arg(long, env = "ADSEARCH_SCHEDULE", value_enum, default_value_t = FamilyArg::Local)]
    pub schedule: FamilyArg,
    #[arg(long, env = "ADSEARCH_EPS", default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, env = "ADSEARCH_TIME")]
    pub time: Option<f64>,
    /// Pairwise distinguishability threshold.
    #[arg(long, env = "ADSEARCH_EPS_DIST", default_value_t = DEFAULT_EPS_DIST)]
    pub eps_dist: f64,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
}

/// Everything needed to reproduce a run; embedded in every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub version: &'static str,
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Marked item actually used, for runs with a single marked item.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marked: Option<usize>,
    pub params: serde_json::Value,
}

impl RunConfig {
    pub fn new(command: &'static str, common: &CommonArgs, params: &impl Serialize) -> Result<Self> {
        Ok(Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            common: common.clone(),
            marked: None,
            params: serde_json::to_value(params)?,
        })
    }

    fn csv_comments(&self) -> Result<Vec<String>> {
        Ok(vec![format!("config: {}", serde_json::to_string(self)?)])
    }
}

/// Marked index: 0 by default, uniform in `0..n` when a seed is given.
pub fn choose_marked(n: usize, seed: Option<u64>) -> usize {
    match seed {
        Some(seed) => ChaCha8Rng::seed_from_u64(seed).random_range(0..n),
        None => 0,
    }
}

struct Emitter<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl<'a> Emitter<'a> {
    fn new(dir: &'a Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir,
            written: Vec::new(),
        })
    }

    fn file(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
    ) -> Result<()> {
        let path = self.dir.join(name);
        let io_err = |source| CliError::Io {
            path: path.clone(),
            source,
        };
        let mut w = BufWriter::new(fs::File::create(&path).map_err(io_err)?);
        body(&mut w).and_then(|_| w.flush()).map_err(io_err)?;
        self.written.push(path);
        Ok(())
    }

    fn csv<R: AsRef<[f64]>>(&mut self, name: &str, cfg: &RunConfig, header: &[&str], rows: &[R]) -> Result<()> {
        let comments = cfg.csv_comments()?;
        self.file(name, |w| write_csv(w, &comments, header, rows))
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        self.file(name, |w| writeln!(w, "{text}"))
    }

    fn svg(&mut self, name: &str, plot: &LinePlot) -> Result<()> {
        let text = plot.to_svg();
        self.file(name, |w| w.write_all(text.as_bytes()))
    }
}

fn wants(common: &CommonArgs, f: Format) -> bool {
    common.format.contains(&f)
}

fn no_svg(common: &CommonArgs, command: &str) -> Result<()> {
    if wants(common, Format::Svg) {
        return Err(CliError::Usage(format!("svg output is not available for `{command}`")));
    }
    Ok(())
}

#[derive(Serialize)]
struct WithConfig<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    data: T,
}

/// Runs a parsed command line and returns the paths written, in write
/// order.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    if cli.common.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    with_jobs(cli.common.jobs, || match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(&cli.common, a),
        Command::Schedule(a) => cmd_schedule(&cli.common, a),
        Command::Evolve(a) => cmd_evolve(&cli.common, a),
        Command::Sweep(a) => cmd_sweep(&cli.common, a),
        Command::Optimality(a) => cmd_optimality(&cli.common, a),
    })
}

pub fn cmd_spectrum(common: &CommonArgs, args: &SpectrumArgs) -> Result<Vec<PathBuf>> {
    let cfg = RunConfig::new("spectrum", common, args)?;
    let points = spectrum_trace(args.n, args.samples)?;
    let mut out = Emitter::new(&common.out)?;
    if wants(common, Format::Csv) {
        out.csv("spectrum.csv", &cfg, &SPECTRUM_HEADER, &spectrum_rows(&points))?;
    }
    if wants(common, Format::Json) {
        out.json("spectrum.json", &WithConfig { config: &cfg, data: serde_json::json!({ "points": points }) })?;
    }
    if wants(common, Format::Svg) {
        let curve = |f: fn(&adiabatic_search::SpectrumPoint) -> f64| -> Vec<(f64, f64)> {
            points.iter().map(|p| (p.s, f(p))).collect()
        };
        let mut plot = LinePlot::new(&format!("Spectrum of H(s), N = {}", args.n), "s", "E")
            .with_series(Series::new("E0", curve(|p| p.e0), "#1f77b4"))
            .with_series(Series::new("E1", curve(|p| p.e1), "#d62728"));
        if args.n > 2 {
            plot = plot.with_series(Series::new("E2", curve(|p| p.e2), "#2ca02c"));
        }
        out.svg("spectrum.svg", &plot)?;
    }
    Ok(out.written)
}

pub fn cmd_schedule(common: &CommonArgs, args: &ScheduleArgs) -> Result<Vec<PathBuf>> {
    let cfg = RunConfig::new("schedule", common, args)?;
    let rows = schedule_trace(args.n, args.eps, args.samples)?;
    let linear = if args.with_linear {
        Some(linear_comparison_trace(args.n, args.eps, args.samples)?)
    } else {
        None
    };
    let mut out = Emitter::new(&common.out)?;
    if wants(common, Format::Csv) {
        out.csv("schedule.csv", &cfg, &SCHEDULE_HEADER, &schedule_rows(&rows))?;
        if let Some(lin) = &linear {
            out.csv("schedule_linear.csv", &cfg, &SCHEDULE_HEADER, &schedule_rows(lin))?;
        }
    }
    if wants(common, Format::Json) {
        let data = serde_json::json!({ "local": rows, "linear": linear });
        out.json("schedule.json", &WithConfig { config: &cfg, data })?;
    }
    if wants(common, Format::Svg) {
        let pts = |r: &[adiabatic_search::experiments::ScheduleRow]| r.iter().map(|p| (p.t, p.s)).collect();
        let mut plot = LinePlot::new(&format!("s(t), N = {}, eps = {}", args.n, args.eps), "t", "s")
            .with_series(Series::new("local", pts(&rows), "#1f77b4"));
        if let Some(lin) = &linear {
            plot = plot.with_series(Series::new("linear", pts(lin), "#7f7f7f").dashed());
        }
        out.svg("schedule.svg", &plot)?;
    }
    Ok(out.written)
}

fn build_schedule(n: usize, family: FamilyArg, eps: f64, time: Option<f64>) -> Result<Schedule> {
    Ok(match (family, time) {
        (family, Some(t)) => ScheduleFamily::from(family).with_duration(n, t)?,
        (FamilyArg::Local, None) => Schedule::local_adiabatic(n, eps)?,
        (FamilyArg::Linear, None) => adiabatic_search::linear_schedule(global_adiabatic_time(n, eps)?)?,
    })
}

#[derive(Serialize)]
struct EvolveSummary {
    engine: adiabatic_search::Engine,
    schedule: adiabatic_search::schedule::ScheduleDescriptor,
    success_probability: f64,
    ground_fidelity_final: f64,
    norm_drift_max: f64,
    norm_flagged: bool,
    leakage_max: f64,
    steps: usize,
}

pub fn cmd_evolve(common: &CommonArgs, args: &EvolveArgs) -> Result<Vec<PathBuf>> {
    no_svg(common, "evolve")?;
    let mut cfg = RunConfig::new("evolve", common, args)?;
    let marked = choose_marked(args.n, common.seed);
    cfg.marked = Some(marked);
    let h = SearchHamiltonian::from_size(args.n, marked)?;
    let sch = build_schedule(args.n, args.schedule, args.eps, args.time)?;
    let icfg = args.integrator.config()?.with_samples(args.samples);
    let res = if args.n <= args.full_max_n {
        evolve(&h, &sch, &icfg)?
    } else {
        evolve_reduced(&h, &sch, &icfg)?
    };
    let mut out = Emitter::new(&common.out)?;
    if wants(common, Format::Csv) {
        out.csv("trajectory.csv", &cfg, &TRAJECTORY_HEADER, &trajectory_rows(&res.trajectory))?;
    }
    if wants(common, Format::Json) {
        let data = EvolveSummary {
            engine: res.engine,
            schedule: sch.descriptor(),
            success_probability: res.success_probability,
            ground_fidelity_final: res.ground_fidelity_final,
            norm_drift_max: res.norm_drift_max,
            norm_flagged: res.norm_flagged,
            leakage_max: res.leakage_max,
            steps: res.steps,
        };
        out.json("summary.json", &WithConfig { config: &cfg, data })?;
    }
    Ok(out.written)
}

pub fn cmd_sweep(common: &CommonArgs, args: &SweepArgs) -> Result<Vec<PathBuf>> {
    if args.sizes.len() < MIN_SWEEP_SIZES {
        return Err(CliError::Usage(format!(
            "need ≥ {MIN_SWEEP_SIZES} sizes, got {}",
            args.sizes.len()
        )));
    }
    let cfg = RunConfig::new("sweep", common, args)?;
    let opts = SearchOptions {
        tolerance: args.search_tol,
        ..SearchOptions::default()
    };
    let report: ScalingReport = scaling_sweep_with(
        &args.sizes,
        args.family.into(),
        args.target,
        &args.integrator.config()?,
        &opts,
    )?;
    let mut out = Emitter::new(&common.out)?;
    if wants(common, Format::Json) {
        out.json("sweep.json", &WithConfig { config: &cfg, data: &report })?;
    }
    if wants(common, Format::Csv) {
        out.csv("sweep.csv", &cfg, &SWEEP_HEADER, &sweep_rows(&report))?;
    }
    if wants(common, Format::Svg) {
        let data: Vec<(f64, f64)> = report.points.iter().map(|p| (p.size as f64, p.t_min)).collect();
        let fit: Vec<(f64, f64)> = data
            .iter()
            .map(|&(x, _)| (x, report.prefactor * x.powf(report.exponent)))
            .collect();
        let plot = LinePlot::new(
            &format!("Minimal time, {} schedule, target {}", report.family, report.target_fidelity),
            "N",
            "T_min",
        )
        .with_series(Series::new("measured", data, "#1f77b4"))
        .with_series(Series::new(format!("fit N^{:.3}", report.exponent), fit, "#d62728").dashed())
        .log_log();
        out.svg("sweep.svg", &plot)?;
    }
    Ok(out.written)
}

pub fn cmd_optimality(common: &CommonArgs, args: &OptimalityArgs) -> Result<Vec<PathBuf>> {
    no_svg(common, "optimality")?;
    if args.n > OPTIMALITY_MAX_SIZE {
        return Err(CliError::Usage(format!(
            "optimality check needs N <= {OPTIMALITY_MAX_SIZE}, got {}",
            args.n
        )));
    }
    let cfg = RunConfig::new("optimality", common, args)?;
    let sch = build_schedule(args.n, args.schedule, args.eps, args.time)?;
    let report: OptimalityReport =
        optimality_check_with(args.n, &sch, &args.integrator.config()?, args.eps_dist)?;
    let mut out = Emitter::new(&common.out)?;
    if wants(common, Format::Json) {
        out.json("optimality.json", &WithConfig { config: &cfg, data: &report })?;
    }
    if wants(common, Format::Csv) {
        let row = [
            report.size as f64,
            report.total_time,
            report.d_final,
            report.integral_of_s,
            report.bound,
            report.margin,
            report.min_pairwise_distinguishability,
            report.eps_dist,
            report.lower_bound_time,
        ];
        let header = [
            "N",
            "T",
            "D_final",
            "integral_s",
            "bound",
            "margin",
            "min_pairwise_distinguishability",
            "eps_dist",
            "lower_bound_time",
        ];
        out.csv("optimality.csv", &cfg, &header, &[row])?;
    }
    Ok(out.written)
}
