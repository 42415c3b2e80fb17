//! Command-line entry points. Exit codes: 0 success, 2 configuration or
//! input error, 3 solver failure or non-convergence, 4 IO error.

use crate::config::{ConfigError, RunConfig, ScenarioKind};
use crate::formats::{
    from_json, to_json, to_json_compact, write_failures, write_profile, write_summary, DatasetFile, FormatError, Meta, RunRecord,
    ShapeRecord, SolutionFile, SolutionMeta,
};
use crate::harness::{self, estimate_sample, run_study, seeded_rng, InitKind, Sample};
use clap::{Parser, Subcommand, ValueEnum};
use rodgp_core::prior::{sample_prior, NodeGrid};
use rodgp_core::rodsim::{solve_static, Actuation};
use rodgp_core::solver::{gauss_newton, sample_posterior};
use rodgp_core::Pose;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "rodgp", version, about = "Continuum-robot shape estimation by sparse GP regression on SE(3)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Straight,
    Model,
}

impl From<InitArg> for InitKind {
    fn from(a: InitArg) -> Self {
        match a {
            InitArg::Straight => InitKind::Straight,
            InitArg::Model => InitKind::Model,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample actuations and write their ground-truth shapes.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
        /// Use zero tensions and no tip wrench for every run.
        #[arg(long)]
        zero_actuation: bool,
    },
    /// Estimate one run of a data set under the configured sensor scenario.
    Estimate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        run: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "straight")]
        init: InitArg,
        /// Lock the strain at the tip to the nominal strain.
        #[arg(long)]
        lock_tip_strain: bool,
    },
    /// Draw shapes from the prior.
    SamplePrior {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw shapes from the posterior stored in a solution file.
    SamplePosterior {
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run all sensor scenarios over a data set and write CSV reports.
    Evaluate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out_prefix: PathBuf,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<rodgp_core::Error> for CliError {
    fn from(e: rodgp_core::Error) -> Self {
        use rodgp_core::Error as E;
        match e {
            E::Lie(_) | E::NotPositiveDefinite { .. } | E::ShootingFailed { .. } | E::Diverged(_) => {
                CliError::Solver(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Core(c) => c.into(),
            FormatError::Io(_) => CliError::Io(e.to_string()),
            FormatError::Csv(ref c) if matches!(c.kind(), csv::ErrorKind::Io(_)) => CliError::Io(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, CliError> {
    Ok(match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn create(path: &Path) -> Result<std::fs::File, CliError> {
    std::fs::File::create(path).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn load_dataset(path: &Path) -> Result<DatasetFile, CliError> {
    from_json(&read(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Re-solves the ground truth of `run` and checks it against the stored tip.
fn ground_truth(cfg: &RunConfig, run: &RunRecord) -> Result<Sample, CliError> {
    let actuation = run.actuation();
    let shape = solve_static(&cfg.rod_properties(), &actuation)?;
    let stored = run.tip()?;
    let here = shape.tip().node.pose;
    if (stored.matrix() - here.matrix()).amax() > 1e-9 {
        return Err(CliError::Config(
            "data set was generated with a different rod configuration".to_string(),
        ));
    }
    Ok(Sample { actuation, shape })
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, count, out, zero_actuation } => {
            let cfg = load_config(&config)?;
            let data = if zero_actuation {
                let props = cfg.rod_properties();
                harness::solve_all(&props, vec![Actuation::zero(&props); count])?
            } else {
                harness::simulate_dataset(&cfg, count)?
            };
            // Ground truth at ten times the estimation node density.
            let length: f64 = cfg.rod.segment_lengths_m.iter().sum();
            let spacing = length / cfg.prior.k as f64 / 10.0;
            let file = DatasetFile {
                meta: Meta { seed: cfg.seed, config_hash: cfg.hash() },
                runs: data.iter().map(|s| RunRecord::new(&s.actuation, &s.shape, spacing)).collect(),
            };
            write(&out, to_json_compact(&file).as_bytes())
        }
        Command::Estimate { config, dataset, run, out, init, lock_tip_strain } => {
            let cfg = load_config(&config)?;
            let ds = load_dataset(&dataset)?;
            let record = ds.runs.get(run).ok_or_else(|| {
                CliError::Config(format!("run {run} out of range: data set has {} runs", ds.runs.len()))
            })?;
            let sample = ground_truth(&cfg, record)?;
            let mut locks = cfg.scenario.locks;
            locks.tip_strain |= lock_tip_strain;
            let scenario = cfg.scenario.kind;
            let est = estimate_sample(&cfg, &sample, scenario, run, &locks, init.into())?;
            let meta = SolutionMeta { seed: cfg.seed, config_hash: cfg.hash(), run_index: run, scenario, init: init.into() };
            let length = sample.shape.length();
            let file = SolutionFile::new(meta, &est, length, cfg.prior.k, cfg.prior.m)?;
            write(&out, to_json(&file).as_bytes())?;
            if !est.solution.converged {
                return Err(CliError::Solver(format!(
                    "no convergence after {} iterations; cost history {:?}",
                    est.solution.iterations, est.solution.cost_history
                )));
            }
            Ok(())
        }
        Command::SamplePrior { config, count, out } => {
            let cfg = load_config(&config)?;
            let length: f64 = cfg.rod.segment_lengths_m.iter().sum();
            let grid = NodeGrid::uniform(length, cfg.prior.k)?;
            let mut rng = seeded_rng(cfg.seed, "prior-samples", 0);
            let shapes = sample_prior(&cfg.hyper(), &grid, count, &mut rng, &Pose::identity())?;
            let hash = cfg.hash();
            let recs: Vec<ShapeRecord> = shapes.iter().map(|s| ShapeRecord::new(&hash, s)).collect();
            write(&out, to_json(&recs).as_bytes())
        }
        Command::SamplePosterior { solution, count, out } => {
            let file: SolutionFile = from_json(&read(&solution)?)
                .map_err(|e| CliError::Config(format!("{}: {e}", solution.display())))?;
            let sol = gauss_newton(&file.problem.problem()?)?;
            let mut rng = seeded_rng(file.meta.seed, "posterior-samples", file.meta.run_index as u64);
            let shapes = sample_posterior(&sol, count, &mut rng);
            let recs: Vec<ShapeRecord> = shapes.iter().map(|s| ShapeRecord::new(&file.meta.config_hash, s)).collect();
            write(&out, to_json(&recs).as_bytes())
        }
        Command::Evaluate { config, dataset, out_prefix } => {
            let cfg = load_config(&config)?;
            let ds = load_dataset(&dataset)?;
            let data = ds.runs.iter().map(|r| ground_truth(&cfg, r)).collect::<Result<Vec<_>, _>>()?;
            if data.is_empty() {
                return Err(CliError::Config("data set has no runs".to_string()));
            }
            let studies = ScenarioKind::ALL
                .iter()
                .map(|&k| run_study(&cfg, &data, k))
                .collect::<Result<Vec<_>, _>>()?;
            let configured = studies.iter().find(|s| s.scenario == cfg.scenario.kind).expect("all scenarios run");
            let path = |suffix: &str| {
                let mut p = out_prefix.clone().into_os_string();
                p.push(suffix);
                PathBuf::from(p)
            };
            write_profile(create(&path("_profile.csv"))?, configured)?;
            write_summary(create(&path("_summary.csv"))?, &studies, &cfg.hash())?;
            write_failures(create(&path("_failures.csv"))?, &studies)?;
            Ok(())
        }
    }
}
