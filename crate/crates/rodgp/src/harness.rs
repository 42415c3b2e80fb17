//! Simulation study: sensor scenarios over a data set of ground-truth shapes,
//! error profiles along the arclength, envelope calibration and the
//! initial-guess comparison.

use crate::config::{LockConfig, RunConfig, ScenarioKind};
use nalgebra::{Matrix3, Vector3, Vector6};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rodgp_core::interp::{query_cov, query_state};
use rodgp_core::measurement::Measurement;
use rodgp_core::prior::{prior_mean, NodeGrid, StateNode};
use rodgp_core::rng::derive_seed;
use rodgp_core::rodsim::{extract_measurements, sample_actuations, solve_static, Actuation, GroundTruthShape, RodProperties};
use rodgp_core::solver::{gauss_newton, Locks, Problem, Solution, NODE_MATCH_TOL, UNLOCKED};
use rodgp_core::{Pose, Result};
use serde::{Deserialize, Serialize};

/// One configuration of the data set.
#[derive(Clone, Debug)]
pub struct Sample {
    pub actuation: Actuation,
    pub shape: GroundTruthShape,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    /// Prior mean: the unloaded straight rod.
    Straight,
    /// Static model under the known tendon tensions, without the unknown tip wrench.
    Model,
}

pub fn seeded_rng(seed: u64, tag: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, tag, index))
}

/// Stream that corrupts the sensors of run `index` in `scenario`.
pub fn noise_rng(seed: u64, scenario: ScenarioKind, index: usize) -> ChaCha8Rng {
    seeded_rng(seed, &format!("noise/{}", scenario.name()), index as u64)
}

/// Samples `count` actuations and solves each for its equilibrium shape.
pub fn simulate_dataset(cfg: &RunConfig, count: usize) -> Result<Vec<Sample>> {
    let props = cfg.rod_properties();
    let mut rng = seeded_rng(cfg.seed, "dataset", 0);
    let acts = sample_actuations(&props, count, cfg.dataset.loaded_fraction, &mut rng)?;
    solve_all(&props, acts)
}

pub fn solve_all(props: &RodProperties, acts: Vec<Actuation>) -> Result<Vec<Sample>> {
    acts.into_par_iter()
        .map(|actuation| {
            let shape = solve_static(props, &actuation)?;
            Ok(Sample { actuation, shape })
        })
        .collect()
}

fn uniform(length: f64, k: usize) -> Vec<f64> {
    let mut s: Vec<f64> = (0..=k).map(|i| length * i as f64 / k as f64).collect();
    s[k] = length;
    s
}

/// Uniform `k`-interval grid over `[0, length]` with a node added at every
/// sensor arclength that does not already coincide with one.
pub fn estimation_grid(length: f64, k: usize, sensors: &[f64]) -> Result<NodeGrid> {
    let mut s = uniform(length, k);
    for &x in sensors {
        if !s.iter().any(|&y| (y - x).abs() <= NODE_MATCH_TOL) {
            s.push(x);
        }
    }
    s.sort_by(f64::total_cmp);
    NodeGrid::new(s)
}

/// The `k + 1` uniform nodes followed, interval by interval, by `m` equally
/// spaced interior points, in increasing order.
pub fn evaluation_arclengths(length: f64, k: usize, m: usize) -> Vec<f64> {
    let nodes = uniform(length, k);
    let mut out = Vec::with_capacity(k + 1 + m * k);
    for w in nodes.windows(2) {
        out.push(w[0]);
        for j in 1..=m {
            out.push(w[0] + (w[1] - w[0]) * j as f64 / (m + 1) as f64);
        }
    }
    out.push(length);
    out
}

pub fn node_locks(n: usize, locks: &LockConfig) -> Vec<Locks> {
    let mut out = vec![UNLOCKED; n];
    if locks.root_pose {
        out[0][..6].fill(true);
    }
    if locks.translational_strains {
        for l in out.iter_mut() {
            l[6..9].fill(true);
        }
    }
    if locks.tip_strain {
        out[n - 1][6..].fill(true);
    }
    out
}

/// Initial guess on `grid`. Locked strain components are set to the nominal
/// strain and a locked root pose to the identity.
pub fn initial_guess(
    cfg: &RunConfig,
    kind: InitKind,
    grid: &NodeGrid,
    tensions: &[f64],
    locks: &[Locks],
) -> Result<Vec<StateNode>> {
    let hyper = cfg.hyper();
    let mut nodes = match kind {
        InitKind::Straight => prior_mean(&hyper, grid, &Pose::identity()),
        InitKind::Model => {
            let props = cfg.rod_properties();
            let act = Actuation { tensions: tensions.to_vec(), tip_wrench: Vector6::zeros() };
            let shape = solve_static(&props, &act)?;
            grid.arclengths()
                .iter()
                .map(|&s| {
                    let n = shape.state_at(s.min(shape.length()))?.node;
                    Ok(StateNode::new(s, n.pose, n.strain))
                })
                .collect::<Result<_>>()?
        }
    };
    let eps_bar = hyper.eps_bar().0;
    for (node, lock) in nodes.iter_mut().zip(locks) {
        if lock[..6].iter().all(|&l| l) {
            node.pose = Pose::identity();
        }
        for i in 0..6 {
            if lock[6 + i] {
                node.strain.0[i] = eps_bar[i];
            }
        }
    }
    Ok(nodes)
}

/// Everything produced by one estimation run.
#[derive(Clone, Debug)]
pub struct Estimate {
    pub measurements: Vec<Measurement>,
    pub problem: Problem,
    pub solution: Solution,
}

/// Estimates the shape behind `measurements` with the configured prior,
/// locks and solver settings.
pub fn estimate(
    cfg: &RunConfig,
    measurements: Vec<Measurement>,
    locks: &LockConfig,
    init: InitKind,
    tensions: &[f64],
) -> Result<Estimate> {
    let length: f64 = cfg.rod.segment_lengths_m.iter().sum();
    let sensors: Vec<f64> = measurements.iter().map(|m| m.s()).collect();
    let grid = estimation_grid(length, cfg.prior.k, &sensors)?;
    let locks = node_locks(grid.len(), locks);
    let guess = initial_guess(cfg, init, &grid, tensions, &locks)?;
    let problem = Problem::new(grid, cfg.hyper(), measurements.clone(), locks, guess, cfg.convergence())?;
    let solution = gauss_newton(&problem)?;
    Ok(Estimate { measurements, problem, solution })
}

/// Corrupts the sensors of `sample` for `scenario` and estimates.
pub fn estimate_sample(
    cfg: &RunConfig,
    sample: &Sample,
    scenario: ScenarioKind,
    index: usize,
    locks: &LockConfig,
    init: InitKind,
) -> Result<Estimate> {
    let props = cfg.rod_properties();
    let mut rng = noise_rng(cfg.seed, scenario, index);
    let meas = extract_measurements(&sample.shape, &props, scenario.into(), &cfg.sensor_noise(), &mut rng)?;
    estimate(cfg, meas, locks, init, &sample.actuation.tensions)
}

/// Position error in metres and orientation error in degrees: the distance
/// between translations and the rotation angle of `Ĉ·Cᵀ`.
pub fn pose_errors(estimate: &StateNode, truth: &StateNode) -> (f64, f64) {
    let dp = (estimate.pose.translation() - truth.pose.translation()).norm();
    let rel: Matrix3<f64> = estimate.pose.rotation() * truth.pose.rotation().transpose();
    let c = ((rel.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    (dp, c.acos().to_degrees())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointError {
    pub s: f64,
    pub position_m: f64,
    pub angle_deg: f64,
    /// Whether every coordinate of the true position lies within three
    /// standard deviations of the estimate; `None` where the position is locked.
    pub inside_3sigma: Option<bool>,
    /// Trace of the world-frame position covariance.
    pub position_var: f64,
}

/// Errors of `solution` against `shape` at each arclength in `at`.
pub fn evaluate_solution(solution: &Solution, shape: &GroundTruthShape, at: &[f64]) -> Result<Vec<PointError>> {
    at.iter()
        .map(|&s| {
            let est = query_state(solution, s)?;
            let cov = query_cov(solution, s)?;
            let truth = shape.state_at(s)?.node;
            let (position_m, angle_deg) = pose_errors(&est, &truth);
            let c = est.pose.rotation();
            let p = c * cov.fixed_view::<3, 3>(0, 0) * c.transpose();
            let e: Vector3<f64> = truth.pose.translation() - est.pose.translation();
            let inside_3sigma = if p.diagonal().iter().all(|&v| v <= 0.0) {
                None
            } else {
                Some((0..3).all(|i| e[i].abs() <= 3.0 * p[(i, i)].max(0.0).sqrt()))
            };
            Ok(PointError { s, position_m, angle_deg, inside_3sigma, position_var: p.trace() })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    /// Mean, sample standard deviation, minimum and maximum. Empty input
    /// gives NaN statistics.
    pub fn of(values: &[f64]) -> Stats {
        let n = values.len();
        if n == 0 {
            return Stats { mean: f64::NAN, std: f64::NAN, min: f64::NAN, max: f64::NAN };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Stats {
            mean,
            std: var.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileRow {
    pub s: f64,
    pub position: Stats,
    pub angle: Stats,
}

#[derive(Clone, Debug)]
pub struct RunEval {
    pub index: usize,
    pub points: Vec<PointError>,
    pub iterations: usize,
    pub final_cost: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub index: usize,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct StudyResult {
    pub scenario: ScenarioKind,
    pub profile: Vec<ProfileRow>,
    pub runs: Vec<RunEval>,
    pub failures: Vec<Failure>,
}

impl StudyResult {
    pub fn tip(&self) -> &ProfileRow {
        self.profile.last().expect("profile has at least the root and tip")
    }

    /// Share of evaluation points, locked ones excluded, whose true position
    /// lies inside the 3σ envelope.
    pub fn envelope_coverage(&self) -> f64 {
        let flags: Vec<bool> = self
            .runs
            .iter()
            .flat_map(|r| r.points.iter().filter_map(|p| p.inside_3sigma))
            .collect();
        flags.iter().filter(|&&b| b).count() as f64 / flags.len() as f64
    }

    pub fn mean_iterations(&self) -> f64 {
        self.runs.iter().map(|r| r.iterations as f64).sum::<f64>() / self.runs.len() as f64
    }

    /// Profile row at arclength `s`.
    pub fn row_at(&self, s: f64) -> Option<&ProfileRow> {
        self.profile.iter().find(|r| (r.s - s).abs() <= NODE_MATCH_TOL)
    }
}

/// Runs `scenario` on every sample, evaluating the `K + 1` nodes and `M`
/// interpolated states per interval against the ground truth. Runs that
/// fail or do not converge are reported and left out of the profile.
pub fn run_study(cfg: &RunConfig, data: &[Sample], scenario: ScenarioKind) -> Result<StudyResult> {
    let length: f64 = cfg.rod.segment_lengths_m.iter().sum();
    run_study_at(cfg, data, scenario, &evaluation_arclengths(length, cfg.prior.k, cfg.prior.m))
}

/// [`run_study`] evaluated at the arclengths `at`.
pub fn run_study_at(cfg: &RunConfig, data: &[Sample], scenario: ScenarioKind, at: &[f64]) -> Result<StudyResult> {
    let outcomes: Vec<core::result::Result<RunEval, Failure>> = data
        .par_iter()
        .enumerate()
        .map(|(index, sample)| {
            let fail = |reason: String| Failure { index, reason };
            let est = estimate_sample(cfg, sample, scenario, index, &cfg.scenario.locks, InitKind::Straight)
                .map_err(|e| fail(e.to_string()))?;
            let sol = &est.solution;
            if !sol.converged {
                return Err(fail(format!("no convergence after {} iterations", sol.iterations)));
            }
            let points = evaluate_solution(sol, &sample.shape, at).map_err(|e| fail(e.to_string()))?;
            Ok(RunEval {
                index,
                points,
                iterations: sol.iterations,
                final_cost: *sol.cost_history.last().unwrap(),
            })
        })
        .collect();
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => runs.push(r),
            Err(f) => failures.push(f),
        }
    }
    let profile = at
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let pos: Vec<f64> = runs.iter().map(|r| r.points[i].position_m).collect();
            let ang: Vec<f64> = runs.iter().map(|r| r.points[i].angle_deg).collect();
            ProfileRow { s, position: Stats::of(&pos), angle: Stats::of(&ang) }
        })
        .collect();
    Ok(StudyResult { scenario, profile, runs, failures })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitRun {
    pub init: InitKind,
    pub final_cost: f64,
    pub iterations: usize,
    pub converged: bool,
    pub tip_position_m: f64,
    pub tip_angle_deg: f64,
    /// Largest measurement residual at a measured node, in units of the
    /// measurement model's standard deviation.
    pub max_residual_sigma: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialGuessReport {
    pub straight: InitRun,
    pub model: InitRun,
}

/// A strongly bent configuration: both segments pulled to the maximum
/// tension on the same side, with a 0.1 N tip force that curls the tip
/// further around.
pub fn curved_loaded_actuation(props: &RodProperties) -> Actuation {
    let mut act = Actuation::zero(props);
    for (i, t) in props.tendons.iter().enumerate() {
        if t.theta == 0.0 {
            act.tensions[i] = props.max_tension;
        }
    }
    act.tip_wrench = Vector6::new(0.0, 0.0, 0.1, 0.0, 0.0, 0.0);
    act
}

fn max_residual_sigma(est: &Estimate) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for m in &est.measurements {
        let k = est.solution.grid.find(m.s(), NODE_MATCH_TOL).expect("measurements sit on nodes");
        let e = m.error(&est.solution.nodes[k])?;
        let rows: Vec<usize> = (0..6).filter(|&i| m.mask()[i]).collect();
        for (j, &i) in rows.iter().enumerate() {
            worst = worst.max(e[j].abs() / m.cov()[(i, i)].sqrt());
        }
    }
    Ok(worst)
}

/// Estimates one configuration twice, from the straight prior mean and from
/// the static model under the known tensions, and compares the outcomes.
pub fn initial_guess_study(cfg: &RunConfig, actuation: &Actuation) -> Result<InitialGuessReport> {
    let props = cfg.rod_properties();
    let shape = solve_static(&props, actuation)?;
    let sample = Sample { actuation: actuation.clone(), shape };
    let mut rng = seeded_rng(cfg.seed, "initial-guess", 0);
    let meas = extract_measurements(&sample.shape, &props, cfg.scenario.kind.into(), &cfg.sensor_noise(), &mut rng)?;
    let run = |init: InitKind| -> Result<InitRun> {
        let est = estimate(cfg, meas.clone(), &cfg.scenario.locks, init, &actuation.tensions)?;
        let sol = &est.solution;
        let tip = sol.nodes.last().unwrap();
        let (tip_position_m, tip_angle_deg) = pose_errors(tip, &sample.shape.tip().node);
        Ok(InitRun {
            init,
            final_cost: *sol.cost_history.last().unwrap(),
            iterations: sol.iterations,
            converged: sol.converged,
            tip_position_m,
            tip_angle_deg,
            max_residual_sigma: max_residual_sigma(&est)?,
        })
    };
    Ok(InitialGuessReport { straight: run(InitKind::Straight)?, model: run(InitKind::Model)? })
}
