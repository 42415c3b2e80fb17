//! JSON and CSV file formats. Poses are row-major 4×4 matrices (16 numbers)
//! and covariances row-major 12×12 matrices (144 numbers).

use crate::config::ScenarioKind;
use crate::harness::{Estimate, InitKind, StudyResult};
use nalgebra::{Matrix6, Vector6};
use rodgp_core::interp::{query_cov, query_state};
use rodgp_core::measurement::{Mask, Measurement, PoseMeasurement, StrainMeasurement};
use rodgp_core::prior::{NodeGrid, PriorHyperparams, StateNode};
use rodgp_core::rodsim::{Actuation, GroundTruthShape};
use rodgp_core::solver::{Convergence, Locks, Problem};
use rodgp_core::{Matrix12, Pose, Twist};
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Core(#[from] rodgp_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn malformed(e: impl std::fmt::Display) -> FormatError {
    FormatError::Malformed(e.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    pub s: f64,
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    pub eps: [f64; 6],
    pub sigma: [f64; 6],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    /// Tendon tensions in newtons, in tendon order.
    pub actuation: Vec<f64>,
    pub tip_wrench: [f64; 6],
    pub states: Vec<StateRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetFile {
    pub meta: Meta,
    pub runs: Vec<RunRecord>,
}

impl RunRecord {
    /// Keeps enough integration points that consecutive stored states are at
    /// most `max_spacing` apart, plus both sides of every load discontinuity
    /// and the tip.
    pub fn new(act: &Actuation, shape: &GroundTruthShape, max_spacing: f64) -> Self {
        let samples = shape.samples();
        let n = samples.len();
        let mut keep = vec![false; n];
        let mut last = f64::NEG_INFINITY;
        for i in 0..n {
            let s = samples[i].node.s;
            let boundary = (i > 0 && samples[i - 1].node.s == s) || (i + 1 < n && samples[i + 1].node.s == s);
            let must = i + 1 == n || samples[i + 1].node.s - last > max_spacing;
            if i == 0 || boundary || must {
                keep[i] = true;
                last = s;
            }
        }
        RunRecord {
            actuation: act.tensions.clone(),
            tip_wrench: act.tip_wrench.into(),
            states: samples
                .iter()
                .zip(keep)
                .filter(|(_, k)| *k)
                .map(|(smp, _)| StateRecord {
                    s: smp.node.s,
                    t: smp.node.pose.to_row_major().to_vec(),
                    eps: smp.node.strain.to_array(),
                    sigma: smp.sigma.into(),
                })
                .collect(),
        }
    }

    pub fn actuation(&self) -> Actuation {
        Actuation { tensions: self.actuation.clone(), tip_wrench: Vector6::from(self.tip_wrench) }
    }

    pub fn tip(&self) -> Result<Pose, FormatError> {
        pose_from(&self.states.last().ok_or_else(|| malformed("run has no states"))?.t)
    }
}

fn pose_from(v: &[f64]) -> Result<Pose, FormatError> {
    let a: [f64; 16] = v.try_into().map_err(|_| malformed("pose needs 16 entries"))?;
    Ok(Pose::from_row_major(&a).map_err(rodgp_core::Error::from)?)
}

fn row_major12(m: &Matrix12) -> Vec<f64> {
    (0..12).flat_map(|i| (0..12).map(move |j| m[(i, j)])).collect()
}

fn row_major6(m: &Matrix6<f64>) -> [f64; 36] {
    core::array::from_fn(|k| m[(k / 6, k % 6)])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateRecord {
    pub s: f64,
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    pub eps: [f64; 6],
    pub cov: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub s: f64,
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    pub eps: [f64; 6],
}

impl NodeRecord {
    pub fn new(n: &StateNode) -> Self {
        NodeRecord { s: n.s, t: n.pose.to_row_major().to_vec(), eps: n.strain.to_array() }
    }

    pub fn node(&self) -> Result<StateNode, FormatError> {
        Ok(StateNode::new(self.s, pose_from(&self.t)?, Twist::from_array(self.eps)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementKind {
    Pose,
    Strain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementRecord {
    pub s: f64,
    pub kind: MeasurementKind,
    /// Row-major pose (16) or strain (6).
    pub value: Vec<f64>,
    pub cov: Vec<f64>,
    pub mask: Mask,
}

impl MeasurementRecord {
    pub fn new(m: &Measurement) -> Self {
        let (kind, value) = match m {
            Measurement::Pose(p) => (MeasurementKind::Pose, p.pose.to_row_major().to_vec()),
            Measurement::Strain(e) => (MeasurementKind::Strain, e.strain.to_array().to_vec()),
        };
        MeasurementRecord { s: m.s(), kind, value, cov: row_major6(m.cov()).to_vec(), mask: *m.mask() }
    }

    pub fn measurement(&self) -> Result<Measurement, FormatError> {
        let c: [f64; 36] = self.cov.as_slice().try_into().map_err(|_| malformed("covariance needs 36 entries"))?;
        let cov = Matrix6::from_fn(|i, j| c[6 * i + j]);
        Ok(match self.kind {
            MeasurementKind::Pose => Measurement::Pose(PoseMeasurement::new(self.s, pose_from(&self.value)?, cov, self.mask)?),
            MeasurementKind::Strain => {
                let e: [f64; 6] = self.value.as_slice().try_into().map_err(|_| malformed("strain needs 6 entries"))?;
                Measurement::Strain(StrainMeasurement::new(self.s, Twist::from_array(e), cov, self.mask)?)
            }
        })
    }
}

/// Everything needed to rebuild the estimation problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemRecord {
    pub qc: Vec<f64>,
    pub eps_bar: [f64; 6],
    pub grid: Vec<f64>,
    pub measurements: Vec<MeasurementRecord>,
    pub locks: Vec<Locks>,
    pub initial_guess: Vec<NodeRecord>,
    pub max_iters: usize,
    pub tol: f64,
}

impl ProblemRecord {
    pub fn new(p: &Problem) -> Self {
        ProblemRecord {
            qc: row_major6(p.hyper().qc()).to_vec(),
            eps_bar: p.hyper().eps_bar().to_array(),
            grid: p.grid().arclengths().to_vec(),
            measurements: p.measurements().map(|(_, m)| MeasurementRecord::new(m)).collect(),
            locks: p.locks().to_vec(),
            initial_guess: p.initial_guess().iter().map(NodeRecord::new).collect(),
            max_iters: p.convergence.max_iters,
            tol: p.convergence.step_norm_tol,
        }
    }

    pub fn problem(&self) -> Result<Problem, FormatError> {
        let q: [f64; 36] = self.qc.as_slice().try_into().map_err(|_| malformed("Qc needs 36 entries"))?;
        let hyper = PriorHyperparams::new(Matrix6::from_fn(|i, j| q[6 * i + j]), Twist::from_array(self.eps_bar))?;
        let meas = self.measurements.iter().map(|m| m.measurement()).collect::<Result<Vec<_>, _>>()?;
        let init = self.initial_guess.iter().map(|n| n.node()).collect::<Result<Vec<_>, _>>()?;
        Ok(Problem::new(
            NodeGrid::new(self.grid.clone())?,
            hyper,
            meas,
            self.locks.clone(),
            init,
            Convergence { max_iters: self.max_iters, step_norm_tol: self.tol },
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionMeta {
    pub seed: u64,
    pub config_hash: String,
    pub run_index: usize,
    pub scenario: ScenarioKind,
    pub init: InitKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub meta: SolutionMeta,
    pub nodes: Vec<EstimateRecord>,
    pub interpolated: Vec<EstimateRecord>,
    pub cost_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub problem: ProblemRecord,
}

fn estimate_record(est: &Estimate, s: f64) -> Result<EstimateRecord, FormatError> {
    let n = query_state(&est.solution, s)?;
    Ok(EstimateRecord {
        s,
        t: n.pose.to_row_major().to_vec(),
        eps: n.strain.to_array(),
        cov: row_major12(&query_cov(&est.solution, s)?),
    })
}

impl SolutionFile {
    /// Reports the `K + 1` uniform nodes in `nodes` and the interior
    /// evaluation points in `interpolated`.
    pub fn new(meta: SolutionMeta, est: &Estimate, length: f64, k: usize, m: usize) -> Result<Self, FormatError> {
        let at = crate::harness::evaluation_arclengths(length, k, m);
        let mut nodes = Vec::with_capacity(k + 1);
        let mut interpolated = Vec::with_capacity(m * k);
        for (i, &s) in at.iter().enumerate() {
            let rec = estimate_record(est, s)?;
            if i % (m + 1) == 0 {
                nodes.push(rec);
            } else {
                interpolated.push(rec);
            }
        }
        let sol = &est.solution;
        Ok(SolutionFile {
            meta,
            nodes,
            interpolated,
            cost_history: sol.cost_history.clone(),
            iterations: sol.iterations,
            converged: sol.converged,
            problem: ProblemRecord::new(&est.problem),
        })
    }
}

/// One sampled shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeRecord {
    pub config_hash: String,
    pub states: Vec<NodeRecord>,
}

impl ShapeRecord {
    pub fn new(config_hash: &str, nodes: &[StateNode]) -> Self {
        ShapeRecord { config_hash: config_hash.to_string(), states: nodes.iter().map(NodeRecord::new).collect() }
    }
}

/// Compact JSON, newline-terminated.
pub fn to_json_compact<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("records serialize");
    s.push('\n');
    s
}

/// Indented JSON, newline-terminated.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

pub fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(malformed)
}

pub const PROFILE_HEADER: [&str; 9] = [
    "s_m",
    "pos_err_mean_m",
    "pos_err_std_m",
    "pos_err_min_m",
    "pos_err_max_m",
    "ang_err_mean_deg",
    "ang_err_std_deg",
    "ang_err_min_deg",
    "ang_err_max_deg",
];

pub fn write_profile<W: Write>(out: W, study: &StudyResult) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PROFILE_HEADER)?;
    for r in &study.profile {
        let (p, a) = (r.position, r.angle);
        w.write_record([r.s, p.mean, p.std, p.min, p.max, a.mean, a.std, a.min, a.max].map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub const SUMMARY_HEADER: [&str; 10] = [
    "scenario",
    "runs",
    "failures",
    "tip_pos_err_mean_m",
    "tip_pos_err_std_m",
    "tip_ang_err_mean_deg",
    "tip_ang_err_std_deg",
    "mean_iterations",
    "envelope_coverage",
    "config_hash",
];

pub fn write_summary<W: Write>(out: W, studies: &[StudyResult], config_hash: &str) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for st in studies {
        let tip = st.tip();
        w.write_record([
            st.scenario.name().to_string(),
            st.runs.len().to_string(),
            st.failures.len().to_string(),
            tip.position.mean.to_string(),
            tip.position.std.to_string(),
            tip.angle.mean.to_string(),
            tip.angle.std.to_string(),
            st.mean_iterations().to_string(),
            st.envelope_coverage().to_string(),
            config_hash.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_failures<W: Write>(out: W, studies: &[StudyResult]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario", "run", "reason"])?;
    for st in studies {
        for f in &st.failures {
            w.write_record([st.scenario.name(), &f.index.to_string(), &f.reason])?;
        }
    }
    w.flush()?;
    Ok(())
}
