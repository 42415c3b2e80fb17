//! Run configuration: one JSON document drives simulation, estimation and
//! evaluation. Missing keys take the simulation-study defaults and unknown
//! keys are rejected.

use nalgebra::Matrix6;
use rodgp_core::prior::PriorHyperparams;
use rodgp_core::rodsim::{RodProperties, Scenario, SensorNoise, Tendon};
use rodgp_core::solver::Convergence;
use rodgp_core::Twist;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: line {line}: `{key}` {message}")]
    Invalid {
        path: String,
        line: usize,
        key: String,
        message: String,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub rod: RodConfig,
    pub prior: PriorConfig,
    pub noise: NoiseConfig,
    pub scenario: ScenarioConfig,
    pub solver: SolverConfig,
    pub dataset: DatasetConfig,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rod: RodConfig::default(),
            prior: PriorConfig::default(),
            noise: NoiseConfig::default(),
            scenario: ScenarioConfig::default(),
            solver: SolverConfig::default(),
            dataset: DatasetConfig::default(),
            seed: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TendonConfig {
    pub segment: usize,
    pub theta_rad: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RodConfig {
    #[serde(rename = "E_pa")]
    pub e_pa: f64,
    pub poisson: f64,
    pub diameter_m: f64,
    pub segment_lengths_m: Vec<f64>,
    pub pitch_radius_m: f64,
    pub disks_per_segment: usize,
    pub tendons: Vec<TendonConfig>,
    pub max_tension_n: f64,
    pub steps_per_segment: usize,
}

impl Default for RodConfig {
    fn default() -> Self {
        RodConfig::from(&RodProperties::default())
    }
}

impl From<&RodProperties> for RodConfig {
    fn from(p: &RodProperties) -> Self {
        RodConfig {
            e_pa: p.youngs_modulus,
            poisson: p.poisson,
            diameter_m: p.diameter,
            segment_lengths_m: p.segment_lengths.clone(),
            pitch_radius_m: p.pitch_radius,
            disks_per_segment: p.disks_per_segment,
            tendons: p
                .tendons
                .iter()
                .map(|t| TendonConfig { segment: t.segment, theta_rad: t.theta })
                .collect(),
            max_tension_n: p.max_tension,
            steps_per_segment: p.steps_per_segment,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PriorConfig {
    pub qc_diag: [f64; 6],
    pub eps_bar: [f64; 6],
    /// Number of estimation intervals; the grid has `K + 1` nodes.
    #[serde(rename = "K")]
    pub k: usize,
    /// Interpolated states reported inside each interval.
    #[serde(rename = "M")]
    pub m: usize,
}

impl Default for PriorConfig {
    fn default() -> Self {
        PriorConfig {
            qc_diag: [1.0, 1.0, 1.0, 100.0, 100.0, 100.0],
            eps_bar: [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            k: 29,
            m: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub sigma_t_m: f64,
    pub sigma_a_rad: f64,
    pub sigma_nu: f64,
    pub sigma_omega: f64,
    pub r_inflation: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        let n = SensorNoise::default();
        NoiseConfig {
            sigma_t_m: n.sigma_t,
            sigma_a_rad: n.sigma_a,
            sigma_nu: n.sigma_nu,
            sigma_omega: n.sigma_omega,
            r_inflation: n.r_inflation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    PoseAtSegmentEnds,
    StrainAtDisks,
    StrainPlusTipPose,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [
        ScenarioKind::PoseAtSegmentEnds,
        ScenarioKind::StrainAtDisks,
        ScenarioKind::StrainPlusTipPose,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::PoseAtSegmentEnds => "pose_at_segment_ends",
            ScenarioKind::StrainAtDisks => "strain_at_disks",
            ScenarioKind::StrainPlusTipPose => "strain_plus_tip_pose",
        }
    }
}

impl From<ScenarioKind> for Scenario {
    fn from(k: ScenarioKind) -> Self {
        match k {
            ScenarioKind::PoseAtSegmentEnds => Scenario::PoseAtSegmentEnds,
            ScenarioKind::StrainAtDisks => Scenario::StrainAtDisks,
            ScenarioKind::StrainPlusTipPose => Scenario::StrainPlusTipPose,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LockConfig {
    pub root_pose: bool,
    pub tip_strain: bool,
    pub translational_strains: bool,
}

impl Default for LockConfig {
    fn default() -> Self {
        LockConfig { root_pose: true, tip_strain: false, translational_strains: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    #[serde(rename = "type")]
    pub kind: ScenarioKind,
    pub locks: LockConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig { kind: ScenarioKind::PoseAtSegmentEnds, locks: LockConfig::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let c = Convergence::default();
        SolverConfig { max_iters: c.max_iters, tol: c.step_norm_tol }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatasetConfig {
    /// Share of sampled configurations that carry a random tip wrench.
    pub loaded_fraction: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig { loaded_fraction: 0.5 }
    }
}

/// A semantic problem with one key, before it is located in the source text.
struct Violation {
    section: &'static str,
    key: &'static str,
    message: String,
}

fn violation(section: &'static str, key: &'static str, message: impl Into<String>) -> Violation {
    Violation { section, key, message: message.into() }
}

impl RunConfig {
    /// Parses and validates a configuration document. `path` only labels
    /// error messages.
    pub fn from_json(text: &str, path: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_string(),
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
        if let Err(v) = cfg.check() {
            return Err(ConfigError::Invalid {
                path: path.to_string(),
                line: locate(text, v.section, v.key),
                key: if v.section.is_empty() { v.key.to_string() } else { format!("{}.{}", v.section, v.key) },
                message: v.message,
            });
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let label = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: label.clone(), source })?;
        Self::from_json(&text, &label)
    }

    fn check(&self) -> Result<(), Violation> {
        let r = &self.rod;
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(r.e_pa) {
            return Err(violation("rod", "E_pa", "must be positive"));
        }
        if !(r.poisson >= 0.0 && r.poisson < 0.5) {
            return Err(violation("rod", "poisson", "must lie in [0, 0.5)"));
        }
        if !positive(r.diameter_m) {
            return Err(violation("rod", "diameter_m", "must be positive"));
        }
        if r.segment_lengths_m.is_empty() || !r.segment_lengths_m.iter().all(|&l| positive(l)) {
            return Err(violation("rod", "segment_lengths_m", "must be a nonempty list of positive lengths"));
        }
        if !positive(r.pitch_radius_m) {
            return Err(violation("rod", "pitch_radius_m", "must be positive"));
        }
        if r.disks_per_segment == 0 {
            return Err(violation("rod", "disks_per_segment", "must be at least 1"));
        }
        if let Some(t) = r.tendons.iter().find(|t| t.segment >= r.segment_lengths_m.len() || !t.theta_rad.is_finite()) {
            return Err(violation("rod", "tendons", format!("entry for segment {} has no matching segment", t.segment)));
        }
        if !(r.max_tension_n >= 0.0 && r.max_tension_n.is_finite()) {
            return Err(violation("rod", "max_tension_n", "must be nonnegative"));
        }
        if r.steps_per_segment < rodgp_core::rodsim::MIN_STEPS_PER_SEGMENT {
            return Err(violation(
                "rod",
                "steps_per_segment",
                format!("must be at least {}", rodgp_core::rodsim::MIN_STEPS_PER_SEGMENT),
            ));
        }
        let p = &self.prior;
        if !p.qc_diag.iter().all(|&q| positive(q)) {
            return Err(violation("prior", "qc_diag", "entries must be positive"));
        }
        if !p.eps_bar.iter().all(|e| e.is_finite()) {
            return Err(violation("prior", "eps_bar", "entries must be finite"));
        }
        if p.k == 0 {
            return Err(violation("prior", "K", "must be at least 1"));
        }
        let n = &self.noise;
        for (key, v) in [
            ("sigma_t_m", n.sigma_t_m),
            ("sigma_a_rad", n.sigma_a_rad),
            ("sigma_nu", n.sigma_nu),
            ("sigma_omega", n.sigma_omega),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(violation("noise", key, "must be nonnegative"));
            }
        }
        if !positive(n.r_inflation) {
            return Err(violation("noise", "r_inflation", "must be positive"));
        }
        if self.solver.max_iters == 0 {
            return Err(violation("solver", "max_iters", "must be at least 1"));
        }
        if !positive(self.solver.tol) {
            return Err(violation("solver", "tol", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.dataset.loaded_fraction) {
            return Err(violation("dataset", "loaded_fraction", "must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn rod_properties(&self) -> RodProperties {
        let r = &self.rod;
        RodProperties {
            youngs_modulus: r.e_pa,
            poisson: r.poisson,
            diameter: r.diameter_m,
            segment_lengths: r.segment_lengths_m.clone(),
            pitch_radius: r.pitch_radius_m,
            tendons: r.tendons.iter().map(|t| Tendon { segment: t.segment, theta: t.theta_rad }).collect(),
            disks_per_segment: r.disks_per_segment,
            steps_per_segment: r.steps_per_segment,
            max_tension: r.max_tension_n,
        }
    }

    pub fn hyper(&self) -> PriorHyperparams {
        PriorHyperparams::new(
            Matrix6::from_diagonal(&self.prior.qc_diag.into()),
            Twist::from_array(self.prior.eps_bar),
        )
        .expect("validated qc_diag is positive")
    }

    pub fn sensor_noise(&self) -> SensorNoise {
        let n = &self.noise;
        SensorNoise {
            sigma_t: n.sigma_t_m,
            sigma_a: n.sigma_a_rad,
            sigma_nu: n.sigma_nu,
            sigma_omega: n.sigma_omega,
            r_inflation: n.r_inflation,
        }
    }

    pub fn convergence(&self) -> Convergence {
        Convergence { max_iters: self.solver.max_iters, step_norm_tol: self.solver.tol }
    }

    /// Canonical JSON of the resolved configuration, defaults included.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of [`canonical_json`](Self::canonical_json).
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

/// Line of `"key"` inside `"section"`, or of the section when the key was
/// left at its default, or 1.
fn locate(text: &str, section: &str, key: &str) -> usize {
    let find = |needle: &str, from: usize| text[from..].find(needle).map(|i| i + from);
    let start = if section.is_empty() { Some(0) } else { find(&format!("\"{section}\""), 0) };
    let pos = match start {
        Some(s) => find(&format!("\"{key}\""), s).or(Some(s)),
        None => None,
    };
    pos.map(|p| text[..p].matches('\n').count() + 1).unwrap_or(1)
}
