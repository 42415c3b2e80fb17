//! Static Cosserat-rod model of a tendon-driven continuum robot.
//!
//! The backbone is integrated in its body frame:
//! `p' = R·v`, `R' = R·û`, with `(v, u) = 𝒦⁻¹σ + ε̄`. The internal wrench `σ`
//! splits into a part carried by external loads, which is fixed in the world
//! and obeys `n' = −u×n`, `m' = −u×m − v×n` in body coordinates, and the
//! tendon part. A tendon routed straight and parallel to the backbone and
//! terminated at `s_i` loads every cross-section `s < s_i` with the constant
//! body-frame wrench `(−τ·x̂, p × (−τ·x̂))`, so `σ` jumps by that wrench at
//! `s_i`. The unknown base wrench is found by Newton shooting on the tip
//! boundary condition `σ(S) = tip wrench`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{Matrix3, Matrix6, SMatrix, Vector3, Vector6};
use rand::Rng;

use crate::error::{Error, Result};
use crate::measurement::{corrupt_pose, corrupt_strain, Measurement, PoseMeasurement, StrainMeasurement, FULL_MASK};
use crate::prior::StateNode;
use crate::se3::{hat3, Pose, Twist};

/// Fewest RK4 steps per segment.
pub const MIN_STEPS_PER_SEGMENT: usize = 200;
pub const SHOOTING_TOL: f64 = 1e-9;
pub const SHOOTING_MAX_ITERS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tendon {
    pub segment: usize,
    /// Angular position around the backbone, measured from the local z axis
    /// toward the local y axis.
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RodProperties {
    pub youngs_modulus: f64,
    pub poisson: f64,
    pub diameter: f64,
    pub segment_lengths: Vec<f64>,
    pub pitch_radius: f64,
    pub tendons: Vec<Tendon>,
    pub disks_per_segment: usize,
    pub steps_per_segment: usize,
    pub max_tension: f64,
}

impl Default for RodProperties {
    /// Two 0.14 m segments of a 1 mm nitinol backbone, four tendons per
    /// segment at 7 mm pitch radius, seven disks per segment.
    fn default() -> Self {
        let tendons = (0..2)
            .flat_map(|seg| {
                (0..4).map(move |i| Tendon {
                    segment: seg,
                    theta: i as f64 * PI / 2.0,
                })
            })
            .collect();
        RodProperties {
            youngs_modulus: 54e9,
            poisson: 0.3,
            diameter: 1e-3,
            segment_lengths: vec![0.14, 0.14],
            pitch_radius: 7e-3,
            tendons,
            disks_per_segment: 7,
            steps_per_segment: 400,
            max_tension: 3.0,
        }
    }
}

impl RodProperties {
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if !pos(self.youngs_modulus) || !pos(self.diameter) || !pos(self.pitch_radius) {
            return Err(Error::InvalidRod("modulus, diameter and pitch radius must be positive"));
        }
        if !(self.poisson >= 0.0 && self.poisson < 0.5) {
            return Err(Error::InvalidRod("Poisson ratio must lie in [0, 0.5)"));
        }
        if self.segment_lengths.is_empty() || !self.segment_lengths.iter().all(|&l| pos(l)) {
            return Err(Error::InvalidRod("segment lengths must be positive"));
        }
        if self.tendons.iter().any(|t| t.segment >= self.segment_lengths.len() || !t.theta.is_finite()) {
            return Err(Error::InvalidRod("tendon refers to a missing segment"));
        }
        if self.disks_per_segment == 0 {
            return Err(Error::InvalidRod("need at least one disk per segment"));
        }
        if self.steps_per_segment < MIN_STEPS_PER_SEGMENT {
            return Err(Error::InvalidRod("too few integration steps per segment"));
        }
        if !(self.max_tension >= 0.0) {
            return Err(Error::InvalidRod("maximum tension must be nonnegative"));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.segment_lengths.iter().sum()
    }

    /// Arclength at the distal end of each segment.
    pub fn segment_ends(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.segment_lengths
            .iter()
            .map(|l| {
                acc += l;
                acc
            })
            .collect()
    }

    /// Disk arclengths, equally spaced within each segment, the last disk of
    /// a segment sitting at its end.
    pub fn disk_arclengths(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut start = 0.0;
        for (j, &l) in self.segment_lengths.iter().enumerate() {
            let n = self.disks_per_segment;
            for i in 1..n {
                out.push(start + l * i as f64 / n as f64);
            }
            let end = self.segment_ends()[j];
            out.push(end);
            start = end;
        }
        out
    }
}

/// `diag(EA, GA, GA, GJ, EI, EI)` for a solid circular section.
pub fn stiffness(props: &RodProperties) -> Matrix6<f64> {
    let d = props.diameter;
    let e = props.youngs_modulus;
    let area = PI * d * d / 4.0;
    let i = PI * d * d * d * d / 64.0;
    let j = 2.0 * i;
    let g = e / (2.0 * (1.0 + props.poisson));
    Matrix6::from_diagonal(&Vector6::new(e * area, g * area, g * area, g * j, e * i, e * i))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Actuation {
    pub tensions: Vec<f64>,
    /// Applied at the tip, in the tip body frame, `[force; moment]`.
    pub tip_wrench: Vector6<f64>,
}

impl Actuation {
    pub fn zero(props: &RodProperties) -> Self {
        Actuation {
            tensions: vec![0.0; props.tendons.len()],
            tip_wrench: Vector6::zeros(),
        }
    }

    pub fn validate(&self, props: &RodProperties) -> Result<()> {
        if self.tensions.len() != props.tendons.len() {
            return Err(Error::InvalidRod("one tension per tendon expected"));
        }
        if self
            .tensions
            .iter()
            .any(|&t| !(t >= 0.0 && t <= props.max_tension))
        {
            return Err(Error::InvalidRod("tension outside [0, max_tension]"));
        }
        if !self.tip_wrench.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidRod("tip wrench is not finite"));
        }
        Ok(())
    }
}

/// Wrench of one tendon on the cross-sections it passes, body frame.
pub fn tendon_wrench(props: &RodProperties, tendon: &Tendon, tension: f64) -> Vector6<f64> {
    let p = Vector3::new(0.0, libm::sin(tendon.theta), libm::cos(tendon.theta)) * props.pitch_radius;
    let f = Vector3::new(-tension, 0.0, 0.0);
    let m = p.cross(&f);
    Vector6::new(f.x, f.y, f.z, m.x, m.y, m.z)
}

/// `(termination arclength, wrench)` for every tensioned tendon.
pub fn tendon_point_wrenches(props: &RodProperties, act: &Actuation) -> Vec<(f64, Vector6<f64>)> {
    let ends = props.segment_ends();
    props
        .tendons
        .iter()
        .zip(&act.tensions)
        .filter(|(_, &t)| t != 0.0)
        .map(|(td, &t)| (ends[td.segment], tendon_wrench(props, td, t)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct RodState {
    p: Vector3<f64>,
    r: Matrix3<f64>,
    /// Load-carried wrench in the body frame.
    w: Vector6<f64>,
}

impl RodState {
    fn axpy(&self, h: f64, d: &RodState) -> RodState {
        RodState {
            p: self.p + d.p * h,
            r: self.r + d.r * h,
            w: self.w + d.w * h,
        }
    }

    fn is_finite(&self) -> bool {
        self.p.iter().chain(self.r.iter()).chain(self.w.iter()).all(|x| x.is_finite())
    }
}

struct Model {
    k_inv: Matrix6<f64>,
    eps_bar: Vector6<f64>,
}

impl Model {
    fn body_strain(&self, sigma: &Vector6<f64>) -> Vector6<f64> {
        self.k_inv * sigma + self.eps_bar
    }

    fn deriv(&self, y: &RodState, tendon: &Vector6<f64>) -> RodState {
        let eps = self.body_strain(&(y.w + tendon));
        let v = Vector3::new(eps[0], eps[1], eps[2]);
        let u = Vector3::new(eps[3], eps[4], eps[5]);
        let n = Vector3::new(y.w[0], y.w[1], y.w[2]);
        let m = Vector3::new(y.w[3], y.w[4], y.w[5]);
        let dn = -u.cross(&n);
        let dm = -u.cross(&m) - v.cross(&n);
        RodState {
            p: y.r * v,
            r: y.r * hat3(&u),
            w: Vector6::new(dn.x, dn.y, dn.z, dm.x, dm.y, dm.z),
        }
    }

    fn rk4(&self, y: &RodState, tendon: &Vector6<f64>, h: f64) -> RodState {
        let k1 = self.deriv(y, tendon);
        let k2 = self.deriv(&y.axpy(h / 2.0, &k1), tendon);
        let k3 = self.deriv(&y.axpy(h / 2.0, &k2), tendon);
        let k4 = self.deriv(&y.axpy(h, &k3), tendon);
        RodState {
            p: y.p + (k1.p + (k2.p + k3.p) * 2.0 + k4.p) * (h / 6.0),
            r: y.r + (k1.r + (k2.r + k3.r) * 2.0 + k4.r) * (h / 6.0),
            w: y.w + (k1.w + (k2.w + k3.w) * 2.0 + k4.w) * (h / 6.0),
        }
    }
}

/// Stretch of backbone between load discontinuities, integrated with a
/// uniform step.
#[derive(Clone, Debug, PartialEq)]
struct Piece {
    s0: f64,
    h: f64,
    tendon: Vector6<f64>,
    states: Vec<RodState>,
}

impl Piece {
    fn s_end(&self) -> f64 {
        self.s0 + self.h * (self.states.len() - 1) as f64
    }
}

/// Equilibrium shape of the rod at integration resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruthShape {
    k: Matrix6<f64>,
    eps_bar: Vector6<f64>,
    pieces: Vec<Piece>,
}

/// One point of a [`GroundTruthShape`]; `sigma` is the body-frame internal wrench.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RodSample {
    pub node: StateNode,
    pub sigma: Vector6<f64>,
}

impl GroundTruthShape {
    fn model(&self) -> Model {
        Model {
            k_inv: inverse_diagonal(&self.k),
            eps_bar: self.eps_bar,
        }
    }

    pub fn length(&self) -> f64 {
        self.pieces.last().map(|p| p.s_end()).unwrap_or(0.0)
    }

    fn sample(&self, s: f64, y: &RodState, tendon: &Vector6<f64>) -> RodSample {
        let sigma = y.w + tendon;
        let eps_b = self.model().body_strain(&sigma);
        // Re-orthonormalize the integrated rotation before building the pose.
        let pose = Pose::from_parts_unchecked(y.r, y.p).normalized();
        RodSample {
            node: StateNode::new(s, pose, Twist(eps_b)),
            sigma,
        }
    }

    /// Every integration point in order. At a load discontinuity the point is
    /// listed twice, once per side.
    pub fn samples(&self) -> Vec<RodSample> {
        let mut out = Vec::new();
        for piece in &self.pieces {
            for (i, y) in piece.states.iter().enumerate() {
                let s = if i + 1 == piece.states.len() {
                    piece.s_end()
                } else {
                    piece.s0 + piece.h * i as f64
                };
                out.push(self.sample(s, y, &piece.tendon));
            }
        }
        out
    }

    /// Exact state at arclength `s`, by a partial RK4 step from the nearest
    /// integration point below. At a load discontinuity the proximal side
    /// is returned.
    pub fn state_at(&self, s: f64) -> Result<RodSample> {
        let len = self.length();
        if !(s >= 0.0 && s <= len) {
            return Err(Error::OutOfRange { tau: s, lo: 0.0, hi: len });
        }
        let piece = self
            .pieces
            .iter()
            .find(|p| s <= p.s_end())
            .unwrap_or_else(|| self.pieces.last().unwrap());
        let last = piece.states.len() - 1;
        let i = libm::floor((s - piece.s0) / piece.h).clamp(0.0, last as f64) as usize;
        let s_i = piece.s0 + piece.h * i as f64;
        let dh = s - s_i;
        let y = if dh <= 0.0 || i == last {
            piece.states[i]
        } else {
            self.model().rk4(&piece.states[i], &piece.tendon, dh)
        };
        Ok(self.sample(s, &y, &piece.tendon))
    }

    pub fn tip(&self) -> RodSample {
        let piece = self.pieces.last().unwrap();
        self.sample(piece.s_end(), piece.states.last().unwrap(), &piece.tendon)
    }
}

fn inverse_diagonal(k: &Matrix6<f64>) -> Matrix6<f64> {
    Matrix6::from_diagonal(&k.diagonal().map(|x| 1.0 / x))
}

/// Nominal body strain of the unloaded rod: straight along local x.
pub fn nominal_strain() -> Vector6<f64> {
    Vector6::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
}

/// Integrates from the base with internal wrench `base_stress` (body frame,
/// tendon contributions included) and returns the shape and the tip residual
/// `σ_loads(S) − tip_wrench`.
pub fn integrate_rod(
    props: &RodProperties,
    base_stress: &Vector6<f64>,
    wrenches: &[(f64, Vector6<f64>)],
    tip_wrench: &Vector6<f64>,
) -> Result<(GroundTruthShape, Vector6<f64>)> {
    props.validate()?;
    if !base_stress.iter().all(|x| x.is_finite()) {
        return Err(Error::Diverged(0.0));
    }
    let k = stiffness(props);
    let model = Model {
        k_inv: inverse_diagonal(&k),
        eps_bar: nominal_strain(),
    };
    let length = props.length();
    let seg_ends = props.segment_ends();

    let mut breaks: Vec<f64> = seg_ends.clone();
    for &(s, _) in wrenches {
        if !(s > 0.0 && s <= length) {
            return Err(Error::InvalidRod("point wrench outside the rod"));
        }
        breaks.push(s);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let all_tendon: Vector6<f64> = wrenches.iter().map(|(_, w)| w).sum();
    let mut y = RodState {
        p: Vector3::zeros(),
        r: Matrix3::identity(),
        w: base_stress - all_tendon,
    };
    let h_nominal = props
        .segment_lengths
        .iter()
        .fold(f64::INFINITY, |a, &l| a.min(l))
        / props.steps_per_segment as f64;

    let mut pieces = Vec::with_capacity(breaks.len());
    let mut s0 = 0.0;
    for &s1 in &breaks {
        let tendon: Vector6<f64> = wrenches.iter().filter(|(s, _)| *s >= s1).map(|(_, w)| w).sum();
        let n = libm::ceil((s1 - s0) / h_nominal - 1e-9).max(1.0) as usize;
        let h = (s1 - s0) / n as f64;
        let mut states = Vec::with_capacity(n + 1);
        states.push(y);
        for i in 0..n {
            y = model.rk4(&y, &tendon, h);
            if !y.is_finite() {
                return Err(Error::Diverged(s0 + h * (i + 1) as f64));
            }
            states.push(y);
        }
        pieces.push(Piece { s0, h, tendon, states });
        s0 = s1;
    }
    let residual = y.w - tip_wrench;
    Ok((
        GroundTruthShape {
            k,
            eps_bar: model.eps_bar,
            pieces,
        },
        residual,
    ))
}

/// Base wrench of a straight rod carrying the given loads.
fn straight_guess(props: &RodProperties, wrenches: &[(f64, Vector6<f64>)], tip: &Vector6<f64>) -> Vector6<f64> {
    let lever = Vector3::new(props.length(), 0.0, 0.0);
    let f = Vector3::new(tip[0], tip[1], tip[2]);
    let m = Vector3::new(tip[3], tip[4], tip[5]) + lever.cross(&f);
    let tendon: Vector6<f64> = wrenches.iter().map(|(_, w)| w).sum();
    Vector6::new(f.x, f.y, f.z, m.x, m.y, m.z) + tendon
}

fn shoot(
    props: &RodProperties,
    wrenches: &[(f64, Vector6<f64>)],
    tip: &Vector6<f64>,
    guess: Vector6<f64>,
) -> Result<(Vector6<f64>, GroundTruthShape, f64)> {
    let mut x = guess;
    let (mut shape, mut r) = integrate_rod(props, &x, wrenches, tip)?;
    let mut norm = r.amax();
    for _ in 0..SHOOTING_MAX_ITERS {
        if norm < SHOOTING_TOL {
            return Ok((x, shape, norm));
        }
        let mut jac = SMatrix::<f64, 6, 6>::zeros();
        for j in 0..6 {
            let h = 1e-6 * x[j].abs().max(1e-2);
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let (_, rp) = integrate_rod(props, &xp, wrenches, tip)?;
            let (_, rm) = integrate_rod(props, &xm, wrenches, tip)?;
            jac.set_column(j, &((rp - rm) / (2.0 * h)));
        }
        let Some(dx) = jac.lu().solve(&(-r)) else {
            break;
        };
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let xn = x + dx * alpha;
            if let Ok((sn, rn)) = integrate_rod(props, &xn, wrenches, tip) {
                if rn.amax() < norm {
                    x = xn;
                    shape = sn;
                    r = rn;
                    norm = rn.amax();
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm < SHOOTING_TOL {
        Ok((x, shape, norm))
    } else {
        Err(Error::ShootingFailed { residual: norm })
    }
}

/// Equilibrium shape under `act`, by Newton shooting on the base wrench.
/// Falls back to load continuation when a direct solve fails.
pub fn solve_static(props: &RodProperties, act: &Actuation) -> Result<GroundTruthShape> {
    props.validate()?;
    act.validate(props)?;
    let wrenches = tendon_point_wrenches(props, act);
    let guess = straight_guess(props, &wrenches, &act.tip_wrench);
    let first = match shoot(props, &wrenches, &act.tip_wrench, guess) {
        Ok((_, shape, _)) => return Ok(shape),
        Err(e) => e,
    };
    let mut best = match first {
        Error::ShootingFailed { residual } => residual,
        _ => f64::INFINITY,
    };
    for stages in [4usize, 16, 64] {
        let mut x = Vector6::zeros();
        let mut result = None;
        for i in 1..=stages {
            let lambda = i as f64 / stages as f64;
            let w: Vec<_> = wrenches.iter().map(|(s, w)| (*s, w * lambda)).collect();
            let tip = act.tip_wrench * lambda;
            let g = if i == 1 { straight_guess(props, &w, &tip) } else { x };
            match shoot(props, &w, &tip, g) {
                Ok((xn, shape, _)) => {
                    x = xn;
                    result = Some(shape);
                }
                Err(Error::ShootingFailed { residual }) => {
                    best = best.min(residual);
                    result = None;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if let Some(shape) = result {
            return Ok(shape);
        }
    }
    Err(Error::ShootingFailed { residual: best })
}

/// Random actuations: one or two tendons pulled with tension uniform in
/// `[0, max_tension]`, and a uniform random tip wrench (forces within
/// ±0.1 N, moments within ±0.01 N·m) on exactly `⌊loaded_fraction·count⌋`
/// randomly chosen configurations.
pub fn sample_actuations<R: Rng + ?Sized>(
    props: &RodProperties,
    count: usize,
    loaded_fraction: f64,
    rng: &mut R,
) -> Result<Vec<Actuation>> {
    props.validate()?;
    if !(0.0..=1.0).contains(&loaded_fraction) {
        return Err(Error::InvalidRod("loaded fraction must lie in [0, 1]"));
    }
    let n_tendons = props.tendons.len();
    let loaded_count = libm::floor(loaded_fraction * count as f64) as usize;
    let mut order: Vec<usize> = (0..count).collect();
    for i in (1..count).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut loaded = vec![false; count];
    for &i in order.iter().take(loaded_count) {
        loaded[i] = true;
    }
    let mut out = Vec::with_capacity(count);
    for &is_loaded in &loaded {
        let mut act = Actuation::zero(props);
        if n_tendons > 0 {
            let pulled = if n_tendons >= 2 { rng.random_range(1..=2) } else { 1 };
            let first = rng.random_range(0..n_tendons);
            act.tensions[first] = rng.random::<f64>() * props.max_tension;
            if pulled == 2 {
                let mut second = rng.random_range(0..n_tendons - 1);
                if second >= first {
                    second += 1;
                }
                act.tensions[second] = rng.random::<f64>() * props.max_tension;
            }
        }
        if is_loaded {
            for i in 0..3 {
                act.tip_wrench[i] = rng.random_range(-0.1..=0.1);
            }
            for i in 3..6 {
                act.tip_wrench[i] = rng.random_range(-0.01..=0.01);
            }
        }
        out.push(act);
    }
    Ok(out)
}

/// [`sample_actuations`] followed by [`solve_static`] on each draw.
pub fn sample_dataset<R: Rng + ?Sized>(
    props: &RodProperties,
    count: usize,
    loaded_fraction: f64,
    rng: &mut R,
) -> Result<Vec<(Actuation, GroundTruthShape)>> {
    sample_actuations(props, count, loaded_fraction, rng)?
        .into_iter()
        .map(|a| {
            let shape = solve_static(props, &a)?;
            Ok((a, shape))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Full pose at the end of every segment.
    PoseAtSegmentEnds,
    /// Strain at every disk.
    StrainAtDisks,
    /// Strain at every disk plus the tip pose.
    StrainPlusTipPose,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [
        Scenario::PoseAtSegmentEnds,
        Scenario::StrainAtDisks,
        Scenario::StrainPlusTipPose,
    ];
}

/// Sensor noise standard deviations and the covariance inflation applied to
/// the estimator's measurement model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensorNoise {
    pub sigma_t: f64,
    pub sigma_a: f64,
    pub sigma_nu: f64,
    pub sigma_omega: f64,
    pub r_inflation: f64,
}

/// Smallest standard deviation assumed by the measurement model, so that
/// noise-free sensors still give invertible covariances.
pub const SIGMA_FLOOR: f64 = 1e-6;

impl Default for SensorNoise {
    fn default() -> Self {
        SensorNoise {
            sigma_t: 1e-3,
            sigma_a: 0.01,
            sigma_nu: 0.05,
            sigma_omega: 0.05,
            r_inflation: 10.0,
        }
    }
}

impl SensorNoise {
    fn diag(a: f64, b: f64, floor: f64) -> Matrix6<f64> {
        let a = a.max(floor);
        let b = b.max(floor);
        Matrix6::from_diagonal(&Vector6::new(a * a, a * a, a * a, b * b, b * b, b * b))
    }

    pub fn pose_injection_cov(&self) -> Matrix6<f64> {
        Self::diag(self.sigma_t, self.sigma_a, 0.0)
    }

    pub fn strain_injection_cov(&self) -> Matrix6<f64> {
        Self::diag(self.sigma_nu, self.sigma_omega, 0.0)
    }

    pub fn pose_model_cov(&self) -> Matrix6<f64> {
        Self::diag(self.sigma_t, self.sigma_a, SIGMA_FLOOR) * self.r_inflation
    }

    pub fn strain_model_cov(&self) -> Matrix6<f64> {
        Self::diag(self.sigma_nu, self.sigma_omega, SIGMA_FLOOR) * self.r_inflation
    }
}

/// Arclengths sensed in `scenario`, as `(s, is_pose)` pairs in sensing order.
pub fn sensor_arclengths(props: &RodProperties, scenario: Scenario) -> Vec<(f64, bool)> {
    match scenario {
        Scenario::PoseAtSegmentEnds => props.segment_ends().into_iter().map(|s| (s, true)).collect(),
        Scenario::StrainAtDisks => props.disk_arclengths().into_iter().map(|s| (s, false)).collect(),
        Scenario::StrainPlusTipPose => {
            let mut v: Vec<_> = props.disk_arclengths().into_iter().map(|s| (s, false)).collect();
            v.push((props.length(), true));
            v
        }
    }
}

/// Reads the exact state at each sensor and corrupts it with sensor noise.
pub fn extract_measurements<R: Rng + ?Sized>(
    shape: &GroundTruthShape,
    props: &RodProperties,
    scenario: Scenario,
    noise: &SensorNoise,
    rng: &mut R,
) -> Result<Vec<Measurement>> {
    let pose_cov = noise.pose_injection_cov();
    let strain_cov = noise.strain_injection_cov();
    sensor_arclengths(props, scenario)
        .into_iter()
        .map(|(s, is_pose)| {
            let truth = shape.state_at(s)?.node;
            if is_pose {
                let t = corrupt_pose(&truth.pose, &pose_cov, rng);
                Ok(Measurement::Pose(PoseMeasurement::new(s, t, noise.pose_model_cov(), FULL_MASK)?))
            } else {
                let e = corrupt_strain(&truth.strain, &strain_cov, rng);
                Ok(Measurement::Strain(StrainMeasurement::new(s, e, noise.strain_model_cov(), FULL_MASK)?))
            }
        })
        .collect()
}
