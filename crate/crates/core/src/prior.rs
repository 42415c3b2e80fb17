//! Gaussian-process prior over rod states.
//!
//! The rod kinematics are `dT/ds = T·ε^` with `ε` the body-frame strain.
//! Between consecutive nodes the pose is written as `T(s) = T(s_k)·exp(ξ(s)^)`
//! and the local variable obeys `ξ'' = w(s)`, white noise with power-spectral
//! density `Q_c`. The Markov state `γ = [ξ; ψ]` with `ψ = ξ'` then has a
//! closed-form transition function and process covariance, and the prior
//! reduces to one binary factor per interval.

use alloc::vec::Vec;

use nalgebra::{Matrix6, SMatrix, Vector6};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::se3::{
    curly_hat, exp_se3, left_jacobian_inv, log_se3, right_jacobian, right_jacobian_inv,
    right_jacobian_inv_derivative, Pose, Twist,
};
use crate::{Matrix12, Vector12};

pub type PriorJacobian = SMatrix<f64, 12, 24>;

/// Smoothness hyperparameters: power-spectral density `Q_c` and nominal strain `ε̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct PriorHyperparams {
    qc: Matrix6<f64>,
    qc_inv: Matrix6<f64>,
    eps_bar: Twist,
}

impl PriorHyperparams {
    pub fn new(qc: Matrix6<f64>, eps_bar: Twist) -> Result<Self> {
        if (qc - qc.transpose()).amax() > 1e-12 * qc.amax().max(1.0) {
            return Err(Error::InvalidPsd);
        }
        let chol = qc.cholesky().ok_or(Error::InvalidPsd)?;
        if !eps_bar.is_finite() {
            return Err(Error::InvalidPsd);
        }
        Ok(PriorHyperparams {
            qc,
            qc_inv: chol.inverse(),
            eps_bar,
        })
    }

    pub fn diagonal(diag: [f64; 6], eps_bar: Twist) -> Result<Self> {
        Self::new(Matrix6::from_diagonal(&Vector6::from(diag)), eps_bar)
    }

    pub fn qc(&self) -> &Matrix6<f64> {
        &self.qc
    }

    pub fn qc_inv(&self) -> &Matrix6<f64> {
        &self.qc_inv
    }

    pub fn eps_bar(&self) -> &Twist {
        &self.eps_bar
    }
}

/// One estimation node: arclength, pose and strain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateNode {
    pub s: f64,
    pub pose: Pose,
    pub strain: Twist,
}

impl StateNode {
    pub fn new(s: f64, pose: Pose, strain: Twist) -> Self {
        StateNode { s, pose, strain }
    }
}

/// Strictly increasing arclengths `s_0 = 0 < s_1 < … < s_K`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeGrid {
    s: Vec<f64>,
}

impl NodeGrid {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.len() < 2 {
            return Err(Error::InvalidGrid("need at least two nodes"));
        }
        if s[0] != 0.0 {
            return Err(Error::InvalidGrid("first node must be at s = 0"));
        }
        for w in s.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::NonIncreasing { from: w[0], to: w[1] });
            }
        }
        Ok(NodeGrid { s })
    }

    /// `intervals` equal intervals over `[0, length]`.
    pub fn uniform(length: f64, intervals: usize) -> Result<Self> {
        if intervals == 0 || !(length > 0.0) {
            return Err(Error::InvalidGrid("uniform grid needs a positive length and K ≥ 1"));
        }
        let mut s: Vec<f64> = (0..=intervals)
            .map(|k| length * k as f64 / intervals as f64)
            .collect();
        s[intervals] = length;
        NodeGrid::new(s)
    }

    pub fn arclengths(&self) -> &[f64] {
        &self.s
    }

    /// Number of nodes, `K + 1`.
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Number of intervals, `K`.
    pub fn intervals(&self) -> usize {
        self.s.len() - 1
    }

    pub fn length(&self) -> f64 {
        self.s[self.s.len() - 1]
    }

    /// Index of the node at `s`, if one lies within `tol`.
    pub fn find(&self, s: f64, tol: f64) -> Option<usize> {
        let i = self.s.partition_point(|&x| x < s);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&j| j < self.s.len())
            .find(|&j| (self.s[j] - s).abs() <= tol)
    }

    /// Index `k` of the interval `[s_k, s_{k+1}]` containing `tau`.
    pub fn bracket(&self, tau: f64) -> Option<usize> {
        if !(tau >= self.s[0] && tau <= self.length()) {
            return None;
        }
        let i = self.s.partition_point(|&x| x <= tau);
        Some(i.saturating_sub(1).min(self.intervals() - 1))
    }
}

/// Markov state `γ = [ξ; ψ]` in the local frame of a node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalState {
    pub xi: Twist,
    pub psi: Twist,
}

impl LocalState {
    pub fn to_vector(&self) -> Vector12 {
        stack(&self.xi.0, &self.psi.0)
    }

    pub fn from_vector(v: &Vector12) -> Self {
        LocalState {
            xi: Twist(v.fixed_rows::<6>(0).into_owned()),
            psi: Twist(v.fixed_rows::<6>(6).into_owned()),
        }
    }
}

pub(crate) fn stack(a: &Vector6<f64>, b: &Vector6<f64>) -> Vector12 {
    let mut v = Vector12::zeros();
    v.fixed_rows_mut::<6>(0).copy_from(a);
    v.fixed_rows_mut::<6>(6).copy_from(b);
    v
}

fn blocks(tl: Matrix6<f64>, tr: Matrix6<f64>, bl: Matrix6<f64>, br: Matrix6<f64>) -> Matrix12 {
    let mut m = Matrix12::zeros();
    m.fixed_view_mut::<6, 6>(0, 0).copy_from(&tl);
    m.fixed_view_mut::<6, 6>(0, 6).copy_from(&tr);
    m.fixed_view_mut::<6, 6>(6, 0).copy_from(&bl);
    m.fixed_view_mut::<6, 6>(6, 6).copy_from(&br);
    m
}

/// Transition function `Φ(s, s') = [[1, (s − s')·1], [0, 1]]`.
pub fn transition(s: f64, s_prev: f64) -> Result<Matrix12> {
    if s < s_prev {
        return Err(Error::NonIncreasing { from: s_prev, to: s });
    }
    Ok(transition_unchecked(s - s_prev))
}

pub(crate) fn transition_unchecked(ds: f64) -> Matrix12 {
    let i = Matrix6::identity();
    blocks(i, i * ds, Matrix6::zeros(), i)
}

/// Process covariance accumulated over `ds`.
pub fn process_cov(ds: f64, hyper: &PriorHyperparams) -> Result<Matrix12> {
    if !(ds > 0.0) {
        return Err(Error::NonIncreasing { from: 0.0, to: ds });
    }
    Ok(process_cov_unchecked(ds, hyper))
}

pub(crate) fn process_cov_unchecked(ds: f64, hyper: &PriorHyperparams) -> Matrix12 {
    let q = hyper.qc;
    let ds2 = ds * ds;
    blocks(q * (ds2 * ds / 3.0), q * (ds2 / 2.0), q * (ds2 / 2.0), q * ds)
}

/// Closed-form inverse of [`process_cov`].
pub fn process_cov_inv(ds: f64, hyper: &PriorHyperparams) -> Result<Matrix12> {
    if !(ds > 0.0) {
        return Err(Error::NonIncreasing { from: 0.0, to: ds });
    }
    Ok(process_cov_inv_unchecked(ds, hyper))
}

pub(crate) fn process_cov_inv_unchecked(ds: f64, hyper: &PriorHyperparams) -> Matrix12 {
    let qi = hyper.qc_inv;
    let ds2 = ds * ds;
    blocks(
        qi * (12.0 / (ds2 * ds)),
        qi * (-6.0 / ds2),
        qi * (-6.0 / ds2),
        qi * (4.0 / ds),
    )
}

/// Relative local variable `ξ = ln(T_{k−1}⁻¹·T_k)`.
pub fn relative_twist(prev: &StateNode, cur: &StateNode) -> Result<Twist> {
    if !(cur.s > prev.s) {
        return Err(Error::NonIncreasing { from: prev.s, to: cur.s });
    }
    Ok(log_se3(&(prev.pose.inverse() * cur.pose))?)
}

/// Prior error between consecutive nodes, in global variables:
/// `[ξ − Δs·ε_{k−1};  J_r(ξ)⁻¹·ε_k − ε_{k−1}]` with `ξ = ln(T_{k−1}⁻¹·T_k)∨`.
pub fn prior_error(prev: &StateNode, cur: &StateNode) -> Result<Vector12> {
    let xi = relative_twist(prev, cur)?;
    let ds = cur.s - prev.s;
    let top = xi.0 - prev.strain.0 * ds;
    let bottom = right_jacobian_inv(&xi) * cur.strain.0 - prev.strain.0;
    Ok(stack(&top, &bottom))
}

/// Jacobian of [`prior_error`] with respect to `(δt_{k−1}, δε_{k−1}, δt_k, δε_k)`,
/// poses perturbed as `T ← T·exp(δt^)`:
///
/// ```text
/// [ −J(ξ)⁻¹     −Δs·1   J_r(ξ)⁻¹     0        ]
/// [ −D·J(ξ)⁻¹   −1      D·J_r(ξ)⁻¹   J_r(ξ)⁻¹ ]
/// ```
///
/// with `D = ∂(J_r(ξ)⁻¹·ε_k)/∂ξ`. [`prior_error_jacobian_small_angle`]
/// replaces `D` by its value `−½ε_k^⋏` at `ξ = 0`.
pub fn prior_error_jacobian(prev: &StateNode, cur: &StateNode) -> Result<PriorJacobian> {
    let xi = relative_twist(prev, cur)?;
    let d = right_jacobian_inv_derivative(&xi, &cur.strain.0);
    Ok(assemble_prior_jacobian(&xi, cur.s - prev.s, &d))
}

/// Linearization with the strain-row derivative evaluated at `ξ = 0`.
/// Agrees with [`prior_error_jacobian`] to first order in `ξ`.
pub fn prior_error_jacobian_small_angle(prev: &StateNode, cur: &StateNode) -> Result<PriorJacobian> {
    let xi = relative_twist(prev, cur)?;
    let d = -0.5 * curly_hat(&cur.strain);
    Ok(assemble_prior_jacobian(&xi, cur.s - prev.s, &d))
}

fn assemble_prior_jacobian(xi: &Twist, ds: f64, d: &Matrix6<f64>) -> PriorJacobian {
    let jl_inv = left_jacobian_inv(xi);
    let jr_inv = right_jacobian_inv(xi);
    let i = Matrix6::<f64>::identity();
    let mut e = PriorJacobian::zeros();
    e.fixed_view_mut::<6, 6>(0, 0).copy_from(&(-jl_inv));
    e.fixed_view_mut::<6, 6>(0, 6).copy_from(&(-i * ds));
    e.fixed_view_mut::<6, 6>(0, 12).copy_from(&jr_inv);
    e.fixed_view_mut::<6, 6>(6, 0).copy_from(&(-d * jl_inv));
    e.fixed_view_mut::<6, 6>(6, 6).copy_from(&(-i));
    e.fixed_view_mut::<6, 6>(6, 12).copy_from(&(d * jr_inv));
    e.fixed_view_mut::<6, 6>(6, 18).copy_from(&jr_inv);
    e
}

/// `½ eᵀ Q(Δs)⁻¹ e` for one interval.
pub fn prior_factor_cost(error: &Vector12, ds: f64, hyper: &PriorHyperparams) -> Result<f64> {
    let w = process_cov_inv(ds, hyper)?;
    Ok(0.5 * error.dot(&(w * error)))
}

/// Total prior cost; `errors[k − 1]` belongs to the interval `[s_{k−1}, s_k]`.
pub fn prior_cost(errors: &[Vector12], hyper: &PriorHyperparams, grid: &NodeGrid) -> Result<f64> {
    if errors.len() != grid.intervals() {
        return Err(Error::InvalidProblem("one prior error per interval expected"));
    }
    let s = grid.arclengths();
    errors
        .iter()
        .enumerate()
        .map(|(k, e)| prior_factor_cost(e, s[k + 1] - s[k], hyper))
        .sum()
}

/// The prior mean: constant nominal strain rolled out from `root`.
pub fn prior_mean(hyper: &PriorHyperparams, grid: &NodeGrid, root: &Pose) -> Vec<StateNode> {
    let eps = *hyper.eps_bar();
    grid.arclengths()
        .iter()
        .map(|&s| StateNode::new(s, *root * exp_se3(&eps.scale(s)), eps))
        .collect()
}

/// Draws `count` shapes from the prior by sequential rollout over `grid`.
///
/// Each interval starts from `γ = (0, ε_k)` in the frame of node `k`,
/// propagates `Φ·γ`, adds `L·z` with `L Lᵀ = Q(Δs)`, and compounds
/// `T_{k+1} = T_k·exp(ξ^)`, `ε_{k+1} = J_r(ξ)·ψ`. The root strain is `ε̄`.
pub fn sample_prior<R: Rng + ?Sized>(
    hyper: &PriorHyperparams,
    grid: &NodeGrid,
    count: usize,
    rng: &mut R,
    root: &Pose,
) -> Result<Vec<Vec<StateNode>>> {
    let s = grid.arclengths();
    let factors: Vec<Matrix12> = s
        .windows(2)
        .map(|w| {
            process_cov_unchecked(w[1] - w[0], hyper)
                .cholesky()
                .map(|c| c.unpack())
                .ok_or(Error::InvalidPsd)
        })
        .collect::<Result<_>>()?;

    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let mut node = StateNode::new(0.0, *root, *hyper.eps_bar());
        let mut shape = Vec::with_capacity(grid.len());
        shape.push(node);
        for (k, l) in factors.iter().enumerate() {
            let ds = s[k + 1] - s[k];
            let mean = transition_unchecked(ds) * stack(&Vector6::zeros(), &node.strain.0);
            let z = Vector12::from_fn(|_, _| StandardNormal.sample(rng));
            let gamma = LocalState::from_vector(&(mean + l * z));
            node = StateNode::new(
                s[k + 1],
                node.pose * exp_se3(&gamma.xi),
                Twist(right_jacobian(&gamma.xi) * gamma.psi.0),
            );
            shape.push(node);
        }
        samples.push(shape);
    }
    Ok(samples)
}
