//! Posterior queries at arbitrary arclength.
//!
//! Between nodes `k` and `k+1` the local GP state is conditioned on its values
//! at both ends: `γ(τ) = Λ(τ)·γ_k(s_k) + Ψ(τ)·γ_k(s_{k+1})`. The mean and the
//! covariance only touch the two bracketing nodes, so a query is `O(1)`.

use nalgebra::Matrix6;

use crate::error::{Error, Result};
use crate::prior::{
    process_cov_inv_unchecked, process_cov_unchecked, stack, transition_unchecked, LocalState,
    PriorHyperparams, StateNode,
};
use crate::se3::{
    adjoint, exp_se3, left_jacobian_inv, log_se3, right_jacobian, right_jacobian_derivative,
    right_jacobian_inv, right_jacobian_inv_derivative, Twist,
};
use crate::solver::Solution;
use crate::{Matrix12, Vector12};

type Matrix12x24 = nalgebra::SMatrix<f64, 12, 24>;

/// `(Λ(τ), Ψ(τ))` for `s_k ≤ τ ≤ s_{k+1}`.
pub fn interp_matrices(
    tau: f64,
    s_k: f64,
    s_k1: f64,
    hyper: &PriorHyperparams,
) -> Result<(Matrix12, Matrix12)> {
    if !(s_k < s_k1) {
        return Err(Error::NonIncreasing { from: s_k, to: s_k1 });
    }
    if !(tau >= s_k && tau <= s_k1) {
        return Err(Error::OutOfRange { tau, lo: s_k, hi: s_k1 });
    }
    Ok(interp_matrices_unchecked(tau, s_k, s_k1, hyper))
}

fn interp_matrices_unchecked(
    tau: f64,
    s_k: f64,
    s_k1: f64,
    hyper: &PriorHyperparams,
) -> (Matrix12, Matrix12) {
    let psi = process_cov_unchecked(tau - s_k, hyper)
        * transition_unchecked(s_k1 - tau).transpose()
        * process_cov_inv_unchecked(s_k1 - s_k, hyper);
    let lambda = transition_unchecked(tau - s_k) - psi * transition_unchecked(s_k1 - s_k);
    (lambda, psi)
}

struct Bracket<'a> {
    k: usize,
    lambda: Matrix12,
    psi: Matrix12,
    a: &'a StateNode,
    b: &'a StateNode,
    xi1: Twist,
    gamma: LocalState,
}

fn bracket<'a>(solution: &'a Solution, tau: f64) -> Result<Bracket<'a>> {
    let grid = &solution.grid;
    let k = grid.bracket(tau).ok_or(Error::OutOfRange {
        tau,
        lo: 0.0,
        hi: grid.length(),
    })?;
    let s = grid.arclengths();
    let (lambda, psi) = interp_matrices_unchecked(tau, s[k], s[k + 1], &solution.hyper);
    let a = &solution.nodes[k];
    let b = &solution.nodes[k + 1];
    let xi1 = log_se3(&(a.pose.inverse() * b.pose))?;
    let g0 = stack(&nalgebra::Vector6::zeros(), &a.strain.0);
    let g1 = stack(&xi1.0, &(right_jacobian_inv(&xi1) * b.strain.0));
    let gamma = LocalState::from_vector(&(lambda * g0 + psi * g1));
    Ok(Bracket {
        k,
        lambda,
        psi,
        a,
        b,
        xi1,
        gamma,
    })
}

/// Posterior mean at `tau`.
pub fn query_state(solution: &Solution, tau: f64) -> Result<StateNode> {
    let br = bracket(solution, tau)?;
    let s = solution.grid.arclengths();
    if tau == s[br.k] {
        return Ok(StateNode { s: tau, ..*br.a });
    }
    if tau == s[br.k + 1] {
        return Ok(StateNode { s: tau, ..*br.b });
    }
    let g = br.gamma;
    Ok(StateNode::new(
        tau,
        br.a.pose * exp_se3(&g.xi),
        Twist(right_jacobian(&g.xi) * g.psi.0),
    ))
}

/// Posterior covariance at `tau`, in the same `(δt, δε)` perturbation
/// coordinates as the node marginals.
///
/// The joint covariance of the bracketing nodes is pushed through the
/// linearized interpolation map, and the prior variance of `γ(τ)` conditioned
/// on both ends is added:
/// `P(τ) = M·P̂_{k,k+1}·Mᵀ + H·(Q(τ−s_k) − Ψ·Φ(s_{k+1},τ)·Q(τ−s_k))·Hᵀ`,
/// where `H` maps `δγ(τ)` to `(δt, δε)` and `M` maps the node perturbations.
pub fn query_cov(solution: &Solution, tau: f64) -> Result<Matrix12> {
    let br = bracket(solution, tau)?;
    let s = solution.grid.arclengths();
    let (sk, sk1) = (s[br.k], s[br.k + 1]);
    let joint = &solution.joint_covs[br.k];
    if tau == sk {
        return Ok(solution.marginal_covs[br.k]);
    }
    if tau == sk1 {
        return Ok(solution.marginal_covs[br.k + 1]);
    }
    let xi_t = br.gamma.xi;
    let j_t = right_jacobian(&xi_t);
    let mut h = Matrix12::zeros();
    h.fixed_view_mut::<6, 6>(0, 0).copy_from(&j_t);
    h.fixed_view_mut::<6, 6>(6, 0)
        .copy_from(&right_jacobian_derivative(&xi_t, &br.gamma.psi.0));
    h.fixed_view_mut::<6, 6>(6, 6).copy_from(&j_t);

    // δγ_k(s_k) = (0, δε_k)
    let mut a0 = Matrix12x24::zeros();
    a0.fixed_view_mut::<6, 6>(6, 6).copy_from(&Matrix6::identity());
    // δξ1 = J_r(ξ1)⁻¹·δt_{k+1} − J(ξ1)⁻¹·δt_k, δψ1 = D·δξ1 + J_r(ξ1)⁻¹·δε_{k+1}
    let j1inv = right_jacobian_inv(&br.xi1);
    let mut dxi1 = nalgebra::SMatrix::<f64, 6, 24>::zeros();
    dxi1.fixed_view_mut::<6, 6>(0, 0).copy_from(&(-left_jacobian_inv(&br.xi1)));
    dxi1.fixed_view_mut::<6, 6>(0, 12).copy_from(&j1inv);
    let mut dpsi1 = right_jacobian_inv_derivative(&br.xi1, &br.b.strain.0) * dxi1;
    let mut tail = dpsi1.fixed_view_mut::<6, 6>(0, 18);
    tail += j1inv;
    let mut a1 = Matrix12x24::zeros();
    a1.fixed_view_mut::<6, 24>(0, 0).copy_from(&dxi1);
    a1.fixed_view_mut::<6, 24>(6, 0).copy_from(&dpsi1);

    let mut m = h * (br.lambda * a0 + br.psi * a1);
    let ad_t = adjoint(&exp_se3(&Twist(-xi_t.0)));
    let mut head = m.fixed_view_mut::<6, 6>(0, 0);
    head += ad_t;

    let q_t = process_cov_unchecked(tau - sk, &solution.hyper);
    let q_cond = q_t - br.psi * transition_unchecked(sk1 - tau) * q_t;
    let mut p = m * joint * m.transpose() + h * q_cond * h.transpose();
    p = (p + p.transpose()) * 0.5;
    Ok(p)
}

/// Local GP state `γ(τ)` in the frame of the bracketing node `k`.
pub fn query_local(solution: &Solution, tau: f64) -> Result<(usize, Vector12)> {
    let br = bracket(solution, tau)?;
    Ok((br.k, br.gamma.to_vector()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyper() -> PriorHyperparams {
        PriorHyperparams::diagonal([1.0, 2.0, 3.0, 40.0, 50.0, 60.0], Twist::zero()).unwrap()
    }

    #[test]
    fn endpoints() {
        let (l, p) = interp_matrices(0.2, 0.2, 0.5, &hyper()).unwrap();
        assert!((l - Matrix12::identity()).amax() < 1e-12);
        assert!(p.amax() < 1e-12);
        let (l, p) = interp_matrices(0.5, 0.2, 0.5, &hyper()).unwrap();
        assert!(l.amax() < 1e-10);
        assert!((p - Matrix12::identity()).amax() < 1e-10);
        assert!(interp_matrices(0.6, 0.2, 0.5, &hyper()).is_err());
    }

    #[test]
    fn rearrangement_identity() {
        let (l, p) = interp_matrices(0.31, 0.2, 0.5, &hyper()).unwrap();
        let lhs = l + p * transition_unchecked(0.3);
        assert!((lhs - transition_unchecked(0.11)).amax() < 1e-12);
    }
}
