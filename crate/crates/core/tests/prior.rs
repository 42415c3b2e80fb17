mod common;

use common::*;
use nalgebra::{DMatrix, Matrix6, Vector6};
use rand::Rng;
use rodgp_core::prior::{
    prior_cost, prior_error, prior_error_jacobian, prior_error_jacobian_small_angle, prior_mean,
    process_cov, process_cov_inv, sample_prior, transition, NodeGrid, PriorHyperparams, StateNode,
};
use rodgp_core::se3::{exp_se3, log_se3, Pose};
use rodgp_core::{Twist, Vector12};

fn eps_bar() -> Twist {
    Twist::from_array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
}

fn dense(m: &rodgp_core::Matrix12) -> DMatrix<f64> {
    DMatrix::from_column_slice(12, 12, m.as_slice())
}

#[test]
fn transition_semigroup() {
    let mut r = rng(1);
    for _ in 0..100 {
        let a: f64 = r.random_range(0.0..1.0);
        let b = a + r.random_range(0.0..1.0);
        let c = b + r.random_range(0.0..1.0);
        let lhs = transition(c, a).unwrap();
        let rhs = transition(c, b).unwrap() * transition(b, a).unwrap();
        assert!((lhs - rhs).amax() < 1e-12);
    }
    assert!(transition(0.0, 1.0).is_err());
}

#[test]
fn process_cov_inverse_matches_dense_inverse() {
    let mut r = rng(2);
    for _ in 0..200 {
        let diag: [f64; 6] = core::array::from_fn(|_| r.random_range(0.01..10.0));
        let hyper = PriorHyperparams::diagonal(diag, eps_bar()).unwrap();
        let ds = r.random_range(1e-3..1.0);
        let q = process_cov(ds, &hyper).unwrap();
        let qi = process_cov_inv(ds, &hyper).unwrap();
        assert!((q * qi - rodgp_core::Matrix12::identity()).amax() < 1e-8);
        let inv = dense(&q).try_inverse().unwrap();
        assert!(rel_err(&dense(&qi), &inv) < 1e-8);
        assert!((q - q.transpose()).amax() == 0.0);
        assert!(q.symmetric_eigen().eigenvalues.min() > 0.0);
    }
    assert!(process_cov(0.0, &PriorHyperparams::diagonal([1.0; 6], eps_bar()).unwrap()).is_err());
}

#[test]
fn indefinite_psd_rejected() {
    let mut q = Matrix6::identity();
    q[(2, 2)] = -1.0;
    assert!(PriorHyperparams::new(q, eps_bar()).is_err());
    let mut q = Matrix6::identity();
    q[(0, 1)] = 0.5;
    assert!(PriorHyperparams::new(q, eps_bar()).is_err());
}

/// Local-variable form: `γ_k(s_k) − Φ·γ_k(s_{k−1})` with `γ_k(s_{k−1}) = (0, ε_{k−1})`
/// and `γ_k(s_k) = (ξ, J_r(ξ)⁻¹ε_k)`, all from series oracles.
fn local_error_oracle(prev: &StateNode, cur: &StateNode) -> Vector12 {
    let xi = series_log(&(prev.pose.inverse() * cur.pose));
    let jr = series_jacobian(&Twist(-xi.0), 40);
    let psi = jr.try_inverse().unwrap() * cur.strain.0;
    let g0 = Vector12::from_iterator(Vector6::zeros().iter().chain(prev.strain.0.iter()).copied());
    let g1 = Vector12::from_iterator(xi.0.iter().chain(psi.iter()).copied());
    g1 - transition(cur.s, prev.s).unwrap() * g0
}

#[test]
fn prior_error_matches_local_variable_form() {
    let mut r = rng(3);
    for _ in 0..200 {
        let prev = random_node(&mut r, 0.2);
        let ds = r.random_range(0.05..1.0);
        let step = random_twist(&mut r, 1.0, 2.5);
        let cur = StateNode::new(
            0.2 + ds,
            prev.pose * series_exp(&step),
            Twist(Vector6::from_fn(|_, _| r.random_range(-2.0..2.0))),
        );
        let got = prior_error(&prev, &cur).unwrap();
        let want = local_error_oracle(&prev, &cur);
        assert!((got - want).amax() < 1e-8 * want.amax().max(1.0), "{got:?} vs {want:?}");
    }
}

#[test]
fn constant_strain_rollout_has_zero_error() {
    let mut r = rng(4);
    for _ in 0..200 {
        let eps = random_twist(&mut r, 1.0, 2.0);
        let grid = NodeGrid::new({
            let mut s = vec![0.0];
            for _ in 0..5 {
                let last = *s.last().unwrap();
                s.push(last + r.random_range(0.05..0.5));
            }
            s
        })
        .unwrap();
        let hyper = PriorHyperparams::diagonal([1.0; 6], eps).unwrap();
        let root = random_pose(&mut r);
        let nodes = prior_mean(&hyper, &grid, &root);
        for w in nodes.windows(2) {
            assert!(prior_error(&w[0], &w[1]).unwrap().amax() < 1e-9);
        }
    }
    let a = StateNode::new(0.0, Pose::identity(), Twist::zero());
    let b = StateNode::new(1.0, Pose::identity(), Twist::zero());
    assert_eq!(prior_error(&a, &b).unwrap(), Vector12::zeros());
    assert!(prior_error(&b, &a).is_err());
}

#[test]
fn prior_jacobian_matches_finite_differences() {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let prev = random_node(&mut r, 0.0);
        let ds = r.random_range(0.05..1.0);
        let step = random_twist(&mut r, 1.0, 2.5);
        let cur = StateNode::new(ds, prev.pose * exp_se3(&step), Twist(Vector6::from_fn(|_, _| r.random_range(-2.0..2.0))));
        let fd = fd_jacobian(&[prev, cur], 1e-6, |n| prior_error(&n[0], &n[1]).unwrap().as_slice().to_vec());
        let j = prior_error_jacobian(&prev, &cur).unwrap();
        let j = DMatrix::from_column_slice(12, 24, j.as_slice());
        worst = worst.max(rel_err(&j, &fd));
    }
    assert!(worst < 1e-4, "worst relative error {worst:e}");
}

#[test]
fn prior_jacobian_blocks() {
    let mut r = rng(6);
    let prev = random_node(&mut r, 0.0);
    let cur = StateNode::new(0.5, prev.pose * exp_se3(&random_twist(&mut r, 0.5, 1.0)), random_node(&mut r, 0.0).strain);
    let j = prior_error_jacobian(&prev, &cur).unwrap();
    let xi = log_se3(&(prev.pose.inverse() * cur.pose)).unwrap();
    let jr_inv = series_jacobian(&Twist(-xi.0), 40).try_inverse().unwrap();
    assert!((j.fixed_view::<6, 6>(6, 18).into_owned() - jr_inv).amax() < 1e-10);
    assert!((j.fixed_view::<6, 6>(0, 12).into_owned() - jr_inv).amax() < 1e-10);
    assert_eq!(j.fixed_view::<6, 6>(0, 18).amax(), 0.0);
    assert_eq!(j.fixed_view::<6, 6>(0, 6).into_owned(), -Matrix6::identity() * 0.5);
    assert_eq!(j.fixed_view::<6, 6>(6, 6).into_owned(), -Matrix6::identity());
}

#[test]
fn small_angle_jacobian_is_first_order_accurate() {
    let mut r = rng(7);
    let prev = random_node(&mut r, 0.0);
    let strain = random_node(&mut r, 0.0).strain;
    let dir = random_twist(&mut r, 1.0, 1.0);
    let gap = |scale: f64| {
        let cur = StateNode::new(0.3, prev.pose * exp_se3(&dir.scale(scale)), strain);
        let a = prior_error_jacobian(&prev, &cur).unwrap();
        let b = prior_error_jacobian_small_angle(&prev, &cur).unwrap();
        (a - b).amax()
    };
    assert!(gap(0.0) < 1e-14);
    let (g1, g2) = (gap(1e-2), gap(5e-3));
    assert!(g1 > 0.0 && (g1 / g2 - 2.0).abs() < 0.1, "{g1} {g2}");
}

#[test]
fn prior_cost_examples() {
    let hyper = PriorHyperparams::diagonal([1.0; 6], eps_bar()).unwrap();
    let grid = NodeGrid::uniform(2.0, 2).unwrap();
    assert_eq!(prior_cost(&[Vector12::zeros(); 2], &hyper, &grid).unwrap(), 0.0);
    let mut e = Vector12::zeros();
    e[0] = 1.0;
    let c = prior_cost(&[e, Vector12::zeros()], &hyper, &grid).unwrap();
    let qi = dense(&process_cov(1.0, &hyper).unwrap()).try_inverse().unwrap();
    assert!((c - 0.5 * qi[(0, 0)]).abs() < 1e-9);
    assert!((c - 6.0).abs() < 1e-12);
    let mut r = rng(8);
    let errs: Vec<Vector12> = (0..2).map(|_| Vector12::from_fn(|_, _| r.random_range(-1.0..1.0))).collect();
    let c1 = prior_cost(&errs, &hyper, &grid).unwrap();
    let c2 = prior_cost(&errs.iter().map(|e| e * 2.0).collect::<Vec<_>>(), &hyper, &grid).unwrap();
    assert!(c1 > 0.0 && (c2 - 4.0 * c1).abs() < 1e-12 * c2);
}

#[test]
fn sampling_is_reproducible() {
    let hyper = PriorHyperparams::diagonal([0.01, 0.01, 0.01, 0.001, 0.001, 0.001], eps_bar()).unwrap();
    let grid = NodeGrid::uniform(10.0, 30).unwrap();
    let a = sample_prior(&hyper, &grid, 5, &mut rng(9), &Pose::identity()).unwrap();
    let b = sample_prior(&hyper, &grid, 5, &mut rng(9), &Pose::identity()).unwrap();
    assert_eq!(a, b);
    let c = sample_prior(&hyper, &grid, 5, &mut rng(10), &Pose::identity()).unwrap();
    assert_ne!(a, c);
}

#[test]
fn vanishing_psd_gives_straight_rod() {
    let hyper = PriorHyperparams::diagonal([1e-18; 6], eps_bar()).unwrap();
    let grid = NodeGrid::uniform(10.0, 30).unwrap();
    let mean = prior_mean(&hyper, &grid, &Pose::identity());
    for shape in sample_prior(&hyper, &grid, 20, &mut rng(11), &Pose::identity()).unwrap() {
        for (n, m) in shape.iter().zip(&mean) {
            assert!((n.pose.matrix() - m.pose.matrix()).amax() < 1e-6);
            assert!((n.strain.0 - m.strain.0).amax() < 1e-6);
        }
        let tip = shape.last().unwrap().pose.translation();
        assert!((tip.x - 10.0).abs() < 1e-6);
    }
}

#[test]
fn samples_spread_over_several_units() {
    let hyper = PriorHyperparams::diagonal([0.01, 0.01, 0.01, 0.001, 0.001, 0.001], eps_bar()).unwrap();
    let grid = NodeGrid::uniform(10.0, 30).unwrap();
    let samples = sample_prior(&hyper, &grid, 300, &mut rng(12), &Pose::identity()).unwrap();
    let tips: Vec<Vec<f64>> = samples.iter().map(|s| s.last().unwrap().pose.translation().as_slice().to_vec()).collect();
    let c = sample_cov(&tips);
    let lateral = (c[(1, 1)] + c[(2, 2)]).sqrt();
    assert!(lateral > 1.0, "lateral tip spread {lateral}");
}

#[test]
fn first_interval_matches_process_covariance() {
    let hyper = PriorHyperparams::diagonal([0.5, 1.0, 2.0, 0.1, 0.2, 0.3], eps_bar()).unwrap();
    let grid = NodeGrid::uniform(1.0, 4).unwrap();
    let samples = sample_prior(&hyper, &grid, 20_000, &mut rng(13), &Pose::identity()).unwrap();
    let xi: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| log_se3(&(s[0].pose.inverse() * s[1].pose)).unwrap().0.as_slice().to_vec())
        .collect();
    let c = sample_cov(&xi);
    let q = process_cov(0.25, &hyper).unwrap();
    for i in 0..6 {
        let rel = (c[(i, i)] - q[(i, i)]).abs() / q[(i, i)];
        assert!(rel < 0.05, "dof {i}: {} vs {}", c[(i, i)], q[(i, i)]);
    }
}
