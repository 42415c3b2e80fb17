mod common;

use common::*;
use nalgebra::{Vector3, Vector6};
use rodgp_core::measurement::Measurement;
use rodgp_core::rodsim::{
    extract_measurements, integrate_rod, sample_actuations, sample_dataset, solve_static,
    stiffness, tendon_point_wrenches, tendon_wrench, Actuation, RodProperties, Scenario,
    SensorNoise, Tendon,
};
use rodgp_core::se3::log_se3;

fn one_segment() -> RodProperties {
    RodProperties {
        segment_lengths: vec![0.14],
        tendons: vec![Tendon { segment: 0, theta: 0.0 }, Tendon { segment: 0, theta: std::f64::consts::PI }],
        ..RodProperties::default()
    }
}

fn ei(props: &RodProperties) -> f64 {
    stiffness(props)[(4, 4)]
}

/// Planar arc bending about the body y axis with curvature `kappa` and
/// axial stretch `stretch`.
fn arc(s: f64, kappa: f64, stretch: f64) -> Vector3<f64> {
    let th = kappa * s;
    Vector3::new(stretch * th.sin() / kappa, 0.0, stretch * (th.cos() - 1.0) / kappa)
}

#[test]
fn stiffness_examples() {
    let p = RodProperties::default();
    assert!((ei(&p) - 2.651e-3).abs() < 1e-6);
    let mut q = p.clone();
    q.diameter *= 2.0;
    assert!((ei(&q) / ei(&p) - 16.0).abs() < 1e-12);
    q.poisson = 0.0;
    let k = stiffness(&q);
    let area = std::f64::consts::PI * q.diameter * q.diameter / 4.0;
    assert!((k[(1, 1)] - q.youngs_modulus / 2.0 * area).abs() < 1e-9 * k[(1, 1)]);
}

#[test]
fn tendon_wrench_examples() {
    let p = RodProperties::default();
    let act = Actuation::zero(&p);
    assert!(tendon_point_wrenches(&p, &act).is_empty());
    let w = tendon_wrench(&p, &Tendon { segment: 0, theta: 0.0 }, 1.0);
    let m = Vector3::new(w[3], w[4], w[5]);
    assert!((m.norm() - 7e-3).abs() < 1e-15);
    assert!(m.x.abs() < 1e-15 && m.z.abs() < 1e-15);
    let a = tendon_wrench(&p, &Tendon { segment: 0, theta: 0.0 }, 2.0);
    let b = tendon_wrench(&p, &Tendon { segment: 0, theta: std::f64::consts::PI }, 2.0);
    let net = a + b;
    assert!(net.fixed_rows::<3>(3).amax() < 1e-15);
    assert_eq!(net.fixed_rows::<3>(0).into_owned(), Vector3::new(-4.0, 0.0, 0.0));
}

#[test]
fn unloaded_rod_is_straight_along_x() {
    let p = RodProperties::default();
    let (shape, residual) = integrate_rod(&p, &Vector6::zeros(), &[], &Vector6::zeros()).unwrap();
    assert_eq!(residual, Vector6::zeros());
    for smp in shape.samples() {
        let n = smp.node;
        assert!((n.pose.translation() - Vector3::new(n.s, 0.0, 0.0)).amax() < 1e-12);
        assert!((n.pose.rotation() - nalgebra::Matrix3::identity()).amax() < 1e-12);
        assert_eq!(n.strain.0, Vector6::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0));
    }
    let s = solve_static(&p, &Actuation::zero(&p)).unwrap();
    assert!((s.tip().node.pose.translation() - Vector3::new(0.28, 0.0, 0.0)).amax() < 1e-12);
}

#[test]
fn tip_moment_gives_constant_curvature() {
    let p = one_segment();
    let m = 2e-3;
    let mut act = Actuation::zero(&p);
    act.tip_wrench[4] = m;
    let shape = solve_static(&p, &act).unwrap();
    let kappa = m / ei(&p);
    for smp in shape.samples() {
        let e = smp.node.strain.0;
        assert!((e[4] - kappa).abs() < 1e-9 * kappa, "{} vs {kappa}", e[4]);
        assert!((smp.node.pose.translation() - arc(smp.node.s, kappa, 1.0)).amax() < 1e-6);
    }
}

#[test]
fn single_tendon_bends_into_an_arc() {
    let p = one_segment();
    let tau = 1.0;
    let mut act = Actuation::zero(&p);
    act.tensions[0] = tau;
    let shape = solve_static(&p, &act).unwrap();
    let k = stiffness(&p);
    // Moment r·τ about −y, compressive follower force τ.
    let kappa = -p.pitch_radius * tau / k[(4, 4)];
    let stretch = 1.0 - tau / k[(0, 0)];
    for smp in shape.samples() {
        assert!((smp.node.pose.translation() - arc(smp.node.s, kappa, stretch)).amax() < 1e-6);
    }
}

#[test]
fn halving_the_step_changes_the_tip_by_less_than_1e8() {
    let p = RodProperties::default();
    let mut act = Actuation::zero(&p);
    act.tensions[1] = 2.0;
    act.tensions[6] = 1.2;
    act.tip_wrench = Vector6::new(0.05, -0.08, 0.03, 0.004, -0.006, 0.002);
    let coarse = solve_static(&p, &act).unwrap();
    let fine = solve_static(&RodProperties { steps_per_segment: 2 * p.steps_per_segment, ..p.clone() }, &act).unwrap();
    let d = (coarse.tip().node.pose.translation() - fine.tip().node.pose.translation()).norm();
    assert!(d < 1e-8, "{d:e}");
}

#[test]
fn equilibrium_residual_is_below_tolerance() {
    let p = RodProperties::default();
    let acts = sample_actuations(&p, 12, 0.5, &mut rng(1)).unwrap();
    for act in acts {
        let shape = solve_static(&p, &act).unwrap();
        let base = shape.samples()[0].sigma;
        let (_, residual) = integrate_rod(&p, &base, &tendon_point_wrenches(&p, &act), &act.tip_wrench).unwrap();
        assert!(residual.amax() < 1e-9, "{:e}", residual.amax());
        assert_eq!(shape.samples()[0].node.pose, rodgp_core::se3::Pose::identity());
    }
}

#[test]
fn tip_moves_continuously_with_tension() {
    let p = RodProperties::default();
    let mut prev: Option<Vector3<f64>> = None;
    for i in 0..30 {
        let mut act = Actuation::zero(&p);
        act.tensions[0] = 0.1 * i as f64;
        act.tensions[6] = 0.5;
        let tip = *solve_static(&p, &act).unwrap().tip().node.pose.translation();
        if let Some(q) = prev {
            let mut a2 = act.clone();
            a2.tensions[0] += 0.01;
            let t2 = *solve_static(&p, &a2).unwrap().tip().node.pose.translation();
            assert!((t2 - tip).norm() < 5e-3);
            assert!((tip - q).norm() < 5e-2);
        }
        prev = Some(tip);
    }
}

#[test]
fn strain_jumps_at_tendon_termination() {
    let p = RodProperties::default();
    let mut act = Actuation::zero(&p);
    act.tensions[0] = 1.5;
    let shape = solve_static(&p, &act).unwrap();
    let l1 = p.segment_ends()[0];
    let at: Vec<_> = shape.samples().into_iter().filter(|s| (s.node.s - l1).abs() < 1e-12).collect();
    assert_eq!(at.len(), 2);
    let jump = (at[0].node.strain.0[4] - at[1].node.strain.0[4]).abs();
    assert!(jump > 1.0, "{jump}");
    // The proximal side is what a query at the boundary reports.
    assert_eq!(shape.state_at(l1).unwrap().node.strain, at[0].node.strain);
}

#[test]
fn small_tip_moments_bend_linearly() {
    let p = RodProperties::default();
    let slope = |m: f64| {
        let mut act = Actuation::zero(&p);
        act.tip_wrench[5] = m;
        solve_static(&p, &act).unwrap().samples()[0].node.strain.0[5] / m
    };
    for m in [1e-6, 1e-5, 1e-4] {
        let s = slope(m);
        assert!((s * ei(&p) - 1.0).abs() < 0.01, "{m}: {}", s * ei(&p));
    }
}

#[test]
fn state_at_is_exact_between_samples() {
    let p = RodProperties::default();
    let mut act = Actuation::zero(&p);
    act.tensions[2] = 2.0;
    act.tip_wrench[1] = 0.05;
    let shape = solve_static(&p, &act).unwrap();
    let fine = solve_static(&RodProperties { steps_per_segment: 4 * p.steps_per_segment, ..p.clone() }, &act).unwrap();
    for i in 0..50 {
        let s = 0.28 * (i as f64 + 0.37) / 50.0;
        let a = shape.state_at(s).unwrap().node;
        let b = fine.state_at(s).unwrap().node;
        assert!((a.pose.translation() - b.pose.translation()).norm() < 1e-8);
        assert!(log_se3(&(a.pose.inverse() * b.pose)).unwrap().0.amax() < 1e-7);
    }
    assert!(shape.state_at(0.29).is_err());
}

#[test]
fn dataset_counts_and_ranges() {
    let p = RodProperties::default();
    let acts = sample_actuations(&p, 100, 0.5, &mut rng(2)).unwrap();
    assert_eq!(acts.len(), 100);
    assert_eq!(acts.iter().filter(|a| a.tip_wrench != Vector6::zeros()).count(), 50);
    for a in &acts {
        assert!(a.tensions.iter().all(|&t| (0.0..=3.0).contains(&t)));
        let pulled = a.tensions.iter().filter(|&&t| t > 0.0).count();
        assert!((1..=2).contains(&pulled));
        assert!(a.tip_wrench.fixed_rows::<3>(0).amax() <= 0.1);
        assert!(a.tip_wrench.fixed_rows::<3>(3).amax() <= 0.01);
    }
    let none = sample_actuations(&p, 20, 0.0, &mut rng(3)).unwrap();
    assert!(none.iter().all(|a| a.tip_wrench == Vector6::zeros()));
    let a = sample_dataset(&p, 4, 0.5, &mut rng(4)).unwrap();
    let b = sample_dataset(&p, 4, 0.5, &mut rng(4)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn scenario_measurements() {
    let p = RodProperties::default();
    let mut act = Actuation::zero(&p);
    act.tensions[3] = 1.0;
    let shape = solve_static(&p, &act).unwrap();
    let mut r = rng(5);
    let noise = SensorNoise::default();
    let m = extract_measurements(&shape, &p, Scenario::PoseAtSegmentEnds, &noise, &mut r).unwrap();
    let s: Vec<f64> = m.iter().map(|m| m.s()).collect();
    assert_eq!(s, vec![0.14, 0.28]);
    let m = extract_measurements(&shape, &p, Scenario::StrainAtDisks, &noise, &mut r).unwrap();
    assert_eq!(m.len(), 14);
    assert!(m.iter().all(|m| matches!(m, Measurement::Strain(_))));
    let m = extract_measurements(&shape, &p, Scenario::StrainPlusTipPose, &noise, &mut r).unwrap();
    assert_eq!(m.len(), 15);

    let silent = SensorNoise { sigma_t: 0.0, sigma_a: 0.0, sigma_nu: 0.0, sigma_omega: 0.0, ..noise };
    for scenario in Scenario::ALL {
        for m in extract_measurements(&shape, &p, scenario, &silent, &mut r).unwrap() {
            let truth = shape.state_at(m.s()).unwrap().node;
            match m {
                Measurement::Pose(pm) => assert_eq!(pm.pose, truth.pose),
                Measurement::Strain(sm) => assert_eq!(sm.strain, truth.strain),
            }
        }
    }
}
