//! Shared oracles for the integration tests. Nothing here calls into the
//! closed-form Lie-group code under test: matrix exponentials and logarithms
//! are computed from their power series.
#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix3, Matrix4, Matrix6, Vector3, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rodgp_core::prior::StateNode;
use rodgp_core::se3::Pose;
use rodgp_core::Twist;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec3<R: Rng>(rng: &mut R, scale: f64) -> Vector3<f64> {
    Vector3::from_fn(|_, _| rng.random_range(-scale..scale))
}

/// Twist with translation within ±`nu` and rotation norm at most `max_angle`.
pub fn random_twist<R: Rng>(rng: &mut R, nu: f64, max_angle: f64) -> Twist {
    let axis = random_vec3(rng, 1.0);
    let axis = if axis.norm() < 1e-3 { Vector3::x() } else { axis.normalize() };
    let angle = rng.random_range(0.0..max_angle);
    Twist::new(random_vec3(rng, nu), axis * angle)
}

pub fn random_pose<R: Rng>(rng: &mut R) -> Pose {
    series_exp(&random_twist(rng, 2.0, 3.0))
}

pub fn random_node<R: Rng>(rng: &mut R, s: f64) -> StateNode {
    StateNode::new(s, random_pose(rng), Twist(Vector6::from_fn(|_, _| rng.random_range(-2.0..2.0))))
}

pub fn hat3(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

pub fn hat4(x: &Twist) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&hat3(&x.omega()));
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&x.nu());
    m
}

pub fn curly(x: &Twist) -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    let w = hat3(&x.omega());
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&w);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&w);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&hat3(&x.nu()));
    m
}

/// Matrix exponential by scaling and squaring of the Taylor series.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.abs().max();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let b = a * scale;
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..30 {
        term = &term * &b / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Principal matrix logarithm by inverse scaling and squaring: repeated
/// Denman–Beavers square roots, then the Mercator series.
pub fn logm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut x = a.clone();
    let mut roots = 0;
    while (&x - &id).abs().max() > 1e-3 {
        let mut y = x.clone();
        let mut z = id.clone();
        for _ in 0..60 {
            let yi = y.clone().try_inverse().unwrap();
            let zi = z.clone().try_inverse().unwrap();
            let yn = (&y + &zi) * 0.5;
            z = (&z + &yi) * 0.5;
            y = yn;
        }
        x = y;
        roots += 1;
    }
    let e = &x - &id;
    let mut term = id.clone();
    let mut sum = DMatrix::zeros(n, n);
    for k in 1..40 {
        term = &term * &e;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += &term * (sign / k as f64);
    }
    sum * 2f64.powi(roots)
}

pub fn series_exp(x: &Twist) -> Pose {
    let m = expm(&DMatrix::from_column_slice(4, 4, hat4(x).as_slice()));
    Pose::from_matrix(&Matrix4::from_column_slice(m.as_slice()))
        .unwrap()
        .normalized()
}

pub fn series_log(t: &Pose) -> Twist {
    let m = logm(&DMatrix::from_column_slice(4, 4, t.matrix().as_slice()));
    Twist::new(Vector3::new(m[(0, 3)], m[(1, 3)], m[(2, 3)]), Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)]))
}

/// `Σ_{n<terms} (ξ^⋏)ⁿ/(n+1)!`
pub fn series_jacobian(x: &Twist, terms: usize) -> Matrix6<f64> {
    let a = curly(x);
    let mut p = Matrix6::identity();
    let mut sum = Matrix6::zeros();
    let mut f = 1.0;
    for n in 0..terms {
        f *= (n + 1) as f64;
        sum += p / f;
        p *= a;
    }
    sum
}

/// Perturbs component `j` of the 12-dimensional `(δt, δε)` of a node.
pub fn perturb_node(node: &StateNode, j: usize, h: f64) -> StateNode {
    let mut out = *node;
    if j < 6 {
        let mut d = Vector6::zeros();
        d[j] = h;
        out.pose = node.pose * series_exp(&Twist(d));
    } else {
        out.strain.0[j - 6] += h;
    }
    out
}

/// Central-difference Jacobian of `f` over the `(δt, δε)` of each node.
pub fn fd_jacobian<F>(nodes: &[StateNode], h: f64, f: F) -> DMatrix<f64>
where
    F: Fn(&[StateNode]) -> Vec<f64>,
{
    let m = f(nodes).len();
    let mut out = DMatrix::zeros(m, 12 * nodes.len());
    for i in 0..nodes.len() {
        for j in 0..12 {
            let mut plus = nodes.to_vec();
            let mut minus = nodes.to_vec();
            plus[i] = perturb_node(&nodes[i], j, h);
            minus[i] = perturb_node(&nodes[i], j, -h);
            let fp = f(&plus);
            let fm = f(&minus);
            for r in 0..m {
                out[(r, 12 * i + j)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
    }
    out
}

pub fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// `max|a − b| / max(max|b|, floor)` for equally shaped slices.
pub fn rel_diff(a: &[f64], b: &[f64], floor: f64) -> f64 {
    let num = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let den = b.iter().map(|y| y.abs()).fold(floor, f64::max);
    num / den
}

pub fn sample_cov(samples: &[Vec<f64>]) -> DMatrix<f64> {
    let n = samples[0].len();
    let count = samples.len() as f64;
    let mut mean = vec![0.0; n];
    for s in samples {
        for i in 0..n {
            mean[i] += s[i] / count;
        }
    }
    let mut c = DMatrix::zeros(n, n);
    for s in samples {
        for i in 0..n {
            for j in 0..n {
                c[(i, j)] += (s[i] - mean[i]) * (s[j] - mean[j]) / (count - 1.0);
            }
        }
    }
    c
}
