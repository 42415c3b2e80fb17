//! SO(3)/SE(3) primitives.
//!
//! Twists are stacked translation-over-rotation, `[ν; ω]`, everywhere in the
//! crate. A [`Pose`] maps body coordinates to the base frame, so its
//! translation is the body origin. The estimator perturbs poses on the right,
//! in body coordinates: `T ← T·exp(δ^)`.

use core::ops::Mul;

use nalgebra::{Matrix3, Matrix4, Matrix6, Vector3, Vector6};

use crate::error::LieError;

/// Tolerance on the structural zeros checked by [`vee3`] and [`vee6`].
pub const STRUCTURE_TOL: f64 = 1e-9;
/// Tolerance on `CᵀC = I` and `det C = 1` for a valid [`Pose`].
pub const ORTHONORMAL_TOL: f64 = 1e-9;
/// Rotations closer than this to π are outside the principal branch of `log`.
pub const BRANCH_MARGIN: f64 = 1e-6;
/// Number of terms used by [`left_jacobian_series`] when called with the default.
pub const SERIES_TERMS: usize = 30;

// Below these angles the trigonometric coefficients switch to their Taylor
// expansions.
const SMALL_ANGLE: f64 = 1e-8;
const TAYLOR_ANGLE: f64 = 0.5;

/// A 6-vector `[ν; ω]`: generalized strain, or a Lie-algebra pose increment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Twist(pub Vector6<f64>);

impl Twist {
    pub fn new(nu: Vector3<f64>, omega: Vector3<f64>) -> Self {
        Twist(Vector6::new(nu.x, nu.y, nu.z, omega.x, omega.y, omega.z))
    }

    pub fn zero() -> Self {
        Twist(Vector6::zeros())
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        Twist(Vector6::from(v))
    }

    pub fn to_array(&self) -> [f64; 6] {
        self.0.into()
    }

    /// Translational part `ν`.
    pub fn nu(&self) -> Vector3<f64> {
        self.0.fixed_rows::<3>(0).into_owned()
    }

    /// Rotational part `ω`.
    pub fn omega(&self) -> Vector3<f64> {
        self.0.fixed_rows::<3>(3).into_owned()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Twist(self.0 * factor)
    }
}

impl From<Vector6<f64>> for Twist {
    fn from(v: Vector6<f64>) -> Self {
        Twist(v)
    }
}

impl From<Twist> for Vector6<f64> {
    fn from(t: Twist) -> Self {
        t.0
    }
}

/// Element of SE(3) stored as rotation `C` and translation `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    rot: Matrix3<f64>,
    trans: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rot: Matrix3::identity(),
            trans: Vector3::zeros(),
        }
    }

    /// Builds a pose, checking that `rot` is a proper rotation.
    pub fn new(rot: Matrix3<f64>, trans: Vector3<f64>) -> Result<Self, LieError> {
        let orth = (rot.transpose() * rot - Matrix3::identity()).amax();
        let det = rot.determinant();
        if !(orth <= ORTHONORMAL_TOL && (det - 1.0).abs() <= ORTHONORMAL_TOL) {
            return Err(LieError::NotARotation { orthogonality: orth, determinant: det });
        }
        if !trans.iter().all(|x| x.is_finite()) {
            return Err(LieError::NonFinite);
        }
        Ok(Pose { rot, trans })
    }

    /// Builds a pose without validation; callers guarantee `rot ∈ SO(3)`.
    pub(crate) fn from_parts_unchecked(rot: Matrix3<f64>, trans: Vector3<f64>) -> Self {
        Pose { rot, trans }
    }

    pub fn from_translation(trans: Vector3<f64>) -> Self {
        Pose { rot: Matrix3::identity(), trans }
    }

    pub fn from_matrix(m: &Matrix4<f64>) -> Result<Self, LieError> {
        let bottom = [m[(3, 0)], m[(3, 1)], m[(3, 2)], m[(3, 3)] - 1.0];
        if bottom.iter().any(|x| x.abs() > STRUCTURE_TOL) {
            return Err(LieError::Structure);
        }
        Pose::new(
            m.fixed_view::<3, 3>(0, 0).into_owned(),
            m.fixed_view::<3, 1>(0, 3).into_owned(),
        )
    }

    /// Row-major 4×4 layout used by the file formats.
    pub fn from_row_major(v: &[f64; 16]) -> Result<Self, LieError> {
        Pose::from_matrix(&Matrix4::from_row_slice(v))
    }

    pub fn to_row_major(&self) -> [f64; 16] {
        let m = self.matrix();
        let mut out = [0.0; 16];
        for r in 0..4 {
            for c in 0..4 {
                out[4 * r + c] = m[(r, c)];
            }
        }
        out
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rot
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.trans
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rot);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.trans);
        m
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rot.transpose();
        Pose {
            rot: rt,
            trans: -(rt * self.trans),
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rot * p + self.trans
    }

    /// Rotation angle of `C` in `[0, π]`.
    pub fn rotation_angle(&self) -> f64 {
        rotation_angle(&self.rot)
    }

    /// Re-orthonormalizes the rotation block (polar projection via SVD).
    pub fn normalized(&self) -> Self {
        let svd = self.rot.svd(true, true);
        let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
        let mut rot = u * vt;
        if rot.determinant() < 0.0 {
            let mut u = u;
            u.column_mut(2).neg_mut();
            rot = u * vt;
        }
        Pose { rot, trans: self.trans }
    }
}

impl Mul for Pose {
    type Output = Pose;
    fn mul(self, rhs: Pose) -> Pose {
        Pose {
            rot: self.rot * rhs.rot,
            trans: self.rot * rhs.trans + self.trans,
        }
    }
}

impl Mul<&Pose> for &Pose {
    type Output = Pose;
    fn mul(self, rhs: &Pose) -> Pose {
        *self * *rhs
    }
}

fn rotation_angle(rot: &Matrix3<f64>) -> f64 {
    let s = skew_part(rot).norm();
    let c = 0.5 * (rot.trace() - 1.0);
    libm::atan2(s, c)
}

fn skew_part(rot: &Matrix3<f64>) -> Vector3<f64> {
    0.5 * Vector3::new(
        rot[(2, 1)] - rot[(1, 2)],
        rot[(0, 2)] - rot[(2, 0)],
        rot[(1, 0)] - rot[(0, 1)],
    )
}

/// `v^`: the 3×3 skew matrix with `hat3(v)·w = v × w`.
#[rustfmt::skip]
pub fn hat3(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(
        0.0, -v.z, v.y,
        v.z, 0.0, -v.x,
        -v.y, v.x, 0.0,
    )
}

/// Inverse of [`hat3`]; rejects matrices that are not skew-symmetric.
pub fn vee3(m: &Matrix3<f64>) -> Result<Vector3<f64>, LieError> {
    let sym = (m + m.transpose()).amax();
    if sym > STRUCTURE_TOL {
        return Err(LieError::Structure);
    }
    Ok(Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)]))
}

/// `ξ^ = [[ω^, ν], [0ᵀ, 0]]`.
pub fn hat6(x: &Twist) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&hat3(&x.omega()));
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&x.nu());
    m
}

/// Inverse of [`hat6`]; the bottom row must vanish and the rotation block be skew.
pub fn vee6(m: &Matrix4<f64>) -> Result<Twist, LieError> {
    if (0..4).any(|c| m[(3, c)].abs() > STRUCTURE_TOL) {
        return Err(LieError::Structure);
    }
    let omega = vee3(&m.fixed_view::<3, 3>(0, 0).into_owned())?;
    let nu = m.fixed_view::<3, 1>(0, 3).into_owned();
    Ok(Twist::new(nu, omega))
}

/// `ξ^⋏ = [[ω^, ν^], [0, ω^]]`, the adjoint action of the Lie algebra.
pub fn curly_hat(x: &Twist) -> Matrix6<f64> {
    let w = hat3(&x.omega());
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&w);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&w);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&hat3(&x.nu()));
    m
}

/// `Ad(T) = [[C, r^C], [0, C]]`.
pub fn adjoint(t: &Pose) -> Matrix6<f64> {
    let c = t.rot;
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&c);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&c);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&(hat3(&t.trans) * c));
    m
}

// Trigonometric coefficients, each with a Taylor branch in x = φ².

/// sin φ / φ
fn coeff_a(phi: f64) -> f64 {
    if phi < TAYLOR_ANGLE {
        alternating_series(phi * phi, |k| 1.0 / factorial(2 * k + 1))
    } else {
        libm::sin(phi) / phi
    }
}

/// (1 − cos φ) / φ²
fn coeff_b(phi: f64) -> f64 {
    if phi < TAYLOR_ANGLE {
        alternating_series(phi * phi, |k| 1.0 / factorial(2 * k + 2))
    } else {
        let h = libm::sin(0.5 * phi);
        2.0 * h * h / (phi * phi)
    }
}

/// (φ − sin φ) / φ³
fn coeff_c(phi: f64) -> f64 {
    if phi < TAYLOR_ANGLE {
        alternating_series(phi * phi, |k| 1.0 / factorial(2 * k + 3))
    } else {
        (phi - libm::sin(phi)) / (phi * phi * phi)
    }
}

/// (φ² + 2 cos φ − 2) / (2 φ⁴)
fn coeff_d(phi: f64) -> f64 {
    if phi < TAYLOR_ANGLE {
        alternating_series(phi * phi, |k| 1.0 / factorial(2 * k + 4))
    } else {
        let p2 = phi * phi;
        (p2 + 2.0 * libm::cos(phi) - 2.0) / (2.0 * p2 * p2)
    }
}

/// (2φ − 3 sin φ + φ cos φ) / (2 φ⁵)
fn coeff_e(phi: f64) -> f64 {
    if phi < TAYLOR_ANGLE {
        alternating_series(phi * phi, |k| (k as f64 + 1.0) / factorial(2 * k + 5))
    } else {
        let p2 = phi * phi;
        (2.0 * phi - 3.0 * libm::sin(phi) + phi * libm::cos(phi)) / (2.0 * p2 * p2 * phi)
    }
}

/// 1/φ² − (1 + cos φ) / (2 φ sin φ)
fn coeff_f(phi: f64) -> f64 {
    if phi < 0.1 {
        let x = phi * phi;
        1.0 / 12.0 + x / 720.0 + x * x / 30240.0 + x * x * x / 1209600.0
    } else {
        1.0 / (phi * phi) - (1.0 + libm::cos(phi)) / (2.0 * phi * libm::sin(phi))
    }
}

fn alternating_series(x: f64, term: impl Fn(usize) -> f64) -> f64 {
    // x ≤ 0.25 here, so twelve terms reach full double precision.
    let mut sum = 0.0;
    let mut pow = 1.0;
    for k in 0..12 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * term(k) * pow;
        pow *= x;
    }
    sum
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn exp_so3(omega: &Vector3<f64>) -> Matrix3<f64> {
    let phi = omega.norm();
    let w = hat3(omega);
    if phi < SMALL_ANGLE {
        return Matrix3::identity() + w + 0.5 * w * w;
    }
    Matrix3::identity() + coeff_a(phi) * w + coeff_b(phi) * w * w
}

/// Principal logarithm of a rotation; fails within [`BRANCH_MARGIN`] of π.
pub fn log_so3(rot: &Matrix3<f64>) -> Result<Vector3<f64>, LieError> {
    let s = skew_part(rot);
    let sin = s.norm();
    let cos = 0.5 * (rot.trace() - 1.0);
    let angle = libm::atan2(sin, cos);
    if angle > core::f64::consts::PI - BRANCH_MARGIN {
        return Err(LieError::BranchCut { angle });
    }
    let factor = if angle < 1e-4 {
        let a2 = angle * angle;
        1.0 + a2 / 6.0 + 7.0 * a2 * a2 / 360.0
    } else {
        angle / sin
    };
    Ok(s * factor)
}

/// Left Jacobian of SO(3).
pub fn so3_left_jacobian(omega: &Vector3<f64>) -> Matrix3<f64> {
    let phi = omega.norm();
    let w = hat3(omega);
    if phi < SMALL_ANGLE {
        return Matrix3::identity() + 0.5 * w + w * w / 6.0;
    }
    Matrix3::identity() + coeff_b(phi) * w + coeff_c(phi) * w * w
}

pub fn so3_left_jacobian_inv(omega: &Vector3<f64>) -> Matrix3<f64> {
    let phi = omega.norm();
    let w = hat3(omega);
    if phi < SMALL_ANGLE {
        return Matrix3::identity() - 0.5 * w + w * w / 12.0;
    }
    Matrix3::identity() - 0.5 * w + coeff_f(phi) * w * w
}

/// Coupling block `Q(ν, ω)` of the SE(3) left Jacobian.
fn jacobian_coupling(x: &Twist) -> Matrix3<f64> {
    let omega = x.omega();
    let phi = omega.norm();
    let v = hat3(&x.nu());
    let w = hat3(&omega);
    let wv = w * v;
    let vw = v * w;
    let wvw = wv * w;
    let ww = w * w;
    if phi < SMALL_ANGLE {
        return 0.5 * v + (wv + vw + wvw) / 6.0 + (ww * v + v * ww - 3.0 * wvw) / 24.0;
    }
    0.5 * v
        + coeff_c(phi) * (wv + vw + wvw)
        + coeff_d(phi) * (ww * v + v * ww - 3.0 * wvw)
        + coeff_e(phi) * (wvw * w + w * wvw)
}

pub fn exp_se3(xi: &Twist) -> Pose {
    let omega = xi.omega();
    let rot = exp_so3(&omega);
    let trans = so3_left_jacobian(&omega) * xi.nu();
    Pose::from_parts_unchecked(rot, trans)
}

pub fn log_se3(t: &Pose) -> Result<Twist, LieError> {
    let omega = log_so3(&t.rot)?;
    let nu = so3_left_jacobian_inv(&omega) * t.trans;
    Ok(Twist::new(nu, omega))
}

/// Left Jacobian of SE(3); requires `‖ω‖ < π`.
pub fn left_jacobian(xi: &Twist) -> Matrix6<f64> {
    let j = so3_left_jacobian(&xi.omega());
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&j);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&j);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&jacobian_coupling(xi));
    m
}

pub fn left_jacobian_inv(xi: &Twist) -> Matrix6<f64> {
    let ji = so3_left_jacobian_inv(&xi.omega());
    let q = jacobian_coupling(xi);
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&ji);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&ji);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-ji * q * ji));
    m
}

/// `Σ_{n<terms} (ξ^⋏)ⁿ / (n+1)!`, the defining series of the left Jacobian.
pub fn left_jacobian_series(xi: &Twist, terms: usize) -> Matrix6<f64> {
    let a = curly_hat(xi);
    let mut power = Matrix6::identity();
    let mut sum = Matrix6::zeros();
    let mut fact = 1.0;
    for n in 0..terms {
        fact *= (n + 1) as f64;
        sum += power / fact;
        power *= a;
    }
    sum
}

// Enough terms for ‖ω‖ ≤ π: the tail is below 1e-20.
const DERIVATIVE_TERMS: usize = 40;

/// `∂(J(ξ)·v)/∂ξ`, the derivative of the left Jacobian applied to a fixed vector.
///
/// Evaluated from the defining series of `J`, differentiated term by term.
pub fn left_jacobian_derivative(xi: &Twist, v: &Vector6<f64>) -> Matrix6<f64> {
    let n = DERIVATIVE_TERMS;
    let a = curly_hat(xi);
    // c[m] = 1/(m+1)!
    let mut c = [0.0; DERIVATIVE_TERMS + 1];
    let mut fact = 1.0;
    for (m, cm) in c.iter_mut().enumerate() {
        fact *= (m + 1) as f64;
        *cm = 1.0 / fact;
    }
    // u[j] = Aʲ v
    let mut u = [Vector6::zeros(); DERIVATIVE_TERMS];
    u[0] = *v;
    for j in 1..n {
        u[j] = a * u[j - 1];
    }
    // d/dξ Σ c_m Aᵐ v = −Σ_i Aⁱ (Σ_j c_{i+1+j} u_j)^⋏
    let mut out = Matrix6::zeros();
    let mut power = Matrix6::<f64>::identity();
    for i in 0..n {
        let mut w = Vector6::zeros();
        for (j, uj) in u.iter().enumerate().take(n - i) {
            w += c[i + 1 + j] * uj;
        }
        out -= power * curly_hat(&Twist(w));
        power *= a;
    }
    out
}

/// `∂(J(ξ)⁻¹·v)/∂ξ`.
pub fn left_jacobian_inv_derivative(xi: &Twist, v: &Vector6<f64>) -> Matrix6<f64> {
    let jinv = left_jacobian_inv(xi);
    -jinv * left_jacobian_derivative(xi, &(jinv * v))
}

/// Right Jacobian `J_r(ξ) = J(−ξ)`, the differential of `exp` under right
/// perturbations: `exp((ξ + δ)^) ≈ exp(ξ^)·exp((J_r(ξ)·δ)^)`.
pub fn right_jacobian(xi: &Twist) -> Matrix6<f64> {
    left_jacobian(&xi.scale(-1.0))
}

pub fn right_jacobian_inv(xi: &Twist) -> Matrix6<f64> {
    left_jacobian_inv(&xi.scale(-1.0))
}

/// `∂(J_r(ξ)·v)/∂ξ`.
pub fn right_jacobian_derivative(xi: &Twist, v: &Vector6<f64>) -> Matrix6<f64> {
    -left_jacobian_derivative(&xi.scale(-1.0), v)
}

/// `∂(J_r(ξ)⁻¹·v)/∂ξ`.
pub fn right_jacobian_inv_derivative(xi: &Twist, v: &Vector6<f64>) -> Matrix6<f64> {
    -left_jacobian_inv_derivative(&xi.scale(-1.0), v)
}

/// `T ← T·exp(δ^)`.
pub fn perturb(t: &Pose, delta: &Twist) -> Pose {
    *t * exp_se3(delta)
}
