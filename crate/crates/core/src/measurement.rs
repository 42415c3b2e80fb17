//! Unary measurement factors: SE(3) poses and ℝ⁶ strains at grid nodes.
//!
//! A mask selects the measured degrees of freedom. Masked-out rows are removed
//! from the error and Jacobian, and the covariance is restricted to the kept
//! rows before inversion.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Matrix6, SMatrix, Vector6};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::prior::StateNode;
use crate::se3::{exp_se3, left_jacobian_inv, log_se3, Pose, Twist};
use crate::{Matrix12, Vector12};

pub type Mask = [bool; 6];
pub const FULL_MASK: Mask = [true; 6];
pub type MeasurementJacobian = SMatrix<f64, 6, 12>;

/// Covariance restricted to the masked subspace, with its inverse embedded
/// back into 6×6 (zero on unmeasured rows and columns).
#[derive(Clone, Debug, PartialEq)]
struct MaskedNoise {
    cov: Matrix6<f64>,
    mask: Mask,
    info: Matrix6<f64>,
}

impl MaskedNoise {
    fn new(cov: Matrix6<f64>, mask: Mask) -> Result<Self> {
        if !cov.iter().all(|x| x.is_finite()) {
            return Err(Error::SingularCovariance);
        }
        let rows = selected(&mask);
        let n = rows.len();
        let sub = DMatrix::from_fn(n, n, |i, j| cov[(rows[i], rows[j])]);
        if (&sub - sub.transpose()).amax() > 1e-12 * sub.amax().max(1.0) {
            return Err(Error::SingularCovariance);
        }
        let sub_inv = sub.cholesky().ok_or(Error::SingularCovariance)?.inverse();
        let mut info = Matrix6::zeros();
        for i in 0..n {
            for j in 0..n {
                info[(rows[i], rows[j])] = sub_inv[(i, j)];
            }
        }
        Ok(MaskedNoise { cov, mask, info })
    }
}

fn selected(mask: &Mask) -> Vec<usize> {
    (0..6).filter(|&i| mask[i]).collect()
}

fn select_rows(v: &Vector6<f64>, mask: &Mask) -> DVector<f64> {
    let rows = selected(mask);
    DVector::from_iterator(rows.len(), rows.iter().map(|&i| v[i]))
}

fn select_jacobian_rows(m: &MeasurementJacobian, mask: &Mask) -> DMatrix<f64> {
    let rows = selected(mask);
    DMatrix::from_fn(rows.len(), 12, |i, j| m[(rows[i], j)])
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoseMeasurement {
    pub s: f64,
    pub pose: Pose,
    noise: MaskedNoise,
}

impl PoseMeasurement {
    pub fn new(s: f64, pose: Pose, cov: Matrix6<f64>, mask: Mask) -> Result<Self> {
        Ok(PoseMeasurement {
            s,
            pose,
            noise: MaskedNoise::new(cov, mask)?,
        })
    }

    pub fn cov(&self) -> &Matrix6<f64> {
        &self.noise.cov
    }

    pub fn mask(&self) -> &Mask {
        &self.noise.mask
    }

    /// `ln(T⁻¹·T̃)∨` over all six degrees of freedom.
    pub fn full_error(&self, pose: &Pose) -> Result<Vector6<f64>> {
        Ok(log_se3(&(pose.inverse() * self.pose))?.0)
    }

    /// `[−J(e)⁻¹, 0]` with respect to `(δt, δε)`.
    pub fn full_jacobian(&self, pose: &Pose) -> Result<MeasurementJacobian> {
        let e = log_se3(&(pose.inverse() * self.pose))?;
        let mut g = MeasurementJacobian::zeros();
        g.fixed_view_mut::<6, 6>(0, 0).copy_from(&(-left_jacobian_inv(&e)));
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrainMeasurement {
    pub s: f64,
    pub strain: Twist,
    noise: MaskedNoise,
}

impl StrainMeasurement {
    pub fn new(s: f64, strain: Twist, cov: Matrix6<f64>, mask: Mask) -> Result<Self> {
        Ok(StrainMeasurement {
            s,
            strain,
            noise: MaskedNoise::new(cov, mask)?,
        })
    }

    pub fn cov(&self) -> &Matrix6<f64> {
        &self.noise.cov
    }

    pub fn mask(&self) -> &Mask {
        &self.noise.mask
    }

    /// `ε̃ − ε`.
    pub fn full_error(&self, strain: &Twist) -> Vector6<f64> {
        self.strain.0 - strain.0
    }

    /// `[0, −1]`.
    pub fn full_jacobian(&self) -> MeasurementJacobian {
        let mut g = MeasurementJacobian::zeros();
        g.fixed_view_mut::<6, 6>(0, 6).copy_from(&(-Matrix6::identity()));
        g
    }
}

/// Pose error with unmeasured rows removed.
pub fn pose_error(m: &PoseMeasurement, pose: &Pose) -> Result<DVector<f64>> {
    Ok(select_rows(&m.full_error(pose)?, m.mask()))
}

pub fn pose_error_jacobian(m: &PoseMeasurement, pose: &Pose) -> Result<DMatrix<f64>> {
    Ok(select_jacobian_rows(&m.full_jacobian(pose)?, m.mask()))
}

pub fn strain_error(m: &StrainMeasurement, strain: &Twist) -> DVector<f64> {
    select_rows(&m.full_error(strain), m.mask())
}

pub fn strain_error_jacobian(m: &StrainMeasurement) -> DMatrix<f64> {
    select_jacobian_rows(&m.full_jacobian(), m.mask())
}

/// `½ eᵀ R⁻¹ e` on the masked subspace; `error` holds only the measured rows.
pub fn measurement_cost(error: &DVector<f64>, cov: &Matrix6<f64>, mask: &Mask) -> Result<f64> {
    let rows = selected(mask);
    if rows.len() != error.len() {
        return Err(Error::InvalidProblem("error length does not match mask"));
    }
    let noise = MaskedNoise::new(*cov, *mask)?;
    let mut full = Vector6::zeros();
    for (i, &r) in rows.iter().enumerate() {
        full[r] = error[i];
    }
    Ok(0.5 * full.dot(&(noise.info * full)))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Measurement {
    Pose(PoseMeasurement),
    Strain(StrainMeasurement),
}

/// A measurement factor linearized at one node.
#[derive(Clone, Debug, PartialEq)]
pub struct Linearized {
    pub cost: f64,
    /// `Gᵀ W G`
    pub info: Matrix12,
    /// `Gᵀ W e`
    pub grad: Vector12,
}

impl Measurement {
    pub fn s(&self) -> f64 {
        match self {
            Measurement::Pose(m) => m.s,
            Measurement::Strain(m) => m.s,
        }
    }

    pub fn mask(&self) -> &Mask {
        match self {
            Measurement::Pose(m) => m.mask(),
            Measurement::Strain(m) => m.mask(),
        }
    }

    pub fn cov(&self) -> &Matrix6<f64> {
        match self {
            Measurement::Pose(m) => m.cov(),
            Measurement::Strain(m) => m.cov(),
        }
    }

    fn info(&self) -> &Matrix6<f64> {
        match self {
            Measurement::Pose(m) => &m.noise.info,
            Measurement::Strain(m) => &m.noise.info,
        }
    }

    /// Full six-row error and Jacobian; the mask lives in the weight.
    pub fn full_error_and_jacobian(
        &self,
        node: &StateNode,
    ) -> Result<(Vector6<f64>, MeasurementJacobian)> {
        match self {
            Measurement::Pose(m) => Ok((m.full_error(&node.pose)?, m.full_jacobian(&node.pose)?)),
            Measurement::Strain(m) => Ok((m.full_error(&node.strain), m.full_jacobian())),
        }
    }

    /// Masked error.
    pub fn error(&self, node: &StateNode) -> Result<DVector<f64>> {
        let (e, _) = self.full_error_and_jacobian(node)?;
        Ok(select_rows(&e, self.mask()))
    }

    pub fn cost(&self, node: &StateNode) -> Result<f64> {
        let (e, _) = self.full_error_and_jacobian(node)?;
        Ok(0.5 * e.dot(&(self.info() * e)))
    }

    pub fn linearize(&self, node: &StateNode) -> Result<Linearized> {
        let (e, g) = self.full_error_and_jacobian(node)?;
        let w = self.info();
        let wg = w * g;
        Ok(Linearized {
            cost: 0.5 * e.dot(&(w * e)),
            info: g.transpose() * wg,
            grad: wg.transpose() * e,
        })
    }
}

/// Square root `L` with `L·Lᵀ = R` for a symmetric positive-semidefinite `R`.
pub fn psd_sqrt(cov: &Matrix6<f64>) -> Matrix6<f64> {
    if let Some(c) = cov.cholesky() {
        return c.unpack();
    }
    let eig = cov.symmetric_eigen();
    let mut l = eig.eigenvectors;
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        let scale = libm::sqrt(lambda.max(0.0));
        for i in 0..6 {
            l[(i, j)] *= scale;
        }
    }
    l
}

pub fn sample_gaussian6<R: Rng + ?Sized>(sqrt_cov: &Matrix6<f64>, rng: &mut R) -> Vector6<f64> {
    let z = Vector6::from_fn(|_, _| StandardNormal.sample(rng));
    sqrt_cov * z
}

/// `T·exp(n^)` with `n ~ N(0, R)`, noise expressed in the body frame.
pub fn corrupt_pose<R: Rng + ?Sized>(pose: &Pose, cov: &Matrix6<f64>, rng: &mut R) -> Pose {
    let n = sample_gaussian6(&psd_sqrt(cov), rng);
    *pose * exp_se3(&Twist(n))
}

/// `ε + n` with `n ~ N(0, R)`.
pub fn corrupt_strain<R: Rng + ?Sized>(strain: &Twist, cov: &Matrix6<f64>, rng: &mut R) -> Twist {
    Twist(strain.0 + sample_gaussian6(&psd_sqrt(cov), rng))
}
