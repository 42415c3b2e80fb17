//! Continuum-robot state estimation by sparse Gaussian-process regression on SE(3).
//!
//! The state of a Cosserat rod at arclength `s` is a pose `T(s)` and a
//! generalized strain `ε(s)`, tied together by `dT/ds = T·ε^`. A white-noise
//! prior on the strain rate, written in local Lie-algebra coordinates between
//! estimation nodes, gives a block-tridiagonal Gauss-Newton system that is
//! solved in time linear in the number of nodes. Pose and strain measurements
//! enter as unary factors; the posterior can be queried at any arclength.
//!
//! Modules:
//! - [`se3`]: Lie-group primitives.
//! - [`prior`]: the GP prior (transition, process covariance, prior factors, sampling).
//! - [`measurement`]: pose and strain measurement factors.
//! - [`solver`]: block-tridiagonal Gauss-Newton estimator with covariance recovery.
//! - [`interp`]: posterior queries between estimation nodes.
//! - [`rodsim`]: static tendon-driven rod simulator used to generate ground truth.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod interp;
pub mod measurement;
pub mod prior;
pub mod rng;
pub mod rodsim;
pub mod se3;
pub mod solver;

pub use error::{Error, LieError, Result};
pub use se3::{Pose, Twist};

pub type Vector12 = nalgebra::SVector<f64, 12>;
pub type Matrix12 = nalgebra::SMatrix<f64, 12, 12>;
pub type Matrix24 = nalgebra::SMatrix<f64, 24, 24>;
