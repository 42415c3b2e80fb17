//! Batch Gauss-Newton estimation over the node grid.
//!
//! The normal equations are block-tridiagonal: one diagonal block per node,
//! coupled to its neighbours through the prior factors. Locked sub-states are
//! deleted from the system, so block sizes vary between 0 and 12. Solves,
//! marginal covariances and posterior samples all run in `O(K)` through a
//! block Cholesky factorization.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Vector6};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::measurement::Measurement;
use crate::prior::{
    prior_error, prior_error_jacobian, process_cov_inv_unchecked, NodeGrid, PriorHyperparams,
    StateNode,
};
use crate::se3::{exp_se3, Twist};
use crate::{Matrix12, Matrix24, Vector12};

/// Per-node locks on `(δt, δε)`; `true` holds the sub-state at its initial value.
pub type Locks = [bool; 12];
pub const UNLOCKED: Locks = [false; 12];

/// Tolerance used to match measurement arclengths to nodes.
pub const NODE_MATCH_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Convergence {
    pub max_iters: usize,
    pub step_norm_tol: f64,
}

impl Default for Convergence {
    fn default() -> Self {
        Convergence {
            max_iters: 20,
            step_norm_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    grid: NodeGrid,
    hyper: PriorHyperparams,
    measurements: Vec<(usize, Measurement)>,
    locks: Vec<Locks>,
    initial: Vec<StateNode>,
    pub convergence: Convergence,
}

impl Problem {
    pub fn new(
        grid: NodeGrid,
        hyper: PriorHyperparams,
        measurements: Vec<Measurement>,
        locks: Vec<Locks>,
        initial: Vec<StateNode>,
        convergence: Convergence,
    ) -> Result<Self> {
        if initial.len() != grid.len() {
            return Err(Error::InvalidProblem("initial guess needs one node per grid point"));
        }
        if locks.len() != grid.len() {
            return Err(Error::InvalidProblem("locks need one entry per grid point"));
        }
        for (node, &s) in initial.iter().zip(grid.arclengths()) {
            if (node.s - s).abs() > NODE_MATCH_TOL {
                return Err(Error::InvalidProblem("initial guess arclengths differ from grid"));
            }
            if !node.strain.is_finite() || !node.pose.matrix().iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidProblem("initial guess is not finite"));
            }
        }
        if convergence.max_iters == 0 || !(convergence.step_norm_tol > 0.0) {
            return Err(Error::InvalidProblem("convergence settings must be positive"));
        }
        let measurements = measurements
            .into_iter()
            .map(|m| {
                grid.find(m.s(), NODE_MATCH_TOL)
                    .map(|k| (k, m.clone()))
                    .ok_or(Error::OffGrid(m.s()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Problem {
            grid,
            hyper,
            measurements,
            locks,
            initial,
            convergence,
        })
    }

    pub fn grid(&self) -> &NodeGrid {
        &self.grid
    }

    pub fn hyper(&self) -> &PriorHyperparams {
        &self.hyper
    }

    pub fn measurements(&self) -> impl Iterator<Item = (usize, &Measurement)> {
        self.measurements.iter().map(|(k, m)| (*k, m))
    }

    pub fn locks(&self) -> &[Locks] {
        &self.locks
    }

    pub fn initial_guess(&self) -> &[StateNode] {
        &self.initial
    }

    /// Unlocked indices of each node, in `0..12`.
    pub fn free_indices(&self) -> Vec<Vec<usize>> {
        self.locks
            .iter()
            .map(|l| (0..12).filter(|&i| !l[i]).collect())
            .collect()
    }

    /// Total cost `Σ J_p + Σ J_m` at `x`.
    pub fn cost(&self, x: &[StateNode]) -> Result<f64> {
        let mut c = 0.0;
        let s = self.grid.arclengths();
        for k in 1..x.len() {
            let e = prior_error(&x[k - 1], &x[k])?;
            c += 0.5 * e.dot(&(process_cov_inv_unchecked(s[k] - s[k - 1], &self.hyper) * e));
        }
        for (k, m) in self.measurements() {
            c += m.cost(&x[k])?;
        }
        Ok(c)
    }
}

/// Symmetric block-tridiagonal matrix: `diag[k]` is `A_kk`, `sub[k]` is `A_{k+1,k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockTridiag {
    pub diag: Vec<DMatrix<f64>>,
    pub sub: Vec<DMatrix<f64>>,
}

impl BlockTridiag {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.diag.iter().map(|d| d.nrows()).collect()
    }

    pub fn dim(&self) -> usize {
        self.diag.iter().map(|d| d.nrows()).sum()
    }

    fn check(&self) -> Result<()> {
        if self.diag.is_empty() || self.sub.len() + 1 != self.diag.len() {
            return Err(Error::InvalidProblem("block-tridiagonal shape mismatch"));
        }
        for (k, d) in self.diag.iter().enumerate() {
            if !d.is_square() {
                return Err(Error::InvalidProblem("diagonal block is not square"));
            }
            if let Some(b) = self.sub.get(k) {
                if b.ncols() != d.nrows() || b.nrows() != self.diag[k + 1].nrows() {
                    return Err(Error::InvalidProblem("off-diagonal block has the wrong shape"));
                }
            }
        }
        Ok(())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let offsets = offsets(&self.block_sizes());
        let n = self.dim();
        let mut a = DMatrix::zeros(n, n);
        for (k, d) in self.diag.iter().enumerate() {
            a.view_mut((offsets[k], offsets[k]), d.shape()).copy_from(d);
        }
        for (k, b) in self.sub.iter().enumerate() {
            a.view_mut((offsets[k + 1], offsets[k]), b.shape()).copy_from(b);
            a.view_mut((offsets[k], offsets[k + 1]), (b.ncols(), b.nrows()))
                .copy_from(&b.transpose());
        }
        a
    }
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    out.push(0);
    for &n in sizes {
        acc += n;
        out.push(acc);
    }
    out
}

pub fn stack_blocks(blocks: &[DVector<f64>]) -> DVector<f64> {
    let n = blocks.iter().map(|b| b.len()).sum();
    DVector::from_iterator(n, blocks.iter().flat_map(|b| b.iter().copied()))
}

pub fn split_blocks(v: &DVector<f64>, sizes: &[usize]) -> Vec<DVector<f64>> {
    let off = offsets(sizes);
    sizes
        .iter()
        .enumerate()
        .map(|(k, &n)| v.rows(off[k], n).into_owned())
        .collect()
}

/// `A = L·Lᵀ` with `L` lower block-bidiagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockCholesky {
    /// `L_kk`, lower triangular.
    pub diag: Vec<DMatrix<f64>>,
    /// `L_{k+1,k}`.
    pub sub: Vec<DMatrix<f64>>,
}

impl BlockCholesky {
    pub fn factor(a: &BlockTridiag) -> Result<Self> {
        a.check()?;
        let n = a.diag.len();
        let mut diag: Vec<DMatrix<f64>> = Vec::with_capacity(n);
        let mut sub: Vec<DMatrix<f64>> = Vec::with_capacity(n - 1);
        for k in 0..n {
            let mut s = a.diag[k].clone();
            if k > 0 {
                let l = &sub[k - 1];
                s -= l * l.transpose();
            }
            let lkk = if s.nrows() == 0 {
                s
            } else {
                s.cholesky()
                    .ok_or(Error::NotPositiveDefinite { node: k })?
                    .unpack()
            };
            if k + 1 < n {
                // L_{k+1,k} = B_k·L_kk⁻ᵀ  ⇔  L_kk·L_{k+1,k}ᵀ = B_kᵀ
                let bt = a.sub[k].transpose();
                let lt = solve_lower(&lkk, &bt);
                sub.push(lt.transpose());
            }
            diag.push(lkk);
        }
        Ok(BlockCholesky { diag, sub })
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.diag.iter().map(|d| d.nrows()).collect()
    }

    /// `y = L⁻¹·b`.
    pub fn forward(&self, b: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let mut y: Vec<DVector<f64>> = Vec::with_capacity(b.len());
        for k in 0..self.diag.len() {
            let mut r = b[k].clone();
            if k > 0 {
                r -= &self.sub[k - 1] * &y[k - 1];
            }
            y.push(solve_lower(&self.diag[k], &r));
        }
        y
    }

    /// `x = L⁻ᵀ·y`.
    pub fn backward(&self, y: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let n = self.diag.len();
        let mut x: Vec<DVector<f64>> = vec![DVector::zeros(0); n];
        for k in (0..n).rev() {
            let mut r = y[k].clone();
            if k + 1 < n {
                r -= self.sub[k].transpose() * &x[k + 1];
            }
            x[k] = solve_lower_transpose(&self.diag[k], &r);
        }
        x
    }

    /// `A⁻¹·b`.
    pub fn solve(&self, b: &[DVector<f64>]) -> Vec<DVector<f64>> {
        self.backward(&self.forward(b))
    }

    /// Diagonal blocks `Σ_kk` and sub-diagonal blocks `Σ_{k+1,k}` of `A⁻¹`,
    /// by the backward recursion on the factor.
    pub fn covariance_blocks(&self) -> (Vec<DMatrix<f64>>, Vec<DMatrix<f64>>) {
        let n = self.diag.len();
        let mut diag = vec![DMatrix::zeros(0, 0); n];
        let mut sub = vec![DMatrix::zeros(0, 0); n - 1];
        let linv: Vec<DMatrix<f64>> = self
            .diag
            .iter()
            .map(|l| solve_lower(l, &DMatrix::identity(l.nrows(), l.nrows())))
            .collect();
        diag[n - 1] = linv[n - 1].transpose() * &linv[n - 1];
        for k in (0..n - 1).rev() {
            // Σ_{k+1,k} = −Σ_{k+1,k+1}·L_{k+1,k}·L_kk⁻¹
            let s_next_k = -(&diag[k + 1] * &self.sub[k] * &linv[k]);
            // Σ_kk = L_kk⁻ᵀ·(L_kk⁻¹ − L_{k+1,k}ᵀ·Σ_{k+1,k})
            let inner = &linv[k] - self.sub[k].transpose() * &s_next_k;
            let mut skk = linv[k].transpose() * inner;
            symmetrize(&mut skk);
            diag[k] = skk;
            sub[k] = s_next_k;
        }
        (diag, sub)
    }
}

fn solve_lower<C: nalgebra::Dim, S: nalgebra::storage::Storage<f64, nalgebra::Dyn, C>>(
    l: &DMatrix<f64>,
    b: &nalgebra::Matrix<f64, nalgebra::Dyn, C, S>,
) -> nalgebra::OMatrix<f64, nalgebra::Dyn, C>
where
    nalgebra::DefaultAllocator: nalgebra::allocator::Allocator<nalgebra::Dyn, C>,
{
    let mut x = b.clone_owned();
    if l.nrows() > 0 {
        l.solve_lower_triangular_mut(&mut x);
    }
    x
}

fn solve_lower_transpose(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let mut x = b.clone();
    if l.nrows() > 0 {
        l.tr_solve_lower_triangular_mut(&mut x);
    }
    x
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

/// Solves `A·x = b` for SPD block-tridiagonal `A`.
pub fn solve_block_tridiag(a: &BlockTridiag, b: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    if b.len() != a.diag.len() || b.iter().zip(&a.diag).any(|(v, d)| v.len() != d.nrows()) {
        return Err(Error::InvalidProblem("right-hand side does not match block sizes"));
    }
    Ok(BlockCholesky::factor(a)?.solve(b))
}

/// Normal equations at an operating point, restricted to unlocked sub-states.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub a: BlockTridiag,
    /// `b = −Σ Eᵀ W e`
    pub b: Vec<DVector<f64>>,
    pub cost: f64,
    pub free: Vec<Vec<usize>>,
}

/// Full 12×12-block information matrix and gradient, before lock reduction.
pub struct FullSystem {
    pub diag: Vec<Matrix12>,
    pub sub: Vec<Matrix12>,
    pub b: Vec<Vector12>,
    pub cost: f64,
}

pub fn assemble_full(problem: &Problem, x: &[StateNode]) -> Result<FullSystem> {
    let n = problem.grid.len();
    if x.len() != n {
        return Err(Error::InvalidProblem("operating point needs one node per grid point"));
    }
    let s = problem.grid.arclengths();
    let mut diag = vec![Matrix12::zeros(); n];
    let mut sub = vec![Matrix12::zeros(); n - 1];
    let mut b = vec![Vector12::zeros(); n];
    let mut cost = 0.0;
    for k in 1..n {
        let e = prior_error(&x[k - 1], &x[k])?;
        let ej = prior_error_jacobian(&x[k - 1], &x[k])?;
        let w = process_cov_inv_unchecked(s[k] - s[k - 1], &problem.hyper);
        let we = w * e;
        cost += 0.5 * e.dot(&we);
        let h: Matrix24 = ej.transpose() * w * ej;
        let g = ej.transpose() * we;
        diag[k - 1] += h.fixed_view::<12, 12>(0, 0);
        diag[k] += h.fixed_view::<12, 12>(12, 12);
        sub[k - 1] += h.fixed_view::<12, 12>(12, 0);
        b[k - 1] -= g.fixed_rows::<12>(0);
        b[k] -= g.fixed_rows::<12>(12);
    }
    for (k, m) in problem.measurements() {
        let lin = m.linearize(&x[k])?;
        cost += lin.cost;
        diag[k] += lin.info;
        b[k] -= lin.grad;
    }
    Ok(FullSystem { diag, sub, b, cost })
}

pub fn assemble(problem: &Problem, x: &[StateNode]) -> Result<LinearSystem> {
    let full = assemble_full(problem, x)?;
    let free = problem.free_indices();
    let pick = |m: &Matrix12, rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
    };
    let diag = full
        .diag
        .iter()
        .zip(&free)
        .map(|(d, f)| pick(d, f, f))
        .collect();
    let sub = full
        .sub
        .iter()
        .enumerate()
        .map(|(k, m)| pick(m, &free[k + 1], &free[k]))
        .collect();
    let b = full
        .b
        .iter()
        .zip(&free)
        .map(|(v, f)| DVector::from_iterator(f.len(), f.iter().map(|&i| v[i])))
        .collect();
    Ok(LinearSystem {
        a: BlockTridiag { diag, sub },
        b,
        cost: full.cost,
        free,
    })
}

/// Scatters reduced per-node vectors back to 12-vectors (zeros on locks).
pub fn expand_step(step: &[DVector<f64>], free: &[Vec<usize>]) -> Vec<Vector12> {
    step.iter()
        .zip(free)
        .map(|(v, f)| {
            let mut out = Vector12::zeros();
            for (i, &j) in f.iter().enumerate() {
                out[j] = v[i];
            }
            out
        })
        .collect()
}

/// `T ← exp(δt^)·T`, `ε ← ε + δε`.
pub fn apply_step(x: &[StateNode], step: &[Vector12]) -> Vec<StateNode> {
    x.iter()
        .zip(step)
        .map(|(node, d)| {
            let dt = Twist(d.fixed_rows::<6>(0).into_owned());
            let de: Vector6<f64> = d.fixed_rows::<6>(6).into_owned();
            let pose = if dt.0.iter().all(|&v| v == 0.0) {
                node.pose
            } else {
                node.pose * exp_se3(&dt)
            };
            StateNode::new(node.s, pose, Twist(node.strain.0 + de))
        })
        .collect()
}

fn expand_block(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> Matrix12 {
    let mut out = Matrix12::zeros();
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            out[(r, c)] = m[(i, j)];
        }
    }
    out
}

/// Marginal 12×12 covariances and adjacent-pair 24×24 joint covariances,
/// with zero rows and columns on locked sub-states.
pub fn marginal_covariances(
    factor: &BlockCholesky,
    free: &[Vec<usize>],
) -> (Vec<Matrix12>, Vec<Matrix24>) {
    let (diag, sub) = factor.covariance_blocks();
    let marg: Vec<Matrix12> = diag
        .iter()
        .zip(free)
        .map(|(d, f)| expand_block(d, f, f))
        .collect();
    let joint = sub
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let off = expand_block(s, &free[k + 1], &free[k]);
            let mut j = Matrix24::zeros();
            j.fixed_view_mut::<12, 12>(0, 0).copy_from(&marg[k]);
            j.fixed_view_mut::<12, 12>(12, 12).copy_from(&marg[k + 1]);
            j.fixed_view_mut::<12, 12>(12, 0).copy_from(&off);
            j.fixed_view_mut::<12, 12>(0, 12).copy_from(&off.transpose());
            j
        })
        .collect();
    (marg, joint)
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub nodes: Vec<StateNode>,
    pub marginal_covs: Vec<Matrix12>,
    pub joint_covs: Vec<Matrix24>,
    /// Cost at the initial guess and after every applied step.
    pub cost_history: Vec<f64>,
    /// Steps above the tolerance. A converged run also applies the final
    /// small step, which is not counted.
    pub iterations: usize,
    pub converged: bool,
    pub grid: NodeGrid,
    pub hyper: PriorHyperparams,
    /// Factor of the information matrix at `nodes`.
    pub factor: BlockCholesky,
    pub free: Vec<Vec<usize>>,
}

/// Full-step Gauss-Newton from the problem's initial guess.
///
/// Iterates until `‖δx‖∞` drops below the tolerance or the iteration budget
/// runs out. A step that fails to relinearize (a relative rotation reaching
/// the branch cut of `log`) ends the run with `converged = false` at the last
/// valid point.
pub fn gauss_newton(problem: &Problem) -> Result<Solution> {
    let mut x = problem.initial.clone();
    let mut sys = assemble(problem, &x)?;
    let mut factor = BlockCholesky::factor(&sys.a)?;
    let mut history = vec![sys.cost];
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..problem.convergence.max_iters {
        let step = factor.solve(&sys.b);
        let norm = step.iter().map(|v| v.amax()).fold(0.0, f64::max);
        if !norm.is_finite() {
            break;
        }
        let small = norm < problem.convergence.step_norm_tol;
        let candidate = apply_step(&x, &expand_step(&step, &sys.free));
        let next = match assemble(problem, &candidate) {
            Ok(s) => s,
            Err(Error::Lie(_)) => break,
            Err(e) => return Err(e),
        };
        let next_factor = match BlockCholesky::factor(&next.a) {
            Ok(f) => f,
            Err(Error::NotPositiveDefinite { .. }) if !small => break,
            Err(e) => return Err(e),
        };
        x = candidate;
        sys = next;
        factor = next_factor;
        history.push(sys.cost);
        if small {
            converged = true;
            break;
        }
        iterations += 1;
    }
    let (marginal_covs, joint_covs) = marginal_covariances(&factor, &sys.free);
    Ok(Solution {
        nodes: x,
        marginal_covs,
        joint_covs,
        cost_history: history,
        iterations,
        converged,
        grid: problem.grid.clone(),
        hyper: problem.hyper.clone(),
        factor,
        free: sys.free,
    })
}

/// Draws `x̂ ⊕ L⁻ᵀz`, `z ~ N(0, 1)`.
pub fn sample_posterior<R: Rng + ?Sized>(
    solution: &Solution,
    count: usize,
    rng: &mut R,
) -> Vec<Vec<StateNode>> {
    let sizes = solution.factor.block_sizes();
    (0..count)
        .map(|_| {
            let z: Vec<DVector<f64>> = sizes
                .iter()
                .map(|&n| DVector::from_fn(n, |_, _| StandardNormal.sample(rng)))
                .collect();
            let dx = solution.factor.backward(&z);
            apply_step(&solution.nodes, &expand_step(&dx, &solution.free))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd_block(n: usize, seed: f64) -> DMatrix<f64> {
        let m = DMatrix::from_fn(n, n, |i, j| libm::sin(seed + (3 * i + 7 * j) as f64));
        &m * m.transpose() + DMatrix::identity(n, n) * (n as f64)
    }

    #[test]
    fn identity_system() {
        let a = BlockTridiag {
            diag: vec![DMatrix::identity(3, 3), DMatrix::identity(2, 2)],
            sub: vec![DMatrix::zeros(2, 3)],
        };
        let b = vec![DVector::from_vec(vec![1.0, 2.0, 3.0]), DVector::from_vec(vec![4.0, 5.0])];
        assert_eq!(solve_block_tridiag(&a, &b).unwrap(), b);
    }

    #[test]
    fn matches_dense_with_empty_blocks() {
        let sizes = [0usize, 12, 6, 0, 12];
        let diag: Vec<_> = sizes.iter().enumerate().map(|(k, &n)| spd_block(n, k as f64) * 4.0).collect();
        let sub: Vec<_> = (0..sizes.len() - 1)
            .map(|k| DMatrix::from_fn(sizes[k + 1], sizes[k], |i, j| 0.3 * libm::cos((i + 2 * j + k) as f64)))
            .collect();
        let a = BlockTridiag { diag, sub };
        let b: Vec<_> = sizes.iter().map(|&n| DVector::from_fn(n, |i, _| i as f64 - 2.0)).collect();
        let x = stack_blocks(&solve_block_tridiag(&a, &b).unwrap());
        let dense = a.to_dense();
        let want = dense.clone().cholesky().unwrap().solve(&stack_blocks(&b));
        assert!((x - &want).amax() < 1e-10 * (1.0 + want.amax()));

        let factor = BlockCholesky::factor(&a).unwrap();
        let (cd, cs) = factor.covariance_blocks();
        let inv = dense.cholesky().unwrap().inverse();
        let off = offsets(&sizes);
        for k in 0..sizes.len() {
            let want = inv.view((off[k], off[k]), (sizes[k], sizes[k]));
            assert!((&cd[k] - want).amax() < 1e-10);
        }
        for k in 0..sizes.len() - 1 {
            let want = inv.view((off[k + 1], off[k]), (sizes[k + 1], sizes[k]));
            assert!((&cs[k] - want).amax() < 1e-10);
        }
    }

    #[test]
    fn diagonal_covariance_is_elementwise_inverse() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 4.0, 8.0]));
        let a = BlockTridiag {
            diag: vec![d.clone(), d.clone()],
            sub: vec![DMatrix::zeros(3, 3)],
        };
        let (cd, cs) = BlockCholesky::factor(&a).unwrap().covariance_blocks();
        for c in &cd {
            assert!((c[(0, 0)] - 0.5).abs() < 1e-15 && (c[(2, 2)] - 0.125).abs() < 1e-15);
        }
        assert_eq!(cs[0].amax(), 0.0);
    }

    #[test]
    fn indefinite_pivot_reported() {
        let mut d = DMatrix::identity(2, 2);
        d[(1, 1)] = -1.0;
        let a = BlockTridiag {
            diag: vec![DMatrix::identity(2, 2), d],
            sub: vec![DMatrix::zeros(2, 2)],
        };
        assert_eq!(BlockCholesky::factor(&a).unwrap_err(), Error::NotPositiveDefinite { node: 1 });
    }
}
