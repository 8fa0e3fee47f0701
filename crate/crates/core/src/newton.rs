//! Newton iteration on square nonlinear systems.
//!
//! Two variants are used by the stratified stationary-point scan and the
//! KKT machinery:
//!
//! * [`solve`] — damped by a halving line search on the residual norm, for
//!   cold starts from seed grids. It does not stop at the residual
//!   tolerance but keeps polishing while full or damped steps still reduce
//!   the residual; near-degenerate double roots then converge far past the
//!   acceptance threshold instead of leaving a cloud of half-converged
//!   copies.
//! * [`solve_plain`] — undamped, for warm-started path corrections whose
//!   natural iterates pass through transiently larger residuals that a
//!   monotone line search would reject. The best visited iterate is
//!   returned.

use crate::linalg::{self, Mat};
use crate::tol::Tolerances;

/// Outcome of a Newton run.
pub struct NewtonResult {
    pub z: Vec<f64>,
    pub residual_norm: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Damped Newton on `F(z) = 0` with Jacobian `jac`. Convergence means the
/// final residual norm is at or below `tols.newton_residual`.
pub fn solve<F, J>(z0: &[f64], mut f: F, mut jac: J, tols: &Tolerances) -> NewtonResult
where
    F: FnMut(&[f64]) -> Vec<f64>,
    J: FnMut(&[f64]) -> Mat,
{
    let mut z = z0.to_vec();
    let mut fz = f(&z);
    let mut res = linalg::norm2(&fz);
    let mut iterations = 0;
    for iter in 0..tols.newton_max_iter {
        iterations = iter;
        if !res.is_finite() || res == 0.0 {
            break;
        }
        let j = jac(&z);
        let rhs: Vec<f64> = fz.iter().map(|v| -v).collect();
        let Some(step) = linalg::solve_square(&j, &rhs) else { break };
        // Halving line search on the residual norm.
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let zt: Vec<f64> = z.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let ft = f(&zt);
            let rt = linalg::norm2(&ft);
            if rt.is_finite() && rt < res {
                z = zt;
                fz = ft;
                res = rt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        if t * linalg::norm2(&step) <= tols.newton_step * (1.0 + linalg::norm2(&z)) {
            break;
        }
    }
    let converged = res.is_finite() && res <= tols.newton_residual;
    NewtonResult { z, residual_norm: res, converged, iterations }
}

/// Undamped Newton that tracks and returns the best iterate seen. Intended
/// for warm starts close to the solution path.
pub fn solve_plain<F, J>(z0: &[f64], mut f: F, mut jac: J, tols: &Tolerances) -> NewtonResult
where
    F: FnMut(&[f64]) -> Vec<f64>,
    J: FnMut(&[f64]) -> Mat,
{
    let mut z = z0.to_vec();
    let mut fz = f(&z);
    let mut res = linalg::norm2(&fz);
    let mut best_z = z.clone();
    let mut best_res = res;
    let guard = 1e8 * (1.0 + res);
    let mut iterations = 0;
    for iter in 0..tols.newton_max_iter {
        iterations = iter;
        if !res.is_finite() || res > guard || best_res == 0.0 {
            break;
        }
        let j = jac(&z);
        let rhs: Vec<f64> = fz.iter().map(|v| -v).collect();
        let Some(step) = linalg::solve_square(&j, &rhs) else { break };
        for (a, s) in z.iter_mut().zip(&step) {
            *a += s;
        }
        fz = f(&z);
        res = linalg::norm2(&fz);
        if res.is_finite() && res < best_res {
            best_res = res;
            best_z = z.clone();
        }
        if linalg::norm2(&step) <= tols.newton_step * (1.0 + linalg::norm2(&z)) {
            break;
        }
    }
    let converged = best_res <= tols.newton_residual;
    NewtonResult { z: best_z, residual_norm: best_res, converged, iterations }
}
