//! Damped Gauss-Newton with SVD (minimum-norm) steps.
//!
//! The minimum-norm step keeps quadratic convergence onto solution manifolds
//! with a rank-deficient Jacobian, which is what degenerate circles of
//! critical points and the spurious divisor families look like.

use nalgebra::{DMatrix, DVector};

use crate::linalg;

pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub residual: f64,
    pub converged: bool,
}

/// `system(x)` returns the residual vector and its Jacobian, or `None` where
/// the system cannot be evaluated. `measure(x, g)` turns the raw residual into
/// the normalized scalar that is compared against `tol`.
pub(crate) fn solve<S, M>(x0: Vec<f64>, system: S, measure: M, tol: f64, max_iters: usize) -> Outcome
where
    S: Fn(&[f64]) -> Option<(DVector<f64>, DMatrix<f64>)>,
    M: Fn(&[f64], &DVector<f64>) -> f64,
{
    let mut x = x0;
    let Some((mut g, mut jac)) = system(&x) else {
        return Outcome { x, residual: f64::INFINITY, converged: false };
    };
    let mut res = measure(&x, &g);
    for _ in 0..max_iters {
        let Some(step) = linalg::lstsq(&jac, &g) else { break };
        let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let step_norm = step.norm();
        let gnorm = g.norm();

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..12 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - alpha * s).collect();
            if let Some((g2, j2)) = system(&trial) {
                if g2.norm() < gnorm || (g2.norm() <= gnorm * (1.0 + 1e-12) && res <= tol) {
                    accepted = Some((trial, g2, j2));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((trial, g2, j2)) = accepted else { break };
        x = trial;
        g = g2;
        jac = j2;
        res = measure(&x, &g);
        if !res.is_finite() {
            break;
        }
        if res <= tol && alpha * step_norm <= 1e-13 * (1.0 + xnorm) {
            break;
        }
    }
    Outcome { converged: res <= tol, x, residual: res }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_square_system() {
        // x^2 + y^2 = 4, x - y = 0
        let sys = |x: &[f64]| {
            let g = DVector::from_vec(vec![x[0] * x[0] + x[1] * x[1] - 4.0, x[0] - x[1]]);
            let j = DMatrix::from_row_slice(2, 2, &[2.0 * x[0], 2.0 * x[1], 1.0, -1.0]);
            Some((g, j))
        };
        let out = solve(vec![1.0, 0.5], sys, |_, g| g.norm(), 1e-14, 50);
        assert!(out.converged);
        assert!((out.x[0] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn converges_onto_a_solution_manifold() {
        // single equation x^2 + y^2 - 1 = 0 in two unknowns
        let sys = |x: &[f64]| {
            let g = DVector::from_vec(vec![x[0] * x[0] + x[1] * x[1] - 1.0]);
            let j = DMatrix::from_row_slice(1, 2, &[2.0 * x[0], 2.0 * x[1]]);
            Some((g, j))
        };
        let out = solve(vec![0.3, 2.0], sys, |_, g| g.norm(), 1e-14, 50);
        assert!(out.converged);
        assert!((out.x[0].hypot(out.x[1]) - 1.0).abs() < 1e-13);
    }
}
