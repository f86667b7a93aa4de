//! Numerical analysis of the Milnor map `arg F` restricted to the sphere of
//! radius `r` in `C^2`.
//!
//! The pieces are layered bottom-up: [`divisor`] locates the radii where the
//! divisor `{P = 0} ∪ {Q = 0}` fails to meet the sphere transversally,
//! [`critical`] solves the real-dependence system for critical points and
//! classifies them, [`locus`] fits circles of degenerate critical points,
//! [`trace`] follows the link components, and [`oracle`] is an independent
//! grid scan used to cross-check the Newton search. [`report`] composes all of
//! them into a [`MilnorReport`].

mod critical;
mod divisor;
mod locus;
mod newton;
mod oracle;
mod report;
mod seeds;
mod trace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{CPoint, PolyError, RationalMap, C64};

pub use critical::{
    classify_critical_point, dependence_residual, milnor_critical_points, Classification, CriticalPoint,
    CriticalSearch,
};
pub use divisor::{critical_radii, divisor_min_norm, CriticalRadii, DivisorNorm};
pub use locus::{detect_degenerate_locus, fit_circle, FittedCircle};
pub use oracle::{brute_force_oracle, OracleCluster, OracleScan, ORACLE_THRESHOLD};
pub use report::{morse_report, MilnorReport, Verdict};
pub use trace::{trace_link, Divisor, LinkComponent, LinkTrace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MilnorError {
    #[error("repeated factor suspected in P or Q; pass the squarefree override to proceed")]
    NotSquarefree,
    #[error("invalid radius {radius}: {reason}")]
    InvalidRadius { radius: f64, reason: String },
    #[error("point is not a critical point (dependence residual {residual:e})")]
    NotCritical { residual: f64 },
    #[error("branch of arg F could not be followed: the Hessian stencil meets the divisor")]
    BranchFailure,
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Tunables for every numerical search in this module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub seed_count: usize,
    pub rng_seed: u64,
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub dedup_dist: f64,
    pub degeneracy_rel_tol: f64,
    /// Cells per angular dimension of the brute-force oracle grid.
    pub grid_resolution: usize,
    /// Step budget for link tracing.
    pub max_trace_steps: usize,
    /// Skip the squarefree heuristic and take the precondition on trust.
    pub assume_squarefree: bool,
    /// Run the brute-force oracle inside [`morse_report`].
    pub oracle: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            seed_count: 400,
            rng_seed: 0,
            newton_tol: 1e-12,
            max_newton_iters: 80,
            dedup_dist: 1e-6,
            degeneracy_rel_tol: 1e-6,
            grid_resolution: 48,
            max_trace_steps: 20_000,
            assume_squarefree: false,
            oracle: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), MilnorError> {
        let positive = [
            ("newton_tol", self.newton_tol),
            ("dedup_dist", self.dedup_dist),
            ("degeneracy_rel_tol", self.degeneracy_rel_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(MilnorError::Config(format!("{name} must be positive")));
            }
        }
        if self.seed_count == 0 {
            return Err(MilnorError::Config("seed_count must be at least 1".into()));
        }
        if self.grid_resolution < 4 {
            return Err(MilnorError::Config("grid_resolution must be at least 4".into()));
        }
        if self.max_newton_iters == 0 {
            return Err(MilnorError::Config("max_newton_iters must be positive".into()));
        }
        Ok(())
    }
}

/// Shared precondition: valid config and a squarefree map (or an override).
fn check_preconditions(f: &RationalMap, cfg: &SolverConfig) -> Result<(), MilnorError> {
    cfg.validate()?;
    if cfg.assume_squarefree || f.squarefree_checked() || crate::poly::squarefree_heuristic(f) {
        Ok(())
    } else {
        Err(MilnorError::NotSquarefree)
    }
}

fn check_radius(r: f64) -> Result<(), MilnorError> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(MilnorError::InvalidRadius { radius: r, reason: "radius must be positive and finite".into() })
    }
}

/// Validates `r > m(F)` and `r` away from `X(F)`.
fn check_regular_radius(r: f64, radii: &CriticalRadii) -> Result<(), MilnorError> {
    check_radius(r)?;
    if r <= radii.m_of_f {
        return Err(MilnorError::InvalidRadius {
            radius: r,
            reason: format!("radius must exceed m(F) = {}", radii.m_of_f),
        });
    }
    if let Some(x) = radii.radii.iter().find(|x| (r - **x).abs() < RADIUS_EXCLUSION) {
        return Err(MilnorError::InvalidRadius {
            radius: r,
            reason: format!("radius lies within {RADIUS_EXCLUSION:e} of the critical radius {x}"),
        });
    }
    Ok(())
}

/// Radii closer than this to an element of `X(F)` are rejected.
pub const RADIUS_EXCLUSION: f64 = 1e-6;

/// Real Jacobian rows `(d/dx1, d/dy1, d/dx2, d/dy2)` of the real and imaginary
/// parts of a complex function, from its Wirtinger derivatives
/// `(G_z, G_zbar, G_w, G_wbar)`.
pub(crate) fn real_rows(gz: C64, gzb: C64, gw: C64, gwb: C64) -> ([f64; 4], [f64; 4]) {
    let i = C64::new(0.0, 1.0);
    let d = [gz + gzb, i * (gz - gzb), gw + gwb, i * (gw - gwb)];
    (d.map(|c| c.re), d.map(|c| c.im))
}

/// Orthonormal frame `{i p, j p, k p}/|p|` of the tangent space to the sphere
/// at `p`, using the quaternion structure on `R^4`. The first vector spans
/// the Hopf fibre direction `(iz, iw)`.
pub(crate) fn tangent_frame(p: CPoint) -> [[f64; 4]; 3] {
    let [a, b, c, d] = p.to_real();
    let n = p.norm();
    [
        [-b / n, a / n, -d / n, c / n],
        [-c / n, d / n, a / n, -b / n],
        [-d / n, -c / n, b / n, a / n],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot4;
    use num_complex::Complex64;

    #[test]
    fn tangent_frame_is_orthonormal() {
        let p = CPoint::new(Complex64::new(0.3, -1.2), Complex64::new(0.5, 0.25));
        let x = p.to_real();
        let f = tangent_frame(p);
        for i in 0..3 {
            assert!(dot4(f[i], x).abs() < 1e-14);
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot4(f[i], f[j]) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig { seed_count: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SolverConfig { newton_tol: -1.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
