//! Tangencies of the divisor with round spheres: `m(F)` and the critical
//! radii `X(F)`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_preconditions, newton, real_rows, seeds, MilnorError, SolverConfig};
use crate::poly::{CPoint, CPoly2, RationalMap, C64};

/// Converged points closer than this to the origin are snapped onto it when
/// the origin lies on the divisor. Newton converges only linearly onto the
/// singular point there, so a few ulps of residual can leave it visibly off.
const ORIGIN_SNAP: f64 = 1e-4;

/// Seed radii for the tangency search are log-uniform in this range.
const SEED_RADIUS_RANGE: (f64, f64) = (1e-2, 1e2);

/// Minimum converged fraction of seeds before a scan counts as complete.
const MIN_CONVERGED_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisorNorm {
    /// `m(F)`; `+inf` when nothing converged and the origin is off the divisor.
    pub value: f64,
    pub incomplete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalRadii {
    pub m_of_f: f64,
    /// Sorted, deduplicated radii in `(m(F), inf)`.
    pub radii: Vec<f64>,
    pub converged_seeds: usize,
    pub total_seeds: usize,
    pub incomplete: bool,
}

/// The tangency system `{f = 0, conj(z) f_w - conj(w) f_z = 0}`: critical
/// points of the norm restricted to the curve `f = 0`.
fn tangency_system(f: &CPoly2, x: &[f64]) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let p = CPoint::from_real([x[0], x[1], x[2], x[3]]);
    let j = f.jet(p);
    let zb = p.z.conj();
    let wb = p.w.conj();
    let t = zb * j.dw - wb * j.dz;
    let zero = C64::new(0.0, 0.0);
    let (f_re, f_im) = real_rows(j.dz, zero, j.dw, zero);
    let (t_re, t_im) = real_rows(zb * j.dzw - wb * j.dzz, j.dw, zb * j.dww - wb * j.dzw, -j.dz);
    let g = DVector::from_vec(vec![j.v.re, j.v.im, t.re, t.im]);
    let jac = DMatrix::from_fn(4, 4, |r, c| [f_re, f_im, t_re, t_im][r][c]);
    g.iter().all(|v| v.is_finite()).then_some((g, jac))
}

/// The common-zero system `{P = 0, Q = 0}`.
fn common_zero_system(p: &CPoly2, q: &CPoly2, x: &[f64]) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let pt = CPoint::from_real([x[0], x[1], x[2], x[3]]);
    let a = p.jet(pt);
    let b = q.jet(pt);
    let zero = C64::new(0.0, 0.0);
    let (a_re, a_im) = real_rows(a.dz, zero, a.dw, zero);
    let (b_re, b_im) = real_rows(b.dz, zero, b.dw, zero);
    let g = DVector::from_vec(vec![a.v.re, a.v.im, b.v.re, b.v.im]);
    let jac = DMatrix::from_fn(4, 4, |r, c| [a_re, a_im, b_re, b_im][r][c]);
    g.iter().all(|v| v.is_finite()).then_some((g, jac))
}

/// Polynomial-scaled residual, so that tolerances mean the same thing for
/// large and small coefficients and points.
fn poly_measure(scale: f64, deg: u32) -> impl Fn(&[f64], &DVector<f64>) -> f64 {
    move |x, g| {
        let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
        g.norm() / (scale * (1.0 + n).powi(deg as i32 + 1))
    }
}

struct ScanOutcome {
    /// Norms of converged solutions (after snapping).
    norms: Vec<f64>,
    converged: usize,
    total: usize,
}

fn solve_from_seeds<S>(
    seeds: Vec<CPoint>,
    system: S,
    scale: f64,
    deg: u32,
    cfg: &SolverConfig,
    origin_on_divisor: bool,
) -> ScanOutcome
where
    S: Fn(&[f64]) -> Option<(DVector<f64>, DMatrix<f64>)> + Sync,
{
    let total = seeds.len();
    let measure = poly_measure(scale, deg);
    let norms: Vec<Option<f64>> = seeds
        .into_par_iter()
        .map(|s| {
            let out = newton::solve(s.to_real().to_vec(), &system, &measure, cfg.newton_tol, cfg.max_newton_iters);
            if !out.converged {
                return None;
            }
            let n = out.x.iter().map(|v| v * v).sum::<f64>().sqrt();
            Some(if origin_on_divisor && n < ORIGIN_SNAP { 0.0 } else { n })
        })
        .collect();
    let converged = norms.iter().filter(|n| n.is_some()).count();
    ScanOutcome { norms: norms.into_iter().flatten().collect(), converged, total }
}

struct DivisorScan {
    m_of_f: f64,
    candidates: Vec<f64>,
    converged: usize,
    total: usize,
}

fn scan(f: &RationalMap, cfg: &SolverConfig) -> DivisorScan {
    let origin = CPoint::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let polys = f.divisor_polys();
    let origin_on_divisor = polys.iter().any(|p| p.vanishes_at(origin));

    let mut rng = seeds::rng(cfg.rng_seed, seeds::salt::TANGENCY);
    let mut candidates = Vec::new();
    let mut converged = 0;
    let mut total = 0;
    for poly in &polys {
        let seed_pts: Vec<CPoint> = (0..cfg.seed_count)
            .map(|_| seeds::log_radial(&mut rng, SEED_RADIUS_RANGE.0, SEED_RADIUS_RANGE.1))
            .collect();
        let out = solve_from_seeds(
            seed_pts,
            |x: &[f64]| tangency_system(poly, x),
            poly.coeff_scale(),
            poly.total_degree(),
            cfg,
            origin_on_divisor,
        );
        candidates.extend(out.norms);
        converged += out.converged;
        total += out.total;
    }

    // Singular points of the divisor where the two curves cross.
    if polys.len() == 2 {
        let (p, q) = (f.numerator(), f.denominator());
        let mut rng = seeds::rng(cfg.rng_seed, seeds::salt::COMMON_ZEROS);
        let seed_pts: Vec<CPoint> = (0..cfg.seed_count)
            .map(|_| seeds::log_radial(&mut rng, SEED_RADIUS_RANGE.0, SEED_RADIUS_RANGE.1))
            .collect();
        let deg = p.total_degree().max(q.total_degree());
        // Normalize each polynomial so neither dominates the residual.
        let pn = p.scale(C64::new(1.0 / p.coeff_scale(), 0.0));
        let qn = q.scale(C64::new(1.0 / q.coeff_scale(), 0.0));
        let out = solve_from_seeds(
            seed_pts,
            |x: &[f64]| common_zero_system(&pn, &qn, x),
            1.0,
            deg,
            cfg,
            origin_on_divisor,
        );
        // Common zeros need not exist, so they do not count towards convergence.
        candidates.extend(out.norms);
    }

    let tangency_min = candidates.iter().cloned().fold(f64::INFINITY, f64::min);
    let m_of_f = if origin_on_divisor { 0.0 } else { tangency_min };
    DivisorScan { m_of_f, candidates, converged, total }
}

/// `m(F)`: the smallest norm of a point of the divisor.
pub fn divisor_min_norm(f: &RationalMap, cfg: &SolverConfig) -> Result<DivisorNorm, MilnorError> {
    check_preconditions(f, cfg)?;
    let s = scan(f, cfg);
    Ok(DivisorNorm { value: s.m_of_f, incomplete: !s.m_of_f.is_finite() })
}

/// `X(F)`: norms of tangency points of `{P = 0}` and `{Q = 0}` with spheres
/// and of common zeros of `P` and `Q`, restricted to `(m(F), inf)`.
pub fn critical_radii(f: &RationalMap, cfg: &SolverConfig) -> Result<CriticalRadii, MilnorError> {
    check_preconditions(f, cfg)?;
    let s = scan(f, cfg);
    let mut radii: Vec<f64> = s
        .candidates
        .iter()
        .cloned()
        .filter(|n| n.is_finite() && *n > s.m_of_f + cfg.dedup_dist)
        .collect();
    radii.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<(f64, usize)> = Vec::new();
    for r in radii {
        match out.last_mut() {
            Some((last, count)) if r - *last <= cfg.dedup_dist => {
                // keep a running mean of the cluster
                *last = (*last * *count as f64 + r) / (*count as f64 + 1.0);
                *count += 1;
            }
            _ => out.push((r, 1)),
        }
    }
    let incomplete = (s.converged as f64) < MIN_CONVERGED_FRACTION * s.total as f64 || !s.m_of_f.is_finite();
    Ok(CriticalRadii {
        m_of_f: s.m_of_f,
        radii: out.into_iter().map(|(r, _)| r).collect(),
        converged_seeds: s.converged,
        total_seeds: s.total,
        incomplete,
    })
}
