//! Critical points of the Milnor map via the real-dependence system, and
//! their Morse classification.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    check_preconditions, check_radius, newton, real_rows, seeds, tangent_frame, MilnorError, SolverConfig,
};
use crate::linalg::{dot4, norm4, sym3_eigenvalues};
use crate::poly::{CPoint, RationalMap, C64};

/// Solutions where `|P|` or `|Q|` falls below this (relative to the
/// coefficient scale) are spurious: they sit on the divisor with `t = 0`.
const DIVISOR_GUARD: f64 = 1e-10;

/// Points must satisfy the dependence condition to this accuracy before they
/// are classified.
const CLASSIFY_PRECONDITION: f64 = 1e-8;

/// Initial Hessian stencil step, relative to the radius.
const HESSIAN_STEP: f64 = 1e-4;
const HESSIAN_HALVINGS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub point: CPoint,
    pub multiplier_t: f64,
    /// `arg F` at the point, in `[0, 2pi)`.
    pub theta: f64,
    /// Number of negative Hessian eigenvalues; `None` if degenerate or unclassified.
    pub index: Option<u8>,
    pub degenerate: bool,
    pub residual: f64,
    pub hessian_eigenvalues: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub index: Option<u8>,
    pub degenerate: bool,
    pub eigenvalues: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSearch {
    pub points: Vec<CriticalPoint>,
    pub converged_seeds: usize,
    pub total_seeds: usize,
    /// Converged solutions discarded because they lie on or against the
    /// divisor.
    pub divisor_hits: usize,
    /// Points where the Hessian stencil could not avoid the divisor.
    pub unclassified: usize,
    pub incomplete: bool,
}

struct Jets {
    p: crate::poly::Jet,
    q: crate::poly::Jet,
}

fn jets(f: &RationalMap, pt: CPoint) -> Jets {
    Jets { p: f.numerator().jet(pt), q: f.denominator().jet(pt) }
}

/// `H = grad P * Q - P * grad Q`, the numerator of `grad F`.
fn h_vec(j: &Jets) -> [C64; 2] {
    [j.p.dz * j.q.v - j.p.v * j.q.dz, j.p.dw * j.q.v - j.p.v * j.q.dw]
}

/// The cleared dependence equations `G = -i conj(PQ) H - t conj(z)` and the
/// sphere equation, with the analytic Jacobian in `(x1, y1, x2, y2, t)`.
/// `G` is divided by `sigma` and the sphere equation by `r^2` so that both
/// are of order one whatever the scale of `F` on the sphere.
fn dependence_system(f: &RationalMap, r: f64, sigma: f64, x: &[f64]) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let pt = CPoint::from_real([x[0], x[1], x[2], x[3]]);
    let t = x[4];
    let j = jets(f, pt);
    let i = C64::new(0.0, 1.0);
    let pq = j.p.v * j.q.v;
    let h = h_vec(&j);
    let zc = [pt.z.conj(), pt.w.conj()];
    let g = [-i * pq.conj() * h[0] - t * zc[0], -i * pq.conj() * h[1] - t * zc[1]];

    // second derivatives, indexed [j][k]
    let pd = [j.p.dz, j.p.dw];
    let qd = [j.q.dz, j.q.dw];
    let pdd = [[j.p.dzz, j.p.dzw], [j.p.dzw, j.p.dww]];
    let qdd = [[j.q.dzz, j.q.dzw], [j.q.dzw, j.q.dww]];
    let dh = |jj: usize, k: usize| pdd[jj][k] * j.q.v + pd[jj] * qd[k] - pd[k] * qd[jj] - j.p.v * qdd[jj][k];
    let dpq = [pd[0] * j.q.v + j.p.v * qd[0], pd[1] * j.q.v + j.p.v * qd[1]];

    let mut jac = DMatrix::zeros(5, 5);
    for jj in 0..2 {
        let gz = -i * pq.conj() * dh(jj, 0);
        let gw = -i * pq.conj() * dh(jj, 1);
        let delta = |k: usize| if k == jj { t } else { 0.0 };
        let gzb = -i * dpq[0].conj() * h[jj] - delta(0);
        let gwb = -i * dpq[1].conj() * h[jj] - delta(1);
        let (re, im) = real_rows(gz, gzb, gw, gwb);
        for c in 0..4 {
            jac[(2 * jj, c)] = re[c];
            jac[(2 * jj + 1, c)] = im[c];
        }
        jac[(2 * jj, 4)] = -zc[jj].re;
        jac[(2 * jj + 1, 4)] = -zc[jj].im;
    }
    for c in 0..4 {
        jac[(4, c)] = 2.0 * x[c];
    }
    for row in 0..4 {
        jac.row_mut(row).scale_mut(1.0 / sigma);
    }
    jac.row_mut(4).scale_mut(1.0 / (r * r));
    let s = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] - r * r) / (r * r);
    let gv = DVector::from_vec(vec![g[0].re / sigma, g[0].im / sigma, g[1].re / sigma, g[1].im / sigma, s]);
    gv.iter().all(|v| v.is_finite()).then_some((gv, jac))
}

/// `|PQ| |H|`, the size of the terms of `G` at `pt`.
fn term_size(f: &RationalMap, pt: CPoint) -> f64 {
    let j = jets(f, pt);
    let h = h_vec(&j);
    j.p.v.norm() * j.q.v.norm() * (h[0].norm_sqr() + h[1].norm_sqr()).sqrt()
}

/// Residual of the scaled system relative to the size of its terms, with
/// `sigma` (the typical term size on the sphere) as a floor.
fn dependence_measure(f: &RationalMap, r: f64, sigma: f64, x: &[f64], g: &DVector<f64>) -> f64 {
    let pt = CPoint::from_real([x[0], x[1], x[2], x[3]]);
    let scale = sigma + term_size(f, pt) + x[4].abs() * r;
    let gn = sigma * (g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]).sqrt();
    (gn / scale).max(g[4].abs())
}

/// Median term size over the seeds; the natural unit for `G`.
fn typical_scale(f: &RationalMap, pts: &[CPoint]) -> f64 {
    let mut v: Vec<f64> = pts.iter().map(|p| term_size(f, *p)).filter(|v| v.is_finite() && *v > 0.0).collect();
    if v.is_empty() {
        return 1.0;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    v[v.len() / 2]
}

/// Least-squares multiplier for a point: the `t` that best fits the cleared
/// dependence equations.
fn initial_multiplier(f: &RationalMap, pt: CPoint) -> f64 {
    let j = jets(f, pt);
    let i = C64::new(0.0, 1.0);
    let pq = j.p.v * j.q.v;
    let h = h_vec(&j);
    let a = [-i * pq.conj() * h[0], -i * pq.conj() * h[1]];
    let num = (pt.z * a[0] + pt.w * a[1]).re;
    let t = num / pt.norm_sqr();
    if t.is_finite() {
        t
    } else {
        0.0
    }
}

fn on_divisor(f: &RationalMap, pt: CPoint) -> bool {
    f.numerator().eval(pt).norm() <= DIVISOR_GUARD * f.numerator().coeff_scale()
        || f.denominator().eval(pt).norm() <= DIVISOR_GUARD * f.denominator().coeff_scale()
}

/// Converged solutions that are not critical points: on the divisor, or
/// close to it where the cleared system vanishes to high order (a common
/// factor of `P` and `Q` does this) without `grad arg F` being normal.
fn spurious(f: &RationalMap, pt: CPoint) -> bool {
    on_divisor(f, pt) || dependence_residual(f, pt).is_none_or(|d| d >= CLASSIFY_PRECONDITION)
}

/// Normalized size of the tangential part of `grad arg F` at `p`; zero
/// exactly at critical points. `None` on the divisor.
pub fn dependence_residual(f: &RationalMap, p: CPoint) -> Option<f64> {
    let (gz, gw) = f.arg_gradient(p)?;
    let v = [gz.re, gz.im, gw.re, gw.im];
    let x = p.to_real();
    let r = p.norm();
    let radial = dot4(v, x) / (r * r);
    let tan = [v[0] - radial * x[0], v[1] - radial * x[1], v[2] - radial * x[2], v[3] - radial * x[3]];
    let res = norm4(tan) * r / (1.0 + norm4(v) * r);
    res.is_finite().then_some(res)
}

fn principal_arg(v: C64) -> f64 {
    let a = v.arg();
    if a >= 0.0 {
        return a;
    }
    // -tiny + 2pi rounds to 2pi
    let b = a + std::f64::consts::TAU;
    if b < std::f64::consts::TAU {
        b
    } else {
        0.0
    }
}

/// Hessian of `s -> arg(F(R(p + sum s_i e_i)) / F(p))` at `s = 0`, where `R`
/// projects back onto the sphere of radius `r`.
fn hessian(f: &RationalMap, p: CPoint, r: f64, step: f64) -> Option<[[f64; 3]; 3]> {
    let f0 = f.eval_regular(p)?;
    let frame = tangent_frame(p);
    let x = p.to_real();
    let h = |s: [f64; 3]| -> Option<f64> {
        let mut y = x;
        for (k, e) in frame.iter().enumerate() {
            for c in 0..4 {
                y[c] += s[k] * e[c];
            }
        }
        let n = norm4(y);
        let q = CPoint::from_real(y.map(|v| v * r / n));
        let v = f.eval_regular(q)? / f0;
        let a = v.arg();
        // a branch jump inside the stencil means it is too coarse
        (a.abs() < std::f64::consts::FRAC_PI_2).then_some(a)
    };
    let e = |k: usize, sgn: f64| {
        let mut s = [0.0; 3];
        s[k] = sgn * step;
        s
    };
    let mut m = [[0.0; 3]; 3];
    for a in 0..3 {
        m[a][a] = (h(e(a, 1.0))? + h(e(a, -1.0))?) / (step * step);
        for b in (a + 1)..3 {
            let mut vals = [0.0; 4];
            for (slot, (sa, sb)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].iter().enumerate() {
                let mut s = [0.0; 3];
                s[a] = sa * step;
                s[b] = sb * step;
                vals[slot] = h(s)?;
            }
            let v = (vals[0] - vals[1] - vals[2] + vals[3]) / (4.0 * step * step);
            m[a][b] = v;
            m[b][a] = v;
        }
    }
    Some(m)
}

fn classify_unchecked(f: &RationalMap, p: CPoint, r: f64, rel_tol: f64) -> Result<Classification, MilnorError> {
    let mut step = HESSIAN_STEP * r;
    for _ in 0..=HESSIAN_HALVINGS {
        if let Some(m) = hessian(f, p, r, step) {
            let eig = sym3_eigenvalues(m);
            let max = eig.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let min = eig.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
            let degenerate = min.is_nan() || min < rel_tol * max || max == 0.0;
            let index = (!degenerate).then(|| eig.iter().filter(|v| **v < 0.0).count() as u8);
            return Ok(Classification { index, degenerate, eigenvalues: eig });
        }
        step *= 0.5;
    }
    Err(MilnorError::BranchFailure)
}

/// Morse index and degeneracy of a critical point `p` on the sphere of
/// radius `r`, from a central-difference Hessian of `arg F` in a tangent frame.
pub fn classify_critical_point(
    f: &RationalMap,
    p: CPoint,
    r: f64,
    cfg: &SolverConfig,
) -> Result<Classification, MilnorError> {
    cfg.validate()?;
    check_radius(r)?;
    let residual = dependence_residual(f, p).unwrap_or(f64::INFINITY);
    if residual.is_nan() || residual >= CLASSIFY_PRECONDITION {
        return Err(MilnorError::NotCritical { residual });
    }
    classify_unchecked(f, p, r, cfg.degeneracy_rel_tol)
}

#[derive(Clone)]
struct RawSolution {
    x: [f64; 5],
    residual: f64,
}

/// Merges solutions within `dist` of each other in `R^4`, keeping the one
/// with the smaller residual. Input order does not affect the output.
fn dedup(mut sols: Vec<RawSolution>, dist: f64) -> Vec<RawSolution> {
    sols.sort_by(|a, b| {
        a.x.iter().zip(b.x.iter()).map(|(u, v)| u.total_cmp(v)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out: Vec<RawSolution> = Vec::new();
    'next: for s in sols {
        for o in out.iter_mut() {
            let d = (0..4).map(|c| (o.x[c] - s.x[c]).powi(2)).sum::<f64>().sqrt();
            if d <= dist {
                if s.residual < o.residual {
                    *o = s;
                }
                continue 'next;
            }
        }
        out.push(s);
    }
    out
}

/// Extra seeds scattered around each degenerate point, so that a whole
/// circle of them is sampled densely enough to fit.
const LOCUS_SEEDS: usize = 24;
const LOCUS_SPREAD: f64 = 0.3;
const LOCUS_MAX_CENTRES: usize = 16;

fn classify_all(f: &RationalMap, r: f64, cfg: &SolverConfig, sols: Vec<RawSolution>) -> Vec<CriticalPoint> {
    sols.into_par_iter()
        .map(|s| {
            let pt = CPoint::from_real([s.x[0], s.x[1], s.x[2], s.x[3]]);
            let theta = f.eval_regular(pt).map(principal_arg).unwrap_or(0.0);
            let (index, degenerate, eigenvalues) = match classify_unchecked(f, pt, r, cfg.degeneracy_rel_tol) {
                Ok(c) => (c.index, c.degenerate, c.eigenvalues),
                Err(_) => (None, false, [0.0; 3]),
            };
            CriticalPoint {
                point: pt,
                multiplier_t: s.x[4],
                theta,
                index,
                degenerate,
                residual: s.residual,
                hessian_eigenvalues: eigenvalues,
            }
        })
        .collect()
}

pub(crate) fn search(f: &RationalMap, r: f64, cfg: &SolverConfig) -> CriticalSearch {
    let mut rng = seeds::rng(cfg.rng_seed, seeds::salt::CRITICAL);
    let starts: Vec<CPoint> = (0..cfg.seed_count).map(|_| seeds::on_sphere(&mut rng, r)).collect();
    let sigma = typical_scale(f, &starts);
    let system = |x: &[f64]| dependence_system(f, r, sigma, x);
    let measure = |x: &[f64], g: &DVector<f64>| dependence_measure(f, r, sigma, x, g);
    let solve_all = |starts: Vec<CPoint>| -> Vec<Option<(RawSolution, bool)>> {
        starts
            .into_par_iter()
            .map(|s| {
                let x = s.to_real();
                let x0 = vec![x[0], x[1], x[2], x[3], initial_multiplier(f, s)];
                let out = newton::solve(x0, system, measure, cfg.newton_tol, cfg.max_newton_iters);
                if !out.converged {
                    return None;
                }
                let pt = CPoint::from_real([out.x[0], out.x[1], out.x[2], out.x[3]]);
                let sol = RawSolution { x: [out.x[0], out.x[1], out.x[2], out.x[3], out.x[4]], residual: out.residual };
                Some((sol, spurious(f, pt)))
            })
            .collect()
    };

    let outcomes = solve_all(starts);
    let converged = outcomes.iter().filter(|o| o.is_some()).count();
    let divisor_hits = outcomes.iter().filter(|o| matches!(o, Some((_, true)))).count();
    let mut raw: Vec<RawSolution> = outcomes.into_iter().flatten().filter(|(_, d)| !d).map(|(s, _)| s).collect();
    let mut points = classify_all(f, r, cfg, dedup(raw.clone(), cfg.dedup_dist));

    let mut centres: Vec<CPoint> = Vec::new();
    for p in points.iter().filter(|p| p.degenerate) {
        if centres.len() < LOCUS_MAX_CENTRES && centres.iter().all(|c| c.dist(p.point) > LOCUS_SPREAD * r) {
            centres.push(p.point);
        }
    }
    if !centres.is_empty() {
        let mut rng = seeds::rng(cfg.rng_seed, seeds::salt::LOCUS);
        let extra: Vec<CPoint> = centres
            .iter()
            .flat_map(|c| {
                (0..LOCUS_SEEDS)
                    .map(|_| {
                        let d = seeds::on_sphere(&mut rng, LOCUS_SPREAD * r);
                        let q = CPoint::new(c.z + d.z, c.w + d.w);
                        q.scale(r / q.norm())
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        raw.extend(solve_all(extra).into_iter().flatten().filter(|(_, d)| !d).map(|(s, _)| s));
        points = classify_all(f, r, cfg, dedup(raw, cfg.dedup_dist));
    }

    let unclassified = points.iter().filter(|p| p.index.is_none() && !p.degenerate).count();
    let incomplete = (points.is_empty() && (converged as f64) < 0.25 * cfg.seed_count as f64) || unclassified > 0;
    CriticalSearch { points, converged_seeds: converged, total_seeds: cfg.seed_count, divisor_hits, unclassified, incomplete }
}

/// Critical points of the Milnor map on the sphere of radius `r`.
pub fn milnor_critical_points(f: &RationalMap, r: f64, cfg: &SolverConfig) -> Result<CriticalSearch, MilnorError> {
    check_preconditions(f, cfg)?;
    let radii = super::critical_radii(f, &SolverConfig { assume_squarefree: true, ..cfg.clone() })?;
    super::check_regular_radius(r, &radii)?;
    Ok(search(f, r, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_rational;

    fn numeric_jacobian(f: &RationalMap, r: f64, x: &[f64]) -> DMatrix<f64> {
        let h = 1e-6;
        let mut jac = DMatrix::zeros(5, 5);
        for c in 0..5 {
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[c] += h;
            b[c] -= h;
            let ga = dependence_system(f, r, 2.5, &a).unwrap().0;
            let gb = dependence_system(f, r, 2.5, &b).unwrap().0;
            for row in 0..5 {
                jac[(row, c)] = (ga[row] - gb[row]) / (2.0 * h);
            }
        }
        jac
    }

    #[test]
    fn analytic_jacobian_matches_differences() {
        let f = parse_rational("(z^2+2*w-i*z*w)/(z-3*w^2+1)").unwrap();
        let x = [0.3, -0.2, 0.5, 0.4, 0.7];
        let (_, jac) = dependence_system(&f, 1.0, 2.5, &x).unwrap();
        let num = numeric_jacobian(&f, 1.0, &x);
        let err = (&jac - &num).abs().max();
        assert!(err < 1e-6 * (1.0 + jac.abs().max()), "{jac}\n{num}");
    }

    #[test]
    fn o1_points_at_unit_radius() {
        let f = parse_rational("4*w+3*(w^2+z^2)").unwrap();
        let s = search(&f, 1.0, &SolverConfig::default());
        assert_eq!(s.points.len(), 2, "{s:?}");
        let mut idx: Vec<u8> = s.points.iter().map(|p| p.index.unwrap()).collect();
        idx.sort();
        assert_eq!(idx, vec![1, 2]);
        for p in &s.points {
            assert!(p.point.z.norm() < 1e-6);
            assert!(((p.point.w + 1.0).norm() - 1.0 / 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn projection_has_no_critical_points() {
        let f = parse_rational("w").unwrap();
        let p = CPoint::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8));
        let err = classify_critical_point(&f, p, 1.0, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, MilnorError::NotCritical { .. }));
        assert!(search(&f, 1.0, &SolverConfig::default()).points.is_empty());
    }

    #[test]
    fn birth_death_point_is_degenerate() {
        let f = parse_rational("4*w+3*(w^2+z^2)").unwrap();
        let r = 2.0 / 3.0;
        let p = CPoint::new(C64::new(0.0, 0.0), C64::new(-r, 0.0));
        let c = classify_critical_point(&f, p, r, &SolverConfig::default()).unwrap();
        assert!(c.degenerate, "{c:?}");
        let s = search(&f, r, &SolverConfig::default());
        assert!(!s.points.is_empty() && s.points.iter().all(|p| p.degenerate), "{s:?}");
    }
}
