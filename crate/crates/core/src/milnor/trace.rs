//! Tracing the link `L(F, r)`: the components of `{P = 0}` and `{Q = 0}` on
//! the sphere, by predictor-corrector continuation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{check_preconditions, newton, real_rows, seeds, MilnorError, SolverConfig};
use crate::linalg::{cross4, dot4, norm4};
use crate::poly::{CPoint, CPoly2, RationalMap, C64};

/// Continuation step relative to the radius.
const STEP: f64 = 0.02;
const MIN_STEP: f64 = 1e-7;
const CORRECTOR_ITERS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Divisor {
    Zeros,
    Poles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkComponent {
    pub divisor: Divisor,
    pub length: f64,
    pub closed: bool,
    pub samples: Vec<CPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkTrace {
    pub components: usize,
    pub loops: Vec<LinkComponent>,
    pub incomplete: bool,
}

type System = (DVector<f64>, DMatrix<f64>);

/// `{Re g, Im g, |x|^2 - r^2}`.
fn curve_system(g: &CPoly2, r: f64, x: &[f64]) -> Option<System> {
    let p = CPoint::from_real([x[0], x[1], x[2], x[3]]);
    let j = g.jet(p);
    let zero = C64::new(0.0, 0.0);
    let (re, im) = real_rows(j.dz, zero, j.dw, zero);
    let s = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] - r * r;
    let v = DVector::from_vec(vec![j.v.re, j.v.im, s]);
    let jac = DMatrix::from_fn(3, 4, |row, c| match row {
        0 => re[c],
        1 => im[c],
        _ => 2.0 * x[c],
    });
    v.iter().all(|a| a.is_finite()).then_some((v, jac))
}

fn curve_measure(scale: f64, deg: u32, r: f64) -> impl Fn(&[f64], &DVector<f64>) -> f64 {
    move |_, g| {
        let gn = (g[0] * g[0] + g[1] * g[1]).sqrt() / (scale * (1.0 + r).powi(deg as i32));
        gn.max(g[2].abs() / (r * r))
    }
}

fn tangent(g: &CPoly2, x: [f64; 4]) -> Option<[f64; 4]> {
    let j = g.jet(CPoint::from_real(x));
    let zero = C64::new(0.0, 0.0);
    let (re, im) = real_rows(j.dz, zero, j.dw, zero);
    let t = cross4(re, im, x);
    let n = norm4(t);
    (n > 0.0 && n.is_finite()).then(|| t.map(|v| v / n))
}

fn dist(a: [f64; 4], b: [f64; 4]) -> f64 {
    norm4([a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]])
}

enum TraceEnd {
    Closed(Vec<[f64; 4]>, f64),
    Open(Vec<[f64; 4]>, f64),
}

fn follow(g: &CPoly2, r: f64, start: [f64; 4], cfg: &SolverConfig) -> TraceEnd {
    let h0 = STEP * r;
    let system = |x: &[f64]| curve_system(g, r, x);
    let measure = curve_measure(g.coeff_scale(), g.total_degree(), r);
    let mut samples = vec![start];
    let mut x = start;
    let mut length = 0.0;
    let Some(mut t) = tangent(g, x) else { return TraceEnd::Open(samples, 0.0) };
    let mut h = h0;
    for _ in 0..cfg.max_trace_steps {
        let pred: Vec<f64> = (0..4).map(|c| x[c] + h * t[c]).collect();
        let out = newton::solve(pred, system, &measure, cfg.newton_tol, CORRECTOR_ITERS);
        let y = [out.x[0], out.x[1], out.x[2], out.x[3]];
        let step = dist(x, y);
        let t_new = if out.converged { tangent(g, y) } else { None };
        let ok = match t_new {
            Some(tn) => dot4(tn, t) > 0.9 && step > 0.5 * h && step < 1.5 * h,
            None => false,
        };
        if !ok {
            h *= 0.5;
            if h < MIN_STEP * r {
                return TraceEnd::Open(samples, length);
            }
            continue;
        }
        length += step;
        x = y;
        t = t_new.expect("checked above");
        if length > 3.0 * h0 && dist(x, start) < 1.1 * h0 {
            return TraceEnd::Closed(samples, length + dist(x, start));
        }
        samples.push(x);
        h = (2.0 * h).min(h0);
    }
    TraceEnd::Open(samples, length)
}

/// Distance from `x` to a closed polyline.
fn polyline_dist(x: [f64; 4], pts: &[[f64; 4]]) -> f64 {
    let mut best = f64::INFINITY;
    for k in 0..pts.len() {
        let a = pts[k];
        let b = pts[(k + 1) % pts.len()];
        let ab = [b[0] - a[0], b[1] - a[1], b[2] - a[2], b[3] - a[3]];
        let ax = [x[0] - a[0], x[1] - a[1], x[2] - a[2], x[3] - a[3]];
        let l2 = dot4(ab, ab);
        let s = if l2 > 0.0 { (dot4(ax, ab) / l2).clamp(0.0, 1.0) } else { 0.0 };
        let q = [a[0] + s * ab[0], a[1] + s * ab[1], a[2] + s * ab[2], a[3] + s * ab[3]];
        best = best.min(dist(x, q));
    }
    best
}

pub(crate) fn trace(f: &RationalMap, r: f64, cfg: &SolverConfig) -> LinkTrace {
    let mut rng = seeds::rng(cfg.rng_seed, seeds::salt::TRACE);
    let mut loops: Vec<LinkComponent> = Vec::new();
    let mut incomplete = false;
    let divisors = [(Divisor::Zeros, f.numerator()), (Divisor::Poles, f.denominator())];
    for (kind, g) in divisors {
        if g.is_constant() {
            continue;
        }
        let starts: Vec<CPoint> = (0..cfg.seed_count).map(|_| seeds::on_sphere(&mut rng, r)).collect();
        let system = |x: &[f64]| curve_system(g, r, x);
        let measure = curve_measure(g.coeff_scale(), g.total_degree(), r);
        let landed: Vec<[f64; 4]> = {
            use rayon::prelude::*;
            starts
                .into_par_iter()
                .filter_map(|s| {
                    let out = newton::solve(s.to_real().to_vec(), system, &measure, cfg.newton_tol, cfg.max_newton_iters);
                    out.converged.then(|| [out.x[0], out.x[1], out.x[2], out.x[3]])
                })
                .collect()
        };
        let mut mine: Vec<Vec<[f64; 4]>> = Vec::new();
        for x in landed {
            let covered = mine.iter().any(|pl| polyline_dist(x, pl) < 2.0 * STEP * r);
            if covered {
                continue;
            }
            match follow(g, r, x, cfg) {
                TraceEnd::Closed(samples, length) => {
                    mine.push(samples.clone());
                    loops.push(LinkComponent {
                        divisor: kind,
                        length,
                        closed: true,
                        samples: samples.into_iter().map(CPoint::from_real).collect(),
                    });
                }
                TraceEnd::Open(samples, length) => {
                    incomplete = true;
                    mine.push(samples.clone());
                    loops.push(LinkComponent {
                        divisor: kind,
                        length,
                        closed: false,
                        samples: samples.into_iter().map(CPoint::from_real).collect(),
                    });
                }
            }
        }
    }
    LinkTrace { components: loops.iter().filter(|l| l.closed).count(), loops, incomplete }
}

/// Components of the link `L(F, r)`, with polyline samples.
pub fn trace_link(f: &RationalMap, r: f64, cfg: &SolverConfig) -> Result<LinkTrace, MilnorError> {
    check_preconditions(f, cfg)?;
    let radii = super::critical_radii(f, &SolverConfig { assume_squarefree: true, ..cfg.clone() })?;
    super::check_regular_radius(r, &radii)?;
    Ok(trace(f, r, cfg))
}
