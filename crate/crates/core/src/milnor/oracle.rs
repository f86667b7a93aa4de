//! Brute-force grid scan for near-critical points, independent of the
//! Newton search.
//!
//! The sphere is parametrized by Hopf coordinates
//! `(z, w) = r (cos(eta) e^{i xi1}, sin(eta) e^{i xi2})` and the normalized
//! dependence residual is evaluated at every cell centre. Local minima are
//! polished by Nelder-Mead on the same residual and clustered.

use argmin::core::{CostFunction, Error as ArgminError, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};

use super::{check_preconditions, check_radius, MilnorError, SolverConfig};
use crate::linalg::{dot4, norm4};
use crate::poly::{CPoint, RationalMap, C64};

/// Coarse cells at or above this residual are not refined. The residual is
/// very steep near critical points where `grad arg F` is small, so a cell
/// centre half a cell away can read close to one.
const COARSE_THRESHOLD: f64 = 0.999;
/// A refined minimum below this residual is reported.
pub const ORACLE_THRESHOLD: f64 = 1e-2;
const REFINE_ITERS: u64 = 400;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCluster {
    /// Best refined point of the cluster.
    pub center: CPoint,
    pub residual: f64,
    pub members: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleScan {
    pub resolution: usize,
    pub cell_diameter: f64,
    /// Coarse local minima that were refined.
    pub candidates: usize,
    pub clusters: Vec<OracleCluster>,
}

fn hopf_point(r: f64, eta: f64, xi1: f64, xi2: f64) -> CPoint {
    CPoint::new(C64::from_polar(r * eta.cos(), xi1), C64::from_polar(r * eta.sin(), xi2))
}

/// The normalized dependence residual `|v_tan| r / (1 + |v| r)` of
/// `v = grad arg F`: zero at critical points (including zeros of `grad F`),
/// tending to the angle between `v` and the normal near the divisor.
fn residual(f: &RationalMap, p: CPoint) -> f64 {
    let Some((gz, gw)) = f.arg_gradient(p) else { return 1.0 };
    let v = [gz.re, gz.im, gw.re, gw.im];
    let nv = norm4(v);
    if !nv.is_finite() {
        return 1.0;
    }
    let x = p.to_real();
    let r = norm4(x);
    let k = dot4(v, x) / (r * r);
    let tan = norm4([v[0] - k * x[0], v[1] - k * x[1], v[2] - k * x[2], v[3] - k * x[3]]);
    tan * r / (1.0 + nv * r)
}

struct Cost<'a> {
    f: &'a RationalMap,
    r: f64,
}

impl CostFunction for Cost<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, ArgminError> {
        Ok(residual(self.f, hopf_point(self.r, p[0], p[1], p[2])))
    }
}

fn refine(f: &RationalMap, r: f64, start: [f64; 3], h: [f64; 3]) -> Option<(CPoint, f64)> {
    let mut simplex = vec![start.to_vec()];
    for k in 0..3 {
        let mut v = start.to_vec();
        v[k] += 0.5 * h[k];
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex).with_sd_tolerance(1e-14).ok()?;
    let res = Executor::new(Cost { f, r }, solver).configure(|s| s.max_iters(REFINE_ITERS)).run().ok()?;
    let best = res.state().get_best_param()?.clone();
    let cost = res.state().get_best_cost();
    Some((hopf_point(r, best[0], best[1], best[2]), cost))
}

pub(crate) fn scan(f: &RationalMap, r: f64, n: usize) -> OracleScan {
    let d_eta = FRAC_PI_2 / n as f64;
    let d_xi = TAU / n as f64;
    let cell_diameter = r * (d_eta * d_eta + 2.0 * d_xi * d_xi).sqrt();
    let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    let centre = |a: usize, b: usize, c: usize| {
        [(a as f64 + 0.5) * d_eta, (b as f64 + 0.5) * d_xi, (c as f64 + 0.5) * d_xi]
    };

    let values: Vec<f64> = (0..n * n * n)
        .into_par_iter()
        .map(|k| {
            let (a, b, c) = (k / (n * n), (k / n) % n, k % n);
            let [eta, x1, x2] = centre(a, b, c);
            residual(f, hopf_point(r, eta, x1, x2))
        })
        .collect();

    let mut minima = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let v = values[idx(a, b, c)];
                if v >= COARSE_THRESHOLD {
                    continue;
                }
                let mut is_min = true;
                'nb: for da in -1i64..=1 {
                    let aa = a as i64 + da;
                    if aa < 0 || aa >= n as i64 {
                        continue;
                    }
                    for db in -1i64..=1 {
                        for dc in -1i64..=1 {
                            if da == 0 && db == 0 && dc == 0 {
                                continue;
                            }
                            let bb = (b as i64 + db).rem_euclid(n as i64) as usize;
                            let cc = (c as i64 + dc).rem_euclid(n as i64) as usize;
                            let u = values[idx(aa as usize, bb, cc)];
                            // ties go to the lexicographically first cell
                            let earlier = idx(aa as usize, bb, cc) < idx(a, b, c);
                            if u < v || (u == v && earlier) {
                                is_min = false;
                                break 'nb;
                            }
                        }
                    }
                }
                if is_min {
                    minima.push(centre(a, b, c));
                }
            }
        }
    }

    let candidates = minima.len();
    let refined: Vec<(CPoint, f64)> = minima
        .into_par_iter()
        .filter_map(|s| refine(f, r, s, [d_eta, d_xi, d_xi]))
        .filter(|(_, v)| *v < ORACLE_THRESHOLD)
        // pull the point back onto the sphere in case eta drifted
        .map(|(p, v)| (p.scale(r / p.norm()), v))
        .collect();

    let link = 2.0 * cell_diameter;
    let mut label: Vec<usize> = (0..refined.len()).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..refined.len() {
        for j in (i + 1)..refined.len() {
            if refined[i].0.dist(refined[j].0) < link {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..refined.len() {
        let k = root(&mut label, i);
        groups.entry(k).or_default().push(i);
    }
    let clusters = groups
        .into_values()
        .map(|members| {
            let best = members
                .iter()
                .copied()
                .min_by(|a, b| refined[*a].1.total_cmp(&refined[*b].1))
                .expect("clusters are nonempty");
            OracleCluster { center: refined[best].0, residual: refined[best].1, members: members.len() }
        })
        .collect();
    OracleScan { resolution: n, cell_diameter, candidates, clusters }
}

/// Grid scan of the sphere of radius `r` for local minima of the dependence
/// residual, clustered.
pub fn brute_force_oracle(f: &RationalMap, r: f64, cfg: &SolverConfig) -> Result<OracleScan, MilnorError> {
    check_preconditions(f, cfg)?;
    check_radius(r)?;
    let m = super::divisor_min_norm(f, &SolverConfig { assume_squarefree: true, ..cfg.clone() })?;
    if r <= m.value {
        return Err(MilnorError::InvalidRadius { radius: r, reason: format!("radius must exceed m(F) = {}", m.value) });
    }
    Ok(scan(f, r, cfg.grid_resolution))
}
