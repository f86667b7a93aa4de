//! Circles of degenerate critical points.

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen, Vector4};
use serde::{Deserialize, Serialize};

use super::critical::{search, CriticalPoint};
use super::{check_preconditions, MilnorError, SolverConfig};
use crate::linalg::lstsq;
use crate::poly::{CPoint, RationalMap};

/// Degenerate points closer than this (relative to the radius) are linked
/// into one cluster.
const LINK_DIST: f64 = 0.5;
const MIN_POINTS: usize = 8;
/// Smallest arc that is fitted on its own before arcs are merged.
const MIN_ARC_POINTS: usize = 4;
const MAX_RESIDUAL: f64 = 1e-4;
const SAME_CIRCLE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedCircle {
    pub center: CPoint,
    pub radius: f64,
    /// Orthonormal basis of the plane of the circle, in real coordinates.
    pub axes: [[f64; 4]; 2],
    /// RMS distance of the samples from the fitted circle.
    pub residual: f64,
    pub samples: usize,
}

/// Least-squares circle through points of `R^4`: the best plane by PCA, then
/// an algebraic circle fit inside it. `None` for fewer than three points.
pub fn fit_circle(points: &[[f64; 4]]) -> Option<FittedCircle> {
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let mut c = Vector4::zeros();
    for p in points {
        c += Vector4::from(*p);
    }
    c /= n;
    let mut cov = Matrix4::zeros();
    for p in points {
        let d = Vector4::from(*p) - c;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|a, b| eig.eigenvalues[*b].total_cmp(&eig.eigenvalues[*a]));
    let u1 = eig.eigenvectors.column(order[0]).into_owned();
    let u2 = eig.eigenvectors.column(order[1]).into_owned();

    let coords: Vec<(f64, f64, Vector4<f64>)> = points
        .iter()
        .map(|p| {
            let d = Vector4::from(*p) - c;
            let (a, b) = (d.dot(&u1), d.dot(&u2));
            (a, b, d - u1 * a - u2 * b)
        })
        .collect();
    // a^2 + b^2 = 2 A a + 2 B b + C
    let jac = DMatrix::from_fn(points.len(), 3, |i, j| match j {
        0 => 2.0 * coords[i].0,
        1 => 2.0 * coords[i].1,
        _ => 1.0,
    });
    let rhs = DVector::from_fn(points.len(), |i, _| coords[i].0.powi(2) + coords[i].1.powi(2));
    let sol = lstsq(&jac, &rhs)?;
    let (ca, cb) = (sol[0], sol[1]);
    let radius = (sol[2] + ca * ca + cb * cb).max(0.0).sqrt();
    let ms = coords
        .iter()
        .map(|(a, b, off)| {
            let radial = ((a - ca).powi(2) + (b - cb).powi(2)).sqrt() - radius;
            radial * radial + off.norm_squared()
        })
        .sum::<f64>()
        / n;
    let center = c + u1 * ca + u2 * cb;
    Some(FittedCircle {
        center: CPoint::from_real([center[0], center[1], center[2], center[3]]),
        radius,
        axes: [[u1[0], u1[1], u1[2], u1[3]], [u2[0], u2[1], u2[2], u2[3]]],
        residual: ms.sqrt(),
        samples: points.len(),
    })
}

/// Single-linkage clusters of the degenerate points, fitted by circles.
pub(crate) fn loci_from_points(points: &[CriticalPoint], r: f64) -> Vec<FittedCircle> {
    let degenerate: Vec<[f64; 4]> = points.iter().filter(|p| p.degenerate).map(|p| p.point.to_real()).collect();
    let mut label: Vec<usize> = (0..degenerate.len()).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..degenerate.len() {
        for j in (i + 1)..degenerate.len() {
            let d = (0..4).map(|c| (degenerate[i][c] - degenerate[j][c]).powi(2)).sum::<f64>().sqrt();
            if d < LINK_DIST * r {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<[f64; 4]>> = Default::default();
    for (i, &p) in degenerate.iter().enumerate() {
        let k = root(&mut label, i);
        groups.entry(k).or_default().push(p);
    }
    // arcs of one circle with a gap between them fit the same circle; merge them
    let mut fitted: Vec<(Vec<[f64; 4]>, FittedCircle)> = Vec::new();
    for g in groups.into_values().filter(|g| g.len() >= MIN_ARC_POINTS) {
        let Some(c) = fit_circle(&g) else { continue };
        if c.residual >= MAX_RESIDUAL * r {
            continue;
        }
        let merged = fitted.iter_mut().find_map(|(pts, o)| {
            if o.center.dist(c.center) >= SAME_CIRCLE * r || (o.radius - c.radius).abs() >= SAME_CIRCLE * r {
                return None;
            }
            let mut all = pts.clone();
            all.extend(g.iter().copied());
            // concentric circles of equal radius in different planes stay apart
            let joint = fit_circle(&all).filter(|j| j.residual < MAX_RESIDUAL * r)?;
            *pts = all;
            *o = joint;
            Some(())
        });
        if merged.is_none() {
            fitted.push((g, c));
        }
    }
    fitted.into_iter().map(|(_, c)| c).filter(|c| c.samples >= MIN_POINTS && c.residual < MAX_RESIDUAL * r).collect()
}

/// Circles of degenerate critical points on the sphere of radius `r`.
pub fn detect_degenerate_locus(f: &RationalMap, r: f64, cfg: &SolverConfig) -> Result<Vec<FittedCircle>, MilnorError> {
    check_preconditions(f, cfg)?;
    super::check_radius(r)?;
    let m = super::divisor_min_norm(f, &SolverConfig { assume_squarefree: true, ..cfg.clone() })?;
    if r <= m.value {
        return Err(MilnorError::InvalidRadius { radius: r, reason: format!("radius must exceed m(F) = {}", m.value) });
    }
    Ok(loci_from_points(&search(f, r, cfg).points, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_a_tilted_circle() {
        let c = [0.5, -1.0, 0.25, 2.0];
        let u = [1.0 / 2f64.sqrt(), 0.0, 1.0 / 2f64.sqrt(), 0.0];
        let v = [0.0, 0.6, 0.0, 0.8];
        let pts: Vec<[f64; 4]> = (0..12)
            .map(|k| {
                let a = k as f64 * 0.5;
                std::array::from_fn(|i| c[i] + 0.3 * (a.cos() * u[i] + a.sin() * v[i]))
            })
            .collect();
        let fit = fit_circle(&pts).unwrap();
        assert!((fit.radius - 0.3).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let got = fit.center.to_real();
        for i in 0..4 {
            assert!((got[i] - c[i]).abs() < 1e-12);
        }
    }
}
