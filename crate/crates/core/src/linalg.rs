//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};
use num_complex::Complex64;

/// Relative singular-value cutoff for pseudo-inverse solves.
const PINV_RCOND: f64 = 1e-13;

/// Minimum-norm least-squares solution of `J x = b` via SVD.
pub fn lstsq(jac: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = jac.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if !(smax.is_finite()) || smax == 0.0 {
        return None;
    }
    svd.solve(b, smax * PINV_RCOND).ok().filter(|x| x.iter().all(|v| v.is_finite()))
}

/// Least-squares solve of an overdetermined complex `3x2` system.
pub fn complex_lstsq_3x2(jac: &[[Complex64; 2]; 3], b: &[Complex64; 3]) -> Option<[Complex64; 2]> {
    let m = DMatrix::from_fn(3, 2, |i, j| jac[i][j]);
    let rhs = DVector::from_fn(3, |i, _| b[i]);
    let svd = m.svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if !(smax.is_finite()) || smax == 0.0 {
        return None;
    }
    let x = svd.solve(&rhs, smax * PINV_RCOND).ok()?;
    let out = [x[0], x[1]];
    out.iter().all(|c| c.is_finite()).then_some(out)
}

/// Eigenvalues of a symmetric 3x3 matrix in ascending order.
pub fn sym3_eigenvalues(m: [[f64; 3]; 3]) -> [f64; 3] {
    let mat = Matrix3::from_fn(|i, j| 0.5 * (m[i][j] + m[j][i]));
    let eig = SymmetricEigen::new(mat);
    let mut v = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Determinant of a 3x3 matrix given by rows.
fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Generalized cross product of three vectors in `R^4`: the vector orthogonal
/// to all three whose orientation makes `(r0, r1, r2, v)` positively oriented.
pub fn cross4(r0: [f64; 4], r1: [f64; 4], r2: [f64; 4]) -> [f64; 4] {
    let minor = |skip: usize| {
        let pick = |r: [f64; 4]| {
            let mut out = [0.0; 3];
            let mut k = 0;
            for (j, v) in r.iter().enumerate() {
                if j != skip {
                    out[k] = *v;
                    k += 1;
                }
            }
            out
        };
        det3(pick(r0), pick(r1), pick(r2))
    };
    [-minor(0), minor(1), -minor(2), minor(3)]
}

pub fn dot4(a: [f64; 4], b: [f64; 4]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn norm4(a: [f64; 4]) -> f64 {
    dot4(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross4_is_orthogonal() {
        let r0 = [1.0, 2.0, -0.5, 0.3];
        let r1 = [0.2, -1.0, 0.7, 1.1];
        let r2 = [-0.4, 0.1, 0.9, -2.0];
        let v = cross4(r0, r1, r2);
        for r in [r0, r1, r2] {
            assert!(dot4(r, v).abs() < 1e-12);
        }
        assert!(norm4(v) > 0.1);
        // positive orientation: det(r0, r1, r2, v) = |v|^2
        let m = nalgebra::Matrix4::from_rows(&[
            nalgebra::RowVector4::from(r0),
            nalgebra::RowVector4::from(r1),
            nalgebra::RowVector4::from(r2),
            nalgebra::RowVector4::from(v),
        ]);
        assert!((m.determinant() - dot4(v, v)).abs() < 1e-9);
    }

    #[test]
    fn lstsq_min_norm() {
        let j = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let b = DVector::from_vec(vec![2.0]);
        let x = lstsq(&j, &b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }
}
