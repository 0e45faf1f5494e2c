//! Small dense float linear algebra.
//!
//! Matrices here are at most a few dozen entries wide (n <= 16 variables),
//! so plain partial-pivot LU and one-sided Jacobi are all that is needed.
//! The LU determinant doubles as the generic cross-check for the closed-form
//! determinant in `transversal`, so it must stay an independent code path.

use alloc::vec;
use alloc::vec::Vec;
// Carries f64 math in no_std builds; redundant once std is in the crate graph.
#[allow(unused_imports)]
use num_traits::Float;

/// Determinant by LU with partial pivoting. Consumes the matrix.
pub fn lu_det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0f64;
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if a[i][k].abs() > a[piv][k].abs() {
                piv = i;
            }
        }
        if a[piv][k] == 0.0 {
            return 0.0;
        }
        if piv != k {
            a.swap(piv, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// Solve `a x = b` by LU with partial pivoting. `None` when a pivot is
/// exactly zero; near-singular systems are the caller's problem to detect.
pub fn lu_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    debug_assert_eq!(b.len(), n);
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if a[i][k].abs() > a[piv][k].abs() {
                piv = i;
            }
        }
        if a[piv][k] == 0.0 {
            return None;
        }
        if piv != k {
            a.swap(piv, k);
            b.swap(piv, k);
        }
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in k + 1..n {
            s -= a[k][j] * x[j];
        }
        x[k] = s / a[k][k];
    }
    Some(x)
}

/// Singular values of a short, wide matrix given as `k` rows of length `m`
/// (`k <= m`), descending. One-sided Jacobi on the rows: accurate for tiny
/// singular values, unlike going through the Gram matrix.
pub fn singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    let k = rows.len();
    let mut r: Vec<Vec<f64>> = rows.to_vec();
    let mut rotated = true;
    let mut sweeps = 0;
    while rotated && sweeps < 60 {
        rotated = false;
        sweeps += 1;
        for p in 0..k {
            for q in p + 1..k {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for j in 0..r[p].len() {
                    app += r[p][j] * r[p][j];
                    aqq += r[q][j] * r[q][j];
                    apq += r[p][j] * r[q][j];
                }
                if apq.abs() <= 1e-15 * (app * aqq).sqrt() || apq == 0.0 {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for j in 0..r[p].len() {
                    let rp = r[p][j];
                    let rq = r[q][j];
                    r[p][j] = c * rp - s * rq;
                    r[q][j] = s * rp + c * rq;
                }
            }
        }
    }
    let mut sv: Vec<f64> = r
        .iter()
        .map(|row| row.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}
