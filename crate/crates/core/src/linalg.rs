//! Small dense helpers for Hermitian matrices.

use num_complex::Complex64;

/// Positive semidefiniteness by symmetric elimination with tolerance `tol`.
pub fn is_psd(m: &[Vec<Complex64>], tol: f64) -> bool {
    let n = m.len();
    let mut a: Vec<Vec<Complex64>> = m.to_vec();
    for i in 0..n {
        for j in 0..n {
            if (a[i][j] - a[j][i].conj()).norm() > tol {
                return false;
            }
        }
    }
    for k in 0..n {
        let p = a[k][k].re;
        if p < -tol {
            return false;
        }
        if p.abs() <= tol {
            // A vanishing pivot forces the rest of its row to vanish.
            if (k + 1..n).any(|j| a[k][j].norm() > tol.sqrt()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            let f = a[i][k] / p;
            for j in k + 1..n {
                let t = f * a[k][j];
                a[i][j] -= t;
            }
        }
    }
    true
}
