//! Brute-force dense oracles for the integration tests. Everything here is
//! deliberately independent of the library's Sturm-bisection path: spectra
//! come from cyclic Jacobi rotations on the dense matrix, characteristic
//! polynomials from the Faddeev-LeVerrier trace recursion.

#![allow(dead_code)]

pub type Dense = Vec<Vec<f64>>;

/// Dense symmetric tridiagonal matrix from its bands.
pub fn dense_symmetric(diag: &[f64], off: &[f64]) -> Dense {
    let n = diag.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = diag[i];
        if i + 1 < n {
            m[i][i + 1] = off[i];
            m[i + 1][i] = off[i];
        }
    }
    m
}

/// Dense non-symmetric tridiagonal matrix with separate lower/upper bands.
pub fn dense_tridiagonal(diag: &[f64], lower: &[f64], upper: &[f64]) -> Dense {
    let n = diag.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = diag[i];
        if i + 1 < n {
            m[i][i + 1] = upper[i];
            m[i + 1][i] = lower[i];
        }
    }
    m
}

/// All eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations,
/// sorted ascending.
pub fn jacobi_rotation_eigenvalues(mut a: Dense) -> Vec<f64> {
    let n = a.len();
    if n == 1 {
        return vec![a[0][0]];
    }
    for _sweep in 0..100 {
        let mut off_norm = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off_norm += a[p][q] * a[p][q];
            }
        }
        if off_norm < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (2.0 * a[p][q]).atan2(a[q][q] - a[p][p]);
                let (s, c) = theta.sin_cos();
                for i in 0..n {
                    let (aip, aiq) = (a[i][p], a[i][q]);
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let (api, aqi) = (a[p][i], a[q][i]);
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
        }
    }
    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eigenvalues.sort_by(f64::total_cmp);
    eigenvalues
}

fn mat_mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

fn trace(a: &Dense) -> f64 {
    (0..a.len()).map(|i| a[i][i]).sum()
}

/// Coefficients [1, c_1, ..., c_n] of det(xI - A) = x^n + c_1 x^(n-1) + ...
/// + c_n, by the Faddeev-LeVerrier recursion.
pub fn char_poly_coeffs(a: &Dense) -> Vec<f64> {
    let n = a.len();
    let mut coeffs = vec![1.0];
    let mut m: Dense = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut am = mat_mul(a, &m);
    for step in 1..=n {
        let c = -trace(&am) / step as f64;
        coeffs.push(c);
        if step < n {
            for i in 0..n {
                am[i][i] += c;
            }
            m = am;
            am = mat_mul(a, &m);
        }
    }
    coeffs
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn rotation_oracle_on_known_matrix() {
        // T_3(0,1): eigenvalues -sqrt(2), 0, sqrt(2)
        let m = dense_symmetric(&[0.0; 3], &[1.0, 1.0]);
        let eig = jacobi_rotation_eigenvalues(m);
        let sqrt2 = 2.0_f64.sqrt();
        for (got, want) in eig.iter().zip([-sqrt2, 0.0, sqrt2]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn char_poly_of_t3() {
        // det(xI - T_3(0,1)) = x^3 - 2x
        let m = dense_symmetric(&[0.0; 3], &[1.0, 1.0]);
        let c = char_poly_coeffs(&m);
        let want = [1.0, 0.0, -2.0, 0.0];
        for (g, w) in c.iter().zip(want) {
            assert!((g - w).abs() < 1e-12);
        }
    }
}
