//! Reference implementations used as test oracles. None of them call into
//! the library's linear algebra.

#![allow(dead_code)]

use num_complex::Complex64;
use vsat_precoding::CMatrix;

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// sorted ascending.
pub fn jacobi_symmetric(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    d.sort_by(f64::total_cmp);
    d
}

/// Eigenvalues of a Hermitian matrix through its real `2n × 2n` embedding
/// `[[Re, −Im], [Im, Re]]`, whose spectrum repeats each eigenvalue twice.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut e = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            e[i][j] = z.re;
            e[i + n][j + n] = z.re;
            e[i][j + n] = -z.im;
            e[i + n][j] = z.im;
        }
    }
    jacobi_symmetric(e).into_iter().step_by(2).collect()
}

/// Naive triple-loop complex matrix product.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows(), b.ncols());
    for i in 0..a.nrows() {
        for j in 0..b.ncols() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..a.ncols() {
                acc += a[(i, k)] * b[(k, j)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

pub fn adjoint(a: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)].conj())
}

/// Inverse square root of a Hermitian positive definite matrix by
/// Newton–Schulz iteration on the scaled matrix.
pub fn inverse_sqrt(b: &CMatrix) -> CMatrix {
    let n = b.nrows();
    let ev = hermitian_eigenvalues(b);
    let s = ev[n - 1];
    let a = b.map(|z| z / s);
    // coupled iteration: Y → A^{1/2}, Z → A^{-1/2}
    let eye = CMatrix::identity(n, n);
    let mut y = a.clone();
    let mut z = eye.clone();
    for _ in 0..200 {
        let t = (eye.map(|x| x * 3.0) - matmul(&z, &y)).map(|x| x * 0.5);
        let y_next = matmul(&y, &t);
        let z_next = matmul(&t, &z);
        let delta: f64 = (&z_next - &z).iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        y = y_next;
        z = z_next;
        if delta < 1e-15 {
            break;
        }
    }
    z.map(|x| x / s.sqrt())
}

/// Largest eigenvalue of `B^{-1} A` as `λ_max(B^{-1/2} A B^{-1/2})`.
pub fn generalized_lambda_max(a: &CMatrix, b: &CMatrix) -> f64 {
    let w = inverse_sqrt(b);
    let c = matmul(&matmul(&w, a), &w);
    let c = (&c + adjoint(&c)).map(|x| x * 0.5);
    *hermitian_eigenvalues(&c).last().unwrap()
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 50)
}
