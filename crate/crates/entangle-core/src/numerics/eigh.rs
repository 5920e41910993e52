//! Dense Hermitian eigensolver (cyclic complex Jacobi) and a real symmetric
//! tridiagonal QL solver used for Gauss quadrature nodes.

use ndarray::Array2;
use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching eigenvectors as
/// the columns of a unitary matrix. Jacobi is slower than tridiagonalisation
/// followed by QL but it is simple, backward stable and gives small residuals
/// on the modest matrix sizes this crate works with.
pub fn eigh_jacobi(a: &Array2<Complex64>) -> Result<(Vec<f64>, Array2<Complex64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidInput(format!(
            "eigh requires a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if n == 0 {
        return Ok((vec![], Array2::from_elem((0, 0), ZERO)));
    }

    let scale = a.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let herm_err = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (a[(i, j)] - a[(j, i)].conj()).norm())
        .fold(0.0f64, f64::max);
    if herm_err > 1e-12 * scale.max(1.0) {
        return Err(Error::InvalidInput(format!(
            "matrix is not Hermitian: max |A - A^H| = {herm_err:.3e}"
        )));
    }

    let mut m = a.clone();
    // Symmetrise exactly so rounding in the input cannot bias the sweep.
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let mut v = Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        }
    });

    let off = |m: &Array2<Complex64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += m[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    };

    let tol = 1e-15 * scale.max(1e-300);
    for _sweep in 0..60 {
        if off(&m) <= tol * (n as f64) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let abs_apq = apq.norm();
                if abs_apq <= 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let phase = apq / abs_apq;
                let delta = (app - aqq) / (2.0 * abs_apq);
                let t = if delta == 0.0 {
                    1.0
                } else {
                    delta.signum() / (delta.abs() + (1.0 + delta * delta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // J = [[c, -s e^{i phi}], [s e^{-i phi}, c]] on the (p, q) plane;
                // A <- J^H A J, V <- V J.
                for r in 0..n {
                    let arp = m[(r, p)];
                    let arq = m[(r, q)];
                    m[(r, p)] = arp * c + arq * (s * phase.conj());
                    m[(r, q)] = -arp * (s * phase) + arq * c;
                }
                for r in 0..n {
                    let apr = m[(p, r)];
                    let aqr = m[(q, r)];
                    m[(p, r)] = apr * c + aqr * (s * phase);
                    m[(q, r)] = -apr * (s * phase.conj()) + aqr * c;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp * c + vrq * (s * phase.conj());
                    v[(r, q)] = -vrp * (s * phase) + vrq * c;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (m[(i, i)].re, i)).collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let eigenvalues: Vec<f64> = pairs.iter().map(|&(val, _)| val).collect();
    let vectors = Array2::from_shape_fn((n, n), |(r, k)| v[(r, pairs[k].1)]);
    Ok((eigenvalues, vectors))
}

/// Eigendecomposition of a real symmetric tridiagonal matrix by the implicit
/// QL method with Wilkinson shifts (EISPACK `tql2`).
///
/// `diag` holds the n diagonal entries, `offdiag` the n-1 subdiagonal ones.
/// Returns eigenvalues in ascending order and the eigenvector matrix with
/// eigenvectors as columns.
pub fn eigh_tridiagonal(diag: &[f64], offdiag: &[f64]) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((vec![], Array2::zeros((0, 0))));
    }
    if offdiag.len() + 1 != n {
        return Err(Error::InvalidInput(
            "offdiag must have len(diag) - 1 entries".into(),
        ));
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0f64; n];
    e[..n - 1].copy_from_slice(offdiag);
    let mut z = Array2::<f64>::eye(n);

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Find small subdiagonal element.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::Numerical(
                    "tridiagonal QL failed to converge".into(),
                ));
            }
            // Form implicit shift.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let sign_r = if g >= 0.0 { r } else { -r };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // Ascending sort with columns.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors = Array2::from_shape_fn((n, n), |(r, k)| z[(r, order[k])]);
    Ok((values, vectors))
}
