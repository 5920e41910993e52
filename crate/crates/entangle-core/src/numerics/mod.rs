//! Numerical kernel: Hermite functions, quadrature rules and dense
//! decompositions used by every other module.

mod eigh;
mod special;

pub use eigh::{eigh_jacobi, eigh_tridiagonal};
pub use special::{erfcx, ln_factorial, phi_cut, phi_cut_dx, phi_cut_dxx};

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{invalid_argument, Error, Result};

/// Largest Hermite-function degree the normalised evaluation supports.
pub const MAX_HERMITE_DEGREE: usize = 200;

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence
/// `H_0 = 1`, `H_1 = 2x`, `H_{n+1} = 2x H_n - 2n H_{n-1}`.
///
/// Raw values grow like `2^n x^n`; for normalised Hermite functions use
/// [`orthonormal_hermite`], which never forms the raw polynomial.
pub fn hermite_eval(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0 * x,
        _ => {
            let mut hm = 1.0;
            let mut h = 2.0 * x;
            for k in 1..n {
                let next = 2.0 * x * h - 2.0 * (k as f64) * hm;
                hm = h;
                h = next;
            }
            h
        }
    }
}

/// Hermite-Gaussian orthonormal function
/// `O_n(x) = sqrt(beta) (sqrt(pi) 2^n n!)^{-1/2} H_n(beta x) e^{-(beta x)^2 / 2}`.
///
/// Evaluated with the normalised recurrence
/// `h_{n+1} = x sqrt(2/(n+1)) h_n - sqrt(n/(n+1)) h_{n-1}` so every
/// intermediate stays O(1) up to degree [`MAX_HERMITE_DEGREE`].
pub fn orthonormal_hermite(n: usize, beta: f64, x: f64) -> Result<f64> {
    if beta <= 0.0 {
        return invalid_argument(format!("basis width beta must be positive, got {beta}"));
    }
    if n > MAX_HERMITE_DEGREE {
        return invalid_argument(format!(
            "Hermite degree {n} exceeds supported maximum {MAX_HERMITE_DEGREE}"
        ));
    }
    let u = beta * x;
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * u * u).exp();
    let mut value = h0;
    if n >= 1 {
        let mut prev = h0;
        let mut cur = 2f64.sqrt() * u * h0;
        for k in 1..n {
            let kf = k as f64;
            let next = u * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
        value = cur;
    }
    Ok(beta.sqrt() * value)
}

/// Flavour of a quadrature rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadKind {
    /// Nodes and weights of the Gauss-Hermite rule with weight `e^{-x^2}`.
    GaussHermite,
    /// Composite Simpson rule on uniform panels of a finite interval.
    UniformPanel,
}

/// A one-dimensional quadrature rule: strictly increasing nodes with positive
/// weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: QuadKind,
    /// For Gauss-Hermite rules, `ln w_i` so the Gaussian weight can be
    /// unfolded without underflow at high order.
    log_weights: Option<Vec<f64>>,
}

impl QuadratureRule {
    /// Gauss-Hermite rule of order `k` (1 <= k <= 512), exact for
    /// `x^m e^{-x^2}` with `m <= 2k - 1`. Nodes and weights come from the
    /// Golub-Welsch eigenproblem of the Jacobi matrix.
    pub fn gauss_hermite(k: usize) -> Result<Self> {
        if k == 0 || k > 512 {
            return invalid_argument(format!("Gauss-Hermite order must be in 1..=512, got {k}"));
        }
        let diag = vec![0.0; k];
        let offdiag: Vec<f64> = (1..k).map(|j| (j as f64 / 2.0).sqrt()).collect();
        let (mut nodes, vectors) = eigh_tridiagonal(&diag, &offdiag)?;
        let ln_sqrt_pi = 0.5 * std::f64::consts::PI.ln();
        let mut log_weights: Vec<f64> = (0..k)
            .map(|i| ln_sqrt_pi + 2.0 * vectors[(0, i)].abs().max(f64::MIN_POSITIVE).ln())
            .collect();
        // The rule is symmetric about the origin; enforce that exactly so odd
        // integrands cancel pairwise.
        for i in 0..k / 2 {
            let j = k - 1 - i;
            let x = 0.5 * (nodes[j] - nodes[i]);
            nodes[i] = -x;
            nodes[j] = x;
            let lw = 0.5 * (log_weights[i] + log_weights[j]);
            log_weights[i] = lw;
            log_weights[j] = lw;
        }
        if k % 2 == 1 {
            nodes[k / 2] = 0.0;
        }
        let weights: Vec<f64> = log_weights
            .iter()
            .map(|lw| lw.exp().max(f64::MIN_POSITIVE))
            .collect();
        Ok(Self {
            nodes,
            weights,
            kind: QuadKind::GaussHermite,
            log_weights: Some(log_weights),
        })
    }

    /// Gauss-Hermite rule transformed for plain (weightless) integration of
    /// functions that decay at least like a Gaussian of width `scale` around
    /// `center`: nodes `center + scale * x_i`, weights `scale * w_i e^{x_i^2}`.
    pub fn gauss_hermite_unfolded(k: usize, center: f64, scale: f64) -> Result<Self> {
        if scale <= 0.0 || !scale.is_finite() {
            return invalid_argument(format!("scale must be positive, got {scale}"));
        }
        let base = Self::gauss_hermite(k)?;
        let log_w = base.log_weights.as_ref().expect("GH rule has log weights");
        let nodes: Vec<f64> = base.nodes.iter().map(|x| center + scale * x).collect();
        let weights: Vec<f64> = base
            .nodes
            .iter()
            .zip(log_w)
            .map(|(x, lw)| scale * (lw + x * x).exp())
            .collect();
        Ok(Self {
            nodes,
            weights,
            kind: QuadKind::GaussHermite,
            log_weights: None,
        })
    }

    /// Composite Simpson rule with `panels` uniform panels on `[lo, hi]`
    /// (2 * panels + 1 nodes).
    pub fn uniform_panel(lo: f64, hi: f64, panels: usize) -> Result<Self> {
        if !(lo < hi) {
            return invalid_argument(format!("need lo < hi, got [{lo}, {hi}]"));
        }
        if panels == 0 {
            return invalid_argument("uniform panel rule needs at least one panel");
        }
        let n = 2 * panels + 1;
        let h = (hi - lo) / ((n - 1) as f64);
        let nodes: Vec<f64> = (0..n).map(|i| lo + h * i as f64).collect();
        let weights: Vec<f64> = (0..n)
            .map(|i| {
                let c = if i == 0 || i == n - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * h / 3.0
            })
            .collect();
        Ok(Self {
            nodes,
            weights,
            kind: QuadKind::UniformPanel,
            log_weights: None,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> QuadKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_i w_i f(x_i)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// `sum_i w_i f(x_i)` for complex-valued integrands.
    pub fn integrate_complex<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(Complex64::new(0.0, 0.0), |acc, (&x, &w)| acc + f(x) * w)
    }
}

/// Result of a Hermitian eigendecomposition: descending eigenvalues and the
/// matching orthonormal eigenvectors as matrix columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Array2<Complex64>,
}

/// Eigendecomposition of a Hermitian matrix (rejects non-Hermitian input).
pub fn eigh(a: &Array2<Complex64>) -> Result<EigenDecomposition> {
    let (eigenvalues, eigenvectors) = eigh_jacobi(a)?;
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Result of a singular value decomposition `A = U diag(sigma) V^H` with
/// descending singular values.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: Array2<Complex64>,
    pub singular_values: Vec<f64>,
    pub vt: Array2<Complex64>,
}

impl SvdResult {
    /// Right singular vector `k` as a column vector.
    pub fn right_vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vt.ncols())
            .map(|j| self.vt[(k, j)].conj())
            .collect()
    }
}

/// Singular value decomposition of a complex matrix.
pub fn svd(a: &Array2<Complex64>) -> Result<SvdResult> {
    let (rows, cols) = (a.nrows(), a.ncols());
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput("svd of an empty matrix".into()));
    }
    let m = nalgebra::DMatrix::from_fn(rows, cols, |i, j| a[(i, j)]);
    let svd = m
        .try_svd(true, true, f64::EPSILON * 16.0, 1024)
        .ok_or_else(|| Error::Numerical("SVD iteration failed to converge".into()))?;
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| svd.singular_values[y]
        .partial_cmp(&svd.singular_values[x])
        .unwrap());
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u_sorted = Array2::from_shape_fn((rows, k), |(i, j)| u[(i, order[j])]);
    let vt_sorted = Array2::from_shape_fn((k, cols), |(i, j)| vt[(order[i], j)]);
    Ok(SvdResult {
        u: u_sorted,
        singular_values,
        vt: vt_sorted,
    })
}

/// Number of singular values above `tol * sigma_1` (0 for the zero matrix).
pub fn numerical_rank(a: &Array2<Complex64>, tol: f64) -> Result<usize> {
    if tol <= 0.0 {
        return invalid_argument(format!("rank tolerance must be positive, got {tol}"));
    }
    let s = svd(a)?.singular_values;
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(s.iter().filter(|&&x| x > tol * top).count())
}

/// Default relative rank tolerance used by classification routines.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_polynomials_match_closed_forms() {
        assert_eq!(hermite_eval(0, 3.7), 1.0);
        assert_eq!(hermite_eval(1, 2.0), 4.0);
        // H_3(x) = 8x^3 - 12x at x = 1
        assert!((hermite_eval(3, 1.0) + 4.0).abs() < 1e-14);
    }

    #[test]
    fn orthonormal_hermite_at_origin() {
        let v = orthonormal_hermite(0, 1.0, 0.0).unwrap();
        assert!((v - std::f64::consts::PI.powf(-0.25)).abs() < 1e-12);
        assert_eq!(orthonormal_hermite(1, 1.0, 0.0).unwrap(), 0.0);
        assert!(orthonormal_hermite(0, -1.0, 0.0).is_err());
        assert!(orthonormal_hermite(201, 1.0, 0.0).is_err());
    }

    #[test]
    fn orthonormal_hermite_large_degree_is_finite() {
        let v = orthonormal_hermite(200, 1.0, 15.0).unwrap();
        assert!(v.is_finite());
        assert!(v.abs() < 1.0);
    }

    #[test]
    fn gauss_hermite_classical_rules() {
        let r1 = QuadratureRule::gauss_hermite(1).unwrap();
        assert!((r1.nodes()[0]).abs() < 1e-14);
        assert!((r1.weights()[0] - std::f64::consts::PI.sqrt()).abs() < 1e-13);

        let r2 = QuadratureRule::gauss_hermite(2).unwrap();
        let inv_sqrt2 = 1.0 / 2f64.sqrt();
        assert!((r2.nodes()[0] + inv_sqrt2).abs() < 1e-13);
        assert!((r2.nodes()[1] - inv_sqrt2).abs() < 1e-13);
        for w in r2.weights() {
            assert!((w - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
        }
        // moment: int x^2 e^{-x^2} = sqrt(pi)/2
        let m2 = r2.integrate(|x| x * x);
        assert!((m2 - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
        assert!(QuadratureRule::gauss_hermite(0).is_err());
        assert!(QuadratureRule::gauss_hermite(513).is_err());
    }

    #[test]
    fn gauss_hermite_weight_sums_and_ordering() {
        for k in [5usize, 32, 64, 128] {
            let r = QuadratureRule::gauss_hermite(k).unwrap();
            let sum: f64 = r.weights().iter().sum();
            assert!(
                (sum - std::f64::consts::PI.sqrt()).abs() < 1e-12,
                "weight sum at k={k}: {sum}"
            );
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(r.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn gauss_hermite_exactness_at_high_degree() {
        // x^{2k-1} integrates to zero by parity; x^{2k-2} must be exact.
        let k = 20;
        let r = QuadratureRule::gauss_hermite(k).unwrap();
        let odd = r.integrate(|x| x.powi(2 * k as i32 - 1));
        let mass = r.integrate(|x| x.powi(2 * k as i32 - 1).abs());
        assert!(odd.abs() < 1e-12 * mass.max(1.0));
        // int x^38 e^{-x^2} = Gamma(39/2)... compare against recursive moment
        // m_{2j} = (2j-1)!!/2^j sqrt(pi)
        let mut exact = std::f64::consts::PI.sqrt();
        for j in 1..=(k - 1) {
            exact *= (2 * j - 1) as f64 / 2.0;
        }
        let got = r.integrate(|x| x.powi(2 * (k as i32 - 1)));
        assert!((got - exact).abs() < 1e-12 * exact.abs());
    }

    #[test]
    fn unfolded_rule_integrates_gaussians() {
        let r = QuadratureRule::gauss_hermite_unfolded(48, 3.0, 2.0).unwrap();
        // int e^{-(x-3)^2/4} dx = 2 sqrt(pi)
        let got = r.integrate(|x| (-(x - 3.0) * (x - 3.0) / 4.0).exp());
        assert!((got - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn simpson_panels_converge() {
        let r = QuadratureRule::uniform_panel(0.0, std::f64::consts::PI, 200).unwrap();
        let got = r.integrate(f64::sin);
        assert!((got - 2.0).abs() < 1e-10);
        assert!(QuadratureRule::uniform_panel(1.0, 0.0, 4).is_err());
    }

    #[test]
    fn svd_identity_and_outer_product() {
        let n = 4;
        let eye = Array2::from_shape_fn((n, n), |(i, j)| {
            Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        });
        let s = svd(&eye).unwrap();
        for v in &s.singular_values {
            assert!((v - 1.0).abs() < 1e-12);
        }
        // rank-1 outer product u v^H
        let u = [
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.3, 0.2),
            Complex64::new(0.0, 1.1),
        ];
        let v = [Complex64::new(0.4, -0.9), Complex64::new(2.0, 0.0)];
        let a = Array2::from_shape_fn((3, 2), |(i, j)| u[i] * v[j].conj());
        let s = svd(&a).unwrap();
        let nu: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((s.singular_values[0] - nu * nv).abs() < 1e-12);
        assert!(s.singular_values[1].abs() < 1e-12);
    }

    #[test]
    fn rank_of_zero_and_identity() {
        let z = Array2::from_elem((3, 3), Complex64::new(0.0, 0.0));
        assert_eq!(numerical_rank(&z, 1e-8).unwrap(), 0);
        let eye = Array2::from_shape_fn((4, 4), |(i, j)| {
            Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        });
        assert_eq!(numerical_rank(&eye, 1e-8).unwrap(), 4);
        assert!(numerical_rank(&eye, 0.0).is_err());
    }

    #[test]
    fn rank_sees_through_small_noise() {
        // u v^H plus noise far below the relative tolerance stays rank 1
        let u = [0.8, -0.4, 1.3];
        let v = [0.5, 2.0];
        let a = Array2::from_shape_fn((3, 2), |(i, j)| {
            let noise = 1e-12 * ((i * 2 + j) as f64).sin();
            Complex64::new(u[i] * v[j] + noise, 0.0)
        });
        assert_eq!(numerical_rank(&a, 1e-8).unwrap(), 1);
    }
}
