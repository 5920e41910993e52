//! Continuous-variable Schmidt decomposition by expansion in discrete sets of
//! orthonormal functions.
//!
//! A bipartite amplitude `f(p, q)` is projected on a truncated
//! Hermite-Gaussian product basis, `C_mn = <O_m O_n, f>`; diagonalising
//! `M = C C^H` yields the Schmidt weights and both families of modes. Two
//! truncation-error metrics and the usual entanglement measures operate on
//! the result.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{ser::SerializeSeq, Serialize, Serializer};

use crate::amplitudes::BipartiteAmplitude;
use crate::numerics::{self, orthonormal_hermite, QuadratureRule, MAX_HERMITE_DEGREE};
use crate::{invalid_argument, Error, Result};

/// Relative weight below which Schmidt modes are discarded (they cannot be
/// normalised reliably).
pub const LAMBDA_DROP_TOL: f64 = 1e-14;

/// A denumerable Hermite-Gaussian orthonormal family
/// `O_n(x) = sqrt(beta) (sqrt(pi) 2^n n!)^{-1/2} H_n(beta (x - c)) e^{-(beta (x-c))^2/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    beta: f64,
    center: f64,
}

impl OrthonormalBasis {
    /// Family centred at the origin with width parameter `beta`.
    pub fn new(beta: f64) -> Result<Self> {
        Self::with_center(beta, 0.0)
    }

    /// Family recentred at `center`.
    pub fn with_center(beta: f64, center: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return invalid_argument(format!("basis width must be positive, got {beta}"));
        }
        Ok(Self { beta, center })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// `O_n(x)`.
    pub fn eval(&self, n: usize, x: f64) -> Result<f64> {
        orthonormal_hermite(n, self.beta, x - self.center)
    }
}

impl Serialize for OrthonormalBasis {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("OrthonormalBasis", 3)?;
        st.serialize_field("family", "hermite_gaussian")?;
        st.serialize_field("beta", &self.beta)?;
        st.serialize_field("center", &self.center)?;
        st.end()
    }
}

/// Truncated coefficient matrix of an amplitude in a product basis.
#[derive(Debug, Clone)]
pub struct CoefficientMatrix {
    entries: Array2<Complex64>,
    basis1: OrthonormalBasis,
    basis2: OrthonormalBasis,
    norm2: f64,
}

impl CoefficientMatrix {
    /// `(m0 + 1) x (n0 + 1)` matrix entries, row index on side 1.
    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn m0(&self) -> usize {
        self.entries.nrows() - 1
    }

    pub fn n0(&self) -> usize {
        self.entries.ncols() - 1
    }

    pub fn basis1(&self) -> &OrthonormalBasis {
        &self.basis1
    }

    pub fn basis2(&self) -> &OrthonormalBasis {
        &self.basis2
    }

    /// Squared norm of the underlying amplitude.
    pub fn norm2(&self) -> f64 {
        self.norm2
    }

    /// `sum |C_mn|^2`, bounded by `||f||^2` (Parseval).
    pub fn frobenius2(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Builds a coefficient matrix from explicit entries (used by the
    /// analytic delta shortcut and by tests).
    pub fn from_entries(
        entries: Array2<Complex64>,
        basis1: OrthonormalBasis,
        basis2: OrthonormalBasis,
        norm2: f64,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("empty coefficient matrix".into()));
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Numerical("non-finite coefficient entries".into()));
        }
        Ok(Self {
            entries,
            basis1,
            basis2,
            norm2,
        })
    }
}

/// `C_mn = int O_m*(p) O_n*(q) f(p, q) dp dq` by tensor-product quadrature,
/// for a generic amplitude callable with known squared norm.
pub fn coefficient_matrix_fn<F>(
    f: F,
    norm2: f64,
    basis1: &OrthonormalBasis,
    basis2: &OrthonormalBasis,
    m0: usize,
    n0: usize,
    quad: &QuadratureRule,
) -> Result<CoefficientMatrix>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    if m0 > MAX_HERMITE_DEGREE || n0 > MAX_HERMITE_DEGREE {
        return invalid_argument(format!(
            "cutoffs ({m0}, {n0}) exceed the supported degree {MAX_HERMITE_DEGREE}"
        ));
    }
    if quad.len() < 2 * m0.max(n0) {
        return invalid_argument(format!(
            "quadrature order {} too low for cutoffs ({m0}, {n0})",
            quad.len()
        ));
    }
    let nodes = quad.nodes();
    let n_nodes = nodes.len();

    // Weighted basis tables: B[m][i] = w_i O_m(x_i).
    let table = |basis: &OrthonormalBasis, count: usize| -> Result<Array2<f64>> {
        let mut b = Array2::zeros((count + 1, n_nodes));
        for m in 0..=count {
            for (i, (&x, &w)) in nodes.iter().zip(quad.weights()).enumerate() {
                b[(m, i)] = w * basis.eval(m, x)?;
            }
        }
        Ok(b)
    };
    let b1 = table(basis1, m0)?;
    let b2 = table(basis2, n0)?;

    // Amplitude grid, evaluated in parallel over p-rows.
    let grid: Vec<Vec<Complex64>> = crate::par::map_indexed(n_nodes, |i| {
        let p = nodes[i];
        nodes.iter().map(|&q| f(p, q)).collect()
    });
    for row in &grid {
        for z in row {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Numerical(
                    "amplitude returned a non-finite sample".into(),
                ));
            }
        }
    }

    // C = B1 * F * B2^T, computed as (B1 * F) then * B2^T, rows in parallel.
    let inner: Vec<Vec<Complex64>> = crate::par::map_indexed(m0 + 1, |m| {
        let mut row = vec![Complex64::new(0.0, 0.0); n_nodes];
        for (i, g_row) in grid.iter().enumerate() {
            let w = b1[(m, i)];
            if w == 0.0 {
                continue;
            }
            for (j, val) in g_row.iter().enumerate() {
                row[j] += val * w;
            }
        }
        row
    });
    let mut entries = Array2::from_elem((m0 + 1, n0 + 1), Complex64::new(0.0, 0.0));
    let c_rows: Vec<Vec<Complex64>> = crate::par::map_indexed(m0 + 1, |m| {
        (0..=n0)
            .map(|n| {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n_nodes {
                    acc += inner[m][j] * b2[(n, j)];
                }
                acc
            })
            .collect()
    });
    for (m, row) in c_rows.into_iter().enumerate() {
        for (n, v) in row.into_iter().enumerate() {
            entries[(m, n)] = v;
        }
    }
    CoefficientMatrix::from_entries(entries, basis1.clone(), basis2.clone(), norm2)
}

/// Coefficient matrix of a cataloged amplitude (complex conjugation of the
/// basis functions is a no-op for the real Hermite-Gaussian family).
pub fn coefficient_matrix(
    amp: &BipartiteAmplitude,
    basis1: &OrthonormalBasis,
    basis2: &OrthonormalBasis,
    m0: usize,
    n0: usize,
    quad: &QuadratureRule,
) -> Result<CoefficientMatrix> {
    coefficient_matrix_fn(
        |p, q| amp.eval(p, q),
        amp.norm2(),
        basis1,
        basis2,
        m0,
        n0,
        quad,
    )
}

/// Analytic coefficient matrix of the Dirac delta `delta(p - q)` on a real
/// orthonormal family: exactly the identity (resolution of the identity), no
/// quadrature involved.
pub fn delta_coefficients(basis: &OrthonormalBasis, n: usize) -> Result<CoefficientMatrix> {
    if n > MAX_HERMITE_DEGREE {
        return invalid_argument(format!("cutoff {n} exceeds {MAX_HERMITE_DEGREE}"));
    }
    let entries = Array2::from_shape_fn((n + 1, n + 1), |(i, j)| {
        Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
    });
    CoefficientMatrix::from_entries(entries, basis.clone(), basis.clone(), f64::INFINITY)
}

/// Entropy of the delta state truncated to its first `n` equal Schmidt terms:
/// `log2 n` ebits, exact.
pub fn truncated_delta_entropy(n: u64) -> Result<f64> {
    if n == 0 {
        return invalid_argument("need at least one retained term");
    }
    Ok((n as f64).log2())
}

/// Schmidt decomposition of a truncated coefficient matrix.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    lambdas: Vec<f64>,
    mode_a1: Array2<Complex64>,
    mode_a2: Array2<Complex64>,
    basis1: OrthonormalBasis,
    basis2: OrthonormalBasis,
    norm2: f64,
}

/// Which subsystem a mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    One,
    Two,
}

impl SchmidtDecomposition {
    /// Descending non-negative Schmidt weights.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Row `i` holds the coefficients of mode `psi^(1)_i` in basis 1.
    pub fn mode_a1(&self) -> &Array2<Complex64> {
        &self.mode_a1
    }

    /// Row `i` holds the coefficients of mode `psi^(2)_i` in basis 2.
    pub fn mode_a2(&self) -> &Array2<Complex64> {
        &self.mode_a2
    }

    pub fn basis(&self, side: Side) -> &OrthonormalBasis {
        match side {
            Side::One => &self.basis1,
            Side::Two => &self.basis2,
        }
    }

    pub fn norm2(&self) -> f64 {
        self.norm2
    }

    /// Number of retained modes.
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// `psi^(side)_i(x) = sum_n A_in O_n(x)`.
    pub fn evaluate_mode(&self, side: Side, i: usize, x: f64) -> Result<Complex64> {
        let (coeffs, basis) = match side {
            Side::One => (&self.mode_a1, &self.basis1),
            Side::Two => (&self.mode_a2, &self.basis2),
        };
        if i >= coeffs.nrows() {
            return invalid_argument(format!(
                "mode index {i} out of range ({} retained)",
                coeffs.nrows()
            ));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..coeffs.ncols() {
            acc += coeffs[(i, n)] * basis.eval(n, x)?;
        }
        Ok(acc)
    }

    /// Truncated reconstruction `sum_i sqrt(lambda_i) psi1_i(p) psi2_i(q)`.
    pub fn reconstruct(&self, p: f64, q: f64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.len() {
            acc += self.lambdas[i].sqrt()
                * self.evaluate_mode(Side::One, i, p)?
                * self.evaluate_mode(Side::Two, i, q)?;
        }
        Ok(acc)
    }
}

impl Serialize for SchmidtDecomposition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        fn rows(m: &Array2<Complex64>) -> Vec<Vec<[f64; 2]>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect()
        }
        let mut st = s.serialize_struct("SchmidtDecomposition", 5)?;
        st.serialize_field("lambdas", &self.lambdas)?;
        st.serialize_field("modeA1", &rows(&self.mode_a1))?;
        st.serialize_field("modeA2", &rows(&self.mode_a2))?;
        st.serialize_field("basis", &self.basis1)?;
        st.serialize_field("basis2", &self.basis2)?;
        st.end()
    }
}

/// Diagonalises `M = C C^H` and assembles both mode families.
///
/// Modes with `lambda_i < LAMBDA_DROP_TOL * lambda_0` are dropped before the
/// division by `sqrt(lambda_i)`. The phase of each retained mode pair is fixed
/// by making the first non-negligible coefficient of `psi^(1)_i` real
/// positive.
pub fn decompose(c: &CoefficientMatrix) -> Result<SchmidtDecomposition> {
    let entries = &c.entries;
    let frob2 = c.frobenius2();
    if frob2 == 0.0 {
        return Err(Error::InvalidInput(
            "all-zero coefficient matrix has no Schmidt decomposition".into(),
        ));
    }
    let rows = entries.nrows();
    let cols = entries.ncols();
    // M = C C^H (rows x rows, Hermitian)
    let mut m = Array2::from_elem((rows, rows), Complex64::new(0.0, 0.0));
    for i in 0..rows {
        for j in 0..rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..cols {
                acc += entries[(i, n)] * entries[(j, n)].conj();
            }
            m[(i, j)] = acc;
        }
    }
    let eig = numerics::eigh(&m)?;
    let lambda0 = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let keep: usize = eig
        .eigenvalues
        .iter()
        .take_while(|&&l| l > LAMBDA_DROP_TOL * lambda0)
        .count();
    if keep == 0 {
        return Err(Error::Numerical("no Schmidt weight above drop tolerance".into()));
    }

    let mut lambdas = Vec::with_capacity(keep);
    let mut a1 = Array2::from_elem((keep, rows), Complex64::new(0.0, 0.0));
    let mut a2 = Array2::from_elem((keep, cols), Complex64::new(0.0, 0.0));
    for i in 0..keep {
        let lam = eig.eigenvalues[i].max(0.0);
        lambdas.push(lam);
        // mode row = i-th eigenvector (column i of the eigenvector matrix)
        let mut row: Vec<Complex64> = (0..rows).map(|r| eig.eigenvectors[(r, i)]).collect();
        let max_mag = row.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if let Some(first) = row.iter().find(|z| z.norm() > 1e-8 * max_mag) {
            let phase = first / first.norm();
            let fix = phase.conj();
            for z in row.iter_mut() {
                *z *= fix;
            }
        }
        for (r, z) in row.iter().enumerate() {
            a1[(i, r)] = *z;
        }
        // psi2 row = lambda^{-1/2} conj(A1 row) . C
        let inv_sqrt = 1.0 / lam.sqrt();
        for n in 0..cols {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..rows {
                acc += row[r].conj() * entries[(r, n)];
            }
            a2[(i, n)] = acc * inv_sqrt;
        }
    }
    Ok(SchmidtDecomposition {
        lambdas,
        mode_a1: a1,
        mode_a2: a2,
        basis1: c.basis1.clone(),
        basis2: c.basis2.clone(),
        norm2: c.norm2,
    })
}

/// Truncation error `d^2 = 1 - sum(lambda) / ||f||^2` (weight-deficit form).
pub fn error_d2(norm2: f64, lambdas: &[f64]) -> f64 {
    1.0 - lambdas.iter().sum::<f64>() / norm2
}

/// Truncation error `d^1 = ||f - sum sqrt(lambda) psi1 psi2||^2 / ||f||^2`
/// (direct mean-square distance).
///
/// Expanded as `1 - 2 Re<rec, f>/||f||^2 + sum(lambda)/||f||^2` so the
/// amplitude norm enters through its accurate variant-specific value while
/// the cross term — whose integrand decays with the basis envelope — is
/// evaluated on the supplied rule. Pass a finer rule than the one used for
/// the coefficients to obtain an independent check.
pub fn error_d1(
    amp: &BipartiteAmplitude,
    d: &SchmidtDecomposition,
    quad: &QuadratureRule,
) -> Result<f64> {
    let nodes = quad.nodes();
    let weights = quad.weights();
    let k = d.len();
    // Tabulate mode values on the grid.
    let m1: Vec<Vec<Complex64>> = (0..k)
        .map(|i| {
            nodes
                .iter()
                .map(|&x| d.evaluate_mode(Side::One, i, x))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let m2: Vec<Vec<Complex64>> = (0..k)
        .map(|i| {
            nodes
                .iter()
                .map(|&x| d.evaluate_mode(Side::Two, i, x))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let sqrt_l: Vec<f64> = d.lambdas.iter().map(|l| l.sqrt()).collect();
    let cross_rows = crate::par::map_indexed(nodes.len(), |i| {
        let p = nodes[i];
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &q) in nodes.iter().enumerate() {
            let mut rec = Complex64::new(0.0, 0.0);
            for t in 0..k {
                rec += sqrt_l[t] * m1[t][i] * m2[t][j];
            }
            acc += rec.conj() * amp.eval(p, q) * weights[j];
        }
        acc * weights[i]
    });
    let cross: Complex64 = cross_rows
        .into_iter()
        .fold(Complex64::new(0.0, 0.0), |a, b| a + b);
    let norm2 = amp.norm2();
    let sum_l: f64 = d.lambdas.iter().sum();
    Ok(1.0 - 2.0 * cross.re / norm2 + sum_l / norm2)
}

/// Entropy of entanglement `-sum l log2 l` of the normalised weight vector.
/// Weights are renormalised to unit sum first; `0 log 0 := 0`.
pub fn entropy(lambdas: &[f64]) -> f64 {
    let total: f64 = lambdas.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    -lambdas
        .iter()
        .map(|&l| {
            let p = (l / total).max(0.0);
            if p > 0.0 {
                p * p.log2()
            } else {
                0.0
            }
        })
        .sum::<f64>()
}

/// Schmidt / Slater number `K = 1 / sum(l^2)` of the normalised weights: the
/// effective number of terms in the decomposition.
pub fn schmidt_number(lambdas: &[f64]) -> f64 {
    let total: f64 = lambdas.iter().sum();
    if total <= 0.0 {
        return 1.0;
    }
    let s2: f64 = lambdas.iter().map(|&l| (l / total) * (l / total)).sum();
    1.0 / s2
}

/// Serialisable weight vector helper for CLI output.
pub fn serialize_lambdas<S: Serializer>(
    lambdas: &[f64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(lambdas.len()))?;
    for l in lambdas {
        seq.serialize_element(l)?;
    }
    seq.end()
}
