//! Finite-dimensional quantum-information primitives: pure states, density
//! operators, partial trace/transpose, entanglement measures, the finite
//! Schmidt decomposition and majorization.
//!
//! Subsystem index convention, used across the crate: the leftmost ket symbol
//! is subsystem 0 and varies slowest (row-major flattening of the joint
//! index).

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numerics::{self, svd};
use crate::{invalid_argument, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A pure state over a tensor product of finite-dimensional subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
    dims: Vec<usize>,
}

/// Serialisation schema: `{dims: [...], amps: [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct PureStateJson {
    dims: Vec<usize>,
    amps: Vec<[f64; 2]>,
}

impl PureState {
    /// Normalised state from amplitudes in row-major subsystem order.
    pub fn new(amps: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let st = Self::new_unnormalized(amps, dims)?;
        let n = st.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "state is not normalised: |psi| = {n}"
            )));
        }
        Ok(st)
    }

    /// State that may carry an arbitrary nonzero norm.
    pub fn new_unnormalized(amps: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidInput("dims must be positive".into()));
        }
        let expected: usize = dims.iter().product();
        if amps.len() != expected {
            return Err(Error::InvalidInput(format!(
                "amplitude length {} does not match dims product {expected}",
                amps.len()
            )));
        }
        if !amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite amplitude".into()));
        }
        Ok(Self { amps, dims })
    }

    /// Computational basis state `|index>` of the given dims.
    pub fn basis_state(index: usize, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if index >= total {
            return invalid_argument(format!("basis index {index} out of range {total}"));
        }
        let mut amps = vec![ZERO; total];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(amps, dims)
    }

    /// n-qubit state from a slice of amplitudes (normalises).
    pub fn qubits(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len();
        if n == 0 || n & (n - 1) != 0 {
            return Err(Error::InvalidInput(
                "qubit state length must be a power of two".into(),
            ));
        }
        let qubits = n.trailing_zeros() as usize;
        Self::new_unnormalized(amps, vec![2; qubits]).map(|s| s.normalized())
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self {
            amps: self.amps.iter().map(|z| z / n).collect(),
            dims: self.dims.clone(),
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
    }

    /// `|<self|other>|^2 / (|self|^2 |other|^2)`; insensitive to global phase.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr() / (self.norm().powi(2) * other.norm().powi(2))
    }

    /// Tensor product with another state.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { amps, dims }
    }

    /// Density matrix `|psi><psi|` (normalises first).
    pub fn density_matrix(&self) -> DensityMatrix {
        let st = self.normalized();
        let n = st.amps.len();
        let mat = Array2::from_shape_fn((n, n), |(i, j)| st.amps[i] * st.amps[j].conj());
        DensityMatrix {
            mat,
            dims: st.dims.clone(),
        }
    }

    /// Coefficient matrix of the bipartition `block | rest` (row index
    /// enumerates the block subsystems in row-major order).
    pub fn coefficient_matrix(&self, block: &[usize]) -> Result<Array2<Complex64>> {
        let n_sub = self.dims.len();
        let mut in_block = vec![false; n_sub];
        for &b in block {
            if b >= n_sub {
                return invalid_argument(format!("subsystem {b} out of range"));
            }
            if in_block[b] {
                return invalid_argument(format!("subsystem {b} listed twice"));
            }
            in_block[b] = true;
        }
        if block.is_empty() || block.len() == n_sub {
            return invalid_argument("bipartition must be proper");
        }
        let rows: usize = (0..n_sub)
            .filter(|&i| in_block[i])
            .map(|i| self.dims[i])
            .product();
        let cols: usize = (0..n_sub)
            .filter(|&i| !in_block[i])
            .map(|i| self.dims[i])
            .product();
        let mut c = Array2::from_elem((rows, cols), ZERO);
        let mut idx = vec![0usize; n_sub];
        for (flat, amp) in self.amps.iter().enumerate() {
            let mut rem = flat;
            for k in (0..n_sub).rev() {
                idx[k] = rem % self.dims[k];
                rem /= self.dims[k];
            }
            let mut r = 0usize;
            let mut col = 0usize;
            for k in 0..n_sub {
                if in_block[k] {
                    r = r * self.dims[k] + idx[k];
                } else {
                    col = col * self.dims[k] + idx[k];
                }
            }
            c[(r, col)] = *amp;
        }
        Ok(c)
    }
}

impl Serialize for PureState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PureStateJson {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PureStateJson::deserialize(d)?;
        let amps = raw
            .amps
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        PureState::new_unnormalized(amps, raw.dims).map_err(serde::de::Error::custom)
    }
}

/// A density operator over a tensor product of subsystems: Hermitian,
/// unit-trace, positive within tolerance.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: Array2<Complex64>,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(mat: Array2<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::InvalidInput(format!(
                "matrix is {}x{}, dims product is {n}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let herm = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (mat[(i, j)] - mat[(j, i)].conj()).norm())
            .fold(0.0f64, f64::max);
        if herm > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "density matrix not Hermitian: {herm:.3e}"
            )));
        }
        let trace: Complex64 = (0..n).map(|i| mat[(i, i)]).fold(ZERO, |a, b| a + b);
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "density matrix trace is {trace}, want 1"
            )));
        }
        let eig = numerics::eigh(&mat)?;
        if let Some(&min) = eig
            .eigenvalues
            .iter()
            .min_by(|a, b| a.partial_cmp(b).unwrap())
        {
            if min < -1e-10 {
                return Err(Error::InvalidInput(format!(
                    "density matrix has negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(Self { mat, dims })
    }

    /// Builds without positivity/trace validation (for intermediate algebra).
    pub fn new_unchecked(mat: Array2<Complex64>, dims: Vec<usize>) -> Self {
        Self { mat, dims }
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.mat.nrows())
            .map(|i| self.mat[(i, i)])
            .fold(ZERO, |a, b| a + b)
    }

    /// Reduced operator over the kept subsystems (trace over the rest).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n_sub = self.dims.len();
        let mut keep_flags = vec![false; n_sub];
        for &k in keep {
            if k >= n_sub {
                return invalid_argument(format!("subsystem {k} out of range"));
            }
            keep_flags[k] = true;
        }
        if keep.is_empty() {
            return invalid_argument("must keep at least one subsystem");
        }
        let kept: Vec<usize> = (0..n_sub).filter(|&i| keep_flags[i]).collect();
        let traced: Vec<usize> = (0..n_sub).filter(|&i| !keep_flags[i]).collect();
        let dim_keep: usize = kept.iter().map(|&i| self.dims[i]).product();
        let dim_traced: usize = traced.iter().map(|&i| self.dims[i]).product();

        let encode = |kept_idx: usize, traced_idx: usize| -> usize {
            let mut idx = vec![0usize; n_sub];
            let mut rem = kept_idx;
            for &pos in kept.iter().rev() {
                idx[pos] = rem % self.dims[pos];
                rem /= self.dims[pos];
            }
            let mut rem = traced_idx;
            for &pos in traced.iter().rev() {
                idx[pos] = rem % self.dims[pos];
                rem /= self.dims[pos];
            }
            idx.iter()
                .zip(&self.dims)
                .fold(0usize, |acc, (&i, &d)| acc * d + i)
        };

        let mut out = Array2::from_elem((dim_keep, dim_keep), ZERO);
        for a in 0..dim_keep {
            for b in 0..dim_keep {
                let mut acc = ZERO;
                for t in 0..dim_traced {
                    acc += self.mat[(encode(a, t), encode(b, t))];
                }
                out[(a, b)] = acc;
            }
        }
        let new_dims: Vec<usize> = kept.iter().map(|&i| self.dims[i]).collect();
        Ok(DensityMatrix {
            mat: out,
            dims: new_dims,
        })
    }

    /// Transpose on the chosen subsystem; Hermiticity is preserved.
    pub fn partial_transpose(&self, subsystem: usize) -> Result<Array2<Complex64>> {
        let n_sub = self.dims.len();
        if subsystem >= n_sub {
            return invalid_argument(format!("subsystem {subsystem} out of range"));
        }
        let n = self.mat.nrows();
        let decode = |flat: usize| -> Vec<usize> {
            let mut idx = vec![0usize; n_sub];
            let mut rem = flat;
            for k in (0..n_sub).rev() {
                idx[k] = rem % self.dims[k];
                rem /= self.dims[k];
            }
            idx
        };
        let encode = |idx: &[usize]| -> usize {
            idx.iter()
                .zip(&self.dims)
                .fold(0usize, |acc, (&i, &d)| acc * d + i)
        };
        let mut out = Array2::from_elem((n, n), ZERO);
        for i in 0..n {
            let mut ii = decode(i);
            for j in 0..n {
                let mut jj = decode(j);
                std::mem::swap(&mut ii[subsystem], &mut jj[subsystem]);
                let v = self.mat[(encode(&ii), encode(&jj))];
                std::mem::swap(&mut ii[subsystem], &mut jj[subsystem]);
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    /// Eigenvalues of the partial transpose over `subsystem`, descending.
    pub fn ppt_spectrum(&self, subsystem: usize) -> Result<Vec<f64>> {
        let pt = self.partial_transpose(subsystem)?;
        Ok(numerics::eigh(&pt)?.eigenvalues)
    }

    /// Negativity `max(0, -2 lambda_min(PT))` across the cut isolating the
    /// given subsystem.
    pub fn negativity(&self, subsystem: usize) -> Result<f64> {
        let spec = self.ppt_spectrum(subsystem)?;
        let min = spec.last().copied().unwrap_or(0.0);
        Ok((-2.0 * min).max(0.0))
    }

    /// Von Neumann entropy `-sum l log2 l` over the spectrum, clipping
    /// slightly negative eigenvalues.
    pub fn vn_entropy(&self) -> Result<f64> {
        let eig = numerics::eigh(&self.mat)?;
        Ok(-eig
            .eigenvalues
            .iter()
            .map(|&l| {
                let l = l.max(0.0);
                if l > 0.0 {
                    l * l.log2()
                } else {
                    0.0
                }
            })
            .sum::<f64>())
    }
}

/// Negativity of a two-subsystem density matrix (transpose on the second
/// factor, the convention used throughout the channel modules).
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims().len() != 2 {
        return invalid_argument("negativity expects a bipartite density matrix");
    }
    rho.negativity(1)
}

/// Finite-dimensional Schmidt decomposition of a pure state across a
/// bipartition.
#[derive(Debug, Clone)]
pub struct FiniteSchmidt {
    /// Descending Schmidt weights (squared Schmidt coefficients).
    pub lambdas: Vec<f64>,
    /// Row i = coefficients of the i-th left Schmidt vector.
    pub modes_a: Array2<Complex64>,
    /// Row i = coefficients of the i-th right Schmidt vector.
    pub modes_b: Array2<Complex64>,
}

/// Schmidt decomposition across `block | rest` by the `M = C C^H`
/// eigendecomposition route (the SVD of `C` is the cross-check oracle in the
/// test suite).
pub fn schmidt_finite(psi: &PureState, block: &[usize]) -> Result<FiniteSchmidt> {
    let c = psi.coefficient_matrix(block)?;
    let rows = c.nrows();
    let cols = c.ncols();
    let mut m = Array2::from_elem((rows, rows), ZERO);
    for i in 0..rows {
        for j in 0..rows {
            let mut acc = ZERO;
            for n in 0..cols {
                acc += c[(i, n)] * c[(j, n)].conj();
            }
            m[(i, j)] = acc;
        }
    }
    let eig = numerics::eigh(&m)?;
    let lambda0 = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let keep = eig
        .eigenvalues
        .iter()
        .take_while(|&&l| l > 1e-14 * lambda0)
        .count()
        .max(1);
    let mut lambdas = Vec::with_capacity(keep);
    let mut modes_a = Array2::from_elem((keep, rows), ZERO);
    let mut modes_b = Array2::from_elem((keep, cols), ZERO);
    for i in 0..keep {
        let lam = eig.eigenvalues[i].max(0.0);
        lambdas.push(lam);
        for r in 0..rows {
            modes_a[(i, r)] = eig.eigenvectors[(r, i)];
        }
        let inv = 1.0 / lam.sqrt().max(1e-300);
        for n in 0..cols {
            let mut acc = ZERO;
            for r in 0..rows {
                acc += modes_a[(i, r)].conj() * c[(r, n)];
            }
            modes_b[(i, n)] = acc * inv;
        }
    }
    Ok(FiniteSchmidt {
        lambdas,
        modes_a,
        modes_b,
    })
}

/// Squared singular values of the bipartition coefficient matrix — the
/// independent SVD route to the Schmidt weights.
pub fn schmidt_weights_svd(psi: &PureState, block: &[usize]) -> Result<Vec<f64>> {
    let c = psi.coefficient_matrix(block)?;
    Ok(svd(&c)?
        .singular_values
        .iter()
        .map(|s| s * s)
        .collect())
}

/// `true` iff `x` is majorized by `y` (`x ≺ y`): partial sums of the
/// descending rearrangement of `x` never exceed those of `y`, with equal
/// totals, within `1e-12` slack.
pub fn majorizes(x: &[f64], y: &[f64]) -> bool {
    let slack = 1e-12;
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ys.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let n = xs.len().max(ys.len());
    xs.resize(n, 0.0);
    ys.resize(n, 0.0);
    let mut sx = 0.0;
    let mut sy = 0.0;
    for k in 0..n {
        sx += xs[k];
        sy += ys[k];
        if sx > sy + slack {
            return false;
        }
    }
    (sx - sy).abs() <= slack
}

/// `2^{|block|} x 2^{n - |block|}` coefficient matrix of an n-qubit state.
pub fn coefficient_matrix_partition(
    psi: &PureState,
    first_block: &[usize],
) -> Result<Array2<Complex64>> {
    if psi.dims().iter().any(|&d| d != 2) {
        return invalid_argument("coefficient_matrix_partition expects qubits");
    }
    psi.coefficient_matrix(first_block)
}

/// Common reference states.
pub mod states {
    use super::*;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Bell singlet `(|01> - |10>)/sqrt2`.
    pub fn bell_psi_minus() -> PureState {
        PureState::new(
            vec![ZERO, r(1.0 / 2f64.sqrt()), r(-1.0 / 2f64.sqrt()), ZERO],
            vec![2, 2],
        )
        .unwrap()
    }

    /// `(|00> + |11>)/sqrt2`.
    pub fn bell_phi_plus() -> PureState {
        PureState::new(
            vec![r(1.0 / 2f64.sqrt()), ZERO, ZERO, r(1.0 / 2f64.sqrt())],
            vec![2, 2],
        )
        .unwrap()
    }

    /// n-qubit GHZ state.
    pub fn ghz(n: usize) -> PureState {
        let len = 1usize << n;
        let mut amps = vec![ZERO; len];
        amps[0] = r(1.0 / 2f64.sqrt());
        amps[len - 1] = r(1.0 / 2f64.sqrt());
        PureState::new(amps, vec![2; n]).unwrap()
    }

    /// n-qubit W state.
    pub fn w(n: usize) -> PureState {
        let len = 1usize << n;
        let mut amps = vec![ZERO; len];
        let a = r(1.0 / (n as f64).sqrt());
        for k in 0..n {
            amps[1 << (n - 1 - k)] = a;
        }
        PureState::new(amps, vec![2; n]).unwrap()
    }

    /// Werner state with singlet fraction `F` (distillable iff `F > 1/2` in
    /// the rest frame).
    pub fn werner(f: f64) -> DensityMatrix {
        let a = (1.0 - f) / 3.0;
        let b = (2.0 * f + 1.0) / 6.0;
        let c = (1.0 - 4.0 * f) / 6.0;
        let mut m = Array2::from_elem((4, 4), ZERO);
        m[(0, 0)] = r(a);
        m[(3, 3)] = r(a);
        m[(1, 1)] = r(b);
        m[(2, 2)] = r(b);
        m[(1, 2)] = r(c);
        m[(2, 1)] = r(c);
        DensityMatrix::new_unchecked(m, vec![2, 2])
    }
}
