//! Vidal-form matrix-product-state decomposition and sequential quantum
//! cloning: isometry synthesis, protocol simulation and fidelity checks.
//!
//! A multiqubit state is factored site by site through iterated Schmidt cuts
//! into `Gamma[k]` tensors and bond vectors `lambda[k]` (`lambda` sits to the
//! right of its `Gamma`). The same Schmidt data, transposed, yields the
//! per-step ancilla-qubit isometries that generate the state sequentially;
//! specialising to the universal-cloning target states gives the cloning
//! machine.

use ndarray::Array2;
use num_complex::Complex64;
use serde_json::json;

use crate::numerics::svd;
use crate::qudit::PureState;
use crate::{invalid_argument, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Matrix product state in Vidal canonical form.
#[derive(Debug, Clone)]
pub struct Mps {
    /// `gammas[k][i]` is the `chi_{k-1} x chi_k` matrix for physical index
    /// `i` at site `k` (boundary bond dimensions are 1).
    gammas: Vec<[Array2<Complex64>; 2]>,
    /// `lambdas[k]` is the Schmidt vector on the bond between sites `k` and
    /// `k + 1`.
    lambdas: Vec<Vec<f64>>,
}

impl Mps {
    pub fn num_sites(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[[Array2<Complex64>; 2]] {
        &self.gammas
    }

    pub fn lambdas(&self) -> &[Vec<f64>] {
        &self.lambdas
    }

    /// Maximal bond dimension.
    pub fn chi(&self) -> usize {
        self.lambdas.iter().map(|l| l.len()).max().unwrap_or(1)
    }

    /// Schmidt vector of the cut after site `k` (0-based).
    pub fn bond(&self, k: usize) -> &[f64] {
        &self.lambdas[k]
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gammas: Vec<serde_json::Value> = self
            .gammas
            .iter()
            .map(|site| {
                let per_index: Vec<serde_json::Value> = site
                    .iter()
                    .map(|g| {
                        let rows: Vec<Vec<[f64; 2]>> = (0..g.nrows())
                            .map(|i| (0..g.ncols()).map(|j| [g[(i, j)].re, g[(i, j)].im]).collect())
                            .collect();
                        json!(rows)
                    })
                    .collect();
                json!(per_index)
            })
            .collect();
        json!({
            "gammas": gammas,
            "lambdas": self.lambdas,
            "chi": self.chi(),
        })
    }
}

/// Vidal decomposition of an n-qubit pure state by iterated Schmidt cuts
/// `1|2..n`, `12|3..n`, ...; Schmidt values below `tol * lambda_max` on each
/// bond are truncated.
pub fn vidal_decompose(psi: &PureState, tol: f64) -> Result<Mps> {
    if psi.dims().iter().any(|&d| d != 2) {
        return invalid_argument("vidal_decompose expects qubit subsystems");
    }
    let n = psi.num_subsystems();
    if n < 2 {
        return invalid_argument("need at least two qubits");
    }
    let amps = psi.normalized();
    let mut gammas: Vec<[Array2<Complex64>; 2]> = Vec::with_capacity(n);
    let mut lambdas: Vec<Vec<f64>> = Vec::with_capacity(n - 1);

    // `rest` holds the chi_{k-1} x 2^{n-k} remainder diag(lambda) V^H.
    let mut chi_prev = 1usize;
    let mut rest: Vec<Complex64> = amps.amps().to_vec();
    let mut prev_lambda: Vec<f64> = vec![1.0];

    for _site in 0..n - 1 {
        let cols = rest.len() / (chi_prev * 2);
        let mat = Array2::from_shape_fn((chi_prev * 2, cols), |(i, j)| rest[i * cols + j]);
        let dec = svd(&mat)?;
        let smax = dec.singular_values.first().copied().unwrap_or(0.0);
        let keep = dec
            .singular_values
            .iter()
            .take_while(|&&s| s > tol * smax)
            .count()
            .max(1);
        let mut g = [
            Array2::from_elem((chi_prev, keep), ZERO),
            Array2::from_elem((chi_prev, keep), ZERO),
        ];
        for alpha in 0..chi_prev {
            for (i, gm) in g.iter_mut().enumerate() {
                for beta in 0..keep {
                    gm[(alpha, beta)] = dec.u[(alpha * 2 + i, beta)] / prev_lambda[alpha];
                }
            }
        }
        gammas.push(g);
        let lam: Vec<f64> = dec.singular_values[..keep].to_vec();
        // rest <- diag(lambda) V^H restricted to kept rows
        let mut next = vec![ZERO; keep * cols];
        for k in 0..keep {
            for j in 0..cols {
                next[k * cols + j] = dec.vt[(k, j)] * lam[k];
            }
        }
        rest = next;
        chi_prev = keep;
        prev_lambda = lam.clone();
        lambdas.push(lam);
    }
    // last site: rest is chi x 2
    let mut g = [
        Array2::from_elem((chi_prev, 1), ZERO),
        Array2::from_elem((chi_prev, 1), ZERO),
    ];
    for alpha in 0..chi_prev {
        for (i, gm) in g.iter_mut().enumerate() {
            gm[(alpha, 0)] = rest[alpha * 2 + i] / prev_lambda[alpha];
        }
    }
    gammas.push(g);
    Ok(Mps { gammas, lambdas })
}

/// Contracts the Gamma/lambda chain back into a state vector; inverse of
/// [`vidal_decompose`] up to global phase.
pub fn mps_reconstruct(mps: &Mps) -> Result<PureState> {
    let n = mps.num_sites();
    // carry: (2^k) x chi_k coefficients
    let mut carry: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0)]];
    let mut chi = 1usize;
    for site in 0..n {
        let g = &mps.gammas[site];
        let chi_next = g[0].ncols();
        let lam: Option<&Vec<f64>> = mps.lambdas.get(site);
        let mut next: Vec<Vec<Complex64>> = Vec::with_capacity(carry.len() * 2);
        for row in &carry {
            for gm in g.iter() {
                let mut out = vec![ZERO; chi_next];
                for (beta, o) in out.iter_mut().enumerate() {
                    let mut acc = ZERO;
                    for alpha in 0..chi {
                        acc += row[alpha] * gm[(alpha, beta)];
                    }
                    if let Some(l) = lam {
                        acc *= l[beta];
                    }
                    *o = acc;
                }
                next.push(out);
            }
        }
        carry = next;
        chi = chi_next;
    }
    let amps: Vec<Complex64> = carry.into_iter().map(|row| row[0]).collect();
    PureState::new_unnormalized(amps, vec![2; n]).map(|s| s.normalized())
}

/// Completely symmetric n-qubit state with `n - j` subsystems in `u` and `j`
/// in `w`; `u` and `w` must be orthogonal for the result to be normalised.
fn symmetrized(n: usize, j: usize, u: [Complex64; 2], w: [Complex64; 2]) -> Vec<Complex64> {
    let size = 1usize << n;
    let mut out = vec![ZERO; size];
    for mask in 0..size {
        if (mask as u32).count_ones() as usize != j {
            continue;
        }
        // positions with a set bit carry w (bit n-1-t for position t)
        for (idx, slot) in out.iter_mut().enumerate() {
            let mut amp = Complex64::new(1.0, 0.0);
            for t in 0..n {
                let bit = (idx >> (n - 1 - t)) & 1;
                let vec2 = if (mask >> (n - 1 - t)) & 1 == 1 { w } else { u };
                amp *= vec2[bit];
            }
            *slot += amp;
        }
    }
    let norm = binom(n as i64, j as i64).sqrt();
    out.into_iter().map(|z| z / norm).collect()
}

fn binom(p: i64, q: i64) -> f64 {
    if q < 0 || q > p || p < 0 {
        return 0.0;
    }
    let mut acc = 1.0f64;
    for k in 0..q {
        acc = acc * ((p - k) as f64) / ((k + 1) as f64);
    }
    acc
}

/// Orthogonal companion conventions of the cloning targets: for
/// `psi = a|0> + b|1>`, `psi_perp = -b*|0> + a*|1>`, the anticlone state
/// `psi* = b*|0> + a*|1>` and its companion `(psi_perp)* = a|0> - b|1>`.
/// These phases make the target a linear image of `psi`, which the
/// sequential protocol requires.
pub fn companions(psi: [Complex64; 2]) -> ([Complex64; 2], [Complex64; 2], [Complex64; 2]) {
    let [a, b] = psi;
    let perp = [-b.conj(), a.conj()];
    let star = [b.conj(), a.conj()];
    let star_perp = [a, -b];
    (perp, star, star_perp)
}

/// Gisin-Massar universal-cloning target: `M` optimal clones of `psi` plus
/// `M - 1` anticlones on `2M - 1` qubits,
/// `sum_j alpha_j |(M-j) psi, j psi_perp>_S (x) |(M-j-1) psi*, j psi*_perp>_S`
/// with `alpha_j = sqrt(2(M-j)/(M(M+1)))`.
pub fn gm_target(psi: &PureState, m: usize) -> Result<PureState> {
    if psi.dims() != [2] {
        return invalid_argument("gm_target expects a single-qubit input state");
    }
    if m < 2 {
        return invalid_argument("need at least two clones");
    }
    let st = psi.normalized();
    let a = [st.amps()[0], st.amps()[1]];
    let (perp, star, star_perp) = companions(a);
    let n = 2 * m - 1;
    let mut out = vec![ZERO; 1 << n];
    for j in 0..m {
        let alpha = (2.0 * (m - j) as f64 / (m as f64 * (m as f64 + 1.0))).sqrt();
        let clones = symmetrized(m, j, a, perp);
        let anticlones = symmetrized(m - 1, j, star, star_perp);
        for (ci, cv) in clones.iter().enumerate() {
            if cv.norm_sqr() == 0.0 {
                continue;
            }
            for (ai, av) in anticlones.iter().enumerate() {
                out[(ci << (m - 1)) | ai] += alpha * cv * av;
            }
        }
    }
    PureState::new(out, vec![2; n])
}

/// Economical phase-covariant cloning target for equatorial states
/// `(|0> + e^{i phi}|1>)/sqrt2`: `(|(k+1)0, k1>_S + e^{i phi}|k0, (k+1)1>_S)/sqrt2`
/// on `M` qubits, `k = (M-1)/2`, `M` odd.
pub fn pcc_target(phi: f64, m: usize) -> Result<PureState> {
    if m < 3 || m % 2 == 0 {
        return invalid_argument("phase-covariant cloning needs an odd clone count >= 3");
    }
    let k = (m - 1) / 2;
    let zero = [r(1.0), ZERO];
    let one = [ZERO, r(1.0)];
    let first = symmetrized(m, k, zero, one);
    let second = symmetrized(m, k + 1, zero, one);
    let phase = Complex64::from_polar(1.0, phi);
    let amps: Vec<Complex64> = first
        .iter()
        .zip(&second)
        .map(|(f, s)| (f + phase * s) / 2f64.sqrt())
        .collect();
    PureState::new(amps, vec![2; m])
}

/// Cloning flavour realised by the sequential machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloningMode {
    /// Universal symmetric cloning (ancilla dimension `2M`).
    Universal,
    /// Economical phase-covariant cloning of equatorial states (`M` odd,
    /// ancilla dimension `M + 1`).
    PhaseCovariant,
}

/// Per-step isometries of the sequential cloning machine.
#[derive(Debug, Clone)]
pub struct IsometrySet {
    /// `v[k][i]` is the `D0 x D0` matrix applied at step `k + 1` for qubit
    /// outcome `i`, in the chain that clones `|0>`; the `|1>` chain is the
    /// bit-flipped `v[k][1 - i]`.
    v: Vec<[Array2<Complex64>; 2]>,
    d0: usize,
    m: usize,
    mode: CloningMode,
}

/// Normalisation coefficients `N_{i up, j down}` of the Schmidt vectors of
/// the symmetrized target states.
fn n_coef(i: i64, j: i64, weights: &[f64], m: i64) -> f64 {
    if i < 0 || j < 0 {
        return 0.0;
    }
    let denom = binom(i + j, i);
    if denom == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for k in j..m {
        let w = weights[k as usize];
        acc += w * w * binom(m - k, i) * binom(k, j) / binom(m, i + j);
    }
    acc / denom
}

fn c_coef(i: i64, j: i64, weights: &[f64], m: i64) -> f64 {
    n_coef(i, j, weights, m).sqrt()
}

/// Builds the per-step isometries for `1 -> M` sequential cloning from the
/// closed-form Vidal tensors of the target state.
pub fn universal_isometries(m: usize, mode: CloningMode) -> Result<IsometrySet> {
    if m < 2 {
        return invalid_argument("need at least two clones");
    }
    let (d0, weights): (usize, Vec<f64>) = match mode {
        CloningMode::Universal => {
            let alphas: Vec<f64> = (0..m)
                .map(|j| (2.0 * (m - j) as f64 / (m as f64 * (m as f64 + 1.0))).sqrt())
                .collect();
            (m, alphas)
        }
        CloningMode::PhaseCovariant => {
            if m % 2 == 0 || m < 3 {
                return invalid_argument("phase-covariant cloning needs odd M >= 3");
            }
            let k = ((m - 1) / 2) as i64;
            let gammas: Vec<f64> = (0..=k)
                .map(|j| {
                    (binom(k + 1, k + 1 - j) * binom(k, j) / binom(2 * k + 1, k + 1)).sqrt()
                })
                .collect();
            ((m + 1) / 2, gammas)
        }
    };
    let dm = d0 as i64;
    let steps = 2 * d0 - 1;
    let s2 = 1.0 / 2f64.sqrt();
    let mut v = Vec::with_capacity(steps);
    for step in 1..=steps {
        let mut v0 = Array2::from_elem((d0, d0), ZERO);
        let mut v1 = Array2::from_elem((d0, d0), ZERO);
        if step < d0 {
            let n = step as i64;
            for j in 1..=n {
                let base = c_coef(n - j, j - 1, &weights, dm);
                v0[((j - 1) as usize, (j - 1) as usize)] =
                    r(c_coef(n + 1 - j, j - 1, &weights, dm) / base);
                v1[(j as usize, (j - 1) as usize)] = r(c_coef(n - j, j, &weights, dm) / base);
            }
            for c in (step + 1)..=d0 {
                v0[(c - 1, c - 1)] = r(s2);
            }
            if step + 1 <= d0 {
                v1[(0, step)] = r(s2);
                for c in (step + 2)..=d0 {
                    v1[(c - 1, c - 1)] = r(s2);
                }
            }
        } else if step == d0 {
            for j in 1..=dm {
                let base = c_coef(dm - j, j - 1, &weights, dm);
                v0[((j - 1) as usize, (j - 1) as usize)] =
                    r(weights[(j - 1) as usize] / (base * binom(dm, j - 1).sqrt()));
                if j < dm {
                    v1[(j as usize, (j - 1) as usize)] =
                        r(weights[j as usize] / (base * binom(dm, j).sqrt()));
                }
            }
        } else {
            let jj = step - d0 - 1; // 0 .. d0 - 2
            let sz = d0 - jj;
            let denom = (d0 - 1 - jj) as f64;
            for i in 1..sz {
                v0[(i - 1, i)] = r((i as f64 / denom).sqrt());
                v1[(i - 1, i - 1)] = r(((sz - i) as f64 / denom).sqrt());
            }
            for c in (sz + 1)..=d0 {
                v0[(c - 1, c - 1)] = r(s2);
                v1[(c - 1, c - 1)] = r(s2);
            }
        }
        v.push([v0, v1]);
    }
    Ok(IsometrySet { v, d0, m, mode })
}

impl IsometrySet {
    pub fn num_steps(&self) -> usize {
        self.v.len()
    }

    pub fn d0(&self) -> usize {
        self.d0
    }

    /// Full-protocol (doubled) ancilla dimension: `2M` universal, `M + 1`
    /// phase covariant.
    pub fn ancilla_dimension(&self) -> usize {
        2 * self.d0
    }

    pub fn clones(&self) -> usize {
        self.m
    }

    pub fn mode(&self) -> CloningMode {
        self.mode
    }

    /// Step matrices `V_b[k]^i` of the chain that clones basis state `b`.
    pub fn step(&self, k: usize, branch: usize, i: usize) -> &Array2<Complex64> {
        // V_1[k]^i = V_0[k]^{1-i}
        let idx = if branch == 0 { i } else { 1 - i };
        &self.v[k][idx]
    }

    /// Maximal elementwise residual of `V0^H V0 + V1^H V1 - I` over all steps.
    pub fn isometry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for site in &self.v {
            for a in 0..self.d0 {
                for b in 0..self.d0 {
                    let mut acc = ZERO;
                    for krow in 0..self.d0 {
                        acc += site[0][(krow, a)].conj() * site[0][(krow, b)]
                            + site[1][(krow, a)].conj() * site[1][(krow, b)];
                    }
                    let want = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((acc - r(want)).norm());
                }
            }
        }
        worst
    }

    /// Runs one branch chain on the initial ancilla vector `e_1`, returning
    /// the joint (ancilla x qubits) array of shape `d0 x 2^steps`.
    pub fn run_branch(&self, branch: usize) -> Array2<Complex64> {
        let mut state = Array2::from_elem((self.d0, 1), ZERO);
        state[(0, 0)] = r(1.0);
        for k in 0..self.num_steps() {
            let width = state.ncols();
            let mut next = Array2::from_elem((self.d0, width * 2), ZERO);
            for i in 0..2usize {
                let vm = self.step(k, branch, i);
                for dnew in 0..self.d0 {
                    for w in 0..width {
                        let mut acc = ZERO;
                        for d in 0..self.d0 {
                            if vm[(dnew, d)] != ZERO {
                                acc += vm[(dnew, d)] * state[(d, w)];
                            }
                        }
                        // qubit k becomes the fastest-moving of previous bits
                        next[(dnew, w * 2 + i)] = acc;
                    }
                }
            }
            state = next;
        }
        // Reorder: during the loop, qubit k landed at the least significant
        // position, so bits are already ordered qubit1..qubitN (msb..lsb)?
        // Each new qubit was appended as the new least significant bit, so
        // index = i1 i2 ... iN with i1 most significant: yes, in order.
        state
    }

    pub fn to_json(&self) -> serde_json::Value {
        let steps: Vec<serde_json::Value> = self
            .v
            .iter()
            .map(|site| {
                let per: Vec<serde_json::Value> = site
                    .iter()
                    .map(|g| {
                        let rows: Vec<Vec<[f64; 2]>> = (0..g.nrows())
                            .map(|i| (0..g.ncols()).map(|j| [g[(i, j)].re, g[(i, j)].im]).collect())
                            .collect();
                        json!(rows)
                    })
                    .collect();
                json!(per)
            })
            .collect();
        json!({
            "d0": self.d0,
            "ancilla_dimension": self.ancilla_dimension(),
            "clones": self.m,
            "mode": match self.mode { CloningMode::Universal => "universal", CloningMode::PhaseCovariant => "phase_covariant" },
            "isometries_v0": steps,
        })
    }
}

/// Outcome of the deterministic sequential cloning protocol.
#[derive(Debug, Clone)]
pub struct CloneOutcome {
    /// Corrected output state (identical for both measurement branches).
    pub output: PureState,
    /// Post-measurement states after the conditional phase correction.
    pub branch_states: [PureState; 2],
    /// Measurement probabilities (1/2 each by construction).
    pub branch_probabilities: [f64; 2],
    /// Final ancilla states of the two basis chains.
    pub phi_f: [Vec<Complex64>; 2],
    /// Residual of the ancilla decoupling in the basis chains.
    pub decoupling_residual: f64,
    /// Worst per-step isometry residual.
    pub isometry_residual: f64,
}

/// Simulates the sequential cloning protocol on the doubled ancilla: encode
/// `psi` in the ancilla, run the block isometries, apply the generalized
/// Hadamard on the ancilla and resolve both measurement branches (the second
/// gets the `pi`-phase correction on every qubit).
pub fn sequential_clone(psi: &PureState, m: usize, mode: CloningMode) -> Result<CloneOutcome> {
    if psi.dims() != [2] {
        return invalid_argument("sequential_clone expects a single-qubit input");
    }
    let iso = universal_isometries(m, mode)?;
    let st = psi.normalized();
    let (alpha, beta) = (st.amps()[0], st.amps()[1]);
    let n = iso.num_steps();
    let dim_q = 1usize << n;

    // Basis chains and their target states.
    let chain0 = iso.run_branch(0);
    let chain1 = iso.run_branch(1);
    let targets: [PureState; 2] = match mode {
        CloningMode::Universal => [
            gm_target(&PureState::basis_state(0, vec![2])?, m)?,
            gm_target(&PureState::basis_state(1, vec![2])?, m)?,
        ],
        CloningMode::PhaseCovariant => {
            let k = (m - 1) / 2;
            let zero = [r(1.0), ZERO];
            let one = [ZERO, r(1.0)];
            let first = PureState::new(symmetrized(m, k, zero, one), vec![2; m])?;
            let second = PureState::new(symmetrized(m, k + 1, zero, one), vec![2; m])?;
            [first, second]
        }
    };

    // phi_F^{(b)} from projecting the chain on the target, plus the residual
    // of the claimed decoupling chain = phi_F (x) target.
    let mut phi_f = [vec![ZERO; iso.d0()], vec![ZERO; iso.d0()]];
    let mut residual = 0.0f64;
    for (b, chain) in [(0usize, &chain0), (1usize, &chain1)] {
        let tgt = targets[b].amps();
        for d in 0..iso.d0() {
            let mut acc = ZERO;
            for w in 0..dim_q {
                acc += chain[(d, w)] * tgt[w].conj();
            }
            phi_f[b][d] = acc;
        }
        for d in 0..iso.d0() {
            for w in 0..dim_q {
                residual = residual.max((chain[(d, w)] - phi_f[b][d] * tgt[w]).norm());
            }
        }
    }

    // Joint post-chain state: alpha |0>phiF0 (x) T0 + beta |1>phiF1 (x) T1.
    // The Hadamard maps u_b = |b> (x) phiF^b into (u_0 +/- u_1)/sqrt2, so the
    // two measurement outcomes project onto
    // (alpha T0 + beta T1)/sqrt2 and (alpha T0 - beta T1)/sqrt2.
    let mk_branch = |sign: f64| -> Result<(PureState, f64)> {
        let mut amps = vec![ZERO; dim_q];
        for (w, slot) in amps.iter_mut().enumerate() {
            *slot = (alpha * targets[0].amps()[w] + sign * beta * targets[1].amps()[w])
                / 2f64.sqrt();
        }
        let prob: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        let state = PureState::new_unnormalized(amps, vec![2; n])?.normalized();
        Ok((state, prob))
    };
    let (branch0, p0) = mk_branch(1.0)?;
    let (branch1_raw, p1) = mk_branch(-1.0)?;

    // pi-phase gate on every qubit: amplitude picks (-1)^{popcount}.
    let corrected1 = {
        let amps: Vec<Complex64> = branch1_raw
            .amps()
            .iter()
            .enumerate()
            .map(|(w, z)| {
                if (w as u32).count_ones() % 2 == 1 {
                    -z
                } else {
                    *z
                }
            })
            .collect();
        PureState::new_unnormalized(amps, vec![2; n])?.normalized()
    };

    Ok(CloneOutcome {
        output: branch0.clone(),
        branch_states: [branch0, corrected1],
        branch_probabilities: [p0, p1],
        phi_f,
        decoupling_residual: residual,
        isometry_residual: iso.isometry_residual(),
    })
}

/// Reduced single-clone fidelity `<psi| rho_k |psi>` for each of the first
/// `m` qubits of a cloning output.
pub fn clone_fidelities(output: &PureState, psi: &PureState, m: usize) -> Result<Vec<f64>> {
    let rho = output.density_matrix();
    let target = psi.normalized();
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let red = rho.partial_trace(&[k])?;
        let mut f = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                f += target.amps()[i].conj() * red.matrix()[(i, j)] * target.amps()[j];
            }
        }
        out.push(f.re);
    }
    Ok(out)
}

/// Reduced anticlone fidelity with respect to `psi*` for each of the last
/// `m - 1` qubits of a universal-cloning output.
pub fn anticlone_fidelities(output: &PureState, psi: &PureState, m: usize) -> Result<Vec<f64>> {
    let rho = output.density_matrix();
    let st = psi.normalized();
    let (_, star, _) = companions([st.amps()[0], st.amps()[1]]);
    let mut out = Vec::with_capacity(m - 1);
    for k in m..(2 * m - 1) {
        let red = rho.partial_trace(&[k])?;
        let mut f = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                f += star[i].conj() * red.matrix()[(i, j)] * star[j];
            }
        }
        out.push(f.re);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::states;

    #[test]
    fn product_state_has_trivial_bonds() {
        // |0101>
        let psi = PureState::basis_state(0b0101, vec![2; 4]).unwrap();
        let mps = vidal_decompose(&psi, 1e-12).unwrap();
        assert_eq!(mps.chi(), 1);
        for bond in mps.lambdas() {
            assert_eq!(bond.len(), 1);
            assert!((bond[0] - 1.0).abs() < 1e-12);
        }
        let back = mps_reconstruct(&mps).unwrap();
        assert!((psi.fidelity(&back) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_bonds_are_two_dimensional() {
        for n in [3usize, 5, 7] {
            let mps = vidal_decompose(&states::ghz(n), 1e-12).unwrap();
            assert_eq!(mps.chi(), 2, "GHZ_{n}");
            let inv_sqrt2 = 1.0 / 2f64.sqrt();
            for bond in mps.lambdas() {
                assert_eq!(bond.len(), 2);
                assert!((bond[0] - inv_sqrt2).abs() < 1e-12);
                assert!((bond[1] - inv_sqrt2).abs() < 1e-12);
            }
            let back = mps_reconstruct(&mps).unwrap();
            assert!((states::ghz(n).fidelity(&back) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn bond_weights_square_sum_to_one() {
        let psi = PureState::qubits(
            (0..32)
                .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
                .collect(),
        )
        .unwrap();
        let mps = vidal_decompose(&psi, 1e-12).unwrap();
        for bond in mps.lambdas() {
            let s: f64 = bond.iter().map(|l| l * l).sum();
            assert!((s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn gm_target_weights_match_closed_form() {
        // M = 2, psi = |0>: alpha = (sqrt(2/3), sqrt(1/3))
        let psi0 = PureState::basis_state(0, vec![2]).unwrap();
        let gm2 = gm_target(&psi0, 2).unwrap();
        assert!((gm2.norm() - 1.0).abs() < 1e-12);
        // first Schmidt cut of GM(0) for M = 3: (sqrt(N_up), sqrt(N_down))
        let gm3 = gm_target(&psi0, 3).unwrap();
        let mps = vidal_decompose(&gm3, 1e-12).unwrap();
        let a: Vec<f64> = (0..3)
            .map(|j| (2.0 * (3 - j) as f64 / 12.0).sqrt())
            .collect();
        let n_up = a[0] * a[0] + 2.0 * a[1] * a[1] / 3.0 + a[2] * a[2] / 3.0;
        let n_down = a[1] * a[1] / 3.0 + 2.0 * a[2] * a[2] / 3.0;
        let bond = mps.bond(0);
        assert_eq!(bond.len(), 2);
        assert!((bond[0] - n_up.sqrt()).abs() < 1e-10);
        assert!((bond[1] - n_down.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn gm_target_norm_and_linearity() {
        let psis = [
            [r(0.6), Complex64::new(0.48, 0.64)],
            [Complex64::new(0.28, -0.41), Complex64::new(0.81, 0.3)],
        ];
        for amp in psis {
            let n = (amp[0].norm_sqr() + amp[1].norm_sqr()).sqrt();
            let a = [amp[0] / n, amp[1] / n];
            let psi = PureState::new(vec![a[0], a[1]], vec![2]).unwrap();
            for m in 2..=5 {
                let gm = gm_target(&psi, m).unwrap();
                assert!((gm.norm() - 1.0).abs() < 1e-10, "norm at M={m}");
                // linearity: gm(psi) = a gm(|0>) + b gm(|1>)
                let g0 = gm_target(&PureState::basis_state(0, vec![2]).unwrap(), m).unwrap();
                let g1 = gm_target(&PureState::basis_state(1, vec![2]).unwrap(), m).unwrap();
                let mix: Vec<Complex64> = g0
                    .amps()
                    .iter()
                    .zip(g1.amps())
                    .map(|(x, y)| a[0] * x + a[1] * y)
                    .collect();
                let mix = PureState::new_unnormalized(mix, vec![2; 2 * m - 1]).unwrap();
                assert!(
                    (gm.fidelity(&mix) - 1.0).abs() < 1e-10,
                    "linearity at M={m}"
                );
            }
        }
    }

    #[test]
    fn gm_bond_rank_peaks_at_m() {
        // chi of gm_target(|0>, M) across the M | M-1 cut equals M, and no
        // cut exceeds it.
        let psi0 = PureState::basis_state(0, vec![2]).unwrap();
        for m in 2..=5 {
            let gm = gm_target(&psi0, m).unwrap();
            let mps = vidal_decompose(&gm, 1e-10).unwrap();
            assert_eq!(mps.bond(m - 1).len(), m, "M|M-1 cut at M={m}");
            assert_eq!(mps.chi(), m, "chi at M={m}");
        }
    }

    #[test]
    fn pcc_target_matches_symmetrizer_expansion() {
        // M=3, phi=0: (|001>+|010>+|100>)/sqrt6 + (|011>+|101>+|110>)/sqrt6
        let t = pcc_target(0.0, 3).unwrap();
        let s6 = 1.0 / 6f64.sqrt();
        let want = [
            (0b001usize, s6),
            (0b010, s6),
            (0b100, s6),
            (0b011, s6),
            (0b101, s6),
            (0b110, s6),
        ];
        for (idx, w) in want {
            assert!((t.amps()[idx] - r(w)).norm() < 1e-12, "amp {idx:b}");
        }
        assert!(t.amps()[0].norm() < 1e-15 && t.amps()[7].norm() < 1e-15);
        assert!((t.norm() - 1.0).abs() < 1e-12);
        // phi = pi flips the second branch
        let tpi = pcc_target(std::f64::consts::PI, 3).unwrap();
        assert!((tpi.amps()[0b011] + r(s6)).norm() < 1e-12);
    }

    #[test]
    fn isometry_condition_and_m3_closed_form() {
        for m in 2..=6 {
            let iso = universal_isometries(m, CloningMode::Universal).unwrap();
            assert!(
                iso.isometry_residual() < 1e-12,
                "residual at M={m}: {}",
                iso.isometry_residual()
            );
        }
        // M = 3 matrices, frozen from the worked 1 -> 3 example
        let iso = universal_isometries(3, CloningMode::Universal).unwrap();
        let a: Vec<f64> = (0..3)
            .map(|j| (2.0 * (3 - j) as f64 / 12.0).sqrt())
            .collect();
        let nu = a[0] * a[0] + 2.0 * a[1] * a[1] / 3.0 + a[2] * a[2] / 3.0;
        let nd = a[1] * a[1] / 3.0 + 2.0 * a[2] * a[2] / 3.0;
        let nuu = a[0] * a[0] + a[1] * a[1] / 3.0;
        let nud = a[1] * a[1] / 3.0 + a[2] * a[2] / 3.0;
        let ndd = a[2] * a[2] / 3.0;
        let n41d = a[0] * a[0] + a[1] * a[1] / 2.0;
        let n41u = a[1] * a[1] / 2.0 + a[2] * a[2];
        let s2 = 1.0 / 2f64.sqrt();
        let expect: Vec<[Vec<Vec<f64>>; 2]> = vec![
            [
                vec![
                    vec![nu.sqrt(), 0., 0.],
                    vec![0., s2, 0.],
                    vec![0., 0., s2],
                ],
                vec![
                    vec![0., s2, 0.],
                    vec![nd.sqrt(), 0., 0.],
                    vec![0., 0., s2],
                ],
            ],
            [
                vec![
                    vec![(nuu / nu).sqrt(), 0., 0.],
                    vec![0., (nud / nd).sqrt(), 0.],
                    vec![0., 0., s2],
                ],
                vec![
                    vec![0., 0., s2],
                    vec![(nud / nu).sqrt(), 0., 0.],
                    vec![0., (ndd / nd).sqrt(), 0.],
                ],
            ],
            [
                vec![
                    vec![a[0] / nuu.sqrt(), 0., 0.],
                    vec![0., a[1] / (3.0 * nud).sqrt(), 0.],
                    vec![0., 0., a[2] / (3.0 * ndd).sqrt()],
                ],
                vec![
                    vec![0., 0., 0.],
                    vec![a[1] / (3.0 * nuu).sqrt(), 0., 0.],
                    vec![0., a[2] / (3.0 * nud).sqrt(), 0.],
                ],
            ],
            [
                [
                    [0., s2, 0.],
                    [0., 0., 1.],
                    [0., 0., 0.],
                ]
                .iter()
                .map(|r| r.to_vec())
                .collect(),
                [
                    [1., 0., 0.],
                    [0., s2, 0.],
                    [0., 0., 0.],
                ]
                .iter()
                .map(|r| r.to_vec())
                .collect(),
            ],
            [
                [
                    [0., 1., 0.],
                    [0., 0., 0.],
                    [0., 0., s2],
                ]
                .iter()
                .map(|r| r.to_vec())
                .collect(),
                [
                    [1., 0., 0.],
                    [0., 0., 0.],
                    [0., 0., s2],
                ]
                .iter()
                .map(|r| r.to_vec())
                .collect(),
            ],
        ];
        assert!((n41d + n41u - 1.0).abs() < 1e-12); // sanity on the worked values
        for (k, site) in expect.iter().enumerate() {
            for i in 0..2usize {
                for row in 0..3 {
                    for col in 0..3 {
                        let got = iso.step(k, 0, i)[(row, col)];
                        let want = site[i][row][col];
                        assert!(
                            (got - r(want)).norm() < 1e-12,
                            "V0[{}]^{} ({row},{col}): got {got}, want {want}",
                            k + 1,
                            i
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn basis_chains_generate_targets_with_unit_ancilla() {
        for m in 2..=5 {
            let iso = universal_isometries(m, CloningMode::Universal).unwrap();
            let chain = iso.run_branch(0);
            let tgt = gm_target(&PureState::basis_state(0, vec![2]).unwrap(), m).unwrap();
            // phi_F = e_1 and perfect decoupling
            for d in 0..iso.d0() {
                for w in 0..tgt.amps().len() {
                    let want = if d == 0 { tgt.amps()[w] } else { ZERO };
                    assert!(
                        (chain[(d, w)] - want).norm() < 1e-12,
                        "M={m} chain mismatch at ({d},{w})"
                    );
                }
            }
        }
    }

    #[test]
    fn sequential_clone_reaches_targets_on_both_branches() {
        let psi = PureState::new(
            vec![
                Complex64::new(0.4, 0.3),
                Complex64::new(-0.5, 0.707_106_781_186_547_5),
            ],
            vec![2],
        )
        .unwrap()
        .normalized();
        for m in 2..=4 {
            let out = sequential_clone(&psi, m, CloningMode::Universal).unwrap();
            let target = gm_target(&psi, m).unwrap();
            for (b, st) in out.branch_states.iter().enumerate() {
                let f = st.fidelity(&target);
                assert!(f > 1.0 - 1e-10, "M={m} branch {b}: fidelity {f}");
            }
            assert!((out.branch_probabilities[0] - 0.5).abs() < 1e-10);
            assert!((out.branch_probabilities[1] - 0.5).abs() < 1e-10);
            assert!(out.decoupling_residual < 1e-10);
        }
    }

    #[test]
    fn clone_fidelity_matches_closed_form() {
        let psi = PureState::new(vec![Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6)], vec![2])
            .unwrap();
        for m in 2..=4 {
            let out = sequential_clone(&psi, m, CloningMode::Universal).unwrap();
            let want = (2.0 * m as f64 + 1.0) / (3.0 * m as f64);
            for (k, f) in clone_fidelities(&out.output, &psi, m).unwrap().iter().enumerate() {
                assert!(
                    (f - want).abs() < 1e-10,
                    "clone {k} of M={m}: fidelity {f}, want {want}"
                );
            }
        }
    }

    #[test]
    fn phase_covariant_clone_matches_target() {
        for m in [3usize, 5] {
            let iso = universal_isometries(m, CloningMode::PhaseCovariant).unwrap();
            assert_eq!(iso.ancilla_dimension(), m + 1);
            assert!(iso.isometry_residual() < 1e-12);
            for phi in [0.0, 0.7, std::f64::consts::PI] {
                let psi = PureState::new(
                    vec![r(1.0 / 2f64.sqrt()), Complex64::from_polar(1.0 / 2f64.sqrt(), phi)],
                    vec![2],
                )
                .unwrap();
                let out = sequential_clone(&psi, m, CloningMode::PhaseCovariant).unwrap();
                let tgt = pcc_target(phi, m).unwrap();
                for st in &out.branch_states {
                    assert!(
                        (st.fidelity(&tgt) - 1.0).abs() < 1e-10,
                        "M={m}, phi={phi}"
                    );
                }
            }
        }
    }

    #[test]
    fn mps_round_trip_on_pseudorandom_states() {
        // deterministic pseudo-random 7-qubit states
        let mut seed = 0x243f6a8885a308d3u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..3 {
            let amps: Vec<Complex64> = (0..128).map(|_| Complex64::new(next(), next())).collect();
            let psi = PureState::qubits(amps).unwrap();
            let mps = vidal_decompose(&psi, 1e-13).unwrap();
            let back = mps_reconstruct(&mps).unwrap();
            assert!((psi.fidelity(&back) - 1.0).abs() < 1e-10);
        }
    }
}
