//! Closed-form entanglement-generation protocols: spin-independent
//! scattering of identical particles (bipartite and tripartite) and the
//! two-atom photon-detection protocol with ancillary photons.

use num_complex::Complex64;

use crate::qudit::PureState;
use crate::{invalid_argument, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Normalised forward/backward amplitudes of Coulomb scattering at lowest
/// order: `f_pm = (1 ± cos theta) / sqrt(2 (1 + cos^2 theta))`.
pub fn scatter_amplitudes(theta: f64) -> (f64, f64) {
    let c = theta.cos();
    let norm = (2.0 * (1.0 + c * c)).sqrt();
    ((1.0 + c) / norm, (1.0 - c) / norm)
}

fn h2(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Entropy of entanglement of the post-scattering spin state
/// `f_+|ud> - f_-|du>`: `S = -f_+^2 log2 f_+^2 - f_-^2 log2 f_-^2`.
pub fn scatter_entropy(theta: f64) -> f64 {
    let (fp, fm) = scatter_amplitudes(theta);
    h2(fp * fp) + h2(fm * fm)
}

/// Two-qubit spin state produced by the scattering event.
pub fn scatter_state(theta: f64) -> PureState {
    let (fp, fm) = scatter_amplitudes(theta);
    PureState::new(vec![ZERO, r(fp), r(-fm), ZERO], vec![2, 2]).expect("normalised by construction")
}

/// Spin-spin correlator `E(a, b) = -[a_z b_z + 2 f_+ f_- (a_x b_x + a_y b_y)]`
/// of the scattering state for unit vectors `a`, `b`.
pub fn bell_correlator(a: [f64; 3], b: [f64; 3], theta: f64) -> f64 {
    let (fp, fm) = scatter_amplitudes(theta);
    -(a[2] * b[2] + 2.0 * fp * fm * (a[0] * b[0] + a[1] * b[1]))
}

/// Bell combination `F(theta) = 5/4 - (3/2) f_+ f_-` for the fixed coplanar
/// triple of directions; classical correlations require `F >= 1`.
pub fn bell_f(theta: f64) -> f64 {
    let (fp, fm) = scatter_amplitudes(theta);
    1.25 - 1.5 * fp * fm
}

/// Scattering angle below which Bell violation disappears: the root of
/// `F(theta) = 1`, found by bisection on `(0, pi/2)`.
pub fn critical_angle() -> f64 {
    let g = |t: f64| bell_f(t) - 1.0;
    let (mut lo, mut hi) = (1e-9, std::f64::consts::FRAC_PI_2);
    debug_assert!(g(lo) > 0.0 && g(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Final state of spin-independent scattering of three identical `s = 1`
/// particles meeting at relative angles `2 pi / 3`: a superposition over the
/// six permutation channels with weights `f000` (no interaction), `f2` (the
/// three two-body swaps) and `f3` (the two cyclic channels). Spin labels
/// `{0, 1, -1}` map to levels `{0, 1, 2}`.
pub fn tripartite_scatter(
    f000: Complex64,
    f2: Complex64,
    f3: Complex64,
) -> Result<PureState> {
    let norm2 = f000.norm_sqr() + 3.0 * f2.norm_sqr() + 2.0 * f3.norm_sqr();
    if norm2 <= 0.0 {
        return invalid_argument("all channel weights vanish");
    }
    let mut amps = vec![ZERO; 27];
    let idx = |l1: usize, l2: usize, l3: usize| l1 * 9 + l2 * 3 + l3;
    // identity channel |0, 1, -1>
    amps[idx(0, 1, 2)] += f000;
    // two-body swaps
    amps[idx(1, 0, 2)] += f2;
    amps[idx(2, 1, 0)] += f2;
    amps[idx(0, 2, 1)] += f2;
    // cyclic three-body channels
    amps[idx(1, 2, 0)] += f3;
    amps[idx(2, 0, 1)] += f3;
    PureState::new_unnormalized(amps, vec![3, 3, 3]).map(|s| s.normalized())
}

/// Restriction of the three-qutrit state to two spin values by the
/// identification `bit_of_level[l]`: amplitudes of merged levels add
/// coherently and the result is renormalised. With `[0, 0, 1]` (levels 0 and
/// 1 identified) the two-body channel sector becomes the W state.
pub fn restrict_to_two_levels(psi: &PureState, bit_of_level: [usize; 3]) -> Result<PureState> {
    if psi.dims() != [3, 3, 3] {
        return invalid_argument("restriction expects a three-qutrit state");
    }
    if bit_of_level.iter().any(|&b| b > 1) {
        return invalid_argument("level map must take values 0 or 1");
    }
    let mut amps = vec![ZERO; 8];
    for (flat, &a) in psi.amps().iter().enumerate() {
        let l = [flat / 9, (flat / 3) % 3, flat % 3];
        let bits = [bit_of_level[l[0]], bit_of_level[l[1]], bit_of_level[l[2]]];
        amps[bits[0] * 4 + bits[1] * 2 + bits[2]] += a;
    }
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if norm <= 1e-300 {
        return invalid_argument("restriction annihilates the state");
    }
    PureState::new_unnormalized(amps, vec![2, 2, 2]).map(|s| s.normalized())
}

/// Two-atom state after symmetric detection of all photons:
/// `C_ij ∝ 1 - delta_ij` on two N-level (detector-label) systems.
pub fn two_atom_state(n: usize) -> Result<PureState> {
    if n < 2 {
        return invalid_argument("need at least two detectors");
    }
    let mut amps = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                amps[i * n + j] = r(1.0);
            }
        }
    }
    PureState::new_unnormalized(amps, vec![n, n]).map(|s| s.normalized())
}

/// Two-atom state after inserting the symmetric-mode attenuator with
/// survival probability `p`: coefficients `V_n^2 (N delta_1n - 1)` over the
/// orthonormal basis completing the uniform vector, i.e.
/// `C ∝ p(N-1) e_1 e_1^T - sum_{n >= 2} e_n e_n^T`. At `p = 1/(N-1)` the
/// state is maximally entangled (`log2 N` ebits); at `p = 1` it reduces to
/// [`two_atom_state`].
pub fn filtered_two_atom_state(n: usize, p: f64) -> Result<PureState> {
    if n < 2 {
        return invalid_argument("need at least two detectors");
    }
    if !(p > 0.0 && p <= 1.0) {
        return invalid_argument(format!("survival probability {p} outside (0, 1]"));
    }
    // Orthonormal basis with e_1 uniform; the rest via Gram-Schmidt over the
    // canonical vectors.
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    basis.push(vec![1.0 / (n as f64).sqrt(); n]);
    for k in 1..n {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        for b in &basis {
            let dot: f64 = b.iter().zip(&v).map(|(x, y)| x * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= dot * bi;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        basis.push(v);
    }
    let mut coeff = vec![0.0f64; n * n];
    for (bn, b) in basis.iter().enumerate() {
        let d = if bn == 0 { p * (n as f64 - 1.0) } else { -1.0 };
        for i in 0..n {
            for j in 0..n {
                coeff[i * n + j] += d * b[i] * b[j];
            }
        }
    }
    let amps: Vec<Complex64> = coeff.into_iter().map(r).collect();
    PureState::new_unnormalized(amps, vec![n, n]).map(|s| s.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cv::entropy;
    use crate::qudit::schmidt_finite;
    use crate::slocc::{classify_three_qubit_default, ThreeQubitClass};

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn amplitudes_normalised_and_limits() {
        let (fp, fm) = scatter_amplitudes(PI / 2.0);
        assert!((fp - 1.0 / 2f64.sqrt()).abs() < 1e-14);
        assert!((fm - 1.0 / 2f64.sqrt()).abs() < 1e-14);
        let (fp, fm) = scatter_amplitudes(1e-9);
        assert!((fp - 1.0).abs() < 1e-9 && fm < 1e-9);
        for k in 1..=100 {
            let t = PI / 2.0 * k as f64 / 100.0;
            let (fp, fm) = scatter_amplitudes(t);
            assert!((fp * fp + fm * fm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_monotone_and_maximal_at_right_angle() {
        assert!((scatter_entropy(PI / 2.0) - 1.0).abs() < 1e-12);
        assert!(scatter_entropy(1e-6) < 1e-4);
        let mut prev = 0.0;
        for k in 1..=60 {
            let t = PI / 2.0 * k as f64 / 60.0;
            let s = scatter_entropy(t);
            assert!(s >= prev - 1e-12, "entropy not monotone at theta={t}");
            prev = s;
        }
    }

    #[test]
    fn entropy_agrees_with_schmidt_of_explicit_state() {
        for t in [0.3, 0.9, 1.4] {
            let s = schmidt_finite(&scatter_state(t), &[0]).unwrap();
            assert!((entropy(&s.lambdas) - scatter_entropy(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_violation_threshold() {
        assert!((bell_f(PI / 4.0) - 1.0).abs() < 1e-12);
        assert!((bell_f(PI / 2.0) - 0.5).abs() < 1e-12);
        for t in [0.1, 0.4, PI / 4.0 - 1e-3] {
            assert!(bell_f(t) > 1.0, "no violation expected below pi/4");
        }
        assert!((critical_angle() - PI / 4.0).abs() < 1e-10);
    }

    #[test]
    fn bell_bound_for_fixed_coplanar_vectors() {
        // a, b, c coplanar at angles 0, pi/3, 2 pi/3 from a
        let a = [0.0, 0.0, 1.0];
        let b = [(PI / 3.0).sin(), 0.0, (PI / 3.0).cos()];
        let c = [(2.0 * PI / 3.0).sin(), 0.0, (2.0 * PI / 3.0).cos()];
        for t in [0.2, 0.7, 1.3] {
            let lhs = (bell_correlator(a, b, t) - bell_correlator(a, c, t)).abs();
            assert!((lhs - 1.0).abs() < 1e-12, "|E(a,b) - E(a,c)| = {lhs}");
            // and F = 1 + E(b, c)
            let f = 1.0 + bell_correlator(b, c, t);
            assert!((f - bell_f(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn tripartite_channel_structure() {
        let one = Complex64::new(1.0, 0.0);
        // only the identity channel: product state
        let prod = tripartite_scatter(one, ZERO, ZERO).unwrap();
        assert_eq!(
            prod.amps().iter().filter(|a| a.norm() > 1e-12).count(),
            1
        );
        // norm accounting |f000|^2 + 3 |f2|^2 + 2 |f3|^2
        let st = tripartite_scatter(one * 0.5, one * 0.3, one * 0.2).unwrap();
        assert!((st.norm() - 1.0).abs() < 1e-12);
        // two-body sector with spin values 1 and 0 identified is W class
        let w_sector = tripartite_scatter(ZERO, one, ZERO).unwrap();
        let restricted = restrict_to_two_levels(&w_sector, [0, 0, 1]).unwrap();
        assert_eq!(
            classify_three_qubit_default(&restricted).unwrap().class,
            ThreeQubitClass::W
        );
    }

    #[test]
    fn two_atom_entropies() {
        // N = 2: (|12> + |21>)/sqrt2 carries 1 ebit
        let s2 = schmidt_finite(&two_atom_state(2).unwrap(), &[0]).unwrap();
        assert!((entropy(&s2.lambdas) - 1.0).abs() < 1e-12);
        // N = 3 ebits value from the uniform three-detector state
        let s3 = schmidt_finite(&two_atom_state(3).unwrap(), &[0]).unwrap();
        let e3 = entropy(&s3.lambdas);
        assert!((e3 - 1.2516).abs() < 1e-3, "S(N=3) = {e3}");
        // spectrum of C proportional to (N-1, 1, ..., 1)
        let lam = &s3.lambdas;
        assert!((lam[0] / lam[1] - 4.0).abs() < 1e-10);
    }

    #[test]
    fn filtered_state_reaches_maximal_entropy() {
        for n in [3usize, 4] {
            let p = 1.0 / (n as f64 - 1.0);
            let st = filtered_two_atom_state(n, p).unwrap();
            let s = schmidt_finite(&st, &[0]).unwrap();
            assert!(
                (entropy(&s.lambdas) - (n as f64).log2()).abs() < 1e-10,
                "N={n}"
            );
        }
        // p = 1 reduces to the unfiltered state
        let raw = two_atom_state(4).unwrap();
        let filt = filtered_two_atom_state(4, 1.0).unwrap();
        assert!((raw.fidelity(&filt) - 1.0).abs() < 1e-12);
        assert!(filtered_two_atom_state(3, 0.0).is_err());
        assert!(filtered_two_atom_state(3, 1.5).is_err());
    }

    #[test]
    fn filtered_entropy_peaks_at_inverse_n_minus_one() {
        for n in [3usize, 4, 5] {
            let p_star = 1.0 / (n as f64 - 1.0);
            let at = |p: f64| {
                let st = filtered_two_atom_state(n, p).unwrap();
                entropy(&schmidt_finite(&st, &[0]).unwrap().lambdas)
            };
            let peak = at(p_star);
            for k in 1..=200 {
                let p = k as f64 / 200.0;
                assert!(at(p) <= peak + 1e-9, "N={n}, entropy above peak at p={p}");
            }
        }
    }
}
