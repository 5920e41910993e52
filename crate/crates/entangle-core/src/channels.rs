//! Relativistic and decoherence entanglement channels in closed form:
//! momentum-conditioned Wigner-rotation blocks and boosted Werner states,
//! spin-momentum correlation transfer, the magnetic-barrier and
//! optically-active-medium channels, and the no-signalling check.
//!
//! All quantities are dimensionless with respect to a global arbitrary
//! energy scale.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numerics::QuadratureRule;
use crate::qudit::DensityMatrix;
use crate::{invalid_argument, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Spin label along the quantisation axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

/// Boost of a Gaussian wave packet: width over mass and rapidity.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoostParams {
    /// `w / 2m`; the leading-order reduction requires `w << m`.
    pub w_over_2m: f64,
    /// Rapidity `alpha`, `cosh(alpha) = gamma`.
    pub alpha: f64,
}

/// `n'_z = 1 - (w/2m tanh(alpha/2))^2`, the effective spin-direction
/// contraction of the boosted packet.
pub fn nz_prime(p: &BoostParams) -> Result<f64> {
    if !(p.w_over_2m >= 0.0) || p.w_over_2m > 0.25 {
        return invalid_argument(format!(
            "w/2m = {} outside the leading-order regime (need 0 <= w/2m <= 0.25)",
            p.w_over_2m
        ));
    }
    let t = p.w_over_2m * (p.alpha / 2.0).tanh();
    Ok(1.0 - t * t)
}

/// Momentum-traced block `Tr_p[Lambda Psi_i (Lambda Psi_k)^H]` of the boosted
/// spin-momentum product states, to leading order in `w/m`.
pub fn wigner_block(bra: Spin, ket: Spin, nz: f64) -> Array2<Complex64> {
    let plus = (1.0 + nz) / 2.0;
    let minus = (1.0 - nz) / 2.0;
    match (bra, ket) {
        (Spin::Up, Spin::Up) => ndarray::array![[r(plus), ZERO], [ZERO, r(minus)]],
        (Spin::Down, Spin::Down) => ndarray::array![[r(minus), ZERO], [ZERO, r(plus)]],
        (Spin::Up, Spin::Down) => ndarray::array![[ZERO, r(plus)], [r(-minus), ZERO]],
        (Spin::Down, Spin::Up) => ndarray::array![[ZERO, r(-minus)], [r(plus), ZERO]],
    }
}

/// Boost of an arbitrary two-qubit spin state with factorised Gaussian
/// momenta: `rho' = sum C_ijkl block(i,k) (x) block(j,l)` with
/// `C_ijkl = rho[(ij),(kl)]`.
pub fn boost_two_qubit(rho_spin: &DensityMatrix, nz: f64) -> Result<DensityMatrix> {
    if rho_spin.dims() != [2, 2] {
        return invalid_argument("boost_two_qubit expects a two-qubit spin state");
    }
    let spins = [Spin::Up, Spin::Down];
    let mut blocks = Vec::new();
    for &bi in &spins {
        for &bk in &spins {
            blocks.push(wigner_block(bi, bk, nz));
        }
    }
    let block = |i: usize, k: usize| &blocks[i * 2 + k];
    let mut out = Array2::from_elem((4, 4), ZERO);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let c = rho_spin.matrix()[(i * 2 + j, k * 2 + l)];
                    if c == ZERO {
                        continue;
                    }
                    let ba = block(i, k);
                    let bb = block(j, l);
                    for a in 0..2 {
                        for b in 0..2 {
                            for cc in 0..2 {
                                for d in 0..2 {
                                    out[(a * 2 + b, cc * 2 + d)] +=
                                        c * ba[(a, cc)] * bb[(b, d)];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(DensityMatrix::new_unchecked(out, vec![2, 2]))
}

/// Closed-form boosted Werner state with singlet fraction `F`.
pub fn boosted_werner(f: f64, nz: f64) -> DensityMatrix {
    let c = (1.0 - 4.0 * f) / 12.0;
    let n2 = nz * nz;
    let d1 = 0.25 + c * n2;
    let d2 = 0.25 - c * n2;
    let corner = c * (n2 - 1.0);
    let mid = c * (n2 + 1.0);
    let mut m = Array2::from_elem((4, 4), ZERO);
    m[(0, 0)] = r(d1);
    m[(3, 3)] = r(d1);
    m[(1, 1)] = r(d2);
    m[(2, 2)] = r(d2);
    m[(0, 3)] = r(corner);
    m[(3, 0)] = r(corner);
    m[(1, 2)] = r(mid);
    m[(2, 1)] = r(mid);
    DensityMatrix::new_unchecked(m, vec![2, 2])
}

/// Closed-form eigenvalues of the partial transpose of the boosted Werner
/// state: `x2` is the only one that can turn negative.
pub fn ppt_eigenvalues(f: f64, nz: f64) -> [f64; 4] {
    let n2 = nz * nz;
    let x1 = (2.0 * f + 1.0) / 6.0;
    let x2 = (1.0 - f) / 3.0 + (1.0 - 4.0 * f) / 6.0 * n2;
    let x3 = (1.0 - f) / 3.0 - (1.0 - 4.0 * f) / 6.0 * n2;
    [x1, x2, x3, x1]
}

/// Distillability boundary `N'_z = (2 + nz^2) / (2 + 4 nz^2)`: the boosted
/// state is entangled iff `F > N'_z`.
pub fn distill_boundary(nz: f64) -> f64 {
    (2.0 + nz * nz) / (2.0 + 4.0 * nz * nz)
}

/// Momentum distribution entangled with the spin through per-momentum
/// rotation angles.
#[derive(Debug, Clone)]
pub enum SpinMomentumCoupling {
    /// Two sharp momenta with rotation angles `theta_1`, `theta_2`.
    Bimodal(f64, f64),
    /// Uniform distribution over n sharp momenta.
    Modal(Vec<f64>),
    /// Quadrature samples of `|psi(p)|^2` (weights summing to 1) with the
    /// momentum-dependent angle at the sample points.
    Continuous { weights: Vec<f64>, thetas: Vec<f64> },
}

/// Negativity left in the spin-spin singlet after a local interaction
/// transfers correlations to the momenta:
/// bimodal `cos^2(t1 - t2)`; n-modal `|1 - (2/n^2) sum cos^2(ti - tj)|`;
/// continuous limit the corresponding double quadrature.
pub fn spinmom_negativity(coupling: &SpinMomentumCoupling) -> Result<f64> {
    match coupling {
        SpinMomentumCoupling::Bimodal(t1, t2) => Ok((t1 - t2).cos().powi(2)),
        SpinMomentumCoupling::Modal(thetas) => {
            if thetas.is_empty() {
                return invalid_argument("need at least one momentum mode");
            }
            let n = thetas.len() as f64;
            let mut acc = 0.0;
            for &a in thetas {
                for &b in thetas {
                    acc += (a - b).cos().powi(2);
                }
            }
            Ok((1.0 - 2.0 * acc / (n * n)).abs())
        }
        SpinMomentumCoupling::Continuous { weights, thetas } => {
            if weights.len() != thetas.len() || weights.is_empty() {
                return invalid_argument("weights and thetas must match and be non-empty");
            }
            let total: f64 = weights.iter().sum();
            let mut acc = 0.0;
            for (wa, ta) in weights.iter().zip(thetas) {
                for (wb, tb) in weights.iter().zip(thetas) {
                    acc += wa * wb * (ta - tb).cos().powi(2);
                }
            }
            Ok((1.0 - 2.0 * acc / (total * total)).abs())
        }
    }
}

/// Mesa/well barrier induced by a homogeneous magnetic field over a length
/// `L`, traversed by a neutral spin-1/2 fermion.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MagneticChannelParams {
    pub m: f64,
    pub p0: f64,
    pub sigma: f64,
    pub l: f64,
    pub gamma_b0: f64,
}

impl Default for MagneticChannelParams {
    fn default() -> Self {
        Self {
            m: 100.0,
            p0: 10.0,
            sigma: 2.0,
            l: 3.0,
            gamma_b0: 0.2,
        }
    }
}

fn p_s_squared(p: f64, s: Spin, ch: &MagneticChannelParams) -> f64 {
    let sval = match s {
        Spin::Up => 0.5,
        Spin::Down => -0.5,
    };
    p * p - 2.0 * sval * ch.m * ch.gamma_b0
}

/// `sin(z)/z` for complex argument.
fn sinc_c(z: Complex64) -> Complex64 {
    if z.norm() < 1e-6 {
        Complex64::new(1.0, 0.0) - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// Transmission coefficient of the mesa (well) potential for spin `s`:
/// `T = 2 p p_s e^{-ipL} / (2 p p_s cos(p_s L) - i (p^2 + p_s^2) sin(p_s L))`,
/// evaluated in the `p_s`-cancelled form which is regular at `p_s = 0` and
/// continues below the barrier (principal branch, decaying solution).
pub fn transmission(p: f64, s: Spin, ch: &MagneticChannelParams) -> Complex64 {
    let ps2 = p_s_squared(p, s, ch);
    let ps = Complex64::new(ps2, 0.0).sqrt();
    let z = ps * ch.l;
    let denom = 2.0 * p * z.cos() - I * (p * p + ps2) * ch.l * sinc_c(z);
    2.0 * p * (-I * r(p * ch.l)).exp() / denom
}

/// Reflection coefficient of the same barrier:
/// `R = i (p_s^2 - p^2) sin(p_s L) / (2 p p_s cos(p_s L) - i (p^2 + p_s^2) sin(p_s L))`.
pub fn reflection(p: f64, s: Spin, ch: &MagneticChannelParams) -> Complex64 {
    let ps2 = p_s_squared(p, s, ch);
    let ps = Complex64::new(ps2, 0.0).sqrt();
    let z = ps * ch.l;
    let denom = 2.0 * p * z.cos() - I * (p * p + ps2) * ch.l * sinc_c(z);
    I * (ps2 - p * p) * ch.l * sinc_c(z) / denom
}

fn momentum_rule(ch: &MagneticChannelParams) -> QuadratureRule {
    QuadratureRule::gauss_hermite_unfolded(96, ch.p0, ch.sigma).expect("static rule")
}

/// Normalised spin-correlation integrals
/// `I_ss' = int dp |G(p)|^2 T_s T_s'^* / (|T_up|^2 + |T_down|^2)` of the
/// transmitted two-fermion state.
pub fn correlation_integral(s: Spin, s2: Spin, ch: &MagneticChannelParams) -> Complex64 {
    let rule = momentum_rule(ch);
    let norm = 1.0 / (ch.sigma * std::f64::consts::PI.sqrt());
    rule.integrate_complex(|p| {
        let g2 = norm * (-((p - ch.p0) / ch.sigma).powi(2)).exp();
        let tu = transmission(p, Spin::Up, ch);
        let td = transmission(p, Spin::Down, ch);
        let ts = match s {
            Spin::Up => tu,
            Spin::Down => td,
        };
        let ts2 = match s2 {
            Spin::Up => tu,
            Spin::Down => td,
        };
        r(g2) * ts * ts2.conj() / (tu.norm_sqr() + td.norm_sqr())
    })
}

/// Negativity `N = 2 |I_updown|` of the transmitted spin-spin state behind
/// the magnetic barrier.
pub fn fermion_negativity(ch: &MagneticChannelParams) -> f64 {
    2.0 * correlation_integral(Spin::Up, Spin::Down, ch).norm()
}

/// Bob's reduced spin state including both reflected and transmitted parts;
/// equals `I/2` identically because `|R_s|^2 + |T_s|^2 = 1`.
pub fn no_signalling_bob(ch: &MagneticChannelParams) -> DensityMatrix {
    let rule = momentum_rule(ch);
    let norm = 1.0 / (ch.sigma * std::f64::consts::PI.sqrt());
    let flux = |s: Spin| -> f64 {
        rule.integrate(|p| {
            let g2 = norm * (-((p - ch.p0) / ch.sigma).powi(2)).exp();
            let t = transmission(p, s, ch).norm_sqr();
            let rr = reflection(p, s, ch).norm_sqr();
            g2 * (t + rr)
        })
    };
    let mut m = Array2::from_elem((2, 2), ZERO);
    // Bob's spin is anti-correlated with Alice's in the singlet
    m[(0, 0)] = r(0.5 * flux(Spin::Down));
    m[(1, 1)] = r(0.5 * flux(Spin::Up));
    DensityMatrix::new_unchecked(m, vec![2])
}

/// Optically active medium traversed by one photon of a polarisation
/// singlet.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OpticalChannelParams {
    pub p0: f64,
    pub sigma: f64,
    /// Resonance frequency of the medium.
    pub w0: f64,
    /// `B-tilde * L`, the field-length product driving the relative phase.
    pub btilde_l: f64,
    /// Half-width of the principal-value exclusion window around the
    /// resonance pole, relative to `w0`.
    pub pole_window_rel: f64,
}

impl Default for OpticalChannelParams {
    fn default() -> Self {
        Self {
            p0: 10.0,
            sigma: 2.0,
            w0: 10.0,
            btilde_l: 2.0,
            pole_window_rel: 1e-3,
        }
    }
}

/// Negativity of the photon polarisation singlet after one photon crosses an
/// optically active medium:
/// `N = (1/(sqrt(pi) sigma)) |int_0^inf dw e^{-(w-p0)^2/sigma^2} e^{i BL w^2/(w^2-w0^2)^2}|`,
/// with a symmetric exclusion window around the resonance pole
/// (principal-value sense).
///
/// The phase diverges like `BL/(4 d^2)` at distance `d` from the pole, so a
/// uniform mesh cannot resolve it; the integral instead runs on a graded
/// Simpson mesh whose local step keeps the per-panel phase increment below a
/// fixed fraction of a radian.
pub fn photon_negativity(ch: &OpticalChannelParams) -> f64 {
    let lo = (ch.p0 - 8.0 * ch.sigma).max(0.0);
    let hi = ch.p0 + 8.0 * ch.sigma;
    let delta = ch.pole_window_rel * ch.w0;
    let f = |w: f64| -> Complex64 {
        let gauss = (-((w - ch.p0) / ch.sigma).powi(2)).exp();
        if ch.btilde_l == 0.0 {
            return r(gauss);
        }
        let d = w * w - ch.w0 * ch.w0;
        let phase = ch.btilde_l * w * w / (d * d);
        r(gauss) * Complex64::from_polar(1.0, phase)
    };
    // |d phase / dw| = BL * 2w (w^2 + w0^2) / |w^2 - w0^2|^3
    let dphase = |w: f64| -> f64 {
        if ch.btilde_l == 0.0 {
            return 0.0;
        }
        let d = w * w - ch.w0 * ch.w0;
        (ch.btilde_l.abs() * 2.0 * w.abs() * (w * w + ch.w0 * ch.w0) / d.abs().powi(3).max(1e-30))
            .min(1e15)
    };
    let h_smooth = ch.sigma / 64.0;
    let max_phase_step = 0.2;
    let segments: Vec<(f64, f64)> =
        if ch.btilde_l != 0.0 && ch.w0 - delta > lo && ch.w0 + delta < hi {
            vec![(lo, ch.w0 - delta), (ch.w0 + delta, hi)]
        } else {
            vec![(lo, hi)]
        };
    let mut total = ZERO;
    for (a, b) in segments {
        let mut w = a;
        let mut fw = f(w);
        while w < b {
            // dphase is monotone toward the pole on each segment; one
            // refinement bounds the in-panel phase increment from above.
            let mut h = (max_phase_step / dphase(w).max(1e-300))
                .min(h_smooth)
                .min(b - w);
            let slope = dphase(w + h).max(dphase(w));
            h = (max_phase_step / slope.max(1e-300)).min(h_smooth).min(b - w);
            let mid = w + h / 2.0;
            let next = w + h;
            let fm = f(mid);
            let fn_ = f(next);
            total += (fw + 4.0 * fm + fn_) * (h / 6.0);
            w = next;
            fw = fn_;
        }
    }
    total.norm() / (std::f64::consts::PI.sqrt() * ch.sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::{negativity, states};

    #[test]
    fn nz_prime_limits() {
        let at = |alpha: f64| nz_prime(&BoostParams { w_over_2m: 0.1, alpha }).unwrap();
        assert_eq!(at(0.0), 1.0);
        assert!((at(60.0) - 0.99).abs() < 1e-10, "tanh -> 1 limit");
        // monotone decreasing in alpha
        let mut prev = at(0.0);
        for k in 1..=20 {
            let v = at(k as f64 * 0.5);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        assert!(nz_prime(&BoostParams { w_over_2m: 0.3, alpha: 1.0 }).is_err());
    }

    #[test]
    fn wigner_blocks_at_rest_and_hermiticity() {
        let b = wigner_block(Spin::Up, Spin::Up, 1.0);
        assert!((b[(0, 0)] - r(1.0)).norm() < 1e-15);
        assert!(b[(1, 1)].norm() < 1e-15);
        // (up down)^H = (down up)
        for nz in [0.3, 0.7, 1.0] {
            let ud = wigner_block(Spin::Up, Spin::Down, nz);
            let du = wigner_block(Spin::Down, Spin::Up, nz);
            for i in 0..2 {
                for j in 0..2 {
                    assert!((ud[(i, j)].conj() - du[(j, i)]).norm() < 1e-15);
                }
            }
        }
        // up-down block = 1/2 [[0, 1+nz], [-(1-nz), 0]]
        let nz = 0.6;
        let ud = wigner_block(Spin::Up, Spin::Down, nz);
        assert!((ud[(0, 1)] - r((1.0 + nz) / 2.0)).norm() < 1e-15);
        assert!((ud[(1, 0)] + r((1.0 - nz) / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn boost_preserves_structure_and_matches_closed_form() {
        // nz = 1 leaves the input unchanged
        let rho = states::werner(0.8);
        let boosted = boost_two_qubit(&rho, 1.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((boosted.matrix()[(i, j)] - rho.matrix()[(i, j)]).norm() < 1e-12);
            }
        }
        // Werner input reproduces the closed form
        for (f, nz) in [(0.9, 0.8), (0.3, 0.5), (0.6, 0.95)] {
            let got = boost_two_qubit(&states::werner(f), nz).unwrap();
            let want = boosted_werner(f, nz);
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        (got.matrix()[(i, j)] - want.matrix()[(i, j)]).norm() < 1e-12,
                        "F={f} nz={nz} entry ({i},{j})"
                    );
                }
            }
            // Hermiticity and trace preserved
            assert!((got.trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ppt_eigenvalues_match_diagonalisation() {
        for (f, nz) in [(1.0, 1.0), (0.75, 0.6), (0.4, 0.3)] {
            let rho = boosted_werner(f, nz);
            let spec = rho.ppt_spectrum(1).unwrap();
            let mut want = ppt_eigenvalues(f, nz).to_vec();
            want.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for (a, b) in spec.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12, "F={f} nz={nz}: {spec:?} vs {want:?}");
            }
            let total: f64 = want.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
        // F = 1, nz = 1: x2 = -1/2 (maximally distillable)
        assert!((ppt_eigenvalues(1.0, 1.0)[1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn distill_boundary_shape() {
        assert!((distill_boundary(1.0) - 0.5).abs() < 1e-15);
        assert!((distill_boundary(0.0) - 1.0).abs() < 1e-15);
        let mut prev = distill_boundary(1e-3);
        for k in 1..=50 {
            let nz = k as f64 / 50.0;
            let v = distill_boundary(nz);
            assert!(v <= prev + 1e-15, "not decreasing at nz={nz}");
            prev = v;
        }
        // x2 = 0 exactly at F = N'_z
        for nz in [0.2, 0.5, 0.9] {
            let f = distill_boundary(nz);
            assert!(ppt_eigenvalues(f, nz)[1].abs() < 1e-14);
        }
    }

    #[test]
    fn negativity_positive_iff_beyond_boundary() {
        for nz in [0.25, 0.6, 0.95] {
            let fb = distill_boundary(nz);
            let above = negativity(&boosted_werner(fb + 1e-3, nz)).unwrap();
            let below = negativity(&boosted_werner(fb - 1e-3, nz)).unwrap();
            assert!(above > 0.0, "nz={nz}");
            assert!(below == 0.0, "nz={nz}: {below}");
        }
    }

    #[test]
    fn spinmom_negativity_cases() {
        let n = |t1, t2| spinmom_negativity(&SpinMomentumCoupling::Bimodal(t1, t2)).unwrap();
        assert!((n(0.3, 0.3) - 1.0).abs() < 1e-15);
        assert!(n(0.0, std::f64::consts::FRAC_PI_2) < 1e-15);
        assert!((n(0.0, std::f64::consts::FRAC_PI_4) - 0.5).abs() < 1e-12);
        // modal with equal angles stays maximal
        let m = spinmom_negativity(&SpinMomentumCoupling::Modal(vec![0.2; 5])).unwrap();
        assert!((m - 1.0).abs() < 1e-15);
        // continuous with constant theta stays maximal
        let c = spinmom_negativity(&SpinMomentumCoupling::Continuous {
            weights: vec![0.25; 4],
            thetas: vec![1.1; 4],
        })
        .unwrap();
        assert!((c - 1.0).abs() < 1e-15);
    }

    #[test]
    fn transmission_unit_at_zero_field_and_flux_conserved() {
        let mut ch = MagneticChannelParams::default();
        ch.gamma_b0 = 0.0;
        for p in [0.5, 3.0, 11.0] {
            for s in [Spin::Up, Spin::Down] {
                let t = transmission(p, s, &ch);
                assert!((t.norm() - 1.0).abs() < 1e-12, "T at B=0");
            }
        }
        // |R|^2 + |T|^2 = 1 over deterministic parameter draws
        let mut lcg = 12345u64;
        let mut unit = || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (lcg >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let ch = MagneticChannelParams {
                m: 10.0 + 190.0 * unit(),
                p0: 10.0,
                sigma: 2.0,
                l: 0.5 + 5.0 * unit(),
                gamma_b0: 0.5 * unit(),
            };
            let p = 0.2 + 15.0 * unit();
            for s in [Spin::Up, Spin::Down] {
                let t = transmission(p, s, &ch).norm_sqr();
                let rr = reflection(p, s, &ch).norm_sqr();
                assert!(t <= 1.0 + 1e-10, "|T|^2 = {t} > 1");
                assert!(
                    (t + rr - 1.0).abs() < 1e-10,
                    "flux violation: {t} + {rr}"
                );
            }
        }
    }

    #[test]
    fn transmission_regular_at_barrier_top() {
        // p^2 = 2 s m gamma B0 makes p_s = 0; the cancelled form stays finite
        let ch = MagneticChannelParams {
            m: 100.0,
            p0: 10.0,
            sigma: 2.0,
            l: 3.0,
            gamma_b0: 0.2,
        };
        let p_top = (2.0 * 0.5 * ch.m * ch.gamma_b0).sqrt();
        let t = transmission(p_top, Spin::Up, &ch);
        assert!(t.re.is_finite() && t.im.is_finite());
        // limit value 2p e^{-ipL} / (2p - i p^2 L)
        let want = 2.0 * p_top * (-I * r(p_top * ch.l)).exp()
            / (2.0 * p_top - I * p_top * p_top * ch.l);
        assert!((t - want).norm() < 1e-8, "{t} vs {want}");
    }

    #[test]
    fn fermion_negativity_limits() {
        let mut ch = MagneticChannelParams::default();
        ch.gamma_b0 = 0.0;
        assert!((fermion_negativity(&ch) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn no_signalling_reduction_is_maximally_mixed() {
        let mut lcg = 777u64;
        let mut unit = || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (lcg >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let ch = MagneticChannelParams {
                m: 20.0 + 180.0 * unit(),
                p0: 8.0 + 6.0 * unit(),
                sigma: 1.0 + 2.0 * unit(),
                l: 0.5 + 4.0 * unit(),
                gamma_b0: 0.4 * unit(),
            };
            let rho = no_signalling_bob(&ch);
            for i in 0..2 {
                for j in 0..2 {
                    let want = if i == j { 0.5 } else { 0.0 };
                    assert!(
                        (rho.matrix()[(i, j)] - r(want)).norm() < 1e-8,
                        "Bob state deviates: {:?}",
                        rho.matrix()
                    );
                }
            }
        }
    }

    #[test]
    fn photon_negativity_at_zero_field() {
        let ch = OpticalChannelParams {
            btilde_l: 0.0,
            ..Default::default()
        };
        let n = photon_negativity(&ch);
        assert!((n - 1.0).abs() < 1e-6, "N(BL=0) = {n}");
    }

    #[test]
    fn photon_negativity_decreases_with_field() {
        let mut prev = f64::INFINITY;
        for k in 0..=6 {
            let ch = OpticalChannelParams {
                btilde_l: k as f64,
                ..Default::default()
            };
            let n = photon_negativity(&ch);
            assert!(n <= prev + 1e-6, "N not nonincreasing at BL={k}: {n} vs {prev}");
            prev = n;
        }
    }
}
