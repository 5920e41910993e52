//! Catalog of two-particle amplitudes `f(p, q)`, each a pure callable ready
//! for the continuous-variable Schmidt machinery, together with the
//! recommended basis/quadrature setup for decomposing it.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numerics::{erfcx, phi_cut, phi_cut_dx, phi_cut_dxx, QuadratureRule};
use crate::{invalid_argument, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `sin(x)/x` with the removable singularity filled by its series.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Frequency-entangled biphoton amplitude from type-II parametric
/// down-conversion, in pump-centred units:
/// `f(p, q) = exp(-(p + q)^2) sinc[(L_p p + L_q q) / 2]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PdcParams {
    pub l_p: f64,
    pub l_q: f64,
}

/// Finite-time QED t-channel amplitude for two-electron scattering in
/// dimensionless variables. `include_oscillatory` keeps the transient bracket
/// that vanishes weakly at large times.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QedParams {
    pub t_tilde: f64,
    pub pa0_over_m: f64,
    pub sigma_over_m: f64,
    pub include_oscillatory: bool,
}

impl Default for QedParams {
    fn default() -> Self {
        Self {
            t_tilde: 1.0,
            pa0_over_m: 0.002,
            sigma_over_m: 0.0002,
            include_oscillatory: true,
        }
    }
}

/// Decay amplitude of an unstable system emitting a particle detected
/// back-to-back with the decay product, in units of the initial mass.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct UnstableParams {
    pub t_tilde: f64,
    pub gamma_tilde: f64,
    pub m_g: f64,
    pub m_gamma: f64,
    pub sigma_tilde: f64,
    pub include_cut: bool,
}

impl Default for UnstableParams {
    fn default() -> Self {
        Self {
            t_tilde: 50.0,
            gamma_tilde: 0.0,
            m_g: 0.7,
            m_gamma: 0.1,
            sigma_tilde: 0.2,
            include_cut: false,
        }
    }
}

/// Separable Gaussian control amplitude `exp(-p^2/2s1^2) exp(-q^2/2s2^2)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GaussianProductParams {
    pub sigma1: f64,
    pub sigma2: f64,
}

/// Narrow-Gaussian stand-in for `delta(p - q)`; its coefficient matrix tends
/// to the identity as `width -> 0`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DeltaSurrogateParams {
    pub width: f64,
}

/// A tagged bipartite amplitude with its parameter set.
#[derive(Debug)]
pub struct BipartiteAmplitude {
    variant: Variant,
    norm2: OnceLock<f64>,
}

#[derive(Debug, Clone, Copy)]
enum Variant {
    Pdc(PdcParams),
    Qed(QedParams),
    Unstable(UnstableParams),
    GaussianProduct(GaussianProductParams),
    DeltaSurrogate(DeltaSurrogateParams),
}

/// PDC amplitude from the dimensionless products `L_p`, `L_q`.
pub fn pdc(l_p: f64, l_q: f64) -> BipartiteAmplitude {
    BipartiteAmplitude::new(Variant::Pdc(PdcParams { l_p, l_q }))
}

/// PDC amplitude from physical parameters: group-velocity-mismatch times
/// crystal length `(kbar - k'_o) L`, `(kbar - k'_e) L` (in ps) and the pump
/// bandwidth `sigma` (in 1/ps); `L_p = (kbar - k'_o) L sigma` and likewise
/// for `L_q`.
pub fn pdc_from_physical(klo_l: f64, kle_l: f64, sigma: f64) -> BipartiteAmplitude {
    pdc(klo_l * sigma, kle_l * sigma)
}

/// QED t-channel amplitude with the given parameter set.
pub fn qed_amplitude(params: QedParams) -> BipartiteAmplitude {
    BipartiteAmplitude::new(Variant::Qed(params))
}

/// Unstable-decay amplitude with the given parameter set.
pub fn unstable_amplitude(params: UnstableParams) -> BipartiteAmplitude {
    BipartiteAmplitude::new(Variant::Unstable(params))
}

/// Separable two-Gaussian control amplitude.
pub fn gaussian_product(sigma1: f64, sigma2: f64) -> BipartiteAmplitude {
    BipartiteAmplitude::new(Variant::GaussianProduct(GaussianProductParams {
        sigma1,
        sigma2,
    }))
}

/// Delta-function surrogate of the given width.
pub fn delta_surrogate(width: f64) -> BipartiteAmplitude {
    BipartiteAmplitude::new(Variant::DeltaSurrogate(DeltaSurrogateParams { width }))
}

impl BipartiteAmplitude {
    fn new(variant: Variant) -> Self {
        Self {
            variant,
            norm2: OnceLock::new(),
        }
    }

    /// Amplitude value at `(p, q)`.
    pub fn eval(&self, p: f64, q: f64) -> Complex64 {
        match self.variant {
            Variant::Pdc(PdcParams { l_p, l_q }) => {
                let s = p + q;
                c((-s * s).exp() * sinc((l_p * p + l_q * q) / 2.0))
            }
            Variant::Qed(params) => qed_t_channel(
                p,
                q,
                params.t_tilde,
                params.pa0_over_m,
                params.sigma_over_m,
                params.include_oscillatory,
            ),
            Variant::Unstable(params) => unstable(
                p,
                q,
                params.t_tilde,
                params.gamma_tilde,
                params.m_g,
                params.m_gamma,
                params.sigma_tilde,
                params.include_cut,
            ),
            Variant::GaussianProduct(GaussianProductParams { sigma1, sigma2 }) => c((-p * p
                / (2.0 * sigma1 * sigma1))
                .exp()
                * (-q * q / (2.0 * sigma2 * sigma2)).exp()),
            Variant::DeltaSurrogate(DeltaSurrogateParams { width }) => {
                let d = p - q;
                c((-d * d / (width * width)).exp() / (width * std::f64::consts::PI.sqrt()))
            }
        }
    }

    /// `||f||^2`, computed lazily by a variant-specific accurate scheme.
    ///
    /// Truncation-error metrics divide by this value, so it is evaluated
    /// independently of (and more accurately than) the coefficient-matrix
    /// quadrature. The delta surrogate is not square integrable in the limit
    /// and reports infinity.
    pub fn norm2(&self) -> f64 {
        *self.norm2.get_or_init(|| self.compute_norm2())
    }

    fn compute_norm2(&self) -> f64 {
        match self.variant {
            Variant::Pdc(PdcParams { l_p, l_q }) => {
                // In rotated coordinates u = (p+q)/sqrt2, v = (p-q)/sqrt2 the
                // squared modulus factorises; the v-integral of sinc^2 equals
                // pi / |d(arg)/dv| independently of u.
                let dv = (l_p - l_q).abs() / (2.0 * 2f64.sqrt());
                if dv == 0.0 {
                    return f64::INFINITY;
                }
                (std::f64::consts::PI / dv) * (std::f64::consts::PI.sqrt() / 2.0)
            }
            Variant::Qed(_) => {
                let rule = QuadratureRule::gauss_hermite_unfolded(256, 0.0, 2f64.sqrt())
                    .expect("static rule");
                self.grid_norm2(&rule, &rule)
            }
            Variant::Unstable(params) => {
                let (rule, _, _) = unstable_grid(&params);
                self.grid_norm2(&rule, &rule)
            }
            Variant::GaussianProduct(GaussianProductParams { sigma1, sigma2 }) => {
                std::f64::consts::PI * sigma1 * sigma2
            }
            Variant::DeltaSurrogate(_) => f64::INFINITY,
        }
    }

    fn grid_norm2(&self, rule_p: &QuadratureRule, rule_q: &QuadratureRule) -> f64 {
        let nodes_q = rule_q.nodes().to_vec();
        let weights_q = rule_q.weights().to_vec();
        let rows = crate::par::map_indexed(rule_p.len(), |i| {
            let p = rule_p.nodes()[i];
            let wp = rule_p.weights()[i];
            let mut acc = 0.0;
            for (q, wq) in nodes_q.iter().zip(&weights_q) {
                acc += wq * self.eval(p, *q).norm_sqr();
            }
            wp * acc
        });
        rows.into_iter().sum()
    }

    /// Recommended decomposition setup (bases, quadrature rule, cutoffs) for
    /// this amplitude. PDC takes the basis width and cutoff as free knobs via
    /// [`pdc_setup`]; the other variants carry tuned defaults.
    pub fn default_setup(&self) -> Result<DecompositionSetup> {
        match self.variant {
            Variant::Pdc(_) => pdc_setup(1.0, 25),
            Variant::Qed(_) => qed_setup(11),
            Variant::Unstable(params) => unstable_setup(&params),
            Variant::GaussianProduct(GaussianProductParams { sigma1, sigma2 }) => {
                Ok(DecompositionSetup {
                    basis1: crate::cv::OrthonormalBasis::new(1.0 / sigma1)?,
                    basis2: crate::cv::OrthonormalBasis::new(1.0 / sigma2)?,
                    rule: QuadratureRule::gauss_hermite_unfolded(
                        64,
                        0.0,
                        2f64.sqrt() * sigma1.max(sigma2),
                    )?,
                    m0: 10,
                    n0: 10,
                })
            }
            Variant::DeltaSurrogate(_) => Ok(DecompositionSetup {
                basis1: crate::cv::OrthonormalBasis::new(1.0)?,
                basis2: crate::cv::OrthonormalBasis::new(1.0)?,
                rule: QuadratureRule::gauss_hermite_unfolded(256, 0.0, 2f64.sqrt())?,
                m0: 6,
                n0: 6,
            }),
        }
    }
}

/// Basis pair, quadrature rule and cutoffs for one decomposition run.
#[derive(Debug, Clone)]
pub struct DecompositionSetup {
    pub basis1: crate::cv::OrthonormalBasis,
    pub basis2: crate::cv::OrthonormalBasis,
    pub rule: QuadratureRule,
    pub m0: usize,
    pub n0: usize,
}

/// Setup for the PDC amplitude with Hermite-Gaussian basis width `beta` and
/// cutoff `m0 = n0`.
pub fn pdc_setup(beta: f64, m0: usize) -> Result<DecompositionSetup> {
    let basis = crate::cv::OrthonormalBasis::new(beta)?;
    let order = (2 * m0 + 16).clamp(128, 512);
    Ok(DecompositionSetup {
        basis1: basis.clone(),
        basis2: basis,
        rule: QuadratureRule::gauss_hermite_unfolded(order, 0.0, 2f64.sqrt() / beta)?,
        m0,
        n0: m0,
    })
}

/// Setup for the QED t-channel amplitude (unit-width Hermite basis).
pub fn qed_setup(m0: usize) -> Result<DecompositionSetup> {
    let basis = crate::cv::OrthonormalBasis::new(1.0)?;
    let order = (2 * m0 + 16).clamp(128, 512);
    Ok(DecompositionSetup {
        basis1: basis.clone(),
        basis2: basis,
        rule: QuadratureRule::gauss_hermite_unfolded(order, 0.0, 2f64.sqrt())?,
        m0,
        n0: m0,
    })
}

/// Kinematic ridge of the unstable-decay amplitude: the momentum at which the
/// diagonal `p = q` crosses the energy-conserving surface.
pub fn unstable_ridge(m_g: f64, m_gamma: f64) -> Result<f64> {
    if m_g + m_gamma >= 1.0 {
        return invalid_argument(format!(
            "no open decay channel: m_g + m_gamma = {} >= 1",
            m_g + m_gamma
        ));
    }
    let f = |p: f64| (p * p + m_g * m_g).sqrt() + (p * p + m_gamma * m_gamma).sqrt() - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn unstable_grid(params: &UnstableParams) -> (QuadratureRule, f64, f64) {
    let ridge = unstable_ridge(params.m_g, params.m_gamma).unwrap_or(0.25);
    // First-quadrant box that covers the Gaussian band around the ridge plus
    // the oscillatory tails of the time bracket; tuned at sigma_tilde = 0.2.
    let hi = (ridge + 0.52 + 1.2 * params.sigma_tilde).min(2.2);
    let rule = QuadratureRule::uniform_panel(0.0, hi, 1200).expect("static rule");
    (rule, ridge, hi)
}

/// Setup for the unstable-decay amplitude: panel rule on the first quadrant
/// truncated around the kinematic ridge, basis recentred on the ridge.
pub fn unstable_setup(params: &UnstableParams) -> Result<DecompositionSetup> {
    let (rule, _ridge, hi) = unstable_grid(params);
    let m0 = 56;
    let coverage = 0.40 * hi;
    let beta = ((2 * m0 + 1) as f64).sqrt() / coverage;
    let center = 0.44 * hi;
    let basis = crate::cv::OrthonormalBasis::with_center(beta, center)?;
    Ok(DecompositionSetup {
        basis1: basis.clone(),
        basis2: basis,
        rule,
        m0,
        n0: m0,
    })
}

/// Finite-time QED t-channel amplitude, Coulomb regime, for the spin
/// configuration in which only the t channel contributes: a sinc
/// energy-conservation factor times the Coulomb propagator plus (when
/// `include_oscillatory`) the transient bracket.
pub fn qed_t_channel(
    p: f64,
    q: f64,
    t_tilde: f64,
    pa0_over_m: f64,
    sigma_over_m: f64,
    include_oscillatory: bool,
) -> Complex64 {
    let a = pa0_over_m / sigma_over_m; // p_a^0 / sigma
    let envelope = (-p * p / 2.0).exp() * (-q * q / 2.0).exp();
    let s = p + q;
    // sin[(p+q) t]/Sigma with Sigma = (pa0/2m)(p+q)
    let sinc_term = (2.0 / pa0_over_m) * t_tilde * sinc(s * t_tilde) / (p * p + a * a);
    let mut value = c(sinc_term);
    if include_oscillatory {
        let mu = 2f64.sqrt() * (p * p + a * a).sqrt();
        let sigma_t = (pa0_over_m / 2.0) * s;
        let denom = sigma_t * sigma_t - mu * mu;
        let osc_phase = (-I * c((2.0 / pa0_over_m) * mu * t_tilde)).exp();
        let bracket = c(-sigma_t * (s * t_tilde).sin() / (mu * denom))
            - I * (c((s * t_tilde).cos()) - osc_phase) / denom;
        value += bracket * (2.0 / mu);
    }
    value * envelope
}

/// Configuration-space orthonormal mode of the QED evolution: a
/// Hermite-Gaussian wave packet drifting at the mean velocity and spreading
/// with time.
pub fn config_mode(n: usize, x_tilde: f64, t_tilde: f64, sigma_tilde: f64) -> Result<Complex64> {
    if sigma_tilde <= 0.0 {
        return invalid_argument("sigma_tilde must be positive");
    }
    let s = sigma_tilde * t_tilde;
    let delta = x_tilde - t_tilde;
    let y = -delta / (1.0 + s * s).sqrt();
    // The normalised Hermite function at y supplies both H_n and the modulus
    // of the complex Gaussian; what remains of the latter is a pure phase.
    let h = crate::numerics::orthonormal_hermite(n, 1.0, y)?;
    let i_pow_n = I.powu(n as u32);
    let phase = (-I * c(n as f64 * s.atan())).exp()
        * (I * c((x_tilde - t_tilde / 2.0) / sigma_tilde)).exp()
        * (I * c(delta * delta * s / (2.0 * (1.0 + s * s)))).exp();
    Ok(i_pow_n * phase * h / Complex64::new(1.0, s).sqrt())
}

/// Unstable-decay amplitude for back-to-back detection:
/// `exp(-(p-q)^2/sigma^2) [ (e^{i D t} - e^{-i(D - i G)t}) / (D - iG/2) + I_cut ]`
/// with `D = sqrt((p-q)^2 + 1) - sqrt(p^2 + m_g^2) - sqrt(q^2 + m_gamma^2)`.
#[allow(clippy::too_many_arguments)]
pub fn unstable(
    p: f64,
    q: f64,
    t_tilde: f64,
    gamma_tilde: f64,
    m_g: f64,
    m_gamma: f64,
    sigma_tilde: f64,
    include_cut: bool,
) -> Complex64 {
    let d = p - q;
    let gauss = (-d * d / (sigma_tilde * sigma_tilde)).exp();
    let mut bracket = unstable_bracket(p, q, t_tilde, gamma_tilde, m_g, m_gamma);
    if include_cut {
        bracket += unstable_icut(p, q, t_tilde, gamma_tilde, m_g, m_gamma);
    }
    bracket * gauss
}

fn unstable_delta(p: f64, q: f64, m_g: f64, m_gamma: f64) -> f64 {
    let d = p - q;
    (d * d + 1.0).sqrt() - (p * p + m_g * m_g).sqrt() - (q * q + m_gamma * m_gamma).sqrt()
}

/// The pole part of the time evolution: sinc limit at `Gamma = 0`, mixed
/// sinc/Lorentzian otherwise.
pub fn unstable_bracket(
    p: f64,
    q: f64,
    t_tilde: f64,
    gamma_tilde: f64,
    m_g: f64,
    m_gamma: f64,
) -> Complex64 {
    let delta = unstable_delta(p, q, m_g, m_gamma);
    if gamma_tilde == 0.0 {
        2.0 * I * t_tilde * sinc(delta * t_tilde)
    } else {
        let num = (I * c(delta * t_tilde)).exp()
            - (-I * c(delta * t_tilde)).exp() * (-gamma_tilde * t_tilde).exp();
        num / Complex64::new(delta, -gamma_tilde / 2.0)
    }
}

/// Branch-cut (power-law) correction to the decay amplitude, evaluated with
/// the scaled complementary error function. The apparent double pole at the
/// energy-conserving surface cancels identically; a second-order expansion
/// takes over near it to avoid catastrophic cancellation.
pub fn unstable_icut(
    p: f64,
    q: f64,
    t_tilde: f64,
    gamma_tilde: f64,
    m_g: f64,
    m_gamma: f64,
) -> Complex64 {
    if gamma_tilde == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let e_g = (p * p + m_g * m_g).sqrt();
    let omega = (q * q + m_gamma * m_gamma).sqrt();
    let dq = p - q;
    let e_e = (dq * dq + 1.0).sqrt();
    let a = -I * c(e_g + omega);
    let b = -I * c(e_e);
    let d = a - b;
    let sqrt_b = b.sqrt();
    let pi = std::f64::consts::PI;
    let front = -I * c(gamma_tilde) * (-(a + b) * t_tilde).exp() / (pi * sqrt_b);
    if d.norm() < 1e-3 * b.norm() {
        // braces = (a-b)^2 [phi'(b, 2t) + b phi''(b, 2t)/2 + O(a-b)]
        front * (phi_cut_dx(b, 2.0 * t_tilde) + b * phi_cut_dxx(b, 2.0 * t_tilde) / 2.0)
    } else {
        let bt = b * t_tilde;
        // e^{2bt} erfc(sqrt(2bt)) = erfcx(sqrt(2bt)); |e^{2bt}| = 1 on this ray
        let cap_b =
            2.0 * (2.0 * pi * bt).sqrt() - pi * (4.0 * bt - 1.0) * erfcx((2.0 * bt).sqrt());
        let braces = a * (phi_cut(a, 2.0 * t_tilde) - phi_cut(b, 2.0 * t_tilde))
            - (b - a) * cap_b / (4.0 * sqrt_b);
        front * braces / (d * d)
    }
}
