//! The registered experiments: each reproduces one of the toolkit's
//! reference tables or figure datasets, or runs an ad-hoc analysis of a
//! user-supplied state.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use entangle_core::amplitudes::{
    pdc_from_physical, pdc_setup, qed_amplitude, qed_setup, unstable_amplitude, unstable_icut,
    unstable_setup, QedParams, UnstableParams,
};
use entangle_core::channels::{
    distill_boundary, fermion_negativity, nz_prime, photon_negativity,
    spinmom_negativity, BoostParams, MagneticChannelParams, OpticalChannelParams,
    SpinMomentumCoupling,
};
use entangle_core::cv::{
    coefficient_matrix, decompose, entropy, error_d2, schmidt_number, Side,
};
use entangle_core::mps::{
    clone_fidelities, gm_target, pcc_target, sequential_clone, universal_isometries,
    vidal_decompose, CloningMode,
};
use entangle_core::protocols::{
    bell_f, critical_angle, filtered_two_atom_state, scatter_entropy, two_atom_state,
};
use entangle_core::qudit::{schmidt_finite, PureState};
use entangle_core::slocc::{
    classify_bipartite, classify_three_qubit, four_qubit_probe, DEFAULT_DEGENERACY_TOL,
    DEFAULT_RANK_TOL,
};

use crate::output::{num, Output};
use crate::params::Params;
use crate::CliError;

pub const EXPERIMENTS: &[&str] = &[
    "pdc-table",
    "pdc-modes",
    "pdc-spectrum",
    "qed-evolution",
    "unstable-K",
    "delta-spectrum",
    "werner-boundary",
    "magnetic-channel",
    "optical-channel",
    "spinmom",
    "scattering",
    "two-atom",
    "classify",
    "schmidt",
    "mps-decompose",
    "clone",
];

pub struct Context<'a> {
    pub params: Params,
    pub state_path: Option<&'a Path>,
    pub cut: Option<&'a str>,
    pub seed: u64,
}

impl Context<'_> {
    fn load_state(&self) -> Result<PureState, CliError> {
        let path = self
            .state_path
            .ok_or_else(|| CliError::Param("this experiment needs --state FILE".into()))?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Param(format!("cannot read state {path:?}: {e}")))?;
        let psi: PureState = serde_json::from_str(&text)
            .map_err(|e| CliError::Param(format!("state {path:?}: {e}")))?;
        Ok(psi.normalized())
    }
}

pub fn run(name: &str, ctx: &Context) -> Result<Output, CliError> {
    let out = match name {
        "pdc-table" => pdc_table(ctx)?,
        "pdc-modes" => pdc_modes(ctx)?,
        "pdc-spectrum" => pdc_spectrum(ctx)?,
        "qed-evolution" => qed_evolution(ctx)?,
        "unstable-K" => unstable_k(ctx)?,
        "delta-spectrum" => delta_spectrum(ctx)?,
        "werner-boundary" => werner_boundary(ctx)?,
        "magnetic-channel" => magnetic_channel(ctx)?,
        "optical-channel" => optical_channel(ctx)?,
        "spinmom" => spinmom(ctx)?,
        "scattering" => scattering(ctx)?,
        "two-atom" => two_atom(ctx)?,
        "classify" => classify(ctx)?,
        "schmidt" => schmidt(ctx)?,
        "mps-decompose" => mps_decompose(ctx)?,
        "clone" => clone_experiment(ctx)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown experiment {other:?}; known: {}",
                EXPERIMENTS.join(", ")
            )))
        }
    };
    ctx.params.reject_unknown()?;
    Ok(out)
}

fn pdc_amplitude(p: &Params) -> Result<entangle_core::amplitudes::BipartiteAmplitude, CliError> {
    let klo = p.f64("klo_l", 0.061)?;
    let kle = p.f64("kle_l", 0.213)?;
    let sigma = p.f64("sigma", 35.0)?;
    Ok(pdc_from_physical(klo, kle, sigma))
}

fn pdc_table(ctx: &Context) -> Result<Output, CliError> {
    let p = &ctx.params;
    let amp = pdc_amplitude(p)?;
    let cutoffs = p.usize_list("cutoffs", &[10, 15, 20, 25])?;
    let betas = p.f64_list("betas", &[0.5, 1.0, 2.0])?;
    let mut header = vec!["m0".to_string()];
    for b in &betas {
        header.push(format!("beta_{b}"));
    }
    let mut rows = Vec::new();
    for &m0 in &cutoffs {
        let mut row = vec![m0.to_string()];
        for &beta in &betas {
            let setup = pdc_setup(beta, m0)?;
            let c = coefficient_matrix(&amp, &setup.basis1, &setup.basis2, m0, m0, &setup.rule)?;
            let d = decompose(&c)?;
            row.push(num(error_d2(amp.norm2(), d.lambdas())));
        }
        rows.push(row);
    }
    Ok(Output::Csv {
        comment: format!("pdc-table d2 truncation errors; {}", p.summary()),
        header,
        rows,
    })
}

fn pdc_modes(ctx: &Context) -> Result<Output, CliError> {
    let p = &ctx.params;
    let amp = pdc_amplitude(p)?;
    let beta = p.f64("beta", 1.0)?;
    let m0 = p.usize("m0", 25)?;
    let n_modes = p.usize("modes", 4)?;
    let pmax = p.f64("pmax", 4.0)?;
    let npts = p.usize("points", 161)?;
    let setup = pdc_setup(beta, m0)?;
    let c = coefficient_matrix(&amp, &setup.basis1, &setup.basis2, m0, m0, &setup.rule)?;
    let d = decompose(&c)?;
    let k = n_modes.min(d.len());
    let mut header = vec!["p".to_string()];
    for i in 0..k {
        header.push(format!("psi1_{i}"));
    }
    for i in 0..k {
        header.push(format!("psi2_{i}"));
    }
    let mut rows = Vec::new();
    for j in 0..npts {
        let x = -pmax + 2.0 * pmax * j as f64 / (npts - 1) as f64;
        let mut row = vec![num(x)];
        for i in 0..k {
            row.push(num(d.evaluate_mode(Side::One, i, x)?.re));
        }
        for i in 0..k {
            row.push(num(d.evaluate_mode(Side::Two, i, x)?.re));
        }
        rows.push(row);
    }
    Ok(Output::Csv {
        comment: format!("pdc-modes (real parts); {}", p.summary()),
        header,
        rows,
    })
}

fn pdc_spectrum(ctx: &Context) -> Result<Output, CliError> {
    let p = &ctx.params;
    let amp = pdc_amplitude(p)?;
    let beta = p.f64("beta", 1.0)?;
    let m0 = p.usize("m0", 25)?;
    let setup = pdc_setup(beta, m0)?;
    let c = coefficient_matrix(&amp, &setup.basis1, &setup.basis2, m0, m0, &setup.rule)?;
    let d = decompose(&c)?;
    let total: f64 = d.lambdas().iter().sum();
    let rows = d
        .lambdas()
        .iter()
        .enumerate()
        .map(|(n, l)| vec![n.to_string(), num(l / total)])
        .collect();
    Ok(Output::Csv {
        comment: format!(
            "pdc-spectrum normalised Schmidt weights; K={}; {}",
            num(schmidt_number(d.lambdas())),
            p.summary()
        ),
        header: vec!["n".into(), "lambda".into()],
        rows,
    })
}

fn qed_evolution(ctx: &Context) -> Result<Output, CliError> {
    let p = &ctx.params;
    let times = p.f64_list("times", &[1.0, 2.0, 3.0, 4.0])?;
    let m0 = p.usize("m0", 11)?;
    let base = QedParams {
        pa0_over_m: p.f64("pa0_over_m", 0.002)?,
        sigma_over_m: p.f64("sigma_over_m", 0.0002)?,
        include_oscillatory: p.bool("include_oscillatory", true)?,
        t_tilde: 0.0,
    };
    let setup = qed_setup(m0)?;
    let mut rows = Vec::new();
    for &t in &times {
        let amp = qed_amplitude(QedParams { t_tilde: t, ..base });
        let c = coefficient_matrix(&amp, &setup.basis1, &setup.basis2, m0, m0, &setup.rule)?;
        let d = decompose(&c)?;
        rows.push(vec![
            num(t),
            num(schmidt_number(d.lambdas())),
            num(error_d2(amp.norm2(), d.lambdas())),
        ]);
    }
    Ok(Output::Csv {
        comment: format!("qed-evolution Slater number vs time; {}", p.summary()),
        header: vec!["t_tilde".into(), "K".into(), "d2".into()],
        rows,
    })
}

fn unstable_k(ctx: &Context) -> Result<Output, CliError> {
    let p = &ctx.params;
    let times = p.f64_list("times", &[50.0, 100.0, 150.0, 200.0])?;
    let gammas = p.f64_list("gammas", &[0.0, 0.005, 0.015, 0.03])?;
    let base = UnstableParams {
        m_g: p.f64("m_g", 0.7)?,
        m_gamma: p.f64("m_gamma", 0.1)?,
        sigma_tilde: p.f64("sigma_tilde", 0.2)?,
        include_cut: false,
        t_tilde: 0.0,
        gamma_tilde: 0.0,
    };
    let mut rows = Vec::new();
    for &g in &gammas {
        for &t in &times {
            let params = UnstableParams {
                t_tilde: t,
                gamma_tilde: g,
                ..base
            };
            let amp = unstable_amplitude(params);
            let setup = unstable_setup(&params)?;
            let c = coefficient_matrix(
                &amp,
                &setup.basis1,
                &setup.basis2,
                setup.m0,
                setup.n0,
                &setup.rule,
            )?;
            let d = decompose(&c)?;
            // branch-cut contribution relative to the amplitude peak
            let mut max_cut = 0.0f64;
            let mut max_amp = 0.0f64;
            let probe = 120usize;
            for i in 0..=probe {
                for j in 0..=probe {
                    let pp = i as f64 / probe as f64;
                    let qq = j as f64 / probe as f64;
                    let gauss =
                        (-(pp - qq) * (pp - qq) / (base.sigma_tilde * base.sigma_tilde)).exp();
                    let cut =
                        unstable_icut(pp, qq, t, g, base.m_g, base.m_gamma).norm() * gauss;
                    let full = entangle_core::amplitudes::unstable(
                        pp,
                        qq,
                        t,
                        g,
                        base.m_g,
                        base.m_gamma,
                        base.sigma_tilde,
                        true,
                    )
                    .norm();
                    max_cut = max_cut.max(cut);
                    max_amp = max_amp.max(full);
                }
            }
            rows.push(vec![
                num(t),
                num(g),
                num(schmidt_number(d.lambdas())),
                num(error_d2(amp.norm2(), d.lambdas())),
                num(max_cut / max_amp.max(1e-300)),
            ]);
        }
    }
    Ok(Output::Csv {
        comment: format!("unstable-K Schmidt number over (t, Gamma); {}", p.summary()),
        header: vec![
            "t_tilde".into(),
            "gamma_tilde".into(),
            "K".into(),
            "d2".into(),
            "icut_ratio".into(),
        ],
        rows,
    })
}

fn delta_spectrum(ctx: &Context) -> Result<Output, CliError> {
    let p = &ctx.params;
    let nmax = p.usize("nmax", 20)?;
    let mut rows = Vec::new();
    for n in 1..=nmax as u64 {
        rows.push(vec![
            n.to_string(),
            num(1.0),
            num(entangle_core::cv::truncated_delta_entropy(n)?),
        ]);
    }
    Ok(Output::Csv {
        comment: format!(
            "delta-spectrum: degenerate unit weights, truncated entropy log2(N); {}",
            p.summary()
        ),
        header: vec!["n_terms".into(), "lambda".into(), "entropy".into()],
        rows,
    })
}

fn werner_boundary(ctx: &Context) -> Result<Output, CliError> {
    let p = &ctx.params;
    let w2m = p.f64("w_over_2m", 0.1)?;
    let amax = p.f64("alpha_max", 20.0)?;
    let n = p.usize("points", 101)?;
    let mut rows = Vec::new();
    for k in 0..n {
        let alpha = amax * k as f64 / (n - 1) as f64;
        let nz = nz_prime(&BoostParams {
            w_over_2m: w2m,
            alpha,
        })?;
        rows.push(vec![num(alpha), num(nz), num(distill_boundary(nz))]);
    }
    Ok(Output::Csv {
        comment: format!("werner-boundary N'_z vs rapidity; {}", p.summary()),
        header: vec!["alpha".into(), "nz_prime".into(), "boundary_F".into()],
        rows,
    })
}

fn magnetic_channel(ctx: &Context) -> Result<Output, CliError> {
    let p = &ctx.params;
    let base = MagneticChannelParams {
        m: p.f64("m", 100.0)?,
        p0: p.f64("p0", 10.0)?,
        sigma: p.f64("sigma", 2.0)?,
        l: p.f64("l", 3.0)?,
        gamma_b0: p.f64("gamma_b0", 0.2)?,
    };
    let sweep = p.string("sweep", "gamma_b0")?;
    let n = p.usize("points", 41)?;
    let (lo, hi) = match sweep.as_str() {
        "gamma_b0" => (p.f64("from", 0.0)?, p.f64("to", 0.4)?),
        "l" => (p.f64("from", 0.5)?, p.f64("to", 6.0)?),
        other => {
            return Err(CliError::Param(format!(
                "sweep must be gamma_b0 or l, got {other:?}"
            )))
        }
    };
    let mut rows = Vec::new();
    for k in 0..n {
        let x = lo + (hi - lo) * k as f64 / (n - 1) as f64;
        let ch = match sweep.as_str() {
            "gamma_b0" => MagneticChannelParams {
                gamma_b0: x,
                ..base
            },
            _ => MagneticChannelParams { l: x, ..base },
        };
        rows.push(vec![num(x), num(fermion_negativity(&ch))]);
    }
    Ok(Output::Csv {
        comment: format!("magnetic-channel negativity sweep; {}", p.summary()),
        header: vec![sweep, "N".into()],
        rows,
    })
}

fn optical_channel(ctx: &Context) -> Result<Output, CliError> {
    let p = &ctx.params;
    let base = OpticalChannelParams {
        p0: p.f64("p0", 10.0)?,
        sigma: p.f64("sigma", 2.0)?,
        w0: p.f64("w0", 10.0)?,
        btilde_l: 0.0,
        pole_window_rel: p.f64("pole_window_rel", 1e-3)?,
    };
    let n = p.usize("points", 31)?;
    let (lo, hi) = (p.f64("from", 0.0)?, p.f64("to", 6.0)?);
    let mut rows = Vec::new();
    for k in 0..n {
        let bl = lo + (hi - lo) * k as f64 / (n - 1) as f64;
        let ch = OpticalChannelParams {
            btilde_l: bl,
            ..base
        };
        rows.push(vec![num(bl), num(photon_negativity(&ch))]);
    }
    Ok(Output::Csv {
        comment: format!("optical-channel negativity vs BL; {}", p.summary()),
        header: vec!["btilde_l".into(), "N".into()],
        rows,
    })
}

fn spinmom(ctx: &Context) -> Result<Output, CliError> {
    let p = &ctx.params;
    let n = p.usize("points", 61)?;
    let theta1 = p.f64("theta1", 0.0)?;
    let mut rows = Vec::new();
    for k in 0..n {
        let dt = std::f64::consts::FRAC_PI_2 * k as f64 / (n - 1) as f64;
        let neg = spinmom_negativity(&SpinMomentumCoupling::Bimodal(theta1, theta1 + dt))?;
        rows.push(vec![num(dt), num(neg)]);
    }
    Ok(Output::Csv {
        comment: format!("spinmom bimodal negativity vs angle offset; {}", p.summary()),
        header: vec!["delta_theta".into(), "N".into()],
        rows,
    })
}

fn scattering(ctx: &Context) -> Result<Output, CliError> {
    let p = &ctx.params;
    let n = p.usize("points", 90)?;
    let mut rows = Vec::new();
    for k in 1..=n {
        let t = std::f64::consts::FRAC_PI_2 * k as f64 / n as f64;
        rows.push(vec![num(t), num(scatter_entropy(t)), num(bell_f(t))]);
    }
    Ok(Output::Csv {
        comment: format!(
            "scattering entropy and Bell combination vs angle; theta_c={}; {}",
            num(critical_angle()),
            p.summary()
        ),
        header: vec!["theta".into(), "S".into(), "F".into()],
        rows,
    })
}

fn two_atom(ctx: &Context) -> Result<Output, CliError> {
    let p = &ctx.params;
    let nmax = p.usize("nmax", 6)?;
    let mut rows = Vec::new();
    for n in 2..=nmax {
        let raw = two_atom_state(n)?;
        let s_raw = entropy(&schmidt_finite(&raw, &[0])?.lambdas);
        let p_star = 1.0 / (n as f64 - 1.0);
        let filt = filtered_two_atom_state(n, p_star)?;
        let s_filt = entropy(&schmidt_finite(&filt, &[0])?.lambdas);
        rows.push(vec![n.to_string(), num(s_raw), num(p_star), num(s_filt)]);
    }
    Ok(Output::Csv {
        comment: format!(
            "two-atom entropies: symmetric detection and optimally filtered; {}",
            p.summary()
        ),
        header: vec![
            "N".into(),
            "entropy".into(),
            "p_optimal".into(),
            "entropy_filtered".into(),
        ],
        rows,
    })
}

fn classify(ctx: &Context) -> Result<Output, CliError> {
    let psi = ctx.load_state()?;
    let p = &ctx.params;
    let rank_tol = p.f64("rank_tol", DEFAULT_RANK_TOL)?;
    let deg_tol = p.f64("degeneracy_tol", DEFAULT_DEGENERACY_TOL)?;
    let ilo_samples = p.usize("ilo_samples", 0)?;
    let dims = psi.dims().to_vec();
    let report = if dims.len() == 2 {
        let k = classify_bipartite(&psi, rank_tol)?;
        json!({
            "kind": "bipartite",
            "label": format!("Psi_{k}+"),
            "rank": k,
            "tolerance": rank_tol,
        })
    } else if dims == [2, 2, 2] {
        let rep = classify_three_qubit(&psi, rank_tol, deg_tol)?;
        let mut base = serde_json::to_value(&rep).map_err(|e| CliError::Numerical(e.to_string()))?;
        base["label"] = json!(rep.class.label());
        if ilo_samples > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let mut agree = 0usize;
            for _ in 0..ilo_samples {
                let perturbed = random_ilo_image(&psi, &mut rng);
                if let Ok(r2) = classify_three_qubit(&perturbed, rank_tol, deg_tol) {
                    if r2.class == rep.class {
                        agree += 1;
                    }
                }
            }
            base["ilo_agreement"] = json!(format!("{agree}/{ilo_samples}"));
            base["seed"] = json!(ctx.seed);
        }
        base
    } else if dims == [2, 2, 2, 2] {
        let rep = four_qubit_probe(&psi, rank_tol)?;
        let mut base = serde_json::to_value(&rep).map_err(|e| CliError::Numerical(e.to_string()))?;
        base["label"] = json!(rep.tag);
        base
    } else {
        return Err(CliError::Param(format!(
            "classification supports 2 subsystems, 3 qubits or 4 qubits; got dims {dims:?}"
        )));
    };
    Ok(Output::Json(report))
}

fn random_ilo_image(psi: &PureState, rng: &mut ChaCha8Rng) -> PureState {
    let normal = |rng: &mut ChaCha8Rng| {
        let u1: f64 = rng.random::<f64>().max(1e-12);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut mats = Vec::new();
    for _ in 0..3 {
        mats.push([
            [
                Complex64::new(normal(rng), normal(rng)),
                Complex64::new(normal(rng), normal(rng)),
            ],
            [
                Complex64::new(normal(rng), normal(rng)),
                Complex64::new(normal(rng), normal(rng)),
            ],
        ]);
    }
    let a = psi.amps();
    let mut out = vec![Complex64::new(0.0, 0.0); 8];
    for i in 0..8 {
        let (b0, b1, b2) = ((i >> 2) & 1, (i >> 1) & 1, i & 1);
        for j in 0..8 {
            let (c0, c1, c2) = ((j >> 2) & 1, (j >> 1) & 1, j & 1);
            out[i] += mats[0][b0][c0] * mats[1][b1][c1] * mats[2][b2][c2] * a[j];
        }
    }
    PureState::new_unnormalized(out, vec![2, 2, 2])
        .expect("shape preserved")
        .normalized()
}

fn parse_cut(cut: Option<&str>, n: usize) -> Result<Vec<usize>, CliError> {
    match cut {
        None => Ok(vec![0]),
        Some(text) => {
            let block: Vec<usize> = text
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| CliError::Param(format!("bad --cut entry {s:?}")))
                })
                .collect::<Result<_, _>>()?;
            if block.iter().any(|&b| b >= n) {
                return Err(CliError::Param(format!(
                    "--cut indices must be below {n}"
                )));
            }
            Ok(block)
        }
    }
}

fn schmidt(ctx: &Context) -> Result<Output, CliError> {
    let psi = ctx.load_state()?;
    let block = parse_cut(ctx.cut, psi.dims().len())?;
    let s = schmidt_finite(&psi, &block)?;
    Ok(Output::Json(json!({
        "cut": block,
        "lambdas": s.lambdas,
        "entropy": entropy(&s.lambdas),
        "schmidt_number": schmidt_number(&s.lambdas),
    })))
}

fn mps_decompose(ctx: &Context) -> Result<Output, CliError> {
    let psi = ctx.load_state()?;
    let tol = ctx.params.f64("tol", 1e-12)?;
    let mps = vidal_decompose(&psi, tol)?;
    Ok(Output::Json(mps.to_json()))
}

fn clone_experiment(ctx: &Context) -> Result<Output, CliError> {
    let p = &ctx.params;
    let m = p.usize("m", 3)?;
    let mode = match p.string("mode", "universal")?.as_str() {
        "universal" => CloningMode::Universal,
        "phase_covariant" | "phase-covariant" => CloningMode::PhaseCovariant,
        other => {
            return Err(CliError::Param(format!(
                "mode must be universal or phase_covariant, got {other:?}"
            )))
        }
    };
    let psi = match ctx.state_path {
        Some(_) => ctx.load_state()?,
        None => match mode {
            CloningMode::Universal => PureState::basis_state(0, vec![2])
                .map_err(|e| CliError::Numerical(e.to_string()))?,
            CloningMode::PhaseCovariant => PureState::new(
                vec![
                    Complex64::new(1.0 / 2f64.sqrt(), 0.0),
                    Complex64::new(1.0 / 2f64.sqrt(), 0.0),
                ],
                vec![2],
            )
            .map_err(|e| CliError::Numerical(e.to_string()))?,
        },
    };
    if psi.dims() != [2] {
        return Err(CliError::Param("clone input must be a single qubit".into()));
    }
    let out = sequential_clone(&psi, m, mode)?;
    let target = match mode {
        CloningMode::Universal => gm_target(&psi, m)?,
        CloningMode::PhaseCovariant => {
            let phase = (psi.amps()[1] / psi.amps()[0]).arg();
            pcc_target(phase, m)?
        }
    };
    let overlaps: Vec<f64> = out
        .branch_states
        .iter()
        .map(|s| s.fidelity(&target))
        .collect();
    let fids = clone_fidelities(&out.output, &psi, m)?;
    let iso = universal_isometries(m, mode)?;
    let mut report = json!({
        "clones": m,
        "mode": match mode { CloningMode::Universal => "universal", CloningMode::PhaseCovariant => "phase_covariant" },
        "ancilla_dimension": iso.ancilla_dimension(),
        "isometry_residual": out.isometry_residual,
        "decoupling_residual": out.decoupling_residual,
        "branch_probabilities": out.branch_probabilities,
        "branch_target_overlaps": overlaps,
        "clone_fidelities": fids,
        "expected_universal_fidelity": (2.0 * m as f64 + 1.0) / (3.0 * m as f64),
    });
    if p.bool("include_isometries", false)? {
        report["isometries"] = iso.to_json();
    }
    Ok(Output::Json(report))
}
