//! Inductive SLOCC classification from the singular value decomposition of
//! coefficient matrices: bipartite classes by rank, the full nine-case
//! three-qubit classifier, and four-qubit right-singular-subspace structure
//! probes.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::numerics::svd;
pub use crate::numerics::DEFAULT_RANK_TOL;
use crate::qudit::PureState;
use crate::{invalid_argument, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative spectral-gap threshold below which the pencil spectrum
/// `sigma(W1^{-1} W2)` counts as degenerate.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-6;

/// The six genuine-or-degenerate SLOCC classes of three qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ThreeQubitClass {
    /// Full product state `000`.
    Product,
    /// Qubit 1 factors out: `0_1 Psi+_23`.
    Factor1,
    /// Qubit 2 factors out: `0_2 Psi+_13`.
    Factor2,
    /// Qubit 3 factors out: `0_3 Psi+_12`.
    Factor3,
    Ghz,
    W,
}

impl ThreeQubitClass {
    pub fn label(&self) -> &'static str {
        match self {
            ThreeQubitClass::Product => "000",
            ThreeQubitClass::Factor1 => "0_1 Psi_23",
            ThreeQubitClass::Factor2 => "0_2 Psi_13",
            ThreeQubitClass::Factor3 => "0_3 Psi_12",
            ThreeQubitClass::Ghz => "GHZ",
            ThreeQubitClass::W => "W",
        }
    }

    /// Compact token used inside four-qubit structure tags.
    fn token(&self) -> &'static str {
        match self {
            ThreeQubitClass::Product => "000",
            ThreeQubitClass::Factor1 => "0kPsi",
            ThreeQubitClass::Factor2 => "0kPsi",
            ThreeQubitClass::Factor3 => "0kPsi",
            ThreeQubitClass::Ghz => "GHZ",
            ThreeQubitClass::W => "W",
        }
    }

    pub fn is_genuine(&self) -> bool {
        matches!(self, ThreeQubitClass::Ghz | ThreeQubitClass::W)
    }
}

/// Diagnostics accompanying a three-qubit classification.
#[derive(Debug, Clone, Serialize)]
pub struct ThreeQubitReport {
    pub class: ThreeQubitClass,
    /// Numerical ranks of the partition matrices C^(1), C^(2), C^(3).
    pub ranks: [usize; 3],
    /// Ranks of the reshaped right-singular-vector matrices (genuine states).
    pub w_ranks: Option<[usize; 2]>,
    /// Spectrum of `W1^{-1} W2` as `[re, im]` pairs (genuine states).
    pub pencil_spectrum: Option<Vec<[f64; 2]>>,
    pub rank_tol: f64,
    pub degeneracy_tol: f64,
}

/// Number of singular values above `tol * sigma_1`, erroring when one sits in
/// the ambiguity window `[tol/3, 3 tol]` relative to `sigma_1`.
fn guarded_rank(m: &Array2<Complex64>, tol: f64) -> Result<usize> {
    let s = svd(m)?.singular_values;
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    for &sv in &s {
        let ratio = sv / top;
        if ratio > tol / 3.0 && ratio < 3.0 * tol {
            return Err(Error::AmbiguousRank { ratio });
        }
    }
    Ok(s.iter().filter(|&&sv| sv > tol * top).count())
}

/// Bipartite SLOCC class on `d1 x d2`: the class index is the numerical rank
/// of the coefficient matrix (`Psi_k^+` with `k = rank`).
pub fn classify_bipartite(psi: &PureState, tol: f64) -> Result<usize> {
    if psi.dims().len() != 2 {
        return invalid_argument("classify_bipartite expects exactly two subsystems");
    }
    let c = psi.coefficient_matrix(&[0])?;
    guarded_rank(&c, tol)
}

/// Reshapes a vector `w = e1 (x) w_1 + e2 (x) w_2` of `C^2 (x) C^2` into the
/// 2x2 matrix `W = [w_1 w_2]`.
pub fn w_matrix(w: &[Complex64]) -> Result<Array2<Complex64>> {
    if w.len() != 4 {
        return invalid_argument("w_matrix expects a two-qubit vector of length 4");
    }
    Ok(ndarray::array![[w[0], w[2]], [w[1], w[3]]])
}

/// The two reshaped right-singular-vector matrices of `C^(1)` for a genuinely
/// rank-2 three-qubit state, with their guarded ranks.
pub fn w_matrices(
    psi: &PureState,
    tol: f64,
) -> Result<(Array2<Complex64>, Array2<Complex64>, [usize; 2])> {
    if psi.dims() != [2, 2, 2] {
        return invalid_argument("w_matrices expects a three-qubit state");
    }
    let c = psi.coefficient_matrix(&[0])?;
    if guarded_rank(&c, tol)? != 2 {
        return invalid_argument("w_matrices requires rank(C^(1)) = 2");
    }
    let s = svd(&c)?;
    let w1 = w_matrix(&s.right_vector(0))?;
    let w2 = w_matrix(&s.right_vector(1))?;
    let r1 = guarded_rank(&w1, tol)?;
    let r2 = guarded_rank(&w2, tol)?;
    Ok((w1, w2, [r1, r2]))
}

fn eig2(m: &Array2<Complex64>) -> [Complex64; 2] {
    let t = m[(0, 0)] + m[(1, 1)];
    let d = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = (t * t - 4.0 * d).sqrt();
    [(t + disc) / 2.0, (t - disc) / 2.0]
}

fn inv2(m: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if det.norm() == 0.0 {
        return Err(Error::Numerical("singular 2x2 matrix".into()));
    }
    Ok(ndarray::array![
        [m[(1, 1)] / det, -m[(0, 1)] / det],
        [-m[(1, 0)] / det, m[(0, 0)] / det]
    ])
}

fn mul2(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let mut out = Array2::from_elem((2, 2), ZERO);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = a[(i, 0)] * b[(0, j)] + a[(i, 1)] * b[(1, j)];
        }
    }
    out
}

/// Full three-qubit classifier: partition ranks first, then the structure of
/// the right singular subspace of `C^(1)` through the W-matrix ranks and the
/// degeneracy of `sigma(W1^{-1} W2)`.
pub fn classify_three_qubit(
    psi: &PureState,
    rank_tol: f64,
    degeneracy_tol: f64,
) -> Result<ThreeQubitReport> {
    if psi.dims() != [2, 2, 2] {
        return invalid_argument("classify_three_qubit expects a three-qubit state");
    }
    let mut ranks = [0usize; 3];
    for (k, r) in ranks.iter_mut().enumerate() {
        *r = guarded_rank(&psi.coefficient_matrix(&[k])?, rank_tol)?;
    }
    let report = |class, w_ranks, pencil_spectrum| ThreeQubitReport {
        class,
        ranks,
        w_ranks,
        pencil_spectrum,
        rank_tol,
        degeneracy_tol,
    };
    match ranks {
        [1, 1, 1] => return Ok(report(ThreeQubitClass::Product, None, None)),
        [1, 2, 2] => return Ok(report(ThreeQubitClass::Factor1, None, None)),
        [2, 1, 2] => return Ok(report(ThreeQubitClass::Factor2, None, None)),
        [2, 2, 1] => return Ok(report(ThreeQubitClass::Factor3, None, None)),
        [2, 2, 2] => {}
        _ => {
            return Err(Error::InvalidInput(format!(
                "inconsistent partition ranks {ranks:?}"
            )))
        }
    }
    let (mut w1, mut w2, mut w_ranks) = w_matrices(psi, rank_tol)?;
    if w_ranks == [1, 1] {
        return Ok(report(ThreeQubitClass::Ghz, Some(w_ranks), None));
    }
    // The theorem's remaining cases assume the first member invertible; a
    // swap always provides one for genuinely tripartite states.
    if w_ranks[0] == 1 && w_ranks[1] == 2 {
        std::mem::swap(&mut w1, &mut w2);
        w_ranks.swap(0, 1);
    }
    let spectrum = eig2(&mul2(&inv2(&w1)?, &w2));
    let gap = (spectrum[0] - spectrum[1]).norm();
    let scale = spectrum[0].norm().max(1.0);
    let degenerate = gap <= degeneracy_tol * scale;
    let spec_json = Some(spectrum.iter().map(|z| [z.re, z.im]).collect());
    let class = if degenerate {
        ThreeQubitClass::W
    } else {
        ThreeQubitClass::Ghz
    };
    Ok(report(class, Some(w_ranks), spec_json))
}

/// Classifier with the default tolerances.
pub fn classify_three_qubit_default(psi: &PureState) -> Result<ThreeQubitReport> {
    classify_three_qubit(psi, DEFAULT_RANK_TOL, DEFAULT_DEGENERACY_TOL)
}

/// Projective parameters `(alpha : beta)` at which `alpha W1 + beta W2` drops
/// to rank one: the roots of `det(alpha W1 + beta W2) = 0`.
///
/// Returns 0, 1 or 2 isolated points; an identically vanishing determinant
/// (the whole pencil singular) yields the empty list.
pub fn pencil_product_points(
    w1: &Array2<Complex64>,
    w2: &Array2<Complex64>,
    tol: f64,
) -> Result<Vec<(Complex64, Complex64)>> {
    if w1.dim() != (2, 2) || w2.dim() != (2, 2) {
        return invalid_argument("pencil_product_points expects 2x2 matrices");
    }
    let det = |m: &Array2<Complex64>| m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let a = det(w1);
    let c = det(w2);
    let b = w1[(0, 0)] * w2[(1, 1)] + w2[(0, 0)] * w1[(1, 1)]
        - w1[(0, 1)] * w2[(1, 0)]
        - w2[(0, 1)] * w1[(1, 0)];
    let scale = w1.iter().chain(w2.iter()).map(|z| z.norm()).fold(0.0f64, f64::max);
    let scale2 = scale * scale;
    let roots = solve_homogeneous_quadratic(a, b, c, tol * scale2.max(1e-300));
    Ok(roots.into_iter().map(normalize_projective).collect())
}

/// Roots `(alpha : beta)` of `a alpha^2 + b alpha beta + c beta^2 = 0`.
fn solve_homogeneous_quadratic(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    eps: f64,
) -> Vec<(Complex64, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    let zero = ZERO;
    let (na, nb, nc) = (a.norm(), b.norm(), c.norm());
    if na <= eps && nb <= eps && nc <= eps {
        // identically zero: the whole pencil is singular, no isolated points
        return vec![];
    }
    if na <= eps {
        // beta (b alpha + c beta) = 0
        let mut pts = vec![(one, zero)];
        if nb > eps {
            pts.push((c, -b));
        }
        return pts;
    }
    let disc = b * b - 4.0 * a * c;
    let disc_scale = (nb * nb).max(4.0 * na * nc);
    if disc.norm() <= eps * disc_scale.max(eps) {
        return vec![(-b / (2.0 * a), one)];
    }
    let sq = disc.sqrt();
    vec![((-b + sq) / (2.0 * a), one), ((-b - sq) / (2.0 * a), one)]
}

fn normalize_projective((alpha, beta): (Complex64, Complex64)) -> (Complex64, Complex64) {
    let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    let (mut a, mut b) = (alpha / n, beta / n);
    let lead = if a.norm() > 1e-12 { a } else { b };
    let phase = lead / lead.norm();
    a *= phase.conj();
    b *= phase.conj();
    (a, b)
}

/// A four-qubit structure probe: the span type of the right singular
/// subspace of `C_{1|234}`, named by the classes of its exceptional pencil
/// members plus the generic member class.
#[derive(Debug, Clone, Serialize)]
pub struct FourQubitReport {
    /// Canonical tag, e.g. `span(000,000)` (the GHZ4 type), `span(000,W)`
    /// (W4), `span(0kPsi,0kPsi)` (Phi4), or `factor(...)` when the right
    /// singular subspace is one-dimensional.
    pub tag: String,
    pub dim_w: usize,
    /// Class of the generic pencil member (two-dimensional case).
    pub generic: Option<ThreeQubitClass>,
    /// Classes at the exceptional (isolated lower-class) pencil points.
    pub exceptional: Vec<ThreeQubitClass>,
    pub rank_tol: f64,
}

/// Probes the right-singular-subspace structure of a four-qubit state by
/// classifying its generators, the exact rank-drop pencil points and 64
/// deterministic pencil samples.
pub fn four_qubit_probe(psi: &PureState, rank_tol: f64) -> Result<FourQubitReport> {
    if psi.dims() != [2, 2, 2, 2] {
        return invalid_argument("four_qubit_probe expects a four-qubit state");
    }
    let c = psi.coefficient_matrix(&[0])?;
    let rank = guarded_rank(&c, rank_tol)?;
    let s = svd(&c)?;
    if rank <= 1 {
        let w1 = s.right_vector(0);
        let inner = PureState::new_unnormalized(w1, vec![2, 2, 2])?.normalized();
        let class = classify_three_qubit(&inner, rank_tol, DEFAULT_DEGENERACY_TOL)?.class;
        return Ok(FourQubitReport {
            tag: format!("factor(1|234): {}", class.label()),
            dim_w: 1,
            generic: None,
            exceptional: vec![class],
            rank_tol,
        });
    }
    let w1 = s.right_vector(0);
    let w2 = s.right_vector(1);
    let member = |alpha: Complex64, beta: Complex64| -> Result<PureState> {
        let amps: Vec<Complex64> = w1
            .iter()
            .zip(&w2)
            .map(|(&x, &y)| alpha * x + beta * y)
            .collect();
        Ok(PureState::new_unnormalized(amps, vec![2, 2, 2])?.normalized())
    };
    let classify = |alpha: Complex64, beta: Complex64| -> Option<ThreeQubitClass> {
        member(alpha, beta)
            .and_then(|m| classify_three_qubit(&m, rank_tol, DEFAULT_DEGENERACY_TOL))
            .map(|r| r.class)
            .ok()
    };

    // Exact rank-drop points: roots where some partition matrix of the
    // pencil member loses rank (all six 2x2 minors of the 2x4 matrix vanish).
    let mut special: Vec<(Complex64, Complex64)> = vec![
        (Complex64::new(1.0, 0.0), ZERO),
        (ZERO, Complex64::new(1.0, 0.0)),
    ];
    for part in 0..3usize {
        let s1 = PureState::new_unnormalized(w1.clone(), vec![2, 2, 2])?;
        let s2 = PureState::new_unnormalized(w2.clone(), vec![2, 2, 2])?;
        let c1 = s1.coefficient_matrix(&[part])?;
        let c2 = s2.coefficient_matrix(&[part])?;
        let pairs: Vec<(usize, usize)> =
            (0..4).flat_map(|i| ((i + 1)..4).map(move |j| (i, j))).collect();
        let minor = |m: &Array2<Complex64>, n: &Array2<Complex64>, (i, j): (usize, usize)| {
            // det of columns (i, j) mixing rows from m (top) and n (bottom)
            m[(0, i)] * n[(1, j)] - m[(0, j)] * n[(1, i)]
        };
        // quadratic coefficients of each minor in (alpha, beta)
        let coeffs: Vec<(Complex64, Complex64, Complex64)> = pairs
            .iter()
            .map(|&p| {
                let qa = minor(&c1, &c1, p);
                let qc = minor(&c2, &c2, p);
                let qb = minor(&c1, &c2, p) + minor(&c2, &c1, p);
                (qa, qb, qc)
            })
            .collect();
        let scale = coeffs
            .iter()
            .flat_map(|&(x, y, z)| [x.norm(), y.norm(), z.norm()])
            .fold(0.0f64, f64::max);
        if scale == 0.0 {
            continue;
        }
        // roots of the first non-degenerate minor, validated on all minors
        for &(qa, qb, qc) in &coeffs {
            if qa.norm().max(qb.norm()).max(qc.norm()) < 1e-10 * scale {
                continue;
            }
            for root in solve_homogeneous_quadratic(qa, qb, qc, 1e-12 * scale) {
                let (al, be) = normalize_projective(root);
                let all_vanish = coeffs.iter().all(|&(xa, xb, xc)| {
                    (xa * al * al + xb * al * be + xc * be * be).norm() < 1e-8 * scale
                });
                if all_vanish {
                    special.push((al, be));
                }
            }
            break;
        }
    }
    // dedupe projectively
    let mut uniq: Vec<(Complex64, Complex64)> = Vec::new();
    for p in special {
        let is_dup = uniq.iter().any(|q| {
            let overlap = (p.0.conj() * q.0 + p.1.conj() * q.1).norm();
            overlap > 1.0 - 1e-8
        });
        if !is_dup {
            uniq.push(p);
        }
    }

    // Generic class from 64 deterministic pencil samples (16 mixing angles x
    // 4 relative phases).
    let mut counts: std::collections::BTreeMap<ThreeQubitClass, usize> = Default::default();
    for j in 0..64usize {
        let angle = std::f64::consts::PI * ((j % 16) as f64 + 0.5) / 16.0;
        let phase = std::f64::consts::FRAC_PI_4 * ((j / 16) as f64);
        let alpha = Complex64::new(angle.cos(), 0.0);
        let beta = Complex64::from_polar(angle.sin(), phase);
        if let Some(cl) = classify(alpha, beta) {
            *counts.entry(cl).or_insert(0) += 1;
        }
    }
    let generic = counts
        .iter()
        .max_by_key(|&(_, n)| *n)
        .map(|(&cl, _)| cl)
        .ok_or_else(|| Error::Numerical("no pencil sample classified".into()))?;

    let mut exceptional: Vec<ThreeQubitClass> = uniq
        .iter()
        .filter_map(|&(al, be)| classify(al, be))
        .filter(|cl| *cl != generic)
        .collect();
    exceptional.sort();

    let tag_core = match exceptional.len() {
        0 => format!("span({},{})", generic.token(), generic.token()),
        1 => format!("span({},{})", exceptional[0].token(), generic.token()),
        _ => format!(
            "span({},{})",
            exceptional[0].token(),
            exceptional[1].token()
        ),
    };
    let tag = if generic.is_genuine() {
        tag_core
    } else {
        format!("degenerate[{tag_core}; generic {}]", generic.label())
    };
    Ok(FourQubitReport {
        tag,
        dim_w: 2,
        generic: Some(generic),
        exceptional,
        rank_tol,
    })
}

/// Upper bound on the number of SLOCC classes for `N + 1` parties given
/// `M(N)` classes for `N` parties: `M (M + 2N + 3) / 2`.
pub fn class_count_bound(m_n: u64, n: u64) -> u64 {
    let m = m_n as u128;
    let val = m * (m + 2 * (n as u128) + 3) / 2;
    val as u64
}

/// General SLOCC label across the sizes this crate classifies.
#[derive(Debug, Clone, Serialize)]
pub enum SloccClass {
    /// Bipartite class `Psi_k^+` with `k` the coefficient-matrix rank.
    Bipartite(usize),
    ThreeQubit(ThreeQubitClass),
    /// Four-qubit structure tag.
    FourQubit(String),
}
