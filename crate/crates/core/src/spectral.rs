//! Spectral analysis of the reduced matrices.
//!
//! Two independent routes are kept side by side: a closed-form route that
//! deflates the known -1 root of the printed characteristic polynomial and
//! solves the remaining palindromic quartic by the y = lambda + 1/lambda
//! substitution, and a generic small-matrix eigensolver on the derived
//! matrix. Reports carry both, their agreement, asymptotic eigenvalues and
//! eigenvectors, and the weight p_plus of the fast branch in the initial
//! state.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{build_three_star, GraphFamily};
use crate::reduced::{derive_reduced_matrix, three_star_basis, ReducedModel, ReducedParameters};
use crate::tolerances;

/// Monic degree-5 characteristic polynomial, leading coefficient first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharPoly {
    pub coefficients: [f64; 6],
}

impl CharPoly {
    /// Horner evaluation at a complex point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Synthetic division by (lambda + 1); the remainder cancels
    /// algebraically and is asserted tiny.
    pub fn deflate_minus_one(&self) -> [f64; 5] {
        let a = &self.coefficients;
        let mut q = [0.0; 5];
        let mut carry = 0.0;
        for i in 0..5 {
            q[i] = a[i] - carry;
            carry = q[i];
        }
        let remainder = a[5] - carry;
        debug_assert!(remainder.abs() < 1e-9, "remainder {remainder}");
        q
    }
}

/// Coefficients [1, -c4, c3, c3, -c4, 1] with c4 = 3 - (3m-1)t and
/// c3 = 2 - (3m-1)t + 4(m-1)t^2.
pub fn char_poly(m: usize, t: f64) -> Result<CharPoly> {
    if m < 2 {
        return Err(Error::invalid(format!(
            "characteristic polynomial needs shared parameter >= 2, got {m}"
        )));
    }
    if !(t > 0.0 && t <= 2.0 / 3.0) {
        return Err(Error::invalid(format!(
            "transmission must lie in (0, 2/3], got {t}"
        )));
    }
    let mf = m as f64;
    let c4 = 3.0 - (3.0 * mf - 1.0) * t;
    let c3 = 2.0 - (3.0 * mf - 1.0) * t + 4.0 * (mf - 1.0) * t * t;
    Ok(CharPoly {
        coefficients: [1.0, -c4, c3, c3, -c4, 1.0],
    })
}

/// Numeric characteristic polynomial of a real square matrix via the
/// Faddeev-LeVerrier recurrence; monic, leading coefficient first.
pub fn char_poly_of_matrix(matrix: &DMatrix<f64>) -> Vec<f64> {
    let k = matrix.nrows();
    assert_eq!(k, matrix.ncols(), "square matrix required");
    let mut coeffs = vec![1.0];
    let mut b = DMatrix::<f64>::identity(k, k);
    for i in 1..=k {
        b = matrix * b;
        let c = -b.trace() / i as f64;
        coeffs.push(c);
        for d in 0..k {
            b[(d, d)] += c;
        }
    }
    coeffs
}

/// The two real roots (gamma_plus, gamma_minus) of
/// gamma^2 - 2(3m-1) gamma + 16(m-1) = 0, largest first.
pub fn gamma_pm(m: usize) -> Result<(f64, f64)> {
    if m < 2 {
        return Err(Error::invalid(format!(
            "branch parameters need shared parameter >= 2, got {m}"
        )));
    }
    let mf = m as f64;
    let s = 3.0 * mf - 1.0;
    let disc = (s * s - 16.0 * (mf - 1.0)).sqrt();
    Ok((s + disc, s - disc))
}

/// Exact eigenvalues of the five-dimensional reduced matrix in canonical
/// order [-1, +plus, -plus, +minus, -minus], obtained by deflating the -1
/// root and solving the palindromic quartic through y = lambda + 1/lambda.
pub fn closed_form_eigenvalues(m: usize, t: f64) -> Result<[Complex64; 5]> {
    let poly = char_poly(m, t)?;
    let q = poly.deflate_minus_one();
    // Palindromic quartic [1, a, b, a, 1]: y^2 + a y + (b - 2) = 0.
    let (a, b) = (q[1], q[2]);
    let disc = a * a - 4.0 * (b - 2.0);
    if disc < -1e-12 {
        return Err(Error::numeric(format!(
            "quartic substitution has negative discriminant {disc:.3e}"
        )));
    }
    let root = disc.max(0.0).sqrt();
    // Larger y corresponds to the slow branch (smaller gamma).
    let y_minus_branch = (-a + root) / 2.0;
    let y_plus_branch = (-a - root) / 2.0;
    let mut out = [Complex64::new(-1.0, 0.0); 5];
    for (slot, y) in [(1usize, y_plus_branch), (3, y_minus_branch)] {
        let s = 4.0 - y * y;
        if s < -1e-9 {
            return Err(Error::numeric(format!(
                "eigenvalue parameter y = {y} outside [-2, 2]"
            )));
        }
        let im = s.max(0.0).sqrt() / 2.0;
        out[slot] = Complex64::new(y / 2.0, im);
        out[slot + 1] = Complex64::new(y / 2.0, -im);
    }
    Ok(out)
}

/// Asymptotic eigenvector data of one branch: the positive-phase
/// components x1..x5 (the negative-phase partner is the componentwise
/// conjugate) and the normalization w^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticBranch {
    pub gamma: f64,
    pub w_squared: f64,
    pub x: [Complex64; 5],
}

fn branch_components(m: f64, gamma: f64) -> AsymptoticBranch {
    let x2 = Complex64::new(0.0, 2.0 / gamma.sqrt());
    let x3 = Complex64::new(0.0, (gamma - 4.0) / (2.0 * (gamma * (m - 1.0)).sqrt()));
    let x5 = Complex64::new(-(2f64.sqrt() / gamma) * (gamma - 4.0), 0.0);
    let w_squared = (2.0 * (3.0 * m - 1.0) * gamma - 16.0 * (m - 1.0))
        / (4.0 * (9.0 * m - 11.0) * gamma - 32.0 * (3.0 * m - 5.0));
    AsymptoticBranch {
        gamma,
        w_squared,
        x: [Complex64::new(1.0, 0.0), x2, x3, -x3, x5],
    }
}

/// Large-N eigenvector components for both branches, fast branch first.
pub fn asymptotic_eigenvectors(m: usize) -> Result<(AsymptoticBranch, AsymptoticBranch)> {
    let (gp, gm) = gamma_pm(m)?;
    let mf = m as f64;
    Ok((branch_components(mf, gp), branch_components(mf, gm)))
}

/// Which spectral family a mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeBranch {
    /// The exact -1 eigenvalue of the five-dimensional matrix.
    MinusOne,
    /// Fast branch, phase near sqrt(gamma_plus t / 2).
    GammaPlus,
    /// Slow branch, phase near sqrt(gamma_minus t / 2).
    GammaMinus,
    /// The single rotation pair of the two-star block.
    TwoStar,
}

/// One eigenvalue with its exact vector and asymptotic partner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mode {
    pub branch: ModeBranch,
    /// +1 for the upper-half-plane member of a conjugate pair, -1 for the
    /// lower, 0 for the real eigenvalue.
    pub phase_sign: i8,
    /// Eigenvalue from the generic eigensolver on the derived matrix.
    pub value: Complex64,
    /// Eigenvalue from the deflation route (or 2x2 closed form).
    pub closed_form: Complex64,
    /// Large-N eigenvalue this mode converges to.
    pub asymptotic: Complex64,
    /// |arg(value) - arg(asymptotic)| with wrap-around handled.
    pub phase_error: f64,
    /// Unit eigenvector of the derived matrix, first component aligned to
    /// be real and non-negative.
    pub vector: Vec<Complex64>,
}

/// Asymptotic and numeric weight of the fast branch in the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PPlusReport {
    /// 2 w_plus^2 (sqrt(2/3) + sqrt(1/3) (sqrt(2)/gamma_plus)
    /// (gamma_plus - 4))^2.
    pub asymptotic: f64,
    /// Squared overlap of the exact initial-state coordinates with the
    /// exact gamma_plus eigenvector pair.
    pub numeric: f64,
    /// Prong count of the matrix the numeric value was computed from.
    pub reference_prongs: usize,
}

/// Full spectral description of a reduced model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub parameters: ReducedParameters,
    /// Canonical order: [-1, +plus, -plus, +minus, -minus] for the
    /// five-dimensional matrix; [+, -] for the two-star block.
    pub modes: Vec<Mode>,
    /// (gamma_plus, gamma_minus); three-star only.
    pub gamma: Option<(f64, f64)>,
    /// Largest distance between closed-form and eigensolver eigenvalues.
    pub route_agreement: f64,
    /// Largest coefficient gap between the numeric characteristic
    /// polynomial of the derived matrix and the printed closed form;
    /// three-star only.
    pub char_poly_deviation: Option<f64>,
    pub asymptotic_branches: Option<(AsymptoticBranch, AsymptoticBranch)>,
    pub p_plus: Option<PPlusReport>,
}

fn real_part_of(matrix: &DMatrix<Complex64>) -> Result<DMatrix<f64>> {
    let worst = matrix.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
    if worst > 1e-12 {
        return Err(Error::numeric(format!(
            "derived matrix has unexpected imaginary parts up to {worst:.3e}"
        )));
    }
    Ok(DMatrix::from_fn(matrix.nrows(), matrix.ncols(), |i, j| {
        matrix[(i, j)].re
    }))
}

/// Pairs each target eigenvalue with the nearest unused candidate;
/// returns the matched candidates in target order and the worst distance.
fn pair_eigenvalues(
    targets: &[Complex64],
    candidates: &[Complex64],
) -> Result<(Vec<Complex64>, f64)> {
    let mut used = vec![false; candidates.len()];
    let mut matched = Vec::with_capacity(targets.len());
    let mut worst: f64 = 0.0;
    for &t in targets {
        let mut best: Option<(usize, f64)> = None;
        for (j, &c) in candidates.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (t - c).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        let (j, d) = best.ok_or_else(|| Error::numeric("eigenvalue pairing exhausted"))?;
        used[j] = true;
        worst = worst.max(d);
        matched.push(candidates[j]);
    }
    Ok((matched, worst))
}

fn inverse_iteration(matrix: &DMatrix<f64>, value: Complex64) -> Result<Vec<Complex64>> {
    let k = matrix.nrows();
    let complex = DMatrix::from_fn(k, k, |i, j| Complex64::new(matrix[(i, j)], 0.0));
    // Tiny shift keeps the shifted matrix invertible at an exact eigenvalue.
    let shift = value + Complex64::new(1e-11, 1e-11);
    let mut shifted = complex.clone();
    for d in 0..k {
        shifted[(d, d)] -= shift;
    }
    let lu = shifted.lu();
    let mut v = DVector::from_element(k, Complex64::new(1.0, 0.0)).unscale((k as f64).sqrt());
    for _ in 0..4 {
        v = lu
            .solve(&v)
            .ok_or_else(|| Error::numeric("inverse iteration hit a singular system"))?;
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::numeric("inverse iteration collapsed to zero"));
        }
        v = v.unscale(n);
    }
    let residual = (&complex * &v - v.clone() * value).norm();
    if residual > tolerances::EIGENVECTOR_RESIDUAL {
        return Err(Error::numeric(format!(
            "eigenvector residual {residual:.3e} above tolerance"
        )));
    }
    Ok(align_phase(v.iter().copied().collect()))
}

/// Rotates a vector's global phase so its first substantial component is
/// real and positive (the first component when it is not negligible).
fn align_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let anchor = if v[0].norm() > 1e-8 {
        v[0]
    } else {
        *v.iter()
            .max_by(|a, b| a.norm().partial_cmp(&b.norm()).expect("finite norms"))
            .expect("non-empty vector")
    };
    let phase = anchor / anchor.norm();
    for c in &mut v {
        *c /= phase;
    }
    v
}

fn angle_gap(a: Complex64, b: Complex64) -> f64 {
    (a * b.conj()).arg().abs()
}

/// Exact initial-state coordinates in the five-vector basis.
fn initial_coordinates(prongs: usize, shared: usize) -> [f64; 5] {
    let (n, m) = (prongs as f64, shared as f64);
    [
        (2.0 * (n - m) / (3.0 * n)).sqrt(),
        (2.0 / (3.0 * n)).sqrt(),
        (2.0 * (m - 1.0) / (3.0 * n)).sqrt(),
        -(2.0 * (m - 1.0) / (3.0 * n)).sqrt(),
        -((n - 2.0 * m + 2.0) / (3.0 * n)).sqrt(),
    ]
}

fn p_plus_from_modes(params: &ReducedParameters, modes: &[Mode], gamma_plus: f64) -> PPlusReport {
    let shared = params.shared.expect("three-star parameters");
    let coords = initial_coordinates(params.prongs, shared);
    let numeric = modes
        .iter()
        .filter(|mode| mode.branch == ModeBranch::GammaPlus)
        .map(|mode| {
            mode.vector
                .iter()
                .zip(coords)
                .map(|(v, c)| v.conj() * c)
                .sum::<Complex64>()
                .norm_sqr()
        })
        .sum();
    let w2 = branch_components(shared as f64, gamma_plus).w_squared;
    let amp =
        (2f64 / 3.0).sqrt() + (1f64 / 3.0).sqrt() * (2f64.sqrt() / gamma_plus) * (gamma_plus - 4.0);
    PPlusReport {
        asymptotic: 2.0 * w2 * amp * amp,
        numeric,
        reference_prongs: params.prongs,
    }
}

/// Computes eigenvalues by both routes, exact eigenvectors, asymptotic
/// partners and errors, and (three-star) branch weights.
pub fn exact_spectrum(model: &ReducedModel) -> Result<SpectralReport> {
    match (model.parameters().family, model.k()) {
        (GraphFamily::ThreeStar, 5) => three_star_spectrum(model),
        (GraphFamily::TwoStar, 2) => two_star_spectrum(model),
        (family, k) => Err(Error::invalid(format!(
            "spectral analysis expects the 5x5 three-star or 2x2 two-star \
             reduced matrix, got {k}x{k} for the {family} family"
        ))),
    }
}

fn check_moduli(values: &[Complex64]) -> Result<()> {
    for &v in values {
        let gap = (v.norm() - 1.0).abs();
        if gap > tolerances::EIGENVALUE_MODULUS {
            return Err(Error::numeric(format!(
                "eigenvalue {v} has modulus off unity by {gap:.3e}"
            )));
        }
    }
    Ok(())
}

fn three_star_spectrum(model: &ReducedModel) -> Result<SpectralReport> {
    let params = *model.parameters();
    let m = params.shared.expect("three-star parameters carry m");
    let t = params.transmission;
    let (gp, gm) = gamma_pm(m)?;
    let printed = char_poly(m, t)?;
    let closed = closed_form_eigenvalues(m, t)?;

    let real = real_part_of(model.matrix())?;
    let numeric_poly = char_poly_of_matrix(&real);
    let char_poly_deviation = numeric_poly
        .iter()
        .zip(printed.coefficients)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let scale = tolerances::char_poly_tolerance(params.prongs);
    if char_poly_deviation > scale {
        return Err(Error::numeric(format!(
            "derived matrix disagrees with the closed-form characteristic \
             polynomial by {char_poly_deviation:.3e} (tolerance {scale:.3e})"
        )));
    }

    let generic: Vec<Complex64> = real.clone().complex_eigenvalues().iter().copied().collect();
    check_moduli(&generic)?;
    let (matched, route_agreement) = pair_eigenvalues(&closed, &generic)?;
    if route_agreement > tolerances::EIGENVALUE_AGREEMENT {
        return Err(Error::numeric(format!(
            "closed-form and eigensolver eigenvalues disagree by {route_agreement:.3e}"
        )));
    }

    let plan = [
        (ModeBranch::MinusOne, 0i8, Complex64::new(-1.0, 0.0)),
        (ModeBranch::GammaPlus, 1, phase_point(gp, t, 1.0)),
        (ModeBranch::GammaPlus, -1, phase_point(gp, t, -1.0)),
        (ModeBranch::GammaMinus, 1, phase_point(gm, t, 1.0)),
        (ModeBranch::GammaMinus, -1, phase_point(gm, t, -1.0)),
    ];
    let mut modes = Vec::with_capacity(5);
    for (i, (branch, sign, asymptotic)) in plan.into_iter().enumerate() {
        let value = matched[i];
        modes.push(Mode {
            branch,
            phase_sign: sign,
            value,
            closed_form: closed[i],
            asymptotic,
            phase_error: angle_gap(value, asymptotic),
            vector: inverse_iteration(&real, value)?,
        });
    }

    let p_plus = p_plus_from_modes(&params, &modes, gp);
    Ok(SpectralReport {
        parameters: params,
        modes,
        gamma: Some((gp, gm)),
        route_agreement,
        char_poly_deviation: Some(char_poly_deviation),
        asymptotic_branches: Some(asymptotic_eigenvectors(m)?),
        p_plus: Some(p_plus),
    })
}

fn phase_point(gamma: f64, t: f64, sign: f64) -> Complex64 {
    Complex64::from_polar(1.0, sign * (gamma * t / 2.0).sqrt())
}

fn two_star_spectrum(model: &ReducedModel) -> Result<SpectralReport> {
    let params = *model.parameters();
    let n = params.prongs as f64;
    let t = params.transmission;
    let alpha = params.reflection - 2.0 * t;
    let sigma = t * (3.0 * (n - 3.0)).sqrt();
    let closed = [Complex64::new(alpha, sigma), Complex64::new(alpha, -sigma)];

    let real = real_part_of(model.matrix())?;
    let generic: Vec<Complex64> = real.clone().complex_eigenvalues().iter().copied().collect();
    check_moduli(&generic)?;
    let (matched, route_agreement) = pair_eigenvalues(&closed, &generic)?;
    if route_agreement > tolerances::EIGENVALUE_AGREEMENT {
        return Err(Error::numeric(format!(
            "closed-form and eigensolver eigenvalues disagree by {route_agreement:.3e}"
        )));
    }

    let mut modes = Vec::with_capacity(2);
    for (i, sign) in [(0usize, 1i8), (1, -1)] {
        let asymptotic = Complex64::from_polar(1.0, f64::from(sign) * sigma);
        let value = matched[i];
        modes.push(Mode {
            branch: ModeBranch::TwoStar,
            phase_sign: sign,
            value,
            closed_form: closed[i],
            asymptotic,
            phase_error: angle_gap(value, asymptotic),
            vector: inverse_iteration(&real, value)?,
        });
    }

    Ok(SpectralReport {
        parameters: params,
        modes,
        gamma: None,
        route_agreement,
        char_poly_deviation: None,
        asymptotic_branches: None,
        p_plus: None,
    })
}

/// Branch weight at the default large-N reference, max(2000, 40m) prongs.
pub fn p_plus(m: usize) -> Result<PPlusReport> {
    p_plus_with_reference(m, 2000usize.max(40 * m))
}

/// Branch weight computed from the derived matrix at an explicit size.
pub fn p_plus_with_reference(m: usize, reference_prongs: usize) -> Result<PPlusReport> {
    let graph = build_three_star(reference_prongs, m)?;
    let basis = three_star_basis(&graph)?;
    let model = derive_reduced_matrix(&graph, &basis)?;
    let report = exact_spectrum(&model)?;
    report
        .p_plus
        .ok_or_else(|| Error::numeric("three-star spectrum must carry branch weights"))
}
