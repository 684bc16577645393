//! Collapsed bases for the mirror-symmetric sector and the matrix of the
//! two-step operator on their span.
//!
//! The walk started in the canonical initial state never leaves a small
//! subspace: grouped combinations of ingoing states (and, for single-step
//! analysis, their images). This module builds those bases, derives the
//! matrix of U^2 restricted to the span directly from the full simulator,
//! and evolves coordinates in the reduced space.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphFamily, StarChainGraph};
use crate::tolerances;
use crate::walk::{self, StateVector};

/// A sparse, real-coefficient unit vector over directed edge states.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisVector {
    label: String,
    /// (state index, coefficient), sorted by index.
    terms: Vec<(usize, f64)>,
}

impl BasisVector {
    fn new(label: impl Into<String>, mut terms: Vec<(usize, f64)>) -> BasisVector {
        terms.sort_unstable_by_key(|&(i, _)| i);
        let v = BasisVector {
            label: label.into(),
            terms,
        };
        debug_assert!(
            (v.terms.iter().map(|&(_, c)| c * c).sum::<f64>() - 1.0).abs() < 1e-12,
            "{} not normalized",
            v.label
        );
        v
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn terms(&self) -> &[(usize, f64)] {
        &self.terms
    }

    /// <self|state>; coefficients are real so no conjugation is needed.
    pub fn overlap(&self, state: &StateVector) -> Complex64 {
        self.terms
            .iter()
            .map(|&(i, c)| c * state.amplitudes()[i])
            .sum()
    }

    /// Dense embedding into the full state space.
    pub fn embed(&self, graph: &StarChainGraph) -> StateVector {
        let mut v = StateVector::zeros(graph);
        for &(i, c) in &self.terms {
            v.amplitudes_mut()[i] = Complex64::new(c, 0.0);
        }
        v
    }

    fn dot(&self, other: &BasisVector) -> f64 {
        // Merge join over the sorted term lists.
        let (mut a, mut b, mut acc) = (0, 0, 0.0);
        while a < self.terms.len() && b < other.terms.len() {
            match self.terms[a].0.cmp(&other.terms[b].0) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.terms[a].1 * other.terms[b].1;
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }
}

/// An ordered set of orthonormal sparse vectors spanning a reduced sector.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedBasis {
    state_dim: usize,
    vectors: Vec<BasisVector>,
}

impl ReducedBasis {
    pub fn k(&self) -> usize {
        self.vectors.len()
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn vector(&self, i: usize) -> &BasisVector {
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[BasisVector] {
        &self.vectors
    }

    /// Basis restricted to the listed vectors, in the listed order.
    pub fn subset(&self, indices: &[usize]) -> ReducedBasis {
        ReducedBasis {
            state_dim: self.state_dim,
            vectors: indices.iter().map(|&i| self.vectors[i].clone()).collect(),
        }
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.k() {
            for j in i..self.k() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.vectors[i].dot(&self.vectors[j]) - want).abs());
            }
        }
        worst
    }
}

/// The four-vector basis of the two-star sector: signed plain-prong sums
/// (outgoing then ingoing) and signed path-prong sums (ingoing then
/// outgoing), star-2 terms negative.
pub fn two_star_basis(graph: &StarChainGraph) -> Result<ReducedBasis> {
    if graph.family() != GraphFamily::TwoStar {
        return Err(Error::FamilyMismatch {
            expected: GraphFamily::TwoStar,
            found: graph.family(),
        });
    }
    let n = graph.prongs();
    let c_plain = 1.0 / (2.0 * (n as f64 - 3.0)).sqrt();
    let c_path = 1.0 / 6f64.sqrt();
    let mut psi1 = Vec::new();
    let mut psi2 = Vec::new();
    for j in 4..=n {
        for (star, fam, sign) in [(0usize, 1usize, 1.0), (1, 2, -1.0)] {
            let o = graph.outer_with_label(fam, j).expect("plain prong exists");
            psi1.push((graph.outgoing_state(star, o).unwrap(), sign * c_plain));
            psi2.push((graph.ingoing_state(star, o).unwrap(), sign * c_plain));
        }
    }
    let mut psi3 = Vec::new();
    let mut psi4 = Vec::new();
    let path_labels = [
        (0usize, [(1usize, 1usize), (1, 2), (1, 3)], 1.0),
        (1, [(2, 1), (1, 2), (1, 3)], -1.0),
    ];
    for (star, labels, sign) in path_labels {
        for (fam, j) in labels {
            let o = graph.outer_with_label(fam, j).expect("path prong exists");
            psi3.push((graph.ingoing_state(star, o).unwrap(), sign * c_path));
            psi4.push((graph.outgoing_state(star, o).unwrap(), sign * c_path));
        }
    }
    Ok(ReducedBasis {
        state_dim: graph.state_count(),
        vectors: vec![
            BasisVector::new("psi1", psi1),
            BasisVector::new("psi2", psi2),
            BasisVector::new("psi3", psi3),
            BasisVector::new("psi4", psi4),
        ],
    })
}

/// The five-vector ingoing basis of the three-star sector: plain prongs of
/// the outer stars, START/END, shared vertices toward the outer centers,
/// shared vertices toward the middle center, and the middle star's own
/// plain prongs.
pub fn three_star_basis(graph: &StarChainGraph) -> Result<ReducedBasis> {
    if graph.family() != GraphFamily::ThreeStar {
        return Err(Error::FamilyMismatch {
            expected: GraphFamily::ThreeStar,
            found: graph.family(),
        });
    }
    let n = graph.prongs();
    let m = graph.shared_parameter().expect("three-star has m");
    let ingoing = |star: usize, fam: usize, j: usize| {
        let o = graph
            .outer_with_label(fam, j)
            .expect("labeled vertex exists");
        graph.ingoing_state(star, o).expect("edge exists")
    };

    let c1 = 1.0 / (2.0 * (n - m) as f64).sqrt();
    let psi1 = (m + 1..=n)
        .flat_map(|j| [(ingoing(0, 1, j), c1), (ingoing(2, 3, j), c1)])
        .collect();

    let c2 = 1.0 / 2f64.sqrt();
    let psi2 = vec![(ingoing(0, 1, 1), c2), (ingoing(2, 3, 1), c2)];

    let cs = 1.0 / (2.0 * (m as f64 - 1.0)).sqrt();
    let mut psi3 = Vec::new();
    let mut psi4 = Vec::new();
    for j in 2..=m {
        psi3.push((ingoing(0, 1, j), cs));
        psi3.push((ingoing(2, 3, j), cs));
        psi4.push((ingoing(1, 1, j), cs));
        psi4.push((ingoing(1, 3, j), cs));
    }

    let c5 = 1.0 / ((n + 2 - 2 * m) as f64).sqrt();
    let psi5 = (1..=n + 2 - 2 * m)
        .map(|j| (ingoing(1, 2, j), c5))
        .collect();

    Ok(ReducedBasis {
        state_dim: graph.state_count(),
        vectors: vec![
            BasisVector::new("psi1", psi1),
            BasisVector::new("psi2", psi2),
            BasisVector::new("psi3", psi3),
            BasisVector::new("psi4", psi4),
            BasisVector::new("psi5", psi5),
        ],
    })
}

/// Scalar parameters of a reduced model, stamped into output metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedParameters {
    pub family: GraphFamily,
    pub prongs: usize,
    pub shared: Option<usize>,
    pub reflection: f64,
    pub transmission: f64,
    /// sqrt((m-1)(N-m)); three-star only.
    pub mu: Option<f64>,
    /// sqrt(2(m-1)(N-2m+2)); three-star only.
    pub nu: Option<f64>,
}

impl ReducedParameters {
    fn from_graph(graph: &StarChainGraph) -> ReducedParameters {
        let n = graph.prongs() as f64;
        let (mu, nu) = match graph.shared_parameter() {
            Some(m) => {
                let m = m as f64;
                (
                    Some(((m - 1.0) * (n - m)).sqrt()),
                    Some((2.0 * (m - 1.0) * (n - 2.0 * m + 2.0)).sqrt()),
                )
            }
            None => (None, None),
        };
        ReducedParameters {
            family: graph.family(),
            prongs: graph.prongs(),
            shared: graph.shared_parameter(),
            reflection: graph.reflection(),
            transmission: graph.transmission(),
            mu,
            nu,
        }
    }
}

/// A reduced basis together with the matrix of U^2 on its span.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedModel {
    basis: ReducedBasis,
    matrix: DMatrix<Complex64>,
    parameters: ReducedParameters,
    /// Largest norm of U^2 psi_j outside the span, recorded at derivation.
    invariance_residual: f64,
}

impl ReducedModel {
    pub fn basis(&self) -> &ReducedBasis {
        &self.basis
    }

    /// Matrix M with M[(i, j)] = <psi_i | U^2 psi_j>.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn parameters(&self) -> &ReducedParameters {
        &self.parameters
    }

    pub fn invariance_residual(&self) -> f64 {
        self.invariance_residual
    }

    pub fn k(&self) -> usize {
        self.basis.k()
    }
}

/// Matrix of `steps` applications of the step operator on the basis span,
/// derived by embedding, evolving, and projecting back. Returns the matrix
/// and the worst residual left outside the span.
pub(crate) fn derive_step_matrix(
    graph: &StarChainGraph,
    basis: &ReducedBasis,
    steps: usize,
) -> Result<(DMatrix<Complex64>, f64)> {
    let k = basis.k();
    let mut matrix = DMatrix::<Complex64>::zeros(k, k);
    let mut worst: f64 = 0.0;
    for j in 0..k {
        let image = walk::evolve(graph, &basis.vector(j).embed(graph), steps)?;
        let coords: Vec<Complex64> = (0..k).map(|i| basis.vector(i).overlap(&image)).collect();
        let residual = residual_outside_span(basis, &image, &coords);
        worst = worst.max(residual);
        for i in 0..k {
            matrix[(i, j)] = coords[i];
        }
    }
    Ok((matrix, worst))
}

fn residual_outside_span(basis: &ReducedBasis, state: &StateVector, coords: &[Complex64]) -> f64 {
    let mut rest = state.clone();
    for (c, v) in coords.iter().zip(basis.vectors()) {
        for &(idx, coeff) in v.terms() {
            rest.amplitudes_mut()[idx] -= c * coeff;
        }
    }
    rest.norm()
}

/// Derives the model of U^2 on the basis span, verifying orthonormality,
/// invariance of the span, and unitarity of the result.
pub fn derive_reduced_matrix(graph: &StarChainGraph, basis: &ReducedBasis) -> Result<ReducedModel> {
    if basis.state_dim() != graph.state_count() {
        return Err(Error::DimensionMismatch {
            state: basis.state_dim(),
            graph: graph.state_count(),
        });
    }
    let gram = basis.gram_residual();
    if gram > tolerances::ORTHONORMALITY {
        return Err(Error::numeric(format!(
            "basis is not orthonormal: gram residual {gram:.3e}"
        )));
    }
    let (matrix, residual) = derive_step_matrix(graph, basis, 2)?;
    if residual >= tolerances::INVARIANCE_RESIDUAL {
        return Err(Error::NotInvariant {
            residual,
            tolerance: tolerances::INVARIANCE_RESIDUAL,
        });
    }
    let k = basis.k();
    let gap = (matrix.adjoint() * &matrix - DMatrix::<Complex64>::identity(k, k))
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    if gap > tolerances::MATRIX_UNITARITY {
        return Err(Error::numeric(format!(
            "reduced matrix is not unitary: deviation {gap:.3e}"
        )));
    }
    Ok(ReducedModel {
        basis: basis.clone(),
        matrix,
        parameters: ReducedParameters::from_graph(graph),
        invariance_residual: residual,
    })
}

/// Coordinates of a full state in the basis and the norm left outside.
pub fn project(basis: &ReducedBasis, state: &StateVector) -> Result<(Vec<Complex64>, f64)> {
    if basis.state_dim() != state.len() {
        return Err(Error::DimensionMismatch {
            state: state.len(),
            graph: basis.state_dim(),
        });
    }
    let coords: Vec<Complex64> = basis.vectors().iter().map(|v| v.overlap(state)).collect();
    let residual = residual_outside_span(basis, state, &coords);
    Ok((coords, residual))
}

/// Applies the reduced matrix `n` times to a coordinate vector.
pub fn reduced_evolve(
    model: &ReducedModel,
    coords: &[Complex64],
    n: usize,
) -> Result<Vec<Complex64>> {
    if coords.len() != model.k() {
        return Err(Error::DimensionMismatch {
            state: coords.len(),
            graph: model.k(),
        });
    }
    let mut v = nalgebra::DVector::from_column_slice(coords);
    for _ in 0..n {
        v = model.matrix() * v;
    }
    Ok(v.iter().copied().collect())
}
