//! Full-basis simulation of the discrete-time walk.
//!
//! One step sends every directed state through the local unitary of the
//! vertex it points at. Centers scatter, plain prongs reflect with +1, the
//! START/END prongs reflect with -1, shared vertices pass the walker to the
//! neighboring star.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{GraphFamily, StarChainGraph, VertexKind};
use crate::reduced;

/// Amplitudes over all directed edge states, in canonical index order.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(graph: &StarChainGraph) -> StateVector {
        StateVector {
            amplitudes: vec![Complex64::new(0.0, 0.0); graph.state_count()],
        }
    }

    /// Unit amplitude on a single directed state.
    pub fn basis_state(graph: &StarChainGraph, index: usize) -> Result<StateVector> {
        if index >= graph.state_count() {
            return Err(Error::DimensionMismatch {
                state: index,
                graph: graph.state_count(),
            });
        }
        let mut v = StateVector::zeros(graph);
        v.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn from_amplitudes(
        graph: &StarChainGraph,
        amplitudes: Vec<Complex64>,
    ) -> Result<StateVector> {
        if amplitudes.len() != graph.state_count() {
            return Err(Error::DimensionMismatch {
                state: amplitudes.len(),
                graph: graph.state_count(),
            });
        }
        Ok(StateVector { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// <self|other> with the conjugate on `self`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }
}

fn check_dim(graph: &StarChainGraph, state: &StateVector) -> Result<()> {
    if state.len() != graph.state_count() {
        return Err(Error::DimensionMismatch {
            state: state.len(),
            graph: graph.state_count(),
        });
    }
    Ok(())
}

/// Writes one step of the walk into `dst` (same layout as `src`).
///
/// Centers use the rank-one form of the scattering row: the image on each
/// outgoing state is t*S - in, where S sums the star's ingoing amplitudes.
/// That is Eq-free bookkeeping of -r*in + t*(S - in) with r + t = 1, and
/// keeps a step at O(states).
pub(crate) fn step_into(graph: &StarChainGraph, src: &StateVector, dst: &mut StateVector) {
    let n = graph.prongs();
    let t = graph.transmission();
    let a = &src.amplitudes;
    let b = &mut dst.amplitudes;
    for star in 0..graph.stars() {
        let out0 = 2 * star * n;
        let in0 = out0 + n;
        let s: Complex64 = a[in0..in0 + n].iter().sum();
        for p in 0..n {
            b[out0 + p] = t * s - a[in0 + p];
        }
    }
    for star in 0..graph.stars() {
        for (slot, &outer) in graph.star_prongs(star).iter().enumerate() {
            let arriving = a[graph.outgoing_index(star, slot)];
            match graph.outer_kind(outer) {
                VertexKind::ReflectPlus => {
                    b[graph.ingoing_index(star, slot)] = arriving;
                }
                VertexKind::ReflectMinus => {
                    b[graph.ingoing_index(star, slot)] = -arriving;
                }
                VertexKind::PassThrough => {
                    // Departs toward the other incident star.
                    let (ostar, oslot) = other_side(graph, outer, star);
                    b[graph.ingoing_index(ostar, oslot)] = arriving;
                }
                VertexKind::Scatter(_) => unreachable!("outer vertices have degree <= 2"),
            }
        }
    }
}

fn other_side(graph: &StarChainGraph, outer: usize, star: usize) -> (usize, usize) {
    for s in 0..graph.stars() {
        if s != star {
            if let Some(slot) = graph.slot_in_star(s, outer) {
                return (s, slot);
            }
        }
    }
    unreachable!("pass-through vertex has a second incident star")
}

/// Applies the step operator once.
pub fn step(graph: &StarChainGraph, state: &StateVector) -> Result<StateVector> {
    check_dim(graph, state)?;
    let mut out = StateVector::zeros(graph);
    step_into(graph, state, &mut out);
    Ok(out)
}

/// Applies the step operator `steps` times; steps = 0 returns a copy.
pub fn evolve(graph: &StarChainGraph, state: &StateVector, steps: usize) -> Result<StateVector> {
    check_dim(graph, state)?;
    let mut cur = state.clone();
    let mut next = StateVector::zeros(graph);
    for _ in 0..steps {
        step_into(graph, &cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(cur)
}

/// Equal-weight superposition of all ingoing states, +1/sqrt(2N) on star 1
/// and -1/sqrt(2N) on star 2.
pub fn initial_state_two_star(graph: &StarChainGraph) -> Result<StateVector> {
    expect_family(graph, GraphFamily::TwoStar)?;
    Ok(signed_ingoing_superposition(graph, &[1.0, -1.0]))
}

/// Equal-weight superposition of all ingoing states, +1/sqrt(3N) on the
/// outer stars and -1/sqrt(3N) on the middle star.
pub fn initial_state_three_star(graph: &StarChainGraph) -> Result<StateVector> {
    expect_family(graph, GraphFamily::ThreeStar)?;
    Ok(signed_ingoing_superposition(graph, &[1.0, -1.0, 1.0]))
}

/// The family's canonical initial state.
pub fn initial_state(graph: &StarChainGraph) -> StateVector {
    match graph.family() {
        GraphFamily::TwoStar => signed_ingoing_superposition(graph, &[1.0, -1.0]),
        GraphFamily::ThreeStar => signed_ingoing_superposition(graph, &[1.0, -1.0, 1.0]),
    }
}

fn expect_family(graph: &StarChainGraph, expected: GraphFamily) -> Result<()> {
    if graph.family() != expected {
        return Err(Error::FamilyMismatch {
            expected,
            found: graph.family(),
        });
    }
    Ok(())
}

fn signed_ingoing_superposition(graph: &StarChainGraph, signs: &[f64]) -> StateVector {
    debug_assert_eq!(signs.len(), graph.stars());
    let amp = 1.0 / ((graph.stars() * graph.prongs()) as f64).sqrt();
    let mut v = StateVector::zeros(graph);
    for (star, &sign) in signs.iter().enumerate() {
        for slot in 0..graph.prongs() {
            v.amplitudes[graph.ingoing_index(star, slot)] = Complex64::new(sign * amp, 0.0);
        }
    }
    v
}

/// Squared overlaps with the grouped ingoing states of the three-star
/// reduction: psi2 (START/END edges), psi3 (shared vertices toward the
/// outer centers), psi4 (shared vertices toward the middle center).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GroupedWeights {
    pub psi2: f64,
    pub psi3: f64,
    pub psi4: f64,
}

/// Classical read-out of a state: per-edge and path-restricted weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityReading {
    /// Indexed by EdgeId; |outgoing|^2 + |ingoing|^2.
    pub edge_probabilities: Vec<f64>,
    /// Total weight on the START-to-END path edges.
    pub path_probability: f64,
    /// Sum of all edge probabilities; 1 within 1e-10 for normalized states.
    pub total_probability: f64,
    /// Populated for three-star graphs only.
    pub grouped: Option<GroupedWeights>,
}

/// Weight on the START-to-END path edges alone; O(path edges), cheap
/// enough to evaluate every step.
pub fn path_probability(graph: &StarChainGraph, state: &StateVector) -> f64 {
    let a = state.amplitudes();
    graph
        .path_edges()
        .iter()
        .map(|&e| {
            let (out, inc) = graph.states_of_edge(e);
            a[out].norm_sqr() + a[inc].norm_sqr()
        })
        .sum()
}

/// Measures edge occupation probabilities of a normalized state.
pub fn measure(graph: &StarChainGraph, state: &StateVector) -> Result<ProbabilityReading> {
    check_dim(graph, state)?;
    let mut edge_probabilities = vec![0.0; graph.edge_count()];
    for (index, amp) in state.amplitudes.iter().enumerate() {
        edge_probabilities[graph.edge_of_state(index)] += amp.norm_sqr();
    }
    let path_probability = graph
        .path_edges()
        .iter()
        .map(|&e| edge_probabilities[e])
        .sum();
    let total_probability = edge_probabilities.iter().sum();
    let grouped = match graph.family() {
        GraphFamily::TwoStar => None,
        GraphFamily::ThreeStar => {
            let basis = reduced::three_star_basis(graph)?;
            let w = |i: usize| basis.vector(i).overlap(state).norm_sqr();
            Some(GroupedWeights {
                psi2: w(1),
                psi3: w(2),
                psi4: w(3),
            })
        }
    };
    Ok(ProbabilityReading {
        edge_probabilities,
        path_probability,
        total_probability,
        grouped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_three_star, build_two_star};
    use crate::tolerances;

    fn amp(v: &StateVector, i: usize) -> Complex64 {
        v.amplitudes()[i]
    }

    fn ingoing_at(g: &StarChainGraph, star: usize, family: usize, index: usize) -> usize {
        let o = g.outer_with_label(family, index).unwrap();
        g.ingoing_state(star, o).unwrap()
    }

    fn outgoing_at(g: &StarChainGraph, star: usize, family: usize, index: usize) -> usize {
        let o = g.outer_with_label(family, index).unwrap();
        g.outgoing_state(star, o).unwrap()
    }

    #[test]
    fn step_reflects_start_with_minus() {
        let g = build_two_star(5).unwrap();
        let src = StateVector::basis_state(&g, outgoing_at(&g, 0, 1, 1)).unwrap();
        let dst = step(&g, &src).unwrap();
        let expect = ingoing_at(&g, 0, 1, 1);
        for (i, a) in dst.amplitudes().iter().enumerate() {
            let want = if i == expect { -1.0 } else { 0.0 };
            assert!((a - want).norm() < 1e-15, "index {i}: {a}");
        }
    }

    #[test]
    fn step_scatters_at_center() {
        let g = build_two_star(5).unwrap();
        let src = StateVector::basis_state(&g, ingoing_at(&g, 0, 1, 4)).unwrap();
        let dst = step(&g, &src).unwrap();
        assert!((amp(&dst, outgoing_at(&g, 0, 1, 4)) - Complex64::new(-0.6, 0.0)).norm() < 1e-15);
        for j in [1usize, 2, 3, 5] {
            let got = amp(&dst, outgoing_at(&g, 0, 1, j));
            assert!((got - Complex64::new(0.4, 0.0)).norm() < 1e-15, "prong {j}");
        }
        assert!((dst.norm() - 1.0).abs() < tolerances::STATE_NORM);
    }

    #[test]
    fn step_passes_through_shared_vertex() {
        let g = build_two_star(5).unwrap();
        let src = StateVector::basis_state(&g, outgoing_at(&g, 0, 1, 2)).unwrap();
        let dst = step(&g, &src).unwrap();
        let expect = ingoing_at(&g, 1, 1, 2);
        for (i, a) in dst.amplitudes().iter().enumerate() {
            let want = if i == expect { 1.0 } else { 0.0 };
            assert!((a - want).norm() < 1e-15, "index {i}");
        }
    }

    #[test]
    fn evolve_zero_steps_is_identity() {
        let g = build_three_star(7, 2).unwrap();
        let v = initial_state_three_star(&g).unwrap();
        let w = evolve(&g, &v, 0).unwrap();
        assert_eq!(v, w);
    }

    #[test]
    fn evolve_preserves_bipartite_parity() {
        let g = build_two_star(6).unwrap();
        let v = initial_state_two_star(&g).unwrap();
        let w = evolve(&g, &v, 2).unwrap();
        // Even steps keep support in the same directed class as the start
        // state up to center scattering, i.e. ingoing stays ingoing.
        for (i, a) in w.amplitudes().iter().enumerate() {
            if !g.is_ingoing(i) {
                assert!(a.norm() < 1e-15, "outgoing index {i} populated: {a}");
            }
        }
    }

    #[test]
    fn two_star_localizes_near_predicted_step() {
        let g = build_two_star(100).unwrap();
        let v = initial_state_two_star(&g).unwrap();
        let w = evolve(&g, &v, 10).unwrap();
        let reading = measure(&g, &w).unwrap();
        assert!(
            reading.path_probability >= 0.9,
            "path probability {}",
            reading.path_probability
        );
    }

    #[test]
    fn initial_state_two_star_values() {
        let g = build_two_star(5).unwrap();
        let v = initial_state_two_star(&g).unwrap();
        let a = 1.0 / 10f64.sqrt();
        for star in 0..2 {
            let sign = if star == 0 { 1.0 } else { -1.0 };
            for slot in 0..5 {
                let got = amp(&v, g.ingoing_index(star, slot));
                assert!((got - Complex64::new(sign * a, 0.0)).norm() < 1e-15);
                assert!(amp(&v, g.outgoing_index(star, slot)).norm() < 1e-15);
            }
        }
        assert!((v.norm() - 1.0).abs() < tolerances::STATE_NORM);
    }

    #[test]
    fn initial_state_three_star_values() {
        let g = build_three_star(10, 3).unwrap();
        let v = initial_state_three_star(&g).unwrap();
        let a = 1.0 / 30f64.sqrt();
        for star in 0..3 {
            let sign = if star == 1 { -1.0 } else { 1.0 };
            for slot in 0..10 {
                let got = amp(&v, g.ingoing_index(star, slot));
                assert!((got - Complex64::new(sign * a, 0.0)).norm() < 1e-15);
            }
        }
        assert!((v.norm() - 1.0).abs() < tolerances::STATE_NORM);
        // A shared vertex carries +a toward its outer center and -a toward
        // the middle center.
        let o = g.outer_with_label(1, 2).unwrap();
        assert!((amp(&v, g.ingoing_state(0, o).unwrap()).re - a).abs() < 1e-15);
        assert!((amp(&v, g.ingoing_state(1, o).unwrap()).re + a).abs() < 1e-15);
    }

    #[test]
    fn initial_state_three_star_is_mirror_symmetric() {
        let g = build_three_star(9, 3).unwrap();
        let v = initial_state_three_star(&g).unwrap();
        for i in 0..g.state_count() {
            assert_eq!(amp(&v, i), amp(&v, g.mirror_state(i)));
        }
    }

    #[test]
    fn initial_state_family_checks() {
        let two = build_two_star(5).unwrap();
        let three = build_three_star(7, 2).unwrap();
        assert!(initial_state_two_star(&three).is_err());
        assert!(initial_state_three_star(&two).is_err());
    }

    #[test]
    fn measure_on_non_path_state() {
        let g = build_two_star(6).unwrap();
        let idx = ingoing_at(&g, 0, 1, 5);
        let v = StateVector::basis_state(&g, idx).unwrap();
        let r = measure(&g, &v).unwrap();
        assert_eq!(r.path_probability, 0.0);
        assert!((r.total_probability - 1.0).abs() < tolerances::PROBABILITY_SUM);
        assert!(r.grouped.is_none());
    }

    #[test]
    fn measure_totals_and_grouping() {
        let g = build_three_star(10, 3).unwrap();
        let v = initial_state_three_star(&g).unwrap();
        let r = measure(&g, &v).unwrap();
        assert!((r.total_probability - 1.0).abs() < tolerances::PROBABILITY_SUM);
        assert_eq!(r.edge_probabilities.len(), 30);
        let g4 = r.grouped.unwrap();
        // <psi2|psi_in>^2 = 2/(3N), <psi3|psi_in>^2 = <psi4|psi_in>^2
        // = 2(m-1)/(3N).
        assert!((g4.psi2 - 2.0 / 30.0).abs() < 1e-12, "psi2 {}", g4.psi2);
        assert!((g4.psi3 - 4.0 / 30.0).abs() < 1e-12);
        assert!((g4.psi4 - 4.0 / 30.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g5 = build_two_star(5).unwrap();
        let g6 = build_two_star(6).unwrap();
        let v = initial_state_two_star(&g5).unwrap();
        assert!(matches!(
            step(&g6, &v),
            Err(Error::DimensionMismatch {
                state: 20,
                graph: 24
            })
        ));
    }
}
