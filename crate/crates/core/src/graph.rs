//! Star-chain graphs and their directed-state index space.
//!
//! A chain is two or three star graphs whose centers each have N prongs;
//! adjacent stars are glued by sharing outer vertices. The walker lives on
//! directed edge states |j,k> (two per undirected edge), so the graph's job
//! is bookkeeping: which vertex behaves how, and which integer indexes each
//! directed state.
//!
//! Canonical index layout, fixed for reproducibility: states are grouped
//! star by star; within star `s` the N center-to-outer states come first,
//! then the N outer-to-center states, both in prong-slot order. A state on
//! a shared vertex belongs to the star whose center it touches.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Reflection/transmission amplitudes of a degree-n scattering center.
///
/// An incoming unit amplitude leaves with -r back along the entry edge and
/// +t along each of the other n-1 edges; r = (n-2)/n and t = 2/n satisfy
/// r^2 + (n-1) t^2 = 1, and r + t = 1 exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatterCoefficients {
    pub degree: usize,
    pub reflection: f64,
    pub transmission: f64,
}

/// Returns the scattering amplitudes for a degree-`degree` vertex.
///
/// Degrees 1 and 2 are not scatterers (they reflect or pass through), so
/// anything below 3 is rejected.
pub fn scatter_coefficients(degree: usize) -> Result<ScatterCoefficients> {
    if degree < 3 {
        return Err(Error::InvalidDegree { degree });
    }
    let n = degree as f64;
    Ok(ScatterCoefficients {
        degree,
        reflection: (n - 2.0) / n,
        transmission: 2.0 / n,
    })
}

/// What a vertex does to amplitudes entering it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VertexKind {
    /// Degree-1 outer vertex; reflects with phase +1.
    ReflectPlus,
    /// Degree-1 START/END vertex; reflects with phase -1.
    ReflectMinus,
    /// Degree-2 shared vertex; transmits to the other star, no reflection.
    PassThrough,
    /// Center vertex of degree >= 3.
    Scatter(ScatterCoefficients),
}

/// Chain family: two stars (one junction) or three stars (two junctions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphFamily {
    TwoStar,
    ThreeStar,
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFamily::TwoStar => write!(f, "two-star"),
            GraphFamily::ThreeStar => write!(f, "three-star"),
        }
    }
}

/// Identifier of an outer (prong) vertex; index into the graph's outer table.
pub type OuterId = usize;

/// Identifier of an undirected edge: `star * N + slot`.
pub type EdgeId = usize;

/// Naming-family label of an outer vertex, e.g. (1, 4) for the 4th prong
/// named after star 1. Shared vertices keep the label of the star whose
/// naming family introduced them, so labels are unique across the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OuterLabel {
    pub family: usize,
    pub index: usize,
}

impl fmt::Display for OuterLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B[{},{}]", self.family, self.index)
    }
}

/// Endpoint of a directed state, for inspection and dumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexRef {
    Center { star: usize },
    Outer { label: OuterLabel },
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexRef::Center { star } => write!(f, "A[{star}]"),
            VertexRef::Outer { label } => write!(f, "{label}"),
        }
    }
}

/// A directed edge state |from, to> together with its canonical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DirectedEdgeState {
    pub from: VertexRef,
    pub to: VertexRef,
    pub index: usize,
}

struct OuterVertex {
    kind: VertexKind,
    label: OuterLabel,
    /// Incident edges as (star, slot); length 1 or 2.
    incident: Vec<(usize, usize)>,
}

/// An immutable two- or three-star chain.
pub struct StarChainGraph {
    family: GraphFamily,
    prongs: usize,
    shared: Option<usize>,
    outer: Vec<OuterVertex>,
    /// Per star: the N outer vertices in slot order.
    star_prongs: Vec<Vec<OuterId>>,
    by_label: HashMap<OuterLabel, OuterId>,
    path: Vec<EdgeId>,
    start: OuterId,
    end: OuterId,
}

/// Builds the two-star chain: centers A1, A2 with N prongs each, shared
/// PassThrough vertices `B[1,2]` and `B[1,3]`, START = `B[1,1]`,
/// END = `B[2,1]`.
pub fn build_two_star(prongs: usize) -> Result<StarChainGraph> {
    if prongs < 4 {
        return Err(Error::invalid(format!(
            "two-star graph needs at least 4 prongs per star, got {prongs}"
        )));
    }
    let mut b = Builder::new(GraphFamily::TwoStar, prongs, None);
    let start = b.outer(VertexKind::ReflectMinus, 1, 1);
    let shared: Vec<OuterId> = (2..=3)
        .map(|j| b.outer(VertexKind::PassThrough, 1, j))
        .collect();
    let mut star1 = vec![start];
    star1.extend(&shared);
    star1.extend((4..=prongs).map(|j| b.outer(VertexKind::ReflectPlus, 1, j)));

    let end = b.outer(VertexKind::ReflectMinus, 2, 1);
    let mut star2 = vec![end];
    star2.extend(&shared);
    star2.extend((4..=prongs).map(|j| b.outer(VertexKind::ReflectPlus, 2, j)));

    b.finish(vec![star1, star2], start, end)
}

/// Builds the three-star chain: stars 1 and 2 share the m-1 vertices
/// `B[1,2]..B[1,m]`, stars 2 and 3 share `B[3,2]..B[3,m]`; START =
/// `B[1,1]`, END = `B[3,1]`; the middle star keeps N+2-2m plain prongs
/// of its own.
pub fn build_three_star(prongs: usize, shared: usize) -> Result<StarChainGraph> {
    if shared < 2 {
        return Err(Error::invalid(format!(
            "three-star graph needs a shared parameter of at least 2, got {shared}"
        )));
    }
    if prongs <= 2 * shared - 2 {
        return Err(Error::invalid(format!(
            "three-star graph needs prongs > 2*shared - 2 so the middle star keeps \
             a plain prong; got prongs {prongs}, shared {shared}"
        )));
    }
    let m = shared;
    let mut b = Builder::new(GraphFamily::ThreeStar, prongs, Some(m));

    let start = b.outer(VertexKind::ReflectMinus, 1, 1);
    let left: Vec<OuterId> = (2..=m)
        .map(|j| b.outer(VertexKind::PassThrough, 1, j))
        .collect();
    let mut star1 = vec![start];
    star1.extend(&left);
    star1.extend((m + 1..=prongs).map(|j| b.outer(VertexKind::ReflectPlus, 1, j)));

    // Middle star slots: left shared, then its own plain prongs, then right
    // shared. B[2,1] is an ordinary prong; only B[1,1] and B[3,1] reflect
    // with phase -1.
    let right: Vec<OuterId> = (2..=m)
        .map(|j| b.outer(VertexKind::PassThrough, 3, j))
        .collect();
    let mut star2 = left.clone();
    star2.extend((1..=prongs + 2 - 2 * m).map(|j| b.outer(VertexKind::ReflectPlus, 2, j)));
    star2.extend(&right);

    let end = b.outer(VertexKind::ReflectMinus, 3, 1);
    let mut star3 = vec![end];
    star3.extend(&right);
    star3.extend((m + 1..=prongs).map(|j| b.outer(VertexKind::ReflectPlus, 3, j)));

    b.finish(vec![star1, star2, star3], start, end)
}

struct Builder {
    family: GraphFamily,
    prongs: usize,
    shared: Option<usize>,
    outer: Vec<OuterVertex>,
    by_label: HashMap<OuterLabel, OuterId>,
}

impl Builder {
    fn new(family: GraphFamily, prongs: usize, shared: Option<usize>) -> Self {
        Builder {
            family,
            prongs,
            shared,
            outer: Vec::new(),
            by_label: HashMap::new(),
        }
    }

    fn outer(&mut self, kind: VertexKind, family: usize, index: usize) -> OuterId {
        let label = OuterLabel { family, index };
        let id = self.outer.len();
        self.outer.push(OuterVertex {
            kind,
            label,
            incident: Vec::new(),
        });
        self.by_label.insert(label, id);
        id
    }

    fn finish(
        mut self,
        star_prongs: Vec<Vec<OuterId>>,
        start: OuterId,
        end: OuterId,
    ) -> Result<StarChainGraph> {
        for (s, prongs) in star_prongs.iter().enumerate() {
            debug_assert_eq!(prongs.len(), self.prongs);
            for (slot, &o) in prongs.iter().enumerate() {
                self.outer[o].incident.push((s, slot));
            }
        }
        // Path edges: every edge touching START, END, or a shared vertex.
        let mut path = Vec::new();
        for (s, prongs) in star_prongs.iter().enumerate() {
            for (slot, &o) in prongs.iter().enumerate() {
                if self.outer[o].kind != VertexKind::ReflectPlus {
                    path.push(s * self.prongs + slot);
                }
            }
        }
        Ok(StarChainGraph {
            family: self.family,
            prongs: self.prongs,
            shared: self.shared,
            outer: self.outer,
            star_prongs,
            by_label: self.by_label,
            path,
            start,
            end,
        })
    }
}

impl StarChainGraph {
    pub fn family(&self) -> GraphFamily {
        self.family
    }

    /// N: prongs per star (every center has this degree).
    pub fn prongs(&self) -> usize {
        self.prongs
    }

    /// The three-star shared parameter m; None for two-star graphs
    /// (which always share exactly 2 vertices).
    pub fn shared_parameter(&self) -> Option<usize> {
        self.shared
    }

    /// Number of star centers (2 or 3).
    pub fn stars(&self) -> usize {
        self.star_prongs.len()
    }

    pub fn edge_count(&self) -> usize {
        self.stars() * self.prongs
    }

    /// Dimension of the walker's Hilbert space: 2 directed states per edge.
    pub fn state_count(&self) -> usize {
        2 * self.edge_count()
    }

    pub fn outer_count(&self) -> usize {
        self.outer.len()
    }

    /// Scattering amplitudes of every center (all have degree N).
    pub fn center_coefficients(&self) -> ScatterCoefficients {
        scatter_coefficients(self.prongs).expect("centers have degree >= 4")
    }

    /// t = 2/N, the transmission amplitude at every center.
    pub fn transmission(&self) -> f64 {
        self.center_coefficients().transmission
    }

    /// r = (N-2)/N, the reflection amplitude at every center.
    pub fn reflection(&self) -> f64 {
        self.center_coefficients().reflection
    }

    /// Index of the center-to-outer state of star `star`, prong slot `slot`.
    pub fn outgoing_index(&self, star: usize, slot: usize) -> usize {
        debug_assert!(star < self.stars() && slot < self.prongs);
        2 * star * self.prongs + slot
    }

    /// Index of the outer-to-center state of star `star`, prong slot `slot`.
    pub fn ingoing_index(&self, star: usize, slot: usize) -> usize {
        debug_assert!(star < self.stars() && slot < self.prongs);
        (2 * star + 1) * self.prongs + slot
    }

    /// True if the state moves outer-to-center.
    pub fn is_ingoing(&self, state: usize) -> bool {
        (state / self.prongs) % 2 == 1
    }

    /// Index of the state on the same edge moving the other way.
    pub fn reverse_index(&self, state: usize) -> usize {
        debug_assert!(state < self.state_count());
        let n = self.prongs;
        if self.is_ingoing(state) {
            state - n
        } else {
            state + n
        }
    }

    /// (star, slot, ingoing) decomposition of a state index.
    pub fn decompose(&self, state: usize) -> (usize, usize, bool) {
        debug_assert!(state < self.state_count());
        let n = self.prongs;
        (state / (2 * n), state % n, self.is_ingoing(state))
    }

    /// Undirected edge carrying a directed state.
    pub fn edge_of_state(&self, state: usize) -> EdgeId {
        let (star, slot, _) = self.decompose(state);
        star * self.prongs + slot
    }

    /// Both directed states of an edge, (outgoing, ingoing).
    pub fn states_of_edge(&self, edge: EdgeId) -> (usize, usize) {
        let (star, slot) = (edge / self.prongs, edge % self.prongs);
        (
            self.outgoing_index(star, slot),
            self.ingoing_index(star, slot),
        )
    }

    /// Outer vertices of star `star` in slot order (length N).
    pub fn star_prongs(&self, star: usize) -> &[OuterId] {
        &self.star_prongs[star]
    }

    pub fn outer_kind(&self, outer: OuterId) -> VertexKind {
        self.outer[outer].kind
    }

    pub fn outer_label(&self, outer: OuterId) -> OuterLabel {
        self.outer[outer].label
    }

    pub fn outer_degree(&self, outer: OuterId) -> usize {
        self.outer[outer].incident.len()
    }

    /// Looks up an outer vertex by its naming-family label.
    pub fn outer_with_label(&self, family: usize, index: usize) -> Option<OuterId> {
        self.by_label.get(&OuterLabel { family, index }).copied()
    }

    /// Prong slot occupied by `outer` within `star`, if adjacent.
    pub fn slot_in_star(&self, star: usize, outer: OuterId) -> Option<usize> {
        self.outer[outer]
            .incident
            .iter()
            .find(|(s, _)| *s == star)
            .map(|&(_, slot)| slot)
    }

    /// Index of |A_star, outer>, if the edge exists.
    pub fn outgoing_state(&self, star: usize, outer: OuterId) -> Option<usize> {
        self.slot_in_star(star, outer)
            .map(|slot| self.outgoing_index(star, slot))
    }

    /// Index of |outer, A_star>, if the edge exists.
    pub fn ingoing_state(&self, star: usize, outer: OuterId) -> Option<usize> {
        self.slot_in_star(star, outer)
            .map(|slot| self.ingoing_index(star, slot))
    }

    /// Human-readable endpoints of a directed state index.
    pub fn describe_state(&self, state: usize) -> DirectedEdgeState {
        let (star, slot, ingoing) = self.decompose(state);
        let outer = VertexRef::Outer {
            label: self.outer_label(self.star_prongs[star][slot]),
        };
        let center = VertexRef::Center { star: star + 1 };
        let (from, to) = if ingoing {
            (outer, center)
        } else {
            (center, outer)
        };
        DirectedEdgeState {
            from,
            to,
            index: state,
        }
    }

    /// Edges lying on the START-to-END paths: all edges incident to START,
    /// END, or a shared PassThrough vertex.
    pub fn path_edges(&self) -> &[EdgeId] {
        &self.path
    }

    pub fn start_vertex(&self) -> OuterId {
        self.start
    }

    pub fn end_vertex(&self) -> OuterId {
        self.end
    }

    /// Image of a state index under the chain's left-right mirror symmetry
    /// (star s maps to star stars-1-s; shared slots of the middle star swap
    /// sides; plain middle prongs are fixed).
    pub fn mirror_state(&self, state: usize) -> usize {
        let (star, slot, ingoing) = self.decompose(state);
        let stars = self.stars();
        let (mstar, mslot) = if stars == 2 {
            (1 - star, slot)
        } else if star != 1 {
            (2 - star, slot)
        } else {
            // Middle star: slots are [left shared | plain | right shared].
            let m1 = self.shared.expect("three-star has shared parameter") - 1;
            let plain = self.prongs - 2 * m1;
            let mslot = if slot < m1 {
                slot + m1 + plain
            } else if slot < m1 + plain {
                slot
            } else {
                slot - m1 - plain
            };
            (1, mslot)
        };
        if ingoing {
            self.ingoing_index(mstar, mslot)
        } else {
            self.outgoing_index(mstar, mslot)
        }
    }
}
