//! Pauli measurement rules with outcome-dependent byproducts.
//!
//! Measuring `P_a` with outcome `s` maps `|G⟩` to `|p,s⟩_a ⊗ U_{p,s} |G'⟩`:
//!
//! | basis | `G'` | `U_{+}` | `U_{-}` |
//! |---|---|---|---|
//! | Z | `G - a` | `I` | `∏_{N_a} Z` |
//! | Y | `τ_a(G) - a` | `∏_{N_a} √(-iZ)` | `∏_{N_a} √(iZ)` |
//! | X | `τ_b(τ_a(τ_b(G)) - a)` | `√(iY_b) ∏_{N_a-N_b-b} Z` | `√(-iY_b) ∏_{N_b-N_a-a} Z` |
//!
//! Bases in a measurement sequence are taken in the graph frame: with the
//! accumulated frame `F`, measuring `P` on vertex `a` means physically
//! measuring `F_a P F_a†`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Clifford, CorrectionFrame, Graph, Pauli, SignedPauli, VertexId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub fn pauli(self) -> Pauli {
        match self {
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
            Basis::Z => Pauli::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Y => 'Y',
            Basis::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Basis> {
        match c.to_ascii_uppercase() {
            'X' => Some(Basis::X),
            'Y' => Some(Basis::Y),
            'Z' => Some(Basis::Z),
            _ => None,
        }
    }

    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn is_minus(self) -> bool {
        self == Outcome::Minus
    }

    pub fn sign(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub vertex: VertexId,
    pub basis: Basis,
    pub outcome: Outcome,
    /// Neighbor used by the X rule; `None` for Y/Z or an isolated vertex.
    pub chosen_neighbor: Option<VertexId>,
}

/// Post-measurement graph, the byproduct of this one measurement, and its record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measured {
    pub graph: Graph,
    pub frame: CorrectionFrame,
    pub record: MeasurementRecord,
}

fn z_on(frame: &mut CorrectionFrame, vs: impl IntoIterator<Item = VertexId>) {
    for v in vs {
        frame.push(v, Clifford::pauli(Pauli::Z));
    }
}

/// Z rule: delete `a`.
pub fn measure_z(g: &Graph, a: VertexId, outcome: Outcome) -> Result<Measured> {
    let mut graph = g.clone();
    let nbrs = graph.remove_vertex(a)?;
    let mut frame = CorrectionFrame::identity();
    if outcome.is_minus() {
        z_on(&mut frame, nbrs);
    }
    let record = MeasurementRecord { vertex: a, basis: Basis::Z, outcome, chosen_neighbor: None };
    Ok(Measured { graph, frame, record })
}

/// Y rule: local complementation at `a`, then delete `a`.
pub fn measure_y(g: &Graph, a: VertexId, outcome: Outcome) -> Result<Measured> {
    let mut graph = g.local_complement(a)?;
    let nbrs = graph.remove_vertex(a)?;
    let mut frame = CorrectionFrame::identity();
    let root = Clifford::sqrt_pauli(Pauli::Z, outcome.is_minus());
    for b in nbrs {
        frame.push(b, root);
    }
    let record = MeasurementRecord { vertex: a, basis: Basis::Y, outcome, chosen_neighbor: None };
    Ok(Measured { graph, frame, record })
}

/// X rule with special neighbor `b0` (default: smallest id in `N_a`).
pub fn measure_x(g: &Graph, a: VertexId, outcome: Outcome, b0: Option<VertexId>) -> Result<Measured> {
    let na = g.neighbors(a)?.clone();
    let b = match b0 {
        Some(b) if na.contains(&b) => b,
        Some(b) => return Err(Error::NotAdjacent(a, b)),
        None => match na.first() {
            Some(&b) => b,
            None => {
                let mut graph = g.clone();
                graph.remove_vertex(a)?;
                let record = MeasurementRecord { vertex: a, basis: Basis::X, outcome, chosen_neighbor: None };
                return Ok(Measured { graph, frame: CorrectionFrame::identity(), record });
            }
        },
    };
    let nb = g.neighbors(b)?.clone();

    let mut graph = g.local_complement(b)?;
    graph.local_complement_mut(a)?;
    graph.remove_vertex(a)?;
    graph.local_complement_mut(b)?;

    let mut frame = CorrectionFrame::identity();
    if outcome.is_minus() {
        frame.push(b, Clifford::sqrt_pauli(Pauli::Y, false));
        z_on(&mut frame, nb.iter().copied().filter(|&v| v != a && !na.contains(&v)));
    } else {
        frame.push(b, Clifford::sqrt_pauli(Pauli::Y, true));
        z_on(&mut frame, na.iter().copied().filter(|&v| v != b && !nb.contains(&v)));
    }
    let record = MeasurementRecord { vertex: a, basis: Basis::X, outcome, chosen_neighbor: Some(b) };
    Ok(Measured { graph, frame, record })
}

pub fn measure(g: &Graph, a: VertexId, basis: Basis, outcome: Outcome, b0: Option<VertexId>) -> Result<Measured> {
    match basis {
        Basis::X => measure_x(g, a, outcome, b0),
        Basis::Y => measure_y(g, a, outcome),
        Basis::Z => measure_z(g, a, outcome),
    }
}

/// A graph together with its accumulated byproducts; the state `F |G⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FramedGraph {
    pub graph: Graph,
    pub frame: CorrectionFrame,
}

/// One applied measurement, with the physical observable it corresponds to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppliedMeasurement {
    pub record: MeasurementRecord,
    /// `F_a P F_a†` at the time of measurement; the physical outcome is `record.outcome`.
    pub observable: SignedPauli,
}

impl FramedGraph {
    pub fn new(graph: Graph) -> Self {
        FramedGraph { graph, frame: CorrectionFrame::identity() }
    }

    /// Measures the graph-frame Pauli `basis` on `a`.
    pub fn measure(
        &mut self,
        a: VertexId,
        basis: Basis,
        outcome: Outcome,
        b0: Option<VertexId>,
    ) -> Result<AppliedMeasurement> {
        let observable = self.frame.get(a).conjugate(SignedPauli::plus(basis.pauli()));
        let m = measure(&self.graph, a, basis, outcome, b0)?;
        self.graph = m.graph;
        self.frame.remove(a);
        self.frame = self.frame.compose(&m.frame);
        Ok(AppliedMeasurement { record: m.record, observable })
    }

    /// Applies `τ_a` to the graph; the frame absorbs `LC_a†` so the state is unchanged.
    ///
    /// `|τ_a(G)⟩ = √(-iX_a) ∏_{b∈N_a} √(iZ_b) |G⟩`.
    pub fn local_complement(&mut self, a: VertexId) -> Result<()> {
        let nbrs: Vec<VertexId> = self.graph.neighbors(a)?.iter().copied().collect();
        self.graph.local_complement_mut(a)?;
        self.frame.push(a, Clifford::sqrt_pauli(Pauli::X, true));
        for b in nbrs {
            self.frame.push(b, Clifford::sqrt_pauli(Pauli::Z, false));
        }
        Ok(())
    }
}

/// A graph-level instruction: a measurement (with optional special neighbor
/// for X) or a frame-only local complementation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphStep {
    Measure(VertexId, Basis, Option<VertexId>),
    LocalComplement(VertexId),
}

impl FramedGraph {
    /// Applies one step; measurements report their physical observable.
    pub fn apply(&mut self, step: GraphStep, outcome: Outcome) -> Result<Option<AppliedMeasurement>> {
        match step {
            GraphStep::Measure(v, basis, b0) => self.measure(v, basis, outcome, b0).map(Some),
            GraphStep::LocalComplement(v) => self.local_complement(v).map(|_| None),
        }
    }
}

/// How outcomes are chosen when folding a measurement sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutcomePolicy {
    #[default]
    AllPlus,
    Seeded(u64),
}

/// Applies the rules in order and returns the final graph and accumulated frame.
pub fn execute_sequence(
    g: &Graph,
    steps: &[(VertexId, Basis)],
    policy: OutcomePolicy,
) -> Result<(Graph, CorrectionFrame)> {
    let mut seen = BTreeSet::new();
    for &(v, _) in steps {
        if !seen.insert(v) {
            return Err(Error::DuplicateVertex(v));
        }
        g.require(v)?;
    }
    let mut rng = match policy {
        OutcomePolicy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        OutcomePolicy::AllPlus => None,
    };
    let mut state = FramedGraph::new(g.clone());
    for &(v, basis) in steps {
        let minus = rng.as_mut().is_some_and(|r| r.gen_bool(0.5));
        let outcome = if minus { Outcome::Minus } else { Outcome::Plus };
        state.measure(v, basis, outcome, None)?;
    }
    Ok((state.graph, state.frame))
}
