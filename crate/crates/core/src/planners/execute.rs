use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{CorrectionFrame, FramedGraph, Graph, Outcome, OutcomePolicy, VertexId};
use crate::lattice::cluster_graph;
use crate::oracle::{
    equal_up_to_global_phase, simulate_measurements, stabilizes_framed_graph, PhysicalMeasurement, StateVector,
    Tableau,
};
use crate::primitives::{replay, CostReport, Plan, StepOp};

fn describe_difference(got: &Graph, want: &Graph) -> String {
    let gv: BTreeSet<VertexId> = got.vertices().collect();
    let wv: BTreeSet<VertexId> = want.vertices().collect();
    if let Some(v) = gv.symmetric_difference(&wv).next() {
        return format!("vertex {v} present in only one graph");
    }
    let ge: BTreeSet<(VertexId, VertexId)> = got.edges().collect();
    let we: BTreeSet<(VertexId, VertexId)> = want.edges().collect();
    match ge.symmetric_difference(&we).next() {
        Some((a, b)) => format!("edge {a}-{b} present in only one graph"),
        None => "graphs differ".to_string(),
    }
}

/// Replays the plan on the full cluster with `+` outcomes and checks the
/// final graph against the prediction. Returns the graph on the unmeasured
/// sites and the accumulated frame.
pub fn execute_plan(plan: &Plan) -> Result<(Graph, CorrectionFrame)> {
    execute_plan_with(plan, OutcomePolicy::AllPlus)
}

/// As [`execute_plan`], with outcomes drawn from `policy`. Outcomes only
/// change the frame, never the graph.
pub fn execute_plan_with(plan: &Plan, policy: OutcomePolicy) -> Result<(Graph, CorrectionFrame)> {
    let state = replay(plan.grid, &plan.steps, policy)?;
    if state.graph != plan.predicted_graph {
        return Err(Error::PredictionMismatch(describe_difference(&state.graph, &plan.predicted_graph)));
    }
    Ok((state.graph, state.frame))
}

/// Soundness of an extraction: the targets form exactly the requested graph
/// and have no edge to any other site.
pub fn check_extraction(plan: &Plan, g: &Graph) -> Result<()> {
    let ids = plan.target_ids();
    let members: BTreeSet<VertexId> = ids.values().copied().collect();
    for (label, &v) in &ids {
        let nbrs = g.neighbors(v).map_err(|_| Error::PredictionMismatch(format!("target {label} was measured")))?;
        if let Some(o) = nbrs.iter().find(|o| !members.contains(o)) {
            let c = plan.grid.coord(*o);
            return Err(Error::PredictionMismatch(format!("target {label} is still attached to {c}")));
        }
    }
    let got = g.induced(&members);
    let want = plan.requested_graph()?;
    if got != want {
        let name = |v: VertexId| ids.iter().find(|(_, id)| **id == v).map(|(l, _)| l.clone()).unwrap_or_default();
        let ge: BTreeSet<_> = got.edges().collect();
        let we: BTreeSet<_> = want.edges().collect();
        let detail = match (we.difference(&ge).next(), ge.difference(&we).next()) {
            (Some((a, b)), _) => format!("requested edge {}-{} is missing", name(*a), name(*b)),
            (_, Some((a, b))) => format!("unrequested edge {}-{} is present", name(*a), name(*b)),
            _ => "target graphs differ".to_string(),
        };
        return Err(Error::PredictionMismatch(detail));
    }
    Ok(())
}

pub fn cost_report(plan: &Plan) -> CostReport {
    let edges: Vec<_> = plan
        .edges
        .iter()
        .filter_map(|(a, b)| {
            let find = |l: &String| plan.targets.iter().find(|t| &t.label == l).map(|t| t.coord());
            Some((find(a)?, find(b)?))
        })
        .collect();
    CostReport::from_steps(&plan.steps, plan.grid, &edges, plan.stats.n_exp)
}

/// Physical run of a plan on a stabilizer tableau of the full cluster.
#[derive(Debug, Clone)]
pub struct PhysicalRun {
    pub state: FramedGraph,
    pub measurements: Vec<PhysicalMeasurement>,
    /// Graph-frame outcomes that had to be flipped because the drawn one
    /// was impossible (X on a vertex without neighbors).
    pub forced: usize,
}

/// Measures each step's physical observable on a tableau of the cluster,
/// drawing outcomes from `seed` (or `+` without one), and checks that the
/// final tableau is the predicted framed graph state.
pub fn verify_tableau(plan: &Plan, seed: Option<u64>) -> Result<PhysicalRun> {
    let cluster = cluster_graph(plan.grid);
    let mut tableau = Tableau::of_graph(&cluster);
    let mut state = FramedGraph::new(cluster);
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut measurements = Vec::new();
    let mut forced = 0;
    for s in &plan.steps {
        plan.grid.check(s.coord())?;
        let v = plan.grid.id(s.coord());
        let basis = match s.op {
            StepOp::LocalComplement => {
                state.local_complement(v)?;
                continue;
            }
            StepOp::Measure(b) => b,
        };
        let b0 = s.neighbor.map(|c| plan.grid.id(c));
        let drawn = if rng.as_mut().is_some_and(|r| r.gen_bool(0.5)) { Outcome::Minus } else { Outcome::Plus };
        let mut next = state.clone();
        let applied = next.measure(v, basis, drawn, b0)?;
        let p = tableau.probability(&[(v, applied.observable.pauli)], applied.observable.negative, drawn)?;
        let (next, applied) = if p > 0.0 {
            (next, applied)
        } else {
            forced += 1;
            let mut other = state.clone();
            let flipped = if drawn.is_minus() { Outcome::Plus } else { Outcome::Minus };
            let applied = other.measure(v, basis, flipped, b0)?;
            (other, applied)
        };
        tableau.measure_single(v, applied.observable, applied.record.outcome)?;
        measurements.push(PhysicalMeasurement { vertex: v, observable: applied.observable, outcome: applied.record.outcome });
        state = next;
    }
    if state.graph != plan.predicted_graph {
        return Err(Error::PredictionMismatch(describe_difference(&state.graph, &plan.predicted_graph)));
    }
    if !stabilizes_framed_graph(&tableau, &state.graph, &state.frame)? {
        return Err(Error::PredictionMismatch("tableau does not stabilize the predicted framed graph".into()));
    }
    Ok(PhysicalRun { state, measurements, forced })
}

/// Dense check: measures the cluster qubit by qubit with the outcomes of a
/// tableau run and compares the surviving state with the predicted one.
/// Refuses plans that leave more than `cap` qubits unmeasured.
pub fn verify_statevector(plan: &Plan, seed: Option<u64>, cap: usize) -> Result<()> {
    let remaining = plan.predicted_graph.vertex_count();
    if remaining > cap {
        return Err(Error::TooManyQubits { qubits: remaining, cap });
    }
    let run = verify_tableau(plan, seed)?;
    let (post, _) = simulate_measurements(&cluster_graph(plan.grid), &run.measurements, cap)?;
    let mut want = StateVector::of_graph(&run.state.graph, cap)?;
    want.apply_frame(&run.state.frame)?;
    if !equal_up_to_global_phase(&post, &want, 1e-9)? {
        return Err(Error::PredictionMismatch("statevector differs from the predicted framed graph state".into()));
    }
    Ok(())
}
