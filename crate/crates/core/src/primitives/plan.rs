use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{Basis, FramedGraph, Graph, Outcome, OutcomePolicy, VertexId};
use crate::lattice::{cluster_graph, manhattan, Coord, GridSpec};

/// What a step does to its site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepOp {
    Measure(Basis),
    /// Local complementation, absorbed into the correction frame; no measurement.
    LocalComplement,
}

impl StepOp {
    pub fn code(self) -> &'static str {
        match self {
            StepOp::Measure(Basis::X) => "X",
            StepOp::Measure(Basis::Y) => "Y",
            StepOp::Measure(Basis::Z) => "Z",
            StepOp::LocalComplement => "LC",
        }
    }

    pub fn from_code(s: &str) -> Option<StepOp> {
        Some(match s {
            "X" => StepOp::Measure(Basis::X),
            "Y" => StepOp::Measure(Basis::Y),
            "Z" => StepOp::Measure(Basis::Z),
            "LC" => StepOp::LocalComplement,
            _ => return None,
        })
    }

    pub fn basis(self) -> Option<Basis> {
        match self {
            StepOp::Measure(b) => Some(b),
            StepOp::LocalComplement => None,
        }
    }
}

impl fmt::Display for StepOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for StepOp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for StepOp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        StepOp::from_code(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown basis {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanStep {
    pub x: i32,
    pub y: i32,
    #[serde(rename = "basis")]
    pub op: StepOp,
    pub order: usize,
    pub tag: String,
    /// Special neighbor of an X measurement, fixed at planning time so that
    /// replays produce the same graph.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighbor: Option<Coord>,
}

impl PlanStep {
    pub fn coord(&self) -> Coord {
        Coord::new(self.x, self.y)
    }

    pub fn is_measurement(&self) -> bool {
        self.op.basis().is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanTarget {
    pub label: String,
    pub x: i32,
    pub y: i32,
}

impl PlanTarget {
    pub fn coord(&self) -> Coord {
        Coord::new(self.x, self.y)
    }
}

/// Measurement counts plus the scale parameters of the request.
///
/// `prep` counts steps spent raising vertex degrees, `connect` the rest.
/// `N` is the grid side; an edge is long range when its Manhattan length
/// exceeds `N / 2`, and `N_c` is the longest short-range edge.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub n_x: usize,
    pub n_y: usize,
    pub n_z: usize,
    pub total: usize,
    pub prep: usize,
    pub connect: usize,
    pub n_e: usize,
    pub n_l: usize,
    #[serde(rename = "N")]
    pub n_grid: u32,
    #[serde(rename = "N_c")]
    pub n_c: u32,
    pub n_exp: usize,
}

/// Tags of steps counted as degree preparation.
pub const PREP_TAGS: [&str; 3] = ["expand", "expand-u", "hub"];

fn is_prep(tag: &str) -> bool {
    PREP_TAGS.iter().any(|p| tag == *p || tag.starts_with(&format!("{p}-")))
}

impl CostReport {
    pub fn from_steps(steps: &[PlanStep], grid: GridSpec, edges: &[(Coord, Coord)], n_exp: usize) -> CostReport {
        let mut r = CostReport { n_exp, n_e: edges.len(), ..CostReport::default() };
        for s in steps {
            let Some(b) = s.op.basis() else { continue };
            match b {
                Basis::X => r.n_x += 1,
                Basis::Y => r.n_y += 1,
                Basis::Z => r.n_z += 1,
            }
            if is_prep(&s.tag) {
                r.prep += 1;
            } else {
                r.connect += 1;
            }
        }
        r.total = r.n_x + r.n_y + r.n_z;
        r.n_grid = grid.width.max(grid.height);
        let half = r.n_grid / 2;
        for (a, b) in edges {
            let d = manhattan(*a, *b);
            if d > half {
                r.n_l += 1;
            } else {
                r.n_c = r.n_c.max(d);
            }
        }
        r
    }
}

/// An ordered measurement pattern and the graph it is predicted to leave.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub grid: GridSpec,
    pub targets: Vec<PlanTarget>,
    /// Requested edges, by target label.
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub strategy: String,
    pub steps: Vec<PlanStep>,
    pub predicted_graph: Graph,
    pub stats: CostReport,
}

impl Plan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn from_json(s: &str) -> Result<Plan> {
        let plan: Plan = serde_json::from_str(s)?;
        plan.grid.validate()?;
        Ok(plan)
    }

    pub fn target_ids(&self) -> BTreeMap<String, VertexId> {
        self.targets.iter().map(|t| (t.label.clone(), self.grid.id(t.coord()))).collect()
    }

    /// Requested graph over target vertex ids.
    pub fn requested_graph(&self) -> Result<Graph> {
        let ids = self.target_ids();
        let lookup = |l: &String| ids.get(l).copied().ok_or_else(|| Error::Request(format!("unknown label {l:?}")));
        let mut g = Graph::from_edges(ids.values().copied(), [])?;
        for (a, b) in &self.edges {
            g.add_edge(lookup(a)?, lookup(b)?)?;
        }
        Ok(g)
    }
}

/// Replays steps on the full cluster of `grid`, taking graph-frame outcomes
/// from `policy`.
pub fn replay(grid: GridSpec, steps: &[PlanStep], policy: OutcomePolicy) -> Result<FramedGraph> {
    use rand::{Rng, SeedableRng};
    let mut rng = match policy {
        OutcomePolicy::Seeded(seed) => Some(rand_chacha::ChaCha8Rng::seed_from_u64(seed)),
        OutcomePolicy::AllPlus => None,
    };
    let mut state = FramedGraph::new(cluster_graph(grid));
    for s in steps {
        grid.check(s.coord())?;
        let v = grid.id(s.coord());
        match s.op {
            StepOp::Measure(basis) => {
                let minus = rng.as_mut().is_some_and(|r| r.gen_bool(0.5));
                let outcome = if minus { Outcome::Minus } else { Outcome::Plus };
                let b0 = s.neighbor.map(|c| grid.check(c).map(|_| grid.id(c))).transpose()?;
                state.measure(v, basis, outcome, b0)?;
            }
            StepOp::LocalComplement => state.local_complement(v)?,
        }
    }
    Ok(state)
}
