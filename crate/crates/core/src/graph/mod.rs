//! Graph-state representation and the graphical rewrite rules.
//!
//! A [`Graph`] stands for the graph state `∏ CZ_ab |+⟩^⊗V` up to the local
//! Clifford byproducts collected in a [`CorrectionFrame`]. Measured vertices
//! are deleted from the graph.

mod clifford;
mod measure;

pub use clifford::{Clifford, CorrectionFrame, Pauli, SignedPauli};
pub use measure::{
    execute_sequence, measure, measure_x, measure_y, measure_z, AppliedMeasurement, Basis, FramedGraph, GraphStep, Measured,
    MeasurementRecord, Outcome, OutcomePolicy,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque vertex identifier. The lattice module uses `y * width + x`.
pub type VertexId = u32;

/// Simple undirected graph with symmetric, irreflexive adjacency.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from a vertex list and an edge list.
    pub fn from_edges<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut g = Graph::new();
        for v in vertices {
            g.add_vertex(v);
        }
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: VertexId) -> bool {
        if self.adj.contains_key(&v) {
            return false;
        }
        self.adj.insert(v, BTreeSet::new());
        true
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<()> {
        self.check_pair(a, b)?;
        self.adj.get_mut(&a).unwrap().insert(b);
        self.adj.get_mut(&b).unwrap().insert(a);
        Ok(())
    }

    pub fn remove_edge(&mut self, a: VertexId, b: VertexId) -> Result<bool> {
        self.check_pair(a, b)?;
        let had = self.adj.get_mut(&a).unwrap().remove(&b);
        self.adj.get_mut(&b).unwrap().remove(&a);
        Ok(had)
    }

    pub fn toggle_edge(&mut self, a: VertexId, b: VertexId) -> Result<()> {
        if self.has_edge(a, b) {
            self.remove_edge(a, b)?;
        } else {
            self.add_edge(a, b)?;
        }
        Ok(())
    }

    fn check_pair(&self, a: VertexId, b: VertexId) -> Result<()> {
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        self.require(a)?;
        self.require(b)
    }

    /// Errors with [`Error::UnknownVertex`] unless `v` is present.
    pub fn require(&self, v: VertexId) -> Result<()> {
        if self.adj.contains_key(&v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    /// Deletes `v` and all incident edges. Returns the former neighborhood.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<BTreeSet<VertexId>> {
        let nbrs = self.adj.remove(&v).ok_or(Error::UnknownVertex(v))?;
        for u in &nbrs {
            self.adj.get_mut(u).unwrap().remove(&v);
        }
        Ok(nbrs)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.adj.get(&a).is_some_and(|n| n.contains(&b))
    }

    /// Neighborhood `N_v`.
    pub fn neighbors(&self, v: VertexId) -> Result<&BTreeSet<VertexId>> {
        self.adj.get(&v).ok_or(Error::UnknownVertex(v))
    }

    pub fn degree(&self, v: VertexId) -> Result<usize> {
        self.neighbors(v).map(BTreeSet::len)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    /// Edges with the smaller id first, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&a, n)| n.range(a + 1..).map(move |&b| (a, b)))
    }

    /// Toggles every edge inside `N_a`, in place.
    pub fn local_complement_mut(&mut self, a: VertexId) -> Result<()> {
        let nbrs: Vec<VertexId> = self.neighbors(a)?.iter().copied().collect();
        for (i, &u) in nbrs.iter().enumerate() {
            for &w in &nbrs[i + 1..] {
                self.toggle_edge(u, w)?;
            }
        }
        Ok(())
    }

    /// Local complementation at `a`: the subgraph spanned by `N_a` is inverted.
    pub fn local_complement(&self, a: VertexId) -> Result<Graph> {
        let mut g = self.clone();
        g.local_complement_mut(a)?;
        Ok(g)
    }

    /// Subgraph induced on the members of `keep` that are present.
    pub fn induced<'a, I>(&self, keep: I) -> Graph
    where
        I: IntoIterator<Item = &'a VertexId>,
    {
        let keep: BTreeSet<VertexId> = keep.into_iter().copied().filter(|v| self.contains(*v)).collect();
        let adj = keep
            .iter()
            .map(|v| (*v, self.adj[v].intersection(&keep).copied().collect()))
            .collect();
        Graph { adj }
    }

    /// Vertices reachable from `v`, including `v`.
    pub fn component_of(&self, v: VertexId) -> Result<BTreeSet<VertexId>> {
        self.require(v)?;
        let mut seen = BTreeSet::from([v]);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &w in &self.adj[&u] {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        Ok(seen)
    }

    pub fn is_connected(&self) -> bool {
        match self.adj.keys().next() {
            None => true,
            Some(&v) => self.component_of(v).map(|c| c.len()).unwrap_or(0) == self.adj.len(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson::from(self)).expect("graph serializes")
    }

    pub fn from_json(s: &str) -> Result<Graph> {
        let raw: GraphJson = serde_json::from_str(s)?;
        Graph::try_from(raw)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph{{V={:?}, E={:?}}}", self.adj.keys().collect::<Vec<_>>(), self.edges().collect::<Vec<_>>())
    }
}

/// Canonical wire form: `{"vertices":[..],"edges":[[a,b],..]}` with `a < b`, sorted.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<[VertexId; 2]>,
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        GraphJson {
            vertices: g.vertices().collect(),
            edges: g.edges().map(|(a, b)| [a, b]).collect(),
        }
    }
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(raw: GraphJson) -> Result<Graph> {
        Graph::from_edges(raw.vertices, raw.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        Graph::try_from(raw).map_err(serde::de::Error::custom)
    }
}
