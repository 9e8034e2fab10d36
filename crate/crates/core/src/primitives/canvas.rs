use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Basis, CorrectionFrame, FramedGraph, Graph, Outcome, VertexId};
use crate::lattice::{cluster_graph, Coord, GridPattern, GridSpec, Role};

use super::plan::{PlanStep, StepOp};

/// Working state of a plan under construction: the pattern drawn so far, the
/// graph state it leaves, and the emitted steps.
///
/// `protected` sites (targets and intermediate hubs) must keep exactly the
/// edges among themselves that the gadgets intend. `reserved` sites are held
/// back for later gadgets and are never used for routing or isolation.
#[derive(Debug, Clone)]
pub struct Canvas {
    pattern: GridPattern,
    state: FramedGraph,
    steps: Vec<PlanStep>,
    targets: BTreeSet<Coord>,
    protected: BTreeSet<Coord>,
    reserved: BTreeSet<Coord>,
}

impl Canvas {
    pub fn new(spec: GridSpec) -> Canvas {
        Canvas {
            pattern: GridPattern::new(spec),
            state: FramedGraph::new(cluster_graph(spec)),
            steps: Vec::new(),
            targets: BTreeSet::new(),
            protected: BTreeSet::new(),
            reserved: BTreeSet::new(),
        }
    }

    pub fn with_targets(spec: GridSpec, targets: impl IntoIterator<Item = Coord>) -> Result<Canvas> {
        let mut c = Canvas::new(spec);
        for t in targets {
            c.add_target(t)?;
        }
        Ok(c)
    }

    pub fn add_target(&mut self, c: Coord) -> Result<()> {
        self.pattern.set(c, Role::Target)?;
        self.targets.insert(c);
        self.protected.insert(c);
        Ok(())
    }

    pub fn spec(&self) -> GridSpec {
        self.pattern.spec()
    }

    pub fn pattern(&self) -> &GridPattern {
        &self.pattern
    }

    pub fn graph(&self) -> &Graph {
        &self.state.graph
    }

    pub fn frame(&self) -> &CorrectionFrame {
        &self.state.frame
    }

    pub fn steps(&self) -> &[PlanStep] {
        &self.steps
    }

    pub fn targets(&self) -> &BTreeSet<Coord> {
        &self.targets
    }

    pub fn id(&self, c: Coord) -> VertexId {
        self.spec().id(c)
    }

    pub fn coord(&self, v: VertexId) -> Coord {
        self.spec().coord(v)
    }

    pub fn alive(&self, c: Coord) -> bool {
        self.spec().contains(c) && self.state.graph.contains(self.id(c))
    }

    pub fn has_edge(&self, a: Coord, b: Coord) -> bool {
        self.alive(a) && self.alive(b) && self.state.graph.has_edge(self.id(a), self.id(b))
    }

    /// Current graph neighbors of `c`.
    pub fn neighbors(&self, c: Coord) -> Vec<Coord> {
        if !self.alive(c) {
            return Vec::new();
        }
        self.state.graph.neighbors(self.id(c)).unwrap().iter().map(|v| self.coord(*v)).collect()
    }

    pub fn degree(&self, c: Coord) -> usize {
        self.neighbors(c).len()
    }

    pub fn protect(&mut self, c: Coord) {
        self.protected.insert(c);
    }

    pub fn unprotect(&mut self, c: Coord) {
        if !self.targets.contains(&c) {
            self.protected.remove(&c);
        }
    }

    pub fn is_protected(&self, c: Coord) -> bool {
        self.protected.contains(&c)
    }

    pub fn protected(&self) -> &BTreeSet<Coord> {
        &self.protected
    }

    pub fn reserve(&mut self, c: Coord) {
        self.reserved.insert(c);
    }

    pub fn release(&mut self, c: Coord) {
        self.reserved.remove(&c);
    }

    pub fn is_reserved(&self, c: Coord) -> bool {
        self.reserved.contains(&c)
    }

    /// Alive, unprotected, unreserved: available to gadgets.
    pub fn is_spare(&self, c: Coord) -> bool {
        self.alive(c) && !self.protected.contains(&c) && !self.reserved.contains(&c)
    }

    /// Measures `c` in the graph-frame `basis`; targets are refused.
    pub fn measure(&mut self, c: Coord, basis: Basis, b0: Option<Coord>, tag: &str) -> Result<()> {
        if self.targets.contains(&c) {
            return Err(Error::planning(format!("target {c}"), "gadget tried to measure a target"));
        }
        self.spec().check(c)?;
        let b0 = b0.map(|n| self.id(n));
        let applied = self.state.measure(self.id(c), basis, Outcome::Plus, b0)?;
        let role = match basis {
            Basis::X => Role::MeasX,
            Basis::Y => Role::MeasY,
            Basis::Z => Role::MeasZ,
        };
        if self.pattern.get(c) != Some(Role::Junction) {
            self.pattern.set(c, role)?;
        }
        self.protected.remove(&c);
        self.reserved.remove(&c);
        self.push(c, StepOp::Measure(basis), tag, applied.record.chosen_neighbor.map(|v| self.coord(v)));
        Ok(())
    }

    pub fn measure_z_all(&mut self, cells: impl IntoIterator<Item = Coord>, tag: &str) -> Result<()> {
        for c in cells {
            if self.alive(c) {
                self.measure(c, Basis::Z, None, tag)?;
            }
        }
        Ok(())
    }

    /// Local complementation at `c`, a frame change with no measurement.
    pub fn local_complement(&mut self, c: Coord, tag: &str) -> Result<()> {
        self.state.local_complement(self.id(c))?;
        self.push(c, StepOp::LocalComplement, tag, None);
        Ok(())
    }

    pub fn mark_junction(&mut self, c: Coord) -> Result<()> {
        if !self.targets.contains(&c) {
            self.pattern.set(c, Role::Junction)?;
        }
        Ok(())
    }

    fn push(&mut self, c: Coord, op: StepOp, tag: &str, neighbor: Option<Coord>) {
        let order = self.steps.len();
        self.steps.push(PlanStep { x: c.x, y: c.y, op, order, tag: tag.to_string(), neighbor });
    }

    pub fn measurement_count(&self) -> usize {
        self.steps.iter().filter(|s| s.is_measurement()).count()
    }

    /// Subgraph induced on the protected sites.
    pub fn protected_graph(&self) -> Graph {
        let ids: Vec<VertexId> = self.protected.iter().map(|c| self.id(*c)).collect();
        self.state.graph.induced(&ids)
    }

    /// Z-measures every spare neighbor of the given sites until none remain.
    pub fn isolate(&mut self, sites: &[Coord], tag: &str) -> Result<Vec<Coord>> {
        let mut done = Vec::new();
        loop {
            let next: BTreeSet<Coord> = sites
                .iter()
                .flat_map(|s| self.neighbors(*s))
                .filter(|n| self.is_spare(*n) && !sites.contains(n))
                .collect();
            if next.is_empty() {
                return Ok(done);
            }
            let mut next: Vec<Coord> = next.into_iter().collect();
            next.sort_by_key(|c| c.row_major());
            for n in next {
                self.measure(n, Basis::Z, None, tag)?;
                done.push(n);
            }
        }
    }
}
