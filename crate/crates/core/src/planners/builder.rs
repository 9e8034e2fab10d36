use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::Basis;
use crate::lattice::{manhattan, Coord};
use crate::primitives::{
    expand_degree, expand_degree_u_shaped, zipper_connect_with, Canvas, CostReport, Direction, Plan, ZipperOptions,
    ZipperResult,
};

use super::execute::check_extraction;
use super::request::ExtractionRequest;

/// Shared state of the three planners.
///
/// Every target with connections still to make holds its spare neighbors in
/// a reserved ring, so that other routes and isolations leave them alone.
#[derive(Clone)]
pub(crate) struct Builder<'r> {
    pub req: &'r ExtractionRequest,
    pub canvas: Canvas,
    pub n_exp: usize,
    labels: BTreeMap<Coord, String>,
    pending: BTreeMap<Coord, usize>,
    ring: BTreeSet<Coord>,
}

/// Unordered site pair in row-major order.
pub(crate) fn pair(a: Coord, b: Coord) -> (Coord, Coord) {
    if a.row_major() <= b.row_major() {
        (a, b)
    } else {
        (b, a)
    }
}

impl<'r> Builder<'r> {
    pub fn new(req: &'r ExtractionRequest) -> Result<Builder<'r>> {
        req.validate()?;
        let canvas = Canvas::with_targets(req.grid, req.targets.iter().map(|t| t.coord()))?;
        Ok(Builder {
            req,
            canvas,
            n_exp: 0,
            labels: req.targets.iter().map(|t| (t.coord(), t.label.clone())).collect(),
            pending: BTreeMap::new(),
            ring: BTreeSet::new(),
        })
    }

    pub fn name(&self, c: Coord) -> String {
        self.labels.get(&c).cloned().unwrap_or_else(|| c.to_string())
    }

    pub fn is_target(&self, c: Coord) -> bool {
        self.labels.contains_key(&c)
    }

    pub fn requested(&self) -> BTreeSet<(Coord, Coord)> {
        self.req.edge_coords().into_iter().map(|(a, b)| pair(a, b)).collect()
    }

    /// Target pairs joined by a lattice edge from the start.
    pub fn native(&self) -> BTreeSet<(Coord, Coord)> {
        let mut out = BTreeSet::new();
        for &a in self.labels.keys() {
            for b in self.canvas.neighbors(a) {
                if self.is_target(b) {
                    out.insert(pair(a, b));
                }
            }
        }
        out
    }

    pub fn pending(&self, c: Coord) -> usize {
        self.pending.get(&c).copied().unwrap_or(0)
    }

    pub fn add_pending(&mut self, c: Coord, k: usize) {
        *self.pending.entry(c).or_default() += k;
    }

    pub fn done(&mut self, c: Coord) {
        if let Some(n) = self.pending.get_mut(&c) {
            *n = n.saturating_sub(1);
        }
    }

    /// Re-reserves the rings of all targets with work left, except `open`.
    /// Cells in `exempt` are never put into a ring.
    pub fn refresh_rings(&mut self, open: &[Coord], exempt: &[Coord]) {
        for c in std::mem::take(&mut self.ring) {
            self.canvas.release(c);
        }
        let owners: Vec<Coord> =
            self.pending.iter().filter(|(t, n)| **n > 0 && !open.contains(t)).map(|(t, _)| *t).collect();
        for t in owners {
            for q in self.canvas.neighbors(t) {
                if self.canvas.is_spare(q) && !exempt.contains(&q) {
                    self.canvas.reserve(q);
                    self.ring.insert(q);
                }
            }
        }
    }

    pub fn in_ring(&self, c: Coord) -> bool {
        self.ring.contains(&c)
    }

    /// Sites next to `v` that could still start or end a route.
    pub fn free_ports(&self, v: Coord) -> usize {
        self.canvas.neighbors(v).into_iter().filter(|q| self.canvas.is_spare(*q) || self.ring.contains(q)).count()
    }

    /// Raises the degree of `v` until `need` routes fit, expanding toward
    /// `toward` when possible. Unidirectional expansion comes first; the
    /// one-sided bar is the fallback when every straight footprint is blocked.
    pub fn ensure_degree(&mut self, v: Coord, need: usize, toward: Option<Coord>) -> Result<()> {
        let have = self.free_ports(v);
        if have >= need {
            return Ok(());
        }
        let n = (need - have).div_ceil(2);
        self.refresh_rings(&[v], &[]);
        let mut dirs = Direction::ALL.to_vec();
        if let Some(t) = toward {
            dirs.sort_by_key(|d| manhattan(d.place(v, 2, 0), t));
        }
        let mut done = false;
        for d in &dirs {
            if expand_degree(&mut self.canvas, v, *d, n).is_ok() {
                done = true;
                break;
            }
        }
        if !done {
            for d in &dirs {
                if expand_degree_u_shaped(&mut self.canvas, v, *d, n).is_ok() {
                    done = true;
                    break;
                }
            }
        }
        self.refresh_rings(&[], &[]);
        if !done {
            return Err(Error::planning(format!("vertex {}", self.name(v)), format!("no room to raise its degree to {need}")));
        }
        self.n_exp += n;
        Ok(())
    }

    /// Zipper between `a` and `b` with their rings opened. `route` cells are
    /// kept out of the rings so that a planned route stays usable.
    pub fn connect(&mut self, a: Coord, b: Coord, route: Option<Vec<Coord>>, keep_open: [bool; 2]) -> Result<ZipperResult> {
        for c in [a, b] {
            if self.pending(c) > 0 && self.free_ports(c) == 0 {
                self.ensure_degree(c, self.pending(c), None)?;
            }
        }
        let exempt = route.clone().unwrap_or_default();
        self.refresh_rings(&[a, b], &exempt);
        let opts = ZipperOptions { preferred: route, keep_open };
        let r = zipper_connect_with(&mut self.canvas, a, b, &opts);
        self.refresh_rings(&[], &[]);
        match r {
            Ok(z) => Ok(z),
            Err(e) => self.connect_through_rings(a, b, &opts).ok_or_else(|| Error::planning(format!("edge {}-{}", self.name(a), self.name(b)), e)),
        }
    }

    /// Fallback for crowded spots: the zipper may also use or clear ring
    /// sites of other targets, as long as each of them keeps enough ports
    /// for the work it has left.
    fn connect_through_rings(&mut self, a: Coord, b: Coord, opts: &ZipperOptions) -> Option<ZipperResult> {
        let mut trial = self.clone();
        let owners: Vec<Coord> = trial.pending.keys().copied().collect();
        trial.refresh_rings(&owners, &[]);
        let z = zipper_connect_with(&mut trial.canvas, a, b, opts).ok()?;
        trial.refresh_rings(&[], &[]);
        // the ends may expand again before their next zipper
        let short = trial.pending.iter().any(|(t, n)| ![a, b].contains(t) && trial.free_ports(*t) < *n);
        if short {
            return None;
        }
        *self = trial;
        Some(z)
    }

    /// Zipper for a requested edge; both ends stay open while they have work left.
    pub fn connect_edge(&mut self, a: Coord, b: Coord, route: Option<Vec<Coord>>) -> Result<ZipperResult> {
        let keep = [self.pending(a) > 1, self.pending(b) > 1];
        let r = self.connect(a, b, route, keep)?;
        self.done(a);
        self.done(b);
        Ok(r)
    }

    /// Removes the lattice edge between adjacent targets `u` and `v` through
    /// a square `u - p - q - v`: with `p` and `q` cut off from everything
    /// else, Y on `p` joins `u` to `q` and Y on `q` then toggles `u-v`.
    pub fn remove_native(&mut self, u: Coord, v: Coord) -> Result<()> {
        self.refresh_rings(&[u, v], &[]);
        let (dx, dy) = (v.x - u.x, v.y - u.y);
        for side in [(dy, dx), (-dy, -dx)] {
            let (p, q) = (u.offset(side.0, side.1), v.offset(side.0, side.1));
            if !self.canvas.is_spare(p) || !self.canvas.is_spare(q) {
                continue;
            }
            let mut trial = self.canvas.clone();
            trial.protect(p);
            trial.protect(q);
            let loose: Vec<Coord> = [p, q]
                .iter()
                .flat_map(|c| trial.neighbors(*c))
                .filter(|n| ![u, v, p, q].contains(n))
                .collect();
            if loose.iter().any(|n| trial.is_protected(*n)) {
                continue;
            }
            trial.measure_z_all(loose, "toggle")?;
            trial.measure(p, Basis::Y, None, "toggle")?;
            trial.measure(q, Basis::Y, None, "toggle")?;
            self.canvas = trial;
            self.done(u);
            self.done(v);
            self.refresh_rings(&[], &[]);
            return Ok(());
        }
        self.refresh_rings(&[], &[]);
        Err(Error::planning(
            format!("edge {}-{}", self.name(u), self.name(v)),
            "no free square beside the adjacent targets to cut their lattice edge",
        ))
    }

    /// Cuts every target off from the spare sites, checks the result and
    /// packages the plan.
    pub fn finish(mut self, strategy: &str) -> Result<Plan> {
        self.pending.clear();
        self.refresh_rings(&[], &[]);
        let targets: Vec<Coord> = self.labels.keys().copied().collect();
        self.canvas.isolate(&targets, "cleanup")?;
        let edges = self.req.edge_coords();
        let plan = Plan {
            grid: self.req.grid,
            targets: self.req.targets.clone(),
            edges: self.req.edges.clone(),
            strategy: strategy.to_string(),
            steps: self.canvas.steps().to_vec(),
            predicted_graph: self.canvas.graph().clone(),
            stats: CostReport::from_steps(self.canvas.steps(), self.req.grid, &edges, self.n_exp),
        };
        check_extraction(&plan, &plan.predicted_graph).map_err(|e| Error::planning("result", e))?;
        Ok(plan)
    }
}
