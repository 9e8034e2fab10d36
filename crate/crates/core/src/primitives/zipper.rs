use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::graph::{Basis, Graph, VertexId};
use crate::lattice::{manhattan, one_turn_zipper, shortcut, Coord, GridSpec};

use super::canvas::Canvas;

/// Steps emitted by one zipper connection.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ZipperResult {
    /// X-measured sites, from `a` toward `b`.
    pub path: Vec<Coord>,
    /// Z-measured sites that cut the pair off from the rest.
    pub isolation: Vec<Coord>,
}

/// Extra cost for a step that continues straight on: staircases keep more of
/// the surrounding cluster intact.
const STRAIGHT_PENALTY: u32 = 2;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Loose,
    /// Avoid sites touching other protected sites.
    Strict,
    /// Only sites whose other neighbors are all spare, so that the sides
    /// can be cleared.
    Clean,
}

/// Cheapest route from `a` to `b` over the current graph, through spare
/// sites only.
fn graph_route(canvas: &Canvas, a: Coord, b: Coord, mode: Mode) -> Option<Vec<Coord>> {
    let spec = canvas.spec();
    let mut memo: Vec<Option<bool>> = vec![None; spec.site_count()];
    let mut usable = |c: Coord| {
        *memo[spec.id(c) as usize].get_or_insert_with(|| {
            canvas.is_spare(c)
                && match mode {
                    Mode::Loose => true,
                    Mode::Strict => {
                        canvas.neighbors(c).iter().all(|n| !canvas.is_protected(*n) || *n == a || *n == b)
                    }
                    Mode::Clean => canvas.neighbors(c).iter().all(|n| canvas.is_spare(*n) || *n == a || *n == b),
                }
        })
    };
    type State = (Coord, (i32, i32));
    let mut dist: HashMap<State, u32> = HashMap::new();
    let mut prev: HashMap<State, State> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let start = (a, (0, 0));
    dist.insert(start, 0);
    heap.push(Reverse((0u32, a.row_major(), (0, 0))));
    let mut goal = None;
    while let Some(Reverse((d, (y, x), dir))) = heap.pop() {
        let c = Coord::new(x, y);
        if dist.get(&(c, dir)).is_some_and(|best| *best < d) {
            continue;
        }
        if c == b {
            goal = Some((c, dir));
            break;
        }
        for n in canvas.neighbors(c) {
            if n != b && !usable(n) {
                continue;
            }
            let step = ((n.x - c.x).signum(), (n.y - c.y).signum());
            let cost = d + 1 + if step == dir { STRAIGHT_PENALTY } else { 0 };
            let key = (n, step);
            if dist.get(&key).is_none_or(|old| cost < *old) {
                dist.insert(key, cost);
                prev.insert(key, (c, dir));
                heap.push(Reverse((cost, n.row_major(), step)));
            }
        }
    }
    let mut cur = goal?;
    let mut path = Vec::new();
    while let Some(p) = prev.get(&cur) {
        if p.0 != a {
            path.push(p.0);
        }
        cur = *p;
    }
    path.reverse();
    Some(path)
}

fn candidate_routes(canvas: &Canvas, a: Coord, b: Coord, preferred: Option<&[Coord]>) -> Vec<Vec<Coord>> {
    let mut routes: Vec<Vec<Coord>> = Vec::new();
    if let Some(p) = preferred {
        let walk: Vec<Coord> = [a].iter().chain(p).chain([&b]).copied().collect();
        let linked = walk.windows(2).all(|w| canvas.has_edge(w[0], w[1]));
        if linked && p.iter().all(|c| canvas.is_spare(*c)) {
            routes.push(p.to_vec());
        }
    }
    if let Ok((_, path)) = one_turn_zipper(b, a, canvas.pattern()) {
        let linked = path
            .iter()
            .zip(path.iter().skip(1))
            .all(|(p, q)| canvas.has_edge(*p, *q));
        let ends = path.is_empty()
            || (canvas.has_edge(a, path[0]) && canvas.has_edge(*path.last().unwrap(), b));
        if linked && ends && path.iter().all(|c| canvas.is_spare(*c)) && !routes.contains(&path) {
            routes.push(path);
        }
    }
    for mode in [Mode::Strict, Mode::Loose, Mode::Clean] {
        if let Some(r) = graph_route(canvas, a, b, mode) {
            if !routes.contains(&r) {
                routes.push(r);
            }
        }
    }
    // one route out of every free port of either end, for crowded ends
    for (from, to, flip) in [(a, b, false), (b, a, true)] {
        for s in canvas.neighbors(from).into_iter().filter(|s| canvas.is_spare(*s)) {
            let Some(mut r) = graph_route(canvas, s, to, Mode::Loose) else { continue };
            if r.contains(&from) {
                continue;
            }
            r.insert(0, s);
            if flip {
                r.reverse();
            }
            if !routes.contains(&r) {
                routes.push(r);
            }
        }
    }
    routes
        .into_iter()
        .map(|r| {
            let walk: Vec<Coord> = [a].into_iter().chain(r).chain([b]).collect();
            let cut = shortcut(&walk, |p, q| canvas.has_edge(p, q));
            cut[1..cut.len() - 1].to_vec()
        })
        .collect()
}

/// Node budget for the search over special-neighbor choices along one route.
const SEARCH_BUDGET: usize = 800;

/// Dense adjacency for the chain search: one bit row per site id, so a
/// local complementation costs a few word operations per neighbor.
struct Bits {
    w: usize,
    rows: Vec<u64>,
    alive: Vec<u64>,
}

impl Bits {
    fn of(g: &Graph, sites: usize) -> Bits {
        let w = sites.div_ceil(64);
        let mut bits = Bits { w, rows: vec![0; sites * w], alive: vec![0; w] };
        for v in g.vertices() {
            set(&mut bits.alive, v as usize);
            for u in g.neighbors(v).into_iter().flatten() {
                let r = bits.row_mut(v as usize);
                set(r, *u as usize);
            }
        }
        bits
    }

    fn mask(&self, vs: impl IntoIterator<Item = VertexId>) -> Vec<u64> {
        let mut m = vec![0; self.w];
        for v in vs {
            set(&mut m, v as usize);
        }
        m
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.w..(v + 1) * self.w]
    }

    fn row_mut(&mut self, v: usize) -> &mut [u64] {
        &mut self.rows[v * self.w..(v + 1) * self.w]
    }

    fn alive(&self, v: usize) -> bool {
        self.alive[v / 64] >> (v % 64) & 1 == 1
    }

    fn lc(&mut self, a: usize) {
        let na = self.row(a).to_vec();
        for u in ones(&na) {
            let r = self.row_mut(u);
            for (x, y) in r.iter_mut().zip(&na) {
                *x ^= y;
            }
            r[u / 64] &= !(1 << (u % 64));
        }
    }

    fn remove(&mut self, v: usize) -> Vec<u64> {
        let n = self.row(v).to_vec();
        for u in ones(&n) {
            self.row_mut(u)[v / 64] &= !(1 << (v % 64));
        }
        self.row_mut(v).fill(0);
        self.alive[v / 64] &= !(1 << (v % 64));
        n
    }

    fn restore(&mut self, v: usize, n: Vec<u64>) {
        for u in ones(&n) {
            set(self.row_mut(u), v);
        }
        self.row_mut(v).copy_from_slice(&n);
        set(&mut self.alive, v);
    }

    /// Graph part of an X measurement of `v` with special neighbor `b0`.
    /// Returns the row `v` had when it was removed.
    fn measure_x(&mut self, v: usize, b0: usize) -> Vec<u64> {
        self.lc(b0);
        self.lc(v);
        let n = self.remove(v);
        self.lc(b0);
        n
    }

    fn undo_x(&mut self, v: usize, b0: usize, n: Vec<u64>) {
        self.lc(b0);
        self.restore(v, n);
        self.lc(v);
        self.lc(b0);
    }
}

fn set(m: &mut [u64], i: usize) {
    m[i / 64] |= 1 << (i % 64);
}

fn ones(m: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (k, &word) in m.iter().enumerate() {
        let mut x = word;
        while x != 0 {
            out.push(k * 64 + x.trailing_zeros() as usize);
            x &= x - 1;
        }
    }
    out
}

/// Depth-first search for special neighbors that make the X chain along
/// `route` leave `expected` as the subgraph induced on `keep`.
struct ChainSearch<'a> {
    spec: GridSpec,
    route: &'a [VertexId],
    a: VertexId,
    b: VertexId,
    keep: &'a [VertexId],
    keep_mask: Vec<u64>,
    /// Rows of the protected sites restricted to `keep`, as they must end up.
    expected: Vec<(usize, Vec<u64>)>,
    /// Full rows of the other protected sites, which the chain must not change.
    bystanders: Vec<(usize, Vec<u64>)>,
    /// Port counts of the open ends; ports may move but stay close.
    ports: &'a [(VertexId, usize)],
    budget: usize,
}

impl ChainSearch<'_> {
    fn near_ports(&self, g: &Bits, v: usize) -> usize {
        let c = self.spec.coord(v as VertexId);
        ones(g.row(v))
            .into_iter()
            .filter(|u| !self.keep.contains(&(*u as VertexId)) && manhattan(self.spec.coord(*u as VertexId), c) <= 2)
            .count()
    }

    fn done(&self, g: &Bits) -> bool {
        self.expected.iter().all(|(k, want)| {
            g.alive(*k) && g.row(*k).iter().zip(&self.keep_mask).zip(want).all(|((x, m), w)| x & m == *w)
        }) && self.bystanders.iter().all(|(p, n)| g.alive(*p) && g.row(*p) == n.as_slice())
            && self.ports.iter().all(|(p, n)| self.near_ports(g, *p as usize) >= *n)
    }

    fn run(&mut self, g: &mut Bits, i: usize, picks: &mut Vec<VertexId>) -> bool {
        if i == self.route.len() {
            return self.done(g);
        }
        let v = self.route[i] as usize;
        if !g.alive(v) {
            return false;
        }
        let prev = if i == 0 { self.a } else { self.route[i - 1] };
        let next = self.route.get(i + 1).copied().unwrap_or(self.b);
        let nbrs = ones(g.row(v));
        let mut order: Vec<usize> =
            [self.a, prev, next, self.b].into_iter().map(|c| c as usize).filter(|c| nbrs.contains(c)).collect();
        order.dedup();
        // ids run in row-major order
        order.extend(nbrs.iter().copied().filter(|c| !order.contains(c)).collect::<Vec<_>>());
        for b0 in order {
            if self.budget == 0 {
                return false;
            }
            self.budget -= 1;
            let removed = g.measure_x(v, b0);
            picks.push(b0 as VertexId);
            if self.run(g, i + 1, picks) {
                return true;
            }
            picks.pop();
            g.undo_x(v, b0, removed);
        }
        false
    }
}

fn induced_path(canvas: &Canvas, a: Coord, route: &[Coord], b: Coord) -> bool {
    let walk: Vec<Coord> = [a].into_iter().chain(route.iter().copied()).chain([b]).collect();
    !canvas.has_edge(a, b)
        && walk.windows(3).all(|w| {
            let n: BTreeSet<Coord> = canvas.neighbors(w[1]).into_iter().collect();
            n == BTreeSet::from([w[0], w[2]])
        })
}

/// How a zipper treats its endpoints.
#[derive(Debug, Clone, Default)]
pub struct ZipperOptions {
    /// Route to try before the computed ones.
    pub preferred: Option<Vec<Coord>>,
    /// Leave spare neighbors of `a` (resp. `b`) in place, e.g. for later branches.
    pub keep_open: [bool; 2],
}

/// Connects `a` and `b` by an X-measured chain and cuts the new pair off from
/// all spare sites.
pub fn zipper_connect(canvas: &mut Canvas, a: Coord, b: Coord) -> Result<ZipperResult> {
    zipper_connect_with(canvas, a, b, &ZipperOptions::default())
}

/// Zipper with explicit endpoint handling.
///
/// Routes are tried in order: the one-turn staircase, then the cheapest
/// route over the current graph (which may cross earlier zippers). Along a
/// route the special neighbor of each X measurement is searched for so that
/// the subgraph induced on the protected sites gains exactly the new edge;
/// the remaining spare neighbors of the pair are then Z-measured.
pub fn zipper_connect_with(canvas: &mut Canvas, a: Coord, b: Coord, opts: &ZipperOptions) -> Result<ZipperResult> {
    for c in [a, b] {
        if !canvas.alive(c) {
            return Err(Error::planning(format!("zipper endpoint {c}"), "site already measured"));
        }
    }
    if a == b {
        return Err(Error::NoPath { from: a, to: b });
    }
    let mut keep: BTreeSet<Coord> = canvas.protected().clone();
    keep.extend([a, b]);
    let ids: Vec<VertexId> = keep.iter().map(|c| canvas.id(*c)).collect();
    let mut expected = canvas.graph().induced(&ids);
    expected.add_edge(canvas.id(a), canvas.id(b))?;

    let routes = candidate_routes(canvas, a, b, opts.preferred.as_deref());
    // Second pass: clear the sides of the route first, leaving an induced
    // path on which the chain always succeeds.
    for clear_sides in [false, true] {
        for route in &routes {
            let mut trial = canvas.clone();
            trial.protect(a);
            trial.protect(b);
            if clear_sides {
                let sides: BTreeSet<Coord> = route
                    .iter()
                    .flat_map(|c| trial.neighbors(*c))
                    .filter(|n| trial.is_spare(*n) && !route.contains(n))
                    .collect();
                trial.measure_z_all(sides, "isolation")?;
            }
            let route_ids: Vec<VertexId> = route.iter().map(|c| trial.id(*c)).collect();
            let bystanders: Vec<(VertexId, BTreeSet<VertexId>)> = ids
                .iter()
                .filter(|v| **v != trial.id(a) && **v != trial.id(b))
                .filter_map(|v| {
                    let n = trial.graph().neighbors(*v).ok()?;
                    Some((*v, n.iter().copied().filter(|u| !route_ids.contains(u)).collect()))
                })
                .collect();
            let ports: Vec<(VertexId, usize)> = [a, b]
                .into_iter()
                .zip(opts.keep_open)
                .filter(|(_, k)| *k)
                .map(|(c, _)| {
                    let n = trial.neighbors(c).into_iter().filter(|n| trial.is_spare(*n) && !route.contains(n));
                    (trial.id(c), n.filter(|n| manhattan(*n, c) <= 2).count())
                })
                .collect();
            let sites = trial.spec().site_count();
            let mut scratch = Bits::of(trial.graph(), sites);
            let keep_mask = scratch.mask(ids.iter().copied());
            let mut search = ChainSearch {
                spec: trial.spec(),
                route: &route_ids,
                a: trial.id(a),
                b: trial.id(b),
                keep: &ids,
                expected: ids
                    .iter()
                    .map(|k| (*k as usize, scratch.mask(expected.neighbors(*k).into_iter().flatten().copied())))
                    .collect(),
                keep_mask,
                bystanders: bystanders.iter().map(|(p, n)| (*p as usize, scratch.mask(n.iter().copied()))).collect(),
                ports: &ports,
                budget: SEARCH_BUDGET,
            };
            let mut isolation: Vec<Coord> = trial.steps()[canvas.steps().len()..].iter().map(|s| s.coord()).collect();
            if clear_sides && induced_path(&trial, a, route, b) {
                // each Y on a degree-two site shortens the path by one
                for c in route {
                    trial.measure(*c, Basis::Y, None, "zipper")?;
                }
            } else {
                let mut picks = Vec::new();
                if !search.run(&mut scratch, 0, &mut picks) {
                    continue;
                }
                for (c, b0) in route.iter().zip(&picks) {
                    trial.measure(*c, Basis::X, Some(trial.coord(*b0)), "zipper")?;
                }
            }
            let close: Vec<Coord> = [a, b].into_iter().zip(opts.keep_open).filter(|(_, k)| !k).map(|(c, _)| c).collect();
            isolation.extend(trial.isolate(&close, "isolation")?);
            // an open end keeps what lies around it but not the far side
            // sites that a straight run attaches to it
            for (c, _) in [a, b].into_iter().zip(opts.keep_open).filter(|(_, k)| *k) {
                let before = canvas.neighbors(c);
                let far: Vec<Coord> = trial
                    .neighbors(c)
                    .into_iter()
                    .filter(|n| trial.is_spare(*n) && !before.contains(n) && manhattan(*n, c) > 2)
                    .collect();
                isolation.extend(far.iter().copied());
                trial.measure_z_all(far, "isolation")?;
            }
            for c in [a, b] {
                if !canvas.is_protected(c) {
                    trial.unprotect(c);
                }
            }
            *canvas = trial;
            return Ok(ZipperResult { path: route.clone(), isolation });
        }
    }
    Err(Error::NoPath { from: a, to: b })
}
